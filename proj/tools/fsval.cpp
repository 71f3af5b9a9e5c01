#include "fsv/app.hpp"

int main(int argc, char** argv) { return fsv::run_cli(argc, argv); }
