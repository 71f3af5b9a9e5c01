#pragma once

#include "fsv/config.hpp"

namespace fsv::test {

inline FastSlowSystem system_of(const std::string& name) { return FastSlowSystem(preset(name).system); }

inline IVector box(std::initializer_list<std::pair<double, double>> xs) {
  IVector v(xs.size());
  std::size_t i = 0;
  for (auto& [lo, hi] : xs) v[i++] = Interval(lo, hi);
  return v;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace fsv::test
