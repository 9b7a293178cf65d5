#pragma once

#include <random>
#include <vector>

#include "masf/field.hpp"

namespace masf::testing {

inline Field random_field(const Shape& shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(shape.size());
  for (double& x : v) x = u(rng);
  return Field(shape, std::move(v));
}

inline Field from_values(const Shape& shape, std::vector<double> v) { return Field(shape, std::move(v)); }

}  // namespace masf::testing
