#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "masf/errors.hpp"

namespace masf {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const { return height * width * channels; }
  bool operator==(const Shape&) const = default;

  std::string str() const {
    std::ostringstream os;
    os << height << "x" << width << "x" << channels;
    return os.str();
  }
};

// Dense H x W x C grid of doubles, row-major in (h, w, c). Immutable after
// construction; every value is finite.
class Field {
 public:
  explicit Field(Shape shape, double fill = 0.0) : Field(shape, std::vector<double>(shape.size(), fill)) {}

  Field(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    if (shape_.height == 0 || shape_.width == 0 || shape_.channels == 0) {
      throw DimensionError("field dimensions must be positive, got " + shape_.str());
    }
    if (data_.size() != shape_.size()) {
      throw DimensionError("field data length " + std::to_string(data_.size()) + " does not match shape " +
                           shape_.str());
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw ValidityError("field contains a non-finite value");
    }
  }

  Field(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0)
      : Field(Shape{height, width, channels}, fill) {}

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> values() const& { return data_; }
  std::span<const double> values() const&& = delete;  // would dangle
  double operator[](std::size_t i) const { return data_[i]; }
  double operator()(std::size_t h, std::size_t w, std::size_t c) const { return data_[index(h, w, c)]; }

  std::size_t index(std::size_t h, std::size_t w, std::size_t c) const {
    return (h * shape_.width + w) * shape_.channels + c;
  }

  // Elementwise transform; the result must stay finite.
  template <class F>
  Field map(F&& f) const {
    std::vector<double> out(data_.size());
    std::transform(data_.begin(), data_.end(), out.begin(), std::forward<F>(f));
    return Field(shape_, std::move(out));
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

inline void require_same_shape(const Field& a, const Field& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  }
}

template <class F>
Field zip_with(const Field& a, const Field& b, F&& f, const char* what = "zip_with") {
  require_same_shape(a, b, what);
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
  return Field(a.shape(), std::move(out));
}

enum class Combine { add, sub, mul };

inline Field elementwise_combine(const Field& a, const Field& b, Combine op) {
  switch (op) {
    case Combine::add:
      return zip_with(a, b, [](double x, double y) { return x + y; }, "add");
    case Combine::sub:
      return zip_with(a, b, [](double x, double y) { return x - y; }, "sub");
    case Combine::mul:
      return zip_with(a, b, [](double x, double y) { return x * y; }, "mul");
  }
  throw ParameterError("unknown combine op");
}

// (1 - coef) * a + coef * b, elementwise; coef must lie in [0, 1].
inline Field lerp(const Field& a, const Field& b, const Field& coef) {
  require_same_shape(a, b, "lerp");
  require_same_shape(a, coef, "lerp");
  auto av = a.values();
  auto bv = b.values();
  auto cv = coef.values();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (cv[i] < 0.0 || cv[i] > 1.0) throw ParameterError("lerp coefficient outside [0, 1]");
    out[i] = (1.0 - cv[i]) * av[i] + cv[i] * bv[i];
  }
  return Field(a.shape(), std::move(out));
}

inline Field abs_diff(const Field& a, const Field& b) {
  return zip_with(a, b, [](double x, double y) { return std::abs(x - y); }, "abs_diff");
}

inline Field operator+(const Field& a, const Field& b) { return elementwise_combine(a, b, Combine::add); }
inline Field operator-(const Field& a, const Field& b) { return elementwise_combine(a, b, Combine::sub); }
inline Field operator*(double s, const Field& a) {
  return a.map([s](double x) { return s * x; });
}
inline Field operator-(const Field& a) {
  return a.map([](double x) { return -x; });
}

// alpha * a + beta * b
inline Field axpby(double alpha, const Field& a, double beta, const Field& b) {
  return zip_with(a, b, [alpha, beta](double x, double y) { return alpha * x + beta * y; }, "axpby");
}

inline double sum_squares(const Field& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

inline double l2_norm(const Field& a) { return std::sqrt(sum_squares(a)); }

inline double l2_distance(const Field& a, const Field& b) {
  require_same_shape(a, b, "l2_distance");
  double s = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += (av[i] - bv[i]) * (av[i] - bv[i]);
  return std::sqrt(s);
}

inline double max_abs_diff(const Field& a, const Field& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

inline bool bitwise_equal(const Field& a, const Field& b) {
  if (a.shape() != b.shape()) return false;
  return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace masf
