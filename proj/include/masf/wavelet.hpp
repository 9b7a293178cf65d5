#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "masf/field.hpp"

namespace masf {

enum class Subband : std::size_t { ll = 0, lh = 1, hl = 2, hh = 3 };

inline constexpr std::array<Subband, 4> kSubbands = {Subband::ll, Subband::lh, Subband::hl, Subband::hh};

inline const char* subband_name(Subband s) {
  switch (s) {
    case Subband::ll: return "ll";
    case Subband::lh: return "lh";
    case Subband::hl: return "hl";
    case Subband::hh: return "hh";
  }
  return "?";
}

// The four single-level Haar components of a field. All bands share one shape.
class SubbandSet {
 public:
  SubbandSet(Field ll, Field lh, Field hl, Field hh) : bands_{std::move(ll), std::move(lh), std::move(hl), std::move(hh)} {
    for (const Field& b : bands_) require_same_shape(bands_[0], b, "SubbandSet");
  }

  const Field& operator[](Subband s) const { return bands_[static_cast<std::size_t>(s)]; }
  const Field& ll() const { return bands_[0]; }
  const Field& lh() const { return bands_[1]; }
  const Field& hl() const { return bands_[2]; }
  const Field& hh() const { return bands_[3]; }
  const Shape& shape() const { return bands_[0].shape(); }

  // Copy with one band replaced.
  SubbandSet with(Subband s, Field band) const {
    std::array<Field, 4> b = bands_;
    b[static_cast<std::size_t>(s)] = std::move(band);
    return SubbandSet(std::move(b[0]), std::move(b[1]), std::move(b[2]), std::move(b[3]));
  }

  template <class F>
  SubbandSet transform(F&& f) const {
    return SubbandSet(f(Subband::ll, bands_[0]), f(Subband::lh, bands_[1]), f(Subband::hl, bands_[2]),
                      f(Subband::hh, bands_[3]));
  }

 private:
  std::array<Field, 4> bands_;
};

// Orthonormal 2D Haar analysis, per channel. Each 2x2 block [[a, b], [c, d]]
// maps to ll = (a+b+c+d)/2, lh = (a+b-c-d)/2, hl = (a-b+c-d)/2, hh = (a-b-c+d)/2.
inline SubbandSet dwt(const Field& x) {
  if (x.height() % 2 != 0 || x.width() % 2 != 0) {
    throw DimensionError("dwt requires even height and width, got " + x.shape().str());
  }
  const Shape half{x.height() / 2, x.width() / 2, x.channels()};
  std::vector<double> ll(half.size()), lh(half.size()), hl(half.size()), hh(half.size());
  const std::size_t C = x.channels();
  for (std::size_t i = 0; i < half.height; ++i) {
    for (std::size_t j = 0; j < half.width; ++j) {
      for (std::size_t c = 0; c < C; ++c) {
        const double a = x(2 * i, 2 * j, c);
        const double b = x(2 * i, 2 * j + 1, c);
        const double cc = x(2 * i + 1, 2 * j, c);
        const double d = x(2 * i + 1, 2 * j + 1, c);
        const std::size_t k = (i * half.width + j) * C + c;
        ll[k] = 0.5 * ((a + b) + (cc + d));
        lh[k] = 0.5 * ((a + b) - (cc + d));
        hl[k] = 0.5 * ((a - b) + (cc - d));
        hh[k] = 0.5 * ((a - b) - (cc - d));
      }
    }
  }
  return SubbandSet(Field(half, std::move(ll)), Field(half, std::move(lh)), Field(half, std::move(hl)),
                    Field(half, std::move(hh)));
}

inline Field idwt(const SubbandSet& s) {
  const Shape half = s.shape();
  const Shape full{2 * half.height, 2 * half.width, half.channels};
  const std::size_t C = half.channels;
  std::vector<double> out(full.size());
  auto at = [&](std::size_t h, std::size_t w, std::size_t c) -> double& { return out[(h * full.width + w) * C + c]; };
  for (std::size_t i = 0; i < half.height; ++i) {
    for (std::size_t j = 0; j < half.width; ++j) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t k = (i * half.width + j) * C + c;
        const double ll = s.ll()[k], lh = s.lh()[k], hl = s.hl()[k], hh = s.hh()[k];
        at(2 * i, 2 * j, c) = 0.5 * ((ll + lh) + (hl + hh));
        at(2 * i, 2 * j + 1, c) = 0.5 * ((ll + lh) - (hl + hh));
        at(2 * i + 1, 2 * j, c) = 0.5 * ((ll - lh) + (hl - hh));
        at(2 * i + 1, 2 * j + 1, c) = 0.5 * ((ll - lh) - (hl - hh));
      }
    }
  }
  return Field(full, std::move(out));
}

}  // namespace masf
