#pragma once

#include <stdexcept>
#include <string>

namespace masf {

// Shapes disagree, or a dimension is unusable (odd size for the DWT, zero extent).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value is NaN/Inf where a finite value is required.
class ValidityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scalar argument is out of its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The noise schedule cannot support the requested operation (e.g. alpha_bar <= 0).
class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// alpha_bar_t == 1, so the noise direction is undefined.
class DegenerateTimestepError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed config / field file / manifest.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace masf
