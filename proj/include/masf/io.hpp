#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "masf/errors.hpp"
#include "masf/field.hpp"

namespace masf::io {

// Field file: "MASF", u32 version, u32 H, u32 W, u32 C, then H*W*C f64, all little-endian.
inline constexpr char kFieldMagic[4] = {'M', 'A', 'S', 'F'};
inline constexpr std::uint32_t kFieldVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
bool get_le(std::istream& is, T& v) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&v, bytes, sizeof(T));
  return true;
}

}  // namespace detail

inline void write_field(std::ostream& os, const Field& f) {
  os.write(kFieldMagic, 4);
  detail::put_le<std::uint32_t>(os, kFieldVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.height()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.width()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.channels()));
  for (double v : f.values()) detail::put_le<double>(os, v);
}

// Reads one record. Returns false on clean EOF before the magic.
inline bool read_field(std::istream& is, std::optional<Field>& out) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() == 0 && is.eof()) return false;
  if (is.gcount() != 4 || std::memcmp(magic, kFieldMagic, 4) != 0) throw FormatError("field file: bad magic");
  std::uint32_t version = 0, h = 0, w = 0, c = 0;
  if (!detail::get_le(is, version) || !detail::get_le(is, h) || !detail::get_le(is, w) || !detail::get_le(is, c)) {
    throw FormatError("field file: truncated header");
  }
  if (version != kFieldVersion) throw FormatError("field file: unsupported version " + std::to_string(version));
  const Shape shape{h, w, c};
  std::vector<double> data(shape.size());
  for (double& v : data) {
    if (!detail::get_le(is, v)) throw FormatError("field file: truncated data");
  }
  out.emplace(shape, std::move(data));
  return true;
}

inline void save_field(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_field(os, f);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

// All records in a file; a dataset is several field records back to back.
inline std::vector<Field> load_fields(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::vector<Field> out;
  std::optional<Field> f;
  while (read_field(is, f)) out.push_back(std::move(*f));
  if (out.empty()) throw FormatError("field file " + path.string() + " holds no records");
  return out;
}

inline Field load_field(const std::filesystem::path& path) {
  std::vector<Field> all = load_fields(path);
  if (all.size() != 1) throw FormatError("expected a single field in " + path.string());
  return std::move(all.front());
}

inline void save_fields(const std::filesystem::path& path, const std::vector<Field>& fields) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const Field& f : fields) write_field(os, f);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

// [-1, 1] -> [0, 255], clamped.
inline unsigned char to_byte(double v) {
  const double s = std::round((std::clamp(v, -1.0, 1.0) + 1.0) * 127.5);
  return static_cast<unsigned char>(s);
}

// Binary PGM for C != 3 (first channel), PPM for C == 3. Returns the path written.
inline std::filesystem::path save_preview(const std::filesystem::path& stem, const Field& f) {
  const bool rgb = f.channels() == 3;
  std::filesystem::path path = stem;
  path += rgb ? ".ppm" : ".pgm";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << (rgb ? "P6" : "P5") << "\n" << f.width() << " " << f.height() << "\n255\n";
  for (std::size_t h = 0; h < f.height(); ++h) {
    for (std::size_t w = 0; w < f.width(); ++w) {
      if (rgb) {
        for (std::size_t c = 0; c < 3; ++c) os.put(static_cast<char>(to_byte(f(h, w, c))));
      } else {
        os.put(static_cast<char>(to_byte(f(h, w, 0))));
      }
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
  return path;
}

// RFC 4180 field quoting.
inline std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

// Shortest text that round-trips the double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : os_(path, std::ios::binary) {
    if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << csv_quote(cells[i]);
    }
    os_ << "\r\n";
    if (!os_) throw std::runtime_error("csv write failed");
  }

 private:
  std::ofstream os_;
};

}  // namespace masf::io
