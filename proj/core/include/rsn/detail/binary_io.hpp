#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "rsn/error.hpp"

// Little-endian primitives shared by the binary file formats.

namespace rsn::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts would need "
              "swaps here");

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    fail(errc::truncated_file, "unexpected end of file");
  return value;
}

inline void write_string16(std::ostream& out, const std::string& s) {
  if (s.size() > 0xFFFF) fail(errc::io_failure, "string too long");
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string16(std::istream& in) {
  const auto len = read_le<std::uint16_t>(in);
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len))
    fail(errc::truncated_file, "unexpected end of file");
  return s;
}

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char buf[4];
  if (!in.read(buf, 4)) fail(errc::truncated_file, "file shorter than magic");
  if (std::memcmp(buf, magic, 4) != 0)
    fail(errc::bad_magic, std::string("expected magic \"") + magic + '"');
}

}  // namespace rsn::detail
