#pragma once

// Little-endian byte plumbing shared by the dataset and graph cache formats.

#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <string>

#include "ttgs/types.hpp"

namespace ttgs::detail {

using Sink = std::function<void(const void*, std::size_t)>;

inline void put_u8(const Sink& sink, std::uint8_t v) { sink(&v, 1); }

inline void put_u32(const Sink& sink, std::uint32_t v) {
  std::uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  sink(b, 4);
}

inline void put_u64(const Sink& sink, std::uint64_t v) {
  std::uint8_t b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  sink(b, 8);
}

inline void put_f32(const Sink& sink, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(sink, bits);
}

inline void put_f64(const Sink& sink, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(sink, bits);
}

// Counts consumed bytes so truncation errors can report the exact offset.
class ByteReader {
 public:
  ByteReader(std::istream& in, std::string name)
      : in_(in), name_(std::move(name)) {}

  void read_exact(void* out, std::size_t n) {
    in_.read(static_cast<char*>(out), static_cast<std::streamsize>(n));
    const std::streamsize got = in_.gcount();
    if (static_cast<std::size_t>(got) != n) {
      throw InputError(name_ + ": truncated file at byte offset " +
                       std::to_string(offset_ +
                                      static_cast<std::size_t>(
                                          got > 0 ? got : 0)));
    }
    offset_ += n;
  }

  std::uint8_t u8() {
    std::uint8_t v;
    read_exact(&v, 1);
    return v;
  }

  std::uint32_t u32() {
    std::uint8_t b[4];
    read_exact(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    std::uint8_t b[8];
    read_exact(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t offset_ = 0;
};

}  // namespace ttgs::detail
