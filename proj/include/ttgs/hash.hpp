#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ttgs {

using Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256, used for predictor fingerprints, dataset content
// hashes, and graph cache keys.
class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  ~Sha256();

  void update(const void* data, std::size_t len);
  void update(std::string_view s) { update(s.data(), s.size()); }
  Digest finish();

  static Digest of(std::string_view s);

 private:
  void* ctx_;
};

std::string hex(const Digest& d);

}  // namespace ttgs
