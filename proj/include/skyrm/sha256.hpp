#pragma once
#include <cstddef>
#include <cstdint>
#include <string>

namespace skyrm {

// Compact SHA-256 (FIPS 180-4). Used for output digests in run manifests and
// for deriving RNG stream ids from parameter tuples.
class Sha256 {
  public:
    Sha256() { reset(); }
    void reset();
    void update(const void* data, std::size_t len);
    // 32-byte digest; finalizes a copy, so update() may continue.
    void digest(std::uint8_t out[32]) const;
    std::string hex() const;

    static std::string hex_of(const std::string& bytes);
    static std::string hex_of_file(const std::string& path);
    // First 8 digest bytes as big-endian u64; stream-splitting helper.
    static std::uint64_t hash64(const std::string& bytes);

  private:
    void compress(const std::uint8_t block[64]);
    std::uint32_t h_[8];
    std::uint8_t buf_[64];
    std::uint64_t total_ = 0;
    std::size_t fill_ = 0;
};

} // namespace skyrm
