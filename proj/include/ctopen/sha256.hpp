#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ctopen {

// SHA-256 (FIPS 180-4). Used for cache content addressing, stable question
// ids and record/replay request digests, so digests must match bit-for-bit
// across platforms.
class Sha256 {
  public:
    Sha256();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::string hex_digest();  // finalizes; lowercase hex

    static std::string hex(std::string_view s);

  private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint8_t buffer_[64];
    std::uint64_t total_len_ = 0;
    std::size_t buffer_len_ = 0;
    bool finalized_ = false;
};

}  // namespace ctopen
