#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "rledger/types.hpp"

namespace rledger {

/// Incremental SHA-256 over byte sequences, backed by libcrypto.
class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr); }

    Sha256& update(std::span<const std::uint8_t> bytes) {
        EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size());
        return *this;
    }
    Sha256& update(std::string_view s) {
        EVP_DigestUpdate(ctx_.get(), s.data(), s.size());
        return *this;
    }
    Sha256& update(const Hash256& h) { return update(std::span<const std::uint8_t>(h.bytes)); }
    Sha256& update_u64(std::uint64_t v) {
        std::uint8_t buf[8];
        for (int i = 7; i >= 0; --i) {
            buf[i] = static_cast<std::uint8_t>(v & 0xff);
            v >>= 8;
        }
        return update(std::span<const std::uint8_t>(buf, 8));
    }
    Sha256& update_byte(std::uint8_t b) { return update(std::span<const std::uint8_t>(&b, 1)); }

    Hash256 finish() {
        Hash256 out;
        EVP_DigestFinal_ex(ctx_.get(), out.bytes.data(), nullptr);
        return out;
    }

private:
    struct Free {
        void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
    };
    std::unique_ptr<EVP_MD_CTX, Free> ctx_;
};

inline std::uint64_t leading_u64(const Hash256& h) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | h.bytes[i];
    return v;
}

}  // namespace rledger
