#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "rledger/errors.hpp"

namespace rledger {

using u128 = unsigned __int128;

/// Non-negative token quantity in base units. All arithmetic is checked:
/// overflow and underflow throw instead of wrapping.
class TokenAmount {
public:
    constexpr TokenAmount() = default;
    constexpr TokenAmount(u128 v) : value_(v) {}  // NOLINT(implicit)

    constexpr u128 value() const { return value_; }
    constexpr bool is_zero() const { return value_ == 0; }

    friend constexpr auto operator<=>(TokenAmount, TokenAmount) = default;

    friend TokenAmount operator+(TokenAmount a, TokenAmount b) {
        u128 r = a.value_ + b.value_;
        if (r < a.value_) throw OverflowError("token amount addition overflows 128 bits");
        return TokenAmount{r};
    }
    friend TokenAmount operator-(TokenAmount a, TokenAmount b) {
        if (b.value_ > a.value_) throw UnderflowError("token amount subtraction would go negative");
        return TokenAmount{a.value_ - b.value_};
    }
    friend TokenAmount operator*(TokenAmount a, std::uint64_t k) {
        if (k != 0 && a.value_ > static_cast<u128>(-1) / k)
            throw OverflowError("token amount multiplication overflows 128 bits");
        return TokenAmount{a.value_ * k};
    }
    TokenAmount& operator+=(TokenAmount o) { return *this = *this + o; }
    TokenAmount& operator-=(TokenAmount o) { return *this = *this - o; }

    /// max(a - b, 0)
    friend constexpr TokenAmount saturating_sub(TokenAmount a, TokenAmount b) {
        return TokenAmount{a.value_ > b.value_ ? a.value_ - b.value_ : 0};
    }

    std::string to_string() const {
        if (value_ == 0) return "0";
        std::string out;
        for (u128 v = value_; v != 0; v /= 10) out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        return out;
    }

    /// Parses a decimal literal. Returns nullopt on empty input, non-digits, or overflow.
    static std::optional<TokenAmount> parse(std::string_view s) {
        if (s.empty()) return std::nullopt;
        u128 v = 0;
        constexpr u128 max = static_cast<u128>(-1);
        for (char c : s) {
            if (c < '0' || c > '9') return std::nullopt;
            const unsigned d = static_cast<unsigned>(c - '0');
            if (v > (max - d) / 10) return std::nullopt;
            v = v * 10 + d;
        }
        return TokenAmount{v};
    }

private:
    u128 value_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, TokenAmount a) { return os << a.to_string(); }

inline TokenAmount min(TokenAmount a, TokenAmount b) { return a < b ? a : b; }

using BlockNumber = std::uint64_t;
using Seq = std::uint64_t;

/// Opaque account identifier.
struct Address {
    std::string id;

    Address() = default;
    explicit Address(std::string s) : id(std::move(s)) {}

    friend auto operator<=>(const Address&, const Address&) = default;
    friend bool operator==(const Address&, const Address&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Address& a) { return os << a.id; }

/// 256-bit opaque identifier (claim IDs, NFT token IDs, beacon seeds, salts).
struct Hash256 {
    std::array<std::uint8_t, 32> bytes{};

    friend auto operator<=>(const Hash256&, const Hash256&) = default;

    std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(64);
        for (auto b : bytes) {
            out.push_back(digits[b >> 4]);
            out.push_back(digits[b & 0xf]);
        }
        return out;
    }

    /// Accepts up to 64 hex digits (optionally 0x-prefixed, right-aligned) or a
    /// decimal integer below 2^128 (stored big-endian in the low 16 bytes).
    static std::optional<Hash256> parse(std::string_view s) {
        Hash256 h;
        if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
            s.remove_prefix(2);
            if (s.empty() || s.size() > 64) return std::nullopt;
            std::size_t nibble = 64 - s.size();
            for (char c : s) {
                int v;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else return std::nullopt;
                auto& byte = h.bytes[nibble / 2];
                byte = static_cast<std::uint8_t>(nibble % 2 == 0 ? (v << 4) : (byte | v));
                ++nibble;
            }
            return h;
        }
        auto amount = TokenAmount::parse(s);
        if (!amount) return std::nullopt;
        return from_u128(amount->value());
    }

    static Hash256 from_u128(u128 v) {
        Hash256 h;
        for (int i = 31; i >= 16; --i) {
            h.bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
            v >>= 8;
        }
        return h;
    }
};

inline std::ostream& operator<<(std::ostream& os, const Hash256& h) { return os << h.hex(); }

using ClaimId = Hash256;
using TokenId = Hash256;

}  // namespace rledger

template <>
struct std::hash<rledger::Address> {
    std::size_t operator()(const rledger::Address& a) const noexcept { return std::hash<std::string>{}(a.id); }
};
