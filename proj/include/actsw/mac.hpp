#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

namespace actsw {

// A 48-bit MAC address value. Octet 0 is the least significant octet,
// i.e. the rightmost group in the textual form "aa:bb:cc:dd:ee:ff".
struct MacAddress {
    static constexpr std::uint64_t kMask = 0xffffffffffffULL;

    std::uint64_t value = 0;

    constexpr MacAddress() = default;
    constexpr explicit MacAddress(std::uint64_t v) : value(v & kMask) {}

    constexpr std::uint8_t octet(int i) const {
        return static_cast<std::uint8_t>((value >> (8 * i)) & 0xff);
    }
    constexpr std::uint8_t low_octet() const { return octet(0); }
    constexpr std::uint8_t low_nibble() const {
        return static_cast<std::uint8_t>(value & 0xf);
    }
    constexpr bool is_zero() const { return value == 0; }

    auto operator<=>(const MacAddress&) const = default;

    std::string to_string() const {
        char buf[18];
        std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                      octet(5), octet(4), octet(3), octet(2), octet(1),
                      octet(0));
        return buf;
    }

    // Accepts either case; rendering is always lowercase.
    static std::optional<MacAddress> parse(const std::string& text) {
        if (text.size() != 17) return std::nullopt;
        std::uint64_t v = 0;
        for (int i = 0; i < 6; ++i) {
            if (i > 0 && text[i * 3 - 1] != ':') return std::nullopt;
            int hi = hex_digit(text[i * 3]);
            int lo = hex_digit(text[i * 3 + 1]);
            if (hi < 0 || lo < 0) return std::nullopt;
            v = (v << 8) | static_cast<std::uint64_t>(hi * 16 + lo);
        }
        return MacAddress{v};
    }

  private:
    static int hex_digit(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }
};

// Residual annotation addressing the attached host. Every host interface in
// an actively switched network is configured with this address.
inline constexpr MacAddress kHostSentinel{0xffULL};
inline constexpr MacAddress kZeroMac{0};

// Reserved octet values inside annotations.
inline constexpr std::uint8_t kOctetExhausted = 0x00;
inline constexpr std::uint8_t kOctetSwapMark = 0xfe;
inline constexpr std::uint8_t kOctetHostMark = 0xff;

}  // namespace actsw
