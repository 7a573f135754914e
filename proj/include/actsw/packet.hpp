#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "actsw/mac.hpp"
#include "actsw/rng.hpp"

namespace actsw {

inline std::string ipv4_to_string(std::uint32_t ip) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xff,
                  (ip >> 16) & 0xff, (ip >> 8) & 0xff, ip & 0xff);
    return buf;
}

inline std::optional<std::uint32_t> parse_ipv4(const std::string& text) {
    unsigned a, b, c, d;
    char tail;
    if (std::sscanf(text.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4)
        return std::nullopt;
    if (a > 255 || b > 255 || c > 255 || d > 255) return std::nullopt;
    return (a << 24) | (b << 16) | (c << 8) | d;
}

// L3/L4 flow identity. L2 fields are deliberately excluded: the annotation
// scheme repurposes them, so they cannot identify a flow.
struct FlowKey {
    std::uint32_t src_ip = 0;
    std::uint32_t dst_ip = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t protocol = 0;

    auto operator<=>(const FlowKey&) const = default;

    std::string to_string() const {
        return ipv4_to_string(src_ip) + ":" + std::to_string(src_port) + ">" +
               ipv4_to_string(dst_ip) + ":" + std::to_string(dst_port) + "/" +
               std::to_string(protocol);
    }

    // Stable across platforms; std::hash is not.
    std::uint64_t hash() const {
        return mix64((std::uint64_t(src_ip) << 32) | dst_ip,
                     (std::uint64_t(src_port) << 16) | dst_port, protocol);
    }
};

inline FlowKey reverse_flow_key(const FlowKey& k) {
    return FlowKey{k.dst_ip, k.src_ip, k.dst_port, k.src_port, k.protocol};
}

// downstream = external network toward hosts, upstream = hosts back out.
enum class Direction : std::uint8_t { downstream, upstream };

inline const char* to_string(Direction d) {
    return d == Direction::downstream ? "downstream" : "upstream";
}

// The simulated packet. payload_id is a monotone provenance tag assigned at
// injection; no dataplane element may alter it (tests rely on it to
// correlate packets across header-mangling middleboxes).
struct SimPacket {
    MacAddress dst_mac{};
    MacAddress src_mac{};
    std::uint8_t dscp = 0;  // 6 bits
    FlowKey flow{};
    Direction direction = Direction::downstream;
    std::uint64_t payload_id = 0;

    bool operator==(const SimPacket&) const = default;
};

}  // namespace actsw
