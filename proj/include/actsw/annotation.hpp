#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "actsw/mac.hpp"

namespace actsw {

// A hop path is the ordered list of egress port (or device) identifiers a
// packet should be emitted through, first hop first. Octet-mode identifiers
// are 1..253, nibble-mode 1..14.
using HopPath = std::vector<std::uint8_t>;

inline constexpr std::size_t kMaxOctetHops = 5;
inline constexpr std::size_t kMaxExtendedHops = 10;
inline constexpr std::size_t kMaxNibbleHops = 10;

enum class AnnotationMode { octet, nibble, extended, destination };

inline const char* to_string(AnnotationMode m) {
    switch (m) {
        case AnnotationMode::octet: return "octet";
        case AnnotationMode::nibble: return "nibble";
        case AnnotationMode::extended: return "extended";
        case AnnotationMode::destination: return "destination";
    }
    return "?";
}

class EncodeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class DecodeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// dst/src header pair used by the 10-hop extended layout. For paths of five
// hops or fewer src stays all-zero and dst carries the whole annotation.
struct AnnotationPair {
    MacAddress dst{};
    MacAddress src{};

    bool operator==(const AnnotationPair&) const = default;
};

inline bool octet_port_valid(std::uint8_t p) {
    return p != kOctetExhausted && p != kOctetSwapMark && p != kOctetHostMark;
}

inline bool nibble_port_valid(std::uint8_t p) { return p >= 0x1 && p <= 0xe; }

namespace detail {

// Shared fold: seed the low octet, then for each hop (last first) shift left
// one octet and place the hop in the freed octet. The seed ends up
// immediately above the last hop.
inline MacAddress fold_octets(const HopPath& path, std::uint8_t seed) {
    std::uint64_t v = seed;
    for (auto it = path.rbegin(); it != path.rend(); ++it)
        v = ((v << 8) | *it) & MacAddress::kMask;
    return MacAddress{v};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Octet layout (basic five-hop fabric annotation)

// Internal variant used by re-annotation planning: the terminal octet may be
// a lookup-table index (1..253) or 0x00 (hand the residue to the controller)
// instead of the host sentinel.
inline MacAddress encode_octet_path_with_tail(const HopPath& path,
                                              std::uint8_t tail) {
    if (path.size() > kMaxOctetHops)
        throw EncodeError("octet path longer than " +
                          std::to_string(kMaxOctetHops) + " hops");
    if (tail == kOctetSwapMark || tail == kOctetHostMark)
        throw EncodeError("reserved tail octet");
    for (std::uint8_t p : path)
        if (!octet_port_valid(p))
            throw EncodeError("reserved port identifier in path");
    return detail::fold_octets(path, tail);
}

inline MacAddress encode_octet_path(const HopPath& path) {
    return encode_octet_path_with_tail(path, kOctetHostMark);
}

enum class StepKind {
    forward,    // port extracted, remainder valid
    deliver,    // host sentinel: hand the packet to the attached host
    exhausted,  // zero marker: nothing left to consume
    swap,       // 0xFE marker: move src annotation into dst (extended layout)
    malformed,  // ill-formed annotation
};

inline const char* to_string(StepKind k) {
    switch (k) {
        case StepKind::forward: return "forward";
        case StepKind::deliver: return "deliver";
        case StepKind::exhausted: return "exhausted";
        case StepKind::swap: return "swap";
        case StepKind::malformed: return "malformed";
    }
    return "?";
}

struct Step {
    StepKind kind = StepKind::malformed;
    std::uint8_t port = 0;
    MacAddress remainder{};
};

inline Step shift_octet(MacAddress annotation) {
    std::uint8_t low = annotation.low_octet();
    if (low == kOctetHostMark) return {StepKind::deliver, 0, annotation};
    if (low == kOctetExhausted) return {StepKind::exhausted, 0, annotation};
    if (low == kOctetSwapMark) return {StepKind::swap, 0, annotation};
    return {StepKind::forward, low, MacAddress{annotation.value >> 8}};
}

// ---------------------------------------------------------------------------
// Nibble layout (mesh hop-by-hop annotation, up to ten 4-bit hops)

inline MacAddress encode_nibble_path(const HopPath& path) {
    if (path.size() > kMaxNibbleHops)
        throw EncodeError("nibble path longer than " +
                          std::to_string(kMaxNibbleHops) + " hops");
    for (std::uint8_t p : path)
        if (!nibble_port_valid(p))
            throw EncodeError("reserved nibble identifier in path");
    std::uint64_t v = 0xff;
    for (auto it = path.rbegin(); it != path.rend(); ++it)
        v = ((v << 4) | *it) & MacAddress::kMask;
    return MacAddress{v};
}

inline Step shift_nibble(MacAddress annotation) {
    std::uint8_t low = annotation.low_nibble();
    if (low == 0xf) return {StepKind::deliver, 0, annotation};
    if (low == 0x0) return {StepKind::exhausted, 0, annotation};
    return {StepKind::forward, low, MacAddress{annotation.value >> 4}};
}

// ---------------------------------------------------------------------------
// Extended layout (up to ten octet hops split across dst and src)

inline AnnotationPair encode_extended_path_with_tail(const HopPath& path,
                                                     std::uint8_t tail) {
    if (path.size() > kMaxExtendedHops)
        throw EncodeError("extended path longer than " +
                          std::to_string(kMaxExtendedHops) + " hops");
    if (path.size() <= kMaxOctetHops)
        return {encode_octet_path_with_tail(path, tail), kZeroMac};
    if (tail == kOctetSwapMark || tail == kOctetHostMark)
        throw EncodeError("reserved tail octet");
    for (std::uint8_t p : path)
        if (!octet_port_valid(p))
            throw EncodeError("reserved port identifier in path");
    HopPath head(path.begin(), path.begin() + kMaxOctetHops);
    HopPath rest(path.begin() + kMaxOctetHops, path.end());
    MacAddress dst = detail::fold_octets(head, kOctetSwapMark);
    MacAddress src = detail::fold_octets(rest, tail);
    return {dst, src};
}

inline AnnotationPair encode_extended_path(const HopPath& path) {
    return encode_extended_path_with_tail(path, kOctetHostMark);
}

struct ExtendedStep {
    StepKind kind = StepKind::malformed;
    std::uint8_t port = 0;
    AnnotationPair headers{};
};

// Mirrors the two-rule edge behavior: a 0xFE low octet moves the src
// annotation into dst (zeroing src) and the shift then proceeds on the new
// dst. Everything else is a plain octet shift that leaves src untouched.
inline ExtendedStep step_extended(AnnotationPair headers) {
    Step s = shift_octet(headers.dst);
    if (s.kind == StepKind::swap) {
        AnnotationPair swapped{headers.src, kZeroMac};
        Step t = shift_octet(swapped.dst);
        if (t.kind != StepKind::forward) return {StepKind::malformed, 0, headers};
        return {StepKind::forward, t.port, {t.remainder, kZeroMac}};
    }
    if (s.kind != StepKind::forward) return {s.kind, 0, headers};
    return {StepKind::forward, s.port, {s.remainder, headers.src}};
}

// ---------------------------------------------------------------------------
// Decoding (inverse of the encoders; also the loop used by trace checks)

inline HopPath decode_octet_path(MacAddress annotation) {
    HopPath out;
    for (std::size_t i = 0; i <= kMaxOctetHops; ++i) {
        Step s = shift_octet(annotation);
        if (s.kind == StepKind::deliver) {
            if (annotation != kHostSentinel)
                throw DecodeError("junk above host sentinel: " +
                                  annotation.to_string());
            return out;
        }
        if (s.kind != StepKind::forward)
            throw DecodeError("unexpected " + std::string(to_string(s.kind)) +
                              " octet in " + annotation.to_string());
        out.push_back(s.port);
        annotation = s.remainder;
    }
    throw DecodeError("no host sentinel within octet capacity");
}

inline HopPath decode_nibble_path(MacAddress annotation) {
    HopPath out;
    for (std::size_t i = 0; i <= kMaxNibbleHops; ++i) {
        Step s = shift_nibble(annotation);
        if (s.kind == StepKind::deliver) {
            if (annotation != kHostSentinel)
                throw DecodeError("junk above host sentinel: " +
                                  annotation.to_string());
            return out;
        }
        if (s.kind != StepKind::forward)
            throw DecodeError("unexpected " + std::string(to_string(s.kind)) +
                              " nibble in " + annotation.to_string());
        out.push_back(s.port);
        annotation = s.remainder;
    }
    throw DecodeError("no host sentinel within nibble capacity");
}

inline HopPath decode_extended_path(AnnotationPair headers) {
    HopPath out;
    for (std::size_t i = 0; i <= kMaxExtendedHops; ++i) {
        ExtendedStep s = step_extended(headers);
        if (s.kind == StepKind::deliver) {
            if (headers.dst != kHostSentinel)
                throw DecodeError("junk above host sentinel: " +
                                  headers.dst.to_string());
            return out;
        }
        if (s.kind != StepKind::forward)
            throw DecodeError("unexpected " + std::string(to_string(s.kind)) +
                              " octet in " + headers.dst.to_string());
        out.push_back(s.port);
        headers = s.headers;
    }
    throw DecodeError("no host sentinel within extended capacity");
}

inline HopPath decode_path(const AnnotationPair& headers, AnnotationMode mode) {
    switch (mode) {
        case AnnotationMode::octet:
        case AnnotationMode::destination:
            return decode_octet_path(headers.dst);
        case AnnotationMode::nibble:
            return decode_nibble_path(headers.dst);
        case AnnotationMode::extended:
            return decode_extended_path(headers);
    }
    throw DecodeError("unknown annotation mode");
}

inline HopPath decode_path(MacAddress annotation, AnnotationMode mode) {
    return decode_path(AnnotationPair{annotation, kZeroMac}, mode);
}

}  // namespace actsw
