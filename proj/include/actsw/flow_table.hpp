#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "actsw/annotation.hpp"
#include "actsw/mac.hpp"
#include "actsw/packet.hpp"

namespace actsw {

// Header fields the action primitives can address.
enum class PacketField : std::uint8_t { dst_mac, src_mac, dscp };

inline int field_width(PacketField f) {
    return f == PacketField::dscp ? 6 : 48;
}

inline const char* to_string(PacketField f) {
    switch (f) {
        case PacketField::dst_mac: return "dst_mac";
        case PacketField::src_mac: return "src_mac";
        case PacketField::dscp: return "dscp";
    }
    return "?";
}

// The three register extensions plus constant set, fixed output and punt.
// Registers are 64-bit, allocated per packet and zero-initialized.
struct LoadField {  // reg <- field[bit_offset .. bit_offset+bit_len)
    PacketField field;
    std::uint8_t bit_offset;
    std::uint8_t bit_len;
    std::uint8_t reg;
};
struct StoreField {  // field[bit_offset .. bit_offset+bit_len) <- reg
    std::uint8_t reg;
    PacketField field;
    std::uint8_t bit_offset;
    std::uint8_t bit_len;
};
struct SetField {  // field <- constant
    PacketField field;
    std::uint64_t value;
};
struct OutputFixed {
    std::uint8_t port;
};
struct OutputRegister {  // port taken from the low 8 bits of the register
    std::uint8_t reg;
};
struct ToController {};

using ActionPrimitive = std::variant<LoadField, StoreField, SetField,
                                     OutputFixed, OutputRegister, ToController>;
using ActionProgram = std::vector<ActionPrimitive>;

inline constexpr int kRegisterCount = 4;

class ActionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline void validate_action(const ActionPrimitive& a) {
    auto check_bits = [](PacketField f, int off, int len, int reg) {
        if (off + len > field_width(f))
            throw ActionError("bit range exceeds field width");
        if (len == 0) throw ActionError("zero-length bit range");
        if (reg >= kRegisterCount) throw ActionError("register out of range");
    };
    if (const auto* l = std::get_if<LoadField>(&a))
        check_bits(l->field, l->bit_offset, l->bit_len, l->reg);
    else if (const auto* s = std::get_if<StoreField>(&a))
        check_bits(s->field, s->bit_offset, s->bit_len, s->reg);
    else if (const auto* o = std::get_if<OutputRegister>(&a)) {
        if (o->reg >= kRegisterCount)
            throw ActionError("register out of range");
    }
}

inline std::string to_string(const ActionPrimitive& a) {
    std::ostringstream os;
    if (const auto* l = std::get_if<LoadField>(&a))
        os << "load(" << to_string(l->field) << "," << int(l->bit_offset)
           << "," << int(l->bit_len) << ",r" << int(l->reg) << ")";
    else if (const auto* s = std::get_if<StoreField>(&a))
        os << "store(r" << int(s->reg) << "," << to_string(s->field) << ","
           << int(s->bit_offset) << "," << int(s->bit_len) << ")";
    else if (const auto* t = std::get_if<SetField>(&a)) {
        if (t->field == PacketField::dscp)
            os << "set(dscp," << t->value << ")";
        else
            os << "set(" << to_string(t->field) << ","
               << MacAddress{t->value}.to_string() << ")";
    } else if (const auto* o = std::get_if<OutputFixed>(&a))
        os << "out(" << int(o->port) << ")";
    else if (const auto* r = std::get_if<OutputRegister>(&a))
        os << "out(r" << int(r->reg) << ")";
    else
        os << "punt";
    return os.str();
}

// Masked 48-bit match on a MAC field. Default mask matches the whole field.
struct MaskedMac {
    MacAddress value{};
    std::uint64_t mask = MacAddress::kMask;

    bool matches(MacAddress m) const {
        return (m.value & mask) == (value.value & mask);
    }
    auto operator<=>(const MaskedMac&) const = default;
};

// Every present field must match; an empty spec matches everything.
struct MatchSpec {
    std::optional<std::uint8_t> in_port;
    std::optional<MaskedMac> dst_mac;
    std::optional<MaskedMac> src_mac;
    std::optional<std::uint8_t> dscp;
    std::optional<std::uint32_t> src_ip;
    std::optional<std::uint32_t> dst_ip;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::optional<std::uint8_t> protocol;

    auto operator<=>(const MatchSpec&) const = default;

    // True when the spec pins the whole 5-field flow key exactly, which lets
    // the switch file the rule under a hash bucket instead of the scan list.
    bool has_exact_flow() const {
        return src_ip && dst_ip && src_port && dst_port && protocol;
    }
    FlowKey exact_flow() const {
        return FlowKey{*src_ip, *dst_ip, *src_port, *dst_port, *protocol};
    }

    bool matches(std::uint8_t port_in, const SimPacket& p) const {
        if (in_port && *in_port != port_in) return false;
        if (dst_mac && !dst_mac->matches(p.dst_mac)) return false;
        if (src_mac && !src_mac->matches(p.src_mac)) return false;
        if (dscp && *dscp != p.dscp) return false;
        if (src_ip && *src_ip != p.flow.src_ip) return false;
        if (dst_ip && *dst_ip != p.flow.dst_ip) return false;
        if (src_port && *src_port != p.flow.src_port) return false;
        if (dst_port && *dst_port != p.flow.dst_port) return false;
        if (protocol && *protocol != p.flow.protocol) return false;
        return true;
    }

    static MatchSpec exact_flow(const FlowKey& k) {
        MatchSpec m;
        m.src_ip = k.src_ip;
        m.dst_ip = k.dst_ip;
        m.src_port = k.src_port;
        m.dst_port = k.dst_port;
        m.protocol = k.protocol;
        return m;
    }

    static MatchSpec low_dst_octet(std::uint8_t value) {
        MatchSpec m;
        m.dst_mac = MaskedMac{MacAddress{value}, 0xffULL};
        return m;
    }

    static MatchSpec exact_dst(MacAddress value) {
        MatchSpec m;
        m.dst_mac = MaskedMac{value};
        return m;
    }

    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        auto put = [&](const std::string& s) {
            if (!first) os << ",";
            os << s;
            first = false;
        };
        if (in_port) put("in_port=" + std::to_string(int(*in_port)));
        if (dst_mac) {
            std::string s = "dst_mac=" + dst_mac->value.to_string();
            if (dst_mac->mask != MacAddress::kMask)
                s += "/" + MacAddress{dst_mac->mask}.to_string();
            put(s);
        }
        if (src_mac) {
            std::string s = "src_mac=" + src_mac->value.to_string();
            if (src_mac->mask != MacAddress::kMask)
                s += "/" + MacAddress{src_mac->mask}.to_string();
            put(s);
        }
        if (dscp) put("dscp=" + std::to_string(int(*dscp)));
        if (src_ip) put("src_ip=" + ipv4_to_string(*src_ip));
        if (dst_ip) put("dst_ip=" + ipv4_to_string(*dst_ip));
        if (src_port) put("src_port=" + std::to_string(*src_port));
        if (dst_port) put("dst_port=" + std::to_string(*dst_port));
        if (protocol) put("proto=" + std::to_string(int(*protocol)));
        if (first) os << "*";
        return os.str();
    }
};

struct FlowRule {
    int priority = 0;
    MatchSpec match{};
    ActionProgram actions{};
    std::uint64_t id = 0;  // assigned by the switch at install time
};

enum class DefaultAction : std::uint8_t { drop, to_controller };

enum class OutcomeKind : std::uint8_t { emit, to_controller, drop };

struct ProcessOutcome {
    OutcomeKind kind = OutcomeKind::drop;
    std::uint8_t port = 0;          // emit only
    SimPacket packet{};             // post-action packet
    std::string drop_reason;        // drop only
    std::optional<std::uint64_t> rule_id;  // absent when a default applied
};

struct InstallResult {
    std::uint64_t id = 0;
    bool replaced = false;
};

// A programmable edge switch: priority-ordered flow table plus the action
// interpreter. Matching follows (priority desc, id asc) order; the first hit
// wins. Rules pinning an exact flow key sit in per-key buckets so big tables
// stay cheap to search; everything else is a short scan list.
class Switch {
  public:
    explicit Switch(std::string id,
                    DefaultAction default_action = DefaultAction::drop)
        : id_(std::move(id)), default_action_(default_action) {}

    const std::string& id() const { return id_; }
    DefaultAction default_action() const { return default_action_; }
    void set_default_action(DefaultAction d) { default_action_ = d; }

    // Engine-provided set of ports this switch may emit on. Unset means any
    // nonzero port is acceptable (convenient for unit-level use).
    void set_connected_ports(std::set<std::uint8_t> ports) {
        connected_ports_ = std::move(ports);
    }

    // Same (match, priority) replaces the existing rule in place, keeping
    // its identifier and table position.
    InstallResult install_rule(FlowRule r) {
        for (const auto& a : r.actions) validate_action(a);
        auto dup = by_match_.find({r.priority, r.match});
        if (dup != by_match_.end()) {
            rules_.at(dup->second).actions = std::move(r.actions);
            return {rules_.at(dup->second).id, true};
        }
        r.id = next_rule_id_++;
        OrderKey key{-r.priority, r.id};
        by_match_.emplace(std::make_pair(r.priority, r.match), key);
        if (r.match.has_exact_flow())
            exact_index_[r.match.exact_flow()].push_back(key);
        else
            scan_list_.push_back(key);
        std::uint64_t id = r.id;
        rules_.emplace(key, std::move(r));
        return {id, false};
    }

    bool remove_rule(std::uint64_t id) {
        for (auto it = rules_.begin(); it != rules_.end(); ++it) {
            if (it->second.id != id) continue;
            const FlowRule& r = it->second;
            by_match_.erase({r.priority, r.match});
            auto detach = [&](std::vector<OrderKey>& v) {
                std::erase(v, it->first);
            };
            if (r.match.has_exact_flow())
                detach(exact_index_[r.match.exact_flow()]);
            else
                detach(scan_list_);
            rules_.erase(it);
            return true;
        }
        return false;
    }

    std::size_t rule_count() const { return rules_.size(); }

    std::vector<const FlowRule*> rules() const {
        std::vector<const FlowRule*> out;
        out.reserve(rules_.size());
        for (const auto& [key, r] : rules_) out.push_back(&r);
        return out;
    }

    const FlowRule* find_rule(std::uint64_t id) const {
        for (const auto& [key, r] : rules_)
            if (r.id == id) return &r;
        return nullptr;
    }

    ProcessOutcome process(std::uint8_t in_port, const SimPacket& p) const {
        const FlowRule* best = nullptr;
        OrderKey best_key{0, 0};
        auto consider = [&](OrderKey key) {
            const FlowRule& r = rules_.at(key);
            if (!r.match.matches(in_port, p)) return;
            if (!best || key < best_key) {
                best = &r;
                best_key = key;
            }
        };
        for (OrderKey key : scan_list_) consider(key);
        auto bucket = exact_index_.find(p.flow);
        if (bucket != exact_index_.end())
            for (OrderKey key : bucket->second) consider(key);
        if (best) return execute(*best, p);
        ProcessOutcome out;
        out.packet = p;
        if (default_action_ == DefaultAction::to_controller)
            out.kind = OutcomeKind::to_controller;
        else {
            out.kind = OutcomeKind::drop;
            out.drop_reason = "no-rule";
        }
        return out;
    }

    // One line per rule in match order; the golden-file format.
    std::string dump() const {
        std::ostringstream os;
        for (const auto& [key, r] : rules_) {
            os << "switch=" << id_ << " rule=" << r.id
               << " prio=" << r.priority << " match=[" << r.match.to_string()
               << "] actions=[";
            for (std::size_t i = 0; i < r.actions.size(); ++i) {
                if (i) os << " ";
                os << to_string(r.actions[i]);
            }
            os << "]\n";
        }
        return os.str();
    }

  private:
    // Sorts rule references into match order.
    struct OrderKey {
        int neg_priority;
        std::uint64_t id;
        auto operator<=>(const OrderKey&) const = default;
    };
    ProcessOutcome execute(const FlowRule& r, const SimPacket& p) const {
        std::array<std::uint64_t, kRegisterCount> regs{};  // zeroed per packet
        SimPacket cur = p;
        ProcessOutcome out;
        out.rule_id = r.id;
        auto field_get = [&](PacketField f) -> std::uint64_t {
            switch (f) {
                case PacketField::dst_mac: return cur.dst_mac.value;
                case PacketField::src_mac: return cur.src_mac.value;
                case PacketField::dscp: return cur.dscp;
            }
            return 0;
        };
        auto field_set = [&](PacketField f, std::uint64_t v) {
            switch (f) {
                case PacketField::dst_mac: cur.dst_mac = MacAddress{v}; break;
                case PacketField::src_mac: cur.src_mac = MacAddress{v}; break;
                case PacketField::dscp: cur.dscp = v & 0x3f; break;
            }
        };
        auto bitmask = [](int len) -> std::uint64_t {
            return len >= 64 ? ~0ULL : ((1ULL << len) - 1);
        };
        for (const auto& a : r.actions) {
            if (const auto* l = std::get_if<LoadField>(&a)) {
                regs[l->reg] =
                    (field_get(l->field) >> l->bit_offset) & bitmask(l->bit_len);
            } else if (const auto* s = std::get_if<StoreField>(&a)) {
                std::uint64_t m = bitmask(s->bit_len) << s->bit_offset;
                std::uint64_t v = (field_get(s->field) & ~m) |
                                  ((regs[s->reg] << s->bit_offset) & m);
                field_set(s->field, v);
            } else if (const auto* t = std::get_if<SetField>(&a)) {
                field_set(t->field, t->value);
            } else if (const auto* o = std::get_if<OutputFixed>(&a)) {
                return finish_emit(o->port, std::move(cur), std::move(out));
            } else if (const auto* g = std::get_if<OutputRegister>(&a)) {
                return finish_emit(regs[g->reg] & 0xff, std::move(cur),
                                   std::move(out));
            } else {
                out.kind = OutcomeKind::to_controller;
                out.packet = std::move(cur);
                return out;
            }
        }
        out.kind = OutcomeKind::drop;
        out.drop_reason = "no-output";
        out.packet = std::move(cur);
        return out;
    }

    ProcessOutcome finish_emit(std::uint8_t port, SimPacket cur,
                               ProcessOutcome out) const {
        out.packet = std::move(cur);
        if (port == 0 ||
            (connected_ports_ && !connected_ports_->count(port))) {
            out.kind = OutcomeKind::drop;
            out.drop_reason = "blackhole";
            out.port = port;
            return out;
        }
        out.kind = OutcomeKind::emit;
        out.port = port;
        return out;
    }

    std::string id_;
    DefaultAction default_action_;
    std::map<OrderKey, FlowRule> rules_;
    std::map<std::pair<int, MatchSpec>, OrderKey> by_match_;
    std::map<FlowKey, std::vector<OrderKey>> exact_index_;
    std::vector<OrderKey> scan_list_;
    std::optional<std::set<std::uint8_t>> connected_ports_;
    std::uint64_t next_rule_id_ = 1;
};

// ---------------------------------------------------------------------------
// Edge programs

// Annotation-consuming sequence for one fabric/mesh traversal: grab the low
// octet (or nibble) as the egress port, shift the remainder down, emit. The
// full 48-bit store zero-fills the top because registers start zeroed and
// the load brought in only the surviving bits.
inline ActionProgram compile_edge_shift_program(AnnotationMode mode) {
    std::uint8_t unit = mode == AnnotationMode::nibble ? 4 : 8;
    return ActionProgram{
        LoadField{PacketField::dst_mac, 0, unit, 0},
        LoadField{PacketField::dst_mac, unit, std::uint8_t(48 - unit), 1},
        StoreField{1, PacketField::dst_mac, 0, 48},
        OutputRegister{0},
    };
}

// Swap half of the extended layout: dst is spent (low octet 0xFE), so pull
// the continuation out of src, zero src, and shift-emit in the same pass.
inline ActionProgram compile_edge_swap_program() {
    return ActionProgram{
        LoadField{PacketField::src_mac, 0, 8, 0},
        LoadField{PacketField::src_mac, 8, 40, 1},
        StoreField{1, PacketField::dst_mac, 0, 48},
        SetField{PacketField::src_mac, 0},
        OutputRegister{0},
    };
}

}  // namespace actsw
