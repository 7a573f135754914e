#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "actsw/mac.hpp"
#include "actsw/packet.hpp"
#include "actsw/rng.hpp"

namespace actsw {

enum class FlowField : std::uint8_t {
    src_ip,
    dst_ip,
    src_port,
    dst_port,
    protocol
};

inline const char* to_string(FlowField f) {
    switch (f) {
        case FlowField::src_ip: return "src_ip";
        case FlowField::dst_ip: return "dst_ip";
        case FlowField::src_port: return "src_port";
        case FlowField::dst_port: return "dst_port";
        case FlowField::protocol: return "protocol";
    }
    return "?";
}

// Behavior classes, by what the device does to packets it receives.
struct TransparentBehavior {};

struct TranslucentBehavior {
    std::uint64_t seed = 0;
    int drop_percent = 0;  // 0..100
};

// Deterministic injective FlowKey rewrite over the selected fields; L2 and
// payload_id pass through untouched. The per-instance rewrite table doubles
// as the test oracle.
struct ManglingBehavior {
    std::uint64_t seed = 0;
    std::set<FlowField> rewrites{FlowField::src_ip, FlowField::src_port};
};

// Mangling plus router-style L2 behavior: src_mac becomes the device's own
// address, dst_mac its configured next hop. This destroys any annotation
// carried in dst_mac.
struct ManglingRouterBehavior {
    std::uint64_t seed = 0;
    std::set<FlowField> rewrites{FlowField::dst_ip, FlowField::dst_port};
    MacAddress own_mac{};
    MacAddress next_hop_mac{};
};

struct OriginateSlot {
    std::uint64_t tick = 0;
    int count = 0;
};

struct OriginatingBehavior {
    std::uint32_t source_ip = 0;  // the originator's own address
    std::uint32_t target_ip = 0;
    std::uint16_t target_port = 80;
    std::vector<OriginateSlot> schedule;
};

struct TerminatingBehavior {};

using MiddleboxBehavior =
    std::variant<TransparentBehavior, TranslucentBehavior, ManglingBehavior,
                 ManglingRouterBehavior, OriginatingBehavior,
                 TerminatingBehavior>;

inline const char* behavior_name(const MiddleboxBehavior& b) {
    struct V {
        const char* operator()(const TransparentBehavior&) { return "transparent"; }
        const char* operator()(const TranslucentBehavior&) { return "translucent"; }
        const char* operator()(const ManglingBehavior&) { return "mangling"; }
        const char* operator()(const ManglingRouterBehavior&) {
            return "mangling_router";
        }
        const char* operator()(const OriginatingBehavior&) { return "originating"; }
        const char* operator()(const TerminatingBehavior&) { return "terminating"; }
    };
    return std::visit(V{}, b);
}

// Physical interface arrangement. The two abstractions are equivalent:
// ingress traffic is whatever either physical interface receives, egress
// whatever either transmits. traverse() works on the ingress/egress view.
enum class InterfaceModel : std::uint8_t { ingress_egress, upstream_downstream };

struct TraverseResult {
    std::vector<SimPacket> out;
    std::string drop_reason;  // set when the packet was absorbed
};

class MiddleboxInstance {
  public:
    MiddleboxInstance(std::string id, MiddleboxBehavior behavior,
                      InterfaceModel model = InterfaceModel::ingress_egress)
        : id_(std::move(id)), behavior_(std::move(behavior)), model_(model) {}

    const std::string& id() const { return id_; }
    const MiddleboxBehavior& behavior() const { return behavior_; }
    InterfaceModel interface_model() const { return model_; }

    bool is_originating() const {
        return std::holds_alternative<OriginatingBehavior>(behavior_);
    }
    bool mangles_l2() const {
        return std::holds_alternative<ManglingRouterBehavior>(behavior_);
    }

    TraverseResult traverse(const SimPacket& p) {
        TraverseResult r;
        if (std::holds_alternative<TransparentBehavior>(behavior_)) {
            r.out.push_back(p);
        } else if (const auto* t =
                       std::get_if<TranslucentBehavior>(&behavior_)) {
            // Drop predicate keys on flow identity and payload tag only, so
            // the same packet gets the same fate under either controller.
            std::uint64_t h = mix64(t->seed, p.flow.hash(), p.payload_id);
            if (int(h % 100) < t->drop_percent)
                r.drop_reason = "filtered";
            else
                r.out.push_back(p);
        } else if (const auto* m = std::get_if<ManglingBehavior>(&behavior_)) {
            SimPacket q = p;
            q.flow = rewrite(p.flow, m->seed, m->rewrites);
            r.out.push_back(q);
        } else if (const auto* mr =
                       std::get_if<ManglingRouterBehavior>(&behavior_)) {
            SimPacket q = p;
            q.flow = rewrite(p.flow, mr->seed, mr->rewrites);
            q.src_mac = mr->own_mac;
            q.dst_mac = mr->next_hop_mac;
            r.out.push_back(q);
        } else if (std::holds_alternative<TerminatingBehavior>(behavior_)) {
            r.drop_reason = "terminated";
        } else {
            // Originators consume nothing on the traverse path; treat any
            // delivered traffic as terminating at the device.
            r.drop_reason = "terminated";
        }
        return r;
    }

    // New flows per the schedule. payload_counter is the engine's global
    // packet tag sequence.
    std::vector<SimPacket> originate(std::uint64_t tick,
                                     std::uint64_t& payload_counter) {
        std::vector<SimPacket> out;
        const auto* o = std::get_if<OriginatingBehavior>(&behavior_);
        if (!o) return out;
        for (const auto& slot : o->schedule) {
            if (slot.tick != tick) continue;
            for (int i = 0; i < slot.count; ++i) {
                SimPacket p;
                p.dst_mac = kHostSentinel;
                p.src_mac = kZeroMac;
                p.flow.src_ip = o->source_ip;
                p.flow.src_port =
                    static_cast<std::uint16_t>(40000 + originated_++);
                p.flow.dst_ip = o->target_ip;
                p.flow.dst_port = o->target_port;
                p.flow.protocol = 6;
                p.direction = Direction::downstream;
                p.payload_id = ++payload_counter;
                out.push_back(p);
            }
        }
        return out;
    }

    // Oracle for tests: original key -> rewritten key, in first-seen order.
    const std::map<FlowKey, FlowKey>& rewrite_table() const {
        return rewrite_table_;
    }

  private:
    FlowKey rewrite(const FlowKey& k, std::uint64_t seed,
                    const std::set<FlowField>& fields) {
        auto it = rewrite_table_.find(k);
        if (it != rewrite_table_.end()) return it->second;
        if (fields.empty()) {
            rewrite_table_[k] = k;
            images_.insert(k);
            return k;
        }
        FlowKey out = k;
        for (std::uint64_t attempt = 0;; ++attempt) {
            SplitMix64 g(mix64(seed, k.hash(), attempt));
            out = k;
            for (FlowField f : fields) {
                switch (f) {
                    case FlowField::src_ip:
                        out.src_ip = static_cast<std::uint32_t>(g.next());
                        break;
                    case FlowField::dst_ip:
                        out.dst_ip = static_cast<std::uint32_t>(g.next());
                        break;
                    case FlowField::src_port:
                        out.src_port = static_cast<std::uint16_t>(g.next());
                        break;
                    case FlowField::dst_port:
                        out.dst_port = static_cast<std::uint16_t>(g.next());
                        break;
                    case FlowField::protocol:
                        out.protocol =
                            static_cast<std::uint8_t>(1 + g.next() % 254);
                        break;
                }
            }
            if (!images_.count(out)) break;  // keep the map injective
        }
        rewrite_table_[k] = out;
        images_.insert(out);
        return out;
    }

    std::string id_;
    MiddleboxBehavior behavior_;
    InterfaceModel model_;
    std::map<FlowKey, FlowKey> rewrite_table_;
    std::set<FlowKey> images_;
    int originated_ = 0;
};

}  // namespace actsw
