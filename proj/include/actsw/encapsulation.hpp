#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "actsw/middlebox.hpp"
#include "actsw/packet.hpp"

namespace actsw {

// Key extractor over FlowKey fields. The scenario must select fields the
// wrapped middlebox preserves, or reassociation cannot work.
struct AssocArrayMode {
    std::set<FlowField> key_fields{FlowField::src_ip, FlowField::src_port};
};

struct DscpTagMode {
    int pool_size = 64;            // <= 64; smaller if QoS bits are reserved
    std::uint8_t restore_dscp = 0;  // value written back on the way out
};

using EncapMode = std::variant<AssocArrayMode, DscpTagMode>;

struct SavedL2 {
    MacAddress src_mac{};
    MacAddress dst_mac{};
    auto operator<=>(const SavedL2&) const = default;
};

struct EncapEvent {
    std::string what;  // "save" | "restore" | drop reason
    bool is_drop = false;
};

struct EncapResult {
    std::vector<SimPacket> out;
    std::vector<EncapEvent> events;
};

// Four-interface wrapper that coerces L2 transparency from a router-style
// (L2-mangling) middlebox: outer interfaces face the fabric, inner ones the
// wrapped device. L2 headers are saved on outer receipt and restored on
// inner receipt, so the annotation survives the traversal.
class EncapBox {
  public:
    EncapBox(std::string id, EncapMode mode, MiddleboxInstance inner)
        : id_(std::move(id)), mode_(std::move(mode)), inner_(std::move(inner)) {}

    const std::string& id() const { return id_; }
    MiddleboxInstance& inner() { return inner_; }
    const MiddleboxInstance& inner() const { return inner_; }

    // Downstream-bound traffic: save addressing, hand the packet inward with
    // the L2 headers the router expects. Returns nothing when the tag pool
    // is exhausted.
    std::optional<SimPacket> upstream_outer_receive(const SimPacket& p,
                                                    EncapResult& r) {
        return outer_receive(p, Direction::downstream, r);
    }

    // Downstream-bound traffic re-emerging from the router: restore the
    // saved addressing. Returns nothing on a reassociation failure.
    std::optional<SimPacket> downstream_inner_receive(const SimPacket& p,
                                                      EncapResult& r) {
        return inner_receive(p, Direction::downstream, r);
    }

    // Mirror pair for upstream-bound (reverse) traffic.
    std::optional<SimPacket> downstream_outer_receive(const SimPacket& p,
                                                      EncapResult& r) {
        return outer_receive(p, Direction::upstream, r);
    }
    std::optional<SimPacket> upstream_inner_receive(const SimPacket& p,
                                                    EncapResult& r) {
        return inner_receive(p, Direction::upstream, r);
    }

    // Whole traversal as the engine sees it: outer in, through the wrapped
    // device, outer out.
    EncapResult traverse(const SimPacket& p) {
        EncapResult r;
        auto inward = outer_receive(p, p.direction, r);
        if (!inward) return r;
        TraverseResult inner_out = inner_.traverse(*inward);
        if (!inner_out.drop_reason.empty()) {
            r.events.push_back({inner_out.drop_reason, true});
            return r;
        }
        for (const auto& q : inner_out.out) {
            auto restored = inner_receive(q, p.direction, r);
            if (restored) r.out.push_back(*restored);
        }
        return r;
    }

    // Flow teardown: release table entries / tags held for the flow.
    void on_flow_end(const FlowKey& k) {
        release_key(extract(k, assoc_fields()));
        release_key(extract(reverse_flow_key(k), assoc_fields()));
    }

    std::size_t live_continuations() const {
        if (std::holds_alternative<DscpTagMode>(mode_))
            return tag_by_continuation_.size();
        return saved_.size();
    }

  private:
    // Projection of a FlowKey onto the extractor fields; unselected fields
    // compare as zero.
    struct ExtractedKey {
        FlowKey k{};
        auto operator<=>(const ExtractedKey&) const = default;
    };

    const std::set<FlowField>& assoc_fields() const {
        static const std::set<FlowField> all{
            FlowField::src_ip, FlowField::dst_ip, FlowField::src_port,
            FlowField::dst_port, FlowField::protocol};
        if (const auto* a = std::get_if<AssocArrayMode>(&mode_))
            return a->key_fields;
        return all;
    }

    static ExtractedKey extract(const FlowKey& k,
                                const std::set<FlowField>& fields) {
        ExtractedKey e;
        for (FlowField f : fields) {
            switch (f) {
                case FlowField::src_ip: e.k.src_ip = k.src_ip; break;
                case FlowField::dst_ip: e.k.dst_ip = k.dst_ip; break;
                case FlowField::src_port: e.k.src_port = k.src_port; break;
                case FlowField::dst_port: e.k.dst_port = k.dst_port; break;
                case FlowField::protocol: e.k.protocol = k.protocol; break;
            }
        }
        return e;
    }

    std::optional<SimPacket> outer_receive(const SimPacket& p, Direction dir,
                                           EncapResult& r) {
        SimPacket inward = p;
        if (const auto* a = std::get_if<AssocArrayMode>(&mode_)) {
            saved_[extract(p.flow, a->key_fields)] = {p.src_mac, p.dst_mac};
            r.events.push_back({"save", false});
        } else {
            SavedL2 continuation{p.src_mac, p.dst_mac};
            auto tag = allocate_tag(continuation);
            if (!tag) {
                r.events.push_back({"dscp-pool-exhausted", true});
                return std::nullopt;
            }
            inward.dscp = *tag;
            flows_by_tag_[*tag].insert(p.flow);
            r.events.push_back({"save", false});
        }
        // Address the packet the way the inner router expects it.
        if (const auto* mr =
                std::get_if<ManglingRouterBehavior>(&inner_.behavior()))
            inward.dst_mac = mr->own_mac;
        (void)dir;
        return inward;
    }

    std::optional<SimPacket> inner_receive(const SimPacket& p, Direction dir,
                                           EncapResult& r) {
        SimPacket outward = p;
        if (const auto* a = std::get_if<AssocArrayMode>(&mode_)) {
            auto it = saved_.find(extract(p.flow, a->key_fields));
            if (it == saved_.end()) {
                r.events.push_back({"reassociation-failure", true});
                return std::nullopt;
            }
            outward.src_mac = it->second.src_mac;
            outward.dst_mac = it->second.dst_mac;
        } else {
            const auto* d = std::get_if<DscpTagMode>(&mode_);
            auto it = continuation_by_tag_.find(p.dscp);
            if (it == continuation_by_tag_.end()) {
                r.events.push_back({"reassociation-failure", true});
                return std::nullopt;
            }
            outward.src_mac = it->second.src_mac;
            outward.dst_mac = it->second.dst_mac;
            outward.dscp = d->restore_dscp;
        }
        r.events.push_back({"restore", false});
        (void)dir;
        return outward;
    }

    std::optional<std::uint8_t> allocate_tag(const SavedL2& continuation) {
        auto it = tag_by_continuation_.find(continuation);
        if (it != tag_by_continuation_.end()) return it->second;
        const auto* d = std::get_if<DscpTagMode>(&mode_);
        for (int t = 0; t < d->pool_size; ++t) {
            auto tag = static_cast<std::uint8_t>(t);
            if (!continuation_by_tag_.count(tag)) {
                continuation_by_tag_[tag] = continuation;
                tag_by_continuation_[continuation] = tag;
                return tag;
            }
        }
        return std::nullopt;
    }

    void release_key(const ExtractedKey& e) {
        saved_.erase(e);
        for (auto it = flows_by_tag_.begin(); it != flows_by_tag_.end();) {
            auto& flows = it->second;
            for (auto f = flows.begin(); f != flows.end();) {
                if (extract(*f, assoc_fields()) == e)
                    f = flows.erase(f);
                else
                    ++f;
            }
            if (flows.empty()) {
                auto cont = continuation_by_tag_.find(it->first);
                if (cont != continuation_by_tag_.end()) {
                    tag_by_continuation_.erase(cont->second);
                    continuation_by_tag_.erase(cont);
                }
                it = flows_by_tag_.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::string id_;
    EncapMode mode_;
    MiddleboxInstance inner_;
    std::map<ExtractedKey, SavedL2> saved_;
    std::map<SavedL2, std::uint8_t> tag_by_continuation_;
    std::map<std::uint8_t, SavedL2> continuation_by_tag_;
    std::map<std::uint8_t, std::set<FlowKey>> flows_by_tag_;
};

}  // namespace actsw
