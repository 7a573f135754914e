#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "actsw/controller.hpp"
#include "actsw/scenario.hpp"
#include "actsw/trace.hpp"

namespace actsw {

// Live rule counts grouped the way the flow-table comparison reports them.
// Switches with other roles (gateway plumbing, mesh interiors) appear in the
// per-switch map but stay outside the three columns and the total.
struct RuleCensus {
    std::map<std::string, std::size_t> per_switch;
    std::size_t ingress = 0;
    std::size_t middlebox = 0;
    std::size_t endpoint = 0;
    std::size_t other = 0;

    std::size_t total() const { return ingress + middlebox + endpoint; }
};

inline RuleCensus rule_census(const SwitchMap& switches,
                              const std::map<std::string, SwitchRole>& roles) {
    RuleCensus c;
    for (const auto& [id, sw] : switches) {
        std::size_t n = sw.rule_count();
        c.per_switch[id] = n;
        auto it = roles.find(id);
        SwitchRole role = it == roles.end() ? SwitchRole::interior : it->second;
        switch (role) {
            case SwitchRole::ingress: c.ingress += n; break;
            case SwitchRole::middlebox: c.middlebox += n; break;
            case SwitchRole::endpoint: c.endpoint += n; break;
            default: c.other += n; break;
        }
    }
    return c;
}

struct Violation {
    FlowKey flow{};
    std::string description;
};

namespace detail {

// Per-packet view reconstructed from the trace: the flow key a packet was
// injected with (its first event) and the middleboxes it traversed, in
// order. payload_id survives mangling, so this works across rewrites.
struct PacketView {
    FlowKey injected_key{};
    bool key_known = false;
    std::vector<std::string> middleboxes;
};

inline std::map<std::uint64_t, PacketView> packet_views(const Trace& trace) {
    std::map<std::uint64_t, PacketView> views;
    for (const auto& e : trace.events) {
        if (e.payload_id == 0) continue;
        auto& v = views[e.payload_id];
        if (!v.key_known && e.kind != EventKind::rule_install) {
            v.injected_key = e.flow;
            v.key_known = true;
        }
        if (e.kind == EventKind::middlebox_traverse)
            v.middleboxes.push_back(e.loc);
    }
    return views;
}

inline FlowKey canonical(const FlowKey& k) {
    FlowKey r = reverse_flow_key(k);
    return std::min(k, r);
}

}  // namespace detail

// Affinity: within one flow (both directions pooled) the set of middlebox
// instances traversed must be identical for every packet.
inline std::vector<Violation> check_affinity(const Trace& trace) {
    std::vector<Violation> out;
    std::map<FlowKey, std::vector<const detail::PacketView*>> groups;
    auto views = detail::packet_views(trace);
    for (const auto& [payload, v] : views)
        if (v.key_known) groups[detail::canonical(v.injected_key)].push_back(&v);
    for (const auto& [flow, packets] : groups) {
        std::set<std::string> reference(packets.front()->middleboxes.begin(),
                                        packets.front()->middleboxes.end());
        for (const auto* v : packets) {
            std::set<std::string> got(v->middleboxes.begin(),
                                      v->middleboxes.end());
            if (got != reference) {
                out.push_back({flow, "instance set changed mid-flow"});
                break;
            }
        }
    }
    return out;
}

// Symmetricality: reverse-direction packets traverse the forward instance
// sequence in reverse order.
inline std::vector<Violation> check_symmetricality(const Trace& trace) {
    std::vector<Violation> out;
    struct Sides {
        std::vector<std::vector<std::string>> fwd, rev;
    };
    std::map<FlowKey, Sides> groups;
    auto views = detail::packet_views(trace);
    for (const auto& [payload, v] : views) {
        if (!v.key_known) continue;
        FlowKey canon = detail::canonical(v.injected_key);
        if (v.injected_key == canon)
            groups[canon].fwd.push_back(v.middleboxes);
        else
            groups[canon].rev.push_back(v.middleboxes);
    }
    for (const auto& [flow, sides] : groups) {
        if (sides.fwd.empty() || sides.rev.empty()) continue;
        std::vector<std::string> expect = sides.fwd.front();
        for (const auto& seq : sides.fwd)
            if (seq != expect) {
                out.push_back({flow, "forward sequence varies"});
                break;
            }
        std::vector<std::string> mirrored(expect.rbegin(), expect.rend());
        for (const auto& seq : sides.rev)
            if (seq != mirrored) {
                out.push_back({flow, "reverse sequence is not the mirror"});
                break;
            }
    }
    return out;
}

struct ComparisonRow {
    long n = 0;
    std::string mode;
    std::size_t ingress = 0;
    std::size_t middlebox = 0;
    std::size_t endpoint = 0;
    std::size_t total = 0;
};

inline ComparisonRow make_row(long n, const std::string& mode,
                              const RuleCensus& c) {
    return {n, mode, c.ingress, c.middlebox, c.endpoint, c.total()};
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "n,mode,ingress,middlebox,endpoint,total\n";
    for (const auto& r : rows)
        os << r.n << "," << r.mode << "," << r.ingress << "," << r.middlebox
           << "," << r.endpoint << "," << r.total << "\n";
    return os.str();
}

inline std::string comparison_table(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "     n  mode      ingress  middlebox  endpoint     total\n";
    for (const auto& r : rows) {
        char line[96];
        std::snprintf(line, sizeof(line), "%6ld  %-8s %8zu %10zu %9zu %9zu\n",
                      r.n, r.mode.c_str(), r.ingress, r.middlebox, r.endpoint,
                      r.total);
        os << line;
    }
    return os.str();
}

}  // namespace actsw
