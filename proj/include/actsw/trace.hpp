#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "actsw/mac.hpp"
#include "actsw/packet.hpp"

namespace actsw {

enum class EventKind : std::uint8_t {
    switch_process,
    middlebox_traverse,
    controller_packet_in,
    rule_install,
    deliver,
    drop,
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::switch_process: return "SwitchProcess";
        case EventKind::middlebox_traverse: return "MiddleboxTraverse";
        case EventKind::controller_packet_in: return "ControllerPacketIn";
        case EventKind::rule_install: return "RuleInstall";
        case EventKind::deliver: return "Deliver";
        case EventKind::drop: return "Drop";
    }
    return "?";
}

// One observed dataplane event. The packet snapshot is taken as received at
// the location, before any mutation there.
struct TraceEvent {
    std::uint64_t tick = 0;
    std::uint64_t seq = 0;  // total order within the run
    EventKind kind = EventKind::switch_process;
    std::string drop_reason;  // drop events only
    std::string loc;
    FlowKey flow{};
    MacAddress dst_mac{};
    MacAddress src_mac{};
    std::uint8_t dscp = 0;
    std::uint64_t payload_id = 0;
    std::string detail;

    std::string to_line() const {
        std::ostringstream os;
        os << "tick=" << tick << " kind=" << to_string(kind);
        if (kind == EventKind::drop) os << "(" << drop_reason << ")";
        os << " loc=" << loc << " flow=" << flow.to_string()
           << " dst_mac=" << dst_mac.to_string()
           << " src_mac=" << src_mac.to_string() << " dscp=" << int(dscp)
           << " payload=" << payload_id;
        if (!detail.empty()) os << " detail=" << detail;
        return os.str();
    }
};

struct Trace {
    std::vector<TraceEvent> events;

    // Conservation bookkeeping.
    std::uint64_t injected = 0;    // workload + raw injections
    std::uint64_t originated = 0;  // produced by originating middleboxes
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;  // every non-deliver termination, absorbs included

    TraceEvent& push(TraceEvent e) {
        e.seq = events.size();
        events.push_back(std::move(e));
        return events.back();
    }

    std::string render() const {
        std::string out;
        for (const auto& e : events) {
            out += e.to_line();
            out += '\n';
        }
        return out;
    }

    std::uint64_t count_drops(const std::string& reason) const {
        std::uint64_t n = 0;
        for (const auto& e : events)
            if (e.kind == EventKind::drop && e.drop_reason == reason) ++n;
        return n;
    }

    bool has_drop_other_than(const std::string& allowed) const {
        for (const auto& e : events)
            if (e.kind == EventKind::drop && e.drop_reason != allowed)
                return true;
        return false;
    }
};

}  // namespace actsw
