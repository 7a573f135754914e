#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace actsw {

enum class DeviceKind : std::uint8_t { endpoint, middlebox, gateway, external };

inline const char* to_string(DeviceKind k) {
    switch (k) {
        case DeviceKind::endpoint: return "endpoint";
        case DeviceKind::middlebox: return "middlebox";
        case DeviceKind::gateway: return "gateway";
        case DeviceKind::external: return "external";
    }
    return "?";
}

class TopologyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Abstract fabric: globally numbered egress ports, each owned by one edge
// switch and optionally carrying one attached device. Port 254 is the
// implicit upstream side through which external traffic enters.
inline constexpr std::uint8_t kUpstreamPort = 254;

struct Fabric {
    std::map<std::uint8_t, std::string> port_device;  // global port -> device
    std::map<std::uint8_t, std::string> port_owner;   // global port -> switch
    std::set<std::uint8_t> ingress_ports{kUpstreamPort};

    std::optional<std::uint8_t> port_of(const std::string& device) const {
        for (const auto& [port, dev] : port_device)
            if (dev == device) return port;
        return std::nullopt;
    }
};

// Mesh of interior switches: explicit links between (switch, port) pairs and
// per-port device attachments. Device identifiers are the 8-bit values used
// by destination encoding.
struct MeshTopology {
    using PortRef = std::pair<std::string, std::uint8_t>;

    std::set<std::string> switches;
    std::map<PortRef, PortRef> links;              // symmetric, both ways
    std::map<PortRef, std::string> attachments;    // (switch, port) -> device
    std::map<std::uint8_t, PortRef> device_locations;  // numeric id -> place
    // Optional per-scenario pins overriding the computed next hops.
    std::map<std::pair<std::string, std::uint8_t>, std::uint8_t> pinned_next_hop;

    void add_link(const std::string& a, std::uint8_t pa, const std::string& b,
                  std::uint8_t pb) {
        links[{a, pa}] = {b, pb};
        links[{b, pb}] = {a, pa};
    }

    bool is_adjacent(const std::string& sw, std::uint8_t device_id) const {
        auto it = device_locations.find(device_id);
        if (it == device_locations.end())
            throw TopologyError("unknown device id " +
                                std::to_string(int(device_id)));
        if (!switches.count(sw)) throw TopologyError("unknown switch " + sw);
        return it->second.first == sw;
    }

    std::uint8_t attachment_port(std::uint8_t device_id) const {
        auto it = device_locations.find(device_id);
        if (it == device_locations.end())
            throw TopologyError("unknown device id " +
                                std::to_string(int(device_id)));
        return it->second.second;
    }

    // Egress port from `sw` toward device `device_id`: the attachment port
    // when adjacent, otherwise the first hop of a shortest path (ties broken
    // by the lowest egress port id, unless pinned by the scenario).
    std::uint8_t next_hop(const std::string& sw, std::uint8_t device_id) const {
        if (auto it = pinned_next_hop.find({sw, device_id});
            it != pinned_next_hop.end())
            return it->second;
        if (is_adjacent(sw, device_id)) return attachment_port(device_id);
        const auto& loc = device_locations.at(device_id);
        auto dist = switch_distances(loc.first);
        auto here = dist.find(sw);
        if (here == dist.end())
            throw TopologyError("device " + std::to_string(int(device_id)) +
                                " unreachable from " + sw);
        std::optional<std::uint8_t> best;
        for (const auto& [from, to] : links) {
            if (from.first != sw) continue;
            auto d = dist.find(to.first);
            if (d == dist.end() || d->second != here->second - 1) continue;
            if (!best || from.second < *best) best = from.second;
        }
        if (!best)
            throw TopologyError("no next hop from " + sw + " toward device " +
                                std::to_string(int(device_id)));
        return *best;
    }

    // Full table: switch id -> (device id -> egress port).
    std::map<std::string, std::map<std::uint8_t, std::uint8_t>>
    compute_next_hop_tables() const {
        std::map<std::string, std::map<std::uint8_t, std::uint8_t>> out;
        for (const auto& sw : switches)
            for (const auto& [id, loc] : device_locations)
                out[sw][id] = next_hop(sw, id);
        return out;
    }

    bool connected() const {
        if (switches.empty()) return true;
        auto dist = switch_distances(*switches.begin());
        return dist.size() == switches.size();
    }

  private:
    // BFS hop counts from every switch to `target` over inter-switch links.
    std::map<std::string, int> switch_distances(const std::string& target) const {
        std::map<std::string, int> dist;
        std::deque<std::string> queue;
        dist[target] = 0;
        queue.push_back(target);
        while (!queue.empty()) {
            std::string cur = queue.front();
            queue.pop_front();
            for (const auto& [from, to] : links) {
                if (from.first != cur) continue;
                if (dist.count(to.first)) continue;
                dist[to.first] = dist[cur] + 1;
                queue.push_back(to.first);
            }
        }
        return dist;
    }
};

}  // namespace actsw
