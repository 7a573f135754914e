#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "actsw/controller.hpp"
#include "actsw/encapsulation.hpp"
#include "actsw/middlebox.hpp"
#include "actsw/scenario.hpp"
#include "actsw/trace.hpp"

namespace actsw {

enum class ControllerMode : std::uint8_t { active, baseline };

inline const char* to_string(ControllerMode m) {
    return m == ControllerMode::active ? "active" : "baseline";
}

struct FlowSpec {
    FlowKey key{};
    int packets = 1;
    TrafficPattern pattern = TrafficPattern::bidirectional;
    std::uint64_t start_tick = 0;
    std::string dest_device;
};

struct Workload {
    std::vector<FlowSpec> flows;
};

class EngineError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Seeded workload over the scenario's policy chains: flow i picks a chain,
// takes its destination match fields, and gets a unique external source.
inline Workload generate_workload(const Scenario& sc, int flows,
                                  std::uint64_t seed,
                                  std::optional<int> packets = {},
                                  std::optional<TrafficPattern> pattern = {}) {
    Workload w;
    if (sc.chains.empty()) {
        if (flows > 0) throw EngineError("scenario has no policy chains");
        return w;
    }
    for (int i = 0; i < flows; ++i) {
        const ChainSpec& chain =
            sc.chains[mix64(seed, 0xc4a1, i) % sc.chains.size()];
        if (!chain.match.dst_ip)
            throw EngineError("chain " + chain.id +
                              " has no dst_ip to generate traffic for");
        FlowSpec f;
        f.key.src_ip = 0xc6120000u + std::uint32_t(i);  // 198.18.0.0/15
        f.key.src_port = std::uint16_t(1024 + (i % 50000));
        f.key.dst_ip = *chain.match.dst_ip;
        f.key.dst_port = chain.match.dst_port.value_or(80);
        f.key.protocol = chain.match.protocol.value_or(6);
        if (chain.match.src_ip) f.key.src_ip = *chain.match.src_ip;
        if (chain.match.src_port) f.key.src_port = *chain.match.src_port;
        f.packets = packets.value_or(sc.workload.packets_per_flow);
        f.pattern = pattern.value_or(sc.workload.pattern);
        f.start_tick = std::uint64_t(i);
        f.dest_device = chain.dest;
        w.flows.push_back(f);
    }
    return w;
}

// Deterministic discrete-event run of one scenario under one controller.
// Owns the switches, device instances and trace; time models ordering only.
class Engine {
  public:
    Engine(const Scenario& sc, ControllerMode mode, std::uint64_t seed)
        : sc_(sc), mode_(mode), seed_(seed) {
        build_runtime();
        if (mode == ControllerMode::active)
            active_ = std::make_unique<ActiveController>(sc_, switches_,
                                                         trace_, seed_);
        else
            baseline_ = std::make_unique<BaselineController>(sc_, switches_,
                                                             trace_, seed_);
    }

    ControllerMode mode() const { return mode_; }
    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }
    SwitchMap& switches() { return switches_; }
    const SwitchMap& switches() const { return switches_; }
    const std::map<std::string, SwitchRole>& switch_roles() const {
        return roles_;
    }
    ActiveController* active() { return active_.get(); }
    BaselineController* baseline() { return baseline_.get(); }
    EncapBox* encap_box(const std::string& device) {
        auto it = devices_.find(device);
        return it == devices_.end() ? nullptr : it->second.encap.get();
    }
    MiddleboxInstance* middlebox(const std::string& device) {
        auto it = devices_.find(device);
        if (it == devices_.end()) return nullptr;
        if (it->second.encap) return &it->second.encap->inner();
        return it->second.mb.get();
    }
    MacAddress endpoint_mac(const std::string& device) const {
        return devices_.at(device).mac;
    }

    int hop_budget() const { return sc_.hop_budget; }

    void program() {
        if (programmed_) return;
        programmed_ = true;
        if (active_)
            active_->program_network(0);
        else
            baseline_->program_network(0);
    }

    const Trace& run(const Workload& w) {
        program();
        std::uint64_t last_tick = 0;
        for (const auto& f : w.flows)
            last_tick = std::max(
                last_tick, f.start_tick + std::uint64_t(f.packets));
        for (const auto& [name, dev] : devices_) {
            const auto* o = originating_behavior(name);
            if (!o) continue;
            for (const auto& slot : o->schedule)
                last_tick = std::max(last_tick, slot.tick);
        }
        for (std::uint64_t tick = 0; tick <= last_tick; ++tick) {
            // Originators first, in declaration order.
            for (const auto& d : sc_.devices) {
                if (!originating_behavior(d.name)) continue;
                auto& rt = devices_.at(d.name);
                for (auto& p : rt.mb->originate(tick, payload_counter_)) {
                    ++trace_.originated;
                    walk(d.attached_switch, d.attached_port, p, tick);
                }
            }
            // Then workload packets scheduled for this tick.
            for (std::size_t i = 0; i < w.flows.size(); ++i) {
                const FlowSpec& f = w.flows[i];
                for (int j = 0; j < f.packets; ++j) {
                    if (f.start_tick + std::uint64_t(j) != tick) continue;
                    inject_flow_packet(f, j, tick);
                    if (j + 1 == f.packets) end_flow(f.key);
                }
            }
        }
        return trace_;
    }

    // Inject one already-formed packet into a switch pipeline. Used by the
    // engine itself, tests, and adversarial-annotation scenarios.
    void inject_packet(const std::string& sw_id, std::uint8_t in_port,
                       SimPacket p, std::uint64_t tick) {
        program();
        if (p.payload_id == 0) p.payload_id = ++payload_counter_;
        ++trace_.injected;
        walk(sw_id, in_port, std::move(p), tick);
    }

  private:
    struct DeviceRuntime {
        const DeviceSpec* spec = nullptr;
        MacAddress mac{};
        std::unique_ptr<MiddleboxInstance> mb;
        std::unique_ptr<EncapBox> encap;
    };

    const OriginatingBehavior* originating_behavior(
        const std::string& name) const {
        const DeviceSpec* d = sc_.find_device(name);
        if (!d || !d->behavior) return nullptr;
        return std::get_if<OriginatingBehavior>(&*d->behavior);
    }

    void build_runtime() {
        std::set<std::uint8_t> fabric_ports;
        for (const auto& [port, dev] : sc_.fabric.port_device)
            fabric_ports.insert(port);
        for (const auto& s : sc_.switches) {
            auto [it, ok] = switches_.emplace(s.id, Switch(s.id));
            roles_[s.id] = s.role;
            if (sc_.topology == TopologyKind::fabric) {
                it->second.set_connected_ports(fabric_ports);
            } else {
                std::set<std::uint8_t> local;
                for (const auto& [ref, peer] : sc_.mesh.links)
                    if (ref.first == s.id) local.insert(ref.second);
                for (const auto& [ref, dev] : sc_.mesh.attachments)
                    if (ref.first == s.id) local.insert(ref.second);
                it->second.set_connected_ports(std::move(local));
            }
        }
        for (const auto& d : sc_.devices) {
            DeviceRuntime rt;
            rt.spec = &d;
            if (d.kind == DeviceKind::endpoint)
                rt.mac = mode_ == ControllerMode::active
                             ? kHostSentinel
                             : MacAddress{0x020000000000ULL | d.attached_port};
            if (d.kind == DeviceKind::middlebox && d.behavior) {
                auto inst = std::make_unique<MiddleboxInstance>(d.name,
                                                                *d.behavior);
                if (d.encap)
                    rt.encap = std::make_unique<EncapBox>(
                        d.name, d.encap->mode, std::move(*inst));
                else
                    rt.mb = std::move(inst);
            }
            if (d.kind == DeviceKind::gateway) {
                std::string gsw = gateway_switch_id(d.name);
                auto [it, ok] = switches_.emplace(gsw, Switch(gsw));
                it->second.set_connected_ports({kGatewayExternalPort});
                roles_[gsw] = SwitchRole::gateway;
            }
            devices_.emplace(d.name, std::move(rt));
        }
    }

    void inject_flow_packet(const FlowSpec& f, int index, std::uint64_t tick) {
        bool reverse = f.pattern == TrafficPattern::bidirectional &&
                       (index % 2 == 1);
        SimPacket p;
        p.payload_id = ++payload_counter_;
        ++trace_.injected;
        if (!reverse) {
            p.flow = f.key;
            p.direction = Direction::downstream;
            p.src_mac = sc_.upstream_mac;
            p.dst_mac = mode_ == ControllerMode::active
                            ? kHostSentinel
                            : devices_.at(f.dest_device).mac;
            auto [sw, port] = ingress_entry();
            walk(sw, port, std::move(p), tick);
        } else {
            const DeviceSpec& dest = *devices_.at(f.dest_device).spec;
            p.flow = reverse_flow_key(f.key);
            p.direction = Direction::upstream;
            p.src_mac = devices_.at(f.dest_device).mac;
            p.dst_mac = mode_ == ControllerMode::active ? kHostSentinel
                                                        : sc_.upstream_mac;
            walk(dest.attached_switch, dest.attached_port, std::move(p), tick);
        }
    }

    // Where external traffic enters: the first ingress-role switch; on a
    // mesh it arrives through the gateway's attachment port.
    std::pair<std::string, std::uint8_t> ingress_entry() const {
        for (const auto& s : sc_.switches) {
            if (s.role != SwitchRole::ingress) continue;
            if (sc_.topology == TopologyKind::fabric)
                return {s.id, kUpstreamPort};
            for (const auto& d : sc_.devices)
                if (d.kind == DeviceKind::gateway && d.attached_switch == s.id)
                    return {s.id, d.attached_port};
            return {s.id, kUpstreamPort};
        }
        throw EngineError("scenario has no ingress switch");
    }

    void end_flow(const FlowKey& key) {
        for (auto& [name, rt] : devices_)
            if (rt.encap) rt.encap->on_flow_end(key);
    }

    struct PendingHop {
        std::string sw;
        std::uint8_t in_port;
        SimPacket packet;
    };

    void walk(const std::string& start_sw, std::uint8_t in_port, SimPacket p,
              std::uint64_t tick) {
        std::deque<PendingHop> pending;
        pending.push_back({start_sw, in_port, std::move(p)});
        int hops = 0;
        while (!pending.empty()) {
            PendingHop hop = std::move(pending.front());
            pending.pop_front();
            if (++hops > sc_.hop_budget) {
                trace_drop(tick, hop.sw, hop.packet, "loop");
                continue;
            }
            auto sw_it = switches_.find(hop.sw);
            if (sw_it == switches_.end())
                throw EngineError("packet at unknown switch " + hop.sw);
            ProcessOutcome out = sw_it->second.process(hop.in_port, hop.packet);
            trace_switch(tick, hop, out);
            switch (out.kind) {
                case OutcomeKind::emit:
                    forward(tick, hop.sw, out.port, std::move(out.packet),
                            pending);
                    break;
                case OutcomeKind::to_controller: {
                    trace_packet_in(tick, hop, out.packet);
                    PacketInResult r =
                        active_ ? active_->on_packet_in(tick, hop.sw,
                                                        hop.in_port,
                                                        out.packet)
                                : baseline_->on_packet_in(tick, hop.sw,
                                                          hop.in_port,
                                                          out.packet);
                    if (r.reemit)
                        pending.push_back(
                            {hop.sw, hop.in_port, std::move(r.packet)});
                    else
                        trace_drop(tick, hop.sw, out.packet, r.drop_reason);
                    break;
                }
                case OutcomeKind::drop:
                    trace_drop(tick, hop.sw, out.packet, out.drop_reason);
                    break;
            }
        }
    }

    void forward(std::uint64_t tick, const std::string& from_sw,
                 std::uint8_t port, SimPacket p,
                 std::deque<PendingHop>& pending) {
        // Gateway switches hand port 2 to the external network.
        if (roles_.count(from_sw) &&
            roles_.at(from_sw) == SwitchRole::gateway &&
            port == kGatewayExternalPort) {
            trace_deliver(tick, from_sw, p, "external");
            return;
        }
        if (sc_.topology == TopologyKind::fabric) {
            auto dev = sc_.fabric.port_device.find(port);
            if (dev == sc_.fabric.port_device.end()) {
                trace_drop(tick, from_sw, p, "blackhole");
                return;
            }
            device_receive(tick, dev->second, port, std::move(p), pending);
            return;
        }
        auto att = sc_.mesh.attachments.find({from_sw, port});
        if (att != sc_.mesh.attachments.end()) {
            device_receive(tick, att->second, port, std::move(p), pending);
            return;
        }
        auto link = sc_.mesh.links.find({from_sw, port});
        if (link != sc_.mesh.links.end()) {
            pending.push_back(
                {link->second.first, link->second.second, std::move(p)});
            return;
        }
        trace_drop(tick, from_sw, p, "blackhole");
    }

    void device_receive(std::uint64_t tick, const std::string& name,
                        std::uint8_t arrival_port, SimPacket p,
                        std::deque<PendingHop>& pending) {
        DeviceRuntime& rt = devices_.at(name);
        const DeviceSpec& spec = *rt.spec;
        switch (spec.kind) {
            case DeviceKind::external:
                trace_deliver(tick, name, p, "external");
                return;
            case DeviceKind::gateway:
                pending.push_back({gateway_switch_id(name),
                                   kGatewayFabricPort, std::move(p)});
                return;
            case DeviceKind::endpoint:
                if (p.dst_mac == rt.mac)
                    trace_deliver(tick, name, p, "");
                else
                    trace_drop(tick, name, p, "mac-mismatch");
                return;
            case DeviceKind::middlebox:
                break;
        }
        // Terminally addressed traffic stops here; host interfaces carry the
        // sentinel address, middlebox interfaces included.
        if (mode_ == ControllerMode::active && p.dst_mac == kHostSentinel) {
            trace_deliver(tick, name, p, "");
            return;
        }
        trace_traverse(tick, name, p);
        std::vector<SimPacket> outputs;
        if (rt.encap) {
            EncapResult res = rt.encap->traverse(p);
            for (const auto& ev : res.events)
                if (ev.is_drop) {
                    trace_drop(tick, name, p, ev.what);
                    return;
                }
            outputs = std::move(res.out);
        } else if (rt.mb) {
            TraverseResult res = rt.mb->traverse(p);
            if (!res.drop_reason.empty()) {
                trace_drop(tick, name, p, res.drop_reason);
                return;
            }
            outputs = std::move(res.out);
        } else {
            trace_drop(tick, name, p, "no-behavior");
            return;
        }
        (void)arrival_port;
        for (auto& q : outputs)
            pending.push_back(
                {spec.attached_switch, spec.attached_port, std::move(q)});
    }

    void trace_switch(std::uint64_t tick, const PendingHop& hop,
                      const ProcessOutcome& out) {
        TraceEvent e;
        e.tick = tick;
        e.kind = EventKind::switch_process;
        e.loc = hop.sw;
        snapshot(e, hop.packet);
        std::ostringstream d;
        d << "in=" << int(hop.in_port);
        if (out.kind == OutcomeKind::emit)
            d << " out=" << int(out.port);
        else if (out.kind == OutcomeKind::to_controller)
            d << " out=controller";
        else
            d << " out=drop";
        if (out.rule_id) d << " rule=" << *out.rule_id;
        e.detail = d.str();
        trace_.push(e);
    }

    void trace_packet_in(std::uint64_t tick, const PendingHop& hop,
                         const SimPacket& p) {
        TraceEvent e;
        e.tick = tick;
        e.kind = EventKind::controller_packet_in;
        e.loc = "controller";
        snapshot(e, p);
        e.detail = "switch=" + hop.sw + " in=" + std::to_string(hop.in_port);
        trace_.push(e);
    }

    void trace_traverse(std::uint64_t tick, const std::string& loc,
                        const SimPacket& p) {
        TraceEvent e;
        e.tick = tick;
        e.kind = EventKind::middlebox_traverse;
        e.loc = loc;
        snapshot(e, p);
        const DeviceRuntime& rt = devices_.at(loc);
        std::string behavior = "none";
        if (rt.encap)
            behavior = std::string("encap+") +
                       behavior_name(rt.encap->inner().behavior());
        else if (rt.mb)
            behavior = behavior_name(rt.mb->behavior());
        e.detail = "behavior=" + behavior;
        trace_.push(e);
    }

    void trace_deliver(std::uint64_t tick, const std::string& loc,
                       const SimPacket& p, const std::string& detail) {
        TraceEvent e;
        e.tick = tick;
        e.kind = EventKind::deliver;
        e.loc = loc;
        snapshot(e, p);
        e.detail = detail;
        trace_.push(e);
        ++trace_.delivered;
    }

    void trace_drop(std::uint64_t tick, const std::string& loc,
                    const SimPacket& p, const std::string& reason) {
        TraceEvent e;
        e.tick = tick;
        e.kind = EventKind::drop;
        e.drop_reason = reason.empty() ? "unspecified" : reason;
        e.loc = loc;
        snapshot(e, p);
        trace_.push(e);
        ++trace_.dropped;
    }

    static void snapshot(TraceEvent& e, const SimPacket& p) {
        e.flow = p.flow;
        e.dst_mac = p.dst_mac;
        e.src_mac = p.src_mac;
        e.dscp = p.dscp;
        e.payload_id = p.payload_id;
    }

    const Scenario& sc_;
    ControllerMode mode_;
    std::uint64_t seed_;
    SwitchMap switches_;
    std::map<std::string, SwitchRole> roles_;
    std::map<std::string, DeviceRuntime> devices_;
    std::unique_ptr<ActiveController> active_;
    std::unique_ptr<BaselineController> baseline_;
    Trace trace_;
    std::uint64_t payload_counter_ = 0;
    bool programmed_ = false;
};

}  // namespace actsw
