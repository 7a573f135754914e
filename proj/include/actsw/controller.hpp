#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "actsw/annotation.hpp"
#include "actsw/flow_table.hpp"
#include "actsw/rng.hpp"
#include "actsw/scenario.hpp"
#include "actsw/trace.hpp"

namespace actsw {

using SwitchMap = std::map<std::string, Switch>;

// Flow-table priority bands, low to high.
namespace prio {
inline constexpr int kDefault = 0;      // catch-all punt to controller
inline constexpr int kShift = 10;       // annotation-consuming edge logic
inline constexpr int kSwap = 20;        // extended-layout src->dst swap
inline constexpr int kDestRule = 20;    // destination-encoding per-id rules
inline constexpr int kZeroDst = 40;     // spent annotation -> controller
inline constexpr int kReannotate = 50;  // table-lookup re-annotation
inline constexpr int kDetect = 60;      // unannotated new flows on mesh edges
inline constexpr int kFlow = 100;       // per-flow annotate/forward rules
}  // namespace prio

class ControllerError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PacketInResult {
    bool reemit = false;
    SimPacket packet{};       // possibly rewritten (controller re-annotation)
    std::string drop_reason;  // set when reemit is false
};

// Suffix appended to a gateway device name to address its one-rule switch.
inline std::string gateway_switch_id(const std::string& device) {
    return device + ".sw";
}
inline constexpr std::uint8_t kGatewayFabricPort = 1;
inline constexpr std::uint8_t kGatewayExternalPort = 2;

// State shared by both control planes: instance selection with affinity,
// gateway programming, rule-install tracing.
class ControllerBase {
  public:
    ControllerBase(const Scenario& sc, SwitchMap& switches, Trace& trace,
                   std::uint64_t seed)
        : sc_(sc), switches_(switches), trace_(trace), seed_(seed) {}

    virtual ~ControllerBase() = default;

    // Existing affinity entries are returned verbatim; a new flow gets one
    // seeded-uniform pick per stage, recorded for its lifetime. The choice
    // is a pure function of (seed, flow, stage), so both controllers agree.
    std::vector<std::string> select_instances(const FlowKey& k,
                                              const ChainSpec& chain) {
        auto it = affinity_.find(k);
        if (it != affinity_.end()) return it->second;
        std::vector<std::string> picks;
        for (std::size_t stage = 0; stage < chain.stages.size(); ++stage) {
            const auto& group = chain.stages[stage];
            if (group.empty())
                throw ControllerError("empty stage group in chain " + chain.id);
            std::uint64_t r = mix64(seed_, k.hash(), stage, 0x5747a6e5ULL);
            picks.push_back(group[r % group.size()]);
        }
        affinity_[k] = picks;
        return picks;
    }

    const std::map<FlowKey, std::vector<std::string>>& affinity_table() const {
        return affinity_;
    }

    std::uint64_t packet_in_count() const { return packet_ins_; }

  protected:
    Switch& sw(const std::string& id) {
        auto it = switches_.find(id);
        if (it == switches_.end())
            throw ControllerError("unknown switch " + id);
        return it->second;
    }

    void trace_install(std::uint64_t tick, const std::string& sw_id,
                       const InstallResult& res, const std::string& what,
                       const FlowKey& flow = {}) {
        TraceEvent e;
        e.tick = tick;
        e.kind = EventKind::rule_install;
        e.loc = sw_id;
        e.flow = flow;
        std::ostringstream d;
        d << "rule=" << res.id << " what=" << what;
        if (res.replaced) d << " replaced=1";
        e.detail = d.str();
        trace_.push(e);
    }

    InstallResult install(std::uint64_t tick, const std::string& sw_id,
                          FlowRule rule, const std::string& what,
                          const FlowKey& flow = {}) {
        InstallResult res = sw(sw_id).install_rule(std::move(rule));
        trace_install(tick, sw_id, res, what, flow);
        return res;
    }

    // Priority-0 catch-all punt; the scenario's "+1" ingress rule.
    void install_default_rule(std::uint64_t tick, const std::string& sw_id) {
        if (!default_done_.insert(sw_id).second) return;
        install(tick, sw_id, FlowRule{prio::kDefault, {}, {ToController{}}},
                "default-to-controller");
    }

    // One rule per gateway: rewrite every destination MAC to the upstream
    // router and push the packet out the external side.
    void install_gateway_rules(std::uint64_t tick) {
        for (const auto& d : sc_.devices) {
            if (d.kind != DeviceKind::gateway) continue;
            if (!gateways_done_.insert(d.name).second) continue;
            FlowRule r{prio::kDefault,
                       {},
                       {SetField{PacketField::dst_mac, sc_.upstream_mac.value},
                        OutputFixed{kGatewayExternalPort}}};
            install(tick, gateway_switch_id(d.name), std::move(r),
                    "gateway-upstream-rewrite");
        }
    }

    std::uint8_t fabric_port_of(const std::string& device) const {
        auto p = sc_.fabric.port_of(device);
        if (!p)
            throw ControllerError("device " + device +
                                  " has no fabric port");
        return *p;
    }

    const DeviceSpec& device(const std::string& name) const {
        const DeviceSpec* d = sc_.find_device(name);
        if (!d) throw ControllerError("unknown device " + name);
        return *d;
    }

    const DeviceSpec* first_gateway() const {
        for (const auto& d : sc_.devices)
            if (d.kind == DeviceKind::gateway) return &d;
        return nullptr;
    }

    const Scenario& sc_;
    SwitchMap& switches_;
    Trace& trace_;
    std::uint64_t seed_;
    std::map<FlowKey, std::vector<std::string>> affinity_;
    std::set<std::string> gateways_done_;
    std::set<std::string> default_done_;
    std::uint64_t packet_ins_ = 0;
};

// ---------------------------------------------------------------------------
// Active switching control plane

class ActiveController : public ControllerBase {
  public:
    using ControllerBase::ControllerBase;

    // Proactive programming: constant edge logic, defaults, detectors.
    // Per-flow state is installed reactively from packet-ins.
    void program_network(std::uint64_t tick = 0) {
        for (const auto& s : sc_.switches)
            if (s.role == SwitchRole::ingress) install_default_rule(tick, s.id);
        if (sc_.topology == TopologyKind::fabric)
            program_fabric(tick);
        else if (sc_.annotation == AnnotationMode::nibble)
            program_mesh_hop_by_hop(tick);
        else
            program_network_destination_encoding(tick);
        // Edge switches next to flow-originating devices behave as ingress
        // switches for the flows they originate.
        for (const auto& d : sc_.devices) {
            if (d.kind != DeviceKind::middlebox || !d.behavior ||
                !std::holds_alternative<OriginatingBehavior>(*d.behavior))
                continue;
            if (has_shift_rule_.count(d.attached_switch))
                install_detector(tick, d.attached_switch, d.attached_port);
            else
                install_default_rule(tick, d.attached_switch);
        }
    }

    // Fabric egress ports for a chosen instance list plus the destination.
    HopPath build_port_path(const std::vector<std::string>& instances,
                            const std::string& dest) const {
        HopPath path;
        for (const auto& inst : instances)
            path.push_back(fabric_port_of(inst));
        path.push_back(fabric_port_of(dest));
        return path;
    }

    // Mesh egress-port walk: for each element, hop switch-by-switch toward
    // its attachment switch, then out the attachment port.
    HopPath build_mesh_port_path(const std::string& start,
                                 const std::vector<std::string>& instances,
                                 const std::string& dest) const {
        HopPath path;
        std::string cur = start;
        std::vector<std::string> elements = instances;
        elements.push_back(dest);
        for (const auto& name : elements) {
            const DeviceSpec& d = device(name);
            if (!d.num_id)
                throw ControllerError("mesh device " + name + " has no num id");
            while (!sc_.mesh.is_adjacent(cur, d.num_id)) {
                std::uint8_t p = sc_.mesh.next_hop(cur, d.num_id);
                path.push_back(p);
                cur = sc_.mesh.links.at({cur, p}).first;
            }
            path.push_back(sc_.mesh.attachment_port(d.num_id));
            cur = d.attached_switch;
        }
        return path;
    }

    // Device-identifier path used by destination encoding.
    HopPath build_id_path(const std::vector<std::string>& instances,
                          const std::string& dest) const {
        HopPath ids;
        for (const auto& inst : instances) ids.push_back(device(inst).num_id);
        ids.push_back(device(dest).num_id);
        return ids;
    }

    PacketInResult on_packet_in(std::uint64_t tick, const std::string& sw_id,
                                std::uint8_t in_port, const SimPacket& p) {
        ++packet_ins_;
        (void)in_port;
        // A spent annotation (all-zero headers) asks for re-annotation from
        // the recorded plan rather than flow setup.
        if (sc_.reannotation == ReannotationMode::controller &&
            p.dst_mac.is_zero() && p.src_mac.is_zero() &&
            continuation_plan_.count(p.flow))
            return reannotate_in_flight(p);

        const ChainSpec* chain = sc_.match_chain(p.flow);
        if (!chain) return {false, p, "policy"};
        std::vector<std::string> instances = select_instances(p.flow, *chain);

        if (sc_.topology == TopologyKind::fabric)
            setup_fabric_flow(tick, sw_id, p, instances, chain->dest);
        else if (sc_.annotation == AnnotationMode::nibble)
            setup_mesh_flow(tick, sw_id, p, instances, chain->dest);
        else
            setup_destination_flow(tick, sw_id, p, instances, chain->dest);

        install_gateway_rules(tick);
        PacketInResult r;
        r.reemit = true;
        r.packet = p;
        return r;
    }

    // Table-lookup re-annotation: packets arriving with the bare index
    // residue 00:00:00:00:00:<i> get the continuation written back in and
    // continue through the edge logic.
    std::uint64_t install_reannotation_rule(std::uint64_t tick,
                                            const std::string& sw_id,
                                            std::uint8_t index,
                                            const HopPath& continuation) {
        if (index == 0 || index == kOctetSwapMark || index == kOctetHostMark)
            throw ControllerError("re-annotation index " +
                                  std::to_string(int(index)) + " is reserved");
        auto key = std::make_pair(sw_id, index);
        if (reann_installed_.count(key))
            throw ControllerError("re-annotation index " +
                                  std::to_string(int(index)) +
                                  " already used at " + sw_id);
        FlowRule r;
        r.priority = prio::kReannotate;
        r.match = MatchSpec::exact_dst(MacAddress{index});
        r.actions = annotate_actions(continuation, kOctetHostMark);
        InstallResult res =
            install(tick, sw_id, std::move(r), "reannotate-index-" +
                                                   std::to_string(int(index)));
        reann_installed_.insert(key);
        return res.id;
    }

    // Per-switch/per-id forwarding state for mesh destination encoding:
    // adjacent ids shift-and-deliver, everything else forwards unmodified
    // toward the next hop.
    void program_network_destination_encoding(std::uint64_t tick = 0) {
        for (const auto& s : sc_.switches) {
            for (const auto& [id, loc] : sc_.mesh.device_locations) {
                FlowRule r;
                r.match = MatchSpec::low_dst_octet(id);
                r.priority = prio::kDestRule;
                if (sc_.mesh.is_adjacent(s.id, id)) {
                    r.actions = {
                        LoadField{PacketField::dst_mac, 8, 40, 1},
                        StoreField{1, PacketField::dst_mac, 0, 48},
                        OutputFixed{sc_.mesh.attachment_port(id)},
                    };
                    install(tick, s.id, std::move(r),
                            "dest-rewrite-id-" + std::to_string(int(id)));
                } else {
                    r.actions = {OutputFixed{sc_.mesh.next_hop(s.id, id)}};
                    install(tick, s.id, std::move(r),
                            "dest-forward-id-" + std::to_string(int(id)));
                }
            }
        }
        install_gateway_rules(tick);
    }

  private:
    struct Segment {
        HopPath hops;
        std::uint8_t tail;  // host sentinel, table index, or 0 for controller

        bool operator<(const Segment& o) const {
            return std::tie(hops, tail) < std::tie(o.hops, o.tail);
        }
    };

    void program_fabric(std::uint64_t tick) {
        for (const auto& s : sc_.switches) {
            if (s.role != SwitchRole::middlebox) continue;
            install(tick, s.id,
                    FlowRule{prio::kShift, {},
                             compile_edge_shift_program(AnnotationMode::octet)},
                    "edge-shift");
            has_shift_rule_.insert(s.id);
            if (sc_.annotation == AnnotationMode::extended) {
                FlowRule swap;
                swap.priority = prio::kSwap;
                swap.match = MatchSpec::low_dst_octet(kOctetSwapMark);
                swap.actions = compile_edge_swap_program();
                install(tick, s.id, std::move(swap), "edge-swap");
            }
            if (sc_.reannotation == ReannotationMode::controller) {
                FlowRule z;
                z.priority = prio::kZeroDst;
                z.match = MatchSpec::exact_dst(kZeroMac);
                z.actions = {ToController{}};
                install(tick, s.id, std::move(z), "spent-annotation-punt");
            }
        }
    }

    void program_mesh_hop_by_hop(std::uint64_t tick) {
        for (const auto& s : sc_.switches) {
            install(tick, s.id,
                    FlowRule{prio::kShift, {},
                             compile_edge_shift_program(AnnotationMode::nibble)},
                    "edge-shift");
            has_shift_rule_.insert(s.id);
        }
        // The shift rule matches everything, so unannotated first packets
        // entering from a gateway need an explicit path to the controller.
        for (const auto& d : sc_.devices)
            if (d.kind == DeviceKind::gateway)
                install_detector(tick, d.attached_switch, d.attached_port);
    }

    void install_detector(std::uint64_t tick, const std::string& sw_id,
                          std::uint8_t port) {
        FlowRule r;
        r.priority = prio::kDetect;
        r.match.in_port = port;
        r.match.dst_mac = MaskedMac{kHostSentinel};
        r.actions = {ToController{}};
        install(tick, sw_id, std::move(r), "new-flow-detector");
    }

    // Split a long path into annotation-capacity segments, allocating
    // table indices (or zero tails) at each boundary.
    std::vector<Segment> plan_segments(const HopPath& path) {
        std::size_t cap = sc_.annotation == AnnotationMode::extended
                              ? kMaxExtendedHops
                              : kMaxOctetHops;
        std::vector<Segment> out;
        std::size_t pos = 0;
        while (path.size() - pos > cap) {
            Segment seg;
            seg.hops.assign(path.begin() + pos, path.begin() + pos + cap);
            seg.tail = 0;  // resolved below for table mode
            out.push_back(seg);
            pos += cap;
        }
        Segment last;
        last.hops.assign(path.begin() + pos, path.end());
        last.tail = kOctetHostMark;
        out.push_back(last);
        return out;
    }

    ActionProgram annotate_actions(const HopPath& hops, std::uint8_t t) {
        ActionProgram prog;
        if (sc_.annotation == AnnotationMode::extended) {
            AnnotationPair enc = encode_extended_path_with_tail(hops, t);
            prog.push_back(SetField{PacketField::dst_mac, enc.dst.value});
            prog.push_back(SetField{PacketField::src_mac, enc.src.value});
        } else {
            MacAddress enc = encode_octet_path_with_tail(hops, t);
            prog.push_back(SetField{PacketField::dst_mac, enc.value});
        }
        for (const auto& a : compile_edge_shift_program(AnnotationMode::octet))
            prog.push_back(a);
        return prog;
    }

    // Install one direction of a fabric flow: the annotate rule at the entry
    // switch plus any re-annotation rules along the way.
    void install_fabric_direction(std::uint64_t tick, const std::string& entry,
                                  const FlowKey& key, const HopPath& path,
                                  const std::string& what) {
        auto segments = plan_segments(path);
        if (segments.size() > 1 &&
            sc_.reannotation == ReannotationMode::table) {
            // Chain the segments with lookup indices, last to first, so each
            // segment's rule already exists when its index is referenced.
            for (std::size_t i = segments.size(); i-- > 1;) {
                const std::string& reann_switch =
                    owner_switch(segments[i - 1].hops.back());
                segments[i - 1].tail =
                    allocate_reann_index(tick, reann_switch, segments[i]);
            }
        } else if (segments.size() > 1) {
            for (std::size_t i = 0; i + 1 < segments.size(); ++i)
                segments[i].tail = 0;
            continuation_plan_[key] = {};
            for (std::size_t i = 1; i < segments.size(); ++i)
                continuation_plan_[key].push_back(
                    {segments[i].hops, segments[i].tail});
        }
        FlowRule r;
        r.priority = prio::kFlow;
        r.match = MatchSpec::exact_flow(key);
        r.actions = annotate_actions(segments[0].hops, segments[0].tail);
        install(tick, entry, std::move(r), what, key);
    }

    const std::string& owner_switch(std::uint8_t fabric_port) const {
        auto it = sc_.fabric.port_owner.find(fabric_port);
        if (it == sc_.fabric.port_owner.end())
            throw ControllerError("fabric port " +
                                  std::to_string(int(fabric_port)) +
                                  " has no owner switch");
        return it->second;
    }

    // Reuse an existing index for an identical continuation at the same
    // switch; otherwise take the lowest free one.
    std::uint8_t allocate_reann_index(std::uint64_t tick,
                                      const std::string& sw_id,
                                      const Segment& seg) {
        auto cont_key = std::make_pair(sw_id, seg);
        auto it = reann_by_continuation_.find(cont_key);
        if (it != reann_by_continuation_.end()) return it->second;
        for (std::uint8_t i = 1; i <= 253; ++i) {
            if (reann_installed_.count({sw_id, i})) continue;
            FlowRule r;
            r.priority = prio::kReannotate;
            r.match = MatchSpec::exact_dst(MacAddress{i});
            r.actions = annotate_actions(seg.hops, seg.tail);
            install(tick, sw_id, std::move(r),
                    "reannotate-index-" + std::to_string(int(i)));
            reann_installed_.insert({sw_id, i});
            reann_by_continuation_[cont_key] = i;
            return i;
        }
        throw ControllerError("re-annotation index space exhausted at " +
                              sw_id);
    }

    void setup_fabric_flow(std::uint64_t tick, const std::string& sw_id,
                           const SimPacket& p,
                           const std::vector<std::string>& instances,
                           const std::string& dest) {
        HopPath fwd = build_port_path(instances, dest);
        install_fabric_direction(tick, sw_id, p.flow, fwd, "annotate");
        if (const DeviceSpec* gw = first_gateway()) {
            std::vector<std::string> rev_instances(instances.rbegin(),
                                                   instances.rend());
            HopPath rev = build_port_path(rev_instances, gw->name);
            const std::string& ep_switch = device(dest).attached_switch;
            install_fabric_direction(tick, ep_switch,
                                     reverse_flow_key(p.flow), rev,
                                     "annotate-reverse");
        }
    }

    void setup_mesh_flow(std::uint64_t tick, const std::string& sw_id,
                         const SimPacket& p,
                         const std::vector<std::string>& instances,
                         const std::string& dest) {
        HopPath fwd = build_mesh_port_path(sw_id, instances, dest);
        install_nibble_annotate(tick, sw_id, p.flow, fwd, "annotate");
        if (const DeviceSpec* gw = first_gateway()) {
            std::vector<std::string> rev_instances(instances.rbegin(),
                                                   instances.rend());
            const std::string& ep_switch = device(dest).attached_switch;
            HopPath rev =
                build_mesh_port_path(ep_switch, rev_instances, gw->name);
            install_nibble_annotate(tick, ep_switch, reverse_flow_key(p.flow),
                                    rev, "annotate-reverse");
        }
    }

    void install_nibble_annotate(std::uint64_t tick, const std::string& entry,
                                 const FlowKey& key, const HopPath& path,
                                 const std::string& what) {
        MacAddress enc = encode_nibble_path(path);
        FlowRule r;
        r.priority = prio::kFlow;
        r.match = MatchSpec::exact_flow(key);
        r.actions = {SetField{PacketField::dst_mac, enc.value}};
        for (const auto& a : compile_edge_shift_program(AnnotationMode::nibble))
            r.actions.push_back(a);
        install(tick, entry, std::move(r), what, key);
    }

    void setup_destination_flow(std::uint64_t tick, const std::string& sw_id,
                                const SimPacket& p,
                                const std::vector<std::string>& instances,
                                const std::string& dest) {
        HopPath ids = build_id_path(instances, dest);
        install_dest_annotate(tick, sw_id, p.flow, ids, "annotate");
        if (const DeviceSpec* gw = first_gateway()) {
            std::vector<std::string> rev_instances(instances.rbegin(),
                                                   instances.rend());
            HopPath rev = build_id_path(rev_instances, gw->name);
            install_dest_annotate(tick, device(dest).attached_switch,
                                  reverse_flow_key(p.flow), rev,
                                  "annotate-reverse");
        }
    }

    // The entry switch consumes the first identifier itself, exactly as its
    // per-id rule would: shift-and-attach when adjacent, forward unmodified
    // otherwise.
    void install_dest_annotate(std::uint64_t tick, const std::string& entry,
                               const FlowKey& key, const HopPath& ids,
                               const std::string& what) {
        MacAddress enc = encode_octet_path(ids);
        FlowRule r;
        r.priority = prio::kFlow;
        r.match = MatchSpec::exact_flow(key);
        r.actions = {SetField{PacketField::dst_mac, enc.value}};
        std::uint8_t first = ids.at(0);
        if (sc_.mesh.is_adjacent(entry, first)) {
            r.actions.push_back(LoadField{PacketField::dst_mac, 8, 40, 1});
            r.actions.push_back(StoreField{1, PacketField::dst_mac, 0, 48});
            r.actions.push_back(
                OutputFixed{sc_.mesh.attachment_port(first)});
        } else {
            r.actions.push_back(OutputFixed{sc_.mesh.next_hop(entry, first)});
        }
        install(tick, entry, std::move(r), what, key);
    }

    PacketInResult reannotate_in_flight(const SimPacket& p) {
        auto& segments = continuation_plan_.at(p.flow);
        auto key = std::make_pair(p.flow, p.payload_id);
        std::size_t idx = continuation_progress_[key]++;
        if (idx >= segments.size()) return {false, p, "no-continuation"};
        const auto& seg = segments[idx];
        SimPacket out = p;
        if (sc_.annotation == AnnotationMode::extended) {
            AnnotationPair enc =
                encode_extended_path_with_tail(seg.first, seg.second);
            out.dst_mac = enc.dst;
            out.src_mac = enc.src;
        } else {
            out.dst_mac = encode_octet_path_with_tail(seg.first, seg.second);
        }
        PacketInResult r;
        r.reemit = true;
        r.packet = out;
        return r;
    }

    std::set<std::string> has_shift_rule_;
    std::set<std::pair<std::string, std::uint8_t>> reann_installed_;
    std::map<std::pair<std::string, Segment>, std::uint8_t>
        reann_by_continuation_;
    std::map<FlowKey, std::vector<std::pair<HopPath, std::uint8_t>>>
        continuation_plan_;
    std::map<std::pair<FlowKey, std::uint64_t>, std::size_t>
        continuation_progress_;
};

// ---------------------------------------------------------------------------
// Baseline match-and-forward control plane

// Installs the conventional per-flow rule set along the whole path: one
// ingress rule, four per traversed middlebox at its adjacent switch, two at
// the endpoint-adjacent switch. Rule priorities step down along the path so
// every rule is distinct even where the topology makes two of them coincide.
class BaselineController : public ControllerBase {
  public:
    using ControllerBase::ControllerBase;

    void program_network(std::uint64_t tick = 0) {
        for (const auto& s : sc_.switches)
            if (s.role == SwitchRole::ingress) install_default_rule(tick, s.id);
        for (const auto& d : sc_.devices) {
            if (d.kind != DeviceKind::middlebox || !d.behavior ||
                !std::holds_alternative<OriginatingBehavior>(*d.behavior))
                continue;
            install_default_rule(tick, d.attached_switch);
        }
    }

    PacketInResult on_packet_in(std::uint64_t tick, const std::string& sw_id,
                                std::uint8_t in_port, const SimPacket& p) {
        ++packet_ins_;
        (void)in_port;
        if (sc_.topology != TopologyKind::fabric)
            return {false, p, "unsupported-topology"};
        const ChainSpec* chain = sc_.match_chain(p.flow);
        if (!chain) return {false, p, "policy"};
        std::vector<std::string> instances = select_instances(p.flow, *chain);

        const DeviceSpec* gw = first_gateway();
        FlowKey fwd = p.flow;
        FlowKey rev = reverse_flow_key(p.flow);
        int next_prio = prio::kFlow;
        auto step_prio = [&]() { return next_prio--; };

        // Element ports along the forward path, destination last.
        std::vector<std::uint8_t> ports;
        for (const auto& inst : instances)
            ports.push_back(fabric_port_of(inst));
        std::uint8_t dest_port = fabric_port_of(chain->dest);
        std::uint8_t gw_port = gw ? fabric_port_of(gw->name) : 0;

        auto flow_rule = [&](const FlowKey& k,
                             std::optional<std::uint8_t> in,
                             std::uint8_t out) {
            FlowRule r;
            r.priority = step_prio();
            r.match = MatchSpec::exact_flow(k);
            r.match.in_port = in;
            r.actions = {OutputFixed{out}};
            return r;
        };

        std::uint8_t first_hop = ports.empty() ? dest_port : ports[0];
        install(tick, sw_id, flow_rule(fwd, std::nullopt, first_hop),
                "baseline-ingress", fwd);

        for (std::size_t i = 0; i < ports.size(); ++i) {
            const std::string& mb_switch = owner_switch(ports[i]);
            std::uint8_t from_prev =
                i == 0 ? kUpstreamPort
                       : local_or_upstream(mb_switch, ports[i - 1]);
            std::uint8_t to_next =
                i + 1 < ports.size() ? ports[i + 1] : dest_port;
            std::uint8_t from_next =
                local_or_upstream(mb_switch,
                                  i + 1 < ports.size() ? ports[i + 1]
                                                       : dest_port);
            std::uint8_t to_prev = i == 0 ? gw_port : ports[i - 1];
            install(tick, mb_switch,
                    flow_rule(fwd, from_prev, ports[i]),
                    "baseline-toward-mb", fwd);
            install(tick, mb_switch, flow_rule(fwd, ports[i], to_next),
                    "baseline-from-mb", fwd);
            install(tick, mb_switch, flow_rule(rev, from_next, ports[i]),
                    "baseline-toward-mb-rev", rev);
            install(tick, mb_switch, flow_rule(rev, ports[i], to_prev),
                    "baseline-from-mb-rev", rev);
        }

        const std::string& ep_switch = owner_switch(dest_port);
        install(tick, ep_switch, flow_rule(fwd, kUpstreamPort, dest_port),
                "baseline-deliver", fwd);
        std::uint8_t rev_first = ports.empty() ? gw_port : ports.back();
        install(tick, ep_switch, flow_rule(rev, dest_port, rev_first),
                "baseline-reverse-first-hop", rev);

        install_gateway_rules(tick);
        PacketInResult r;
        r.reemit = true;
        r.packet = p;
        return r;
    }

  private:
    const std::string& owner_switch(std::uint8_t fabric_port) const {
        auto it = sc_.fabric.port_owner.find(fabric_port);
        if (it == sc_.fabric.port_owner.end())
            throw ControllerError("fabric port " +
                                  std::to_string(int(fabric_port)) +
                                  " has no owner switch");
        return it->second;
    }

    // in_port a packet from `port`'s device shows as at `sw_id`: the port
    // itself when local, the upstream side otherwise.
    std::uint8_t local_or_upstream(const std::string& sw_id,
                                   std::uint8_t port) const {
        return owner_switch(port) == sw_id ? port : kUpstreamPort;
    }
};

}  // namespace actsw
