#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "actsw/annotation.hpp"
#include "actsw/encapsulation.hpp"
#include "actsw/flow_table.hpp"
#include "actsw/middlebox.hpp"
#include "actsw/topology.hpp"

namespace actsw {

class ScenarioError : public std::runtime_error {
  public:
    ScenarioError(const std::string& file, int line, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg),
          line_number(line) {}
    explicit ScenarioError(const std::string& msg)
        : std::runtime_error(msg), line_number(0) {}
    int line_number;
};

enum class TopologyKind : std::uint8_t { fabric, mesh };
enum class SwitchRole : std::uint8_t {
    ingress,
    middlebox,
    endpoint,
    interior,
    gateway
};

inline const char* to_string(SwitchRole r) {
    switch (r) {
        case SwitchRole::ingress: return "ingress";
        case SwitchRole::middlebox: return "middlebox";
        case SwitchRole::endpoint: return "endpoint";
        case SwitchRole::interior: return "interior";
        case SwitchRole::gateway: return "gateway";
    }
    return "?";
}

struct SwitchSpec {
    std::string id;
    SwitchRole role = SwitchRole::interior;
};

struct EncapSpec {
    EncapMode mode{};
};

struct DeviceSpec {
    std::string name;
    DeviceKind kind = DeviceKind::endpoint;
    std::uint32_t ip = 0;        // endpoints and originators
    std::uint8_t num_id = 0;     // destination-encoding identifier, 0 = none
    std::optional<MiddleboxBehavior> behavior;
    std::optional<EncapSpec> encap;
    std::string attached_switch;
    std::uint8_t attached_port = 0;
};

struct ChainSpec {
    std::string id;
    MatchSpec match;  // FlowKey fields only
    std::vector<std::vector<std::string>> stages;
    std::string dest;
};

enum class TrafficPattern : std::uint8_t { forward_only, bidirectional };

struct WorkloadSpec {
    int flows = 0;
    int packets_per_flow = 2;
    TrafficPattern pattern = TrafficPattern::bidirectional;
};

// Linear rule-count expectation of the shape a*n + b ("11n+1", "2n", "1").
struct LinearForm {
    long a = 0;
    long b = 0;
    long eval(long n) const { return a * n + b; }

    static std::optional<LinearForm> parse(const std::string& text) {
        LinearForm f;
        std::size_t npos = text.find('n');
        if (npos == std::string::npos) {
            try {
                f.b = std::stol(text);
            } catch (...) {
                return std::nullopt;
            }
            return f;
        }
        std::string coef = text.substr(0, npos);
        if (coef.empty())
            f.a = 1;
        else {
            try {
                f.a = std::stol(coef);
            } catch (...) {
                return std::nullopt;
            }
        }
        std::string rest = text.substr(npos + 1);
        if (rest.empty())
            f.b = 0;
        else if (rest[0] == '+' || rest[0] == '-') {
            try {
                f.b = std::stol(rest);
            } catch (...) {
                return std::nullopt;
            }
        } else {
            return std::nullopt;
        }
        return f;
    }
};

struct ExpectSpec {
    LinearForm ingress, middlebox, endpoint, total;
};

enum class ReannotationMode : std::uint8_t { table, controller };

struct Scenario {
    std::string name;
    TopologyKind topology = TopologyKind::fabric;
    AnnotationMode annotation = AnnotationMode::octet;
    ReannotationMode reannotation = ReannotationMode::table;
    int hop_budget = 4 * int(kMaxExtendedHops);
    std::uint64_t default_seed = 1;
    MacAddress upstream_mac{0x02ffffffff01ULL};

    std::vector<SwitchSpec> switches;
    std::vector<DeviceSpec> devices;
    Fabric fabric;
    MeshTopology mesh;
    std::vector<ChainSpec> chains;
    WorkloadSpec workload;
    std::map<std::string, ExpectSpec> expects;  // "active" / "baseline"

    const SwitchSpec* find_switch(const std::string& id) const {
        for (const auto& s : switches)
            if (s.id == id) return &s;
        return nullptr;
    }
    const DeviceSpec* find_device(const std::string& name) const {
        for (const auto& d : devices)
            if (d.name == name) return &d;
        return nullptr;
    }
    const ChainSpec* find_chain(const std::string& id) const {
        for (const auto& c : chains)
            if (c.id == id) return &c;
        return nullptr;
    }
    const DeviceSpec* device_by_num(std::uint8_t num) const {
        for (const auto& d : devices)
            if (d.num_id == num) return &d;
        return nullptr;
    }
    // First chain whose match covers the key, in declaration order.
    const ChainSpec* match_chain(const FlowKey& k) const {
        SimPacket probe;
        probe.flow = k;
        for (const auto& c : chains)
            if (c.match.matches(0, probe)) return &c;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Parser: one directive per line, '#' comments, whitespace separated.

namespace detail {

struct LineLexer {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    std::string file;
    int line = 0;

    bool done() const { return pos >= tokens.size(); }

    std::string next(const std::string& what) {
        if (done())
            throw ScenarioError(file, line, "expected " + what);
        return tokens[pos++];
    }

    long next_int(const std::string& what, long lo, long hi) {
        std::string t = next(what);
        long v;
        try {
            std::size_t used = 0;
            v = std::stol(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (...) {
            throw ScenarioError(file, line, what + " must be an integer, got '" + t + "'");
        }
        if (v < lo || v > hi)
            throw ScenarioError(file, line, what + " " + std::to_string(v) +
                                                " out of range [" +
                                                std::to_string(lo) + "," +
                                                std::to_string(hi) + "]");
        return v;
    }

    std::uint32_t next_ip(const std::string& what) {
        std::string t = next(what);
        auto ip = parse_ipv4(t);
        if (!ip)
            throw ScenarioError(file, line, what + " is not an IPv4 address: '" + t + "'");
        return *ip;
    }

    MacAddress next_mac(const std::string& what) {
        std::string t = next(what);
        auto m = MacAddress::parse(t);
        if (!m)
            throw ScenarioError(file, line, what + " is not a MAC address: '" + t + "'");
        return *m;
    }
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline FlowField parse_flow_field(LineLexer& lex, const std::string& t) {
    if (t == "src_ip") return FlowField::src_ip;
    if (t == "dst_ip") return FlowField::dst_ip;
    if (t == "src_port") return FlowField::src_port;
    if (t == "dst_port") return FlowField::dst_port;
    if (t == "proto" || t == "protocol") return FlowField::protocol;
    throw ScenarioError(lex.file, lex.line, "unknown flow field '" + t + "'");
}

inline std::set<FlowField> parse_flow_fields(LineLexer& lex,
                                             const std::string& list) {
    std::set<FlowField> out;
    for (const auto& t : split(list, ','))
        out.insert(parse_flow_field(lex, t));
    return out;
}

inline MiddleboxBehavior parse_behavior(LineLexer& lex, std::uint32_t device_ip) {
    std::string kind = lex.next("behavior kind");
    if (kind == "transparent") return TransparentBehavior{};
    if (kind == "terminating") return TerminatingBehavior{};
    if (kind == "translucent") {
        TranslucentBehavior b;
        while (!lex.done()) {
            std::string key = lex.next("parameter");
            if (key == "seed")
                b.seed = lex.next_int("seed", 0, INT64_MAX);
            else if (key == "rate")
                b.drop_percent = int(lex.next_int("rate", 0, 100));
            else
                throw ScenarioError(lex.file, lex.line,
                                    "unknown translucent parameter '" + key + "'");
        }
        return b;
    }
    if (kind == "mangling" || kind == "mangling_router") {
        ManglingRouterBehavior rb;
        ManglingBehavior mb;
        bool router = kind == "mangling_router";
        std::set<FlowField> rewrites;
        bool have_rewrites = false;
        std::uint64_t seed = 0;
        MacAddress own{}, nh{};
        while (!lex.done()) {
            std::string key = lex.next("parameter");
            if (key == "seed")
                seed = lex.next_int("seed", 0, INT64_MAX);
            else if (key == "rewrites") {
                rewrites = parse_flow_fields(lex, lex.next("field list"));
                have_rewrites = true;
            } else if (key == "mac" && router)
                own = lex.next_mac("mac");
            else if (key == "nexthop" && router)
                nh = lex.next_mac("nexthop");
            else
                throw ScenarioError(lex.file, lex.line,
                                    "unknown mangling parameter '" + key + "'");
        }
        if (have_rewrites && rewrites.empty())
            throw ScenarioError(lex.file, lex.line, "empty rewrites list");
        if (router) {
            rb.seed = seed;
            if (have_rewrites) rb.rewrites = rewrites;
            rb.own_mac = own;
            rb.next_hop_mac = nh;
            return rb;
        }
        mb.seed = seed;
        if (have_rewrites) mb.rewrites = rewrites;
        return mb;
    }
    if (kind == "originating") {
        OriginatingBehavior b;
        b.source_ip = device_ip;
        while (!lex.done()) {
            std::string key = lex.next("parameter");
            if (key == "target") {
                std::string t = lex.next("target ip[:port]");
                auto parts = split(t, ':');
                auto ip = parse_ipv4(parts[0]);
                if (!ip)
                    throw ScenarioError(lex.file, lex.line,
                                        "bad target address '" + t + "'");
                b.target_ip = *ip;
                if (parts.size() > 1) b.target_port = std::stoi(parts[1]);
            } else if (key == "schedule") {
                for (const auto& slot : split(lex.next("schedule"), ',')) {
                    auto kv = split(slot, ':');
                    if (kv.size() != 2)
                        throw ScenarioError(lex.file, lex.line,
                                            "schedule entries are tick:count");
                    b.schedule.push_back(
                        {std::stoull(kv[0]), std::stoi(kv[1])});
                }
            } else {
                throw ScenarioError(lex.file, lex.line,
                                    "unknown originating parameter '" + key + "'");
            }
        }
        return b;
    }
    throw ScenarioError(lex.file, lex.line, "unknown behavior '" + kind + "'");
}

}  // namespace detail

inline Scenario parse_scenario_text(const std::string& text,
                                    const std::string& filename = "<inline>") {
    using detail::LineLexer;
    Scenario sc;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool saw_workload = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::istringstream ls(line);
        LineLexer lex;
        lex.file = filename;
        lex.line = line_no;
        std::string tok;
        while (ls >> tok) lex.tokens.push_back(tok);
        if (lex.tokens.empty()) continue;
        std::string head = lex.next("directive");

        if (head == "name") {
            sc.name = lex.next("name");
        } else if (head == "topology") {
            std::string t = lex.next("topology kind");
            if (t == "fabric")
                sc.topology = TopologyKind::fabric;
            else if (t == "mesh")
                sc.topology = TopologyKind::mesh;
            else
                throw ScenarioError(filename, line_no,
                                    "topology must be fabric or mesh");
        } else if (head == "annotation") {
            std::string t = lex.next("annotation mode");
            if (t == "octet")
                sc.annotation = AnnotationMode::octet;
            else if (t == "nibble")
                sc.annotation = AnnotationMode::nibble;
            else if (t == "extended")
                sc.annotation = AnnotationMode::extended;
            else if (t == "destination")
                sc.annotation = AnnotationMode::destination;
            else
                throw ScenarioError(filename, line_no,
                                    "unknown annotation mode '" + t + "'");
        } else if (head == "reannotation") {
            std::string t = lex.next("reannotation mode");
            if (t == "table")
                sc.reannotation = ReannotationMode::table;
            else if (t == "controller")
                sc.reannotation = ReannotationMode::controller;
            else
                throw ScenarioError(filename, line_no,
                                    "reannotation must be table or controller");
        } else if (head == "hop_budget") {
            sc.hop_budget = int(lex.next_int("hop_budget", 1, 1 << 20));
        } else if (head == "seed") {
            sc.default_seed = lex.next_int("seed", 0, INT64_MAX);
        } else if (head == "upstream_mac") {
            sc.upstream_mac = lex.next_mac("upstream_mac");
        } else if (head == "switch") {
            SwitchSpec s;
            s.id = lex.next("switch id");
            while (!lex.done()) {
                std::string key = lex.next("parameter");
                if (key == "role") {
                    std::string r = lex.next("role");
                    if (r == "ingress")
                        s.role = SwitchRole::ingress;
                    else if (r == "middlebox")
                        s.role = SwitchRole::middlebox;
                    else if (r == "endpoint")
                        s.role = SwitchRole::endpoint;
                    else if (r == "interior")
                        s.role = SwitchRole::interior;
                    else if (r == "gateway")
                        s.role = SwitchRole::gateway;
                    else
                        throw ScenarioError(filename, line_no,
                                            "unknown role '" + r + "'");
                } else {
                    throw ScenarioError(filename, line_no,
                                        "unknown switch parameter '" + key + "'");
                }
            }
            sc.switches.push_back(std::move(s));
        } else if (head == "device") {
            DeviceSpec d;
            d.name = lex.next("device name");
            std::string kw = lex.next("kind");
            if (kw != "kind")
                throw ScenarioError(filename, line_no, "expected 'kind'");
            std::string k = lex.next("device kind");
            if (k == "endpoint")
                d.kind = DeviceKind::endpoint;
            else if (k == "middlebox")
                d.kind = DeviceKind::middlebox;
            else if (k == "gateway")
                d.kind = DeviceKind::gateway;
            else if (k == "external")
                d.kind = DeviceKind::external;
            else
                throw ScenarioError(filename, line_no,
                                    "unknown device kind '" + k + "'");
            while (!lex.done()) {
                std::string key = lex.next("parameter");
                if (key == "ip")
                    d.ip = lex.next_ip("ip");
                else if (key == "num")
                    d.num_id = std::uint8_t(lex.next_int("num", 1, 253));
                else if (key == "behavior") {
                    d.behavior = detail::parse_behavior(lex, d.ip);
                    break;  // behavior consumes the rest of the line
                } else {
                    throw ScenarioError(filename, line_no,
                                        "unknown device parameter '" + key + "'");
                }
            }
            sc.devices.push_back(std::move(d));
        } else if (head == "attach") {
            std::string dev = lex.next("device name");
            std::string kw1 = lex.next("'switch'");
            if (kw1 != "switch")
                throw ScenarioError(filename, line_no, "expected 'switch'");
            std::string sw = lex.next("switch id");
            std::string kw2 = lex.next("'port'");
            if (kw2 != "port")
                throw ScenarioError(filename, line_no, "expected 'port'");
            int port = int(lex.next_int("port", 1, 253));
            bool found = false;
            for (auto& d : sc.devices) {
                if (d.name != dev) continue;
                d.attached_switch = sw;
                d.attached_port = std::uint8_t(port);
                found = true;
            }
            if (!found)
                throw ScenarioError(filename, line_no,
                                    "attach references unknown device '" + dev + "'");
        } else if (head == "link") {
            std::string a = lex.next("switch id");
            int pa = int(lex.next_int("port", 1, 253));
            std::string b = lex.next("switch id");
            int pb = int(lex.next_int("port", 1, 253));
            sc.mesh.add_link(a, std::uint8_t(pa), b, std::uint8_t(pb));
        } else if (head == "nexthop") {
            std::string sw = lex.next("switch id");
            int id = int(lex.next_int("device id", 1, 253));
            int port = int(lex.next_int("port", 1, 253));
            sc.mesh.pinned_next_hop[{sw, std::uint8_t(id)}] = std::uint8_t(port);
        } else if (head == "chain") {
            ChainSpec c;
            c.id = lex.next("chain id");
            while (!lex.done()) {
                std::string key = lex.next("parameter");
                if (key == "match") {
                    for (const auto& cond : detail::split(lex.next("match"), ',')) {
                        auto kv = detail::split(cond, '=');
                        if (kv.size() != 2)
                            throw ScenarioError(filename, line_no,
                                                "match terms are field=value");
                        FlowField f = detail::parse_flow_field(lex, kv[0]);
                        switch (f) {
                            case FlowField::src_ip: {
                                auto ip = parse_ipv4(kv[1]);
                                if (!ip)
                                    throw ScenarioError(filename, line_no,
                                                        "bad src_ip");
                                c.match.src_ip = *ip;
                                break;
                            }
                            case FlowField::dst_ip: {
                                auto ip = parse_ipv4(kv[1]);
                                if (!ip)
                                    throw ScenarioError(filename, line_no,
                                                        "bad dst_ip");
                                c.match.dst_ip = *ip;
                                break;
                            }
                            case FlowField::src_port:
                                c.match.src_port = std::stoi(kv[1]);
                                break;
                            case FlowField::dst_port:
                                c.match.dst_port = std::stoi(kv[1]);
                                break;
                            case FlowField::protocol:
                                c.match.protocol = std::stoi(kv[1]);
                                break;
                        }
                    }
                } else if (key == "stages") {
                    std::string list = lex.next("stage list");
                    if (list != "-")
                        for (const auto& stage : detail::split(list, ','))
                            c.stages.push_back(detail::split(stage, '|'));
                } else if (key == "dest") {
                    c.dest = lex.next("dest");
                } else {
                    throw ScenarioError(filename, line_no,
                                        "unknown chain parameter '" + key + "'");
                }
            }
            sc.chains.push_back(std::move(c));
        } else if (head == "encap") {
            std::string dev = lex.next("device name");
            DeviceSpec* target = nullptr;
            for (auto& d : sc.devices)
                if (d.name == dev) target = &d;
            if (!target)
                throw ScenarioError(filename, line_no,
                                    "encap references unknown device '" + dev + "'");
            std::string kw = lex.next("'mode'");
            if (kw != "mode")
                throw ScenarioError(filename, line_no, "expected 'mode'");
            std::string mode = lex.next("encap mode");
            EncapSpec spec;
            if (mode == "assoc") {
                AssocArrayMode a;
                while (!lex.done()) {
                    std::string key = lex.next("parameter");
                    if (key == "key")
                        a.key_fields =
                            detail::parse_flow_fields(lex, lex.next("field list"));
                    else
                        throw ScenarioError(filename, line_no,
                                            "unknown assoc parameter '" + key + "'");
                }
                spec.mode = a;
            } else if (mode == "dscp") {
                DscpTagMode d;
                while (!lex.done()) {
                    std::string key = lex.next("parameter");
                    if (key == "pool")
                        d.pool_size = int(lex.next_int("pool", 1, 64));
                    else if (key == "default")
                        d.restore_dscp =
                            std::uint8_t(lex.next_int("default", 0, 63));
                    else
                        throw ScenarioError(filename, line_no,
                                            "unknown dscp parameter '" + key + "'");
                }
                spec.mode = d;
            } else {
                throw ScenarioError(filename, line_no,
                                    "encap mode must be assoc or dscp");
            }
            target->encap = spec;
        } else if (head == "workload") {
            saw_workload = true;
            while (!lex.done()) {
                std::string key = lex.next("parameter");
                if (key == "flows")
                    sc.workload.flows = int(lex.next_int("flows", 0, 1 << 20));
                else if (key == "packets")
                    sc.workload.packets_per_flow =
                        int(lex.next_int("packets", 1, 1 << 20));
                else if (key == "pattern") {
                    std::string p = lex.next("pattern");
                    if (p == "forward")
                        sc.workload.pattern = TrafficPattern::forward_only;
                    else if (p == "bidirectional")
                        sc.workload.pattern = TrafficPattern::bidirectional;
                    else
                        throw ScenarioError(filename, line_no,
                                            "pattern must be forward or bidirectional");
                } else {
                    throw ScenarioError(filename, line_no,
                                        "unknown workload parameter '" + key + "'");
                }
            }
        } else if (head == "expect") {
            std::string mode = lex.next("mode");
            if (mode != "active" && mode != "baseline")
                throw ScenarioError(filename, line_no,
                                    "expect mode must be active or baseline");
            ExpectSpec e;
            while (!lex.done()) {
                std::string key = lex.next("column");
                std::string form = lex.next("linear form");
                auto f = LinearForm::parse(form);
                if (!f)
                    throw ScenarioError(filename, line_no,
                                        "bad linear form '" + form + "'");
                if (key == "ingress")
                    e.ingress = *f;
                else if (key == "middlebox")
                    e.middlebox = *f;
                else if (key == "endpoint")
                    e.endpoint = *f;
                else if (key == "total")
                    e.total = *f;
                else
                    throw ScenarioError(filename, line_no,
                                        "unknown expect column '" + key + "'");
            }
            sc.expects[mode] = e;
        } else {
            throw ScenarioError(filename, line_no,
                                "unknown directive '" + head + "'");
        }
    }
    (void)saw_workload;

    // Materialize topology cross-references.
    for (const auto& d : sc.devices) {
        if (d.attached_switch.empty()) continue;
        if (sc.topology == TopologyKind::fabric) {
            sc.fabric.port_device[d.attached_port] = d.name;
            sc.fabric.port_owner[d.attached_port] = d.attached_switch;
        } else {
            sc.mesh.attachments[{d.attached_switch, d.attached_port}] = d.name;
            if (d.num_id)
                sc.mesh.device_locations[d.num_id] = {d.attached_switch,
                                                      d.attached_port};
        }
    }
    for (const auto& s : sc.switches) sc.mesh.switches.insert(s.id);
    if (sc.topology == TopologyKind::fabric) sc.mesh.switches.clear();
    return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

// Semantic checks beyond per-line syntax: reference integrity, port ranges,
// mode/topology compatibility, mesh shape limits, connectivity.
inline void validate_scenario(const Scenario& sc) {
    auto fail = [&](const std::string& msg) {
        throw ScenarioError(sc.name + ": " + msg);
    };
    if (sc.switches.empty()) fail("no switches declared");
    std::set<std::string> sw_ids, dev_names;
    for (const auto& s : sc.switches)
        if (!sw_ids.insert(s.id).second) fail("duplicate switch id " + s.id);
    std::set<std::uint8_t> nums;
    for (const auto& d : sc.devices) {
        if (!dev_names.insert(d.name).second)
            fail("duplicate device name " + d.name);
        if (d.num_id && !nums.insert(d.num_id).second)
            fail("duplicate device numeric id " +
                 std::to_string(int(d.num_id)));
        if (d.kind == DeviceKind::middlebox && !d.behavior)
            fail("middlebox " + d.name + " has no behavior");
        if (d.kind != DeviceKind::middlebox && d.behavior)
            fail("device " + d.name + " is not a middlebox but has a behavior");
        if (d.encap) {
            if (!d.behavior ||
                !std::holds_alternative<ManglingRouterBehavior>(*d.behavior))
                fail("encap wraps " + d.name +
                     " which is not a mangling_router");
        }
        if (!d.attached_switch.empty() && !sw_ids.count(d.attached_switch))
            fail("device " + d.name + " attached to unknown switch " +
                 d.attached_switch);
        if (d.kind != DeviceKind::external && d.attached_switch.empty())
            fail("device " + d.name + " is not attached");
    }
    if (sc.topology == TopologyKind::fabric) {
        if (sc.annotation == AnnotationMode::nibble ||
            sc.annotation == AnnotationMode::destination)
            fail("fabric topologies use octet or extended annotation");
        std::set<std::uint8_t> ports;
        for (const auto& d : sc.devices) {
            if (d.attached_switch.empty()) continue;
            if (!ports.insert(d.attached_port).second)
                fail("fabric port " + std::to_string(int(d.attached_port)) +
                     " assigned twice");
        }
    } else {
        if (sc.annotation == AnnotationMode::octet ||
            sc.annotation == AnnotationMode::extended)
            fail("mesh topologies use nibble or destination annotation");
        if (sc.mesh.switches.size() > 15) fail("more than 15 mesh switches");
        std::map<std::string, int> port_count, attach_count;
        std::map<std::pair<std::string, std::uint8_t>, int> port_uses;
        for (const auto& [from, to] : sc.mesh.links) {
            if (!sw_ids.count(from.first))
                fail("link references unknown switch " + from.first);
            port_uses[from]++;
        }
        for (const auto& [ref, dev] : sc.mesh.attachments) {
            if (!sw_ids.count(ref.first))
                fail("attachment references unknown switch " + ref.first);
            port_uses[ref]++;
            attach_count[ref.first]++;
        }
        for (const auto& [ref, uses] : port_uses) {
            if (uses > 1)
                fail("mesh port " + ref.first + "." +
                     std::to_string(int(ref.second)) + " used twice");
            if (ref.second > 32)
                fail("mesh switch " + ref.first + " uses port above 32");
            port_count[ref.first]++;
        }
        for (const auto& [sw, n] : attach_count)
            if (n > 15) fail("switch " + sw + " has more than 15 devices");
        if (!sc.mesh.connected()) fail("mesh topology is disconnected");
        for (const auto& d : sc.devices)
            if (d.kind != DeviceKind::external && d.num_id == 0)
                fail("mesh devices need num ids (device " + d.name + ")");
    }
    for (const auto& c : sc.chains) {
        const DeviceSpec* dest = sc.find_device(c.dest);
        if (!dest) fail("chain " + c.id + " dest references unknown device " + c.dest);
        for (const auto& stage : c.stages) {
            if (stage.empty()) fail("chain " + c.id + " has an empty stage");
            for (const auto& inst : stage) {
                const DeviceSpec* d = sc.find_device(inst);
                if (!d)
                    fail("chain " + c.id + " references unknown middlebox " + inst);
                if (d->kind != DeviceKind::middlebox)
                    fail("chain " + c.id + " stage member " + inst +
                         " is not a middlebox");
            }
        }
    }
}

}  // namespace actsw
