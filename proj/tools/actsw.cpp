// actsw: run, compare and validate active-switching scenarios.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "actsw/engine.hpp"
#include "actsw/metrics.hpp"
#include "actsw/scenario.hpp"

namespace {

using namespace actsw;

std::optional<AnnotationMode> parse_annotation(const std::string& s) {
    if (s == "octet") return AnnotationMode::octet;
    if (s == "nibble") return AnnotationMode::nibble;
    if (s == "extended") return AnnotationMode::extended;
    if (s == "destination") return AnnotationMode::destination;
    return std::nullopt;
}

Scenario load(const std::string& path, const std::string& annotation) {
    Scenario sc = parse_scenario_file(path);
    if (!annotation.empty()) {
        auto m = parse_annotation(annotation);
        if (!m) throw ScenarioError("unknown annotation mode: " + annotation);
        sc.annotation = *m;
    }
    validate_scenario(sc);
    return sc;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return false;
    }
    out << content;
    return true;
}

int cmd_run(const std::string& scenario_path, const std::string& mode_name,
            std::optional<std::uint64_t> seed, std::optional<int> flows,
            const std::string& trace_path, const std::string& rules_path,
            const std::string& annotation) {
    Scenario sc = load(scenario_path, annotation);
    ControllerMode mode = mode_name == "baseline" ? ControllerMode::baseline
                                                  : ControllerMode::active;
    std::uint64_t s = seed.value_or(sc.default_seed);
    int n = flows.value_or(sc.workload.flows);

    Engine engine(sc, mode, s);
    Workload w = generate_workload(sc, n, s);
    const Trace& trace = engine.run(w);

    if (!trace_path.empty() && !write_file(trace_path, trace.render()))
        return 2;
    if (!rules_path.empty()) {
        std::string dump;
        for (const auto& [id, sw] : engine.switches()) dump += sw.dump();
        if (!write_file(rules_path, dump)) return 2;
    }

    RuleCensus census = rule_census(engine.switches(), engine.switch_roles());
    std::cout << "scenario=" << sc.name << " mode=" << to_string(mode)
              << " seed=" << s << " flows=" << n << "\n"
              << "injected=" << trace.injected
              << " originated=" << trace.originated
              << " delivered=" << trace.delivered
              << " dropped=" << trace.dropped << "\n"
              << "rules: ingress=" << census.ingress
              << " middlebox=" << census.middlebox
              << " endpoint=" << census.endpoint
              << " total=" << census.total() << "\n";

    return trace.has_drop_other_than("policy") ? 1 : 0;
}

int cmd_compare(const std::string& scenario_path, std::vector<long> ns,
                std::optional<std::uint64_t> seed, const std::string& out_path,
                const std::string& annotation) {
    Scenario sc = load(scenario_path, annotation);
    std::uint64_t s = seed.value_or(sc.default_seed);
    std::sort(ns.begin(), ns.end());

    std::vector<ComparisonRow> rows;
    bool expectations_ok = true;
    for (long n : ns) {
        for (ControllerMode mode :
             {ControllerMode::active, ControllerMode::baseline}) {
            Engine engine(sc, mode, s);
            Workload w = generate_workload(sc, int(n), s, 1,
                                           TrafficPattern::forward_only);
            engine.run(w);
            RuleCensus c =
                rule_census(engine.switches(), engine.switch_roles());
            rows.push_back(make_row(n, to_string(mode), c));
            auto e = sc.expects.find(to_string(mode));
            if (e != sc.expects.end()) {
                const ExpectSpec& x = e->second;
                if (long(c.ingress) != x.ingress.eval(n) ||
                    long(c.middlebox) != x.middlebox.eval(n) ||
                    long(c.endpoint) != x.endpoint.eval(n) ||
                    long(c.total()) != x.total.eval(n)) {
                    expectations_ok = false;
                    std::cerr << "expectation mismatch: mode="
                              << to_string(mode) << " n=" << n
                              << " got total=" << c.total()
                              << " want=" << x.total.eval(n) << "\n";
                }
            }
        }
    }

    std::string csv = comparison_csv(rows);
    std::cout << comparison_table(rows);
    if (!out_path.empty()) {
        if (!write_file(out_path, csv)) return 2;
    } else {
        std::cout << csv;
    }
    return expectations_ok ? 0 : 1;
}

int cmd_validate(const std::string& scenario_path,
                 const std::string& annotation) {
    Scenario sc = load(scenario_path, annotation);
    std::cout << "ok: " << sc.name << " (" << sc.switches.size()
              << " switches, " << sc.devices.size() << " devices, "
              << sc.chains.size() << " chains)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"active-switching network simulator"};
    app.require_subcommand(1);

    std::string scenario_path, mode_name = "active", trace_path, rules_path;
    std::string annotation;
    std::optional<std::uint64_t> seed;
    std::optional<int> flows;
    std::vector<long> ns;
    std::string out_path;

    CLI::App* run = app.add_subcommand("run", "simulate one scenario");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--mode", mode_name, "active|baseline")
        ->check(CLI::IsMember({"active", "baseline"}));
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--flows", flows, "override the workload flow count");
    run->add_option("--trace", trace_path, "write the event trace here");
    run->add_option("--rules", rules_path, "write the final rule dump here");
    run->add_option("--annotation", annotation,
                    "override the annotation mode");

    CLI::App* cmp = app.add_subcommand(
        "compare", "rule-count comparison of both controllers");
    cmp->add_option("scenario", scenario_path, "scenario file")->required();
    cmp->add_option("--n", ns, "flow counts to evaluate")
        ->required()
        ->delimiter(',');
    cmp->add_option("--seed", seed, "override the scenario seed");
    cmp->add_option("--out", out_path, "write the CSV here");
    cmp->add_option("--annotation", annotation,
                    "override the annotation mode");

    CLI::App* val = app.add_subcommand("validate", "check a scenario file");
    val->add_option("scenario", scenario_path, "scenario file")->required();
    val->add_option("--annotation", annotation,
                    "override the annotation mode");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, mode_name, seed, flows, trace_path,
                           rules_path, annotation);
        if (cmp->parsed())
            return cmd_compare(scenario_path, ns, seed, out_path, annotation);
        return cmd_validate(scenario_path, annotation);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
