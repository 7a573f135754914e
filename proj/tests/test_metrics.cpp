#include "actsw/metrics.hpp"

#include <gtest/gtest.h>

#include "actsw/engine.hpp"
#include "testutil.hpp"

using namespace actsw;

namespace {

Scenario analysis() {
    Scenario sc =
        parse_scenario_file(testutil::scenario_path("analysis.scn"));
    validate_scenario(sc);
    return sc;
}

RuleCensus census_after(const Scenario& sc, ControllerMode mode, int n,
                        std::uint64_t seed = 11) {
    Engine engine(sc, mode, seed);
    Workload w =
        generate_workload(sc, n, seed, 1, TrafficPattern::forward_only);
    engine.run(w);
    return rule_census(engine.switches(), engine.switch_roles());
}

TEST(Census, ActiveBreakdownAtTen) {
    RuleCensus c = census_after(analysis(), ControllerMode::active, 10);
    EXPECT_EQ(c.ingress, 11u);
    EXPECT_EQ(c.middlebox, 1u);
    EXPECT_EQ(c.endpoint, 10u);
    EXPECT_EQ(c.total(), 22u);
}

TEST(Census, BaselineTotalAtHundred) {
    RuleCensus c = census_after(analysis(), ControllerMode::baseline, 100);
    EXPECT_EQ(c.ingress, 101u);
    EXPECT_EQ(c.middlebox, 800u);
    EXPECT_EQ(c.endpoint, 200u);
    EXPECT_EQ(c.total(), 1101u);
}

TEST(Census, ZeroFlowsLeaveOnlyProgrammingState) {
    RuleCensus active = census_after(analysis(), ControllerMode::active, 0);
    EXPECT_EQ(active.ingress, 1u);  // the default punt rule
    EXPECT_EQ(active.total(), 2u);
    RuleCensus baseline =
        census_after(analysis(), ControllerMode::baseline, 0);
    EXPECT_EQ(baseline.ingress, 1u);
    EXPECT_EQ(baseline.total(), 1u);
}

TraceEvent traverse_event(const FlowKey& flow, std::uint64_t payload,
                          const std::string& loc) {
    TraceEvent e;
    e.kind = EventKind::middlebox_traverse;
    e.loc = loc;
    e.flow = flow;
    e.payload_id = payload;
    return e;
}

TEST(Affinity, CompliantAndViolatingTraces) {
    FlowKey f{1, 2, 30, 40, 6};
    Trace good;
    good.push(traverse_event(f, 1, "a"));
    good.push(traverse_event(f, 1, "b"));
    good.push(traverse_event(f, 2, "a"));
    good.push(traverse_event(f, 2, "b"));
    EXPECT_TRUE(check_affinity(good).empty());

    // The second packet switched instances mid-flow.
    Trace bad;
    bad.push(traverse_event(f, 1, "a"));
    bad.push(traverse_event(f, 2, "c"));
    auto violations = check_affinity(bad);
    ASSERT_EQ(violations.size(), 1u);
}

TEST(Affinity, CleanOnARandomizedActiveRun) {
    Scenario sc = analysis();
    Engine engine(sc, ControllerMode::active, 77);
    Workload w = generate_workload(sc, 100, 77, 4,
                                   TrafficPattern::bidirectional);
    const Trace& t = engine.run(w);
    EXPECT_TRUE(check_affinity(t).empty());
    EXPECT_TRUE(check_symmetricality(t).empty());
}

TEST(Symmetricality, CompliantAndViolatingTraces) {
    FlowKey f{1, 2, 30, 40, 6};
    FlowKey r = reverse_flow_key(f);
    Trace good;
    good.push(traverse_event(f, 1, "a"));
    good.push(traverse_event(f, 1, "b"));
    good.push(traverse_event(r, 2, "b"));
    good.push(traverse_event(r, 2, "a"));
    EXPECT_TRUE(check_symmetricality(good).empty());

    // Return traffic that repeats the forward order is a violation.
    Trace bad;
    bad.push(traverse_event(f, 1, "a"));
    bad.push(traverse_event(f, 1, "b"));
    bad.push(traverse_event(r, 2, "a"));
    bad.push(traverse_event(r, 2, "b"));
    ASSERT_EQ(check_symmetricality(bad).size(), 1u);
}

TEST(Comparison, TableAndCsvMatchTheClosedForms) {
    Scenario sc = analysis();
    std::vector<ComparisonRow> rows;
    for (long n : {1L, 10L, 100L}) {
        rows.push_back(make_row(
            n, "active", census_after(sc, ControllerMode::active, int(n))));
        rows.push_back(make_row(
            n, "baseline",
            census_after(sc, ControllerMode::baseline, int(n))));
    }
    std::string csv = comparison_csv(rows);
    EXPECT_NE(csv.find("1,active,2,1,1,4\n"), std::string::npos) << csv;
    EXPECT_NE(csv.find("1,baseline,2,8,2,12\n"), std::string::npos);
    EXPECT_NE(csv.find("10,active,11,1,10,22\n"), std::string::npos);
    EXPECT_NE(csv.find("10,baseline,11,80,20,111\n"), std::string::npos);
    EXPECT_NE(csv.find("100,active,101,1,100,202\n"), std::string::npos);
    EXPECT_NE(csv.find("100,baseline,101,800,200,1101\n"), std::string::npos);
    EXPECT_EQ(csv.find("n,mode,ingress,middlebox,endpoint,total\n"), 0u);

    std::string table = comparison_table(rows);
    EXPECT_NE(table.find("active"), std::string::npos);
    EXPECT_NE(table.find("1101"), std::string::npos);
}

TEST(Comparison, ArbitraryNFollowsTheFormulas) {
    Scenario sc = analysis();
    RuleCensus active = census_after(sc, ControllerMode::active, 37);
    EXPECT_EQ(active.total(), 2u * 37 + 2);
    RuleCensus baseline = census_after(sc, ControllerMode::baseline, 37);
    EXPECT_EQ(baseline.total(), 11u * 37 + 1);
}

TEST(Census, GatewayPlumbingStaysOutsideTheColumns) {
    Scenario sc = analysis();
    Engine engine(sc, ControllerMode::active, 11);
    Workload w = generate_workload(sc, 1, 11, 1, TrafficPattern::forward_only);
    engine.run(w);
    RuleCensus c = rule_census(engine.switches(), engine.switch_roles());
    EXPECT_EQ(c.per_switch.at("gw.sw"), 1u);
    EXPECT_EQ(c.other, 1u);
    EXPECT_EQ(c.total(), 4u);  // unchanged by the gateway rule
}

}  // namespace
