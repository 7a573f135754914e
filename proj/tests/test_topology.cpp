#include "actsw/topology.hpp"

#include <gtest/gtest.h>

#include "actsw/scenario.hpp"
#include "testutil.hpp"

using namespace actsw;

namespace {

Scenario mesh5() {
    Scenario sc = parse_scenario_file(testutil::scenario_path("mesh5.scn"));
    validate_scenario(sc);
    return sc;
}

TEST(Mesh, Adjacency) {
    Scenario sc = mesh5();
    EXPECT_TRUE(sc.mesh.is_adjacent("B", 1));   // host 1 on switch B port 1
    EXPECT_FALSE(sc.mesh.is_adjacent("A", 8));  // host 8 lives on E
    EXPECT_TRUE(sc.mesh.is_adjacent("A", 9));   // the gateway hangs off A
    EXPECT_THROW(sc.mesh.is_adjacent("A", 99), TopologyError);
    EXPECT_THROW(sc.mesh.is_adjacent("Z", 1), TopologyError);
}

TEST(Mesh, NextHopSpotChecks) {
    Scenario sc = mesh5();
    EXPECT_EQ(sc.mesh.next_hop("B", 9), 6);  // toward the gateway
    EXPECT_EQ(sc.mesh.next_hop("E", 8), 2);  // local attachment
    EXPECT_EQ(sc.mesh.next_hop("C", 3), 1);
}

// Full per-switch egress table for the shipped mesh; column order
// gw, 1..8.
TEST(Mesh, NextHopTable) {
    Scenario sc = mesh5();
    struct Row {
        const char* sw;
        int ports[9];
    };
    const Row expected[] = {
        {"A", {1, 2, 2, 3, 3, 4, 4, 5, 5}},
        {"B", {6, 1, 2, 3, 3, 4, 4, 5, 5}},
        {"C", {5, 6, 6, 1, 2, 3, 3, 4, 4}},
        {"D", {4, 5, 5, 6, 6, 1, 2, 3, 3}},
        {"E", {3, 4, 4, 5, 5, 6, 6, 1, 2}},
    };
    auto tables = sc.mesh.compute_next_hop_tables();
    for (const Row& row : expected) {
        const auto& got = tables.at(row.sw);
        EXPECT_EQ(got.at(9), row.ports[0]) << row.sw << " gw";
        for (int id = 1; id <= 8; ++id)
            EXPECT_EQ(got.at(std::uint8_t(id)), row.ports[id])
                << row.sw << " id " << id;
    }
}

TEST(Mesh, SingleSwitchMapsEveryDeviceToItsPort) {
    MeshTopology t;
    t.switches.insert("S");
    t.attachments[{"S", 3}] = "a";
    t.device_locations[1] = {"S", 3};
    t.attachments[{"S", 7}] = "b";
    t.device_locations[2] = {"S", 7};
    auto tables = t.compute_next_hop_tables();
    EXPECT_EQ(tables.at("S").at(1), 3);
    EXPECT_EQ(tables.at("S").at(2), 7);
}

TEST(Mesh, TwoSwitchLineCrossTraffic) {
    MeshTopology t;
    t.switches = {"L", "R"};
    t.add_link("L", 5, "R", 6);
    t.attachments[{"L", 1}] = "a";
    t.device_locations[1] = {"L", 1};
    t.attachments[{"R", 2}] = "b";
    t.device_locations[2] = {"R", 2};
    // Brute-force expectation on the 2-node graph: remote traffic exits via
    // the single inter-switch link, local via the attachment.
    EXPECT_EQ(t.next_hop("L", 2), 5);
    EXPECT_EQ(t.next_hop("R", 1), 6);
    EXPECT_EQ(t.next_hop("L", 1), 1);
    EXPECT_EQ(t.next_hop("R", 2), 2);
}

TEST(Mesh, TieBreakPrefersLowestEgressPortUnlessPinned) {
    // Square: two equal-length routes from A to the device on C.
    MeshTopology t;
    t.switches = {"A", "B", "C", "D"};
    t.add_link("A", 1, "B", 1);
    t.add_link("B", 2, "C", 1);
    t.add_link("A", 2, "D", 1);
    t.add_link("D", 2, "C", 2);
    t.attachments[{"C", 9}] = "x";
    t.device_locations[5] = {"C", 9};
    EXPECT_EQ(t.next_hop("A", 5), 1);  // via B, the lower egress port
    t.pinned_next_hop[{"A", 5}] = 2;
    EXPECT_EQ(t.next_hop("A", 5), 2);
}

TEST(Mesh, UnreachableDeviceThrows) {
    MeshTopology t;
    t.switches = {"A", "B"};
    t.attachments[{"B", 1}] = "x";
    t.device_locations[1] = {"B", 1};
    EXPECT_FALSE(t.connected());
    EXPECT_THROW(t.next_hop("A", 1), TopologyError);
}

TEST(Fabric, PortLookup) {
    Scenario sc = parse_scenario_file(testutil::scenario_path("fig1-fabric.scn"));
    validate_scenario(sc);
    EXPECT_EQ(sc.fabric.port_of("re1"), std::uint8_t{2});
    EXPECT_EQ(sc.fabric.port_of("ips"), std::uint8_t{5});
    EXPECT_EQ(sc.fabric.port_of("h"), std::uint8_t{4});
    EXPECT_FALSE(sc.fabric.port_of("nope"));
    EXPECT_EQ(sc.fabric.port_owner.at(2), "mbx");
}

}  // namespace
