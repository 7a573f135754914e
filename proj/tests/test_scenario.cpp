#include "actsw/scenario.hpp"

#include <gtest/gtest.h>

#include "testutil.hpp"

using namespace actsw;

namespace {

TEST(Parse, ShippedScenariosLoadAndValidate) {
    for (const char* name :
         {"fig1-fabric.scn", "mesh5.scn", "analysis.scn", "encap-assoc.scn",
          "encap-dscp.scn", "encap-bare.scn", "longchain-extended.scn"}) {
        Scenario sc = parse_scenario_file(testutil::scenario_path(name));
        EXPECT_NO_THROW(validate_scenario(sc)) << name;
    }
}

TEST(Parse, FieldsLandWhereExpected) {
    Scenario sc = parse_scenario_file(testutil::scenario_path("analysis.scn"));
    EXPECT_EQ(sc.name, "analysis");
    EXPECT_EQ(sc.topology, TopologyKind::fabric);
    EXPECT_EQ(sc.annotation, AnnotationMode::octet);
    EXPECT_EQ(sc.switches.size(), 3u);
    EXPECT_EQ(sc.devices.size(), 7u);
    EXPECT_EQ(sc.chains.size(), 2u);
    ASSERT_TRUE(sc.find_device("re1"));
    EXPECT_EQ(sc.find_device("re1")->attached_port, 2);
    ASSERT_TRUE(sc.expects.count("active"));
    EXPECT_EQ(sc.expects.at("active").total.eval(37), 76);
    EXPECT_EQ(sc.expects.at("baseline").total.eval(100), 1101);
    const ChainSpec* chain = sc.match_chain(
        FlowKey{0xc6120000, *parse_ipv4("10.0.0.2"), 1024, 80, 6});
    ASSERT_TRUE(chain);
    EXPECT_EQ(chain->dest, "h2");
}

TEST(Parse, UnknownDirectiveNamesTheLine) {
    try {
        parse_scenario_text("name x\nfrobnicate 7\n", "bad.scn");
        FAIL() << "expected ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.line_number, 2);
        EXPECT_NE(std::string(e.what()).find("bad.scn:2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
    }
}

TEST(Parse, PortRangeViolationNamesTheField) {
    const char* text =
        "name x\ntopology fabric\nswitch s role ingress\n"
        "device d kind endpoint ip 10.0.0.1\n"
        "attach d switch s port 255\n";
    try {
        parse_scenario_text(text, "ports.scn");
        FAIL() << "expected ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.line_number, 5);
        EXPECT_NE(std::string(e.what()).find("port"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("255"), std::string::npos);
    }
}

TEST(Parse, LinearForms) {
    EXPECT_EQ(LinearForm::parse("11n+1")->eval(10), 111);
    EXPECT_EQ(LinearForm::parse("2n+2")->eval(0), 2);
    EXPECT_EQ(LinearForm::parse("8n")->eval(7), 56);
    EXPECT_EQ(LinearForm::parse("n")->eval(7), 7);
    EXPECT_EQ(LinearForm::parse("n+1")->eval(7), 8);
    EXPECT_EQ(LinearForm::parse("1")->eval(7), 1);
    EXPECT_EQ(LinearForm::parse("n-1")->eval(7), 6);
    EXPECT_FALSE(LinearForm::parse("n+"));
    EXPECT_FALSE(LinearForm::parse("banana"));
}

TEST(Validate, ChainReferencingUnknownMiddlebox) {
    const char* text =
        "name x\ntopology fabric\nswitch s role ingress\n"
        "device h kind endpoint ip 10.0.0.1\n"
        "attach h switch s port 4\n"
        "chain c match dst_ip=10.0.0.1 stages ghost dest h\n";
    Scenario sc = parse_scenario_text(text);
    EXPECT_THROW(validate_scenario(sc), ScenarioError);
}

TEST(Validate, DisconnectedMesh) {
    const char* text =
        "name x\ntopology mesh\nannotation nibble\n"
        "switch A role ingress\nswitch B role interior\n"
        "device a kind endpoint num 1 ip 10.0.0.1\n"
        "device b kind endpoint num 2 ip 10.0.0.2\n"
        "attach a switch A port 1\nattach b switch B port 1\n";
    Scenario sc = parse_scenario_text(text);
    EXPECT_THROW(validate_scenario(sc), ScenarioError);
}

TEST(Validate, ModeTopologyMismatch) {
    Scenario fabric_nibble = parse_scenario_text(
        "name x\ntopology fabric\nannotation nibble\nswitch s role ingress\n");
    EXPECT_THROW(validate_scenario(fabric_nibble), ScenarioError);
    Scenario mesh_octet = parse_scenario_text(
        "name x\ntopology mesh\nannotation octet\nswitch s role ingress\n");
    EXPECT_THROW(validate_scenario(mesh_octet), ScenarioError);
}

TEST(Validate, DuplicateFabricPort) {
    const char* text =
        "name x\ntopology fabric\nswitch s role ingress\n"
        "device a kind endpoint ip 10.0.0.1\ndevice b kind endpoint ip 10.0.0.2\n"
        "attach a switch s port 4\nattach b switch s port 4\n";
    EXPECT_THROW(validate_scenario(parse_scenario_text(text)), ScenarioError);
}

TEST(Validate, EncapRequiresManglingRouter) {
    const char* text =
        "name x\ntopology fabric\nswitch s role ingress\n"
        "device m kind middlebox behavior transparent\n"
        "encap m mode assoc key src_ip\n"
        "attach m switch s port 2\n";
    EXPECT_THROW(validate_scenario(parse_scenario_text(text)), ScenarioError);
}

TEST(Validate, MiddleboxNeedsBehavior) {
    const char* text =
        "name x\ntopology fabric\nswitch s role ingress\n"
        "device m kind middlebox\nattach m switch s port 2\n";
    EXPECT_THROW(validate_scenario(parse_scenario_text(text)), ScenarioError);
}

TEST(Parse, BehaviorParameters) {
    const char* text =
        "name x\ntopology fabric\nswitch s role ingress\n"
        "device r kind middlebox behavior mangling_router seed 17 "
        "rewrites dst_ip,dst_port mac 02:aa:00:00:00:01 "
        "nexthop 02:00:00:00:00:63\n"
        "attach r switch s port 2\n"
        "encap r mode dscp pool 16 default 5\n";
    Scenario sc = parse_scenario_text(text);
    const DeviceSpec* r = sc.find_device("r");
    ASSERT_TRUE(r && r->behavior);
    const auto* rb = std::get_if<ManglingRouterBehavior>(&*r->behavior);
    ASSERT_TRUE(rb);
    EXPECT_EQ(rb->seed, 17u);
    EXPECT_EQ(rb->rewrites,
              (std::set<FlowField>{FlowField::dst_ip, FlowField::dst_port}));
    EXPECT_EQ(rb->own_mac.to_string(), "02:aa:00:00:00:01");
    ASSERT_TRUE(r->encap);
    const auto* dscp = std::get_if<DscpTagMode>(&r->encap->mode);
    ASSERT_TRUE(dscp);
    EXPECT_EQ(dscp->pool_size, 16);
    EXPECT_EQ(dscp->restore_dscp, 5);
}

TEST(Parse, MissingFileIsAnError) {
    EXPECT_THROW(parse_scenario_file("/nonexistent/nope.scn"), ScenarioError);
}

}  // namespace
