#include "actsw/annotation.hpp"

#include <gtest/gtest.h>

#include "testutil.hpp"

using namespace actsw;
using testutil::oracle_decode_extended;
using testutil::oracle_decode_nibble;
using testutil::oracle_decode_octet;

namespace {

MacAddress mac(const std::string& s) {
    auto m = MacAddress::parse(s);
    EXPECT_TRUE(m) << s;
    return m.value_or(MacAddress{});
}

TEST(MacAddress, TextRoundTrip) {
    SplitMix64 g(42);
    for (int i = 0; i < 10000; ++i) {
        MacAddress m{g.next() & MacAddress::kMask};
        auto back = MacAddress::parse(m.to_string());
        ASSERT_TRUE(back);
        EXPECT_EQ(*back, m);
    }
}

TEST(MacAddress, ParseAcceptsEitherCase) {
    EXPECT_EQ(mac("00:00:FF:04:05:02"), mac("00:00:ff:04:05:02"));
    EXPECT_EQ(mac("00:00:ff:04:05:02").to_string(), "00:00:ff:04:05:02");
}

TEST(MacAddress, ParseRejectsGarbage) {
    EXPECT_FALSE(MacAddress::parse(""));
    EXPECT_FALSE(MacAddress::parse("00:00:ff:04:05"));
    EXPECT_FALSE(MacAddress::parse("00:00:ff:04:05:0g"));
    EXPECT_FALSE(MacAddress::parse("00-00-ff-04-05-02"));
    EXPECT_FALSE(MacAddress::parse("00:00:ff:04:05:022"));
}

TEST(EncodeOctet, WorkedExample) {
    EXPECT_EQ(encode_octet_path({2, 5, 4}), mac("00:00:ff:04:05:02"));
}

TEST(EncodeOctet, EmptyPathIsSentinelSeed) {
    EXPECT_EQ(encode_octet_path({}), kHostSentinel);
    EXPECT_EQ(kHostSentinel, mac("00:00:00:00:00:ff"));
}

TEST(EncodeOctet, SingleHop) {
    MacAddress m = encode_octet_path({7});
    EXPECT_EQ(m, mac("00:00:00:00:ff:07"));
    auto oracle = oracle_decode_octet(m.value);
    ASSERT_TRUE(oracle);
    EXPECT_EQ(*oracle, HopPath({7}));
}

TEST(EncodeOctet, RejectsLongAndReserved) {
    EXPECT_THROW(encode_octet_path({1, 2, 3, 4, 5, 6}), EncodeError);
    EXPECT_THROW(encode_octet_path({0}), EncodeError);
    EXPECT_THROW(encode_octet_path({0xfe}), EncodeError);
    EXPECT_THROW(encode_octet_path({0xff}), EncodeError);
    EXPECT_THROW(encode_octet_path({2, 0xfe, 4}), EncodeError);
}

TEST(ShiftOctet, WorkedExample) {
    Step s = shift_octet(mac("00:00:ff:04:05:02"));
    EXPECT_EQ(s.kind, StepKind::forward);
    EXPECT_EQ(s.port, 2);
    EXPECT_EQ(s.remainder, mac("00:00:00:ff:04:05"));
}

TEST(ShiftOctet, LastHopLeavesBareSentinel) {
    Step s = shift_octet(mac("00:00:00:00:ff:07"));
    EXPECT_EQ(s.kind, StepKind::forward);
    EXPECT_EQ(s.port, 7);
    EXPECT_EQ(s.remainder, kHostSentinel);
}

TEST(ShiftOctet, SentinelsSignalTheCaller) {
    EXPECT_EQ(shift_octet(kHostSentinel).kind, StepKind::deliver);
    EXPECT_EQ(shift_octet(mac("12:34:56:78:9a:ff")).kind, StepKind::deliver);
    EXPECT_EQ(shift_octet(kZeroMac).kind, StepKind::exhausted);
    EXPECT_EQ(shift_octet(mac("00:00:00:00:05:00")).kind, StepKind::exhausted);
    EXPECT_EQ(shift_octet(mac("00:00:00:00:00:fe")).kind, StepKind::swap);
}

TEST(EncodeNibble, WorkedExample) {
    EXPECT_EQ(encode_nibble_path({2, 1, 5, 2}), mac("00:00:00:ff:25:12"));
}

TEST(EncodeNibble, EmptyAndSingle) {
    EXPECT_EQ(encode_nibble_path({}), kHostSentinel);
    MacAddress m = encode_nibble_path({3});
    EXPECT_EQ(m, mac("00:00:00:00:0f:f3"));
    auto oracle = oracle_decode_nibble(m.value);
    ASSERT_TRUE(oracle);
    EXPECT_EQ(*oracle, HopPath({3}));
}

TEST(EncodeNibble, RejectsLongAndReserved) {
    EXPECT_THROW(encode_nibble_path(HopPath(11, 1)), EncodeError);
    EXPECT_THROW(encode_nibble_path({0}), EncodeError);
    EXPECT_THROW(encode_nibble_path({0xf}), EncodeError);
}

TEST(ShiftNibble, WorkedExampleTrace) {
    Step s1 = shift_nibble(mac("00:00:00:ff:25:12"));
    EXPECT_EQ(s1.kind, StepKind::forward);
    EXPECT_EQ(s1.port, 2);
    EXPECT_EQ(s1.remainder, mac("00:00:00:0f:f2:51"));

    Step mid = shift_nibble(mac("00:00:00:00:ff:25"));
    EXPECT_EQ(mid.port, 5);
    EXPECT_EQ(mid.remainder, mac("00:00:00:00:0f:f2"));

    Step last = shift_nibble(mac("00:00:00:00:0f:f2"));
    EXPECT_EQ(last.port, 2);
    EXPECT_EQ(last.remainder, kHostSentinel);
}

TEST(ShiftNibble, Sentinels) {
    EXPECT_EQ(shift_nibble(kHostSentinel).kind, StepKind::deliver);
    EXPECT_EQ(shift_nibble(kZeroMac).kind, StepKind::exhausted);
}

TEST(EncodeExtended, ShortPathDegradesToOctet) {
    AnnotationPair p = encode_extended_path({2, 5, 4});
    EXPECT_EQ(p.dst, encode_octet_path({2, 5, 4}));
    EXPECT_EQ(p.src, kZeroMac);
}

TEST(EncodeExtended, SevenHops) {
    AnnotationPair p = encode_extended_path({1, 2, 3, 4, 5, 6, 7});
    EXPECT_EQ(p.dst, mac("fe:05:04:03:02:01"));
    EXPECT_EQ(p.src, mac("00:00:00:ff:07:06"));
    auto oracle = oracle_decode_extended(p.dst.value, p.src.value);
    ASSERT_TRUE(oracle);
    EXPECT_EQ(*oracle, HopPath({1, 2, 3, 4, 5, 6, 7}));
}

TEST(EncodeExtended, RejectsEleven) {
    HopPath p;
    for (int i = 1; i <= 11; ++i) p.push_back(std::uint8_t(i));
    EXPECT_THROW(encode_extended_path(p), EncodeError);
}

TEST(StepExtended, SwapConsumesSrc) {
    ExtendedStep s = step_extended(
        {mac("00:00:00:00:00:fe"), mac("00:00:00:ff:07:06")});
    EXPECT_EQ(s.kind, StepKind::forward);
    EXPECT_EQ(s.port, 6);
    EXPECT_EQ(s.headers.dst, mac("00:00:00:00:ff:07"));
    EXPECT_EQ(s.headers.src, kZeroMac);
}

TEST(StepExtended, ReducesToBasicShift) {
    MacAddress src = mac("12:34:56:78:9a:bc");
    ExtendedStep s = step_extended({mac("00:00:ff:04:05:02"), src});
    EXPECT_EQ(s.kind, StepKind::forward);
    EXPECT_EQ(s.port, 2);
    EXPECT_EQ(s.headers.dst, mac("00:00:00:ff:04:05"));
    EXPECT_EQ(s.headers.src, src);
}

TEST(StepExtended, DeliveryAndMalformed) {
    EXPECT_EQ(step_extended({kHostSentinel, kZeroMac}).kind,
              StepKind::deliver);
    EXPECT_EQ(step_extended({kZeroMac, kZeroMac}).kind, StepKind::exhausted);
    // A swap into a spent src has no well-formed meaning.
    EXPECT_EQ(step_extended({mac("00:00:00:00:00:fe"), kZeroMac}).kind,
              StepKind::malformed);
    EXPECT_EQ(
        step_extended({mac("00:00:00:00:00:fe"), mac("00:00:00:00:00:fe")})
            .kind,
        StepKind::malformed);
}

TEST(DecodePath, PaperInverseAndEmpty) {
    EXPECT_EQ(decode_path(mac("00:00:ff:04:05:02"), AnnotationMode::octet),
              HopPath({2, 5, 4}));
    EXPECT_EQ(decode_path(kHostSentinel, AnnotationMode::octet), HopPath{});
    EXPECT_EQ(decode_path(kHostSentinel, AnnotationMode::nibble), HopPath{});
}

TEST(DecodePath, MalformedReportedDistinctly) {
    EXPECT_THROW(decode_octet_path(kZeroMac), DecodeError);
    EXPECT_THROW(decode_octet_path(mac("01:02:03:04:05:06")), DecodeError);
    EXPECT_THROW(decode_octet_path(mac("00:00:12:ff:00:04")), DecodeError);
    // Junk above the host sentinel is not a valid residue.
    EXPECT_THROW(decode_octet_path(mac("00:00:12:00:00:ff")), DecodeError);
    EXPECT_THROW(decode_nibble_path(mac("00:00:00:00:01:f2")), DecodeError);
    EXPECT_THROW(
        decode_extended_path({mac("fe:00:04:03:02:01"), kHostSentinel}),
        DecodeError);
}

TEST(RoundTrip, OctetExhaustiveUpToTwoHops) {
    EXPECT_EQ(decode_octet_path(encode_octet_path({})), HopPath{});
    for (int a = 1; a <= 253; ++a) {
        if (!octet_port_valid(std::uint8_t(a))) continue;
        HopPath one{std::uint8_t(a)};
        ASSERT_EQ(decode_octet_path(encode_octet_path(one)), one);
    }
    for (int a = 1; a <= 253; ++a) {
        if (!octet_port_valid(std::uint8_t(a))) continue;
        for (int b = 1; b <= 253; ++b) {
            if (!octet_port_valid(std::uint8_t(b))) continue;
            HopPath two{std::uint8_t(a), std::uint8_t(b)};
            MacAddress enc = encode_octet_path(two);
            ASSERT_EQ(decode_octet_path(enc), two);
            auto oracle = oracle_decode_octet(enc.value);
            ASSERT_TRUE(oracle);
            ASSERT_EQ(*oracle, two);
        }
    }
}

TEST(RoundTrip, OctetRandomizedLongPaths) {
    SplitMix64 g(7);
    for (int i = 0; i < 10000; ++i) {
        HopPath p = testutil::random_octet_path(g, 3 + g.pick(3));  // 3..5
        MacAddress enc = encode_octet_path(p);
        ASSERT_EQ(decode_octet_path(enc), p);
        auto oracle = oracle_decode_octet(enc.value);
        ASSERT_TRUE(oracle);
        ASSERT_EQ(*oracle, p);
    }
}

TEST(RoundTrip, NibbleExhaustiveShortAndRandomLong) {
    for (int a = 1; a <= 14; ++a)
        for (int b = 1; b <= 14; ++b) {
            HopPath two{std::uint8_t(a), std::uint8_t(b)};
            ASSERT_EQ(decode_nibble_path(encode_nibble_path(two)), two);
        }
    SplitMix64 g(11);
    for (int i = 0; i < 10000; ++i) {
        HopPath p = testutil::random_nibble_path(g, g.pick(11));  // 0..10
        MacAddress enc = encode_nibble_path(p);
        ASSERT_EQ(decode_nibble_path(enc), p);
        auto oracle = oracle_decode_nibble(enc.value);
        ASSERT_TRUE(oracle);
        ASSERT_EQ(*oracle, p);
    }
}

TEST(RoundTrip, ExtendedRandomizedAllLengths) {
    SplitMix64 g(13);
    for (int i = 0; i < 10000; ++i) {
        HopPath p = testutil::random_octet_path(g, g.pick(11));  // 0..10
        AnnotationPair enc = encode_extended_path(p);
        ASSERT_EQ(decode_extended_path(enc), p);
        auto oracle = oracle_decode_extended(enc.dst.value, enc.src.value);
        if (p.size() > 5) {
            ASSERT_TRUE(oracle);
            ASSERT_EQ(*oracle, p);
        }
    }
}

TEST(Properties, ShiftAlgebra) {
    SplitMix64 g(17);
    for (int i = 0; i < 2000; ++i) {
        HopPath rest = testutil::random_octet_path(g, g.pick(5));  // 0..4
        std::uint8_t h = std::uint8_t(1 + g.pick(253));
        HopPath full;
        full.push_back(h);
        for (auto x : rest) full.push_back(x);
        Step s = shift_octet(encode_octet_path(full));
        ASSERT_EQ(s.kind, StepKind::forward);
        ASSERT_EQ(s.port, h);
        ASSERT_EQ(s.remainder, encode_octet_path(rest));
    }
}

TEST(Properties, SentinelPreservedAfterConsumingAllHops) {
    SplitMix64 g(19);
    for (int i = 0; i < 2000; ++i) {
        HopPath p = testutil::random_octet_path(g, 1 + g.pick(5));
        MacAddress a = encode_octet_path(p);
        for (std::size_t k = 0; k < p.size(); ++k) a = shift_octet(a).remainder;
        ASSERT_EQ(a, kHostSentinel);

        HopPath q = testutil::random_nibble_path(g, 1 + g.pick(10));
        MacAddress b = encode_nibble_path(q);
        for (std::size_t k = 0; k < q.size(); ++k) b = shift_nibble(b).remainder;
        ASSERT_EQ(b, kHostSentinel);
    }
}

TEST(Properties, ExtendedAgreesWithBasicOnShortPaths) {
    SplitMix64 g(23);
    for (int i = 0; i < 2000; ++i) {
        HopPath p = testutil::random_octet_path(g, g.pick(6));  // 0..5
        AnnotationPair headers = encode_extended_path(p);
        MacAddress plain = encode_octet_path(p);
        for (std::size_t k = 0; k < p.size(); ++k) {
            ExtendedStep e = step_extended(headers);
            Step s = shift_octet(plain);
            ASSERT_EQ(e.kind, StepKind::forward);
            ASSERT_EQ(s.kind, StepKind::forward);
            ASSERT_EQ(e.port, s.port);
            headers = e.headers;
            plain = s.remainder;
        }
        ASSERT_EQ(step_extended(headers).kind, StepKind::deliver);
        ASSERT_EQ(shift_octet(plain).kind, StepKind::deliver);
    }
}

}  // namespace
