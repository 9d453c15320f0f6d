#include <bitset>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "adsim/can_codec.hpp"
#include "adsim/errors.hpp"
#include "adsim/rng.hpp"

using namespace adsim;

namespace {

// bit-by-bit reference packing
std::uint64_t oracle_read(const Payload8& d, int start, int len) {
    std::bitset<64> bits;
    for (int i = 0; i < len; ++i) {
        int b = start + i;
        bits[i] = (d[b / 8] >> (b % 8)) & 1;
    }
    return bits.to_ullong();
}

SignalLayout centi_degree_layout() {
    std::istringstream in(
        "BO_ 228 steer\n"
        "SG_ steer_delta 8 16 0.01 0 signed -3 3\n");
    return SignalLayout::parse(in);
}

}  // namespace

TEST(Codec, ChecksumExample) {
    Payload8 d{1, 2, 3, 4, 5, 6, 7, 0};
    EXPECT_EQ(checksum(0xE4, d), 0x00);
    // brute-force sum
    Rng r(3);
    for (int i = 0; i < 500; ++i) {
        Payload8 p;
        for (auto& b : p) b = r.next() & 0xFF;
        std::uint16_t id = r.next() % 0x800;
        unsigned s = (id >> 8) + (id & 0xFF);
        for (int k = 0; k < 7; ++k) s += p[k];
        EXPECT_EQ(checksum(id, p), s % 256);
    }
}

TEST(Codec, CentiDegreeSteerRawValue) {
    auto lay = centi_degree_layout();
    auto frames = encode_command({0, 0, 0.25}, lay);
    ASSERT_EQ(frames.size(), 1u);
    EXPECT_EQ(frames[0].id, 0xE4);
    EXPECT_EQ(oracle_read(frames[0].data, 8, 16), 25u);
    EXPECT_EQ(frames[0].data[0], 0);
    // negative is two's complement in the field
    auto neg = encode_command({0, 0, -0.25}, lay);
    EXPECT_EQ(oracle_read(neg[0].data, 8, 16), 0x10000u - 25u);
    EXPECT_DOUBLE_EQ(*decode_frame(neg[0], lay).steer_delta, -0.25);
}

TEST(Codec, RawPackingMatchesBitOracle) {
    Rng r(5);
    for (int i = 0; i < 2000; ++i) {
        Payload8 d{};
        int len = 1 + r.next() % 32;
        int start = r.next() % (64 - len + 1);
        std::uint64_t v = r.next() & ((len == 64) ? ~0ULL : ((1ULL << len) - 1));
        for (auto& b : d) b = r.next() & 0xFF;
        Payload8 before = d;
        write_raw(d, start, len, v);
        EXPECT_EQ(oracle_read(d, start, len), v);
        EXPECT_EQ(read_raw(d, start, len), v);
        for (int b = 0; b < 64; ++b)
            if (b < start || b >= start + len)
                EXPECT_EQ((d[b / 8] >> (b % 8)) & 1, (before[b / 8] >> (b % 8)) & 1);
    }
}

TEST(Codec, CorruptSteerFrame) {
    auto lay = SignalLayout::default_layout();
    auto frames = encode_command({1.0, 0.0, -0.1}, lay, 9);
    for (const auto& f : frames) {
        if (f.id != 0x0E4) continue;
        CanFrame g = corrupt_frame(f, "steer_delta", 0.25, lay);
        EXPECT_TRUE(checksum_ok(g));
        auto pc = decode_frame(g, lay);
        EXPECT_NEAR(*pc.steer_delta, 0.25, 1e-12);
        EXPECT_EQ(pc.signals.at("counter"), 9.0);
    }
}

TEST(Codec, DecodeErrors) {
    auto lay = SignalLayout::default_layout();
    auto f = encode_command({1.0, 0.0, 0.0}, lay).front();
    f.data[0] ^= 1;
    EXPECT_THROW(decode_frame(f, lay), IntegrityError);
    CanFrame u;
    u.id = 0x123;
    EXPECT_THROW(decode_frame(u, lay), UnknownIdError);
}

TEST(Codec, EncodeRangeErrors) {
    auto lay = SignalLayout::default_layout();
    EXPECT_THROW(encode_command({20.0, 0.0, 0.0}, lay), EncodingError);
    EXPECT_THROW(encode_command({0.0, 0.0, NAN}, lay), EncodingError);
}

TEST(Codec, MergeKeepsBaseForMissingChannels) {
    auto lay = SignalLayout::default_layout();
    auto frames = encode_command({1.5, -0.5, 0.1}, lay);
    std::vector<CanFrame> only_gas;
    for (const auto& f : frames)
        if (f.id == 0x200) only_gas.push_back(f);
    auto c = merge_frames(only_gas, lay, {0.0, -2.0, 0.2});
    EXPECT_NEAR(c.accel, 1.5, 1e-12);
    EXPECT_EQ(c.brake, -2.0);
    EXPECT_EQ(c.steer_delta, 0.2);
    auto all = merge_frames(frames, lay);
    EXPECT_NEAR(all.brake, -0.5, 1e-12);
    EXPECT_NEAR(all.steer_delta, 0.1, 1e-12);
}

TEST(Codec, TraceLineRoundTrip) {
    CanFrame f;
    f.id = 0x0E4;
    f.data = {1, 2, 3, 4, 5, 6, 7, 0};
    EXPECT_EQ(to_trace_line(f), "0E4#0102030405060700");
    EXPECT_EQ(parse_trace_line("0E4#0102030405060700"), f);
    EXPECT_THROW(parse_trace_line("0E4-01"), EncodingError);
    EXPECT_THROW(parse_trace_line("0E4#01ZZ"), EncodingError);
}

TEST(Layout, ValidationAndText) {
    auto lay = SignalLayout::default_layout();
    EXPECT_NO_THROW(lay.validate());
    std::istringstream again(lay.to_text());
    auto back = SignalLayout::parse(again);
    ASSERT_EQ(back.messages.size(), lay.messages.size());
    EXPECT_EQ(back.to_text(), lay.to_text());

    std::istringstream overlap("BO_ 1 a\nSG_ x 0 8 1 0 unsigned 0 255\nSG_ y 4 8 1 0 unsigned 0 255\n");
    EXPECT_THROW(SignalLayout::parse(overlap), LayoutError);
    std::istringstream into_checksum("BO_ 1 a\nSG_ x 50 8 1 0 unsigned 0 255\n");
    EXPECT_THROW(SignalLayout::parse(into_checksum), LayoutError);
    std::istringstream zero("BO_ 1 a\nSG_ x 0 8 0 0 unsigned 0 255\n");
    EXPECT_THROW(SignalLayout::parse(zero), LayoutError);
    std::istringstream junk("BO_ 1 a\nSG_ x zero\n");
    EXPECT_THROW(SignalLayout::parse(junk), LayoutError);
}
