#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adsim/sim_core.hpp"

namespace adsim {

using Payload8 = std::array<std::uint8_t, 8>;

// Byte 7 of data holds the checksum.
struct CanFrame {
    std::uint16_t id = 0;
    Payload8 data{};

    std::uint8_t checksum_byte() const { return data[7]; }
    bool operator==(const CanFrame&) const = default;
};

// Intel (little-endian) bit numbering: bit b lives in byte b/8, bit b%8.
struct SignalDef {
    std::string name;
    int start_bit = 0;
    int length = 8;
    double scale = 1.0;
    double offset = 0.0;
    bool is_signed = false;
    double min = 0.0;
    double max = 0.0;
};

struct MessageDef {
    std::uint16_t id = 0;
    std::string name;
    std::vector<SignalDef> signals;

    const SignalDef* find(std::string_view sig) const;
};

struct SignalLayout {
    std::vector<MessageDef> messages;

    const MessageDef* find(std::uint16_t id) const;
    const MessageDef* find_by_signal(std::string_view sig) const;
    // throws LayoutError on overlap, zero scale, bad id or bits reaching the checksum byte
    void validate() const;

    // steer 0x0E4, gas 0x200, brake 0x201; each with a 4-bit rolling counter
    static SignalLayout default_layout();
    // DBC-lite text:
    //   BO_ <id> <name>
    //   SG_ <name> <start> <length> <scale> <offset> <signed|unsigned> <min> <max>
    // '#' starts a comment.
    static SignalLayout parse(std::istream& in);
    static SignalLayout load(const std::string& path);
    std::string to_text() const;
};

// Names of signals that map onto ControlCommand fields.
inline constexpr std::string_view kSigAccel = "accel";
inline constexpr std::string_view kSigBrake = "brake";
inline constexpr std::string_view kSigSteer = "steer_delta";
inline constexpr std::string_view kSigCounter = "counter";

struct PartialCommand {
    std::uint16_t id = 0;
    std::optional<double> accel;
    std::optional<double> brake;
    std::optional<double> steer_delta;
    std::map<std::string, double> signals;
};

// (sum of the id's two bytes + data[0..6]) mod 256
std::uint8_t checksum(std::uint16_t id, const Payload8& data);
bool checksum_ok(const CanFrame& f);

std::uint64_t read_raw(const Payload8& data, int start_bit, int length);
void write_raw(Payload8& data, int start_bit, int length, std::uint64_t raw);

// physical <-> raw for one signal; encode throws EncodingError when out of range
std::uint64_t encode_signal(const SignalDef& s, double value);
double decode_signal(const SignalDef& s, std::uint64_t raw);

// One frame per message that carries a command signal. Counter signals get `counter`.
std::vector<CanFrame> encode_command(const ControlCommand& cmd, const SignalLayout& layout,
                                     unsigned counter = 0);

// Verifies the checksum first.
PartialCommand decode_frame(const CanFrame& f, const SignalLayout& layout);

// Rewrites one signal and repairs the checksum. Other bits are untouched.
CanFrame corrupt_frame(const CanFrame& f, std::string_view signal, double value,
                       const SignalLayout& layout);

// Fold decoded frames into a command; channels without a frame keep `base`.
ControlCommand merge_frames(const std::vector<CanFrame>& frames, const SignalLayout& layout,
                            ControlCommand base = {});

// "0E4#0102030405060700"
std::string to_trace_line(const CanFrame& f);
CanFrame parse_trace_line(std::string_view line);

}  // namespace adsim
