#include "adsim/can_codec.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adsim/errors.hpp"

namespace adsim {

namespace {

constexpr int kChecksumBit = 56;

std::uint64_t mask_of(int length) {
    return length >= 64 ? ~0ULL : ((1ULL << length) - 1ULL);
}

int hexval(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

const SignalDef* MessageDef::find(std::string_view sig) const {
    for (const auto& s : signals)
        if (s.name == sig) return &s;
    return nullptr;
}

const MessageDef* SignalLayout::find(std::uint16_t id) const {
    for (const auto& m : messages)
        if (m.id == id) return &m;
    return nullptr;
}

const MessageDef* SignalLayout::find_by_signal(std::string_view sig) const {
    for (const auto& m : messages)
        if (m.find(sig)) return &m;
    return nullptr;
}

void SignalLayout::validate() const {
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& m = messages[i];
        if (m.id > 0x7FF) throw LayoutError("message id exceeds 11 bits: " + m.name);
        for (std::size_t j = 0; j < i; ++j)
            if (messages[j].id == m.id) throw LayoutError("duplicate message id: " + m.name);
        std::uint64_t used = 0;
        for (const auto& s : m.signals) {
            if (s.scale == 0.0) throw LayoutError("zero scale: " + s.name);
            if (s.length < 1 || s.length > 32) throw LayoutError("bad length: " + s.name);
            if (s.start_bit < 0 || s.start_bit + s.length > kChecksumBit)
                throw LayoutError("signal reaches the checksum byte: " + s.name);
            std::uint64_t bits = mask_of(s.length) << s.start_bit;
            if (used & bits) throw LayoutError("overlapping signal: " + s.name);
            used |= bits;
        }
    }
}

SignalLayout SignalLayout::default_layout() {
    SignalDef counter{std::string(kSigCounter), 48, 4, 1.0, 0.0, false, 0.0, 15.0};
    SignalLayout l;
    l.messages.push_back(
        {0x0E4,
         "STEERING_CONTROL",
         {{std::string(kSigSteer), 0, 16, 0.0001, 0.0, true, -3.0, 3.0}, counter}});
    l.messages.push_back(
        {0x200, "GAS_COMMAND", {{std::string(kSigAccel), 0, 16, 0.001, 0.0, false, 0.0, 10.0}, counter}});
    l.messages.push_back(
        {0x201, "BRAKE_COMMAND", {{std::string(kSigBrake), 0, 16, 0.001, 0.0, true, -10.0, 0.0}, counter}});
    l.validate();
    return l;
}

SignalLayout SignalLayout::parse(std::istream& in) {
    SignalLayout l;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        auto fail = [&](const std::string& why) {
            throw LayoutError("layout line " + std::to_string(lineno) + ": " + why);
        };
        if (tag == "BO_") {
            std::string id_s, name;
            if (!(ss >> id_s >> name)) fail("expected BO_ <id> <name>");
            unsigned long id = 0;
            try {
                id = std::stoul(id_s, nullptr, 0);
            } catch (const std::exception&) {
                fail("bad id " + id_s);
            }
            l.messages.push_back({static_cast<std::uint16_t>(id), name, {}});
            if (id > 0x7FF) fail("id exceeds 11 bits");
        } else if (tag == "SG_") {
            if (l.messages.empty()) fail("SG_ before any BO_");
            SignalDef s;
            std::string sign;
            if (!(ss >> s.name >> s.start_bit >> s.length >> s.scale >> s.offset >> sign >> s.min >>
                  s.max))
                fail("expected SG_ <name> <start> <len> <scale> <offset> <signed|unsigned> <min> <max>");
            if (sign == "signed")
                s.is_signed = true;
            else if (sign != "unsigned")
                fail("signedness must be signed or unsigned");
            l.messages.back().signals.push_back(s);
        } else {
            fail("unknown tag " + tag);
        }
    }
    l.validate();
    return l;
}

SignalLayout SignalLayout::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw LayoutError("cannot open layout " + path);
    return parse(f);
}

std::string SignalLayout::to_text() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& m : messages) {
        char id[16];
        std::snprintf(id, sizeof id, "0x%03X", m.id);
        os << "BO_ " << id << ' ' << m.name << '\n';
        for (const auto& s : m.signals)
            os << "  SG_ " << s.name << ' ' << s.start_bit << ' ' << s.length << ' ' << s.scale << ' '
               << s.offset << ' ' << (s.is_signed ? "signed" : "unsigned") << ' ' << s.min << ' '
               << s.max << '\n';
    }
    return os.str();
}

std::uint8_t checksum(std::uint16_t id, const Payload8& data) {
    unsigned sum = (id >> 8) & 0xFF;
    sum += id & 0xFF;
    for (int i = 0; i < 7; ++i) sum += data[i];
    return static_cast<std::uint8_t>(sum & 0xFF);
}

bool checksum_ok(const CanFrame& f) { return checksum(f.id, f.data) == f.data[7]; }

std::uint64_t read_raw(const Payload8& data, int start_bit, int length) {
    std::uint64_t word = 0;
    for (int i = 0; i < 8; ++i) word |= std::uint64_t(data[i]) << (8 * i);
    return (word >> start_bit) & mask_of(length);
}

void write_raw(Payload8& data, int start_bit, int length, std::uint64_t raw) {
    std::uint64_t word = 0;
    for (int i = 0; i < 8; ++i) word |= std::uint64_t(data[i]) << (8 * i);
    std::uint64_t m = mask_of(length) << start_bit;
    word = (word & ~m) | ((raw << start_bit) & m);
    for (int i = 0; i < 8; ++i) data[i] = static_cast<std::uint8_t>(word >> (8 * i));
}

std::uint64_t encode_signal(const SignalDef& s, double value) {
    if (!std::isfinite(value)) throw EncodingError("non-finite value for " + s.name);
    if (s.min < s.max && (value < s.min || value > s.max))
        throw EncodingError("value out of range for " + s.name);
    long long raw = std::llround((value - s.offset) / s.scale);
    long long lo = s.is_signed ? -(1LL << (s.length - 1)) : 0;
    long long hi = s.is_signed ? (1LL << (s.length - 1)) - 1 : (1LL << s.length) - 1;
    if (raw < lo || raw > hi) throw EncodingError("raw value overflows " + s.name);
    return static_cast<std::uint64_t>(raw) & mask_of(s.length);
}

double decode_signal(const SignalDef& s, std::uint64_t raw) {
    long long v = static_cast<long long>(raw);
    if (s.is_signed && (raw >> (s.length - 1)) & 1ULL) v -= (1LL << s.length);
    return static_cast<double>(v) * s.scale + s.offset;
}

std::vector<CanFrame> encode_command(const ControlCommand& cmd, const SignalLayout& layout,
                                     unsigned counter) {
    std::vector<CanFrame> out;
    for (const auto& m : layout.messages) {
        CanFrame f;
        f.id = m.id;
        bool carries = false;
        for (const auto& s : m.signals) {
            double v = 0.0;
            if (s.name == kSigAccel) {
                v = cmd.accel;
                carries = true;
            } else if (s.name == kSigBrake) {
                v = cmd.brake;
                carries = true;
            } else if (s.name == kSigSteer) {
                v = cmd.steer_delta;
                carries = true;
            } else if (s.name == kSigCounter) {
                v = static_cast<double>(counter & mask_of(s.length));
            } else {
                continue;
            }
            write_raw(f.data, s.start_bit, s.length, encode_signal(s, v));
        }
        if (!carries) continue;
        f.data[7] = checksum(f.id, f.data);
        out.push_back(f);
    }
    return out;
}

PartialCommand decode_frame(const CanFrame& f, const SignalLayout& layout) {
    const MessageDef* m = layout.find(f.id);
    if (!m) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "unknown frame id 0x%03X", f.id);
        throw UnknownIdError(buf);
    }
    if (!checksum_ok(f)) throw IntegrityError("checksum mismatch on " + m->name);
    PartialCommand p;
    p.id = f.id;
    for (const auto& s : m->signals) {
        double v = decode_signal(s, read_raw(f.data, s.start_bit, s.length));
        p.signals[s.name] = v;
        if (s.name == kSigAccel) p.accel = v;
        if (s.name == kSigBrake) p.brake = v;
        if (s.name == kSigSteer) p.steer_delta = v;
    }
    return p;
}

CanFrame corrupt_frame(const CanFrame& f, std::string_view signal, double value,
                       const SignalLayout& layout) {
    const MessageDef* m = layout.find(f.id);
    if (!m) throw UnknownIdError("corrupt_frame: unknown frame id");
    const SignalDef* s = m->find(signal);
    if (!s) throw LayoutError("corrupt_frame: no signal " + std::string(signal) + " in " + m->name);
    CanFrame out = f;
    write_raw(out.data, s->start_bit, s->length, encode_signal(*s, value));
    out.data[7] = checksum(out.id, out.data);
    return out;
}

ControlCommand merge_frames(const std::vector<CanFrame>& frames, const SignalLayout& layout,
                            ControlCommand base) {
    for (const auto& f : frames) {
        PartialCommand p = decode_frame(f, layout);
        if (p.accel) base.accel = *p.accel;
        if (p.brake) base.brake = *p.brake;
        if (p.steer_delta) base.steer_delta = *p.steer_delta;
    }
    return base;
}

std::string to_trace_line(const CanFrame& f) {
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%03X#", f.id);
    for (int i = 0; i < 8; ++i) n += std::snprintf(buf + n, sizeof buf - n, "%02X", f.data[i]);
    return std::string(buf, n);
}

CanFrame parse_trace_line(std::string_view line) {
    auto hash = line.find('#');
    if (hash == std::string_view::npos || hash == 0 || hash > 3 || line.size() != hash + 17)
        throw EncodingError("malformed frame trace line");
    CanFrame f;
    unsigned id = 0;
    for (std::size_t i = 0; i < hash; ++i) {
        int h = hexval(line[i]);
        if (h < 0) throw EncodingError("malformed frame id");
        id = id * 16 + h;
    }
    if (id > 0x7FF) throw EncodingError("frame id exceeds 11 bits");
    f.id = static_cast<std::uint16_t>(id);
    for (int i = 0; i < 8; ++i) {
        int hi = hexval(line[hash + 1 + 2 * i]), lo = hexval(line[hash + 2 + 2 * i]);
        if (hi < 0 || lo < 0) throw EncodingError("malformed frame payload");
        f.data[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return f;
}

}  // namespace adsim
