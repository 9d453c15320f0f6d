#include "adsim/bus.hpp"

#include <array>
#include <string>

#include <json.hpp>

#include "adsim/errors.hpp"

namespace adsim {

namespace {

constexpr std::array<std::string_view, kTopicCount> kNames = {
    "gpsLocationExternal", "modelV2", "radarState", "carControl"};

nlohmann::json payload_json(const Payload& p) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GpsPayload>)
                return {{"speed", v.speed}};
            else if constexpr (std::is_same_v<T, ModelV2Payload>)
                return {{"left_line", v.left_line}, {"right_line", v.right_line}};
            else if constexpr (std::is_same_v<T, RadarPayload>)
                return {{"lead_present", v.lead_present},
                        {"rel_dist", v.rel_dist},
                        {"rel_speed", v.rel_speed}};
            else
                return {{"accel", v.cmd.accel},
                        {"brake", v.cmd.brake},
                        {"steer_delta", v.cmd.steer_delta}};
        },
        p);
}

}  // namespace

std::string_view topic_name(Topic t) { return kNames[static_cast<int>(t)]; }

Topic topic_from_name(std::string_view name) {
    for (int i = 0; i < kTopicCount; ++i)
        if (kNames[i] == name) return static_cast<Topic>(i);
    throw UnknownTopicError("unknown topic: " + std::string(name));
}

std::optional<BusMessage> Subscription::next() {
    if (queue_->empty()) return std::nullopt;
    BusMessage m = std::move(queue_->front());
    queue_->pop_front();
    return m;
}

std::vector<BusMessage> Subscription::drain() {
    std::vector<BusMessage> out(std::make_move_iterator(queue_->begin()),
                                std::make_move_iterator(queue_->end()));
    queue_->clear();
    return out;
}

Subscription MessageBus::subscribe(Topic t) {
    auto q = std::make_shared<std::deque<BusMessage>>();
    sinks_[static_cast<int>(t)].push_back({q, nullptr});
    return Subscription(t, q);
}

Subscription MessageBus::subscribe(std::string_view topic) {
    return subscribe(topic_from_name(topic));
}

void MessageBus::subscribe(Topic t, Callback cb) {
    sinks_[static_cast<int>(t)].push_back({nullptr, std::move(cb)});
}

void MessageBus::publish(Topic t, const Payload& p, int timestep) {
    if (static_cast<int>(p.index()) != static_cast<int>(t))
        throw SchemaError("payload schema does not match topic " + std::string(topic_name(t)));
    BusMessage m{t, timestep, p};
    if (trace_) {
        nlohmann::json j{{"t", timestep}, {"topic", topic_name(t)}, {"payload", payload_json(p)}};
        *trace_ << j.dump() << '\n';
    }
    for (auto& s : sinks_[static_cast<int>(t)]) {
        if (s.queue)
            s.queue->push_back(m);
        else
            s.cb(m);
    }
}

void MessageBus::publish(std::string_view topic, const Payload& p, int timestep) {
    publish(topic_from_name(topic), p, timestep);
}

}  // namespace adsim
