#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string_view>
#include <variant>
#include <vector>

#include "adsim/sim_core.hpp"

namespace adsim {

enum class Topic { GpsLocationExternal, ModelV2, RadarState, CarControl };
inline constexpr int kTopicCount = 4;

std::string_view topic_name(Topic t);
Topic topic_from_name(std::string_view name);  // throws UnknownTopicError

struct GpsPayload {
    double speed = 0.0;
};

// Lane-line lateral positions relative to the vehicle centre, positive = right.
struct ModelV2Payload {
    double left_line = 0.0;
    double right_line = 0.0;
};

struct RadarPayload {
    bool lead_present = false;
    double rel_dist = 0.0;
    double rel_speed = 0.0;  // ego minus lead
};

struct CarControlPayload {
    ControlCommand cmd;
};

// variant index == Topic value
using Payload = std::variant<GpsPayload, ModelV2Payload, RadarPayload, CarControlPayload>;

struct BusMessage {
    Topic topic;
    int timestep;
    Payload payload;
};

class MessageBus;

class Subscription {
public:
    Topic topic() const { return topic_; }
    std::optional<BusMessage> next();
    std::vector<BusMessage> drain();
    std::size_t pending() const { return queue_->size(); }

private:
    friend class MessageBus;
    Subscription(Topic t, std::shared_ptr<std::deque<BusMessage>> q)
        : topic_(t), queue_(std::move(q)) {}
    Topic topic_;
    std::shared_ptr<std::deque<BusMessage>> queue_;
};

// Synchronous: publish() has delivered to every subscriber when it returns.
class MessageBus {
public:
    using Callback = std::function<void(const BusMessage&)>;

    Subscription subscribe(Topic t);
    Subscription subscribe(std::string_view topic);
    void subscribe(Topic t, Callback cb);

    void publish(Topic t, const Payload& p, int timestep);
    void publish(std::string_view topic, const Payload& p, int timestep);

    // line-delimited JSON of every published message
    void set_trace(std::ostream* os) { trace_ = os; }

private:
    struct Sink {
        std::shared_ptr<std::deque<BusMessage>> queue;
        Callback cb;
    };
    std::vector<Sink> sinks_[kTopicCount];
    std::ostream* trace_ = nullptr;
};

}  // namespace adsim
