#include "adsim/monitor.hpp"

#include <cmath>

namespace adsim {

std::string_view to_string(Hazard h) {
    switch (h) {
        case Hazard::H1: return "H1";
        case Hazard::H2: return "H2";
        case Hazard::H3: return "H3";
    }
    return "H1";
}

std::string_view to_string(Accident a) {
    switch (a) {
        case Accident::A1: return "A1";
        case Accident::A2: return "A2";
        case Accident::A3: return "A3";
    }
    return "A1";
}

int RunResult::fcw_count() const {
    int n = 0;
    for (const auto& a : alerts) n += a.kind == AlertKind::FCW;
    return n;
}

std::optional<double> tth(std::optional<double> activation, std::optional<double> first_hazard) {
    if (!activation || !first_hazard || *first_hazard < *activation) return std::nullopt;
    return *first_hazard - *activation;
}

bool HazardMonitor::h1_now(const MonitorInput& in) const {
    if (!in.lead_exists) return false;
    return headway(in.ego, in.lead, geo_.length).hwt < p_.h1_hwt;
}

bool HazardMonitor::h2_now(const MonitorInput& in) const {
    if (!moved_ || in.v_cruise <= 0.0 || in.ego.speed >= p_.h2_speed) return false;
    if (!in.lead_exists) return true;
    return headway(in.ego, in.lead, geo_.length).rel_dist > p_.h2_lead_range;
}

bool HazardMonitor::h3_now(const VehicleState& ego) const {
    double rel = ego.y - lane_.lane_center(ego_lane_);
    return std::abs(rel) >= 0.5 * lane_.lane_width + 0.5 * geo_.width;
}

std::vector<Hazard> HazardMonitor::check_hazards(const MonitorInput& in, int step) {
    if (in.ego.speed > p_.moving_speed) moved_ = true;
    std::vector<Hazard> fresh;
    auto latch = [&](Hazard h, bool now) {
        if (now && !hazards_.count(h)) {
            hazards_[h] = step;
            fresh.push_back(h);
        }
    };
    latch(Hazard::H1, h1_now(in));
    bool h2 = h2_now(in);
    h2_dwell_ = h2 ? h2_dwell_ + 1 : 0;
    latch(Hazard::H2, h2);
    latch(Hazard::H3, h3_now(in.ego));
    return fresh;
}

std::vector<Accident> HazardMonitor::check_accidents(const MonitorInput& in, int step) {
    std::vector<Accident> fresh;
    auto latch = [&](Accident a, bool now) {
        if (now && !accidents_.count(a)) {
            accidents_[a] = step;
            fresh.push_back(a);
        }
    };
    latch(Accident::A1, in.lead_exists && headway(in.ego, in.lead, geo_.length).rel_dist <= 0.0);
    latch(Accident::A2, h2_dwell_ >= static_cast<int>(std::lround(p_.a2_dwell / dt_)));
    latch(Accident::A3, std::abs(in.ego.y) + 0.5 * geo_.width >=
                            lane_.road_half_width() + lane_.guardrail_offset);
    return fresh;
}

int HazardMonitor::record_lane_invasion(const VehicleState& ego) {
    double rel = ego.y - lane_.lane_center(ego_lane_);
    bool out = std::abs(rel) + 0.5 * geo_.width > 0.5 * lane_.lane_width;
    if (out && !outside_) ++invasions_;
    outside_ = out;
    return invasions_;
}

}  // namespace adsim
