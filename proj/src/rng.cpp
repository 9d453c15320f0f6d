#include "adsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace adsim {

double Rng::normal(double mean, double sd) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + sd * spare_;
    }
    // 1 - u keeps the log argument in (0, 1]
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return mean + sd * r * std::cos(th);
}

}  // namespace adsim
