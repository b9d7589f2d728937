#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace pucl {

struct PidGains {
    double kp = 2.0;
    double ki = 0.5;
    double kd = 0.1;
};

/// Recomputes the penalty weight from the violation-rate history:
/// e_t = rate_t − target, integral folded with a non-negativity clamp,
/// w ← max(0, K_p·e_t + K_i·I_t + K_d·(e_t − e_{t−1})). The previous weight
/// is replaced, not incremented.
inline double pid_update(double /*w_p*/, const std::vector<double>& rates, const PidGains& gains,
                         double target = 0.0) {
    if (rates.empty()) throw std::invalid_argument("pid_update: empty violation history");
    double integral = 0.0;
    for (double r : rates) integral = std::max(0.0, integral + (r - target));
    const double e = rates.back() - target;
    const double e_prev = rates.size() >= 2 ? rates[rates.size() - 2] - target : 0.0;
    return std::max(0.0, gains.kp * e + gains.ki * integral + gains.kd * (e - e_prev));
}

}  // namespace pucl
