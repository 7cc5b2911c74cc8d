#include "fluidnet/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

namespace fluidnet {

FlowRates regime_rates(const DerivedQuantities& d, std::array<double, 2> z, std::array<double, 2> external) {
    if (z[0] < 0.0 || z[1] < 0.0) throw std::invalid_argument("content must be nonnegative");
    const auto& mu = d.mu;
    const std::array<double, 2> route{d.p12, d.p21};
    std::array<double, 2> out{mu[0], mu[1]};

    const bool empty0 = z[0] == 0.0;
    const bool empty1 = z[1] == 0.0;
    if (empty0 && empty1) {
        // Uncapped pass-through solves out = external + P^T out.
        const double feedback = 1.0 - route[0] * route[1];
        const std::array<double, 2> pass{(external[0] + route[1] * external[1]) / feedback,
                                         (external[1] + route[0] * external[0]) / feedback};
        const double cap0_other = std::min(mu[1], external[1] + route[0] * mu[0]);
        const double cap1_other = std::min(mu[0], external[0] + route[1] * mu[1]);
        if (pass[0] <= mu[0] && pass[1] <= mu[1]) {
            out = pass;
        } else if (external[0] + route[1] * cap0_other >= mu[0]) {
            out = {mu[0], cap0_other};
        } else if (external[1] + route[0] * cap1_other >= mu[1]) {
            out = {cap1_other, mu[1]};
        }
    } else if (empty0) {
        out[0] = std::min(mu[0], external[0] + route[1] * mu[1]);
    } else if (empty1) {
        out[1] = std::min(mu[1], external[1] + route[0] * mu[0]);
    }

    FlowRates r;
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        r.content[i] = external[i] + route[j] * out[j] - out[i];
        r.regulator[i] = mu[i] - out[i];
    }
    // An empty node whose inflow stays below capacity holds exactly at zero.
    for (int i = 0; i < 2; ++i)
        if (z[i] == 0.0 && r.regulator[i] > 0.0) r.content[i] = 0.0;
    return r;
}

}  // namespace fluidnet
