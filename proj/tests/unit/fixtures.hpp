#pragma once

#include "fluidnet/network.hpp"

namespace fixtures {

using namespace fluidnet;

// mu = (2, 2), p12 = p21 = 1/2, lambda = 1, m = (1/2, 1/2): delta = (1, 1), Delta = (1/2, 1/2).
inline NetworkParams symmetric(double lambda = 1.0) {
    return NetworkParams({2.0, 2.0}, 0.5, 0.5, PoissonArrivals{lambda},
                         MixtureJumps{0.5, HeavyDist::exponential(1.0), HeavyDist::exponential(1.0)});
}

inline NetworkParams symmetric_pareto() {
    // Pareto(1, 3) has mean 3/2, so m = (3/4, 3/4) and Delta = (1/4, 1/4).
    return NetworkParams({2.0, 2.0}, 0.5, 0.5, PoissonArrivals{1.0},
                         MixtureJumps{0.5, HeavyDist::pareto(1.0, 3.0), HeavyDist::pareto(1.0, 3.0)});
}

inline NetworkParams reference() {
    return NetworkParams({2.0, 2.0}, 0.5, 0.5, PoissonArrivals{1.0},
                         MixtureJumps{0.5, HeavyDist::pareto(1.0, 2.5), HeavyDist::pareto(1.0, 2.5)});
}

}  // namespace fixtures
