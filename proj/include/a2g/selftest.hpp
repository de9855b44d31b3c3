#pragma once

#include <functional>
#include <ostream>
#include <span>

#include "a2g/qos.hpp"

namespace a2g {

using WeightFn = std::function<TrustWeights(std::span<const QosSample>,
                                            std::span<const std::size_t>, const QosGains&)>;

// Replaceable pieces, so tests can inject faults into the check suite.
struct SelftestHooks {
    WeightFn weights = [](std::span<const QosSample> s, std::span<const std::size_t> n,
                          const QosGains& g) { return trust_weights(s, n, g); };
};

// Runs the fast invariant groups (manifold, qos, fedavg, spsa, model, channel)
// and prints one PASS/FAIL line per group. Returns true when all pass.
bool run_selftest(std::ostream& out, const SelftestHooks& hooks = {});

}  // namespace a2g
