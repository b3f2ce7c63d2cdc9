#pragma once

#include "ceo/region.hpp"

namespace ceo {

/// Successive-decoding corner: agents are decoded in order `perm`
/// (0-based agent indices), rates are chain increments of conditional
/// mutual information.
struct CornerSpec {
    std::vector<int> perm;
    TestChannelGains gains;
};

/// I(Y_S; U_S | U_{S^c}) for Gaussian test channels:
/// sum_{k in S} rate_term(k) + alpha [ln det J_K - ln det J_{S^c}].
double mutual_info_group(const CeoModel& m, const TestChannelGains& g,
                         std::uint32_t subset);

/// Corner point for a decoding order. R_{pi(i)} = I(Y_{pi(i)}; U_{pi(i)} |
/// U_{pi(1..i-1)}), D = h(X | U_{1..K}). Throws when a rate term is
/// infinite, naming the agent.
RegionPoint corner_point(const CeoModel& m, const CornerSpec& spec);

/// The five K=2 extreme points P1..P5 of the fixed-gains polytope.
std::vector<RegionPoint> extreme_points_k2(const CeoModel& m,
                                           const TestChannelGains& g);

struct DominationReport {
    // Per extreme point: componentwise slack of the dominating Berger-Tung
    // point (rates and distortion of P_j minus the dominating point).
    std::vector<double> distortion_slack;
    std::vector<double> min_rate_slack;
    double worst_slack = 0.0;
};

/// Verifies that each of P1..P5 is dominated by a Berger-Tung point
/// (P4, P5 by themselves). All slacks must be >= -1e-9.
DominationReport check_domination_k2(const CeoModel& m, const TestChannelGains& g);

}  // namespace ceo
