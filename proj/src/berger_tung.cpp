#include "ceo/berger_tung.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ceo {

double mutual_info_group(const CeoModel& m, const TestChannelGains& g,
                         std::uint32_t subset) {
    const int K = m.num_agents();
    double rsum = 0.0;
    for (int k = 0; k < K; ++k) {
        if (!in_subset(subset, k)) continue;
        const double r = rate_term(m, g, k);
        if (std::isinf(r)) return kInfRate;
        rsum += r;
    }
    const double ld_full = log_det(posterior_precision(m, g, full_mask(K)));
    const double ld_comp = log_det(posterior_precision(m, g, full_mask(K) & ~subset));
    return rsum + m.convention().alpha * (ld_full - ld_comp);
}

RegionPoint corner_point(const CeoModel& m, const CornerSpec& spec) {
    const int K = m.num_agents();
    if (static_cast<int>(spec.perm.size()) != K)
        throw std::invalid_argument("permutation length does not match agent count");
    std::vector<bool> seen(K, false);
    for (int k : spec.perm) {
        if (k < 0 || k >= K || seen[k])
            throw std::invalid_argument("invalid decoding-order permutation");
        seen[k] = true;
    }

    const auto& g = spec.gains;
    const double alpha = m.convention().alpha;
    RegionPoint p;
    p.rates.assign(K, 0.0);

    // R_{pi(i)} = I(Y_{pi(i)}; U_{pi(i)} | U_{pi(1..i-1)})
    //           = rate_term(pi(i)) + alpha [ln det J_{prefix_i} - ln det J_{prefix_{i-1}}]
    std::uint32_t prefix = 0;
    double ld_prev = log_det(posterior_precision(m, g, 0));
    for (int i = 0; i < K; ++i) {
        const int k = spec.perm[i];
        const double r = rate_term(m, g, k);
        if (std::isinf(r))
            throw std::domain_error("rate term of agent " + std::to_string(k + 1) +
                                    " is infinite at the box boundary");
        prefix |= 1u << k;
        const double ld = log_det(posterior_precision(m, g, prefix));
        p.rates[k] = r + alpha * (ld - ld_prev);
        ld_prev = ld;
    }
    p.distortion = cond_entropy_given(m, g, full_mask(K));
    return p;
}

std::vector<RegionPoint> extreme_points_k2(const CeoModel& m,
                                           const TestChannelGains& g) {
    if (m.num_agents() != 2)
        throw std::invalid_argument("extreme points P1..P5 are defined for K = 2");

    const double rt1 = rate_term(m, g, 0);
    const double rt2 = rate_term(m, g, 1);
    const double h_prior = cond_entropy_given(m, g, 0u);
    const double h_1 = cond_entropy_given(m, g, 0b01u);
    const double h_2 = cond_entropy_given(m, g, 0b10u);
    const double h_12 = cond_entropy_given(m, g, 0b11u);

    const double i_y1u1 = rt1 + (h_prior - h_1);     // I(Y_1; U_1)
    const double i_y2u2 = rt2 + (h_prior - h_2);     // I(Y_2; U_2)
    const double i_y2u2_g1 = rt2 + (h_1 - h_12);     // I(Y_2; U_2 | U_1)
    const double i_y1u1_g2 = rt1 + (h_2 - h_12);     // I(Y_1; U_1 | U_2)

    return {
        RegionPoint{{0.0, 0.0}, rt1 + rt2 + h_prior},       // P1
        RegionPoint{{i_y1u1, 0.0}, rt2 + h_1},              // P2
        RegionPoint{{0.0, i_y2u2}, rt1 + h_2},              // P3
        RegionPoint{{i_y1u1, i_y2u2_g1}, h_12},             // P4
        RegionPoint{{i_y1u1_g2, i_y2u2}, h_12},             // P5
    };
}

DominationReport check_domination_k2(const CeoModel& m, const TestChannelGains& g) {
    const auto pts = extreme_points_k2(m, g);
    const double h_prior = cond_entropy_given(m, g, 0u);
    const double h_1 = cond_entropy_given(m, g, 0b01u);
    const double h_2 = cond_entropy_given(m, g, 0b10u);

    // Dominating Berger-Tung points: (0,0,h(X)) for P1,
    // (I(Y_1;U_1), 0, h(X|U_1)) for P2, symmetric for P3, P4/P5 themselves.
    const std::vector<RegionPoint> dominators = {
        RegionPoint{{0.0, 0.0}, h_prior},
        RegionPoint{{pts[1].rates[0], 0.0}, h_1},
        RegionPoint{{0.0, pts[2].rates[1]}, h_2},
        pts[3],
        pts[4],
    };

    DominationReport rep;
    rep.worst_slack = kInfRate;
    for (int j = 0; j < 5; ++j) {
        const double ds = pts[j].distortion - dominators[j].distortion;
        double rs = kInfRate;
        for (int k = 0; k < 2; ++k)
            rs = std::min(rs, pts[j].rates[k] - dominators[j].rates[k]);
        rep.distortion_slack.push_back(ds);
        rep.min_rate_slack.push_back(rs);
        rep.worst_slack = std::min({rep.worst_slack, ds, rs});
    }
    return rep;
}

}  // namespace ceo
