#pragma once

#include "ceo/model.hpp"

namespace ceo {

/// Candidate operating point (R_1..R_K, D), all in nats.
struct RegionPoint {
    std::vector<double> rates;
    double distortion = 0.0;

    double rate_sum(std::uint32_t subset) const {
        double s = 0.0;
        for (std::size_t k = 0; k < rates.size(); ++k)
            if (in_subset(subset, static_cast<int>(k))) s += rates[k];
        return s;
    }
};

/// f(S) = sum_{k in S} rate_term(k) + cond_entropy_given(S^c),
/// one entry per subset keyed by bitmask.
struct SubsetBoundTable {
    int num_agents = 0;
    std::vector<double> rate_sum_term;     // sum of rate terms over S
    std::vector<double> cond_entropy_term;  // h(X | U_{S^c})
    std::vector<double> f;                  // the bound itself

    std::uint32_t size() const { return 1u << num_agents; }
};

/// Evaluates every subset bound of the fixed-gains region. K <= 20.
SubsetBoundTable subset_bounds(const CeoModel& m, const TestChannelGains& g);

struct Feasibility {
    bool feasible = false;
    double margin = 0.0;            // min over S of D + sum_S R_k - f(S)
    std::uint32_t worst_subset = 0;
};

/// Does (R, D) satisfy D + sum_{k in S} R_k >= f(S) for every S
/// (margin >= -1e-9)?
Feasibility is_feasible_for_gains(const CeoModel& m, const TestChannelGains& g,
                                  const RegionPoint& p);
Feasibility is_feasible_for_table(const SubsetBoundTable& t, const RegionPoint& p);

/// Smallest D making (R, D) feasible for these gains, with
/// R_k = weight_k * r_sum. +inf when some bound is infinite.
RegionPoint achievable_point(const CeoModel& m, const TestChannelGains& g,
                             const std::vector<double>& rate_split, double r_sum);

/// Preserved information Delta = h(X) - D (rate-information duality).
double information_from_distortion(const CeoModel& m, double distortion);

constexpr double kFeasibilityTol = 1e-9;

}  // namespace ceo
