#include "ceo/region.hpp"

#include <cmath>
#include <stdexcept>

namespace ceo {

SubsetBoundTable subset_bounds(const CeoModel& m, const TestChannelGains& g) {
    const int K = m.num_agents();
    if (K > 20)
        throw std::invalid_argument("subset enumeration limited to K <= 20, got K = " +
                                    std::to_string(K));
    SubsetBoundTable t;
    t.num_agents = K;
    const std::uint32_t n = 1u << K;
    t.rate_sum_term.resize(n);
    t.cond_entropy_term.resize(n);
    t.f.resize(n);

    std::vector<double> rates(K);
    for (int k = 0; k < K; ++k) rates[k] = rate_term(m, g, k);

    for (std::uint32_t s = 0; s < n; ++s) {
        double rsum = 0.0;
        for (int k = 0; k < K; ++k)
            if (in_subset(s, k)) rsum += rates[k];
        t.rate_sum_term[s] = rsum;
        t.cond_entropy_term[s] = cond_entropy_given(m, g, full_mask(K) & ~s);
        t.f[s] = rsum + t.cond_entropy_term[s];
    }
    return t;
}

Feasibility is_feasible_for_table(const SubsetBoundTable& t, const RegionPoint& p) {
    Feasibility r;
    r.margin = kInfRate;
    for (std::uint32_t s = 0; s < t.size(); ++s) {
        const double slack = p.distortion + p.rate_sum(s) - t.f[s];
        if (slack < r.margin) {
            r.margin = slack;
            r.worst_subset = s;
        }
    }
    r.feasible = r.margin >= -kFeasibilityTol;
    return r;
}

Feasibility is_feasible_for_gains(const CeoModel& m, const TestChannelGains& g,
                                  const RegionPoint& p) {
    return is_feasible_for_table(subset_bounds(m, g), p);
}

RegionPoint achievable_point(const CeoModel& m, const TestChannelGains& g,
                             const std::vector<double>& rate_split, double r_sum) {
    const auto t = subset_bounds(m, g);
    RegionPoint p;
    p.rates.resize(rate_split.size());
    for (std::size_t k = 0; k < rate_split.size(); ++k)
        p.rates[k] = rate_split[k] * r_sum;
    p.distortion = -kInfRate;
    for (std::uint32_t s = 0; s < t.size(); ++s)
        p.distortion = std::max(p.distortion, t.f[s] - p.rate_sum(s));
    return p;
}

double information_from_distortion(const CeoModel& m, double distortion) {
    return m.prior_entropy() - distortion;
}

}  // namespace ceo
