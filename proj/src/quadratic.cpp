#include "ceo/quadratic.hpp"

#include <cmath>
#include <stdexcept>

namespace ceo {

double logloss_from_det(const CeoModel& m, double d_q) {
    if (!(d_q > 0.0))
        throw std::domain_error("determinant distortion must be positive");
    const auto c = m.convention();
    return c.gamma(m.n_x) + c.alpha * std::log(d_q);
}

DetDistortion det_from_logloss(const CeoModel& m, double d_log) {
    const auto c = m.convention();
    return {std::exp((d_log - c.gamma(m.n_x)) / c.alpha)};
}

Feasibility det_region_check(const CeoModel& m, const TestChannelGains& g,
                             const std::vector<double>& rates, double d_q) {
    RegionPoint p;
    p.rates = rates;
    p.distortion = logloss_from_det(m, d_q);
    return is_feasible_for_gains(m, g, p);
}

std::vector<std::pair<double, double>> det_trace(const CeoModel& m,
                                                 const std::vector<double>& r_grid,
                                                 const OptimizerOptions& opts) {
    std::vector<std::pair<double, double>> out;
    for (const auto& tp : trace_boundary(m, r_grid, opts))
        out.emplace_back(tp.r_sum, det_from_logloss(m, tp.distortion).d_q);
    return out;
}

}  // namespace ceo
