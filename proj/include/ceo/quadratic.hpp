#pragma once

#include "ceo/optimizer.hpp"
#include "ceo/region.hpp"

namespace ceo {

/// Determinant-constraint distortion level: bound on det of the average
/// error matrix, 0 < d_q <= det sigma_x.
struct DetDistortion {
    double d_q = 0.0;
};

/// Affine map from a determinant level to the equivalent log-loss level:
/// gamma(n_x) + alpha ln d_q. Complex mode reproduces log((pi e)^{n_x} D).
double logloss_from_det(const CeoModel& m, double d_q);

/// Inverse map: exp((d_log - gamma(n_x)) / alpha).
DetDistortion det_from_logloss(const CeoModel& m, double d_log);

/// Every subset inequality of the determinant-constraint region for fixed
/// gains; margins share the log-loss feasibility check via the affine map.
Feasibility det_region_check(const CeoModel& m, const TestChannelGains& g,
                             const std::vector<double>& rates, double d_q);

/// trace_boundary with the distortion column mapped to determinant levels.
std::vector<std::pair<double, double>> det_trace(const CeoModel& m,
                                                 const std::vector<double>& r_grid,
                                                 const OptimizerOptions& opts = {});

}  // namespace ceo
