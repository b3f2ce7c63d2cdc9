#pragma once

#include "ceo/region.hpp"

#include <cstdint>

namespace ceo {

/// Whitened box coordinates: B_k = sigma_k^{1/2} Omega_k sigma_k^{1/2},
/// constraint 0 <= Omega_k <= sigma_k^{-1} becomes eigenvalues of B_k in [0,1].
/// Holds the precomputed pieces needed to evaluate the region bounds and
/// their analytic gradients directly in B coordinates.
struct WhitenedProblem {
    explicit WhitenedProblem(const CeoModel& m);

    const CeoModel* model;
    double alpha;
    double gamma_nx;
    MatrixXd sigma_x_inv;
    std::vector<MatrixXd> ms;  // M_k = sigma_k^{-1/2} H_k

    int num_agents() const { return static_cast<int>(ms.size()); }

    double rate_term(const std::vector<MatrixXd>& bs, int k) const;
    MatrixXd rate_term_grad(const std::vector<MatrixXd>& bs, int k) const;

    MatrixXd precision(const std::vector<MatrixXd>& bs, std::uint32_t subset) const;
    double cond_entropy(const std::vector<MatrixXd>& bs, std::uint32_t subset) const;
    /// d cond_entropy(subset) / d B_k; zero when k is outside the subset.
    MatrixXd cond_entropy_grad(const std::vector<MatrixXd>& bs, std::uint32_t subset,
                               int k) const;

    TestChannelGains gains(const std::vector<MatrixXd>& bs) const;
};

/// Clip eigenvalues of each B_k into the box (slightly inside 1 so rate
/// terms stay finite).
std::vector<MatrixXd> project_box(const std::vector<MatrixXd>& bs);

struct OptimizerOptions {
    int num_starts = 8;  // 3 deterministic + the rest random, seeded
    std::uint64_t seed = 0;
    int max_iters = 5000;
    std::vector<double> temperatures = {10.0, 100.0, 1000.0, 1e4, 1e5};
    double step0 = 0.5;
    int threads = 1;
};

struct InnerAllocation {
    std::vector<double> rates;
    double distortion = 0.0;
};

/// Exact optimal rate split for a fixed-gains polytope and sum-rate budget:
/// minimize D subject to D + sum_{k in S} R_k >= f(S) for all S,
/// sum R <= r_sum, R >= 0. Small exact LP; K <= 8.
InnerAllocation inner_allocation(const CeoModel& m, const TestChannelGains& g,
                                 double r_sum);
InnerAllocation inner_allocation(const SubsetBoundTable& t, double r_sum);

struct TracePoint {
    double r_sum = 0.0;
    double distortion = 0.0;
    TestChannelGains gains;
    std::vector<double> rates;
    bool converged = false;
    int iterations = 0;
};

/// Minimal distortion over the semidefinite box at each sum-rate budget,
/// by multi-start projected gradient descent on a log-sum-exp smoothed
/// max of the subset bounds, with the exact LP as inner step.
std::vector<TracePoint> trace_boundary(const CeoModel& m,
                                       const std::vector<double>& r_grid,
                                       const OptimizerOptions& opts = {});

struct MembershipVerdict {
    bool achievable = false;
    double margin = 0.0;
    TestChannelGains gains;  // certificate when achievable
};

/// One-sided membership test for the full region: searches gains maximizing
/// the worst feasibility margin of the point. Achievable when the margin
/// reaches -1e-6; otherwise Unknown (never claims infeasibility).
MembershipVerdict membership(const CeoModel& m, const RegionPoint& p,
                             const OptimizerOptions& opts = {});

}  // namespace ceo
