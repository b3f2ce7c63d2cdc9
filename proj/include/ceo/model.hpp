#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ceo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Gaussian field convention. Real uses (d/2)ln(2*pi*e) entropy constants,
/// Complex uses d*ln(pi*e) (circularly-symmetric convention), with all
/// matrix arithmetic carried out over the reals in both modes.
enum class Mode { Real, Complex };

constexpr double kInfRate = std::numeric_limits<double>::infinity();

/// Entropy constants for a field convention:
/// h(N(0, S)) = gamma(dim) + alpha * ln det S.
struct EntropyConvention {
    double alpha;
    Mode mode;

    static EntropyConvention of(Mode m);
    double gamma(int dim) const;
};

/// One agent: observation channel Y_k = H_k X + N_k with N_k ~ N(0, sigma).
struct Agent {
    MatrixXd H;      // n_k x n_x
    MatrixXd sigma;  // n_k x n_k noise covariance
};

/// Problem instance: remote source X ~ N(0, sigma_x) observed by K agents
/// through independent additive Gaussian noise channels.
struct CeoModel {
    int n_x = 0;
    MatrixXd sigma_x;
    std::vector<Agent> agents;
    Mode mode = Mode::Real;

    int num_agents() const { return static_cast<int>(agents.size()); }
    int obs_dim(int k) const { return static_cast<int>(agents[k].H.rows()); }
    EntropyConvention convention() const { return EntropyConvention::of(mode); }

    /// Differential entropy of the prior, gamma(n_x) + alpha ln det sigma_x.
    double prior_entropy() const;
};

/// Gaussian test-channel gains: the matrices Omega_k, 0 <= Omega_k <= sigma_k^{-1}.
struct TestChannelGains {
    std::vector<MatrixXd> omegas;

    static TestChannelGains zero(const CeoModel& m);
    /// Whitened gains Omega_k = sigma_k^{-1/2} B_k sigma_k^{-1/2} with
    /// eigenvalues of B_k in [0, 1].
    static TestChannelGains from_whitened(const CeoModel& m,
                                          const std::vector<MatrixXd>& bs);
};

/// Symmetrize on ingestion; all validators work on (M + M^T)/2.
MatrixXd symmetrize(const MatrixXd& m);

/// ln det of a symmetric positive definite matrix.
double log_det(const MatrixXd& m);

/// Symmetric PSD square root.
MatrixXd matrix_sqrt(const MatrixXd& m);

/// Every violated model invariant, with offending eigenvalues/dimensions.
/// Empty list means the model passes all downstream preconditions.
std::vector<std::string> validate_model(const CeoModel& m);

/// Violations of 0 <= Omega_k <= sigma_k^{-1} (1e-10 eigenvalue slack).
std::vector<std::string> validate_gains(const CeoModel& m, const TestChannelGains& g);

/// Subsets of {0..K-1} as bitmasks.
inline bool in_subset(std::uint32_t mask, int k) { return (mask >> k) & 1u; }
inline std::uint32_t full_mask(int k) { return (1u << k) - 1u; }

/// Posterior precision J_A = sigma_x^{-1} + sum_{k in A} H_k^T Omega_k H_k.
MatrixXd posterior_precision(const CeoModel& m, const TestChannelGains& g,
                             std::uint32_t subset);

/// h(X | U_A) = gamma(n_x) - alpha ln det J_A for Gaussian test channels.
double cond_entropy_given(const CeoModel& m, const TestChannelGains& g,
                          std::uint32_t subset);

/// I(Y_k; U_k | X) = -alpha ln det(I - Omega_k sigma_k).
/// Returns +inf when det(I - Omega_k sigma_k) <= 1e-14 (box boundary).
double rate_term(const CeoModel& m, const TestChannelGains& g, int k);

/// Block covariance of (X, U_1..U_K) under the additive test channels
/// U_k = Y_k + W_k, W_k ~ N(0, Omega_k^{-1} - sigma_k).
/// Requires every Omega_k nonsingular (strict interior); throws otherwise
/// with a message pointing at the precision-path operations.
MatrixXd joint_covariance(const CeoModel& m, const TestChannelGains& g);

/// Block offsets into the (X, U_1..U_K) joint: x at 0, U_k at u_offset(k).
int joint_dim(const CeoModel& m);
int u_offset(const CeoModel& m, int k);

}  // namespace ceo
