#pragma once

#include "ceo/model.hpp"

#include <string>
#include <utility>

namespace ceo::mc {

struct McConfig {
    long samples = 200000;
    std::uint64_t seed = 0;
    long chunk = 10000;  // samples per independent stream
    int threads = 1;
};

/// One verification result. For matrix-valued checks the scalar
/// `analytic`/`empirical` columns carry Frobenius norms; the matrices
/// themselves are kept alongside for tests.
struct McReport {
    std::string name;
    double analytic = 0.0;
    double empirical = 0.0;
    double rel_error = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
    bool flagged = false;
    std::string note;
    MatrixXd analytic_mat;
    MatrixXd empirical_mat;
    double std_error = 0.0;  // only for sampling-mean checks
};

/// i.i.d. draws of (X, Y_1..Y_K, U_1..U_K), column-major d x N.
/// Chunks are seeded by (seed, chunk index), so the content is
/// reproducible for a fixed chunk size regardless of thread count.
struct SampleBatch {
    MatrixXd zs;
    int n_x = 0;
    std::vector<int> y_off;
    std::vector<int> u_off;
    std::vector<int> obs_dim;

    int dim() const { return static_cast<int>(zs.rows()); }
    long count() const { return zs.cols(); }
};

/// Real mode and strictly interior gains only (whitened eigenvalues in
/// [1e-9, 1 - 1e-9]); throws otherwise.
SampleBatch sample_batch(const CeoModel& m, const TestChannelGains& g,
                         const McConfig& cfg);

/// Sample mean and covariance via the runtime-dispatched moment kernels,
/// accumulated per chunk and merged pairwise in chunk order.
std::pair<VectorXd, MatrixXd> sample_moments(const SampleBatch& b,
                                             const McConfig& cfg);

/// Eq-style check per agent: empirical mmse(Y_k | X, U_k) from the sample
/// joint covariance Schur complement vs sigma_k - sigma_k Omega_k sigma_k.
std::vector<McReport> verify_mmse_identity(const CeoModel& m,
                                           const TestChannelGains& g,
                                           const McConfig& cfg);

/// Exact dual-path check: posterior precision of X given U_{S^c} by
/// precision accumulation vs joint-covariance Schur complement.
McReport verify_fisher_equality(const CeoModel& m, const TestChannelGains& g,
                                std::uint32_t subset_s);

/// Fisher sandwich for the Gaussian pair (X, U_A): entropy lower bound,
/// h(X|U_A), and the MMSE upper bound all coincide.
McReport verify_entropy_sandwich(const CeoModel& m, const TestChannelGains& g,
                                 std::uint32_t subset_a);

/// Empirical mean log-loss of the analytic posterior decoder vs h(X|U_K).
McReport verify_logloss_achievability(const CeoModel& m, const TestChannelGains& g,
                                      const McConfig& cfg);

/// gamma(n_x) + alpha ln det mmse(X|U_K) == h(X|U_K), analytic.
McReport verify_det_entropy_equality(const CeoModel& m, const TestChannelGains& g);

/// All reports in the order the CLI emits them.
std::vector<McReport> run_all(const CeoModel& m, const TestChannelGains& g,
                              const McConfig& cfg);

}  // namespace ceo::mc
