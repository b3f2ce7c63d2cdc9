#include "ceo/monte_carlo.hpp"

#include "ceo/kernels.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ceo::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Box-Muller on explicit 64-bit uniforms: stable streams across platforms.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    void fill(VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = next();
    }

private:
    double uniform01() {
        return (rng_() >> 11) * (1.0 / 9007199254740992.0);  // [0,1) at 53 bits
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

void require_sampleable(const CeoModel& m, const TestChannelGains& g) {
    if (m.mode != Mode::Real)
        throw std::invalid_argument("sampling supports Real mode only");
    for (int k = 0; k < m.num_agents(); ++k) {
        const MatrixXd half = matrix_sqrt(m.agents[k].sigma);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(
            symmetrize(half * symmetrize(g.omegas[k]) * half),
            Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (lo < 1e-9 || hi > 1.0 - 1e-9)
            throw std::invalid_argument(
                "sampling requires strictly interior gains; omega " +
                std::to_string(k + 1) + " has whitened eigenvalues in [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

template <typename Fn>
void run_chunks(long n_chunks, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (long i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futs;
    std::atomic<long> next{0};
    for (int t = 0; t < threads; ++t)
        futs.push_back(std::async(std::launch::async, [&]() {
            for (long i = next.fetch_add(1); i < n_chunks; i = next.fetch_add(1))
                fn(i);
        }));
    for (auto& f : futs) f.get();
}

}  // namespace

SampleBatch sample_batch(const CeoModel& m, const TestChannelGains& g,
                         const McConfig& cfg) {
    require_sampleable(m, g);
    if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (cfg.chunk < 1) throw std::invalid_argument("chunk must be >= 1");

    const int K = m.num_agents();
    SampleBatch b;
    b.n_x = m.n_x;
    int off = m.n_x;
    for (int k = 0; k < K; ++k) {
        b.y_off.push_back(off);
        b.obs_dim.push_back(m.obs_dim(k));
        off += m.obs_dim(k);
    }
    for (int k = 0; k < K; ++k) {
        b.u_off.push_back(off);
        off += m.obs_dim(k);
    }
    const int d = off;
    b.zs.resize(d, cfg.samples);

    // Cholesky factors, shared across chunks.
    const MatrixXd lx = Eigen::LLT<MatrixXd>(symmetrize(m.sigma_x)).matrixL();
    std::vector<MatrixXd> ln, lq;
    for (int k = 0; k < K; ++k) {
        const int nk = m.obs_dim(k);
        ln.push_back(Eigen::LLT<MatrixXd>(symmetrize(m.agents[k].sigma)).matrixL());
        const MatrixXd omega_inv =
            symmetrize(g.omegas[k]).llt().solve(MatrixXd::Identity(nk, nk));
        // Test-channel noise covariance Q_k = Omega_k^{-1} - sigma_k.
        lq.push_back(
            Eigen::LLT<MatrixXd>(symmetrize(omega_inv - m.agents[k].sigma)).matrixL());
    }

    const long n_chunks = (cfg.samples + cfg.chunk - 1) / cfg.chunk;
    run_chunks(n_chunks, cfg.threads, [&](long ci) {
        NormalStream ns(splitmix64(cfg.seed ^ (0x5eedULL + static_cast<std::uint64_t>(ci))));
        const long begin = ci * cfg.chunk;
        const long end = std::min<long>(begin + cfg.chunk, cfg.samples);
        VectorXd gx(m.n_x);
        for (long j = begin; j < end; ++j) {
            auto col = b.zs.col(j);
            ns.fill(gx);
            col.head(m.n_x) = lx * gx;
            for (int k = 0; k < K; ++k) {
                const int nk = m.obs_dim(k);
                VectorXd gn(nk), gw(nk);
                ns.fill(gn);
                ns.fill(gw);
                col.segment(b.y_off[k], nk) =
                    m.agents[k].H * col.head(m.n_x) + ln[k] * gn;
                col.segment(b.u_off[k], nk) =
                    col.segment(b.y_off[k], nk) + lq[k] * gw;
            }
        }
    });
    return b;
}

std::pair<VectorXd, MatrixXd> sample_moments(const SampleBatch& b,
                                             const McConfig& cfg) {
    const int d = b.dim();
    const long n = b.count();
    const long n_chunks = (n + cfg.chunk - 1) / cfg.chunk;
    std::vector<VectorXd> sums(n_chunks, VectorXd::Zero(d));
    std::vector<MatrixXd> outers(n_chunks, MatrixXd::Zero(d, d));
    const auto kernel = kernels::active_kernel();
    run_chunks(n_chunks, cfg.threads, [&](long ci) {
        const long begin = ci * cfg.chunk;
        const long count = std::min<long>(cfg.chunk, n - begin);
        kernel(b.zs.data() + begin * d, d, count, sums[ci].data(),
               outers[ci].data());
    });
    // Pairwise merge in chunk order: independent of scheduling.
    for (long stride = 1; stride < n_chunks; stride *= 2) {
        for (long i = 0; i + stride < n_chunks; i += 2 * stride) {
            sums[i] += sums[i + stride];
            outers[i] += outers[i + stride];
        }
    }
    const VectorXd mean = sums[0] / static_cast<double>(n);
    MatrixXd cov = outers[0] / static_cast<double>(n) - mean * mean.transpose();
    return {mean, symmetrize(cov)};
}

namespace {

// Schur complement of block `target` given block `given` of a covariance.
MatrixXd schur(const MatrixXd& cov, const std::vector<int>& target,
               const std::vector<int>& given, bool* ok = nullptr) {
    MatrixXd s_tt(target.size(), target.size());
    MatrixXd s_tg(target.size(), given.size());
    MatrixXd s_gg(given.size(), given.size());
    for (std::size_t i = 0; i < target.size(); ++i)
        for (std::size_t j = 0; j < target.size(); ++j)
            s_tt(i, j) = cov(target[i], target[j]);
    for (std::size_t i = 0; i < target.size(); ++i)
        for (std::size_t j = 0; j < given.size(); ++j)
            s_tg(i, j) = cov(target[i], given[j]);
    for (std::size_t i = 0; i < given.size(); ++i)
        for (std::size_t j = 0; j < given.size(); ++j)
            s_gg(i, j) = cov(given[i], given[j]);
    if (given.empty()) {
        if (ok) *ok = true;
        return s_tt;
    }
    Eigen::LDLT<MatrixXd> ldlt(symmetrize(s_gg));
    const MatrixXd sol = ldlt.solve(s_tg.transpose());
    const MatrixXd out = symmetrize(s_tt - s_tg * sol);
    if (ok) *ok = ldlt.info() == Eigen::Success && out.allFinite();
    return out;
}

std::vector<int> range_idx(int off, int len) {
    std::vector<int> v(len);
    for (int i = 0; i < len; ++i) v[i] = off + i;
    return v;
}

double rel_frob(const MatrixXd& emp, const MatrixXd& ana) {
    const double denom = ana.norm();
    if (denom < 1e-300) return emp.norm();
    return (emp - ana).norm() / denom;
}

}  // namespace

std::vector<McReport> verify_mmse_identity(const CeoModel& m,
                                           const TestChannelGains& g,
                                           const McConfig& cfg) {
    const auto batch = sample_batch(m, g, cfg);
    const auto [mean, cov] = sample_moments(batch, cfg);
    (void)mean;
    std::vector<McReport> out;
    for (int k = 0; k < m.num_agents(); ++k) {
        const int nk = batch.obs_dim[k];
        auto target = range_idx(batch.y_off[k], nk);
        auto given = range_idx(0, batch.n_x);
        const auto uk = range_idx(batch.u_off[k], nk);
        given.insert(given.end(), uk.begin(), uk.end());
        bool ok = false;
        const MatrixXd emp = schur(cov, target, given, &ok);
        const MatrixXd ana =
            m.agents[k].sigma - m.agents[k].sigma * g.omegas[k] * m.agents[k].sigma;
        McReport r;
        r.name = "mmse_identity_agent" + std::to_string(k + 1);
        r.analytic_mat = ana;
        r.empirical_mat = emp;
        r.analytic = ana.norm();
        r.empirical = emp.norm();
        r.rel_error = rel_frob(emp, ana);
        r.samples = cfg.samples;
        r.seed = cfg.seed;
        if (!ok) {
            r.flagged = true;
            r.note = "ill-conditioned sample covariance";
        }
        out.push_back(std::move(r));
    }
    return out;
}

McReport verify_fisher_equality(const CeoModel& m, const TestChannelGains& g,
                                std::uint32_t subset_s) {
    const int K = m.num_agents();
    const std::uint32_t comp = full_mask(K) & ~subset_s;
    const MatrixXd j_acc = posterior_precision(m, g, comp);

    const MatrixXd cov = joint_covariance(m, g);
    std::vector<int> given;
    for (int k = 0; k < K; ++k) {
        if (!in_subset(comp, k)) continue;
        const auto idx = range_idx(u_offset(m, k), m.obs_dim(k));
        given.insert(given.end(), idx.begin(), idx.end());
    }
    const MatrixXd mmse = schur(cov, range_idx(0, m.n_x), given);
    const MatrixXd j_schur =
        symmetrize(mmse).llt().solve(MatrixXd::Identity(m.n_x, m.n_x));

    McReport r;
    r.name = "fisher_equality_mask" + std::to_string(comp);
    r.analytic_mat = j_acc;
    r.empirical_mat = j_schur;
    r.analytic = j_acc.norm();
    r.empirical = j_schur.norm();
    r.rel_error = rel_frob(j_schur, j_acc);
    return r;
}

McReport verify_entropy_sandwich(const CeoModel& m, const TestChannelGains& g,
                                 std::uint32_t subset_a) {
    const auto c = m.convention();
    const MatrixXd j = posterior_precision(m, g, subset_a);
    const double lower = c.gamma(m.n_x) - c.alpha * log_det(j);
    const double entropy = cond_entropy_given(m, g, subset_a);

    MatrixXd mmse;
    if (subset_a == 0) {
        mmse = m.sigma_x;
    } else {
        const MatrixXd cov = joint_covariance(m, g);
        std::vector<int> given;
        for (int k = 0; k < m.num_agents(); ++k) {
            if (!in_subset(subset_a, k)) continue;
            const auto idx = range_idx(u_offset(m, k), m.obs_dim(k));
            given.insert(given.end(), idx.begin(), idx.end());
        }
        mmse = schur(cov, range_idx(0, m.n_x), given);
    }
    const double upper = c.gamma(m.n_x) + c.alpha * log_det(symmetrize(mmse));

    McReport r;
    r.name = "entropy_sandwich_mask" + std::to_string(subset_a);
    r.analytic = entropy;
    r.empirical = 0.5 * (lower + upper);
    r.rel_error = std::max({std::abs(lower - entropy), std::abs(upper - entropy),
                            std::abs(upper - lower)});
    return r;
}

McReport verify_logloss_achievability(const CeoModel& m, const TestChannelGains& g,
                                      const McConfig& cfg) {
    const auto batch = sample_batch(m, g, cfg);
    const int K = m.num_agents();
    const int n_x = m.n_x;

    // Analytic posterior of X given (U_1..U_K): mean A u, precision J_K.
    const MatrixXd cov = joint_covariance(m, g);
    const int du = joint_dim(m) - n_x;
    const MatrixXd c_xu = cov.topRightCorner(n_x, du);
    const MatrixXd c_uu = cov.bottomRightCorner(du, du);
    const MatrixXd coeff = symmetrize(c_uu).llt().solve(c_xu.transpose()).transpose();
    const MatrixXd j = posterior_precision(m, g, full_mask(K));
    const double log_det_j = log_det(j);
    const double const_term =
        0.5 * n_x * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_j;

    const long n = cfg.samples;
    const long n_chunks = (n + cfg.chunk - 1) / cfg.chunk;
    std::vector<double> sum_loss(n_chunks, 0.0), sum_loss2(n_chunks, 0.0);
    run_chunks(n_chunks, cfg.threads, [&](long ci) {
        const long begin = ci * cfg.chunk;
        const long end = std::min<long>(begin + cfg.chunk, n);
        VectorXd u(du), e(n_x);
        for (long s = begin; s < end; ++s) {
            const auto col = batch.zs.col(s);
            // U block is contiguous at the tail of the batch layout.
            u = col.tail(du);
            e = col.head(n_x) - coeff * u;
            const double loss = const_term + 0.5 * e.dot(j * e);
            sum_loss[ci] += loss;
            sum_loss2[ci] += loss * loss;
        }
    });
    for (long stride = 1; stride < n_chunks; stride *= 2) {
        for (long i = 0; i + stride < n_chunks; i += 2 * stride) {
            sum_loss[i] += sum_loss[i + stride];
            sum_loss2[i] += sum_loss2[i + stride];
        }
    }
    const double mean = sum_loss[0] / static_cast<double>(n);
    const double var =
        std::max(0.0, sum_loss2[0] / static_cast<double>(n) - mean * mean);

    McReport r;
    r.name = "logloss_achievability";
    r.analytic = cond_entropy_given(m, g, full_mask(K));
    r.empirical = mean;
    r.rel_error = std::abs(mean - r.analytic) / std::abs(r.analytic);
    r.samples = n;
    r.seed = cfg.seed;
    r.std_error = std::sqrt(var / static_cast<double>(n));
    return r;
}

McReport verify_det_entropy_equality(const CeoModel& m, const TestChannelGains& g) {
    const auto c = m.convention();
    const int K = m.num_agents();
    const MatrixXd j = posterior_precision(m, g, full_mask(K));
    const MatrixXd mmse = j.llt().solve(MatrixXd::Identity(m.n_x, m.n_x));
    const double lhs = c.gamma(m.n_x) + c.alpha * log_det(symmetrize(mmse));
    const double rhs = cond_entropy_given(m, g, full_mask(K));
    McReport r;
    r.name = "det_entropy_equality";
    r.analytic = rhs;
    r.empirical = lhs;
    r.rel_error = std::abs(lhs - rhs);
    return r;
}

std::vector<McReport> run_all(const CeoModel& m, const TestChannelGains& g,
                              const McConfig& cfg) {
    std::vector<McReport> out;
    for (auto& r : verify_mmse_identity(m, g, cfg)) out.push_back(std::move(r));
    const int K = m.num_agents();
    for (std::uint32_t s = 0; s <= full_mask(K); ++s) {
        auto r = verify_fisher_equality(m, g, s);
        r.samples = 0;
        r.seed = cfg.seed;
        out.push_back(std::move(r));
    }
    for (std::uint32_t a = 0; a <= full_mask(K); ++a) {
        auto r = verify_entropy_sandwich(m, g, a);
        r.seed = cfg.seed;
        out.push_back(std::move(r));
    }
    out.push_back(verify_logloss_achievability(m, g, cfg));
    auto det = verify_det_entropy_equality(m, g);
    det.seed = cfg.seed;
    out.push_back(std::move(det));
    return out;
}

}  // namespace ceo::mc
