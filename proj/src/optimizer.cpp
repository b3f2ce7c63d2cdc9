#include "ceo/optimizer.hpp"

#include "ceo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

namespace ceo {

namespace {
constexpr double kBoxEdge = 1e-9;  // keep rate terms finite inside the box

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

WhitenedProblem::WhitenedProblem(const CeoModel& m) : model(&m) {
    const auto c = m.convention();
    alpha = c.alpha;
    gamma_nx = c.gamma(m.n_x);
    sigma_x_inv =
        symmetrize(m.sigma_x).llt().solve(MatrixXd::Identity(m.n_x, m.n_x));
    for (const auto& a : m.agents) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(a.sigma));
        const MatrixXd inv_sqrt =
            es.eigenvectors() *
            es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
            es.eigenvectors().transpose();
        ms.push_back(inv_sqrt * a.H);
    }
}

double WhitenedProblem::rate_term(const std::vector<MatrixXd>& bs, int k) const {
    const MatrixXd a = MatrixXd::Identity(bs[k].rows(), bs[k].cols()) - bs[k];
    const double det = a.determinant();
    if (det <= 1e-14) return kInfRate;
    return -alpha * std::log(det);
}

MatrixXd WhitenedProblem::rate_term_grad(const std::vector<MatrixXd>& bs,
                                         int k) const {
    const MatrixXd a = MatrixXd::Identity(bs[k].rows(), bs[k].cols()) - bs[k];
    return alpha * a.inverse();
}

MatrixXd WhitenedProblem::precision(const std::vector<MatrixXd>& bs,
                                    std::uint32_t subset) const {
    MatrixXd j = sigma_x_inv;
    for (int k = 0; k < num_agents(); ++k)
        if (in_subset(subset, k)) j += ms[k].transpose() * bs[k] * ms[k];
    return symmetrize(j);
}

double WhitenedProblem::cond_entropy(const std::vector<MatrixXd>& bs,
                                     std::uint32_t subset) const {
    return gamma_nx - alpha * log_det(precision(bs, subset));
}

MatrixXd WhitenedProblem::cond_entropy_grad(const std::vector<MatrixXd>& bs,
                                            std::uint32_t subset, int k) const {
    if (!in_subset(subset, k))
        return MatrixXd::Zero(bs[k].rows(), bs[k].cols());
    const MatrixXd j_inv =
        precision(bs, subset).llt().solve(MatrixXd::Identity(
            sigma_x_inv.rows(), sigma_x_inv.cols()));
    return -alpha * (ms[k] * j_inv * ms[k].transpose());
}

TestChannelGains WhitenedProblem::gains(const std::vector<MatrixXd>& bs) const {
    return TestChannelGains::from_whitened(*model, bs);
}

std::vector<MatrixXd> project_box(const std::vector<MatrixXd>& bs) {
    std::vector<MatrixXd> out;
    out.reserve(bs.size());
    for (const auto& b : bs) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(b));
        const Eigen::VectorXd ev =
            es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0 - kBoxEdge);
        out.push_back(symmetrize(es.eigenvectors() * ev.asDiagonal() *
                                 es.eigenvectors().transpose()));
    }
    return out;
}

InnerAllocation inner_allocation(const SubsetBoundTable& t, double r_sum) {
    const int K = t.num_agents;
    if (K > 8)
        throw std::invalid_argument("inner allocation LP limited to K <= 8");

    InnerAllocation out;
    out.rates.assign(K, 0.0);
    const double floor = t.f[0];  // S = empty: D >= h(X | U_{1..K})
    for (std::uint32_t s = 0; s < t.size(); ++s) {
        if (std::isinf(t.f[s])) {
            out.distortion = kInfRate;  // no finite rate vector can satisfy S
            return out;
        }
    }

    // Stage 1, variables (R_1..R_K, u) with D = floor + u:
    // minimize u s.t. u + sum_{k in S} R_k >= f(S) - floor, sum R <= r_sum.
    const int n = K + 1;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(K) = 1.0;
    std::vector<lp::Constraint> cons;
    for (std::uint32_t s = 1; s < t.size(); ++s) {
        lp::Constraint cc;
        cc.a = Eigen::VectorXd::Zero(n);
        for (int v = 0; v < K; ++v)
            if (in_subset(s, v)) cc.a(v) = 1.0;
        cc.a(K) = 1.0;
        cc.rel = lp::Relation::Ge;
        cc.b = t.f[s] - floor;
        cons.push_back(cc);
    }
    {
        lp::Constraint cc;
        cc.a = Eigen::VectorXd::Zero(n);
        cc.a.head(K).setOnes();
        cc.rel = lp::Relation::Le;
        cc.b = r_sum;
        cons.push_back(cc);
    }
    const auto res = lp::solve_min(c, cons);
    if (!res.feasible)
        throw std::runtime_error("inner allocation LP unexpectedly infeasible");
    const double objective = res.objective;

    // Stage 2: the optimal face is often degenerate (the distortion floor
    // binds) and a single vertex is an arbitrary asymmetric pick, which
    // breaks symmetry for the alternating gains/rates scheme. Pick the
    // most balanced optimal rate vector: with u fixed at the optimum,
    // minimize max_k R_k over (R_1..R_K, tau).
    {
        Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n);
        c2(K) = 1.0;
        std::vector<lp::Constraint> cons2;
        for (std::uint32_t s = 1; s < t.size(); ++s) {
            lp::Constraint cc;
            cc.a = Eigen::VectorXd::Zero(n);
            for (int v = 0; v < K; ++v)
                if (in_subset(s, v)) cc.a(v) = 1.0;
            cc.rel = lp::Relation::Ge;
            // Tiny slack absorbs roundoff between the two solves.
            cc.b = t.f[s] - floor - objective - 1e-10;
            cons2.push_back(cc);
        }
        {
            lp::Constraint cc;
            cc.a = Eigen::VectorXd::Zero(n);
            cc.a.head(K).setOnes();
            cc.rel = lp::Relation::Le;
            cc.b = r_sum;
            cons2.push_back(cc);
        }
        for (int k = 0; k < K; ++k) {
            lp::Constraint cc;
            cc.a = Eigen::VectorXd::Zero(n);
            cc.a(k) = 1.0;
            cc.a(K) = -1.0;
            cc.rel = lp::Relation::Le;
            cc.b = 0.0;
            cons2.push_back(cc);
        }
        const auto res2 = lp::solve_min(c2, cons2);
        const Eigen::VectorXd& x = res2.feasible ? res2.x : res.x;
        for (int v = 0; v < K; ++v) out.rates[v] = std::max(0.0, x(v));
    }
    // Spend the whole budget: surplus only loosens the constraints, so the
    // optimal value is unchanged and degenerate vertices are avoided.
    if (std::isfinite(r_sum)) {
        double spent = 0.0;
        for (double r : out.rates) spent += r;
        const double surplus = r_sum - spent;
        if (surplus > 0.0)
            for (int k = 0; k < K; ++k) out.rates[k] += surplus / K;
    }
    out.distortion = floor + objective;
    return out;
}

InnerAllocation inner_allocation(const CeoModel& m, const TestChannelGains& g,
                                 double r_sum) {
    return inner_allocation(subset_bounds(m, g), r_sum);
}

namespace {

struct SmoothedEval {
    double value;
    std::vector<MatrixXd> grad;
};

// Subset-bound values f(S) - R(S) in whitened coordinates.
std::vector<double> bound_values(const WhitenedProblem& wp,
                                 const std::vector<MatrixXd>& bs,
                                 const std::vector<double>& rates) {
    const int K = wp.num_agents();
    std::vector<double> rt(K);
    for (int k = 0; k < K; ++k) rt[k] = wp.rate_term(bs, k);
    const std::uint32_t n = 1u << K;
    std::vector<double> v(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        double x = wp.cond_entropy(bs, full_mask(K) & ~s);
        for (int k = 0; k < K; ++k)
            if (in_subset(s, k)) x += rt[k] - rates[k];
        v[s] = x;
    }
    return v;
}

double true_objective(const WhitenedProblem& wp, const std::vector<MatrixXd>& bs,
                      const std::vector<double>& rates) {
    const auto v = bound_values(wp, bs, rates);
    return *std::max_element(v.begin(), v.end());
}

// Log-sum-exp smoothed max of the subset bounds at temperature temp,
// with its gradient in B coordinates.
SmoothedEval smoothed_objective(const WhitenedProblem& wp,
                                const std::vector<MatrixXd>& bs,
                                const std::vector<double>& rates, double temp,
                                bool want_grad) {
    const int K = wp.num_agents();
    const auto v = bound_values(wp, bs, rates);
    const double vmax = *std::max_element(v.begin(), v.end());
    double z = 0.0;
    for (double x : v) z += std::exp(temp * (x - vmax));
    SmoothedEval out;
    out.value = vmax + std::log(z) / temp;
    if (!want_grad) return out;

    const std::uint32_t n = 1u << K;
    std::vector<double> w(n);
    for (std::uint32_t s = 0; s < n; ++s) w[s] = std::exp(temp * (v[s] - vmax)) / z;

    out.grad.resize(K);
    for (int k = 0; k < K; ++k)
        out.grad[k] = MatrixXd::Zero(bs[k].rows(), bs[k].cols());
    std::vector<MatrixXd> rt_grad(K);
    for (int k = 0; k < K; ++k) rt_grad[k] = wp.rate_term_grad(bs, k);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (w[s] < 1e-300) continue;
        const std::uint32_t comp = full_mask(K) & ~s;
        for (int k = 0; k < K; ++k) {
            if (in_subset(s, k))
                out.grad[k] += w[s] * rt_grad[k];
            else
                out.grad[k] += w[s] * wp.cond_entropy_grad(bs, comp, k);
        }
    }
    return out;
}

double grad_norm(const std::vector<MatrixXd>& g) {
    double s = 0.0;
    for (const auto& m : g) s += m.squaredNorm();
    return std::sqrt(s);
}

struct StartResult {
    std::vector<MatrixXd> bs;
    double objective = kInfRate;
    bool converged = false;
    int iterations = 0;
};

// Projected gradient with backtracking over a temperature schedule.
// refresh_rates, when set, recomputes the rate split by the exact LP as
// the gains move (boundary tracing); otherwise the rates stay fixed
// (membership test).
StartResult run_start(const WhitenedProblem& wp, std::vector<MatrixXd> bs,
                      std::vector<double> rates, double r_sum, bool refresh_rates,
                      const OptimizerOptions& opts) {
    const int stage_iters =
        std::max(1, opts.max_iters / static_cast<int>(opts.temperatures.size()));
    StartResult out;
    out.converged = true;
    for (double temp : opts.temperatures) {
        bool stage_done = false;
        double prev_val = kInfRate;
        int stall = 0;
        for (int it = 0; it < stage_iters; ++it) {
            if (refresh_rates && it % 50 == 0) {
                rates = inner_allocation(*wp.model, wp.gains(bs), r_sum).rates;
                prev_val = kInfRate;
            }
            auto ev = smoothed_objective(wp, bs, rates, temp, true);
            if (prev_val - ev.value < 1e-11 && ++stall >= 5) {
                stage_done = true;
                break;
            }
            if (prev_val - ev.value >= 1e-11) stall = 0;
            prev_val = ev.value;
            const double gn = grad_norm(ev.grad);
            if (gn < 1e-12) {
                stage_done = true;
                break;
            }
            double step = opts.step0;
            std::vector<MatrixXd> cand;
            double cand_val = kInfRate;
            double moved = 0.0;
            while (step > 1e-13) {
                std::vector<MatrixXd> trial(bs.size());
                for (std::size_t k = 0; k < bs.size(); ++k)
                    trial[k] = bs[k] - step * ev.grad[k];
                trial = project_box(trial);
                moved = 0.0;
                for (std::size_t k = 0; k < bs.size(); ++k)
                    moved += (trial[k] - bs[k]).squaredNorm();
                moved = std::sqrt(moved);
                const double val =
                    smoothed_objective(wp, trial, rates, temp, false).value;
                if (val <= ev.value - 1e-4 * gn * moved) {
                    cand = std::move(trial);
                    cand_val = val;
                    break;
                }
                step *= 0.5;
            }
            ++out.iterations;
            if (cand.empty() || moved < 1e-11) {
                stage_done = true;
                break;
            }
            bs = std::move(cand);
            (void)cand_val;
        }
        if (!stage_done) out.converged = false;
    }
    if (refresh_rates) {
        const auto alloc = inner_allocation(*wp.model, wp.gains(bs), r_sum);
        out.objective = alloc.distortion;
    } else {
        out.objective = true_objective(wp, bs, rates);
    }
    out.bs = std::move(bs);
    return out;
}

// Derivative-free polish on the exact objective: pattern search over the
// symmetric entries of every B_k with a shrinking step, accept-first in a
// fixed order. Direction set is all single entries plus all signed pairs,
// so diagonal valleys of the piecewise-smooth objective are followed too.
// Deterministic.
template <typename ObjectiveFn>
void compass_polish(std::vector<MatrixXd>& bs, const ObjectiveFn& objective) {
    struct Coord {
        int k, i, j;
    };
    std::vector<Coord> coords;
    for (std::size_t k = 0; k < bs.size(); ++k)
        for (int i = 0; i < bs[k].rows(); ++i)
            for (int j = i; j < bs[k].cols(); ++j)
                coords.push_back({static_cast<int>(k), i, j});
    const int p = static_cast<int>(coords.size());

    auto bump = [](std::vector<MatrixXd>& b, const Coord& c, double d) {
        b[c.k](c.i, c.j) += d;
        if (c.i != c.j) b[c.k](c.j, c.i) += d;
    };

    double best = objective(bs);
    for (double delta = 0.05; delta > 2e-7; delta *= 0.5) {
        bool improved = true;
        int sweeps = 0;
        while (improved && sweeps++ < 12) {
            improved = false;
            for (int a = 0; a < p && !improved; ++a) {
                for (double sa : {+1.0, -1.0}) {
                    auto trial = bs;
                    bump(trial, coords[a], sa * delta);
                    trial = project_box(trial);
                    const double val = objective(trial);
                    if (val < best - 1e-14) {
                        best = val;
                        bs = std::move(trial);
                        improved = true;
                        break;
                    }
                }
            }
            for (int a = 0; a < p && !improved; ++a) {
                for (int b = a + 1; b < p && !improved; ++b) {
                    for (double sa : {+1.0, -1.0}) {
                        for (double sb : {+1.0, -1.0}) {
                            auto trial = bs;
                            bump(trial, coords[a], sa * delta);
                            bump(trial, coords[b], sb * delta);
                            trial = project_box(trial);
                            const double val = objective(trial);
                            if (val < best - 1e-14) {
                                best = val;
                                bs = std::move(trial);
                                improved = true;
                                break;
                            }
                        }
                        if (improved) break;
                    }
                }
            }
        }
    }
}

std::vector<std::vector<MatrixXd>> make_starts(const CeoModel& m,
                                               const OptimizerOptions& opts) {
    const int K = m.num_agents();
    std::vector<std::vector<MatrixXd>> starts;
    auto uniform_b = [&](double v) {
        std::vector<MatrixXd> bs;
        for (int k = 0; k < K; ++k)
            bs.push_back(v * MatrixXd::Identity(m.obs_dim(k), m.obs_dim(k)));
        return bs;
    };
    starts.push_back(uniform_b(0.0));
    if (opts.num_starts > 1) starts.push_back(uniform_b(0.5));
    if (opts.num_starts > 2) starts.push_back(uniform_b(1.0 - 1e-3));
    for (int i = 3; i < opts.num_starts; ++i) {
        std::mt19937_64 rng(splitmix64(opts.seed ^ (0xabcdULL + i)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> norm(0.0, 1.0);
        std::vector<MatrixXd> bs;
        for (int k = 0; k < K; ++k) {
            const int nk = m.obs_dim(k);
            MatrixXd a(nk, nk);
            for (int r = 0; r < nk; ++r)
                for (int c = 0; c < nk; ++c) a(r, c) = norm(rng);
            const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(a).householderQ();
            Eigen::VectorXd ev(nk);
            for (int r = 0; r < nk; ++r) ev(r) = unif(rng);
            bs.push_back(symmetrize(q * ev.asDiagonal() * q.transpose()));
        }
        starts.push_back(std::move(bs));
    }
    return starts;
}

// Runs every start (optionally in parallel) and picks the best objective,
// lowest start index winning ties.
StartResult best_over_starts(const WhitenedProblem& wp,
                             std::vector<std::vector<MatrixXd>> starts,
                             const std::vector<double>& rates, double r_sum,
                             bool refresh_rates, const OptimizerOptions& opts) {
    std::vector<StartResult> results(starts.size());
    if (opts.threads > 1) {
        std::vector<std::future<StartResult>> futs;
        for (auto& s : starts)
            futs.push_back(std::async(std::launch::async, [&, s]() {
                return run_start(wp, s, rates, r_sum, refresh_rates, opts);
            }));
        for (std::size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < starts.size(); ++i)
            results[i] = run_start(wp, starts[i], rates, r_sum, refresh_rates, opts);
    }
    StartResult best;
    int total_iters = 0;
    bool all_converged = true;
    for (const auto& r : results) {
        total_iters += r.iterations;
        all_converged = all_converged && r.converged;
        if (r.objective < best.objective) best = r;
    }
    best.iterations = total_iters;
    best.converged = all_converged;
    return best;
}

}  // namespace

std::vector<TracePoint> trace_boundary(const CeoModel& m,
                                       const std::vector<double>& r_grid,
                                       const OptimizerOptions& opts) {
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (r_grid[i] < 0.0)
            throw std::invalid_argument("sum-rate budgets must be nonnegative");
        if (i > 0 && r_grid[i] < r_grid[i - 1])
            throw std::invalid_argument("sum-rate budgets must be nondecreasing");
    }
    const WhitenedProblem wp(m);
    std::vector<TracePoint> out;
    std::vector<MatrixXd> warm;
    for (double r_sum : r_grid) {
        auto starts = make_starts(m, opts);
        if (!warm.empty()) starts.push_back(warm);  // previous grid optimum
        auto best = best_over_starts(wp, std::move(starts), {}, r_sum, true, opts);
        const double pre_polish = best.objective;
        compass_polish(best.bs, [&](const std::vector<MatrixXd>& bs) {
            return inner_allocation(m, wp.gains(bs), r_sum).distortion;
        });
        warm = best.bs;

        TracePoint tp;
        tp.r_sum = r_sum;
        tp.gains = wp.gains(best.bs);
        const auto alloc = inner_allocation(m, tp.gains, r_sum);
        tp.distortion = alloc.distortion;
        tp.rates = alloc.rates;
        // Converged when the gradient stages reached stationarity or the
        // polish only had to make a negligible correction.
        tp.converged = best.converged || (pre_polish - tp.distortion) < 1e-5;
        tp.iterations = best.iterations;
        out.push_back(std::move(tp));
    }
    return out;
}

MembershipVerdict membership(const CeoModel& m, const RegionPoint& p,
                             const OptimizerOptions& opts) {
    const WhitenedProblem wp(m);
    auto best = best_over_starts(wp, make_starts(m, opts), p.rates, 0.0, false, opts);
    compass_polish(best.bs, [&](const std::vector<MatrixXd>& bs) {
        return true_objective(wp, bs, p.rates);
    });
    best.objective = true_objective(wp, best.bs, p.rates);
    MembershipVerdict v;
    v.margin = p.distortion - best.objective;
    v.achievable = v.margin >= -1e-6;
    if (v.achievable) v.gains = wp.gains(best.bs);
    return v;
}

}  // namespace ceo
