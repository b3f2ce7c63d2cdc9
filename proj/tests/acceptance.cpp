// Acceptance gate: one line per criterion, nonzero exit when any fails.
#include "ceo/berger_tung.hpp"
#include "ceo/monte_carlo.hpp"
#include "ceo/optimizer.hpp"
#include "ceo/quadratic.hpp"
#include "ceo/region.hpp"

#include "helpers.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

using namespace ceo;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL",
                what.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Exact minimal distortion for a K=2 subset-bound table and budget.
double alloc_k2(double f0, double f1, double f2, double f12, double r) {
    const double hi = std::max(f1, f2), lo = std::min(f1, f2);
    const double bal =
        (hi - lo <= r) ? (f1 + f2 - r) / 2.0 : std::max(hi - r, lo);
    return std::max({f0, f12 - r, bal});
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = th::random_model(2024, 2, 2, 2);
    const auto g = th::random_gains(2024, m);
    mc::McConfig cfg;
    cfg.samples = 200000;
    cfg.seed = 1;
    const auto reps = mc::verify_mmse_identity(m, g, cfg);
    double worst = 0.0;
    for (const auto& r : reps) worst = std::max(worst, r.rel_error);
    const double secs = seconds_since(t0);
    report(1, worst < 2e-2 && secs < 10.0,
           "conditional-covariance identity, rel err " + std::to_string(worst) +
               ", " + std::to_string(secs) + " s");
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = th::random_model(seed, 2, 2, 2);
        const auto g = th::random_gains(seed, m);
        for (std::uint32_t s = 0; s < 4u; ++s)
            worst = std::max(worst, mc::verify_fisher_equality(m, g, s).rel_error);
    }
    const double secs = seconds_since(t0);
    report(2, worst < 1e-9 && secs < 5.0,
           "posterior-precision dual paths, worst rel err " +
               std::to_string(worst) + ", " + std::to_string(secs) + " s");
}

void criterion_3() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = th::random_model(seed, 2, 2, 2);
        const auto g = th::random_gains(seed, m);
        for (std::uint32_t s = 0; s < 4u; ++s)
            worst =
                std::max(worst, mc::verify_entropy_sandwich(m, g, s).rel_error);
    }
    report(3, worst < 1e-9,
           "entropy sandwich tightness, worst rel err " + std::to_string(worst));
}

void criterion_4() {
    mc::McConfig cfg;
    cfg.samples = 200000;
    cfg.seed = 2;
    const auto r =
        mc::verify_logloss_achievability(th::scalar_model(), th::scalar_gains(), cfg);
    const bool analytic_ok = std::abs(r.analytic - 1.0723649) < 1e-5;
    const double rel = std::abs(r.empirical - r.analytic) / r.analytic;
    report(4, analytic_ok && rel < 0.01,
           "posterior-decoder log-loss, rel gap " + std::to_string(rel));
}

void criterion_5() {
    bool ok = true;
    double worst_margin = 1.0, worst_chain = 0.0;
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = th::random_model(seed + 300, 3, 2, 2);
        const auto g = th::random_gains(seed + 300, m);
        const double total = mutual_info_group(m, g, full_mask(3));
        for (const auto& pe : perms) {
            CornerSpec spec;
            spec.gains = g;
            spec.perm = {pe[0], pe[1], pe[2]};
            const auto p = corner_point(m, spec);
            const auto fe = is_feasible_for_gains(m, g, p);
            worst_margin = std::min(worst_margin, fe.margin);
            const double chain =
                std::abs(p.rates[0] + p.rates[1] + p.rates[2] - total);
            worst_chain = std::max(worst_chain, chain);
            ok = ok && fe.margin >= -1e-9 && chain < 1e-9;
        }
    }
    report(5, ok,
           "corner points, worst margin " + std::to_string(worst_margin) +
               ", chain gap " + std::to_string(worst_chain));
}

void criterion_6() {
    double worst = 1.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = th::random_model(seed, 2, 2, 2);
        const auto g = th::random_gains(seed, m);
        worst = std::min(worst, check_domination_k2(m, g).worst_slack);
    }
    report(6, worst >= -1e-9,
           "extreme-point domination, worst slack " + std::to_string(worst));
}

void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = th::scalar_model();
    const std::vector<double> budgets = {0.2, 0.5, 1.0, 1.5, 2.0};

    OptimizerOptions opts;
    opts.seed = 17;
    const auto tr = trace_boundary(m, budgets, opts);

    // Brute-force oracle: 400x400 grid over (w1, w2) in [0, 1]^2.
    const int n = 400;
    std::vector<double> oracle(budgets.size(), kInfRate);
    for (int i = 0; i <= n; ++i) {
        const double w1 = 0.999999 * i / n;
        const double rt1 = -0.5 * std::log1p(-w1);
        for (int j = 0; j <= n; ++j) {
            const double w2 = 0.999999 * j / n;
            const double rt2 = -0.5 * std::log1p(-w2);
            const double gamma =
                0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
            const double f0 = gamma - 0.5 * std::log(1.0 + w1 + w2);
            const double f1 = rt1 + gamma - 0.5 * std::log(1.0 + w2);
            const double f2 = rt2 + gamma - 0.5 * std::log(1.0 + w1);
            const double f12 = rt1 + rt2 + gamma;
            for (std::size_t b = 0; b < budgets.size(); ++b)
                oracle[b] =
                    std::min(oracle[b], alloc_k2(f0, f1, f2, f12, budgets[b]));
        }
    }

    double worst = 0.0;
    for (std::size_t b = 0; b < budgets.size(); ++b)
        worst = std::max(worst, std::abs(tr[b].distortion - oracle[b]));
    const double secs = seconds_since(t0);
    report(7, worst < 1e-3 && secs < 60.0,
           "traced boundary vs grid oracle, worst gap " + std::to_string(worst) +
               ", " + std::to_string(secs) + " s");
}

void criterion_8() {
    const double step = 1e-5;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = th::random_model(seed + 60, 2, 2, 2);
        const WhitenedProblem wp(m);
        const auto bs = th::random_bs(seed + 60, m, 0.15, 0.85);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        for (int k = 0; k < 2; ++k) {
            MatrixXd v = MatrixXd::NullaryExpr(2, 2, [&](int, int) { return nd(rng); });
            v = symmetrize(v);
            v /= v.norm();
            auto shifted = [&](double t) {
                auto b2 = bs;
                b2[k] += t * v;
                return b2;
            };
            const double fd_rate =
                (wp.rate_term(shifted(step), k) - wp.rate_term(shifted(-step), k)) /
                (2.0 * step);
            const double an_rate = wp.rate_term_grad(bs, k).cwiseProduct(v).sum();
            worst = std::max(worst, std::abs(fd_rate - an_rate) /
                                        std::max(1.0, std::abs(an_rate)));
            const std::uint32_t s = full_mask(2);
            const double fd_ent = (wp.cond_entropy(shifted(step), s) -
                                   wp.cond_entropy(shifted(-step), s)) /
                                  (2.0 * step);
            const double an_ent = wp.cond_entropy_grad(bs, s, k).cwiseProduct(v).sum();
            worst = std::max(worst, std::abs(fd_ent - an_ent) /
                                        std::max(1.0, std::abs(an_ent)));
        }
    }
    report(8, worst < 1e-5,
           "analytic vs finite-difference gradients, worst rel err " +
               std::to_string(worst));
}

void criterion_9() {
    const auto m = th::scalar_model();
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(2.0 * i / 19.0);
    OptimizerOptions opts;
    opts.seed = 17;
    const auto tr = trace_boundary(m, grid, opts);
    bool monotone = true;
    double min_second = 0.0;
    for (std::size_t i = 1; i < tr.size(); ++i)
        monotone = monotone && tr[i].distortion <= tr[i - 1].distortion + 1e-9;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i)
        min_second = std::min(min_second, tr[i + 1].distortion -
                                              2.0 * tr[i].distortion +
                                              tr[i - 1].distortion);
    report(9, monotone && min_second >= -1e-6,
           "boundary monotone, min second difference " +
               std::to_string(min_second));
}

void criterion_10() {
    bool ok = true;
    const auto scalar = th::scalar_model();
    // 1000 random (rates, d_q, gains) triples: the determinant check and
    // the log-loss check must agree through the affine map, margins equal.
    for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
        const auto m = th::random_model(seed, 2, 2, 2);
        const auto g = th::random_gains(seed, m);
        std::mt19937_64 rng(seed + 9001);
        std::uniform_real_distribution<double> ur(0.0, 2.0);
        std::uniform_real_distribution<double> ud(0.05, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            const std::vector<double> rates = {ur(rng), ur(rng)};
            const double d_q = ud(rng) * m.sigma_x.determinant();
            const auto det_fe = det_region_check(m, g, rates, d_q);
            RegionPoint p;
            p.rates = rates;
            p.distortion = logloss_from_det(m, d_q);
            const auto log_fe = is_feasible_for_gains(m, g, p);
            ok = ok && det_fe.feasible == log_fe.feasible &&
                 det_fe.margin == log_fe.margin;
        }
    }
    // Round trips exact to 1e-12.
    for (double d : {1e-3, 0.25, 0.5, 0.97})
        ok = ok && std::abs(det_from_logloss(
                                scalar, logloss_from_det(scalar, d)).d_q -
                            d) < 1e-12;
    // Determinant/entropy identity to 1e-9.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto m = th::random_model(seed, 2, 3, 3);
        const auto g = th::random_gains(seed, m);
        ok = ok && mc::verify_det_entropy_equality(m, g).rel_error < 1e-9;
    }
    report(10, ok, "determinant/log-loss coherence and round trips");
}

void criterion_11() {
    const std::string model = "/tmp/ceo_acceptance_scalar.json";
    {
        FILE* f = std::fopen(model.c_str(), "w");
        std::fputs(R"({"mode":"real","sigma_x":[[1.0]],
"agents":[{"H":[[1.0]],"sigma":[[1.0]]},{"H":[[1.0]],"sigma":[[1.0]]}],
"omegas":[[[0.5]],[[0.5]]]})",
                   f);
        std::fclose(f);
    }
    auto run = [&](const std::string& args) {
        const std::string cmd =
            std::string(CEO_CLI_PATH) + " " + args + " 2>/dev/null";
        std::string out;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) return out;
        std::array<char, 4096> buf;
        std::size_t n = 0;
        while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
            out.append(buf.data(), n);
        pclose(pipe);
        return out;
    };
    const std::string tr = "trace " + model + " --rmin 0 --rmax 1 --steps 3 --seed 5";
    const std::string ve = "verify " + model + " --samples 20000 --seed 5";
    const bool ok = !run(tr).empty() && run(tr + " --threads 1") == run(tr + " --threads 1") &&
                    run(tr + " --threads 1") == run(tr + " --threads 4") &&
                    run(ve + " --threads 1") == run(ve + " --threads 1") &&
                    run(ve + " --threads 1") == run(ve + " --threads 4");
    report(11, ok, "byte-identical CLI reruns across thread counts");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (failures == 0) std::printf("all 11 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
