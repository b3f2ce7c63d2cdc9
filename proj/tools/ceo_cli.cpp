#include "ceo/berger_tung.hpp"
#include "ceo/model_io.hpp"
#include "ceo/monte_carlo.hpp"
#include "ceo/optimizer.hpp"
#include "ceo/quadratic.hpp"
#include "ceo/region.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNoConverge = 4;
constexpr int kExitToleranceBreach = 5;

std::string fmt6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double display(double nats, bool bits) {
    return bits ? nats / std::numbers::ln2 : nats;
}

struct LoadedInstance {
    ceo::CeoModel model;
    ceo::TestChannelGains gains;
};

// Gains come from the omegas file when given, else from the model file.
LoadedInstance load_instance(const std::string& model_path,
                             const std::string& omegas_path, bool need_gains) {
    const auto mf = ceo::io::load_model_file(model_path);
    LoadedInstance li;
    li.model = mf.model;
    if (!omegas_path.empty()) {
        li.gains = ceo::io::load_omegas_file(omegas_path);
    } else if (mf.omegas) {
        li.gains = *mf.omegas;
    } else if (need_gains) {
        throw ceo::io::ParseError(
            "no gains: pass an omegas file or an \"omegas\" key in the model");
    }
    const auto violations = ceo::validate_model(li.model);
    if (!violations.empty()) {
        std::ostringstream os;
        for (const auto& v : violations) os << v << "\n";
        throw std::domain_error(os.str());
    }
    if (need_gains) {
        const auto gv = ceo::validate_gains(li.model, li.gains);
        if (!gv.empty()) {
            std::ostringstream os;
            for (const auto& v : gv) os << v << "\n";
            throw std::domain_error(os.str());
        }
    }
    return li;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    // Precedence: flag > CEO_SEED env > default 0.
    if (flag) return *flag;
    if (const char* env = std::getenv("CEO_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw ceo::io::ParseError("CEO_SEED is not an unsigned integer");
        }
    }
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& omegas_path,
                 bool bits) {
    const auto li = load_instance(model_path, omegas_path, true);
    const auto t = ceo::subset_bounds(li.model, li.gains);
    std::ostringstream os;
    os << "subset_mask,rate_sum_term,cond_entropy_term,f_value\n";
    for (std::uint32_t s = 0; s < t.size(); ++s)
        os << s << ',' << fmt6(display(t.rate_sum_term[s], bits)) << ','
           << fmt6(display(t.cond_entropy_term[s], bits)) << ','
           << fmt6(display(t.f[s], bits)) << '\n';
    std::cout << os.str();
    return kExitOk;
}

int cmd_corners(const std::string& model_path, const std::string& omegas_path,
                const std::string& perm_str, bool bits) {
    const auto li = load_instance(model_path, omegas_path, true);
    const int K = li.model.num_agents();
    ceo::CornerSpec spec;
    spec.gains = li.gains;
    if (perm_str.empty()) {
        for (int k = 0; k < K; ++k) spec.perm.push_back(k);
    } else {
        std::stringstream ss(perm_str);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            int v = 0;
            try {
                v = std::stoi(tok);
            } catch (...) {
                throw ceo::io::ParseError("--perm: not an integer: " + tok);
            }
            spec.perm.push_back(v - 1);  // 1-based on the command line
        }
    }
    ceo::RegionPoint p;
    try {
        p = ceo::corner_point(li.model, spec);
    } catch (const std::invalid_argument& e) {
        throw ceo::io::ParseError(e.what());
    }
    std::ostringstream os;
    for (int k = 0; k < K; ++k) os << "r_" << (k + 1) << ',';
    os << "distortion\n";
    for (int k = 0; k < K; ++k) os << fmt6(display(p.rates[k], bits)) << ',';
    os << fmt6(display(p.distortion, bits)) << '\n';
    std::cout << os.str();
    return kExitOk;
}

int cmd_trace(const std::string& model_path, double rmin, double rmax, int steps,
              int starts, std::uint64_t seed, int threads, bool quadratic,
              bool strict, bool bits) {
    if (steps < 1) throw ceo::io::ParseError("--steps must be >= 1");
    if (rmin > rmax) throw ceo::io::ParseError("--rmin must be <= --rmax");
    const auto li = load_instance(model_path, "", false);

    std::vector<double> grid;
    for (int i = 0; i < steps; ++i)
        grid.push_back(steps == 1 ? rmin
                                  : rmin + (rmax - rmin) * i / (steps - 1.0));

    ceo::OptimizerOptions opts;
    opts.num_starts = starts;
    opts.seed = seed;
    opts.threads = threads;
    const auto trace = ceo::trace_boundary(li.model, grid, opts);

    bool any_unconverged = false;
    std::ostringstream os;
    os << "r_sum,distortion,converged\n";
    for (const auto& tp : trace) {
        double d = tp.distortion;
        if (quadratic) d = ceo::det_from_logloss(li.model, d).d_q;
        else d = display(d, bits);
        os << fmt6(display(tp.r_sum, bits)) << ',' << fmt6(d) << ','
           << (tp.converged ? 1 : 0) << '\n';
        any_unconverged = any_unconverged || !tp.converged;
    }
    std::cout << os.str();
    if (strict && any_unconverged) {
        std::cerr << "error: some grid points did not converge\n";
        return kExitNoConverge;
    }
    return kExitOk;
}

int cmd_verify(const std::string& model_path, const std::string& omegas_path,
               long samples, std::uint64_t seed, int threads) {
    if (samples < 1000)
        throw ceo::io::ParseError("--samples below the minimum of 1000");
    const auto li = load_instance(model_path, omegas_path, true);
    if (li.model.mode != ceo::Mode::Real)
        throw std::domain_error("verify supports Real-mode models only");

    ceo::mc::McConfig cfg;
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.threads = threads;
    const auto reports = ceo::mc::run_all(li.model, li.gains, cfg);

    bool breach = false;
    std::ostringstream os;
    os << "name,analytic,empirical,rel_error,samples,seed\n";
    for (const auto& r : reports) {
        const bool sampling = r.samples > 0;
        const double tol = sampling ? 2e-2 : 1e-9;
        if (r.rel_error > tol || r.flagged) breach = true;
        os << r.name << ',' << fmt6(r.analytic) << ',' << fmt6(r.empirical) << ','
           << fmt6(r.rel_error) << ',' << r.samples << ',' << r.seed << '\n';
    }
    std::cout << os.str();
    return breach ? kExitToleranceBreach : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vector Gaussian CEO rate-distortion region toolkit"};
    app.require_subcommand(1);

    std::string model_path, omegas_path, perm_str;
    bool bits = false, quadratic = false, strict = false;
    double rmin = 0.0, rmax = 2.0;
    int steps = 10, starts = 8, threads = 1;
    long samples = 200000;
    std::optional<std::uint64_t> seed_flag;

    auto* ev = app.add_subcommand("evaluate", "Subset bounds for fixed gains");
    ev->add_option("model", model_path, "model JSON file")->required();
    ev->add_option("omegas", omegas_path, "gains JSON file");
    ev->add_flag("--bits", bits, "display values in bits");

    auto* co = app.add_subcommand("corners", "Successive-decoding corner point");
    co->add_option("model", model_path, "model JSON file")->required();
    co->add_option("omegas", omegas_path, "gains JSON file");
    co->add_option("--perm", perm_str, "decoding order, e.g. 2,1 (1-based)");
    co->add_flag("--bits", bits, "display values in bits");

    auto* tr = app.add_subcommand("trace", "Distortion/sum-rate boundary");
    tr->add_option("model", model_path, "model JSON file")->required();
    tr->add_option("--rmin", rmin, "lowest sum-rate budget");
    tr->add_option("--rmax", rmax, "highest sum-rate budget");
    tr->add_option("--steps", steps, "number of grid points");
    tr->add_option("--starts", starts, "optimizer multi-starts");
    tr->add_option("--seed", seed_flag, "random seed");
    tr->add_option("--threads", threads, "worker threads");
    tr->add_flag("--quadratic", quadratic,
                 "report determinant-constraint distortion levels");
    tr->add_flag("--strict", strict, "fail when a grid point does not converge");
    tr->add_flag("--bits", bits, "display rate values in bits");

    auto* ve = app.add_subcommand("verify", "Monte Carlo identity verification");
    ve->add_option("model", model_path, "model JSON file")->required();
    ve->add_option("omegas", omegas_path, "gains JSON file");
    ve->add_option("--samples", samples, "Monte Carlo sample count");
    ve->add_option("--seed", seed_flag, "random seed");
    ve->add_option("--threads", threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        const std::uint64_t seed = resolve_seed(seed_flag);
        if (ev->parsed()) return cmd_evaluate(model_path, omegas_path, bits);
        if (co->parsed()) return cmd_corners(model_path, omegas_path, perm_str, bits);
        if (tr->parsed())
            return cmd_trace(model_path, rmin, rmax, steps, starts, seed, threads,
                             quadratic, strict, bits);
        if (ve->parsed())
            return cmd_verify(model_path, omegas_path, samples, seed, threads);
    } catch (const ceo::io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitOk;
}
