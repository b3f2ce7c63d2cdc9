#pragma once

#include "ceo/model.hpp"

#include <random>

namespace th {

// K=2 scalar instance: sigma_x = 1, H_k = 1, sigma_k = 1, omega_k = 0.5.
// Closed-form values used throughout the tests:
//   rate_term(k)            = 0.5 ln 2      = 0.34657359
//   h(X)                    = 0.5 ln(2 pi e) = 1.41893853
//   h(X | U_1, U_2)         = 0.5 ln(pi e)  = 1.07236494
//   corner pi=(1,2) rates   = (0.54930614, 0.49041462)
inline ceo::CeoModel scalar_model() {
    ceo::CeoModel m;
    m.n_x = 1;
    m.sigma_x = ceo::MatrixXd::Constant(1, 1, 1.0);
    ceo::Agent a;
    a.H = ceo::MatrixXd::Constant(1, 1, 1.0);
    a.sigma = ceo::MatrixXd::Constant(1, 1, 1.0);
    m.agents = {a, a};
    return m;
}

inline ceo::TestChannelGains scalar_gains(double w1 = 0.5, double w2 = 0.5) {
    ceo::TestChannelGains g;
    g.omegas = {ceo::MatrixXd::Constant(1, 1, w1),
                ceo::MatrixXd::Constant(1, 1, w2)};
    return g;
}

inline ceo::MatrixXd random_spd(std::mt19937_64& rng, int d, double ridge = 0.5) {
    std::normal_distribution<double> nd;
    ceo::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = nd(rng);
    return ceo::symmetrize(a * a.transpose()) +
           ridge * ceo::MatrixXd::Identity(d, d);
}

inline ceo::CeoModel random_model(std::uint64_t seed, int num_agents, int n_x,
                                  int n_k) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    ceo::CeoModel m;
    m.n_x = n_x;
    m.sigma_x = random_spd(rng, n_x);
    for (int k = 0; k < num_agents; ++k) {
        ceo::Agent a;
        a.H = ceo::MatrixXd(n_k, n_x);
        for (int i = 0; i < n_k; ++i)
            for (int j = 0; j < n_x; ++j) a.H(i, j) = nd(rng);
        a.sigma = random_spd(rng, n_k);
        m.agents.push_back(std::move(a));
    }
    return m;
}

// Interior whitened coordinates with eigenvalues in [lo, hi].
inline std::vector<ceo::MatrixXd> random_bs(std::uint64_t seed,
                                            const ceo::CeoModel& m,
                                            double lo = 0.1, double hi = 0.9) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> ud(lo, hi);
    std::normal_distribution<double> nd;
    std::vector<ceo::MatrixXd> bs;
    for (int k = 0; k < m.num_agents(); ++k) {
        const int d = m.obs_dim(k);
        ceo::MatrixXd q(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q(i, j) = nd(rng);
        const Eigen::HouseholderQR<ceo::MatrixXd> qr(q);
        const ceo::MatrixXd u = qr.householderQ();
        ceo::VectorXd ev(d);
        for (int i = 0; i < d; ++i) ev(i) = ud(rng);
        bs.push_back(ceo::symmetrize(u * ev.asDiagonal() * u.transpose()));
    }
    return bs;
}

inline ceo::TestChannelGains random_gains(std::uint64_t seed,
                                          const ceo::CeoModel& m,
                                          double lo = 0.1, double hi = 0.9) {
    return ceo::TestChannelGains::from_whitened(m, random_bs(seed, m, lo, hi));
}

}  // namespace th
