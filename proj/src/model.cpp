#include "ceo/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ceo {

namespace {
constexpr double kPdRelFloor = 1e-12;
constexpr double kBoxSlack = 1e-10;
constexpr double kDetFloor = 1e-14;
}  // namespace

double log_det(const MatrixXd& m) {
    Eigen::LDLT<MatrixXd> ldlt(m);
    return ldlt.vectorD().array().log().sum();
}

EntropyConvention EntropyConvention::of(Mode m) {
    return {m == Mode::Complex ? 1.0 : 0.5, m};
}

double EntropyConvention::gamma(int dim) const {
    const double pi = std::numbers::pi;
    if (mode == Mode::Complex) return dim * std::log(pi * std::numbers::e);
    return 0.5 * dim * std::log(2.0 * pi * std::numbers::e);
}

double CeoModel::prior_entropy() const {
    const auto c = convention();
    return c.gamma(n_x) + c.alpha * log_det(sigma_x);
}

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

MatrixXd matrix_sqrt(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
    return es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

TestChannelGains TestChannelGains::zero(const CeoModel& m) {
    TestChannelGains g;
    for (const auto& a : m.agents)
        g.omegas.push_back(MatrixXd::Zero(a.sigma.rows(), a.sigma.cols()));
    return g;
}

TestChannelGains TestChannelGains::from_whitened(const CeoModel& m,
                                                 const std::vector<MatrixXd>& bs) {
    TestChannelGains g;
    for (int k = 0; k < m.num_agents(); ++k) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m.agents[k].sigma));
        MatrixXd inv_sqrt = es.eigenvectors() *
                            es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                            es.eigenvectors().transpose();
        g.omegas.push_back(symmetrize(inv_sqrt * symmetrize(bs[k]) * inv_sqrt));
    }
    return g;
}

namespace {
bool check_spd(const MatrixXd& m, const std::string& name,
               std::vector<std::string>& out) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << name << " is not square: " << m.rows() << "x" << m.cols();
        out.push_back(os.str());
        return false;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m),
                                               Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > kPdRelFloor * std::max(hi, 0.0))) {
        std::ostringstream os;
        os << name << " is not positive definite: smallest eigenvalue " << lo
           << " (largest " << hi << ")";
        out.push_back(os.str());
        return false;
    }
    return true;
}
}  // namespace

std::vector<std::string> validate_model(const CeoModel& m) {
    std::vector<std::string> out;
    if (m.n_x < 1) out.push_back("n_x must be >= 1");
    if (m.agents.empty()) out.push_back("model has no agents");
    if (m.sigma_x.rows() != m.n_x || m.sigma_x.cols() != m.n_x) {
        std::ostringstream os;
        os << "sigma_x has shape " << m.sigma_x.rows() << "x" << m.sigma_x.cols()
           << ", expected " << m.n_x << "x" << m.n_x;
        out.push_back(os.str());
    } else {
        check_spd(m.sigma_x, "sigma_x", out);
    }
    for (int k = 0; k < m.num_agents(); ++k) {
        const auto& a = m.agents[k];
        const std::string tag = "agent " + std::to_string(k + 1);
        if (a.H.rows() < 1) out.push_back(tag + ": n_k must be >= 1");
        if (a.H.cols() != m.n_x) {
            std::ostringstream os;
            os << tag << ": H has shape " << a.H.rows() << "x" << a.H.cols()
               << ", expected columns " << m.n_x;
            out.push_back(os.str());
        }
        if (a.sigma.rows() != a.H.rows()) {
            std::ostringstream os;
            os << tag << ": sigma has " << a.sigma.rows() << " rows, H has "
               << a.H.rows();
            out.push_back(os.str());
        } else {
            check_spd(a.sigma, tag + ": sigma", out);
        }
    }
    return out;
}

std::vector<std::string> validate_gains(const CeoModel& m,
                                        const TestChannelGains& g) {
    std::vector<std::string> out;
    if (static_cast<int>(g.omegas.size()) != m.num_agents()) {
        out.push_back("gains count " + std::to_string(g.omegas.size()) +
                      " does not match agent count " +
                      std::to_string(m.num_agents()));
        return out;
    }
    for (int k = 0; k < m.num_agents(); ++k) {
        const std::string tag = "omega " + std::to_string(k + 1);
        const int nk = m.obs_dim(k);
        if (g.omegas[k].rows() != nk || g.omegas[k].cols() != nk) {
            std::ostringstream os;
            os << tag << " has shape " << g.omegas[k].rows() << "x"
               << g.omegas[k].cols() << ", expected " << nk << "x" << nk;
            out.push_back(os.str());
            continue;
        }
        const MatrixXd half = matrix_sqrt(m.agents[k].sigma);
        const MatrixXd b = symmetrize(half * symmetrize(g.omegas[k]) * half);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(b, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (lo < -kBoxSlack || hi > 1.0 + kBoxSlack) {
            std::ostringstream os;
            os << tag << " outside 0 <= omega <= sigma^{-1}: whitened eigenvalues in ["
               << lo << ", " << hi << "]";
            out.push_back(os.str());
        }
    }
    return out;
}

MatrixXd posterior_precision(const CeoModel& m, const TestChannelGains& g,
                             std::uint32_t subset) {
    MatrixXd j = symmetrize(m.sigma_x).llt().solve(MatrixXd::Identity(m.n_x, m.n_x));
    for (int k = 0; k < m.num_agents(); ++k)
        if (in_subset(subset, k))
            j += m.agents[k].H.transpose() * g.omegas[k] * m.agents[k].H;
    return symmetrize(j);
}

double cond_entropy_given(const CeoModel& m, const TestChannelGains& g,
                          std::uint32_t subset) {
    const auto c = m.convention();
    return c.gamma(m.n_x) - c.alpha * log_det(posterior_precision(m, g, subset));
}

double rate_term(const CeoModel& m, const TestChannelGains& g, int k) {
    const MatrixXd a =
        MatrixXd::Identity(m.obs_dim(k), m.obs_dim(k)) - g.omegas[k] * m.agents[k].sigma;
    const double det = a.determinant();
    if (det <= kDetFloor) return kInfRate;
    return -m.convention().alpha * std::log(det);
}

int joint_dim(const CeoModel& m) {
    int d = m.n_x;
    for (int k = 0; k < m.num_agents(); ++k) d += m.obs_dim(k);
    return d;
}

int u_offset(const CeoModel& m, int k) {
    int off = m.n_x;
    for (int j = 0; j < k; ++j) off += m.obs_dim(j);
    return off;
}

MatrixXd joint_covariance(const CeoModel& m, const TestChannelGains& g) {
    const int K = m.num_agents();
    for (int k = 0; k < K; ++k) {
        Eigen::FullPivLU<MatrixXd> lu(g.omegas[k]);
        if (!lu.isInvertible())
            throw std::invalid_argument(
                "omega " + std::to_string(k + 1) +
                " is singular; use the precision-path operations for boundary gains");
    }
    const int d = joint_dim(m);
    MatrixXd cov(d, d);
    cov.topLeftCorner(m.n_x, m.n_x) = m.sigma_x;
    for (int k = 0; k < K; ++k) {
        const int ok = u_offset(m, k);
        const int nk = m.obs_dim(k);
        const MatrixXd cross = m.sigma_x * m.agents[k].H.transpose();
        cov.block(0, ok, m.n_x, nk) = cross;
        cov.block(ok, 0, nk, m.n_x) = cross.transpose();
        const MatrixXd omega_inv =
            symmetrize(g.omegas[k]).llt().solve(MatrixXd::Identity(nk, nk));
        cov.block(ok, ok, nk, nk) =
            m.agents[k].H * m.sigma_x * m.agents[k].H.transpose() + omega_inv;
        for (int j = 0; j < k; ++j) {
            const int oj = u_offset(m, j);
            const int nj = m.obs_dim(j);
            const MatrixXd c = m.agents[k].H * m.sigma_x * m.agents[j].H.transpose();
            cov.block(ok, oj, nk, nj) = c;
            cov.block(oj, ok, nj, nk) = c.transpose();
        }
    }
    return symmetrize(cov);
}

}  // namespace ceo
