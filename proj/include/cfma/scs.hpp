#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfma/channel.hpp"
#include "cfma/polynomial.hpp"

namespace cfma {

struct ScsParams {
    std::array<int, 2> a{1, 1};
    std::array<int, 2> b{1, 0};
    std::array<double, 2> beta{1.0, 1.0};
    Matrix b1;
    Matrix b2;

    const Matrix& precoder(int user) const { return user == 0 ? b1 : b2; }
    double a_tilde(int user) const { return a[user] * beta[user]; }
    double b_tilde(int user) const { return b[user] * beta[user]; }
    // a~1 b~2 - a~2 b~1
    double cross() const { return a_tilde(0) * b_tilde(1) - a_tilde(1) * b_tilde(0); }
};

struct ScsRatePair {
    Eigen::Vector2d r_a = Eigen::Vector2d::Zero();
    Eigen::Vector2d r_b_given_a = Eigen::Vector2d::Zero();
    Eigen::Vector2d rates = Eigen::Vector2d::Zero();
    double m_det = 0.0;
    double c_d_raw = 1.0;
    bool feasible = false;

    double sum_rate() const { return rates.sum(); }
};

enum class Feasibility { report, require };

Matrix m_matrix(const ChannelPair& ch, const ScsParams& params);

ScsRatePair scs_rate_pair(const ChannelPair& ch, const CovariancePair& cov, const ScsParams& params,
                          Feasibility mode = Feasibility::report);

// |(g^2+1) I + (g B2'H2' - B1'H1')(g H2 B2 - H1 B1)| evaluated directly.
double f_direct(const ChannelPair& ch, const Matrix& b1, const Matrix& b2, double gamma);
Polynomial f_polynomial(const ChannelPair& ch, const Matrix& b1, const Matrix& b2);
Polynomial g_polynomial(const ChannelPair& ch, const Matrix& b1, const Matrix& b2, double c_d);

enum class PrecoderStrategy { cholesky, permutations };

const char* to_string(PrecoderStrategy s);

struct GammaSearch {
    double g_min = 0.0;
    double gamma = 1.0;
    std::optional<std::pair<double, double>> interval;
};

// Minimum of g over gamma > 0, looking at positive roots of g and g',
// midpoints between consecutive roots and a log-spaced fallback grid.
GammaSearch minimize_over_gamma(const Polynomial& g);

struct ScsReport {
    bool achievable = false;
    std::optional<double> gamma_witness;
    std::optional<std::pair<double, double>> gamma_interval;
    Polynomial g_poly;
    double g_min = 0.0;
    PrecoderStrategy strategy = PrecoderStrategy::cholesky;
    std::vector<int> perm1;
    std::vector<int> perm2;
    Matrix b1;
    Matrix b2;
    CapacityResult capacity;

    std::string precoder_label() const;
};

ScsReport scs_check(const ChannelPair& ch, double power, PrecoderStrategy strategy = PrecoderStrategy::cholesky);
ScsReport scs_check(const ChannelPair& ch, const CapacityResult& capacity,
                    PrecoderStrategy strategy = PrecoderStrategy::cholesky);

// Equalizer algebra for a single channel use. sigma1/sigma2 evaluate the
// effective noise covariances for arbitrary equalizers; the optimal_*
// functions return the minimizers.
Matrix sigma1(const ChannelPair& ch, const ScsParams& params, const Matrix& w);
Matrix optimal_w(const ChannelPair& ch, const ScsParams& params);
Matrix sigma2(const ChannelPair& ch, const ScsParams& params, const Matrix& f, const Matrix& l);
Matrix optimal_l(const ChannelPair& ch, const ScsParams& params, const Matrix& f);
Matrix optimal_f(const ChannelPair& ch, const ScsParams& params);

// ---- special cases ----

struct SimoReport {
    double delta = 0.0;
    double c_d = 1.0;
    bool achievable = false;
    std::optional<std::pair<double, double>> gamma_interval;
};

SimoReport simo_check(const Vector& h1, const Vector& h2, double power);

struct SimoThreshold {
    bool collinear = false;
    bool condition_met = false;
    std::optional<double> p_star;
};

bool simo_collinear_condition(const Vector& h1, const Vector& h2, double power);
SimoThreshold simo_power_threshold(const Vector& h1, const Vector& h2);

enum class DiagonalCondition { none, first, second };

struct DiagonalReport {
    DiagonalCondition engaged = DiagonalCondition::none;
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    std::optional<double> gamma;
    // Positive root of q~(P) for the engaged condition, holding the power split fixed.
    std::optional<double> p_threshold;
    double lhs1 = 0.0, rhs1 = 0.0, lhs2 = 0.0, rhs2 = 0.0;
};

DiagonalReport diagonal_check(const ChannelPair& ch, const CovariancePair& cov);

// q~(P) = f(gamma)^2 - gamma^4 C_d with the split ratios c held fixed.
Polynomial diagonal_q_tilde(const Eigen::Matrix2d& c, DiagonalCondition which);

struct SvdReport {
    bool achievable = false;
    std::optional<double> gamma;
    std::optional<int> index;
};

SvdReport svd_check(const Vector& lambda1, const Vector& lambda2);

struct StructureReport {
    bool shared_svd = false;
    double mismatch = 0.0;
    Matrix s;
    Vector v1;
    Vector v2;
    Matrix d;
};

StructureReport structure_detect(const ChannelPair& ch, const CovariancePair& cov, double tol = 1e-6);

} // namespace cfma
