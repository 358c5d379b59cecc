#include "cfma/scs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfma {

namespace {

void validate(const ChannelPair& ch, const ScsParams& p)
{
    const Eigen::Index t = ch.t();
    if (p.b1.rows() != t || p.b1.cols() != t || p.b2.rows() != t || p.b2.cols() != t)
        throw Error(Errc::dimension_mismatch, "precoders must be t x t");
    if (p.a[0] * p.b[1] == p.a[1] * p.b[0])
        throw Error(Errc::degenerate_input, "a and b must be linearly independent");
    if (!(p.beta[0] > 0.0) || !(p.beta[1] > 0.0))
        throw Error(Errc::degenerate_input, "beta must be positive");
}

// a~1 H2 B2 - a~2 H1 B1
Matrix difference_term(const ChannelPair& ch, const ScsParams& p)
{
    return p.a_tilde(0) * ch.h2 * p.b2 - p.a_tilde(1) * ch.h1 * p.b1;
}

double a_tilde_norm2(const ScsParams& p) { return p.a_tilde(0) * p.a_tilde(0) + p.a_tilde(1) * p.a_tilde(1); }

std::vector<std::vector<int>> all_permutations(int n)
{
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(idx);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

Matrix permute_columns(const Matrix& b, const std::vector<int>& perm)
{
    Matrix out(b.rows(), b.cols());
    for (std::size_t j = 0; j < perm.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = b.col(perm[j]);
    return out;
}

} // namespace

Matrix m_matrix(const ChannelPair& ch, const ScsParams& params)
{
    validate(ch, params);
    const Matrix g = difference_term(ch, params);
    return symmetrized(a_tilde_norm2(params) * Matrix::Identity(ch.t(), ch.t()) + g.transpose() * g);
}

ScsRatePair scs_rate_pair(const ChannelPair& ch, const CovariancePair& cov, const ScsParams& params, Feasibility mode)
{
    validate(ch, params);
    for (int l = 0; l < 2; ++l) {
        const Matrix& b = params.precoder(l);
        const double scale = std::max(1.0, cov.k(l).norm());
        if ((b * b.transpose() - cov.k(l)).norm() > 1e-8 * scale)
            throw Error(Errc::degenerate_input, "precoder does not factor the covariance");
    }
    const double t = static_cast<double>(ch.t());
    ScsRatePair out;
    out.m_det = det(m_matrix(ch, params));
    out.c_d_raw = c_d(ch, cov);
    const double cross2t = std::pow(params.cross(), 2.0 * t);
    for (int l = 0; l < 2; ++l) {
        const double beta2t = std::pow(params.beta[l], 2.0 * t);
        out.r_a(l) = 0.5 * std::log2(beta2t * out.c_d_raw / out.m_det);
        out.r_b_given_a(l) = 0.5 * std::log2(beta2t * out.m_det / cross2t);
        if (params.b[l] == 0)
            out.rates(l) = out.r_a(l);
        else if (params.a[l] == 0)
            out.rates(l) = out.r_b_given_a(l);
        else
            out.rates(l) = std::min(out.r_a(l), out.r_b_given_a(l));
    }
    const double slack = -1e-12;
    out.feasible = out.r_a.minCoeff() >= slack && out.r_b_given_a.minCoeff() >= slack;
    if (mode == Feasibility::require && !out.feasible)
        throw Error(Errc::infeasible_rates, "a computation rate is negative");
    return out;
}

double f_direct(const ChannelPair& ch, const Matrix& b1, const Matrix& b2, double gamma)
{
    const Eigen::Index t = ch.t();
    const Matrix d = gamma * ch.h2 * b2 - ch.h1 * b1;
    return det(symmetrized((gamma * gamma + 1.0) * Matrix::Identity(t, t) + d.transpose() * d));
}

Polynomial f_polynomial(const ChannelPair& ch, const Matrix& b1, const Matrix& b2)
{
    const int degree = 2 * static_cast<int>(ch.t());
    const std::vector<double> nodes = Polynomial::chebyshev_nodes(degree + 1);
    std::vector<double> values;
    values.reserve(nodes.size());
    for (double x : nodes)
        values.push_back(f_direct(ch, b1, b2, x));
    return Polynomial::interpolate(nodes, values, degree);
}

Polynomial g_polynomial(const ChannelPair& ch, const Matrix& b1, const Matrix& b2, double cd)
{
    return f_polynomial(ch, b1, b2) - Polynomial::monomial(static_cast<int>(ch.t()), std::sqrt(cd));
}

const char* to_string(PrecoderStrategy s)
{
    return s == PrecoderStrategy::cholesky ? "cholesky" : "cholesky×permutations";
}

std::string ScsReport::precoder_label() const { return to_string(strategy); }

GammaSearch minimize_over_gamma(const Polynomial& g)
{
    std::vector<double> roots;
    for (double r : real_roots(g))
        if (r > 0.0)
            roots.push_back(r);

    std::vector<double> candidates = roots;
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        candidates.push_back(0.5 * (roots[i] + roots[i + 1]));
    const Polynomial dg = g.derivative();
    if (dg.degree() >= 1)
        for (double r : real_roots(dg))
            if (r > 0.0)
                candidates.push_back(r);
    constexpr int grid = 2000;
    for (int k = 0; k < grid; ++k)
        candidates.push_back(std::pow(10.0, -3.0 + 6.0 * k / (grid - 1)));

    GammaSearch out;
    out.g_min = std::numeric_limits<double>::infinity();
    for (double x : candidates) {
        const double v = g(x);
        if (v < out.g_min) {
            out.g_min = v;
            out.gamma = x;
        }
    }
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        if (roots[i] <= out.gamma && out.gamma <= roots[i + 1])
            out.interval = std::make_pair(roots[i], roots[i + 1]);
    if (!out.interval)
        for (double r : roots)
            if (std::abs(r - out.gamma) <= 1e-9 * std::max(1.0, r))
                out.interval = std::make_pair(r, r);
    return out;
}

ScsReport scs_check(const ChannelPair& ch, double power, PrecoderStrategy strategy)
{
    return scs_check(ch, sum_capacity(ch, power), strategy);
}

ScsReport scs_check(const ChannelPair& ch, const CapacityResult& capacity, PrecoderStrategy strategy)
{
    const int t = static_cast<int>(ch.t());
    const Matrix b1 = cholesky(capacity.covariances.k1);
    const Matrix b2 = cholesky(capacity.covariances.k2);

    std::vector<std::vector<int>> perms;
    if (strategy == PrecoderStrategy::permutations) {
        perms = all_permutations(t);
    } else {
        perms.emplace_back(static_cast<std::size_t>(t));
        std::iota(perms.back().begin(), perms.back().end(), 0);
    }

    ScsReport best;
    best.strategy = strategy;
    best.capacity = capacity;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (const auto& p1 : perms) {
        const Matrix c1 = permute_columns(b1, p1);
        for (const auto& p2 : perms) {
            const Matrix c2 = permute_columns(b2, p2);
            const Polynomial g = g_polynomial(ch, c1, c2, capacity.c_d);
            const GammaSearch search = minimize_over_gamma(g);
            const double lead = std::abs(g.leading());
            const double ratio = search.g_min / lead;
            if (ratio < best_ratio) {
                best_ratio = ratio;
                best.g_poly = g;
                best.g_min = search.g_min;
                best.perm1 = p1;
                best.perm2 = p2;
                best.b1 = c1;
                best.b2 = c2;
                best.achievable = search.g_min <= 1e-7 * lead;
                best.gamma_witness = best.achievable ? std::optional<double>(search.gamma) : std::nullopt;
                best.gamma_interval = best.achievable ? search.interval : std::nullopt;
            }
            if (best.achievable)
                return best;
        }
    }
    return best;
}

Matrix sigma1(const ChannelPair& ch, const ScsParams& params, const Matrix& w)
{
    const Eigen::Index t = ch.t();
    Matrix s = w * w.transpose();
    for (int l = 0; l < 2; ++l) {
        const Matrix e = params.a_tilde(l) * Matrix::Identity(t, t) - w * ch.h(l) * params.precoder(l);
        s += e * e.transpose();
    }
    return symmetrized(s);
}

Matrix optimal_w(const ChannelPair& ch, const ScsParams& params)
{
    const Eigen::Index r = ch.r();
    Matrix lhs = Matrix::Zero(ch.t(), r);
    Matrix q = Matrix::Identity(r, r);
    for (int l = 0; l < 2; ++l) {
        const Matrix hb = ch.h(l) * params.precoder(l);
        lhs += params.a_tilde(l) * hb.transpose();
        q += hb * hb.transpose();
    }
    return q.llt().solve(lhs.transpose()).transpose();
}

Matrix sigma2(const ChannelPair& ch, const ScsParams& params, const Matrix& f, const Matrix& l)
{
    const Eigen::Index t = ch.t();
    Matrix s = f * f.transpose();
    for (int u = 0; u < 2; ++u) {
        const Matrix e = params.b_tilde(u) * Matrix::Identity(t, t) - f * ch.h(u) * params.precoder(u) -
                         params.a_tilde(u) * l;
        s += e * e.transpose();
    }
    return symmetrized(s);
}

Matrix optimal_l(const ChannelPair& ch, const ScsParams& params, const Matrix& f)
{
    const Eigen::Index t = ch.t();
    Matrix acc = Matrix::Zero(t, t);
    for (int u = 0; u < 2; ++u)
        acc += params.a_tilde(u) *
               (params.b_tilde(u) * Matrix::Identity(t, t) - f * ch.h(u) * params.precoder(u));
    return acc / a_tilde_norm2(params);
}

Matrix optimal_f(const ChannelPair& ch, const ScsParams& params)
{
    const double s = a_tilde_norm2(params);
    const Matrix g = difference_term(ch, params);
    const Matrix mk = Matrix::Identity(ch.r(), ch.r()) + g * g.transpose() / s;
    // F M_k = (cross / s) G^T
    return mk.llt().solve(g).transpose() * (params.cross() / s);
}

} // namespace cfma
