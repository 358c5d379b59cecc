#include <algorithm>
#include <cmath>

#include "cfma/scs.hpp"

namespace cfma {

namespace {

struct SimoGram {
    double a; // |h1|^2
    double b; // |h2|^2
    double c; // h1'h2
    double lambda_prod() const { return std::max(a * b - c * c, 0.0); }
    bool collinear() const { return a * b - c * c <= 1e-12 * std::max(a * b, 1e-300); }
};

SimoGram gram(const Vector& h1, const Vector& h2)
{
    if (h1.size() != h2.size() || h1.size() == 0)
        throw Error(Errc::dimension_mismatch, "SIMO channel vectors must share a nonzero length");
    return SimoGram{h1.squaredNorm(), h2.squaredNorm(), h1.dot(h2)};
}

// Largest positive root of (25c^2 - 9ab) P^2 - 9(a+b) P - 9, the locus Delta(P) = 0.
std::optional<double> simo_threshold_root(const SimoGram& s)
{
    const Polynomial q({-9.0, -9.0 * (s.a + s.b), 25.0 * s.c * s.c - 9.0 * s.a * s.b});
    if (q.degree() < 1)
        return std::nullopt;
    std::optional<double> best;
    for (double root : real_roots(q))
        if (root > 0.0 && (!best || root > *best))
            best = root;
    return best;
}

} // namespace

SimoReport simo_check(const Vector& h1, const Vector& h2, double power)
{
    const SimoGram s = gram(h1, h2);
    SimoReport out;
    out.c_d = 1.0 + power * (s.a + s.b) + power * power * s.lambda_prod();
    const double root_cd = std::sqrt(out.c_d);
    const double lin = root_cd + 2.0 * power * s.c;
    out.delta = lin * lin - 4.0 * (1.0 + power * s.a) * (1.0 + power * s.b);
    const double scale = std::max(1.0, lin * lin);
    out.achievable = out.delta >= -1e-12 * scale;
    if (out.achievable) {
        const double rd = std::sqrt(std::max(out.delta, 0.0));
        const double denom = 2.0 * (1.0 + power * s.b);
        out.gamma_interval = std::make_pair((lin - rd) / denom, (lin + rd) / denom);
    }
    return out;
}

bool simo_collinear_condition(const Vector& h1, const Vector& h2, double power)
{
    const SimoGram s = gram(h1, h2);
    return power * s.c / std::sqrt(1.0 + power * (s.a + s.b)) >= 0.75;
}

SimoThreshold simo_power_threshold(const Vector& h1, const Vector& h2)
{
    const SimoGram s = gram(h1, h2);
    SimoThreshold out;
    out.collinear = s.collinear();
    if (out.collinear) {
        out.condition_met = s.c > 0.0;
        if (out.condition_met)
            out.p_star = simo_threshold_root(s);
        return out;
    }
    const double lhs = std::pow(std::sqrt(s.lambda_prod()) + 2.0 * s.c, 2);
    if (!(lhs > 4.0 * s.a * s.b))
        throw Error(Errc::inapplicable, "channel condition for a finite SIMO power threshold fails");
    out.condition_met = true;
    out.p_star = simo_threshold_root(s);
    return out;
}

Polynomial diagonal_q_tilde(const Eigen::Matrix2d& c, DiagonalCondition which)
{
    if (which == DiagonalCondition::none)
        throw Error(Errc::inapplicable, "no diagonal condition engaged");
    // j: antenna pinned by gamma, o: the other antenna.
    const int j = which == DiagonalCondition::first ? 0 : 1;
    const int o = 1 - j;
    const double gamma = c(0, j) / c(1, j);
    const double a = gamma * gamma + 1.0;
    const double u = std::pow(gamma * c(1, o) - c(0, o), 2);
    const double s1 = c(0, 0) * c(0, 0) + c(1, 0) * c(1, 0);
    const double s2 = c(0, 1) * c(0, 1) + c(1, 1) * c(1, 1);
    const double g4 = std::pow(gamma, 4);
    return Polynomial({std::pow(a, 4) - g4, 2.0 * std::pow(a, 3) * u - g4 * (s1 + s2), a * a * u * u - g4 * s1 * s2});
}

DiagonalReport diagonal_check(const ChannelPair& ch, const CovariancePair& cov)
{
    if (ch.r() != 2 || ch.t() != 2)
        throw Error(Errc::dimension_mismatch, "diagonal check needs 2x2 channels");
    for (const Matrix* m : {&ch.h1, &ch.h2, &cov.k1, &cov.k2})
        if (std::abs((*m)(0, 1)) > 1e-9 * std::max(1.0, m->norm()) ||
            std::abs((*m)(1, 0)) > 1e-9 * std::max(1.0, m->norm()))
            throw Error(Errc::degenerate_input, "diagonal check needs diagonal channels and covariances");
    const double p = cov.power;
    if (!(p > 0.0))
        throw Error(Errc::degenerate_input, "power must be positive");

    Eigen::Matrix2d k;
    k << cov.k1(0, 0), cov.k1(1, 1), cov.k2(0, 0), cov.k2(1, 1);
    const double zero = 1e-12 * p;
    auto off = [&](int l, int j) { return k(l, j) <= zero; };
    if ((off(0, 0) && off(1, 1)) || (off(0, 1) && off(1, 0)))
        throw Error(Errc::degenerate_power_split, "power split decouples into two point-to-point links");

    DiagonalReport out;
    for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j)
            out.c(l, j) = ch.h(l)(j, j) * std::sqrt(std::max(k(l, j), 0.0) / p);
    const Eigen::Matrix2d& c = out.c;

    const double s1 = c(0, 0) * c(0, 0) + c(1, 0) * c(1, 0);
    const double s2 = c(0, 1) * c(0, 1) + c(1, 1) * c(1, 1);
    const bool first_ok = !off(0, 0) && !off(1, 0) && c(0, 0) != 0.0 && c(1, 0) != 0.0;
    const bool second_ok = !off(0, 1) && !off(1, 1) && c(0, 1) != 0.0 && c(1, 1) != 0.0;
    if (first_ok) {
        out.lhs1 = std::pow(c(1, 1) / c(1, 0) - c(0, 1) / c(0, 0), 2);
        out.rhs1 = std::sqrt(s2 / s1);
    }
    if (second_ok) {
        out.lhs2 = std::pow(c(1, 0) / c(1, 1) - c(0, 0) / c(0, 1), 2);
        out.rhs2 = std::sqrt(s1 / s2);
    }
    if (first_ok && out.lhs1 < out.rhs1) {
        out.engaged = DiagonalCondition::first;
        out.gamma = c(0, 0) / c(1, 0);
    } else if (second_ok && out.lhs2 < out.rhs2) {
        out.engaged = DiagonalCondition::second;
        out.gamma = c(0, 1) / c(1, 1);
    }
    if (out.engaged != DiagonalCondition::none) {
        for (double root : real_roots(diagonal_q_tilde(c, out.engaged)))
            if (root > 0.0 && (!out.p_threshold || root > *out.p_threshold))
                out.p_threshold = root;
    }
    return out;
}

SvdReport svd_check(const Vector& lambda1, const Vector& lambda2)
{
    if (lambda1.size() != lambda2.size())
        throw Error(Errc::dimension_mismatch, "singular value vectors differ in length");
    SvdReport out;
    for (Eigen::Index i = 0; i < lambda1.size(); ++i) {
        const double l1 = lambda1(i), l2 = lambda2(i);
        const double root = std::sqrt(1.0 + l1 * l1 + l2 * l2);
        const double disc = 4.0 * l1 * l2 - 3.0 * root;
        if (disc >= -1e-12 * std::max(1.0, root)) {
            const double qa = 1.0 + l2 * l2;
            const double qb = 2.0 * l1 * l2 + root;
            const double qc = 1.0 + l1 * l1;
            const double d = std::max(qb * qb - 4.0 * qa * qc, 0.0);
            out.achievable = true;
            out.index = static_cast<int>(i);
            out.gamma = (qb - std::sqrt(d)) / (2.0 * qa);
            return out;
        }
    }
    return out;
}

namespace {

struct Diagonalization {
    double mismatch;
    Matrix s;
    Matrix d;
    Vector v1;
    Vector v2;
};

// Express x1 and x2 in the singular bases of `basis`; mismatch is the largest
// off-diagonal entry left over, relative to the matrix norm.
Diagonalization diagonalize_with(const Matrix& basis, const Matrix& x1, const Matrix& x2)
{
    const SvdFactors<double> f = svd(basis);
    const Matrix y1 = f.left.transpose() * x1 * f.right;
    const Matrix y2 = f.left.transpose() * x2 * f.right;
    const Eigen::Index k = std::min(y1.rows(), y1.cols());
    double worst = 0.0;
    for (const Matrix* y : {&y1, &y2}) {
        Matrix off = *y;
        for (Eigen::Index i = 0; i < k; ++i)
            off(i, i) = 0.0;
        worst = std::max(worst, off.cwiseAbs().maxCoeff() / std::max(1.0, y->norm()));
    }
    Diagonalization out{worst, f.left, f.right, y1.diagonal().head(k), y2.diagonal().head(k)};
    // Canonical signs: make v1 nonnegative by flipping left columns, then
    // flip columns where v1 is zero so that v2 is nonnegative there.
    for (Eigen::Index i = 0; i < k; ++i) {
        const bool flip = out.v1(i) < 0.0 || (out.v1(i) == 0.0 && out.v2(i) < 0.0);
        if (flip) {
            out.s.col(i) *= -1.0;
            out.v1(i) = -out.v1(i);
            out.v2(i) = -out.v2(i);
        }
    }
    return out;
}

} // namespace

StructureReport structure_detect(const ChannelPair& ch, const CovariancePair& cov, double tol)
{
    const Matrix x1 = ch.h1 * cholesky(cov.k1);
    const Matrix x2 = ch.h2 * cholesky(cov.k2);
    Diagonalization a = diagonalize_with(x1, x1, x2);
    const Diagonalization b = diagonalize_with(x2, x1, x2);
    if (b.mismatch < a.mismatch)
        a = b;
    StructureReport out;
    out.mismatch = a.mismatch;
    out.shared_svd = a.mismatch <= tol;
    out.s = a.s;
    out.d = a.d;
    out.v1 = a.v1;
    out.v2 = a.v2;
    return out;
}

} // namespace cfma
