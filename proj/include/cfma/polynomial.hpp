#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "cfma/errors.hpp"
#include "cfma/matkernel.hpp"

namespace cfma {

// Real polynomial, coefficients in ascending degree.
template <typename Scalar>
class BasicPolynomial {
public:
    BasicPolynomial() : c_{Scalar(0)} {}
    explicit BasicPolynomial(std::vector<Scalar> coefficients) : c_(std::move(coefficients))
    {
        strip_exact_zeros();
    }

    static BasicPolynomial monomial(int degree, Scalar coefficient = 1)
    {
        std::vector<Scalar> c(static_cast<std::size_t>(degree) + 1, Scalar(0));
        c.back() = coefficient;
        return BasicPolynomial(std::move(c));
    }

    // Least-squares fit through (nodes, values); exact when nodes.size() == degree + 1.
    static BasicPolynomial interpolate(const std::vector<Scalar>& nodes, const std::vector<Scalar>& values, int degree)
    {
        const auto n = static_cast<Eigen::Index>(nodes.size());
        MatrixX<Scalar> vander(n, degree + 1);
        VectorX<Scalar> rhs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar power = 1;
            for (int k = 0; k <= degree; ++k) {
                vander(i, k) = power;
                power *= nodes[static_cast<std::size_t>(i)];
            }
            rhs(i) = values[static_cast<std::size_t>(i)];
        }
        const VectorX<Scalar> sol = vander.colPivHouseholderQr().solve(rhs);
        return BasicPolynomial(std::vector<Scalar>(sol.data(), sol.data() + sol.size()));
    }

    static std::vector<Scalar> chebyshev_nodes(int count, Scalar lo = -1, Scalar hi = 1)
    {
        std::vector<Scalar> x(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const Scalar t = std::cos((2 * k + 1) * std::numbers::pi_v<Scalar> / (2 * count));
            x[static_cast<std::size_t>(k)] = (lo + hi) / 2 + (hi - lo) / 2 * t;
        }
        return x;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Scalar>& coefficients() const { return c_; }
    Scalar coefficient(int k) const
    {
        return k >= 0 && k <= degree() ? c_[static_cast<std::size_t>(k)] : Scalar(0);
    }
    Scalar leading() const { return c_.back(); }

    Scalar max_abs_coefficient() const
    {
        Scalar m = 0;
        for (Scalar v : c_)
            m = std::max(m, std::abs(v));
        return m;
    }

    Scalar operator()(Scalar x) const
    {
        Scalar acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * x + *it;
        return acc;
    }

    BasicPolynomial derivative() const
    {
        if (degree() == 0)
            return BasicPolynomial();
        std::vector<Scalar> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k)
            d[k - 1] = c_[k] * static_cast<Scalar>(k);
        return BasicPolynomial(std::move(d));
    }

    // Drop leading coefficients that are negligible relative to the largest one.
    BasicPolynomial trimmed(Scalar rel_tol) const
    {
        const Scalar cut = rel_tol * max_abs_coefficient();
        std::vector<Scalar> c = c_;
        while (c.size() > 1 && std::abs(c.back()) <= cut)
            c.pop_back();
        return BasicPolynomial(std::move(c));
    }

    friend BasicPolynomial operator+(const BasicPolynomial& p, const BasicPolynomial& q)
    {
        std::vector<Scalar> c(std::max(p.c_.size(), q.c_.size()), Scalar(0));
        for (std::size_t k = 0; k < c.size(); ++k)
            c[k] = p.coefficient(static_cast<int>(k)) + q.coefficient(static_cast<int>(k));
        return BasicPolynomial(std::move(c));
    }
    friend BasicPolynomial operator-(const BasicPolynomial& p, const BasicPolynomial& q)
    {
        return p + q * Scalar(-1);
    }
    friend BasicPolynomial operator*(const BasicPolynomial& p, const BasicPolynomial& q)
    {
        std::vector<Scalar> c(p.c_.size() + q.c_.size() - 1, Scalar(0));
        for (std::size_t i = 0; i < p.c_.size(); ++i)
            for (std::size_t j = 0; j < q.c_.size(); ++j)
                c[i + j] += p.c_[i] * q.c_[j];
        return BasicPolynomial(std::move(c));
    }
    friend BasicPolynomial operator*(const BasicPolynomial& p, Scalar s)
    {
        std::vector<Scalar> c = p.c_;
        for (Scalar& v : c)
            v *= s;
        return BasicPolynomial(std::move(c));
    }

private:
    void strip_exact_zeros()
    {
        if (c_.empty())
            c_.push_back(Scalar(0));
        while (c_.size() > 1 && c_.back() == Scalar(0))
            c_.pop_back();
    }

    std::vector<Scalar> c_;
};

using Polynomial = BasicPolynomial<double>;

struct RootOptions {
    double zero_tolerance = 1e-300;
    double trim_tolerance = 1e-13;
    double imag_tolerance = 1e-6;
    double residual_tolerance = 1e-7;
    double bracket_lo = 1e-6;
    double bracket_hi = 1e6;
    int bracket_points = 4000;
};

namespace detail {

template <typename Scalar>
Scalar root_scale(const BasicPolynomial<Scalar>& p, Scalar x)
{
    return p.max_abs_coefficient() * std::pow(std::max<Scalar>(1, std::abs(x)), p.degree());
}

template <typename Scalar>
Scalar bisect(const BasicPolynomial<Scalar>& p, Scalar a, Scalar b)
{
    Scalar fa = p(a);
    for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<Scalar>::epsilon() * std::abs(a + b); ++it) {
        const Scalar m = (a + b) / 2;
        const Scalar fm = p(m);
        if (fm == 0)
            return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return (a + b) / 2;
}

} // namespace detail

// Real roots in ascending order: companion-matrix eigenvalues with a Newton
// polish, then a sign-change sweep over +-[bracket_lo, bracket_hi] that
// bisects any bracket the eigenvalue pass missed.
template <typename Scalar>
std::vector<Scalar> real_roots(const BasicPolynomial<Scalar>& poly, const RootOptions& opt = {})
{
    if (!(poly.max_abs_coefficient() > opt.zero_tolerance))
        throw Error(Errc::degenerate_input, "all polynomial coefficients vanish");
    const BasicPolynomial<Scalar> p = poly.trimmed(static_cast<Scalar>(opt.trim_tolerance));
    const int n = p.degree();
    if (n < 1)
        throw Error(Errc::degenerate_input, "polynomial has degree zero");

    MatrixX<Scalar> companion = MatrixX<Scalar>::Zero(n, n);
    for (int i = 1; i < n; ++i)
        companion(i, i - 1) = 1;
    for (int i = 0; i < n; ++i)
        companion(i, n - 1) = -p.coefficient(i) / p.leading();
    Eigen::EigenSolver<MatrixX<Scalar>> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::no_convergence, "companion eigenvalues did not converge");

    const BasicPolynomial<Scalar> dp = p.derivative();
    std::vector<Scalar> roots;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<Scalar> z = solver.eigenvalues()(i);
        if (std::abs(z.imag()) > opt.imag_tolerance * std::max<Scalar>(1, std::abs(z)))
            continue;
        Scalar x = z.real();
        for (int step = 0; step < 2; ++step) {
            const Scalar slope = dp(x);
            if (slope == 0)
                break;
            const Scalar next = x - p(x) / slope;
            if (!(std::abs(p(next)) < std::abs(p(x))))
                break;
            x = next;
        }
        if (std::abs(p(x)) <= opt.residual_tolerance * detail::root_scale(p, x))
            roots.push_back(x);
    }

    auto covered = [&](Scalar a, Scalar b) {
        return std::any_of(roots.begin(), roots.end(), [&](Scalar r) { return r >= a && r <= b; });
    };
    const Scalar ratio = std::pow(static_cast<Scalar>(opt.bracket_hi / opt.bracket_lo),
                                  Scalar(1) / static_cast<Scalar>(opt.bracket_points - 1));
    for (int sign : {-1, 1}) {
        Scalar prev_x = 0;
        Scalar prev_v = p(Scalar(0));
        Scalar x = static_cast<Scalar>(opt.bracket_lo);
        for (int k = 0; k < opt.bracket_points; ++k, x *= ratio) {
            const Scalar xs = sign * x;
            const Scalar v = p(xs);
            if (v == 0 && !covered(xs, xs)) {
                roots.push_back(xs);
            } else if ((v < 0) != (prev_v < 0) && v != 0 && prev_v != 0) {
                const Scalar a = std::min(prev_x, xs);
                const Scalar b = std::max(prev_x, xs);
                if (!covered(a, b))
                    roots.push_back(detail::bisect(p, a, b));
            }
            prev_x = xs;
            prev_v = v;
        }
    }

    std::sort(roots.begin(), roots.end());
    std::vector<Scalar> unique;
    for (Scalar r : roots)
        if (unique.empty() || std::abs(r - unique.back()) > 1e-9 * std::max<Scalar>(1, std::abs(r)))
            unique.push_back(r);
    return unique;
}

} // namespace cfma
