#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cfma/matkernel.hpp"
#include "cfma/polynomial.hpp"

namespace testing_support {

using cfma::Matrix;
using cfma::Vector;

class Rand {
public:
    explicit Rand(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    Matrix matrix(Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0)
    {
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j)
                m(i, j) = uniform(lo, hi);
        return m;
    }

    Matrix gaussian(Eigen::Index r, Eigen::Index c)
    {
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j)
                m(i, j) = normal();
        return m;
    }

    // Random PSD matrix of the given rank, scaled to trace `trace`.
    Matrix psd(Eigen::Index n, Eigen::Index rank, double trace)
    {
        const Matrix g = gaussian(n, rank);
        Matrix k = g * g.transpose();
        if (k.trace() > 0.0)
            k *= trace / k.trace();
        return (k + k.transpose()) / 2.0;
    }

    Matrix orthogonal(Eigen::Index n)
    {
        Eigen::HouseholderQR<Matrix> qr(gaussian(n, n));
        return qr.householderQ();
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Laplace expansion along the first row.
inline double cofactor_det(const Matrix& m)
{
    const Eigen::Index n = m.rows();
    if (n == 1)
        return m(0, 0);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        Matrix minor(n - 1, n - 1);
        for (Eigen::Index i = 1; i < n; ++i)
            for (Eigen::Index k = 0, c = 0; k < n; ++k)
                if (k != j)
                    minor(i - 1, c++) = m(i, k);
        acc += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * cofactor_det(minor);
    }
    return acc;
}

// Doolittle LU with partial pivoting written out longhand; returns the
// signed product of pivots.
inline double lu_pivot_product(Matrix a)
{
    const Eigen::Index n = a.rows();
    double sign = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k)))
                p = i;
        if (a(p, k) == 0.0)
            return 0.0;
        if (p != k) {
            a.row(p).swap(a.row(k));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (Eigen::Index j = k; j < n; ++j)
                a(i, j) -= f * a(k, j);
        }
    }
    double prod = sign;
    for (Eigen::Index k = 0; k < n; ++k)
        prod *= a(k, k);
    return prod;
}

// Sign changes of p on a uniform grid of `points` samples over [lo, hi].
inline std::vector<std::pair<double, double>> sign_change_brackets(const cfma::Polynomial& p, double lo, double hi,
                                                                   long points)
{
    std::vector<std::pair<double, double>> out;
    double prev_x = lo;
    double prev_v = p(lo);
    for (long k = 1; k < points; ++k) {
        const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
        const double v = p(x);
        if ((v < 0.0) != (prev_v < 0.0))
            out.emplace_back(prev_x, x);
        prev_x = x;
        prev_v = v;
    }
    return out;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

} // namespace testing_support
