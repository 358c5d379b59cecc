#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "cfma/errors.hpp"

namespace cfma {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using IntMatrix = MatrixX<long long>;
using IntVector = VectorX<long long>;

struct Tolerances {
    double symmetry = 1e-10;
    double negative_pivot = 1e-9;
    double zero_pivot = 1e-12;
    double residual = 1e-8;
};

template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& m)
{
    return (m + m.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m, double rel_tol)
{
    if (m.rows() != m.cols())
        throw Error(Errc::dimension_mismatch, "matrix is not square");
    const double scale = std::max<double>(1.0, m.norm());
    if ((m - m.transpose()).norm() > rel_tol * scale)
        throw Error(Errc::degenerate_input, "matrix is not symmetric");
}

namespace detail {

// Outer-product Cholesky that leaves a zero column wherever the residual
// pivot vanishes. `order` fixes the elimination order; with pivoting the
// largest remaining diagonal is taken at each step instead.
template <typename Scalar>
MatrixX<Scalar> cholesky_impl(const MatrixX<Scalar>& k, bool pivot, const Tolerances& tol)
{
    const Eigen::Index n = k.rows();
    const Scalar scale = k.cwiseAbs().maxCoeff();
    MatrixX<Scalar> residual = k;
    MatrixX<Scalar> b = MatrixX<Scalar>::Zero(n, n);
    std::vector<Eigen::Index> remaining(n);
    std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});

    for (Eigen::Index col = 0; col < n; ++col) {
        std::size_t pick = 0;
        if (pivot) {
            for (std::size_t i = 1; i < remaining.size(); ++i)
                if (residual(remaining[i], remaining[i]) > residual(remaining[pick], remaining[pick]))
                    pick = i;
        }
        const Eigen::Index p = remaining[pick];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        const Scalar d = residual(p, p);
        if (d < -tol.negative_pivot * scale)
            throw Error(Errc::not_psd, "negative pivot in Cholesky factorization");
        if (d <= tol.zero_pivot * scale) {
            for (Eigen::Index i : remaining)
                if (std::abs(residual(i, p)) > std::sqrt(tol.zero_pivot) * scale)
                    throw Error(Errc::not_psd, "zero pivot with nonzero coupling");
            continue;
        }
        const Scalar root = std::sqrt(d);
        b(p, col) = root;
        for (Eigen::Index i : remaining)
            b(i, col) = residual(i, p) / root;
        for (Eigen::Index i : remaining)
            for (Eigen::Index j : remaining)
                residual(i, j) -= b(i, col) * b(j, col);
    }
    return b;
}

template <typename Scalar>
bool zero_columns_trailing(const MatrixX<Scalar>& b)
{
    bool seen_zero = false;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        const bool zero = b.col(j).isZero(0);
        if (seen_zero && !zero)
            return false;
        seen_zero = seen_zero || zero;
    }
    return true;
}

} // namespace detail

// B with B*B^T = K. Plain (lower-triangular) Cholesky when the zero columns of
// a rank-deficient K come out trailing, otherwise a diagonally pivoted factor
// whose zero columns are pushed to the end.
template <typename Derived>
MatrixX<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& k, const Tolerances& tol = {})
{
    using Scalar = typename Derived::Scalar;
    require_symmetric(k, tol.symmetry);
    const MatrixX<Scalar> sym = symmetrized(k);
    MatrixX<Scalar> b = detail::cholesky_impl<Scalar>(sym, false, tol);
    if (!detail::zero_columns_trailing(b))
        b = detail::cholesky_impl<Scalar>(sym, true, tol);
    return b;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> pivoted_cholesky(const Eigen::MatrixBase<Derived>& k, const Tolerances& tol = {})
{
    using Scalar = typename Derived::Scalar;
    require_symmetric(k, tol.symmetry);
    return detail::cholesky_impl<Scalar>(symmetrized(k), true, tol);
}

template <typename Derived>
typename Derived::Scalar det(const Eigen::MatrixBase<Derived>& m)
{
    if (m.rows() != m.cols())
        throw Error(Errc::dimension_mismatch, "determinant of a non-square matrix");
    if (m.rows() == 0)
        return typename Derived::Scalar(1);
    return m.eval().partialPivLu().determinant();
}

template <typename Scalar>
struct SvdFactors {
    MatrixX<Scalar> left;
    VectorX<Scalar> values;
    MatrixX<Scalar> right;

    MatrixX<Scalar> diagonal() const
    {
        MatrixX<Scalar> v = MatrixX<Scalar>::Zero(left.cols(), right.cols());
        for (Eigen::Index i = 0; i < values.size(); ++i)
            v(i, i) = values(i);
        return v;
    }
};

template <typename Derived>
SvdFactors<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m, const Tolerances& tol = {})
{
    using Scalar = typename Derived::Scalar;
    Eigen::JacobiSVD<MatrixX<Scalar>> solver(m.eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdFactors<Scalar> out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    const Scalar err = (out.left * out.diagonal() * out.right.transpose() - m).norm();
    if (!std::isfinite(err) || err > tol.residual * std::max<Scalar>(1, m.norm()))
        throw Error(Errc::no_convergence, "SVD reconstruction failed");
    return out;
}

template <typename Scalar>
struct SymEigen {
    VectorX<Scalar> values;
    MatrixX<Scalar> vectors;
};

// Eigenvalues in descending order, eigenvectors as matching columns.
template <typename Derived>
SymEigen<typename Derived::Scalar> sym_eigen(const Eigen::MatrixBase<Derived>& m, const Tolerances& tol = {})
{
    using Scalar = typename Derived::Scalar;
    require_symmetric(m, tol.symmetry);
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(symmetrized(m));
    if (solver.info() != Eigen::Success)
        throw Error(Errc::no_convergence, "symmetric eigensolver did not converge");
    const Eigen::Index n = m.rows();
    SymEigen<Scalar> out{VectorX<Scalar>(n), MatrixX<Scalar>(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace cfma
