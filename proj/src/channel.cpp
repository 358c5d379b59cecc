#include "cfma/channel.hpp"

#include <algorithm>
#include <cmath>

#include "cfma/rng.hpp"

namespace cfma {

ChannelPair::ChannelPair(Matrix a, Matrix b) : h1(std::move(a)), h2(std::move(b))
{
    if (h1.rows() != h2.rows() || h1.cols() != h2.cols())
        throw Error(Errc::dimension_mismatch, "H1 and H2 must share dimensions");
    if (h1.size() == 0)
        throw Error(Errc::dimension_mismatch, "empty channel matrix");
    if (!h1.allFinite() || !h2.allFinite())
        throw Error(Errc::degenerate_input, "non-finite channel entry");
}

bool CovariancePair::feasible(double tol) const
{
    for (const Matrix* k : {&k1, &k2}) {
        if (k->trace() > power + tol)
            return false;
        if (sym_eigen(*k).values.minCoeff() < -tol)
            return false;
    }
    return true;
}

Matrix water_fill(const Matrix& h, const Matrix& interference, double power)
{
    const Eigen::Index r = h.rows();
    const Eigen::Index t = h.cols();
    const Matrix q = Matrix::Identity(r, r) + symmetrized(interference);
    // G = C^{-1} H with Q = C C^T gives G^T G = H^T Q^{-1} H.
    const Eigen::LLT<Matrix> llt(q);
    const Matrix g = llt.matrixL().solve(h);
    const SymEigen<double> eig = sym_eigen(symmetrized(g.transpose() * g));

    const double top = std::max(eig.values(0), 0.0);
    Vector alloc = Vector::Zero(t);
    if (top <= 0.0 || power <= 0.0)
        return Matrix::Zero(t, t);

    // Eigenvalues are descending, so the active set is a prefix. Take the
    // largest prefix whose water level clears every inverse gain in it.
    double inv_sum = 0.0;
    double level = 0.0;
    Eigen::Index active = 0;
    for (Eigen::Index k = 0; k < t; ++k) {
        const double s = eig.values(k);
        if (s <= 1e-12 * top)
            break;
        const double candidate = (power + inv_sum + 1.0 / s) / static_cast<double>(k + 1);
        if (candidate <= 1.0 / s)
            break;
        inv_sum += 1.0 / s;
        level = candidate;
        active = k + 1;
    }
    for (Eigen::Index k = 0; k < active; ++k)
        alloc(k) = std::max(level - 1.0 / eig.values(k), 0.0);

    const Matrix& u = eig.vectors;
    return symmetrized(u * alloc.asDiagonal() * u.transpose());
}

double c_d(const ChannelPair& ch, const CovariancePair& cov)
{
    const Eigen::Index r = ch.r();
    const Matrix s = Matrix::Identity(r, r) + ch.h1 * cov.k1 * ch.h1.transpose() + ch.h2 * cov.k2 * ch.h2.transpose();
    return det(symmetrized(s));
}

CapacityResult sum_capacity(const ChannelPair& ch, double power, const WaterFillingOptions& opt)
{
    if (!(power > 0.0))
        throw Error(Errc::degenerate_input, "power must be positive");
    const Eigen::Index t = ch.t();
    CovariancePair cov{Matrix::Zero(t, t), Matrix::Zero(t, t), power};
    double prev = 0.0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        cov.k1 = water_fill(ch.h1, ch.h2 * cov.k2 * ch.h2.transpose(), power);
        cov.k2 = water_fill(ch.h2, ch.h1 * cov.k1 * ch.h1.transpose(), power);
        const double cd = c_d(ch, cov);
        const double obj = sum_rate_bits(cd);
        if (std::abs(obj - prev) < opt.tolerance_bits)
            return CapacityResult{obj, cd, cov, it};
        prev = obj;
    }
    throw Error(Errc::no_convergence, "iterative water-filling hit the iteration cap");
}

ChannelPair random_channel(Eigen::Index r, Eigen::Index t, Uniform dist, std::uint64_t seed, std::uint64_t stream)
{
    if (!(dist.lo < dist.hi))
        throw Error(Errc::degenerate_input, "uniform distribution needs lo < hi");
    CounterStream rng(seed, stream);
    Matrix h1(r, t), h2(r, t);
    for (Matrix* h : {&h1, &h2})
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < t; ++j)
                (*h)(i, j) = rng.uniform(dist.lo, dist.hi);
    return ChannelPair(std::move(h1), std::move(h2));
}

ChannelPair diagonal_random_channel(Eigen::Index dim, Uniform dist, std::uint64_t seed, std::uint64_t stream)
{
    if (!(dist.lo < dist.hi))
        throw Error(Errc::degenerate_input, "uniform distribution needs lo < hi");
    CounterStream rng(seed, stream);
    Matrix h1 = Matrix::Zero(dim, dim), h2 = Matrix::Zero(dim, dim);
    for (Matrix* h : {&h1, &h2})
        for (Eigen::Index i = 0; i < dim; ++i)
            (*h)(i, i) = rng.uniform(dist.lo, dist.hi);
    return ChannelPair(std::move(h1), std::move(h2));
}

} // namespace cfma
