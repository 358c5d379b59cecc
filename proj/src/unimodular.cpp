#include <algorithm>
#include <cstdlib>

#include "cfma/pcs.hpp"

namespace cfma {

long long integer_det(const IntMatrix& a)
{
    if (a.rows() != a.cols())
        throw Error(Errc::dimension_mismatch, "determinant of a non-square matrix");
    const Eigen::Index n = a.rows();
    if (n == 0)
        return 1;
    // Bareiss fraction-free elimination.
    std::vector<std::vector<__int128>> m(static_cast<std::size_t>(n), std::vector<__int128>(static_cast<std::size_t>(n)));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m[i][j] = a(i, j);
    __int128 prev = 1;
    int sign = 1;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            Eigen::Index swap = k + 1;
            while (swap < n && m[swap][k] == 0)
                ++swap;
            if (swap == n)
                return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * static_cast<long long>(m[n - 1][n - 1]);
}

namespace {

int entry_rank(long long v) { return v == 0 ? 0 : static_cast<int>(2 * std::llabs(v) - (v > 0 ? 1 : 0)); }

std::vector<IntVector> candidate_rows(int dim, int bound, bool canonical)
{
    std::vector<IntVector> rows;
    IntVector v = IntVector::Constant(dim, -bound);
    while (true) {
        if (!v.isZero()) {
            Eigen::Index first = 0;
            while (v(first) == 0)
                ++first;
            if (!canonical || v(first) > 0)
                rows.push_back(v);
        }
        Eigen::Index i = 0;
        while (i < dim && v(i) == bound)
            v(i++) = -bound;
        if (i == dim)
            break;
        ++v(i);
    }
    auto key = [](const IntVector& r) {
        std::vector<long long> k{r.cwiseAbs().maxCoeff(), r.cwiseAbs().sum()};
        for (Eigen::Index i = 0; i < r.size(); ++i)
            k.push_back(entry_rank(r(i)));
        return k;
    };
    std::stable_sort(rows.begin(), rows.end(), [&](const IntVector& x, const IntVector& y) { return key(x) < key(y); });
    return rows;
}

class Walker {
public:
    Walker(int dim, std::vector<IntVector> rows, const std::function<bool(const IntMatrix&)>& visit)
        : dim_(dim), rows_(std::move(rows)), visit_(visit), current_(dim, dim), basis_(dim, dim),
          used_(rows_.size(), false)
    {
    }

    void run()
    {
        for (std::size_t layer = 0; layer < rows_.size() && !stopped_; ++layer) {
            layer_ = layer;
            descend(0, false);
        }
    }

private:
    void descend(int depth, bool has_layer)
    {
        if (stopped_)
            return;
        if (depth == dim_) {
            if (std::llabs(integer_det(current_)) == 1 && !visit_(current_))
                stopped_ = true;
            return;
        }
        const bool must_take_layer = !has_layer && depth == dim_ - 1;
        const std::size_t lo = must_take_layer ? layer_ : 0;
        for (std::size_t idx = lo; idx <= layer_ && !stopped_; ++idx) {
            if (used_[idx])
                continue;
            Vector v = rows_[idx].cast<double>();
            for (int k = 0; k < depth; ++k)
                v -= basis_.row(k).transpose() * basis_.row(k).dot(v);
            if (v.squaredNorm() <= 1e-9)
                continue;
            basis_.row(depth) = v.normalized().transpose();
            current_.row(depth) = rows_[idx].transpose();
            used_[idx] = true;
            descend(depth + 1, has_layer || idx == layer_);
            used_[idx] = false;
        }
    }

    int dim_;
    std::vector<IntVector> rows_;
    const std::function<bool(const IntMatrix&)>& visit_;
    IntMatrix current_;
    Matrix basis_;
    std::vector<bool> used_;
    std::size_t layer_ = 0;
    bool stopped_ = false;
};

} // namespace

void enumerate_unimodular(int dim, int bound, const std::function<bool(const IntMatrix&)>& visit,
                          UnimodularOptions opt)
{
    if (dim < 1 || dim > 6 || bound < 1 || bound > 5)
        throw Error(Errc::search_space_too_large, "unimodular search limited to dim <= 6 and entry bound <= 5");
    Walker(dim, candidate_rows(dim, bound, opt.canonical_signs), visit).run();
}

std::vector<IntMatrix> unimodular_matrices(int dim, int bound, UnimodularOptions opt)
{
    std::vector<IntMatrix> out;
    enumerate_unimodular(
        dim, bound,
        [&](const IntMatrix& a) {
            out.push_back(a);
            return true;
        },
        opt);
    return out;
}

} // namespace cfma
