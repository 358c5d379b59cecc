#include "cfma/pcs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfma {

PcsSystem make_pcs_system(Matrix h_tilde, int t1, int t2)
{
    if (h_tilde.cols() != t1 + t2)
        throw Error(Errc::dimension_mismatch, "effective channel width must equal t1 + t2");
    PcsSystem sys;
    sys.t1 = t1;
    sys.t2 = t2;
    const Eigen::Index m = h_tilde.cols();
    const Matrix gram = Matrix::Identity(m, m) + h_tilde.transpose() * h_tilde;
    sys.gram_inverse = symmetrized(gram.llt().solve(Matrix::Identity(m, m)));
    const Eigen::LLT<Matrix> llt(sys.gram_inverse);
    sys.l_factor = llt.matrixL().transpose();
    sys.h_tilde = std::move(h_tilde);
    return sys;
}

PcsSystem build_equivalent_simo(const ChannelPair& ch, const CovariancePair& cov, double rank_threshold)
{
    const double cut = rank_threshold * std::max(1.0, cov.power);
    Tolerances tol;
    tol.zero_pivot = std::max(tol.zero_pivot, rank_threshold);
    std::vector<Matrix> blocks;
    int ranks[2] = {0, 0};
    for (int l = 0; l < 2; ++l) {
        const SymEigen<double> eig = sym_eigen(cov.k(l));
        Vector kept = eig.values;
        int rank = 0;
        for (Eigen::Index i = 0; i < kept.size(); ++i) {
            if (kept(i) > cut)
                ++rank;
            else
                kept(i) = 0.0;
        }
        const Matrix k = symmetrized(eig.vectors * kept.asDiagonal() * eig.vectors.transpose());
        const Matrix hb = ch.h(l) * cholesky(k, tol);
        const Eigen::Index t = hb.cols();
        if (rank < t && hb.rightCols(t - rank).norm() > 1e-7)
            throw Error(Errc::rank_mismatch, "precoded channel has energy beyond the covariance rank");
        blocks.push_back(hb.leftCols(rank));
        ranks[l] = rank;
    }
    Matrix h_tilde(ch.r(), ranks[0] + ranks[1]);
    h_tilde << blocks[0], blocks[1];
    return make_pcs_system(std::move(h_tilde), ranks[0], ranks[1]);
}

namespace {

Matrix scaled_rows(const IntMatrix& a, const Vector& beta)
{
    return a.cast<double>() * beta.asDiagonal();
}

Matrix projection_gram(const PcsSystem& sys, const Matrix& ae)
{
    return symmetrized(ae * sys.gram_inverse * ae.transpose());
}

void require_conforming(const PcsSystem& sys, Eigen::Index cols, const Vector& beta)
{
    if (cols != sys.dim() || beta.size() != sys.dim())
        throw Error(Errc::dimension_mismatch, "coefficient width must equal t1 + t2");
}

Eigen::LDLT<Matrix> factor_projection(const Matrix& gram)
{
    Eigen::LDLT<Matrix> ldlt(gram);
    const double scale = std::max(1e-300, gram.diagonal().cwiseAbs().maxCoeff());
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-12 * scale)
        throw Error(Errc::singular_projection, "previous combinations are linearly dependent");
    return ldlt;
}

} // namespace

double effective_noise(const PcsSystem& sys, const IntMatrix& a_prev, const IntVector& a_j, const Vector& beta)
{
    require_conforming(sys, a_j.size(), beta);
    const Eigen::Index m = sys.dim();
    const Matrix& l = sys.l_factor;
    const Vector lea = l * beta.asDiagonal() * a_j.cast<double>();
    if (a_prev.rows() == 0)
        return lea.squaredNorm();
    require_conforming(sys, a_prev.cols(), beta);
    const Matrix ae = scaled_rows(a_prev, beta);
    const Eigen::LDLT<Matrix> ldlt = factor_projection(projection_gram(sys, ae));
    const Matrix lea_prev = l * ae.transpose(); // m x k
    const Matrix proj = Matrix::Identity(m, m) - lea_prev * ldlt.solve(lea_prev.transpose());
    return (proj * lea).squaredNorm();
}

PcsEqualizer optimal_equalizer(const PcsSystem& sys, const IntMatrix& a_prev, const IntVector& a_j,
                               const Vector& beta)
{
    require_conforming(sys, a_j.size(), beta);
    const Eigen::Index r = sys.h_tilde.rows();
    const Vector ea = beta.asDiagonal() * a_j.cast<double>();
    PcsEqualizer eq;
    Vector v = ea;
    if (a_prev.rows() > 0) {
        const Matrix ae = scaled_rows(a_prev, beta);
        const Eigen::LDLT<Matrix> ldlt = factor_projection(projection_gram(sys, ae));
        eq.q = ldlt.solve(ae * sys.gram_inverse * ea);
        v -= ae.transpose() * eq.q;
    } else {
        eq.q = Vector(0);
    }
    const Matrix& h = sys.h_tilde;
    const Matrix inner = Matrix::Identity(r, r) + h * h.transpose();
    eq.b = inner.llt().solve(h * v);
    return eq;
}

double noise_variance(const PcsSystem& sys, const IntMatrix& a_prev, const IntVector& a_j, const Vector& beta,
                      const PcsEqualizer& eq)
{
    Vector resid = beta.asDiagonal() * a_j.cast<double>() - sys.h_tilde.transpose() * eq.b;
    if (a_prev.rows() > 0)
        resid -= beta.asDiagonal() * a_prev.cast<double>().transpose() * eq.q;
    return eq.b.squaredNorm() + resid.squaredNorm();
}

Vector noise_profile(const PcsSystem& sys, const IntMatrix& a, const Vector& beta)
{
    require_conforming(sys, a.cols(), beta);
    const Matrix gram = projection_gram(sys, scaled_rows(a, beta));
    // Unpivoted LDL': the j-th pivot is the residual of row j after
    // projecting out rows 1..j-1.
    const Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw Error(Errc::singular_projection, "coefficient matrix is rank deficient");
    const Matrix c = llt.matrixL();
    Vector out = c.diagonal().array().square();
    if (out.minCoeff() <= 1e-14 * gram.diagonal().maxCoeff())
        throw Error(Errc::singular_projection, "coefficient matrix is rank deficient");
    return out;
}

PcsRates pcs_rates(const PcsSystem& sys, const IntMatrix& a, const Vector& beta)
{
    PcsRates out;
    out.sigma_hat2 = noise_profile(sys, a, beta);
    const Eigen::Index m = sys.dim();
    out.rates = Vector::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double rate = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < a.rows(); ++j)
            if (a(j, i) != 0)
                rate = std::min(rate, std::max(0.0, 0.5 * std::log2(beta(i) * beta(i) / out.sigma_hat2(j))));
        out.rates(i) = std::isfinite(rate) ? rate : 0.0;
    }
    out.sum = out.rates.sum();
    return out;
}

std::vector<double> BetaGrid::values() const
{
    if (points <= 1)
        return {1.0};
    std::vector<double> v;
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int k = 0; k < points; ++k)
        v.push_back(std::exp(llo + (lhi - llo) * k / (points - 1)));
    if (std::none_of(v.begin(), v.end(), [](double x) { return std::abs(x - 1.0) < 1e-12; }))
        v.push_back(1.0);
    std::sort(v.begin(), v.end());
    return v;
}

namespace {

constexpr double kRel = 1e-9;

bool leq(double x, double y) { return x <= y * (1.0 + kRel) + 1e-300; }

// Codebook i -> combination pi[i] meeting the support, bottleneck, beta and
// ordering conditions. Tries assignments in lexicographic order.
std::optional<std::vector<int>> find_assignment(const IntMatrix& a, const Vector& beta, const Vector& sigma2)
{
    const int m = static_cast<int>(a.cols());
    std::vector<std::vector<int>> allowed(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double worst = 0.0;
        for (int j = 0; j < m; ++j)
            if (a(j, i) != 0)
                worst = std::max(worst, sigma2(j));
        if (!leq(worst, beta(i) * beta(i)))
            return std::nullopt;
        for (int j = 0; j < m; ++j)
            if (a(j, i) != 0 && leq(worst, sigma2(j)))
                allowed[static_cast<std::size_t>(i)].push_back(j);
    }
    std::vector<int> pi(static_cast<std::size_t>(m));
    std::iota(pi.begin(), pi.end(), 0);
    do {
        bool ok = true;
        for (int i = 0; i < m && ok; ++i) {
            const auto& al = allowed[static_cast<std::size_t>(i)];
            ok = std::find(al.begin(), al.end(), pi[static_cast<std::size_t>(i)]) != al.end();
            if (ok && i > 0)
                ok = leq(sigma2(pi[static_cast<std::size_t>(i - 1)]), sigma2(pi[static_cast<std::size_t>(i)]));
        }
        if (ok)
            return pi;
    } while (std::next_permutation(pi.begin(), pi.end()));
    return std::nullopt;
}

double capacity_of(const PcsSystem& sys)
{
    const Eigen::Index r = sys.h_tilde.rows();
    return 0.5 * std::log2(det(symmetrized(Matrix::Identity(r, r) + sys.h_tilde * sys.h_tilde.transpose())));
}

} // namespace

bool verify_witness(const PcsSystem& sys, const PcsWitness& w, std::string* why)
{
    auto fail = [&](const char* msg) {
        if (why)
            *why = msg;
        return false;
    };
    const int m = sys.dim();
    if (w.a.rows() != m || w.a.cols() != m || w.beta.size() != m || static_cast<int>(w.pi.size()) != m)
        return fail("witness dimensions do not match the system");
    if (m == 0)
        return true;
    if (std::llabs(integer_det(w.a)) != 1)
        return fail("coefficient matrix is not unimodular");
    std::vector<int> sorted = w.pi;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < m; ++i)
        if (sorted[static_cast<std::size_t>(i)] != i)
            return fail("assignment is not a permutation");
    const PcsRates rates = pcs_rates(sys, w.a, w.beta);
    for (int i = 0; i < m; ++i) {
        const int j = w.pi[static_cast<std::size_t>(i)];
        if (w.a(j, i) == 0)
            return fail("codebook assigned to a combination that does not contain it");
        if (!leq(rates.sigma_hat2(j), w.beta(i) * w.beta(i)))
            return fail("beta below the assigned noise level");
        if (i > 0 && !leq(rates.sigma_hat2(w.pi[static_cast<std::size_t>(i - 1)]), rates.sigma_hat2(j)))
            return fail("assigned noise levels are not nondecreasing");
    }
    if (std::abs(rates.sum - capacity_of(sys)) > 1e-7)
        return fail("rates do not sum to capacity");
    return true;
}

PcsReport pcs_check(const ChannelPair& ch, double power, const PcsSearch& search)
{
    return pcs_check(ch, sum_capacity(ch, power), search);
}

PcsReport pcs_check(const ChannelPair& ch, const CapacityResult& capacity, const PcsSearch& search)
{
    PcsReport report;
    report.system = build_equivalent_simo(ch, capacity.covariances);
    report.capacity_bits = capacity.c_sum;
    const PcsSystem& sys = report.system;
    const int m = sys.dim();
    if (m == 0) {
        report.achievable = true;
        report.witness = PcsWitness{IntMatrix(0, 0), {}, Vector(0), Vector(0), Vector(0)};
        return report;
    }

    const std::vector<double> grid = search.beta_grid.values();
    std::vector<Vector> betas;
    std::vector<std::size_t> idx(static_cast<std::size_t>(m - 1), 0);
    while (true) {
        Vector b(m);
        b(0) = 1.0;
        for (int i = 1; i < m; ++i)
            b(i) = grid[idx[static_cast<std::size_t>(i - 1)]];
        betas.push_back(b);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == grid.size())
            idx[k++] = 0;
        if (k == idx.size())
            break;
    }

    enumerate_unimodular(
        m, search.entry_bound,
        [&](const IntMatrix& a) {
            if (report.candidates_examined >= search.max_candidates) {
                report.budget_exhausted = true;
                return false;
            }
            ++report.candidates_examined;
            for (const Vector& beta : betas) {
                const Vector sigma2 = noise_profile(sys, a, beta);
                const auto pi = find_assignment(a, beta, sigma2);
                if (!pi)
                    continue;
                PcsWitness w{a, *pi, beta, sigma2, pcs_rates(sys, a, beta).rates};
                if (!verify_witness(sys, w))
                    continue;
                report.achievable = true;
                report.sum_rate = w.rates.sum();
                report.witness = std::move(w);
                return false;
            }
            return true;
        },
        UnimodularOptions{true});
    return report;
}

} // namespace cfma
