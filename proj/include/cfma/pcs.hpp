#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfma/channel.hpp"

namespace cfma {

struct PcsSystem {
    Matrix h_tilde;      // r x (t1 + t2)
    int t1 = 0;
    int t2 = 0;
    Matrix l_factor;     // L with L'L = (I + H~'H~)^-1
    Matrix gram_inverse; // L'L

    int dim() const { return t1 + t2; }
};

PcsSystem make_pcs_system(Matrix h_tilde, int t1, int t2);
PcsSystem build_equivalent_simo(const ChannelPair& ch, const CovariancePair& cov, double rank_threshold = 1e-8);

// sigma_j^2 after cancelling the combinations in the rows of a_prev.
double effective_noise(const PcsSystem& sys, const IntMatrix& a_prev, const IntVector& a_j, const Vector& beta);

struct PcsEqualizer {
    Vector b; // receive equalizer, length r
    Vector q; // weights on previously decoded combinations
};

PcsEqualizer optimal_equalizer(const PcsSystem& sys, const IntMatrix& a_prev, const IntVector& a_j,
                               const Vector& beta);
double noise_variance(const PcsSystem& sys, const IntMatrix& a_prev, const IntVector& a_j, const Vector& beta,
                      const PcsEqualizer& eq);

// sigma_j^2 for every row of A (rows in decode order) in one factorization.
Vector noise_profile(const PcsSystem& sys, const IntMatrix& a, const Vector& beta);

struct PcsRates {
    Vector rates;
    Vector sigma_hat2;
    double sum = 0.0;
};

PcsRates pcs_rates(const PcsSystem& sys, const IntMatrix& a, const Vector& beta);

long long integer_det(const IntMatrix& a);

struct UnimodularOptions {
    // Keep only rows whose first nonzero entry is positive.
    bool canonical_signs = false;
};

// Visits integer matrices with entries in [-bound, bound] and determinant +-1
// in a fixed order; returning false from `visit` stops the walk. Rows are
// ordered by (max |entry|, L1 norm, entries) and matrices are grouped by
// their largest row index, so the walk for a smaller bound is a prefix of the
// walk for a larger one.
void enumerate_unimodular(int dim, int bound, const std::function<bool(const IntMatrix&)>& visit,
                          UnimodularOptions opt = {});
std::vector<IntMatrix> unimodular_matrices(int dim, int bound, UnimodularOptions opt = {});

struct BetaGrid {
    int points = 5;
    double lo = 0.5;
    double hi = 2.0;

    std::vector<double> values() const;
};

struct PcsSearch {
    int entry_bound = 3;
    BetaGrid beta_grid;
    long long max_candidates = 100000;
};

struct PcsWitness {
    IntMatrix a;
    std::vector<int> pi; // codebook i is limited by combination pi[i]
    Vector beta;
    Vector sigma_hat2;
    Vector rates;
};

struct PcsReport {
    bool achievable = false;
    std::optional<PcsWitness> witness;
    double sum_rate = 0.0;
    double capacity_bits = 0.0;
    long long candidates_examined = 0;
    bool budget_exhausted = false;
    PcsSystem system;
};

bool verify_witness(const PcsSystem& sys, const PcsWitness& w, std::string* why = nullptr);

PcsReport pcs_check(const ChannelPair& ch, double power, const PcsSearch& search = {});
PcsReport pcs_check(const ChannelPair& ch, const CapacityResult& capacity, const PcsSearch& search = {});

} // namespace cfma
