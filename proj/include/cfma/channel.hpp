#pragma once

#include <cstdint>

#include "cfma/matkernel.hpp"

namespace cfma {

struct ChannelPair {
    Matrix h1;
    Matrix h2;

    ChannelPair() = default;
    ChannelPair(Matrix a, Matrix b);

    Eigen::Index r() const { return h1.rows(); }
    Eigen::Index t() const { return h1.cols(); }
    const Matrix& h(int user) const { return user == 0 ? h1 : h2; }
};

struct CovariancePair {
    Matrix k1;
    Matrix k2;
    double power = 0.0;

    const Matrix& k(int user) const { return user == 0 ? k1 : k2; }
    bool feasible(double tol = 1e-9) const;
};

struct CapacityResult {
    double c_sum = 0.0;
    double c_d = 1.0;
    CovariancePair covariances;
    int iterations = 0;
};

struct WaterFillingOptions {
    double tolerance_bits = 1e-10;
    int max_iterations = 10000;
};

struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
};

// Single-user water-filling of `h` against unit-variance noise plus
// `interference` (a PSD r x r covariance). Returns the optimal K.
Matrix water_fill(const Matrix& h, const Matrix& interference, double power);

CapacityResult sum_capacity(const ChannelPair& ch, double power, const WaterFillingOptions& opt = {});

double c_d(const ChannelPair& ch, const CovariancePair& cov);

inline double sum_rate_bits(double cd) { return 0.5 * std::log2(cd); }

ChannelPair random_channel(Eigen::Index r, Eigen::Index t, Uniform dist, std::uint64_t seed, std::uint64_t stream = 0);
ChannelPair diagonal_random_channel(Eigen::Index dim, Uniform dist, std::uint64_t seed, std::uint64_t stream = 0);

} // namespace cfma
