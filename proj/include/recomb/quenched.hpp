#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recomb/dynamics.hpp"
#include "recomb/environment.hpp"
#include "recomb/onb.hpp"
#include "recomb/rng.hpp"

namespace recomb {

using BasisTable = std::vector<BasisPtr>;

// Per-site leaf frequencies p-hat_i(s_l).
struct EmpiricalMarginals {
    int n = 0;
    int k = 0;
    std::vector<double> freq;  // n x k row-major

    double at(int i, int l) const {
        return freq[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                    static_cast<std::size_t>(l)];
    }
};

EmpiricalMarginals empirical_marginals(const Environment& env);

// Leaf averages of the basis functions: q[i][m] = (1/N) sum_x f_m^i(xi_i(x)),
// for m = 1..k-1 (q_0 is identically 1 and not stored).
struct QuenchedMoments {
    int n = 0;
    int k = 0;
    std::vector<double> q;  // n x (k-1) row-major

    double at(int i, int m) const {  // m in 1..k-1
        return q[static_cast<std::size_t>(i) * static_cast<std::size_t>(k - 1) +
                 static_cast<std::size_t>(m - 1)];
    }
    // A_xi = sum over sites and degrees of q^2
    double squared_total() const;
};

QuenchedMoments quenched_moments(const Environment& env, const BasisTable& bases);

// Same moments accumulated leaf by leaf, so the 2^t leaves never need to be
// stored at once.
QuenchedMoments quenched_moments_streaming(const ConfigSampler& draw_leaf, const BasisTable& bases,
                                           int n, int t, Rng& rng);

// Radon-Nikodym derivative of the quenched product measure against pi at one
// configuration: prod_i phat_i(sigma_i) / p_i(sigma_i).
double quenched_density(const EmpiricalMarginals& emp, const BasisTable& bases,
                        std::span<const std::uint8_t> sigma);

// The expanded form prod_i (1 + sum_m q_m(i) f_m^i(sigma_i)); agrees with
// quenched_density pointwise.
double density_expansion(const QuenchedMoments& moments, const BasisTable& bases,
                         std::span<const std::uint8_t> sigma);

// prod_i (1 + sum_m q_m(i)^2) - 1, evaluated in log space: the squared
// L2(pi) norm of the density fluctuation h - 1.
double quenched_l2_fluctuation(const QuenchedMoments& moments);

struct HhatBounds {
    double a = 0.0;      // A_xi, the summed squared moments
    double bound1 = 0.0;  // 2 + sqrt(A_xi)
    double bound2 = 0.0;  // sqrt(e^{A_xi} - A_xi - 1), +inf when e^{A_xi} overflows
    double combined = 0.0;
};

// Per-environment L1(pi) bounds on the truncated density estimator minus one;
// half the combined bound dominates the quenched TV contribution.
HhatBounds hhat_l1_bounds(const QuenchedMoments& moments);

}  // namespace recomb
