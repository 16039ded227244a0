#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recomb/initdist.hpp"
#include "recomb/onb.hpp"
#include "recomb/quenched.hpp"
#include "recomb/stats.hpp"

namespace recomb {

// (k-1) n 2^{-t}, clamped at 1 since it bounds a total variation distance.
double upper_bound_linear(int n, int k, int t);

// x/2 below 1, 1 - 1/(1+x^2) from 1 on; continuous and nondecreasing.
double phi(double x);

struct PhiBound {
    double value = 0.0;
    bool in_regime = false;  // requires n 2^{-t} >= log2 / (2(k-1))
};

// 1 - (1/2) e^{-2(k-1) n 2^{-t}} inside the regime; outside it the linear
// bound is returned with in_regime = false.
PhiBound upper_bound_phi(int n, int k, int t);

struct BasketExperimentConfig {
    int n = 0;
    int t = 0;
    int b = 1;
    double threshold_factor = 20.0;  // block indicator: Xi_j >= threshold_factor * b
    double fraction = 1.0 / 15.0;    // test event: Z >= fraction * a
    std::int64_t samples_mu = 20000;
    std::int64_t samples_pi = 20000;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct BasketReport {
    int a = 0;  // number of full blocks
    int b = 1;
    bool degenerate = false;  // a < 15, the test event barely discriminates
    Estimate pi_event;        // pi(Z >= fraction a)
    Estimate mu_event;        // mu_t(Z >= fraction a)
    Estimate pi_block_mean;   // E_pi[Xi_j]
    Estimate mu_block_mean;   // E_mu_t[Xi_j]
    double tv_lower = 0.0;    // max(0, mu_event - pi_event - 2 SE_diff)
};

// Empirical lower bound on the TV distance through the block-magnetization
// test event.  Sampling is O(n) per draw on both laws via keyed leaves.
BasketReport basket_experiment(const BasketExperimentConfig& cfg, const StructuredInit& init);

struct BlockMomentReport {
    int a = 0;
    int b = 1;
    Estimate mean_xi;   // blocks treated as independent observations
    Estimate mean_xi2;
    double ratio = 0.0;               // E[Xi^2] / E[Xi]^2
    double first_moment_floor = 0.0;  // b + b(b-1) 2^{-t} rho
};

// Second-moment control behind the Paley-Zygmund step: the ratio should
// stay below 3.1 for large blocks, and the first moment above the floor.
BlockMomentReport evolved_block_second_moment_check(const BasketExperimentConfig& cfg,
                                                    const StructuredInit& init, double rho);

// The two-site interaction statistic at depth t.  Pair cross-moments under
// the initial law are exact (interval sums for block-comonotonic inits,
// dense marginalization otherwise); pairs in different blocks contribute
// nothing.
class Q2Statistic {
  public:
    Q2Statistic(const StructuredInit& init, const BasisTable& bases, int t);

    // Q2(sigma) = (1/N) sum_{i<j} sum_{m,m'} E_mu[f_m^i f_{m'}^j] f_m^i(sigma_i) f_{m'}^j(sigma_j)
    double value(std::span<const std::uint8_t> sigma) const;

    // E_pi[Q2^2] = (1/N^2) sum over pairs and degrees of the squared
    // cross-moment (orthonormality kills every cross term).
    double second_moment_exact() const;

    int t() const { return t_; }

  private:
    int n_ = 0;
    int k_ = 0;
    int t_ = 0;
    double inv_n_leaves_ = 1.0;
    BasisTable bases_;
    std::vector<int> pair_i_, pair_j_;      // same-block pairs only
    std::vector<std::size_t> pair_table_;   // offset into cross_
    std::vector<double> cross_;             // concatenated (k-1)^2 tables
};

// Monte Carlo E_pi[Q2^2] with sigma ~ pi drawn through keyed uniforms.
Estimate q2_second_moment_mc(const Q2Statistic& q2, const MarginalSequence& seq,
                             std::int64_t samples, std::uint64_t seed, int threads);

}  // namespace recomb
