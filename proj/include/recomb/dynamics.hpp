#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "recomb/environment.hpp"
#include "recomb/measure.hpp"
#include "recomb/rng.hpp"

namespace recomb {

// One exact trajectory mu_0, mu_1, ..., mu_T of the recombination map.
struct EvolutionTrace {
    std::vector<DenseMeasure> steps;

    const DenseMeasure& initial() const { return steps.front(); }
    const DenseMeasure& at(int t) const { return steps[static_cast<std::size_t>(t)]; }
    int horizon() const { return static_cast<int>(steps.size()) - 1; }
};

// Collision product 2^{-n} sum_A (nu1)_A x (nu2)_{A^c} via precomputed
// subset marginals (cost O(2^n k^n)).  The sum is grouped over the pairs
// {A, A^c}, which makes recombine(mu, nu) and recombine(nu, mu) agree
// bit for bit.
DenseMeasure recombine(const DenseMeasure& nu1, const DenseMeasure& nu2,
                       std::uint64_t cap = kDenseCapDefault);

// Same measure through the O(k^{3n}) parent-pair sum: each parent pair
// (tau, tau') produces sigma with per-site inheritance probability
// (1{tau_i=sigma_i} + 1{tau'_i=sigma_i})/2.  Oracle use only.
DenseMeasure recombine_bruteforce(const DenseMeasure& nu1, const DenseMeasure& nu2);

// Each step is explicitly renormalized to unit mass: the quadratic map
// doubles any mass defect per step, which would otherwise amplify harmless
// rounding noise by 2^t.
EvolutionTrace evolve_exact(const DenseMeasure& mu, int t,
                            std::uint64_t cap = kDenseCapDefault);

// Draws one configuration (spin indices) into `out`.
using ConfigSampler = std::function<void(Rng&, std::span<std::uint8_t>)>;

// Inverse-CDF sampler over the dense weight vector.
ConfigSampler dense_sampler(const DenseMeasure& mu);

// Graphical construction: N = 2^t i.i.d. leaves xi(1..N), independent
// uniform indices U_i, root sigma*_i = xi_i(U_i).  The law of the root
// is mu_t.
std::vector<std::uint8_t> sample_root(const ConfigSampler& draw_leaf, int n, int t, Rng& rng);

// The leaves themselves, for quenched analysis.
Environment sample_environment(const ConfigSampler& draw_leaf, int n, int k, int t, Rng& rng,
                               std::string source = {});

// First time the binary fragmentation of [n] reaches the partition into
// singletons.  Tracked on pair-separation indicators: a pair still in a
// common block separates when the step's fair site-bits differ.
int fragmentation_time(int n, Rng& rng);

// Exact mixture over all N^n assignments (U_1..U_n) of the product of
// block marginals; equals the t-step evolution.  Tiny instances only.
DenseMeasure partition_average_oracle(const DenseMeasure& mu, int t);

}  // namespace recomb
