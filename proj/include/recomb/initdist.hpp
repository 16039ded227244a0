#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "recomb/dynamics.hpp"
#include "recomb/measure.hpp"
#include "recomb/rng.hpp"
#include "recomb/spin.hpp"

namespace recomb {

// Initial distributions respecting the marginal sequence.  All kinds except
// Dense are "block comonotonic": sites are partitioned into blocks, each block
// driven by one shared uniform through the per-site quantile functions, blocks
// independent.  Single-site marginals are exactly p_i by construction.
enum class InitKind {
    ProductStationary,  // every site its own block: pi itself
    ComonotonicGlobal,  // one block spanning all sites
    Monochromatic,      // homogeneous marginals; same coupling as global
    Basket,             // floor(n/b) blocks of size b, leftovers independent
    Dense,              // explicit measure (small n only)
};

struct StructuredInit {
    InitKind kind = InitKind::ProductStationary;
    MarginalSequence seq;
    int block_size = 1;
    int blocks = 0;
    int full_blocks = 0;        // number of size-b baskets
    std::vector<int> block_of;  // site -> block id
    std::shared_ptr<const DenseMeasure> dense;  // Dense kind only

    int n() const { return seq.n(); }
};

StructuredInit product_stationary_init(MarginalSequence seq);
StructuredInit comonotonic_global_init(MarginalSequence seq);
StructuredInit monochromatic_init(MarginalSequence seq);  // requires homogeneous seq
StructuredInit basket_init(MarginalSequence seq, int b);
// mu must carry the marginals of seq (checked to 1e-9)
StructuredInit dense_init(MarginalSequence seq, DenseMeasure mu);

// One shared uniform drives every listed site through its quantile.
std::vector<std::uint8_t> comonotonic_draw(const MarginalSequence& seq, std::span<const int> sites,
                                           Rng& rng);

// Leaf sampler for the graphical construction.
ConfigSampler init_sampler(const StructuredInit& init);

// Exact dense law of the init.
DenseMeasure init_dense(const StructuredInit& init, std::uint64_t cap = kDenseCapDefault);
DenseMeasure comonotonic_dense(const MarginalSequence& seq, std::uint64_t cap = kDenseCapDefault);
DenseMeasure monochromatic_dense(const SpinSpace& space, const SiteMarginal& p, int n,
                                 std::uint64_t cap = kDenseCapDefault);

// Exact E[f_1^i(F_i^{-1}(U)) f_1^j(F_j^{-1}(U))] for one shared uniform U.
// The integrand is piecewise constant on the common refinement of the two CDF
// breakpoint partitions, so the integral is a finite exact sum.
double comonotonic_pair_correlation(const SiteMarginal& pi, const SiteMarginal& pj,
                                    const SpinSpace& space);

// All cross moments E[f_a^i f_b^j] for degrees a, b in 1..k-1, row-major
// (k-1)x(k-1), computed by the same interval sum.
std::vector<double> comonotonic_cross_moments(const SiteMarginal& pi, const SiteMarginal& pj,
                                              const SpinSpace& space);

// Grid minimum of the pair correlation over marginal pairs in P_delta:
// probs = delta + (1-k*delta) * c/M over all compositions c of M into k parts.
// A numerical proxy for the uniform correlation bound, not a certified one.
double rho_estimate(double delta, int k, const SpinSpace& space, int resolution);

// O(n) root draw from the depth-t graphical construction: leaf values are
// read through keyed hashes of (seed, sample, leaf, block), so the 2^t
// leaves are never materialized.  Identical (seed, sample) always yields
// the same configuration.  Not available for Dense inits.
std::vector<std::uint8_t> lazy_root_sample(const StructuredInit& init, int t, std::uint64_t seed,
                                           std::uint64_t sample);

// Keyed stationary draw (site i from its own uniform).
std::vector<std::uint8_t> lazy_stationary_sample(const MarginalSequence& seq, std::uint64_t seed,
                                                 std::uint64_t sample);

}  // namespace recomb
