// Shared generators for the test binaries.  Everything is driven by the
// project Rng so failures replay exactly.
#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "recomb/measure.hpp"
#include "recomb/rng.hpp"
#include "recomb/spin.hpp"

namespace testgen {

inline std::vector<double> random_probs(int k, recomb::Rng& rng, double floor = 0.05) {
    std::vector<double> w(static_cast<std::size_t>(k));
    double tot = 0.0;
    for (double& v : w) {
        v = floor + rng.next_unit();
        tot += v;
    }
    for (double& v : w) v /= tot;
    double sum = 0.0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) sum += w[l];
    w.back() = 1.0 - sum;  // exact unit mass
    return w;
}

inline recomb::MarginalSequence random_sequence(int n, int k, recomb::Rng& rng) {
    std::vector<recomb::SiteMarginal> sites;
    sites.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sites.emplace_back(random_probs(k, rng));
    return recomb::MarginalSequence(recomb::SpinSpace::standard(k), std::move(sites));
}

inline recomb::MarginalSequence random_homogeneous(int n, int k, recomb::Rng& rng) {
    return recomb::MarginalSequence(recomb::SpinSpace::standard(k),
                                    recomb::SiteMarginal(random_probs(k, rng)), n);
}

inline recomb::DenseMeasure random_measure(int n, int k, recomb::Rng& rng) {
    const std::uint64_t sz = recomb::dense_size(n, k);
    std::vector<double> w(sz);
    double tot = 0.0;
    for (double& v : w) {
        v = rng.next_unit() + 1e-3;
        tot += v;
    }
    for (double& v : w) v /= tot;
    return recomb::DenseMeasure(n, k, std::move(w)).renormalized();
}

// Random measure with the exact marginals of seq, built from the product
// measure by rectangle moves: pick sites i<j, levels a!=b at i and c!=d at
// j, and shift mass eps along (a,c)+,(a,d)-,(b,c)-,(b,d)+ with the other
// sites fixed.  Every move leaves all single-site marginals untouched, so
// the result stays inside the marginal polytope while drifting away from
// the product measure.
inline recomb::DenseMeasure marginal_respecting_measure(const recomb::MarginalSequence& seq,
                                                        recomb::Rng& rng, int moves = 200) {
    using namespace recomb;
    const int n = seq.n();
    const int k = seq.k();
    DenseMeasure pi = product_measure(seq);
    std::vector<double> w(pi.weights());
    if (n < 2) return pi;

    std::vector<std::uint64_t> pow_site(static_cast<std::size_t>(n));
    {
        std::uint64_t p = 1;
        for (int i = n - 1; i >= 0; --i) {
            pow_site[static_cast<std::size_t>(i)] = p;
            p *= static_cast<std::uint64_t>(k);
        }
    }

    for (int mv = 0; mv < moves; ++mv) {
        const int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
        if (j >= i) ++j;
        const int a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
        int b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k - 1)));
        if (b >= a) ++b;
        const int c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
        int d = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k - 1)));
        if (d >= c) ++d;

        // random base configuration for the untouched sites
        std::uint64_t base = 0;
        for (int s = 0; s < n; ++s) {
            if (s == i || s == j) continue;
            base += rng.next_below(static_cast<std::uint64_t>(k)) * pow_site[static_cast<std::size_t>(s)];
        }
        const std::uint64_t pi_pow = pow_site[static_cast<std::size_t>(i)];
        const std::uint64_t pj_pow = pow_site[static_cast<std::size_t>(j)];
        const std::uint64_t iac = base + static_cast<std::uint64_t>(a) * pi_pow + static_cast<std::uint64_t>(c) * pj_pow;
        const std::uint64_t iad = base + static_cast<std::uint64_t>(a) * pi_pow + static_cast<std::uint64_t>(d) * pj_pow;
        const std::uint64_t ibc = base + static_cast<std::uint64_t>(b) * pi_pow + static_cast<std::uint64_t>(c) * pj_pow;
        const std::uint64_t ibd = base + static_cast<std::uint64_t>(b) * pi_pow + static_cast<std::uint64_t>(d) * pj_pow;

        const double eps = 0.5 * rng.next_unit() * std::min(w[iad], w[ibc]);
        if (!(eps > 0.0)) continue;
        w[iac] += eps;
        w[ibd] += eps;
        w[iad] -= eps;
        w[ibc] -= eps;
    }
    return recomb::DenseMeasure(n, k, std::move(w));
}

}  // namespace testgen
