#include "recomb/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <utility>

#include "recomb/errors.hpp"

namespace recomb {

namespace {

// Flat storage for the marginal tables of every subset of [n]: mask A gets
// k^{|A|} slots starting at offset[A].  Subindex convention matches the global
// one (lowest retained site = most significant base-k digit), so the table for
// the full mask is the measure itself.  `place` maps a subindex to its additive
// contribution to the full configuration index; for disjoint masks the
// contributions just add.
struct SubsetGeometry {
    int n = 0;
    int k = 0;
    std::uint32_t full = 0;
    std::vector<std::uint64_t> offset;  // 2^n + 1 entries
    std::vector<std::uint32_t> size;    // k^{|A|}
    std::vector<std::uint32_t> place;
};

SubsetGeometry build_geometry(int n, int k, std::uint64_t cap) {
    // sum over A of k^{|A|} is (k+1)^n entries; refuse before allocating
    const std::uint64_t entry_cap = 4 * std::min<std::uint64_t>(cap, std::uint64_t(1) << 40);
    std::uint64_t total_entries = 1;
    for (int i = 0; i < n; ++i) {
        total_entries *= static_cast<std::uint64_t>(k) + 1;
        if (total_entries > entry_cap)
            throw CapacityExceeded("subset-marginal tables need (k+1)^n > " +
                                   std::to_string(entry_cap) + " entries");
    }

    SubsetGeometry g;
    g.n = n;
    g.k = k;
    g.full = (std::uint32_t(1) << n) - 1;
    const std::uint32_t masks = g.full + 1;

    g.offset.resize(static_cast<std::size_t>(masks) + 1);
    g.size.resize(masks);
    std::uint64_t total = 0;
    for (std::uint32_t A = 0; A < masks; ++A) {
        std::uint64_t sz = 1;
        for (int c = std::popcount(A); c > 0; --c) sz *= static_cast<std::uint64_t>(k);
        g.offset[A] = total;
        g.size[A] = static_cast<std::uint32_t>(sz);
        total += sz;
    }
    g.offset[masks] = total;

    g.place.resize(total);
    std::vector<std::uint32_t> pow_site(static_cast<std::size_t>(n));
    {
        std::uint32_t p = 1;
        for (int i = n - 1; i >= 0; --i) {
            pow_site[static_cast<std::size_t>(i)] = p;
            p *= static_cast<std::uint32_t>(k);
        }
    }
    // the lowest site of A carries the most significant digit of the subindex
    for (std::uint32_t A = 1; A < masks; ++A) {
        const int j = std::countr_zero(A);
        const std::uint32_t rest = A & (A - 1);
        const std::uint32_t rest_sz = g.size[rest];
        std::uint32_t* dst = g.place.data() + g.offset[A];
        const std::uint32_t* src = g.place.data() + g.offset[rest];
        for (int d = 0; d < k; ++d) {
            const std::uint32_t base = static_cast<std::uint32_t>(d) * pow_site[static_cast<std::size_t>(j)];
            for (std::uint32_t r = 0; r < rest_sz; ++r) dst[static_cast<std::size_t>(d) * rest_sz + r] = base + src[r];
        }
    }
    return g;
}

// All 2^n marginals of mu, filled top-down: the table for A is obtained from
// the table for A + its lowest missing site by summing that site out.
std::vector<double> subset_marginals(const DenseMeasure& mu, const SubsetGeometry& g) {
    std::vector<double> tab(g.offset.back(), 0.0);
    std::copy(mu.weights().begin(), mu.weights().end(), tab.begin() + static_cast<std::ptrdiff_t>(g.offset[g.full]));
    for (std::uint32_t A = g.full; A-- > 0;) {
        const int j = std::countr_zero(~A & g.full);  // sites 0..j-1 all present in A
        const std::uint32_t parent = A | (std::uint32_t(1) << j);
        const int m = std::popcount(parent);
        std::uint32_t lo_sz = 1;
        for (int c = m - 1 - j; c > 0; --c) lo_sz *= static_cast<std::uint32_t>(g.k);
        const std::uint32_t hi_sz = g.size[A] / lo_sz;
        double* child = tab.data() + g.offset[A];
        const double* par = tab.data() + g.offset[parent];
        for (std::uint32_t hi = 0; hi < hi_sz; ++hi) {
            double* c_row = child + static_cast<std::size_t>(hi) * lo_sz;
            for (int l = 0; l < g.k; ++l) {
                const double* p_row =
                    par + (static_cast<std::size_t>(hi) * static_cast<std::size_t>(g.k) + static_cast<std::size_t>(l)) * lo_sz;
                for (std::uint32_t lo = 0; lo < lo_sz; ++lo) c_row[lo] += p_row[lo];
            }
        }
    }
    return tab;
}

}  // namespace

DenseMeasure recombine(const DenseMeasure& nu1, const DenseMeasure& nu2, std::uint64_t cap) {
    if (nu1.n() != nu2.n() || nu1.k() != nu2.k())
        throw DimensionMismatch("recombine: mismatched measures");
    const int n = nu1.n();
    const int k = nu1.k();
    if (n == 0) return nu1;
    const std::uint64_t sz = dense_size(n, k, cap);

    const SubsetGeometry g = build_geometry(n, k, cap);
    const std::vector<double> m1 = subset_marginals(nu1, g);
    const std::vector<double> m2_own = (&nu1 == &nu2) ? std::vector<double>() : subset_marginals(nu2, g);
    const std::vector<double>& m2 = (&nu1 == &nu2) ? m1 : m2_own;

    // Group the 2^n terms into the 2^{n-1} pairs {A, A^c}; within a pair the
    // two products are the same for (nu1, nu2) and (nu2, nu1), so the whole
    // accumulation is symmetric in the arguments at the bit level.
    std::vector<double> out(sz, 0.0);
    for (std::uint32_t A = 0; A <= g.full; ++A) {
        if (A & 1u) continue;  // representative: site 0 lives in the complement
        const std::uint32_t B = g.full ^ A;
        const double* a1 = m1.data() + g.offset[A];
        const double* a2 = m2.data() + g.offset[A];
        const double* b1 = m1.data() + g.offset[B];
        const double* b2 = m2.data() + g.offset[B];
        const std::uint32_t* pa = g.place.data() + g.offset[A];
        const std::uint32_t* pb = g.place.data() + g.offset[B];
        const std::uint32_t na = g.size[A];
        const std::uint32_t nb = g.size[B];
        for (std::uint32_t ia = 0; ia < na; ++ia) {
            const double wa1 = a1[ia];
            const double wa2 = a2[ia];
            double* row = out.data() + pa[ia];
            for (std::uint32_t ib = 0; ib < nb; ++ib)
                row[pb[ib]] += wa1 * b2[ib] + b1[ib] * wa2;
        }
    }
    for (double& w : out) w = std::ldexp(w, -n);
    return DenseMeasure(n, k, std::move(out));
}

DenseMeasure recombine_bruteforce(const DenseMeasure& nu1, const DenseMeasure& nu2) {
    if (nu1.n() != nu2.n() || nu1.k() != nu2.k())
        throw DimensionMismatch("recombine_bruteforce: mismatched measures");
    const int n = nu1.n();
    const int k = nu1.k();
    if (n == 0) return nu1;
    const std::uint64_t sz = nu1.size();
    if (static_cast<double>(sz) * static_cast<double>(sz) * static_cast<double>(sz) > 1e9)
        throw CapacityExceeded("recombine_bruteforce: k^{3n} too large for the oracle");

    std::vector<std::uint8_t> tau(static_cast<std::size_t>(n)), tau2(static_cast<std::size_t>(n)),
        sig(static_cast<std::size_t>(n));
    std::vector<double> out(sz, 0.0);
    for (std::uint64_t x = 0; x < sz; ++x) {
        if (nu1.weight(x) == 0.0) continue;
        index_to_config(x, n, k, tau);
        for (std::uint64_t y = 0; y < sz; ++y) {
            if (nu2.weight(y) == 0.0) continue;
            index_to_config(y, n, k, tau2);
            const double w = nu1.weight(x) * nu2.weight(y);
            for (std::uint64_t z = 0; z < sz; ++z) {
                index_to_config(z, n, k, sig);
                double pr = w;
                for (int i = 0; i < n && pr != 0.0; ++i) {
                    const int hits = (tau[static_cast<std::size_t>(i)] == sig[static_cast<std::size_t>(i)] ? 1 : 0) +
                                     (tau2[static_cast<std::size_t>(i)] == sig[static_cast<std::size_t>(i)] ? 1 : 0);
                    pr *= 0.5 * hits;
                }
                out[z] += pr;
            }
        }
    }
    return DenseMeasure(n, k, std::move(out));
}

EvolutionTrace evolve_exact(const DenseMeasure& mu, int t, std::uint64_t cap) {
    EvolutionTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(t) + 1);
    trace.steps.push_back(mu);
    // The map squares the total mass, so a rounding-level mass defect in the
    // input doubles every step and would trip the unit-mass validation deep
    // into the trajectory.  Renormalizing each step pins the defect at one
    // ulp-scale error instead of 2^t of them.
    for (int s = 0; s < t; ++s)
        trace.steps.push_back(recombine(trace.steps.back(), trace.steps.back(), cap).renormalized());
    return trace;
}

ConfigSampler dense_sampler(const DenseMeasure& mu) {
    auto cum = std::make_shared<std::vector<double>>(mu.weights());
    std::partial_sum(cum->begin(), cum->end(), cum->begin());
    cum->back() = 1.0;
    const int n = mu.n();
    const int k = mu.k();
    return [cum, n, k](Rng& rng, std::span<std::uint8_t> out) {
        const double u = rng.next_unit();
        const auto it = std::upper_bound(cum->begin(), cum->end(), u);
        const std::uint64_t idx =
            (it == cum->end()) ? cum->size() - 1 : static_cast<std::uint64_t>(it - cum->begin());
        index_to_config(idx, n, k, out);
    };
}

std::vector<std::uint8_t> sample_root(const ConfigSampler& draw_leaf, int n, int t, Rng& rng) {
    const std::uint64_t N = std::uint64_t(1) << t;
    std::vector<std::uint64_t> u(static_cast<std::size_t>(n));
    for (auto& v : u) v = rng.next_below(N);

    // Only the leaves some U_i points at influence the root, so those are the
    // only ones drawn; sites sharing a leaf index read the same draw.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&u](int a, int b) { return u[static_cast<std::size_t>(a)] < u[static_cast<std::size_t>(b)]; });

    std::vector<std::uint8_t> leaf(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> root(static_cast<std::size_t>(n));
    std::size_t i = 0;
    while (i < order.size()) {
        const std::uint64_t x = u[static_cast<std::size_t>(order[i])];
        draw_leaf(rng, leaf);
        for (; i < order.size() && u[static_cast<std::size_t>(order[i])] == x; ++i) {
            const int site = order[i];
            root[static_cast<std::size_t>(site)] = leaf[static_cast<std::size_t>(site)];
        }
    }
    return root;
}

Environment sample_environment(const ConfigSampler& draw_leaf, int n, int k, int t, Rng& rng,
                               std::string source) {
    Environment env;
    env.n = n;
    env.k = k;
    env.t = t;
    env.source = std::move(source);
    const std::uint64_t N = env.leaf_count();
    env.leaves.resize(N * static_cast<std::uint64_t>(n));
    for (std::uint64_t x = 0; x < N; ++x)
        draw_leaf(rng, std::span<std::uint8_t>(env.leaves.data() + x * static_cast<std::uint64_t>(n),
                                               static_cast<std::size_t>(n)));
    return env;
}

int fragmentation_time(int n, Rng& rng) {
    if (n <= 1) return 0;
    std::vector<std::pair<int, int>> together;
    together.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) together.emplace_back(i, j);

    const int words = (n + 63) / 64;
    std::vector<std::uint64_t> bits(static_cast<std::size_t>(words));
    int t = 0;
    while (!together.empty()) {
        ++t;
        for (auto& w : bits) w = rng.next_u64();
        auto bit = [&bits](int i) { return (bits[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u; };
        // a still-joint pair separates exactly when this step's fair coins differ
        std::erase_if(together,
                      [&bit](const std::pair<int, int>& p) { return bit(p.first) != bit(p.second); });
    }
    return t;
}

DenseMeasure partition_average_oracle(const DenseMeasure& mu, int t) {
    const int n = mu.n();
    const int k = mu.k();
    const std::uint64_t N = std::uint64_t(1) << t;
    const std::uint64_t sz = mu.size();
    if (std::pow(static_cast<double>(N), n) * static_cast<double>(sz) * n > 1e8)
        throw CapacityExceeded("partition_average_oracle: N^n enumeration too large");

    const SubsetGeometry g = build_geometry(n, k, kDenseCapDefault);
    const std::vector<double> marg = subset_marginals(mu, g);

    // digit matrix: digits[idx][i] = spin index of site i in configuration idx
    std::vector<std::uint8_t> digits(sz * static_cast<std::uint64_t>(n));
    for (std::uint64_t idx = 0; idx < sz; ++idx)
        index_to_config(idx, n, k, std::span<std::uint8_t>(digits.data() + idx * static_cast<std::uint64_t>(n),
                                                           static_cast<std::size_t>(n)));

    std::vector<double> out(sz, 0.0);
    std::vector<std::uint64_t> assign(static_cast<std::size_t>(n), 0);  // U_i, odometer
    std::vector<std::uint32_t> block_mask(static_cast<std::size_t>(N), 0);
    for (;;) {
        std::fill(block_mask.begin(), block_mask.end(), 0);
        for (int i = 0; i < n; ++i)
            block_mask[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] |= std::uint32_t(1) << i;

        for (std::uint64_t idx = 0; idx < sz; ++idx) {
            const std::uint8_t* d = digits.data() + idx * static_cast<std::uint64_t>(n);
            double w = 1.0;
            for (std::uint64_t x = 0; x < N && w != 0.0; ++x) {
                const std::uint32_t A = block_mask[static_cast<std::size_t>(x)];
                if (A == 0) continue;
                std::uint32_t sub = 0;
                for (std::uint32_t rem = A; rem != 0; rem &= rem - 1)
                    sub = sub * static_cast<std::uint32_t>(k) + d[std::countr_zero(rem)];
                w *= marg[g.offset[A] + sub];
            }
            out[idx] += w;
        }

        int pos = n - 1;
        while (pos >= 0 && ++assign[static_cast<std::size_t>(pos)] == N) {
            assign[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    const double scale = std::pow(static_cast<double>(N), -n);
    for (double& w : out) w *= scale;
    return DenseMeasure(n, k, std::move(out));
}

}  // namespace recomb
