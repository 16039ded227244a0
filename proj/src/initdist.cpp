#include "recomb/initdist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "recomb/errors.hpp"
#include "recomb/onb.hpp"

namespace recomb {

namespace {

// subseed tags so the three keyed sampling roles never collide
constexpr std::uint64_t kLeafIndexTag = 0x1f83d9abfb41bd6bULL;
constexpr std::uint64_t kLeafValueTag = 0x5be0cd19137e2179ULL;
constexpr std::uint64_t kStationaryTag = 0x9159015a3070dd17ULL;

std::vector<int> group_sites(const StructuredInit& init, int block) {
    std::vector<int> sites;
    for (int i = 0; i < init.n(); ++i)
        if (init.block_of[static_cast<std::size_t>(i)] == block) sites.push_back(i);
    return sites;
}

// One atom of a comonotonic coupling: a maximal U-interval on which every
// site's quantile is constant.
struct IntervalAtom {
    double weight;
    std::vector<std::uint8_t> levels;  // per listed site
};

std::vector<IntervalAtom> comonotonic_atoms(const MarginalSequence& seq,
                                            std::span<const int> sites) {
    std::vector<double> cuts;
    for (int site : sites)
        for (int l = 0; l + 1 < seq.k(); ++l) cuts.push_back(seq.site(site).cdf(l));
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<IntervalAtom> atoms;
    double prev = 0.0;
    for (double b : cuts) {
        const double w = b - prev;
        prev = b;
        if (w <= 0.0) continue;
        IntervalAtom atom;
        atom.weight = w;
        atom.levels.reserve(sites.size());
        // the right-continuous quantile is constant on (prev, b]
        for (int site : sites)
            atom.levels.push_back(static_cast<std::uint8_t>(seq.site(site).quantile(b)));
        atoms.push_back(std::move(atom));
    }
    return atoms;
}

StructuredInit make_block_init(InitKind kind, MarginalSequence seq, int b) {
    StructuredInit init{.kind = kind, .seq = std::move(seq), .block_of = {}, .dense = {}};
    const int n = init.seq.n();
    init.block_size = b;
    init.block_of.resize(static_cast<std::size_t>(n));
    init.full_blocks = n / b;
    int next = 0;
    for (int j = 0; j < init.full_blocks; ++j, ++next)
        for (int i = j * b; i < (j + 1) * b; ++i) init.block_of[static_cast<std::size_t>(i)] = next;
    for (int i = init.full_blocks * b; i < n; ++i) init.block_of[static_cast<std::size_t>(i)] = next++;
    init.blocks = next;
    return init;
}

}  // namespace

StructuredInit product_stationary_init(MarginalSequence seq) {
    return make_block_init(InitKind::ProductStationary, std::move(seq), 1);
}

StructuredInit comonotonic_global_init(MarginalSequence seq) {
    const int n = seq.n();
    return make_block_init(InitKind::ComonotonicGlobal, std::move(seq), n);
}

StructuredInit monochromatic_init(MarginalSequence seq) {
    if (!seq.homogeneous())
        throw DegenerateMarginal("monochromatic init requires a homogeneous marginal sequence");
    const int n = seq.n();
    return make_block_init(InitKind::Monochromatic, std::move(seq), n);
}

StructuredInit basket_init(MarginalSequence seq, int b) {
    if (b < 1 || b > seq.n()) throw DimensionMismatch("basket_init: block size outside [1, n]");
    return make_block_init(InitKind::Basket, std::move(seq), b);
}

StructuredInit dense_init(MarginalSequence seq, DenseMeasure mu) {
    if (mu.n() != seq.n() || mu.k() != seq.k())
        throw DimensionMismatch("dense_init: measure does not match the marginal sequence");
    const MarginalCheck check = check_marginal_constraint(mu, seq, 1e-9);
    if (!check.ok)
        throw std::invalid_argument("dense_init: site " + std::to_string(check.worst_site) +
                                    " marginal off by " + std::to_string(check.worst_deviation));
    StructuredInit init = make_block_init(InitKind::Dense, std::move(seq), 1);
    init.dense = std::make_shared<const DenseMeasure>(std::move(mu));
    return init;
}

std::vector<std::uint8_t> comonotonic_draw(const MarginalSequence& seq, std::span<const int> sites,
                                           Rng& rng) {
    const double u = rng.next_unit();
    std::vector<std::uint8_t> out;
    out.reserve(sites.size());
    for (int site : sites) out.push_back(static_cast<std::uint8_t>(seq.site(site).quantile(u)));
    return out;
}

ConfigSampler init_sampler(const StructuredInit& init) {
    if (init.kind == InitKind::Dense) return dense_sampler(*init.dense);
    // copy the structure into the closure so the init may go out of scope
    auto seq = std::make_shared<MarginalSequence>(init.seq);
    auto block_of = std::make_shared<std::vector<int>>(init.block_of);
    const int blocks = init.blocks;
    return [seq, block_of, blocks](Rng& rng, std::span<std::uint8_t> out) {
        std::vector<double> u(static_cast<std::size_t>(blocks));
        for (double& v : u) v = rng.next_unit();
        for (int i = 0; i < seq->n(); ++i)
            out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
                seq->site(i).quantile(u[static_cast<std::size_t>((*block_of)[static_cast<std::size_t>(i)])]));
    };
}

DenseMeasure init_dense(const StructuredInit& init, std::uint64_t cap) {
    if (init.kind == InitKind::Dense) return *init.dense;
    const int n = init.n();
    const int k = init.seq.k();
    const std::uint64_t sz = dense_size(n, k, cap);

    std::vector<std::uint64_t> pow_site(static_cast<std::size_t>(n));
    {
        std::uint64_t p = 1;
        for (int i = n - 1; i >= 0; --i) {
            pow_site[static_cast<std::size_t>(i)] = p;
            p *= static_cast<std::uint64_t>(k);
        }
    }

    // per block: atom weights and their contribution to the config index
    struct BlockAtoms {
        std::vector<double> weight;
        std::vector<std::uint64_t> index;
    };
    std::vector<BlockAtoms> per_block;
    per_block.reserve(static_cast<std::size_t>(init.blocks));
    for (int b = 0; b < init.blocks; ++b) {
        const std::vector<int> sites = group_sites(init, b);
        BlockAtoms ba;
        for (const IntervalAtom& atom : comonotonic_atoms(init.seq, sites)) {
            std::uint64_t idx = 0;
            for (std::size_t j = 0; j < sites.size(); ++j)
                idx += static_cast<std::uint64_t>(atom.levels[j]) *
                       pow_site[static_cast<std::size_t>(sites[j])];
            ba.weight.push_back(atom.weight);
            ba.index.push_back(idx);
        }
        per_block.push_back(std::move(ba));
    }

    std::vector<double> out(sz, 0.0);
    std::vector<std::size_t> pick(static_cast<std::size_t>(init.blocks), 0);
    for (;;) {
        double w = 1.0;
        std::uint64_t idx = 0;
        for (int b = 0; b < init.blocks; ++b) {
            const std::size_t c = pick[static_cast<std::size_t>(b)];
            w *= per_block[static_cast<std::size_t>(b)].weight[c];
            idx += per_block[static_cast<std::size_t>(b)].index[c];
        }
        out[idx] += w;

        int b = init.blocks - 1;
        while (b >= 0 &&
               ++pick[static_cast<std::size_t>(b)] == per_block[static_cast<std::size_t>(b)].weight.size()) {
            pick[static_cast<std::size_t>(b)] = 0;
            --b;
        }
        if (b < 0) break;
    }
    return DenseMeasure(n, k, std::move(out));
}

DenseMeasure comonotonic_dense(const MarginalSequence& seq, std::uint64_t cap) {
    return init_dense(comonotonic_global_init(seq), cap);
}

DenseMeasure monochromatic_dense(const SpinSpace& space, const SiteMarginal& p, int n,
                                 std::uint64_t cap) {
    return init_dense(monochromatic_init(MarginalSequence(space, p, n)), cap);
}

std::vector<double> comonotonic_cross_moments(const SiteMarginal& pi, const SiteMarginal& pj,
                                              const SpinSpace& space) {
    const int k = space.k();
    const BasisPtr bi = build_basis(space, pi);
    const BasisPtr bj = build_basis(space, pj);

    std::vector<double> cuts;
    for (int l = 0; l + 1 < k; ++l) {
        cuts.push_back(pi.cdf(l));
        cuts.push_back(pj.cdf(l));
    }
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<double> c(static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(k - 1), 0.0);
    double prev = 0.0;
    for (double b : cuts) {
        const double w = b - prev;
        prev = b;
        if (w <= 0.0) continue;
        const int li = pi.quantile(b);
        const int lj = pj.quantile(b);
        for (int a = 1; a < k; ++a)
            for (int d = 1; d < k; ++d)
                c[static_cast<std::size_t>(a - 1) * static_cast<std::size_t>(k - 1) +
                  static_cast<std::size_t>(d - 1)] += w * bi->value(a, li) * bj->value(d, lj);
    }
    return c;
}

double comonotonic_pair_correlation(const SiteMarginal& pi, const SiteMarginal& pj,
                                    const SpinSpace& space) {
    return comonotonic_cross_moments(pi, pj, space).front();
}

double rho_estimate(double delta, int k, const SpinSpace& space, int resolution) {
    if (!(delta > 0.0) || delta > 1.0 / k)
        throw DegenerateMarginal("rho_estimate: delta outside (0, 1/k]");
    const int M = resolution;

    // all compositions of M into k nonnegative parts
    std::vector<SiteMarginal> grid;
    std::vector<int> c(static_cast<std::size_t>(k), 0);
    const double slack = 1.0 - k * delta;
    auto emit = [&] {
        std::vector<double> probs(static_cast<std::size_t>(k));
        for (int l = 0; l < k; ++l)
            probs[static_cast<std::size_t>(l)] =
                delta + slack * static_cast<double>(c[static_cast<std::size_t>(l)]) / M;
        grid.emplace_back(std::move(probs));
    };
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == k - 1) {
            c[static_cast<std::size_t>(pos)] = left;
            emit();
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, left - v);
        }
    };
    rec(rec, 0, M);

    double best = 1.0;
    for (const SiteMarginal& a : grid)
        for (const SiteMarginal& b : grid)
            best = std::min(best, comonotonic_pair_correlation(a, b, space));
    return best;
}

std::vector<std::uint8_t> lazy_root_sample(const StructuredInit& init, int t, std::uint64_t seed,
                                           std::uint64_t sample) {
    if (init.kind == InitKind::Dense)
        throw std::invalid_argument("lazy_root_sample: dense inits have no keyed leaf structure");
    const int n = init.n();
    const std::uint64_t mask = (std::uint64_t(1) << t) - 1;
    const std::uint64_t su = mix64(seed ^ kLeafIndexTag);
    const std::uint64_t sv = mix64(seed ^ kLeafValueTag);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // U_i uniform on the 2^t leaves (power of two, so masking is exact)
        const std::uint64_t x = keyed_u64(su, sample, static_cast<std::uint64_t>(i)) & mask;
        const double u =
            keyed_uniform(sv, sample, x, static_cast<std::uint64_t>(init.block_of[static_cast<std::size_t>(i)]));
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(init.seq.site(i).quantile(u));
    }
    return out;
}

std::vector<std::uint8_t> lazy_stationary_sample(const MarginalSequence& seq, std::uint64_t seed,
                                                 std::uint64_t sample) {
    const std::uint64_t sp = mix64(seed ^ kStationaryTag);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(seq.n()));
    for (int i = 0; i < seq.n(); ++i)
        out[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(seq.site(i).quantile(keyed_uniform(sp, sample, static_cast<std::uint64_t>(i))));
    return out;
}

}  // namespace recomb
