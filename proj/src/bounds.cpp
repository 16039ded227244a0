#include "recomb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "recomb/errors.hpp"
#include "recomb/measure.hpp"

namespace recomb {

double upper_bound_linear(int n, int k, int t) {
    const double v = static_cast<double>(k - 1) * std::ldexp(static_cast<double>(n), -t);
    return std::min(1.0, v);
}

double phi(double x) {
    if (x < 0.0) throw std::invalid_argument("phi: negative argument");
    if (x < 1.0) return 0.5 * x;
    return 1.0 - 1.0 / (1.0 + x * x);
}

PhiBound upper_bound_phi(int n, int k, int t) {
    const double s = std::ldexp(static_cast<double>(n), -t);
    const double threshold = std::log(2.0) / (2.0 * (k - 1));
    if (s < threshold) return {upper_bound_linear(n, k, t), false};
    return {1.0 - 0.5 * std::exp(-2.0 * (k - 1) * s), true};
}

namespace {

struct TaskRange {
    std::int64_t begin;
    std::int64_t end;
};

// fixed task partition, independent of the thread count
std::vector<TaskRange> partition_samples(std::int64_t samples, int want_tasks) {
    const int tasks = static_cast<int>(std::min<std::int64_t>(want_tasks, std::max<std::int64_t>(samples, 1)));
    std::vector<TaskRange> out(static_cast<std::size_t>(tasks));
    const std::int64_t base = samples / tasks;
    const std::int64_t extra = samples % tasks;
    std::int64_t at = 0;
    for (int i = 0; i < tasks; ++i) {
        const std::int64_t len = base + (i < extra ? 1 : 0);
        out[static_cast<std::size_t>(i)] = {at, at + len};
        at += len;
    }
    return out;
}

struct BlockStats {
    int hits = 0;        // blocks with Xi_j >= threshold
    double sum_xi = 0.0;
    double sum_xi2 = 0.0;
};

// per-configuration block magnetization statistics over the a full blocks
BlockStats block_stats(std::span<const std::uint8_t> sigma, const BasisTable& bases, int a, int b,
                       double threshold) {
    BlockStats st;
    for (int j = 0; j < a; ++j) {
        double m = 0.0;
        for (int i = j * b; i < (j + 1) * b; ++i)
            m += bases[static_cast<std::size_t>(i)]->value(1, sigma[static_cast<std::size_t>(i)]);
        const double xi = m * m;
        st.sum_xi += xi;
        st.sum_xi2 += xi * xi;
        if (xi >= threshold) ++st.hits;
    }
    return st;
}

void check_basket_pre(const BasketExperimentConfig& cfg, const StructuredInit& init) {
    if (init.kind == InitKind::Dense)
        throw std::invalid_argument("basket experiment needs a block-structured init");
    if (init.n() != cfg.n || init.block_size != cfg.b)
        throw DimensionMismatch("basket experiment: init does not match the config");
    if (init.full_blocks < 1) throw DimensionMismatch("basket experiment: no full block");
}

}  // namespace

BasketReport basket_experiment(const BasketExperimentConfig& cfg, const StructuredInit& init) {
    check_basket_pre(cfg, init);
    const int a = init.full_blocks;
    const int b = cfg.b;
    const double threshold = cfg.threshold_factor * b;
    const double z_cut = cfg.fraction * a;
    const BasisTable bases = basis_table(init.seq);

    struct Partial {
        CountAccumulator event;
        MeanAccumulator block;
    };

    auto run_law = [&](std::int64_t samples, bool stationary) {
        const std::vector<TaskRange> ranges = partition_samples(samples, 64);
        std::vector<Partial> parts(ranges.size());
        run_tasks(static_cast<int>(ranges.size()), cfg.threads, [&](int task) {
            Partial& p = parts[static_cast<std::size_t>(task)];
            for (std::int64_t s = ranges[static_cast<std::size_t>(task)].begin;
                 s < ranges[static_cast<std::size_t>(task)].end; ++s) {
                const std::vector<std::uint8_t> sigma =
                    stationary ? lazy_stationary_sample(init.seq, cfg.seed, static_cast<std::uint64_t>(s))
                               : lazy_root_sample(init, cfg.t, cfg.seed, static_cast<std::uint64_t>(s));
                const BlockStats st = block_stats(sigma, bases, a, b, threshold);
                p.event.add(static_cast<double>(st.hits) >= z_cut);
                p.block.add(st.sum_xi / a);
            }
        });
        Partial total;
        for (const Partial& p : parts) {
            total.event.merge(p.event);
            total.block.merge(p.block);
        }
        return total;
    };

    const Partial mu = run_law(cfg.samples_mu, false);
    const Partial pi = run_law(cfg.samples_pi, true);

    BasketReport rep;
    rep.a = a;
    rep.b = b;
    rep.degenerate = a < 15;
    rep.mu_event = mu.event.estimate();
    rep.pi_event = pi.event.estimate();
    rep.mu_block_mean = mu.block.estimate();
    rep.pi_block_mean = pi.block.estimate();
    const double se_diff = std::sqrt(rep.mu_event.se * rep.mu_event.se + rep.pi_event.se * rep.pi_event.se);
    rep.tv_lower = std::max(0.0, rep.mu_event.value - rep.pi_event.value - 2.0 * se_diff);
    return rep;
}

BlockMomentReport evolved_block_second_moment_check(const BasketExperimentConfig& cfg,
                                                    const StructuredInit& init, double rho) {
    check_basket_pre(cfg, init);
    const int a = init.full_blocks;
    const int b = cfg.b;
    const BasisTable bases = basis_table(init.seq);

    const std::vector<TaskRange> ranges = partition_samples(cfg.samples_mu, 64);
    struct Partial {
        MeanAccumulator xi, xi2;
    };
    std::vector<Partial> parts(ranges.size());
    run_tasks(static_cast<int>(ranges.size()), cfg.threads, [&](int task) {
        Partial& p = parts[static_cast<std::size_t>(task)];
        for (std::int64_t s = ranges[static_cast<std::size_t>(task)].begin;
             s < ranges[static_cast<std::size_t>(task)].end; ++s) {
            const std::vector<std::uint8_t> sigma =
                lazy_root_sample(init, cfg.t, cfg.seed, static_cast<std::uint64_t>(s));
            for (int j = 0; j < a; ++j) {
                double m = 0.0;
                for (int i = j * b; i < (j + 1) * b; ++i)
                    m += bases[static_cast<std::size_t>(i)]->value(1, sigma[static_cast<std::size_t>(i)]);
                const double xi = m * m;
                p.xi.add(xi);
                p.xi2.add(xi * xi);
            }
        }
    });
    Partial total;
    for (const Partial& p : parts) {
        total.xi.merge(p.xi);
        total.xi2.merge(p.xi2);
    }

    BlockMomentReport rep;
    rep.a = a;
    rep.b = b;
    rep.mean_xi = total.xi.estimate();
    rep.mean_xi2 = total.xi2.estimate();
    rep.ratio = rep.mean_xi2.value / (rep.mean_xi.value * rep.mean_xi.value);
    rep.first_moment_floor = b + static_cast<double>(b) * (b - 1) * std::ldexp(rho, -cfg.t);
    return rep;
}

Q2Statistic::Q2Statistic(const StructuredInit& init, const BasisTable& bases, int t)
    : n_(init.n()), k_(init.seq.k()), t_(t), inv_n_leaves_(std::ldexp(1.0, -t)), bases_(bases) {
    if (static_cast<int>(bases_.size()) != n_)
        throw DimensionMismatch("Q2Statistic: one basis per site required");
    const int deg = k_ - 1;
    const std::size_t table_len = static_cast<std::size_t>(deg) * static_cast<std::size_t>(deg);

    if (init.kind == InitKind::Dense) {
        // exact pair marginals of the explicit measure
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                const int sites[2] = {i, j};
                const DenseMeasure pair = marginalize(*init.dense, sites);
                std::vector<double> tab(table_len, 0.0);
                for (int x = 0; x < k_; ++x)
                    for (int y = 0; y < k_; ++y) {
                        const double w = pair.weight(static_cast<std::uint64_t>(x * k_ + y));
                        if (w == 0.0) continue;
                        for (int da = 1; da < k_; ++da)
                            for (int db = 1; db < k_; ++db)
                                tab[static_cast<std::size_t>(da - 1) * static_cast<std::size_t>(deg) +
                                    static_cast<std::size_t>(db - 1)] +=
                                    w * bases_[static_cast<std::size_t>(i)]->value(da, x) *
                                    bases_[static_cast<std::size_t>(j)]->value(db, y);
                    }
                pair_i_.push_back(i);
                pair_j_.push_back(j);
                pair_table_.push_back(cross_.size());
                cross_.insert(cross_.end(), tab.begin(), tab.end());
            }
        return;
    }

    // block-comonotonic init: only same-block pairs interact, and the cross
    // moments depend only on the two marginals, so tables are shared
    {
        std::vector<std::int64_t> block_size(static_cast<std::size_t>(init.blocks), 0);
        for (int b : init.block_of) ++block_size[static_cast<std::size_t>(b)];
        std::int64_t n_pairs = 0;
        for (std::int64_t c : block_size) n_pairs += c * (c - 1) / 2;
        if (n_pairs > 20'000'000)
            throw CapacityExceeded("Q2Statistic: " + std::to_string(n_pairs) +
                                   " same-block pairs exceeds the enumeration budget");
        pair_i_.reserve(static_cast<std::size_t>(n_pairs));
        pair_j_.reserve(static_cast<std::size_t>(n_pairs));
        pair_table_.reserve(static_cast<std::size_t>(n_pairs));
    }
    std::vector<int> class_of(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        class_of[static_cast<std::size_t>(i)] = i;
        for (int j = 0; j < i; ++j)
            if (init.seq.site(j).probs() == init.seq.site(i).probs()) {
                class_of[static_cast<std::size_t>(i)] = class_of[static_cast<std::size_t>(j)];
                break;
            }
    }
    std::map<std::pair<int, int>, std::size_t> cache;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            if (init.block_of[static_cast<std::size_t>(i)] != init.block_of[static_cast<std::size_t>(j)])
                continue;
            const std::pair<int, int> key{class_of[static_cast<std::size_t>(i)],
                                          class_of[static_cast<std::size_t>(j)]};
            auto it = cache.find(key);
            if (it == cache.end()) {
                const std::vector<double> tab =
                    comonotonic_cross_moments(init.seq.site(i), init.seq.site(j), init.seq.space());
                it = cache.emplace(key, cross_.size()).first;
                cross_.insert(cross_.end(), tab.begin(), tab.end());
            }
            pair_i_.push_back(i);
            pair_j_.push_back(j);
            pair_table_.push_back(it->second);
        }
}

double Q2Statistic::value(std::span<const std::uint8_t> sigma) const {
    const int deg = k_ - 1;
    double total = 0.0;
    for (std::size_t p = 0; p < pair_i_.size(); ++p) {
        const int i = pair_i_[p];
        const int j = pair_j_[p];
        const OrthonormalBasis& bi = *bases_[static_cast<std::size_t>(i)];
        const OrthonormalBasis& bj = *bases_[static_cast<std::size_t>(j)];
        const double* tab = cross_.data() + pair_table_[p];
        const int li = sigma[static_cast<std::size_t>(i)];
        const int lj = sigma[static_cast<std::size_t>(j)];
        for (int da = 1; da <= deg; ++da)
            for (int db = 1; db <= deg; ++db)
                total += tab[static_cast<std::size_t>(da - 1) * static_cast<std::size_t>(deg) +
                             static_cast<std::size_t>(db - 1)] *
                         bi.value(da, li) * bj.value(db, lj);
    }
    return total * inv_n_leaves_;
}

double Q2Statistic::second_moment_exact() const {
    const int deg = k_ - 1;
    const std::size_t table_len = static_cast<std::size_t>(deg) * static_cast<std::size_t>(deg);
    double total = 0.0;
    for (std::size_t p = 0; p < pair_i_.size(); ++p) {
        const double* tab = cross_.data() + pair_table_[p];
        for (std::size_t e = 0; e < table_len; ++e) total += tab[e] * tab[e];
    }
    return total * inv_n_leaves_ * inv_n_leaves_;
}

Estimate q2_second_moment_mc(const Q2Statistic& q2, const MarginalSequence& seq,
                             std::int64_t samples, std::uint64_t seed, int threads) {
    const std::vector<TaskRange> ranges = partition_samples(samples, 64);
    std::vector<MeanAccumulator> parts(ranges.size());
    run_tasks(static_cast<int>(ranges.size()), threads, [&](int task) {
        MeanAccumulator& acc = parts[static_cast<std::size_t>(task)];
        for (std::int64_t s = ranges[static_cast<std::size_t>(task)].begin;
             s < ranges[static_cast<std::size_t>(task)].end; ++s) {
            const std::vector<std::uint8_t> sigma =
                lazy_stationary_sample(seq, seed, static_cast<std::uint64_t>(s));
            const double v = q2.value(sigma);
            acc.add(v * v);
        }
    });
    MeanAccumulator total;
    for (const MeanAccumulator& p : parts) total.merge(p);
    return total.estimate();
}

}  // namespace recomb
