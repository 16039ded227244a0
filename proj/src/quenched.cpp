#include "recomb/quenched.hpp"

#include <cmath>
#include <cstddef>

#include "recomb/errors.hpp"

namespace recomb {

double QuenchedMoments::squared_total() const {
    double a = 0.0;
    for (double v : q) a += v * v;
    return a;
}

EmpiricalMarginals empirical_marginals(const Environment& env) {
    EmpiricalMarginals emp;
    emp.n = env.n;
    emp.k = env.k;
    emp.freq.assign(static_cast<std::size_t>(env.n) * static_cast<std::size_t>(env.k), 0.0);
    const std::uint64_t N = env.leaf_count();
    for (std::uint64_t x = 0; x < N; ++x)
        for (int i = 0; i < env.n; ++i)
            emp.freq[static_cast<std::size_t>(i) * static_cast<std::size_t>(env.k) + env.leaf(x, i)] += 1.0;
    const double inv = 1.0 / static_cast<double>(N);
    for (double& f : emp.freq) f *= inv;
    return emp;
}

QuenchedMoments quenched_moments(const Environment& env, const BasisTable& bases) {
    if (static_cast<int>(bases.size()) != env.n)
        throw DimensionMismatch("quenched_moments: one basis per site required");
    QuenchedMoments m;
    m.n = env.n;
    m.k = env.k;
    m.q.assign(static_cast<std::size_t>(env.n) * static_cast<std::size_t>(env.k - 1), 0.0);
    const std::uint64_t N = env.leaf_count();
    for (std::uint64_t x = 0; x < N; ++x)
        for (int i = 0; i < env.n; ++i) {
            const int l = env.leaf(x, i);
            const OrthonormalBasis& b = *bases[static_cast<std::size_t>(i)];
            double* row = m.q.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(env.k - 1);
            for (int deg = 1; deg < env.k; ++deg) row[deg - 1] += b.value(deg, l);
        }
    const double inv = 1.0 / static_cast<double>(N);
    for (double& v : m.q) v *= inv;
    return m;
}

QuenchedMoments quenched_moments_streaming(const ConfigSampler& draw_leaf, const BasisTable& bases,
                                           int n, int t, Rng& rng) {
    const int k = bases.empty() ? 0 : bases.front()->k();
    if (static_cast<int>(bases.size()) != n)
        throw DimensionMismatch("quenched_moments_streaming: one basis per site required");
    QuenchedMoments m;
    m.n = n;
    m.k = k;
    m.q.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(k - 1), 0.0);
    std::vector<std::uint8_t> leaf(static_cast<std::size_t>(n));
    const std::uint64_t N = std::uint64_t(1) << t;
    for (std::uint64_t x = 0; x < N; ++x) {
        draw_leaf(rng, leaf);
        for (int i = 0; i < n; ++i) {
            const OrthonormalBasis& b = *bases[static_cast<std::size_t>(i)];
            double* row = m.q.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(k - 1);
            for (int deg = 1; deg < k; ++deg) row[deg - 1] += b.value(deg, leaf[static_cast<std::size_t>(i)]);
        }
    }
    const double inv = 1.0 / static_cast<double>(N);
    for (double& v : m.q) v *= inv;
    return m;
}

double quenched_density(const EmpiricalMarginals& emp, const BasisTable& bases,
                        std::span<const std::uint8_t> sigma) {
    double h = 1.0;
    for (int i = 0; i < emp.n; ++i) {
        const int l = sigma[static_cast<std::size_t>(i)];
        h *= emp.at(i, l) / bases[static_cast<std::size_t>(i)]->marginal().prob(l);
    }
    return h;
}

double density_expansion(const QuenchedMoments& moments, const BasisTable& bases,
                         std::span<const std::uint8_t> sigma) {
    double h = 1.0;
    for (int i = 0; i < moments.n; ++i) {
        const int l = sigma[static_cast<std::size_t>(i)];
        const OrthonormalBasis& b = *bases[static_cast<std::size_t>(i)];
        double factor = 1.0;
        for (int deg = 1; deg < moments.k; ++deg) factor += moments.at(i, deg) * b.value(deg, l);
        h *= factor;
    }
    return h;
}

double quenched_l2_fluctuation(const QuenchedMoments& moments) {
    double log_prod = 0.0;
    for (int i = 0; i < moments.n; ++i) {
        double row = 0.0;
        for (int deg = 1; deg < moments.k; ++deg) {
            const double v = moments.at(i, deg);
            row += v * v;
        }
        log_prod += std::log1p(row);
    }
    return std::expm1(log_prod);
}

HhatBounds hhat_l1_bounds(const QuenchedMoments& moments) {
    HhatBounds out;
    out.a = moments.squared_total();
    out.bound1 = 2.0 + std::sqrt(out.a);
    // expm1 overflows to +inf for a beyond ~709; sqrt(+inf) = +inf and the
    // min below falls back to bound1, which is what we want
    out.bound2 = std::sqrt(std::expm1(out.a) - out.a);
    out.combined = std::min(out.bound1, out.bound2);
    return out;
}

}  // namespace recomb
