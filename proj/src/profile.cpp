#include "recomb/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "recomb/errors.hpp"

namespace recomb {

namespace {

void compositions_rec(int n, int k, int pos, std::vector<int>& cur, std::vector<int>& out) {
    if (pos == k - 1) {
        cur[static_cast<std::size_t>(pos)] = n;
        out.insert(out.end(), cur.begin(), cur.end());
        return;
    }
    for (int v = 0; v <= n; ++v) {
        cur[static_cast<std::size_t>(pos)] = v;
        compositions_rec(n - v, k, pos + 1, cur, out);
    }
}

double log_factorial(int m) { return std::lgamma(static_cast<double>(m) + 1.0); }

double log_multinomial_pmf(std::span<const int> counts, std::span<const double> probs) {
    int n = 0;
    double lp = 0.0;
    for (std::size_t l = 0; l < counts.size(); ++l) {
        const int c = counts[l];
        if (c == 0) continue;
        if (probs[l] <= 0.0) return -std::numeric_limits<double>::infinity();
        n += c;
        lp += c * std::log(probs[l]) - log_factorial(c);
    }
    return lp + log_factorial(n);
}

std::uint64_t count_key(std::span<const int> counts, int n) {
    std::uint64_t key = 0;
    for (int c : counts) key = key * static_cast<std::uint64_t>(n + 1) + static_cast<std::uint64_t>(c);
    return key;
}

// regularized lower incomplete gamma P(a, x)
double reg_lower_gamma(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // series expansion around 0
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-17) break;
        }
        return sum * std::exp(log_prefactor);
    }
    // continued fraction for the upper tail (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17) break;
    }
    return 1.0 - std::exp(log_prefactor) * h;
}

}  // namespace

std::vector<int> composition_list(int n, int k) {
    std::vector<int> out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    compositions_rec(n, k, 0, cur, out);
    return out;
}

CountMeasure monochromatic_count_evolution(const SpinSpace& space, const SiteMarginal& p, int n,
                                           int t) {
    const int k = space.k();
    if (p.k() != k) throw DimensionMismatch("count evolution: marginal size mismatch");
    const std::int64_t N = std::int64_t(1) << t;

    const std::vector<int> env_rows = composition_list(static_cast<int>(N), k);
    const std::vector<int> root_rows = composition_list(n, k);
    const std::size_t n_env = env_rows.size() / static_cast<std::size_t>(k);
    const std::size_t n_root = root_rows.size() / static_cast<std::size_t>(k);
    if (static_cast<double>(n_env) * static_cast<double>(n_root) * k > 5e8)
        throw CapacityExceeded("count evolution: environment x root enumeration too large");

    CountMeasure cm;
    cm.n = n;
    cm.k = k;
    cm.counts = root_rows;
    cm.weights.assign(n_root, 0.0);

    std::vector<double> phat(static_cast<std::size_t>(k));
    for (std::size_t e = 0; e < n_env; ++e) {
        const std::span<const int> M{env_rows.data() + e * static_cast<std::size_t>(k),
                                     static_cast<std::size_t>(k)};
        const double log_pm = log_multinomial_pmf(M, p.probs());
        for (int l = 0; l < k; ++l)
            phat[static_cast<std::size_t>(l)] = static_cast<double>(M[static_cast<std::size_t>(l)]) / N;
        for (std::size_t r = 0; r < n_root; ++r) {
            const double log_q = log_multinomial_pmf(cm.row(r), phat);
            if (log_q == -std::numeric_limits<double>::infinity()) continue;
            cm.weights[r] += std::exp(log_pm + log_q);
        }
    }
    return cm;
}

double count_tv_to_stationary(const CountMeasure& cm, const SiteMarginal& p) {
    double acc = 0.0;
    for (std::size_t r = 0; r < cm.rows(); ++r)
        acc += std::abs(cm.weights[r] - std::exp(log_multinomial_pmf(cm.row(r), p.probs())));
    return 0.5 * acc;
}

DenseMeasure count_lift_dense(const CountMeasure& cm, std::uint64_t cap) {
    const std::uint64_t sz = dense_size(cm.n, cm.k, cap);
    std::unordered_map<std::uint64_t, std::size_t> row_of;
    row_of.reserve(cm.rows() * 2);
    for (std::size_t r = 0; r < cm.rows(); ++r) row_of.emplace(count_key(cm.row(r), cm.n), r);

    std::vector<double> out(sz, 0.0);
    std::vector<std::uint8_t> config(static_cast<std::size_t>(cm.n));
    std::vector<int> counts(static_cast<std::size_t>(cm.k));
    for (std::uint64_t idx = 0; idx < sz; ++idx) {
        index_to_config(idx, cm.n, cm.k, config);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::uint8_t d : config) ++counts[d];
        const std::size_t r = row_of.at(count_key(counts, cm.n));
        // weight shared evenly among the n!/prod(c_l!) configurations
        double log_cfgs = log_factorial(cm.n);
        for (int c : counts) log_cfgs -= log_factorial(c);
        out[idx] = cm.weights[r] * std::exp(-log_cfgs);
    }
    return DenseMeasure(cm.n, cm.k, std::move(out));
}

double chi_square_cdf(int d, double x) {
    if (d < 1) throw std::invalid_argument("chi_square_cdf: degrees must be positive");
    if (x < 0.0) return 0.0;
    return reg_lower_gamma(0.5 * d, 0.5 * x);
}

double gaussian_tv_limit(int d, double s) {
    if (d < 1 || !(s > 0.0)) throw std::invalid_argument("gaussian_tv_limit: need d >= 1, s > 0");
    // the two radial densities cross where (1+s)^{-d/2} exp(-r^2/(2(1+s))) = exp(-r^2/2)
    const double r2 = d * (1.0 + s) * std::log1p(s) / s;
    return chi_square_cdf(d, r2) - chi_square_cdf(d, r2 / (1.0 + s));
}

AlphaBeta alpha_beta(std::span<const double> q, const OrthonormalBasis& basis, int n) {
    const int k = basis.k();
    if (static_cast<int>(q.size()) != k - 1)
        throw DimensionMismatch("alpha_beta: expected k-1 quenched moments");
    std::vector<double> logf(static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) {
        double factor = 1.0;
        for (int m = 1; m < k; ++m) factor += q[static_cast<std::size_t>(m - 1)] * basis.value(m, l);
        if (!(factor > 0.0))
            throw DomainError("alpha_beta: density factor not positive at spin level " +
                                  std::to_string(l),
                              l);
        logf[static_cast<std::size_t>(l)] = std::log(factor);
    }
    AlphaBeta out;
    out.alpha.assign(static_cast<std::size_t>(k - 1), 0.0);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int l = 0; l < k; ++l) {
        const double w = basis.marginal().prob(l) * logf[static_cast<std::size_t>(l)];
        out.beta += n * w;
        for (int m = 1; m < k; ++m)
            out.alpha[static_cast<std::size_t>(m - 1)] += sqrt_n * basis.value(m, l) * w;
    }
    return out;
}

double psi_closed_form(std::span<const double> u, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("psi: need s > 0");
    double norm2 = 0.0;
    for (double v : u) norm2 += v * v;
    const double d = static_cast<double>(u.size());
    return std::pow(1.0 + s, -0.5 * d) * std::exp(s * norm2 / (2.0 * (1.0 + s)));
}

double normal_draw(Rng& rng) {
    const double u1 = 1.0 - rng.next_unit();  // (0, 1]
    const double u2 = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Estimate psi_mc(std::span<const double> u, double s, std::int64_t samples, Rng& rng) {
    const double sd = std::sqrt(s);
    MeanAccumulator acc;
    for (std::int64_t i = 0; i < samples; ++i) {
        double dot = 0.0;
        double norm2 = 0.0;
        for (double ul : u) {
            const double z = sd * normal_draw(rng);
            dot += z * ul;
            norm2 += z * z;
        }
        acc.add(std::exp(dot - 0.5 * norm2));
    }
    return acc.estimate();
}

std::vector<ProfileRow> profile_experiment(const SpinSpace& space, const SiteMarginal& p, double s,
                                           int t_lo, int t_hi) {
    const int k = space.k();
    std::vector<ProfileRow> rows;
    for (int t = t_lo; t <= t_hi; ++t) {
        ProfileRow row;
        row.t = t;
        row.n = std::max(1, static_cast<int>(std::llround(s * std::ldexp(1.0, t))));
        const CountMeasure cm = monochromatic_count_evolution(space, p, row.n, t);
        row.tv_exact = count_tv_to_stationary(cm, p);
        row.tv_gaussian = gaussian_tv_limit(k - 1, s);
        row.gap = std::abs(row.tv_exact - row.tv_gaussian);

        // the alpha/beta separation leaves its log domain exactly when some
        // color is missing from the environment
        const int N = 1 << t;
        const std::vector<int> env_rows = composition_list(N, k);
        double fail = 0.0;
        for (std::size_t e = 0; e * static_cast<std::size_t>(k) < env_rows.size(); ++e) {
            const std::span<const int> M{env_rows.data() + e * static_cast<std::size_t>(k),
                                         static_cast<std::size_t>(k)};
            if (std::find(M.begin(), M.end(), 0) != M.end())
                fail += std::exp(log_multinomial_pmf(M, p.probs()));
        }
        row.alpha_domain_failure_rate = fail;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace recomb
