// Experiment runner for the recombination laboratory.  Every subcommand
// parses a sectioned key=value config, dispatches into librecomb, and writes
// CSV data plus a JSON report into the output directory.  File contents are
// a deterministic function of (config, seed): the runtime knobs --threads
// and --out never change a single byte of output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "recomb/bounds.hpp"
#include "recomb/config.hpp"
#include "recomb/dynamics.hpp"
#include "recomb/errors.hpp"
#include "recomb/initdist.hpp"
#include "recomb/measure.hpp"
#include "recomb/onb.hpp"
#include "recomb/profile.hpp"
#include "recomb/quenched.hpp"
#include "recomb/rng.hpp"
#include "recomb/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace recomb;

namespace {

constexpr const char* kArtifact = "recombination-lab";
constexpr const char* kVersion = "0.1.0";

// Sub-stream domain separating the per-t sweeps of one run.
constexpr std::uint64_t kSweepTag = 0x7c3a9d4e5b16f208ULL;

std::uint64_t sweep_seed(std::uint64_t seed, int t) {
    return keyed_u64(seed, kSweepTag, static_cast<std::uint64_t>(t));
}

// Round-trip-exact decimal form; CSV cells and JSON share it so reruns are
// byte-comparable.
std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num_i(std::int64_t v) { return std::to_string(v); }

class Csv {
  public:
    explicit Csv(const fs::path& p) : out_(p, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write '" + p.string() + "'");
    }
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

ordered_json est_json(const Estimate& e) {
    return ordered_json{{"value", e.value}, {"se", e.se}, {"samples", e.samples}};
}

// The echoed config covers everything that defines the experiment; --threads
// and --out are runtime plumbing and deliberately left out so thread count
// cannot leak into the artifact bytes.
ordered_json config_echo(const ExperimentConfig& c) {
    ordered_json j;
    j["kind"] = c.kind;
    ordered_json model;
    model["k"] = c.k;
    if (!c.spins.empty()) model["spins"] = c.spins;
    model["n"] = c.n;
    model["marginals"] = c.marginal_mode;
    if (!c.p.empty()) model["p"] = c.p;
    if (!c.p_sites.empty()) model["p_sites"] = c.p_sites;
    if (c.delta_set) model["delta"] = c.delta;
    if (c.marginal_mode == "random") model["marginal_seed"] = c.marginal_seed;
    j["model"] = std::move(model);
    ordered_json init;
    init["kind"] = c.init_kind;
    if (c.init_kind == "basket") {
        if (c.b_auto)
            init["b"] = "auto";
        else
            init["b"] = c.b;
    }
    if (!c.dense_path.empty()) init["path"] = c.dense_path;
    j["init"] = std::move(init);
    ordered_json run;
    run["t_min"] = c.t_min;
    run["t_max"] = c.t_max;
    run["samples"] = c.samples;
    run["samples_pi"] = c.samples_pi > 0 ? c.samples_pi : c.samples;
    run["seed"] = c.seed;
    if (c.kind == "profile") run["s"] = c.s;
    j["run"] = std::move(run);
    return j;
}

void write_report(const fs::path& dir, const ExperimentConfig& cfg, ordered_json results) {
    ordered_json doc;
    doc["artifact"] = kArtifact;
    doc["version"] = kVersion;
    doc["config"] = config_echo(cfg);
    doc["results"] = std::move(results);
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report.json");
    out << doc.dump(2) << "\n";
}

struct Shard {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

// Fixed partition of the sample range: aggregation order is the shard
// order, independent of how many threads execute them.
std::vector<Shard> shards(std::int64_t total, int parts = 64) {
    if (total < parts) parts = static_cast<int>(std::max<std::int64_t>(1, total));
    std::vector<Shard> out(static_cast<std::size_t>(parts));
    const std::int64_t base = total / parts;
    const std::int64_t rem = total % parts;
    std::int64_t lo = 0;
    for (int i = 0; i < parts; ++i) {
        const std::int64_t len = base + (i < rem ? 1 : 0);
        out[static_cast<std::size_t>(i)] = {lo, lo + len};
        lo += len;
    }
    return out;
}

double chi_square_divergence(const DenseMeasure& mu, const DenseMeasure& pi) {
    double acc = 0.0;
    for (std::uint64_t idx = 0; idx < mu.size(); ++idx) {
        const double d = mu.weight(idx) - pi.weight(idx);
        acc += d * d / pi.weight(idx);
    }
    return acc;
}

std::int64_t effective_samples_pi(const ExperimentConfig& cfg) {
    return cfg.samples_pi > 0 ? cfg.samples_pi : cfg.samples;
}

int grid_resolution(int k) { return k == 2 ? 64 : k == 3 ? 32 : 12; }

// ---------------------------------------------------------------- exact-evolve

int run_exact_evolve(const ExperimentConfig& cfg, const fs::path& out) {
    const StructuredInit init = build_init(cfg);
    const DenseMeasure mu0 = init_dense(init);
    const EvolutionTrace trace = evolve_exact(mu0, cfg.t_max);
    const DenseMeasure pi = product_measure(init.seq);
    const int n = init.n();
    const int k = init.seq.k();

    Csv csv(out / "trace.csv");
    csv.row({"t", "tv_to_pi", "upper_bound", "l2_bound"});
    int ub_violations = 0;
    int l2_violations = 0;
    double final_tv = 0.0;
    for (int t = 0; t <= cfg.t_max; ++t) {
        const double tv = tv_distance(trace.at(t), pi);
        const PhiBound pb = upper_bound_phi(n, k, t);
        const double ub = std::min(upper_bound_linear(n, k, t), pb.value);
        const double l2 = 0.5 * std::sqrt(chi_square_divergence(trace.at(t), pi));
        if (tv > ub) ++ub_violations;
        if (tv > l2 + 1e-12) ++l2_violations;
        final_tv = tv;
        csv.row({num_i(t), num(tv), num(ub), num(l2)});
    }

    ordered_json results;
    results["rows"] = cfg.t_max + 1;
    results["final_tv"] = final_tv;
    results["upper_bound_violations"] = ub_violations;
    results["l2_bound_violations"] = l2_violations;
    write_report(out, cfg, std::move(results));
    return 0;
}

// ------------------------------------------------------------------ mc-evolve

int run_mc_evolve(const ExperimentConfig& cfg, const fs::path& out) {
    const StructuredInit init = build_init(cfg);
    const int n = init.n();
    const int k = init.seq.k();
    const std::int64_t R = cfg.samples;
    const bool lazy = init.kind != InitKind::Dense;

    // exact reference histogram when the dense path is cheap
    constexpr std::uint64_t kHistCap = 4096;
    bool have_exact = true;
    std::vector<DenseMeasure> exact;
    try {
        const DenseMeasure mu0 = init_dense(init, kHistCap);
        EvolutionTrace tr = evolve_exact(mu0, cfg.t_max, kHistCap);
        exact = std::move(tr.steps);
    } catch (const CapacityExceeded&) {
        have_exact = false;
    }

    Csv csv(out / "mc_trace.csv");
    csv.row({"t", "samples", "worst_site", "worst_marginal_dev", "marginal_se", "hist_tv",
             "hist_max_z", "reference"});

    ordered_json rows = ordered_json::array();
    const ConfigSampler leaf = lazy ? ConfigSampler{} : init_sampler(init);
    for (int t = cfg.t_min; t <= cfg.t_max; ++t) {
        const std::uint64_t st = sweep_seed(cfg.seed, t);
        const auto parts = shards(R);
        const std::size_t nk = static_cast<std::size_t>(n) * static_cast<std::size_t>(k);
        const std::uint64_t hist_sz = have_exact ? exact.front().size() : 0;
        std::vector<std::vector<std::int64_t>> site_counts(
            parts.size(), std::vector<std::int64_t>(nk, 0));
        std::vector<std::vector<std::int64_t>> hist(parts.size());
        if (have_exact)
            for (auto& h : hist) h.assign(hist_sz, 0);

        run_tasks(static_cast<int>(parts.size()), cfg.threads, [&](int task) {
            auto& sc = site_counts[static_cast<std::size_t>(task)];
            auto& h = hist[static_cast<std::size_t>(task)];
            std::vector<std::uint8_t> sigma;
            for (std::int64_t s = parts[static_cast<std::size_t>(task)].lo;
                 s < parts[static_cast<std::size_t>(task)].hi; ++s) {
                if (lazy) {
                    sigma = lazy_root_sample(init, t, st, static_cast<std::uint64_t>(s));
                } else {
                    Rng rng(st, static_cast<std::uint64_t>(s));
                    sigma = sample_root(leaf, n, t, rng);
                }
                for (int i = 0; i < n; ++i)
                    ++sc[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) + sigma[static_cast<std::size_t>(i)]];
                if (have_exact) ++h[config_to_index(sigma, k)];
            }
        });

        std::vector<std::int64_t> sc(nk, 0);
        for (const auto& part : site_counts)
            for (std::size_t c = 0; c < nk; ++c) sc[c] += part[c];
        std::vector<std::int64_t> h(hist_sz, 0);
        for (const auto& part : hist)
            for (std::size_t c = 0; c < part.size(); ++c) h[c] += part[c];

        double worst = -1.0;
        int worst_site = 0;
        double worst_freq = 0.0;
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < k; ++l) {
                const double f = static_cast<double>(sc[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                                                       static_cast<std::size_t>(l)]) /
                                 static_cast<double>(R);
                const double dev = std::abs(f - init.seq.site(i).prob(l));
                if (dev > worst) {
                    worst = dev;
                    worst_site = i;
                    worst_freq = f;
                }
            }
        const double marginal_se = std::sqrt(worst_freq * (1.0 - worst_freq) / static_cast<double>(R));

        double hist_tv = std::numeric_limits<double>::quiet_NaN();
        double hist_max_z = std::numeric_limits<double>::quiet_NaN();
        if (have_exact) {
            const DenseMeasure& ex = exact[static_cast<std::size_t>(t)];
            hist_tv = 0.0;
            hist_max_z = 0.0;
            for (std::uint64_t idx = 0; idx < hist_sz; ++idx) {
                const double emp = static_cast<double>(h[idx]) / static_cast<double>(R);
                const double w = ex.weight(idx);
                hist_tv += std::abs(emp - w);
                const double cell_se = std::sqrt(w * (1.0 - w) / static_cast<double>(R));
                double z;
                if (cell_se > 0.0)
                    z = std::abs(emp - w) / cell_se;
                else
                    z = emp == w ? 0.0 : std::numeric_limits<double>::infinity();
                hist_max_z = std::max(hist_max_z, z);
            }
            hist_tv *= 0.5;
        }

        csv.row({num_i(t), num_i(R), num_i(worst_site), num(worst), num(marginal_se),
                 num(hist_tv), num(hist_max_z), have_exact ? "exact" : "none"});

        ordered_json row;
        row["t"] = t;
        row["samples"] = R;
        row["worst_site"] = worst_site;
        row["worst_marginal_dev"] = worst;
        row["marginal_se"] = marginal_se;
        if (have_exact) {
            row["hist_tv"] = hist_tv;
            row["hist_max_z"] = hist_max_z;
        }
        rows.push_back(std::move(row));
    }

    ordered_json results;
    results["exact_reference"] = have_exact;
    results["rows"] = std::move(rows);
    write_report(out, cfg, std::move(results));
    return 0;
}

// --------------------------------------------------------------------- bounds

int run_bounds(const ExperimentConfig& cfg, const fs::path& out) {
    const StructuredInit init = build_init(cfg);
    const int n = init.n();
    const int k = init.seq.k();
    const std::int64_t R = cfg.samples;
    const BasisTable bases = basis_table(init.seq);

    constexpr std::uint64_t kSmallCap = 4096;
    bool have_exact = true;
    std::vector<DenseMeasure> exact;
    DenseMeasure pi(0, 2, {1.0});
    try {
        const DenseMeasure mu0 = init_dense(init, kSmallCap);
        EvolutionTrace tr = evolve_exact(mu0, cfg.t_max, kSmallCap);
        exact = std::move(tr.steps);
        pi = product_measure(init.seq, kSmallCap);
    } catch (const CapacityExceeded&) {
        have_exact = false;
    }

    {
        // one dump per distinct basis table, tagged by the first site using it
        Csv bcsv(out / "basis.csv");
        bcsv.row({"site", "m", "l", "value"});
        std::vector<const OrthonormalBasis*> seen;
        for (int i = 0; i < n; ++i) {
            const OrthonormalBasis* b = bases[static_cast<std::size_t>(i)].get();
            if (std::find(seen.begin(), seen.end(), b) != seen.end()) continue;
            seen.push_back(b);
            for (int m = 0; m < k; ++m)
                for (int l = 0; l < k; ++l)
                    bcsv.row({num_i(i), num_i(m), num_i(l), num(b->value(m, l))});
        }
    }

    Csv csv(out / "bounds.csv");
    csv.row({"t", "exact_tv", "half_combined_mean", "half_combined_se", "samples",
             "bound_linear", "bound_phi", "phi_in_regime"});

    const ConfigSampler leaf = init_sampler(init);
    ordered_json rows = ordered_json::array();
    int chain_violations = 0;
    for (int t = cfg.t_min; t <= cfg.t_max; ++t) {
        const std::uint64_t st = sweep_seed(cfg.seed, t);
        struct EnvRow {
            double a, b1, b2, l2f;
        };
        std::vector<EnvRow> env_rows(static_cast<std::size_t>(R));
        const auto parts = shards(R);
        run_tasks(static_cast<int>(parts.size()), cfg.threads, [&](int task) {
            for (std::int64_t e = parts[static_cast<std::size_t>(task)].lo;
                 e < parts[static_cast<std::size_t>(task)].hi; ++e) {
                Rng rng(st, static_cast<std::uint64_t>(e));
                const QuenchedMoments qm = quenched_moments_streaming(leaf, bases, n, t, rng);
                const HhatBounds hb = hhat_l1_bounds(qm);
                env_rows[static_cast<std::size_t>(e)] = {hb.a, hb.bound1, hb.bound2,
                                                         quenched_l2_fluctuation(qm)};
            }
        });

        Csv qcsv(out / ("quenched_t" + std::to_string(t) + ".csv"));
        qcsv.row({"env_id", "A_xi", "bound1", "bound2", "l2_fluct"});
        MeanAccumulator half;
        for (std::int64_t e = 0; e < R; ++e) {
            const EnvRow& r = env_rows[static_cast<std::size_t>(e)];
            qcsv.row({num_i(e), num(r.a), num(r.b1), num(r.b2), num(r.l2f)});
            half.add(0.5 * std::min(r.b1, r.b2));
        }

        const double lin = upper_bound_linear(n, k, t);
        const PhiBound pb = upper_bound_phi(n, k, t);
        const double tv = have_exact
                              ? tv_distance(exact[static_cast<std::size_t>(t)], pi)
                              : std::numeric_limits<double>::quiet_NaN();
        // domination chain D <= E[min(b1,b2)]/2 <= linear, each side given
        // a 3 SE allowance on the Monte Carlo middle term
        if (have_exact && tv > half.mean() + 3.0 * half.se()) ++chain_violations;
        if (half.mean() - 3.0 * half.se() > lin) ++chain_violations;

        csv.row({num_i(t), num(tv), num(half.mean()), num(half.se()), num_i(R), num(lin),
                 num(pb.value), pb.in_regime ? "1" : "0"});

        ordered_json row;
        row["t"] = t;
        if (have_exact) row["exact_tv"] = tv;
        row["half_combined"] = est_json(half.estimate());
        row["bound_linear"] = lin;
        row["bound_phi"] = pb.value;
        row["phi_in_regime"] = pb.in_regime;
        rows.push_back(std::move(row));
    }

    ordered_json results;
    results["exact_reference"] = have_exact;
    results["domination_chain_violations"] = chain_violations;
    results["rows"] = std::move(rows);
    write_report(out, cfg, std::move(results));
    return 0;
}

// ------------------------------------------------------------------ basket-lb

int run_basket_lb(const ExperimentConfig& cfg, const fs::path& out) {
    const MarginalSequence seq = build_sequence(cfg);
    const int n = seq.n();
    const int k = seq.k();
    const double rho = rho_estimate(seq.delta(), k, seq.space(), grid_resolution(k));

    Csv csv(out / "basket.csv");
    csv.row({"t", "s", "a", "b", "degenerate", "pi_event", "pi_event_se", "mu_event",
             "mu_event_se", "pi_block_mean", "pi_block_mean_se", "mu_block_mean",
             "mu_block_mean_se", "tv_lower", "xi_mean", "xi_mean_se", "xi_second",
             "xi_second_se", "xi_ratio", "xi_floor", "samples_mu", "samples_pi"});

    ordered_json rows = ordered_json::array();
    for (int t = cfg.t_min; t <= cfg.t_max; ++t) {
        int b = cfg.b;
        if (cfg.b_auto) {
            const double raw = std::ceil((80.0 / rho) * std::ldexp(1.0, t));
            b = static_cast<int>(std::min(static_cast<double>(n), raw));
        }
        const StructuredInit init = basket_init(seq, b);

        BasketExperimentConfig bc;
        bc.n = n;
        bc.t = t;
        bc.b = b;
        bc.samples_mu = cfg.samples;
        bc.samples_pi = effective_samples_pi(cfg);
        bc.seed = sweep_seed(cfg.seed, t);
        bc.threads = cfg.threads;

        const BasketReport rep = basket_experiment(bc, init);
        const BlockMomentReport mom = evolved_block_second_moment_check(bc, init, rho);
        const double s = std::ldexp(static_cast<double>(n), -t);

        csv.row({num_i(t), num(s), num_i(rep.a), num_i(rep.b), rep.degenerate ? "1" : "0",
                 num(rep.pi_event.value), num(rep.pi_event.se), num(rep.mu_event.value),
                 num(rep.mu_event.se), num(rep.pi_block_mean.value), num(rep.pi_block_mean.se),
                 num(rep.mu_block_mean.value), num(rep.mu_block_mean.se), num(rep.tv_lower),
                 num(mom.mean_xi.value), num(mom.mean_xi.se), num(mom.mean_xi2.value),
                 num(mom.mean_xi2.se), num(mom.ratio), num(mom.first_moment_floor),
                 num_i(bc.samples_mu), num_i(bc.samples_pi)});

        ordered_json row;
        row["t"] = t;
        row["s"] = s;
        row["a"] = rep.a;
        row["b"] = rep.b;
        row["degenerate"] = rep.degenerate;
        row["pi_event"] = est_json(rep.pi_event);
        row["mu_event"] = est_json(rep.mu_event);
        row["pi_block_mean"] = est_json(rep.pi_block_mean);
        row["mu_block_mean"] = est_json(rep.mu_block_mean);
        row["tv_lower"] = rep.tv_lower;
        row["xi_mean"] = est_json(mom.mean_xi);
        row["xi_second"] = est_json(mom.mean_xi2);
        row["xi_ratio"] = mom.ratio;
        row["xi_floor"] = mom.first_moment_floor;
        rows.push_back(std::move(row));
    }

    ordered_json results;
    results["rho_hat"] = rho;
    results["rows"] = std::move(rows);
    write_report(out, cfg, std::move(results));
    return 0;
}

// --------------------------------------------------------------- sharpness-q2

int run_sharpness_q2(const ExperimentConfig& cfg, const fs::path& out) {
    const StructuredInit init = build_init(cfg);
    const int n = init.n();
    const BasisTable bases = basis_table(init.seq);

    Csv csv(out / "q2.csv");
    csv.row({"t", "n", "s", "second_moment_exact", "second_moment_mc", "mc_se", "samples",
             "exact_over_s2"});

    ordered_json rows = ordered_json::array();
    for (int t = cfg.t_min; t <= cfg.t_max; ++t) {
        const Q2Statistic q2(init, bases, t);
        const double ex = q2.second_moment_exact();
        const Estimate mc =
            q2_second_moment_mc(q2, init.seq, cfg.samples, sweep_seed(cfg.seed, t), cfg.threads);
        const double s = std::ldexp(static_cast<double>(n), -t);

        csv.row({num_i(t), num_i(n), num(s), num(ex), num(mc.value), num(mc.se),
                 num_i(mc.samples), num(ex / (s * s))});

        ordered_json row;
        row["t"] = t;
        row["s"] = s;
        row["second_moment_exact"] = ex;
        row["second_moment_mc"] = est_json(mc);
        row["exact_over_s2"] = ex / (s * s);
        rows.push_back(std::move(row));
    }

    ordered_json results;
    results["rows"] = std::move(rows);
    write_report(out, cfg, std::move(results));
    return 0;
}

// -------------------------------------------------------------------- profile

int run_profile(const ExperimentConfig& cfg, const fs::path& out) {
    const SpinSpace space = build_space(cfg);
    const SiteMarginal p(cfg.marginal_mode == "per-site" ? cfg.p_sites.front() : cfg.p);
    const std::vector<ProfileRow> rows = profile_experiment(space, p, cfg.s, cfg.t_min, cfg.t_max);

    Csv csv(out / "profile.csv");
    csv.row({"k", "s", "t", "n", "tv_exact", "tv_gaussian", "gap",
             "alpha_domain_failure_rate"});
    ordered_json jrows = ordered_json::array();
    for (const ProfileRow& r : rows) {
        csv.row({num_i(space.k()), num(cfg.s), num_i(r.t), num_i(r.n), num(r.tv_exact),
                 num(r.tv_gaussian), num(r.gap), num(r.alpha_domain_failure_rate)});
        ordered_json row;
        row["t"] = r.t;
        row["n"] = r.n;
        row["tv_exact"] = r.tv_exact;
        row["tv_gaussian"] = r.tv_gaussian;
        row["gap"] = r.gap;
        row["alpha_domain_failure_rate"] = r.alpha_domain_failure_rate;
        jrows.push_back(std::move(row));
    }

    ordered_json results;
    results["gaussian_limit"] = gaussian_tv_limit(space.k() - 1, cfg.s);
    results["final_gap"] = rows.empty() ? 0.0 : rows.back().gap;
    results["rows"] = std::move(jrows);
    write_report(out, cfg, std::move(results));
    return 0;
}

// -------------------------------------------------------------- fragmentation

int run_fragmentation(const ExperimentConfig& cfg, const fs::path& out) {
    const int n = cfg.n;
    const std::int64_t R = cfg.samples;
    const int tmax = cfg.t_max;

    const auto parts = shards(R);
    std::vector<std::vector<std::int64_t>> exceed(
        parts.size(), std::vector<std::int64_t>(static_cast<std::size_t>(tmax) + 1, 0));
    std::vector<std::int64_t> tau_sum(parts.size(), 0);
    std::vector<int> tau_max(parts.size(), 0);

    run_tasks(static_cast<int>(parts.size()), cfg.threads, [&](int task) {
        auto& ex = exceed[static_cast<std::size_t>(task)];
        for (std::int64_t r = parts[static_cast<std::size_t>(task)].lo;
             r < parts[static_cast<std::size_t>(task)].hi; ++r) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(r));
            const int tau = fragmentation_time(n, rng);
            for (int t = 0; t <= tmax && t < tau; ++t) ++ex[static_cast<std::size_t>(t)];
            tau_sum[static_cast<std::size_t>(task)] += tau;
            tau_max[static_cast<std::size_t>(task)] =
                std::max(tau_max[static_cast<std::size_t>(task)], tau);
        }
    });

    std::vector<std::int64_t> ex(static_cast<std::size_t>(tmax) + 1, 0);
    std::int64_t total_tau = 0;
    int max_tau = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (int t = 0; t <= tmax; ++t) ex[static_cast<std::size_t>(t)] += exceed[p][static_cast<std::size_t>(t)];
        total_tau += tau_sum[p];
        max_tau = std::max(max_tau, tau_max[p]);
    }

    Csv csv(out / "fragmentation.csv");
    csv.row({"t", "survival", "se", "pair_bound", "samples"});
    ordered_json rows = ordered_json::array();
    int bound_violations = 0;
    for (int t = 0; t <= tmax; ++t) {
        const double p = static_cast<double>(ex[static_cast<std::size_t>(t)]) / static_cast<double>(R);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(R));
        const double bound = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1) *
                             std::ldexp(1.0, -t);
        if (p > bound + 3.0 * se) ++bound_violations;
        csv.row({num_i(t), num(p), num(se), num(bound), num_i(R)});
        ordered_json row;
        row["t"] = t;
        row["survival"] = p;
        row["se"] = se;
        row["pair_bound"] = bound;
        rows.push_back(std::move(row));
    }

    ordered_json results;
    results["mean_tau"] = static_cast<double>(total_tau) / static_cast<double>(R);
    results["max_tau"] = max_tau;
    results["bound_violations"] = bound_violations;
    results["rows"] = std::move(rows);
    write_report(out, cfg, std::move(results));
    return 0;
}

// ------------------------------------------------------------------- validate

int run_validate(const ExperimentConfig& cfg, const std::vector<Violation>& all) {
    ordered_json doc;
    doc["artifact"] = kArtifact;
    doc["version"] = kVersion;
    doc["config"] = config_echo(cfg);
    ordered_json v = ordered_json::array();
    for (const Violation& viol : all)
        v.push_back(ordered_json{{"field", viol.field}, {"message", viol.message}});
    doc["valid"] = all.empty();
    doc["violations"] = std::move(v);
    std::cout << doc.dump(2) << "\n";
    return all.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation laboratory for recombination dynamics on product spaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    int threads_override = 0;

    const std::pair<const char*, const char*> subs[] = {
        {"exact-evolve", "dense evolution with TV trace and bound columns"},
        {"mc-evolve", "root sampling from the depth-t tree at arbitrary n"},
        {"bounds", "per-environment quenched L1 bounds against the exact TV"},
        {"basket-lb", "block-magnetization lower-bound experiment"},
        {"sharpness-q2", "two-site interaction statistic and its second moment"},
        {"profile", "exact count-space TV against the Gaussian limit"},
        {"fragmentation", "fragmentation time of the site partition"},
        {"validate", "check a config and report violations"},
    };
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--seed", seed_override, "override [run] seed");
        sub->add_option("--threads", threads_override, "worker threads (never changes results)");
        sub->add_option("--out", out_override, "output directory");
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* chosen = app.get_subcommands().front();
    const std::string kind = chosen->get_name();

    ParseResult parsed = parse_config_file(config_path);
    ExperimentConfig cfg = parsed.config;
    if (chosen->count("--seed") > 0) cfg.seed = seed_override;
    if (chosen->count("--threads") > 0) cfg.threads = threads_override;
    if (chosen->count("--out") > 0) cfg.out_dir = out_override;

    std::vector<Violation> violations = parsed.errors;
    if (kind != "validate") {
        if (cfg.kind.empty()) cfg.kind = kind;
        if (cfg.kind != kind)
            violations.push_back({"experiment.kind", "config declares '" + cfg.kind +
                                                         "' but the subcommand is '" + kind + "'"});
    }
    if (violations.empty()) {
        const std::vector<Violation> semantic = validate_config(cfg);
        violations.insert(violations.end(), semantic.begin(), semantic.end());
    }

    if (kind == "validate") return run_validate(cfg, violations);

    if (!violations.empty()) {
        for (const Violation& v : violations)
            std::cerr << "config error [" << v.field << "]: " << v.message << "\n";
        return 2;
    }

    try {
        const fs::path out(cfg.out_dir);
        fs::create_directories(out);
        if (kind == "exact-evolve") return run_exact_evolve(cfg, out);
        if (kind == "mc-evolve") return run_mc_evolve(cfg, out);
        if (kind == "bounds") return run_bounds(cfg, out);
        if (kind == "basket-lb") return run_basket_lb(cfg, out);
        if (kind == "sharpness-q2") return run_sharpness_q2(cfg, out);
        if (kind == "profile") return run_profile(cfg, out);
        if (kind == "fragmentation") return run_fragmentation(cfg, out);
        std::cerr << "unhandled subcommand '" << kind << "'\n";
        return 1;
    } catch (const CapacityExceeded& e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
