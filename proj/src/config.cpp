#include "recomb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "recomb/errors.hpp"
#include "recomb/rng.hpp"

namespace recomb {

namespace {

const std::set<std::string> kKinds = {"exact-evolve", "mc-evolve",    "bounds",  "basket-lb",
                                      "sharpness-q2", "profile",      "fragmentation"};
const std::set<std::string> kInitKinds = {"product-stationary", "comonotonic-global",
                                          "monochromatic", "basket", "dense"};

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

struct Parser {
    ExperimentConfig cfg;
    std::vector<Violation> errors;

    bool to_int(const std::string& field, const std::string& v, long long lo, long long hi,
                long long& out) {
        try {
            std::size_t pos = 0;
            out = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            errors.push_back({field, "not an integer: '" + v + "'"});
            return false;
        }
        if (out < lo || out > hi) {
            errors.push_back({field, "out of range [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "]: " + v});
            return false;
        }
        return true;
    }

    bool to_u64(const std::string& field, const std::string& v, std::uint64_t& out) {
        try {
            std::size_t pos = 0;
            out = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            errors.push_back({field, "not an unsigned integer: '" + v + "'"});
            return false;
        }
        return true;
    }

    bool to_double(const std::string& field, const std::string& v, double& out) {
        try {
            std::size_t pos = 0;
            out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            errors.push_back({field, "not a number: '" + v + "'"});
            return false;
        }
        return true;
    }

    bool to_double_list(const std::string& field, const std::string& v, std::vector<double>& out) {
        out.clear();
        for (const std::string& tok : split_ws(v)) {
            double d = 0.0;
            if (!to_double(field, tok, d)) return false;
            out.push_back(d);
        }
        return true;
    }

    void handle(const std::string& section, const std::string& key, const std::string& value) {
        const std::string field = section + "." + key;
        long long iv = 0;

        if (section == "experiment") {
            if (key == "kind") {
                cfg.kind = value;
                return;
            }
        } else if (section == "model") {
            if (key == "k") {
                if (to_int(field, value, 2, 64, iv)) cfg.k = static_cast<int>(iv);
                return;
            }
            if (key == "spins") {
                to_double_list(field, value, cfg.spins);
                return;
            }
            if (key == "n") {
                if (to_int(field, value, 1, 1 << 24, iv)) cfg.n = static_cast<int>(iv);
                return;
            }
            if (key == "marginals") {
                cfg.marginal_mode = value;
                return;
            }
            if (key == "p") {
                to_double_list(field, value, cfg.p);
                return;
            }
            if (key == "delta") {
                if (to_double(field, value, cfg.delta)) cfg.delta_set = true;
                return;
            }
            if (key == "marginal_seed") {
                to_u64(field, value, cfg.marginal_seed);
                return;
            }
            if (key.size() > 1 && key[0] == 'p' &&
                std::all_of(key.begin() + 1, key.end(),
                            [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                const int site = std::stoi(key.substr(1));
                if (site < 1 || site > (1 << 24)) {
                    errors.push_back({field, "site index out of range"});
                    return;
                }
                if (static_cast<int>(cfg.p_sites.size()) < site) cfg.p_sites.resize(static_cast<std::size_t>(site));
                to_double_list(field, value, cfg.p_sites[static_cast<std::size_t>(site - 1)]);
                return;
            }
        } else if (section == "init") {
            if (key == "kind") {
                cfg.init_kind = value;
                return;
            }
            if (key == "b") {
                if (value == "auto") {
                    cfg.b_auto = true;
                    return;
                }
                if (to_int(field, value, 1, 1 << 24, iv)) cfg.b = static_cast<int>(iv);
                return;
            }
            if (key == "path") {
                cfg.dense_path = value;
                return;
            }
        } else if (section == "run") {
            if (key == "t") {
                if (to_int(field, value, 0, 40, iv)) cfg.t_min = cfg.t_max = static_cast<int>(iv);
                return;
            }
            if (key == "t_min") {
                if (to_int(field, value, 0, 40, iv)) cfg.t_min = static_cast<int>(iv);
                return;
            }
            if (key == "t_max") {
                if (to_int(field, value, 0, 40, iv)) cfg.t_max = static_cast<int>(iv);
                return;
            }
            if (key == "samples") {
                if (to_int(field, value, 1, 1'000'000'000, iv)) cfg.samples = iv;
                return;
            }
            if (key == "samples_pi") {
                if (to_int(field, value, 1, 1'000'000'000, iv)) cfg.samples_pi = iv;
                return;
            }
            if (key == "seed") {
                to_u64(field, value, cfg.seed);
                return;
            }
            if (key == "threads") {
                if (to_int(field, value, 1, 1024, iv)) cfg.threads = static_cast<int>(iv);
                return;
            }
            if (key == "s") {
                to_double(field, value, cfg.s);
                return;
            }
            if (key == "out") {
                cfg.out_dir = value;
                return;
            }
        } else {
            errors.push_back({section, "unknown section"});
            return;
        }
        errors.push_back({field, "unknown key"});
    }
};

}  // namespace

ParseResult parse_config_text(const std::string& text) {
    Parser p;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                p.errors.push_back({"line " + std::to_string(lineno), "malformed section header"});
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            p.errors.push_back({"line " + std::to_string(lineno), "expected key = value"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            p.errors.push_back({"line " + std::to_string(lineno), "key before any [section]"});
            continue;
        }
        p.handle(section, key, value);
    }
    return {std::move(p.cfg), std::move(p.errors)};
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return {{}, {{"config", "cannot open '" + path + "'"}}};
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

void check_prob_row(const std::string& field, const std::vector<double>& row, int k, bool delta_set,
                    double delta, std::vector<Violation>& out) {
    if (static_cast<int>(row.size()) != k) {
        out.push_back({field, "expected " + std::to_string(k) + " probabilities, got " +
                                  std::to_string(row.size())});
        return;
    }
    double sum = 0.0;
    double lo = 1.0;
    double hi = 0.0;
    for (double v : row) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo > 0.0) || !(hi < 1.0)) {
        out.push_back({field, "probabilities must lie strictly inside (0,1)"});
        return;
    }
    if (std::abs(sum - 1.0) > 1e-9) out.push_back({field, "probabilities sum to " + std::to_string(sum)});
    if (delta_set && (lo < delta - 1e-12 || hi > 1.0 - delta + 1e-12))
        out.push_back({field, "violates the declared delta = " + std::to_string(delta)});
}

}  // namespace

std::vector<Violation> validate_config(const ExperimentConfig& cfg) {
    std::vector<Violation> out;

    if (cfg.kind.empty())
        out.push_back({"experiment.kind", "missing"});
    else if (kKinds.count(cfg.kind) == 0)
        out.push_back({"experiment.kind", "unknown kind '" + cfg.kind + "'"});

    if (!cfg.spins.empty()) {
        if (static_cast<int>(cfg.spins.size()) != cfg.k)
            out.push_back({"model.spins", "expected k = " + std::to_string(cfg.k) + " values"});
        else if (!std::is_sorted(cfg.spins.begin(), cfg.spins.end()) ||
                 std::adjacent_find(cfg.spins.begin(), cfg.spins.end()) != cfg.spins.end())
            out.push_back({"model.spins", "spin values must be strictly increasing"});
    }

    if (cfg.marginal_mode == "homogeneous") {
        check_prob_row("model.p", cfg.p, cfg.k, cfg.delta_set, cfg.delta, out);
    } else if (cfg.marginal_mode == "per-site") {
        if (static_cast<int>(cfg.p_sites.size()) != cfg.n)
            out.push_back({"model.p<i>", "need one row per site, p1..p" + std::to_string(cfg.n)});
        for (std::size_t i = 0; i < cfg.p_sites.size(); ++i)
            check_prob_row("model.p" + std::to_string(i + 1), cfg.p_sites[i], cfg.k, cfg.delta_set,
                           cfg.delta, out);
    } else if (cfg.marginal_mode == "random") {
        if (!cfg.delta_set || !(cfg.delta > 0.0) || cfg.delta > 1.0 / cfg.k)
            out.push_back({"model.delta", "random marginals need delta in (0, 1/k]"});
    } else {
        out.push_back({"model.marginals", "unknown mode '" + cfg.marginal_mode + "'"});
    }

    if (kInitKinds.count(cfg.init_kind) == 0)
        out.push_back({"init.kind", "unknown init '" + cfg.init_kind + "'"});
    if (cfg.init_kind == "monochromatic") {
        bool homogeneous = cfg.marginal_mode == "homogeneous";
        if (cfg.marginal_mode == "per-site") {
            homogeneous = true;
            for (const auto& row : cfg.p_sites)
                if (row != cfg.p_sites.front()) homogeneous = false;
        }
        if (!homogeneous)
            out.push_back({"init.kind", "monochromatic init needs homogeneous marginals"});
    }
    if (cfg.init_kind == "basket" && !cfg.b_auto && (cfg.b < 1 || cfg.b > cfg.n))
        out.push_back({"init.b", "basket size must lie in [1, n]"});
    if (cfg.init_kind == "dense" && cfg.dense_path.empty())
        out.push_back({"init.path", "dense init needs a measure file"});

    if (cfg.t_min > cfg.t_max) out.push_back({"run.t_min", "t_min exceeds t_max"});

    const bool needs_dense = cfg.kind == "exact-evolve" || cfg.init_kind == "dense";
    if (needs_dense) {
        try {
            dense_size(cfg.n, cfg.k);
        } catch (const CapacityExceeded& e) {
            out.push_back({"model.n", std::string("dense representation refused: ") + e.what()});
        }
    }

    if (cfg.kind == "basket-lb" && cfg.init_kind != "basket")
        out.push_back({"init.kind", "basket-lb runs on the basket init"});

    if (cfg.kind == "profile") {
        if (!(cfg.s > 0.0)) out.push_back({"run.s", "profile scale must be positive"});
        bool homogeneous = cfg.marginal_mode == "homogeneous";
        if (cfg.marginal_mode == "per-site" && !cfg.p_sites.empty()) {
            homogeneous = true;
            for (const auto& row : cfg.p_sites)
                if (row != cfg.p_sites.front()) homogeneous = false;
        }
        if (!homogeneous)
            out.push_back({"model.marginals", "profile needs one explicit marginal shared by all sites"});
    }

    return out;
}

SpinSpace build_space(const ExperimentConfig& cfg) {
    if (cfg.spins.empty()) return SpinSpace::standard(cfg.k);
    return SpinSpace(cfg.spins);
}

// Validation admits sums within 1e-9 of one; divide that slack out so the
// stored marginals are exactly normalized.
std::vector<double> normalized_row(std::vector<double> row) {
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v /= sum;
    return row;
}

MarginalSequence build_sequence(const ExperimentConfig& cfg) {
    const SpinSpace space = build_space(cfg);
    if (cfg.marginal_mode == "homogeneous")
        return MarginalSequence(space, SiteMarginal(normalized_row(cfg.p)), cfg.n);
    if (cfg.marginal_mode == "per-site") {
        std::vector<SiteMarginal> sites;
        sites.reserve(cfg.p_sites.size());
        for (const auto& row : cfg.p_sites) sites.emplace_back(normalized_row(row));
        return MarginalSequence(space, std::move(sites));
    }
    // random in P_delta: exponential spacings pushed away from the simplex faces
    std::vector<SiteMarginal> sites;
    sites.reserve(static_cast<std::size_t>(cfg.n));
    const double slack = 1.0 - cfg.k * cfg.delta;
    for (int i = 0; i < cfg.n; ++i) {
        Rng rng(cfg.marginal_seed, static_cast<std::uint64_t>(i));
        std::vector<double> w(static_cast<std::size_t>(cfg.k));
        double tot = 0.0;
        for (double& v : w) {
            v = -std::log(1.0 - rng.next_unit());
            tot += v;
        }
        for (double& v : w) v = cfg.delta + slack * v / tot;
        sites.emplace_back(std::move(w));
    }
    return MarginalSequence(space, std::move(sites));
}

StructuredInit build_init(const ExperimentConfig& cfg, std::uint64_t cap) {
    MarginalSequence seq = build_sequence(cfg);
    if (cfg.init_kind == "product-stationary") return product_stationary_init(std::move(seq));
    if (cfg.init_kind == "comonotonic-global") return comonotonic_global_init(std::move(seq));
    if (cfg.init_kind == "monochromatic") return monochromatic_init(std::move(seq));
    if (cfg.init_kind == "basket") return basket_init(std::move(seq), cfg.b);
    if (cfg.init_kind == "dense") {
        auto [mu, space] = load_measure_csv_file(cfg.dense_path, cap);
        if (!(space == seq.space()))
            throw DimensionMismatch("dense init: spin space in '" + cfg.dense_path +
                                    "' does not match the model");
        return dense_init(std::move(seq), std::move(mu));
    }
    throw std::invalid_argument("unknown init kind '" + cfg.init_kind + "'");
}

}  // namespace recomb
