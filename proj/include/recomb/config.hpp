#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recomb/initdist.hpp"
#include "recomb/measure.hpp"
#include "recomb/spin.hpp"

namespace recomb {

struct Violation {
    std::string field;
    std::string message;
};

// Flat key = value experiment description with [experiment] / [model] /
// [init] / [run] sections.  See README for the key list.
struct ExperimentConfig {
    std::string kind;

    // model
    int k = 2;
    std::vector<double> spins;  // empty -> SpinSpace::standard(k)
    int n = 2;
    std::string marginal_mode = "homogeneous";  // homogeneous | per-site | random
    std::vector<double> p;                      // homogeneous probabilities
    std::vector<std::vector<double>> p_sites;   // per-site rows, index 0 = site 1
    double delta = 0.0;                         // random-mode floor / declared certificate
    bool delta_set = false;
    std::uint64_t marginal_seed = 0;

    // init
    std::string init_kind = "product-stationary";
    int b = 1;
    bool b_auto = false;  // basket size from the 80/rho recipe
    std::string dense_path;

    // run
    int t_min = 0;
    int t_max = 0;
    std::int64_t samples = 10000;
    std::int64_t samples_pi = 0;  // 0 -> samples
    std::uint64_t seed = 1;
    int threads = 1;
    double s = 1.0;  // profile scale n 2^{-t}
    std::string out_dir = ".";
};

struct ParseResult {
    ExperimentConfig config;
    std::vector<Violation> errors;
};

ParseResult parse_config_text(const std::string& text);
ParseResult parse_config_file(const std::string& path);

// Semantic checks: known kinds, uniformly-positive marginals (with the
// declared delta certificate honored), capacity caps, parameter coherence.
std::vector<Violation> validate_config(const ExperimentConfig& cfg);

SpinSpace build_space(const ExperimentConfig& cfg);
MarginalSequence build_sequence(const ExperimentConfig& cfg);
StructuredInit build_init(const ExperimentConfig& cfg, std::uint64_t cap = kDenseCapDefault);

}  // namespace recomb
