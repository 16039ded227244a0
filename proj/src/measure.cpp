#include "recomb/measure.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "recomb/errors.hpp"

namespace recomb {

std::uint64_t dense_size(int n, int k, std::uint64_t cap) {
    if (n < 0) throw DimensionMismatch("negative site count");
    std::uint64_t size = 1;
    for (int i = 0; i < n; ++i) {
        if (size > cap / static_cast<std::uint64_t>(k))
            throw CapacityExceeded("k^n exceeds dense cap: k=" + std::to_string(k) +
                                   " n=" + std::to_string(n) + " cap=" + std::to_string(cap));
        size *= static_cast<std::uint64_t>(k);
    }
    return size;
}

std::uint64_t config_to_index(std::span<const std::uint8_t> config, int k) {
    std::uint64_t idx = 0;
    for (std::uint8_t d : config) idx = idx * static_cast<std::uint64_t>(k) + d;
    return idx;
}

void index_to_config(std::uint64_t index, int n, int k, std::span<std::uint8_t> out) {
    for (int i = n - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(index % static_cast<std::uint64_t>(k));
        index /= static_cast<std::uint64_t>(k);
    }
}

DenseMeasure::DenseMeasure(int n, int k, std::vector<double> weights)
    : n_(n), k_(k), weights_(std::move(weights)) {
    std::uint64_t expect = 1;
    for (int i = 0; i < n; ++i) expect *= static_cast<std::uint64_t>(k);
    if (weights_.size() != expect)
        throw DimensionMismatch("weight vector has size " + std::to_string(weights_.size()) +
                                ", expected k^n = " + std::to_string(expect));
    double sum = 0.0;
    for (double w : weights_) {
        if (w < 0.0) {
            if (w < -1e-12) throw DegenerateMarginal("negative weight " + std::to_string(w));
            w = 0.0;  // tolerate exact-arithmetic dust
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw DegenerateMarginal("total mass " + std::to_string(sum) + " not within 1e-10 of 1");
    for (double& w : weights_)
        if (w < 0.0) w = 0.0;
}

DenseMeasure DenseMeasure::renormalized() const {
    double sum = 0.0;
    for (double w : weights_) sum += w;
    std::vector<double> v(weights_);
    for (double& w : v) w /= sum;
    return DenseMeasure(n_, k_, std::move(v));
}

DenseMeasure product_measure(const MarginalSequence& seq, std::uint64_t cap) {
    const int n = seq.n();
    const int k = seq.k();
    dense_size(n, k, cap);
    std::vector<double> w{1.0};
    for (int i = 0; i < n; ++i) {
        std::vector<double> next(w.size() * static_cast<std::size_t>(k));
        for (std::size_t j = 0; j < w.size(); ++j)
            for (int l = 0; l < k; ++l)
                next[j * static_cast<std::size_t>(k) + static_cast<std::size_t>(l)] =
                    w[j] * seq.site(i).prob(l);
        w.swap(next);
    }
    return DenseMeasure(n, k, std::move(w));
}

DenseMeasure point_mass(int n, int k, std::span<const std::uint8_t> config, std::uint64_t cap) {
    std::uint64_t size = dense_size(n, k, cap);
    std::vector<double> w(size, 0.0);
    w[config_to_index(config, k)] = 1.0;
    return DenseMeasure(n, k, std::move(w));
}

DenseMeasure marginalize(const DenseMeasure& mu, std::span<const int> sites) {
    const int n = mu.n();
    const int k = mu.k();
    for (std::size_t j = 0; j < sites.size(); ++j) {
        if (sites[j] < 0 || sites[j] >= n) throw DimensionMismatch("site index out of range");
        if (j > 0 && sites[j] <= sites[j - 1])
            throw DimensionMismatch("sites must be strictly increasing");
    }
    const int m = static_cast<int>(sites.size());
    std::uint64_t out_size = 1;
    for (int j = 0; j < m; ++j) out_size *= static_cast<std::uint64_t>(k);
    std::vector<double> out(out_size, 0.0);
    std::vector<std::uint8_t> cfg(static_cast<std::size_t>(n));
    for (std::uint64_t idx = 0; idx < mu.size(); ++idx) {
        index_to_config(idx, n, k, cfg);
        std::uint64_t sub = 0;
        for (int j = 0; j < m; ++j)
            sub = sub * static_cast<std::uint64_t>(k) +
                  cfg[static_cast<std::size_t>(sites[static_cast<std::size_t>(j)])];
        out[sub] += mu.weight(idx);
    }
    return DenseMeasure(m, k, std::move(out));
}

double tv_distance(const DenseMeasure& mu, const DenseMeasure& nu) {
    if (mu.n() != nu.n() || mu.k() != nu.k())
        throw DimensionMismatch("tv_distance over mismatched spaces");
    double acc = 0.0;
    for (std::uint64_t idx = 0; idx < mu.size(); ++idx)
        acc += std::abs(mu.weight(idx) - nu.weight(idx));
    return 0.5 * acc;
}

MarginalCheck check_marginal_constraint(const DenseMeasure& mu, const MarginalSequence& seq,
                                        double tol) {
    if (mu.n() != seq.n() || mu.k() != seq.k())
        throw DimensionMismatch("measure does not match marginal sequence");
    MarginalCheck result{true, 0.0, -1};
    for (int i = 0; i < mu.n(); ++i) {
        const int site = i;
        DenseMeasure mi = marginalize(mu, std::span<const int>(&site, 1));
        for (int l = 0; l < mu.k(); ++l) {
            double dev = std::abs(mi.weight(static_cast<std::uint64_t>(l)) - seq.site(i).prob(l));
            if (dev > result.worst_deviation) {
                result.worst_deviation = dev;
                result.worst_site = i;
            }
        }
    }
    result.ok = result.worst_deviation <= tol;
    return result;
}

void save_measure_csv(const DenseMeasure& mu, const SpinSpace& space, std::ostream& out) {
    char buf[64];
    out << mu.n() << "," << mu.k() << "\n";
    for (int l = 0; l < space.k(); ++l) {
        std::snprintf(buf, sizeof buf, "%.17g", space.value(l));
        out << (l ? "," : "") << buf;
    }
    out << "\n";
    for (std::uint64_t idx = 0; idx < mu.size(); ++idx) {
        std::snprintf(buf, sizeof buf, "%.17g", mu.weight(idx));
        out << buf << "\n";
    }
}

std::pair<DenseMeasure, SpinSpace> load_measure_csv(std::istream& in, std::uint64_t cap) {
    std::string line;
    if (!std::getline(in, line)) throw DimensionMismatch("empty measure file");
    int n = 0, k = 0;
    if (std::sscanf(line.c_str(), "%d,%d", &n, &k) != 2)
        throw DimensionMismatch("bad measure header: " + line);
    if (!std::getline(in, line)) throw DimensionMismatch("missing spin values");
    std::vector<double> values;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) values.push_back(std::stod(tok));
    }
    if (static_cast<int>(values.size()) != k)
        throw DimensionMismatch("spin value count does not match k");
    std::uint64_t size = dense_size(n, k, cap);
    std::vector<double> w;
    w.reserve(size);
    while (w.size() < size && std::getline(in, line)) {
        if (line.empty()) continue;
        w.push_back(std::stod(line));
    }
    if (w.size() != size) throw DimensionMismatch("weight count does not match k^n");
    return {DenseMeasure(n, k, std::move(w)), SpinSpace(std::move(values))};
}

std::pair<DenseMeasure, SpinSpace> load_measure_csv_file(const std::string& path,
                                                         std::uint64_t cap) {
    std::ifstream in(path);
    if (!in) throw DimensionMismatch("cannot open measure file: " + path);
    return load_measure_csv(in, cap);
}

}  // namespace recomb
