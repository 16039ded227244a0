#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "recomb/spin.hpp"

namespace recomb {

// Default cap on the dense representation size k^n.
inline constexpr std::uint64_t kDenseCapDefault = std::uint64_t(1) << 24;

// Number of configurations k^n; throws CapacityExceeded above cap.
std::uint64_t dense_size(int n, int k, std::uint64_t cap = kDenseCapDefault);

// Canonical index order: site 0 is the most significant base-k digit.
std::uint64_t config_to_index(std::span<const std::uint8_t> config, int k);
void index_to_config(std::uint64_t index, int n, int k, std::span<std::uint8_t> out);

// Probability vector over S^n in canonical index order.  Immutable; all
// operations below are pure.
class DenseMeasure {
  public:
    // validates: weights nonnegative, total mass within 1e-10 of one
    DenseMeasure(int n, int k, std::vector<double> weights);

    int n() const { return n_; }
    int k() const { return k_; }
    std::uint64_t size() const { return weights_.size(); }
    double weight(std::uint64_t index) const { return weights_[index]; }
    const std::vector<double>& weights() const { return weights_; }

    // explicit renormalization; never done silently
    DenseMeasure renormalized() const;

  private:
    int n_;
    int k_;
    std::vector<double> weights_;
};

DenseMeasure product_measure(const MarginalSequence& seq, std::uint64_t cap = kDenseCapDefault);

// Point mass at one configuration.
DenseMeasure point_mass(int n, int k, std::span<const std::uint8_t> config,
                        std::uint64_t cap = kDenseCapDefault);

// Marginal onto `sites` (strictly increasing site indices, order preserved).
// Retaining no sites yields the scalar measure with weight 1.
DenseMeasure marginalize(const DenseMeasure& mu, std::span<const int> sites);

double tv_distance(const DenseMeasure& mu, const DenseMeasure& nu);

struct MarginalCheck {
    bool ok;
    double worst_deviation;
    int worst_site;
};

// sup-norm comparison of every single-site marginal of mu against seq
MarginalCheck check_marginal_constraint(const DenseMeasure& mu, const MarginalSequence& seq,
                                        double tol);

// Flat CSV format: "n,k" / spin values / one weight per line.
void save_measure_csv(const DenseMeasure& mu, const SpinSpace& space, std::ostream& out);
std::pair<DenseMeasure, SpinSpace> load_measure_csv(std::istream& in,
                                                    std::uint64_t cap = kDenseCapDefault);
std::pair<DenseMeasure, SpinSpace> load_measure_csv_file(const std::string& path,
                                                         std::uint64_t cap = kDenseCapDefault);

}  // namespace recomb
