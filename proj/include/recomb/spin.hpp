#pragma once

#include <cstddef>
#include <vector>

namespace recomb {

// Ordered set of k >= 2 distinct real spin values, s_0 < s_1 < ... < s_{k-1}.
class SpinSpace {
  public:
    explicit SpinSpace(std::vector<double> values);

    int k() const { return static_cast<int>(values_.size()); }
    double value(int l) const { return values_[static_cast<std::size_t>(l)]; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const SpinSpace& o) const { return values_ == o.values_; }

    // {-1, +1} for k=2, otherwise {0, 1, ..., k-1}
    static SpinSpace standard(int k);

  private:
    std::vector<double> values_;
};

// Nondegenerate distribution on one site.  delta is computed from the
// vector itself: the largest d with all probabilities in [d, 1-d].
class SiteMarginal {
  public:
    explicit SiteMarginal(std::vector<double> probs);

    int k() const { return static_cast<int>(probs_.size()); }
    double prob(int l) const { return probs_[static_cast<std::size_t>(l)]; }
    const std::vector<double>& probs() const { return probs_; }
    double delta() const { return delta_; }

    // F(l) = p(s_0) + ... + p(s_l)
    double cdf(int l) const { return cdf_[static_cast<std::size_t>(l)]; }
    // right-continuous generalized inverse: min{ l : F(l) >= u }
    int quantile(double u) const;

    bool operator==(const SiteMarginal& o) const { return probs_ == o.probs_; }

  private:
    std::vector<double> probs_;
    std::vector<double> cdf_;
    double delta_;
};

// Per-site marginals p_1..p_n over a common spin space.
class MarginalSequence {
  public:
    MarginalSequence(SpinSpace space, std::vector<SiteMarginal> marginals);

    // homogeneous sequence p_i = p for all i
    MarginalSequence(SpinSpace space, const SiteMarginal& p, int n);

    int n() const { return static_cast<int>(marginals_.size()); }
    int k() const { return space_.k(); }
    const SpinSpace& space() const { return space_; }
    const SiteMarginal& site(int i) const { return marginals_[static_cast<std::size_t>(i)]; }
    double delta() const { return delta_; }
    bool homogeneous() const;

  private:
    SpinSpace space_;
    std::vector<SiteMarginal> marginals_;
    double delta_;
};

}  // namespace recomb
