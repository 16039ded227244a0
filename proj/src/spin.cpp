#include "recomb/spin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recomb/errors.hpp"

namespace recomb {

SpinSpace::SpinSpace(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2)
        throw DegenerateMarginal("SpinSpace needs k >= 2 values, got " +
                                 std::to_string(values_.size()));
    for (std::size_t l = 1; l < values_.size(); ++l)
        if (!(values_[l - 1] < values_[l]))
            throw DegenerateMarginal("spin values must be strictly increasing");
}

SpinSpace SpinSpace::standard(int k) {
    if (k == 2) return SpinSpace({-1.0, 1.0});
    std::vector<double> v(static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) v[static_cast<std::size_t>(l)] = static_cast<double>(l);
    return SpinSpace(std::move(v));
}

SiteMarginal::SiteMarginal(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw DegenerateMarginal("marginal needs k >= 2 entries");
    double sum = 0.0;
    double lo = 1.0, hi = 0.0;
    for (double p : probs_) {
        if (!(p > 0.0) || !(p < 1.0))
            throw DegenerateMarginal("marginal probability outside (0,1): " + std::to_string(p));
        sum += p;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw DegenerateMarginal("marginal probabilities sum to " + std::to_string(sum));
    delta_ = std::min(lo, 1.0 - hi);
    cdf_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t l = 0; l < probs_.size(); ++l) {
        acc += probs_[l];
        cdf_[l] = acc;
    }
    cdf_.back() = 1.0;
}

int SiteMarginal::quantile(double u) const {
    // min{ l : F(l) >= u }; ties cannot occur since all probs > 0
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return k() - 1;
    return static_cast<int>(it - cdf_.begin());
}

MarginalSequence::MarginalSequence(SpinSpace space, std::vector<SiteMarginal> marginals)
    : space_(std::move(space)), marginals_(std::move(marginals)) {
    if (marginals_.empty()) throw DegenerateMarginal("empty marginal sequence");
    delta_ = 1.0;
    for (const auto& m : marginals_) {
        if (m.k() != space_.k())
            throw DimensionMismatch("marginal size does not match spin space");
        delta_ = std::min(delta_, m.delta());
    }
}

MarginalSequence::MarginalSequence(SpinSpace space, const SiteMarginal& p, int n)
    : MarginalSequence(std::move(space), std::vector<SiteMarginal>(static_cast<std::size_t>(n), p)) {}

bool MarginalSequence::homogeneous() const {
    for (std::size_t i = 1; i < marginals_.size(); ++i)
        if (!(marginals_[i] == marginals_[0])) return false;
    return true;
}

}  // namespace recomb
