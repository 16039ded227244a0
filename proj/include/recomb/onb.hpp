#pragma once

#include <memory>
#include <vector>

#include "recomb/spin.hpp"

namespace recomb {

// Orthonormal polynomial basis of L2(S, p) for one site, stored as a
// k x k value table: table(m, l) = f_m(s_l).  f_0 is identically 1 and
// f_1 is the standardized spin variable; row m is a degree-m polynomial
// with positive leading coefficient.
class OrthonormalBasis {
  public:
    OrthonormalBasis(SpinSpace space, SiteMarginal marginal);

    int k() const { return space_.k(); }
    const SpinSpace& space() const { return space_; }
    const SiteMarginal& marginal() const { return marginal_; }

    double value(int m, int l) const {
        return table_[static_cast<std::size_t>(m) * static_cast<std::size_t>(k()) +
                      static_cast<std::size_t>(l)];
    }
    // leading coefficient of f_m (positive by convention)
    double leading_coefficient(int m) const { return leading_[static_cast<std::size_t>(m)]; }

  private:
    SpinSpace space_;
    SiteMarginal marginal_;
    std::vector<double> table_;    // row-major, k*k
    std::vector<double> leading_;  // per row
};

using BasisPtr = std::shared_ptr<const OrthonormalBasis>;

inline BasisPtr build_basis(const SpinSpace& space, const SiteMarginal& p) {
    return std::make_shared<const OrthonormalBasis>(space, p);
}

// One basis per site; identical marginals share one table object.
std::vector<BasisPtr> basis_table(const MarginalSequence& seq);

}  // namespace recomb
