#include "recomb/onb.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "recomb/errors.hpp"

namespace recomb {

namespace {

// weighted inner product of two value vectors
double dot_p(const std::vector<double>& a, const std::vector<double>& b,
             const SiteMarginal& p) {
    double s = 0.0;
    for (int l = 0; l < static_cast<int>(a.size()); ++l)
        s += a[static_cast<std::size_t>(l)] * b[static_cast<std::size_t>(l)] * p.prob(l);
    return s;
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(SpinSpace space, SiteMarginal marginal)
    : space_(std::move(space)), marginal_(std::move(marginal)) {
    const int k = space_.k();
    if (marginal_.k() != k)
        throw DimensionMismatch("basis: marginal size does not match spin space");

    table_.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0.0);
    leading_.assign(static_cast<std::size_t>(k), 0.0);

    // rows built so far, as value vectors on the k points
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(k));

    for (int m = 0; m < k; ++m) {
        // start from the monomial s^m; track its expansion in monomials so the
        // leading coefficient (of s^m) survives the orthogonalization
        std::vector<double> v(static_cast<std::size_t>(k));
        for (int l = 0; l < k; ++l)
            v[static_cast<std::size_t>(l)] = std::pow(space_.value(l), m);

        // modified Gram-Schmidt with one reorthogonalization pass
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < m; ++j) {
                double c = dot_p(v, rows[static_cast<std::size_t>(j)], marginal_);
                for (int l = 0; l < k; ++l)
                    v[static_cast<std::size_t>(l)] -=
                        c * rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
            }
        }

        double nrm = std::sqrt(dot_p(v, v, marginal_));
        if (!(nrm > 1e-14))
            throw NumericalBreakdown("basis: Gram-Schmidt norm collapsed at degree " +
                                     std::to_string(m));
        // subtracting lower-degree rows never touches the s^m coefficient, so the
        // leading coefficient is 1/nrm > 0 and the sign convention holds for free
        for (int l = 0; l < k; ++l) v[static_cast<std::size_t>(l)] /= nrm;
        leading_[static_cast<std::size_t>(m)] = 1.0 / nrm;

        for (int l = 0; l < k; ++l)
            table_[static_cast<std::size_t>(m) * static_cast<std::size_t>(k) +
                   static_cast<std::size_t>(l)] = v[static_cast<std::size_t>(l)];
        rows.push_back(std::move(v));
    }
}

std::vector<BasisPtr> basis_table(const MarginalSequence& seq) {
    std::vector<BasisPtr> out;
    out.reserve(static_cast<std::size_t>(seq.n()));
    for (int i = 0; i < seq.n(); ++i) {
        BasisPtr ptr;
        // reuse the table of an earlier site with the same marginal
        for (int j = 0; j < i; ++j) {
            if (seq.site(j).probs() == seq.site(i).probs()) {
                ptr = out[static_cast<std::size_t>(j)];
                break;
            }
        }
        if (!ptr) ptr = build_basis(seq.space(), seq.site(i));
        out.push_back(std::move(ptr));
    }
    return out;
}

}  // namespace recomb
