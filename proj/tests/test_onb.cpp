#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "recomb/errors.hpp"
#include "recomb/onb.hpp"
#include "recomb/rng.hpp"
#include "recomb/spin.hpp"

using namespace recomb;

namespace {

double gram_entry(const OrthonormalBasis& basis, int a, int b) {
    double acc = 0.0;
    for (int l = 0; l < basis.k(); ++l)
        acc += basis.value(a, l) * basis.value(b, l) * basis.marginal().prob(l);
    return acc;
}

}  // namespace

TEST_SUITE("onb") {

TEST_CASE("balanced two-level basis") {
    BasisPtr basis = build_basis(SpinSpace::standard(2), SiteMarginal({0.5, 0.5}));
    CHECK(basis->value(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(basis->value(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(basis->value(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(basis->value(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("biased two-level basis is the standardized spin") {
    const double p = 0.3;
    BasisPtr basis = build_basis(SpinSpace::standard(2), SiteMarginal({p, 1.0 - p}));
    CHECK(basis->value(1, 0) == doctest::Approx(-std::sqrt((1.0 - p) / p)).epsilon(1e-13));
    CHECK(basis->value(1, 1) == doctest::Approx(std::sqrt(p / (1.0 - p))).epsilon(1e-13));
}

TEST_CASE("uniform three-level first polynomial") {
    BasisPtr basis = build_basis(SpinSpace::standard(3),
                                 SiteMarginal({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    const double scale = std::sqrt(2.0 / 3.0);
    for (int l = 0; l < 3; ++l)
        CHECK(basis->value(1, l) ==
              doctest::Approx((static_cast<double>(l) - 1.0) / scale).epsilon(1e-13));
}

TEST_CASE("gram matrix is the identity for random marginals") {
    Rng rng(201);
    for (int round = 0; round < 40; ++round) {
        const int k = 2 + static_cast<int>(rng.next_below(5));
        SiteMarginal p(testgen::random_probs(k, rng));
        BasisPtr basis = build_basis(SpinSpace::standard(k), p);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                CHECK(gram_entry(*basis, a, b) ==
                      doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("row zero is constant and higher rows have zero mean") {
    Rng rng(211);
    for (int round = 0; round < 10; ++round) {
        const int k = 2 + static_cast<int>(rng.next_below(4));
        SiteMarginal p(testgen::random_probs(k, rng));
        BasisPtr basis = build_basis(SpinSpace::standard(k), p);
        for (int l = 0; l < k; ++l) CHECK(basis->value(0, l) == doctest::Approx(1.0).epsilon(1e-14));
        for (int m = 1; m < k; ++m) {
            double mean = 0.0;
            for (int l = 0; l < k; ++l) mean += basis->value(m, l) * p.prob(l);
            CHECK(mean == doctest::Approx(0.0).epsilon(1e-11).scale(1.0));
        }
    }
}

TEST_CASE("values respect the uniform delta bound") {
    Rng rng(221);
    for (int round = 0; round < 20; ++round) {
        const int k = 2 + static_cast<int>(rng.next_below(5));
        SiteMarginal p(testgen::random_probs(k, rng));
        const double cap = 1.0 / std::sqrt(p.delta()) + 1e-12;
        BasisPtr basis = build_basis(SpinSpace::standard(k), p);
        for (int m = 0; m < k; ++m)
            for (int l = 0; l < k; ++l) CHECK(std::abs(basis->value(m, l)) <= cap);
    }
}

TEST_CASE("inverse of the value table is P M^T") {
    Rng rng(231);
    for (int round = 0; round < 15; ++round) {
        const int k = 2 + static_cast<int>(rng.next_below(5));
        SiteMarginal p(testgen::random_probs(k, rng));
        BasisPtr basis = build_basis(SpinSpace::standard(k), p);
        // (M * P M^T)[a][b] = sum_l M[a][l] p_l M[b][l] should be identity;
        // here M[m][l] = f_m(s_l)
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                double acc = 0.0;
                for (int l = 0; l < k; ++l)
                    acc += basis->value(a, l) * p.prob(l) * basis->value(b, l);
                CHECK(acc == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
            }
        // and in the other order: (P M^T * M)[l][l'] = p_l sum_m f_m(l) f_m(l')
        // = delta_{ll'} by completeness
        for (int l = 0; l < k; ++l)
            for (int l2 = 0; l2 < k; ++l2) {
                double acc = 0.0;
                for (int m = 0; m < k; ++m) acc += basis->value(m, l) * basis->value(m, l2);
                acc *= p.prob(l);
                CHECK(acc == doctest::Approx(l == l2 ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
            }
    }
}

TEST_CASE("degree structure and positive leading coefficients") {
    Rng rng(241);
    const int k = 5;
    SiteMarginal p(testgen::random_probs(k, rng));
    SpinSpace space = SpinSpace::standard(k);
    BasisPtr basis = build_basis(space, p);
    for (int m = 0; m < k; ++m) {
        CHECK(basis->leading_coefficient(m) > 0.0);
        // row m is orthogonal to all lower-degree monomials
        for (int d = 0; d < m; ++d) {
            double acc = 0.0;
            for (int l = 0; l < k; ++l)
                acc += basis->value(m, l) * std::pow(space.value(l), d) * p.prob(l);
            CHECK(acc == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("first polynomial is affine invariant") {
    SiteMarginal p({0.2, 0.5, 0.3});
    BasisPtr base = build_basis(SpinSpace({0.0, 1.0, 2.0}), p);
    BasisPtr scaled = build_basis(SpinSpace({10.0, 13.0, 16.0}), p);  // s -> 3s + 10
    for (int l = 0; l < 3; ++l)
        CHECK(scaled->value(1, l) == doctest::Approx(base->value(1, l)).epsilon(1e-12));
}

TEST_CASE("basis table shares identical marginals") {
    MarginalSequence homog(SpinSpace::standard(3), SiteMarginal({0.2, 0.3, 0.5}), 4);
    std::vector<BasisPtr> tables = basis_table(homog);
    REQUIRE(tables.size() == 4);
    for (std::size_t i = 1; i < 4; ++i) CHECK(tables[i].get() == tables[0].get());

    MarginalSequence mixed(SpinSpace::standard(2),
                           {SiteMarginal({0.3, 0.7}), SiteMarginal({0.4, 0.6}),
                            SiteMarginal({0.3, 0.7})});
    std::vector<BasisPtr> mt = basis_table(mixed);
    CHECK(mt[0].get() != mt[1].get());
    CHECK(mt[2].get() == mt[0].get());
}

TEST_CASE("near-duplicate spin values break down loudly") {
    CHECK_THROWS_AS(build_basis(SpinSpace({0.0, 1e-15, 1.0}),
                                SiteMarginal({1.0 / 3, 1.0 / 3, 1.0 / 3})),
                    NumericalBreakdown);
}

}  // TEST_SUITE
