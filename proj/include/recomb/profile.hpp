#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recomb/measure.hpp"
#include "recomb/onb.hpp"
#include "recomb/rng.hpp"
#include "recomb/spin.hpp"
#include "recomb/stats.hpp"

namespace recomb {

// All count vectors (n_0..n_{k-1}) with sum n, flattened row-major in
// lexicographic order.
std::vector<int> composition_list(int n, int k);

// Exchangeable law on S^n reduced to spin counts.
struct CountMeasure {
    int n = 0;
    int k = 0;
    std::vector<int> counts;      // rows x k, lexicographic
    std::vector<double> weights;  // one per row

    std::size_t rows() const { return weights.size(); }
    std::span<const int> row(std::size_t r) const {
        return {counts.data() + r * static_cast<std::size_t>(k), static_cast<std::size_t>(k)};
    }
};

// Exact count law of the depth-t root under the monochromatic mixture:
// environment color counts M ~ Multinomial(2^t, p), then root counts
// ~ Multinomial(n, M/2^t), mixed over M.
CountMeasure monochromatic_count_evolution(const SpinSpace& space, const SiteMarginal& p, int n,
                                           int t);

// half L1 distance to Multinomial(n, p) over count vectors; equals the
// configuration-space TV by exchangeability
double count_tv_to_stationary(const CountMeasure& cm, const SiteMarginal& p);

// Spread each count-vector weight uniformly over its configurations.
DenseMeasure count_lift_dense(const CountMeasure& cm, std::uint64_t cap = kDenseCapDefault);

// Regularized lower incomplete gamma P(d/2, x/2); abs error below 1e-12
// (series for small x, continued fraction for large).
double chi_square_cdf(int d, double x);

// || N(0,(1+s)I_d) - N(0,I_d) ||_TV via the radial reduction: the densities
// cross on the sphere r^2 = d(1+s)ln(1+s)/s.
double gaussian_tv_limit(int d, double s);

struct AlphaBeta {
    std::vector<double> alpha;  // length k-1
    double beta = 0.0;
};

// Homogeneous log-density separation: with L(l) = log(1 + sum_m q_m f_m(s_l)),
// beta = n sum_l p(s_l) L(l) and alpha_m = sqrt(n) sum_l p(s_l) f_m(s_l) L(l),
// so that the quenched density factors as exp(alpha . fbar_n + beta) with
// fbar_m = n^{-1/2} sum_i f_m(sigma_i).  Throws DomainError (with the
// offending spin index) when some factor 1 + q.f is not positive.
AlphaBeta alpha_beta(std::span<const double> q, const OrthonormalBasis& basis, int n);

// psi(u) = E[exp(Z.u - |Z|^2/2)], Z ~ N(0, s I_{k-1}); the Gaussian integral
// gives (1+s)^{-(k-1)/2} exp(s|u|^2 / (2(1+s))).
double psi_closed_form(std::span<const double> u, double s);
Estimate psi_mc(std::span<const double> u, double s, std::int64_t samples, Rng& rng);

// standard normal via Box-Muller on the project RNG
double normal_draw(Rng& rng);

struct ProfileRow {
    int t = 0;
    int n = 0;
    double tv_exact = 0.0;
    double tv_gaussian = 0.0;
    double gap = 0.0;
    double alpha_domain_failure_rate = 0.0;  // P(some color missing from the environment)
};

// Cutoff-profile table along n = round(s 2^t).
std::vector<ProfileRow> profile_experiment(const SpinSpace& space, const SiteMarginal& p, double s,
                                           int t_lo, int t_hi);

}  // namespace recomb
