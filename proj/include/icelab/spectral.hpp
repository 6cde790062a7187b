#pragma once

#include <vector>

#include "icelab/correlation.hpp"
#include "icelab/types.hpp"
#include "icelab/words.hpp"

namespace icelab {

/// Polynomial classes: M (integer frequencies, unit coefficients), K
/// (unimodular coefficients), L (+-1 coefficients), MR (real frequencies).
enum class PolyClass { M, K, L, MR };

struct FrequencySet {
    VectorXd omega;
    bool integral = true;
    /// Rotations of the stage the frequencies came from, if any.
    std::vector<Index> rotations;

    Index size() const { return omega.size(); }
};

/// omega(y) = y h_n + sum_{j<y} s_{n,j}.
FrequencySet stage_frequencies(const Schedule& schedule, std::size_t n);

/// omega_y = (n / eps^2) exp(eps y / n), y = 0..n-1.
FrequencySet exp_frequency_set(Index n, double eps);

enum class GridKind { Circle, Line };

struct PolynomialGrid {
    GridKind kind = GridKind::Circle;
    /// Angles theta_k = 2 pi k / M on the circle, or points of [a, b].
    VectorXd points;
    VectorXcd values;
};

/// P(z) = (1/sqrt q) sum_y c_y z^{omega_y} at the M-th roots of unity.
/// Empty `coeffs` means all ones.
PolynomialGrid eval_circle(const FrequencySet& fs, PolyClass cls, Index M,
                           const VectorXcd& coeffs = {});

/// P(t) = (1/sqrt q) sum_y c_y exp(i omega_y t) at M uniform points of [a, b].
PolynomialGrid eval_line(const FrequencySet& fs, PolyClass cls, double a, double b, Index M,
                         const VectorXcd& coeffs = {});

struct FlatnessMetrics {
    double sup = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
};

/// sup ||P| - 1|, mean ||P| - 1| (trapezoid weights on a line grid) and the
/// root mean square of |P|^2 - 1.
FlatnessMetrics flatness_metrics(const PolynomialGrid& pg);

/// |f_hat(z)|^2 = |sum_j f(j) z^j|^2 / h on M roots of unity.
VectorXd level_spectrum(const LevelFunction& f, Index M);

struct RieszProduct {
    VectorXd theta;
    /// |f_hat_(n0)|^2.
    VectorXd weight;
    /// weight * prod_{n0 <= n < n0 + depth} |P_n|^2, scaled by
    /// q_n h_n / h_{n+1} so that it is |f_hat_(n0+depth)|^2.
    VectorXd product;
    /// Grid mean of each partial product, k = 0..depth.
    std::vector<double> masses;
};

/// Rank-one mode only: every stage used must have zero rotations.
RieszProduct riesz_partial_product(const Schedule& schedule, const LabelMap& labels,
                                   std::size_t n0, std::size_t depth, Index M);

/// Mean of |a/mean(a) - b/mean(b)| over the grid.
double normalized_l1(const VectorXd& a, const VectorXd& b);

/// N^2 / (2 sum_{k>=1} c_k^2) with aperiodic autocorrelations c_k; +inf when
/// every c_k vanishes.
double merit_factor(const std::vector<int>& signs);

}  // namespace icelab
