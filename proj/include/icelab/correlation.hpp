#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "icelab/error.hpp"
#include "icelab/types.hpp"
#include "icelab/words.hpp"

namespace icelab {

/// Symbol label -> complex value.
using LabelMap = std::map<std::string, std::complex<double>>;

/// f_(n): values of a function along the h_n levels of stage n.
struct LevelFunction {
    std::size_t n = 0;
    VectorXcd values;
    bool zero_mean = false;

    Index height() const { return values.size(); }
};

/// values[j] = labels(W_n[j]); spacer positions are 0. With `zero_mean` the
/// mean over non-spacer positions is subtracted there.
LevelFunction lift(const Alphabet& alphabet, const LabelMap& labels, const Word& word,
                   std::size_t n, bool zero_mean = false);

/// C(t) = (1/h) sum_j f(j) conj(g(j - t)) on Z_h, through the FFT.
template <typename Real>
ComplexVector<Real> cyclic_correlation(const ComplexVector<Real>& f, const ComplexVector<Real>& g) {
    if (f.size() != g.size()) fail(ErrorKind::Range, "correlation of vectors with different lengths");
    const Eigen::Index h = f.size();
    if (h == 0) return {};
    // kissfft does not handle length 1
    if (h == 1) return f.cwiseProduct(g.conjugate());
    Eigen::FFT<Real> fft;
    ComplexVector<Real> F, G, out;
    fft.fwd(F, f);
    fft.fwd(G, g);
    F.array() *= G.array().conjugate();
    fft.inv(out, F);
    return out / static_cast<Real>(h);
}

struct CorrelationSeries {
    std::size_t n = 0;
    VectorXcd C;
};

CorrelationSeries cyclic_correlation(const LevelFunction& f, const LevelFunction& g);

/// Single lag by the direct sum.
std::complex<double> correlation_at(const VectorXcd& f, const VectorXcd& g, Index t);

/// (1/q) sum_y C_n(alpha_y - alpha_{y-s}), y - s taken mod q. For pure stages
/// this equals C_{n+1}(s h_n).
std::complex<double> recursion_rhs(const CorrelationSeries& cn, const Stage& stage, Index s);

struct DecayStage {
    std::size_t n = 0;
    Index h = 0;
    double max = 0.0;
    double median = 0.0;
    double rms = 0.0;
};

struct DecayProfile {
    std::vector<DecayStage> stages;
    /// Least-squares slopes of log(statistic) against log h_n.
    double slope_max = 0.0;
    double slope_median = 0.0;
    double slope_rms = 0.0;
    /// rms_{n+1}^2 / rms_n^2 and the 2 h_n / h_{n+1} reference.
    std::vector<double> variance_ratio;
    std::vector<double> predicted_ratio;
};

/// Statistics of |C_n(t)| for t in [ceil(h_n/4), floor(3h_n/4)], stages
/// n1..n2 (at least three), zero-mean lift. |C| below 1e-12 |C(0)| counts as
/// zero; a slope is NaN when its statistic vanishes at some but not all stages.
DecayProfile decay_profile(const Schedule& schedule, const LabelMap& labels, std::size_t n1,
                           std::size_t n2);

/// Slope of the least-squares line through (x_i, y_i).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Median with NaN entries ranked above every number.
double median_nan_high(std::vector<double> values);

struct SimplicityReport {
    double f2 = 0.0;
    double g2 = 0.0;
    double f_minus_g2 = 0.0;
    std::complex<double> uv;
    std::complex<double> fv;
    double u2 = 0.0;
    double v2 = 0.0;
    /// max |g - (f - u + v)|.
    double identity_residual = 0.0;
};

/// Averages over Z_{h_N} of f(p) = f_(n)(x_n(p)) and
/// g = sum_{|j| <= (h_n-1)/2} f_(n)(j) T^j b_n with b_n = [x_n = 0].
/// u is f on the far region |signed level| > (h_n-1)/2, v = g - f + u.
SimplicityReport simplicity_diagnostic(const Schedule& schedule, const LabelMap& labels,
                                       std::size_t n, std::size_t N);

}  // namespace icelab
