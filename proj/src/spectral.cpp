#include "icelab/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "icelab/error.hpp"

namespace icelab {

FrequencySet stage_frequencies(const Schedule& schedule, std::size_t n) {
    if (n >= schedule.depth()) fail(ErrorKind::Range, "stage index beyond schedule depth");
    const Stage& st = schedule.stages[n];
    const Index h = schedule.heights()[n];
    FrequencySet fs{VectorXd(st.q), true, st.rotations};
    Index acc = 0;
    for (Index y = 0; y < st.q; ++y) {
        fs.omega[y] = static_cast<double>(y * h + acc);
        acc += st.spacers[static_cast<std::size_t>(y)];
    }
    return fs;
}

FrequencySet exp_frequency_set(Index n, double eps) {
    if (n < 1) fail(ErrorKind::Range, "exponential frequency set needs n >= 1");
    if (!(eps > 0.0)) fail(ErrorKind::Range, "exponential frequency set needs eps > 0");
    FrequencySet fs{VectorXd(n), false, {}};
    const double scale = static_cast<double>(n) / (eps * eps);
    for (Index y = 0; y < n; ++y) fs.omega[y] = scale * std::exp(eps * static_cast<double>(y) / static_cast<double>(n));
    return fs;
}

namespace {

VectorXcd checked_coefficients(const FrequencySet& fs, PolyClass cls, const VectorXcd& coeffs) {
    if (fs.size() == 0) fail(ErrorKind::Range, "empty frequency set");
    if (coeffs.size() == 0) return VectorXcd::Ones(fs.size());
    if (coeffs.size() != fs.size()) fail(ErrorKind::Range, "coefficient count differs from frequency count");
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        const auto c = coeffs[i];
        switch (cls) {
            case PolyClass::M:
            case PolyClass::MR:
                if (std::abs(c - 1.0) > 1e-12) fail(ErrorKind::ClassViolation, "class M coefficients must be 1");
                break;
            case PolyClass::K:
                if (std::abs(std::abs(c) - 1.0) > 1e-12)
                    fail(ErrorKind::ClassViolation, "class K coefficients must be unimodular");
                break;
            case PolyClass::L:
                if (std::abs(c.imag()) > 1e-12 || std::abs(std::abs(c.real()) - 1.0) > 1e-12)
                    fail(ErrorKind::ClassViolation, "class L coefficients must be +-1");
                break;
        }
    }
    return coeffs;
}

// sum_j a_j e^{2 pi i k j / M} for k < M, with a_j already folded mod M.
VectorXcd positive_dft(const VectorXcd& folded) {
    if (folded.size() == 1) return folded;
    Eigen::FFT<double> fft;
    VectorXcd out;
    fft.inv(out, folded);
    return out * static_cast<double>(folded.size());
}

VectorXd circle_angles(Index M) {
    return VectorXd::LinSpaced(M, 0.0, 2.0 * std::numbers::pi * static_cast<double>(M - 1) / static_cast<double>(M));
}

}  // namespace

PolynomialGrid eval_circle(const FrequencySet& fs, PolyClass cls, Index M, const VectorXcd& coeffs) {
    if (M < 1) fail(ErrorKind::Range, "grid size must be positive");
    if (!fs.integral || cls == PolyClass::MR) fail(ErrorKind::Mode, "real frequencies need a line grid");
    const VectorXcd c = checked_coefficients(fs, cls, coeffs);
    VectorXcd folded = VectorXcd::Zero(M);
    for (Index y = 0; y < fs.size(); ++y) {
        const auto w = static_cast<Index>(std::llround(fs.omega[y]));
        folded[((w % M) + M) % M] += c[y];
    }
    PolynomialGrid pg{GridKind::Circle, circle_angles(M), positive_dft(folded)};
    pg.values /= std::sqrt(static_cast<double>(fs.size()));
    return pg;
}

PolynomialGrid eval_line(const FrequencySet& fs, PolyClass cls, double a, double b, Index M,
                         const VectorXcd& coeffs) {
    if (M < 2 || !(b > a)) fail(ErrorKind::Range, "line grid needs M >= 2 and a < b");
    const VectorXcd c = checked_coefficients(fs, cls, coeffs);
    PolynomialGrid pg{GridKind::Line, VectorXd::LinSpaced(M, a, b), VectorXcd::Zero(M)};
    const double dt = (b - a) / static_cast<double>(M - 1);
    constexpr Index kAnchor = 1024;
    for (Index y = 0; y < fs.size(); ++y) {
        const double w = fs.omega[y];
        const std::complex<double> inc = std::polar(1.0, w * dt);
        std::complex<double> z;
        for (Index k = 0; k < M; ++k) {
            // Phase recurrence, re-anchored to keep rounding drift small.
            z = k % kAnchor == 0 ? std::polar(1.0, w * pg.points[k]) : z * inc;
            pg.values[k] += c[y] * z;
        }
    }
    pg.values /= std::sqrt(static_cast<double>(fs.size()));
    return pg;
}

FlatnessMetrics flatness_metrics(const PolynomialGrid& pg) {
    const Index M = pg.values.size();
    if (M == 0) fail(ErrorKind::Range, "empty grid");
    const VectorXd mag = pg.values.cwiseAbs();
    const VectorXd dev = (mag.array() - 1.0).abs();
    VectorXd w = VectorXd::Constant(M, 1.0 / static_cast<double>(M));
    if (pg.kind == GridKind::Line && M > 1) {
        w.setConstant(1.0 / static_cast<double>(M - 1));
        w[0] *= 0.5;
        w[M - 1] *= 0.5;
    }
    FlatnessMetrics fm;
    fm.sup = dev.maxCoeff();
    fm.l1 = w.dot(dev);
    fm.l2 = std::sqrt(w.dot((mag.array().square() - 1.0).square().matrix()));
    return fm;
}

VectorXd level_spectrum(const LevelFunction& f, Index M) {
    if (M < 1) fail(ErrorKind::Range, "grid size must be positive");
    VectorXcd folded = VectorXcd::Zero(M);
    for (Index j = 0; j < f.height(); ++j) folded[j % M] += f.values[j];
    return positive_dft(folded).cwiseAbs2() / static_cast<double>(f.height());
}

RieszProduct riesz_partial_product(const Schedule& schedule, const LabelMap& labels,
                                   std::size_t n0, std::size_t depth, Index M) {
    if (n0 + depth > schedule.depth()) fail(ErrorKind::Range, "partial product beyond schedule depth");
    for (std::size_t n = n0; n < n0 + depth; ++n)
        for (Index a : schedule.stages[n].rotations)
            if (a != 0) fail(ErrorKind::Mode, "Riesz factorization needs zero rotations");
    const auto h = schedule.heights();
    const LevelFunction f = lift(schedule.alphabet, labels, build_word(schedule, n0), n0);

    RieszProduct rp;
    rp.theta = circle_angles(M);
    rp.weight = level_spectrum(f, M);
    rp.product = rp.weight;
    rp.masses.push_back(rp.product.mean());
    for (std::size_t n = n0; n < n0 + depth; ++n) {
        const PolynomialGrid pn = eval_circle(stage_frequencies(schedule, n), PolyClass::M, M);
        const double scale = static_cast<double>(schedule.stages[n].q * h[n]) / static_cast<double>(h[n + 1]);
        rp.product.array() *= pn.values.cwiseAbs2().array() * scale;
        rp.masses.push_back(rp.product.mean());
    }
    return rp;
}

double normalized_l1(const VectorXd& a, const VectorXd& b) {
    if (a.size() != b.size() || a.size() == 0) fail(ErrorKind::Range, "grids differ in size");
    const double ma = a.mean(), mb = b.mean();
    if (ma <= 0.0 || mb <= 0.0) fail(ErrorKind::Precondition, "normalization by a zero mean");
    return (a / ma - b / mb).cwiseAbs().mean();
}

double merit_factor(const std::vector<int>& signs) {
    const auto N = static_cast<Index>(signs.size());
    if (N < 2) fail(ErrorKind::Range, "merit factor needs length >= 2");
    double energy = 0.0;
    for (Index k = 1; k < N; ++k) {
        Index c = 0;
        for (Index j = 0; j + k < N; ++j) c += signs[static_cast<std::size_t>(j)] * signs[static_cast<std::size_t>(j + k)];
        energy += static_cast<double>(c) * static_cast<double>(c);
    }
    if (energy == 0.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(N) * static_cast<double>(N) / (2.0 * energy);
}

}  // namespace icelab
