#include "icelab/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "icelab/dynamics.hpp"

namespace icelab {

LevelFunction lift(const Alphabet& alphabet, const LabelMap& labels, const Word& word,
                   std::size_t n, bool zero_mean) {
    const auto spacer = alphabet.spacer();
    std::vector<std::complex<double>> table(alphabet.size());
    for (std::size_t s = 0; s < alphabet.size(); ++s) {
        if (spacer && *spacer == s) continue;
        auto it = labels.find(alphabet.label(static_cast<Symbol>(s)));
        if (it == labels.end())
            fail(ErrorKind::Config, "no label for symbol '" + alphabet.label(static_cast<Symbol>(s)) + "'");
        table[s] = it->second;
    }
    LevelFunction lf{n, VectorXcd(word.height()), zero_mean};
    std::complex<double> sum = 0.0;
    Index count = 0;
    for (Index j = 0; j < word.height(); ++j) {
        const Symbol s = word[j];
        const bool is_spacer = spacer && *spacer == s;
        lf.values[j] = is_spacer ? 0.0 : table[s];
        if (!is_spacer) {
            sum += table[s];
            ++count;
        }
    }
    if (zero_mean && count > 0) {
        const std::complex<double> mean = sum / static_cast<double>(count);
        for (Index j = 0; j < word.height(); ++j)
            if (!(spacer && *spacer == word[j])) lf.values[j] -= mean;
    }
    return lf;
}

CorrelationSeries cyclic_correlation(const LevelFunction& f, const LevelFunction& g) {
    if (f.n != g.n || f.height() != g.height())
        fail(ErrorKind::Range, "correlation of level functions from different stages");
    return {f.n, cyclic_correlation<double>(f.values, g.values)};
}

std::complex<double> correlation_at(const VectorXcd& f, const VectorXcd& g, Index t) {
    const Index h = f.size();
    if (g.size() != h) fail(ErrorKind::Range, "correlation of vectors with different lengths");
    t = ((t % h) + h) % h;
    std::complex<double> acc = 0.0;
    for (Index j = 0; j < h; ++j) {
        Index k = j - t;
        if (k < 0) k += h;
        acc += f[j] * std::conj(g[k]);
    }
    return acc / static_cast<double>(h);
}

std::complex<double> recursion_rhs(const CorrelationSeries& cn, const Stage& stage, Index s) {
    if (!stage.pure()) fail(ErrorKind::Mode, "recursion holds for pure stages only");
    if (s < 1 || s >= stage.q) fail(ErrorKind::Range, "recursion shift s must lie in [1, q-1]");
    const Index h = cn.C.size();
    std::complex<double> acc = 0.0;
    for (Index y = 0; y < stage.q; ++y) {
        const Index a = stage.rotations[static_cast<std::size_t>(y)];
        const Index b = stage.rotations[static_cast<std::size_t>(((y - s) % stage.q + stage.q) % stage.q)];
        acc += cn.C[((a - b) % h + h) % h];
    }
    return acc / static_cast<double>(stage.q);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::Precondition, "slope fit needs two or more points");
    const auto m = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = x[static_cast<std::size_t>(i)];
        b[i] = y[static_cast<std::size_t>(i)];
    }
    return A.colPivHouseholderQr().solve(b)[1];
}

double median_nan_high(std::vector<double> v) {
    if (v.empty()) fail(ErrorKind::Precondition, "median of an empty set");
    std::sort(v.begin(), v.end(), [](double a, double b) {
        if (std::isnan(a)) return false;
        if (std::isnan(b)) return true;
        return a < b;
    });
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

namespace {

double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

// Slope in log-log coordinates; 0 for an identically zero statistic, NaN if
// only some stages vanish.
double log_slope(const std::vector<DecayStage>& st, double DecayStage::*field) {
    std::vector<double> x, y;
    bool any_zero = false, all_zero = true;
    for (const auto& s : st) {
        const double v = s.*field;
        if (v <= 0.0) {
            any_zero = true;
            continue;
        }
        all_zero = false;
        x.push_back(std::log(static_cast<double>(s.h)));
        y.push_back(std::log(v));
    }
    if (all_zero) return 0.0;
    if (any_zero) return std::numeric_limits<double>::quiet_NaN();
    return fit_slope(x, y);
}

}  // namespace

DecayProfile decay_profile(const Schedule& schedule, const LabelMap& labels, std::size_t n1,
                           std::size_t n2) {
    if (n2 < n1 || n2 - n1 + 1 < 3) fail(ErrorKind::Precondition, "decay fit needs at least three stages");
    if (n2 > schedule.depth()) fail(ErrorKind::Range, "stage beyond schedule depth");
    for (std::size_t k = 0; k < n2; ++k)
        if (!schedule.stages[k].pure()) fail(ErrorKind::Mode, "decay profile needs a pure schedule");

    DecayProfile prof;
    Word w = schedule.seed_word;
    for (std::size_t n = 0; n <= n2; ++n) {
        if (n > 0) w = concat_stage(w, schedule.stages[n - 1], std::nullopt);
        if (n < n1) continue;
        const LevelFunction f = lift(schedule.alphabet, labels, w, n, true);
        const VectorXcd C = cyclic_correlation<double>(f.values, f.values);
        const Index h = w.height();
        const Index lo = (h + 3) / 4;
        const Index hi = (3 * h) / 4;
        // Values at the FFT roundoff level are exact zeros of the correlation.
        const double floor = 1e-12 * std::abs(C[0]);
        std::vector<double> mags;
        mags.reserve(static_cast<std::size_t>(std::max<Index>(0, hi - lo + 1)));
        for (Index t = lo; t <= hi; ++t) {
            const double v = std::abs(C[t]);
            mags.push_back(v <= floor ? 0.0 : v);
        }
        DecayStage ds{n, h, 0.0, 0.0, 0.0};
        if (!mags.empty()) {
            double sq = 0.0;
            for (double m : mags) sq += m * m;
            ds.max = *std::max_element(mags.begin(), mags.end());
            ds.rms = std::sqrt(sq / static_cast<double>(mags.size()));
            ds.median = median_of(std::move(mags));
        }
        prof.stages.push_back(ds);
    }
    prof.slope_max = log_slope(prof.stages, &DecayStage::max);
    prof.slope_median = log_slope(prof.stages, &DecayStage::median);
    prof.slope_rms = log_slope(prof.stages, &DecayStage::rms);
    for (std::size_t i = 0; i + 1 < prof.stages.size(); ++i) {
        const auto& a = prof.stages[i];
        const auto& b = prof.stages[i + 1];
        prof.variance_ratio.push_back(a.rms > 0.0 ? (b.rms * b.rms) / (a.rms * a.rms)
                                                  : std::numeric_limits<double>::quiet_NaN());
        prof.predicted_ratio.push_back(2.0 * static_cast<double>(a.h) / static_cast<double>(b.h));
    }
    return prof;
}

SimplicityReport simplicity_diagnostic(const Schedule& schedule, const LabelMap& labels,
                                       std::size_t n, std::size_t N) {
    if (N < n) fail(ErrorKind::Precondition, "simplicity diagnostic needs N >= n");
    if (N > schedule.depth()) fail(ErrorKind::Range, "depth beyond schedule");
    for (std::size_t k = 0; k < N; ++k)
        if (!schedule.stages[k].pure()) fail(ErrorKind::Mode, "simplicity diagnostic needs pure stages");
    const auto heights = schedule.heights();
    const Index h = heights[n];
    if (h % 2 == 0) fail(ErrorKind::Precondition, "simplicity diagnostic needs odd h_n");
    const Index m = (h - 1) / 2;

    const LevelFunction fn = lift(schedule.alphabet, labels, build_word(schedule, n), n, true);
    const ProjectionChain pc(schedule, N);
    const Index hN = pc.top_height();
    const IndexVector xn = pc.project_all(n);
    IndexVector xn1;
    if (N > n) xn1 = pc.project_all(n + 1);
    const Stage* st = N > n ? &schedule.stages[n] : nullptr;

    VectorXcd f(hN), u(hN), g = VectorXcd::Zero(hN);
    for (Index p = 0; p < hN; ++p) {
        const Index x = xn[p];
        f[p] = fn.values[x];
        Index signed_level = x;
        if (st) {
            const Index a = st->rotations[static_cast<std::size_t>(xn1[p] / h)];
            if (a != 0 && x >= a) signed_level = x - h;
        }
        u[p] = std::abs(signed_level) > m ? f[p] : std::complex<double>(0.0);
    }
    // T^j b_n(p) = b_n(p - j): scatter f_(n)(j) from every base point.
    for (Index p = 0; p < hN; ++p) {
        if (xn[p] != 0) continue;
        for (Index j = -m; j <= m; ++j) {
            Index target = (p + j) % hN;
            if (target < 0) target += hN;
            g[target] += fn.values[(j % h + h) % h];
        }
    }
    const VectorXcd v = g - f + u;
    const auto inner = [hN](const VectorXcd& a, const VectorXcd& b) {
        return b.dot(a) / static_cast<double>(hN);
    };
    SimplicityReport rep;
    rep.f2 = inner(f, f).real();
    rep.g2 = inner(g, g).real();
    rep.f_minus_g2 = inner(f - g, f - g).real();
    rep.uv = inner(u, v);
    rep.fv = inner(f, v);
    rep.u2 = inner(u, u).real();
    rep.v2 = inner(v, v).real();
    rep.identity_residual = (g - (f - u + v)).cwiseAbs().maxCoeff();
    return rep;
}

}  // namespace icelab
