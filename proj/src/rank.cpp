#include "icelab/rank.hpp"

#include <cmath>
#include <numeric>

#include "icelab/error.hpp"

namespace icelab {

double RectangleCertificate::area() const {
    return static_cast<double>(covered) * static_cast<double>(levels()) /
           (static_cast<double>(q) * static_cast<double>(h));
}

RectangleCertificate best_subtower_rectangle(const Iceberg& iceberg) {
    if (!iceberg.cyclic) fail(ErrorKind::Mode, "rectangle search needs a cyclic iceberg");
    const Index h = iceberg.h;
    // count by label k = 1..h
    std::vector<Index> label_counts(static_cast<std::size_t>(h + 1), 0);
    for (Index a = 0; a < h; ++a) label_counts[static_cast<std::size_t>(a == 0 ? h : a)] = iceberg.counts[static_cast<std::size_t>(a)];
    std::vector<Index> occupied;
    for (Index k = 1; k <= h; ++k)
        if (label_counts[static_cast<std::size_t>(k)] > 0) occupied.push_back(k);

    RectangleCertificate best{0, 0, 0, -1, 0, iceberg.q, h};
    __int128 best_num = -1;
    for (std::size_t i = 0; i < occupied.size(); ++i) {
        Index covered = 0;
        for (std::size_t j = i; j < occupied.size(); ++j) {
            covered += label_counts[static_cast<std::size_t>(occupied[j])];
            const Index levels = h - (occupied[j] - occupied[i]);
            const __int128 num = static_cast<__int128>(covered) * levels;
            if (num > best_num) {
                best_num = num;
                best = {occupied[i], occupied[j], occupied[j] - h, occupied[i] - 1, covered, iceberg.q, h};
            }
        }
    }
    return best;
}

Rational beta_morse(int r) {
    if (r < 2) fail(ErrorKind::Range, "Morse order must be >= 2");
    const std::int64_t R = r;
    Rational out = r % 2 == 1 ? Rational{(R + 1) * (R + 1), 4 * R * R} : Rational{R + 2, 4 * R};
    const std::int64_t g = std::gcd(out.num, out.den);
    return {out.num / g, out.den / g};
}

int multiplicity_bound(double beta) {
    if (!(beta > 0.0) || beta > 1.0) fail(ErrorKind::Range, "beta must lie in (0, 1]");
    return static_cast<int>(std::floor(1.0 / beta));
}

double spmult_lemma_rhs(double m, double a) {
    if (m < 1.0) fail(ErrorKind::Range, "m must be >= 1");
    if (a < 0.0) fail(ErrorKind::Range, "a must be >= 0");
    return m * (1.0 + a * a - 2.0 * a / std::sqrt(m));
}

double critical_beta() {
    // sqrt(2b) - 3b/2 is positive at 1/2 and negative at 1.
    const auto F = [](double b) { return std::sqrt(2.0 * b) - 1.5 * b; };
    double lo = 0.5, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (F(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double extrapolated_local_rank(const Iceberg& a, const Iceberg& b) {
    if (a.h == b.h) fail(ErrorKind::Precondition, "extrapolation needs two different heights");
    const double h1 = static_cast<double>(a.h), h2 = static_cast<double>(b.h);
    const double A1 = best_subtower_rectangle(a).area();
    const double A2 = best_subtower_rectangle(b).area();
    return (h2 * A2 - h1 * A1) / (h2 - h1);
}

}  // namespace icelab
