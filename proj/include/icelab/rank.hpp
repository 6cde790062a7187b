#pragma once

#include <cstdint>

#include "icelab/iceberg.hpp"

namespace icelab {

/// A subtower of the iceberg. Fat columns are labelled k = 1..h with the
/// cut class alpha mapped to k = alpha, alpha = 0 to k = h; column k spans the
/// signed levels [k - h, k - 1]. The rectangle takes every column with
/// col_lo <= k <= col_hi and the levels they share.
struct RectangleCertificate {
    Index col_lo = 0;
    Index col_hi = 0;
    Index level_lo = 0;
    Index level_hi = 0;
    /// Thin columns inside the window.
    Index covered = 0;
    Index q = 0;
    Index h = 0;

    Index levels() const { return level_hi - level_lo + 1; }
    /// covered * levels / (q h).
    double area() const;
};

/// Exact maximizer over windows of consecutive occupied cut classes.
RectangleCertificate best_subtower_rectangle(const Iceberg& iceberg);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

/// Local rank of the Morse family of order r: ((r+1)/(2r))^2 for odd r and
/// (r+2)/(4r) for even r, reduced.
Rational beta_morse(int r);

/// floor(1 / beta) for 0 < beta <= 1.
int multiplicity_bound(double beta);

/// m (1 + a^2 - 2a / sqrt(m)).
double spmult_lemma_rhs(double m, double a);

/// Root in (0, 1] of 1 - beta/2 = 1 + beta - sqrt(2 beta).
double critical_beta();

/// Linear extrapolation in 1/h of two rectangle areas,
/// (h2 A2 - h1 A1) / (h2 - h1). Cancels the 1/h term of finite icebergs.
double extrapolated_local_rank(const Iceberg& a, const Iceberg& b);

}  // namespace icelab
