#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "icelab/types.hpp"
#include "icelab/words.hpp"

namespace icelab {

/// Stage-n geometry: the histogram of cut classes over the q thin columns.
/// counts[k] is the number of copies rotated by k, k in Z_h.
struct Iceberg {
    Index h = 0;
    Index q = 0;
    std::vector<Index> counts;
    /// False for stages with spacers; those are not cyclic icebergs.
    bool cyclic = true;

    /// counts / q as an Eigen vector.
    VectorXd weights() const;
    double weight(Index k) const { return static_cast<double>(counts.at(static_cast<std::size_t>(k))) / q; }
};

/// Cut histogram of stage n. Spacer stages need `allow_spacers` and yield a
/// non-cyclic iceberg.
Iceberg from_stage(const Schedule& schedule, std::size_t n, bool allow_spacers = false);
Iceberg from_rotations(Index h, const std::vector<Index>& rotations);
/// One copy per cut class.
Iceberg uniform_iceberg(Index h);

/// l1 distance of the weights to the uniform vector (1/h, ..., 1/h).
double uniformity_deviation(const Iceberg& iceberg);

using Permutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, Index>;

/// Linking of thin columns: the top of copy y continues into copy y+1 mod q.
Permutation poincare_permutation(const Stage& stage);

/// Counts of consecutive cut pairs (alpha_y, alpha_{y+1 mod q}) as an h x h
/// sparse matrix.
struct JumpMatrix {
    Index h = 0;
    Index q = 0;
    Eigen::SparseMatrix<Index, Eigen::RowMajor> counts;

    VectorXd row_sums() const;
};

JumpMatrix jump_matrix(const Stage& stage, Index h);

/// sum_a w_a sum_b |N_ab / N_a - 1/h| with w_a = N_a / q; empty rows skipped.
double jump_uniformity_deviation(const JumpMatrix& jm);

struct BodyReport {
    /// Q^b_{n,n+r} / Q_{n,n+r} from the recursion Q^b <- (Q^b - 1) q.
    double lower_bound = 1.0;
    /// Fraction of stage-n thin columns inside W_{n+r} not split by any cut
    /// of stages n+1, ..., n+r-1.
    double exact_fraction = 1.0;
    Index body_columns = 0;
    Index total_columns = 0;
    std::size_t r = 1;
};

BodyReport body_report(const Schedule& schedule, std::size_t n, std::size_t r);

}  // namespace icelab
