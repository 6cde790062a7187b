#include "icelab/iceberg.hpp"

#include <algorithm>
#include <cmath>

#include "icelab/error.hpp"

namespace icelab {

VectorXd Iceberg::weights() const {
    VectorXd w(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t k = 0; k < counts.size(); ++k)
        w[static_cast<Eigen::Index>(k)] = static_cast<double>(counts[k]) / static_cast<double>(q);
    return w;
}

Iceberg from_rotations(Index h, const std::vector<Index>& rotations) {
    if (h < 1) fail(ErrorKind::Range, "iceberg height must be positive");
    if (rotations.empty()) fail(ErrorKind::Range, "iceberg needs at least one column");
    Iceberg ib{h, static_cast<Index>(rotations.size()), std::vector<Index>(static_cast<std::size_t>(h), 0), true};
    for (Index a : rotations) {
        if (a < 0 || a >= h) fail(ErrorKind::Range, "rotation not reduced mod h");
        ++ib.counts[static_cast<std::size_t>(a)];
    }
    return ib;
}

Iceberg from_stage(const Schedule& schedule, std::size_t n, bool allow_spacers) {
    if (n >= schedule.depth()) fail(ErrorKind::Range, "stage index beyond schedule depth");
    const Stage& st = schedule.stages[n];
    if (!st.pure() && !allow_spacers)
        fail(ErrorKind::Mode, "stage has spacers; it is not a cyclic iceberg");
    Iceberg ib = from_rotations(schedule.heights()[n], st.rotations);
    ib.cyclic = st.pure();
    return ib;
}

Iceberg uniform_iceberg(Index h) {
    std::vector<Index> rot(static_cast<std::size_t>(h));
    for (Index k = 0; k < h; ++k) rot[static_cast<std::size_t>(k)] = k;
    return from_rotations(h, rot);
}

double uniformity_deviation(const Iceberg& iceberg) {
    const VectorXd w = iceberg.weights();
    return (w.array() - 1.0 / static_cast<double>(iceberg.h)).abs().sum();
}

Permutation poincare_permutation(const Stage& stage) {
    if (!stage.pure()) fail(ErrorKind::Mode, "Poincare linking is defined for pure stages");
    Eigen::Matrix<Index, Eigen::Dynamic, 1> next(stage.q);
    for (Index y = 0; y < stage.q; ++y) next[y] = (y + 1) % stage.q;
    return Permutation(next);
}

VectorXd JumpMatrix::row_sums() const {
    VectorXd out = VectorXd::Zero(h);
    for (Eigen::Index a = 0; a < counts.outerSize(); ++a)
        for (decltype(counts)::InnerIterator it(counts, a); it; ++it)
            out[a] += static_cast<double>(it.value());
    return out;
}

JumpMatrix jump_matrix(const Stage& stage, Index h) {
    if (!stage.pure()) fail(ErrorKind::Mode, "jump matrix is defined for pure stages");
    std::vector<Eigen::Triplet<Index>> triplets;
    triplets.reserve(static_cast<std::size_t>(stage.q));
    for (Index y = 0; y < stage.q; ++y) {
        const Index a = stage.rotations[static_cast<std::size_t>(y)];
        const Index b = stage.rotations[static_cast<std::size_t>((y + 1) % stage.q)];
        if (a < 0 || a >= h || b < 0 || b >= h) fail(ErrorKind::Range, "rotation not reduced mod h");
        triplets.emplace_back(a, b, 1);
    }
    JumpMatrix jm{h, stage.q, Eigen::SparseMatrix<Index, Eigen::RowMajor>(h, h)};
    jm.counts.setFromTriplets(triplets.begin(), triplets.end());
    return jm;
}

double jump_uniformity_deviation(const JumpMatrix& jm) {
    const double inv_h = 1.0 / static_cast<double>(jm.h);
    double total = 0.0;
    for (Eigen::Index a = 0; a < jm.counts.outerSize(); ++a) {
        Index row = 0;
        Index nonzero = 0;
        double dev = 0.0;
        for (decltype(jm.counts)::InnerIterator it(jm.counts, a); it; ++it) row += it.value();
        if (row == 0) continue;
        for (decltype(jm.counts)::InnerIterator it(jm.counts, a); it; ++it) {
            dev += std::abs(static_cast<double>(it.value()) / static_cast<double>(row) - inv_h);
            ++nonzero;
        }
        dev += static_cast<double>(jm.h - nonzero) * inv_h;
        total += static_cast<double>(row) / static_cast<double>(jm.q) * dev;
    }
    return total;
}

namespace {

// Index of the stage-n thin column containing position p of W_{n+k}, copies
// numbered in concatenation order before rotation.
Index column_id(const Schedule& sch, const std::vector<Index>& h, const std::vector<Index>& m,
                std::size_t n, std::size_t k, Index p) {
    Index id = 0;
    while (k > 1) {
        const Index hk = h[n + k - 1];
        const Index y = p / hk;
        const Index t = p % hk;
        id += y * m[k - 1];
        p = (t + sch.stages[n + k - 1].rotations[static_cast<std::size_t>(y)]) % hk;
        --k;
    }
    return id + p / h[n];
}

}  // namespace

BodyReport body_report(const Schedule& schedule, std::size_t n, std::size_t r) {
    if (r < 1) fail(ErrorKind::Range, "look-ahead r must be >= 1");
    if (n + r > schedule.depth()) fail(ErrorKind::Range, "n + r beyond schedule depth");
    for (std::size_t k = n; k < n + r; ++k)
        if (!schedule.stages[k].pure()) fail(ErrorKind::Mode, "body report needs pure stages");
    const auto h = schedule.heights();

    // m[k] = Q_{n,n+k}: stage-n columns inside W_{n+k}.
    std::vector<Index> m{1, schedule.stages[n].q};
    double qb = static_cast<double>(schedule.stages[n].q);
    double qall = qb;
    std::vector<char> hit(static_cast<std::size_t>(m[1]), 0);
    for (std::size_t k = 1; k < r; ++k) {
        const Stage& st = schedule.stages[n + k];
        const Index hk = h[n + k];
        std::vector<char> next;
        next.reserve(static_cast<std::size_t>(m[k] * st.q));
        for (Index y = 0; y < st.q; ++y) {
            const Index a = st.rotations[static_cast<std::size_t>(y)] % hk;
            Index split = -1;
            if (a != 0) {
                const Index left = column_id(schedule, h, m, n, k, a - 1);
                if (left == column_id(schedule, h, m, n, k, a)) split = left;
            }
            for (Index j = 0; j < m[k]; ++j)
                next.push_back(static_cast<char>(hit[static_cast<std::size_t>(j)] || j == split));
        }
        hit = std::move(next);
        m.push_back(m[k] * st.q);
        qb = std::max(0.0, (qb - 1.0) * static_cast<double>(st.q));
        qall *= static_cast<double>(st.q);
    }
    BodyReport rep;
    rep.r = r;
    rep.total_columns = m.back();
    rep.body_columns = static_cast<Index>(std::count(hit.begin(), hit.end(), 0));
    rep.exact_fraction = static_cast<double>(rep.body_columns) / static_cast<double>(rep.total_columns);
    rep.lower_bound = qb / qall;
    return rep;
}

}  // namespace icelab
