#pragma once

#include <vector>

#include <Eigen/Core>

#include "icelab/types.hpp"
#include "icelab/words.hpp"

namespace icelab {

/// Projection value of a spacer position.
inline constexpr Index kSpacer = -1;

using IndexVector = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

/// The maps phi_n : Z_{h_{n+1}} -> Z_{h_n} for n < N, with
/// phi_n(start_y + t) = (t + alpha_{n,y}) mod h_n inside copy y and kSpacer on
/// spacer runs. The truncated system is x -> x + 1 on Z_{h_N}.
class ProjectionChain {
public:
    ProjectionChain(Schedule schedule, std::size_t N);

    std::size_t depth() const noexcept { return N_; }
    Index height(std::size_t n) const { return heights_.at(n); }
    Index top_height() const { return heights_[N_]; }
    const Schedule& schedule() const noexcept { return schedule_; }

    /// Position in W_{n+1} where copy y of W_n begins.
    Index copy_start(std::size_t n, Index y) const;

    /// phi_n(x) for x in Z_{h_{n+1}}.
    Index phi(std::size_t n, Index x) const;

    /// phi_n o ... o phi_{N-1}(x); kSpacer once any step lands on a spacer.
    Index project(Index x, std::size_t n) const;

    /// (x_0, ..., x_N) for one point.
    std::vector<Index> coordinates(Index x) const;

    /// project(x, n) for every x in Z_{h_N}.
    IndexVector project_all(std::size_t n) const;

private:
    Schedule schedule_;
    std::size_t N_;
    std::vector<Index> heights_;
    std::vector<std::vector<Index>> starts_;
};

struct StepResult {
    Index next = 0;
    /// jump[n] for n < N: the level-n coordinate did not move by exactly +1
    /// (or -1 for inverse_step).
    std::vector<bool> jump;
    /// Smallest n0 with no jump on any level in [n0, N).
    std::size_t regular_level = 0;
};

StepResult step(const ProjectionChain& pc, Index x);
StepResult inverse_step(const ProjectionChain& pc, Index x);

/// Letters of W_m read along `length` forward steps from `start`.
Word orbit_coding(const ProjectionChain& pc, Index start, Index length, std::size_t m);

/// Positions of Z_{h_N} where a copy of W_m physically begins, i.e. offset 0
/// of some copy in W_{m+1} lifted to the top level. Sorted.
std::vector<Index> column_starts(const ProjectionChain& pc, std::size_t m);

struct CoverageResult {
    Index windows = 0;
    Index matches = 0;
    double fraction() const { return windows == 0 ? 0.0 : static_cast<double>(matches) / windows; }
};

/// Among `window_count` column starts (evenly strided, all of them if fewer),
/// the windows of length h_m whose coding is a rotation of W_m.
CoverageResult coverage_statistic(const ProjectionChain& pc, std::size_t m, Index window_count);

}  // namespace icelab
