#include "icelab/dynamics.hpp"

#include <algorithm>
#include <functional>

#include "icelab/error.hpp"

namespace icelab {

ProjectionChain::ProjectionChain(Schedule schedule, std::size_t N)
    : schedule_(std::move(schedule)), N_(N) {
    if (N_ > schedule_.depth()) fail(ErrorKind::Range, "truncation depth beyond schedule depth");
    heights_ = schedule_.heights();
    heights_.resize(N_ + 1);
    for (std::size_t n = 0; n < N_; ++n) {
        const Stage& st = schedule_.stages[n];
        std::vector<Index> s(static_cast<std::size_t>(st.q));
        Index pos = 0;
        for (Index y = 0; y < st.q; ++y) {
            s[static_cast<std::size_t>(y)] = pos;
            pos += heights_[n] + st.spacers[static_cast<std::size_t>(y)];
        }
        starts_.push_back(std::move(s));
    }
}

Index ProjectionChain::copy_start(std::size_t n, Index y) const {
    return starts_.at(n).at(static_cast<std::size_t>(y));
}

Index ProjectionChain::phi(std::size_t n, Index x) const {
    const Stage& st = schedule_.stages[n];
    const Index h = heights_[n];
    Index y;
    if (st.pure()) {
        y = x / h;
    } else {
        const auto& s = starts_[n];
        y = static_cast<Index>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) - 1;
    }
    const Index t = x - starts_[n][static_cast<std::size_t>(y)];
    if (t >= h) return kSpacer;
    return (t + st.rotations[static_cast<std::size_t>(y)]) % h;
}

Index ProjectionChain::project(Index x, std::size_t n) const {
    if (n > N_) fail(ErrorKind::Range, "projection level above truncation depth");
    for (std::size_t k = N_; k > n; --k) {
        x = phi(k - 1, x);
        if (x == kSpacer) return kSpacer;
    }
    return x;
}

std::vector<Index> ProjectionChain::coordinates(Index x) const {
    std::vector<Index> out(N_ + 1, kSpacer);
    out[N_] = x;
    for (std::size_t k = N_; k > 0 && x != kSpacer; --k) {
        x = phi(k - 1, x);
        out[k - 1] = x;
    }
    return out;
}

IndexVector ProjectionChain::project_all(std::size_t n) const {
    if (n > N_) fail(ErrorKind::Range, "projection level above truncation depth");
    IndexVector x = IndexVector::LinSpaced(heights_[N_], 0, heights_[N_] - 1);
    for (std::size_t k = N_; k > n; --k) {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] != kSpacer) x[i] = phi(k - 1, x[i]);
    }
    return x;
}

namespace {

StepResult step_by(const ProjectionChain& pc, Index x, Index delta) {
    const Index hN = pc.top_height();
    if (x < 0 || x >= hN) fail(ErrorKind::Range, "position outside Z_{h_N}");
    StepResult res;
    res.next = ((x + delta) % hN + hN) % hN;
    const auto a = pc.coordinates(x);
    const auto b = pc.coordinates(res.next);
    const std::size_t N = pc.depth();
    res.jump.assign(N, false);
    res.regular_level = 0;
    for (std::size_t n = 0; n < N; ++n) {
        const Index h = pc.height(n);
        const bool plain = a[n] != kSpacer && b[n] != kSpacer && b[n] == ((a[n] + delta) % h + h) % h;
        res.jump[n] = !plain;
        if (!plain) res.regular_level = n + 1;
    }
    return res;
}

}  // namespace

StepResult step(const ProjectionChain& pc, Index x) { return step_by(pc, x, 1); }

StepResult inverse_step(const ProjectionChain& pc, Index x) { return step_by(pc, x, -1); }

namespace {

Word read_coding(const ProjectionChain& pc, const Word& wm, Index start, Index length, std::size_t m) {
    const Index hN = pc.top_height();
    const Symbol spacer = pc.schedule().alphabet.spacer().value_or(0);
    Word out;
    out.symbols.reserve(static_cast<std::size_t>(length));
    Index x = ((start % hN) + hN) % hN;
    for (Index i = 0; i < length; ++i) {
        const Index xm = pc.project(x, m);
        out.symbols.push_back(xm == kSpacer ? spacer : wm[xm]);
        x = x + 1 == hN ? 0 : x + 1;
    }
    return out;
}

}  // namespace

Word orbit_coding(const ProjectionChain& pc, Index start, Index length, std::size_t m) {
    if (length < 0 || length > pc.top_height()) fail(ErrorKind::Range, "coding length exceeds h_N");
    if (m > pc.depth()) fail(ErrorKind::Range, "coding level above truncation depth");
    return read_coding(pc, build_word(pc.schedule(), m), start, length, m);
}

std::vector<Index> column_starts(const ProjectionChain& pc, std::size_t m) {
    if (m >= pc.depth()) fail(ErrorKind::Range, "column starts need m < N");
    const Schedule& sch = pc.schedule();
    std::vector<Index> cur;
    for (Index y = 0; y < sch.stages[m].q; ++y) cur.push_back(pc.copy_start(m, y));
    for (std::size_t k = m + 1; k < pc.depth(); ++k) {
        const Stage& st = sch.stages[k];
        const Index h = pc.height(k);
        std::vector<Index> next;
        next.reserve(cur.size() * static_cast<std::size_t>(st.q));
        for (Index y = 0; y < st.q; ++y) {
            const Index a = st.rotations[static_cast<std::size_t>(y)];
            for (Index x : cur) next.push_back(pc.copy_start(k, y) + ((x - a) % h + h) % h);
        }
        cur = std::move(next);
    }
    std::sort(cur.begin(), cur.end());
    return cur;
}

CoverageResult coverage_statistic(const ProjectionChain& pc, std::size_t m, Index window_count) {
    if (window_count < 1) fail(ErrorKind::Range, "window count must be positive");
    const auto starts = column_starts(pc, m);
    const Word wm = build_word(pc.schedule(), m);
    const Index hm = wm.height();
    std::vector<Symbol> doubled(wm.symbols);
    doubled.insert(doubled.end(), wm.symbols.begin(), wm.symbols.end() - 1);

    const auto total = static_cast<Index>(starts.size());
    const Index k = std::min(window_count, total);
    CoverageResult res;
    res.windows = k;
    for (Index i = 0; i < k; ++i) {
        const Index x = starts[static_cast<std::size_t>(i * total / k)];
        const Word w = read_coding(pc, wm, x, hm, m);
        const std::boyer_moore_horspool_searcher searcher(w.symbols.begin(), w.symbols.end());
        if (std::search(doubled.begin(), doubled.end(), searcher) != doubled.end()) ++res.matches;
    }
    return res;
}

}  // namespace icelab
