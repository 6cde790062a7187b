#include "icelab/words.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "icelab/error.hpp"
#include "icelab/rng.hpp"

namespace icelab {

namespace {
std::atomic<Index> g_build_limit{10'000'000};
}  // namespace

Index default_build_limit() noexcept { return g_build_limit.load(); }
void set_default_build_limit(Index max_length) noexcept { g_build_limit.store(max_length); }

Alphabet::Alphabet(std::vector<std::string> symbols, std::optional<std::string> spacer_symbol)
    : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) fail(ErrorKind::Config, "alphabet needs at least two symbols");
    if (symbols_.size() > 0xFFFF) fail(ErrorKind::Config, "alphabet too large");
    std::set<std::string> seen(symbols_.begin(), symbols_.end());
    if (seen.size() != symbols_.size()) fail(ErrorKind::Config, "alphabet labels must be distinct");
    if (spacer_symbol) {
        auto idx = index_of(*spacer_symbol);
        if (!idx) fail(ErrorKind::Config, "spacer symbol '" + *spacer_symbol + "' is not in the alphabet");
        spacer_ = *idx;
    }
}

Alphabet Alphabet::from_chars(std::string_view chars, std::optional<char> spacer) {
    std::vector<std::string> labels;
    labels.reserve(chars.size());
    for (char c : chars) labels.emplace_back(1, c);
    std::optional<std::string> sp;
    if (spacer) sp = std::string(1, *spacer);
    return Alphabet(std::move(labels), std::move(sp));
}

std::optional<Symbol> Alphabet::index_of(std::string_view label) const {
    auto it = std::find(symbols_.begin(), symbols_.end(), label);
    if (it == symbols_.end()) return std::nullopt;
    return static_cast<Symbol>(it - symbols_.begin());
}

Symbol Alphabet::at(std::string_view label) const {
    auto idx = index_of(label);
    if (!idx) fail(ErrorKind::Config, "unknown symbol '" + std::string(label) + "'");
    return *idx;
}

std::optional<std::string> Alphabet::spacer_label() const {
    if (!spacer_) return std::nullopt;
    return symbols_[*spacer_];
}

Word parse_word(const Alphabet& alphabet, std::string_view text) {
    Word w;
    w.symbols.reserve(text.size());
    for (char c : text) w.symbols.push_back(alphabet.at(std::string_view(&c, 1)));
    return w;
}

std::string to_string(const Alphabet& alphabet, const Word& word) {
    std::string out;
    out.reserve(word.symbols.size());
    for (Symbol s : word.symbols) out += alphabet.label(s);
    return out;
}

bool Stage::pure() const noexcept {
    return std::all_of(spacers.begin(), spacers.end(), [](Index s) { return s == 0; });
}

Index Stage::spacer_total() const noexcept {
    return std::accumulate(spacers.begin(), spacers.end(), Index{0});
}

Stage pure_stage(std::vector<Index> rotations) {
    Stage st;
    st.q = static_cast<Index>(rotations.size());
    st.spacers.assign(rotations.size(), 0);
    st.rotations = std::move(rotations);
    return st;
}

std::vector<Index> Schedule::heights() const {
    std::vector<Index> h{seed_word.height()};
    h.reserve(stages.size() + 1);
    for (const Stage& st : stages) {
        const Index prev = h.back();
        if (st.q > 0 && prev > (std::numeric_limits<Index>::max() - st.spacer_total()) / st.q)
            fail(ErrorKind::Resource, "height overflows 64-bit range");
        h.push_back(st.q * prev + st.spacer_total());
    }
    return h;
}

std::vector<double> Schedule::measure_products() const {
    const auto h = heights();
    std::vector<double> out{1.0};
    for (std::size_t n = 0; n < stages.size(); ++n) {
        const double ratio = static_cast<double>(h[n + 1]) /
                             (static_cast<double>(stages[n].q) * static_cast<double>(h[n]));
        out.push_back(out.back() * ratio);
    }
    return out;
}

void validate(const Schedule& schedule, const ValidateOptions& options) {
    if (schedule.seed_word.symbols.empty()) fail(ErrorKind::Config, "seed word is empty");
    for (Symbol s : schedule.seed_word.symbols)
        if (s >= schedule.alphabet.size()) fail(ErrorKind::Config, "seed word symbol outside alphabet");
    Index h = schedule.seed_word.height();
    for (std::size_t n = 0; n < schedule.stages.size(); ++n) {
        const Stage& st = schedule.stages[n];
        const std::string where = "stage " + std::to_string(n) + ": ";
        if (st.q < 1) fail(ErrorKind::Config, where + "q must be >= 1");
        if (static_cast<Index>(st.rotations.size()) != st.q ||
            static_cast<Index>(st.spacers.size()) != st.q)
            fail(ErrorKind::Config, where + "rotations/spacers must have q entries");
        for (Index a : st.rotations)
            if (a < 0 || a >= h) fail(ErrorKind::Range, where + "rotation not reduced mod h_n");
        for (Index s : st.spacers)
            if (s < 0) fail(ErrorKind::Parameter, where + "negative spacer count");
        if (!st.pure() && !schedule.alphabet.spacer())
            fail(ErrorKind::Config, where + "spacers requested but alphabet has no spacer symbol");
        h = st.q * h + st.spacer_total();
    }
    const auto products = schedule.measure_products();
    if (products.back() > options.measure_cap)
        fail(ErrorKind::Parameter, "measure product exceeds cap");
}

Word rotate(const Word& word, Index alpha) {
    const Index h = word.height();
    if (alpha < 0 || alpha > h) fail(ErrorKind::Range, "rotation outside [0, |W|]");
    if (h == 0) return word;
    const auto a = static_cast<std::ptrdiff_t>(alpha % h);
    Word out;
    out.symbols.reserve(word.symbols.size());
    out.symbols.insert(out.symbols.end(), word.symbols.begin() + a, word.symbols.end());
    out.symbols.insert(out.symbols.end(), word.symbols.begin(), word.symbols.begin() + a);
    return out;
}

Word concat_stage(const Word& word, const Stage& stage, std::optional<Symbol> spacer_symbol,
                  const BuildLimits& limits) {
    const Index h = word.height();
    if (static_cast<Index>(stage.rotations.size()) != stage.q ||
        static_cast<Index>(stage.spacers.size()) != stage.q)
        fail(ErrorKind::Config, "stage rotations/spacers must have q entries");
    if (!stage.pure() && !spacer_symbol)
        fail(ErrorKind::Config, "spacers requested but no spacer symbol is defined");
    const Index total = stage.q * h + stage.spacer_total();
    if (total > limits.max_length)
        fail(ErrorKind::Resource, "word length " + std::to_string(total) + " exceeds limit " +
                                      std::to_string(limits.max_length));
    Word out;
    out.symbols.reserve(static_cast<std::size_t>(total));
    for (Index y = 0; y < stage.q; ++y) {
        const Index a = stage.rotations[static_cast<std::size_t>(y)];
        if (a < 0 || a > h) fail(ErrorKind::Range, "rotation outside [0, |W|]");
        const auto cut = static_cast<std::ptrdiff_t>(h == 0 ? 0 : a % h);
        out.symbols.insert(out.symbols.end(), word.symbols.begin() + cut, word.symbols.end());
        out.symbols.insert(out.symbols.end(), word.symbols.begin(), word.symbols.begin() + cut);
        out.symbols.insert(out.symbols.end(),
                           static_cast<std::size_t>(stage.spacers[static_cast<std::size_t>(y)]),
                           spacer_symbol.value_or(0));
    }
    return out;
}

std::vector<Word> build_words(const Schedule& schedule, std::size_t n, const BuildLimits& limits) {
    if (n > schedule.depth()) fail(ErrorKind::Range, "stage index beyond schedule depth");
    std::vector<Word> words{schedule.seed_word};
    words.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k)
        words.push_back(concat_stage(words.back(), schedule.stages[k], schedule.alphabet.spacer(), limits));
    return words;
}

Word build_word(const Schedule& schedule, std::size_t n, const BuildLimits& limits) {
    if (n > schedule.depth()) fail(ErrorKind::Range, "stage index beyond schedule depth");
    Word w = schedule.seed_word;
    for (std::size_t k = 0; k < n; ++k)
        w = concat_stage(w, schedule.stages[k], schedule.alphabet.spacer(), limits);
    return w;
}

Schedule morse_schedule(int r, std::size_t depth, const Alphabet& alphabet, const Word& seed_word) {
    if (r < 2) fail(ErrorKind::Precondition, "Morse order must be >= 2");
    if (depth < 1) fail(ErrorKind::Precondition, "Morse depth must be >= 1");
    if (seed_word.height() == 0 || seed_word.height() % r != 0)
        fail(ErrorKind::Precondition, "seed word length must be divisible by the Morse order");
    Schedule sch{alphabet, seed_word, {}, "morse-" + std::to_string(r), std::nullopt};
    Index h = seed_word.height();
    for (std::size_t n = 0; n < depth; ++n) {
        std::vector<Index> rot(static_cast<std::size_t>(r));
        for (int y = 0; y < r; ++y) rot[static_cast<std::size_t>(y)] = y * (h / r);
        sch.stages.push_back(pure_stage(std::move(rot)));
        h *= r;
    }
    return sch;
}

QRule fixed_q(std::vector<Index> counts) {
    if (counts.empty()) fail(ErrorKind::Config, "empty q sequence");
    return [counts = std::move(counts)](std::size_t stage, Index) {
        return counts[std::min(stage, counts.size() - 1)];
    };
}

QRule square_height_q() {
    return [](std::size_t, Index h) { return h * h; };
}

Schedule random_schedule(std::uint64_t seed, const QRule& q_rule, std::size_t depth,
                         const Alphabet& alphabet, const Word& seed_word) {
    if (seed_word.height() == 0) fail(ErrorKind::Config, "seed word is empty");
    Schedule sch{alphabet, seed_word, {}, "random", seed};
    Index h = seed_word.height();
    for (std::size_t n = 0; n < depth; ++n) {
        const Index q = q_rule(n, h);
        if (q < 2) fail(ErrorKind::Precondition, "random schedules need q_n >= 2");
        if (h > std::numeric_limits<Index>::max() / q) fail(ErrorKind::Resource, "height overflow");
        auto engine = stage_engine(seed, n);
        std::vector<Index> rot(static_cast<std::size_t>(q));
        for (auto& a : rot) a = static_cast<Index>(uniform_below(engine, static_cast<std::uint64_t>(h)));
        sch.stages.push_back(pure_stage(std::move(rot)));
        h *= q;
    }
    return sch;
}

Schedule rank_one_schedule(RankOneKind kind, const RankOneParams& params, std::size_t depth,
                           const Alphabet& alphabet, const Word& seed_word) {
    if (!alphabet.spacer()) fail(ErrorKind::Config, "rank-one schedules need a spacer symbol");
    if (seed_word.height() == 0) fail(ErrorKind::Config, "seed word is empty");
    Schedule sch{alphabet, seed_word, {},
                 kind == RankOneKind::Staircase ? "staircase" : "ornstein", std::nullopt};
    if (kind == RankOneKind::Ornstein) sch.rng_seed = params.seed;
    Index h = seed_word.height();
    for (std::size_t n = 0; n < depth; ++n) {
        const Index q = params.q_rule(n, h);
        if (q < 1) fail(ErrorKind::Parameter, "q_n must be >= 1");
        Stage st;
        st.q = q;
        st.rotations.assign(static_cast<std::size_t>(q), 0);
        st.spacers.assign(static_cast<std::size_t>(q), 0);
        if (kind == RankOneKind::Staircase) {
            for (Index y = 0; y < q; ++y) st.spacers[static_cast<std::size_t>(y)] = y;
        } else {
            if (params.ratio <= 0) fail(ErrorKind::Parameter, "Ornstein ratio must be positive");
            const auto bound = static_cast<Index>(std::floor(static_cast<double>(h) / params.ratio));
            const Index amax = params.alpha_max.value_or(bound);
            if (amax < 0 || amax > bound)
                fail(ErrorKind::Parameter, "Ornstein alpha_max exceeds h_n / ratio");
            auto engine = stage_engine(params.seed, n);
            std::vector<Index> draws(static_cast<std::size_t>(q));
            for (auto& a : draws)
                a = static_cast<Index>(uniform_below(engine, static_cast<std::uint64_t>(amax) + 1));
            std::sort(draws.begin(), draws.end());
            for (Index y = 0; y + 1 < q; ++y) {
                const Index s = draws[static_cast<std::size_t>(y + 1)] - draws[static_cast<std::size_t>(y)];
                if (s < 0) fail(ErrorKind::Parameter, "negative spacer");
                st.spacers[static_cast<std::size_t>(y)] = s;
            }
        }
        h = q * h + st.spacer_total();
        sch.stages.push_back(std::move(st));
    }
    return sch;
}

SubwordDistribution subword_distribution(const Word& word, Index length) {
    const Index h = word.height();
    if (length < 1 || length > h) fail(ErrorKind::Range, "subword length outside [1, |W|]");
    const Index windows = h - length + 1;
    std::map<std::vector<Symbol>, Index> counts;
    for (Index i = 0; i < windows; ++i) {
        auto first = word.symbols.begin() + i;
        ++counts[std::vector<Symbol>(first, first + length)];
    }
    SubwordDistribution out;
    for (auto& [key, c] : counts) out.emplace(key, static_cast<double>(c) / static_cast<double>(windows));
    return out;
}

double distribution_distance(const SubwordDistribution& a, const SubwordDistribution& b) {
    double d = 0.0;
    for (const auto& [key, p] : a) {
        auto it = b.find(key);
        d += std::abs(p - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [key, p] : b)
        if (!a.contains(key)) d += p;
    return d;
}

}  // namespace icelab
