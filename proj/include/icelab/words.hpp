#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icelab/types.hpp"

namespace icelab {

/// Ordered, distinct symbol labels. The optional spacer symbol is one of them
/// and is the letter written into spacer levels.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> symbols,
                      std::optional<std::string> spacer_symbol = std::nullopt);

    /// One symbol per character of `chars`, e.g. "CAT" or "01".
    static Alphabet from_chars(std::string_view chars,
                               std::optional<char> spacer = std::nullopt);

    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    const std::string& label(Symbol s) const { return symbols_.at(s); }
    std::optional<Symbol> index_of(std::string_view label) const;
    Symbol at(std::string_view label) const;

    std::optional<Symbol> spacer() const noexcept { return spacer_; }
    std::optional<std::string> spacer_label() const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<std::string> symbols_;
    std::optional<Symbol> spacer_;
};

/// A finite word over an alphabet, stored as a flat index array.
struct Word {
    std::vector<Symbol> symbols;

    Index height() const noexcept { return static_cast<Index>(symbols.size()); }
    Symbol operator[](Index i) const { return symbols[static_cast<std::size_t>(i)]; }

    bool operator==(const Word&) const = default;
};

/// Parse a word whose symbols are the single-character labels of `alphabet`.
Word parse_word(const Alphabet& alphabet, std::string_view text);
std::string to_string(const Alphabet& alphabet, const Word& word);

/// One refinement step W_n -> W_{n+1}: q rotated copies with spacer runs.
struct Stage {
    Index q = 1;
    std::vector<Index> rotations;
    std::vector<Index> spacers;

    bool pure() const noexcept;
    Index spacer_total() const noexcept;

    bool operator==(const Stage&) const = default;
};

/// Stage with q copies, the given rotations and no spacers.
Stage pure_stage(std::vector<Index> rotations);

struct Schedule {
    Alphabet alphabet;
    Word seed_word;
    std::vector<Stage> stages;
    std::string family_tag = "custom";
    std::optional<std::uint64_t> rng_seed;

    std::size_t depth() const noexcept { return stages.size(); }

    /// h_0, ..., h_depth from h_{n+1} = q_n h_n + sum_y s_{n,y}.
    std::vector<Index> heights() const;

    /// Partial products prod_{k<n} h_{k+1} / (q_k h_k); identically 1 without
    /// spacers. Finite measure of the limit needs these bounded.
    std::vector<double> measure_products() const;

    bool operator==(const Schedule&) const = default;
};

struct ValidateOptions {
    double measure_cap = 100.0;
};

/// Structural checks: symbol indices, stage vector lengths, nonnegative
/// spacers, spacer symbol present when spacers are used, rotations reduced
/// mod h_n, bounded measure products.
void validate(const Schedule& schedule, const ValidateOptions& options = {});

/// Process-wide default for BuildLimits::max_length (initially 10^7).
Index default_build_limit() noexcept;
void set_default_build_limit(Index max_length) noexcept;

struct BuildLimits {
    Index max_length = default_build_limit();
};

/// rho_alpha(W)[t] = W[(t + alpha) mod h]; alpha in [0, h].
Word rotate(const Word& word, Index alpha);

Word concat_stage(const Word& word, const Stage& stage,
                  std::optional<Symbol> spacer_symbol,
                  const BuildLimits& limits = {});

/// W_0, ..., W_n for n <= schedule.depth().
std::vector<Word> build_words(const Schedule& schedule, std::size_t n,
                              const BuildLimits& limits = {});

/// W_n alone.
Word build_word(const Schedule& schedule, std::size_t n, const BuildLimits& limits = {});

// -- schedule families ------------------------------------------------------

/// Morse iceberg family of order r: q_n = r, alpha_{n,y} = y h_n / r.
Schedule morse_schedule(int r, std::size_t depth, const Alphabet& alphabet,
                        const Word& seed_word);

/// Copy count of stage n given h_n.
using QRule = std::function<Index(std::size_t stage, Index height)>;

/// q_n = counts[n], the last entry repeating past the end.
QRule fixed_q(std::vector<Index> counts);
/// q_n = h_n^2.
QRule square_height_q();

/// Uniform i.i.d. rotations on {0, ..., h_n - 1}.
Schedule random_schedule(std::uint64_t seed, const QRule& q_rule, std::size_t depth,
                         const Alphabet& alphabet, const Word& seed_word);

enum class RankOneKind { Ornstein, Staircase };

struct RankOneParams {
    QRule q_rule = fixed_q({2});
    /// Ornstein: alpha_max = floor(h_n / ratio) unless alpha_max is given.
    double ratio = 8.0;
    std::optional<Index> alpha_max;
    std::uint64_t seed = 0;
};

/// Rank-one schedules (all rotations zero). Staircase: s_{n,y} = y.
/// Ornstein: q sorted i.i.d. draws on [0, alpha_max], s_y = a_{y+1} - a_y and
/// s_{q-1} = 0. The alphabet must define a spacer symbol.
Schedule rank_one_schedule(RankOneKind kind, const RankOneParams& params,
                           std::size_t depth, const Alphabet& alphabet,
                           const Word& seed_word);

// -- statistics -------------------------------------------------------------

using SubwordDistribution = std::map<std::vector<Symbol>, double>;

/// Empirical frequencies of the |W| - L + 1 windows of length L.
SubwordDistribution subword_distribution(const Word& word, Index length);

/// l1 distance between two subword distributions.
double distribution_distance(const SubwordDistribution& a, const SubwordDistribution& b);

}  // namespace icelab
