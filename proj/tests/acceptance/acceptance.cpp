// Acceptance gate: one PASS/FAIL line per criterion, with its measured values
// and wall time. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "icelab/cli.hpp"
#include "icelab/correlation.hpp"
#include "icelab/iceberg.hpp"
#include "icelab/rank.hpp"
#include "icelab/schedule_io.hpp"
#include "icelab/spectral.hpp"
#include "icelab/words.hpp"
#include "oracles.hpp"

using namespace icelab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    /// Indented sub-lines, printed after the criterion line.
    std::vector<std::pair<bool, std::string>> parts;

    void check(bool ok, const std::string& what) {
        parts.emplace_back(ok, what);
        pass = pass && ok;
    }
};

std::string fmt(double x) { return cli::format_double(x); }

const LabelMap kPlusMinus{{"0", 1.0}, {"1", -1.0}};

// -- 1 ----------------------------------------------------------------------

Outcome exact_strings() {
    const Schedule cat = cat_schedule();
    const auto words = build_words(cat, 2);
    Outcome o;
    o.check(to_string(cat.alphabet, words[1]) == "CATATCTCATCACATATC", "18-symbol word");
    o.check(to_string(cat.alphabet, words[2]) == "CATCACATATCCATATCTTCTCATCACATATCCATAACATATCCATATCTCATC",
            "54-symbol word");
    return o;
}

// -- 2 ----------------------------------------------------------------------

Outcome thue_morse() {
    const Alphabet ab = Alphabet::from_chars("01");
    const Schedule sch = morse_schedule(2, 11, ab, parse_word(ab, "01"));
    const std::string w = to_string(ab, build_word(sch, 11));
    Outcome o;
    o.pass = w == oracle::thue_morse_prefix(4096);
    o.detail = std::to_string(w.size()) + " symbols";
    return o;
}

// -- 3 ----------------------------------------------------------------------

Outcome recursion_identity() {
    const Alphabet ab = Alphabet::from_chars("abc");
    std::mt19937_64 eng(20240501);
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const Index h0 = std::uniform_int_distribution<Index>(1, 8)(eng);
        const Index q0 = std::uniform_int_distribution<Index>(2, 64 / h0)(eng);
        const Index q1 = std::uniform_int_distribution<Index>(2, 256)(eng);
        std::uniform_int_distribution<Symbol> sym(0, 2);
        Word seed;
        for (Index i = 0; i < h0; ++i) seed.symbols.push_back(sym(eng));
        const Schedule sch = random_schedule(trial + 1, fixed_q({q0, q1}), 2, ab, seed);

        std::normal_distribution<double> nd;
        LabelMap labels;
        for (const auto& s : ab.symbols()) labels[s] = {nd(eng), nd(eng)};
        const auto words = build_words(sch, 2);
        const LevelFunction f1 = lift(ab, labels, words[1], 1);
        const LevelFunction f2 = lift(ab, labels, words[2], 2);
        const CorrelationSeries c1 = cyclic_correlation(f1, f1);
        const Index h1 = sch.heights()[1];
        for (Index s = 1; s < q1; ++s) {
            const auto direct = correlation_at(f2.values, f2.values, s * h1);
            worst = std::max(worst, std::abs(direct - recursion_rhs(c1, sch.stages[1], s)));
            ++checks;
        }
    }
    Outcome o;
    o.pass = worst <= 1e-12;
    o.detail = "max residual " + fmt(worst) + " over " + std::to_string(checks) + " lags, tol 1e-12";
    return o;
}

// -- 4 ----------------------------------------------------------------------

Outcome decay_exponent() {
    // q_n = h_n^2 for the first two stages; the last is capped so h_3 stays
    // below the default size limit.
    const Alphabet ab = Alphabet::from_chars("01");
    std::vector<double> slopes;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Schedule sch = random_schedule(seed, fixed_q({4, 256, 2048}), 3, ab, parse_word(ab, "0011"));
        slopes.push_back(decay_profile(sch, kPlusMinus, 1, 3).slope_median);
    }
    std::size_t undefined = 0;
    for (double s : slopes) undefined += std::isnan(s);
    const double med = median_nan_high(slopes);
    Outcome o;
    o.pass = med >= -0.65 && med <= -0.35;
    o.detail = "median slope " + fmt(med) + " over 20 seeds (" + std::to_string(undefined) +
               " undefined), want [-0.65, -0.35]";
    return o;
}

// -- 5 ----------------------------------------------------------------------

Outcome simplicity() {
    const Schedule cat = cat_schedule();
    const double third = 2.0 * std::numbers::pi / 3.0;
    const LabelMap roots{{"C", 1.0}, {"A", std::polar(1.0, third)}, {"T", std::polar(1.0, 2.0 * third)}};
    Outcome o;
    // h_1 = 27 and 81 from the seed CAT; q_1 = h_1^2, q_2 capped.
    const std::vector<std::vector<Index>> qs{{9, 729, 4}, {27, 6561, 2}};
    for (const auto& q : qs) {
        for (std::uint64_t seed : {1, 2}) {
            const Schedule sch = random_schedule(seed, fixed_q(q), 3, cat.alphabet, cat.seed_word);
            const SimplicityReport r = simplicity_diagnostic(sch, roots, 1, 3);
            const std::string tag = "h_1=" + std::to_string(sch.heights()[1]) + " seed " + std::to_string(seed) + ": ";
            const double fg = r.f_minus_g2 / r.f2, gg = r.g2 / r.f2;
            o.check(fg >= 0.4 && fg <= 0.6, tag + "|f-g|^2/|f|^2 = " + fmt(fg) + ", want [0.4, 0.6]");
            o.check(gg >= 0.85 && gg <= 1.15, tag + "|g|^2/|f|^2 = " + fmt(gg) + ", want [0.85, 1.15]");
            o.check(std::abs(r.uv) <= 0.05 * r.f2 && std::abs(r.fv) <= 0.05 * r.f2,
                    tag + "|<u,v>| = " + fmt(std::abs(r.uv) / r.f2) + " |f|^2, |<f,v>| = " +
                        fmt(std::abs(r.fv) / r.f2) + " |f|^2, want <= 0.05");
            const double rel = std::abs(r.u2 - r.v2) / r.u2;
            o.check(rel <= 1e-6, tag + "|u|^2 vs |v|^2 relative gap " + fmt(rel) + ", want <= 1e-6");
        }
    }
    return o;
}

// -- 6 ----------------------------------------------------------------------

Outcome body_lemma() {
    const Alphabet ab = Alphabet::from_chars("01");
    std::mt19937_64 eng(77);
    std::size_t violations = 0;
    double min_margin = 1.0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const std::size_t depth = std::uniform_int_distribution<std::size_t>(2, 3)(eng);
        std::vector<Index> q;
        for (std::size_t k = 0; k < depth; ++k) q.push_back(std::uniform_int_distribution<Index>(2, depth == 2 ? 40 : 12)(eng));
        const Schedule sch = random_schedule(trial + 100, fixed_q(q), depth, ab, parse_word(ab, "01"));
        const BodyReport br = body_report(sch, 0, depth);
        violations += br.exact_fraction < br.lower_bound;
        min_margin = std::min(min_margin, br.exact_fraction - br.lower_bound);
    }
    const Schedule big = random_schedule(5, fixed_q({64}), 3, ab, parse_word(ab, "01"));
    const BodyReport br = body_report(big, 0, 3);
    Outcome o;
    o.check(violations == 0, "exact >= bound on 100 schedules, min margin " + fmt(min_margin));
    o.check(br.exact_fraction >= 0.9, "q = 64, depth 3: exact " + fmt(br.exact_fraction) + " (bound " +
                                          fmt(br.lower_bound) + "), want >= 0.9");
    return o;
}

// -- 7 ----------------------------------------------------------------------

Outcome local_rank() {
    Outcome o;
    for (int r : {2, 3, 4, 5}) {
        const Index h = 210 * r;
        std::vector<Index> rot;
        for (Index y = 0; y < r; ++y) rot.push_back(y * h / r);
        const double A = best_subtower_rectangle(from_rotations(h, rot)).area();
        const double beta = beta_morse(r).value();
        o.check(std::abs(A - beta) <= 1.0 / static_cast<double>(h),
                "Morse r=" + std::to_string(r) + ", h=" + std::to_string(h) + ": area " + fmt(A) + " vs " + fmt(beta));
    }
    const double U = best_subtower_rectangle(uniform_iceberg(101)).area();
    o.check(U >= 0.245, "uniform h=101: area " + fmt(U) + ", want >= 0.245");

    std::mt19937_64 eng(9);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Index h = std::uniform_int_distribution<Index>(1, 64)(eng);
        const Index q = std::uniform_int_distribution<Index>(1, 80)(eng);
        std::uniform_int_distribution<Index> rot(0, h - 1);
        std::vector<Index> r(static_cast<std::size_t>(q));
        for (auto& a : r) a = rot(eng);
        const Iceberg ib = from_rotations(h, r);
        const RectangleCertificate c = best_subtower_rectangle(ib);
        mismatches += c.covered * c.levels() != oracle::brute_force_rectangle(ib);
    }
    o.check(mismatches == 0, "sweep vs brute force on 500 icebergs with h <= 64: " + std::to_string(mismatches) +
                                 " mismatches");
    return o;
}

// -- 8 ----------------------------------------------------------------------

Outcome parseval() {
    std::mt19937_64 eng(8);
    const Index M = Index{1} << 17;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const PolyClass cls = std::array{PolyClass::M, PolyClass::K, PolyClass::L}[trial % 3];
        const Index q = std::uniform_int_distribution<Index>(1, 2000)(eng);
        std::set<Index> chosen;
        std::uniform_int_distribution<Index> w(0, Index{1} << 15);
        while (static_cast<Index>(chosen.size()) < q) chosen.insert(w(eng));
        FrequencySet fs{VectorXd(q), true, {}};
        Index i = 0;
        for (Index x : chosen) fs.omega[i++] = static_cast<double>(x);
        VectorXcd c(q);
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        for (Index k = 0; k < q; ++k) {
            if (cls == PolyClass::M) c[k] = 1.0;
            else if (cls == PolyClass::K) c[k] = std::polar(1.0, u(eng));
            else c[k] = eng() % 2 ? 1.0 : -1.0;
        }
        const PolynomialGrid pg = eval_circle(fs, cls, M, c);
        worst = std::max(worst, std::abs(pg.values.cwiseAbs2().mean() - 1.0));
    }
    Outcome o;
    o.pass = worst <= 1e-9;
    o.detail = "max |mean |P|^2 - 1| = " + fmt(worst) + " over 100 polynomials, tol 1e-9";
    return o;
}

// -- 9 ----------------------------------------------------------------------

Outcome riesz_anchor() {
    const Alphabet ab = Alphabet::from_chars("01_", '_');
    const Index M = Index{1} << 14;
    Outcome o;
    const auto compare = [&](const Schedule& sch, const std::string& name) {
        const RieszProduct rp = riesz_partial_product(sch, kPlusMinus, 1, 3, M);
        const LevelFunction top = lift(ab, kPlusMinus, build_word(sch, 4), 4);
        const std::vector<std::complex<double>> f(top.values.data(), top.values.data() + top.values.size());
        const std::vector<double> ref = oracle::direct_word_spectrum(f, M);
        const double d = normalized_l1(rp.product, Eigen::Map<const VectorXd>(ref.data(), M));
        o.check(d <= 0.02, name + ": normalized L1 " + fmt(d) + ", want <= 0.02");
    };
    compare(rank_one_schedule(RankOneKind::Staircase, {.q_rule = fixed_q({3})}, 4, ab, parse_word(ab, "011")),
            "staircase q=3");
    for (std::uint64_t seed : {1, 2, 3}) {
        const RankOneParams p{.q_rule = fixed_q({4}), .ratio = 2.0, .alpha_max = std::nullopt, .seed = seed};
        compare(rank_one_schedule(RankOneKind::Ornstein, p, 4, ab, parse_word(ab, "011")),
                "Ornstein q=4 seed " + std::to_string(seed));
    }
    return o;
}

// -- 10 ---------------------------------------------------------------------

Outcome flat_exponentials() {
    const Index M = Index{1} << 18;
    std::vector<double> sups;
    std::string values;
    for (Index n : {250, 500, 1000, 2000}) {
        const FlatnessMetrics fm = flatness_metrics(eval_line(exp_frequency_set(n, 0.1), PolyClass::MR, 1.0, 2.0, M));
        sups.push_back(fm.sup);
        values += (values.empty() ? "" : ", ") + fmt(fm.sup);
    }
    Outcome o;
    for (std::size_t i = 1; i < sups.size(); ++i) o.pass = o.pass && sups[i] < sups[i - 1];
    o.detail = "sup ||P|-1| for n = 250..2000: " + values;
    return o;
}

// -- 11 ---------------------------------------------------------------------

Outcome jump_uniformity() {
    const Alphabet ab = Alphabet::from_chars("01");
    Word seed;
    for (int i = 0; i < 32; ++i) seed.symbols.push_back(static_cast<Symbol>(i % 2));
    std::vector<double> medians;
    for (Index q : {32 * 32, 4 * 32 * 32, 16 * 32 * 32}) {
        std::vector<double> dev;
        for (std::uint64_t s = 1; s <= 20; ++s) {
            const Schedule sch = random_schedule(s, fixed_q({q}), 1, ab, seed);
            dev.push_back(jump_uniformity_deviation(jump_matrix(sch.stages[0], 32)));
        }
        medians.push_back(median_nan_high(dev));
    }
    Outcome o;
    const double f1 = medians[0] / medians[1], f2 = medians[1] / medians[2];
    o.pass = f1 >= 1.3 && f1 <= 3.0 && f2 >= 1.3 && f2 <= 3.0;
    o.detail = "median deviation " + fmt(medians[0]) + ", " + fmt(medians[1]) + ", " + fmt(medians[2]) +
               "; factors " + fmt(f1) + ", " + fmt(f2) + ", want [1.3, 3.0]";
    return o;
}

// -- 12 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
    const fs::path root = fs::current_path() / "acceptance_determinism";
    const std::vector<std::vector<std::string>> commands{
        {"build", "--family", "random", "--q", "3,9", "--depth", "2", "--seed", "11"},
        {"geometry", "--family", "random", "--q", "4,16", "--depth", "2", "--seed", "5", "--stage", "0",
         "--lookahead", "2", "--trace"},
        {"correlate", "--family", "random", "--q", "4,16", "--depth", "2", "--seed", "5", "--zero-mean"},
        {"decay", "--family", "random", "--q", "8,16,16", "--depth", "3", "--seed", "2", "--labels", "0=1,1=-1"},
        {"spectrum", "--mode", "riesz", "--family", "ornstein", "--q", "4", "--depth", "3", "--seed", "7",
         "--seed-word", "011", "--alphabet", "01_", "--stage", "1", "--levels", "2", "--labels", "0=1,1=-1", "--grid", "4096"},
        {"ensemble", "--experiment", "body", "--family", "random", "--q", "6", "--depth", "3", "--seed-start",
         "1", "--seed-count", "6", "--threads", "2"},
    };
    Outcome o;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::vector<std::string> payloads[2];
        bool ran = true;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(rep));
            fs::remove_all(dir);
            auto args = commands[i];
            args.insert(args.end(), {"--out", dir.string()});
            std::ostringstream out, err;
            ran = ran && cli::run(args, out, err) == cli::kOk;
            std::set<fs::path> csvs;
            if (fs::exists(dir))
                for (const auto& e : fs::directory_iterator(dir))
                    if (e.path().extension() == ".csv") csvs.insert(e.path());
            for (const auto& p : csvs) payloads[rep].push_back(p.filename().string() + "\n" + slurp(p));
        }
        o.check(ran && !payloads[0].empty() && payloads[0] == payloads[1],
                commands[i][0] + ": " + std::to_string(payloads[0].size()) + " CSV files identical");
    }
    fs::remove_all(root);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exact CAT words", 1, exact_strings},
        {2, "Thue-Morse oracle", 1, thue_morse},
        {3, "correlation recursion identity", 30, recursion_identity},
        {4, "decay exponent", 300, decay_exponent},
        {5, "simplicity diagnostic", 300, simplicity},
        {6, "body lemma", 60, body_lemma},
        {7, "local rank", 60, local_rank},
        {8, "Parseval", 60, parseval},
        {9, "Riesz anchor", 60, riesz_anchor},
        {10, "flat exponential frequencies", 60, flat_exponentials},
        {11, "jump uniformity", 120, jump_uniformity},
        {12, "determinism", 60, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool ok = o.pass && in_time;
        failed += !ok;
        std::printf("[%s] %2d %s: %s (%.2f s, budget %.0f s%s)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.empty() ? (o.pass ? "all checks hold" : "checks failed") : o.detail.c_str(), secs,
                    c.budget_s, in_time ? "" : ", over budget");
        for (const auto& [pass, text] : o.parts) std::printf("       %s %s\n", pass ? "ok  " : "FAIL", text.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
