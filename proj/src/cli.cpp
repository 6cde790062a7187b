#include "icelab/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "icelab/dynamics.hpp"
#include "icelab/iceberg.hpp"
#include "icelab/parallel.hpp"
#include "icelab/rank.hpp"
#include "icelab/schedule_io.hpp"
#include "icelab/spectral.hpp"

namespace icelab::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr Index kMaxHeight = 10'000'000;
constexpr Index kMaxGrid = Index{1} << 22;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_real(std::string s) {
    s = trim(s);
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail(ErrorKind::Config, "cannot parse number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::complex<double> parse_complex(const std::string& raw) {
    const std::string text = trim(raw);
    if (text.rfind("cis(", 0) == 0 && text.back() == ')') {
        const std::string inner = text.substr(4, text.size() - 5);
        const auto slash = inner.find('/');
        double turns = slash == std::string::npos
                           ? parse_real(inner)
                           : parse_real(inner.substr(0, slash)) / parse_real(inner.substr(slash + 1));
        return std::polar(1.0, 2.0 * std::numbers::pi * turns);
    }
    if (!text.empty() && text.back() == 'i') {
        const std::string body = text.substr(0, text.size() - 1);
        std::size_t split_at = std::string::npos;
        for (std::size_t k = body.size(); k-- > 1;) {
            if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                split_at = k;
                break;
            }
        }
        double re = 0.0;
        std::string im_text = body;
        if (split_at != std::string::npos) {
            re = parse_real(body.substr(0, split_at));
            im_text = body.substr(split_at);
        }
        double im;
        if (im_text.empty() || im_text == "+")
            im = 1.0;
        else if (im_text == "-")
            im = -1.0;
        else
            im = parse_real(im_text);
        return {re, im};
    }
    return {parse_real(text), 0.0};
}

LabelMap parse_labels(const std::string& text, const Alphabet& alphabet) {
    LabelMap labels;
    if (trim(text) == "roots") {
        std::vector<std::string> plain;
        for (std::size_t s = 0; s < alphabet.size(); ++s)
            if (alphabet.spacer() != static_cast<Symbol>(s)) plain.push_back(alphabet.label(static_cast<Symbol>(s)));
        for (std::size_t k = 0; k < plain.size(); ++k)
            labels[plain[k]] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                                   static_cast<double>(plain.size()));
        return labels;
    }
    for (const std::string& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Config, "label entry '" + item + "' lacks '='");
        const std::string key = trim(item.substr(0, eq));
        if (!alphabet.index_of(key)) fail(ErrorKind::Config, "label for unknown symbol '" + key + "'");
        labels[key] = parse_complex(item.substr(eq + 1));
    }
    return labels;
}

namespace {

struct Options {
    // schedule source
    std::string schedule_path;
    std::string family;
    int r = 2;
    std::optional<std::size_t> depth;
    std::string seed_word;
    std::string alphabet;
    std::optional<std::string> spacer;
    std::string q_list;
    std::string q_rule;
    double ratio = 8.0;
    std::optional<Index> alpha_max;
    std::optional<std::uint64_t> seed;
    // output
    std::string out_dir;
    bool overwrite = false;
    bool force = false;
    unsigned threads = 1;
    // experiments
    std::string labels = "roots";
    std::optional<std::size_t> stage;
    std::optional<std::size_t> lookahead;
    std::optional<std::size_t> top;
    bool trace = false;
    Index coding_start = 0;
    Index coding_length = 0;
    std::size_t coding_level = 0;
    std::optional<std::size_t> coverage_level;
    Index windows = 1000;
    bool zero_mean = false;
    bool check_recursion = false;
    std::optional<std::size_t> from;
    std::optional<std::size_t> to;
    std::string mode = "stage";
    Index grid = 0;
    std::optional<std::size_t> levels;
    Index terms = 1000;
    double eps = 0.1;
    double a = 1.0;
    double b = 2.0;
    std::optional<Index> uniform;
    std::string experiment = "decay";
    std::uint64_t seed_start = 0;
    std::size_t seed_count = 20;
};

// Writes payloads into the output directory, refusing to clobber files
// unless --overwrite was given.
class OutputDir {
public:
    OutputDir(const Options& o) : overwrite_(o.overwrite) {
        std::string dir = o.out_dir;
        if (dir.empty()) {
            const char* env = std::getenv("ICELAB_OUT");
            dir = env && *env ? env : ".";
        }
        dir_ = dir;
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) fail(ErrorKind::Config, "cannot create output directory " + dir_.string());
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        if (fs::exists(path) && !overwrite_)
            fail(ErrorKind::Config, "refusing to overwrite " + path.string() + " (use --overwrite)");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Config, "cannot write " + path.string());
        out << content;
        written_.push_back(name);
    }

    const std::vector<std::string>& written() const { return written_; }
    const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
    bool overwrite_;
    std::vector<std::string> written_;
};

class Csv {
public:
    Csv(const std::vector<std::string>& header, std::string hash) : hash_(std::move(hash)) {
        for (const auto& h : header) text_ += h + ",";
        text_ += "schedule_hash\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (const auto& c : cells) text_ += c + ",";
        text_ += hash_ + "\n";
    }
    const std::string& str() const { return text_; }

private:
    std::string hash_;
    std::string text_;
};

std::string num(double x) { return format_double(x); }
std::string num(Index x) { return std::to_string(x); }
std::string num(std::size_t x) { return std::to_string(x); }

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<Index> parse_index_list(const std::string& text) {
    std::vector<Index> out;
    for (const auto& item : split(text, ',')) {
        Index v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size() || item.empty())
            fail(ErrorKind::Config, "cannot parse integer '" + item + "'");
        out.push_back(v);
    }
    return out;
}

Alphabet make_alphabet(const Options& o, const std::string& seed_word, std::optional<std::string> spacer) {
    std::string chars = o.alphabet;
    if (chars.empty())
        for (char c : seed_word)
            if (chars.find(c) == std::string::npos) chars += c;
    std::vector<std::string> labels;
    for (char c : chars) labels.emplace_back(1, c);
    if (spacer && std::find(labels.begin(), labels.end(), *spacer) == labels.end()) labels.push_back(*spacer);
    return Alphabet(labels, spacer);
}

QRule make_q_rule(const Options& o, std::size_t& depth) {
    if (o.q_rule == "square") {
        if (!o.q_list.empty()) fail(ErrorKind::Config, "give either --q or --q-rule");
        depth = o.depth.value_or(3);
        return square_height_q();
    }
    if (!o.q_rule.empty()) fail(ErrorKind::Config, "unknown --q-rule '" + o.q_rule + "'");
    if (o.q_list.empty()) fail(ErrorKind::Config, "this family needs --q or --q-rule");
    const auto counts = parse_index_list(o.q_list);
    depth = o.depth.value_or(counts.size());
    return fixed_q(counts);
}

Schedule make_schedule(const Options& o, std::optional<std::uint64_t> seed) {
    if (!o.schedule_path.empty()) {
        if (!o.family.empty()) fail(ErrorKind::Config, "give either --schedule or --family");
        return load_schedule(o.schedule_path);
    }
    const std::string fam = o.family;
    if (fam.empty()) fail(ErrorKind::Config, "a schedule source (--schedule or --family) is required");
    if (fam == "cat") return cat_schedule();
    if (fam == "morse") {
        static const std::string digits = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
        if (o.seed_word.empty() && (o.r < 2 || o.r > static_cast<int>(digits.size())))
            fail(ErrorKind::Range, "Morse order outside [2, 36] needs an explicit --seed-word");
        const std::string w = o.seed_word.empty() ? digits.substr(0, static_cast<std::size_t>(o.r)) : o.seed_word;
        const Alphabet ab = make_alphabet(o, w, o.spacer);
        return morse_schedule(o.r, o.depth.value_or(4), ab, parse_word(ab, w));
    }
    if (fam == "random") {
        if (!seed) fail(ErrorKind::Config, "--seed is mandatory for random families");
        const std::string w = o.seed_word.empty() ? "01" : o.seed_word;
        const Alphabet ab = make_alphabet(o, w, o.spacer);
        std::size_t depth = 0;
        const QRule rule = make_q_rule(o, depth);
        return random_schedule(*seed, rule, depth, ab, parse_word(ab, w));
    }
    if (fam == "ornstein" || fam == "staircase") {
        const bool orn = fam == "ornstein";
        if (orn && !seed) fail(ErrorKind::Config, "--seed is mandatory for random families");
        const std::string w = o.seed_word.empty() ? "0" : o.seed_word;
        const Alphabet ab = make_alphabet(o, w, o.spacer.value_or("_"));
        RankOneParams params;
        std::size_t depth = 0;
        Options tmp = o;
        if (tmp.q_list.empty() && tmp.q_rule.empty()) tmp.q_list = "3";
        params.q_rule = make_q_rule(tmp, depth);
        params.ratio = o.ratio;
        params.alpha_max = o.alpha_max;
        params.seed = seed.value_or(0);
        return rank_one_schedule(orn ? RankOneKind::Ornstein : RankOneKind::Staircase, params, depth, ab,
                                 parse_word(ab, w));
    }
    fail(ErrorKind::Config, "unknown family '" + fam + "'");
}

void guard_height(const Schedule& sch, std::size_t n, const Options& o) {
    const Index h = sch.heights().at(n);
    if (h > kMaxHeight && !o.force)
        fail(ErrorKind::Resource, "h_" + std::to_string(n) + " = " + std::to_string(h) +
                                      " exceeds 10^7; pass --force to proceed");
}

void guard_grid(Index M, const Options& o) {
    if (M < 1) fail(ErrorKind::Range, "grid size must be positive");
    if (M > kMaxGrid && !o.force) fail(ErrorKind::Resource, "grid exceeds 2^22 points; pass --force to proceed");
}

std::size_t require_stage(std::optional<std::size_t> v, std::size_t fallback, std::size_t max, const char* what) {
    const std::size_t s = v.value_or(fallback);
    if (s > max) fail(ErrorKind::Range, std::string(what) + " beyond schedule depth");
    return s;
}

struct Context {
    const Options& o;
    OutputDir& out;
    std::ostream& log;
    std::string hash;
};

int cmd_build(Context& c, const Schedule& sch) {
    const std::size_t d = sch.depth();
    guard_height(sch, d, c.o);
    const auto words = build_words(sch, d);
    const auto products = sch.measure_products();
    Csv csv({"stage", "height", "measure_product", "word"}, c.hash);
    for (std::size_t n = 0; n <= d; ++n)
        csv.row({num(n), num(words[n].height()), num(products[n]), to_string(sch.alphabet, words[n])});
    c.out.write("schedule.json", schedule_to_json(sch));
    c.out.write("words.csv", csv.str());
    c.log << "built W_0..W_" << d << ", h_" << d << " = " << words[d].height() << "\n";
    return kOk;
}

int cmd_geometry(Context& c, const Schedule& sch) {
    const std::size_t d = sch.depth();
    if (d == 0) fail(ErrorKind::Range, "geometry needs at least one stage");
    const std::size_t n = require_stage(c.o.stage, 0, d - 1, "--stage");
    const std::size_t N = require_stage(c.o.top, d, d, "--N");
    guard_height(sch, N, c.o);
    const Iceberg ib = from_stage(sch, n, true);
    const Stage& st = sch.stages[n];

    json rep;
    rep["stage"] = n;
    rep["h"] = ib.h;
    rep["q"] = ib.q;
    rep["cyclic"] = ib.cyclic;
    rep["uniformity_deviation"] = uniformity_deviation(ib);

    Csv ice({"k", "count", "weight"}, c.hash);
    for (Index k = 0; k < ib.h; ++k) ice.row({num(k), num(ib.counts[static_cast<std::size_t>(k)]), num(ib.weight(k))});
    c.out.write("iceberg.csv", ice.str());

    if (st.pure()) {
        const JumpMatrix jm = jump_matrix(st, ib.h);
        Csv jcsv({"a", "b", "count"}, c.hash);
        for (Eigen::Index a = 0; a < jm.counts.outerSize(); ++a)
            for (decltype(jm.counts)::InnerIterator it(jm.counts, a); it; ++it)
                jcsv.row({num(static_cast<Index>(it.row())), num(static_cast<Index>(it.col())), num(it.value())});
        c.out.write("jumps.csv", jcsv.str());
        rep["jump_deviation"] = jump_uniformity_deviation(jm);

        const std::size_t r = c.o.lookahead.value_or(std::min<std::size_t>(2, d - n));
        if (r >= 1 && n + r <= d) {
            bool pure = true;
            for (std::size_t k = n; k < n + r; ++k) pure = pure && sch.stages[k].pure();
            if (pure) {
                const BodyReport br = body_report(sch, n, r);
                rep["body"] = {{"r", br.r},
                               {"lower_bound", br.lower_bound},
                               {"exact_fraction", br.exact_fraction},
                               {"body_columns", br.body_columns},
                               {"total_columns", br.total_columns}};
            }
        } else if (c.o.lookahead) {
            fail(ErrorKind::Range, "--lookahead beyond schedule depth");
        }
    }

    const ProjectionChain pc(sch, N);
    const std::size_t m = c.o.coverage_level.value_or(n);
    if (m < N) {
        const CoverageResult cov = coverage_statistic(pc, m, c.o.windows);
        rep["coverage"] = {{"level", m}, {"windows", cov.windows}, {"matches", cov.matches}, {"fraction", cov.fraction()}};
    }
    if (c.o.trace) {
        Csv trace({"position", "regular_level"}, c.hash);
        for (Index x = 0; x < pc.top_height(); ++x) trace.row({num(x), num(step(pc, x).regular_level)});
        c.out.write("trace.csv", trace.str());
    }
    if (c.o.coding_length > 0) {
        if (c.o.coding_level > N) fail(ErrorKind::Range, "--coding-level beyond --N");
        const Word w = orbit_coding(pc, c.o.coding_start, c.o.coding_length, c.o.coding_level);
        c.out.write("coding.txt", to_string(sch.alphabet, w) + "\n");
    }
    c.out.write("geometry.json", rep.dump(2) + "\n");
    c.log << rep.dump(2) << "\n";
    return kOk;
}

int cmd_correlate(Context& c, const Schedule& sch) {
    const std::size_t n = require_stage(c.o.stage, sch.depth(), sch.depth(), "--stage");
    guard_height(sch, n, c.o);
    const LabelMap labels = parse_labels(c.o.labels, sch.alphabet);
    const auto words = build_words(sch, n);
    std::vector<CorrelationSeries> series;
    std::vector<LevelFunction> funcs;
    for (std::size_t k = 0; k <= n; ++k) {
        funcs.push_back(lift(sch.alphabet, labels, words[k], k, c.o.zero_mean));
        series.push_back(cyclic_correlation(funcs.back(), funcs.back()));
    }
    Csv csv({"stage", "t", "re", "im"}, c.hash);
    const VectorXcd& C = series[n].C;
    for (Index t = 0; t < C.size(); ++t) csv.row({num(n), num(t), num(C[t].real()), num(C[t].imag())});
    c.out.write("correlation.csv", csv.str());

    if (!c.o.check_recursion) return kOk;
    Csv rec({"stage", "s", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"}, c.hash);
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Stage& st = sch.stages[k];
        if (!st.pure()) {
            c.log << "stage " << k << " has spacers; recursion not applicable\n";
            continue;
        }
        const Index h = words[k].height();
        for (Index s = 1; s < st.q; ++s) {
            const auto lhs = correlation_at(funcs[k + 1].values, funcs[k + 1].values, s * h);
            const auto rhs = recursion_rhs(series[k], st, s);
            const double res = std::abs(lhs - rhs);
            worst = std::max(worst, res);
            ++checks;
            rec.row({num(k), num(s), num(lhs.real()), num(lhs.imag()), num(rhs.real()), num(rhs.imag()), num(res)});
        }
    }
    c.out.write("recursion.csv", rec.str());
    if (worst <= 1e-12) {
        c.log << "recursion residual <= 1e-12 (max " << format_double(worst) << " over " << checks << " checks)\n";
        return kOk;
    }
    c.log << "recursion residual " << format_double(worst) << " > 1e-12\n";
    return kCheckFailed;
}

json decay_json(const DecayProfile& p) {
    json j;
    j["slope_max"] = p.slope_max;
    j["slope_median"] = p.slope_median;
    j["slope_rms"] = p.slope_rms;
    j["variance_ratio"] = p.variance_ratio;
    j["predicted_ratio"] = p.predicted_ratio;
    return j;
}

int cmd_decay(Context& c, const Schedule& sch) {
    const std::size_t n2 = require_stage(c.o.to, sch.depth(), sch.depth(), "--to");
    const std::size_t n1 = c.o.from.value_or(n2 >= 2 ? n2 - 2 : 0);
    guard_height(sch, n2, c.o);
    const DecayProfile p = decay_profile(sch, parse_labels(c.o.labels, sch.alphabet), n1, n2);
    Csv csv({"stage", "h", "max", "median", "rms"}, c.hash);
    for (const auto& s : p.stages) csv.row({num(s.n), num(s.h), num(s.max), num(s.median), num(s.rms)});
    c.out.write("decay.csv", csv.str());
    const json j = decay_json(p);
    c.out.write("decay.json", j.dump(2) + "\n");
    c.log << j.dump(2) << "\n";
    return kOk;
}

json simplicity_json(const SimplicityReport& r) {
    json j;
    j["f2"] = r.f2;
    j["g2"] = r.g2;
    j["f_minus_g2"] = r.f_minus_g2;
    j["uv"] = {r.uv.real(), r.uv.imag()};
    j["fv"] = {r.fv.real(), r.fv.imag()};
    j["u2"] = r.u2;
    j["v2"] = r.v2;
    j["identity_residual"] = r.identity_residual;
    return j;
}

int cmd_simplicity(Context& c, const Schedule& sch) {
    const std::size_t N = require_stage(c.o.top, sch.depth(), sch.depth(), "--N");
    const std::size_t n = require_stage(c.o.stage, std::min<std::size_t>(1, N), N, "--stage");
    guard_height(sch, N, c.o);
    const SimplicityReport r = simplicity_diagnostic(sch, parse_labels(c.o.labels, sch.alphabet), n, N);
    json j = simplicity_json(r);
    j["n"] = n;
    j["N"] = N;
    c.out.write("simplicity.json", j.dump(2) + "\n");
    c.log << j.dump(2) << "\n";
    return kOk;
}

void write_poly(Context& c, const PolynomialGrid& pg, const std::string& hash) {
    Csv csv({pg.kind == GridKind::Circle ? "theta" : "t", "abs", "abs2"}, hash);
    for (Eigen::Index k = 0; k < pg.values.size(); ++k) {
        const double m = std::abs(pg.values[k]);
        csv.row({num(pg.points[k]), num(m), num(m * m)});
    }
    c.out.write("poly.csv", csv.str());
    const FlatnessMetrics fm = flatness_metrics(pg);
    json j{{"sup", fm.sup}, {"l1", fm.l1}, {"l2", fm.l2}};
    c.out.write("flatness.json", j.dump(2) + "\n");
    c.log << j.dump(2) << "\n";
}

int cmd_spectrum(Context& c, const std::optional<Schedule>& sch) {
    const std::string& mode = c.o.mode;
    if (mode == "exp") {
        const Index M = c.o.grid > 0 ? c.o.grid : 10'000;
        guard_grid(M, c.o);
        const json params{{"n", c.o.terms}, {"eps", c.o.eps}, {"a", c.o.a}, {"b", c.o.b}, {"grid", M}};
        c.hash = fnv1a_hex(params.dump());
        const PolynomialGrid pg = eval_line(exp_frequency_set(c.o.terms, c.o.eps), PolyClass::MR, c.o.a, c.o.b, M);
        write_poly(c, pg, c.hash);
        return kOk;
    }
    if (!sch) fail(ErrorKind::Config, "this spectrum mode needs a schedule");
    if (mode == "stage") {
        if (sch->depth() == 0) fail(ErrorKind::Range, "stage mode needs at least one stage");
        const std::size_t n = require_stage(c.o.stage, 0, sch->depth() - 1, "--stage");
        const Index M = c.o.grid > 0 ? c.o.grid : 4096;
        guard_grid(M, c.o);
        write_poly(c, eval_circle(stage_frequencies(*sch, n), PolyClass::M, M), c.hash);
        return kOk;
    }
    if (mode == "riesz") {
        const std::size_t n0 = c.o.stage.value_or(0);
        if (n0 > sch->depth()) fail(ErrorKind::Range, "--stage beyond schedule depth");
        const std::size_t L = c.o.levels.value_or(sch->depth() - n0);
        const Index M = c.o.grid > 0 ? c.o.grid : Index{1} << 14;
        guard_grid(M, c.o);
        guard_height(*sch, n0 + L, c.o);
        const LabelMap labels = parse_labels(c.o.labels, sch->alphabet);
        const RieszProduct rp = riesz_partial_product(*sch, labels, n0, L, M);
        const VectorXd direct =
            level_spectrum(lift(sch->alphabet, labels, build_word(*sch, n0 + L), n0 + L), M);
        Csv csv({"theta", "weight", "product", "direct"}, c.hash);
        for (Index k = 0; k < M; ++k) csv.row({num(rp.theta[k]), num(rp.weight[k]), num(rp.product[k]), num(direct[k])});
        c.out.write("riesz.csv", csv.str());
        json j{{"n0", n0}, {"levels", L}, {"grid", M}, {"masses", rp.masses}};
        if (rp.product.mean() > 0.0 && direct.mean() > 0.0) j["l1_vs_direct"] = normalized_l1(rp.product, direct);
        c.out.write("riesz.json", j.dump(2) + "\n");
        c.log << j.dump(2) << "\n";
        return kOk;
    }
    if (mode == "merit") {
        guard_height(*sch, sch->depth(), c.o);
        const LabelMap labels = parse_labels(c.o.labels, sch->alphabet);
        Csv csv({"stage", "length", "merit_factor"}, c.hash);
        const auto words = build_words(*sch, sch->depth());
        for (std::size_t n = 0; n < words.size(); ++n) {
            if (words[n].height() < 2) continue;
            const LevelFunction f = lift(sch->alphabet, labels, words[n], n);
            std::vector<int> signs(static_cast<std::size_t>(f.height()));
            for (Index j = 0; j < f.height(); ++j) {
                const auto v = f.values[j];
                if (std::abs(v.imag()) > 0.0 || std::abs(std::abs(v.real()) - 1.0) > 0.0)
                    fail(ErrorKind::ClassViolation, "merit factors need labels in {+1, -1}");
                signs[static_cast<std::size_t>(j)] = v.real() > 0 ? 1 : -1;
            }
            csv.row({num(n), num(f.height()), num(merit_factor(signs))});
        }
        c.out.write("merit.csv", csv.str());
        return kOk;
    }
    fail(ErrorKind::Config, "unknown --mode '" + mode + "'");
}

int cmd_rank(Context& c, const std::optional<Schedule>& sch) {
    Iceberg ib;
    json j;
    if (c.o.uniform) {
        ib = uniform_iceberg(*c.o.uniform);
        const json params{{"uniform", *c.o.uniform}};
        c.hash = fnv1a_hex(params.dump());
    } else {
        if (!sch) fail(ErrorKind::Config, "rank needs a schedule or --uniform");
        if (sch->depth() == 0) fail(ErrorKind::Range, "rank needs at least one stage");
        const std::size_t n = require_stage(c.o.stage, sch->depth() - 1, sch->depth() - 1, "--stage");
        ib = from_stage(*sch, n);
        j["stage"] = n;
        if (sch->family_tag.rfind("morse-", 0) == 0) {
            const Rational b = beta_morse(static_cast<int>(sch->stages[n].q));
            j["beta_morse"] = {b.num, b.den};
        }
    }
    const RectangleCertificate cert = best_subtower_rectangle(ib);
    j["columns"] = {cert.col_lo, cert.col_hi};
    j["levels"] = {cert.level_lo, cert.level_hi};
    j["area"] = cert.area();
    j["covered"] = cert.covered;
    j["q"] = cert.q;
    j["h"] = cert.h;
    j["multiplicity_bound"] = multiplicity_bound(std::min(1.0, cert.area()));
    j["critical_beta"] = critical_beta();
    c.out.write("certificate.json", j.dump(2) + "\n");
    c.log << "area " << format_double(cert.area()) << "\n";
    return kOk;
}

int cmd_ensemble(Context& c) {
    const Options& o = c.o;
    const std::size_t count = o.seed_count;
    if (count == 0) fail(ErrorKind::Range, "--seed-count must be positive");
    std::vector<Schedule> schedules;
    schedules.reserve(count);
    for (std::size_t i = 0; i < count; ++i) schedules.push_back(make_schedule(o, o.seed_start + i));

    std::vector<std::string> header;
    const std::string& ex = o.experiment;
    if (ex == "decay")
        header = {"slope_max", "slope_median", "slope_rms"};
    else if (ex == "simplicity")
        header = {"f2", "g2", "f_minus_g2_ratio", "g2_ratio", "uv_ratio", "fv_ratio", "u2", "v2", "uv_norm_rel_diff"};
    else if (ex == "jump")
        header = {"jump_deviation"};
    else if (ex == "body")
        header = {"lower_bound", "exact_fraction"};
    else
        fail(ErrorKind::Config, "unknown --experiment '" + ex + "'");

    std::vector<std::vector<double>> results(count);
    parallel_for(count, o.threads, [&](std::size_t i) {
        const Schedule& sch = schedules[i];
        if (ex == "decay") {
            const std::size_t n2 = o.to.value_or(sch.depth());
            guard_height(sch, n2, o);
            const auto p = decay_profile(sch, parse_labels(o.labels, sch.alphabet), o.from.value_or(1), n2);
            results[i] = {p.slope_max, p.slope_median, p.slope_rms};
        } else if (ex == "simplicity") {
            const std::size_t N = o.top.value_or(sch.depth());
            guard_height(sch, N, o);
            const auto r = simplicity_diagnostic(sch, parse_labels(o.labels, sch.alphabet), o.stage.value_or(1), N);
            results[i] = {r.f2, r.g2, r.f_minus_g2 / r.f2, r.g2 / r.f2, std::abs(r.uv) / r.f2,
                          std::abs(r.fv) / r.f2, r.u2, r.v2, std::abs(r.u2 - r.v2) / r.u2};
        } else if (ex == "jump") {
            const std::size_t n = o.stage.value_or(0);
            if (n >= sch.depth()) fail(ErrorKind::Range, "--stage beyond schedule depth");
            results[i] = {jump_uniformity_deviation(jump_matrix(sch.stages[n], sch.heights()[n]))};
        } else {
            const std::size_t n = o.stage.value_or(0);
            if (n >= sch.depth()) fail(ErrorKind::Range, "--stage beyond schedule depth");
            const auto br = body_report(sch, n, o.lookahead.value_or(sch.depth() - n));
            results[i] = {br.lower_bound, br.exact_fraction};
        }
    });

    std::vector<std::string> cols{"seed"};
    cols.insert(cols.end(), header.begin(), header.end());
    std::string text;
    for (const auto& h : cols) text += h + ",";
    text += "schedule_hash\n";
    std::string hashes;
    for (std::size_t i = 0; i < count; ++i) {
        text += std::to_string(o.seed_start + i);
        for (double v : results[i]) text += "," + num(v);
        const std::string h = schedule_hash(schedules[i]);
        text += "," + h + "\n";
        hashes += h;
    }
    c.hash = fnv1a_hex(hashes);
    c.out.write("ensemble.csv", text);

    json summary;
    summary["experiment"] = ex;
    summary["seeds"] = count;
    json medians;
    for (std::size_t k = 0; k < header.size(); ++k) {
        std::vector<double> v;
        for (const auto& r : results) v.push_back(r[k]);
        const double med = median_nan_high(v);
        if (std::isnan(med))
            medians[header[k]] = nullptr;
        else
            medians[header[k]] = med;
    }
    summary["median"] = medians;
    c.out.write("ensemble.json", summary.dump(2) + "\n");
    c.log << summary.dump(2) << "\n";
    return kOk;
}

void add_schedule_options(CLI::App* app, Options& o) {
    app->add_option("--schedule", o.schedule_path, "Schedule JSON file");
    app->add_option("--family", o.family, "morse | random | ornstein | staircase | cat");
    app->add_option("--r", o.r, "Morse order");
    app->add_option("--depth", o.depth, "Number of stages");
    app->add_option("--seed-word", o.seed_word, "Seed word W_0");
    app->add_option("--alphabet", o.alphabet, "Alphabet characters (default: letters of the seed word)");
    app->add_option("--spacer", o.spacer, "Spacer symbol");
    app->add_option("--q", o.q_list, "Copy counts q_0,q_1,... (last repeats)");
    app->add_option("--q-rule", o.q_rule, "square: q_n = h_n^2");
    app->add_option("--ratio", o.ratio, "Ornstein: alpha_max = h_n / ratio");
    app->add_option("--alpha-max", o.alpha_max, "Ornstein: explicit alpha_max");
    app->add_option("--seed", o.seed, "Generator seed");
}

void add_output_options(CLI::App* app, Options& o) {
    app->add_option("--out", o.out_dir, "Output directory (default $ICELAB_OUT or .)");
    app->add_flag("--overwrite", o.overwrite, "Replace existing output files");
    app->add_flag("--force", o.force, "Allow h_N > 10^7 and grids > 2^22");
    app->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"icelab: iceberg transformation laboratory", "icelab"};
    app.set_version_flag("--version", ICELAB_VERSION);
    app.require_subcommand(1, 1);

    auto* build = app.add_subcommand("build", "Build W_0..W_N and write the schedule");
    auto* geometry = app.add_subcommand("geometry", "Iceberg histogram, jump matrix, body and coverage");
    auto* correlate = app.add_subcommand("correlate", "Cyclic correlation of a lifted level function");
    auto* decay = app.add_subcommand("decay", "Decay profile of |C_n| over stages");
    auto* simplicity = app.add_subcommand("simplicity", "Simple-spectrum diagnostic");
    auto* spectrum = app.add_subcommand("spectrum", "Polynomials, Riesz products, merit factors");
    auto* rank = app.add_subcommand("rank", "Best subtower rectangle");
    auto* ensemble = app.add_subcommand("ensemble", "Run one experiment over a range of seeds");

    for (auto* sub : {build, geometry, correlate, decay, simplicity, spectrum, rank, ensemble}) {
        add_schedule_options(sub, o);
        add_output_options(sub, o);
    }
    for (auto* sub : {correlate, decay, simplicity, spectrum, ensemble})
        sub->add_option("--labels", o.labels, "Symbol labels, e.g. C=1,A=0,T=0 or roots");

    geometry->add_option("--stage", o.stage, "Stage n of the iceberg");
    geometry->add_option("--lookahead", o.lookahead, "Body report look-ahead r");
    geometry->add_option("--N", o.top, "Truncation depth");
    geometry->add_flag("--trace", o.trace, "Write the jump trace over Z_{h_N}");
    geometry->add_option("--coding-start", o.coding_start, "Orbit coding start");
    geometry->add_option("--coding-length", o.coding_length, "Orbit coding length");
    geometry->add_option("--coding-level", o.coding_level, "Orbit coding level m");
    geometry->add_option("--coverage-level", o.coverage_level, "Coverage level m");
    geometry->add_option("--windows", o.windows, "Coverage window count");

    correlate->add_option("--stage", o.stage, "Stage n (default: last)");
    correlate->add_flag("--zero-mean", o.zero_mean, "Subtract the mean before correlating");
    correlate->add_flag("--check-recursion", o.check_recursion, "Check the stage recursion identity");

    for (auto* sub : {decay, ensemble}) {
        sub->add_option("--from", o.from, "First stage of the fit");
        sub->add_option("--to", o.to, "Last stage of the fit");
    }
    for (auto* sub : {simplicity, ensemble}) {
        sub->add_option("--N", o.top, "Truncation depth");
    }
    simplicity->add_option("--stage", o.stage, "Stage n");

    spectrum->add_option("--mode", o.mode, "stage | riesz | exp | merit");
    spectrum->add_option("--stage", o.stage, "Stage (stage mode) or n0 (riesz mode)");
    spectrum->add_option("--levels", o.levels, "Riesz product depth");
    spectrum->add_option("--grid", o.grid, "Grid size");
    spectrum->add_option("--terms", o.terms, "Exponential set size n");
    spectrum->add_option("--eps", o.eps, "Exponential set epsilon");
    spectrum->add_option("--a", o.a, "Line grid start");
    spectrum->add_option("--b", o.b, "Line grid end");

    rank->add_option("--stage", o.stage, "Stage n (default: last)");
    rank->add_option("--uniform", o.uniform, "Use the uniform iceberg of this height");

    ensemble->add_option("--experiment", o.experiment, "decay | simplicity | jump | body");
    ensemble->add_option("--seed-start", o.seed_start, "First seed");
    ensemble->add_option("--seed-count", o.seed_count, "Number of seeds");
    ensemble->add_option("--stage", o.stage, "Stage n");
    ensemble->add_option("--lookahead", o.lookahead, "Body report look-ahead r");

    std::vector<std::string> storage{"icelab"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    try {
        struct LimitScope {
            Index saved = default_build_limit();
            ~LimitScope() { set_default_build_limit(saved); }
        } limit_scope;
        if (o.force) set_default_build_limit(std::numeric_limits<Index>::max());
        OutputDir dir(o);
        std::optional<Schedule> sch;
        const bool needs_schedule = command != "ensemble" &&
                                    !(command == "spectrum" && o.mode == "exp") &&
                                    !(command == "rank" && o.uniform);
        if (needs_schedule || !o.schedule_path.empty() || (!o.family.empty() && command != "ensemble"))
            sch = make_schedule(o, o.seed);
        Context ctx{o, dir, out, sch ? schedule_hash(*sch) : std::string()};

        int code = kOk;
        if (command == "build") code = cmd_build(ctx, *sch);
        else if (command == "geometry") code = cmd_geometry(ctx, *sch);
        else if (command == "correlate") code = cmd_correlate(ctx, *sch);
        else if (command == "decay") code = cmd_decay(ctx, *sch);
        else if (command == "simplicity") code = cmd_simplicity(ctx, *sch);
        else if (command == "spectrum") code = cmd_spectrum(ctx, sch);
        else if (command == "rank") code = cmd_rank(ctx, sch);
        else code = cmd_ensemble(ctx);

        json manifest;
        manifest["command"] = command;
        manifest["args"] = args;
        manifest["schedule_hash"] = ctx.hash;
        manifest["version"] = ICELAB_VERSION;
        manifest["timestamp"] = timestamp_utc();
        manifest["outputs"] = dir.written();
        dir.write("manifest.json", manifest.dump(2) + "\n");
        return code;
    } catch (const Error& e) {
        err << "icelab " << command << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::Resource ? kResource : kUsage;
    }
}

}  // namespace icelab::cli
