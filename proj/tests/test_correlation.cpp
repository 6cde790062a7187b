#include <doctest.h>

#include <numbers>
#include <random>

#include "icelab/correlation.hpp"
#include "icelab/error.hpp"
#include "icelab/schedule_io.hpp"
#include "oracles.hpp"

using namespace icelab;

namespace {

const Alphabet kCat = Alphabet::from_chars("CAT");
const Alphabet kBin = Alphabet::from_chars("01");
const std::complex<double> kOmega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

LabelMap cat_roots() { return {{"C", 1.0}, {"A", kOmega}, {"T", kOmega * kOmega}}; }

std::vector<std::complex<double>> to_std(const VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

VectorXcd random_vector(Index h, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> nd;
    VectorXcd v(h);
    for (Index i = 0; i < h; ++i) v[i] = {nd(eng), nd(eng)};
    return v;
}

}  // namespace

TEST_CASE("lift") {
    const LevelFunction base = lift(kCat, {{"C", 1.0}, {"A", 0.0}, {"T", 0.0}}, parse_word(kCat, "CAT"), 0);
    CHECK(base.values[0] == std::complex<double>(1.0));
    CHECK(base.values[1] == std::complex<double>(0.0));
    CHECK(base.values[2] == std::complex<double>(0.0));

    const LevelFunction flat = lift(kCat, {{"C", 1.0}, {"A", 1.0}, {"T", 1.0}}, parse_word(kCat, "CATTAC"), 0, true);
    CHECK(flat.values.cwiseAbs().maxCoeff() == 0.0);

    const Word w1 = build_word(cat_schedule(), 1);
    const LevelFunction roots = lift(kCat, cat_roots(), w1, 1);
    CHECK(std::abs(roots.values.sum()) <= 1e-12 * 18);

    try {
        lift(kCat, {{"C", 1.0}}, w1, 1);
        FAIL("expected a configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }

    const Alphabet ab({"a", "b", "_"}, "_");
    const LevelFunction sp = lift(ab, {{"a", 2.0}, {"b", 4.0}}, parse_word(ab, "a_b_"), 0, true);
    CHECK(sp.values[0] == std::complex<double>(-1.0));
    CHECK(sp.values[1] == std::complex<double>(0.0));
    CHECK(sp.values[2] == std::complex<double>(1.0));
    CHECK(sp.values[3] == std::complex<double>(0.0));
}

TEST_CASE("cyclic correlation small cases") {
    VectorXcd delta(3);
    delta << 1.0, 0.0, 0.0;
    const VectorXcd c = cyclic_correlation<double>(delta, delta);
    CHECK(std::abs(c[0] - 1.0 / 3) < 1e-15);
    CHECK(std::abs(c[1]) < 1e-15);
    CHECK(std::abs(c[2]) < 1e-15);

    const LevelFunction f = lift(kCat, cat_roots(), parse_word(kCat, "CAT"), 0);
    const CorrelationSeries cs = cyclic_correlation(f, f);
    const auto ref = oracle::direct_correlation(to_std(f.values), to_std(f.values));
    for (Index t = 0; t < 3; ++t) CHECK(std::abs(cs.C[t] - ref[t]) < 1e-14);
    // f(j) = w^j, so C(t) = w^t
    for (Index t = 0; t < 3; ++t) CHECK(std::abs(cs.C[t] - std::pow(kOmega, static_cast<double>(t))) < 1e-14);
    CHECK(std::abs(cs.C[0] - f.values.squaredNorm() / 3.0) < 1e-15);

    LevelFunction other = f;
    other.n = 1;
    CHECK_THROWS_AS(cyclic_correlation(f, other), Error);
}

TEST_CASE("FFT correlation matches the direct sum") {
    for (Index h : {1, 2, 7, 64, 101, 243, 1000, 4096}) {
        const VectorXcd f = random_vector(h, static_cast<std::uint64_t>(h));
        const VectorXcd g = random_vector(h, static_cast<std::uint64_t>(h) + 99);
        const VectorXcd fast = cyclic_correlation<double>(f, g);
        const auto ref = oracle::direct_correlation(to_std(f), to_std(g));
        double scale = 0.0, err = 0.0;
        for (Index t = 0; t < h; ++t) {
            scale = std::max(scale, std::abs(ref[t]));
            err = std::max(err, std::abs(fast[t] - ref[t]));
            CHECK(std::abs(correlation_at(f, g, t) - ref[t]) <= 1e-12 * std::max(1.0, std::abs(ref[t])));
        }
        CHECK(err <= 1e-10 * scale);
    }
}

TEST_CASE("single precision correlation") {
    const VectorXcd f = random_vector(256, 5);
    const ComplexVector<float> ff = f.cast<std::complex<float>>();
    const ComplexVector<float> cf = cyclic_correlation<float>(ff, ff);
    const VectorXcd cd = cyclic_correlation<double>(f, f);
    CHECK((cf.cast<std::complex<double>>() - cd).cwiseAbs().maxCoeff() < 1e-4 * cd.cwiseAbs().maxCoeff());
}

TEST_CASE("autocorrelation is Hermitian and matches the power spectrum") {
    const VectorXcd f = random_vector(360, 17);
    const VectorXcd C = cyclic_correlation<double>(f, f);
    const Index h = C.size();
    for (Index t = 0; t < h; ++t) CHECK(std::abs(C[(h - t) % h] - std::conj(C[t])) < 1e-12);

    Eigen::FFT<double> fft;
    VectorXcd F, S;
    fft.fwd(F, f);
    fft.fwd(S, C);
    for (Index k = 0; k < h; ++k) CHECK(std::abs(S[k] - std::norm(F[k]) / static_cast<double>(h)) < 1e-9);
}

TEST_CASE("recursion_rhs for the CAT stage") {
    const Schedule cat = cat_schedule();
    const auto words = build_words(cat, 1);
    const LevelFunction f0 = lift(kCat, cat_roots(), words[0], 0);
    const LevelFunction f1 = lift(kCat, cat_roots(), words[1], 1);
    const CorrelationSeries c0 = cyclic_correlation(f0, f0);
    const Stage& st = cat.stages[0];

    // alpha = (0,1,2,2,0,1), s = 3: alpha_y - alpha_{y-3} = (1,1,1,2,2,2) mod 3
    const auto hand = (3.0 * c0.C[1] + 3.0 * c0.C[2]) / 6.0;
    CHECK(std::abs(recursion_rhs(c0, st, 3) - hand) < 1e-15);
    CHECK(std::abs(recursion_rhs(c0, st, 3) - correlation_at(f1.values, f1.values, 9)) < 1e-15);
    for (Index s = 1; s < 6; ++s)
        CHECK(std::abs(recursion_rhs(c0, st, s) - correlation_at(f1.values, f1.values, 3 * s)) < 1e-15);

    const Stage constant = pure_stage({2, 2, 2, 2});
    for (Index s = 1; s < 4; ++s) CHECK(recursion_rhs(c0, constant, s) == c0.C[0]);
    CHECK_THROWS_AS(recursion_rhs(c0, st, 0), Error);
    CHECK_THROWS_AS(recursion_rhs(c0, st, 6), Error);
    try {
        recursion_rhs(c0, Stage{2, {0, 0}, {1, 0}}, 1);
        FAIL("expected a mode error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Mode);
    }
}

TEST_CASE("recursion identity is exact on random pure stages") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const Index q = 40 + static_cast<Index>(seed) * 17;
        const Schedule sch = random_schedule(seed, fixed_q({q}), 1, kCat, parse_word(kCat, "CATTACATCAATC" + std::string(seed % 5, 'T')));
        const auto words = build_words(sch, 1);
        REQUIRE(words[1].height() <= 10000);
        for (bool zero_mean : {false, true}) {
            const LevelFunction f0 = lift(kCat, cat_roots(), words[0], 0, zero_mean);
            const LevelFunction f1 = lift(kCat, cat_roots(), words[1], 1, zero_mean);
            const CorrelationSeries c0 = cyclic_correlation(f0, f0);
            const Index h = words[0].height();
            for (Index s = 1; s < q; ++s)
                REQUIRE(std::abs(correlation_at(f1.values, f1.values, s * h) - recursion_rhs(c0, sch.stages[0], s)) <= 1e-12);
        }
    }
}

TEST_CASE("fit_slope") {
    CHECK(fit_slope({0.0, 1.0, 2.0}, {1.0, 0.5, 0.0}) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(fit_slope({1.0}, {1.0}), Error);
}

TEST_CASE("decay profile") {
    const Schedule morse = morse_schedule(2, 12, kBin, parse_word(kBin, "01"));
    const LabelMap pm{{"0", 1.0}, {"1", -1.0}};
    SUBCASE("constant function") {
        const DecayProfile p = decay_profile(morse, {{"0", 1.0}, {"1", 1.0}}, 4, 8);
        for (const auto& s : p.stages) {
            CHECK(s.max == 0.0);
            CHECK(s.median == 0.0);
            CHECK(s.rms == 0.0);
        }
        CHECK(p.slope_max == 0.0);
    }
    SUBCASE("Morse correlations do not decay in max") {
        const DecayProfile p = decay_profile(morse, pm, 4, 12);
        REQUIRE(p.stages.size() == 9);
        for (const auto& s : p.stages) CHECK(s.max == doctest::Approx(1.0));
        CHECK(std::abs(p.slope_max) < 1e-9);
        CHECK(p.variance_ratio.size() == 8);
        CHECK(p.predicted_ratio[0] == doctest::Approx(1.0));
    }
    SUBCASE("random schedule correlations decay") {
        // Single seeds can have exact zeros at h = 16, so test the ensemble median.
        std::vector<double> med, rms;
        for (std::uint64_t seed = 1; seed <= 7; ++seed) {
            const Schedule sch = random_schedule(seed, fixed_q({4, 256, 512}), 3, kBin,
                                                 parse_word(kBin, "0011"));
            const DecayProfile p = decay_profile(sch, pm, 1, 3);
            med.push_back(p.slope_median);
            rms.push_back(p.slope_rms);
        }
        CHECK(median_nan_high(med) < -0.2);
        CHECK(median_nan_high(rms) < -0.2);
    }
    CHECK_THROWS_AS(decay_profile(morse, pm, 4, 5), Error);
}

TEST_CASE("simplicity diagnostic") {
    const LabelMap roots = cat_roots();
    const Schedule sch = random_schedule(5, fixed_q({3, 81, 2}), 3, kCat, parse_word(kCat, "CAT"));

    SUBCASE("N = n gives g = f") {
        const SimplicityReport r = simplicity_diagnostic(sch, roots, 1, 1);
        CHECK(r.f_minus_g2 < 1e-24);
        CHECK(r.g2 == doctest::Approx(r.f2));
        CHECK(r.u2 == doctest::Approx(r.v2));
        CHECK(r.identity_residual == 0.0);
    }
    SUBCASE("one stage up") {
        const SimplicityReport r = simplicity_diagnostic(sch, roots, 1, 2);
        CHECK(r.f2 == doctest::Approx(1.0));
        CHECK(std::abs(r.u2 - r.v2) <= 1e-12 * r.u2);
        CHECK(r.identity_residual <= 1e-12);
        CHECK(r.f_minus_g2 / r.f2 > 0.3);
        CHECK(r.f_minus_g2 / r.f2 < 0.7);
    }
    SUBCASE("two stages up") {
        const SimplicityReport r = simplicity_diagnostic(sch, roots, 1, 3);
        CHECK(r.identity_residual <= 1e-12);
        CHECK(r.g2 / r.f2 > 0.85);
        CHECK(r.g2 / r.f2 < 1.15);
    }
    const Schedule even = random_schedule(5, fixed_q({2, 16}), 2, kCat, parse_word(kCat, "CAT"));
    try {
        simplicity_diagnostic(even, roots, 1, 2);
        FAIL("expected a precondition error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Precondition);
    }
}
