#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "reslab/congruence.hpp"
#include "reslab/error.hpp"

using namespace reslab;

namespace {

std::int64_t count_squares_plus_zero(std::int64_t x, std::int64_t p) {
    std::int64_t n = 0;
    for (std::int64_t y = 0; y < p; ++y) n += mod_p(y * y - x, p) == 0;
    return n;
}

}  // namespace

TEST_CASE("primality and Legendre symbol") {
    CHECK(is_prime(101));
    CHECK_FALSE(is_prime(91));
    CHECK_FALSE(is_prime(1));
    for (std::int64_t p : {5, 7, 11, 13, 101}) {
        for (std::int64_t x = 0; x < p; ++x) {
            CAPTURE(p);
            CAPTURE(x);
            // Number of square roots is 1 + legendre.
            CHECK(count_squares_plus_zero(x, p) == 1 + legendre(x, p));
        }
    }
}

TEST_CASE("matrix arithmetic mod p") {
    const FpMatrix g{2, 3, 1, 2, 7};
    CHECK(g.det() == 1);
    CHECK(g * g.inverse() == FpMatrix::identity(7));
    FpMatrix acc = FpMatrix::identity(7);
    for (int i = 0; i < 13; ++i) acc = acc * g;
    CHECK(g.pow(13) == acc);
    CHECK(reduce_mod_p(IntMatrix{2, 1, 1, 1}, 5) == FpMatrix{2, 1, 1, 1, 5});
    CHECK_THROWS_AS(reduce_mod_p(IntMatrix{2, 1, 1, 1}, 9), ValidationError);
}

TEST_CASE("class equation and brute-force orbits agree") {
    for (std::int64_t p : {5, 7, 11, 13}) {
        CAPTURE(p);
        const ClassStatistics st = class_statistics(p);
        CHECK(st.verified);
        CHECK(st.mismatches == 0);
        CHECK(st.group_order == p * (p * p - 1));
        CHECK(st.classes.size() == static_cast<std::size_t>(p + 4));
        std::int64_t total = 0;
        for (const auto& c : st.classes) {
            total += c.size;
            CHECK(c.size * c.centralizer == st.group_order);
        }
        CHECK(total == st.group_order);
        CHECK(brute_force_classes(p).size() == static_cast<std::size_t>(p + 4));
    }
}

TEST_CASE("labels separate exactly the brute-force classes") {
    const std::int64_t p = 7;
    const auto elems = sl2_elements(p);
    std::map<std::int64_t, FpMatrix> by_code;
    for (const auto& g : elems) by_code[g.code()] = g;
    std::set<ConjClassLabel> seen;
    for (const auto& cls : brute_force_classes(p)) {
        const ConjClassLabel first = classify(by_code.at(cls.front()));
        for (std::int64_t c : cls) CHECK(classify(by_code.at(c)) == first);
        CHECK(seen.insert(first).second);
        CHECK(class_size(first, p) == static_cast<std::int64_t>(cls.size()));
    }
}

TEST_CASE("trace counts over SL2(F_p)") {
    for (std::int64_t p : {5, 7, 11}) {
        std::map<std::int64_t, std::int64_t> count;
        for (const auto& g : sl2_elements(p)) ++count[g.trace()];
        for (std::int64_t t = 0; t < p; ++t) {
            const int chi = legendre(t * t - 4, p);
            const std::int64_t expect = chi == 0 ? p * p : chi == 1 ? p * (p + 1) : p * (p - 1);
            CAPTURE(p);
            CAPTURE(t);
            CHECK(count[t] == expect);
        }
    }
}

TEST_CASE("conj1 report against brute-force conjugacy") {
    const SchottkyGroup g = preset_sl2z_torus();
    const std::int64_t p = 7;
    const Conj1Report rep = conj1_check(g, p, 1.9);
    const GeodesicTable tab = primitive_geodesics(g, rep.T);
    const auto powers = class_powers(g, tab.classes, rep.T);
    REQUIRE(powers.size() == rep.classes);
    std::vector<FpMatrix> red;
    for (const auto& cp : powers) red.push_back(reduce_mod_p(g, tab.classes[cp.primitive], p).pow(cp.k));
    std::int64_t violations = 0, pairs = 0;
    for (std::size_t i = 0; i < red.size(); ++i) {
        for (std::size_t j = i + 1; j < red.size(); ++j) {
            ++pairs;
            const bool same = powers[i].trace == powers[j].trace;
            violations += same != conjugate_brute_force(red[i], red[j]);
        }
    }
    CHECK(rep.pairs_checked == pairs);
    CHECK(rep.violation_count == violations);
    CHECK_THROWS_AS(conj1_check(g, p, 2.5), ValidationError);
}

TEST_CASE("trace multiplicities add up") {
    const SchottkyGroup g = preset_sl2z_torus();
    const TraceTable tt = trace_multiplicities(g, 6.0);
    std::int64_t classes = 0, sq = 0;
    for (const auto& [t, m] : tt.m) {
        CHECK(std::abs(t) > 2);
        // 2 cosh(l/2) = |trace| with l <= T.
        CHECK(2 * std::acosh(std::abs(t) / 2.0) <= 6.0 + 1e-12);
        classes += m;
        sq += m * m;
    }
    CHECK(classes == tt.class_count);
    CHECK(tt.sum_m == tt.class_count);
    CHECK(sq == tt.sum_m2);
    CHECK(tt.complete);
}

TEST_CASE("growth fit recovers a planted exponent") {
    std::vector<double> T, S;
    for (double t = 4; t <= 10; t += 0.25) {
        T.push_back(t);
        S.push_back(3.0 * std::exp(0.7 * t) / (t * t));
    }
    CHECK(fit_growth_exponent(T, S, 2.0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit_growth_exponent(T, S, 0.0) < 0.7);
}

TEST_CASE("Dirac form matches the character sum on an abelian group") {
    // For Z/5 every centralizer is the whole group and the irreducibles are
    // the 5 additive characters.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<int> ids;
    std::vector<double> w;
    for (int i = 0; i < 40; ++i) {
        ids.push_back(static_cast<int>(rng() % 5));
        w.push_back(U(rng));
    }
    double direct = 0.0;
    for (int a = 0; a < 5; ++a) {
        std::complex<double> z = 0.0;
        for (std::size_t i = 0; i < ids.size(); ++i) z += w[i] * std::polar(1.0, 2 * std::numbers::pi * a * ids[i] / 5);
        direct += std::norm(z);
    }
    CHECK(dirac_sum(ids, w, std::vector<double>(5, 5.0)) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("weights are negative") {
    for (double l : {0.1, 1.0, 5.0}) {
        for (int k : {1, 2, 3}) CHECK(geodesic_weight(l, k) < 0.0);
    }
}

TEST_CASE("character average sits above its lower bound") {
    const SchottkyGroup g = preset_sl2z_torus();
    const auto bump = [](double x) { return std::abs(x) < 1 ? std::exp(-1.0 / (1 - x * x)) : 0.0; };
    // Traces stay below p - 2, so equal traces are conjugate mod p.
    const CharacterAverage ca = character_average(g, 101, 5.0, bump, 0.1);
    CHECK(ca.terms > 0);
    CHECK(ca.S > 0.0);
    CHECK(ca.paired_count >= ca.sum_m2);
    CHECK_THROWS_AS(character_average(g, 12, 5.0, bump), ValidationError);
}
