#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "reslab/error.hpp"
#include "reslab/schottky.hpp"

using namespace reslab;

namespace {

// Cyclically reduced words of length n in a free group of rank m.
long long cyclically_reduced_count(int m, int n) {
    long long p = 1;
    for (int i = 0; i < n; ++i) p *= 2 * m - 1;
    return p + 1 + (m - 1) * (n % 2 == 0 ? 2 : 0);
}

int mobius(int n) {
    int r = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            r = -r;
        }
    }
    return n > 1 ? -r : r;
}

// Primitive conjugacy classes of cyclic length exactly n by Moebius inversion.
long long primitive_count(int m, int n) {
    long long s = 0;
    for (int d = 1; d <= n; ++d) {
        if (n % d == 0) s += mobius(n / d) * cyclically_reduced_count(m, d);
    }
    return s / n;
}

}  // namespace

TEST_CASE("presets pass validation") {
    for (const char* name : {"cylinder", "cylinder(5)", "symmetric3", "symmetric3(0.3)", "sl2z-pair", "sl2z-torus"}) {
        CAPTURE(name);
        const SchottkyGroup g = preset_by_name(name);
        const ValidationReport rep = validate(g);
        CHECK(rep.ok());
        CHECK(rep.min_gap > 0.0);
        CHECK(rep.max_boundary_residual < 1e-10);
    }
}

TEST_CASE("preset parser rejects bad input") {
    CHECK_THROWS_AS(preset_by_name("nonesuch"), ValidationError);
    CHECK_THROWS_AS(preset_by_name("cylinder(1.5)"), ValidationError);
    CHECK_THROWS_AS(preset_by_name("cylinder(abc)"), ValidationError);
}

TEST_CASE("generators pair the discs") {
    for (const char* name : {"cylinder", "symmetric3", "sl2z-pair", "sl2z-torus"}) {
        CAPTURE(name);
        const SchottkyGroup g = preset_by_name(name);
        for (int i = 0; i < g.m(); ++i) {
            // gamma_i maps the boundary of D_i onto the boundary of D_{m+i}.
            const Disc& from = g.disc(i);
            const Disc& to = g.disc(i + g.m());
            for (double t : {0.3, 1.1, 2.0, 2.9}) {
                const cd z = from.center + from.radius * std::polar(1.0, t);
                const cd w = g.generator(i).apply(z);
                CHECK(std::abs(std::abs(w - to.center) - to.radius) < 1e-9 * (1 + to.radius));
            }
        }
    }
}

TEST_CASE("letter inverses compose to the identity") {
    const SchottkyGroup g = preset_symmetric3();
    for (int k = 0; k < g.letter_count(); ++k) {
        const MoebiusMap id = g.letter_map(k).compose(g.letter_map(g.inverse_letter(k)));
        CHECK(id.normalized().distance(MoebiusMap::identity()) < 1e-12);
    }
}

TEST_CASE("integer word matrices match the floating maps") {
    const SchottkyGroup g = preset_sl2z_pair();
    REQUIRE(g.has_integer_generators());
    for (const Word& w : enumerate_words(g, 4)) {
        const IntMatrix M = word_integer_matrix(g, w);
        CHECK(M.det() == 1);
        const MoebiusMap f = word_map(g, w);
        const double sign = (M.a * f.a >= 0) ? 1.0 : -1.0;
        CHECK(std::abs(sign * f.a - M.a) < 1e-6 * (1 + std::abs(M.a)));
        CHECK(std::abs(sign * f.d - M.d) < 1e-6 * (1 + std::abs(M.d)));
    }
}

TEST_CASE("word enumeration counts reduced words") {
    const SchottkyGroup g = preset_symmetric3();
    // 2m (2m-1)^(n-1) reduced words of length n.
    CHECK(enumerate_words(g, 1).size() == 4);
    CHECK(enumerate_words(g, 3).size() == 4 * 9);
    CHECK(enumerate_words(g, 5).size() == 4 * 81);
    for (const Word& w : enumerate_words(g, 3)) CHECK(is_admissible(g, w));
    CHECK_FALSE(is_admissible(g, Word{0, 2}));
    CHECK_THROWS_AS(word_map(g, Word{0, 2}), ValidationError);
}

TEST_CASE("Lyndon words") {
    CHECK(is_lyndon(Word{0}));
    CHECK(is_lyndon(Word{0, 1}));
    CHECK_FALSE(is_lyndon(Word{1, 0}));
    CHECK_FALSE(is_lyndon(Word{0, 1, 0, 1}));
    CHECK(is_lyndon(Word{0, 0, 1}));
    CHECK(format_word(Word{0, 3}) == "1 4");
}

TEST_CASE("primitive class counts follow the free group formula") {
    for (const char* name : {"symmetric3", "sl2z-pair"}) {
        const SchottkyGroup g = preset_by_name(name);
        const auto classes = primitive_classes_to_depth(g, 7);
        std::map<int, long long> by_len;
        for (const auto& c : classes) ++by_len[static_cast<int>(c.word.size())];
        for (int n = 1; n <= 7; ++n) {
            CAPTURE(n);
            CHECK(by_len[n] == primitive_count(2, n));
        }
    }
    const SchottkyGroup cyl = preset_cylinder();
    CHECK(primitive_classes_to_depth(cyl, 6).size() == 2);
}

TEST_CASE("geodesic length agrees with the fixed-point derivative") {
    const SchottkyGroup g = preset_symmetric3();
    for (const auto& c : primitive_classes_to_depth(g, 5)) {
        // At the attracting fixed point the derivative is e^{-l}.
        CHECK(std::abs(-std::log(c.fixed_point_derivative) - c.length) < 1e-9 * c.length);
        const MoebiusMap M = word_map(g, c.word);
        CHECK(std::abs(M.apply(c.fixed_point) - c.fixed_point) < 1e-9 * (1 + std::abs(c.fixed_point)));
        CHECK(std::abs(2 * std::acosh(std::abs(M.trace()) / 2) - c.length) < 1e-10 * c.length);
    }
}

TEST_CASE("homology is additive and inverse-odd") {
    const SchottkyGroup g = preset_symmetric3();
    const Word a{0, 1, 1, 2};
    CHECK(homology(g, a) == std::vector<int>{0, 2});
    CHECK(homology(g, Word{0, 0, 1}) == std::vector<int>{2, 1});
    CHECK(homology(g, Word{2, 3}) == std::vector<int>{-1, -1});
}

TEST_CASE("cylinder geodesic matches the trace") {
    const SchottkyGroup g = preset_cylinder(3.0);
    const auto t = primitive_geodesics(g, 5.0);
    REQUIRE(t.classes.size() == 2);
    CHECK(std::abs(t.classes[0].length - 2 * std::acosh(1.5)) < 1e-12);
}

TEST_CASE("geodesic table is sorted and complete") {
    const SchottkyGroup g = preset_sl2z_pair();
    const GeodesicTable t = primitive_geodesics(g, 8.0);
    CHECK(t.complete);
    std::set<Word> seen;
    for (std::size_t i = 0; i < t.classes.size(); ++i) {
        CHECK(t.classes[i].length <= 8.0);
        CHECK(is_lyndon(t.classes[i].word));
        CHECK(seen.insert(t.classes[i].word).second);
        if (i) CHECK(t.classes[i - 1].length <= t.classes[i].length + 1e-12);
    }
    // Every class of length <= 8 in the depth-limited list appears.
    std::size_t short_ones = 0;
    for (const auto& c : primitive_classes_to_depth(g, t.depth_reached)) short_ones += c.length <= 8.0 ? 1 : 0;
    CHECK(short_ones == t.classes.size());
}

TEST_CASE("Dirichlet construction gives a valid group") {
    const SchottkyGroup g = dirichlet_group({{-2, -13, 1, 6}, {2, -13, 1, -6}}, "dirichlet");
    CHECK(validate(g).ok());
    CHECK(g.has_integer_generators());
}
