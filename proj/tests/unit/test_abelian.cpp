#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reslab/abelian.hpp"
#include "reslab/error.hpp"
#include "reslab/thermo.hpp"

using namespace reslab;

namespace {

std::shared_ptr<const TransferBasis> basis_of(const SchottkyGroup& g, int lmax) {
    return std::make_shared<const TransferBasis>(g, lmax);
}

}  // namespace

TEST_CASE("quotient indexing and theta shift") {
    const AbelianQuotient q({4, 3});
    CHECK(q.order() == 12);
    CHECK(q.alpha(0) == std::vector<int>{0, 0});
    CHECK(q.alpha(1) == std::vector<int>{1, 0});
    CHECK(q.alpha(5) == std::vector<int>{1, 1});
    CHECK(q.alpha(11) == std::vector<int>{3, 2});
    const auto t = q.theta({3, 1});
    CHECK(t[0] == doctest::Approx(-0.25));
    CHECK(t[1] == doctest::Approx(1.0 / 3.0));
    CHECK(q.theta({2, 0})[0] == doctest::Approx(0.5));
    CHECK(q.lattice_distance({3, 1}) == doctest::Approx(1.0 / 3.0));
    CHECK(q.lattice_distance({0, 0}) == 0.0);
    CHECK_THROWS_AS(AbelianQuotient({0, 2}), ValidationError);
}

TEST_CASE("character values from homology") {
    const AbelianQuotient q({4, 3});
    const cd expect = std::exp(cd(0, 2 * std::numbers::pi * (1.0 * 3 / 4 + 2.0 * -1 / 3)));
    CHECK(std::abs(character_of(q, {1, 2}, std::vector<int>{3, -1}) - expect) < 1e-14);
    CHECK(character_of(q, {2, 0}, std::vector<int>{2, 7}) == cd(1.0, 0.0));
    CHECK(std::abs(character_of(q, {1, 0}, std::vector<int>{1000000001, 0}) - cd(0, 1)) < 1e-14);
}

TEST_CASE("trivial quotient gives the plain zero set") {
    const SchottkyGroup g = preset_cylinder(3.0);
    const auto b = basis_of(g, 40);
    const Rect r{-0.5, 0.5, 0.0, 7.0};
    const CoverZeros cz = cover_zeta_zeros(b, AbelianQuotient({1}), r);
    const ResonanceSet plain = resonances(determinant_function(b, TwistSpec::trivial()), r);
    CHECK(cz.total_multiplicity == plain.total_multiplicity());
    REQUIRE(cz.zeros.size() == plain.zeros.size());
    for (std::size_t i = 0; i < cz.zeros.size(); ++i) CHECK(std::abs(cz.zeros[i].s - plain.zeros[i].s) < 1e-9);
}

TEST_CASE("cylinder cover of degree 3 is the cylinder of triple length") {
    // Z/3 cover of the cylinder with core length l is the cylinder with core
    // length 3 l, whose zeros are 2 pi i n / (3 l) with multiplicity 2.
    const SchottkyGroup g = preset_cylinder(3.0);
    const double L = 3 * 2 * std::acosh(1.5);
    const CoverZeros cz = cover_zeta_zeros(basis_of(g, 40), AbelianQuotient({3}), {-0.5, 0.5, 0.5, 3.5});
    CHECK(cz.total_multiplicity == 6);
    for (int n = 1; n <= 3; ++n) {
        const cd expect(0.0, 2 * std::numbers::pi * n / L);
        int mult = 0;
        for (const auto& z : cz.zeros) {
            if (std::abs(z.s - expect) < 1e-6) mult += z.multiplicity;
        }
        CAPTURE(n);
        CHECK(mult == 2);
    }
}

TEST_CASE("regular twist factors into characters") {
    const SchottkyGroup g = preset_symmetric3();
    const auto b = basis_of(g, 12);
    const double d = critical_exponent(*b);
    const FactorizationReport fr =
        factorization_check(b, AbelianQuotient({2, 1}), {-0.5, 1.0, -3.0, 3.0}, {d - 0.1, d + 0.02, -0.05, 0.05}, 4);
    CHECK(fr.order == 2);
    CHECK(fr.points.size() == 4);
    CHECK(fr.max_relative < 1e-10);
    CHECK(fr.regular_zeros == fr.character_zeros);
    CHECK(fr.regular_zeros >= 1);
    CHECK(fr.zero_match < 1e-8);
}

TEST_CASE("nonvanishing scan on a small grid") {
    const SchottkyGroup g = preset_symmetric3();
    const auto b = basis_of(g, 16);
    const double d = critical_exponent(*b);
    const NonvanishingScan ns = nonvanishing_scan(b, d, 8, 0.05);
    CHECK(ns.modulus.size() == 64);
    CHECK(ns.residual_at_zero < 1e-10);
    CHECK(ns.symmetry_error < 1e-10);
    CHECK(ns.min_modulus > 1e-3);
    CHECK(ns.modulus[0] == doctest::Approx(ns.residual_at_zero));
}

TEST_CASE("implicit curve near theta = 0") {
    const SchottkyGroup g = preset_symmetric3();
    const auto b = basis_of(g, 16);
    const double d = critical_exponent(*b);
    CurveOptions o;
    o.grid = 5;
    const ImplicitCurve c = implicit_curve(b, d, 0.05, o);
    CHECK(c.samples.size() == 25);
    CHECK(c.max_imag < 1e-10);
    CHECK(c.max_excess <= 1e-12);
    CHECK(c.symmetry_error < 1e-10);
    CHECK(c.phi0_error < 1e-10);
    CHECK(c.negative_definite);
    CHECK(c.Q_positive_definite);
    // Hessian of phi is -2 Q.
    for (int i = 0; i < 4; ++i) CHECK(c.hessian[i] == doctest::Approx(-2 * c.Q[i]).epsilon(0.05).scale(1.0));
}

TEST_CASE("continuation stays on the real axis") {
    const SchottkyGroup g = preset_sl2z_pair();
    const auto b = basis_of(g, 16);
    const double d = critical_exponent(*b);
    const auto path = continue_zero(b, d, {0.05, 0.0}, 5);
    REQUIRE(path.size() == 5);
    CHECK(path.back().theta[0] == doctest::Approx(0.05));
    double prev = d;
    for (const auto& p : path) {
        CHECK(std::abs(p.phi.imag()) < 1e-10);
        CHECK(p.phi.real() < prev);
        prev = p.phi.real();
    }
}

TEST_CASE("Kolmogorov distance against sorted references") {
    std::vector<double> ref(10001);
    for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = i / 10000.0;
    CHECK(kolmogorov_distance({0.5}, ref) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(kolmogorov_distance({2.0, 3.0}, ref) == doctest::Approx(1.0));
    std::vector<double> grid;
    for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
    CHECK(kolmogorov_distance(grid, ref) < 0.006);
}
