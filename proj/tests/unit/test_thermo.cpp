#include <doctest.h>

#include <cmath>

#include "reslab/error.hpp"
#include "reslab/thermo.hpp"

using namespace reslab;

namespace {

// Pressure from periodic orbits: the Lefschetz sums of closed words grow
// like e^{nP}, so the log ratio of consecutive sums tends to P.
double periodic_orbit_pressure(const SchottkyGroup& g, double sigma, int n) {
    const auto sum = [&](int len) {
        double s = 0.0;
        for_each_word(g, len, std::nullopt, [&](const Word& w) {
            if (w.front() == g.inverse_letter(w.back())) return;
            const MoebiusMap M = word_map(g, w);
            const auto fp = M.fixed_points();
            const double der = M.derivative(cd((*fp)[0], 0.0)).real();
            s += std::pow(der, sigma) / (1.0 - der);
        });
        return s;
    };
    return std::log(sum(n + 1) / sum(n));
}

}  // namespace

TEST_CASE("cylinder has delta zero") {
    CHECK(critical_exponent(preset_cylinder(3.0), 24) == 0.0);
}

TEST_CASE("pressure vanishes at delta and decreases") {
    for (const char* name : {"symmetric3", "sl2z-pair"}) {
        CAPTURE(name);
        const SchottkyGroup g = preset_by_name(name);
        const TransferBasis basis(g, 32);
        const double d = critical_exponent(basis);
        CHECK(d > 0.0);
        CHECK(d < 1.0);
        CHECK(std::abs(pressure(basis, d)) < 1e-10);
        double prev = pressure(basis, 0.0);
        CHECK(prev > 0.0);  // log of the number of generators' worth of growth
        for (double s = 0.1; s <= 1.0; s += 0.1) {
            const double p = pressure(basis, s);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("pressure matches the periodic-orbit growth rate") {
    const SchottkyGroup g = preset_symmetric3();
    const TransferBasis basis(g, 32);
    for (double s : {0.2, 0.5, 1.0}) {
        CAPTURE(s);
        CHECK(std::abs(pressure(basis, s) - periodic_orbit_pressure(g, s, 11)) < 2e-3);
    }
}

TEST_CASE("pressure at zero is log 3 for two free generators") {
    // Topological entropy of the subshift on 4 letters without backtracking.
    const SchottkyGroup g = preset_symmetric3();
    CHECK(std::abs(pressure(g, 0.0, 32) - std::log(3.0)) < 1e-10);
}

TEST_CASE("delta does not depend on the choice of Schottky discs") {
    // Same generators, two fundamental domains: isometric circles and a
    // Dirichlet domain. The limit set, hence delta, is the same.
    const SchottkyGroup iso = preset_sl2z_pair();
    const SchottkyGroup dir = dirichlet_group({{-2, -13, 1, 6}, {2, -13, 1, -6}}, "dirichlet");
    const double d1 = critical_exponent(iso, 40);
    const double d2 = critical_exponent(dir, 40);
    CHECK(std::abs(d1 - d2) < 1e-9);
}

TEST_CASE("delta converges in lmax") {
    const SchottkyGroup g = preset_symmetric3();
    CHECK(std::abs(critical_exponent(g, 24) - critical_exponent(g, 40)) < 1e-10);
}

TEST_CASE("pressure curve carries delta") {
    const SchottkyGroup g = preset_symmetric3();
    const PressureCurve pc = pressure_curve(g, {0.0, 0.5, 1.0}, 24);
    REQUIRE(pc.samples.size() == 3);
    CHECK(pc.samples[0].second > 0.0);
    CHECK(pc.samples[2].second < 0.0);
    CHECK(std::abs(pc.delta - critical_exponent(g, 24)) < 1e-12);
}

TEST_CASE("bad tolerance is rejected") {
    CHECK_THROWS_AS(critical_exponent(preset_symmetric3(), 16, -1.0), ValidationError);
}
