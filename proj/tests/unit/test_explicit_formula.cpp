#include <doctest.h>

#include <cmath>

#include "reslab/error.hpp"
#include "reslab/explicit_formula.hpp"

using namespace reslab;

TEST_CASE("test function shape") {
    const TestFunction f = build_test_function(0.5, 12, 1 << 12);
    const std::size_t n = f.values.size();
    CHECK(n % 2 == 1);
    CHECK(f.x[n / 2] == 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(f.values[i] >= 0.0);
        CHECK(f.values[i] == doctest::Approx(f.values[n - 1 - i]).epsilon(1e-12).scale(1.0));
        if (std::abs(f.x[i]) > f.support + f.h) CHECK(f.values[i] == 0.0);
    }
    CHECK(f.support <= f.width_sum + f.h);
    CHECK(f.width_sum < 1.0);
    CHECK(f.deficit == doctest::Approx(1.0 - f.width_sum));
    CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f(2.0) == 0.0);
    CHECK(f(0.0) == doctest::Approx(f.values[n / 2]));
}

TEST_CASE("widths follow the stated formula") {
    const double eps = 0.5;
    const TestFunction f = build_test_function(eps, 6, 1 << 12);
    const WidthSeries ws = width_series(eps);
    CHECK(f.C * ws.value == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(f.mu.size() == 6);
    for (int j = 1; j <= 6; ++j) {
        CHECK(f.mu[j - 1] == doctest::Approx(f.C / (j * std::pow(std::log(1.0 + j), 1 + eps))).epsilon(1e-12));
    }
}

TEST_CASE("width series lies inside an integral bracket") {
    // With u = log(1 + x), the tail integral of 1 / (x log(1+x)^(1+eps)) over
    // [a, inf) lies between log(1+a)^-eps / eps and (1 + 1/a) times that.
    for (double eps : {0.5, 1.0, 2.0}) {
        const long N = 2000000;
        double partial = 0.0;
        for (long j = N; j >= 1; --j) partial += 1.0 / (j * std::pow(std::log1p(double(j)), 1 + eps));
        const double lo = partial + std::pow(std::log(N + 2.0), -eps) / eps;
        const double hi = partial + (1.0 + 1.0 / N) * std::pow(std::log(N + 1.0), -eps) / eps;
        const WidthSeries ws = width_series(eps);
        CAPTURE(eps);
        CHECK(ws.value >= lo - ws.error - 1e-12);
        CHECK(ws.value <= hi + ws.error + 1e-12);
        CHECK(ws.error < 1e-6);
    }
}

TEST_CASE("product transform matches direct summation") {
    const TestFunction f = build_test_function(0.5, 8, 1 << 11);
    for (double xi : {0.0, 1.0, 7.3, 40.0, 123.4}) {
        CAPTURE(xi);
        CHECK(f.log_abs_transform(xi) == doctest::Approx(std::log(std::abs(f.transform_direct(xi)))).epsilon(1e-8));
    }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(build_test_function(0.0, 4), ValidationError);
    CHECK_THROWS_AS(build_test_function(0.5, 0), ValidationError);
    CHECK_THROWS_AS(build_test_function(0.5, 4, 8), ValidationError);
}

TEST_CASE("envelope fit separates one box from many") {
    const TestFunction many = build_test_function(0.5, 12, 1 << 14);
    const EnvelopeReport r = fourier_envelope_check(many, 10.0, 1e3, 0.5, 60, 16);
    CHECK(r.C2 > 0.0);
    CHECK(r.holds);
    const TestFunction one = build_test_function(0.5, 1, 1 << 14);
    CHECK_FALSE(fourier_envelope_check(one, 10.0, 1e3, 0.5, 60, 16).holds);
}

TEST_CASE("trivial character gives a negative real geodesic sum") {
    const SchottkyGroup g = preset_symmetric3();
    const GeodesicTable tab = primitive_geodesics(g, 6.0);
    const auto phi = [](double x) { return std::abs(x) < 1 ? 1 - std::abs(x) : 0.0; };
    const cd s = geodesic_sum(tab, [](std::size_t, int) { return cd(1.0, 0.0); }, 6.0, phi);
    CHECK(s.real() < 0.0);
    CHECK(std::abs(s.imag()) == 0.0);
    const cd z = geodesic_sum(tab, std::vector<double>{0.0, 0.0}, 6.0, phi);
    CHECK(std::abs(z - s) < 1e-12 * std::abs(s));
    // Conjugate characters give conjugate sums.
    const cd a = geodesic_sum(tab, std::vector<double>{0.2, 0.1}, 6.0, phi);
    const cd b = geodesic_sum(tab, std::vector<double>{-0.2, -0.1}, 6.0, phi);
    CHECK(std::abs(a - std::conj(b)) < 1e-12 * std::abs(s));
    CHECK_THROWS_AS(geodesic_sum(tab, std::vector<double>{0.0, 0.0}, 12.0, phi), ValidationError);
}
