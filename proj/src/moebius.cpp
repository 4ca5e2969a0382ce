#include "reslab/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reslab/error.hpp"

namespace reslab {

MoebiusMap MoebiusMap::normalized() const {
    const double dt = det();
    if (!(dt > 0.0)) throw ValidationError("schottky", "Moebius map with non-positive determinant");
    const double k = 1.0 / std::sqrt(dt);
    return {a * k, b * k, c * k, d * k};
}

std::optional<std::array<double, 2>> MoebiusMap::fixed_points() const {
    const MoebiusMap& g = *this;
    const double tr = g.trace();
    if (std::abs(tr) <= 2.0) return std::nullopt;
    std::array<double, 2> roots{};
    if (g.c == 0.0) {
        // Affine map z -> (a z + b)/d: fixed points b/(d-a) and infinity.
        const double finite = g.b / (g.d - g.a);
        const double inf = std::numeric_limits<double>::infinity();
        // derivative a/d at the finite point
        if (std::abs(g.a / g.d) < 1.0) roots = {finite, inf};
        else roots = {inf, finite};
        return roots;
    }
    // c z^2 + (d - a) z - b = 0, computed without cancellation.
    const double B = g.d - g.a;
    const double disc = B * B + 4.0 * g.c * g.b;  // = tr^2 - 4 for det 1
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double q = -0.5 * (B + std::copysign(sq, B));
    double z1 = q / g.c;
    double z2 = (q != 0.0) ? -g.b / q : -B / g.c - z1;
    const auto dabs = [&](double x) { return std::abs(1.0 / ((g.c * x + g.d) * (g.c * x + g.d))); };
    if (dabs(z1) > dabs(z2)) std::swap(z1, z2);
    roots = {z1, z2};
    return roots;
}

double MoebiusMap::distance(const MoebiusMap& o) const {
    return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
}

namespace {
long long checked_mul(long long x, long long y) {
    long long r;
    if (__builtin_mul_overflow(x, y, &r)) throw NumericalError("schottky", "integer matrix product overflows 64 bits");
    return r;
}
long long checked_add(long long x, long long y) {
    long long r;
    if (__builtin_add_overflow(x, y, &r)) throw NumericalError("schottky", "integer matrix product overflows 64 bits");
    return r;
}
}  // namespace

IntMatrix IntMatrix::compose(const IntMatrix& o) const {
    return {checked_add(checked_mul(a, o.a), checked_mul(b, o.c)),
            checked_add(checked_mul(a, o.b), checked_mul(b, o.d)),
            checked_add(checked_mul(c, o.a), checked_mul(d, o.c)),
            checked_add(checked_mul(c, o.b), checked_mul(d, o.d))};
}

}  // namespace reslab
