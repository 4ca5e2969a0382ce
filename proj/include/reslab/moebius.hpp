#pragma once

#include <array>
#include <complex>
#include <optional>

namespace reslab {

using cd = std::complex<double>;

/// Real 2x2 matrix z -> (az+b)/(cz+d) with ad - bc = 1.
struct MoebiusMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static MoebiusMap identity() { return {}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    /// Rescales to unit determinant. Requires det > 0.
    MoebiusMap normalized() const;
    MoebiusMap inverse() const { return {d, -b, -c, a}; }

    /// this o other (apply other first).
    MoebiusMap compose(const MoebiusMap& other) const {
        return {a * other.a + b * other.c, a * other.b + b * other.d,
                c * other.a + d * other.c, c * other.b + d * other.d};
    }

    cd apply(cd z) const { return (a * z + b) / (c * z + d); }
    double apply(double x) const { return (a * x + b) / (c * x + d); }
    /// Uses ad - bc = 1 rather than the computed determinant, which loses
    /// every digit for long words.
    cd derivative(cd z) const {
        const cd q = c * z + d;
        return 1.0 / (q * q);
    }
    cd second_derivative(cd z) const {
        const cd q = c * z + d;
        return -2.0 * c / (q * q * q);
    }

    /// Fixed points from cz^2 + (d - a)z - b = 0, attracting one first
    /// (|derivative| < 1). Empty for non-hyperbolic maps. Assumes det 1.
    std::optional<std::array<double, 2>> fixed_points() const;

    /// Max absolute entry difference.
    double distance(const MoebiusMap& other) const;
};

/// Exact 2x2 integer matrix, used for groups with SL2(Z) generators.
struct IntMatrix {
    long long a = 1, b = 0, c = 0, d = 1;

    IntMatrix inverse() const { return {d, -b, -c, a}; }
    /// Throws reslab::NumericalError on 64-bit overflow.
    IntMatrix compose(const IntMatrix& other) const;
    long long trace() const { return a + d; }
    long long det() const { return a * d - b * c; }
    MoebiusMap to_moebius() const {
        return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c),
                static_cast<double>(d)};
    }
    bool operator==(const IntMatrix&) const = default;
};

/// Euclidean disc with real center, hence orthogonal to the real line.
struct Disc {
    double center = 0.0;
    double radius = 1.0;

    bool contains(cd z) const { return std::abs(z - center) < radius; }
};

}  // namespace reslab
