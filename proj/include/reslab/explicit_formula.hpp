#pragma once

#include <functional>
#include <vector>

#include "reslab/schottky.hpp"

namespace reslab {

/// Nonnegative even bump on [-1, 1]: the convolution of J normalized boxes
/// of half-widths mu_j = C / (j log(1+j)^(1+eps)), with C set so that the
/// infinite series of widths sums to 1.
struct TestFunction {
    double epsilon = 0.5;
    int J = 0;
    double C = 0.0;                 ///< normalizing constant of the widths
    std::vector<double> mu;         ///< mu_1..mu_J
    std::vector<int> half_points;   ///< box j covers 2 q_j + 1 grid points
    double width_sum = 0.0;         ///< sum_{j<=J} mu_j
    double deficit = 0.0;           ///< 1 - width_sum, the dropped tail
    double support = 0.0;           ///< largest |x| with phi0(x) > 0
    double h = 0.0;                 ///< grid step
    std::vector<double> x, values;  ///< samples on [-1, 1]
    bool coarse = false;            ///< some box spans fewer than 5 points

    /// Linear interpolation; 0 outside [-1, 1].
    double operator()(double t) const;
    /// Trapezoid integral of the samples.
    double mass() const;
    /// Exact transform of the sampled function, sum_i h phi0(x_i) e^{-i x_i xi},
    /// as a product of discrete box transforms. Returns log |.| so values far
    /// below the double range stay usable; -inf at exact zeros.
    double log_abs_transform(double xi) const;
    /// Same quantity by direct summation over the grid.
    double transform_direct(double xi) const;
};

/// Requires J >= 1, eps > 0, grid_size >= 16. The grid has an odd number of
/// points (grid_size rounded down to odd) so 0 is a node.
TestFunction build_test_function(double epsilon, int J, int grid_size = 1 << 16);

/// Sum over j >= 1 of 1 / (j log(1+j)^(1+eps)), with a rigorous error bound.
struct WidthSeries {
    double value = 0.0;
    double error = 0.0;
};
WidthSeries width_series(double epsilon);

struct EnvelopeReport {
    double alpha = 0.5;
    double xi_min = 10.0, xi_max = 1e4;
    std::vector<double> xi;         ///< window starts
    std::vector<double> log_env;    ///< log of the max |transform| per window
    double C2 = 0.0;                ///< fitted sub-exponential rate
    double logC1 = 0.0;             ///< intercept covering every window
    double rms_subexp = 0.0;        ///< residual of the sub-exponential model
    double rms_power = 0.0;         ///< residual of a pure power-law model
    double power_exponent = 0.0;
    double order_low = 0.0;         ///< local power-law order on the first decade
    double order_high = 0.0;        ///< local power-law order on the last decade
    /// C2 > 0 and the local order at least doubles across the range, as it
    /// must for faster-than-polynomial decay. A single box keeps order 1.
    bool holds = false;
};

/// Fits log env(xi) = log C1 - C2 xi / log(xi)^(1+alpha) over log-spaced
/// windows in [xi_min, xi_max], and compares with log env = a - b log xi.
/// A truncated product decays like xi^-J far out, so this is a statement
/// about the window, not the asymptotics.
EnvelopeReport fourier_envelope_check(const TestFunction& phi0, double xi_min = 10.0, double xi_max = 1e4,
                                      double alpha = 0.5, int windows = 240, int samples_per_window = 48);

/// chi(C^k) for primitive class index i and power k.
using ClassCharacter = std::function<cd(std::size_t, int)>;

/// sum_{C,k} chi(C^k) l(C) / (1 - e^{k l(C)}) phi0(k l(C) / T) over a table
/// that is complete to length T. The weights are negative, so the trivial
/// character gives a negative real sum. Throws ValidationError when the
/// table is incomplete, naming the depth reached.
cd geodesic_sum(const GeodesicTable& table, const ClassCharacter& chi, double T,
                const std::function<double(double)>& phi0);
/// Abelian character theta: chi(C^k) = exp(2 pi i k <theta, homology(C)>).
cd geodesic_sum(const GeodesicTable& table, const std::vector<double>& theta, double T,
                const std::function<double(double)>& phi0);

}  // namespace reslab
