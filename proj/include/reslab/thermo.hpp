#pragma once

#include <utility>
#include <vector>

#include "reslab/transfer.hpp"

namespace reslab {

/// log of the spectral radius of the untwisted truncated operator at real
/// s = sigma.
double pressure(const TransferBasis& basis, double sigma);
double pressure(const SchottkyGroup& group, double sigma, int lmax = 32);

/// Root of the pressure on [0, 1] with |P(delta)| < tol, or bracketed to a
/// few ulps when eigenvalue noise keeps |P| above tol. Throws NumericalError
/// when P has no sign change there.
double critical_exponent(const TransferBasis& basis, double tol = 1e-12);
double critical_exponent(const SchottkyGroup& group, int lmax = 32, double tol = 1e-12);

struct PressureCurve {
    std::vector<std::pair<double, double>> samples;  ///< (sigma, P(sigma))
    double delta = 0.0;
};

PressureCurve pressure_curve(const SchottkyGroup& group, const std::vector<double>& sigmas,
                             int lmax = 32, double tol = 1e-12);

}  // namespace reslab
