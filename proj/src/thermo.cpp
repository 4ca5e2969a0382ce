#include "reslab/thermo.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "thermo";
}

double pressure(const TransferBasis& basis, double sigma) {
    if (basis.lmax() < 4) throw ValidationError(kModule, "pressure needs lmax >= 4");
    const TransferMatrix M = assemble(basis, cd(sigma, 0.0), TwistSpec::trivial());
    double rho = 0.0;
    try {
        rho = spectral_radius(M);
    } catch (const NumericalError&) {
        throw NumericalError(kModule, "eigensolver failed at sigma = " + std::to_string(sigma));
    }
    return std::log(rho);
}

double pressure(const SchottkyGroup& group, double sigma, int lmax) {
    return pressure(TransferBasis(group, lmax), sigma);
}

double critical_exponent(const TransferBasis& basis, double tol) {
    if (!(tol > 0.0)) throw ValidationError(kModule, "tolerance must be positive");
    const double p0 = pressure(basis, 0.0);
    if (std::abs(p0) < tol) return 0.0;  // elementary group
    const double p1 = pressure(basis, 1.0);
    if (!(p0 > 0.0 && p1 < 0.0)) {
        std::ostringstream msg;
        msg << "pressure has no sign change on [0, 1]: P(0) = " << p0 << ", P(1) = " << p1;
        throw NumericalError(kModule, msg.str());
    }
    // TOMS 748 bracketing; stop on the residual rather than the bracket.
    std::uintmax_t iters = 200;
    double best = 0.5, best_res = std::numeric_limits<double>::infinity();
    auto f = [&](double x) {
        const double v = pressure(basis, x);
        if (std::abs(v) < best_res) {
            best_res = std::abs(v);
            best = x;
        }
        return v;
    };
    bool collapsed = false;
    auto stop = [&](double a, double b) {
        // A bracket a few ulps wide means the root is as resolved as the
        // eigenvalue noise allows, even if |P| stays above tol.
        collapsed = std::abs(b - a) <= 8.0 * std::numeric_limits<double>::epsilon();
        return best_res < tol || collapsed;
    };
    const auto bracket = boost::math::tools::toms748_solve(f, 0.0, 1.0, p0, p1, stop, iters);
    collapsed = collapsed || std::abs(bracket.second - bracket.first) <= 8.0 * std::numeric_limits<double>::epsilon();
    if (!(best_res < tol) && !collapsed) {
        std::ostringstream msg;
        msg << "critical exponent residual " << best_res << " above tolerance " << tol;
        throw NumericalError(kModule, msg.str());
    }
    return best;
}

double critical_exponent(const SchottkyGroup& group, int lmax, double tol) {
    return critical_exponent(TransferBasis(group, lmax), tol);
}

PressureCurve pressure_curve(const SchottkyGroup& group, const std::vector<double>& sigmas, int lmax,
                             double tol) {
    const TransferBasis basis(group, lmax);
    PressureCurve curve;
    curve.samples.resize(sigmas.size());
    parallel_for(sigmas.size(), [&](std::size_t i) {
        curve.samples[i] = {sigmas[i], pressure(basis, sigmas[i])};
    });
    curve.delta = critical_exponent(basis, tol);
    return curve;
}

}  // namespace reslab
