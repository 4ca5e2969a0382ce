#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "reslab/transfer.hpp"
#include "reslab/zeros.hpp"

namespace reslab {

/// Z/N_1 x ... x Z/N_m. Characters are indexed by the lattice
/// 0 <= alpha_k < N_k, in mixed radix with the first coordinate fastest.
struct AbelianQuotient {
    std::vector<int> moduli;

    explicit AbelianQuotient(std::vector<int> moduli);
    int order() const;
    int rank() const { return static_cast<int>(moduli.size()); }
    std::vector<int> alpha(int index) const;
    /// alpha_k / N_k, shifted into (-1/2, 1/2].
    std::vector<double> theta(const std::vector<int>& alpha) const;
    /// Distance of alpha/N to Z^m in the sup norm.
    double lattice_distance(const std::vector<int>& alpha) const;
};

/// exp(2 pi i sum_k alpha_k h_k / N_k) for the homology vector h of the class.
cd character_of(const AbelianQuotient& q, const std::vector<int>& alpha, const GeodesicClass& c);
cd character_of(const AbelianQuotient& q, const std::vector<int>& alpha, const std::vector<int>& homology);

struct CharacterZeros {
    std::vector<int> alpha;
    std::vector<double> theta;
    bool searched = false;  ///< false when skipped by the near-delta rule
    ResonanceSet set;
};

struct CoverZeros {
    std::vector<int> moduli;
    Rect rect;
    std::vector<CharacterZeros> characters;  ///< lattice order
    std::vector<ZeroEntry> zeros;            ///< union, coincident zeros merged
    int total_multiplicity = 0;
    int skipped = 0;
};

struct CoverOptions {
    int order_cap = 64;
    /// Characters with lattice distance >= near_radius are skipped when > 0.
    double near_radius = 0.0;
    double merge_tol = 1e-7;
    ResonanceOptions resonance;
};

/// Zeros of every character twist L(s, alpha/N) in rect; their union with
/// multiplicity is the zero set of the cover's zeta function.
CoverZeros cover_zeta_zeros(std::shared_ptr<const TransferBasis> basis, const AbelianQuotient& q,
                            const Rect& rect, const CoverOptions& opts = {});

struct NonvanishingScan {
    int grid = 0;
    double min_distance = 0.05;
    double min_modulus = 0.0;          ///< over grid points with dist(theta, Z^m) >= min_distance
    std::vector<double> argmin;
    double residual_at_zero = 0.0;     ///< |L(delta, 0)|
    double symmetry_error = 0.0;       ///< max | |L(theta)| - |L(-theta)| |
    std::vector<double> modulus;       ///< grid^m values, first coordinate fastest
};

/// |L(delta, theta)| on the grid theta = j / grid in [0, 1)^m.
NonvanishingScan nonvanishing_scan(std::shared_ptr<const TransferBasis> basis, double delta, int grid = 64,
                                   double min_distance = 0.05);

struct CurveSample {
    std::vector<double> theta;
    cd phi;
};

struct ImplicitCurve {
    double epsilon = 0.0;
    int grid = 0;                      ///< points per axis
    double delta = 0.0;
    std::vector<CurveSample> samples;  ///< grid^m, first coordinate fastest
    int shrinks = 0;

    double max_imag = 0.0;             ///< max |Im phi|
    double max_excess = 0.0;           ///< max (phi - delta), should be <= 0
    double symmetry_error = 0.0;       ///< max |phi(theta) - phi(-theta)|
    double phi0_error = 0.0;           ///< |phi(0) - delta|

    double fd_step = 0.0;
    std::vector<double> gradient;      ///< finite differences at 0
    std::vector<double> hessian;       ///< m x m, row major
    double hessian_det = 0.0;
    bool negative_definite = false;

    std::vector<double> Q;             ///< fitted phi = delta - theta^T Q theta, m x m
    double quadratic_residual = 0.0;   ///< max misfit on |theta| <= epsilon / 4
    bool Q_positive_definite = false;
};

struct CurveOptions {
    int grid = 9;             ///< odd, so theta = 0 is a node
    int continuation_steps = 4;
    int max_shrinks = 3;
    double fd_step = 1e-3;
    RefineOptions refine{1e-6, 1e-13, 60, 1, 0.5};
};

/// Continues the zero s = delta of L(s, 0) to s = phi(theta) over the grid on
/// [-epsilon, epsilon]^m. Each grid point is reached from 0 along a straight
/// path with warm-started Newton; a failure halves epsilon and restarts.
ImplicitCurve implicit_curve(std::shared_ptr<const TransferBasis> basis, double delta, double epsilon,
                             const CurveOptions& opts = {});

/// phi along the segment from 0 to theta_end (continuation with
/// `steps` points). Throws NumericalError when Newton fails.
std::vector<CurveSample> continue_zero(std::shared_ptr<const TransferBasis> basis, double delta,
                                       const std::vector<double>& theta_end, int steps,
                                       const RefineOptions& refine = {1e-6, 1e-13, 60, 1, 0.5});

struct WindowZero {
    std::vector<int> alpha;
    cd s;
    int multiplicity = 1;
};

struct EquidistributionRow {
    int N = 0;
    int order = 0;
    int characters_searched = 0;
    int zeros_in_window = 0;          ///< with multiplicity
    int nonreal = 0;                  ///< zeros with |Im| > 1e-7
    double count_per_order = 0.0;     ///< zeros_in_window / |G|
    double kolmogorov = 0.0;
    std::vector<double> positions;    ///< sorted real parts
    std::vector<WindowZero> zeros;    ///< character lattice order
};

struct EquidistributionResult {
    Rect window;
    std::vector<double> reference_u;    ///< fine samples of phi along the growing coordinate
    std::vector<double> reference_cdf;  ///< on the histogram bin edges
    std::vector<double> bin_edges;
    std::vector<EquidistributionRow> rows;
    std::vector<std::vector<double>> histograms;  ///< per row, normalized densities on bin_edges
    std::vector<double> reference_density;
    double theta_max = 0.0;  ///< |theta| where phi leaves the window (or 1/2)
    /// Fitted exponent a in d mu / du ~ (delta - u)^a from the reference near
    /// delta; one growing modulus predicts -1/2.
    double density_exponent = 0.0;
};

struct EquidistributionOptions {
    int bins = 24;
    int reference_samples = 4001;
    CoverOptions cover{64, 0.25, 1e-7, {}};
};

/// Z/N covers along the first generator (moduli (N, 1, ..., 1)). Collects
/// every zero in the window over all characters and compares its
/// distribution with the push-forward of Lebesgue measure on the first
/// coordinate of theta under phi, conditioned on phi landing in the window.
EquidistributionResult equidistribution_experiment(std::shared_ptr<const TransferBasis> basis, double delta,
                                                   const std::vector<int>& Ns, const Rect& window,
                                                   const EquidistributionOptions& opts = {});

struct FactorizationReport {
    int order = 0;
    std::vector<cd> points;
    double max_relative = 0.0;   ///< |det_regular - prod_alpha det_alpha| / |det_regular|
    int regular_zeros = 0;       ///< total multiplicity in the rectangle
    int character_zeros = 0;
    double zero_match = 0.0;     ///< max distance between matched zeros (inf on count mismatch)
};

/// Compares the regular-representation twist of the quotient with the
/// product of its character twists at `samples` seeded random points of
/// `sample_rect`, and the two zero multisets in `zero_rect`.
FactorizationReport factorization_check(std::shared_ptr<const TransferBasis> basis, const AbelianQuotient& q,
                                        const Rect& sample_rect, const Rect& zero_rect, int samples = 10,
                                        std::uint64_t seed = 1, const ResonanceOptions& ropts = {});

/// Kolmogorov distance between an empirical sample and a reference CDF
/// given by sorted reference samples (both one-dimensional).
double kolmogorov_distance(std::vector<double> sample, const std::vector<double>& reference_sorted);

}  // namespace reslab
