#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <map>
#include <string>
#include <vector>

#include "reslab/error.hpp"
#include "reslab/transfer.hpp"

namespace reslab {

/// Axis-parallel rectangle [re_min, re_max] x [im_min, im_max].
struct Rect {
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    cd center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    bool contains(cd z, double slack = 0.0) const {
        return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
               z.imag() <= im_max + slack;
    }
    Rect padded(double pad) const { return {re_min - pad, re_max + pad, im_min - pad, im_max + pad}; }
    void check(const char* module) const;
};

/// An entire function evaluated pointwise or in batches. Batches are
/// evaluated in parallel; values are cached by exact point so repeated
/// contour vertices cost nothing.
class AnalyticFunction {
public:
    explicit AnalyticFunction(std::function<cd(cd)> f, bool cache = true);

    cd operator()(cd s) const;
    std::vector<cd> batch(const std::vector<cd>& points) const;
    std::size_t evaluations() const;

private:
    struct State;
    std::function<cd(cd)> f_;
    std::shared_ptr<State> state_;
};

/// s -> det(I - L_{rho,s}) at truncation lmax.
AnalyticFunction determinant_function(const SchottkyGroup& group, const TwistSpec& twist, int lmax = 32);
/// Shares one basis across many twists.
AnalyticFunction determinant_function(std::shared_ptr<const TransferBasis> basis, const TwistSpec& twist,
                                      bool cache = true);

/// Truncated product over primitive classes of word length <= max_word_len
/// and k <= kmax of det(I - rho(C) e^{-(s+k) l(C)}). Refuses
/// Re s <= delta + margin.
cd euler_product(const SchottkyGroup& group, cd s, const TwistSpec& twist, int max_word_len, int kmax,
                 double delta, double margin = 0.1);
cd euler_product(const std::vector<GeodesicClass>& classes, const SchottkyGroup& group, cd s,
                 const TwistSpec& twist, int kmax);

/// Raised when the contour passes too close to a zero.
class ContourError : public NumericalError {
public:
    ContourError(const std::string& what, cd point)
        : NumericalError("zeros", what), point_(point) {}
    cd point() const { return point_; }

private:
    cd point_;
};

struct CountOptions {
    int initial_per_edge = 16;
    double min_modulus = 1e-6;
    double max_phase_step = 1.5707963267948966;  // pi/2
    int max_refinements = 40;
};

/// Winding number of f along the boundary of rect.
int count_zeros(const AnalyticFunction& f, const Rect& rect, const CountOptions& opts = {});

struct RefineOptions {
    double step = 1e-6;        ///< central difference step
    double tol = 1e-10;        ///< stop when |f| < tol
    int max_iter = 50;
    int multiplicity = 1;
    double max_distance = 0.5;  ///< leaving this radius around s0 counts as failure
};

struct RefineResult {
    cd s;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

RefineResult refine_zero(const AnalyticFunction& f, cd s0, const RefineOptions& opts = {});

/// Zero data from contour moments on a circle: the circle must contain
/// exactly `count` zeros. Returns their mean and the standard deviation of
/// the cluster (complex sqrt of the second central moment, in modulus).
struct ClusterEstimate {
    int count = 0;
    cd mean;
    double spread = 0.0;
    bool ok = false;
};

ClusterEstimate circle_moments(const AnalyticFunction& f, cd center, double radius, int samples = 64,
                               const CountOptions& opts = {});

struct ZeroEntry {
    cd s;
    int multiplicity = 1;
    double residual = 0.0;  ///< |f(s)|
    double spread = 0.0;    ///< cluster spread from moments (0 for Newton-polished zeros)
    bool resolved = true;
};

struct ResonanceSet {
    Rect rect;         ///< requested rectangle
    Rect search_rect;  ///< padded rectangle actually used for counting
    std::vector<ZeroEntry> zeros;
    int contour_count = 0;
    std::vector<std::string> unresolved;

    int total_multiplicity() const;
};

struct ResonanceOptions {
    double pad_fraction = 1.37e-3;  ///< rectangle padding relative to its size
    double split_fraction = 0.5137;  ///< off-centre split keeps lines off symmetric zeros
    double min_cell = 1e-9;
    double cluster_tol = 1e-6;
    int moment_samples = 128;
    CountOptions count;
    RefineOptions refine;
};

ResonanceSet resonances(const AnalyticFunction& f, const Rect& rect, const ResonanceOptions& opts = {});

}  // namespace reslab
