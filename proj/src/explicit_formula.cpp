#include "reslab/explicit_formula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "explicit_formula";

double width_term(double j, double eps) { return 1.0 / (j * std::pow(std::log1p(j), 1.0 + eps)); }

// Antiderivative tail: int_a^inf dx / ((1+x) log(1+x)^(1+eps)).
double g_tail(double a, double eps) { return 1.0 / (eps * std::pow(std::log1p(a), eps)); }

struct Line {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    Line L;
    L.slope = sxy / sxx;
    L.intercept = my - L.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (L.intercept + L.slope * x[i]);
        ss += r * r;
    }
    L.rms = std::sqrt(ss / n);
    return L;
}
}  // namespace

WidthSeries width_series(double eps) {
    if (!(eps > 0.0)) throw ValidationError(kModule, "epsilon must be positive");
    constexpr int N = 1'000'000;
    // Sum the smallest terms first.
    double partial = 0.0;
    for (int j = N; j >= 1; --j) partial += width_term(j, eps);
    // f(x) = g(x) (1+x)/x with g the integrand of g_tail, and f decreasing:
    // int_{N+1}^inf g <= sum_{j>N} f(j) <= int_N^inf g (1 + 1/N).
    const double lo = g_tail(N + 1.0, eps);
    const double hi = g_tail(N, eps) * (1.0 + 1.0 / N);
    return {partial + 0.5 * (lo + hi), 0.5 * (hi - lo)};
}

TestFunction build_test_function(double epsilon, int J, int grid_size) {
    if (J < 1) throw ValidationError(kModule, "J must be >= 1");
    if (grid_size < 16 || grid_size > (1 << 20)) throw ValidationError(kModule, "grid_size out of range [16, 2^20]");
    TestFunction f;
    f.epsilon = epsilon;
    f.J = J;
    const WidthSeries ws = width_series(epsilon);
    f.C = 1.0 / ws.value;
    const int n = grid_size % 2 == 1 ? grid_size : grid_size - 1;
    const int mid = n / 2;
    f.h = 2.0 / (n - 1);
    f.x.resize(n);
    for (int i = 0; i < n; ++i) f.x[i] = (i - mid) * f.h;

    std::vector<double> cur(n, 0.0), next(n);
    cur[mid] = 1.0 / f.h;  // unit mass at the origin
    int reach = 0;
    for (int j = 1; j <= J; ++j) {
        const double mu = f.C * width_term(j, epsilon);
        f.mu.push_back(mu);
        f.width_sum += mu;
        // Floor keeps the discrete support inside the continuous one.
        const int q = static_cast<int>(std::floor(mu / f.h * (1.0 + 1e-12)));
        if (2 * q + 1 < 5) f.coarse = true;
        f.half_points.push_back(q);
        reach += q;
        // Box of 2q+1 points with height 1/((2q+1) h): mass 1 under h-sums.
        // Running sums implement the convolution exactly.
        std::vector<double> prefix(n + 1, 0.0);
        for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + cur[i];
        const double w = 1.0 / (2 * q + 1);
        for (int i = 0; i < n; ++i) {
            const int lo = std::max(0, i - q), hi = std::min(n - 1, i + q);
            next[i] = w * (prefix[hi + 1] - prefix[lo]);
        }
        std::swap(cur, next);
    }
    f.deficit = 1.0 - f.width_sum;
    f.support = reach * f.h;
    f.values = std::move(cur);
    return f;
}

double TestFunction::operator()(double t) const {
    if (!(t >= -1.0 && t <= 1.0)) return 0.0;
    const double u = (t - x.front()) / h;
    const std::size_t i = std::min(static_cast<std::size_t>(u), x.size() - 2);
    const double r = u - static_cast<double>(i);
    return std::max(0.0, (1.0 - r) * values[i] + r * values[i + 1]);
}

double TestFunction::mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = (i == 0 || i + 1 == values.size()) ? 0.5 : 1.0;
        s += w * values[i];
    }
    return s * h;
}

double TestFunction::log_abs_transform(double xi) const {
    // Each discrete box transforms to sin((2q+1) t) / ((2q+1) sin t), t = h xi / 2.
    const double t = 0.5 * h * xi;
    double acc = 0.0;
    for (int q : half_points) {
        const double n = 2.0 * q + 1.0;
        const double s = std::sin(t);
        if (std::abs(s) < 1e-300) continue;  // factor -> 1 at t = 0
        const double v = std::abs(std::sin(n * t) / (n * s));
        if (v == 0.0) return -std::numeric_limits<double>::infinity();
        acc += std::log(v);
    }
    return acc;
}

double TestFunction::transform_direct(double xi) const {
    // Even function: the transform is real.
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * std::cos(x[i] * xi);
    return s * h;
}

EnvelopeReport fourier_envelope_check(const TestFunction& phi0, double xi_min, double xi_max, double alpha,
                                      int windows, int samples_per_window) {
    if (!(xi_min > 1.0 && xi_max > xi_min)) throw ValidationError(kModule, "need 1 < xi_min < xi_max");
    if (windows < 4 || samples_per_window < 2) throw ValidationError(kModule, "too few windows or samples");
    EnvelopeReport rep;
    rep.alpha = alpha;
    rep.xi_min = xi_min;
    rep.xi_max = xi_max;
    rep.xi.resize(windows);
    rep.log_env.resize(windows);
    const double ratio = std::pow(xi_max / xi_min, 1.0 / windows);
    parallel_for(static_cast<std::size_t>(windows), [&](std::size_t w) {
        const double a = xi_min * std::pow(ratio, static_cast<double>(w));
        const double b = a * ratio;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < samples_per_window; ++k) {
            const double xi = a + (b - a) * (k + 0.5) / samples_per_window;
            best = std::max(best, phi0.log_abs_transform(xi));
        }
        rep.xi[w] = a;
        rep.log_env[w] = best;
    });

    std::vector<double> u(windows), v(windows);
    for (int w = 0; w < windows; ++w) {
        u[w] = rep.xi[w] / std::pow(std::log(rep.xi[w]), 1.0 + alpha);
        v[w] = std::log(rep.xi[w]);
    }
    const Line sub = least_squares(u, rep.log_env);
    const Line pw = least_squares(v, rep.log_env);
    rep.C2 = -sub.slope;
    rep.rms_subexp = sub.rms;
    rep.rms_power = pw.rms;
    rep.power_exponent = -pw.slope;
    double c1 = -std::numeric_limits<double>::infinity();
    for (int w = 0; w < windows; ++w) c1 = std::max(c1, rep.log_env[w] + rep.C2 * u[w]);
    rep.logC1 = c1;
    // Local power-law order on the first and last decade of the range.
    const double decade = std::min(10.0, std::sqrt(xi_max / xi_min));
    std::vector<double> v0, y0, v1, y1;
    for (int w = 0; w < windows; ++w) {
        if (rep.xi[w] <= xi_min * decade) {
            v0.push_back(v[w]);
            y0.push_back(rep.log_env[w]);
        }
        if (rep.xi[w] >= xi_max / decade) {
            v1.push_back(v[w]);
            y1.push_back(rep.log_env[w]);
        }
    }
    rep.order_low = v0.size() >= 2 ? -least_squares(v0, y0).slope : 0.0;
    rep.order_high = v1.size() >= 2 ? -least_squares(v1, y1).slope : 0.0;
    rep.holds = rep.C2 > 0.0 && rep.order_high >= 2.0 * rep.order_low;
    return rep;
}

cd geodesic_sum(const GeodesicTable& table, const ClassCharacter& chi, double T,
                const std::function<double(double)>& phi0) {
    if (!(T > 0.0)) throw ValidationError(kModule, "T must be positive");
    if (!table.complete || table.max_length < T) {
        throw ValidationError(kModule, "geodesic table not complete to length " + std::to_string(T) +
                                           " (max_length " + std::to_string(table.max_length) +
                                           ", depth reached " + std::to_string(table.depth_reached) + ")");
    }
    cd sum = 0.0;
    for (std::size_t i = 0; i < table.classes.size(); ++i) {
        const double l = table.classes[i].length;
        for (int k = 1; k * l <= T; ++k) {
            const double w = l / (1.0 - std::exp(k * l)) * phi0(k * l / T);
            if (w != 0.0) sum += chi(i, k) * w;
        }
    }
    return sum;
}

cd geodesic_sum(const GeodesicTable& table, const std::vector<double>& theta, double T,
                const std::function<double(double)>& phi0) {
    return geodesic_sum(
        table,
        [&](std::size_t i, int k) {
            const auto& h = table.classes[i].homology;
            if (h.size() != theta.size()) throw ValidationError(kModule, "theta has wrong dimension");
            double phase = 0.0;
            for (std::size_t a = 0; a < h.size(); ++a) phase += theta[a] * h[a];
            return std::polar(1.0, 2.0 * std::numbers::pi * k * phase);
        },
        T, phi0);
}

}  // namespace reslab
