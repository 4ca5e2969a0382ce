#include "reslab/zeros.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "zeros";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(cd z) {
    std::ostringstream os;
    os.precision(10);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}
}  // namespace

void Rect::check(const char* module) const {
    if (!(re_max > re_min) || !(im_max > im_min) || !std::isfinite(re_min) || !std::isfinite(re_max) ||
        !std::isfinite(im_min) || !std::isfinite(im_max)) {
        std::ostringstream msg;
        msg << "degenerate rectangle [" << re_min << ", " << re_max << "] x [" << im_min << ", " << im_max << "]";
        throw ValidationError(module, msg.str());
    }
}

// ---------------------------------------------------------------------------

struct AnalyticFunction::State {
    bool cache = true;
    std::mutex mu;
    std::map<std::pair<double, double>, cd> values;
    std::atomic<std::size_t> evals{0};
};

AnalyticFunction::AnalyticFunction(std::function<cd(cd)> f, bool cache)
    : f_(std::move(f)), state_(std::make_shared<State>()) {
    state_->cache = cache;
}

cd AnalyticFunction::operator()(cd s) const { return batch({s})[0]; }

std::vector<cd> AnalyticFunction::batch(const std::vector<cd>& points) const {
    std::vector<cd> out(points.size());
    std::vector<std::size_t> todo;
    {
        std::lock_guard lock(state_->mu);
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (state_->cache) {
                const auto it = state_->values.find({points[i].real(), points[i].imag()});
                if (it != state_->values.end()) {
                    out[i] = it->second;
                    continue;
                }
            }
            todo.push_back(i);
        }
    }
    parallel_for(todo.size(), [&](std::size_t k) { out[todo[k]] = f_(points[todo[k]]); });
    state_->evals += todo.size();
    if (state_->cache && !todo.empty()) {
        std::lock_guard lock(state_->mu);
        for (std::size_t i : todo) state_->values[{points[i].real(), points[i].imag()}] = out[i];
    }
    return out;
}

std::size_t AnalyticFunction::evaluations() const { return state_->evals.load(); }

AnalyticFunction determinant_function(const SchottkyGroup& group, const TwistSpec& twist, int lmax) {
    return determinant_function(std::make_shared<const TransferBasis>(group, lmax), twist);
}

AnalyticFunction determinant_function(std::shared_ptr<const TransferBasis> basis, const TwistSpec& twist,
                                      bool cache) {
    twist.check(basis->group().m());
    return AnalyticFunction([basis, twist](cd s) { return fredholm_det(assemble(*basis, s, twist)); }, cache);
}

// ---------------------------------------------------------------------------

cd euler_product(const std::vector<GeodesicClass>& classes, const SchottkyGroup& group, cd s,
                 const TwistSpec& twist, int kmax) {
    const int m = group.m();
    const int d = twist.dim();
    cd prod = 1.0;
    for (const auto& C : classes) {
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d);
        if (twist.kind != TwistSpec::Kind::Trivial) {
            for (int x : C.word) rho = rho * twist.letter_matrix(x, m);
        }
        for (int k = 0; k <= kmax; ++k) {
            const cd x = std::exp(-(s + static_cast<double>(k)) * C.length);
            if (d == 1) {
                prod *= 1.0 - rho(0, 0) * x;
            } else {
                const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(d, d) - x * rho;
                prod *= A.partialPivLu().determinant();
            }
        }
    }
    return prod;
}

cd euler_product(const SchottkyGroup& group, cd s, const TwistSpec& twist, int max_word_len, int kmax,
                 double delta, double margin) {
    if (!(s.real() > delta + margin)) {
        std::ostringstream msg;
        msg << "Euler product diverges: Re s = " << s.real() << " <= delta + margin = " << delta + margin;
        throw ValidationError(kModule, msg.str());
    }
    if (kmax < 0) throw ValidationError(kModule, "kmax must be >= 0");
    twist.check(group.m());
    return euler_product(primitive_classes_to_depth(group, max_word_len), group, s, twist, kmax);
}

// ---------------------------------------------------------------------------
// Contour winding

namespace {

// Node on the boundary: edge 0..3 (bottom, right, top, left, counterclockwise)
// and a dyadic parameter t in [0, 1). Points are computed from the
// lexicographically smaller endpoint so shared edges of neighbouring cells
// reproduce bit-identical coordinates.
struct Node {
    int edge;
    double t;
};

cd node_point(const Rect& r, const Node& n) {
    switch (n.edge) {
        case 0: return {r.re_min + n.t * (r.re_max - r.re_min), r.im_min};
        case 1: return {r.re_max, r.im_min + n.t * (r.im_max - r.im_min)};
        case 2: return {r.re_min + (1.0 - n.t) * (r.re_max - r.re_min), r.im_max};
        default: return {r.re_min, r.im_min + (1.0 - n.t) * (r.im_max - r.im_min)};
    }
}


void guard_modulus(const std::vector<cd>& pts, const std::vector<cd>& vals, double min_modulus) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!(std::abs(vals[i]) >= min_modulus)) {
            std::ostringstream msg;
            msg << "contour too close to zero: |f| = " << std::abs(vals[i]) << " at s = " << fmt(pts[i]);
            throw ContourError(msg.str(), pts[i]);
        }
    }
}

}  // namespace

int count_zeros(const AnalyticFunction& f, const Rect& rect, const CountOptions& opts) {
    rect.check(kModule);
    int per_edge = 1;
    while (per_edge < opts.initial_per_edge) per_edge *= 2;  // dyadic parameters stay exact

    std::vector<Node> nodes;
    for (int e = 0; e < 4; ++e) {
        for (int k = 0; k < per_edge; ++k) nodes.push_back({e, static_cast<double>(k) / per_edge});
    }
    std::vector<cd> pts(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = node_point(rect, nodes[i]);
    std::vector<cd> vals = f.batch(pts);
    guard_modulus(pts, vals, opts.min_modulus);

    for (int round = 0;; ++round) {
        std::vector<std::size_t> bad;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t j = (i + 1) % nodes.size();
            if (std::abs(std::arg(vals[j] / vals[i])) >= opts.max_phase_step) bad.push_back(i);
        }
        if (bad.empty()) break;
        if (round >= opts.max_refinements) {
            throw ContourError("phase refinement did not settle along the contour", pts[bad.front()]);
        }
        std::vector<Node> fresh;
        std::vector<cd> fresh_pts;
        for (std::size_t i : bad) {
            const std::size_t j = (i + 1) % nodes.size();
            // Midpoint on the same edge; the next node may start a new edge.
            const double t_end = nodes[j].edge == nodes[i].edge ? nodes[j].t : 1.0;
            const Node mid{nodes[i].edge, 0.5 * (nodes[i].t + t_end)};
            fresh.push_back(mid);
            fresh_pts.push_back(node_point(rect, mid));
        }
        const std::vector<cd> fresh_vals = f.batch(fresh_pts);
        guard_modulus(fresh_pts, fresh_vals, opts.min_modulus);
        std::vector<Node> n2;
        std::vector<cd> p2, v2;
        std::size_t b = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            n2.push_back(nodes[i]);
            p2.push_back(pts[i]);
            v2.push_back(vals[i]);
            if (b < bad.size() && bad[b] == i) {
                n2.push_back(fresh[b]);
                p2.push_back(fresh_pts[b]);
                v2.push_back(fresh_vals[b]);
                ++b;
            }
        }
        nodes = std::move(n2);
        pts = std::move(p2);
        vals = std::move(v2);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        total += std::arg(vals[(i + 1) % nodes.size()] / vals[i]);
    }
    const double w = total / kTwoPi;
    const double r = std::round(w);
    if (std::abs(w - r) > 0.05) {
        std::ostringstream msg;
        msg << "winding number " << w << " is not close to an integer";
        throw NumericalError(kModule, msg.str());
    }
    return static_cast<int>(r);
}

// ---------------------------------------------------------------------------

RefineResult refine_zero(const AnalyticFunction& f, cd s0, const RefineOptions& opts) {
    RefineResult res;
    res.s = s0;
    cd fs = f(s0);
    res.residual = std::abs(fs);
    const double h = opts.step;
    for (int it = 0; it < opts.max_iter; ++it) {
        if (res.residual < opts.tol) {
            res.converged = true;
            return res;
        }
        const auto v = f.batch({res.s + h, res.s - h});
        const cd deriv = (v[0] - v[1]) / (2.0 * h);
        if (deriv == 0.0 || !std::isfinite(std::abs(deriv))) break;
        const cd next = res.s - static_cast<double>(opts.multiplicity) * fs / deriv;
        res.iterations = it + 1;
        if (std::abs(next - s0) > opts.max_distance || !std::isfinite(std::abs(next))) {
            res.s = next;
            res.residual = std::abs(f(next));
            res.converged = false;
            return res;
        }
        const double step = std::abs(next - res.s);
        res.s = next;
        fs = f(res.s);
        res.residual = std::abs(fs);
        // Round-off floor: a tiny step with a small residual is as good as it gets.
        if (step < 1e-14 * std::max(1.0, std::abs(res.s)) && res.residual < 1e3 * opts.tol) {
            res.converged = true;
            return res;
        }
    }
    res.converged = res.residual < opts.tol;
    return res;
}

ClusterEstimate circle_moments(const AnalyticFunction& f, cd center, double radius, int samples,
                               const CountOptions& opts) {
    ClusterEstimate est;
    int K = std::max(16, samples);
    for (;;) {
        std::vector<cd> pts(K);
        std::vector<double> theta(K);
        for (int k = 0; k < K; ++k) {
            theta[k] = kTwoPi * k / K;
            pts[k] = center + radius * std::polar(1.0, theta[k]);
        }
        const std::vector<cd> vals = f.batch(pts);
        guard_modulus(pts, vals, opts.min_modulus);
        std::vector<double> phase(K + 1);
        phase[0] = std::arg(vals[0]);
        bool fine = true;
        for (int k = 0; k < K; ++k) {
            const double step = std::arg(vals[(k + 1) % K] / vals[k]);
            if (std::abs(step) >= opts.max_phase_step) fine = false;
            phase[k + 1] = phase[k] + step;
        }
        if (!fine) {
            if (K >= 4096) throw ContourError("phase refinement did not settle on circle", center);
            K *= 2;
            continue;
        }
        const double w = (phase[K] - phase[0]) / kTwoPi;
        est.count = static_cast<int>(std::round(w));
        if (std::abs(w - est.count) > 0.05 || est.count < 1) {
            est.ok = false;
            return est;
        }
        cd p1 = 0.0, p2 = 0.0;
        for (int k = 0; k < K; ++k) {
            const cd h(std::log(std::abs(vals[k])), phase[k] - est.count * theta[k]);
            p1 += h * std::polar(1.0, theta[k]);
            p2 += h * std::polar(1.0, 2.0 * theta[k]);
        }
        p1 *= -radius / static_cast<double>(K);
        p2 *= -2.0 * radius * radius / static_cast<double>(K);
        const cd mean = p1 / static_cast<double>(est.count);
        const cd var = p2 / static_cast<double>(est.count) - mean * mean;
        est.mean = center + mean;
        est.spread = std::sqrt(std::abs(var));
        est.ok = true;
        return est;
    }
}

// ---------------------------------------------------------------------------

int ResonanceSet::total_multiplicity() const {
    int t = 0;
    for (const auto& z : zeros) t += z.multiplicity;
    return t;
}

namespace {

struct Cell {
    Rect r;
    int count;
};

}  // namespace

ResonanceSet resonances(const AnalyticFunction& f, const Rect& rect, const ResonanceOptions& opts) {
    rect.check(kModule);
    ResonanceSet out;
    out.rect = rect;
    const double size = std::max(rect.width(), rect.height());

    // The padding keeps zeros that sit exactly on the requested boundary
    // (e.g. on the real axis) strictly inside the counting contour.
    const double pads[] = {1.0, 1.618, 2.718, 0.577, 3.1416};
    bool counted = false;
    std::string last_error;
    for (double scale : pads) {
        const Rect search = rect.padded(opts.pad_fraction * scale * size);
        try {
            out.contour_count = count_zeros(f, search, opts.count);
            out.search_rect = search;
            counted = true;
            break;
        } catch (const ContourError& e) {
            last_error = e.what();
        }
    }
    if (!counted) throw NumericalError(kModule, "no zero-free padded contour around the rectangle: " + last_error);
    if (out.contour_count < 0) throw NumericalError(kModule, "negative winding number; function has poles?");

    std::vector<Cell> work{{out.search_rect, out.contour_count}};
    while (!work.empty()) {
        const Cell cell = work.back();
        work.pop_back();
        if (cell.count == 0) continue;

        const cd c = cell.r.center();
        const double half_diag = 0.5 * std::hypot(cell.r.width(), cell.r.height());
        const double slack = 1e-9 * std::max(1.0, half_diag);
        try {
            const ClusterEstimate est = circle_moments(f, c, 1.02 * half_diag, opts.moment_samples, opts.count);
            if (est.ok && est.count == cell.count && cell.r.contains(est.mean, slack)) {
                if (cell.count == 1) {
                    RefineOptions ro = opts.refine;
                    ro.max_distance = half_diag;
                    const RefineResult rr = refine_zero(f, est.mean, ro);
                    ZeroEntry z;
                    if (rr.converged && cell.r.contains(rr.s, slack)) {
                        z.s = rr.s;
                        z.residual = rr.residual;
                    } else {
                        z.s = est.mean;
                        z.residual = std::abs(f(est.mean));
                    }
                    out.zeros.push_back(z);
                    continue;
                }
                if (est.spread < opts.cluster_tol) {
                    ZeroEntry z;
                    z.s = est.mean;
                    z.multiplicity = cell.count;
                    z.spread = est.spread;
                    z.residual = std::abs(f(est.mean));
                    out.zeros.push_back(z);
                    continue;
                }
            }
        } catch (const ContourError&) {
            // Circle grazed a zero outside the cell; fall back to splitting.
        }

        if (std::max(cell.r.width(), cell.r.height()) < opts.min_cell) {
            ZeroEntry z;
            z.s = c;
            z.multiplicity = cell.count;
            z.resolved = false;
            z.residual = std::abs(f(c));
            out.zeros.push_back(z);
            std::ostringstream msg;
            msg << "unresolved cluster of " << cell.count << " zeros near " << fmt(c);
            out.unresolved.push_back(msg.str());
            continue;
        }

        // Split the longer side off-centre; retry other fractions if the
        // split line runs into a zero.
        const bool vertical = cell.r.width() >= cell.r.height();
        const double fractions[] = {opts.split_fraction, 1.0 - opts.split_fraction + 0.0213, 0.4377, 0.5791};
        bool split = false;
        for (double fr : fractions) {
            Rect a = cell.r, b = cell.r;
            if (vertical) {
                const double x = cell.r.re_min + fr * cell.r.width();
                a.re_max = x;
                b.re_min = x;
            } else {
                const double y = cell.r.im_min + fr * cell.r.height();
                a.im_max = y;
                b.im_min = y;
            }
            try {
                const int ca = count_zeros(f, a, opts.count);
                const int cb = cell.count - ca;
                if (ca < 0 || cb < 0) continue;
                // Push b first so a (lower / left) is processed first.
                work.push_back({b, cb});
                work.push_back({a, ca});
                split = true;
                break;
            } catch (const ContourError&) {
            }
        }
        if (!split) {
            ZeroEntry z;
            z.s = c;
            z.multiplicity = cell.count;
            z.resolved = false;
            z.residual = std::abs(f(c));
            out.zeros.push_back(z);
            out.unresolved.push_back("cell could not be split near " + fmt(c));
        }
    }
    // Real parts are bucketed so that round-off such as -1e-16 vs 0 does not
    // decide the order.
    const auto bucket = [](double x) { return std::llround(x * 1e9); };
    std::sort(out.zeros.begin(), out.zeros.end(), [&](const ZeroEntry& a, const ZeroEntry& b) {
        const long long ra = bucket(a.s.real()), rb = bucket(b.s.real());
        if (ra != rb) return ra < rb;
        return a.s.imag() < b.s.imag();
    });
    return out;
}

}  // namespace reslab
