#include "reslab/abelian.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "abelian";

std::vector<double> negated(const std::vector<double>& t) {
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = -t[i];
    return out;
}
}  // namespace

AbelianQuotient::AbelianQuotient(std::vector<int> m) : moduli(std::move(m)) {
    if (moduli.empty()) throw ValidationError(kModule, "quotient needs at least one modulus");
    for (int N : moduli) {
        if (N < 1) throw ValidationError(kModule, "moduli must be >= 1");
    }
}

int AbelianQuotient::order() const {
    long long o = 1;
    for (int N : moduli) {
        o *= N;
        if (o > 1'000'000) throw ValidationError(kModule, "quotient order above 1e6");
    }
    return static_cast<int>(o);
}

std::vector<int> AbelianQuotient::alpha(int index) const {
    std::vector<int> a(moduli.size());
    for (std::size_t k = 0; k < moduli.size(); ++k) {
        a[k] = index % moduli[k];
        index /= moduli[k];
    }
    return a;
}

std::vector<double> AbelianQuotient::theta(const std::vector<int>& a) const {
    if (a.size() != moduli.size()) throw ValidationError(kModule, "alpha has wrong dimension");
    std::vector<double> t(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] < 0 || a[k] >= moduli[k]) throw ValidationError(kModule, "alpha outside the character lattice");
        // Keep theta symmetric about 0 so conjugate characters get opposite theta.
        const int r = 2 * a[k] > moduli[k] ? a[k] - moduli[k] : a[k];
        t[k] = static_cast<double>(r) / moduli[k];
    }
    return t;
}

double AbelianQuotient::lattice_distance(const std::vector<int>& a) const {
    double d = 0.0;
    for (double t : theta(a)) d = std::max(d, std::abs(t));
    return d;
}

cd character_of(const AbelianQuotient& q, const std::vector<int>& alpha, const std::vector<int>& homology) {
    if (alpha.size() != q.moduli.size() || homology.size() != q.moduli.size()) {
        throw ValidationError(kModule, "alpha and homology must match the number of moduli");
    }
    // Reduce alpha_k h_k mod N_k exactly before turning it into an angle.
    double phase = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        const long long N = q.moduli[k];
        long long r = (static_cast<long long>(alpha[k]) * homology[k]) % N;
        if (r < 0) r += N;
        phase += static_cast<double>(r) / static_cast<double>(N);
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

cd character_of(const AbelianQuotient& q, const std::vector<int>& alpha, const GeodesicClass& c) {
    return character_of(q, alpha, c.homology);
}

// ---------------------------------------------------------------------------

CoverZeros cover_zeta_zeros(std::shared_ptr<const TransferBasis> basis, const AbelianQuotient& q,
                            const Rect& rect, const CoverOptions& opts) {
    rect.check(kModule);
    if (q.rank() != basis->group().m()) {
        throw ValidationError(kModule, "quotient rank " + std::to_string(q.rank()) + " differs from m = " +
                                           std::to_string(basis->group().m()));
    }
    const int order = q.order();
    if (order > opts.order_cap) {
        throw ValidationError(kModule, "quotient order " + std::to_string(order) + " exceeds cap " +
                                           std::to_string(opts.order_cap));
    }
    CoverZeros out;
    out.moduli = q.moduli;
    out.rect = rect;
    out.characters.resize(order);
    parallel_for(static_cast<std::size_t>(order), [&](std::size_t i) {
        CharacterZeros& cz = out.characters[i];
        cz.alpha = q.alpha(static_cast<int>(i));
        cz.theta = q.theta(cz.alpha);
        if (opts.near_radius > 0.0 && q.lattice_distance(cz.alpha) >= opts.near_radius) return;
        cz.searched = true;
        const AnalyticFunction f = determinant_function(basis, TwistSpec::abelian(cz.theta));
        cz.set = resonances(f, rect, opts.resonance);
    });
    for (const auto& cz : out.characters) {
        if (!cz.searched) {
            ++out.skipped;
            continue;
        }
        for (const auto& z : cz.set.zeros) {
            auto it = std::find_if(out.zeros.begin(), out.zeros.end(),
                                   [&](const ZeroEntry& e) { return std::abs(e.s - z.s) < opts.merge_tol; });
            if (it == out.zeros.end()) {
                out.zeros.push_back(z);
            } else {
                it->multiplicity += z.multiplicity;
                it->residual = std::max(it->residual, z.residual);
                it->resolved = it->resolved && z.resolved;
            }
            out.total_multiplicity += z.multiplicity;
        }
    }
    const auto bucket = [](double x) { return std::llround(x * 1e9); };
    std::sort(out.zeros.begin(), out.zeros.end(), [&](const ZeroEntry& a, const ZeroEntry& b) {
        if (bucket(a.s.real()) != bucket(b.s.real())) return bucket(a.s.real()) < bucket(b.s.real());
        return a.s.imag() < b.s.imag();
    });
    return out;
}

// ---------------------------------------------------------------------------

NonvanishingScan nonvanishing_scan(std::shared_ptr<const TransferBasis> basis, double delta, int grid,
                                   double min_distance) {
    const int m = basis->group().m();
    if (grid < 2) throw ValidationError(kModule, "grid must be >= 2");
    long long total = 1;
    for (int k = 0; k < m; ++k) {
        total *= grid;
        if (total > 4'000'000) throw ValidationError(kModule, "scan grid too large");
    }
    NonvanishingScan out;
    out.grid = grid;
    out.min_distance = min_distance;
    out.modulus.resize(static_cast<std::size_t>(total));
    const auto theta_of = [&](long long idx) {
        std::vector<double> t(m);
        for (int k = 0; k < m; ++k) {
            t[k] = static_cast<double>(idx % grid) / grid;
            idx /= grid;
        }
        return t;
    };
    parallel_for(out.modulus.size(), [&](std::size_t i) {
        const TransferMatrix M = assemble(*basis, cd(delta, 0.0), TwistSpec::abelian(theta_of(static_cast<long long>(i))));
        out.modulus[i] = std::abs(fredholm_det(M));
    });
    out.residual_at_zero = out.modulus[0];
    out.min_modulus = std::numeric_limits<double>::infinity();
    for (long long i = 0; i < total; ++i) {
        const auto t = theta_of(i);
        double dist = 0.0;
        long long mirror = 0, stride = 1;
        for (int k = 0; k < m; ++k) {
            dist = std::max(dist, std::min(t[k], 1.0 - t[k]));
            const long long j = (i / stride) % grid;
            mirror += stride * ((grid - j) % grid);
            stride *= grid;
        }
        out.symmetry_error = std::max(out.symmetry_error, std::abs(out.modulus[i] - out.modulus[mirror]));
        if (dist >= min_distance - 1e-12 && out.modulus[i] < out.min_modulus) {
            out.min_modulus = out.modulus[i];
            out.argmin = t;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<CurveSample> continue_zero(std::shared_ptr<const TransferBasis> basis, double delta,
                                       const std::vector<double>& theta_end, int steps,
                                       const RefineOptions& refine) {
    if (steps < 1) throw ValidationError(kModule, "continuation needs at least one step");
    std::vector<CurveSample> path;
    cd s = delta;
    for (int k = 1; k <= steps; ++k) {
        std::vector<double> t(theta_end.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = theta_end[i] * k / steps;
        const AnalyticFunction f = determinant_function(basis, TwistSpec::abelian(t), false);
        RefineOptions ro = refine;
        // A zero that moves further than the remaining room signals a jump.
        ro.max_distance = std::min(refine.max_distance, 0.25);
        const RefineResult r = refine_zero(f, s, ro);
        if (!r.converged) {
            std::ostringstream msg;
            msg << "continuation failed at step " << k << "/" << steps << " (residual " << r.residual << ")";
            throw NumericalError(kModule, msg.str());
        }
        s = r.s;
        path.push_back({t, s});
    }
    return path;
}

namespace {

// Solves the small symmetric least-squares problem for Q from
// delta - phi = sum_{a<=b} c_ab theta_a theta_b.
std::vector<double> fit_quadratic(const std::vector<CurveSample>& pts, double delta, int m, double& residual) {
    const int nc = m * (m + 1) / 2;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), nc);
    Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t r = 0; r < pts.size(); ++r) {
        int c = 0;
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) A(r, c++) = pts[r].theta[a] * pts[r].theta[b];
        y(r) = delta - pts[r].phi.real();
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    residual = (A * coef - y).cwiseAbs().maxCoeff();
    std::vector<double> Q(static_cast<std::size_t>(m) * m, 0.0);
    int c = 0;
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            const double v = coef(c++);
            if (a == b) {
                Q[a * m + a] = v;
            } else {
                Q[a * m + b] = Q[b * m + a] = 0.5 * v;
            }
        }
    return Q;
}

}  // namespace

ImplicitCurve implicit_curve(std::shared_ptr<const TransferBasis> basis, double delta, double epsilon,
                             const CurveOptions& opts) {
    const int m = basis->group().m();
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw ValidationError(kModule, "epsilon must lie in (0, 1/2)");
    if (opts.grid < 3 || opts.grid % 2 == 0) throw ValidationError(kModule, "curve grid must be odd and >= 3");
    long long total = 1;
    for (int k = 0; k < m; ++k) total *= opts.grid;
    if (total > 200'000) throw ValidationError(kModule, "curve grid too large");

    ImplicitCurve curve;
    curve.grid = opts.grid;
    curve.delta = delta;
    const int half = opts.grid / 2;
    for (int attempt = 0;; ++attempt) {
        curve.epsilon = epsilon;
        curve.shrinks = attempt;
        curve.samples.assign(static_cast<std::size_t>(total), {});
        std::vector<char> failed(static_cast<std::size_t>(total), 0);
        parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
            std::vector<double> t(m);
            long long idx = static_cast<long long>(i);
            for (int k = 0; k < m; ++k) {
                t[k] = epsilon * static_cast<double>(idx % opts.grid - half) / half;
                idx /= opts.grid;
            }
            try {
                const auto path = continue_zero(basis, delta, t, opts.continuation_steps, opts.refine);
                curve.samples[i] = path.back();
            } catch (const NumericalError&) {
                failed[i] = 1;
                curve.samples[i] = {t, cd(std::nan(""), 0.0)};
            }
        });
        if (std::find(failed.begin(), failed.end(), 1) == failed.end()) break;
        if (attempt >= opts.max_shrinks) {
            throw NumericalError(kModule, "implicit curve continuation failed after " +
                                              std::to_string(opts.max_shrinks) + " shrinks (epsilon " +
                                              std::to_string(epsilon) + ")");
        }
        epsilon *= 0.5;
    }

    // Invariants over the grid.
    const long long center = (total - 1) / 2;
    curve.phi0_error = std::abs(curve.samples[center].phi - delta);
    for (long long i = 0; i < total; ++i) {
        const cd phi = curve.samples[i].phi;
        curve.max_imag = std::max(curve.max_imag, std::abs(phi.imag()));
        curve.max_excess = std::max(curve.max_excess, phi.real() - delta);
        curve.symmetry_error = std::max(curve.symmetry_error, std::abs(phi - curve.samples[total - 1 - i].phi));
    }

    // Finite-difference gradient and Hessian of Re phi at 0.
    const double h = std::min(opts.fd_step, 0.25 * curve.epsilon);
    curve.fd_step = h;
    const auto phi_at = [&](const std::vector<double>& t) {
        return continue_zero(basis, delta, t, opts.continuation_steps, opts.refine).back().phi.real();
    };
    curve.gradient.assign(m, 0.0);
    curve.hessian.assign(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> plus(m), minus(m);
    for (int a = 0; a < m; ++a) {
        std::vector<double> e(m, 0.0);
        e[a] = h;
        plus[a] = phi_at(e);
        minus[a] = phi_at(negated(e));
        curve.gradient[a] = (plus[a] - minus[a]) / (2.0 * h);
        curve.hessian[a * m + a] = (plus[a] - 2.0 * delta + minus[a]) / (h * h);
    }
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            std::vector<double> pp(m, 0.0), pm(m, 0.0);
            pp[a] = h;
            pp[b] = h;
            pm[a] = h;
            pm[b] = -h;
            const double fpp = phi_at(pp), fmm = phi_at(negated(pp));
            const double fpm = phi_at(pm), fmp = phi_at(negated(pm));
            curve.hessian[a * m + b] = curve.hessian[b * m + a] = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    }
    Eigen::MatrixXd H(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) H(a, b) = curve.hessian[a * m + b];
    curve.hessian_det = H.determinant();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
    curve.negative_definite = ev.maxCoeff() < 0.0;

    // Quadratic model on the inner quarter of the box.
    std::vector<CurveSample> inner;
    for (const auto& smp : curve.samples) {
        double r = 0.0;
        for (double x : smp.theta) r = std::max(r, std::abs(x));
        if (r <= 0.25 * curve.epsilon + 1e-15) inner.push_back(smp);
    }
    if (inner.size() < static_cast<std::size_t>(m * (m + 1) / 2 + 1)) {
        // Grid too coarse for the inner box: sample it directly.
        inner.clear();
        const double r = 0.25 * curve.epsilon;
        for (int a = -2; a <= 2; ++a) {
            for (int b = -2; b <= 2; ++b) {
                std::vector<double> t(m, 0.0);
                t[0] = r * a / 2.0;
                if (m > 1) t[1] = r * b / 2.0;
                if (m == 1 && b != 0) continue;
                inner.push_back({t, cd(phi_at(t), 0.0)});
            }
        }
    }
    curve.Q = fit_quadratic(inner, delta, m, curve.quadratic_residual);
    Eigen::MatrixXd Qm(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) Qm(a, b) = curve.Q[a * m + b];
    curve.Q_positive_definite = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Qm).eigenvalues().minCoeff() > 0.0;
    return curve;
}

// ---------------------------------------------------------------------------

double kolmogorov_distance(std::vector<double> sample, const std::vector<double>& ref) {
    if (sample.empty() || ref.empty()) throw ValidationError(kModule, "Kolmogorov distance needs nonempty samples");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    const double r = static_cast<double>(ref.size());
    const auto ref_cdf = [&](double u, bool inclusive) {
        const auto it = inclusive ? std::upper_bound(ref.begin(), ref.end(), u) : std::lower_bound(ref.begin(), ref.end(), u);
        return static_cast<double>(it - ref.begin()) / r;
    };
    double d = 0.0;
    // The supremum is attained at a jump of the empirical CDF: check both sides.
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double u = sample[i];
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - ref_cdf(u, true)));
        d = std::max(d, std::abs(static_cast<double>(i) / n - ref_cdf(u, false)));
    }
    // Jumps of the reference matter too when it is itself a fine sample.
    for (double u : ref) {
        const double emp_hi = static_cast<double>(std::upper_bound(sample.begin(), sample.end(), u) - sample.begin()) / n;
        const double emp_lo = static_cast<double>(std::lower_bound(sample.begin(), sample.end(), u) - sample.begin()) / n;
        d = std::max(d, std::abs(emp_hi - ref_cdf(u, true)));
        d = std::max(d, std::abs(emp_lo - ref_cdf(u, false)));
    }
    return d;
}

EquidistributionResult equidistribution_experiment(std::shared_ptr<const TransferBasis> basis, double delta,
                                                   const std::vector<int>& Ns, const Rect& window,
                                                   const EquidistributionOptions& opts) {
    window.check(kModule);
    const int m = basis->group().m();
    if (Ns.empty()) throw ValidationError(kModule, "empty N sequence");
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) throw ValidationError(kModule, "quotient orders must increase");
    }
    if (opts.bins < 2 || opts.reference_samples < 16) throw ValidationError(kModule, "too few bins or reference samples");
    EquidistributionResult res;
    res.window = window;

    // Reference: phi along theta = (t, 0, ..., 0), continued outward from 0
    // until the zero leaves the window or t reaches 1/2.
    const int nref = opts.reference_samples;
    const double dt = 0.5 / (nref - 1);
    std::vector<double> phi_line(nref, std::nan(""));
    phi_line[0] = delta;
    double theta_max = 0.5;
    {
        cd s = delta;
        for (int i = 1; i < nref; ++i) {
            std::vector<double> t(m, 0.0);
            t[0] = i * dt;
            const AnalyticFunction f = determinant_function(basis, TwistSpec::abelian(t), false);
            RefineOptions ro{1e-6, 1e-13, 60, 1, 0.1};
            const RefineResult r = refine_zero(f, s, ro);
            if (!r.converged) {
                theta_max = (i - 1) * dt;
                break;
            }
            s = r.s;
            if (!window.contains(s)) {
                theta_max = (i - 1) * dt;
                break;
            }
            phi_line[i] = s.real();
        }
    }
    res.theta_max = theta_max;
    for (double u : phi_line) {
        if (std::isfinite(u)) res.reference_u.push_back(u);
    }
    // Lebesgue on [-theta_max, theta_max]: phi is even, so the half line with
    // the origin counted once per side is the same measure.
    std::vector<double> ref_sorted;
    for (std::size_t i = 0; i < res.reference_u.size(); ++i) {
        const double w = (i == 0 || i + 1 == res.reference_u.size()) ? 1 : 2;
        for (int c = 0; c < w; ++c) ref_sorted.push_back(res.reference_u[i]);
    }
    std::sort(ref_sorted.begin(), ref_sorted.end());

    res.bin_edges.resize(opts.bins + 1);
    for (int b = 0; b <= opts.bins; ++b) {
        res.bin_edges[b] = window.re_min + window.width() * b / opts.bins;
    }
    const auto histogram = [&](const std::vector<double>& xs) {
        std::vector<double> hgram(opts.bins, 0.0);
        for (double x : xs) {
            int b = static_cast<int>((x - window.re_min) / window.width() * opts.bins);
            b = std::clamp(b, 0, opts.bins - 1);
            hgram[b] += 1.0;
        }
        const double width = window.width() / opts.bins;
        for (double& v : hgram) v /= std::max<std::size_t>(1, xs.size()) * width;
        return hgram;
    };
    res.reference_density = histogram(ref_sorted);
    for (double e : res.bin_edges) {
        res.reference_cdf.push_back(static_cast<double>(std::upper_bound(ref_sorted.begin(), ref_sorted.end(), e) -
                                                        ref_sorted.begin()) /
                                    static_cast<double>(ref_sorted.size()));
    }

    // Mass above u behaves like (delta - u)^(a + 1); fit on the top tenth of the window.
    {
        std::vector<double> lx, ly;
        const double n = static_cast<double>(ref_sorted.size());
        for (int k = 1; k <= 20; ++k) {
            const double gap = 0.005 * window.width() * k;
            const double u = delta - gap;
            const double above = static_cast<double>(ref_sorted.end() -
                                                     std::upper_bound(ref_sorted.begin(), ref_sorted.end(), u)) / n;
            if (above <= 0.0 || above >= 1.0) continue;
            lx.push_back(std::log(gap));
            ly.push_back(std::log(above));
        }
        if (lx.size() >= 3) {
            const double xm = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
            const double ym = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
                sxy += (lx[i] - xm) * (ly[i] - ym);
                sxx += (lx[i] - xm) * (lx[i] - xm);
            }
            res.density_exponent = sxy / sxx - 1.0;
        } else {
            res.density_exponent = std::nan("");
        }
    }

    for (int N : Ns) {
        std::vector<int> moduli(m, 1);
        moduli[0] = N;
        const AbelianQuotient q(moduli);
        CoverOptions co = opts.cover;
        co.order_cap = std::max(co.order_cap, q.order());
        const CoverZeros cz = cover_zeta_zeros(basis, q, window, co);
        EquidistributionRow row;
        row.N = N;
        row.order = q.order();
        for (const auto& c : cz.characters) row.characters_searched += c.searched ? 1 : 0;
        for (const auto& c : cz.characters) {
            for (const auto& z : c.set.zeros) {
                if (!window.contains(z.s)) continue;
                if (std::abs(z.s.imag()) > 1e-7) row.nonreal += z.multiplicity;
                row.zeros.push_back({c.alpha, z.s, z.multiplicity});
                for (int k = 0; k < z.multiplicity; ++k) row.positions.push_back(z.s.real());
            }
        }
        std::sort(row.positions.begin(), row.positions.end());
        row.zeros_in_window = static_cast<int>(row.positions.size());
        row.count_per_order = static_cast<double>(row.zeros_in_window) / row.order;
        row.kolmogorov = row.positions.empty() ? 1.0 : kolmogorov_distance(row.positions, ref_sorted);
        res.histograms.push_back(histogram(row.positions));
        res.rows.push_back(std::move(row));
    }
    return res;
}

// ---------------------------------------------------------------------------

FactorizationReport factorization_check(std::shared_ptr<const TransferBasis> basis, const AbelianQuotient& q,
                                        const Rect& sample_rect, const Rect& zero_rect, int samples,
                                        std::uint64_t seed, const ResonanceOptions& ropts) {
    sample_rect.check(kModule);
    zero_rect.check(kModule);
    if (samples < 1) throw ValidationError(kModule, "factorization check needs at least one sample");
    FactorizationReport rep;
    rep.order = q.order();
    const TwistSpec regular = TwistSpec::regular(FiniteQuotient::abelian(q.moduli));
    std::vector<TwistSpec> chars;
    for (int i = 0; i < rep.order; ++i) chars.push_back(TwistSpec::abelian(q.theta(q.alpha(i))));

    std::mt19937_64 rng(seed);
    const auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int k = 0; k < samples; ++k) {
        rep.points.emplace_back(sample_rect.re_min + sample_rect.width() * unit(),
                                sample_rect.im_min + sample_rect.height() * unit());
    }
    std::vector<double> rel(rep.points.size());
    parallel_for(rep.points.size(), [&](std::size_t i) {
        const cd s = rep.points[i];
        const cd reg = fredholm_det(assemble(*basis, s, regular));
        cd prod = 1.0;
        for (const auto& t : chars) prod *= fredholm_det(assemble(*basis, s, t));
        rel[i] = std::abs(reg - prod) / std::abs(reg);
    });
    rep.max_relative = *std::max_element(rel.begin(), rel.end());

    const ResonanceSet rz = resonances(determinant_function(basis, regular), zero_rect, ropts);
    CoverOptions co;
    co.order_cap = std::max(co.order_cap, rep.order);
    co.resonance = ropts;
    const CoverZeros cz = cover_zeta_zeros(basis, q, zero_rect, co);
    std::vector<cd> a, b;
    for (const auto& z : rz.zeros)
        for (int k = 0; k < z.multiplicity; ++k) a.push_back(z.s);
    for (const auto& c : cz.characters)
        for (const auto& z : c.set.zeros)
            for (int k = 0; k < z.multiplicity; ++k) b.push_back(z.s);
    rep.regular_zeros = static_cast<int>(a.size());
    rep.character_zeros = static_cast<int>(b.size());
    if (a.size() != b.size()) {
        rep.zero_match = std::numeric_limits<double>::infinity();
        return rep;
    }
    // Greedy matching: each regular zero takes its nearest unused partner.
    std::vector<char> used(b.size(), 0);
    for (const cd& z : a) {
        std::size_t best = b.size();
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && std::abs(b[j] - z) < bd) {
                bd = std::abs(b[j] - z);
                best = j;
            }
        }
        used[best] = 1;
        rep.zero_match = std::max(rep.zero_match, bd);
    }
    return rep;
}

}  // namespace reslab
