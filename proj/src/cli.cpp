#include "reslab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "reslab/abelian.hpp"
#include "reslab/cayley.hpp"
#include "reslab/congruence.hpp"
#include "reslab/error.hpp"
#include "reslab/explicit_formula.hpp"
#include "reslab/io.hpp"
#include "reslab/parallel.hpp"
#include "reslab/thermo.hpp"
#include "reslab/transfer.hpp"

namespace reslab::cli {

using nlohmann::json;

namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void fail(const std::string& what) { throw ValidationError(kModule, what); }

template <class T>
T get_number(const json& j, const std::string& key) {
    if (!j.is_number()) fail("'" + key + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!j.is_number_integer() && !j.is_number_unsigned()) {
            const double v = j.get<double>();
            if (v != std::floor(v)) fail("'" + key + "' must be an integer");
        }
    }
    return j.get<T>();
}

template <class T>
void in_range(const std::string& key, T v, T lo, T hi) {
    if (!(v >= lo && v <= hi)) {
        std::ostringstream msg;
        msg << "'" << key << "' = " << v << " outside [" << lo << ", " << hi << "]";
        fail(msg.str());
    }
}

void open_range(const std::string& key, double v, double lo, double hi) {
    if (!(v > lo && v < hi)) {
        std::ostringstream msg;
        msg << "'" << key << "' = " << v << " outside (" << lo << ", " << hi << ")";
        fail(msg.str());
    }
}

Rect parse_rect(const json& j, const std::string& key) {
    std::vector<double> v;
    if (j.is_string()) {
        std::stringstream ss(j.get<std::string>());
        std::string part;
        while (std::getline(ss, part, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(part, &used));
                if (used != part.size()) fail("'" + key + "' has a malformed number: " + part);
            } catch (const std::logic_error&) {
                fail("'" + key + "' has a malformed number: " + part);
            }
        }
    } else if (j.is_array()) {
        for (const auto& x : j) v.push_back(get_number<double>(x, key));
    } else {
        fail("'" + key + "' must be [re_min, re_max, im_min, im_max] or \"a,b,c,d\"");
    }
    if (v.size() != 4) fail("'" + key + "' needs 4 numbers");
    Rect r{v[0], v[1], v[2], v[3]};
    if (!(r.re_min < r.re_max && r.im_min < r.im_max)) fail("'" + key + "' is empty");
    for (double x : v) {
        if (!std::isfinite(x) || std::abs(x) > 50.0) fail("'" + key + "' entries must lie in [-50, 50]");
    }
    return r;
}

template <class T>
std::vector<T> parse_list(const json& j, const std::string& key) {
    if (!j.is_array()) fail("'" + key + "' must be an array");
    std::vector<T> out;
    for (const auto& x : j) out.push_back(get_number<T>(x, key));
    return out;
}

json rect_json(const Rect& r) { return json::array({r.re_min, r.re_max, r.im_min, r.im_max}); }

std::string join(const std::vector<int>& v, char sep = ';') {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

struct Context {
    const ExperimentConfig& c;
    RunResult& res;
    std::string prefix;

    std::string path(const std::string& name) const {
        return (std::filesystem::path(c.output_dir) / (prefix + name)).string();
    }
    void write(const std::string& name, const std::string& content) {
        const std::string p = path(name);
        write_atomic(p, content);
        res.outputs.push_back(p);
    }
    void write_json(const std::string& name, json body) {
        body["schema_version"] = kSchemaVersion;
        body["experiment"] = experiment_name(c.experiment);
        body["config"] = to_json(c);
        write(name, body.dump(2) + "\n");
    }
    void svg(const std::string& name, const SvgPlot& plot) { write(name, render_svg(plot)); }
};

SchottkyGroup checked_group(const ExperimentConfig& c) {
    SchottkyGroup g = build_group(c.group);
    const ValidationReport rep = validate(g);
    if (!rep.ok()) {
        for (const auto& chk : rep.checks) {
            if (!chk.passed) fail("group '" + g.name() + "' fails check " + chk.name + ": " + chk.detail);
        }
    }
    return g;
}

json zeros_json(const std::vector<ZeroEntry>& zs) {
    json a = json::array();
    for (const auto& z : zs) {
        a.push_back({{"re", z.s.real()}, {"im", z.s.imag()}, {"multiplicity", z.multiplicity},
                     {"residual", z.residual}, {"resolved", z.resolved}});
    }
    return a;
}

// ---------------------------------------------------------------------------

void run_validate(Context& ctx) {
    const SchottkyGroup g = build_group(ctx.c.group);
    const ValidationReport rep = validate(g);
    json checks = json::array();
    for (const auto& chk : rep.checks) {
        checks.push_back({{"name", chk.name}, {"passed", chk.passed}, {"margin", chk.margin}, {"detail", chk.detail}});
    }
    CsvTable geo({"word", "length", "trace", "homology"});
    if (rep.ok()) {
        for (const auto& gc : primitive_classes_to_depth(g, ctx.c.word_depth)) {
            geo.row({format_word(gc.word), cell(gc.length),
                     gc.int_trace ? std::to_string(*gc.int_trace) : cell(gc.trace), join(gc.homology)});
        }
        ctx.write("geodesics.csv", geo.str());
    }
    ctx.write_json("validate.json", {{"group", g.name()},
                                     {"m", g.m()},
                                     {"ok", rep.ok()},
                                     {"min_gap", rep.min_gap},
                                     {"max_boundary_residual", rep.max_boundary_residual},
                                     {"checks", checks},
                                     {"geodesic_count", geo.rows()}});
    std::ostringstream s;
    s << "validate " << g.name() << ": " << (rep.ok() ? "ok" : "FAILED") << ", min gap " << format_double(rep.min_gap)
      << ", " << geo.rows() << " primitive classes to depth " << ctx.c.word_depth;
    ctx.res.summary = s.str();
    if (!rep.ok()) ctx.res.status = 2;
}

void run_delta(Context& ctx) {
    const SchottkyGroup g = checked_group(ctx.c);
    std::vector<double> sigmas;
    for (int i = 0; i <= 20; ++i) sigmas.push_back(0.05 * i);
    const PressureCurve pc = pressure_curve(g, sigmas, ctx.c.lmax, ctx.c.tol);
    CsvTable t({"sigma", "pressure"});
    for (const auto& [s, P] : pc.samples) t.row({cell(s), cell(P)});
    ctx.write("pressure.csv", t.str());
    ctx.write_json("delta.json", {{"group", g.name()}, {"delta", pc.delta}, {"lmax", ctx.c.lmax}});
    ctx.res.summary = format_double(pc.delta);
}

Rect default_rect(const ExperimentConfig& c) { return c.rect.value_or(Rect{-0.5, 1.0, 0.0, 7.0}); }

void run_zeta_scan(Context& ctx) {
    const SchottkyGroup g = checked_group(ctx.c);
    const Rect r = default_rect(ctx.c);
    const int n = ctx.c.grid;
    std::vector<cd> pts;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            pts.emplace_back(r.re_min + r.width() * i / (n - 1), r.im_min + r.height() * j / (n - 1));
        }
    }
    const AnalyticFunction f = determinant_function(g, TwistSpec::trivial(), ctx.c.lmax);
    const std::vector<cd> vals = f.batch(pts);
    CsvTable t({"re", "im", "abs", "arg"});
    double mn = INFINITY;
    cd at;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        t.row({cell(pts[k].real()), cell(pts[k].imag()), cell(std::abs(vals[k])), cell(std::arg(vals[k]))});
        if (std::abs(vals[k]) < mn) {
            mn = std::abs(vals[k]);
            at = pts[k];
        }
    }
    ctx.write("zeta_scan.csv", t.str());
    ctx.write_json("zeta_scan.json", {{"group", g.name()},
                                      {"rect", rect_json(r)},
                                      {"grid", n},
                                      {"min_abs", mn},
                                      {"argmin", {at.real(), at.imag()}}});
    std::ostringstream s;
    s << "zeta-scan " << g.name() << ": " << pts.size() << " points, min |det| " << format_double(mn);
    ctx.res.summary = s.str();
}

void run_resonances(Context& ctx) {
    const SchottkyGroup g = checked_group(ctx.c);
    const Rect r = default_rect(ctx.c);
    auto basis = std::make_shared<const TransferBasis>(g, ctx.c.lmax);
    const double delta = critical_exponent(*basis, ctx.c.tol);
    const ResonanceSet rs = resonances(determinant_function(basis, TwistSpec::trivial()), r);
    CsvTable t({"re", "im", "multiplicity", "residual"});
    SvgPlot plot;
    plot.title = "Resonances of " + g.name();
    plot.xlabel = "Re(s)";
    plot.ylabel = "Im(s)";
    SvgSeries pts;
    pts.label = "zeros";
    for (const auto& z : rs.zeros) {
        t.row({cell(z.s.real()), cell(z.s.imag()), cell(z.multiplicity), cell(z.residual)});
        pts.points.push_back({z.s.real(), z.s.imag(), static_cast<double>(z.multiplicity)});
    }
    plot.series.push_back(pts);
    plot.markers.push_back({"delta", delta});
    ctx.write("resonances.csv", t.str());
    ctx.svg("resonances.svg", plot);
    ctx.write_json("resonances.json", {{"group", g.name()},
                                       {"delta", delta},
                                       {"rect", rect_json(r)},
                                       {"contour_count", rs.contour_count},
                                       {"total_multiplicity", rs.total_multiplicity()},
                                       {"zeros", zeros_json(rs.zeros)},
                                       {"unresolved", rs.unresolved}});
    std::ostringstream s;
    s << "resonances " << g.name() << ": " << rs.zeros.size() << " distinct zeros, total multiplicity "
      << rs.total_multiplicity() << (rs.unresolved.empty() ? "" : " (some unresolved)");
    ctx.res.summary = s.str();
}

Rect default_window(const ExperimentConfig& c, double delta) {
    return c.window.value_or(Rect{delta - 0.1, delta + 0.02, -0.05, 0.05});
}

void run_cover_abelian(Context& ctx) {
    const SchottkyGroup g = checked_group(ctx.c);
    auto basis = std::make_shared<const TransferBasis>(g, ctx.c.lmax);
    const double delta = critical_exponent(*basis, ctx.c.tol);
    std::vector<int> moduli = ctx.c.moduli.empty() ? std::vector<int>(g.m(), 2) : ctx.c.moduli;
    const AbelianQuotient q(moduli);
    const Rect r = ctx.c.rect.value_or(default_window(ctx.c, delta));
    const CoverZeros cz = cover_zeta_zeros(basis, q, r);
    CsvTable t({"alpha", "re", "im", "multiplicity"});
    for (const auto& ch : cz.characters) {
        for (const auto& z : ch.set.zeros) {
            t.row({join(ch.alpha), cell(z.s.real()), cell(z.s.imag()), cell(z.multiplicity)});
        }
    }
    ctx.write("cover_zeros.csv", t.str());

    const NonvanishingScan nv = nonvanishing_scan(basis, delta, ctx.c.grid);
    ImplicitCurve curve;
    json curve_json;
    try {
        curve = implicit_curve(basis, delta, ctx.c.curve_epsilon);
        CsvTable ct([&] {
            std::vector<std::string> h;
            for (int k = 0; k < g.m(); ++k) h.push_back("theta" + std::to_string(k + 1));
            h.push_back("re");
            h.push_back("im");
            return h;
        }());
        for (const auto& smp : curve.samples) {
            std::vector<std::string> row;
            for (double x : smp.theta) row.push_back(cell(x));
            row.push_back(cell(smp.phi.real()));
            row.push_back(cell(smp.phi.imag()));
            ct.row(row);
        }
        ctx.write("implicit_curve.csv", ct.str());
        curve_json = {{"epsilon", curve.epsilon},
                      {"shrinks", curve.shrinks},
                      {"max_imag", curve.max_imag},
                      {"max_excess", curve.max_excess},
                      {"symmetry_error", curve.symmetry_error},
                      {"phi0_error", curve.phi0_error},
                      {"gradient", curve.gradient},
                      {"hessian", curve.hessian},
                      {"hessian_det", curve.hessian_det},
                      {"negative_definite", curve.negative_definite},
                      {"Q", curve.Q},
                      {"quadratic_residual", curve.quadratic_residual}};
    } catch (const NumericalError& e) {
        curve_json = {{"error", e.what()}};
    }
    json chars = json::array();
    for (const auto& ch : cz.characters) {
        chars.push_back({{"alpha", ch.alpha}, {"theta", ch.theta}, {"zeros", zeros_json(ch.set.zeros)}});
    }
    ctx.write_json("cover_abelian.json",
                   {{"group", g.name()},
                    {"delta", delta},
                    {"moduli", moduli},
                    {"rect", rect_json(r)},
                    {"total_multiplicity", cz.total_multiplicity},
                    {"union", zeros_json(cz.zeros)},
                    {"characters", chars},
                    {"nonvanishing", {{"grid", nv.grid},
                                      {"min_distance", nv.min_distance},
                                      {"min_modulus", nv.min_modulus},
                                      {"argmin", nv.argmin},
                                      {"residual_at_zero", nv.residual_at_zero},
                                      {"symmetry_error", nv.symmetry_error}}},
                    {"implicit_curve", curve_json}});
    std::ostringstream s;
    s << "cover-abelian " << g.name() << " Z/(" << join(moduli, 'x') << "): " << cz.total_multiplicity
      << " zeros in rect, scan min " << format_double(nv.min_modulus) << " vs residual "
      << format_double(nv.residual_at_zero);
    ctx.res.summary = s.str();
}

void run_equidist(Context& ctx) {
    const SchottkyGroup g = checked_group(ctx.c);
    auto basis = std::make_shared<const TransferBasis>(g, ctx.c.lmax);
    const double delta = critical_exponent(*basis, ctx.c.tol);
    const Rect w = default_window(ctx.c, delta);
    EquidistributionOptions opts;
    opts.bins = ctx.c.bins;
    opts.cover.order_cap = std::max(64, ctx.c.Ns.back());
    const EquidistributionResult er = equidistribution_experiment(basis, delta, ctx.c.Ns, w, opts);

    CsvTable zt({"N", "alpha", "re", "im", "multiplicity"});
    for (const auto& row : er.rows) {
        for (const auto& z : row.zeros) {
            zt.row({cell(row.N), join(z.alpha), cell(z.s.real()), cell(z.s.imag()), cell(z.multiplicity)});
        }
    }
    ctx.write("equidist_zeros.csv", zt.str());

    std::vector<std::string> header{"bin_lo", "bin_hi", "reference"};
    for (const auto& row : er.rows) header.push_back("N" + std::to_string(row.N));
    CsvTable ht(header);
    for (int b = 0; b < ctx.c.bins; ++b) {
        std::vector<std::string> cells{cell(er.bin_edges[b]), cell(er.bin_edges[b + 1]), cell(er.reference_density[b])};
        for (const auto& h : er.histograms) cells.push_back(cell(h[b]));
        ht.row(cells);
    }
    ctx.write("equidist_histogram.csv", ht.str());

    SvgPlot plot;
    plot.title = "Zeros near delta vs reference density";
    plot.xlabel = "Re(s)";
    plot.ylabel = "density";
    static const char* colors[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const auto step_series = [&](const std::vector<double>& dens, std::string label, std::string color) {
        SvgSeries s;
        s.label = std::move(label);
        s.color = std::move(color);
        s.steps = true;
        for (int b = 0; b < ctx.c.bins; ++b) s.points.push_back({er.bin_edges[b], dens[b], 1.0});
        s.points.push_back({er.bin_edges.back(), dens.back(), 1.0});
        return s;
    };
    plot.series.push_back(step_series(er.reference_density, "reference", "#ff7f0e"));
    for (std::size_t i = 0; i < er.rows.size(); ++i) {
        plot.series.push_back(step_series(er.histograms[i], "N = " + std::to_string(er.rows[i].N), colors[i % 6]));
    }
    plot.markers.push_back({"delta", delta});
    ctx.svg("equidist.svg", plot);

    json rows = json::array();
    for (const auto& row : er.rows) {
        rows.push_back({{"N", row.N},
                        {"order", row.order},
                        {"characters_searched", row.characters_searched},
                        {"zeros_in_window", row.zeros_in_window},
                        {"nonreal", row.nonreal},
                        {"count_per_order", row.count_per_order},
                        {"kolmogorov", row.kolmogorov}});
    }
    ctx.write_json("equidist.json", {{"group", g.name()},
                                     {"delta", delta},
                                     {"window", rect_json(w)},
                                     {"theta_max", er.theta_max},
                                     {"density_exponent", er.density_exponent},
                                     {"rows", rows}});
    std::ostringstream s;
    s << "equidist " << g.name() << ": Kolmogorov";
    for (const auto& row : er.rows) s << " N=" << row.N << ":" << format_double(row.kolmogorov);
    ctx.res.summary = s.str();
}

void run_congruence(Context& ctx) {
    const SchottkyGroup g = checked_group(ctx.c);
    const std::int64_t p = ctx.c.p;
    const auto& tr = ctx.c.T_range;
    std::vector<double> Ts, sm, sm2;
    for (int i = 0;; ++i) {
        const double T = tr[0] + i * tr[2];
        if (T > tr[1] + 1e-9) break;
        Ts.push_back(T);
    }
    const GeodesicTable table = primitive_geodesics(g, tr[1], 40);
    if (!table.complete) fail("geodesic table incomplete at T = " + format_double(tr[1]));
    const std::vector<ClassPower> powers = class_powers(g, table.classes, tr[1]);
    TraceTable last;
    for (double T : Ts) {
        last = trace_multiplicities(powers, T);
        sm.push_back(static_cast<double>(last.sum_m));
        sm2.push_back(static_cast<double>(last.sum_m2));
    }
    CsvTable t({"t", "m"});
    for (const auto& [trace, count] : last.m) t.row({cell(static_cast<long long>(trace)), cell(static_cast<long long>(count))});
    ctx.write("trace_table.csv", t.str());
    CsvTable gt({"T", "sum_m", "sum_m2"});
    for (std::size_t i = 0; i < Ts.size(); ++i) gt.row({cell(Ts[i]), cell(sm[i]), cell(sm2[i])});
    ctx.write("trace_growth.csv", gt.str());

    const double b1 = fit_growth_exponent(Ts, sm), b2 = fit_growth_exponent(Ts, sm2);
    const double c1 = fit_growth_exponent(Ts, sm, 1.0), c2 = fit_growth_exponent(Ts, sm2, 2.0);
    const Conj1Report cr = conj1_check(g, p, ctx.c.beta);
    const TestFunction phi0 = build_test_function(ctx.c.epsilon, ctx.c.J, 1 << 12);
    const CharacterAverage ca = character_average(g, p, ctx.c.T, [&](double x) { return phi0(x); });
    const ClassStatistics cs = class_statistics(p, 31);
    std::int64_t class_sum = 0;
    for (const auto& st : cs.classes) class_sum += st.size;
    json violations = json::array();
    for (const auto& v : cr.violations) {
        violations.push_back({{"first", v.first}, {"second", v.second}, {"trace_first", v.trace_first},
                              {"trace_second", v.trace_second}, {"same_trace", v.same_trace}});
    }
    ctx.write_json("congruence.json",
                   {{"group", g.name()},
                    {"p", p},
                    {"T", ctx.c.T},
                    {"beta", ctx.c.beta},
                    {"S", ca.S},
                    {"lower_bound", ca.lower_bound},
                    {"paired_count", ca.paired_count},
                    {"ratio", ca.ratio},
                    {"fitted_exponents", {{"sum_m", b1}, {"sum_m2", b2}, {"sum_m_corrected", c1}, {"sum_m2_corrected", c2}}},
                    {"class_count", cs.classes.size()},
                    {"class_equation_sum", class_sum},
                    {"group_order", cs.group_order},
                    {"classes_verified", cs.verified},
                    {"conj1", {{"T", cr.T}, {"classes", cr.classes}, {"pairs_checked", cr.pairs_checked},
                               {"violation_count", cr.violation_count}, {"violations", violations}}}});
    std::ostringstream s;
    s << "congruence " << g.name() << " p=" << p << ": S=" << format_double(ca.S) << ", growth exponents "
      << format_double(b1) << " / " << format_double(b2) << ", conj1 violations " << cr.violation_count;
    ctx.res.summary = s.str();
}

void run_explicit_formula(Context& ctx) {
    const TestFunction phi0 = build_test_function(ctx.c.epsilon, ctx.c.J, ctx.c.fn_points);
    CsvTable t({"x", "phi0"});
    for (std::size_t i = 0; i < phi0.x.size(); ++i) t.row({cell(phi0.x[i]), cell(phi0.values[i])});
    ctx.write("test_function.csv", t.str());
    const EnvelopeReport env = fourier_envelope_check(phi0);
    double min_value = INFINITY;
    for (double v : phi0.values) min_value = std::min(min_value, v);
    ctx.write_json("explicit_formula.json", {{"epsilon", phi0.epsilon},
                                             {"J", phi0.J},
                                             {"C", phi0.C},
                                             {"mu", phi0.mu},
                                             {"width_sum", phi0.width_sum},
                                             {"deficit", phi0.deficit},
                                             {"support", phi0.support},
                                             {"mass", phi0.mass()},
                                             {"min_value", min_value},
                                             {"grid_points", phi0.x.size()},
                                             {"coarse", phi0.coarse},
                                             {"envelope", {{"xi_min", env.xi_min},
                                                           {"xi_max", env.xi_max},
                                                           {"alpha", env.alpha},
                                                           {"C2", env.C2},
                                                           {"logC1", env.logC1},
                                                           {"rms_subexp", env.rms_subexp},
                                                           {"rms_power", env.rms_power},
                                                           {"power_exponent", env.power_exponent},
                                                           {"order_low", env.order_low},
                                                           {"order_high", env.order_high},
                                                           {"holds", env.holds}}}});
    std::ostringstream s;
    s << "explicit-formula J=" << phi0.J << ": mass " << format_double(phi0.mass()) << ", support "
      << format_double(phi0.support) << ", C2 " << format_double(env.C2);
    ctx.res.summary = s.str();
}

void run_cayley(Context& ctx) {
    const GapDecayTable gd = gap_decay_experiment(ctx.c.cayley_Ns, {}, {{1}, {-1}});
    CsvTable t({"N", "lambda1", "lambda1_N2", "h", "h_exact"});
    SvgPlot plot;
    plot.title = "Spectral gap of Z/N with S = {+1, -1}";
    plot.xlabel = "N";
    plot.ylabel = "lambda1";
    plot.log_x = plot.log_y = true;
    SvgSeries s;
    s.label = "lambda1";
    s.line = true;
    for (const auto& r : gd.rows) {
        t.row({cell(r.N), cell(r.lambda1), cell(r.scaled), cell(r.h), r.h_exact ? "1" : "0"});
        s.points.push_back({static_cast<double>(r.N), r.lambda1, 1.0});
    }
    plot.series.push_back(s);
    ctx.write("cayley.csv", t.str());
    ctx.svg("cayley.svg", plot);

    CsvTable st({"N", "lambda1", "h", "lower", "upper", "upper_checked", "upper_alt", "ok"});
    json sw = json::array();
    int failures = 0;
    for (int N = ctx.c.sandwich_range[0]; N <= ctx.c.sandwich_range[1]; ++N) {
        const SandwichReport r = sandwich_check(CayleyGraph::cycle(N));
        st.row({cell(N), cell(r.lambda1), cell(r.h), cell(r.lower), cell(r.upper), r.upper_checked ? "1" : "0",
                cell(r.upper_alt), r.ok() ? "1" : "0"});
        sw.push_back({{"N", N}, {"lambda1", r.lambda1}, {"h", r.h}, {"h_exact", r.h_exact}, {"lower", r.lower},
                      {"upper", r.upper}, {"upper_checked", r.upper_checked}, {"upper_alt", r.upper_alt},
                      {"lower_ok", r.lower_ok}, {"upper_ok", r.upper_ok}});
        failures += r.ok() ? 0 : 1;
    }
    ctx.write("sandwich.csv", st.str());
    ctx.write_json("cayley.json", {{"limit", gd.limit},
                                   {"relative_spread", gd.relative_spread},
                                   {"fitted_power", gd.fitted_power},
                                   {"sandwich", sw},
                                   {"sandwich_failures", failures}});
    std::ostringstream o;
    o << "cayley: lambda1 N^2 -> " << format_double(gd.limit) << " (spread " << format_double(gd.relative_spread)
      << "), sandwich failures " << failures;
    ctx.res.summary = o.str();
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"validate",   "delta",    "zeta-scan",
                                                "resonances", "cover-abelian", "equidist",
                                                "congruence", "explicit-formula", "cayley"};
    return names;
}

Experiment parse_experiment(const std::string& name) {
    const auto& n = experiment_names();
    const auto it = std::find(n.begin(), n.end(), name);
    if (it == n.end()) fail("unknown experiment '" + name + "'");
    return static_cast<Experiment>(it - n.begin());
}

std::string experiment_name(Experiment e) { return experiment_names().at(static_cast<std::size_t>(e)); }

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) fail("config must be a JSON object");
    static const std::set<std::string> known{
        "experiment", "group", "lmax",  "word_depth", "rect", "grid", "tol", "threads", "seed",
        "output_dir", "moduli", "Ns",   "window",     "curve_epsilon", "bins", "p",   "beta", "T",
        "T_range",    "epsilon", "J",   "fn_points",  "cayley_Ns",  "sandwich_range"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) fail("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    if (!j.contains("experiment") || !j["experiment"].is_string()) fail("'experiment' is required");
    c.experiment = parse_experiment(j["experiment"].get<std::string>());
    if (j.contains("group")) {
        c.group = j["group"];
        if (!c.group.is_string() && !c.group.is_object()) fail("'group' must be a preset name or an object");
    }
    if (j.contains("lmax")) c.lmax = get_number<int>(j["lmax"], "lmax");
    in_range("lmax", c.lmax, 4, 256);
    if (j.contains("word_depth")) c.word_depth = get_number<int>(j["word_depth"], "word_depth");
    in_range("word_depth", c.word_depth, 1, 20);
    if (j.contains("rect")) c.rect = parse_rect(j["rect"], "rect");
    if (j.contains("grid")) c.grid = get_number<int>(j["grid"], "grid");
    in_range("grid", c.grid, 2, 1024);
    if (j.contains("tol")) c.tol = get_number<double>(j["tol"], "tol");
    if (!(c.tol > 0.0 && c.tol <= 1e-2)) fail("'tol' must lie in (0, 1e-2]");
    if (j.contains("threads")) c.threads = get_number<int>(j["threads"], "threads");
    in_range("threads", c.threads, 0, 256);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
            fail("'seed' must be a nonnegative integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty()) fail("'output_dir' must be a path");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("moduli")) {
        c.moduli = parse_list<int>(j["moduli"], "moduli");
        for (int N : c.moduli) in_range("moduli entry", N, 1, 64);
    }
    if (j.contains("Ns")) {
        c.Ns = parse_list<int>(j["Ns"], "Ns");
        if (c.Ns.empty()) fail("'Ns' is empty");
        for (int N : c.Ns) in_range("Ns entry", N, 1, 1024);
        for (std::size_t i = 1; i < c.Ns.size(); ++i) {
            if (c.Ns[i] <= c.Ns[i - 1]) fail("'Ns' must increase");
        }
    }
    if (j.contains("window")) c.window = parse_rect(j["window"], "window");
    if (j.contains("curve_epsilon")) c.curve_epsilon = get_number<double>(j["curve_epsilon"], "curve_epsilon");
    open_range("curve_epsilon", c.curve_epsilon, 0.0, 0.5);
    if (j.contains("bins")) c.bins = get_number<int>(j["bins"], "bins");
    in_range("bins", c.bins, 2, 1000);
    if (j.contains("p")) c.p = get_number<std::int64_t>(j["p"], "p");
    if (!(c.p > 3 && c.p < (std::int64_t{1} << 31) && is_prime(c.p))) fail("'p' must be an odd prime > 3 below 2^31");
    if (j.contains("beta")) c.beta = get_number<double>(j["beta"], "beta");
    open_range("beta", c.beta, 0.0, 2.0);
    if (j.contains("T")) c.T = get_number<double>(j["T"], "T");
    if (!(c.T > 0.0 && c.T <= 30.0)) fail("'T' must lie in (0, 30]");
    if (j.contains("T_range")) {
        c.T_range = parse_list<double>(j["T_range"], "T_range");
        if (c.T_range.size() != 3) fail("'T_range' needs [min, max, step]");
    }
    if (!(c.T_range[0] > 0.0 && c.T_range[1] > c.T_range[0] && c.T_range[1] <= 30.0 && c.T_range[2] > 0.0 &&
          (c.T_range[1] - c.T_range[0]) / c.T_range[2] <= 10000)) {
        fail("'T_range' must satisfy 0 < min < max <= 30 with a positive step");
    }
    if (j.contains("epsilon")) c.epsilon = get_number<double>(j["epsilon"], "epsilon");
    if (!(c.epsilon > 0.0 && c.epsilon <= 4.0)) fail("'epsilon' must lie in (0, 4]");
    if (j.contains("J")) c.J = get_number<int>(j["J"], "J");
    in_range("J", c.J, 1, 64);
    if (j.contains("fn_points")) c.fn_points = get_number<int>(j["fn_points"], "fn_points");
    in_range("fn_points", c.fn_points, 16, 1 << 22);
    if (j.contains("cayley_Ns")) {
        c.cayley_Ns = parse_list<int>(j["cayley_Ns"], "cayley_Ns");
        if (c.cayley_Ns.empty()) fail("'cayley_Ns' is empty");
        for (int N : c.cayley_Ns) in_range("cayley_Ns entry", N, 3, 1'000'000);
    }
    if (j.contains("sandwich_range")) {
        c.sandwich_range = parse_list<int>(j["sandwich_range"], "sandwich_range");
        if (c.sandwich_range.size() != 2) fail("'sandwich_range' needs [min, max]");
    }
    if (!(c.sandwich_range[0] >= 3 && c.sandwich_range[1] >= c.sandwich_range[0] && c.sandwich_range[1] <= 24)) {
        fail("'sandwich_range' must satisfy 3 <= min <= max <= 24");
    }
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j{{"experiment", experiment_name(c.experiment)},
           {"group", c.group},
           {"lmax", c.lmax},
           {"word_depth", c.word_depth},
           {"grid", c.grid},
           {"tol", c.tol},
           {"seed", c.seed},
           {"Ns", c.Ns},
           {"curve_epsilon", c.curve_epsilon},
           {"bins", c.bins},
           {"p", c.p},
           {"beta", c.beta},
           {"T", c.T},
           {"T_range", c.T_range},
           {"epsilon", c.epsilon},
           {"J", c.J},
           {"fn_points", c.fn_points},
           {"cayley_Ns", c.cayley_Ns},
           {"sandwich_range", c.sandwich_range}};
    // threads and output_dir are left out: they must not change the outputs.
    if (c.rect) j["rect"] = rect_json(*c.rect);
    if (c.window) j["window"] = rect_json(*c.window);
    if (!c.moduli.empty()) j["moduli"] = c.moduli;
    return j;
}

SchottkyGroup build_group(const json& g) {
    if (g.is_string()) return preset_by_name(g.get<std::string>());
    if (!g.is_object()) fail("group must be a preset name or an object");
    if (g.contains("preset")) {
        if (g.size() != 1 || !g["preset"].is_string()) fail("group object with 'preset' takes no other keys");
        return preset_by_name(g["preset"].get<std::string>());
    }
    static const std::set<std::string> known{"m", "discs", "generators", "name"};
    for (const auto& [key, value] : g.items()) {
        if (!known.count(key)) fail("unknown group key '" + key + "'");
    }
    if (!g.contains("m") || !g.contains("discs") || !g.contains("generators")) {
        fail("group object needs 'm', 'discs' and 'generators'");
    }
    const int m = get_number<int>(g["m"], "m");
    in_range("m", m, 1, 8);
    if (!g["discs"].is_array() || static_cast<int>(g["discs"].size()) != 2 * m) fail("'discs' needs 2m entries");
    if (!g["generators"].is_array() || static_cast<int>(g["generators"].size()) != m) fail("'generators' needs m entries");
    std::vector<Disc> discs;
    for (const auto& d : g["discs"]) {
        if (!d.is_object() || !d.contains("center") || !d.contains("radius") || d.size() != 2) {
            fail("each disc is {\"center\": x, \"radius\": r}");
        }
        const Disc disc{get_number<double>(d["center"], "center"), get_number<double>(d["radius"], "radius")};
        if (!(disc.radius > 0.0) || !std::isfinite(disc.center)) fail("disc radius must be positive");
        discs.push_back(disc);
    }
    std::vector<MoebiusMap> gens;
    std::vector<IntMatrix> ints;
    bool integer = true;
    for (const auto& M : g["generators"]) {
        if (!M.is_array() || M.size() != 2 || !M[0].is_array() || !M[1].is_array() || M[0].size() != 2 ||
            M[1].size() != 2) {
            fail("each generator is [[a, b], [c, d]]");
        }
        MoebiusMap mm{get_number<double>(M[0][0], "a"), get_number<double>(M[0][1], "b"),
                      get_number<double>(M[1][0], "c"), get_number<double>(M[1][1], "d")};
        if (!(mm.det() > 0.0)) fail("generator determinant must be positive");
        for (const auto* e : {&M[0][0], &M[0][1], &M[1][0], &M[1][1]}) integer = integer && e->is_number_integer();
        if (integer) {
            ints.push_back({M[0][0].get<long long>(), M[0][1].get<long long>(), M[1][0].get<long long>(),
                            M[1][1].get<long long>()});
            if (ints.back().det() != 1) integer = false;
        }
        gens.push_back(mm.normalized());
    }
    std::string name = "custom";
    if (g.contains("name")) {
        if (!g["name"].is_string()) fail("'name' must be a string");
        name = g["name"].get<std::string>();
    }
    return SchottkyGroup(std::move(discs), std::move(gens),
                         integer ? std::optional<std::vector<IntMatrix>>(ints) : std::nullopt, name);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return 2;
    return 3;
}

RunResult run(const ExperimentConfig& c) {
    RunResult res;
    const int saved = default_threads();
    if (c.threads > 0) set_default_threads(c.threads);
    Context ctx{c, res, ""};
    try {
        switch (c.experiment) {
            case Experiment::Validate: run_validate(ctx); break;
            case Experiment::Delta: run_delta(ctx); break;
            case Experiment::ZetaScan: run_zeta_scan(ctx); break;
            case Experiment::Resonances: run_resonances(ctx); break;
            case Experiment::CoverAbelian: run_cover_abelian(ctx); break;
            case Experiment::Equidist: run_equidist(ctx); break;
            case Experiment::Congruence: run_congruence(ctx); break;
            case Experiment::ExplicitFormula: run_explicit_formula(ctx); break;
            case Experiment::Cayley: run_cayley(ctx); break;
        }
    } catch (const std::exception& e) {
        res.status = exit_code_for(e);
        res.summary = e.what();
    }
    set_default_threads(saved);
    return res;
}

}  // namespace reslab::cli
