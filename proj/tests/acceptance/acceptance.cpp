// Acceptance checks. Prints one PASS/FAIL line per criterion; tolerances are
// pinned below. Exit status is 0 when every failing criterion is listed with
// --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reslab/abelian.hpp"
#include "reslab/cayley.hpp"
#include "reslab/cli.hpp"
#include "reslab/congruence.hpp"
#include "reslab/explicit_formula.hpp"
#include "reslab/io.hpp"
#include "reslab/parallel.hpp"
#include "reslab/thermo.hpp"
#include "reslab/transfer.hpp"
#include "reslab/zeros.hpp"

using namespace reslab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double x, int digits = 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::shared_ptr<const TransferBasis> basis_of(const std::string& preset, int lmax) {
    return std::make_shared<const TransferBasis>(preset_by_name(preset), lmax);
}

Eigen::MatrixXcd rotation(double a, double b) {
    Eigen::MatrixXcd U(2, 2);
    U << std::polar(1.0, b) * std::cos(a), -std::sin(a), std::sin(a), std::polar(1.0, -b) * std::cos(a);
    return U;
}

// 1. Determinant against the Euler product right of the critical line.
Outcome determinant_euler() {
    constexpr double kTol = 1e-8, kBudget = 60.0;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20);
    double worst = 0.0;
    for (const char* name : {"symmetric3", "sl2z-pair"}) {
        const SchottkyGroup g = preset_by_name(name);
        const auto basis = std::make_shared<const TransferBasis>(g, 32);
        const double d = critical_exponent(*basis);
        const auto classes = primitive_classes_to_depth(g, 8);
        const auto det = determinant_function(basis, TwistSpec::trivial(), false);
        for (int i = 0; i < 20; ++i) {
            const cd s(d + 1.0, -10.0 + 20.0 * uniform01(rng));
            worst = std::max(worst, std::abs(det(s) - euler_product(classes, g, s, TwistSpec::trivial(), 40)));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst < kTol && secs < kBudget,
            "max |det - euler| " + num(worst) + " over 40 points, " + num(secs, 3) + " s"};
}

// 2. Lefschetz identity for N = 1, 2, 3.
Outcome lefschetz() {
    constexpr double kTol = 1e-8;
    const cd s(0.7, 1.3);
    double worst = 0.0;
    std::string where;
    for (const char* name : {"cylinder", "symmetric3", "sl2z-pair"}) {
        const SchottkyGroup g = preset_by_name(name);
        std::vector<double> theta(g.m(), 0.0);
        theta[0] = 0.3;
        if (g.m() > 1) theta[1] = 0.1;
        for (const TwistSpec& tw : {TwistSpec::trivial(), TwistSpec::abelian(theta)}) {
            for (int N = 1; N <= 3; ++N) {
                const double r = operator_trace_check(g, s, tw, 32, N).residual;
                if (r > worst) {
                    worst = r;
                    where = std::string(name) + " N=" + std::to_string(N);
                }
            }
        }
    }
    // The torus discs are nearly tangent; its residual at lmax 96 is reported only.
    double torus = 0.0;
    for (int N = 1; N <= 3; ++N) {
        torus = std::max(torus, operator_trace_check(preset_sl2z_torus(), s, TwistSpec::trivial(), 96, N).residual);
    }
    return {worst < kTol, "max residual " + num(worst) + " (" + where + "), 3 presets x 2 twists x N=1..3; " +
                              "sl2z-torus at lmax 96: " + num(torus) + " (not gated)"};
}

// 3. Cylinder resonances on the lattice 2 pi i k / l.
Outcome cylinder_lattice() {
    constexpr double kTol = 1e-7;
    const SchottkyGroup g = preset_cylinder();
    const double l = 2 * std::acosh(1.5);
    const auto f = determinant_function(std::make_shared<const TransferBasis>(g, 40), TwistSpec::trivial());
    ResonanceOptions o;
    o.refine.tol = 1e-14;
    const ResonanceSet rs = resonances(f, {-0.5, 0.5, 0.0, 7.0}, o);
    bool ok = rs.zeros.size() == 3 && rs.total_multiplicity() == 6;
    double worst = 0.0;
    for (int k = 0; k <= 2 && ok; ++k) {
        const cd expect(0.0, 2 * std::numbers::pi * k / l);
        double best = INFINITY;
        for (const auto& z : rs.zeros) {
            if (z.multiplicity == 2) best = std::min(best, std::abs(z.s - expect));
        }
        worst = std::max(worst, best);
    }
    ok = ok && worst < kTol;
    return {ok, std::to_string(rs.zeros.size()) + " zeros, total multiplicity " +
                    std::to_string(rs.total_multiplicity()) + ", max offset " + num(worst)};
}

// 4. Regular twist against the product of characters.
Outcome factorization() {
    constexpr double kRel = 1e-8, kMatch = 1e-6;
    const auto basis = basis_of("sl2z-pair", 16);
    const double d = critical_exponent(*basis);
    bool ok = true;
    std::string detail;
    for (const std::vector<int>& mod : {std::vector<int>{2, 1}, {2, 2}, {3, 2}}) {
        const FactorizationReport r = factorization_check(basis, AbelianQuotient(mod), {d + 0.5, d + 1.5, -5, 5},
                                                          {d - 0.1, d + 0.02, -0.05, 0.05}, 10, 4);
        ok = ok && r.max_relative < kRel && r.regular_zeros == r.character_zeros && r.zero_match < kMatch;
        detail += (detail.empty() ? "" : "; ") + std::string("|G|=") + std::to_string(r.order) + " rel " +
                  num(r.max_relative) + " zeros " + std::to_string(r.regular_zeros) + "/" +
                  std::to_string(r.character_zeros) + " match " + num(r.zero_match);
    }
    return {ok, detail};
}

struct PairData {
    std::shared_ptr<const TransferBasis> basis;
    double delta = 0.0;
};

const PairData& pair_data() {
    static const PairData data = [] {
        PairData p;
        p.basis = basis_of("sl2z-pair", 24);
        p.delta = critical_exponent(*p.basis);
        return p;
    }();
    return data;
}

// 5. |L(delta, theta)| stays away from 0 off the lattice.
Outcome nonvanishing() {
    constexpr double kRatio = 1e3;
    const PairData& pd = pair_data();
    const NonvanishingScan ns = nonvanishing_scan(pd.basis, pd.delta, 64, 0.05);
    const double floor = std::max(ns.residual_at_zero, 1e-300);
    return {ns.min_modulus > kRatio * floor, "min |L| " + num(ns.min_modulus) + " at (" + num(ns.argmin[0]) + ", " +
                                                 num(ns.argmin[1]) + "), residual at 0 " +
                                                 num(ns.residual_at_zero) + ", ratio " +
                                                 num(ns.min_modulus / floor)};
}

// 6. The zero near delta moves along a real, even, concave surface.
Outcome implicit_curve_check() {
    constexpr double kImag = 1e-7, kPhi0 = 1e-8, kSym = 1e-8;
    const PairData& pd = pair_data();
    const ImplicitCurve c = implicit_curve(pd.basis, pd.delta, 0.1);
    const bool ok = c.max_imag < kImag && c.phi0_error < kPhi0 && c.symmetry_error < kSym && c.negative_definite;
    return {ok, "epsilon " + num(c.epsilon) + ", max |Im| " + num(c.max_imag) + ", |phi(0) - delta| " +
                    num(c.phi0_error) + ", symmetry " + num(c.symmetry_error) + ", Hessian [" + num(c.hessian[0]) +
                    ", " + num(c.hessian[1]) + "; " + num(c.hessian[2]) + ", " + num(c.hessian[3]) + "] det " +
                    num(c.hessian_det) + (c.negative_definite ? " negative definite" : " NOT negative definite")};
}

// 7. Near-delta zeros of Z/N covers approach the phi push-forward.
Outcome equidistribution() {
    constexpr double kFinal = 0.1, kBudget = 600.0;
    const auto t0 = std::chrono::steady_clock::now();
    const PairData& pd = pair_data();
    const Rect window{pd.delta - 0.1, pd.delta + 0.02, -0.05, 0.05};
    const EquidistributionResult r = equidistribution_experiment(pd.basis, pd.delta, {8, 16, 32, 64}, window);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool monotone = true;
    std::string ks;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (i && r.rows[i].kolmogorov > r.rows[i - 1].kolmogorov) monotone = false;
        ks += (i ? ", " : "") + std::string("N=") + std::to_string(r.rows[i].N) + " " + num(r.rows[i].kolmogorov);
    }
    const double last = r.rows.back().kolmogorov;
    return {monotone && last < kFinal && secs < kBudget,
            "KS " + ks + (monotone ? ", monotone" : ", NOT monotone") + ", " + num(secs, 3) + " s"};
}

// 8. Singular values decay d times slower for a d-dimensional twist.
Outcome singular_value_scaling() {
    constexpr double kRel = 0.25;
    const SchottkyGroup g = preset_symmetric3();
    const cd s(0.5, 0.0);
    const DecayFit one = singular_value_decay(singular_values(assemble(g, s, TwistSpec::trivial(), 32)));
    std::vector<Eigen::MatrixXcd> U;
    for (int i = 0; i < g.m(); ++i) U.push_back(rotation(0.7 + 0.4 * i, 0.2 + 0.3 * i));
    const DecayFit two = singular_value_decay(singular_values(assemble(g, s, TwistSpec::matrix(U), 32)));
    const double target = one.slope / 2;
    const double rel = std::abs(two.slope - target) / std::abs(target);
    return {rel < kRel, "slope d=1 " + num(one.slope, 4) + " (" + std::to_string(one.used) + " values), d=2 " +
                            num(two.slope, 4) + " (" + std::to_string(two.used) + " values), off half by " +
                            num(100 * rel, 3) + "%"};
}

// 9. SL2(F_p): class equation, labels against orbits, conj1 at p = 101.
Outcome sl2_structure() {
    bool ok = true;
    std::string detail;
    for (std::int64_t p : {5, 7, 11, 13}) {
        const ClassStatistics st = class_statistics(p);
        std::int64_t total = 0;
        for (const auto& c : st.classes) total += c.size;
        ok = ok && total == p * (p * p - 1) && st.verified && st.mismatches == 0;
        detail += "p=" + std::to_string(p) + " sum " + std::to_string(total) + (st.verified ? " verified" : "") +
                  " mismatches " + std::to_string(st.mismatches) + "; ";
    }
    const Conj1Report rep = conj1_check(preset_sl2z_pair(), 101, 1.5);
    ok = ok && rep.violation_count == 0;
    detail += "conj1 p=101 beta=1.5: " + std::to_string(rep.classes) + " classes, " +
              std::to_string(rep.pairs_checked) + " pairs, " + std::to_string(rep.violation_count) + " violations";
    return {ok, detail};
}

// 10. Growth of sum m(t)^2 against sum m(t).
Outcome multiplicity_energy() {
    const SchottkyGroup g = preset_sl2z_torus();
    const double delta = critical_exponent(g, 96);
    const GeodesicTable tab = primitive_geodesics(g, 10.0, 40);
    const auto powers = class_powers(g, tab.classes, 10.0);
    std::vector<double> T, S1, S2;
    for (int i = 0; i <= 24; ++i) {
        const double t = 4.0 + 0.25 * i;
        const TraceTable tt = trace_multiplicities(powers, t, tab.complete);
        T.push_back(t);
        S1.push_back(static_cast<double>(tt.sum_m));
        S2.push_back(static_cast<double>(tt.sum_m2));
    }
    const double raw1 = fit_growth_exponent(T, S1), raw2 = fit_growth_exponent(T, S2);
    // Prefactors: sum m ~ e^{delta T} / T and sum m^2 ~ e^{(2 delta - 1/2) T} / T^2.
    const double cor1 = fit_growth_exponent(T, S1, 1.0), cor2 = fit_growth_exponent(T, S2, 2.0);
    const double need = 0.8 * (delta - 0.5);
    return {delta > 0.5 && tab.complete && cor2 - cor1 >= need,
            "sl2z-torus delta " + num(delta, 6) + ", corrected exponents " + num(cor1, 4) + " / " + num(cor2, 4) +
                " gap " + num(cor2 - cor1, 4) + " vs required " + num(need, 4) + "; raw " + num(raw1, 4) + " / " +
                num(raw2, 4) + " gap " + num(raw2 - raw1, 4)};
}

// 11. Test function shape and Fourier envelope.
Outcome test_function() {
    constexpr double kMass = 1e-10;
    const TestFunction f = build_test_function(0.5, 12, 1 << 16);
    const double mn = *std::min_element(f.values.begin(), f.values.end());
    const bool edges_zero = f.values.front() == 0.0 && f.values.back() == 0.0;
    const double mass_err = std::abs(f.mass() - 1.0);
    const EnvelopeReport env = fourier_envelope_check(f, 10.0, 1e4);
    const bool ok = mn >= 0.0 && f.support <= 1.0 && edges_zero && mass_err < kMass && env.C2 > 0.0;
    return {ok, "min " + num(mn) + ", support " + num(f.support, 6) + ", |mass - 1| " + num(mass_err) + ", C2 " +
                    num(env.C2, 4) + " on [10, 1e4]"};
}

// 12. Cycle gaps scale like N^-2; Cheeger sandwich on small cycles.
Outcome cayley_decay() {
    constexpr double kSpread = 0.05;
    const GapDecayTable t = gap_decay_experiment({64, 128, 256, 512, 1024}, {}, {{1}, {-1}});
    std::string failed;
    for (int N = 5; N <= 24; ++N) {
        const SandwichReport s = sandwich_check(CayleyGraph::cycle(N));
        if (!s.ok()) {
            failed += " N=" + std::to_string(N) + " (lambda1 " + num(s.lambda1, 4) + ", h " + num(s.h, 4) +
                      ", bounds [" + num(s.lower, 4) + ", " + num(s.upper, 4) + "])";
        }
    }
    return {t.relative_spread < kSpread && failed.empty(),
            "lambda1 N^2 -> " + num(t.limit, 6) + ", spread " + num(t.relative_spread) + ", sandwich " +
                (failed.empty() ? std::string("ok for N=5..24") : "fails at" + failed)};
}

// 13. Byte-identical outputs at 1, 2 and 8 threads.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[e.path().filename().string()] = s.str();
    }
    return out;
}

Outcome determinism() {
    using nlohmann::json;
    const std::vector<json> configs{
        {{"experiment", "validate"}, {"group", "symmetric3"}, {"word_depth", 6}},
        {{"experiment", "delta"}, {"group", "sl2z-pair"}, {"lmax", 24}},
        {{"experiment", "zeta-scan"}, {"group", "symmetric3"}, {"lmax", 16}, {"grid", 16}},
        {{"experiment", "resonances"}, {"group", "cylinder"}, {"lmax", 32}, {"rect", "-0.5,0.5,0,7"}},
        {{"experiment", "cover-abelian"}, {"group", "sl2z-pair"}, {"lmax", 12}, {"moduli", {2, 2}}, {"grid", 8}},
        {{"experiment", "equidist"}, {"group", "sl2z-pair"}, {"lmax", 12}, {"Ns", {4, 8}}},
        {{"experiment", "congruence"}, {"group", "sl2z-torus"}, {"p", 13}, {"T", 5.0}},
        {{"experiment", "explicit-formula"}, {"fn_points", 4096}},
        {{"experiment", "cayley"}, {"cayley_Ns", {64, 128}}},
    };
    const fs::path root = fs::temp_directory_path() / "reslab_acceptance_determinism";
    std::string bad;
    int files = 0;
    for (const auto& j : configs) {
        std::map<std::string, std::string> first;
        for (int threads : {1, 2, 8}) {
            cli::ExperimentConfig c = cli::parse_config(j);
            c.threads = threads;
            c.output_dir = (root / (j["experiment"].get<std::string>() + "_" + std::to_string(threads))).string();
            fs::remove_all(c.output_dir);
            const cli::RunResult r = cli::run(c);
            if (r.status != 0) {
                bad += " " + j["experiment"].get<std::string>() + " failed: " + r.summary;
                break;
            }
            const auto snap = snapshot(c.output_dir);
            if (threads == 1) {
                first = snap;
                files += static_cast<int>(snap.size());
            } else if (snap != first) {
                bad += " " + j["experiment"].get<std::string>() + " differs at " + std::to_string(threads) + " threads";
            }
        }
    }
    fs::remove_all(root);
    return {bad.empty(), std::to_string(configs.size()) + " experiments, " + std::to_string(files) + " files" +
                             (bad.empty() ? ", identical at 1/2/8 threads" : ";" + bad)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only, expect_fail;
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    app.add_option("--expect-fail", expect_fail, "criteria known to fail")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "determinant matches Euler product", determinant_euler},
        {2, "Lefschetz trace identity", lefschetz},
        {3, "cylinder resonance lattice", cylinder_lattice},
        {4, "cover factorization", factorization},
        {5, "non-vanishing at delta", nonvanishing},
        {6, "implicit curve near delta", implicit_curve_check},
        {7, "equidistribution trend", equidistribution},
        {8, "singular value scaling", singular_value_scaling},
        {9, "SL2(F_p) structure", sl2_structure},
        {10, "multiplicity energy", multiplicity_energy},
        {11, "test function", test_function},
        {12, "Cayley gap decay and sandwich", cayley_decay},
        {13, "determinism", determinism},
    };
    const std::set<int> expected(expect_fail.begin(), expect_fail.end());
    int unexpected = 0, passed = 0, ran = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        ++ran;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        if (o.pass) {
            ++passed;
        } else if (!expected.count(c.id)) {
            ++unexpected;
        }
    }
    std::printf("%d/%d criteria passed", passed, ran);
    if (!expected.empty()) std::printf(", %d unexpected failures", unexpected);
    std::printf("\n");
    return unexpected == 0 ? 0 : 1;
}
