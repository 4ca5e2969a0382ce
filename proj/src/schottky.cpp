#include "reslab/schottky.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "reslab/error.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "schottky";
}

SchottkyGroup::SchottkyGroup(std::vector<Disc> discs, std::vector<MoebiusMap> generators,
                             std::optional<std::vector<IntMatrix>> integer_generators,
                             std::string name)
    : m_(static_cast<int>(generators.size())), discs_(std::move(discs)), name_(std::move(name)) {
    if (m_ < 1) throw ValidationError(kModule, "at least one generator is required");
    if (static_cast<int>(discs_.size()) != 2 * m_) {
        throw ValidationError(kModule, "expected " + std::to_string(2 * m_) + " discs for m = " +
                                           std::to_string(m_) + ", got " +
                                           std::to_string(discs_.size()));
    }
    for (const auto& D : discs_) {
        if (!std::isfinite(D.center) || !std::isfinite(D.radius)) {
            throw ValidationError(kModule, "disc with non-finite center or radius");
        }
    }
    letters_.resize(2 * m_);
    for (int i = 0; i < m_; ++i) {
        letters_[i] = generators[i].normalized();
        letters_[i + m_] = letters_[i].inverse();
    }
    if (integer_generators) {
        if (static_cast<int>(integer_generators->size()) != m_) {
            throw ValidationError(kModule, "integer generator count differs from m");
        }
        std::vector<IntMatrix> all(2 * m_);
        for (int i = 0; i < m_; ++i) {
            const IntMatrix& g = (*integer_generators)[i];
            if (g.det() != 1) throw ValidationError(kModule, "integer generator with det != 1");
            all[i] = g;
            all[i + m_] = g.inverse();
        }
        int_letters_ = std::move(all);
    }
}

const IntMatrix& SchottkyGroup::integer_letter(int k) const {
    if (!int_letters_) throw ValidationError(kModule, "group " + name_ + " has no integer generators");
    return (*int_letters_)[k];
}

// ---------------------------------------------------------------------------

MoebiusMap disc_swap_map(const Disc& from, const Disc& to) {
    // z -> c2 - r1 r2/(z - c1) sends the circle |z - c1| = r1 to |w - c2| = r2
    // and the center c1 to infinity.
    const double c1 = from.center, r1 = from.radius, c2 = to.center, r2 = to.radius;
    return MoebiusMap{c2, -c1 * c2 - r1 * r2, 1.0, -c1}.normalized();
}

SchottkyGroup preset_cylinder(double trace) {
    if (!(trace > 2.0)) {
        throw ValidationError(kModule, "cylinder trace must exceed 2, got " + std::to_string(trace));
    }
    // With unit radii the generator has trace 2c/r = trace when c = trace/2.
    const double c = 0.5 * trace;
    std::vector<Disc> discs{{-c, 1.0}, {c, 1.0}};
    const MoebiusMap g = disc_swap_map(discs[0], discs[1]);
    std::ostringstream name;
    name << "cylinder(" << trace << ")";
    return SchottkyGroup(discs, {g}, std::nullopt, name.str());
}

SchottkyGroup preset_symmetric3(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 4)) {
        throw ValidationError(kModule, "symmetric3 half-width must lie in (0, pi/4), got " +
                                           std::to_string(theta));
    }
    // Four arcs of the unit circle centered at pi/4 + k pi/2, pushed to the
    // real line by the Cayley map, which sends angle t to -cot(t/2).
    std::vector<Disc> sorted;
    for (int k = 0; k < 4; ++k) {
        const double mid = std::numbers::pi / 4 + k * std::numbers::pi / 2;
        const double lo = -1.0 / std::tan(0.5 * (mid - theta));
        const double hi = -1.0 / std::tan(0.5 * (mid + theta));
        sorted.push_back({0.5 * (lo + hi), 0.5 * (hi - lo)});
    }
    // Generator 1 pairs the two left discs, generator 2 the two right ones.
    std::vector<Disc> discs{sorted[0], sorted[3], sorted[1], sorted[2]};
    std::vector<MoebiusMap> gens{disc_swap_map(discs[0], discs[2]),
                                 disc_swap_map(discs[1], discs[3])};
    std::ostringstream name;
    name << "symmetric3(" << theta << ")";
    return SchottkyGroup(discs, gens, std::nullopt, name.str());
}

SchottkyGroup group_from_isometric_circles(const std::vector<IntMatrix>& gens, std::string name) {
    const int m = static_cast<int>(gens.size());
    std::vector<Disc> discs(2 * m);
    std::vector<MoebiusMap> maps;
    for (int i = 0; i < m; ++i) {
        const IntMatrix& g = gens[i];
        if (g.c == 0) throw ValidationError(kModule, "isometric circle undefined for c = 0");
        const double c = static_cast<double>(g.c);
        const double r = 1.0 / std::abs(c);
        discs[i] = {-static_cast<double>(g.d) / c, r};
        discs[i + m] = {static_cast<double>(g.a) / c, r};
        maps.push_back(g.to_moebius());
    }
    return SchottkyGroup(discs, maps, gens, std::move(name));
}

namespace {
// [[q, -(pq+1)], [1, -p]] maps D(p, 1) onto the exterior of D(q, 1).
IntMatrix unit_swap(long long p, long long q) { return {q, -(p * q + 1), 1, -p}; }
}  // namespace

SchottkyGroup preset_sl2z_pair(const IntMatrix& A, const IntMatrix& B) {
    std::ostringstream name;
    name << "sl2z-pair(" << A.a << ',' << A.b << ',' << A.c << ',' << A.d << ';' << B.a << ','
         << B.b << ',' << B.c << ',' << B.d << ')';
    return group_from_isometric_circles({A, B}, name.str());
}

SchottkyGroup preset_sl2z_pair() { return preset_sl2z_pair(unit_swap(-6, -2), unit_swap(6, 2)); }

namespace {
Disc disc_from_interval(double a, double b) { return {0.5 * (a + b), 0.5 * std::abs(b - a)}; }

Disc image_disc(const MoebiusMap& g, const Disc& D) {
    const double a = g.apply(D.center - D.radius);
    const double b = g.apply(D.center + D.radius);
    return disc_from_interval(std::min(a, b), std::max(a, b));
}
}  // namespace

SchottkyGroup preset_sl2z_torus() {
    // One-holed torus with tr A = 4, tr B = 3, tr AB = 4 and commutator
    // trace -9. The disc endpoints were picked to roughly maximize the
    // smallest cross-ratio separation; the partner discs are exact images.
    const IntMatrix A{0, 1, -1, 4};
    const IntMatrix B{2, -1, -1, 1};
    const MoebiusMap a = A.to_moebius(), b = B.to_moebius();
    const Disc DA = disc_from_interval(1.43, 41.0);
    const Disc DB = disc_from_interval(0.463, 1.216);
    return SchottkyGroup({DA, DB, image_disc(a, DA), image_disc(b, DB)}, {a, b},
                         std::vector<IntMatrix>{A, B}, "sl2z-torus");
}

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& body, char sep) {
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) {
            throw ValidationError(kModule, "cannot parse number '" + item + "' in preset arguments");
        }
        out.push_back(v);
    }
    return out;
}

IntMatrix parse_int_matrix(const std::string& body) {
    const auto v = parse_numbers(body, ',');
    if (v.size() != 4) throw ValidationError(kModule, "integer matrix needs 4 entries a,b,c,d");
    for (double x : v) {
        if (x != std::round(x)) throw ValidationError(kModule, "integer matrix entry is not an integer");
    }
    return {static_cast<long long>(v[0]), static_cast<long long>(v[1]),
            static_cast<long long>(v[2]), static_cast<long long>(v[3])};
}
}  // namespace

SchottkyGroup preset_by_name(const std::string& spec_in) {
    const std::string spec = trim(spec_in);
    std::string head = spec, args;
    const auto open = spec.find('(');
    if (open != std::string::npos) {
        if (spec.back() != ')') throw ValidationError(kModule, "unbalanced parentheses in preset '" + spec + "'");
        head = trim(spec.substr(0, open));
        args = spec.substr(open + 1, spec.size() - open - 2);
    }
    const bool has_args = open != std::string::npos;
    if (head == "cylinder") {
        if (!has_args) return preset_cylinder();
        const auto v = parse_numbers(args, ',');
        if (v.size() != 1) throw ValidationError(kModule, "cylinder takes one argument (trace)");
        return preset_cylinder(v[0]);
    }
    if (head == "symmetric3") {
        if (!has_args) return preset_symmetric3();
        const auto v = parse_numbers(args, ',');
        if (v.size() != 1) throw ValidationError(kModule, "symmetric3 takes one argument (theta)");
        return preset_symmetric3(v[0]);
    }
    if (head == "sl2z-pair") {
        if (!has_args) return preset_sl2z_pair();
        const auto semi = args.find(';');
        if (semi == std::string::npos) throw ValidationError(kModule, "sl2z-pair expects 'a,b,c,d;a,b,c,d'");
        return preset_sl2z_pair(parse_int_matrix(args.substr(0, semi)),
                                parse_int_matrix(args.substr(semi + 1)));
    }
    if (head == "sl2z-torus" && !has_args) return preset_sl2z_torus();
    throw ValidationError(kModule, "unknown preset '" + spec + "'");
}

// ---------------------------------------------------------------------------

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport validate(const SchottkyGroup& group) {
    ValidationReport rep;
    const int n = group.letter_count();
    const int m = group.m();

    for (int k = 0; k < n; ++k) {
        const Disc& D = group.disc(k);
        rep.checks.push_back({"radius_positive[" + std::to_string(k + 1) + "]", D.radius > 0.0,
                              D.radius, ""});
    }

    rep.min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const Disc& A = group.disc(i);
            const Disc& B = group.disc(j);
            const double gap = std::abs(A.center - B.center) - A.radius - B.radius;
            rep.min_gap = std::min(rep.min_gap, gap);
            std::ostringstream detail;
            detail << "gap " << gap;
            rep.checks.push_back({"disjoint[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]",
                                  gap > 0.0, gap, detail.str()});
        }
    }

    constexpr int kSamples = 16;
    constexpr double kBoundaryTol = 1e-10;
    for (int i = 0; i < m; ++i) {
        const MoebiusMap& g = group.generator(i);
        const Disc& from = group.disc(i);
        const Disc& to = group.disc(i + m);
        double residual = 0.0;
        for (int k = 0; k < kSamples; ++k) {
            const double t = 2.0 * std::numbers::pi * (k + 0.5) / kSamples;
            const cd z = from.center + from.radius * std::polar(1.0, t);
            const cd w = g.apply(z);
            const double r = std::isfinite(std::abs(w)) ? std::abs(std::abs(w - to.center) - to.radius)
                                                        : std::numeric_limits<double>::infinity();
            residual = std::max(residual, r / std::max(1.0, to.radius));
        }
        rep.max_boundary_residual = std::max(rep.max_boundary_residual, residual);
        std::ostringstream detail;
        detail << "max residual " << residual;
        rep.checks.push_back({"boundary_map[" + std::to_string(i + 1) + "]", residual <= kBoundaryTol,
                              kBoundaryTol - residual, detail.str()});

        // Orientation: the center must land outside the closed target disc.
        const cd img = g.apply(cd(from.center, 0.0));
        const double dist = std::abs(img - to.center);
        const bool outside = !std::isfinite(dist) || dist > to.radius;
        const double margin = std::isfinite(dist) ? dist - to.radius : std::numeric_limits<double>::infinity();
        rep.checks.push_back({"orientation[" + std::to_string(i + 1) + "]", outside, margin, ""});
    }
    return rep;
}

// ---------------------------------------------------------------------------

bool is_admissible(const SchottkyGroup& group, const Word& w) {
    for (int x : w) {
        if (x < 0 || x >= group.letter_count()) return false;
    }
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (w[i + 1] == group.inverse_letter(w[i])) return false;
    }
    return true;
}

bool is_cyclically_reduced(const SchottkyGroup& group, const Word& w) {
    return !w.empty() && is_admissible(group, w) && w.front() != group.inverse_letter(w.back());
}

void for_each_word(const SchottkyGroup& group, int n, std::optional<int> exclude_last,
                   const std::function<void(const Word&)>& visit) {
    if (n < 1) throw ValidationError(kModule, "word length must be >= 1");
    const int L = group.letter_count();
    Word w(n, 0);
    // Odometer over admissible words in lexicographic order.
    auto rec = [&](auto&& self, int pos) -> void {
        for (int x = 0; x < L; ++x) {
            if (pos > 0 && x == group.inverse_letter(w[pos - 1])) continue;
            w[pos] = x;
            if (pos + 1 == n) {
                if (!exclude_last || x != *exclude_last) visit(w);
            } else {
                self(self, pos + 1);
            }
        }
    };
    rec(rec, 0);
}

std::vector<Word> enumerate_words(const SchottkyGroup& group, int n, std::optional<int> exclude_last) {
    std::vector<Word> out;
    for_each_word(group, n, exclude_last, [&](const Word& w) { out.push_back(w); });
    return out;
}

MoebiusMap word_map(const SchottkyGroup& group, const Word& w) {
    if (!is_admissible(group, w)) throw ValidationError(kModule, "inadmissible word " + format_word(w));
    MoebiusMap g = MoebiusMap::identity();
    for (int x : w) g = g.compose(group.letter_map(x));
    // Letters have det 1, so the product does too; dividing by the computed
    // determinant would only add cancellation error.
    return g;
}

IntMatrix word_integer_matrix(const SchottkyGroup& group, const Word& w) {
    if (!is_admissible(group, w)) throw ValidationError(kModule, "inadmissible word " + format_word(w));
    IntMatrix g;
    for (int x : w) g = g.compose(group.integer_letter(x));
    return g;
}

cd log_derivative_cocycle(const SchottkyGroup& group, const Word& w, cd z) {
    cd sum = 0.0;
    cd cur = z;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        const MoebiusMap& g = group.letter_map(*it);
        const cd der = g.derivative(cur);
        if (der.imag() == 0.0 && der.real() <= 0.0) {
            std::ostringstream msg;
            msg << "derivative of letter " << (*it + 1) << " on the branch cut at z = " << cur;
            throw NumericalError(kModule, msg.str());
        }
        sum += std::log(der);
        cur = g.apply(cur);
    }
    return sum;
}

std::vector<int> homology(const SchottkyGroup& group, const Word& w) {
    const int m = group.m();
    std::vector<int> h(m, 0);
    for (int x : w) {
        if (x < m) ++h[x];
        else --h[x - m];
    }
    return h;
}

bool is_lyndon(const Word& w) {
    const std::size_t n = w.size();
    if (n == 0) return false;
    for (std::size_t r = 1; r < n; ++r) {
        // compare w with its rotation by r
        for (std::size_t i = 0; i < n; ++i) {
            const int a = w[i];
            const int b = w[(i + r) % n];
            if (a < b) break;
            if (a > b) return false;
            if (i + 1 == n) return false;  // equal rotation: a proper power
        }
    }
    return true;
}

std::string format_word(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(w[i] + 1);
    }
    return s;
}

// ---------------------------------------------------------------------------

GeodesicClass make_geodesic(const SchottkyGroup& group, const Word& w) {
    if (!is_cyclically_reduced(group, w)) {
        throw ValidationError(kModule, "word " + format_word(w) + " is not cyclically reduced");
    }
    GeodesicClass g;
    g.word = w;
    const MoebiusMap M = word_map(group, w);
    g.trace = M.trace();
    if (group.has_integer_generators()) {
        const IntMatrix I = word_integer_matrix(group, w);
        g.int_trace = I.trace();
        g.trace = static_cast<double>(I.trace());
    }
    const double t = std::abs(g.trace);
    g.length = 2.0 * std::acosh(0.5 * t);
    g.homology = homology(group, w);
    if (const auto fp = M.fixed_points()) {
        g.fixed_point = (*fp)[0];
        g.fixed_point_derivative = std::isfinite(g.fixed_point) ? M.derivative(cd(g.fixed_point, 0.0)).real() : 0.0;
    }
    return g;
}

namespace {

bool geodesic_less(const GeodesicClass& a, const GeodesicClass& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.word < b.word;
}

// Visits every Lyndon, cyclically reduced word of length 1..depth together
// with its (unnormalized-free) word map; prefix products are shared.
template <class F>
void for_each_lyndon(const SchottkyGroup& group, int depth, F&& visit) {
    const int L = group.letter_count();
    Word w;
    w.reserve(depth);
    std::vector<MoebiusMap> prefix{MoebiusMap::identity()};
    auto rec = [&](auto&& self) -> void {
        const int pos = static_cast<int>(w.size());
        if (pos > 0 && w.front() != group.inverse_letter(w.back()) && is_lyndon(w)) {
            visit(w, prefix.back());
        }
        if (pos == depth) return;
        for (int x = 0; x < L; ++x) {
            // A Lyndon word starts with its smallest letter.
            if (pos > 0 && (x < w.front() || x == group.inverse_letter(w.back()))) continue;
            w.push_back(x);
            prefix.push_back(prefix.back().compose(group.letter_map(x)));
            self(self);
            prefix.pop_back();
            w.pop_back();
        }
    };
    rec(rec);
}

double length_from_map(const MoebiusMap& M) {
    const double t = std::abs(M.trace());
    return t > 2.0 ? 2.0 * std::acosh(0.5 * t) : 0.0;
}

}  // namespace

std::vector<GeodesicClass> primitive_classes_to_depth(const SchottkyGroup& group, int max_depth) {
    if (max_depth < 1) throw ValidationError(kModule, "depth must be >= 1");
    std::vector<GeodesicClass> out;
    for_each_lyndon(group, max_depth, [&](const Word& w, const MoebiusMap&) {
        out.push_back(make_geodesic(group, w));
    });
    std::sort(out.begin(), out.end(), geodesic_less);
    return out;
}

GeodesicTable primitive_geodesics(const SchottkyGroup& group, double max_length, int depth_cap) {
    if (!(max_length > 0.0)) throw ValidationError(kModule, "max_length must be positive");
    GeodesicTable table;
    table.max_length = max_length;
    std::vector<double> min_len;  // per depth
    int depth = 2;
    for (;;) {
        min_len.assign(depth + 1, std::numeric_limits<double>::infinity());
        std::vector<Word> hits;
        for_each_lyndon(group, depth, [&](const Word& w, const MoebiusMap& M) {
            const double len = length_from_map(M);
            const int n = static_cast<int>(w.size());
            min_len[n] = std::min(min_len[n], len);
            // Accept with slack; the exact test uses the recomputed length.
            if (len <= max_length * (1.0 + 1e-9)) hits.push_back(w);
        });
        const bool settled = min_len[depth] > max_length && min_len[depth - 1] > max_length;
        if (settled || depth >= depth_cap) {
            for (const auto& w : hits) {
                GeodesicClass g = make_geodesic(group, w);
                if (g.length <= max_length) table.classes.push_back(std::move(g));
            }
            table.depth_reached = depth;
            if (!settled) {
                table.complete = false;
                std::ostringstream msg;
                msg << "word depth cap " << depth_cap << " reached before all geodesics of length <= "
                    << max_length << " were found";
                table.warnings.push_back(msg.str());
            }
            break;
        }
        ++depth;
    }
    std::sort(table.classes.begin(), table.classes.end(), geodesic_less);
    return table;
}

}  // namespace reslab

namespace reslab {

namespace {

// Disc bounded by the hyperbolic bisector of P and Q, on the side of Q.
std::optional<Disc> bisector_disc(cd P, cd Q) {
    const double p2 = P.imag(), q2 = Q.imag();
    if (std::abs(q2 - p2) < 1e-14 * std::max(p2, q2)) return std::nullopt;  // vertical line
    const double C = (P.real() * q2 - Q.real() * p2) / (q2 - p2);
    const double r2 = C * C - (q2 * std::norm(P) - p2 * std::norm(Q)) / (q2 - p2);
    if (!(r2 > 0.0)) return std::nullopt;
    const Disc D{C, std::sqrt(r2)};
    if (!D.contains(Q) || D.contains(P)) return std::nullopt;
    return D;
}

}  // namespace

SchottkyGroup group_from_dirichlet(const std::vector<MoebiusMap>& gens, cd base,
                                   std::optional<std::vector<IntMatrix>> integer_generators,
                                   std::string name) {
    const int m = static_cast<int>(gens.size());
    if (!(base.imag() > 0.0)) throw ValidationError(kModule, "Dirichlet base point must lie in the upper half-plane");
    std::vector<Disc> discs(2 * m);
    for (int i = 0; i < m; ++i) {
        const MoebiusMap g = gens[i].normalized();
        const auto a = bisector_disc(base, g.inverse().apply(base));
        const auto b = bisector_disc(base, g.apply(base));
        if (!a || !b) throw ValidationError(kModule, "Dirichlet side of generator " + std::to_string(i + 1) + " is unbounded");
        discs[i] = *a;
        discs[i + m] = *b;
    }
    return SchottkyGroup(discs, gens, std::move(integer_generators), std::move(name));
}

SchottkyGroup dirichlet_group(const std::vector<IntMatrix>& gens, std::string name) {
    std::vector<MoebiusMap> maps;
    for (const auto& g : gens) maps.push_back(g.to_moebius());
    std::optional<SchottkyGroup> best;
    cd best_base;
    double best_score = 0.0;
    auto consider = [&](cd o) {
        try {
            SchottkyGroup g = group_from_dirichlet(maps, o, gens, name);
            const ValidationReport rep = validate(g);
            if (!rep.ok()) return;
            double rmax = 0.0;
            for (const auto& D : g.discs()) rmax = std::max(rmax, D.radius);
            const double score = rep.min_gap / rmax;
            if (score > best_score) {
                best_score = score;
                best = std::move(g);
                best_base = o;
            }
        } catch (const ValidationError&) {
        }
    };
    // Coarse scan of x + iy (log scale in y), then two local refinements.
    cd centre(0.0, 1.0);
    double span = 4.0;
    for (int round = 0; round < 3; ++round) {
        for (int ix = -20; ix <= 20; ++ix) {
            for (int iy = -20; iy <= 20; ++iy) {
                const double x = centre.real() + span * ix / 20.0;
                const double y = centre.imag() * std::exp(span * iy / 40.0);
                consider(cd(x, y));
            }
        }
        if (!best) break;
        centre = best_base;
        span /= 8.0;
    }
    if (!best) throw ValidationError(kModule, "no Dirichlet base point gives disjoint discs for " + name);
    return *best;
}

}  // namespace reslab
