#include "reslab/congruence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "congruence";

std::int64_t mul_mod(std::int64_t x, std::int64_t y, std::int64_t p) {
    return static_cast<std::int64_t>((static_cast<__int128>(x) * y) % p);
}

std::int64_t pow_mod(std::int64_t x, std::int64_t e, std::int64_t p) {
    std::int64_t r = 1 % p;
    x = mod_p(x, p);
    while (e > 0) {
        if (e & 1) r = mul_mod(r, x, p);
        x = mul_mod(x, x, p);
        e >>= 1;
    }
    return r;
}

void check_prime(std::int64_t p) {
    if (p <= 3 || !is_prime(p)) {
        throw ValidationError(kModule, "p must be an odd prime > 3, got " + std::to_string(p));
    }
}
}  // namespace

std::int64_t mod_p(std::int64_t x, std::int64_t p) {
    const std::int64_t r = x % p;
    return r < 0 ? r + p : r;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t q = 2; q * q <= n; ++q) {
        if (n % q == 0) return false;
    }
    return true;
}

int legendre(std::int64_t x, std::int64_t p) {
    x = mod_p(x, p);
    if (x == 0) return 0;
    return pow_mod(x, (p - 1) / 2, p) == 1 ? 1 : -1;
}

FpMatrix FpMatrix::operator*(const FpMatrix& o) const {
    return {(mul_mod(a, o.a, p) + mul_mod(b, o.c, p)) % p, (mul_mod(a, o.b, p) + mul_mod(b, o.d, p)) % p,
            (mul_mod(c, o.a, p) + mul_mod(d, o.c, p)) % p, (mul_mod(c, o.b, p) + mul_mod(d, o.d, p)) % p, p};
}

FpMatrix FpMatrix::inverse() const { return {d, mod_p(-b, p), mod_p(-c, p), a, p}; }

FpMatrix FpMatrix::pow(std::int64_t k) const {
    FpMatrix base = k < 0 ? inverse() : *this;
    FpMatrix r = identity(p);
    for (std::int64_t e = k < 0 ? -k : k; e > 0; e >>= 1) {
        if (e & 1) r = r * base;
        base = base * base;
    }
    return r;
}

std::int64_t FpMatrix::det() const { return mod_p(mul_mod(a, d, p) - mul_mod(b, c, p), p); }

FpMatrix reduce_mod_p(const IntMatrix& g, std::int64_t p) {
    check_prime(p);
    FpMatrix r{mod_p(g.a, p), mod_p(g.b, p), mod_p(g.c, p), mod_p(g.d, p), p};
    if (r.det() != 1) throw ValidationError(kModule, "matrix does not reduce into SL2(F_p)");
    return r;
}

FpMatrix reduce_mod_p(const SchottkyGroup& group, const GeodesicClass& c, std::int64_t p) {
    if (!group.has_integer_generators()) {
        throw ValidationError(kModule, "group " + group.name() + " has no integer generators");
    }
    check_prime(p);
    FpMatrix r = FpMatrix::identity(p);
    for (int letter : c.word) r = r * reduce_mod_p(group.integer_letter(letter), p);
    return r;
}

std::string ConjClassLabel::to_string() const {
    std::ostringstream out;
    switch (kind) {
        case ClassKind::SplitTorus: out << "split(t=" << trace << ")"; break;
        case ClassKind::NonsplitTorus: out << "nonsplit(t=" << trace << ")"; break;
        case ClassKind::Central: out << (sign > 0 ? "central(+1)" : "central(-1)"); break;
        case ClassKind::Unipotent:
            out << "unipotent(" << (sign > 0 ? '+' : '-') << (residue == 0 ? ",square)" : ",nonsquare)");
            break;
    }
    return out.str();
}

ConjClassLabel classify(const FpMatrix& g) {
    const std::int64_t p = g.p;
    ConjClassLabel L;
    L.trace = g.trace();
    const std::int64_t disc = mod_p(mul_mod(L.trace, L.trace, p) - 4, p);
    if (disc != 0) {
        L.kind = legendre(disc, p) == 1 ? ClassKind::SplitTorus : ClassKind::NonsplitTorus;
        L.sign = 0;
        return L;
    }
    L.sign = L.trace == 2 ? 1 : -1;
    // h = sign * g is unipotent; h - I is nilpotent.
    const std::int64_t b = L.sign > 0 ? g.b : mod_p(-g.b, p);
    const std::int64_t c = L.sign > 0 ? g.c : mod_p(-g.c, p);
    if (b == 0 && c == 0) {
        L.kind = ClassKind::Central;
        return L;
    }
    L.kind = ClassKind::Unipotent;
    // [[1,0],[x,1]] is conjugate to [[1,-x],[0,1]] by the rotation J.
    const std::int64_t x = c != 0 ? mod_p(-c, p) : b;
    L.residue = legendre(x, p) == 1 ? 0 : 1;
    return L;
}

std::int64_t class_size(const ConjClassLabel& label, std::int64_t p) {
    switch (label.kind) {
        case ClassKind::SplitTorus: return p * (p + 1);
        case ClassKind::NonsplitTorus: return p * (p - 1);
        case ClassKind::Central: return 1;
        case ClassKind::Unipotent: return (p * p - 1) / 2;
    }
    return 0;
}

std::int64_t centralizer_size(const ConjClassLabel& label, std::int64_t p) {
    return p * (p * p - 1) / class_size(label, p);
}

std::vector<FpMatrix> sl2_elements(std::int64_t p) {
    check_prime(p);
    std::vector<FpMatrix> out;
    out.reserve(static_cast<std::size_t>(p * (p * p - 1)));
    for (std::int64_t a = 0; a < p; ++a)
        for (std::int64_t b = 0; b < p; ++b)
            for (std::int64_t c = 0; c < p; ++c)
                for (std::int64_t d = 0; d < p; ++d) {
                    FpMatrix g{a, b, c, d, p};
                    if (g.det() == 1) out.push_back(g);
                }
    return out;
}

std::vector<std::vector<std::int64_t>> brute_force_classes(std::int64_t p) {
    const auto elems = sl2_elements(p);
    std::vector<char> seen(static_cast<std::size_t>(p * p * p * p), 0);
    std::vector<std::vector<std::int64_t>> classes;
    for (const auto& g : elems) {
        if (seen[g.code()]) continue;
        std::vector<std::int64_t> orbit;
        for (const auto& h : elems) {
            const FpMatrix x = h * g * h.inverse();
            if (!seen[x.code()]) {
                seen[x.code()] = 1;
                orbit.push_back(x.code());
            }
        }
        std::sort(orbit.begin(), orbit.end());
        classes.push_back(std::move(orbit));
    }
    return classes;
}

bool conjugate_brute_force(const FpMatrix& g, const FpMatrix& h) {
    if (g.p != h.p) return false;
    for (const auto& x : sl2_elements(g.p)) {
        if (x * g == h * x) return true;
    }
    return false;
}

ClassStatistics class_statistics(std::int64_t p, std::int64_t brute_force_cap) {
    check_prime(p);
    ClassStatistics st;
    st.p = p;
    st.group_order = p * (p * p - 1);
    for (std::int64_t t = 0; t < p; ++t) {
        const std::int64_t disc = mod_p(t * t - 4, p);
        if (disc == 0) continue;
        ConjClassLabel L;
        L.kind = legendre(disc, p) == 1 ? ClassKind::SplitTorus : ClassKind::NonsplitTorus;
        L.trace = t;
        L.sign = 0;
        st.classes.push_back({L, class_size(L, p), centralizer_size(L, p)});
    }
    for (int sign : {1, -1}) {
        const std::int64_t t = sign > 0 ? 2 : p - 2;
        st.classes.push_back({{ClassKind::Central, t, sign, 0}, 1, st.group_order});
        for (int residue : {0, 1}) {
            ConjClassLabel L{ClassKind::Unipotent, t, sign, residue};
            st.classes.push_back({L, class_size(L, p), centralizer_size(L, p)});
        }
    }
    std::sort(st.classes.begin(), st.classes.end(),
              [](const ClassStat& x, const ClassStat& y) { return x.label < y.label; });

    if (p <= brute_force_cap) {
        // Every orbit must carry a single label, and labels must match the table.
        const auto orbits = brute_force_classes(p);
        std::map<ConjClassLabel, std::int64_t> sizes;
        for (const auto& orbit : orbits) {
            const auto decode = [p](std::int64_t code) {
                FpMatrix g;
                g.p = p;
                g.d = code % p;
                code /= p;
                g.c = code % p;
                code /= p;
                g.b = code % p;
                g.a = code / p;
                return g;
            };
            const ConjClassLabel L = classify(decode(orbit.front()));
            for (std::int64_t code : orbit) {
                if (!(classify(decode(code)) == L)) ++st.mismatches;
            }
            if (sizes.count(L)) ++st.mismatches;  // two orbits with one label
            sizes[L] = static_cast<std::int64_t>(orbit.size());
        }
        bool agree = st.mismatches == 0 && sizes.size() == st.classes.size();
        for (const auto& c : st.classes) {
            auto it = sizes.find(c.label);
            if (it == sizes.end() || it->second != c.size) agree = false;
        }
        st.verified = agree;
    }
    return st;
}

std::int64_t generated_subgroup_order(const SchottkyGroup& group, std::int64_t p) {
    check_prime(p);
    std::vector<FpMatrix> gens;
    for (int k = 0; k < group.letter_count(); ++k) gens.push_back(reduce_mod_p(group.integer_letter(k), p));
    std::vector<char> seen(static_cast<std::size_t>(p * p * p * p), 0);
    std::deque<FpMatrix> queue{FpMatrix::identity(p)};
    seen[queue.front().code()] = 1;
    std::int64_t count = 1;
    while (!queue.empty()) {
        const FpMatrix g = queue.front();
        queue.pop_front();
        for (const auto& s : gens) {
            const FpMatrix h = g * s;
            if (!seen[h.code()]) {
                seen[h.code()] = 1;
                ++count;
                queue.push_back(h);
            }
        }
    }
    return count;
}

// ---------------------------------------------------------------------------

std::vector<ClassPower> class_powers(const SchottkyGroup& group, const std::vector<GeodesicClass>& table,
                                     double T) {
    if (!group.has_integer_generators()) {
        throw ValidationError(kModule, "trace multiplicities need integer generators");
    }
    std::vector<ClassPower> out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& C = table[i];
        if (C.length > T) continue;
        const std::int64_t t1 = C.int_trace ? *C.int_trace : word_integer_matrix(group, C.word).trace();
        // tr(C^k) = t tr(C^{k-1}) - tr(C^{k-2}), tr(C^0) = 2.
        std::int64_t prev = 2, cur = t1;
        for (int k = 1; k * C.length <= T; ++k) {
            out.push_back({i, k, k * C.length, cur});
            std::int64_t prod = 0, next = 0;
            if (__builtin_mul_overflow(t1, cur, &prod) || __builtin_sub_overflow(prod, prev, &next)) {
                throw NumericalError(kModule, "trace overflow for power of " + format_word(C.word));
            }
            prev = cur;
            cur = next;
        }
    }
    std::sort(out.begin(), out.end(), [](const ClassPower& x, const ClassPower& y) {
        if (x.length != y.length) return x.length < y.length;
        if (x.primitive != y.primitive) return x.primitive < y.primitive;
        return x.k < y.k;
    });
    return out;
}

TraceTable trace_multiplicities(const std::vector<ClassPower>& powers, double T, bool complete) {
    TraceTable tt;
    tt.T = T;
    tt.complete = complete;
    for (const auto& c : powers) {
        if (c.length > T) continue;
        ++tt.m[c.trace];
        ++tt.class_count;
    }
    for (const auto& [t, m] : tt.m) {
        tt.sum_m += m;
        tt.sum_m2 += m * m;
    }
    return tt;
}

TraceTable trace_multiplicities(const SchottkyGroup& group, double T) {
    const GeodesicTable g = primitive_geodesics(group, T, 40);
    return trace_multiplicities(class_powers(group, g.classes, T), T, g.complete);
}

double fit_growth_exponent(const std::vector<double>& T, const std::vector<double>& S, double k) {
    if (T.size() != S.size() || T.size() < 2) throw ValidationError(kModule, "fit needs >= 2 matching samples");
    const double n = static_cast<double>(T.size());
    double mx = 0, my = 0;
    std::vector<double> y(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (!(S[i] > 0.0) || !(T[i] > 0.0)) throw ValidationError(kModule, "fit needs positive samples");
        y[i] = std::log(S[i]) + k * std::log(T[i]);
        mx += T[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < T.size(); ++i) {
        sxy += (T[i] - mx) * (y[i] - my);
        sxx += (T[i] - mx) * (T[i] - mx);
    }
    if (sxx == 0.0) throw ValidationError(kModule, "fit needs distinct T values");
    return sxy / sxx;
}

// ---------------------------------------------------------------------------

namespace {
struct ReducedPower {
    ClassPower cp;
    ConjClassLabel label;
};

std::vector<ReducedPower> reduced_powers(const SchottkyGroup& group, std::int64_t p, double T, bool& complete) {
    const GeodesicTable g = primitive_geodesics(group, T, 40);
    complete = g.complete;
    const auto powers = class_powers(group, g.classes, T);
    std::vector<FpMatrix> base(g.classes.size(), FpMatrix::identity(p));
    for (std::size_t i = 0; i < g.classes.size(); ++i) base[i] = reduce_mod_p(group, g.classes[i], p);
    std::vector<ReducedPower> out(powers.size());
    parallel_for(powers.size(), [&](std::size_t i) {
        out[i] = {powers[i], classify(base[powers[i].primitive].pow(powers[i].k))};
    });
    return out;
}
}  // namespace

Conj1Report conj1_check(const SchottkyGroup& group, std::int64_t p, double beta, std::size_t max_listed) {
    check_prime(p);
    if (!(beta > 0.0 && beta < 2.0)) throw ValidationError(kModule, "beta must lie in (0, 2)");
    Conj1Report rep;
    rep.p = p;
    rep.beta = beta;
    rep.T = beta * std::log(static_cast<double>(p));
    bool complete = true;
    const auto items = reduced_powers(group, p, rep.T, complete);
    if (!complete) throw NumericalError(kModule, "geodesic table incomplete at T = " + std::to_string(rep.T));
    rep.classes = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            ++rep.pairs_checked;
            const bool same_trace = items[i].cp.trace == items[j].cp.trace;
            const bool conj = items[i].label == items[j].label;
            if (same_trace != conj) {
                ++rep.violation_count;
                if (rep.violations.size() < max_listed) {
                    rep.violations.push_back({i, j, items[i].cp.trace, items[j].cp.trace, same_trace});
                }
            }
        }
    }
    return rep;
}

double geodesic_weight(double length, int k) { return length / (1.0 - std::exp(k * length)); }

double dirac_sum(const std::vector<int>& class_id, const std::vector<double>& weight,
                 const std::vector<double>& centralizer) {
    if (class_id.size() != weight.size()) throw ValidationError(kModule, "class ids and weights differ in size");
    // Grouping by class turns the double sum into sum_c Z(c) (sum_{i in c} w_i)^2.
    std::map<int, double> totals;
    for (std::size_t i = 0; i < class_id.size(); ++i) totals[class_id[i]] += weight[i];
    double S = 0.0;
    for (const auto& [c, w] : totals) {
        if (c < 0 || static_cast<std::size_t>(c) >= centralizer.size()) {
            throw ValidationError(kModule, "class id without centralizer size");
        }
        S += centralizer[c] * w * w;
    }
    return S;
}

CharacterAverage character_average(const SchottkyGroup& group, std::int64_t p, double T,
                                   const std::function<double(double)>& test_fn, double epsilon) {
    check_prime(p);
    if (!(T > 0.0)) throw ValidationError(kModule, "T must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError(kModule, "epsilon must lie in (0, 1)");
    CharacterAverage out;
    out.p = p;
    out.T = T;
    out.epsilon = epsilon;
    bool complete = true;
    const auto items = reduced_powers(group, p, T, complete);
    if (!complete) throw NumericalError(kModule, "geodesic table incomplete at T = " + std::to_string(T));

    std::map<ConjClassLabel, int> ids;
    std::vector<int> class_id;
    std::vector<double> weight, centralizer;
    std::map<int, double> inner_count;
    std::map<std::int64_t, double> m_inner;
    for (const auto& it : items) {
        auto [pos, fresh] = ids.emplace(it.label, static_cast<int>(ids.size()));
        if (fresh) centralizer.push_back(static_cast<double>(centralizer_size(it.label, p)));
        const double L = it.cp.length / it.cp.k;
        class_id.push_back(pos->second);
        weight.push_back(geodesic_weight(L, it.cp.k) * test_fn(it.cp.length / T));
        if (it.cp.length <= T * (1.0 - epsilon)) {
            inner_count[pos->second] += 1.0;
            m_inner[it.cp.trace] += 1.0;
        }
    }
    out.terms = items.size();
    out.S = dirac_sum(class_id, weight, centralizer);
    for (const auto& [c, n] : inner_count) out.paired_count += n * n;
    for (const auto& [t, m] : m_inner) out.sum_m2 += m * m;
    out.lower_bound = static_cast<double>(p - 1) * out.paired_count;
    out.ratio = out.lower_bound > 0.0 ? out.S / out.lower_bound : 0.0;
    return out;
}

}  // namespace reslab
