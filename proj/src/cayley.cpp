#include "reslab/cayley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "cayley";

int wrap(long long x, int N) {
    const long long r = x % N;
    return static_cast<int>(r < 0 ? r + N : r);
}
}  // namespace

CayleyGraph::CayleyGraph(std::vector<int> moduli, std::vector<std::vector<int>> generators, bool allow_loops)
    : moduli_(std::move(moduli)), gens_(std::move(generators)) {
    if (moduli_.empty()) throw ValidationError(kModule, "need at least one modulus");
    for (int N : moduli_) {
        if (N < 1) throw ValidationError(kModule, "moduli must be >= 1");
        order_ *= N;
        if (order_ > 1'000'000) throw ValidationError(kModule, "group order above 1e6");
    }
    if (gens_.empty()) throw ValidationError(kModule, "empty generating set");
    for (auto& s : gens_) {
        if (s.size() != moduli_.size()) throw ValidationError(kModule, "generator has wrong dimension");
        for (std::size_t l = 0; l < s.size(); ++l) s[l] = wrap(s[l], moduli_[l]);
        if (!allow_loops && index(s) == 0) throw ValidationError(kModule, "generating set contains 0 (loops disabled)");
    }
    // Symmetry as multisets: count s and -s.
    std::vector<std::int64_t> idx, neg;
    for (const auto& s : gens_) {
        std::vector<int> t(s.size());
        for (std::size_t l = 0; l < s.size(); ++l) t[l] = wrap(-static_cast<long long>(s[l]), moduli_[l]);
        idx.push_back(index(s));
        neg.push_back(index(t));
    }
    std::sort(idx.begin(), idx.end());
    std::sort(neg.begin(), neg.end());
    if (idx != neg) throw ValidationError(kModule, "generating set is not symmetric");
    // Connectivity by BFS from 0.
    std::vector<char> seen(static_cast<std::size_t>(order_), 0);
    std::deque<std::int64_t> q{0};
    seen[0] = 1;
    std::int64_t reached = 1;
    while (!q.empty()) {
        const std::int64_t v = q.front();
        q.pop_front();
        for (int j = 0; j < degree(); ++j) {
            const std::int64_t w = neighbor(v, j);
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push_back(w);
            }
        }
    }
    if (reached != order_) throw ValidationError(kModule, "generating set does not generate the group");
}

CayleyGraph CayleyGraph::cycle(int N) { return CayleyGraph({N}, {{1}, {-1}}); }

std::int64_t CayleyGraph::index(const std::vector<int>& v) const {
    std::int64_t i = 0, stride = 1;
    for (std::size_t l = 0; l < moduli_.size(); ++l) {
        i += stride * wrap(v[l], moduli_[l]);
        stride *= moduli_[l];
    }
    return i;
}

std::vector<int> CayleyGraph::element(std::int64_t i) const {
    std::vector<int> v(moduli_.size());
    for (std::size_t l = 0; l < moduli_.size(); ++l) {
        v[l] = static_cast<int>(i % moduli_[l]);
        i /= moduli_[l];
    }
    return v;
}

std::int64_t CayleyGraph::neighbor(std::int64_t i, int generator) const {
    std::vector<int> v = element(i);
    const auto& s = gens_[generator];
    for (std::size_t l = 0; l < v.size(); ++l) v[l] = wrap(static_cast<long long>(v[l]) + s[l], moduli_[l]);
    return index(v);
}

std::vector<double> laplacian_eigenvalues(const CayleyGraph& g) {
    const auto& N = g.moduli();
    const double k = g.degree();
    std::vector<double> out(static_cast<std::size_t>(g.order()));
    parallel_for(out.size(), [&](std::size_t a) {
        const std::vector<int> alpha = g.element(static_cast<std::int64_t>(a));
        double acc = 0.0;
        for (const auto& s : g.generators()) {
            double phase = 0.0;
            for (std::size_t l = 0; l < N.size(); ++l) {
                // Reduce alpha_l s_l mod N_l first so the angle stays small.
                phase += static_cast<double>((static_cast<long long>(alpha[l]) * s[l]) % N[l]) / N[l];
            }
            acc += 1.0 - std::cos(2.0 * std::numbers::pi * phase);
        }
        out[a] = acc / k;
    });
    std::sort(out.begin(), out.end());
    return out;
}

double spectral_gap(const CayleyGraph& g) {
    if (g.order() < 2) throw ValidationError(kModule, "trivial group has no spectral gap");
    return laplacian_eigenvalues(g)[1];
}

Eigen::MatrixXd dense_laplacian(const CayleyGraph& g) {
    if (g.order() > 4096) throw ValidationError(kModule, "dense Laplacian limited to order 4096");
    const auto n = static_cast<Eigen::Index>(g.order());
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
    const double w = 1.0 / g.degree();
    for (Eigen::Index v = 0; v < n; ++v) {
        for (int j = 0; j < g.degree(); ++j) L(v, g.neighbor(v, j)) -= w;
    }
    return L;
}

std::int64_t boundary_size(const CayleyGraph& g, const std::vector<std::int64_t>& A) {
    std::vector<char> in(static_cast<std::size_t>(g.order()), 0);
    for (auto v : A) in[v] = 1;
    std::int64_t b = 0;
    for (auto v : A) {
        for (int j = 0; j < g.degree(); ++j) b += in[g.neighbor(v, j)] ? 0 : 1;
    }
    return b;
}

namespace {

struct Candidate {
    std::int64_t boundary = 0;
    std::int64_t size = 0;
    std::uint64_t mask = 0;

    // Exact comparison of boundary/size; ties go to the smaller mask.
    bool better_than(const Candidate& o) const {
        if (size == 0) return false;
        if (o.size == 0) return true;
        const std::int64_t lhs = boundary * o.size, rhs = o.boundary * size;
        if (lhs != rhs) return lhs < rhs;
        return mask < o.mask;
    }
};

CheegerResult exhaustive_cheeger(const CayleyGraph& g) {
    const int n = static_cast<int>(g.order());
    const int k = g.degree();
    // Byte tables: image of every byte of a vertex mask under v -> v + s.
    const int nbytes = (n + 7) / 8;
    std::vector<std::uint32_t> table(static_cast<std::size_t>(k) * nbytes * 256, 0);
    for (int j = 0; j < k; ++j) {
        for (int b = 0; b < nbytes; ++b) {
            for (int byte = 0; byte < 256; ++byte) {
                std::uint32_t img = 0;
                for (int bit = 0; bit < 8; ++bit) {
                    const int v = 8 * b + bit;
                    if (v < n && (byte >> bit & 1)) img |= 1u << g.neighbor(v, j);
                }
                table[(static_cast<std::size_t>(j) * nbytes + b) * 256 + byte] = img;
            }
        }
    }
    // Vertex transitivity: translate any A so that it contains vertex 0.
    const std::uint64_t total = std::uint64_t{1} << (n - 1);
    const std::size_t chunks = 256;
    std::vector<Candidate> best(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        const std::uint64_t lo = total * c / chunks, hi = total * (c + 1) / chunks;
        Candidate local;
        for (std::uint64_t r = lo; r < hi; ++r) {
            const std::uint32_t A = static_cast<std::uint32_t>((r << 1) | 1u);
            const int size = std::popcount(A);
            if (2 * size > n) continue;
            std::int64_t bnd = 0;
            for (int j = 0; j < k; ++j) {
                std::uint32_t img = 0;
                const std::uint32_t* t = &table[static_cast<std::size_t>(j) * nbytes * 256];
                for (int b = 0; b < nbytes; ++b) img |= t[b * 256 + ((A >> (8 * b)) & 0xffu)];
                bnd += std::popcount(img & ~A);
            }
            const Candidate cand{bnd, size, A};
            if (cand.better_than(local)) local = cand;
        }
        best[c] = local;
    });
    Candidate overall;
    for (const auto& c : best) {
        if (c.better_than(overall)) overall = c;
    }
    CheegerResult res;
    res.h = static_cast<double>(overall.boundary) / static_cast<double>(overall.size);
    res.exact = true;
    res.best_set = overall.mask;
    res.subsets = static_cast<std::int64_t>(total);
    return res;
}

CheegerResult sampled_cheeger(const CayleyGraph& g, std::uint64_t seed, int samples) {
    const std::int64_t n = g.order();
    const std::int64_t half = n / 2;
    double best = g.degree();  // singletons
    std::int64_t examined = 1;
    // Word-metric balls around 0, grown one BFS layer at a time.
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::vector<std::int64_t> order{0};
    dist[0] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (int j = 0; j < g.degree(); ++j) {
            const std::int64_t w = g.neighbor(order[head], j);
            if (dist[w] < 0) {
                dist[w] = dist[order[head]] + 1;
                order.push_back(w);
            }
        }
    }
    for (std::int64_t size = 1; size <= half; ++size) {
        // Prefixes of the BFS order are balls plus part of a sphere.
        std::vector<std::int64_t> A(order.begin(), order.begin() + size);
        best = std::min(best, static_cast<double>(boundary_size(g, A)) / static_cast<double>(size));
        ++examined;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> pick_size(1, std::max<std::int64_t>(1, half));
    std::vector<std::int64_t> all(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) all[i] = i;
    for (int t = 0; t < samples; ++t) {
        const std::int64_t size = pick_size(rng);
        for (std::int64_t i = 0; i < size; ++i) {
            std::uniform_int_distribution<std::int64_t> d(i, n - 1);
            std::swap(all[i], all[d(rng)]);
        }
        std::vector<std::int64_t> A(all.begin(), all.begin() + size);
        best = std::min(best, static_cast<double>(boundary_size(g, A)) / static_cast<double>(size));
        ++examined;
    }
    CheegerResult res;
    res.h = best;
    res.exact = false;
    res.subsets = examined;
    return res;
}

}  // namespace

CheegerResult cheeger_constant(const CayleyGraph& g, int exhaustive_cap, std::uint64_t seed, int samples) {
    if (exhaustive_cap > 30) throw ValidationError(kModule, "exhaustive Cheeger search is capped at 30 vertices");
    if (g.order() < 2) throw ValidationError(kModule, "Cheeger constant needs at least 2 vertices");
    if (g.order() <= exhaustive_cap) return exhaustive_cheeger(g);
    return sampled_cheeger(g, seed, samples);
}

SandwichReport sandwich_check(const CayleyGraph& g, int exhaustive_cap) {
    if (g.order() > exhaustive_cap) {
        throw ValidationError(kModule, "sandwich check needs the exhaustive Cheeger regime (order <= " +
                                           std::to_string(exhaustive_cap) + ")");
    }
    SandwichReport r;
    const double k = g.degree();
    r.lambda1 = spectral_gap(g);
    const CheegerResult ch = cheeger_constant(g, exhaustive_cap);
    r.h = ch.h;
    r.h_exact = ch.exact;
    r.lower = 0.5 * k * r.lambda1;
    const double lam = std::clamp(r.lambda1, 0.0, 1.0);
    r.upper = k * std::sqrt(lam * (1.0 - lam));
    r.upper_checked = r.lambda1 < 1.0;
    r.upper_alt = k * std::sqrt(r.lambda1 * std::max(0.0, 2.0 - r.lambda1));
    constexpr double tol = 1e-12;
    r.lower_slack = r.h - r.lower;
    r.upper_slack = r.upper - r.h;
    r.lower_ok = r.lower_slack >= -tol;
    r.upper_ok = !r.upper_checked || r.upper_slack >= -tol;
    return r;
}

GapDecayTable gap_decay_experiment(const std::vector<int>& Ns, const std::vector<int>& other_moduli,
                                   const std::vector<std::vector<int>>& generators) {
    if (Ns.empty()) throw ValidationError(kModule, "empty N sequence");
    GapDecayTable t;
    for (int N : Ns) {
        std::vector<int> moduli{N};
        moduli.insert(moduli.end(), other_moduli.begin(), other_moduli.end());
        // Letters that die in the quotient would be loops; drop them.
        std::vector<std::vector<int>> S;
        for (const auto& s : generators) {
            if (s.size() != moduli.size()) throw ValidationError(kModule, "generator has wrong dimension");
            bool zero = true;
            for (std::size_t l = 0; l < s.size(); ++l) zero = zero && wrap(s[l], moduli[l]) == 0;
            if (!zero) S.push_back(s);
        }
        const CayleyGraph g(moduli, S);
        GapDecayRow row;
        row.N = N;
        row.lambda1 = spectral_gap(g);
        row.scaled = row.lambda1 * N * static_cast<double>(N);
        const CheegerResult ch = cheeger_constant(g);
        row.h = ch.h;
        row.h_exact = ch.exact;
        t.rows.push_back(row);
    }
    double lo = t.rows.front().scaled, hi = lo;
    for (const auto& r : t.rows) {
        lo = std::min(lo, r.scaled);
        hi = std::max(hi, r.scaled);
    }
    t.limit = t.rows.back().scaled;
    t.relative_spread = (hi - lo) / hi;
    if (t.rows.size() >= 2) {
        double mx = 0, my = 0;
        for (const auto& r : t.rows) {
            mx += std::log(r.N);
            my += std::log(r.lambda1);
        }
        mx /= t.rows.size();
        my /= t.rows.size();
        double sxy = 0, sxx = 0;
        for (const auto& r : t.rows) {
            sxy += (std::log(r.N) - mx) * (std::log(r.lambda1) - my);
            sxx += (std::log(r.N) - mx) * (std::log(r.N) - mx);
        }
        t.fitted_power = sxy / sxx;
    }
    return t;
}

}  // namespace reslab
