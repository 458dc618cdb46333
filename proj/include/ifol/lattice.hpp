#ifndef IFOL_LATTICE_HPP
#define IFOL_LATTICE_HPP

#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sexpr.hpp"

namespace ifol {

/** \brief Finite lattice on {0..n-1} with precomputed order, meets and joins. */
struct FinLattice {
    int n = 0;
    std::vector<std::vector<char>> le;
    std::vector<std::vector<int>> meet_t, join_t;
    int bottom = 0, top = 0;
    std::vector<std::string> names;

    bool leq(int a, int b) const { return le[a][b] != 0; }
    int meet(int a, int b) const { return meet_t[a][b]; }
    int join(int a, int b) const { return join_t[a][b]; }
    int meet(const std::vector<int>& xs) const {
        int m = top;
        for (int x : xs) m = meet(m, x);
        return m;
    }
    int join(const std::vector<int>& xs) const {
        int j = bottom;
        for (int x : xs) j = join(j, x);
        return j;
    }
    std::string name(int a) const { return names.empty() ? std::to_string(a) : names[a]; }

    /**
     * \brief Build from generating order pairs (a <= b); takes the reflexive
     * transitive closure and throws unless the result is a lattice.
     */
    static FinLattice from_order(int n, const std::vector<std::pair<int, int>>& pairs, std::vector<std::string> names = {}) {
        if (n < 1) throw std::invalid_argument("lattice must be nonempty");
        FinLattice L;
        L.n = n;
        L.names = std::move(names);
        L.le.assign(n, std::vector<char>(n, 0));
        for (int i = 0; i < n; ++i) L.le[i][i] = 1;
        for (auto [a, b] : pairs) {
            if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("order pair out of range");
            L.le[a][b] = 1;
        }
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (L.le[i][k] && L.le[k][j]) L.le[i][j] = 1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && L.le[i][j] && L.le[j][i]) throw std::invalid_argument("order is not antisymmetric");
        L.meet_t.assign(n, std::vector<int>(n, -1));
        L.join_t.assign(n, std::vector<int>(n, -1));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                for (int c = 0; c < n; ++c) {
                    if (L.le[c][a] && L.le[c][b]) {
                        bool greatest = true;
                        for (int d = 0; d < n; ++d)
                            if (L.le[d][a] && L.le[d][b] && !L.le[d][c]) greatest = false;
                        if (greatest) L.meet_t[a][b] = c;
                    }
                    if (L.le[a][c] && L.le[b][c]) {
                        bool least = true;
                        for (int d = 0; d < n; ++d)
                            if (L.le[a][d] && L.le[b][d] && !L.le[c][d]) least = false;
                        if (least) L.join_t[a][b] = c;
                    }
                }
                if (L.meet_t[a][b] < 0 || L.join_t[a][b] < 0) throw std::invalid_argument("order is not a lattice");
            }
        L.bottom = 0;
        L.top = 0;
        for (int a = 0; a < n; ++a) {
            if (L.leq(a, L.bottom)) L.bottom = a;
            if (L.leq(L.top, a)) L.top = a;
        }
        return L;
    }

    std::vector<int> all() const {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return v;
    }

    /** Heyting implication if it exists */
    std::optional<int> implies(int a, int b) const {
        int best = -1;
        for (int c = 0; c < n; ++c)
            if (leq(meet(c, a), b) && (best < 0 || leq(best, c))) best = c;
        if (best < 0) return std::nullopt;
        for (int c = 0; c < n; ++c)
            if (leq(meet(c, a), b) && !leq(c, best)) return std::nullopt;
        return best;
    }
    std::optional<int> pseudo_complement(int a) const { return implies(a, bottom); }

    std::vector<std::pair<int, int>> covers() const {
        std::vector<std::pair<int, int>> out;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b || !leq(a, b)) continue;
                bool cover = true;
                for (int c = 0; c < n; ++c)
                    if (c != a && c != b && leq(a, c) && leq(c, b)) cover = false;
                if (cover) out.push_back({a, b});
            }
        return out;
    }
};

namespace lattices {

inline FinLattice chain(int n) {
    std::vector<std::pair<int, int>> p;
    for (int i = 0; i + 1 < n; ++i) p.push_back({i, i + 1});
    return FinLattice::from_order(n, p);
}

/** Boolean algebra of subsets of a k-element set, element = bitmask */
inline FinLattice boolean(int k) {
    int n = 1 << k;
    std::vector<std::pair<int, int>> p;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if ((a & b) == a) p.push_back({a, b});
    return FinLattice::from_order(n, p);
}

/** 0 < a,b,c < 1 with a,b,c pairwise incomparable */
inline FinLattice m3() { return FinLattice::from_order(5, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {3, 4}}, {"0", "a", "b", "c", "1"}); }

/** 0 < a < b < 1, 0 < c < 1 */
inline FinLattice n5() { return FinLattice::from_order(5, {{0, 1}, {1, 2}, {2, 4}, {0, 3}, {3, 4}}, {"0", "a", "b", "c", "1"}); }

/** 0 < a,b < 1 (the Boolean square) */
inline FinLattice diamond() { return FinLattice::from_order(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {"0", "a", "b", "1"}); }

inline std::vector<int> canonical_order_code(const FinLattice& L) {
    std::vector<int> perm = L.all();
    std::vector<int> best;
    bool first = true;
    do {
        std::vector<int> code;
        std::vector<int> inv(L.n);
        for (int i = 0; i < L.n; ++i) inv[perm[i]] = i;
        for (int i = 0; i < L.n; ++i)
            for (int j = 0; j < L.n; ++j) code.push_back(L.leq(inv[i], inv[j]));
        if (first || code < best) best = code;
        first = false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/** \brief All lattices with exactly n elements, up to isomorphism. */
inline std::vector<FinLattice> all_of_size(int n) {
    std::vector<FinLattice> out;
    if (n == 1) return {FinLattice::from_order(1, {})};
    // element 0 bottom, n-1 top; inner elements ordered compatibly with their index
    int m = n - 2;
    std::vector<std::pair<int, int>> slots;
    for (int i = 1; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j) slots.push_back({i, j});
    std::set<std::vector<int>> seen;
    for (unsigned mask = 0; mask < (1u << slots.size()); ++mask) {
        std::vector<std::pair<int, int>> p;
        for (int i = 1; i <= m; ++i) p.push_back({0, i}), p.push_back({i, n - 1});
        p.push_back({0, n - 1});
        for (size_t k = 0; k < slots.size(); ++k)
            if (mask & (1u << k)) p.push_back(slots[k]);
        FinLattice L;
        try {
            L = FinLattice::from_order(n, p);
        } catch (const std::invalid_argument&) {
            continue;
        }
        // only keep transitively reduced masks once: identify by order, then iso class
        auto code = canonical_order_code(L);
        if (seen.insert(code).second) out.push_back(L);
    }
    return out;
}

inline std::vector<FinLattice> all_up_to(int max_n) {
    std::vector<FinLattice> out;
    for (int n = 1; n <= max_n; ++n)
        for (auto& L : all_of_size(n)) out.push_back(L);
    return out;
}

}  // namespace lattices

/** first failure of a(b1 v b2) <= ab1 v ab2, if any */
inline std::optional<std::vector<int>> distributivity_witness(const FinLattice& L) {
    for (int a = 0; a < L.n; ++a)
        for (int b = 0; b < L.n; ++b)
            for (int c = 0; c < L.n; ++c)
                if (!L.leq(L.meet(a, L.join(b, c)), L.join(L.meet(a, b), L.meet(a, c)))) return std::vector<int>{a, b, c};
    return std::nullopt;
}

inline bool is_distributive(const FinLattice& L) { return !distributivity_witness(L).has_value(); }

struct LatticeVerdict {
    bool holds = true;
    std::string law;          // "distributivity" or "tree-transitivity"
    std::vector<int> witness; // element assignment, see law
};

/**
 * \brief Check the intuitionistic distributive law for families of size
 * <= gamma, then the propositional tree-transitivity property on gamma^{<=h}:
 * if a_f <= join of the children of f for every internal f, then
 * a_root <= join over leaves f of meet of the labels along f.
 * Witness for the tree law lists labels in level order.
 */
inline LatticeVerdict check_distributivity(const FinLattice& L, int gamma = 2, int h = -1) {
    if (h < 0) h = gamma;
    for (int k = 0; k <= gamma; ++k) {
        std::vector<int> fam(k, 0);
        for (;;) {
            for (int a = 0; a < L.n; ++a) {
                std::vector<int> ab;
                for (int b : fam) ab.push_back(L.meet(a, b));
                if (!L.leq(L.meet(a, L.join(fam)), L.join(ab))) {
                    std::vector<int> w{a};
                    w.insert(w.end(), fam.begin(), fam.end());
                    return {false, "distributivity", w};
                }
            }
            int i = 0;
            while (i < k && fam[i] == L.n - 1) fam[i++] = 0;
            if (i == k) break;
            fam[i]++;
        }
    }
    // nodes in level order; children of node i are gamma*i+1 .. gamma*i+gamma
    int total = 0, lvl = 1;
    for (int d = 0; d <= h; ++d, lvl *= gamma) total += lvl;
    int internal = total - lvl / gamma;
    std::vector<int> lab(total, 0);
    LatticeVerdict out;
    // enumerate labels; premise of node i checkable once its last child is labelled
    std::function<bool(int)> go = [&](int i) -> bool {
        if (i == total) {
            int big = L.bottom;
            for (int leaf = internal; leaf < total; ++leaf) {
                int m = L.top, j = leaf;
                for (;;) {
                    m = L.meet(m, lab[j]);
                    if (j == 0) break;
                    j = (j - 1) / gamma;
                }
                big = L.join(big, m);
            }
            if (!L.leq(lab[0], big)) {
                out = {false, "tree-transitivity", lab};
                return false;
            }
            return true;
        }
        for (int v = 0; v < L.n; ++v) {
            lab[i] = v;
            if (i > 0 && (i - 1) % gamma == gamma - 1) {
                int parent = (i - 1) / gamma;
                int j = L.bottom;
                for (int c = 0; c < gamma; ++c) j = L.join(j, lab[gamma * parent + 1 + c]);
                if (!L.leq(lab[parent], j)) continue;
            }
            if (!go(i + 1)) return false;
        }
        return true;
    };
    if (h > 0) go(0);
    return out;
}

// ------------------------------------------------------------ filters

/** \brief A filter (or ideal) given by its member set. */
struct LatFilter {
    enum Kind { Filter, Ideal } kind = Filter;
    std::vector<char> member;

    bool contains(int a) const { return member.at(a) != 0; }
    bool operator==(const LatFilter& o) const { return kind == o.kind && member == o.member; }
    bool operator<(const LatFilter& o) const { return member < o.member; }
};

inline LatFilter principal_filter(const FinLattice& L, int u) {
    LatFilter F;
    F.member.assign(L.n, 0);
    for (int a = 0; a < L.n; ++a) F.member[a] = L.leq(u, a);
    return F;
}

inline LatFilter principal_ideal(const FinLattice& L, int u) {
    LatFilter F;
    F.kind = LatFilter::Ideal;
    F.member.assign(L.n, 0);
    for (int a = 0; a < L.n; ++a) F.member[a] = L.leq(a, u);
    return F;
}

inline bool is_filter(const FinLattice& L, const LatFilter& F) {
    bool any = false;
    for (int a = 0; a < L.n; ++a) {
        if (!F.contains(a)) continue;
        any = true;
        for (int b = 0; b < L.n; ++b) {
            if (L.leq(a, b) && !F.contains(b)) return false;
            if (F.contains(b) && !F.contains(L.meet(a, b))) return false;
        }
    }
    return any;
}

inline bool is_proper(const FinLattice& L, const LatFilter& F) { return !F.contains(L.bottom); }

/** proper and prime: a v b in F implies a in F or b in F */
inline bool is_prime(const FinLattice& L, const LatFilter& F) {
    if (!is_filter(L, F) || !is_proper(L, F)) return false;
    for (int a = 0; a < L.n; ++a)
        for (int b = 0; b < L.n; ++b)
            if (F.contains(L.join(a, b)) && !F.contains(a) && !F.contains(b)) return false;
    return true;
}

/** meet of the members (filters of finite lattices are principal) */
inline int filter_generator(const FinLattice& L, const LatFilter& F) {
    int u = L.top;
    for (int a = 0; a < L.n; ++a)
        if (F.contains(a)) u = L.meet(u, a);
    return u;
}

inline std::vector<LatFilter> proper_filters(const FinLattice& L) {
    std::vector<LatFilter> out;
    for (int u = 0; u < L.n; ++u)
        if (u != L.bottom || L.n == 1) {
            auto F = principal_filter(L, u);
            if (is_proper(L, F)) out.push_back(F);
        }
    return out;
}

inline std::vector<LatFilter> prime_filters(const FinLattice& L) {
    std::vector<LatFilter> out;
    for (auto& F : proper_filters(L))
        if (is_prime(L, F)) out.push_back(F);
    return out;
}

struct Quotient {
    FinLattice K;
    std::vector<int> theta;     // L -> K
    int generator = 0;          // u with F = up(u)
    bool is_morphism = false;   // theta preserves meets, joins, top and bottom
};

/**
 * \brief Quotient by a proper filter F = up(u): a ~ b iff a meet u = b meet u.
 * K is realised on the classes, ordered by their representatives a meet u.
 */
inline Quotient quotient_by_filter(const FinLattice& L, const LatFilter& F) {
    if (F.kind != LatFilter::Filter || !is_filter(L, F)) throw std::invalid_argument("not a filter");
    if (!is_proper(L, F)) throw std::invalid_argument("filter is improper");
    Quotient q;
    q.generator = filter_generator(L, F);
    std::vector<int> reps;
    q.theta.assign(L.n, -1);
    for (int a = 0; a < L.n; ++a) {
        int r = L.meet(a, q.generator);
        auto it = std::find(reps.begin(), reps.end(), r);
        if (it == reps.end()) {
            q.theta[a] = static_cast<int>(reps.size());
            reps.push_back(r);
        } else {
            q.theta[a] = static_cast<int>(it - reps.begin());
        }
    }
    std::vector<std::pair<int, int>> p;
    for (size_t i = 0; i < reps.size(); ++i)
        for (size_t j = 0; j < reps.size(); ++j)
            if (L.leq(reps[i], reps[j])) p.push_back({static_cast<int>(i), static_cast<int>(j)});
    q.K = FinLattice::from_order(static_cast<int>(reps.size()), p);
    bool ok = q.theta[L.top] == q.K.top && q.theta[L.bottom] == q.K.bottom;
    for (int a = 0; a < L.n && ok; ++a)
        for (int b = 0; b < L.n && ok; ++b)
            ok = q.theta[L.meet(a, b)] == q.K.meet(q.theta[a], q.theta[b]) &&
                 q.theta[L.join(a, b)] == q.K.join(q.theta[a], q.theta[b]);
    q.is_morphism = ok;
    return q;
}

struct Representation {
    std::vector<LatFilter> primes;
    std::vector<std::set<int>> image;  // indices of prime filters containing each element
    bool injective = false;
    bool preserves_meets = false;
    bool preserves_joins = false;
    bool embedding() const { return injective && preserves_meets && preserves_joins; }
};

/** \brief e(a) = set of prime filters containing a, into the powerset of the primes. */
inline Representation representation_map(const FinLattice& L) {
    Representation r;
    r.primes = prime_filters(L);
    for (int a = 0; a < L.n; ++a) {
        std::set<int> s;
        for (size_t i = 0; i < r.primes.size(); ++i)
            if (r.primes[i].contains(a)) s.insert(static_cast<int>(i));
        r.image.push_back(s);
    }
    r.injective = std::set<std::set<int>>(r.image.begin(), r.image.end()).size() == static_cast<size_t>(L.n);
    r.preserves_meets = r.preserves_joins = true;
    for (int a = 0; a < L.n; ++a)
        for (int b = 0; b < L.n; ++b) {
            std::set<int> m, j;
            std::set_intersection(r.image[a].begin(), r.image[a].end(), r.image[b].begin(), r.image[b].end(), std::inserter(m, m.end()));
            std::set_union(r.image[a].begin(), r.image[a].end(), r.image[b].begin(), r.image[b].end(), std::inserter(j, j.end()));
            if (m != r.image[L.meet(a, b)]) r.preserves_meets = false;
            if (j != r.image[L.join(a, b)]) r.preserves_joins = false;
        }
    return r;
}

// ------------------------------------------------------------ pairing

/** start of the block of values with max(beta, gamma) = m */
inline long long pairing_block(long long m) { return m * m; }

/**
 * \brief The pairing bijection N x N -> N:
 * f(b, g) = S(g) + b if b < g, S(b) + b + g otherwise, where S(m) = m^2 is
 * the least value not below any f(b', g') with b', g' < m.
 */
inline long long pairing(long long beta, long long gamma) {
    if (beta < 0 || gamma < 0) throw std::invalid_argument("pairing of negative index");
    if (beta < gamma) return pairing_block(gamma) + beta;
    return pairing_block(beta) + beta + gamma;
}

inline std::pair<long long, long long> pairing_inverse(long long alpha) {
    if (alpha < 0) throw std::invalid_argument("negative index");
    long long m = 0;
    while (pairing_block(m + 1) <= alpha) ++m;
    long long off = alpha - pairing_block(m);
    if (off < m) return {off, m};
    return {m, off - m};
}

// ------------------------------------------------------------ text form

inline SExpr lattice_sexpr(const FinLattice& L) {
    SExpr l = SExpr::list({SExpr::sym("lattice"), SExpr::list({SExpr::sym("size"), SExpr::sym(std::to_string(L.n))})});
    if (!L.names.empty()) {
        SExpr e = SExpr::list({SExpr::sym("names")});
        for (auto& s : L.names) e.add(SExpr::sym(s));
        l.add(e);
    }
    for (auto [a, b] : L.covers()) l.add(SExpr::list({SExpr::sym("le"), SExpr::sym(L.name(a)), SExpr::sym(L.name(b))}));
    return l;
}

inline FinLattice read_lattice(const SExpr& e) {
    if (e.head() != "lattice") throw ParseError("expected (lattice ...)", e.pos);
    int n = -1;
    std::vector<std::string> names;
    for (size_t i = 1; i < e.size(); ++i) {
        if (e[i].head() == "size") n = std::stoi(e[i][1].text);
        if (e[i].head() == "names")
            for (size_t j = 1; j < e[i].size(); ++j) names.push_back(e[i][j].text);
        if (e[i].head() == "chain") return lattices::chain(std::stoi(e[i][1].text));
        if (e[i].head() == "boolean") return lattices::boolean(std::stoi(e[i][1].text));
        if (e[i].is_symbol("M3")) return lattices::m3();
        if (e[i].is_symbol("N5")) return lattices::n5();
    }
    if (n < 0) n = static_cast<int>(names.size());
    if (n <= 0) throw ParseError("lattice needs (size n) or (names ...)", e.pos);
    auto idx = [&](const SExpr& s) -> int {
        for (size_t k = 0; k < names.size(); ++k)
            if (names[k] == s.text) return static_cast<int>(k);
        try {
            int v = std::stoi(s.text);
            if (v >= 0 && v < n) return v;
        } catch (const std::logic_error&) {
        }
        throw ParseError("unknown lattice element '" + s.text + "'", s.pos);
    };
    std::vector<std::pair<int, int>> p;
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "le") p.push_back({idx(e[i][1]), idx(e[i][2])});
    try {
        return FinLattice::from_order(n, p, names);
    } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what(), e.pos);
    }
}

}  // namespace ifol

#endif
