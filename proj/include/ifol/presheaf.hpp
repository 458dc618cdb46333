#ifndef IFOL_PRESHEAF_HPP
#define IFOL_PRESHEAF_HPP

#include "setmodels.hpp"
#include "syntax.hpp"
#include "text.hpp"

namespace ifol {

/**
 * \brief Finite category. Arrows are numbered; comp[g][f] is g.f (f first)
 * or -1 when not composable.
 */
struct FinCat {
    struct Arrow {
        int dom = 0, cod = 0;
        std::string name;
    };
    int n = 0;
    std::vector<std::string> names;
    std::vector<Arrow> arrows;
    std::vector<int> identity;
    std::vector<std::vector<int>> comp;

    int dom(int f) const { return arrows[f].dom; }
    int cod(int f) const { return arrows[f].cod; }
    int compose(int g, int f) const { return comp[g][f]; }
    int num_arrows() const { return static_cast<int>(arrows.size()); }
    std::string obj_name(int c) const { return names.empty() ? std::to_string(c) : names[c]; }

    std::vector<int> into(int c) const {
        std::vector<int> out;
        for (int f = 0; f < num_arrows(); ++f)
            if (cod(f) == c) out.push_back(f);
        return out;
    }
    std::vector<int> hom(int a, int b) const {
        std::vector<int> out;
        for (int f = 0; f < num_arrows(); ++f)
            if (dom(f) == a && cod(f) == b) out.push_back(f);
        return out;
    }

    /** throws unless identities, units and associativity hold */
    void validate() const {
        if (static_cast<int>(identity.size()) != n) throw std::invalid_argument("missing identities");
        for (int c = 0; c < n; ++c)
            if (dom(identity[c]) != c || cod(identity[c]) != c) throw std::invalid_argument("identity with wrong endpoints");
        int m = num_arrows();
        for (int f = 0; f < m; ++f)
            for (int g = 0; g < m; ++g) {
                int h = comp[g][f];
                if (cod(f) == dom(g)) {
                    if (h < 0 || dom(h) != dom(f) || cod(h) != cod(g)) throw std::invalid_argument("composite missing or misplaced");
                } else if (h >= 0) {
                    throw std::invalid_argument("composite of non-composable arrows");
                }
            }
        for (int f = 0; f < m; ++f) {
            if (comp[identity[cod(f)]][f] != f || comp[f][identity[dom(f)]] != f) throw std::invalid_argument("unit law fails");
            for (int g = 0; g < m; ++g) {
                if (cod(f) != dom(g)) continue;
                for (int h = 0; h < m; ++h)
                    if (cod(g) == dom(h) && comp[h][comp[g][f]] != comp[comp[h][g]][f]) throw std::invalid_argument("associativity fails");
            }
        }
    }

    /** the category of a rooted tree given by parent links: an arrow l -> k whenever k is below or equal to l */
    static FinCat of_tree(const std::vector<int>& parent) {
        int n = static_cast<int>(parent.size());
        auto below = [&](int l, int k) {
            for (int x = l; x >= 0; x = parent[x])
                if (x == k) return true;
            return false;
        };
        return thin(n, below);
    }

    /** thin category with an arrow a -> b iff le(a, b); le must be a preorder */
    template <class Le>
    static FinCat thin(int n, Le&& le, std::vector<std::string> names = {}) {
        FinCat C;
        C.n = n;
        C.names = std::move(names);
        std::vector<std::vector<int>> id(n, std::vector<int>(n, -1));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (le(a, b)) {
                    id[a][b] = static_cast<int>(C.arrows.size());
                    C.arrows.push_back({a, b, C.obj_name(a) + "<=" + C.obj_name(b)});
                }
        C.identity.resize(n);
        for (int a = 0; a < n; ++a) C.identity[a] = id[a][a];
        int m = C.num_arrows();
        C.comp.assign(m, std::vector<int>(m, -1));
        for (int f = 0; f < m; ++f)
            for (int g = 0; g < m; ++g)
                if (C.cod(f) == C.dom(g)) C.comp[g][f] = id[C.dom(f)][C.cod(g)];
        return C;
    }

    /** the arrow a -> b of a thin category, or -1 */
    int thin_arrow(int a, int b) const {
        for (int f = 0; f < num_arrows(); ++f)
            if (dom(f) == a && cod(f) == b) return f;
        return -1;
    }
};

/** \brief Contravariant functor C^op -> FinSet: restrict[f] maps F(cod f) to F(dom f). */
struct Presheaf {
    std::vector<int> size;
    std::vector<std::vector<int>> restrict;

    int at(int f, int x) const { return restrict[f][x]; }

    void validate(const FinCat& C) const {
        if (static_cast<int>(size.size()) != C.n || static_cast<int>(restrict.size()) != C.num_arrows())
            throw std::invalid_argument("presheaf shape does not match category");
        for (int f = 0; f < C.num_arrows(); ++f) {
            if (static_cast<int>(restrict[f].size()) != size[C.cod(f)]) throw std::invalid_argument("restriction has wrong domain");
            for (int x : restrict[f])
                if (x < 0 || x >= size[C.dom(f)]) throw std::invalid_argument("restriction out of range");
        }
        for (int c = 0; c < C.n; ++c)
            for (int x = 0; x < size[c]; ++x)
                if (restrict[C.identity[c]][x] != x) throw std::invalid_argument("identity does not act trivially");
        for (int f = 0; f < C.num_arrows(); ++f)
            for (int g = 0; g < C.num_arrows(); ++g) {
                if (C.cod(f) != C.dom(g)) continue;
                int gf = C.compose(g, f);
                for (int x = 0; x < size[C.cod(g)]; ++x)
                    if (restrict[gf][x] != restrict[f][restrict[g][x]]) throw std::invalid_argument("restriction not functorial");
            }
    }

    int total() const {
        int t = 0;
        for (int s : size) t += s;
        return t;
    }
};

inline Presheaf terminal_presheaf(const FinCat& C) {
    Presheaf P;
    P.size.assign(C.n, 1);
    P.restrict.assign(C.num_arrows(), std::vector<int>{0});
    return P;
}

/** Hom(-, c) with elements numbered by position in C.into(c) */
inline Presheaf representable(const FinCat& C, int c) {
    Presheaf P;
    std::vector<std::vector<int>> elems(C.n);
    std::map<int, int> pos;
    for (int f : C.into(c)) {
        pos[f] = static_cast<int>(elems[C.dom(f)].size());
        elems[C.dom(f)].push_back(f);
    }
    for (int d = 0; d < C.n; ++d) P.size.push_back(static_cast<int>(elems[d].size()));
    P.restrict.resize(C.num_arrows());
    for (int g = 0; g < C.num_arrows(); ++g)
        for (int f : elems[C.cod(g)]) P.restrict[g].push_back(pos[C.compose(f, g)]);
    return P;
}

/** componentwise product; elements are mixed-radix tuples */
inline Presheaf product(const FinCat& C, const std::vector<const Presheaf*>& fs) {
    Presheaf P;
    for (int c = 0; c < C.n; ++c) {
        int s = 1;
        for (auto* F : fs) s *= F->size[c];
        P.size.push_back(s);
    }
    P.restrict.resize(C.num_arrows());
    for (int f = 0; f < C.num_arrows(); ++f) {
        std::vector<int> rc, rd;
        for (auto* F : fs) {
            rc.push_back(F->size[C.cod(f)]);
            rd.push_back(F->size[C.dom(f)]);
        }
        for (int x = 0; x < P.size[C.cod(f)]; ++x) {
            auto t = tuple_at(x, rc);
            for (size_t k = 0; k < fs.size(); ++k) t[k] = fs[k]->at(f, t[k]);
            P.restrict[f].push_back(static_cast<int>(tuple_index(t, rd)));
        }
    }
    return P;
}

/** \brief Subfunctor: per-object membership closed under restriction. */
struct Subfunctor {
    std::vector<std::vector<char>> in;

    bool contains(int c, int x) const { return in[c][x] != 0; }
    bool operator==(const Subfunctor& o) const { return in == o.in; }
    bool operator!=(const Subfunctor& o) const { return in != o.in; }
    bool operator<(const Subfunctor& o) const { return in < o.in; }
    bool leq(const Subfunctor& o) const {
        for (size_t c = 0; c < in.size(); ++c)
            for (size_t x = 0; x < in[c].size(); ++x)
                if (in[c][x] && !o.in[c][x]) return false;
        return true;
    }
};

inline Subfunctor empty_sub(const Presheaf& F) {
    Subfunctor S;
    for (int s : F.size) S.in.push_back(std::vector<char>(s, 0));
    return S;
}

inline Subfunctor full_sub(const Presheaf& F) {
    Subfunctor S;
    for (int s : F.size) S.in.push_back(std::vector<char>(s, 1));
    return S;
}

inline bool is_subfunctor(const FinCat& C, const Presheaf& F, const Subfunctor& S) {
    for (int f = 0; f < C.num_arrows(); ++f)
        for (int x = 0; x < F.size[C.cod(f)]; ++x)
            if (S.contains(C.cod(f), x) && !S.contains(C.dom(f), F.at(f, x))) return false;
    return true;
}

/** smallest subfunctor containing x at c */
inline Subfunctor generated_sub(const FinCat& C, const Presheaf& F, int c, int x) {
    Subfunctor S = empty_sub(F);
    for (int f : C.into(c)) S.in[C.dom(f)][F.at(f, x)] = 1;
    return S;
}

/** \brief All subfunctors of F, in a deterministic order. */
inline std::vector<Subfunctor> all_subfunctors(const FinCat& C, const Presheaf& F, size_t limit = 1u << 16) {
    std::vector<std::pair<int, int>> elems;
    for (int c = 0; c < C.n; ++c)
        for (int x = 0; x < F.size[c]; ++x) elems.push_back({c, x});
    std::vector<Subfunctor> out;
    Subfunctor S = empty_sub(F);
    std::function<void(size_t)> go = [&](size_t k) {
        if (out.size() >= limit) return;
        if (k == elems.size()) {
            if (is_subfunctor(C, F, S)) out.push_back(S);
            return;
        }
        auto [c, x] = elems[k];
        S.in[c][x] = 0;
        go(k + 1);
        S.in[c][x] = 1;
        go(k + 1);
        S.in[c][x] = 0;
    };
    go(0);
    return out;
}

/** \brief Natural transformation given by its components. */
struct NatTrans {
    std::vector<std::vector<int>> at;

    bool is_natural(const FinCat& C, const Presheaf& E, const Presheaf& F) const {
        for (int f = 0; f < C.num_arrows(); ++f)
            for (int x = 0; x < E.size[C.cod(f)]; ++x)
                if (at[C.dom(f)][E.at(f, x)] != F.at(f, at[C.cod(f)][x])) return false;
        return true;
    }
};

/** projection of a product presheaf onto the first k factors */
inline NatTrans projection(const FinCat& C, const std::vector<const Presheaf*>& fs, size_t k) {
    NatTrans t;
    for (int c = 0; c < C.n; ++c) {
        std::vector<int> rad, rad_k;
        for (size_t i = 0; i < fs.size(); ++i) {
            rad.push_back(fs[i]->size[c]);
            if (i < k) rad_k.push_back(fs[i]->size[c]);
        }
        std::vector<int> comp;
        size_t n = tuple_count(rad);
        for (size_t x = 0; x < n; ++x) {
            auto tup = tuple_at(x, rad);
            tup.resize(k);
            comp.push_back(static_cast<int>(tuple_index(tup, rad_k)));
        }
        t.at.push_back(comp);
    }
    return t;
}

/** \brief Enumerate all natural transformations E -> F. */
inline std::vector<NatTrans> all_nat_trans(const FinCat& C, const Presheaf& E, const Presheaf& F, size_t limit = 100000) {
    std::vector<std::pair<int, int>> elems;
    for (int c = 0; c < C.n; ++c)
        for (int x = 0; x < E.size[c]; ++x) elems.push_back({c, x});
    NatTrans t;
    for (int c = 0; c < C.n; ++c) t.at.push_back(std::vector<int>(E.size[c], -1));
    std::vector<NatTrans> out;
    std::function<void(size_t)> go = [&](size_t k) {
        if (out.size() >= limit) return;
        if (k == elems.size()) {
            out.push_back(t);
            return;
        }
        auto [c, x] = elems[k];
        for (int y = 0; y < F.size[c]; ++y) {
            t.at[c][x] = y;
            bool ok = true;
            // naturality squares whose entries are all assigned
            for (int f = 0; f < C.num_arrows() && ok; ++f) {
                int cc = C.cod(f), dd = C.dom(f);
                for (int z = 0; z < E.size[cc] && ok; ++z) {
                    int a = t.at[cc][z], b = t.at[dd][E.at(f, z)];
                    if (a >= 0 && b >= 0 && b != F.at(f, a)) ok = false;
                }
            }
            if (ok) go(k + 1);
        }
        t.at[c][x] = -1;
    };
    go(0);
    return out;
}

// ------------------------------------------------------------ sieves and topologies

/** a sieve on c: membership over all arrows (only arrows into c may be set) */
using Sieve = std::vector<char>;

inline Sieve sieve_where(const FinCat& C, int c, const std::function<bool(int)>& pred) {
    Sieve s(C.num_arrows(), 0);
    for (int f : C.into(c))
        if (pred(f)) s[f] = 1;
    return s;
}

inline Sieve max_sieve(const FinCat& C, int c) {
    return sieve_where(C, c, [](int) { return true; });
}

/** sieve generated by a family of arrows into c */
inline Sieve generated_sieve(const FinCat& C, int c, const std::vector<int>& fam) {
    Sieve s(C.num_arrows(), 0);
    for (int f : fam)
        for (int g : C.into(C.dom(f))) s[C.compose(f, g)] = 1;
    (void)c;
    return s;
}

/** f^*S = { g : f.g in S } */
inline Sieve pullback_sieve(const FinCat& C, const Sieve& S, int f) {
    return sieve_where(C, C.dom(f), [&](int g) { return S[C.compose(f, g)] != 0; });
}

inline bool is_sieve(const FinCat& C, int c, const Sieve& s) {
    for (int f = 0; f < C.num_arrows(); ++f) {
        if (!s[f]) continue;
        if (C.cod(f) != c) return false;
        for (int g : C.into(C.dom(f)))
            if (!s[C.compose(f, g)]) return false;
    }
    return true;
}

/** \brief Covering sieves per object. The trivial topology covers only by maximal sieves. */
struct Topology {
    std::vector<std::set<Sieve>> covering;

    bool covers(int c, const Sieve& s) const { return covering[c].count(s) > 0; }

    static Topology trivial(const FinCat& C) {
        Topology J;
        J.covering.resize(C.n);
        for (int c = 0; c < C.n; ++c) J.covering[c].insert(max_sieve(C, c));
        return J;
    }
};

// ------------------------------------------------------------ the subfunctor Heyting algebra

/**
 * \brief Operations on subfunctors of one presheaf F, optionally relative to
 * a topology (joins, images and bottom are then closed).
 */
struct SubHeyting {
    const FinCat& C;
    const Presheaf& F;
    const Topology* J = nullptr;

    Subfunctor bottom() const { return closure(empty_sub(F)); }
    Subfunctor top() const { return full_sub(F); }

    Subfunctor closure(const Subfunctor& A) const {
        if (!J) return A;
        Subfunctor out = A;
        for (int c = 0; c < C.n; ++c)
            for (int x = 0; x < F.size[c]; ++x) {
                Sieve s = sieve_where(C, c, [&](int f) { return A.contains(C.dom(f), F.at(f, x)); });
                out.in[c][x] = J->covers(c, s);
            }
        return out;
    }

    Subfunctor meet(const Subfunctor& A, const Subfunctor& B) const {
        Subfunctor out = A;
        for (int c = 0; c < C.n; ++c)
            for (int x = 0; x < F.size[c]; ++x) out.in[c][x] = A.in[c][x] && B.in[c][x];
        return out;
    }

    Subfunctor join(const Subfunctor& A, const Subfunctor& B) const {
        Subfunctor out = A;
        for (int c = 0; c < C.n; ++c)
            for (int x = 0; x < F.size[c]; ++x) out.in[c][x] = A.in[c][x] || B.in[c][x];
        return closure(out);
    }

    Subfunctor meet(const std::vector<Subfunctor>& xs) const {
        Subfunctor out = top();
        for (auto& x : xs) out = meet(out, x);
        return out;
    }

    Subfunctor join(const std::vector<Subfunctor>& xs) const {
        Subfunctor out = empty_sub(F);
        for (auto& x : xs)
            for (int c = 0; c < C.n; ++c)
                for (int y = 0; y < F.size[c]; ++y) out.in[c][y] = out.in[c][y] || x.in[c][y];
        return closure(out);
    }

    /** throws unless A is a subfunctor of F */
    void require(const Subfunctor& A) const {
        if (A.in.size() != F.size.size() || !is_subfunctor(C, F, A)) throw std::invalid_argument("not a subfunctor of the parent presheaf");
    }

    /** x in (A => B)(c) iff for all f: d -> c, x.f in A(d) implies x.f in B(d) */
    Subfunctor implies(const Subfunctor& A, const Subfunctor& B) const {
        Subfunctor out = empty_sub(F);
        for (int c = 0; c < C.n; ++c)
            for (int x = 0; x < F.size[c]; ++x) {
                bool ok = true;
                for (int f : C.into(c)) {
                    int y = F.at(f, x), d = C.dom(f);
                    if (A.contains(d, y) && !B.contains(d, y)) {
                        ok = false;
                        break;
                    }
                }
                out.in[c][x] = ok;
            }
        return out;
    }
};

/** pullback of a subfunctor of F along phi: E -> F */
inline Subfunctor pullback(const FinCat& C, const Presheaf& E, const NatTrans& phi, const Subfunctor& B) {
    Subfunctor out = empty_sub(E);
    for (int c = 0; c < C.n; ++c)
        for (int x = 0; x < E.size[c]; ++x) out.in[c][x] = B.contains(c, phi.at[c][x]);
    return out;
}

/** image of a subfunctor of E along phi: E -> F (closed if J given) */
inline Subfunctor exists_along(const FinCat& C, const Presheaf& E, const Presheaf& F, const NatTrans& phi, const Subfunctor& A,
                               const Topology* J = nullptr) {
    Subfunctor out = empty_sub(F);
    for (int c = 0; c < C.n; ++c)
        for (int x = 0; x < E.size[c]; ++x)
            if (A.contains(c, x)) out.in[c][phi.at[c][x]] = 1;
    return SubHeyting{C, F, J}.closure(out);
}

/** y in forall(A)(c) iff for all f: d -> c, phi_d^{-1}(y.f) is inside A(d) */
inline Subfunctor forall_along(const FinCat& C, const Presheaf& E, const Presheaf& F, const NatTrans& phi, const Subfunctor& A) {
    Subfunctor out = empty_sub(F);
    for (int c = 0; c < C.n; ++c)
        for (int y = 0; y < F.size[c]; ++y) {
            bool ok = true;
            for (int f : C.into(c)) {
                int d = C.dom(f), yf = F.at(f, y);
                for (int x = 0; x < E.size[d] && ok; ++x)
                    if (phi.at[d][x] == yf && !A.contains(d, x)) ok = false;
                if (!ok) break;
            }
            out.in[c][y] = ok;
        }
    return out;
}

/**
 * \brief forall along phi by its universal property: the largest subfunctor B
 * of F with phi^*B <= A, assembled from the generated subfunctors that qualify
 * (a union of qualifying subfunctors qualifies, and every B is such a union).
 */
inline Subfunctor forall_along_search(const FinCat& C, const Presheaf& E, const Presheaf& F, const NatTrans& phi, const Subfunctor& A) {
    Subfunctor out = empty_sub(F);
    for (int c = 0; c < C.n; ++c)
        for (int y = 0; y < F.size[c]; ++y) {
            Subfunctor g = generated_sub(C, F, c, y);
            out.in[c][y] = pullback(C, E, phi, g).leq(A);
        }
    return out;
}

/** exhaustive variant: union of all subfunctors B with phi^*B <= A */
inline Subfunctor forall_along_exhaustive(const FinCat& C, const Presheaf& E, const Presheaf& F, const NatTrans& phi,
                                          const Subfunctor& A) {
    Subfunctor out = empty_sub(F);
    for (auto& B : all_subfunctors(C, F))
        if (pullback(C, E, phi, B).leq(A))
            for (int c = 0; c < C.n; ++c)
                for (int y = 0; y < F.size[c]; ++y) out.in[c][y] = out.in[c][y] || B.in[c][y];
    return out;
}

// ------------------------------------------------------------ structures in presheaves

/**
 * \brief Interpretation of a signature in presheaves on a finite category:
 * a presheaf per sort, a natural transformation per function symbol (on
 * product presheaves of argument sorts), a subfunctor per relation symbol.
 */
struct CatStructure {
    Signature sig;
    FinCat cat;
    std::map<std::string, Presheaf> sorts;
    std::map<std::string, NatTrans> funcs;
    std::map<std::string, Subfunctor> rels;

    std::vector<const Presheaf*> factors(const std::vector<std::string>& ss) const {
        std::vector<const Presheaf*> out;
        for (auto& s : ss) out.push_back(&sorts.at(s));
        return out;
    }
    Presheaf product_of(const std::vector<std::string>& ss) const { return product(cat, factors(ss)); }
    Presheaf context_presheaf(const Context& ctx) const {
        std::vector<std::string> ss;
        for (auto& d : ctx) ss.push_back(d.sort);
        return product_of(ss);
    }
    std::vector<int> radix(int c, const std::vector<std::string>& ss) const {
        std::vector<int> r;
        for (auto& s : ss) r.push_back(sorts.at(s).size[c]);
        return r;
    }

    void validate() const {
        cat.validate();
        for (auto& s : sig.sorts) {
            if (!sorts.count(s)) throw std::invalid_argument("no presheaf for sort " + s);
            sorts.at(s).validate(cat);
        }
        for (auto& f : sig.funcs) {
            if (!funcs.count(f.name)) throw std::invalid_argument("no transformation for " + f.name);
            Presheaf E = product_of(f.args);
            if (!funcs.at(f.name).is_natural(cat, E, sorts.at(f.result))) throw std::invalid_argument(f.name + " is not natural");
        }
        for (auto& r : sig.rels) {
            if (!rels.count(r.name)) throw std::invalid_argument("no subfunctor for " + r.name);
            if (!is_subfunctor(cat, product_of(r.args), rels.at(r.name))) throw std::invalid_argument(r.name + " is not a subfunctor");
        }
    }
};

/** \brief Elements bound to variables, each with its sort. */
struct CatEnv {
    std::vector<std::tuple<std::string, std::string, int>> vals;

    int get(const std::string& n) const {
        for (auto it = vals.rbegin(); it != vals.rend(); ++it)
            if (std::get<0>(*it) == n) return std::get<2>(*it);
        throw std::invalid_argument("unassigned variable " + n);
    }
    CatEnv restrict(const CatStructure& S, int f) const {
        CatEnv e = *this;
        for (auto& [n, s, v] : e.vals) v = S.sorts.at(s).at(f, v);
        return e;
    }
    static CatEnv of(const Context& ctx, const std::vector<int>& xs) {
        CatEnv e;
        for (size_t i = 0; i < ctx.size(); ++i) e.vals.push_back({ctx[i].name, ctx[i].sort, xs[i]});
        return e;
    }
};

namespace detail {

struct KJForcer {
    const CatStructure& S;
    const Topology* J;

    int term(int c, const CatEnv& env, const std::vector<std::vector<std::pair<std::string, int>>>& bound, const Term& t) const {
        switch (t->kind) {
            case TermNode::Free: return env.get(t->name);
            case TermNode::Bound: return bound.at(bound.size() - 1 - t->depth).at(t->pos).second;
            case TermNode::App: {
                auto* d = S.sig.func(t->name);
                std::vector<int> a;
                for (auto& x : t->args) a.push_back(term(c, env, bound, x));
                return S.funcs.at(t->name).at[c][tuple_index(a, S.radix(c, d->args))];
            }
        }
        return 0;
    }

    using Bound = std::vector<std::vector<std::pair<std::string, int>>>;

    static Bound restrict_bound(const CatStructure& S, const Bound& b, int f) {
        Bound out = b;
        for (auto& blk : out)
            for (auto& [s, v] : blk) v = S.sorts.at(s).at(f, v);
        return out;
    }

    bool covers(int c, const std::function<bool(int)>& good) const {
        if (!J) return good(S.cat.identity[c]);
        return J->covers(c, sieve_where(S.cat, c, good));
    }

    bool force(int c, const CatEnv& env, const Bound& bound, const Formula& phi) const {
        const FinCat& C = S.cat;
        switch (phi->kind) {
            case FormulaNode::Rel: {
                auto* d = S.sig.rel(phi->name);
                std::vector<int> a;
                for (auto& x : phi->terms) a.push_back(term(c, env, bound, x));
                return S.rels.at(phi->name).contains(c, static_cast<int>(tuple_index(a, S.radix(c, d->args))));
            }
            case FormulaNode::Eq: return term(c, env, bound, phi->terms[0]) == term(c, env, bound, phi->terms[1]);
            case FormulaNode::And:
                for (auto& s : phi->subs)
                    if (!force(c, env, bound, s)) return false;
                return true;
            case FormulaNode::Or:
                return covers(c, [&](int f) {
                    int d = C.dom(f);
                    CatEnv e = env.restrict(S, f);
                    Bound b = restrict_bound(S, bound, f);
                    for (auto& s : phi->subs)
                        if (force(d, e, b, s)) return true;
                    return false;
                });
            case FormulaNode::Imp:
                for (int f : C.into(c)) {
                    int d = C.dom(f);
                    CatEnv e = env.restrict(S, f);
                    Bound b = restrict_bound(S, bound, f);
                    if (force(d, e, b, phi->subs[0]) && !force(d, e, b, phi->subs[1])) return false;
                }
                return true;
            case FormulaNode::Exists:
            case FormulaNode::Forall: {
                std::vector<std::string> ss;
                for (auto& v : phi->block) ss.push_back(v.sort);
                auto witness = [&](int d, const CatEnv& e, const Bound& b, bool want_all) {
                    auto rad = S.radix(d, ss);
                    size_t n = tuple_count(rad);
                    for (size_t i = 0; i < n; ++i) {
                        auto xs = tuple_at(i, rad);
                        Bound b2 = b;
                        std::vector<std::pair<std::string, int>> blk;
                        for (size_t k = 0; k < xs.size(); ++k) blk.push_back({ss[k], xs[k]});
                        b2.push_back(blk);
                        bool v = force(d, e, b2, phi->subs[0]);
                        if (v != want_all) return v;
                    }
                    return want_all;
                };
                if (phi->kind == FormulaNode::Exists)
                    return covers(c, [&](int f) { return witness(C.dom(f), env.restrict(S, f), restrict_bound(S, bound, f), false); });
                for (int f : C.into(c))
                    if (!witness(C.dom(f), env.restrict(S, f), restrict_bound(S, bound, f), true)) return false;
                return true;
            }
        }
        return false;
    }
};

}  // namespace detail

/**
 * \brief Kripke-Joyal forcing c ||- phi(env). With a topology, disjunction,
 * existentials and bottom are local (witnessed on a covering sieve).
 */
inline bool kj_force(const CatStructure& S, int c, const CatEnv& env, const Formula& phi, const Topology* J = nullptr) {
    return detail::KJForcer{S, J}.force(c, env, {}, phi);
}

/** \brief [[ctx . phi]] as a subfunctor of the product presheaf of ctx, built bottom up. */
inline Subfunctor interpret(const CatStructure& S, const Context& ctx, const Formula& phi, const Topology* J = nullptr) {
    const FinCat& C = S.cat;
    Presheaf P = S.context_presheaf(ctx);
    SubHeyting H{C, P, J};
    std::vector<std::string> ss;
    for (auto& d : ctx) ss.push_back(d.sort);
    auto pointwise = [&](auto&& pred) {
        Subfunctor out = empty_sub(P);
        for (int c = 0; c < C.n; ++c) {
            auto rad = S.radix(c, ss);
            for (int x = 0; x < P.size[c]; ++x) out.in[c][x] = pred(c, CatEnv::of(ctx, tuple_at(x, rad)));
        }
        return out;
    };
    detail::KJForcer atoms{S, J};
    switch (phi->kind) {
        case FormulaNode::Rel:
        case FormulaNode::Eq:
            return pointwise([&](int c, const CatEnv& e) { return atoms.force(c, e, {}, phi); });
        case FormulaNode::And: {
            std::vector<Subfunctor> xs;
            for (auto& s : phi->subs) xs.push_back(interpret(S, ctx, s, J));
            return H.meet(xs);
        }
        case FormulaNode::Or: {
            std::vector<Subfunctor> xs;
            for (auto& s : phi->subs) xs.push_back(interpret(S, ctx, s, J));
            return H.join(xs);
        }
        case FormulaNode::Imp: return H.implies(interpret(S, ctx, phi->subs[0], J), interpret(S, ctx, phi->subs[1], J));
        case FormulaNode::Exists:
        case FormulaNode::Forall: {
            auto [names, body] = open_quantifier(phi, context_names(ctx));
            Context big = ctx;
            big.insert(big.end(), names.begin(), names.end());
            std::vector<std::string> bs = ss;
            for (auto& d : names) bs.push_back(d.sort);
            auto fs = S.factors(bs);
            Presheaf E = product(C, fs);
            NatTrans pi = projection(C, fs, ctx.size());
            Subfunctor A = interpret(S, big, body, J);
            if (phi->kind == FormulaNode::Exists) return exists_along(C, E, P, pi, A, J);
            return forall_along_search(C, E, P, pi, A);
        }
    }
    return empty_sub(P);
}

// ------------------------------------------------------------ chains and transport

/**
 * \brief The poset of chains of non-identity arrows c0 <- c1 <- ... <- cn of an
 * acyclic category, ordered by initial segment, with the functor sending a
 * chain to its last object. As a category, arrows go from longer chains to
 * their initial segments (the direction presheaves restrict along).
 */
struct ChainPoset {
    FinCat P;
    std::vector<std::vector<int>> chains;  // chain k: start object, then arrows
    std::vector<int> last;                 // E on objects
    std::vector<int> on_arrow;             // E on arrows
};

/** no non-identity endomorphisms and no cycles through non-identity arrows */
inline bool is_acyclic(const FinCat& M) {
    std::vector<std::vector<char>> reach(M.n, std::vector<char>(M.n, 0));
    for (int f = 0; f < M.num_arrows(); ++f) {
        if (f == M.identity[M.dom(f)]) continue;
        if (M.dom(f) == M.cod(f)) return false;
        reach[M.dom(f)][M.cod(f)] = 1;
    }
    for (int k = 0; k < M.n; ++k)
        for (int a = 0; a < M.n; ++a)
            for (int b = 0; b < M.n; ++b)
                if (reach[a][k] && reach[k][b]) reach[a][b] = 1;
    for (int a = 0; a < M.n; ++a)
        if (reach[a][a]) return false;
    return true;
}

inline ChainPoset chain_poset(const FinCat& M, size_t max_chains = 5000) {
    if (!is_acyclic(M)) throw std::invalid_argument("chain poset needs an acyclic category");
    ChainPoset R;
    std::vector<std::vector<int>> todo;
    for (int c = 0; c < M.n; ++c) todo.push_back({c});
    auto end_obj = [&](const std::vector<int>& ch) { return ch.size() == 1 ? ch[0] : M.dom(ch.back()); };
    while (!todo.empty()) {
        auto ch = todo.front();
        todo.erase(todo.begin());
        R.chains.push_back(ch);
        if (R.chains.size() > max_chains) throw std::invalid_argument("chain poset too large (is the category acyclic?)");
        int e = end_obj(ch);
        for (int f : M.into(e)) {
            if (f == M.identity[e]) continue;
            auto next = ch;
            next.push_back(f);
            todo.push_back(next);
        }
    }
    std::sort(R.chains.begin(), R.chains.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    int n = static_cast<int>(R.chains.size());
    for (auto& ch : R.chains) R.last.push_back(end_obj(ch));
    auto segment = [&](int q, int p) {  // p initial segment of q
        auto& a = R.chains[p];
        auto& b = R.chains[q];
        return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
    };
    R.P = FinCat::thin(n, segment);
    for (int a = 0; a < R.P.num_arrows(); ++a) {
        int q = R.P.dom(a), p = R.P.cod(a);
        const auto& chq = R.chains[q];
        size_t from = R.chains[p].size();
        int h = M.identity[R.last[q]];
        for (size_t k = chq.size(); k-- > from;) h = M.compose(chq[k], h);
        R.on_arrow.push_back(h);
    }
    return R;
}

inline Presheaf transport(const ChainPoset& R, const Presheaf& F) {
    Presheaf G;
    for (int p = 0; p < R.P.n; ++p) G.size.push_back(F.size[R.last[p]]);
    for (int a = 0; a < R.P.num_arrows(); ++a) G.restrict.push_back(F.restrict[R.on_arrow[a]]);
    return G;
}

inline Subfunctor transport(const ChainPoset& R, const Subfunctor& A) {
    Subfunctor B;
    for (int p = 0; p < R.P.n; ++p) B.in.push_back(A.in[R.last[p]]);
    return B;
}

inline NatTrans transport(const ChainPoset& R, const NatTrans& t) {
    NatTrans u;
    for (int p = 0; p < R.P.n; ++p) u.at.push_back(t.at[R.last[p]]);
    return u;
}

struct TransportReport {
    bool ok = true;
    size_t checks = 0;
    std::string failure;

    void fail(const std::string& what) {
        if (ok) failure = what;
        ok = false;
    }
};

/**
 * \brief Transport along the chain functor on every subfunctor (pair) of F:
 * reflects the order and commutes with meet, join and implication.
 */
inline TransportReport verify_transport(const FinCat& M, const ChainPoset& R, const Presheaf& F, size_t limit = 1u << 12) {
    TransportReport rep;
    auto subs = all_subfunctors(M, F, limit);
    Presheaf G = transport(R, F);
    SubHeyting HM{M, F}, HP{R.P, G};
    std::vector<Subfunctor> ts;
    for (auto& A : subs) ts.push_back(transport(R, A));
    for (size_t i = 0; i < subs.size(); ++i) {
        if (!is_subfunctor(R.P, G, ts[i])) rep.fail("transported subfunctor is not closed");
        for (size_t j = 0; j < subs.size(); ++j) {
            const auto &A = subs[i], &B = subs[j];
            const auto &tA = ts[i], &tB = ts[j];
            rep.checks += 4;
            if (A.leq(B) != tA.leq(tB)) rep.fail("order not reflected");
            if (transport(R, HM.meet(A, B)) != HP.meet(tA, tB)) rep.fail("meet not preserved");
            if (transport(R, HM.join(A, B)) != HP.join(tA, tB)) rep.fail("join not preserved");
            if (transport(R, HM.implies(A, B)) != HP.implies(tA, tB)) rep.fail("implication not preserved");
            if (!rep.ok) return rep;
        }
    }
    return rep;
}

/** \brief Transport commutes with image and with forall along phi: E -> F, on every subfunctor of E. */
inline TransportReport verify_transport_along(const FinCat& M, const ChainPoset& R, const Presheaf& E, const Presheaf& F,
                                              const NatTrans& phi, size_t limit = 1u << 12) {
    TransportReport rep;
    Presheaf tE = transport(R, E), tF = transport(R, F);
    NatTrans tphi = transport(R, phi);
    for (auto& A : all_subfunctors(M, E, limit)) {
        Subfunctor tA = transport(R, A);
        rep.checks += 2;
        if (transport(R, exists_along(M, E, F, phi, A)) != exists_along(R.P, tE, tF, tphi, tA)) rep.fail("image not preserved");
        Subfunctor all_m = forall_along_search(M, E, F, phi, A);
        if (transport(R, all_m) != forall_along_search(R.P, tE, tF, tphi, tA)) rep.fail("forall not preserved");
        if (all_m != forall_along(M, E, F, phi, A)) rep.fail("forall by clause disagrees with the universal property");
        if (!rep.ok) return rep;
    }
    return rep;
}

/** \brief All acyclic categories with objects ordered so every non-identity arrow goes from a lower to a higher index. */
inline std::vector<FinCat> acyclic_categories(int max_objects, int max_arrows) {
    std::vector<FinCat> out;
    for (int n = 1; n <= max_objects; ++n) {
        std::vector<std::pair<int, int>> slots;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) slots.push_back({a, b});
        // multiset of arrows: counts per slot with total <= max_arrows
        std::vector<int> cnt(slots.size(), 0);
        std::function<void(size_t, int)> choose = [&](size_t k, int left) {
            if (k == slots.size()) {
                FinCat C;
                C.n = n;
                for (int c = 0; c < n; ++c) {
                    C.identity.push_back(static_cast<int>(C.arrows.size()));
                    C.arrows.push_back({c, c, "id" + std::to_string(c)});
                }
                for (size_t s = 0; s < slots.size(); ++s)
                    for (int i = 0; i < cnt[s]; ++i)
                        C.arrows.push_back({slots[s].first, slots[s].second, "f" + std::to_string(C.arrows.size() - n)});
                int m = C.num_arrows();
                // composable non-identity pairs need a choice of composite
                std::vector<std::pair<int, int>> pairs;
                for (int f = n; f < m; ++f)
                    for (int g = n; g < m; ++g)
                        if (C.cod(f) == C.dom(g)) pairs.push_back({g, f});
                C.comp.assign(m, std::vector<int>(m, -1));
                for (int f = 0; f < m; ++f) {
                    C.comp[C.identity[C.cod(f)]][f] = f;
                    C.comp[f][C.identity[C.dom(f)]] = f;
                }
                std::function<void(size_t)> fill = [&](size_t i) {
                    if (i == pairs.size()) {
                        try {
                            C.validate();
                            out.push_back(C);
                        } catch (const std::invalid_argument&) {
                        }
                        return;
                    }
                    auto [g, f] = pairs[i];
                    for (int h : C.hom(C.dom(f), C.cod(g))) {
                        C.comp[g][f] = h;
                        fill(i + 1);
                    }
                    C.comp[g][f] = -1;
                };
                fill(0);
                return;
            }
            for (int c = 0; c <= left; ++c) {
                cnt[k] = c;
                choose(k + 1, left - c);
            }
            cnt[k] = 0;
        };
        choose(0, max_arrows);
    }
    return out;
}

// ------------------------------------------------------------ text form

inline SExpr category_sexpr(const FinCat& C) {
    SExpr l = SExpr::list({SExpr::sym("category")});
    SExpr objs = SExpr::list({SExpr::sym("objects")});
    for (int c = 0; c < C.n; ++c) objs.add(SExpr::sym(C.obj_name(c)));
    l.add(objs);
    for (int f = 0; f < C.num_arrows(); ++f) {
        if (C.identity[C.dom(f)] == f) continue;
        l.add(SExpr::list({SExpr::sym("arrow"), SExpr::sym(C.arrows[f].name), SExpr::sym(C.obj_name(C.dom(f))), SExpr::sym(C.obj_name(C.cod(f)))}));
    }
    for (int f = 0; f < C.num_arrows(); ++f)
        for (int g = 0; g < C.num_arrows(); ++g) {
            int h = C.comp[g][f];
            if (h < 0 || f == C.identity[C.dom(f)] || g == C.identity[C.dom(g)]) continue;
            l.add(SExpr::list({SExpr::sym("comp"), SExpr::sym(C.arrows[g].name), SExpr::sym(C.arrows[f].name), SExpr::sym(C.arrows[h].name)}));
        }
    return l;
}

/**
 * \brief (category (objects A B ...) (arrow f A B) ... (comp g f h) ...) with
 * identities implicit as id_A; or (category (poset (objects ...) (le a b) ...)).
 */
inline FinCat read_category(const SExpr& e) {
    if (e.head() != "category") throw ParseError("expected (category ...)", e.pos);
    FinCat C;
    std::map<std::string, int> obj, arr;
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "objects")
            for (size_t j = 1; j < e[i].size(); ++j) {
                obj[e[i][j].text] = C.n++;
                C.names.push_back(e[i][j].text);
            }
    auto O = [&](const SExpr& s) {
        auto it = obj.find(s.text);
        if (it == obj.end()) throw ParseError("unknown object '" + s.text + "'", s.pos);
        return it->second;
    };
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "poset") {
            std::vector<std::pair<int, int>> le;
            for (size_t j = 1; j < e[i].size(); ++j) le.push_back({O(e[i][j][1]), O(e[i][j][2])});
            std::vector<std::vector<char>> m(C.n, std::vector<char>(C.n, 0));
            for (int a = 0; a < C.n; ++a) m[a][a] = 1;
            for (auto [a, b] : le) m[a][b] = 1;
            for (int k = 0; k < C.n; ++k)
                for (int a = 0; a < C.n; ++a)
                    for (int b = 0; b < C.n; ++b)
                        if (m[a][k] && m[k][b]) m[a][b] = 1;
            return FinCat::thin(C.n, [&](int a, int b) { return m[a][b] != 0; }, C.names);
        }
    for (int c = 0; c < C.n; ++c) {
        C.identity.push_back(static_cast<int>(C.arrows.size()));
        arr["id_" + C.names[c]] = c;
        C.arrows.push_back({c, c, "id_" + C.names[c]});
    }
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "arrow") {
            if (e[i].size() != 4) throw ParseError("(arrow NAME DOM COD)", e[i].pos);
            arr[e[i][1].text] = static_cast<int>(C.arrows.size());
            C.arrows.push_back({O(e[i][2]), O(e[i][3]), e[i][1].text});
        }
    int m = C.num_arrows();
    C.comp.assign(m, std::vector<int>(m, -1));
    for (int f = 0; f < m; ++f) {
        C.comp[C.identity[C.cod(f)]][f] = f;
        C.comp[f][C.identity[C.dom(f)]] = f;
    }
    auto A = [&](const SExpr& s) {
        auto it = arr.find(s.text);
        if (it == arr.end()) throw ParseError("unknown arrow '" + s.text + "'", s.pos);
        return it->second;
    };
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "comp") C.comp[A(e[i][1])][A(e[i][2])] = A(e[i][3]);
    try {
        C.validate();
    } catch (const std::invalid_argument& ex) {
        throw ParseError(std::string("invalid category: ") + ex.what(), e.pos);
    }
    return C;
}

/** (presheaf (set OBJ n) ... (restrict ARROW (images...)) ...); unspecified restrictions along identities are identities */
inline Presheaf read_presheaf(const SExpr& e, const FinCat& C) {
    if (e.head() != "presheaf") throw ParseError("expected (presheaf ...)", e.pos);
    Presheaf F;
    F.size.assign(C.n, 0);
    F.restrict.assign(C.num_arrows(), {});
    auto obj = [&](const SExpr& s) {
        for (int c = 0; c < C.n; ++c)
            if (C.obj_name(c) == s.text) return c;
        throw ParseError("unknown object '" + s.text + "'", s.pos);
    };
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "set") F.size[obj(e[i][1])] = read_int(e[i][2]);
    for (int c = 0; c < C.n; ++c) {
        auto& r = F.restrict[C.identity[c]];
        for (int x = 0; x < F.size[c]; ++x) r.push_back(x);
    }
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "restrict") {
            int f = -1;
            for (int a = 0; a < C.num_arrows(); ++a)
                if (C.arrows[a].name == e[i][1].text) f = a;
            if (f < 0) throw ParseError("unknown arrow '" + e[i][1].text + "'", e[i][1].pos);
            F.restrict[f] = read_ints(e[i][2]);
        }
    try {
        F.validate(C);
    } catch (const std::invalid_argument& ex) {
        throw ParseError(std::string("invalid presheaf: ") + ex.what(), e.pos);
    }
    return F;
}

inline SExpr presheaf_sexpr(const Presheaf& F, const FinCat& C) {
    SExpr l = SExpr::list({SExpr::sym("presheaf")});
    for (int c = 0; c < C.n; ++c) l.add(SExpr::list({SExpr::sym("set"), SExpr::sym(C.obj_name(c)), SExpr::sym(std::to_string(F.size[c]))}));
    for (int f = 0; f < C.num_arrows(); ++f) {
        if (C.identity[C.dom(f)] == f) continue;
        SExpr im = SExpr::list();
        for (int x : F.restrict[f]) im.add(SExpr::sym(std::to_string(x)));
        l.add(SExpr::list({SExpr::sym("restrict"), SExpr::sym(C.arrows[f].name), im}));
    }
    return l;
}


/**
 * (cat-structure CATEGORY SIGNATURE (sort S PRESHEAF)... (func f (at OBJ (TUPLE VALUE)...)...)...
 *                (rel R (at OBJ TUPLE...)...)...)
 * Tuples list one element per argument sort, () for constants and propositions.
 */
inline CatStructure read_cat_structure(const SExpr& e) {
    if (e.head() != "cat-structure" || e.size() < 3) throw ParseError("expected (cat-structure CATEGORY SIGNATURE ...)", e.pos);
    CatStructure S;
    S.cat = read_category(e[1]);
    S.sig = read_signature(e[2]);
    auto obj = [&](const SExpr& s) {
        for (int c = 0; c < S.cat.n; ++c)
            if (S.cat.obj_name(c) == s.text) return c;
        throw ParseError("unknown object '" + s.text + "'", s.pos);
    };
    for (size_t i = 3; i < e.size(); ++i)
        if (e[i].head() == "sort") {
            if (e[i].size() != 3) throw ParseError("(sort NAME PRESHEAF)", e[i].pos);
            S.sorts[e[i][1].text] = read_presheaf(e[i][2], S.cat);
        }
    for (auto& s : S.sig.sorts)
        if (!S.sorts.count(s)) throw ParseError("no presheaf for sort " + s, e.pos);
    auto index = [&](int c, const std::vector<std::string>& ss, const SExpr& t) {
        auto xs = read_ints(t);
        auto radix = S.radix(c, ss);
        if (xs.size() != radix.size()) throw ParseError("tuple has the wrong length", t.pos);
        for (size_t k = 0; k < xs.size(); ++k)
            if (xs[k] < 0 || xs[k] >= radix[k]) throw ParseError("element out of range", t.pos);
        return tuple_index(xs, radix);
    };
    for (auto& r : S.sig.rels) {
        Presheaf P = S.product_of(r.args);
        S.rels[r.name] = empty_sub(P);
    }
    for (size_t i = 3; i < e.size(); ++i) {
        const SExpr& it = e[i];
        std::string h = it.head();
        if (h == "sort") continue;
        if (h != "rel" && h != "func") throw ParseError("unknown structure item '" + h + "'", it.pos);
        if (it.size() < 2) throw ParseError("(" + h + " NAME ...)", it.pos);
        std::string name = it[1].text;
        if (h == "rel") {
            const RelDecl* r = S.sig.rel(name);
            if (!r) throw ParseError("undeclared relation " + name, it.pos);
            for (size_t j = 2; j < it.size(); ++j) {
                if (it[j].head() != "at") throw ParseError("(at OBJ TUPLE...)", it[j].pos);
                int c = obj(it[j][1]);
                for (size_t k = 2; k < it[j].size(); ++k) S.rels[name].in[c][index(c, r->args, it[j][k])] = 1;
            }
        } else {
            const FuncDecl* f = S.sig.func(name);
            if (!f) throw ParseError("undeclared function " + name, it.pos);
            NatTrans t;
            for (int c = 0; c < S.cat.n; ++c) t.at.push_back(std::vector<int>(S.product_of(f->args).size[c], -1));
            for (size_t j = 2; j < it.size(); ++j) {
                if (it[j].head() != "at") throw ParseError("(at OBJ (TUPLE VALUE)...)", it[j].pos);
                int c = obj(it[j][1]);
                for (size_t k = 2; k < it[j].size(); ++k) {
                    if (it[j][k].size() != 2) throw ParseError("(TUPLE VALUE)", it[j][k].pos);
                    t.at[c][index(c, f->args, it[j][k][0])] = read_int(it[j][k][1]);
                }
            }
            for (auto& row : t.at)
                for (int v : row)
                    if (v < 0) throw ParseError("function " + name + " is not total", it.pos);
            S.funcs[name] = t;
        }
    }
    try {
        S.validate();
    } catch (const std::invalid_argument& ex) {
        throw ParseError(std::string("invalid structure: ") + ex.what(), e.pos);
    }
    return S;
}

inline SExpr cat_structure_sexpr(const CatStructure& S) {
    SExpr l = SExpr::list({SExpr::sym("cat-structure"), category_sexpr(S.cat), signature_sexpr(S.sig)});
    auto tuple = [](const std::vector<int>& xs) {
        SExpr t = SExpr::list();
        for (int x : xs) t.add(SExpr::sym(std::to_string(x)));
        return t;
    };
    for (auto& s : S.sig.sorts) l.add(SExpr::list({SExpr::sym("sort"), SExpr::sym(s), presheaf_sexpr(S.sorts.at(s), S.cat)}));
    for (auto& f : S.sig.funcs) {
        SExpr item = SExpr::list({SExpr::sym("func"), SExpr::sym(f.name)});
        for (int c = 0; c < S.cat.n; ++c) {
            SExpr at = SExpr::list({SExpr::sym("at"), SExpr::sym(S.cat.obj_name(c))});
            auto radix = S.radix(c, f.args);
            const auto& row = S.funcs.at(f.name).at[c];
            for (size_t x = 0; x < row.size(); ++x) at.add(SExpr::list({tuple(tuple_at(x, radix)), SExpr::sym(std::to_string(row[x]))}));
            item.add(at);
        }
        l.add(item);
    }
    for (auto& r : S.sig.rels) {
        SExpr item = SExpr::list({SExpr::sym("rel"), SExpr::sym(r.name)});
        for (int c = 0; c < S.cat.n; ++c) {
            SExpr at = SExpr::list({SExpr::sym("at"), SExpr::sym(S.cat.obj_name(c))});
            auto radix = S.radix(c, r.args);
            const auto& in = S.rels.at(r.name).in[c];
            for (size_t x = 0; x < in.size(); ++x)
                if (in[x]) at.add(tuple(tuple_at(x, radix)));
            if (at.size() > 2) item.add(at);
        }
        l.add(item);
    }
    return l;
}

}  // namespace ifol

#endif
