#ifndef IFOL_SETMODELS_HPP
#define IFOL_SETMODELS_HPP

#include <numeric>

#include "syntax.hpp"
#include "text.hpp"

namespace ifol {

using Env = std::map<std::string, int>;

/** mixed-radix index of a tuple */
inline size_t tuple_index(const std::vector<int>& xs, const std::vector<int>& radix) {
    size_t i = 0;
    for (size_t k = 0; k < xs.size(); ++k) i = i * radix[k] + xs[k];
    return i;
}

inline std::vector<int> tuple_at(size_t i, const std::vector<int>& radix) {
    std::vector<int> xs(radix.size());
    for (size_t k = radix.size(); k-- > 0;) {
        xs[k] = static_cast<int>(i % radix[k]);
        i /= radix[k];
    }
    return xs;
}

inline size_t tuple_count(const std::vector<int>& radix) {
    size_t n = 1;
    for (int r : radix) n *= r;
    return n;
}

/** call f on every tuple over the given radix, lexicographically */
template <class F>
void for_tuples(const std::vector<int>& radix, F&& f) {
    size_t n = tuple_count(radix);
    for (size_t i = 0; i < n; ++i) f(tuple_at(i, radix));
}

/**
 * \brief Finite many-sorted structure. Carriers are {0..n-1}; function and
 * relation tables are indexed by the mixed-radix encoding of the arguments.
 * An exploding structure satisfies every formula.
 */
struct FinStructure {
    Signature sig;
    std::map<std::string, int> carrier;
    std::map<std::string, std::vector<int>> funcs;
    std::map<std::string, std::vector<char>> rels;
    bool exploding = false;

    int size(const std::string& sort) const {
        auto it = carrier.find(sort);
        return it == carrier.end() ? 0 : it->second;
    }
    std::vector<int> radix(const std::vector<std::string>& sorts) const {
        std::vector<int> r;
        for (auto& s : sorts) r.push_back(size(s));
        return r;
    }
    int apply(const std::string& f, const std::vector<int>& args) const {
        auto* d = sig.func(f);
        return funcs.at(f).at(tuple_index(args, radix(d->args)));
    }
    bool holds_rel(const std::string& r, const std::vector<int>& args) const {
        auto* d = sig.rel(r);
        return rels.at(r).at(tuple_index(args, radix(d->args))) != 0;
    }
    void set_rel(const std::string& r, const std::vector<int>& args, bool v) {
        auto* d = sig.rel(r);
        rels[r].at(tuple_index(args, radix(d->args))) = v;
    }
    /** allocate empty tables for every symbol */
    void init_tables() {
        for (auto& f : sig.funcs) funcs[f.name].assign(tuple_count(radix(f.args)), 0);
        for (auto& r : sig.rels) rels[r.name].assign(tuple_count(radix(r.args)), 0);
    }
};

namespace detail {

struct Evaluator {
    const FinStructure& M;
    Env env;
    std::vector<std::vector<int>> bound;

    int term(const Term& t) {
        switch (t->kind) {
            case TermNode::Free: {
                auto it = env.find(t->name);
                if (it == env.end()) throw std::invalid_argument("unassigned variable " + t->name);
                return it->second;
            }
            case TermNode::Bound: return bound.at(bound.size() - 1 - t->depth).at(t->pos);
            case TermNode::App: {
                std::vector<int> a;
                for (auto& x : t->args) a.push_back(term(x));
                return M.apply(t->name, a);
            }
        }
        return 0;
    }

    bool holds(const Formula& f) {
        switch (f->kind) {
            case FormulaNode::Rel: {
                std::vector<int> a;
                for (auto& x : f->terms) a.push_back(term(x));
                return M.holds_rel(f->name, a);
            }
            case FormulaNode::Eq: return term(f->terms[0]) == term(f->terms[1]);
            case FormulaNode::And:
                for (auto& s : f->subs)
                    if (!holds(s)) return false;
                return true;
            case FormulaNode::Or:
                for (auto& s : f->subs)
                    if (holds(s)) return true;
                return false;
            case FormulaNode::Imp: return !holds(f->subs[0]) || holds(f->subs[1]);
            case FormulaNode::Exists:
            case FormulaNode::Forall: {
                bool ex = f->kind == FormulaNode::Exists;
                std::vector<std::string> sorts;
                for (auto& d : f->block) sorts.push_back(d.sort);
                auto rad = M.radix(sorts);
                size_t n = tuple_count(rad);
                for (size_t i = 0; i < n; ++i) {
                    bound.push_back(tuple_at(i, rad));
                    bool v = holds(f->subs[0]);
                    bound.pop_back();
                    if (v == ex) return ex;
                }
                return !ex;
            }
        }
        return false;
    }
};

}  // namespace detail

inline bool holds(const FinStructure& M, const Formula& f, const Env& env = {}) {
    if (M.exploding) return true;
    detail::Evaluator ev{M, env, {}};
    return ev.holds(f);
}

inline int eval_term(const FinStructure& M, const Term& t, const Env& env = {}) {
    detail::Evaluator ev{M, env, {}};
    return ev.term(t);
}

/** all environments for a context */
inline std::vector<Env> all_envs(const FinStructure& M, const Context& ctx) {
    std::vector<std::string> sorts;
    for (auto& d : ctx) sorts.push_back(d.sort);
    std::vector<Env> out;
    for_tuples(M.radix(sorts), [&](const std::vector<int>& xs) {
        Env e;
        for (size_t i = 0; i < ctx.size(); ++i) e[ctx[i].name] = xs[i];
        out.push_back(e);
    });
    return out;
}

inline bool satisfies(const FinStructure& M, const Sequent& s, Env* witness = nullptr) {
    if (M.exploding) return true;
    for (auto& e : all_envs(M, s.ctx))
        if (holds(M, s.lhs, e) && !holds(M, s.rhs, e)) {
            if (witness) *witness = e;
            return false;
        }
    return true;
}

struct ModelCheck {
    bool ok = true;
    int axiom = -1;
    Env witness;
};

inline ModelCheck model_check(const Theory& T, const FinStructure& M) {
    for (size_t i = 0; i < T.axioms.size(); ++i) {
        Env w;
        if (!satisfies(M, T.axioms[i], &w)) return {false, static_cast<int>(i), w};
    }
    return {};
}

/** the one-element structure with every relation full, marked exploding */
inline FinStructure exploding_structure(const Signature& sig) {
    FinStructure M;
    M.sig = sig;
    for (auto& s : sig.sorts) M.carrier[s] = 1;
    M.init_tables();
    for (auto& [n, t] : M.rels) std::fill(t.begin(), t.end(), 1);
    M.exploding = true;
    return M;
}

namespace detail {

/** encoding of M after renaming carriers by perm (perm[sort][old] = new) */
inline std::vector<int> encode_permuted(const FinStructure& M, const std::map<std::string, std::vector<int>>& perm) {
    std::vector<int> code;
    for (auto& s : M.sig.sorts) code.push_back(M.size(s));
    auto mapped = [&](const std::vector<std::string>& sorts, const std::vector<int>& xs) {
        std::vector<int> ys(xs.size());
        for (size_t k = 0; k < xs.size(); ++k) ys[k] = perm.at(sorts[k])[xs[k]];
        return ys;
    };
    for (auto& f : M.sig.funcs) {
        auto rad = M.radix(f.args);
        std::vector<int> tab(tuple_count(rad));
        for_tuples(rad, [&](const std::vector<int>& xs) {
            tab[tuple_index(mapped(f.args, xs), rad)] = perm.at(f.result)[M.funcs.at(f.name)[tuple_index(xs, rad)]];
        });
        code.insert(code.end(), tab.begin(), tab.end());
    }
    for (auto& r : M.sig.rels) {
        auto rad = M.radix(r.args);
        std::vector<int> tab(tuple_count(rad));
        for_tuples(rad, [&](const std::vector<int>& xs) {
            tab[tuple_index(mapped(r.args, xs), rad)] = M.rels.at(r.name)[tuple_index(xs, rad)];
        });
        code.insert(code.end(), tab.begin(), tab.end());
    }
    return code;
}

inline std::vector<int> canonical_code(const FinStructure& M) {
    std::vector<std::string> sorts = M.sig.sorts;
    std::map<std::string, std::vector<int>> perm;
    for (auto& s : sorts) {
        perm[s].resize(M.size(s));
        std::iota(perm[s].begin(), perm[s].end(), 0);
    }
    std::vector<int> best;
    bool first = true;
    std::function<void(size_t)> go = [&](size_t k) {
        if (k == sorts.size()) {
            auto c = encode_permuted(M, perm);
            if (first || c < best) best = c;
            first = false;
            return;
        }
        auto& p = perm[sorts[k]];
        std::sort(p.begin(), p.end());
        do go(k + 1);
        while (std::next_permutation(p.begin(), p.end()));
    };
    go(0);
    best.push_back(M.exploding);
    return best;
}

}  // namespace detail

inline bool isomorphic(const FinStructure& a, const FinStructure& b) {
    return a.sig == b.sig && detail::canonical_code(a) == detail::canonical_code(b);
}

struct EnumerateOptions {
    int bound = 2;           // maximum carrier size per sort
    int min_size = 1;
    bool include_exploding = false;
    bool up_to_iso = true;
    size_t limit = 200000;   // maximum number of candidate structures examined
};

/**
 * \brief All models of T with carriers of size min_size..bound, up to
 * isomorphism, in a deterministic order (sizes, then tables).
 */
inline std::vector<FinStructure> enumerate_models(const Theory& T, const EnumerateOptions& opt = {}) {
    std::vector<FinStructure> out;
    std::set<std::vector<int>> seen;
    size_t examined = 0;
    const auto& sorts = T.sig.sorts;
    std::vector<int> sizes(sorts.size(), opt.min_size);
    std::function<void(FinStructure&, size_t, size_t)> tables = [&](FinStructure& M, size_t fi, size_t ri) {
        if (examined >= opt.limit) return;
        if (fi < T.sig.funcs.size()) {
            auto& f = T.sig.funcs[fi];
            size_t n = tuple_count(M.radix(f.args));
            int target = M.size(f.result);
            if (target == 0 && n > 0) return;
            auto& tab = M.funcs[f.name];
            tab.assign(n, 0);
            std::function<void(size_t)> fill = [&](size_t k) {
                if (k == n) { tables(M, fi + 1, ri); return; }
                for (int v = 0; v < target; ++v) {
                    tab[k] = v;
                    fill(k + 1);
                }
            };
            fill(0);
            return;
        }
        if (ri < T.sig.rels.size()) {
            auto& r = T.sig.rels[ri];
            size_t n = tuple_count(M.radix(r.args));
            auto& tab = M.rels[r.name];
            tab.assign(n, 0);
            for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
                for (size_t k = 0; k < n; ++k) tab[k] = (mask >> k) & 1;
                tables(M, fi, ri + 1);
            }
            return;
        }
        ++examined;
        if (!model_check(T, M).ok) return;
        if (opt.up_to_iso && !seen.insert(detail::canonical_code(M)).second) return;
        out.push_back(M);
    };
    for (;;) {
        FinStructure M;
        M.sig = T.sig;
        for (size_t i = 0; i < sorts.size(); ++i) M.carrier[sorts[i]] = sizes[i];
        tables(M, 0, 0);
        size_t k = 0;
        while (k < sizes.size() && sizes[k] == opt.bound) sizes[k++] = opt.min_size;
        if (k == sizes.size()) break;
        sizes[k]++;
    }
    if (opt.include_exploding) {
        FinStructure X = exploding_structure(T.sig);
        if (model_check(T, X).ok) out.push_back(X);
    }
    return out;
}

inline std::set<std::string> relation_symbols(const Formula& f) {
    std::set<std::string> out;
    std::function<void(const Formula&)> go = [&](const Formula& g) {
        if (g->kind == FormulaNode::Rel) out.insert(g->name);
        for (auto& s : g->subs) go(s);
    };
    go(f);
    return out;
}

/**
 * \brief All expansions of `base` to the relation symbols `order` (declared
 * in T.sig, absent from base) satisfying T. Backtracks relation by relation,
 * checking each axiom as soon as its relation symbols are all assigned.
 */
inline std::vector<FinStructure> extend_models(const Theory& T, const FinStructure& base, const std::vector<std::string>& order,
                                               size_t limit = 1000000) {
    std::vector<FinStructure> out;
    FinStructure M = base;
    M.sig = T.sig;
    std::set<std::string> assigned;
    for (auto& r : T.sig.rels)
        if (std::find(order.begin(), order.end(), r.name) == order.end()) assigned.insert(r.name);
    std::vector<std::set<std::string>> needs;
    for (auto& a : T.axioms) {
        auto s = relation_symbols(a.lhs);
        for (auto& x : relation_symbols(a.rhs)) s.insert(x);
        needs.push_back(s);
    }
    // axioms checkable at each depth
    std::vector<std::vector<size_t>> at(order.size() + 1);
    for (size_t i = 0; i < T.axioms.size(); ++i) {
        size_t depth = 0;
        for (auto& r : needs[i]) {
            auto it = std::find(order.begin(), order.end(), r);
            if (it != order.end()) depth = std::max(depth, size_t(it - order.begin()) + 1);
        }
        at[depth].push_back(i);
    }
    for (size_t i : at[0])
        if (!satisfies(M, T.axioms[i])) return out;
    std::function<void(size_t)> go = [&](size_t k) {
        if (out.size() >= limit) return;
        if (k == order.size()) { out.push_back(M); return; }
        auto* d = T.sig.rel(order[k]);
        size_t n = tuple_count(M.radix(d->args));
        auto& tab = M.rels[order[k]];
        for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
            tab.assign(n, 0);
            for (size_t j = 0; j < n; ++j) tab[j] = (mask >> j) & 1;
            bool ok = true;
            for (size_t i : at[k + 1])
                if (!satisfies(M, T.axioms[i])) { ok = false; break; }
            if (ok) go(k + 1);
        }
    };
    go(0);
    return out;
}

// ------------------------------------------------------------ reduced products

/** a filter on the powerset of {0..n-1}, given by its members as bitmasks */
struct SetFilter {
    int n = 0;
    std::set<unsigned> members;

    bool contains(unsigned s) const { return members.count(s) > 0; }

    static SetFilter principal(int n, unsigned gen) {
        SetFilter F{n, {}};
        for (unsigned s = 0; s < (1u << n); ++s)
            if ((s & gen) == gen) F.members.insert(s);
        return F;
    }

    /** throws unless nonempty, upward closed and closed under intersection */
    void validate() const {
        if (members.empty()) throw std::invalid_argument("empty filter");
        for (unsigned a : members) {
            if (a >= (1u << n)) throw std::invalid_argument("filter member out of range");
            for (unsigned b = 0; b < (1u << n); ++b)
                if ((a & b) == a && !contains(b)) throw std::invalid_argument("filter not upward closed");
            for (unsigned b : members)
                if (!contains(a & b)) throw std::invalid_argument("filter not closed under intersection");
        }
    }

    unsigned generator() const {
        unsigned g = (1u << n) - 1;
        for (unsigned a : members) g &= a;
        return g;
    }
};

struct ReducedProduct {
    FinStructure M;
    /** per sort: class id of every product tuple (tuple index over the factors) */
    std::map<std::string, std::vector<int>> cls;
    /** per sort: representative tuple of every class */
    std::map<std::string, std::vector<std::vector<int>>> reps;
};

/** \brief Product of the family modulo agreement on a filter set. */
inline ReducedProduct reduced_product(const std::vector<FinStructure>& fam, const SetFilter& F) {
    if (fam.empty()) throw std::invalid_argument("empty family");
    if (static_cast<int>(fam.size()) != F.n) throw std::invalid_argument("filter index set does not match the family");
    F.validate();
    const Signature& sig = fam[0].sig;
    int I = static_cast<int>(fam.size());
    ReducedProduct R;
    R.M.sig = sig;
    auto in_F = [&](const std::vector<bool>& bits) {
        unsigned s = 0;
        for (int i = 0; i < I; ++i)
            if (bits[i]) s |= 1u << i;
        return F.contains(s);
    };
    for (auto& s : sig.sorts) {
        std::vector<int> rad;
        for (auto& A : fam) rad.push_back(A.size(s));
        size_t n = tuple_count(rad);
        auto& cl = R.cls[s];
        cl.assign(n, -1);
        auto& rp = R.reps[s];
        for (size_t a = 0; a < n; ++a) {
            if (cl[a] >= 0) continue;
            auto ta = tuple_at(a, rad);
            int id = static_cast<int>(rp.size());
            rp.push_back(ta);
            for (size_t b = a; b < n; ++b) {
                if (cl[b] >= 0) continue;
                auto tb = tuple_at(b, rad);
                std::vector<bool> agree(I);
                for (int i = 0; i < I; ++i) agree[i] = ta[i] == tb[i];
                if (in_F(agree)) cl[b] = id;
            }
        }
        R.M.carrier[s] = static_cast<int>(rp.size());
    }
    R.M.init_tables();
    auto component = [&](const std::string& sort, int c, int i) { return R.reps[sort][c][i]; };
    auto class_of = [&](const std::string& sort, const std::vector<int>& t) {
        std::vector<int> rad;
        for (auto& A : fam) rad.push_back(A.size(sort));
        return R.cls[sort][tuple_index(t, rad)];
    };
    for (auto& f : sig.funcs) {
        auto rad = R.M.radix(f.args);
        for_tuples(rad, [&](const std::vector<int>& xs) {
            std::vector<int> out(I);
            for (int i = 0; i < I; ++i) {
                std::vector<int> a;
                for (size_t k = 0; k < xs.size(); ++k) a.push_back(component(f.args[k], xs[k], i));
                out[i] = fam[i].apply(f.name, a);
            }
            R.M.funcs[f.name][tuple_index(xs, rad)] = class_of(f.result, out);
        });
    }
    for (auto& r : sig.rels) {
        auto rad = R.M.radix(r.args);
        for_tuples(rad, [&](const std::vector<int>& xs) {
            std::vector<bool> bits(I);
            for (int i = 0; i < I; ++i) {
                std::vector<int> a;
                for (size_t k = 0; k < xs.size(); ++k) a.push_back(component(r.args[k], xs[k], i));
                bits[i] = fam[i].holds_rel(r.name, a);
            }
            R.M.rels[r.name][tuple_index(xs, rad)] = in_F(bits);
        });
    }
    return R;
}

/** plain product of the members indexed by `gen` */
inline FinStructure product_over(const std::vector<FinStructure>& fam, unsigned gen) {
    std::vector<FinStructure> sub;
    for (size_t i = 0; i < fam.size(); ++i)
        if (gen & (1u << i)) sub.push_back(fam[i]);
    if (sub.empty()) {
        // empty product: the one-point structure with every relation true
        FinStructure M;
        M.sig = fam[0].sig;
        for (auto& s : M.sig.sorts) M.carrier[s] = 1;
        M.init_tables();
        for (auto& [n, t] : M.rels) std::fill(t.begin(), t.end(), 1);
        return M;
    }
    int k = static_cast<int>(sub.size());
    return reduced_product(sub, SetFilter::principal(k, (1u << k) - 1)).M;
}

struct LosResult {
    bool in_product = false;  // reduced product satisfies phi at the classes
    bool in_filter = false;   // the satisfaction set belongs to the filter
};

/** \brief Compare satisfaction in the reduced product with the filter condition. */
inline LosResult los_check(const std::vector<FinStructure>& fam, const SetFilter& F, const ReducedProduct& R,
                           const Formula& phi, const Context& ctx, const std::vector<int>& classes) {
    if (!in_fragment(phi, Fragment::Regular))
        throw FragmentError("los_check needs a regular formula (conjunction and existentials only): " + print(phi));
    Env e;
    for (size_t k = 0; k < ctx.size(); ++k) e[ctx[k].name] = classes[k];
    LosResult out;
    out.in_product = holds(R.M, phi, e);
    unsigned s = 0;
    for (size_t i = 0; i < fam.size(); ++i) {
        Env ei;
        for (size_t k = 0; k < ctx.size(); ++k) ei[ctx[k].name] = R.reps.at(ctx[k].sort)[classes[k]][i];
        if (holds(fam[i], phi, ei)) s |= 1u << i;
    }
    out.in_filter = F.contains(s);
    return out;
}

// ------------------------------------------------------------ homomorphisms and chains

/** per-sort maps between carriers */
using StructMap = std::map<std::string, std::vector<int>>;

/** does h commute with functions and preserve relations? */
inline bool is_homomorphism(const FinStructure& A, const FinStructure& B, const StructMap& h) {
    for (auto& f : A.sig.funcs) {
        bool ok = true;
        for_tuples(A.radix(f.args), [&](const std::vector<int>& xs) {
            std::vector<int> ys;
            for (size_t k = 0; k < xs.size(); ++k) ys.push_back(h.at(f.args[k])[xs[k]]);
            if (h.at(f.result)[A.apply(f.name, xs)] != B.apply(f.name, ys)) ok = false;
        });
        if (!ok) return false;
    }
    for (auto& r : A.sig.rels) {
        bool ok = true;
        for_tuples(A.radix(r.args), [&](const std::vector<int>& xs) {
            std::vector<int> ys;
            for (size_t k = 0; k < xs.size(); ++k) ys.push_back(h.at(r.args[k])[xs[k]]);
            if (A.holds_rel(r.name, xs) && !B.holds_rel(r.name, ys)) ok = false;
        });
        if (!ok) return false;
    }
    return true;
}

/**
 * \brief Colimit of a finite chain of homomorphisms (maps[i]: stages[i] -> stages[i+1]).
 * For a finite chain the colimit is the last stage; the laws checked are that
 * every transition is a homomorphism and that each element's image and each
 * atom's truth is independent of the stage it is read at.
 */
inline std::optional<std::string> chain_colimit_laws(const std::vector<FinStructure>& stages, const std::vector<StructMap>& maps) {
    if (stages.empty() || maps.size() + 1 != stages.size()) return "chain needs n stages and n-1 maps";
    for (size_t i = 0; i < maps.size(); ++i)
        if (!is_homomorphism(stages[i], stages[i + 1], maps[i])) return "transition " + std::to_string(i) + " is not a homomorphism";
    // composite into the colimit agrees with stepwise transport
    for (size_t i = 0; i < stages.size(); ++i) {
        StructMap h;
        for (auto& s : stages[i].sig.sorts) {
            h[s].resize(stages[i].size(s));
            std::iota(h[s].begin(), h[s].end(), 0);
        }
        for (size_t j = i; j < maps.size(); ++j)
            for (auto& [s, v] : h)
                for (auto& x : v) x = maps[j].at(s)[x];
        if (!is_homomorphism(stages[i], stages.back(), h)) return "composite from stage " + std::to_string(i) + " is not a homomorphism";
    }
    return std::nullopt;
}

// ------------------------------------------------------------ text form

inline SExpr structure_sexpr(const FinStructure& M) {
    SExpr l = SExpr::list({SExpr::sym("structure")});
    if (M.exploding) l.add(SExpr::list({SExpr::sym("exploding")}));
    l.add(signature_sexpr(M.sig));
    for (auto& s : M.sig.sorts) l.add(SExpr::list({SExpr::sym("carrier"), SExpr::sym(s), SExpr::sym(std::to_string(M.size(s)))}));
    auto tup = [](const std::vector<int>& xs) {
        SExpr t = SExpr::list();
        for (int x : xs) t.add(SExpr::sym(std::to_string(x)));
        return t;
    };
    for (auto& f : M.sig.funcs)
        for_tuples(M.radix(f.args), [&](const std::vector<int>& xs) {
            l.add(SExpr::list({SExpr::sym("func"), SExpr::sym(f.name), tup(xs), SExpr::sym(std::to_string(M.apply(f.name, xs)))}));
        });
    for (auto& r : M.sig.rels) {
        SExpr e = SExpr::list({SExpr::sym("rel"), SExpr::sym(r.name)});
        for_tuples(M.radix(r.args), [&](const std::vector<int>& xs) {
            if (M.holds_rel(r.name, xs)) e.add(tup(xs));
        });
        l.add(e);
    }
    return l;
}

inline int read_int(const SExpr& e) {
    if (!e.is_symbol()) throw ParseError("expected integer", e.pos);
    try {
        size_t k = 0;
        int v = std::stoi(e.text, &k);
        if (k != e.text.size()) throw ParseError("expected integer", e.pos);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("expected integer, got '" + e.text + "'", e.pos);
    }
}

inline std::vector<int> read_ints(const SExpr& e) {
    if (!e.is_list()) throw ParseError("expected integer list", e.pos);
    std::vector<int> xs;
    for (auto& i : e.items) xs.push_back(read_int(i));
    return xs;
}

/** \brief Read a structure; with `sig` null, a (signature ...) item must be present. */
inline FinStructure read_structure(const SExpr& e, const Signature* sig = nullptr) {
    if (e.head() != "structure") throw ParseError("expected (structure ...)", e.pos);
    FinStructure M;
    if (sig) M.sig = *sig;
    for (size_t i = 1; i < e.size(); ++i) {
        auto h = e[i].head();
        if (h == "signature") M.sig = read_signature(e[i]);
        else if (h == "exploding") M.exploding = true;
    }
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "carrier") {
            if (!M.sig.has_sort(e[i][1].text)) throw SortError(e[i][1].text, "undeclared sort");
            M.carrier[e[i][1].text] = read_int(e[i][2]);
        }
    for (auto& s : M.sig.sorts)
        if (!M.carrier.count(s)) M.carrier[s] = 1;
    M.init_tables();
    for (size_t i = 1; i < e.size(); ++i) {
        const SExpr& it = e[i];
        auto h = it.head();
        if (h == "func") {
            auto* d = M.sig.func(it[1].text);
            if (!d) throw SortError(it[1].text, "undeclared function symbol");
            auto xs = read_ints(it[2]);
            int v = read_int(it[3]);
            auto rad = M.radix(d->args);
            if (xs.size() != rad.size()) throw ParseError("wrong arity for " + d->name, it.pos);
            for (size_t k = 0; k < xs.size(); ++k)
                if (xs[k] < 0 || xs[k] >= rad[k]) throw ParseError("element out of range", it.pos);
            if (v < 0 || v >= M.size(d->result)) throw ParseError("value out of range", it.pos);
            M.funcs[d->name][tuple_index(xs, rad)] = v;
        } else if (h == "rel") {
            auto* d = M.sig.rel(it[1].text);
            if (!d) throw SortError(it[1].text, "undeclared relation symbol");
            auto rad = M.radix(d->args);
            for (size_t j = 2; j < it.size(); ++j) {
                auto xs = read_ints(it[j]);
                if (xs.size() != rad.size()) throw ParseError("wrong arity for " + d->name, it[j].pos);
                for (size_t k = 0; k < xs.size(); ++k)
                    if (xs[k] < 0 || xs[k] >= rad[k]) throw ParseError("element out of range", it[j].pos);
                M.rels[d->name][tuple_index(xs, rad)] = 1;
            }
        } else if (h != "signature" && h != "exploding" && h != "carrier") {
            throw ParseError("unknown structure item '" + h + "'", it.pos);
        }
    }
    return M;
}

}  // namespace ifol

#endif
