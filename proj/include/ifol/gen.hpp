#ifndef IFOL_GEN_HPP
#define IFOL_GEN_HPP

#include <random>

#include "forcing.hpp"
#include "proofs.hpp"

namespace ifol::gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct FormulaOptions {
    int depth = 3;
    int max_width = 2;  // conjunction/disjunction arity
    Fragment fragment = Fragment::FirstOrder;
    bool equality = true;
    bool quantifiers = true;
};

namespace detail {

inline std::optional<Term> random_term(Rng& rng, const Signature& sig, const Context& ctx, const std::string& sort, int depth) {
    std::vector<Term> opts;
    for (auto& d : ctx)
        if (d.sort == sort) opts.push_back(var(d));
    for (auto& f : sig.funcs)
        if (f.result == sort && f.args.empty()) opts.push_back(constant(f.name, sort));
    if (depth > 0)
        for (auto& f : sig.funcs) {
            if (f.result != sort || f.args.empty() || !coin(rng, 0.3)) continue;
            std::vector<Term> args;
            bool ok = true;
            for (auto& a : f.args) {
                auto t = random_term(rng, sig, ctx, a, depth - 1);
                if (!t) ok = false;
                else args.push_back(*t);
            }
            if (ok) opts.push_back(app(f.name, args, sort));
        }
    if (opts.empty()) return std::nullopt;
    return opts[uniform(rng, 0, static_cast<int>(opts.size()) - 1)];
}

inline std::optional<Formula> random_atom(Rng& rng, const Signature& sig, const Context& ctx, const FormulaOptions& o) {
    for (int tries = 0; tries < 8; ++tries) {
        int nr = static_cast<int>(sig.rels.size());
        bool use_eq = o.equality && !sig.sorts.empty() && (nr == 0 || coin(rng, 0.15));
        if (use_eq) {
            auto& s = sig.sorts[uniform(rng, 0, static_cast<int>(sig.sorts.size()) - 1)];
            auto a = random_term(rng, sig, ctx, s, 1), b = random_term(rng, sig, ctx, s, 1);
            if (a && b) return eq(*a, *b);
            continue;
        }
        if (nr == 0) break;
        auto& r = sig.rels[uniform(rng, 0, nr - 1)];
        std::vector<Term> args;
        bool ok = true;
        for (auto& a : r.args) {
            auto t = random_term(rng, sig, ctx, a, 1);
            if (!t) ok = false;
            else args.push_back(*t);
        }
        if (ok) return rel(r.name, args);
    }
    return std::nullopt;
}

}  // namespace detail

/** \brief A random formula in the fragment whose free variables lie in ctx. */
inline Formula random_formula(Rng& rng, const Signature& sig, const Context& ctx, const FormulaOptions& o) {
    auto leaf = [&]() -> Formula {
        if (coin(rng, 0.1)) return coin(rng) || o.fragment == Fragment::Regular ? top() : bot();
        auto a = detail::random_atom(rng, sig, ctx, o);
        return a ? *a : top();
    };
    if (o.depth <= 0) return leaf();
    FormulaOptions sub = o;
    sub.depth = o.depth - 1;
    std::vector<int> kinds{0, 1};  // leaf, and
    if (o.fragment != Fragment::Regular) kinds.push_back(2);
    bool fo = o.fragment == Fragment::FirstOrder || o.fragment == Fragment::Classical;
    if (fo) kinds.push_back(3);
    if (o.quantifiers && !sig.sorts.empty()) {
        kinds.push_back(4);
        if (fo) kinds.push_back(5);
    }
    int kind = kinds[uniform(rng, 0, static_cast<int>(kinds.size()) - 1)];
    switch (kind) {
        case 0: return leaf();
        case 1:
        case 2: {
            int w = uniform(rng, 2, std::max(2, o.max_width));
            std::vector<Formula> xs;
            for (int i = 0; i < w; ++i) xs.push_back(random_formula(rng, sig, ctx, sub));
            return kind == 2 ? disj(xs) : conj(xs);
        }
        case 3: return imp(random_formula(rng, sig, ctx, sub), random_formula(rng, sig, ctx, sub));
        default: {
            auto& s = sig.sorts[uniform(rng, 0, static_cast<int>(sig.sorts.size()) - 1)];
            std::set<std::string> used = context_names(ctx);
            VarDecl v{fresh_name("x", used), s};
            Context big = ctx;
            big.push_back(v);
            Formula body = random_formula(rng, sig, big, sub);
            bool universal = fo && coin(rng);
            return universal ? forall_raw({v}, body) : exists_raw({v}, body);
        }
    }
}

namespace detail {

/** worlds along a fixed tree shape: nondecreasing inclusion domains, monotone tables */
inline void fill_worlds(Rng& rng, KripkeModel& K, int max_domain, double density) {
    int n = K.size();
    K.worlds.assign(n, FinStructure{});
    K.up.assign(n, {});
    for (int k = 0; k < n; ++k) {
        FinStructure& W = K.worlds[k];
        W.sig = K.sig;
        const FinStructure* P = k ? &K.worlds[K.parent[k]] : nullptr;
        for (auto& s : K.sig.sorts) W.carrier[s] = uniform(rng, P ? P->size(s) : 1, std::max(max_domain, P ? P->size(s) : 1));
        W.init_tables();
        if (P)
            for (auto& s : K.sig.sorts) {
                std::vector<int> inc(P->size(s));
                std::iota(inc.begin(), inc.end(), 0);
                K.up[k][s] = inc;
            }
        auto inside = [&](const std::vector<std::string>& ss, const std::vector<int>& xs) {
            if (!P) return false;
            for (size_t i = 0; i < xs.size(); ++i)
                if (xs[i] >= P->size(ss[i])) return false;
            return true;
        };
        for (auto& f : K.sig.funcs)
            for_tuples(W.radix(f.args), [&](const std::vector<int>& xs) {
                size_t i = tuple_index(xs, W.radix(f.args));
                W.funcs[f.name][i] = inside(f.args, xs) ? P->apply(f.name, xs) : uniform(rng, 0, W.size(f.result) - 1);
            });
        for (auto& r : K.sig.rels)
            for_tuples(W.radix(r.args), [&](const std::vector<int>& xs) {
                bool inherited = inside(r.args, xs) && P->holds_rel(r.name, xs);
                W.set_rel(r.name, xs, inherited || coin(rng, density));
            });
    }
}

}  // namespace detail

/** a random Tarski structure with carriers of size 1..max_size */
inline FinStructure random_structure(Rng& rng, const Signature& sig, int max_size, double density = 0.4) {
    KripkeModel K;
    K.sig = sig;
    K.parent = {-1};
    detail::fill_worlds(rng, K, max_size, density);
    return K.worlds[0];
}

/** \brief A random Kripke model: random tree, nondecreasing inclusion domains, monotone tables. */
inline KripkeModel random_kripke(Rng& rng, const Signature& sig, int max_nodes, int max_domain, double density = 0.4) {
    KripkeModel K;
    K.sig = sig;
    int n = uniform(rng, 1, max_nodes);
    for (int k = 0; k < n; ++k) K.parent.push_back(k == 0 ? -1 : uniform(rng, 0, k - 1));
    detail::fill_worlds(rng, K, max_domain, density);
    return K;
}

/** \brief A random Beth model: tree of uniform height, random branching, some branches dropped. */
inline BethModel random_beth(Rng& rng, const Signature& sig, int height, int branching, int max_domain, double density = 0.3,
                             double drop = 0.15) {
    KripkeModel K;
    K.sig = sig;
    K.parent = {-1};
    std::vector<int> front{0};
    for (int d = 0; d < height; ++d) {
        std::vector<int> next;
        for (int q : front) {
            int b = uniform(rng, 1, branching);
            for (int i = 0; i < b; ++i) {
                K.parent.push_back(q);
                next.push_back(static_cast<int>(K.parent.size()) - 1);
            }
        }
        front = next;
    }
    detail::fill_worlds(rng, K, max_domain, density);
    BethModel B{K, {}, -1};
    for (int l : front)
        if (!coin(rng, drop)) B.branches.push_back(l);
    if (B.branches.empty()) B.branches.push_back(front[0]);
    if (B.branches.size() == front.size()) B.branches.clear();
    return B;
}

/** \brief A random theory: axioms phi |-_x psi with x empty or one variable per sort. */
inline Theory random_theory(Rng& rng, const Signature& sig, Fragment fragment, int axioms, int depth = 2) {
    Theory T;
    T.sig = sig;
    T.fragment = fragment;
    FormulaOptions o;
    o.depth = depth;
    o.fragment = fragment;
    for (int i = 0; i < axioms; ++i) {
        Context x;
        if (!sig.sorts.empty() && coin(rng)) x.push_back({"x", sig.sorts[uniform(rng, 0, static_cast<int>(sig.sorts.size()) - 1)]});
        T.axioms.push_back({x, random_formula(rng, sig, x, o), random_formula(rng, sig, x, o)});
    }
    return T;
}

struct ProofOptions {
    Fragment fragment = Fragment::FirstOrder;
    int depth = 3;
    int max_gamma = 2;   // branching of tree rules
    int max_height = 2;  // height of tree rules
    bool tree_rules = true;
};

namespace detail {

/**
 * Forward generator: every step builds a proof whose antecedent is the
 * formula it was asked about, so the result is valid by construction.
 */
struct ProofGen {
    Rng& rng;
    const Theory& T;
    ProofOptions o;

    bool fo() const { return o.fragment == Fragment::FirstOrder || o.fragment == Fragment::Classical; }
    bool disjunctive() const { return o.fragment != Fragment::Regular; }

    Formula formula(const Context& ctx, int depth = 1) {
        FormulaOptions f;
        f.depth = depth;
        f.fragment = o.fragment;
        return random_formula(rng, T.sig, ctx, f);
    }

    std::set<std::string> names(const Context& ctx, const Formula& f) {
        std::set<std::string> s = context_names(ctx);
        for (auto& n : free_names(f)) s.insert(n);
        return s;
    }

    std::optional<Term> term_of(const Context& ctx, const std::string& sort) {
        std::vector<Term> ts;
        for (auto& d : ctx)
            if (d.sort == sort) ts.push_back(var(d));
        for (auto& f : T.sig.funcs)
            if (f.args.empty() && f.result == sort) ts.push_back(constant(f.name, sort));
        if (ts.empty()) return std::nullopt;
        return ts[uniform(rng, 0, static_cast<int>(ts.size()) - 1)];
    }

    std::optional<Proof> by_axiom(const Context& ctx, const Formula& L) {
        std::vector<const Sequent*> hits;
        for (auto& a : T.axioms) {
            if (!same(a.lhs, L)) continue;
            bool inside = std::all_of(a.ctx.begin(), a.ctx.end(), [&](const VarDecl& d) {
                return std::any_of(ctx.begin(), ctx.end(), [&](const VarDecl& e) { return e.name == d.name && e.sort == d.sort; });
            });
            if (inside) hits.push_back(&a);
        }
        if (hits.empty()) return std::nullopt;
        return build::weaken(build::axiom(*hits[uniform(rng, 0, static_cast<int>(hits.size()) - 1)]), ctx);
    }

    // a child of a tree node: either the given formula, opened when existential, or a fresh random one
    std::pair<Context, Formula> child(const Context& y, const Formula& B, bool allow_block, std::set<std::string>& avoid) {
        if (allow_block && B->kind == FormulaNode::Exists) {
            for (auto& n : names(y, B)) avoid.insert(n);
            Context ys = opening_names(B->block, avoid);
            for (auto& d : ys) avoid.insert(d.name);
            return {ys, open_body(B->subs[0], ys)};
        }
        return {{}, B};
    }

    Proof tree(const Context& ctx, const Formula& L, int depth) {
        bool disj_ok = disjunctive();
        int kind = uniform(rng, 0, 4);  // 0 tt, 1 dist, 2 dc, 3 choice, 4 tt-bar
        if (!disj_ok && (kind == 1 || kind == 4)) kind = 2;
        if (kind == 3) {
            ChoiceData c{ctx, L, {}, {}};
            std::vector<Proof> ps;
            std::set<std::string> avoid = names(ctx, L);
            int k = uniform(rng, 1, 2);
            for (int i = 0; i < k; ++i) {
                Proof p = prove(ctx, L, depth - 1);
                auto [b, part] = child(ctx, p.concl.rhs, true, avoid);
                c.blocks.push_back(b);
                c.parts.push_back(part);
                ps.push_back(p);
            }
            Proof prem = k == 1 ? ps[0] : build::and_intro(ctx, L, ps);
            RuleData d;
            d.choice = c;
            return build::node("choice", choice_instance(c).conclusion, {prem}, d);
        }
        TreeAssignment a;
        a.gamma = (kind == 2 || !disj_ok) ? 1 : uniform(rng, 1, o.max_gamma);
        a.height = uniform(rng, kind == 2 ? 1 : 0, o.max_height);
        a.root_context = ctx;
        a.labels[{}] = L;
        std::set<std::string> avoid = names(ctx, L);
        std::map<Node, Proof> prem;
        for (int l = 0; l < a.height; ++l)
            for (auto& f : level_nodes(a.gamma, l)) {
                Context y = a.context_of(f);
                Proof p = prove(y, a.label(f), depth - 1);
                int j = uniform(rng, 0, a.gamma - 1);
                for (int i = 0; i < a.gamma; ++i) {
                    Node g = f;
                    g.push_back(i);
                    Formula B = i == j ? p.concl.rhs : formula(y);
                    auto [b, lab] = child(y, B, kind != 1, avoid);
                    a.labels[g] = lab;
                    if (!b.empty()) a.blocks[g] = b;
                }
                std::vector<Formula> ds;
                for (auto& g : a.children(f)) ds.push_back(exists(a.block(g), a.label(g)));
                Formula R = disj_c(ds);
                prem[f] = a.gamma == 1 ? p : build::cut(p, build::or_intro(y, R, j));
            }
        std::vector<Proof> ps = premises_of(a, prem);
        RuleData d;
        if (kind == 2) {
            DcChain c{ctx, {}, {}};
            Node n;
            for (int i = 0; i <= a.height; ++i) {
                c.formulas.push_back(a.label(n));
                if (i) c.blocks.push_back(a.block(n));
                n.push_back(0);
            }
            d.chain = c;
            return build::node("dc", dc_instance(c).conclusion, ps, d);
        }
        d.assignment = a;
        if (kind == 4) {
            Bar bar;
            std::function<void(const Node&)> cut_at = [&](const Node& f) {
                if (static_cast<int>(f.size()) == a.height || coin(rng, 0.3)) {
                    bar.push_back(f);
                    return;
                }
                for (auto& g : a.children(f)) cut_at(g);
            };
            cut_at({});
            d.bar = bar;
            return build::node("tt-bar", tt_bar_instance(a, bar).conclusion, ps, d);
        }
        if (kind == 1) return build::node("dist", distributivity_instance(a).conclusion, ps, d);
        return build::node("tt", tt_rule_instance(a).conclusion, ps, d);
    }

    static std::vector<Proof> premises_of(const TreeAssignment& a, const std::map<Node, Proof>& m) {
        std::vector<Proof> out;
        for (auto& f : a.internal_nodes()) out.push_back(m.at(f));
        return out;
    }

    /** a random proof of L |-_ctx something */
    Proof prove(const Context& ctx, const Formula& L, int depth) {
        using namespace build;
        using K = FormulaNode;
        if (auto ax = by_axiom(ctx, L); ax && coin(rng, 0.5)) return *ax;
        if (depth <= 0) {
            switch (uniform(rng, 0, 2)) {
                case 0: return id(ctx, L);
                case 1: return top_intro(ctx, L);
                default:
                    if (L->kind == K::And && !L->subs.empty()) return and_elim(ctx, L, uniform(rng, 0, static_cast<int>(L->subs.size()) - 1));
                    return id(ctx, L);
            }
        }
        for (int tries = 0; tries < 20; ++tries) {
            int k = uniform(rng, 0, 17);
            switch (k) {
                case 0: return id(ctx, L);
                case 1:
                    if (L->kind == K::And && !L->subs.empty()) return and_elim(ctx, L, uniform(rng, 0, static_cast<int>(L->subs.size()) - 1));
                    break;
                case 2:
                    if (disjunctive()) {
                        std::vector<Formula> ds{L, formula(ctx)};
                        if (coin(rng)) std::swap(ds[0], ds[1]);
                        Formula R = disj(ds);
                        return or_intro(ctx, R, same(ds[0], L) ? 0 : 1);
                    }
                    break;
                case 3: return and_intro(ctx, L, {prove(ctx, L, depth - 1), prove(ctx, L, depth - 1)});
                case 4:
                case 5: {
                    Proof a = prove(ctx, L, depth - 1);
                    Proof b = prove(ctx, a.concl.rhs, depth - 1);
                    return cut(a, b);
                }
                case 6:
                    if (fo()) {
                        Formula C = formula(ctx);
                        return imp_down(prove(ctx, conj2(L, C), depth - 1));
                    }
                    break;
                case 7:
                    if (fo() && L->kind == K::And && L->subs.size() == 2)
                        return imp_up(imp_down(prove(ctx, L, depth - 1)));
                    break;
                case 8:
                    if (L->kind == K::Exists) {
                        auto [ys, body] = open_quantifier(L, context_names(ctx));
                        Context big = ctx;
                        big.insert(big.end(), ys.begin(), ys.end());
                        Proof b = prove(big, body, depth - 1);
                        Formula q = exists(ys, b.concl.rhs);
                        return exists_left(ctx, L, ys, cut(b, exists_right(ctx, q, ys)));
                    }
                    break;
                case 9:
                    if (!ctx.empty()) {
                        Context lo(ctx.begin(), ctx.end() - 1), v{ctx.back()};
                        if (!free_names(L).count(v[0].name) && coin(rng)) break;
                        return exists_right(lo, exists(v, L), v);
                    }
                    break;
                case 10:
                    if (fo() && !T.sig.sorts.empty()) {
                        auto& s = T.sig.sorts[uniform(rng, 0, static_cast<int>(T.sig.sorts.size()) - 1)];
                        Context ys{{fresh_name("y", names(ctx, L)), s}};
                        Context big = ctx;
                        big.insert(big.end(), ys.begin(), ys.end());
                        Proof b = prove(big, L, depth - 1);
                        return forall_right(ctx, forall(ys, b.concl.rhs), ys, b);
                    }
                    break;
                case 11:
                    if (L->kind == K::Forall) {
                        auto [ys, body] = open_quantifier(L, context_names(ctx));
                        Proof inst = forall_left(ctx, L, ys);
                        Subst sub;
                        bool ok = true;
                        for (auto& d : ys) {
                            auto t = term_of(ctx, d.sort);
                            if (!t) ok = false;
                            else sub[d.name] = *t;
                        }
                        if (ok) return build::substitute(inst, ctx, sub);
                    }
                    break;
                case 12:
                    if (L->kind == K::And && L->subs.size() == 2 && L->subs[1]->kind == K::Exists) return frobenius(ctx, L->subs[0], L->subs[1]);
                    if (L->kind == K::And && L->subs.size() == 2 && L->subs[1]->kind == K::Or) return small_dist(ctx, L->subs[0], L->subs[1]);
                    break;
                case 13:
                    if (L->kind == K::Or) {
                        std::vector<Proof> arms;
                        std::vector<Formula> rs;
                        for (auto& a : L->subs) {
                            arms.push_back(prove(ctx, a, depth - 1));
                            rs.push_back(arms.back().concl.rhs);
                        }
                        if (rs.empty()) rs.push_back(formula(ctx));
                        Formula R = disj(rs);
                        for (size_t i = 0; i < arms.size(); ++i) arms[i] = cut(arms[i], or_intro(ctx, R, static_cast<int>(i)));
                        return or_elim(ctx, arms, R);
                    }
                    break;
                case 14:
                    if (o.fragment == Fragment::Classical) {
                        Formula f = formula(ctx);
                        return cut(top_intro(ctx, L), leaf("em", {ctx, top(), disj2(f, neg(f))}));
                    }
                    break;
                case 15:
                    if (!ctx.empty()) {
                        auto& v = ctx[uniform(rng, 0, static_cast<int>(ctx.size()) - 1)];
                        return cut(top_intro(ctx, L), leaf("eq-refl", {ctx, top(), eq(var(v), var(v))}));
                    }
                    break;
                case 16:
                case 17:
                    if (o.tree_rules) return tree(ctx, L, depth);
                    break;
            }
        }
        return id(ctx, L);
    }
};

}  // namespace detail

/**
 * \brief A random proof in T, valid by construction. The antecedent is an
 * axiom's antecedent or a random formula; the context is that axiom's or a
 * single variable.
 */
inline Proof random_proof(Rng& rng, const Theory& T, const ProofOptions& o = {}) {
    detail::ProofGen g{rng, T, o};
    Context ctx;
    Formula L;
    if (!T.axioms.empty() && coin(rng, 0.6)) {
        auto& a = T.axioms[uniform(rng, 0, static_cast<int>(T.axioms.size()) - 1)];
        ctx = a.ctx;
        L = a.lhs;
    } else {
        if (!T.sig.sorts.empty() && coin(rng)) ctx.push_back({"x", T.sig.sorts[0]});
        L = g.formula(ctx, 2);
    }
    return g.prove(ctx, L, o.depth);
}

/** propositional signature p, q, r... */
inline Signature propositional(int atoms) {
    Signature sig;
    for (int i = 0; i < atoms; ++i) sig.add_rel({std::string(1, static_cast<char>('p' + i)), {}});
    return sig;
}

/** one sort U, unary P, binary R and a constant c */
inline Signature small_first_order(bool with_constant = true) {
    Signature sig;
    sig.add_sort("U");
    sig.add_rel({"P", {"U"}});
    sig.add_rel({"R", {"U", "U"}});
    if (with_constant) sig.add_func({"c", {}, "U"});
    return sig;
}

}  // namespace ifol::gen

#endif
