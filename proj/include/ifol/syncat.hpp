#ifndef IFOL_SYNCAT_HPP
#define IFOL_SYNCAT_HPP

#include <mutex>

#include "forcing.hpp"
#include "proofs.hpp"
#include "setmodels.hpp"

namespace ifol {

// ------------------------------------------------------------ oracles

enum class Verdict { No, Yes, Unknown };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        default: return "unknown";
    }
}

/** No beats Unknown beats Yes */
inline Verdict all_of(std::initializer_list<Verdict> vs) {
    Verdict out = Verdict::Yes;
    for (auto v : vs) {
        if (v == Verdict::No) return Verdict::No;
        if (v == Verdict::Unknown) out = Verdict::Unknown;
    }
    return out;
}

inline Verdict from_bool(bool b) { return b ? Verdict::Yes : Verdict::No; }

/** bound-variable hints erased, so alpha-variants print alike */
inline Formula strip_hints(const Formula& f) {
    FormulaNode n = *f;
    for (auto& s : n.subs) s = strip_hints(s);
    for (auto& d : n.block) d.name.clear();
    return mk_formula(std::move(n));
}

inline std::string memo_key(const Sequent& s) { return print(Sequent{s.ctx, strip_hints(s.lhs), strip_hints(s.rhs)}); }

/**
 * \brief "Provable in T", decided by an injected procedure and memoized on
 * the printed sequent (bound variables are nameless, so alpha-variants share
 * a key). Copies share the memo; calls may come from several threads.
 */
struct SynOracle {
    std::string name;
    Theory theory;
    std::function<Verdict(const Sequent&)> decide;

    struct Memo {
        std::mutex mu;
        std::map<std::string, Verdict> table;
    };
    std::shared_ptr<Memo> memo = std::make_shared<Memo>();

    Verdict operator()(const Sequent& s) const {
        std::string key = memo_key(s);
        {
            std::lock_guard<std::mutex> lock(memo->mu);
            auto it = memo->table.find(key);
            if (it != memo->table.end()) return it->second;
        }
        Verdict v = decide(s);
        std::lock_guard<std::mutex> lock(memo->mu);
        memo->table.emplace(key, v);
        return v;
    }
    size_t cached() const {
        std::lock_guard<std::mutex> lock(memo->mu);
        return memo->table.size();
    }
};

/**
 * \brief Exhaustive finite-model oracle. A Tarski countermodel of size
 * <= bound answers no. Positive sequents over positive theories with none
 * answer yes. Anything using implication or universals is then searched for a
 * Kripke countermodel within `kripke`, and yes means the search exhausted.
 * Complete relative to the bounds, exact for propositional coherent theories.
 */
inline SynOracle semantic_oracle(const Theory& T, int bound = 2, KripkeBounds kripke = {}) {
    EnumerateOptions o;
    o.bound = bound;
    o.up_to_iso = false;
    auto models = std::make_shared<std::vector<FinStructure>>(enumerate_models(T, o));
    bool positive_theory = std::all_of(T.axioms.begin(), T.axioms.end(), [](const Sequent& a) {
        return in_fragment(a.lhs, Fragment::Geometric) && in_fragment(a.rhs, Fragment::Geometric);
    });
    SynOracle out;
    out.name = "semantic";
    out.theory = T;
    out.decide = [models, positive_theory, T, kripke](const Sequent& s) {
        for (auto& M : *models)
            if (!satisfies(M, s)) return Verdict::No;
        if (positive_theory && in_fragment(s.lhs, Fragment::Geometric) && in_fragment(s.rhs, Fragment::Geometric))
            return Verdict::Yes;
        auto r = countermodel_search(T, s, kripke);
        if (r.found) return Verdict::No;
        return r.truncated ? Verdict::Unknown : Verdict::Yes;
    };
    return out;
}

// ------------------------------------------------------------ bounded proof search

namespace detail {

namespace b = ifol::build;

/**
 * Goal-directed search over hypothesis lists. Every result proves
 * and(H) |- goal in the kernel. Left rules for and/or/exists are applied
 * eagerly. Each unit of depth buys one round of forward chaining through
 * theory axioms, implications, universals and equalities.
 */
struct ProofSearch {
    const Theory& T;
    size_t budget = 20000;  // recursive calls before giving up
    size_t calls = 0;

    using Hyps = std::vector<Formula>;

    static Formula H(const Hyps& h) { return conj(h); }

    static int find(const Hyps& h, const Formula& f) {
        for (size_t i = 0; i < h.size(); ++i)
            if (same(h[i], f)) return static_cast<int>(i);
        return -1;
    }
    static void add(Hyps& h, const Formula& f) {
        if (find(h, f) < 0) h.push_back(f);
    }

    std::set<std::string> avoid(const Context& ctx, const Hyps& h, const Formula& goal) const {
        std::set<std::string> out = context_names(ctx);
        for (auto& f : h)
            for (auto& n : free_names(f)) out.insert(n);
        for (auto& n : free_names(goal)) out.insert(n);
        return out;
    }

    std::vector<Term> candidates(const Context& ctx, const std::string& sort) const {
        std::vector<Term> out;
        for (auto& d : ctx)
            if (d.sort == sort) out.push_back(var(d));
        for (auto& f : T.sig.funcs)
            if (f.args.empty() && f.result == sort) out.push_back(constant(f.name, sort));
        return out;
    }

    /** all substitutions of candidate terms for `vars`, capped */
    std::vector<Subst> instances(const Context& ctx, const Context& vars, size_t cap = 64) const {
        std::vector<std::vector<Term>> pools;
        std::vector<int> radix;
        for (auto& v : vars) {
            pools.push_back(candidates(ctx, v.sort));
            radix.push_back(static_cast<int>(pools.back().size()));
        }
        std::vector<Subst> out;
        for_tuples(radix, [&](const std::vector<int>& xs) {
            if (out.size() >= cap) return;
            Subst s;
            for (size_t i = 0; i < vars.size(); ++i) s[vars[i].name] = pools[i][xs[i]];
            out.push_back(s);
        });
        return out;
    }

    Proof proj(const Context& ctx, const Hyps& h, int i) const { return b::and_elim(ctx, H(h), i); }

    Proof rearrange(const Context& ctx, const Formula& from, const Hyps& to) const { return b::conjuncts(ctx, from, H(to)); }

    std::optional<Proof> prove(const Context& ctx, Hyps h, const Formula& goal, int depth) {
        if (++calls > budget) return std::nullopt;
        // invertible left rules
        for (size_t i = 0; i < h.size(); ++i) {
            Formula f = h[i];
            if (f->kind != FormulaNode::And && f->kind != FormulaNode::Or && f->kind != FormulaNode::Exists) continue;
            Hyps rest = h;
            rest.erase(rest.begin() + static_cast<long>(i));
            if (f->kind == FormulaNode::And) {
                Hyps next = rest;
                for (auto& s : f->subs) add(next, s);
                auto p = prove(ctx, next, goal, depth);
                if (!p) return std::nullopt;
                return b::cut(rearrange(ctx, H(h), next), *p);
            }
            Formula R = H(rest);
            Proof split = b::conjuncts(ctx, H(h), conj2(R, f));
            if (f->kind == FormulaNode::Or) {
                std::vector<Proof> arms;
                for (auto& d : f->subs) {
                    Hyps next = rest;
                    add(next, d);
                    auto p = prove(ctx, next, goal, depth);
                    if (!p) return std::nullopt;
                    arms.push_back(b::cut(b::conjuncts(ctx, conj2(R, d), H(next)), *p));
                }
                Proof sd = b::small_dist(ctx, R, f);
                return b::cut(b::cut(split, sd), b::or_elim(ctx, arms, goal));
            }
            Context ys = opening_names(f->block, avoid(ctx, h, goal));
            Context big = ctx;
            big.insert(big.end(), ys.begin(), ys.end());
            Formula body = open_body(f->subs[0], ys);
            Hyps next = rest;
            add(next, body);
            auto p = prove(big, next, goal, depth);
            if (!p) return std::nullopt;
            Proof fr = b::frobenius(ctx, R, f);
            Proof inner = b::cut(b::conjuncts(big, conj2(R, body), H(next)), *p);
            return b::cut(b::cut(split, fr), b::exists_left(ctx, fr.concl.rhs, ys, inner));
        }
        return right(ctx, h, goal, depth);
    }

    std::optional<Proof> right(const Context& ctx, const Hyps& h, const Formula& goal, int depth) {
        using K = FormulaNode;
        if (int i = find(h, goal); i >= 0) return proj(ctx, h, i);
        if (is_top(goal)) return b::top_intro(ctx, H(h));
        if (goal->kind == K::And) {
            std::vector<Proof> ps;
            for (auto& s : goal->subs) {
                auto p = prove(ctx, h, s, depth);
                if (!p) return std::nullopt;
                ps.push_back(*p);
            }
            return b::and_intro(ctx, H(h), ps);
        }
        if (goal->kind == K::Imp) {
            Hyps next = h;
            add(next, goal->subs[0]);
            auto p = prove(ctx, next, goal->subs[1], depth);
            if (!p) return std::nullopt;
            return b::imp_down(b::cut(b::conjuncts(ctx, conj2(H(h), goal->subs[0]), H(next)), *p));
        }
        if (goal->kind == K::Forall) {
            Context ys = opening_names(goal->block, avoid(ctx, h, goal));
            Context big = ctx;
            big.insert(big.end(), ys.begin(), ys.end());
            auto p = prove(big, h, open_body(goal->subs[0], ys), depth);
            if (!p) return std::nullopt;
            return b::forall_right(ctx, goal, ys, *p);
        }
        if (goal->kind == K::Eq && goal->terms[0]->kind == TermNode::Free && term_eq(goal->terms[0], goal->terms[1]))
            return b::cut(b::top_intro(ctx, H(h)), b::leaf("eq-refl", {ctx, top(), goal}));
        if (goal->kind == K::Or)
            for (size_t i = 0; i < goal->subs.size(); ++i)
                if (auto p = prove(ctx, h, goal->subs[i], depth)) return b::cut(*p, b::or_intro(ctx, goal, static_cast<int>(i)));
        if (goal->kind == K::Exists) {
            Context ys = opening_names(goal->block, avoid(ctx, h, goal));
            Formula body = open_body(goal->subs[0], ys);
            for (auto& s : instances(ctx, ys)) {
                auto p = prove(ctx, h, substitute(body, s), depth);
                if (!p) continue;
                return b::cut(*p, b::substitute(b::exists_right(ctx, goal, ys), ctx, s));
            }
        }
        if (depth <= 0) return std::nullopt;
        auto facts = saturate(ctx, h);
        if (facts.empty()) return std::nullopt;
        Hyps next = h;
        std::vector<Proof> ps;
        for (size_t i = 0; i < h.size(); ++i) ps.push_back(proj(ctx, h, static_cast<int>(i)));
        for (auto& [f, p] : facts) {
            next.push_back(f);
            ps.push_back(p);
        }
        auto p = prove(ctx, next, goal, depth - 1);
        if (!p) return std::nullopt;
        return b::cut(b::and_intro(ctx, H(h), ps), *p);
    }

    /** one round of forward consequences of h not already in h */
    std::vector<std::pair<Formula, Proof>> saturate(const Context& ctx, const Hyps& h) {
        std::vector<std::pair<Formula, Proof>> out;
        auto fresh = [&](const Formula& f) {
            return find(h, f) < 0 && std::none_of(out.begin(), out.end(), [&](auto& e) { return same(e.first, f); });
        };
        const size_t cap = 200;
        for (auto& a : T.axioms)
            for (auto& s : instances(ctx, a.ctx)) {
                Formula l = substitute(a.lhs, s), r = substitute(a.rhs, s);
                if (!fresh(r) || out.size() >= cap) continue;
                auto lp = prove(ctx, h, l, 0);
                if (!lp) continue;
                Proof inst = a.ctx == ctx && std::all_of(a.ctx.begin(), a.ctx.end(), [&](const VarDecl& d) {
                    return term_eq(s.at(d.name), var(d));
                }) ? b::axiom(a) : b::substitute(b::axiom(a), ctx, s);
                out.push_back({r, b::cut(*lp, inst)});
            }
        for (size_t i = 0; i < h.size() && out.size() < cap; ++i) {
            const Formula& f = h[i];
            if (f->kind == FormulaNode::Imp && fresh(f->subs[1])) {
                auto ap = prove(ctx, h, f->subs[0], 0);
                if (!ap) continue;
                Proof both = b::and_intro(ctx, H(h), {proj(ctx, h, static_cast<int>(i)), *ap});
                out.push_back({f->subs[1], b::cut(both, b::imp_up(b::id(ctx, f)))});
            } else if (f->kind == FormulaNode::Forall) {
                Context ys = opening_names(f->block, avoid(ctx, h, top()));
                Formula body = open_body(f->subs[0], ys);
                for (auto& s : instances(ctx, ys)) {
                    Formula g = substitute(body, s);
                    if (!fresh(g)) continue;
                    Proof inst = b::substitute(b::forall_left(ctx, f, ys), ctx, s);
                    out.push_back({g, b::cut(proj(ctx, h, static_cast<int>(i)), inst)});
                }
            } else if (f->kind == FormulaNode::Eq && f->terms[0]->kind == TermNode::Free && f->terms[1]->kind == TermNode::Free &&
                       !term_eq(f->terms[0], f->terms[1])) {
                const Term& x = f->terms[0];
                const Term& y = f->terms[1];
                Formula flipped = eq(y, x);
                if (fresh(flipped)) {
                    // w = y and w = x |- y = x, then w := x
                    std::set<std::string> used = avoid(ctx, h, top());
                    VarDecl w{fresh_name("w", used), x->sort};
                    Context big = ctx;
                    big.push_back(w);
                    Proof es = b::leaf("eq-subst", {big, conj2(eq(var(w), y), eq(var(w), x)), flipped});
                    Proof sym = b::substitute(es, ctx, {{w.name, x}});
                    Proof refl = b::cut(b::top_intro(ctx, H(h)), b::leaf("eq-refl", {ctx, top(), eq(x, x)}));
                    Proof both = b::and_intro(ctx, H(h), {proj(ctx, h, static_cast<int>(i)), refl});
                    out.push_back({flipped, b::cut(both, sym)});
                }
                for (size_t j = 0; j < h.size(); ++j) {
                    const Formula& a = h[j];
                    if (j == i || !is_atomic(a) || !free_names(a).count(x->name)) continue;
                    Formula g = substitute(a, Subst{{x->name, y}});
                    if (!fresh(g)) continue;
                    Proof both = b::and_intro(ctx, H(h), {proj(ctx, h, static_cast<int>(i)), proj(ctx, h, static_cast<int>(j))});
                    out.push_back({g, b::cut(both, b::leaf("eq-subst", {ctx, conj2(f, a), g}))});
                }
            }
        }
        return out;
    }
};

}  // namespace detail

/** \brief Bounded backward search; the result (if any) has passed check_proof. */
inline std::optional<Proof> search_proof(const Theory& T, const Sequent& s, int depth = 2, size_t budget = 20000) {
    for (int d = 0; d <= depth; ++d) {
        detail::ProofSearch ps{T, budget};
        auto p = ps.prove(s.ctx, {s.lhs}, s.rhs, d);
        if (!p) continue;
        Proof full = build::cut(build::and_intro(s.ctx, s.lhs, {build::id(s.ctx, s.lhs)}), *p);
        if (check_proof(T, full, Fragment::Classical).ok) return full;
    }
    return std::nullopt;
}

/** \brief Proof-search oracle: yes with a checked proof, otherwise unknown. Never answers no. */
inline SynOracle search_oracle(const Theory& T, int depth = 2) {
    SynOracle out;
    out.name = "search";
    out.theory = T;
    out.decide = [T, depth](const Sequent& s) { return search_proof(T, s, depth) ? Verdict::Yes : Verdict::Unknown; };
    return out;
}

inline SynOracle make_oracle(const std::string& kind, const Theory& T, int bound = 2) {
    if (kind == "semantic") return semantic_oracle(T, bound);
    if (kind == "search") return search_oracle(T, bound);
    throw std::invalid_argument("unknown oracle " + kind + " (semantic or search)");
}

// ------------------------------------------------------------ objects and morphisms

/** formula in context [x, phi] */
struct SynObject {
    Context ctx;
    Formula phi;
};

/** theta over source.ctx followed by target.ctx; the two contexts are disjoint */
struct SynMorphism {
    SynObject source, target;
    Formula theta;
};

struct MorphismVerdict {
    Verdict verdict = Verdict::Yes;
    std::string failed;  // first condition that did not answer yes
};

inline SynObject rename_object(const SynObject& o, const Context& to) {
    if (o.ctx.size() != to.size()) throw std::invalid_argument("renaming changes the context length");
    return {to, rename(o.phi, o.ctx, to)};
}

/** the same object over names fresh for `avoid` */
inline SynObject fresh_copy(const SynObject& o, std::set<std::string> avoid) {
    for (auto& d : o.ctx) avoid.insert(d.name);
    return rename_object(o, opening_names(o.ctx, avoid));
}

inline bool alpha_same(const SynObject& a, const SynObject& b) {
    if (a.ctx.size() != b.ctx.size()) return false;
    for (size_t i = 0; i < a.ctx.size(); ++i)
        if (a.ctx[i].sort != b.ctx[i].sort) return false;
    return same(close_body(a.phi, a.ctx), close_body(b.phi, b.ctx));
}

namespace detail {

inline Context cat(const Context& a, const Context& b) {
    Context out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline void need_disjoint(const Context& a, const Context& b) {
    auto n = context_names(a);
    for (auto& d : b)
        if (n.count(d.name)) throw std::invalid_argument("contexts share the variable " + d.name);
}

}  // namespace detail

/** \brief The three functionality sequents, after checking free variables and sorts. */
inline MorphismVerdict verify_morphism(const SynOracle& oracle, const SynMorphism& m) {
    const Context& x = m.source.ctx;
    const Context& y = m.target.ctx;
    detail::need_disjoint(x, y);
    Context xy = detail::cat(x, y);
    check_formula(oracle.theory.sig, x, m.source.phi);
    check_formula(oracle.theory.sig, y, m.target.phi);
    auto names = context_names(xy);
    for (auto& n : free_names(m.theta))
        if (!names.count(n)) return {Verdict::No, "free variable " + n + " outside the source and target contexts"};
    check_formula(oracle.theory.sig, xy, m.theta);
    Context y2 = opening_names(y, names);
    Formula theta2 = rename(m.theta, y, y2);
    struct Cond {
        std::string what;
        Sequent s;
    };
    std::vector<Cond> conds = {
        {"theta |- phi and psi", {xy, m.theta, conj2(m.source.phi, m.target.phi)}},
        {"phi |- ex y. theta", {x, m.source.phi, exists(y, m.theta)}},
        {"theta(x,y) and theta(x,y') |- y = y'", {detail::cat(xy, y2), conj2(m.theta, theta2), eqs(y, y2)}},
    };
    MorphismVerdict out;
    for (auto& c : conds) {
        Verdict v = oracle(c.s);
        if (v == Verdict::Yes) continue;
        if (out.verdict == Verdict::Yes || v == Verdict::No) {
            out.failed = c.what;
            out.verdict = v;
        }
        if (v == Verdict::No) break;
    }
    return out;
}

/** [x, phi] -> [x', phi(x')] with theta = phi(x) and x = x' */
inline SynMorphism identity_morphism(const SynObject& o) {
    SynObject t = fresh_copy(o, context_names(o.ctx));
    return {o, t, conj2(o.phi, eqs(o.ctx, t.ctx))};
}

/** m2 after m1: [x, ex y.(theta1 and theta2)]. Target contexts clashing with the source are renamed. */
inline SynMorphism compose(const SynMorphism& m1, const SynMorphism& m2) {
    if (!alpha_same(m1.target, m2.source)) throw std::invalid_argument("target of the first morphism is not the source of the second");
    const Context& x = m1.source.ctx;
    const Context& y = m1.target.ctx;
    Formula theta2 = rename(m2.theta, m2.source.ctx, y);
    SynObject z = m2.target;
    std::set<std::string> used = context_names(detail::cat(x, y));
    bool clash = std::any_of(z.ctx.begin(), z.ctx.end(), [&](const VarDecl& d) { return used.count(d.name) > 0; });
    if (clash) {
        for (auto& n : free_names(theta2)) used.insert(n);
        SynObject z2 = fresh_copy(z, used);
        theta2 = rename(theta2, z.ctx, z2.ctx);
        z = z2;
    }
    return {m1.source, z, exists(y, conj2(m1.theta, theta2))};
}

/** both morphisms between the same objects (up to renaming) with mutually entailed graphs */
inline Verdict equivalent(const SynOracle& oracle, const SynMorphism& a, const SynMorphism& b) {
    if (!alpha_same(a.source, b.source) || !alpha_same(a.target, b.target)) return Verdict::No;
    Context x = a.source.ctx, y = a.target.ctx;
    Formula tb = rename(rename(b.theta, b.source.ctx, x), b.target.ctx, y);
    Context xy = detail::cat(x, y);
    return all_of({oracle({xy, a.theta, tb}), oracle({xy, tb, a.theta})});
}

/** the relation read backwards, [y, psi] -> [x, phi] */
inline SynMorphism transpose(const SynMorphism& m) { return {m.target, m.source, m.theta}; }

struct Classification {
    Verdict iso = Verdict::Unknown;
    Verdict mono = Verdict::Unknown;
};

/** iso: the transpose is a morphism; mono: theta(x,y) and theta(x',y) |- x = x' */
inline Classification classify(const SynOracle& oracle, const SynMorphism& m) {
    Classification c;
    c.iso = verify_morphism(oracle, transpose(m)).verdict;
    const Context& x = m.source.ctx;
    Context xy = detail::cat(x, m.target.ctx);
    Context x2 = opening_names(x, context_names(xy));
    c.mono = oracle({detail::cat(xy, x2), conj2(m.theta, rename(m.theta, x, x2)), eqs(x, x2)});
    return c;
}

/** a mono into [y, psi] is isomorphic to the subobject [y, ex x. theta] */
inline SynObject subobject_normal_form(const SynMorphism& m) { return {m.target.ctx, exists(m.source.ctx, m.theta)}; }

/** subobjects over one context: a <= b iff a |- b */
inline Verdict subobject_leq(const SynOracle& oracle, const SynObject& a, const SynObject& b) {
    if (!alpha_same({a.ctx, top()}, {b.ctx, top()})) throw std::invalid_argument("subobjects over different contexts");
    return oracle({a.ctx, a.phi, rename(b.phi, b.ctx, a.ctx)});
}

/** the inclusion [y', eta(y')] -> [y, psi] of a subobject */
inline SynMorphism inclusion(const SynObject& sub, const SynObject& whole) {
    SynObject s = fresh_copy(rename_object(sub, whole.ctx), context_names(whole.ctx));
    return {s, whole, conj2(s.phi, eqs(s.ctx, whole.ctx))};
}

// ------------------------------------------------------------ constructions

struct ProductData {
    SynObject object;                   // [x_0 .. x_n, and phi_i]
    std::vector<SynMorphism> projections;
};

/** factor contexts are renamed apart when they clash */
inline ProductData product(const std::vector<SynObject>& factors) {
    ProductData out;
    std::set<std::string> used;
    std::vector<SynObject> parts;
    Context all;
    std::vector<Formula> phis;
    for (auto& f : factors) {
        bool clash = std::any_of(f.ctx.begin(), f.ctx.end(), [&](const VarDecl& d) { return used.count(d.name) > 0; });
        SynObject g = clash ? fresh_copy(f, used) : f;
        for (auto& d : g.ctx) used.insert(d.name);
        all.insert(all.end(), g.ctx.begin(), g.ctx.end());
        phis.push_back(g.phi);
        parts.push_back(g);
    }
    out.object = {all, conj(phis)};
    for (auto& g : parts) {
        SynObject t = fresh_copy(g, used);
        out.projections.push_back({out.object, t, conj2(out.object.phi, eqs(g.ctx, t.ctx))});
    }
    return out;
}

/** the mediating arrow [w, alpha] -> product for a cone f_i: [w, alpha] -> factor_i */
inline SynMorphism pairing_morphism(const ProductData& p, const std::vector<SynMorphism>& cone) {
    if (cone.size() != p.projections.size()) throw std::invalid_argument("cone has the wrong number of legs");
    std::vector<Formula> parts;
    for (size_t i = 0; i < cone.size(); ++i) {
        const SynObject& factor = p.projections[i].target;
        if (!alpha_same(cone[i].target, factor)) throw std::invalid_argument("cone leg does not land in the factor");
        if (!alpha_same(cone[i].source, cone[0].source)) throw std::invalid_argument("cone legs have different sources");
        Formula t = rename(cone[i].theta, cone[i].source.ctx, cone[0].source.ctx);
        // factor i sits in the product under its own (possibly renamed) context
        size_t off = 0;
        for (size_t j = 0; j < i; ++j) off += p.projections[j].target.ctx.size();
        Context slot(p.object.ctx.begin() + static_cast<long>(off), p.object.ctx.begin() + static_cast<long>(off + factor.ctx.size()));
        parts.push_back(rename(t, cone[i].target.ctx, slot));
    }
    SynObject src = cone.empty() ? SynObject{{}, top()} : cone[0].source;
    detail::need_disjoint(src.ctx, p.object.ctx);
    return {src, p.object, conj(parts)};
}

struct EqualizerData {
    SynObject object;       // subobject of the source: [x, ex y.(theta_f and theta_g)]
    SynMorphism inclusion;  // into the source
};

inline EqualizerData equalizer(const SynMorphism& f, const SynMorphism& g) {
    if (!alpha_same(f.source, g.source) || !alpha_same(f.target, g.target)) throw std::invalid_argument("parallel pair expected");
    Formula tg = rename(rename(g.theta, g.source.ctx, f.source.ctx), g.target.ctx, f.target.ctx);
    SynObject e{f.source.ctx, exists(f.target.ctx, conj2(f.theta, tg))};
    return {e, inclusion(e, f.source)};
}

struct ImageData {
    SynObject object;       // [y, ex x. theta]
    SynMorphism inclusion;  // into the target
    SynMorphism cover;      // source -> image
};

inline ImageData image(const SynMorphism& m) {
    SynObject im = subobject_normal_form(m);
    SynMorphism inc = inclusion(im, m.target);
    SynMorphism cov{m.source, inc.source, rename(m.theta, m.target.ctx, inc.source.ctx)};
    return {im, inc, cov};
}

/** join of subobjects over one context */
inline SynObject union_of(const std::vector<SynObject>& subs) {
    if (subs.empty()) throw std::invalid_argument("union of no subobjects needs a context; use [ctx, false]");
    std::vector<Formula> ds;
    for (auto& s : subs) ds.push_back(rename(s.phi, s.ctx, subs[0].ctx));
    return {subs[0].ctx, disj(ds)};
}

/** the subobject [x, ex y.(theta and zeta(y))] of the source */
inline SynObject pullback(const SynMorphism& m, const SynObject& sub) {
    Formula z = rename(sub.phi, sub.ctx, m.target.ctx);
    return {m.source.ctx, exists(m.target.ctx, conj2(m.theta, z))};
}

/** [y, psi and all x.(theta -> eta)], for a subobject eta of the source; needs a first-order fragment */
inline SynObject forall_along(const SynMorphism& m, const SynObject& sub, Fragment fragment) {
    if (fragment != Fragment::FirstOrder && fragment != Fragment::Classical)
        throw FragmentError("universal images need implication and universals, not available in the " + fragment_name(fragment) +
                            " fragment");
    Formula eta = rename(sub.phi, sub.ctx, m.source.ctx);
    return {m.target.ctx, conj2(m.target.phi, forall(m.source.ctx, imp(m.theta, eta)))};
}


// ------------------------------------------------------------ text form

/** (obj CONTEXT FORMULA) */
inline SExpr syn_object_sexpr(const SynObject& o) {
    return SExpr::list({SExpr::sym("obj"), context_sexpr(o.ctx), formula_sexpr(o.phi, o.ctx)});
}

/** (mor SOURCE TARGET THETA), theta read over the source context followed by the target's */
inline SExpr syn_morphism_sexpr(const SynMorphism& m) {
    return SExpr::list({SExpr::sym("mor"), syn_object_sexpr(m.source), syn_object_sexpr(m.target),
                        formula_sexpr(m.theta, detail::cat(m.source.ctx, m.target.ctx))});
}

inline SynObject read_syn_object(const SExpr& e, const Signature& sig) {
    if (e.head() != "obj" || e.size() != 3) throw ParseError("expected (obj CONTEXT FORMULA)", e.pos);
    SynObject o;
    o.ctx = detail::read_context(e[1]);
    o.phi = read_formula(e[2], &sig, o.ctx);
    return o;
}

inline SynMorphism read_syn_morphism(const SExpr& e, const Signature& sig) {
    if (e.head() != "mor" || e.size() != 4) throw ParseError("expected (mor SOURCE TARGET THETA)", e.pos);
    SynMorphism m;
    m.source = read_syn_object(e[1], sig);
    m.target = read_syn_object(e[2], sig);
    try {
        detail::need_disjoint(m.source.ctx, m.target.ctx);
    } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what(), e.pos);
    }
    m.theta = read_formula(e[3], &sig, detail::cat(m.source.ctx, m.target.ctx));
    return m;
}

}  // namespace ifol

#endif
