#ifndef IFOL_PROOFS_HPP
#define IFOL_PROOFS_HPP

#include "kernel.hpp"

namespace ifol::build {

inline Proof leaf(const std::string& rule, Sequent s, RuleData d = {}) { return Proof{rule, std::move(d), std::move(s), {}}; }

inline Proof node(const std::string& rule, Sequent s, std::vector<Proof> ps, RuleData d = {}) {
    return Proof{rule, std::move(d), std::move(s), std::move(ps)};
}

inline Proof id(const Context& ctx, const Formula& f) { return leaf("id", {ctx, f, f}); }
inline Proof axiom(const Sequent& s) { return leaf("axiom", s); }

inline Proof cut(Proof a, Proof b) {
    Sequent s{a.concl.ctx, a.concl.lhs, b.concl.rhs};
    return node("cut", s, {std::move(a), std::move(b)});
}

inline Proof and_elim(const Context& ctx, const Formula& conj, int j) {
    RuleData d;
    d.index = j;
    return leaf("and-elim", {ctx, conj, conj->subs.at(j)}, d);
}

inline Proof and_intro(const Context& ctx, const Formula& lhs, std::vector<Proof> ps) {
    std::vector<Formula> rs;
    for (auto& p : ps) rs.push_back(p.concl.rhs);
    return node("and-intro", {ctx, lhs, conj(rs)}, std::move(ps));
}

inline Proof or_intro(const Context& ctx, const Formula& disjn, int j) {
    RuleData d;
    d.index = j;
    return leaf("or-intro", {ctx, disjn->subs.at(j), disjn}, d);
}

inline Proof or_elim(const Context& ctx, std::vector<Proof> ps, const Formula& rhs) {
    std::vector<Formula> ls;
    for (auto& p : ps) ls.push_back(p.concl.lhs);
    return node("or-elim", {ctx, disj(ls), rhs}, std::move(ps));
}

inline Proof top_intro(const Context& ctx, const Formula& lhs) { return and_intro(ctx, lhs, {}); }

inline Proof bot_elim(const Context& ctx, const Formula& rhs) { return or_elim(ctx, {}, rhs); }

/** A and B |- B and A */
inline Proof swap(const Context& ctx, const Formula& a, const Formula& b) {
    Formula l = conj2(a, b);
    return and_intro(ctx, l, {and_elim(ctx, l, 1), and_elim(ctx, l, 0)});
}

/** extend the context (subst with the identity) */
inline Proof weaken(Proof p, const Context& ctx) {
    if (p.concl.ctx == ctx) return p;
    Sequent s{ctx, p.concl.lhs, p.concl.rhs};
    return node("subst", s, {std::move(p)});
}

inline Proof substitute(Proof p, const Context& ctx, const Subst& sub) {
    Sequent s{ctx, ifol::substitute(p.concl.lhs, sub), ifol::substitute(p.concl.rhs, sub)};
    RuleData d;
    for (auto& [k, v] : sub) d.subst.push_back({k, v});
    return node("subst", s, {std::move(p)}, d);
}

/** does `r` occur in the conjunction tree of `l`? */
inline bool conjunct_of(const Formula& l, const Formula& r) {
    if (same(l, r)) return true;
    if (l->kind != FormulaNode::And) return false;
    return std::any_of(l->subs.begin(), l->subs.end(), [&](const Formula& s) { return conjunct_of(s, r); });
}

/**
 * \brief L |- R where every leaf of R's conjunction tree sits in L's
 * conjunction tree. Returns nullopt otherwise.
 */
inline std::optional<Proof> by_conjuncts(const Context& ctx, const Formula& l, const Formula& r) {
    if (same(l, r)) return id(ctx, l);
    if (l->kind == FormulaNode::And)
        for (size_t j = 0; j < l->subs.size(); ++j)
            if (conjunct_of(l->subs[j], r)) {
                auto rest = by_conjuncts(ctx, l->subs[j], r);
                if (!rest) return std::nullopt;
                Proof e = and_elim(ctx, l, static_cast<int>(j));
                if (same(l->subs[j], r)) return e;
                return cut(e, *rest);
            }
    if (r->kind == FormulaNode::And) {
        std::vector<Proof> ps;
        for (auto& s : r->subs) {
            auto p = by_conjuncts(ctx, l, s);
            if (!p) return std::nullopt;
            ps.push_back(*p);
        }
        return and_intro(ctx, l, ps);
    }
    return std::nullopt;
}

inline Proof conjuncts(const Context& ctx, const Formula& l, const Formula& r) {
    auto p = by_conjuncts(ctx, l, r);
    if (!p) throw std::logic_error("not a conjunct rearrangement: " + print(l) + " |- " + print(r));
    return *p;
}

/** open(Q, y) |-_{ctx,y} Q for an existential Q */
inline Proof exists_right(const Context& ctx, const Formula& q, const Context& vars) {
    RuleData d;
    d.vars = vars;
    Context big = ctx;
    big.insert(big.end(), vars.begin(), vars.end());
    Sequent s{big, open_body(q->subs[0], vars), q};
    return node("exists-up", s, {id(ctx, q)}, d);
}

/** from open(Q,y) |-_{ctx,y} psi derive Q |-_ctx psi */
inline Proof exists_left(const Context& ctx, const Formula& q, const Context& vars, Proof p) {
    RuleData d;
    d.vars = vars;
    Sequent s{ctx, q, p.concl.rhs};
    return node("exists-down", s, {std::move(p)}, d);
}

inline Proof forall_right(const Context& ctx, const Formula& q, const Context& vars, Proof p) {
    RuleData d;
    d.vars = vars;
    Sequent s{ctx, p.concl.lhs, q};
    return node("forall-down", s, {std::move(p)}, d);
}

/** Q |-_{ctx,y} open(Q, y) for a universal Q */
inline Proof forall_left(const Context& ctx, const Formula& q, const Context& vars) {
    RuleData d;
    d.vars = vars;
    Context big = ctx;
    big.insert(big.end(), vars.begin(), vars.end());
    Sequent s{big, q, open_body(q->subs[0], vars)};
    return node("forall-up", s, {id(ctx, q)}, d);
}

inline Proof imp_down(Proof p) {
    auto& L = p.concl.lhs;
    Sequent s{p.concl.ctx, L->subs[0], imp(L->subs[1], p.concl.rhs)};
    return node("imp-down", s, {std::move(p)});
}

inline Proof imp_up(Proof p) {
    auto& R = p.concl.rhs;
    Sequent s{p.concl.ctx, conj2(p.concl.lhs, R->subs[0]), R->subs[1]};
    return node("imp-up", s, {std::move(p)});
}

/** from A |-_{ctx,y} B derive ex y.A |-_ctx ex y.B */
inline Proof exists_mono(const Context& ctx, const Context& vars, Proof p) {
    if (vars.empty()) return p;
    Formula qa = exists(vars, p.concl.lhs), qb = exists(vars, p.concl.rhs);
    Proof up = cut(std::move(p), exists_right(ctx, qb, vars));
    return exists_left(ctx, qa, vars, std::move(up));
}

/** phi and ex y.psi |- ex y.(phi and psi) */
inline Proof frobenius(const Context& ctx, const Formula& phi, const Formula& q) {
    Formula r = mk_formula(FormulaNode{FormulaNode::Exists, "", {}, {conj2(phi, q->subs[0])}, q->block});
    return leaf("frobenius", {ctx, conj2(phi, q), r});
}

/** phi and or(psi) |- or(phi and psi_i) */
inline Proof small_dist(const Context& ctx, const Formula& phi, const Formula& d) {
    std::vector<Formula> ds;
    for (auto& s : d->subs) ds.push_back(conj2(phi, s));
    return leaf("small-dist", {ctx, conj2(phi, d), disj(ds)});
}

/** from A_i |- B_i derive or(A) |- or(B); singleton lists collapse */
inline Proof or_mono(const Context& ctx, std::vector<Proof> ps) {
    if (ps.size() == 1) return ps[0];
    std::vector<Formula> rs;
    for (auto& p : ps) rs.push_back(p.concl.rhs);
    Formula R = disj(rs);
    std::vector<Proof> arms;
    for (size_t i = 0; i < ps.size(); ++i) arms.push_back(cut(ps[i], or_intro(ctx, R, static_cast<int>(i))));
    return or_elim(ctx, arms, R);
}

/**
 * \brief A and or_g(ex x_g. phi_g) |- or_g(ex x_g.(A and phi_g)), collapsing
 * singleton disjunctions and empty blocks. `A` must not mention any x_g.
 */
inline Proof distribute_into(const Context& ctx, const Formula& a, const std::vector<std::pair<Context, Formula>>& kids) {
    std::vector<Formula> qs;
    for (auto& [x, phi] : kids) qs.push_back(exists(x, phi));
    auto one = [&](size_t g) -> Proof {
        auto& [x, phi] = kids[g];
        if (x.empty()) return id(ctx, conj2(a, phi));
        return frobenius(ctx, a, qs[g]);
    };
    if (kids.size() == 1) return one(0);
    Proof sd = small_dist(ctx, a, disj(qs));
    if (kids.empty()) return sd;
    std::vector<Proof> arms;
    for (size_t g = 0; g < kids.size(); ++g) arms.push_back(one(g));
    return cut(sd, or_mono(ctx, arms));
}

/** small distributivity derived with implication only (no primitive leaf) */
inline Proof derive_small_dist_fo(const Context& ctx, const Formula& phi, const Formula& d) {
    std::vector<Formula> rs;
    for (auto& s : d->subs) rs.push_back(conj2(phi, s));
    Formula R = disj(rs);
    std::vector<Proof> arms;
    for (size_t i = 0; i < d->subs.size(); ++i) {
        Proof toR = cut(swap(ctx, d->subs[i], phi), or_intro(ctx, R, static_cast<int>(i)));
        arms.push_back(imp_down(std::move(toR)));
    }
    Proof elim = or_elim(ctx, arms, imp(phi, R));
    return cut(swap(ctx, phi, d), imp_up(std::move(elim)));
}

/** Frobenius derived with implication only */
inline Proof derive_frobenius_fo(const Context& ctx, const Formula& phi, const Formula& q) {
    std::set<std::string> avoid = context_names(ctx);
    for (auto& n : free_names(q)) avoid.insert(n);
    for (auto& n : free_names(phi)) avoid.insert(n);
    Context ys = opening_names(q->block, avoid);
    Context big = ctx;
    big.insert(big.end(), ys.begin(), ys.end());
    Formula body = open_body(q->subs[0], ys);
    Formula R = mk_formula(FormulaNode{FormulaNode::Exists, "", {}, {conj2(phi, q->subs[0])}, q->block});
    Proof intro = exists_right(ctx, R, ys);  // phi and body |- R
    Proof step = imp_down(cut(swap(big, body, phi), std::move(intro)));
    Proof ex = exists_left(ctx, q, ys, std::move(step));
    return cut(swap(ctx, phi, q), imp_up(std::move(ex)));
}

}  // namespace ifol::build

#endif
