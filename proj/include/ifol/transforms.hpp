#ifndef IFOL_TRANSFORMS_HPP
#define IFOL_TRANSFORMS_HPP

#include <bit>
#include <functional>

#include "forcing.hpp"
#include "lattice.hpp"
#include "proofs.hpp"
#include "setmodels.hpp"

namespace ifol {

// ------------------------------------------------------------ deduction theorem

namespace detail {

struct Deducer {
    Formula sigma;
    Sequent extra;  // true |- sigma, empty context

    Formula with(const Formula& a) const { return conj2(a, sigma); }

    bool uses(const Proof& p) const {
        if (p.rule == "axiom" && same(p.concl, extra)) return true;
        return std::any_of(p.premises.begin(), p.premises.end(), [&](const Proof& q) { return uses(q); });
    }

    // sigma and phi_f |- sigma and phi_g style premises for tree rules
    Proof tree_premise(const TreeAssignment& a, const Node& f, const Proof& prem) const {
        using namespace build;
        Context y = a.context_of(f);
        Formula lf = a.label(f);
        Formula sl = conj2(sigma, lf);
        Proof pair = and_intro(y, sl, {and_elim(y, sl, 0), cut(swap(y, sigma, lf), go(prem))});
        std::vector<std::pair<Context, Formula>> kids;
        for (auto& g : a.children(f)) kids.push_back({a.block(g), a.label(g)});
        return cut(pair, distribute_into(y, sigma, kids));
    }

    TreeAssignment guarded(TreeAssignment a) const {
        for (auto& [n, l] : a.labels) l = conj2(sigma, l);
        return a;
    }

    // sigma and phi_0 |- or_f ex.(conj of guarded path) read back to the original disjuncts
    Proof unguard(const TreeAssignment& a, const std::vector<Node>& disjuncts) const {
        using namespace build;
        std::vector<Proof> ps;
        for (auto& f : disjuncts) {
            Context vars;
            std::vector<Formula> g, o;
            for (size_t i = 0; i <= f.size(); ++i) {
                Node p(f.begin(), f.begin() + i);
                if (i) {
                    Context b = a.block(p);
                    vars.insert(vars.end(), b.begin(), b.end());
                }
                o.push_back(a.label(p));
                g.push_back(conj2(sigma, a.label(p)));
            }
            Context big = a.context_of(f);
            ps.push_back(exists_mono(a.root_context, vars, conjuncts(big, conj_c(g), conj_c(o))));
        }
        return or_mono(a.root_context, ps);
    }

    Proof tree_rule(const Proof& p) const {
        using namespace build;
        const TreeAssignment& a = *p.data.assignment;
        TreeAssignment a2 = guarded(a);
        auto internal = a.internal_nodes();
        std::vector<Proof> prems;
        for (size_t i = 0; i < internal.size(); ++i) prems.push_back(tree_premise(a, internal[i], p.premises.at(i)));
        RuleData d = p.data;
        d.assignment = a2;
        RuleInstance inst = p.rule == "tt-bar" ? tt_bar_instance(a2, *p.data.bar) : tt_rule_instance(a2);
        std::vector<Node> order = p.rule == "tt-bar" ? bar_order(a, *p.data.bar) : a.leaves();
        Proof rule = node(p.rule, inst.conclusion, prems, d);
        Formula phi0 = a.label({});
        return cut(swap(a.root_context, phi0, sigma), cut(rule, unguard(a, order)));
    }

    Proof chain_rule(const Proof& p) const {
        using namespace build;
        const DcChain& c = *p.data.chain;
        TreeAssignment a = c.as_tree();
        std::vector<Proof> prems;
        Node f;
        for (size_t i = 0; i + 1 < c.formulas.size(); ++i) {
            prems.push_back(tree_premise(a, f, p.premises.at(i)));
            f.push_back(0);
        }
        DcChain c2 = c;
        for (auto& x : c2.formulas) x = conj2(sigma, x);
        RuleData d = p.data;
        d.chain = c2;
        Proof rule = node("dc", dc_instance(c2).conclusion, prems, d);
        Context all, big = c.root_context;
        for (auto& b : c.blocks) all.insert(all.end(), b.begin(), b.end());
        big.insert(big.end(), all.begin(), all.end());
        Proof back = exists_mono(c.root_context, all, and_elim(big, c2.formulas.back(), 1));
        return cut(swap(c.root_context, c.formulas.front(), sigma), cut(rule, back));
    }

    /** proof of (lhs and sigma) |- rhs from a proof of lhs |- rhs in T + sigma */
    Proof go(const Proof& p) const {
        using namespace build;
        const Sequent& c = p.concl;
        const Context& x = c.ctx;
        Formula L = with(c.lhs);
        if (p.rule == "axiom" && same(c, extra)) return and_elim(x, L, 1);
        if (!uses(p)) return cut(and_elim(x, L, 0), p);
        const std::string& r = p.rule;
        if (r == "cut") {
            Proof a = go(p.premises[0]), b = go(p.premises[1]);
            Proof mid = and_intro(x, L, {a, and_elim(x, L, 1)});
            return cut(mid, b);
        }
        if (r == "subst") return node("subst", {x, L, c.rhs}, {go(p.premises[0])}, p.data);
        if (r == "and-intro") {
            std::vector<Proof> ps;
            for (auto& q : p.premises) ps.push_back(go(q));
            return node("and-intro", {x, L, c.rhs}, ps);
        }
        if (r == "or-elim") {
            std::vector<Proof> arms;
            for (size_t i = 0; i < p.premises.size(); ++i)
                arms.push_back(cut(swap(x, sigma, c.lhs->subs[i]), go(p.premises[i])));
            Proof spread = small_dist(x, sigma, c.lhs);
            return cut(swap(x, c.lhs, sigma), cut(spread, or_elim(x, arms, c.rhs)));
        }
        if (r == "imp-down") {
            Formula C = c.rhs->subs[0];
            Proof a = go(p.premises[0]);  // (A and C) and sigma |- D
            Proof re = cut(conjuncts(x, conj2(L, C), a.concl.lhs), a);
            return imp_down(re);
        }
        if (r == "imp-up") {
            Proof a = go(p.premises[0]);  // A and sigma |- C -> D
            Proof up = imp_up(a);
            return cut(conjuncts(x, L, up.concl.lhs), up);
        }
        if (r == "exists-down") {
            const Formula& Q = c.lhs;
            const Context& vars = p.data.vars;
            Context big = p.premises[0].concl.ctx;
            Formula open = p.premises[0].concl.lhs;
            Proof a = go(p.premises[0]);
            Proof frob = frobenius(x, sigma, Q);
            Proof arm = exists_left(x, frob.concl.rhs, vars, cut(swap(big, sigma, open), a));
            return cut(swap(x, Q, sigma), cut(frob, arm));
        }
        if (r == "exists-up") {
            const Sequent& lo = p.premises[0].concl;
            Proof a = go(p.premises[0]);  // Q and sigma |-_lo B
            Proof into = and_intro(x, L, {cut(and_elim(x, L, 0), exists_right(lo.ctx, lo.lhs, p.data.vars)), and_elim(x, L, 1)});
            return cut(into, weaken(a, x));
        }
        if (r == "forall-down") return forall_right(x, c.rhs, p.data.vars, go(p.premises[0]));
        if (r == "forall-up") return node("forall-up", {x, L, c.rhs}, {go(p.premises[0])}, p.data);
        if (r == "tt" || r == "tt-bar" || r == "dist") return tree_rule(p);
        if (r == "dc") return chain_rule(p);
        if (r == "choice") {
            RuleData d = p.data;
            d.choice->phi = L;
            return node("choice", {x, L, c.rhs}, {go(p.premises[0])}, d);
        }
        throw std::logic_error("deduction: rule " + r + " has no premises using the hypothesis");
    }
};

}  // namespace detail

/**
 * \brief Deduction theorem: from a proof of phi |-_x psi in T + {true |- sigma}
 * build a proof of phi and sigma |-_x psi in T, by recursion on the proof.
 * Subproofs that never use the extra axiom are reused as they are.
 */
inline Proof deduction(const Theory& T, const Formula& sigma, const Proof& p) {
    if (!free_vars(sigma).empty() || !is_locally_closed(sigma)) throw std::invalid_argument("deduction needs a sentence");
    Theory plus = T;
    Sequent extra{{}, top(), sigma};
    plus.axioms.push_back(extra);
    if (auto r = check_proof(plus, p); !r.ok) throw std::invalid_argument("input proof rejected: " + r.reason);
    detail::Deducer d{sigma, extra};
    return d.go(p);
}

// ------------------------------------------------------------ schemata

struct SchemaInstance {
    std::string name;
    int gamma = 1;
    std::vector<std::vector<Formula>> matrix;  // distributivity
    std::vector<Formula> chain;                // dependent choice
    std::vector<Context> blocks;
    std::optional<TreeAssignment> tree;
    Sequent rendered;
};

inline const std::vector<std::string>& schema_names() {
    static const std::vector<std::string> n = {"classical-distributivity", "classical-DC", "tt-axiom",
                                               "intuitionistic-distributivity-axiom", "intuitionistic-DC-axiom"};
    return n;
}

namespace detail {

inline Context free_context(const std::vector<Formula>& fs, const std::set<std::string>& minus = {}) {
    Context out;
    for (auto& f : fs)
        for (auto& d : free_vars(f))
            if (!minus.count(d.name)) out = context_union(out, {d});
    return out;
}

inline std::vector<Node> functions(int gamma, int length) { return level_nodes(gamma, length); }

}  // namespace detail

/** and_i or_j psi_ij |- or_{f in gamma^gamma} and_i psi_{i f(i)}, functions in lexicographic order */
inline SchemaInstance classical_distributivity(const std::vector<std::vector<Formula>>& psi) {
    int g = static_cast<int>(psi.size());
    if (g < 1) throw ProvisoError("gamma must be at least 1");
    std::vector<Formula> all, rows;
    for (auto& row : psi) {
        if (static_cast<int>(row.size()) != g) throw ProvisoError("matrix must be gamma x gamma");
        rows.push_back(disj_c(row));
        all.insert(all.end(), row.begin(), row.end());
    }
    std::vector<Formula> ds;
    for (auto& f : detail::functions(g, g)) {
        std::vector<Formula> cs;
        for (int i = 0; i < g; ++i) cs.push_back(psi[i][f[i]]);
        ds.push_back(conj_c(cs));
    }
    SchemaInstance s;
    s.name = "classical-distributivity";
    s.gamma = g;
    s.matrix = psi;
    s.rendered = Sequent{detail::free_context(all), conj_c(rows), disj_c(ds)};
    return s;
}

/**
 * \brief and_a (all x_b, b<a)(ex x_a. psi_a) |- ex x_0..x_{g-1}. and_a psi_a.
 * Blocks must be pairwise disjoint and x_a must not occur free in psi_b for b < a.
 */
inline SchemaInstance classical_dc(const std::vector<Formula>& psi, const std::vector<Context>& blocks) {
    int g = static_cast<int>(psi.size());
    if (g < 1) throw ProvisoError("gamma must be at least 1");
    if (blocks.size() != psi.size()) throw ProvisoError("one block per formula");
    std::set<std::string> seen;
    for (int a = 0; a < g; ++a)
        for (auto& d : blocks[a]) {
            if (!seen.insert(d.name).second) throw ProvisoError("blocks are not pairwise disjoint: " + d.name);
            for (int b = 0; b < a; ++b)
                if (free_names(psi[b]).count(d.name))
                    throw ProvisoError("variable " + d.name + " of block " + std::to_string(a) + " is free in formula " + std::to_string(b));
        }
    std::vector<Formula> lhs;
    Context before, all;
    for (int a = 0; a < g; ++a) {
        lhs.push_back(forall(before, exists(blocks[a], psi[a])));
        before.insert(before.end(), blocks[a].begin(), blocks[a].end());
    }
    all = before;
    SchemaInstance s;
    s.name = "classical-DC";
    s.gamma = g;
    s.chain = psi;
    s.blocks = blocks;
    s.rendered = Sequent{detail::free_context(psi, seen), conj_c(lhs), exists(all, conj_c(psi))};
    return s;
}

/**
 * \brief The single-sequent axiom replacing the TT rule:
 * and_f all(y_f - y_0)(phi_f -> or_g ex x_g. phi_g) |- phi_0 -> or_leaves ex(blocks). and(path).
 * There are no limit levels at finite height, so the limit conjuncts are absent.
 */
inline SchemaInstance tt_axiom(const TreeAssignment& a, bool distributivity = false) {
    RuleInstance r = distributivity ? distributivity_instance(a) : tt_rule_instance(a);
    std::vector<Formula> cs;
    auto internal = a.internal_nodes();
    for (size_t i = 0; i < internal.size(); ++i) {
        const Node& f = internal[i];
        Context y = a.context_of(f);
        Context rest(y.begin() + a.root_context.size(), y.end());
        cs.push_back(forall(rest, imp(r.premises[i].lhs, r.premises[i].rhs)));
    }
    SchemaInstance s;
    s.name = distributivity ? "intuitionistic-distributivity-axiom" : "tt-axiom";
    s.gamma = a.gamma;
    s.tree = a;
    s.rendered = Sequent{a.root_context, conj_c(cs), imp(r.conclusion.lhs, r.conclusion.rhs)};
    return s;
}

/** and_b all(y_b - y_0)(phi_b -> ex x_{b+1}. phi_{b+1}) |- phi_0 -> ex(all blocks). phi_h */
inline SchemaInstance intuitionistic_dc_axiom(const DcChain& c) {
    RuleInstance r = dc_instance(c);
    std::vector<Formula> cs;
    Context rest;
    for (size_t i = 0; i < r.premises.size(); ++i) {
        cs.push_back(forall(rest, imp(r.premises[i].lhs, r.premises[i].rhs)));
        rest.insert(rest.end(), c.blocks[i].begin(), c.blocks[i].end());
    }
    SchemaInstance s;
    s.name = "intuitionistic-DC-axiom";
    s.gamma = static_cast<int>(c.formulas.size()) - 1;
    s.chain = c.formulas;
    s.blocks = c.blocks;
    s.rendered = Sequent{c.root_context, conj_c(cs), imp(r.conclusion.lhs, r.conclusion.rhs)};
    return s;
}

/**
 * \brief Schema by name from a flat formula list: gamma*gamma entries (row
 * major) for classical distributivity, gamma formulas with blocks for classical
 * dependent choice.
 */
inline SchemaInstance classical_schema(const std::string& name, int gamma, const std::vector<Formula>& entries,
                                       const std::vector<Context>& blocks = {}) {
    if (gamma < 1) throw ProvisoError("gamma must be at least 1");
    if (name == "classical-distributivity") {
        if (static_cast<int>(entries.size()) != gamma * gamma) throw ProvisoError("distributivity needs gamma*gamma formulas");
        std::vector<std::vector<Formula>> m(gamma);
        for (int i = 0; i < gamma; ++i) m[i].assign(entries.begin() + i * gamma, entries.begin() + (i + 1) * gamma);
        return classical_distributivity(m);
    }
    if (name == "classical-DC") {
        if (static_cast<int>(entries.size()) != gamma) throw ProvisoError("dependent choice needs gamma formulas");
        std::vector<Context> bs = blocks;
        bs.resize(gamma);
        return classical_dc(entries, bs);
    }
    throw std::invalid_argument("unknown schema " + name);
}

// ------------------------------------------------------------ equivalence lemma

/**
 * \brief The tree gamma^{<=gamma} with true at the root and psi_{b j} on the
 * j-th child of every node at level b. Blocks are empty.
 */
inline TreeAssignment equivl_assignment(const std::vector<std::vector<Formula>>& psi) {
    int g = static_cast<int>(psi.size());
    if (g < 1) throw ProvisoError("gamma must be at least 1");
    std::vector<Formula> all;
    for (auto& row : psi) {
        if (static_cast<int>(row.size()) != g) throw ProvisoError("matrix must be gamma x gamma");
        all.insert(all.end(), row.begin(), row.end());
    }
    TreeAssignment a;
    a.gamma = g;
    a.height = g;
    a.root_context = detail::free_context(all);
    a.labels[{}] = top();
    for (int b = 1; b <= g; ++b)
        for (auto& f : level_nodes(g, b)) a.labels[f] = psi[b - 1][f.back()];
    return a;
}

/** \brief The assignment with every label guarded by `guard`, and proofs of its TT premises. */
struct GuardedTree {
    TreeAssignment tree;
    std::vector<Proof> premises;  // aligned with tree.internal_nodes()
};

/**
 * \brief From the hypothesis H = and_i or_j psi_ij, every node's premise
 * H and phi_f |- or_j (H and psi_{b j}) is provable. These feed the
 * distributivity rule (or derive_tt_from_cut).
 */
inline GuardedTree equivl_premises(const std::vector<std::vector<Formula>>& psi) {
    using namespace build;
    TreeAssignment a = equivl_assignment(psi);
    Formula H = classical_distributivity(psi).rendered.lhs;
    GuardedTree out{a, {}};
    for (auto& [n, l] : out.tree.labels) l = conj2(H, l);
    const Context& x = a.root_context;
    for (auto& f : a.internal_nodes()) {
        int b = static_cast<int>(f.size());
        Formula lf = out.tree.label(f);
        Proof row = psi.size() == 1 ? and_elim(x, lf, 0) : cut(and_elim(x, lf, 0), and_elim(x, H, b));
        Proof pair = and_intro(x, lf, {and_elim(x, lf, 0), row});
        std::vector<std::pair<Context, Formula>> kids;
        for (auto& g : a.children(f)) kids.push_back({{}, a.label(g)});
        out.premises.push_back(cut(pair, distribute_into(x, H, kids)));
    }
    return out;
}

namespace detail {

// H |- H and true, and the read-back from guarded paths to the classical disjuncts
inline Proof equivl_wrap(const std::vector<std::vector<Formula>>& psi, const GuardedTree& gt, Proof core) {
    using namespace build;
    const TreeAssignment& a = gt.tree;
    const Context& x = a.root_context;
    SchemaInstance target = classical_distributivity(psi);
    Formula H = target.rendered.lhs;
    Proof start = and_intro(x, H, {id(x, H), top_intro(x, H)});
    std::vector<Proof> back;
    int g = static_cast<int>(psi.size());
    for (auto& f : a.leaves()) {
        std::vector<Formula> path, want;
        for (size_t i = 0; i <= f.size(); ++i) path.push_back(a.label(Node(f.begin(), f.begin() + i)));
        for (int i = 0; i < g; ++i) want.push_back(psi[i][f[i]]);
        back.push_back(conjuncts(x, conj_c(path), conj_c(want)));
    }
    return cut(start, cut(std::move(core), or_mono(x, back)));
}

}  // namespace detail

/**
 * \brief Forward direction of the distributivity equivalence: a proof of the
 * classical distributivity instance built from the distributivity rule on the
 * guarded equivl assignment, plus cuts.
 */
inline Proof classical_distributivity_proof(const std::vector<std::vector<Formula>>& psi) {
    GuardedTree gt = equivl_premises(psi);
    RuleData d;
    d.assignment = gt.tree;
    Proof rule = build::node("dist", distributivity_instance(gt.tree).conclusion, gt.premises, d);
    return detail::equivl_wrap(psi, gt, std::move(rule));
}

// ------------------------------------------------------------ TT from cut

/**
 * \brief A proof of the TT conclusion over bar B that uses no tree rule.
 * premise_proofs are aligned with a.internal_nodes(); only nodes strictly
 * above the bar are consulted. The recursion carries the conjunction of the
 * labels along the path and splits on each premise until it reaches the bar.
 */
inline Proof derive_tt_from_cut(const TreeAssignment& a, const Bar& bar, const std::vector<Proof>& premise_proofs) {
    using namespace build;
    RuleInstance inst = tt_bar_instance(a, bar);
    auto internal = a.internal_nodes();
    if (premise_proofs.size() != internal.size()) throw ProvisoError("one premise proof per internal node expected");
    std::map<Node, size_t> at;
    for (size_t i = 0; i < internal.size(); ++i) at[internal[i]] = i;
    std::vector<Node> order = bar_order(a, bar);
    const Formula C = inst.conclusion.rhs;
    auto path_conj = [&](const Node& f) {
        std::vector<Formula> parts;
        for (size_t i = 0; i <= f.size(); ++i) parts.push_back(a.label(Node(f.begin(), f.begin() + i)));
        return conj_c(parts);
    };
    std::function<Proof(const Node&)> rec = [&](const Node& f) -> Proof {
        Context y = a.context_of(f);
        Formula G = path_conj(f);
        auto hit = std::find(order.begin(), order.end(), f);
        if (hit != order.end()) {
            Context vars(y.begin() + a.root_context.size(), y.end());
            Formula q = path_formula(a, f);
            Proof intro = vars.empty() ? id(y, G) : exists_right(a.root_context, q, vars);
            if (order.size() == 1) return intro;
            return cut(intro, or_intro(y, C, static_cast<int>(hit - order.begin())));
        }
        if (static_cast<int>(f.size()) >= a.height) throw ProvisoError("node " + node_string(f) + " lies below the bar");
        const Proof& pf = premise_proofs[at.at(f)];
        if (!same(pf.concl, inst.premises[at.at(f)]))
            throw ProvisoError("premise proof at node " + node_string(f) + " proves the wrong sequent");
        Formula lf = a.label(f);
        Proof toR = f.empty() ? pf : cut(conjuncts(y, G, lf), pf);
        Proof pair = and_intro(y, G, {id(y, G), toR});
        std::vector<std::pair<Context, Formula>> kids;
        std::vector<Proof> arms;
        for (auto& g : a.children(f)) {
            Context xg = a.block(g);
            kids.push_back({xg, a.label(g)});
            Proof inner = cut(conjuncts(a.context_of(g), conj2(G, a.label(g)), path_conj(g)), rec(g));
            arms.push_back(xg.empty() ? inner : exists_left(y, exists(xg, conj2(G, a.label(g))), xg, inner));
        }
        Proof tail = arms.size() == 1 ? arms[0] : or_elim(y, arms, C);
        return cut(pair, cut(distribute_into(y, G, kids), tail));
    };
    return rec({});
}

/** premises aligned with internal_nodes: each label's proof from the given map */
inline std::vector<Proof> premises_in_order(const TreeAssignment& a, const std::map<Node, Proof>& by_node) {
    std::vector<Proof> out;
    for (auto& f : a.internal_nodes()) out.push_back(by_node.at(f));
    return out;
}

// ------------------------------------------------------------ Morleyization

/** \brief A named formula: the new relation symbol(s) and their argument variables. */
struct MorleySymbol {
    Formula phi;
    Context args;       // free variables of phi, first occurrence order
    std::string pos;    // P_phi or C_phi
    std::string neg;    // D_phi (classical only)
};

struct Morleyization {
    Theory theory;
    std::vector<MorleySymbol> symbols;

    const MorleySymbol* find(const Formula& f) const {
        for (auto& s : symbols)
            if (same(s.phi, f)) return &s;
        return nullptr;
    }
    /** the atom standing for phi (or not phi), applied to phi's own free variables */
    Formula pos(const Formula& f) const { return atom_for(f, false); }
    Formula neg(const Formula& f) const { return atom_for(f, true); }

    /** table of symbols and the formulas they name */
    std::string table() const {
        std::string out;
        for (auto& s : symbols) {
            out += s.pos;
            if (!s.neg.empty()) out += " " + s.neg;
            out += " := " + to_string(formula_sexpr(s.phi)) + "\n";
        }
        return out;
    }

private:
    Formula atom_for(const Formula& f, bool n) const {
        const MorleySymbol* s = find(f);
        if (!s) throw std::invalid_argument("formula has no Morleyization symbol: " + print(f));
        std::vector<Term> ts;
        for (auto& d : s->args) ts.push_back(var(d));
        return rel(n ? s->neg : s->pos, ts);
    }
};

/** decides T |- s; used for the provability family of the coherent Morleyization */
using EntailmentOracle = std::function<bool(const Sequent&)>;

/**
 * \brief Entailment in all two-valued models with carriers up to `bound`.
 * Exact for propositional theories, and complete for refutations in general.
 */
inline EntailmentOracle two_valued_oracle(const Theory& T, int bound = 2) {
    EnumerateOptions o;
    o.bound = bound;
    o.up_to_iso = false;
    auto models = std::make_shared<std::vector<FinStructure>>(enumerate_models(T, o));
    return [models](const Sequent& s) {
        return std::all_of(models->begin(), models->end(), [&](const FinStructure& M) { return satisfies(M, s); });
    };
}

/** \brief Entailment by bounded Kripke countermodel search: provable when the search exhausts. */
inline EntailmentOracle kripke_oracle(const Theory& T, KripkeBounds b = {}) {
    return [T, b](const Sequent& s) { return !countermodel_search(T, s, b).found; };
}

namespace detail {

inline Morleyization name_formulas(const Theory& T, const std::vector<Formula>& S, bool classical) {
    Morleyization m;
    m.theory.sig = T.sig;
    std::set<std::string> used;
    for (auto& r : T.sig.rels) used.insert(r.name);
    for (auto& f : T.sig.funcs) used.insert(f.name);
    int k = 0;
    for (auto& phi : S) {
        MorleySymbol s;
        s.phi = phi;
        s.args = free_vars(phi);
        std::vector<std::string> sorts;
        for (auto& d : s.args) sorts.push_back(d.sort);
        s.pos = fresh_name((classical ? "C_" : "P_") + std::to_string(k), used);
        used.insert(s.pos);
        m.theory.sig.add_rel({s.pos, sorts});
        if (classical) {
            s.neg = fresh_name("D_" + std::to_string(k), used);
            used.insert(s.neg);
            m.theory.sig.add_rel({s.neg, sorts});
        }
        m.symbols.push_back(s);
        ++k;
    }
    return m;
}

inline void both_ways(std::vector<Sequent>& out, const Context& x, const Formula& a, const Formula& b) {
    out.push_back({x, a, b});
    out.push_back({x, b, a});
}

inline std::optional<Context> joint_context(const Formula& a, const Formula& b) {
    Context x = free_vars(a);
    for (auto& d : free_vars(b)) {
        auto it = std::find_if(x.begin(), x.end(), [&](const VarDecl& e) { return e.name == d.name; });
        if (it == x.end()) x.push_back(d);
        else if (it->sort != d.sort) return std::nullopt;
    }
    return x;
}

}  // namespace detail

/**
 * \brief Coherent (or regular) Morleyization over the subformula set of T.
 * Families: atoms (i), provable entailments between named formulas (ii),
 * conjunction (iii), existential (iv) and, for the coherent fragment,
 * disjunction (v). Symbols are P_k in subformula order; the symbol table is
 * keyed by alpha-equivalence.
 */
inline Morleyization coherent_morleyize(const Theory& T, Fragment fragment = Fragment::Coherent, EntailmentOracle oracle = {},
                                        const std::vector<Formula>& extra = {}) {
    if (fragment != Fragment::Regular && fragment != Fragment::Coherent)
        throw std::invalid_argument("coherent Morleyization targets the regular or coherent fragment");
    if (!oracle) {
        bool positive = T.fragment == Fragment::Regular || T.fragment == Fragment::Coherent || T.fragment == Fragment::Geometric;
        oracle = positive ? two_valued_oracle(T) : kripke_oracle(T);
    }
    std::vector<Formula> S = subformula_set(T, extra);
    Morleyization m = detail::name_formulas(T, S, false);
    m.theory.fragment = fragment;
    auto& ax = m.theory.axioms;
    using K = FormulaNode;
    for (auto& s : m.symbols)
        if (is_atomic(s.phi)) detail::both_ways(ax, s.args, m.pos(s.phi), s.phi);
    for (auto& a : S)
        for (auto& b : S) {
            if (same(a, b)) continue;
            auto x = detail::joint_context(a, b);
            if (!x) continue;
            if (oracle(Sequent{*x, a, b})) ax.push_back({*x, m.pos(a), m.pos(b)});
        }
    for (auto& s : m.symbols) {
        const Formula& f = s.phi;
        if (f->kind == K::And) {
            std::vector<Formula> cs;
            for (auto& c : f->subs) cs.push_back(m.pos(c));
            detail::both_ways(ax, s.args, m.pos(f), conj(cs));
        } else if (f->kind == K::Or && fragment == Fragment::Coherent) {
            std::vector<Formula> ds;
            for (auto& c : f->subs) ds.push_back(m.pos(c));
            detail::both_ways(ax, s.args, m.pos(f), disj(ds));
        } else if (f->kind == K::Exists) {
            auto [ys, body] = open_quantifier(f);
            detail::both_ways(ax, s.args, m.pos(f), exists(ys, m.pos(body)));
        }
    }
    return m;
}

/**
 * \brief Classical Morleyization over the subformulas of T and the goal:
 * symbols C_k for phi and D_k for its negation, with the nine families
 * (i) C and D |- false, (ii) true |- C or D, (iii) atoms, (iv) axioms of T,
 * (v) conjunction, (vi) disjunction, (vii) implication, (viii) existential,
 * (ix) universal through D.
 */
inline Morleyization classical_morleyize(const Theory& T, const Sequent& goal) {
    std::vector<Formula> S = subformula_set(T, {goal.lhs, goal.rhs});
    Morleyization m = detail::name_formulas(T, S, true);
    m.theory.fragment = Fragment::Coherent;
    auto& ax = m.theory.axioms;
    using K = FormulaNode;
    for (auto& s : m.symbols) ax.push_back({s.args, conj2(m.pos(s.phi), m.neg(s.phi)), bot()});
    for (auto& s : m.symbols) ax.push_back({s.args, top(), disj2(m.pos(s.phi), m.neg(s.phi))});
    for (auto& s : m.symbols)
        if (is_atomic(s.phi)) detail::both_ways(ax, s.args, m.pos(s.phi), s.phi);
    for (auto& a : T.axioms) ax.push_back({a.ctx, m.pos(a.lhs), m.pos(a.rhs)});
    for (auto& s : m.symbols) {
        const Formula& f = s.phi;
        if (f->kind == K::And || f->kind == K::Or) {
            std::vector<Formula> cs;
            for (auto& c : f->subs) cs.push_back(m.pos(c));
            detail::both_ways(ax, s.args, m.pos(f), f->kind == K::And ? conj(cs) : disj(cs));
        }
    }
    for (auto& s : m.symbols)
        if (s.phi->kind == K::Imp) detail::both_ways(ax, s.args, m.pos(s.phi), disj2(m.neg(s.phi->subs[0]), m.pos(s.phi->subs[1])));
    for (auto& s : m.symbols)
        if (s.phi->kind == K::Exists) {
            auto [ys, body] = open_quantifier(s.phi);
            detail::both_ways(ax, s.args, m.pos(s.phi), exists(ys, m.pos(body)));
        }
    for (auto& s : m.symbols)
        if (s.phi->kind == K::Forall) {
            auto [ys, body] = open_quantifier(s.phi);
            detail::both_ways(ax, s.args, m.neg(s.phi), exists(ys, m.neg(body)));
        }
    return m;
}

// ------------------------------------------------------------ encodings

/** \brief Constants naming the elements of a finite structure. */
struct Diagram {
    Theory theory;                                        // signature extended by the constants; axioms = the diagram
    std::map<std::string, std::vector<std::string>> names;  // sort -> constant per element
};

/**
 * \brief Positive diagram: one constant per element and a sequent true |- A
 * for every atom true in M over those constants. Atoms are relation instances,
 * the reflexive equalities, and one equality f(c..) = c per function table entry.
 */
inline Diagram positive_diagram(const FinStructure& M) {
    if (M.exploding) throw std::invalid_argument("the exploding structure has no diagram");
    Diagram d;
    d.theory.sig = M.sig;
    d.theory.fragment = Fragment::Regular;
    std::set<std::string> used;
    for (auto& f : M.sig.funcs) used.insert(f.name);
    for (auto& r : M.sig.rels) used.insert(r.name);
    bool one_sort = M.sig.sorts.size() == 1;
    for (auto& s : M.sig.sorts)
        for (int i = 0; i < M.size(s); ++i) {
            std::string n = fresh_name(one_sort ? "c" + std::to_string(i) : "c_" + s + std::to_string(i), used);
            used.insert(n);
            d.names[s].push_back(n);
            d.theory.sig.add_func({n, {}, s});
        }
    auto c = [&](const std::string& s, int i) { return constant(d.names[s][i], s); };
    auto args_of = [&](const std::vector<std::string>& ss, const std::vector<int>& xs) {
        std::vector<Term> ts;
        for (size_t i = 0; i < xs.size(); ++i) ts.push_back(c(ss[i], xs[i]));
        return ts;
    };
    auto& ax = d.theory.axioms;
    for (auto& r : M.sig.rels)
        for_tuples(M.radix(r.args), [&](const std::vector<int>& xs) {
            if (M.holds_rel(r.name, xs)) ax.push_back({{}, top(), rel(r.name, args_of(r.args, xs))});
        });
    for (auto& s : M.sig.sorts)
        for (int i = 0; i < M.size(s); ++i) ax.push_back({{}, top(), eq(c(s, i), c(s, i))});
    for (auto& f : M.sig.funcs)
        for_tuples(M.radix(f.args), [&](const std::vector<int>& xs) {
            ax.push_back({{}, top(), eq(app(f.name, args_of(f.args, xs), f.result), c(f.result, M.apply(f.name, xs)))});
        });
    return d;
}

inline std::string branch_constant(int k) { return "a" + std::to_string(k); }
inline std::string ultrafilter_constant(int a) { return "e" + std::to_string(a); }

/** depth of every node of a tree given by parents (root has parent -1) */
inline std::vector<int> tree_depths(const std::vector<int>& parent) {
    std::vector<int> d(parent.size(), 0);
    for (size_t k = 0; k < parent.size(); ++k) {
        if (parent[k] >= static_cast<int>(k)) throw std::invalid_argument("parents must precede their children");
        if (parent[k] >= 0) d[k] = d[parent[k]] + 1;
        else if (k != 0) throw std::invalid_argument("only node 0 may be a root");
    }
    return d;
}

/** nodes of maximal depth, each naming the cofinal branch that ends there */
inline std::vector<std::vector<int>> cofinal_branches(const std::vector<int>& parent) {
    auto d = tree_depths(parent);
    int h = d.empty() ? 0 : *std::max_element(d.begin(), d.end());
    std::vector<std::vector<int>> out;
    for (size_t k = 0; k < parent.size(); ++k)
        if (d[k] == h) {
            std::vector<int> b;
            for (int n = static_cast<int>(k); n >= 0; n = parent[n]) b.push_back(n);
            std::reverse(b.begin(), b.end());
            out.push_back(b);
        }
    return out;
}

/**
 * \brief Theory of a cofinal branch: constants a_k per node, unary P, and
 * true |- or(P(a), a in level) per level, P(a) and P(b) |- false within a
 * level, P(a) |- P(b) for a a successor of b.
 */
inline Theory encode_branch_theory(const std::vector<int>& parent) {
    auto d = tree_depths(parent);
    int h = d.empty() ? -1 : *std::max_element(d.begin(), d.end());
    Theory T;
    T.fragment = Fragment::Coherent;
    T.sig.add_sort("Node");
    T.sig.add_rel({"P", {"Node"}});
    auto P = [&](int k) { return rel("P", {constant(branch_constant(k), "Node")}); };
    for (size_t k = 0; k < parent.size(); ++k) T.sig.add_func({branch_constant(static_cast<int>(k)), {}, "Node"});
    for (int l = 0; l <= h; ++l) {
        std::vector<Formula> ds;
        for (size_t k = 0; k < parent.size(); ++k)
            if (d[k] == l) ds.push_back(P(static_cast<int>(k)));
        T.axioms.push_back({{}, top(), disj(ds)});
    }
    for (size_t a = 0; a < parent.size(); ++a)
        for (size_t b = a + 1; b < parent.size(); ++b)
            if (d[a] == d[b]) T.axioms.push_back({{}, conj2(P(static_cast<int>(a)), P(static_cast<int>(b))), bot()});
    for (size_t k = 1; k < parent.size(); ++k) T.axioms.push_back({{}, P(static_cast<int>(k)), P(parent[k])});
    return T;
}

/**
 * \brief Theory of an ultrafilter on L: constants e_a, unary P, with
 * P(a) |- P(b) for a <= b, and(P(a_i)) |- P(meet a_i) for every subset of
 * size other than one, true |- P(a) or P(not a) with the pseudo-complement,
 * and P(bottom) |- false when `proper`.
 */
inline Theory encode_ultrafilter_theory(const FinLattice& L, bool proper = true) {
    if (L.n > 12) throw std::invalid_argument("lattice too large for the subset family");
    Theory T;
    T.fragment = Fragment::Coherent;
    T.sig.add_sort("L");
    T.sig.add_rel({"P", {"L"}});
    for (int a = 0; a < L.n; ++a) T.sig.add_func({ultrafilter_constant(a), {}, "L"});
    auto P = [&](int a) { return rel("P", {constant(ultrafilter_constant(a), "L")}); };
    for (int a = 0; a < L.n; ++a)
        for (int b = 0; b < L.n; ++b)
            if (a != b && L.leq(a, b)) T.axioms.push_back({{}, P(a), P(b)});
    for (unsigned mask = 0; mask < (1u << L.n); ++mask) {
        if (std::popcount(mask) == 1) continue;
        std::vector<Formula> ps;
        std::vector<int> xs;
        for (int a = 0; a < L.n; ++a)
            if (mask >> a & 1) {
                ps.push_back(P(a));
                xs.push_back(a);
            }
        T.axioms.push_back({{}, conj(ps), P(L.meet(xs))});
    }
    for (int a = 0; a < L.n; ++a) {
        auto na = L.pseudo_complement(a);
        if (!na) throw std::invalid_argument("element " + L.name(a) + " has no pseudo-complement");
        T.axioms.push_back({{}, top(), disj2(P(a), P(*na))});
    }
    if (proper) T.axioms.push_back({{}, P(L.bottom), bot()});
    return T;
}

/** indices k whose constant name(k) satisfies P in M */
inline std::vector<int> p_extension(const FinStructure& M, int count, const std::function<std::string(int)>& name) {
    std::vector<int> out;
    for (int k = 0; k < count; ++k)
        if (M.holds_rel("P", {M.apply(name(k), {})})) out.push_back(k);
    return out;
}

}  // namespace ifol

#endif
