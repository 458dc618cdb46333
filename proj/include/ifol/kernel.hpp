#ifndef IFOL_KERNEL_HPP
#define IFOL_KERNEL_HPP

#include "syntax.hpp"
#include "text.hpp"

namespace ifol {

/** \brief A node of the tree gamma^{<=h}: the sequence of child indices from the root. */
using Node = std::vector<int>;

inline std::string node_string(const Node& n) {
    std::string s = "<";
    for (size_t i = 0; i < n.size(); ++i) s += (i ? "," : "") + std::to_string(n[i]);
    return s + ">";
}

/** all nodes of the given length, lexicographic */
inline std::vector<Node> level_nodes(int gamma, int level) {
    std::vector<Node> out{Node{}};
    for (int l = 0; l < level; ++l) {
        std::vector<Node> next;
        for (auto& n : out)
            for (int i = 0; i < gamma; ++i) {
                Node m = n;
                m.push_back(i);
                next.push_back(m);
            }
        out = std::move(next);
    }
    return out;
}

inline bool is_prefix(const Node& a, const Node& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

/**
 * \brief Labelling of the tree gamma^{<=h} by formulas, with variable blocks
 * on the non-root nodes. The context of a node is the root context followed
 * by the blocks along its path.
 */
struct TreeAssignment {
    int gamma = 1;
    int height = 0;
    Context root_context;
    std::map<Node, Formula> labels;
    std::map<Node, Context> blocks;
    std::vector<Node> leaf_order;  // optional well-ordering of the leaves

    Formula label(const Node& f) const {
        auto it = labels.find(f);
        if (it == labels.end()) throw ProvisoError("no label at node " + node_string(f));
        return it->second;
    }
    Context block(const Node& f) const {
        auto it = blocks.find(f);
        return it == blocks.end() ? Context{} : it->second;
    }
    Context context_of(const Node& f) const {
        Context c = root_context;
        for (size_t i = 1; i <= f.size(); ++i) {
            Context b = block(Node(f.begin(), f.begin() + i));
            c.insert(c.end(), b.begin(), b.end());
        }
        return c;
    }
    std::vector<Node> children(const Node& f) const {
        std::vector<Node> out;
        for (int i = 0; i < gamma; ++i) {
            Node g = f;
            g.push_back(i);
            out.push_back(g);
        }
        return out;
    }
    std::vector<Node> internal_nodes() const {
        std::vector<Node> out;
        for (int l = 0; l < height; ++l)
            for (auto& n : level_nodes(gamma, l)) out.push_back(n);
        return out;
    }
    std::vector<Node> leaves() const {
        if (!leaf_order.empty()) return leaf_order;
        return level_nodes(gamma, height);
    }

    /** throws ProvisoError naming the offending node */
    void validate() const {
        if (gamma < 1) throw ProvisoError("branching must be at least 1");
        if (height < 0) throw ProvisoError("negative height");
        std::set<std::string> rc;
        for (auto& d : root_context)
            if (!rc.insert(d.name).second) throw ProvisoError("duplicate root context variable " + d.name);
        for (int l = 0; l <= height; ++l)
            for (auto& f : level_nodes(gamma, l)) {
                Formula phi = label(f);
                Context y = context_of(f);
                std::set<std::string> names;
                for (auto& d : y)
                    if (!names.insert(d.name).second)
                        throw ProvisoError("block at node " + node_string(f) + " reuses variable " + d.name + " of an ancestor context");
                for (auto& d : free_vars(phi))
                    if (!names.count(d.name))
                        throw ProvisoError("label at node " + node_string(f) + " has free variable " + d.name + " outside its context");
            }
        for (auto& [n, b] : blocks)
            if (n.empty() || static_cast<int>(n.size()) > height) throw ProvisoError("block on invalid node " + node_string(n));
        if (!leaf_order.empty()) {
            std::set<Node> want;
            for (auto& n : level_nodes(gamma, height)) want.insert(n);
            std::set<Node> got(leaf_order.begin(), leaf_order.end());
            if (got != want || leaf_order.size() != want.size()) throw ProvisoError("leaf order is not a permutation of the leaves");
        }
    }
};

/** \brief A bar: a set of nodes meeting every path to the leaves, pairwise incomparable. */
using Bar = std::vector<Node>;

inline void validate_bar(const TreeAssignment& a, const Bar& bar) {
    for (auto& b : bar)
        if (static_cast<int>(b.size()) > a.height) throw ProvisoError("bar node " + node_string(b) + " beyond height");
    for (size_t i = 0; i < bar.size(); ++i)
        for (size_t j = 0; j < bar.size(); ++j)
            if (i != j && is_prefix(bar[i], bar[j]))
                throw ProvisoError("bar nodes " + node_string(bar[i]) + " and " + node_string(bar[j]) + " are comparable");
    for (auto& leaf : level_nodes(a.gamma, a.height))
        if (std::none_of(bar.begin(), bar.end(), [&](const Node& b) { return is_prefix(b, leaf); }))
            throw ProvisoError("leaf " + node_string(leaf) + " is not barred");
}

struct RuleInstance {
    std::vector<Sequent> premises;
    Sequent conclusion;
};

/** \brief exists(blocks along path). conj(labels along path, root included) */
inline Formula path_formula(const TreeAssignment& a, const Node& f) {
    std::vector<Formula> parts;
    Context vars;
    for (size_t i = 0; i <= f.size(); ++i) {
        Node p(f.begin(), f.begin() + i);
        parts.push_back(a.label(p));
        if (i > 0) {
            Context b = a.block(p);
            vars.insert(vars.end(), b.begin(), b.end());
        }
    }
    return exists(vars, conj_c(parts));
}

inline std::vector<Sequent> tt_premises(const TreeAssignment& a) {
    std::vector<Sequent> out;
    for (auto& f : a.internal_nodes()) {
        std::vector<Formula> ds;
        for (auto& g : a.children(f)) ds.push_back(exists(a.block(g), a.label(g)));
        out.push_back(Sequent{a.context_of(f), a.label(f), disj_c(ds)});
    }
    return out;
}

/** \brief The transfinite-transitivity rule instance for a finite tree assignment. */
inline RuleInstance tt_rule_instance(const TreeAssignment& a) {
    a.validate();
    RuleInstance r;
    r.premises = tt_premises(a);
    std::vector<Formula> ds;
    for (auto& f : a.leaves()) ds.push_back(path_formula(a, f));
    r.conclusion = Sequent{a.root_context, a.label({}), disj_c(ds)};
    return r;
}

inline std::vector<Node> bar_order(const TreeAssignment& a, Bar bar) {
    bool all_leaves = std::all_of(bar.begin(), bar.end(), [&](const Node& n) { return static_cast<int>(n.size()) == a.height; });
    if (all_leaves && !a.leaf_order.empty()) return a.leaf_order;
    std::sort(bar.begin(), bar.end());
    return bar;
}

/** \brief TT variant whose conclusion disjoins over the nodes of a bar. */
inline RuleInstance tt_bar_instance(const TreeAssignment& a, const Bar& bar) {
    a.validate();
    validate_bar(a, bar);
    RuleInstance r;
    r.premises = tt_premises(a);
    std::vector<Formula> ds;
    for (auto& f : bar_order(a, bar)) ds.push_back(path_formula(a, f));
    r.conclusion = Sequent{a.root_context, a.label({}), disj_c(ds)};
    return r;
}

/** distributivity: TT with every block empty */
inline RuleInstance distributivity_instance(const TreeAssignment& a) {
    for (auto& [n, b] : a.blocks)
        if (!b.empty()) throw ProvisoError("distributivity needs empty blocks; node " + node_string(n) + " has one");
    return tt_rule_instance(a);
}

/** \brief Dependent-choice chain phi_0, ..., phi_h with blocks x_1..x_h. */
struct DcChain {
    Context root_context;
    std::vector<Formula> formulas;
    std::vector<Context> blocks;  // blocks[i] is bound before formulas[i+1]

    TreeAssignment as_tree() const {
        TreeAssignment a;
        a.gamma = 1;
        a.height = static_cast<int>(formulas.size()) - 1;
        a.root_context = root_context;
        Node n;
        for (size_t i = 0; i < formulas.size(); ++i) {
            a.labels[n] = formulas[i];
            if (i > 0) a.blocks[n] = blocks[i - 1];
            n.push_back(0);
        }
        return a;
    }
};

inline RuleInstance dc_instance(const DcChain& c) {
    if (c.formulas.empty() || c.blocks.size() + 1 != c.formulas.size()) throw ProvisoError("chain needs h+1 formulas and h blocks");
    TreeAssignment a = c.as_tree();
    a.validate();
    RuleInstance r;
    r.premises = tt_premises(a);
    Context all;
    for (auto& b : c.blocks) all.insert(all.end(), b.begin(), b.end());
    r.conclusion = Sequent{c.root_context, c.formulas.front(), exists(all, c.formulas.back())};
    return r;
}

/** \brief Choice: from phi |- and_b ex x_b. phi_b conclude phi |- ex x_0..x_n. and_b phi_b */
struct ChoiceData {
    Context ctx;
    Formula phi;
    std::vector<Context> blocks;
    std::vector<Formula> parts;
};

inline RuleInstance choice_instance(const ChoiceData& c) {
    if (c.blocks.size() != c.parts.size()) throw ProvisoError("choice needs one block per part");
    std::set<std::string> used = context_names(c.ctx);
    Context all;
    for (size_t i = 0; i < c.blocks.size(); ++i) {
        for (auto& d : c.blocks[i])
            if (!used.insert(d.name).second) throw ProvisoError("choice blocks must be disjoint from each other and the context");
        std::set<std::string> ok = context_names(c.ctx);
        for (auto& d : c.blocks[i]) ok.insert(d.name);
        for (auto& d : free_vars(c.parts[i]))
            if (!ok.count(d.name)) throw ProvisoError("choice part " + std::to_string(i) + " has stray free variable " + d.name);
        all.insert(all.end(), c.blocks[i].begin(), c.blocks[i].end());
    }
    for (auto& d : free_vars(c.phi))
        if (!context_contains(c.ctx, d.name)) throw ProvisoError("choice antecedent has stray free variable " + d.name);
    std::vector<Formula> ex;
    for (size_t i = 0; i < c.parts.size(); ++i) ex.push_back(exists(c.blocks[i], c.parts[i]));
    RuleInstance r;
    r.premises = {Sequent{c.ctx, c.phi, conj_c(ex)}};
    r.conclusion = Sequent{c.ctx, c.phi, exists(all, conj_c(c.parts))};
    return r;
}

// ------------------------------------------------------------ proofs

/** instantiation data; which fields matter depends on the rule */
struct RuleData {
    int index = -1;                                     // and-elim, or-intro
    Context vars;                                       // quantifier rules: the opened block
    std::vector<std::pair<std::string, Term>> subst;    // subst
    std::optional<TreeAssignment> assignment;           // tt, tt-bar, dist
    std::optional<Bar> bar;                             // tt-bar
    std::optional<DcChain> chain;                       // dc
    std::optional<ChoiceData> choice;                   // choice
};

struct Proof {
    std::string rule;
    RuleData data;
    Sequent concl;
    std::vector<Proof> premises;
};

inline const std::vector<std::string>& rule_names() {
    static const std::vector<std::string> r = {
        "id", "axiom", "cut", "subst", "eq-refl", "eq-subst", "and-elim", "and-intro", "or-intro", "or-elim",
        "imp-down", "imp-up", "exists-down", "exists-up", "forall-down", "forall-up", "frobenius", "small-dist",
        "em", "tt", "tt-bar", "dist", "dc", "choice"};
    return r;
}

inline bool rule_in_fragment(const std::string& r, Fragment f) {
    static const std::set<std::string> fo = {"imp-down", "imp-up", "forall-down", "forall-up"};
    static const std::set<std::string> disj = {"or-intro", "or-elim", "small-dist"};
    if (r == "em") return f == Fragment::Classical;
    if (fo.count(r)) return f == Fragment::FirstOrder || f == Fragment::Classical;
    if (disj.count(r)) return f != Fragment::Regular;
    return true;
}

struct CheckResult {
    bool ok = true;
    std::vector<int> path;  // premise indices from the root to the failing node
    std::string rule;
    std::string reason;
    explicit operator bool() const { return ok; }
};

inline size_t proof_size(const Proof& p) {
    size_t n = 1;
    for (auto& q : p.premises) n += proof_size(q);
    return n;
}

inline bool proof_uses(const Proof& p, const std::string& rule) {
    if (p.rule == rule) return true;
    return std::any_of(p.premises.begin(), p.premises.end(), [&](const Proof& q) { return proof_uses(q, rule); });
}

namespace detail {

struct Fail {
    std::string reason;
};

inline void need(bool c, const std::string& why) {
    if (!c) throw Fail{why};
}

inline void need_premises(const Proof& p, size_t n) {
    need(p.premises.size() == n, "expected " + std::to_string(n) + " premises, got " + std::to_string(p.premises.size()));
}

inline void need_same(const Formula& a, const Formula& b, const std::string& what) {
    need(same(a, b), what + ": expected " + print(b) + ", found " + print(a));
}

inline void need_ctx(const Context& a, const Context& b, const std::string& what) {
    need(a == b, what + ": context mismatch");
}

inline void match_instance(const Proof& p, const RuleInstance& r) {
    need_premises(p, r.premises.size());
    need(same(p.concl, r.conclusion), "conclusion does not match the rule instance " + print(r.conclusion));
    for (size_t i = 0; i < r.premises.size(); ++i)
        need(same(p.premises[i].concl, r.premises[i]), "premise " + std::to_string(i) + " does not match " + print(r.premises[i]));
}

inline Context ctx_append(const Context& a, const Context& b) {
    Context c = a;
    c.insert(c.end(), b.begin(), b.end());
    return c;
}

inline void check_block_vars(const Context& vars, const Context& block, const Context& outer) {
    need(vars.size() == block.size(), "opened block has wrong length");
    std::set<std::string> seen;
    for (size_t i = 0; i < vars.size(); ++i) {
        need(vars[i].sort == block[i].sort, "opened variable " + vars[i].name + " has the wrong sort");
        need(!context_contains(outer, vars[i].name), "opened variable " + vars[i].name + " already in context");
        need(seen.insert(vars[i].name).second, "opened variables repeat");
    }
}

inline void check_node(const Theory& T, Fragment frag, const Proof& p) {
    const Sequent& c = p.concl;
    try {
        check_sequent(T.sig, c);
    } catch (const SortError& e) {
        throw Fail{e.what()};
    }
    need(in_fragment(c.lhs, frag) && in_fragment(c.rhs, frag), "sequent outside the " + fragment_name(frag) + " fragment");
    need(rule_in_fragment(p.rule, frag), "rule not available in the " + fragment_name(frag) + " fragment");
    const std::string& r = p.rule;
    const auto& L = c.lhs;
    const auto& R = c.rhs;
    using K = FormulaNode;

    if (r == "id") {
        need_premises(p, 0);
        need_same(R, L, "identity");
    } else if (r == "axiom") {
        need_premises(p, 0);
        need(std::any_of(T.axioms.begin(), T.axioms.end(), [&](const Sequent& a) { return same(a, c); }), "not an axiom of the theory");
    } else if (r == "cut") {
        need_premises(p, 2);
        auto& a = p.premises[0].concl;
        auto& b = p.premises[1].concl;
        need_ctx(a.ctx, c.ctx, "left premise");
        need_ctx(b.ctx, c.ctx, "right premise");
        need_same(a.lhs, L, "left premise antecedent");
        need_same(b.rhs, R, "right premise succedent");
        need_same(b.lhs, a.rhs, "cut formula");
    } else if (r == "subst") {
        need_premises(p, 1);
        auto& a = p.premises[0].concl;
        Subst s;
        for (auto& [v, t] : p.data.subst) {
            need(context_contains(a.ctx, v), "substituted variable " + v + " not in premise context");
            s[v] = t;
        }
        std::map<std::string, std::string> scope;
        for (auto& d : c.ctx) scope[d.name] = d.sort;
        for (auto& d : a.ctx) {
            Term img = s.count(d.name) ? s[d.name] : var(d);
            try {
                need(sort_of(T.sig, img, scope) == d.sort, "substituted term for " + d.name + " has the wrong sort");
            } catch (const SortError& e) {
                throw Fail{std::string("substitution for ") + d.name + ": " + e.what()};
            }
            s[d.name] = img;
        }
        need_same(L, substitute(a.lhs, s), "substituted antecedent");
        need_same(R, substitute(a.rhs, s), "substituted succedent");
    } else if (r == "eq-refl") {
        need_premises(p, 0);
        need(is_top(L), "antecedent must be true");
        need(R->kind == K::Eq && R->terms[0]->kind == TermNode::Free && term_eq(R->terms[0], R->terms[1]), "succedent must be x = x");
    } else if (r == "eq-subst") {
        need_premises(p, 0);
        need(L->kind == K::And && !L->subs.empty(), "antecedent must be a conjunction of equalities and a formula");
        Subst s;
        for (size_t i = 0; i + 1 < L->subs.size(); ++i) {
            auto& e = L->subs[i];
            need(e->kind == K::Eq && e->terms[0]->kind == TermNode::Free && e->terms[1]->kind == TermNode::Free,
                 "equality between variables expected");
            need(!s.count(e->terms[0]->name), "repeated substituted variable");
            s[e->terms[0]->name] = e->terms[1];
        }
        need_same(R, substitute(L->subs.back(), s), "substituted formula");
    } else if (r == "and-elim") {
        need_premises(p, 0);
        need(L->kind == K::And, "antecedent must be a conjunction");
        need(p.data.index >= 0 && p.data.index < static_cast<int>(L->subs.size()), "conjunct index out of range");
        need_same(R, L->subs[p.data.index], "projected conjunct");
    } else if (r == "and-intro") {
        need(R->kind == K::And, "succedent must be a conjunction");
        need_premises(p, R->subs.size());
        for (size_t i = 0; i < R->subs.size(); ++i) {
            auto& a = p.premises[i].concl;
            need_ctx(a.ctx, c.ctx, "premise " + std::to_string(i));
            need_same(a.lhs, L, "premise antecedent");
            need_same(a.rhs, R->subs[i], "premise succedent");
        }
    } else if (r == "or-intro") {
        need_premises(p, 0);
        need(R->kind == K::Or, "succedent must be a disjunction");
        need(p.data.index >= 0 && p.data.index < static_cast<int>(R->subs.size()), "disjunct index out of range");
        need_same(L, R->subs[p.data.index], "injected disjunct");
    } else if (r == "or-elim") {
        need(L->kind == K::Or, "antecedent must be a disjunction");
        need_premises(p, L->subs.size());
        for (size_t i = 0; i < L->subs.size(); ++i) {
            auto& a = p.premises[i].concl;
            need_ctx(a.ctx, c.ctx, "premise " + std::to_string(i));
            need_same(a.lhs, L->subs[i], "premise antecedent");
            need_same(a.rhs, R, "premise succedent");
        }
    } else if (r == "imp-down") {
        need_premises(p, 1);
        auto& a = p.premises[0].concl;
        need_ctx(a.ctx, c.ctx, "premise");
        need(R->kind == K::Imp, "succedent must be an implication");
        need_same(a.lhs, conj2(L, R->subs[0]), "premise antecedent");
        need_same(a.rhs, R->subs[1], "premise succedent");
    } else if (r == "imp-up") {
        need_premises(p, 1);
        auto& a = p.premises[0].concl;
        need_ctx(a.ctx, c.ctx, "premise");
        need(a.rhs->kind == K::Imp, "premise succedent must be an implication");
        need_same(L, conj2(a.lhs, a.rhs->subs[0]), "antecedent");
        need_same(R, a.rhs->subs[1], "succedent");
    } else if (r == "exists-down" || r == "exists-up") {
        need_premises(p, 1);
        const Sequent& lo = r == "exists-down" ? c : p.premises[0].concl;   // ex y. phi |-_x psi
        const Sequent& hi = r == "exists-down" ? p.premises[0].concl : c;   // phi |-_xy psi
        need(lo.lhs->kind == K::Exists, "antecedent must be existential");
        check_block_vars(p.data.vars, lo.lhs->block, lo.ctx);
        need_ctx(hi.ctx, ctx_append(lo.ctx, p.data.vars), "extended context");
        need_same(hi.lhs, open_body(lo.lhs->subs[0], p.data.vars), "opened antecedent");
        need_same(hi.rhs, lo.rhs, "succedent");
    } else if (r == "forall-down" || r == "forall-up") {
        need_premises(p, 1);
        const Sequent& lo = r == "forall-down" ? c : p.premises[0].concl;   // phi |-_x all y. psi
        const Sequent& hi = r == "forall-down" ? p.premises[0].concl : c;   // phi |-_xy psi
        need(lo.rhs->kind == K::Forall, "succedent must be universal");
        check_block_vars(p.data.vars, lo.rhs->block, lo.ctx);
        need_ctx(hi.ctx, ctx_append(lo.ctx, p.data.vars), "extended context");
        need_same(hi.rhs, open_body(lo.rhs->subs[0], p.data.vars), "opened succedent");
        need_same(hi.lhs, lo.lhs, "antecedent");
    } else if (r == "frobenius") {
        need_premises(p, 0);
        need(L->kind == K::And && L->subs.size() == 2 && L->subs[1]->kind == K::Exists, "antecedent must be phi and ex y. psi");
        auto& ex = L->subs[1];
        need(R->kind == K::Exists && R->block.size() == ex->block.size(), "succedent must be existential over the same block");
        for (size_t i = 0; i < ex->block.size(); ++i) need(R->block[i].sort == ex->block[i].sort, "block sorts differ");
        need_same(R->subs[0], conj2(L->subs[0], ex->subs[0]), "succedent body");
    } else if (r == "small-dist") {
        need_premises(p, 0);
        need(L->kind == K::And && L->subs.size() == 2 && L->subs[1]->kind == K::Or, "antecedent must be phi and or(psi_i)");
        std::vector<Formula> ds;
        for (auto& q : L->subs[1]->subs) ds.push_back(conj2(L->subs[0], q));
        need_same(R, disj(ds), "distributed succedent");
    } else if (r == "em") {
        need_premises(p, 0);
        need(is_top(L), "antecedent must be true");
        need(R->kind == K::Or && R->subs.size() == 2, "succedent must be phi or not phi");
        need_same(R->subs[1], neg(R->subs[0]), "second disjunct");
    } else if (r == "tt" || r == "dist" || r == "tt-bar") {
        need(p.data.assignment.has_value(), "missing tree assignment");
        RuleInstance inst;
        try {
            if (r == "tt") inst = tt_rule_instance(*p.data.assignment);
            else if (r == "dist") inst = distributivity_instance(*p.data.assignment);
            else {
                need(p.data.bar.has_value(), "missing bar");
                inst = tt_bar_instance(*p.data.assignment, *p.data.bar);
            }
        } catch (const ProvisoError& e) {
            throw Fail{e.what()};
        }
        match_instance(p, inst);
    } else if (r == "dc") {
        need(p.data.chain.has_value(), "missing chain");
        RuleInstance inst;
        try {
            inst = dc_instance(*p.data.chain);
        } catch (const ProvisoError& e) {
            throw Fail{e.what()};
        }
        match_instance(p, inst);
    } else if (r == "choice") {
        need(p.data.choice.has_value(), "missing choice data");
        RuleInstance inst;
        try {
            inst = choice_instance(*p.data.choice);
        } catch (const ProvisoError& e) {
            throw Fail{e.what()};
        }
        match_instance(p, inst);
    } else {
        throw Fail{"unknown rule"};
    }
}

inline bool check_rec(const Theory& T, Fragment frag, const Proof& p, std::vector<int>& path, CheckResult& out) {
    try {
        check_node(T, frag, p);
    } catch (const Fail& f) {
        out = CheckResult{false, path, p.rule, f.reason};
        return false;
    }
    for (size_t i = 0; i < p.premises.size(); ++i) {
        path.push_back(static_cast<int>(i));
        if (!check_rec(T, frag, p.premises[i], path, out)) return false;
        path.pop_back();
    }
    return true;
}

}  // namespace detail

/**
 * \brief Check every node of a proof tree against the theory, in the given
 * fragment (default: the theory's). First failure in preorder is reported.
 */
inline CheckResult check_proof(const Theory& T, const Proof& p, std::optional<Fragment> frag = std::nullopt) {
    CheckResult out;
    std::vector<int> path;
    detail::check_rec(T, frag.value_or(T.fragment), p, path, out);
    return out;
}

// ------------------------------------------------------------ text form

inline SExpr node_sexpr(const Node& n) {
    SExpr l = SExpr::list();
    for (int i : n) l.add(SExpr::sym(std::to_string(i)));
    return l;
}

inline SExpr tree_sexpr(const TreeAssignment& a) {
    SExpr l = SExpr::list({SExpr::sym("tree"), SExpr::list({SExpr::sym("gamma"), SExpr::sym(std::to_string(a.gamma))}),
                           SExpr::list({SExpr::sym("height"), SExpr::sym(std::to_string(a.height))}),
                           SExpr::list({SExpr::sym("root"), context_sexpr(a.root_context)})});
    for (auto& [n, b] : a.blocks)
        if (!b.empty()) l.add(SExpr::list({SExpr::sym("block"), node_sexpr(n), context_sexpr(b)}));
    for (auto& [n, f] : a.labels) l.add(SExpr::list({SExpr::sym("label"), node_sexpr(n), formula_sexpr(f, a.context_of(n))}));
    if (!a.leaf_order.empty()) {
        SExpr lv = SExpr::list({SExpr::sym("leaves")});
        for (auto& n : a.leaf_order) lv.add(node_sexpr(n));
        l.add(lv);
    }
    return l;
}

inline SExpr proof_sexpr(const Proof& p) {
    SExpr l = SExpr::list({SExpr::sym("proof"), SExpr::sym(p.rule), sequent_sexpr(p.concl)});
    const RuleData& d = p.data;
    if (d.index >= 0) l.add(SExpr::list({SExpr::sym("index"), SExpr::sym(std::to_string(d.index))}));
    if (!d.vars.empty()) l.add(SExpr::list({SExpr::sym("vars"), context_sexpr(d.vars)}));
    if (!d.subst.empty()) {
        SExpr s = SExpr::list({SExpr::sym("subst")});
        for (auto& [v, t] : d.subst) s.add(SExpr::list({SExpr::sym(v), term_sexpr(t)}));
        l.add(s);
    }
    if (d.assignment) l.add(tree_sexpr(*d.assignment));
    if (d.bar) {
        SExpr b = SExpr::list({SExpr::sym("bar")});
        for (auto& n : *d.bar) b.add(node_sexpr(n));
        l.add(b);
    }
    if (d.chain) {
        SExpr c = SExpr::list({SExpr::sym("chain"), context_sexpr(d.chain->root_context)});
        Context ctx = d.chain->root_context;
        for (size_t i = 0; i < d.chain->formulas.size(); ++i) {
            if (i > 0) {
                c.add(SExpr::list({SExpr::sym("block"), context_sexpr(d.chain->blocks[i - 1])}));
                ctx.insert(ctx.end(), d.chain->blocks[i - 1].begin(), d.chain->blocks[i - 1].end());
            }
            c.add(formula_sexpr(d.chain->formulas[i], ctx));
        }
        l.add(c);
    }
    if (d.choice) {
        SExpr c = SExpr::list({SExpr::sym("choice"), context_sexpr(d.choice->ctx), formula_sexpr(d.choice->phi, d.choice->ctx)});
        for (size_t i = 0; i < d.choice->parts.size(); ++i) {
            Context ctx = d.choice->ctx;
            ctx.insert(ctx.end(), d.choice->blocks[i].begin(), d.choice->blocks[i].end());
            c.add(SExpr::list({SExpr::sym("part"), context_sexpr(d.choice->blocks[i]), formula_sexpr(d.choice->parts[i], ctx)}));
        }
        l.add(c);
    }
    for (auto& q : p.premises) l.add(proof_sexpr(q));
    return l;
}

inline std::string print(const Proof& p) { return to_pretty(proof_sexpr(p)); }

namespace detail {

inline int read_small_int(const SExpr& e) {
    if (!e.is_symbol()) throw ParseError("expected an integer", e.pos);
    try {
        size_t used = 0;
        int v = std::stoi(e.text, &used);
        if (used != e.text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, found '" + e.text + "'", e.pos);
    }
}

inline Node read_node(const SExpr& e) {
    if (!e.is_list()) throw ParseError("expected a node (list of child indices)", e.pos);
    Node n;
    for (auto& x : e.items) n.push_back(read_small_int(x));
    return n;
}

inline Term read_term_in(const SExpr& e, const Signature& sig, const Context& ctx) {
    Scope sc;
    sc.sig = &sig;
    sc.unknown_is_var = false;
    for (auto& d : ctx) sc.free[d.name] = d.sort;
    return read_term(e, sc);
}

}  // namespace detail

/**
 * \brief (tree (gamma G) (height H) (root CTX) (block NODE CTX)... (label NODE F)... (leaves NODE...)?)
 * Labels are read in the context of their node.
 */
inline TreeAssignment read_tree(const SExpr& e, const Signature& sig) {
    if (e.head() != "tree") throw ParseError("expected (tree ...)", e.pos);
    TreeAssignment a;
    std::vector<const SExpr*> labels;
    for (size_t i = 1; i < e.size(); ++i) {
        const SExpr& it = e[i];
        std::string h = it.head();
        if (h == "gamma") a.gamma = detail::read_small_int(it[1]);
        else if (h == "height") a.height = detail::read_small_int(it[1]);
        else if (h == "root") a.root_context = detail::read_context(it[1]);
        else if (h == "block") a.blocks[detail::read_node(it[1])] = detail::read_context(it[2]);
        else if (h == "label") labels.push_back(&it);
        else if (h == "leaves")
            for (size_t j = 1; j < it.size(); ++j) a.leaf_order.push_back(detail::read_node(it[j]));
        else throw ParseError("unknown tree item '" + h + "'", it.pos);
    }
    for (auto* l : labels) {
        Node n = detail::read_node((*l)[1]);
        a.labels[n] = read_formula((*l)[2], &sig, a.context_of(n));
    }
    return a;
}

/** \brief (proof RULE SEQUENT DATA... PREMISE...) with formulas checked against sig */
inline Proof read_proof(const SExpr& e, const Signature& sig) {
    if (e.head() != "proof" || e.size() < 3) throw ParseError("expected (proof RULE SEQUENT ...)", e.pos);
    Proof p;
    p.rule = e[1].text;
    if (std::find(rule_names().begin(), rule_names().end(), p.rule) == rule_names().end())
        throw ParseError("unknown rule '" + p.rule + "'", e[1].pos);
    p.concl = read_sequent(e[2], &sig);
    for (size_t i = 3; i < e.size(); ++i) {
        const SExpr& it = e[i];
        std::string h = it.head();
        if (h == "proof") p.premises.push_back(read_proof(it, sig));
        else if (h == "index") p.data.index = detail::read_small_int(it[1]);
        else if (h == "vars") p.data.vars = detail::read_context(it[1]);
        else if (h == "subst") {
            for (size_t j = 1; j < it.size(); ++j) p.data.subst.push_back({it[j][0].text, detail::read_term_in(it[j][1], sig, p.concl.ctx)});
        } else if (h == "tree") p.data.assignment = read_tree(it, sig);
        else if (h == "bar") {
            Bar b;
            for (size_t j = 1; j < it.size(); ++j) b.push_back(detail::read_node(it[j]));
            p.data.bar = b;
        } else if (h == "chain") {
            DcChain c;
            c.root_context = detail::read_context(it[1]);
            Context ctx = c.root_context;
            for (size_t j = 2; j < it.size(); ++j) {
                if (it[j].head() == "block") {
                    Context b = detail::read_context(it[j][1]);
                    c.blocks.push_back(b);
                    ctx.insert(ctx.end(), b.begin(), b.end());
                } else {
                    c.formulas.push_back(read_formula(it[j], &sig, ctx));
                }
            }
            p.data.chain = c;
        } else if (h == "choice") {
            ChoiceData c;
            c.ctx = detail::read_context(it[1]);
            c.phi = read_formula(it[2], &sig, c.ctx);
            for (size_t j = 3; j < it.size(); ++j) {
                Context b = detail::read_context(it[j][1]);
                Context ctx = c.ctx;
                ctx.insert(ctx.end(), b.begin(), b.end());
                c.blocks.push_back(b);
                c.parts.push_back(read_formula(it[j][2], &sig, ctx));
            }
            p.data.choice = c;
        } else throw ParseError("unknown proof item '" + h + "'", it.pos);
    }
    return p;
}

}  // namespace ifol

#endif
