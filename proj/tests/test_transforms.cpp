#include <gtest/gtest.h>

#include "ifol/gen.hpp"
#include "ifol/transforms.hpp"

using namespace ifol;

namespace {

Formula F(const std::string& s, const Signature& sig, const Context& ctx = {}) { return parse_formula(s, &sig, ctx); }

bool has_axiom(const Theory& T, const Sequent& s) {
    return std::any_of(T.axioms.begin(), T.axioms.end(), [&](const Sequent& a) { return same(a, s); });
}

bool uses_hypothesis(const Proof& p, const Formula& s) {
    if (p.rule == "axiom" && is_top(p.concl.lhs) && same(p.concl.rhs, s)) return true;
    return std::any_of(p.premises.begin(), p.premises.end(), [&](const Proof& q) { return uses_hypothesis(q, s); });
}

bool uses_tree_rule(const Proof& p) {
    for (auto r : {"tt", "tt-bar", "dist", "dc", "choice"})
        if (proof_uses(p, r)) return true;
    return false;
}

// own truth-table evaluator for propositional formulas; atoms by index in sig
bool truth(const Formula& f, const Signature& sig, unsigned v) {
    switch (f->kind) {
        case FormulaNode::Rel: {
            for (size_t i = 0; i < sig.rels.size(); ++i)
                if (sig.rels[i].name == f->name) return v >> i & 1;
            throw std::logic_error("unknown atom");
        }
        case FormulaNode::And:
            return std::all_of(f->subs.begin(), f->subs.end(), [&](const Formula& s) { return truth(s, sig, v); });
        case FormulaNode::Or:
            return std::any_of(f->subs.begin(), f->subs.end(), [&](const Formula& s) { return truth(s, sig, v); });
        case FormulaNode::Imp: return !truth(f->subs[0], sig, v) || truth(f->subs[1], sig, v);
        default: throw std::logic_error("not propositional");
    }
}

bool tt_entails(const Theory& T, const Formula& a, const Formula& b) {
    for (unsigned v = 0; v < (1u << T.sig.rels.size()); ++v) {
        bool model = std::all_of(T.axioms.begin(), T.axioms.end(),
                                 [&](const Sequent& s) { return !truth(s.lhs, T.sig, v) || truth(s.rhs, T.sig, v); });
        if (model && truth(a, T.sig, v) && !truth(b, T.sig, v)) return false;
    }
    return true;
}

std::vector<std::string> new_symbols(const Morleyization& m, bool d_first_for_forall) {
    std::vector<std::string> order;
    for (auto it = m.symbols.rbegin(); it != m.symbols.rend(); ++it) {
        bool flip = d_first_for_forall && it->phi->kind == FormulaNode::Forall;
        if (flip && !it->neg.empty()) order.push_back(it->neg);
        order.push_back(it->pos);
        if (!flip && !it->neg.empty()) order.push_back(it->neg);
    }
    return order;
}

// every structure over sig with carriers of size 1..bound (no axioms)
std::vector<FinStructure> all_structures(const Signature& sig, int bound) {
    Theory T;
    T.sig = sig;
    EnumerateOptions o;
    o.bound = bound;
    o.up_to_iso = false;
    return enumerate_models(T, o);
}

}  // namespace

// ------------------------------------------------------------ deduction

TEST(Deduction, AxiomLeaf) {
    Signature sig = gen::propositional(2);
    Theory T{sig, {}, Fragment::Coherent};
    Formula s = F("p", sig);
    Proof p = build::axiom({{}, top(), s});
    Proof d = deduction(T, s, p);
    EXPECT_TRUE(check_proof(T, d).ok) << check_proof(T, d).reason;
    EXPECT_TRUE(same(d.concl, Sequent{{}, conj2(top(), s), s}));
}

TEST(Deduction, CutThroughTheHypothesis) {
    Signature sig = gen::propositional(2);
    Formula s = F("p", sig), q = F("q", sig);
    Theory T{sig, {{{}, s, q}}, Fragment::Coherent};
    Proof p = build::cut(build::axiom({{}, top(), s}), build::axiom({{}, s, q}));
    Proof d = deduction(T, s, p);
    auto r = check_proof(T, d);
    EXPECT_TRUE(r.ok) << r.reason;
    EXPECT_TRUE(same(d.concl, Sequent{{}, conj2(top(), s), q}));
    // the input is not a proof in T alone
    EXPECT_FALSE(check_proof(T, p).ok);
}

TEST(Deduction, UnusedHypothesisWeakens) {
    Signature sig = gen::propositional(2);
    Theory T{sig, {}, Fragment::Coherent};
    Formula pq = F("(and p q)", sig);
    Proof p = build::and_elim({}, pq, 1);
    Proof d = deduction(T, F("q", sig), p);
    EXPECT_TRUE(check_proof(T, d).ok);
    EXPECT_EQ(d.rule, "cut");
    EXPECT_EQ(proof_size(d), 3u);
    EXPECT_TRUE(same(d.concl.lhs, conj2(pq, F("q", sig))));
}

TEST(Deduction, Errors) {
    Signature sig = gen::small_first_order();
    Theory T{sig, {}, Fragment::FirstOrder};
    Formula open = F("(P x)", sig, {{"x", "U"}});
    EXPECT_THROW(deduction(T, open, build::id({{"x", "U"}}, open)), std::invalid_argument);
    Formula s = F("(P c)", sig);
    Proof bad = build::axiom({{}, top(), F("(R c c)", sig)});
    EXPECT_THROW(deduction(T, s, bad), std::invalid_argument);
}

TEST(Deduction, RandomCorpusStaysValid) {
    gen::Rng rng(7);
    int through_sigma = 0;
    for (int i = 0; i < 300; ++i) {
        Fragment fr = std::vector<Fragment>{Fragment::Regular, Fragment::Coherent, Fragment::FirstOrder, Fragment::Classical}[i % 4];
        Signature sig = i % 2 ? gen::propositional(3) : gen::small_first_order();
        Theory T = gen::random_theory(rng, sig, fr, 2);
        gen::FormulaOptions fo;
        fo.fragment = fr;
        fo.depth = 2;
        Formula s = gen::random_formula(rng, sig, {}, fo);
        Theory plus = T;
        plus.axioms.push_back({{}, top(), s});
        gen::ProofOptions po;
        po.fragment = fr;
        po.depth = 5;
        Proof p = gen::random_proof(rng, plus, po);
        auto r0 = check_proof(plus, p);
        ASSERT_TRUE(r0.ok) << "generator produced an invalid proof: " << r0.rule << ": " << r0.reason << "\n" << print(p);
        Proof d = deduction(T, s, p);
        auto r = check_proof(T, d);
        ASSERT_TRUE(r.ok) << r.rule << ": " << r.reason << "\ninput:\n" << print(p);
        EXPECT_TRUE(same(d.concl, Sequent{p.concl.ctx, conj2(p.concl.lhs, s), p.concl.rhs}));
        through_sigma += uses_hypothesis(p, s);
    }
    EXPECT_GE(through_sigma, 50);
}

// ------------------------------------------------------------ schemata

TEST(Schema, DistributivityShapes) {
    Signature sig = gen::propositional(4);
    auto one = classical_schema("classical-distributivity", 1, {F("p", sig)});
    EXPECT_TRUE(same(one.rendered.lhs, F("p", sig)));
    EXPECT_TRUE(same(one.rendered.rhs, F("p", sig)));
    auto two = classical_schema("classical-distributivity", 2, {F("p", sig), F("q", sig), F("r", sig), F("s", sig)});
    ASSERT_EQ(two.rendered.rhs->kind, FormulaNode::Or);
    ASSERT_EQ(two.rendered.rhs->subs.size(), 4u);
    // the four functions 2 -> 2 in lexicographic order
    std::vector<std::string> want = {"(and p r)", "(and p s)", "(and q r)", "(and q s)"};
    for (size_t i = 0; i < 4; ++i) EXPECT_TRUE(same(two.rendered.rhs->subs[i], F(want[i], sig))) << i;
    EXPECT_TRUE(same(two.rendered.lhs, F("(and (or p q) (or r s))", sig)));
    EXPECT_THROW(classical_schema("classical-distributivity", 2, {F("p", sig)}), ProvisoError);
    EXPECT_THROW(classical_schema("no-such", 1, {F("p", sig)}), std::invalid_argument);
}

TEST(Schema, DependentChoice) {
    Signature sig = gen::small_first_order();
    Context x0{{"x0", "U"}}, x1{{"x1", "U"}};
    auto one = classical_dc({F("(R x0 x0)", sig, x0)}, {x0});
    EXPECT_TRUE(same(one.rendered.lhs, F("(ex (x0) (R x0 x0))", sig)));
    EXPECT_TRUE(same(one.rendered.rhs, one.rendered.lhs));
    EXPECT_TRUE(one.rendered.ctx.empty());
    Context both{{"x0", "U"}, {"x1", "U"}};
    auto two = classical_dc({F("(P x0)", sig, x0), F("(R x0 x1)", sig, both)}, {x0, x1});
    EXPECT_TRUE(same(two.rendered.lhs, F("(and (ex (x0) (P x0)) (all (x0) (ex (x1) (R x0 x1))))", sig)));
    EXPECT_TRUE(same(two.rendered.rhs, F("(ex (x0 x1) (and (P x0) (R x0 x1)))", sig)));
    // x1 free in an earlier formula
    EXPECT_THROW(classical_dc({F("(R x0 x1)", sig, both), F("(P x1)", sig, x1)}, {x0, x1}), ProvisoError);
    // overlapping blocks
    EXPECT_THROW(classical_dc({F("(P x0)", sig, x0), F("(P x0)", sig, x0)}, {x0, x0}), ProvisoError);
}

// the classical schemata and the single-sequent TT axiom hold in every finite two-valued structure
TEST(Schema, ValidInTwoValuedStructures) {
    Signature sig = gen::small_first_order();
    Context x0{{"x0", "U"}}, both{{"x0", "U"}, {"x1", "U"}};
    std::vector<SchemaInstance> inst;
    inst.push_back(classical_dc({F("(P x0)", sig, x0), F("(R x0 x1)", sig, both)}, {x0, {{"x1", "U"}}}));
    inst.push_back(classical_distributivity({{F("(P c)", sig), F("(R c c)", sig)}, {F("(ex (y) (R c y))", sig), F("(P c)", sig)}}));
    TreeAssignment a;
    a.gamma = 2;
    a.height = 1;
    a.labels[{}] = F("(ex (y) (P y))", sig);
    a.labels[{0}] = F("(P y)", sig, {{"y", "U"}});
    a.blocks[{0}] = {{"y", "U"}};
    a.labels[{1}] = F("(R c c)", sig);
    inst.push_back(tt_axiom(a));
    for (auto& s : inst)
        for (auto& M : all_structures(sig, 2)) EXPECT_TRUE(satisfies(M, s.rendered)) << s.name << " " << print(s.rendered);
    EXPECT_TRUE(same(inst[2].rendered.lhs, F("(imp (ex (y) (P y)) (or (ex (y) (P y)) (R c c)))", sig)));
}

TEST(Schema, IntuitionisticDcAxiom) {
    Signature sig = gen::small_first_order();
    DcChain c{{}, {top(), F("(P y)", sig, {{"y", "U"}}), F("(R y z)", sig, {{"y", "U"}, {"z", "U"}})}, {{{"y", "U"}}, {{"z", "U"}}}};
    auto s = intuitionistic_dc_axiom(c);
    EXPECT_TRUE(same(s.rendered.lhs, F("(and (imp true (ex (y) (P y))) (all (y) (imp (P y) (ex (z) (R y z)))))", sig)));
    EXPECT_TRUE(same(s.rendered.rhs, F("(imp true (ex (y z) (R y z)))", sig)));
}

// ------------------------------------------------------------ equivalence lemma

TEST(Equivl, AssignmentShape) {
    Signature sig = gen::propositional(4);
    TreeAssignment one = equivl_assignment({{F("p", sig)}});
    EXPECT_EQ(one.height, 1);
    EXPECT_TRUE(is_top(one.label({})));
    EXPECT_TRUE(same(one.label({0}), F("p", sig)));
    TreeAssignment two = equivl_assignment({{F("p", sig), F("q", sig)}, {F("r", sig), F("s", sig)}});
    EXPECT_EQ(two.labels.size(), 7u);
    EXPECT_TRUE(same(two.label({1}), F("q", sig)));
    EXPECT_TRUE(same(two.label({1, 0}), F("r", sig)));
    EXPECT_TRUE(same(two.label({0, 1}), F("s", sig)));
    TreeAssignment rep = equivl_assignment({{F("p", sig), F("p", sig)}, {F("p", sig), F("p", sig)}});
    EXPECT_NO_THROW(rep.validate());
    EXPECT_TRUE(rep.blocks.empty());
}

TEST(Equivl, ClassicalDistributivityIsProvable) {
    Signature sig = gen::propositional(6);
    std::vector<std::string> atoms = {"p", "q", "r", "s", "t", "u"};
    for (int g = 1; g <= 3; ++g) {
        std::vector<std::vector<Formula>> m(g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) m[i].push_back(F(atoms[(i * g + j) % 6], sig));
        Theory T{sig, {}, Fragment::Coherent};
        Proof p = classical_distributivity_proof(m);
        auto r = check_proof(T, p);
        EXPECT_TRUE(r.ok) << g << ": " << r.rule << ": " << r.reason;
        EXPECT_TRUE(same(p.concl, classical_distributivity(m).rendered)) << g;
        EXPECT_TRUE(proof_uses(p, "dist"));
    }
}

// ------------------------------------------------------------ TT from cut

namespace {

// labels chosen bottom-up so that each internal label is the disjunction of its children
TreeAssignment disjunctive_tree(const Signature& sig) {
    TreeAssignment a;
    a.gamma = 2;
    a.height = 2;
    Context y{{"y", "U"}};
    a.labels[{0, 0}] = F("(P c)", sig);
    a.labels[{0, 1}] = F("(R c c)", sig);
    a.labels[{1, 0}] = F("(P y)", sig, y);
    a.labels[{1, 1}] = F("(ex (z) (R y z))", sig, y);
    a.blocks[{1}] = y;
    a.blocks[{1, 1}] = {};
    a.labels[{0}] = disj({a.labels[{0, 0}], a.labels[{0, 1}]});
    a.labels[{1}] = disj({a.labels[{1, 0}], a.labels[{1, 1}]});
    a.labels[{}] = disj({a.labels[{0}], exists(y, a.labels[{1}])});
    a.blocks.erase({1, 1});
    return a;
}

std::vector<Proof> identity_premises(const TreeAssignment& a) {
    std::vector<Proof> out;
    for (auto& s : tt_premises(a)) out.push_back(build::id(s.ctx, s.lhs));
    return out;
}

}  // namespace

TEST(TtFromCut, SingleStep) {
    Signature sig = gen::propositional(2);
    TreeAssignment a;
    a.gamma = 1;
    a.height = 1;
    a.labels[{}] = F("p", sig);
    a.labels[{0}] = F("q", sig);
    Theory T{sig, {{{}, F("p", sig), F("q", sig)}}, Fragment::Coherent};
    Proof p = derive_tt_from_cut(a, {{0}}, {build::axiom(T.axioms[0])});
    auto r = check_proof(T, p);
    EXPECT_TRUE(r.ok) << r.reason;
    EXPECT_TRUE(same(p.concl, tt_rule_instance(a).conclusion));
    EXPECT_FALSE(uses_tree_rule(p));
}

TEST(TtFromCut, FullAndMixedBars) {
    Signature sig = gen::small_first_order();
    Theory T{sig, {}, Fragment::Coherent};
    TreeAssignment a = disjunctive_tree(sig);
    a.validate();
    auto prem = identity_premises(a);
    Bar full = level_nodes(2, 2);
    Proof p = derive_tt_from_cut(a, full, prem);
    auto r = check_proof(T, p);
    EXPECT_TRUE(r.ok) << r.rule << ": " << r.reason;
    EXPECT_TRUE(same(p.concl, tt_rule_instance(a).conclusion));
    EXPECT_FALSE(uses_tree_rule(p));

    Bar mixed = {{0}, {1, 0}, {1, 1}};
    Proof q = derive_tt_from_cut(a, mixed, prem);
    auto rq = check_proof(T, q);
    EXPECT_TRUE(rq.ok) << rq.rule << ": " << rq.reason;
    EXPECT_TRUE(same(q.concl, tt_bar_instance(a, mixed).conclusion));
    ASSERT_EQ(q.concl.rhs->kind, FormulaNode::Or);
    EXPECT_EQ(q.concl.rhs->subs.size(), 3u);
    EXPECT_FALSE(uses_tree_rule(q));

    EXPECT_THROW(derive_tt_from_cut(a, {{0}}, prem), ProvisoError);
    prem[0] = build::id({}, top());
    EXPECT_THROW(derive_tt_from_cut(a, full, prem), ProvisoError);
}

TEST(TtFromCut, ReplacesTheDistributivityRule) {
    Signature sig = gen::propositional(6);
    std::vector<std::string> atoms = {"p", "q", "r", "s", "t", "u"};
    Theory T{sig, {}, Fragment::Coherent};
    for (int g = 1; g <= 3; ++g) {
        std::vector<std::vector<Formula>> m(g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) m[i].push_back(F(atoms[(i * g + j) % 6], sig));
        GuardedTree gt = equivl_premises(m);
        Proof p = derive_tt_from_cut(gt.tree, gt.tree.leaves(), gt.premises);
        auto r = check_proof(T, p);
        EXPECT_TRUE(r.ok) << g << ": " << r.rule << ": " << r.reason;
        EXPECT_TRUE(same(p.concl, tt_rule_instance(gt.tree).conclusion));
        EXPECT_FALSE(uses_tree_rule(p));
    }
}

// ------------------------------------------------------------ Morleyization

TEST(Morleyize, CoherentFamilies) {
    Signature sig = gen::propositional(2);
    Theory T{sig, {{{}, top(), F("(or p q)", sig)}}, Fragment::Coherent};
    Morleyization m = coherent_morleyize(T);
    Formula pq = F("(or p q)", sig), p = F("p", sig), q = F("q", sig);
    EXPECT_TRUE(has_axiom(m.theory, {{}, m.pos(pq), disj({m.pos(p), m.pos(q)})}));
    EXPECT_TRUE(has_axiom(m.theory, {{}, disj({m.pos(p), m.pos(q)}), m.pos(pq)}));
    EXPECT_TRUE(has_axiom(m.theory, {{}, m.pos(p), p}));
    EXPECT_TRUE(has_axiom(m.theory, {{}, p, m.pos(p)}));
    // provable: true |- p or q
    EXPECT_TRUE(has_axiom(m.theory, {{}, m.pos(top()), m.pos(pq)}));
    EXPECT_FALSE(has_axiom(m.theory, {{}, m.pos(top()), m.pos(p)}));
    Morleyization reg = coherent_morleyize(T, Fragment::Regular);
    EXPECT_FALSE(has_axiom(reg.theory, {{}, reg.pos(pq), disj({reg.pos(p), reg.pos(q)})}));
}

TEST(Morleyize, ExistentialFamily) {
    Signature sig = gen::small_first_order(false);
    Formula ex = F("(ex (x) (P x))", sig);
    Theory T{sig, {{{}, top(), ex}}, Fragment::Coherent};
    Morleyization m = coherent_morleyize(T);
    auto [ys, body] = open_quantifier(ex);
    EXPECT_TRUE(has_axiom(m.theory, {{}, m.pos(ex), exists(ys, m.pos(body))}));
    EXPECT_TRUE(has_axiom(m.theory, {{}, exists(ys, m.pos(body)), m.pos(ex)}));
    EXPECT_NE(m.table().find("(ex (x:U) (rel P x))"), std::string::npos);
}

TEST(Morleyize, AtomicTheoryHasNoStructuralFamilies) {
    Signature sig = gen::propositional(2);
    Theory T{sig, {{{}, F("p", sig), F("q", sig)}}, Fragment::Coherent};
    Morleyization m = coherent_morleyize(T);
    // two atom equivalences each way and the one provable entailment
    EXPECT_EQ(m.theory.axioms.size(), 5u);
}

// entailment between named formulas agrees between T and its Morleyization
TEST(Morleyize, CoherentBridge) {
    gen::Rng rng(3);
    for (int i = 0; i < 30; ++i) {
        Signature sig = gen::propositional(3);
        Theory T = gen::random_theory(rng, sig, i % 2 ? Fragment::Coherent : Fragment::Regular, 2);
        Morleyization m = coherent_morleyize(T, T.fragment);
        std::vector<FinStructure> models;
        for (auto& base : all_structures(sig, 1))
            for (auto& M : extend_models(m.theory, base, new_symbols(m, false))) models.push_back(M);
        for (auto& s : m.symbols)
            for (auto& t : m.symbols) {
                bool in_t = tt_entails(T, s.phi, t.phi);
                bool in_m = std::all_of(models.begin(), models.end(), [&](const FinStructure& M) {
                    return satisfies(M, {{}, m.pos(s.phi), m.pos(t.phi)});
                });
                EXPECT_EQ(in_t, in_m) << print(s.phi) << " |- " << print(t.phi);
            }
    }
}

TEST(Morleyize, ClassicalFamilies) {
    Signature sig = gen::small_first_order(false);
    Formula pq = F("(imp (P x) (R x x))", sig, {{"x", "U"}});
    Formula all = F("(all (y) (R x y))", sig, {{"x", "U"}});
    Theory T{sig, {{{{"x", "U"}}, pq, all}}, Fragment::Classical};
    Morleyization m = classical_morleyize(T, {{}, top(), top()});
    Context x{{"x", "U"}};
    Formula p = F("(P x)", sig, x), q = F("(R x x)", sig, x);
    EXPECT_TRUE(has_axiom(m.theory, {x, m.pos(pq), disj2(m.neg(p), m.pos(q))}));
    EXPECT_TRUE(has_axiom(m.theory, {x, disj2(m.neg(p), m.pos(q)), m.pos(pq)}));
    auto [ys, body] = open_quantifier(all);
    EXPECT_TRUE(has_axiom(m.theory, {x, m.neg(all), exists(ys, m.neg(body))}));
    EXPECT_TRUE(has_axiom(m.theory, {x, m.pos(p), p}));
    EXPECT_TRUE(has_axiom(m.theory, {x, conj2(m.pos(p), m.neg(p)), bot()}));
    EXPECT_TRUE(has_axiom(m.theory, {x, top(), disj2(m.pos(p), m.neg(p))}));
    EXPECT_TRUE(has_axiom(m.theory, {x, m.pos(pq), m.pos(all)}));
    EXPECT_EQ(m.theory.fragment, Fragment::Coherent);
    for (auto& a : m.theory.axioms) EXPECT_TRUE(in_fragment(a.lhs, Fragment::Coherent) && in_fragment(a.rhs, Fragment::Coherent));
}

// in every two-valued model of the Morleyized theory, C names phi and D names not phi
TEST(Morleyize, ClassicalBridge) {
    gen::Rng rng(11);
    Signature sig = gen::small_first_order();
    for (int i = 0; i < 12; ++i) {
        Theory T = gen::random_theory(rng, sig, Fragment::Classical, 1);
        gen::FormulaOptions o;
        o.fragment = Fragment::Classical;
        o.depth = 2;
        Sequent goal{{}, gen::random_formula(rng, sig, {}, o), gen::random_formula(rng, sig, {}, o)};
        Morleyization m = classical_morleyize(T, goal);
        int models = 0;
        for (auto& base : all_structures(sig, 2)) {
            bool is_t = model_check(T, base).ok;
            auto ext = extend_models(m.theory, base, new_symbols(m, true));
            EXPECT_EQ(ext.size(), is_t ? 1u : 0u);
            for (auto& N : ext) {
                ++models;
                for (auto& s : m.symbols)
                    for (auto& env : all_envs(N, s.args)) {
                        bool v = holds(N, s.phi, env);
                        EXPECT_EQ(holds(N, m.pos(s.phi), env), v) << print(s.phi);
                        EXPECT_EQ(holds(N, m.neg(s.phi), env), !v) << print(s.phi);
                    }
            }
        }
        (void)models;
    }
}

// ------------------------------------------------------------ encodings

TEST(Encode, PositiveDiagram) {
    Signature sig;
    sig.add_sort("U");
    sig.add_rel({"R", {"U", "U"}});
    FinStructure M;
    M.sig = sig;
    M.carrier["U"] = 1;
    M.init_tables();
    M.set_rel("R", {0, 0}, true);
    Diagram d = positive_diagram(M);
    EXPECT_EQ(d.theory.axioms.size(), 2u);
    EXPECT_TRUE(has_axiom(d.theory, {{}, top(), F("(R c0 c0)", d.theory.sig)}));
    EXPECT_TRUE(has_axiom(d.theory, {{}, top(), F("(= c0 c0)", d.theory.sig)}));

    M.set_rel("R", {0, 0}, false);
    EXPECT_EQ(positive_diagram(M).theory.axioms.size(), 1u);

    M.carrier["U"] = 2;
    M.init_tables();
    M.set_rel("R", {0, 1}, true);
    Diagram two = positive_diagram(M);
    int rs = 0;
    for (auto& a : two.theory.axioms) rs += a.rhs->kind == FormulaNode::Rel;
    EXPECT_EQ(rs, 1);
    EXPECT_TRUE(has_axiom(two.theory, {{}, top(), F("(R c0 c1)", two.theory.sig)}));
    // the structure, with constants named, satisfies its own diagram
    FinStructure N = M;
    N.sig = two.theory.sig;
    N.funcs["c0"] = {0};
    N.funcs["c1"] = {1};
    EXPECT_TRUE(model_check(two.theory, N).ok);
}

TEST(Encode, DiagramWithFunctions) {
    Signature sig = gen::small_first_order();
    FinStructure M;
    M.sig = sig;
    M.carrier["U"] = 2;
    M.init_tables();
    M.funcs["c"] = {1};
    Diagram d = positive_diagram(M);
    EXPECT_TRUE(has_axiom(d.theory, {{}, top(), F("(= c c1)", d.theory.sig)}));
}

namespace {

std::set<std::vector<int>> branch_sets(const std::vector<int>& parent) {
    Theory T = encode_branch_theory(parent);
    std::set<std::vector<int>> out;
    for (auto& M : all_structures(T.sig, 2))
        if (model_check(T, M).ok) out.insert(p_extension(M, static_cast<int>(parent.size()), branch_constant));
    return out;
}

// cofinal branches computed independently: paths to the deepest nodes
std::set<std::vector<int>> expected_branches(const std::vector<int>& parent) {
    std::vector<int> depth(parent.size(), 0);
    for (size_t k = 1; k < parent.size(); ++k) depth[k] = depth[parent[k]] + 1;
    int h = *std::max_element(depth.begin(), depth.end());
    std::set<std::vector<int>> out;
    for (size_t k = 0; k < parent.size(); ++k) {
        if (depth[k] != h) continue;
        std::vector<int> b;
        for (int n = static_cast<int>(k); n >= 0; n = n ? parent[n] : -1) b.push_back(n);
        std::sort(b.begin(), b.end());
        out.insert(b);
    }
    return out;
}

}  // namespace

TEST(Encode, BranchTheory) {
    EXPECT_EQ(branch_sets({-1, 0, 1, 0, 3}).size(), 2u);
    EXPECT_EQ(branch_sets({-1, 0, 1}).size(), 1u);
    gen::Rng rng(5);
    for (int i = 0; i < 8; ++i) {
        int n = gen::uniform(rng, 1, 6);
        std::vector<int> parent{-1};
        for (int k = 1; k < n; ++k) parent.push_back(gen::uniform(rng, 0, k - 1));
        EXPECT_EQ(branch_sets(parent), expected_branches(parent));
    }
}

TEST(Encode, UltrafilterTheory) {
    auto models = [](const FinLattice& L) {
        Theory T = encode_ultrafilter_theory(L);
        std::set<std::vector<int>> out;
        for (auto& M : all_structures(T.sig, 2))
            if (model_check(T, M).ok) out.insert(p_extension(M, L.n, ultrafilter_constant));
        return out;
    };
    FinLattice two = lattices::chain(2);
    auto m2 = models(two);
    ASSERT_EQ(m2.size(), 1u);
    EXPECT_EQ(*m2.begin(), std::vector<int>{two.top});
    for (auto L : {lattices::chain(3), lattices::diamond(), lattices::boolean(2)}) {
        std::set<std::vector<int>> want;
        for (auto& F : prime_filters(L)) {
            bool decides = true;
            for (int a = 0; a < L.n; ++a)
                if (!F.contains(a) && !F.contains(*L.pseudo_complement(a))) decides = false;
            if (!decides) continue;
            std::vector<int> s;
            for (int a = 0; a < L.n; ++a)
                if (F.contains(a)) s.push_back(a);
            want.insert(s);
        }
        EXPECT_EQ(models(L), want);
    }
    EXPECT_THROW(encode_ultrafilter_theory(lattices::m3()), std::invalid_argument);
}
