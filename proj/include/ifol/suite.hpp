#ifndef IFOL_SUITE_HPP
#define IFOL_SUITE_HPP

// Acceptance checks shared by the acceptance binary and `ifol suite`. The
// oracles here (truth tables, up-set semantics, the pairing recursion, branch
// enumeration) are written against the definitions, not the modules.

#include <chrono>
#include <map>
#include <sstream>

#include "gen.hpp"
#include "sheaf.hpp"
#include "transforms.hpp"

namespace ifol::suite {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = true;
    std::string detail;          // counts, deterministic given the seed
    std::string counterexample;  // re-readable text form of the first failure, if any
    double seconds = 0;
};

namespace detail {

struct Tally {
    CriterionResult& r;
    void fail(const std::string& what, const std::string& cx = "") {
        if (r.pass) {
            r.detail = what;
            r.counterexample = cx;
        }
        r.pass = false;
    }
};

inline std::string seq_text(const Sequent& s) { return print(s); }

// classical value of a propositional formula, atoms indexed by their position in sig
inline bool truth(const Formula& f, const Signature& sig, unsigned v) {
    switch (f->kind) {
        case FormulaNode::Rel:
            for (size_t i = 0; i < sig.rels.size(); ++i)
                if (sig.rels[i].name == f->name) return v >> i & 1;
            throw std::logic_error("unknown atom " + f->name);
        case FormulaNode::And:
            return std::all_of(f->subs.begin(), f->subs.end(), [&](const Formula& s) { return truth(s, sig, v); });
        case FormulaNode::Or:
            return std::any_of(f->subs.begin(), f->subs.end(), [&](const Formula& s) { return truth(s, sig, v); });
        case FormulaNode::Imp: return !truth(f->subs[0], sig, v) || truth(f->subs[1], sig, v);
        default: throw std::logic_error("not propositional");
    }
}

inline bool tt_entails(const Theory& T, const Formula& a, const Formula& b) {
    for (unsigned v = 0; v < (1u << T.sig.rels.size()); ++v) {
        bool model = std::all_of(T.axioms.begin(), T.axioms.end(),
                                 [&](const Sequent& s) { return !truth(s.lhs, T.sig, v) || truth(s.rhs, T.sig, v); });
        if (model && truth(a, T.sig, v) && !truth(b, T.sig, v)) return false;
    }
    return true;
}

// propositional truth set over a tree, as a bitmask of nodes; implication via up-sets
inline unsigned upset_value(const KripkeModel& K, const Formula& f) {
    int n = K.size();
    unsigned all = (1u << n) - 1;
    switch (f->kind) {
        case FormulaNode::Rel: {
            unsigned m = 0;
            for (int k = 0; k < n; ++k)
                if (K.worlds[k].holds_rel(f->name, {})) m |= 1u << k;
            return m;
        }
        case FormulaNode::And: {
            unsigned m = all;
            for (auto& s : f->subs) m &= upset_value(K, s);
            return m;
        }
        case FormulaNode::Or: {
            unsigned m = 0;
            for (auto& s : f->subs) m |= upset_value(K, s);
            return m;
        }
        case FormulaNode::Imp: {
            unsigned a = upset_value(K, f->subs[0]), b = upset_value(K, f->subs[1]), m = 0;
            for (int k = 0; k < n; ++k) {
                unsigned up = 0;
                for (int l = 0; l < n; ++l)
                    if (K.le(k, l)) up |= 1u << l;
                if ((up & a & ~b) == 0) m |= 1u << k;
            }
            return m;
        }
        default: throw std::logic_error("not propositional");
    }
}

inline bool root_refutes(const KripkeModel& K, const Sequent& s) {
    unsigned l = upset_value(K, s.lhs), r = upset_value(K, s.rhs);
    return (l & ~r) != 0;
}

inline std::vector<FinStructure> all_structures(const Signature& sig, int bound) {
    Theory T;
    T.sig = sig;
    EnumerateOptions o;
    o.bound = bound;
    o.up_to_iso = false;
    o.limit = 1u << 22;
    return enumerate_models(T, o);
}

inline std::vector<std::string> new_symbols(const Morleyization& m, bool d_first_for_forall) {
    std::vector<std::string> order;
    for (auto it = m.symbols.rbegin(); it != m.symbols.rend(); ++it) {
        bool flip = d_first_for_forall && it->phi->kind == FormulaNode::Forall;
        if (flip && !it->neg.empty()) order.push_back(it->neg);
        order.push_back(it->pos);
        if (!flip && !it->neg.empty()) order.push_back(it->neg);
    }
    return order;
}

inline long long pairing_by_recursion(long long b, long long g, std::map<std::pair<long long, long long>, long long>& memo) {
    auto key = std::make_pair(b, g);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    long long m = b < g ? g : b, s = 0;
    for (long long b2 = 0; b2 < m; ++b2)
        for (long long g2 = 0; g2 < m; ++g2) s = std::max(s, pairing_by_recursion(b2, g2, memo) + 1);
    long long v = b < g ? s + b : s + b + g;
    memo[key] = v;
    return v;
}

inline std::vector<int> random_tree(gen::Rng& rng, int max_nodes) {
    int n = gen::uniform(rng, 1, max_nodes);
    std::vector<int> parent{-1};
    for (int k = 1; k < n; ++k) parent.push_back(gen::uniform(rng, 0, k - 1));
    return parent;
}

inline std::set<std::vector<int>> expected_branches(const std::vector<int>& parent) {
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

inline Signature two_unary() {
    Signature sig;
    sig.add_sort("U");
    sig.add_rel({"P", {"U"}});
    sig.add_rel({"Q", {"U"}});
    sig.add_func({"c", {}, "U"});
    return sig;
}

inline Signature relational() {
    Signature sig;
    sig.add_sort("U");
    sig.add_rel({"P", {"U"}});
    sig.add_rel({"R", {"U", "U"}});
    sig.add_rel({"q", {}});
    return sig;
}

const std::vector<Fragment> kFragments = {Fragment::Regular, Fragment::Coherent, Fragment::FirstOrder, Fragment::Classical};

}  // namespace detail

// ------------------------------------------------------------ criteria

inline void kernel_soundness(CriterionResult& r, gen::Rng& rng) {
    detail::Tally t{r};
    const int pool = 50, per_theory = 10;
    size_t kripke_checks = 0, tarski_checks = 0;
    int proofs = 0;
    KripkeBounds kb;
    kb.max_nodes = 3;
    kb.max_domain = 2;
    EnumerateOptions eo;
    eo.bound = 3;
    for (int i = 0; i < pool && r.pass; ++i) {
        Fragment fr = detail::kFragments[i % 4];
        Signature sig = (i / 4) % 2 ? gen::propositional(3) : detail::two_unary();
        Theory T = gen::random_theory(rng, sig, fr, 2);
        // Kripke semantics validates the intuitionistic rules only
        std::vector<KripkeModel> ks;
        if (fr != Fragment::Classical) ks = kripke_models(T, kb);
        std::vector<FinStructure> ms = enumerate_models(T, eo);
        for (int j = 0; j < per_theory; ++j, ++proofs) {
            gen::ProofOptions po;
            po.fragment = fr;
            po.depth = 3;
            po.max_gamma = po.max_height = 2;
            Proof p = gen::random_proof(rng, T, po);
            auto c = check_proof(T, p);
            if (!c.ok) {
                t.fail("generated proof rejected: " + c.rule + ": " + c.reason, print(p));
                break;
            }
            for (auto& K : ks) {
                ++kripke_checks;
                if (!kripke_forces_sequent(K, 0, p.concl)) {
                    t.fail("Kripke countermodel to " + print(p.concl), to_string(kripke_sexpr(K)));
                    break;
                }
            }
            for (auto& M : ms) {
                ++tarski_checks;
                if (!satisfies(M, p.concl)) {
                    t.fail("Tarski countermodel to " + print(p.concl), to_string(structure_sexpr(M)));
                    break;
                }
            }
            if (!r.pass) break;
        }
    }
    if (r.pass)
        r.detail = std::to_string(proofs) + " proofs; " + std::to_string(kripke_checks) + " Kripke and " + std::to_string(tarski_checks) +
                   " Tarski model checks";
}

inline void derived_rules(CriterionResult& r, gen::Rng&) {
    detail::Tally t{r};
    Signature sig = gen::propositional(6);
    std::vector<std::string> atoms = {"p", "q", "r", "s", "t", "u"};
    Theory T{sig, {}, Fragment::Coherent};
    for (int g = 1; g <= 3; ++g) {
        std::vector<std::vector<Formula>> m(g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) m[i].push_back(parse_formula(atoms[(i * g + j) % 6], &sig));
        Proof d = classical_distributivity_proof(m);
        auto cd = check_proof(T, d);
        if (!cd.ok) t.fail("gamma " + std::to_string(g) + ": distributivity proof rejected: " + cd.reason, print(d));
        if (!same(d.concl, classical_distributivity(m).rendered)) t.fail("gamma " + std::to_string(g) + ": wrong distributivity conclusion");
        GuardedTree gt = equivl_premises(m);
        Proof p = derive_tt_from_cut(gt.tree, gt.tree.leaves(), gt.premises);
        auto cp = check_proof(T, p);
        if (!cp.ok) t.fail("gamma " + std::to_string(g) + ": cut derivation rejected: " + cp.reason, print(p));
        if (!same(p.concl, tt_rule_instance(gt.tree).conclusion))
            t.fail("gamma " + std::to_string(g) + ": full-bar conclusion differs from the rule instance", print(p.concl));
    }
    if (r.pass) r.detail = "gamma 1..3 assembled and checked";
}

inline void deduction_theorem(CriterionResult& r, gen::Rng& rng) {
    detail::Tally t{r};
    int through = 0;
    for (int i = 0; i < 200 && r.pass; ++i) {
        Fragment fr = detail::kFragments[i % 4];
        Signature sig = (i / 4) % 2 ? gen::propositional(3) : gen::small_first_order();
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
        if (!check_proof(plus, p).ok) {
            t.fail("generated proof rejected", print(p));
            break;
        }
        Proof d = deduction(T, s, p);
        auto c = check_proof(T, d);
        if (!c.ok) t.fail("output rejected: " + c.rule + ": " + c.reason, print(p));
        else if (!same(d.concl, Sequent{p.concl.ctx, conj2(p.concl.lhs, s), p.concl.rhs})) t.fail("wrong endsequent", print(d.concl));
        std::function<bool(const Proof&)> uses = [&](const Proof& q) {
            if (q.rule == "axiom" && is_top(q.concl.lhs) && same(q.concl.rhs, s)) return true;
            return std::any_of(q.premises.begin(), q.premises.end(), uses);
        };
        through += uses(p);
    }
    if (r.pass) r.detail = "200 triples, " + std::to_string(through) + " using the hypothesis";
}

inline void forcing_agreement(CriterionResult& r, gen::Rng& rng) {
    detail::Tally t{r};
    Signature sig = gen::small_first_order();
    gen::FormulaOptions o;
    o.depth = 3;
    Context ctx{{"y", "U"}};
    int pairs = 0, models = 0, triples = 0;
    while (pairs < 1000 && r.pass) {
        KripkeModel K = gen::random_kripke(rng, sig, 4, 2);
        CatStructure C = to_cat_structure(K);
        ++models;
        for (int f = 0; f < 4 && r.pass; ++f) {
            Formula phi = gen::random_formula(rng, sig, ctx, o);
            Subfunctor sub = interpret(C, ctx, phi);
            ++pairs;
            for (int k = 0; k < K.size(); ++k)
                for (int y = 0; y < K.worlds[k].size("U"); ++y) {
                    CatEnv e = CatEnv::of(ctx, {y});
                    bool a = kripke_force(K, k, phi, e);
                    if (a != kj_force(C, k, e, phi) || a != sub.contains(k, y))
                        t.fail("disagreement on " + print(phi) + " at node " + std::to_string(k), to_string(kripke_sexpr(K)));
                    ++triples;
                }
        }
    }
    if (r.pass) r.detail = std::to_string(pairs) + " (model, formula) pairs over " + std::to_string(models) + " models, " +
                   std::to_string(triples) + " (node, element) checks";
}

inline void transport(CriterionResult& r, gen::Rng&) {
    detail::Tally t{r};
    const size_t limit = 1u << 20;
    auto cats = acyclic_categories(3, 3);
    size_t checks = 0;
    for (auto& M : cats) {
        ChainPoset R = chain_poset(M);
        std::vector<Presheaf> fs{terminal_presheaf(M)};
        for (int c = 0; c < M.n; ++c) fs.push_back(representable(M, c));
        for (auto& F : fs) {
            if (all_subfunctors(M, F, limit).size() >= limit) t.fail("subfunctor enumeration truncated", to_string(category_sexpr(M)));
            auto a = verify_transport(M, R, F, limit);
            checks += a.checks;
            if (!a.ok) t.fail(a.failure, to_string(category_sexpr(M)) + "\n" + to_string(presheaf_sexpr(F, M)));
            std::vector<const Presheaf*> two = {&F, &F};
            Presheaf E = product(M, two);
            if (all_subfunctors(M, E, limit).size() >= limit) t.fail("subfunctor enumeration truncated", to_string(category_sexpr(M)));
            auto b = verify_transport_along(M, R, E, F, projection(M, two, 1), limit);
            checks += b.checks;
            if (!b.ok) t.fail(b.failure, to_string(category_sexpr(M)) + "\n" + to_string(presheaf_sexpr(F, M)));
        }
    }
    if (r.pass) r.detail = std::to_string(cats.size()) + " categories, " + std::to_string(checks) + " checks";
}

inline void sheaf_embedding(CriterionResult& r, gen::Rng&) {
    detail::Tally t{r};
    int lats = 0;
    size_t families = 0;
    for (auto& L : lattices::all_up_to(6)) {
        if (!is_distributive(L)) continue;
        ++lats;
        EmbeddingReport rep = check_embedding(L);
        for (auto& i : rep.items)
            if (!i.ok || !i.applicable) t.fail("embedding item " + i.name + ": " + i.detail, to_string(lattice_sexpr(L)));
        Site S = joint_cover_site(L);
        Topology J = saturate(S);
        Presheaf one = terminal_presheaf(S.cat);
        std::vector<Subfunctor> y;
        for (int a = 0; a < L.n; ++a) y.push_back(yoneda_sub(L, a));
        for (int g = 1; g <= 2; ++g)
            for (int h = 1; h <= 2; ++h) {
                int total = 0, lvl = 1;
                for (int d = 0; d <= h; ++d, lvl *= g) total += lvl;
                std::vector<int> lab(total);
                // every labelling by subsheaves of 1, pruned to those whose premises hold in L
                std::function<void(int)> go = [&](int i) {
                    if (!r.pass) return;
                    if (i == total) {
                        SheafFamily fam{g, h, {}};
                        for (int a : lab) fam.labels.push_back(y[a]);
                        ++families;
                        TTVerdict v = check_tt_in_sheaves(S.cat, J, one, fam);
                        if (!v.ok || !v.premises_hold) {
                            std::string ls;
                            for (int a : lab) ls += L.name(a) + " ";
                            t.fail("tree transitivity fails (" + v.detail + ") for labels " + ls, to_string(lattice_sexpr(L)));
                        }
                        return;
                    }
                    for (int v = 0; v < L.n; ++v) {
                        lab[i] = v;
                        if (i > 0 && (i - 1) % g == g - 1) {
                            int parent = (i - 1) / g, j = L.bottom;
                            for (int c = 0; c < g; ++c) j = L.join(j, lab[g * parent + 1 + c]);
                            if (!L.leq(lab[parent], j)) continue;
                        }
                        go(i + 1);
                    }
                };
                go(0);
            }
    }
    if (r.pass) r.detail = std::to_string(lats) + " lattices, " + std::to_string(families) + " premise-satisfying families";
}

inline void beth_claim(CriterionResult& r, gen::Rng&) {
    detail::Tally t{r};
    struct Instance {
        std::string name;
        FinLattice L;
        std::vector<int> atoms;  // p, q, r... true on these principal down-sets
    };
    std::vector<Instance> sites = {{"diamond", lattices::diamond(), {1, 2}},
                                   {"chain3", lattices::chain(3), {1}},
                                   {"boolean3", lattices::boolean(3), {1, 2, 4}}};
    std::vector<std::vector<std::string>> formula_sets = {
        {"(or p q)"}, {"(or p q)", "(imp p q)", "(not p)"}, {"p", "q"}, {"(and p q)", "(or p q)"}, {"(imp q p)", "(not q)"}};
    int exhausted = 0, built = 0;
    size_t pairs = 0;
    for (auto& inst : sites) {
        Site site = joint_cover_site(inst.L);
        Topology J = saturate(site);
        CatStructure S;
        S.cat = site.cat;
        S.sig = gen::propositional(3);
        for (size_t i = 0; i < 3; ++i) {
            std::string a(1, static_cast<char>('p' + i));
            S.rels[a] = yoneda_sub(inst.L, i < inst.atoms.size() ? inst.atoms[i] : inst.L.bottom);
        }
        S.validate();
        for (auto& fs : formula_sets) {
            std::vector<Formula> phis;
            for (auto& f : fs) phis.push_back(parse_formula(f, &S.sig));
            for (int root = 0; root < inst.L.n; ++root)
                for (int h : {2, 4, 6}) {
                    BethBuild b = beth_build(S, site, root, phis, h);
                    ++built;
                    if (!b.exhausted) continue;
                    ++exhausted;
                    for (int p = 0; p < b.model.frame.size(); ++p)
                        for (size_t fi = 0; fi < b.formulas.size(); ++fi) {
                            if (!b.stable[p][fi]) continue;
                            const Formula& f = b.formulas[fi];
                            if (std::none_of(phis.begin(), phis.end(), [&](const Formula& g) { return same(f, g); })) continue;
                            ++pairs;
                            if (kj_force(S, b.object[p], {}, f, &J) != beth_force(b.model, p, f))
                                t.fail(inst.name + ": " + print(f) + " at node " + std::to_string(p) + " of the build from object " +
                                           inst.L.name(root),
                                       to_string(beth_sexpr(b.model)));
                        }
                }
        }
    }
    if (exhausted < 20) t.fail("only " + std::to_string(exhausted) + " exhausted instances");
    if (r.pass)
        r.detail = std::to_string(exhausted) + " of " + std::to_string(built) + " builds exhausted; " + std::to_string(pairs) +
                   " stable pairs agree";
}

inline void lattice_suite(CriterionResult& r, gen::Rng&) {
    detail::Tally t{r};
    auto text = [](const FinLattice& L) { return to_string(lattice_sexpr(L)); };
    // a reported witness must actually violate the law it names
    auto witness_ok = [](const FinLattice& L, const LatticeVerdict& v) {
        if (v.law == "distributivity") {
            if (v.witness.empty()) return false;
            int a = v.witness[0];
            std::vector<int> fam(v.witness.begin() + 1, v.witness.end()), ab;
            for (int b : fam) ab.push_back(L.meet(a, b));
            return !L.leq(L.meet(a, L.join(fam)), L.join(ab));
        }
        return v.law == "tree-transitivity";
    };
    int filters = 0, lats = 0;
    try {
        for (auto& L : lattices::all_up_to(6)) {
            ++lats;
            bool d = is_distributive(L);
            if (d && !check_distributivity(L, 2, 2).holds) t.fail("distributive lattice rejected", text(L));
            if (representation_map(L).injective != d) t.fail("representation injectivity differs from distributivity", text(L));
        }
        for (auto& M : {lattices::m3(), lattices::n5()}) {
            auto v = check_distributivity(M, 2, 2);
            if (v.holds || !witness_ok(M, v)) t.fail("non-distributive lattice accepted or bad witness", text(M));
        }
        std::vector<FinLattice> those;
        for (auto& L : lattices::all_up_to(6))
            if (is_distributive(L)) those.push_back(L);
        those.push_back(lattices::m3());
        those.push_back(lattices::n5());
        for (auto& L : those)
            for (auto& F : proper_filters(L)) {
                ++filters;
                auto q = quotient_by_filter(L, F);
                for (int a = 0; a < L.n; ++a)
                    if ((q.theta[a] == q.K.top) != F.contains(a)) t.fail("preimage of top differs from the filter", text(L));
            }
    } catch (const std::exception& e) {
        t.fail(std::string("exception: ") + e.what());
    }
    if (r.pass) r.detail = std::to_string(lats) + " lattices, " + std::to_string(filters) + " proper filters";
}

inline void pairing_suite(CriterionResult& r, gen::Rng&) {
    detail::Tally t{r};
    std::map<std::pair<long long, long long>, long long> memo;
    std::set<long long> seen;
    for (long long b = 0; b <= 20; ++b)
        for (long long g = 0; g <= 20; ++g) {
            long long v = pairing(b, g);
            std::string at = "f(" + std::to_string(b) + "," + std::to_string(g) + ")";
            if (v != detail::pairing_by_recursion(b, g, memo)) t.fail(at + " differs from the recursion");
            if (v < g) t.fail(at + " below gamma");
            if (!seen.insert(v).second) t.fail(at + " repeats a value");
        }
    std::vector<std::tuple<long long, long long, long long>> spots = {{0, 0, 0}, {1, 0, 2}, {0, 2, 4}, {2, 2, 8}};
    for (auto [b, g, want] : spots)
        if (pairing(b, g) != want || detail::pairing_by_recursion(b, g, memo) != want)
            t.fail("spot value f(" + std::to_string(b) + "," + std::to_string(g) + ") != " + std::to_string(want));
    if (r.pass) r.detail = "441 values and 4 spot values";
}

inline void known_theorems(CriterionResult& r, gen::Rng&) {
    detail::Tally t{r};
    Signature sig = gen::propositional(3);
    Theory T{sig, {}, Fragment::FirstOrder};
    KripkeBounds two;
    two.max_nodes = 2;
    for (auto goal : {"(seq () true (or p (not p)))", "(seq () (not (not p)) p)", "(seq () true (imp (imp (imp p q) p) p))"}) {
        Sequent s = parse_sequent(goal, &sig);
        auto res = countermodel_search(T, s, two);
        if (!res.found || res.model.size() != 2 || res.model.parent != std::vector<int>{-1, 0} || !detail::root_refutes(res.model, s))
            t.fail(std::string("no 2-chain refutation of ") + goal);
    }
    KripkeBounds three;
    three.max_nodes = 3;
    std::vector<std::string> theorems = {
        "(seq () true (imp p p))",
        "(seq () true (not (not (or p (not p)))))",
        "(seq () (and p q) (and q p))",
        "(seq () (or p q) (or q p))",
        "(seq () true (imp p (imp q p)))",
        "(seq () p (not (not p)))",
        "(seq () (not (not (not p))) (not p))",
        "(seq () true (imp (imp p q) (imp (not q) (not p))))",
        "(seq () (and p (or q r)) (or (and p q) (and p r)))",
        "(seq () (not (or p q)) (and (not p) (not q)))",
    };
    size_t examined = 0;
    for (auto& g : theorems) {
        auto res = countermodel_search(T, parse_sequent(g, &sig), three);
        examined += res.examined;
        if (res.found) t.fail("countermodel to the theorem " + g, to_string(kripke_sexpr(res.model)));
        else if (res.truncated) t.fail("search did not exhaust on " + g);
    }
    // disjunction property: countermodels to p and to q smash into one for p or q
    auto no_p = countermodel_search(T, parse_sequent("(seq () true p)", &sig), two);
    auto no_q = countermodel_search(T, parse_sequent("(seq () true q)", &sig), two);
    if (!no_p.found || !no_q.found) t.fail("no countermodels for the atoms");
    else {
        KripkeModel M = smash({no_p.model, no_q.model}, sig);
        Sequent pq = parse_sequent("(seq () true (or p q))", &sig);
        if (!is_kripke_model_of(M, T) || !detail::root_refutes(M, pq)) t.fail("smash does not refute p or q", to_string(kripke_sexpr(M)));
    }
    if (r.pass) r.detail = "3 refutations, 10 theorems exhausted (" + std::to_string(examined) + " candidates), smash refutes p or q";
}

inline void morleyization_bridges(CriterionResult& r, gen::Rng& rng) {
    detail::Tally t{r};
    size_t pairs = 0;
    Signature psig = gen::propositional(3);
    auto bases = detail::all_structures(psig, 1);
    for (int i = 0; i < 100 && r.pass; ++i) {
        Theory T = gen::random_theory(rng, psig, i % 2 ? Fragment::Coherent : Fragment::Regular, 2);
        Morleyization m = coherent_morleyize(T, T.fragment);
        std::vector<FinStructure> models;
        for (auto& base : bases)
            for (auto& M : extend_models(m.theory, base, detail::new_symbols(m, false))) models.push_back(M);
        for (auto& s : m.symbols)
            for (auto& u : m.symbols) {
                ++pairs;
                bool in_t = detail::tt_entails(T, s.phi, u.phi);
                bool in_m = std::all_of(models.begin(), models.end(),
                                        [&](const FinStructure& M) { return satisfies(M, {{}, m.pos(s.phi), m.pos(u.phi)}); });
                if (in_t != in_m) t.fail("entailment " + print(s.phi) + " |- " + print(u.phi) + " differs", m.table());
            }
    }
    Signature sig = gen::small_first_order();
    auto structures = detail::all_structures(sig, 2);
    size_t checked = 0;
    for (int i = 0; i < 50 && r.pass; ++i) {
        Theory T = gen::random_theory(rng, sig, Fragment::Classical, 1);
        gen::FormulaOptions o;
        o.fragment = Fragment::Classical;
        o.depth = 2;
        Sequent goal{{}, gen::random_formula(rng, sig, {}, o), gen::random_formula(rng, sig, {}, o)};
        Morleyization m = classical_morleyize(T, goal);
        auto order = detail::new_symbols(m, true);
        for (auto& base : structures) {
            bool is_t = model_check(T, base).ok;
            auto ext = extend_models(m.theory, base, order);
            if (ext.size() != (is_t ? 1u : 0u)) t.fail("expansions of a structure: " + std::to_string(ext.size()), to_string(structure_sexpr(base)));
            for (auto& N : ext)
                for (auto& s : m.symbols)
                    for (auto& env : all_envs(N, s.args)) {
                        ++checked;
                        bool v = holds(N, s.phi, env);
                        if (holds(N, m.pos(s.phi), env) != v || holds(N, m.neg(s.phi), env) == v)
                            t.fail("names disagree with " + print(s.phi), to_string(structure_sexpr(N)));
                    }
        }
    }
    if (r.pass)
        r.detail = std::to_string(pairs) + " coherent entailments agree; " + std::to_string(checked) + " classical name checks over " +
                   std::to_string(structures.size()) + " structures";
}

inline void encodings(CriterionResult& r, gen::Rng& rng) {
    detail::Tally t{r};
    int branches = 0;
    for (int i = 0; i < 20 && r.pass; ++i) {
        auto parent = detail::random_tree(rng, 6);
        Theory T = encode_branch_theory(parent);
        std::set<std::vector<int>> got;
        int models = 0;
        for (auto& M : detail::all_structures(T.sig, 2))
            if (model_check(T, M).ok) {
                ++models;
                got.insert(p_extension(M, static_cast<int>(parent.size()), branch_constant));
            }
        auto want = detail::expected_branches(parent);
        branches += static_cast<int>(want.size());
        std::string tree;
        for (int p : parent) tree += std::to_string(p) + " ";
        if (got != want) t.fail("branch models differ from cofinal branches for parents " + tree);
    }
    Signature sig = detail::relational();
    gen::FormulaOptions o;
    o.fragment = Fragment::Regular;
    o.depth = 3;
    Context ctx{{"x", "U"}};
    int trials = 0;
    while (trials < 1000 && r.pass) {
        int n = gen::uniform(rng, 1, 4);
        std::vector<FinStructure> fam;
        for (int i = 0; i < n; ++i) fam.push_back(gen::random_structure(rng, sig, 3));
        SetFilter F = SetFilter::principal(n, static_cast<unsigned>(gen::uniform(rng, 0, (1 << n) - 1)));
        auto R = reduced_product(fam, F);
        for (int k = 0; k < 10; ++k, ++trials) {
            Formula f = gen::random_formula(rng, sig, ctx, o);
            std::vector<int> cls{gen::uniform(rng, 0, R.M.size("U") - 1)};
            auto l = los_check(fam, F, R, f, ctx, cls);
            if (l.in_product != l.in_filter) t.fail("los fails on " + print(f), to_string(structure_sexpr(R.M)));
        }
    }
    if (r.pass) r.detail = "20 trees (" + std::to_string(branches) + " branches); " + std::to_string(trials) + " los trials";
}

// ------------------------------------------------------------ runner

struct Criterion {
    int id;
    const char* name;
    void (*run)(CriterionResult&, gen::Rng&);
};

inline const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "kernel-soundness", kernel_soundness},   {2, "derived-rules", derived_rules},
        {3, "deduction", deduction_theorem},         {4, "forcing-agreement", forcing_agreement},
        {5, "chain-transport", transport},           {6, "sheaf-embedding", sheaf_embedding},
        {7, "beth-claim", beth_claim},               {8, "lattice", lattice_suite},
        {9, "pairing", pairing_suite},               {10, "known-theorems", known_theorems},
        {11, "morleyization-bridges", morleyization_bridges}, {12, "encodings", encodings},
    };
    return all;
}

/** Run one criterion by id; each criterion seeds its own generator from seed and id. */
inline CriterionResult run(int id, uint64_t seed) {
    for (auto& c : criteria()) {
        if (c.id != id) continue;
        CriterionResult r;
        r.id = id;
        r.name = c.name;
        gen::Rng rng(seed * 1000003 + static_cast<uint64_t>(id));
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(r, rng);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    throw std::invalid_argument("no criterion " + std::to_string(id));
}

inline std::string result_line(const CriterionResult& r) {
    std::ostringstream o;
    o << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail;
    return o.str();
}

}  // namespace ifol::suite

#endif
