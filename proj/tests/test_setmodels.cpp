#include <gtest/gtest.h>

#include "ifol/gen.hpp"
#include "ifol/transforms.hpp"

using namespace ifol;

namespace {

Formula F(const std::string& s, const Signature& sig, const Context& ctx = {}) { return parse_formula(s, &sig, ctx); }

Signature unary_r() {
    Signature sig;
    sig.add_sort("U");
    sig.add_rel({"R", {"U"}});
    return sig;
}

// plain binary product for single-sorted relational signatures, built directly
FinStructure pair_product(const FinStructure& A, const FinStructure& B) {
    FinStructure P;
    P.sig = A.sig;
    int a = A.size("U"), b = B.size("U");
    P.carrier["U"] = a * b;
    P.init_tables();
    auto split = [&](int x) { return std::make_pair(x / b, x % b); };
    for (auto& r : P.sig.rels)
        for_tuples(P.radix(r.args), [&](const std::vector<int>& xs) {
            std::vector<int> l, m;
            for (int x : xs) {
                l.push_back(split(x).first);
                m.push_back(split(x).second);
            }
            P.set_rel(r.name, xs, A.holds_rel(r.name, l) && B.holds_rel(r.name, m));
        });
    return P;
}

Signature relational() {
    Signature sig;
    sig.add_sort("U");
    sig.add_rel({"P", {"U"}});
    sig.add_rel({"R", {"U", "U"}});
    sig.add_rel({"q", {}});
    return sig;
}

}  // namespace

TEST(SetModels, Evaluation) {
    Signature sig = unary_r();
    FinStructure M;
    M.sig = sig;
    M.carrier["U"] = 2;
    M.init_tables();
    M.set_rel("R", {0}, true);
    EXPECT_TRUE(holds(M, top()));
    EXPECT_TRUE(holds(M, F("(ex (x) (R x))", sig)));
    EXPECT_FALSE(holds(M, F("(all (x) (R x))", sig)));
    EXPECT_FALSE(holds(M, bot()));
    EXPECT_TRUE(holds(exploding_structure(sig), bot()));
    EXPECT_TRUE(holds(M, F("(R x)", sig, {{"x", "U"}}), {{"x", 0}}));
    EXPECT_FALSE(holds(M, F("(R x)", sig, {{"x", "U"}}), {{"x", 1}}));
}

TEST(SetModels, EnumerationExamples) {
    Signature sig = gen::propositional(2);
    Theory T{sig, {{{}, top(), F("p", sig)}}, Fragment::Coherent};
    auto ms = enumerate_models(T);
    ASSERT_EQ(ms.size(), 2u);
    for (auto& M : ms) EXPECT_TRUE(M.holds_rel("p", {}));

    Theory bad{sig, {{{}, top(), bot()}}, Fragment::Coherent};
    EXPECT_TRUE(enumerate_models(bad).empty());
    EnumerateOptions o;
    o.include_exploding = true;
    auto ex = enumerate_models(bad, o);
    ASSERT_EQ(ex.size(), 1u);
    EXPECT_TRUE(ex[0].exploding);

    EnumerateOptions two;
    two.min_size = 2;
    two.bound = 2;
    EXPECT_EQ(enumerate_models(encode_branch_theory({-1, 0, 1, 0, 3}), two).size(), 2u);
}

// isomorphism classes of one unary predicate: size 1 gives 2, size 2 gives 3, size 3 gives 4
TEST(SetModels, EnumerationIsUpToIsomorphism) {
    Theory T{unary_r(), {}, Fragment::Coherent};
    EnumerateOptions o;
    o.bound = 3;
    EXPECT_EQ(enumerate_models(T, o).size(), 2u + 3 + 4);
    o.up_to_iso = false;
    EXPECT_EQ(enumerate_models(T, o).size(), 2u + 4 + 8);
}

TEST(SetModels, KernelProofsHoldInModels) {
    gen::Rng rng(17);
    Signature sig = gen::small_first_order();
    for (int i = 0; i < 60; ++i) {
        Fragment fr = i % 2 ? Fragment::Classical : Fragment::Coherent;
        Theory T = gen::random_theory(rng, sig, fr, 2);
        gen::ProofOptions po;
        po.fragment = fr;
        Proof p = gen::random_proof(rng, T, po);
        ASSERT_TRUE(check_proof(T, p).ok);
        EnumerateOptions o;
        o.bound = 2;
        for (auto& M : enumerate_models(T, o)) EXPECT_TRUE(satisfies(M, p.concl)) << print(p.concl);
    }
}

TEST(SetModels, ReducedProductCollapsesToGenerator) {
    gen::Rng rng(8);
    Signature sig = unary_r();
    sig.add_rel({"S", {"U", "U"}});
    for (int t = 0; t < 40; ++t) {
        std::vector<FinStructure> fam;
        int n = gen::uniform(rng, 1, 3);
        for (int i = 0; i < n; ++i) fam.push_back(gen::random_structure(rng, sig, 2));
        int i = gen::uniform(rng, 0, n - 1);
        auto single = reduced_product(fam, SetFilter::principal(n, 1u << i));
        EXPECT_TRUE(isomorphic(single.M, fam[i]));
        if (n >= 2) {
            int j = (i + 1) % n;
            auto two = reduced_product(fam, SetFilter::principal(n, (1u << i) | (1u << j)));
            EXPECT_TRUE(isomorphic(two.M, pair_product(fam[std::min(i, j)], fam[std::max(i, j)])));
        }
        unsigned g = static_cast<unsigned>(gen::uniform(rng, 1, (1 << n) - 1));
        EXPECT_TRUE(isomorphic(reduced_product(fam, SetFilter::principal(n, g)).M, product_over(fam, g)));
    }
    EXPECT_THROW(reduced_product({}, SetFilter::principal(0, 0)), std::invalid_argument);
    EXPECT_THROW(SetFilter({2, {}}).validate(), std::invalid_argument);
}

TEST(SetModels, PowersAgreeOnRegularSentences) {
    gen::Rng rng(12);
    Signature sig = relational();
    gen::FormulaOptions o;
    o.fragment = Fragment::Regular;
    o.depth = 3;
    for (int t = 0; t < 30; ++t) {
        FinStructure M = gen::random_structure(rng, sig, 2);
        int n = gen::uniform(rng, 1, 3);
        std::vector<FinStructure> fam(n, M);
        auto R = reduced_product(fam, SetFilter::principal(n, static_cast<unsigned>(gen::uniform(rng, 1, (1 << n) - 1))));
        for (int k = 0; k < 10; ++k) {
            Formula f = gen::random_formula(rng, sig, {}, o);
            EXPECT_EQ(holds(R.M, f), holds(M, f)) << print(f);
        }
    }
}

TEST(SetModels, LosExamples) {
    Signature sig = unary_r();
    sig.add_rel({"p", {}});
    sig.add_rel({"q", {}});
    std::vector<FinStructure> fam;
    for (int i = 0; i < 3; ++i) {
        FinStructure M;
        M.sig = sig;
        M.carrier["U"] = 2;
        M.init_tables();
        if (i != 2) M.set_rel("R", {1}, true);
        fam.push_back(M);
    }
    SetFilter F = SetFilter::principal(3, 0b011);
    auto R = reduced_product(fam, F);
    auto t = los_check(fam, F, R, top(), {}, {});
    EXPECT_TRUE(t.in_product && t.in_filter);
    auto e = los_check(fam, F, R, parse_formula("(ex (x) (R x))", &sig), {}, {});
    EXPECT_TRUE(e.in_product && e.in_filter);
    EXPECT_THROW(los_check(fam, F, R, parse_formula("(or p q)", &sig), {}, {}), FragmentError);
}

TEST(SetModels, LosOnRandomRegularInstances) {
    gen::Rng rng(31);
    Signature sig = relational();
    gen::FormulaOptions o;
    o.fragment = Fragment::Regular;
    o.depth = 3;
    Context ctx{{"x", "U"}};
    int trials = 0;
    while (trials < 1000) {
        int n = gen::uniform(rng, 1, 4);
        std::vector<FinStructure> fam;
        for (int i = 0; i < n; ++i) fam.push_back(gen::random_structure(rng, sig, 3));
        SetFilter F = SetFilter::principal(n, static_cast<unsigned>(gen::uniform(rng, 0, (1 << n) - 1)));
        auto R = reduced_product(fam, F);
        for (int k = 0; k < 10; ++k, ++trials) {
            Formula f = gen::random_formula(rng, sig, ctx, o);
            std::vector<int> cls{gen::uniform(rng, 0, R.M.size("U") - 1)};
            auto r = los_check(fam, F, R, f, ctx, cls);
            ASSERT_EQ(r.in_product, r.in_filter) << print(f);
        }
    }
}

TEST(SetModels, ChainColimitLaws) {
    gen::Rng rng(6);
    Signature sig = gen::small_first_order();
    for (int t = 0; t < 20; ++t) {
        KripkeModel K = gen::random_kripke(rng, sig, 1, 2);
        K.parent = {-1, 0, 1};
        gen::detail::fill_worlds(rng, K, 3, 0.4);
        std::vector<StructMap> maps = {K.up[1], K.up[2]};
        EXPECT_FALSE(chain_colimit_laws(K.worlds, maps).has_value());
        // a relation dropped along the way breaks the first law
        FinStructure last = K.worlds[2];
        bool any = false;
        for (auto& [r, tab] : last.rels)
            for (auto& v : tab) {
                any = any || v;
                v = 0;
            }
        std::vector<FinStructure> broken = {K.worlds[0], K.worlds[1], last};
        if (any && std::any_of(K.worlds[1].rels.begin(), K.worlds[1].rels.end(),
                               [](auto& e) { return std::any_of(e.second.begin(), e.second.end(), [](char c) { return c != 0; }); }))
            EXPECT_TRUE(chain_colimit_laws(broken, maps).has_value());
    }
    EXPECT_TRUE(chain_colimit_laws({}, {}).has_value());
}

TEST(SetModels, TextRoundTrip) {
    gen::Rng rng(3);
    Signature sig = gen::small_first_order();
    for (int i = 0; i < 10; ++i) {
        FinStructure M = gen::random_structure(rng, sig, 3);
        std::string txt = to_string(structure_sexpr(M));
        FinStructure back = read_structure(read_sexpr(txt), &sig);
        EXPECT_EQ(to_string(structure_sexpr(back)), txt);
    }
}
