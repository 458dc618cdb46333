#ifndef IFOL_CLI_HPP
#define IFOL_CLI_HPP

// Batch front door. Every subcommand reads the shared text format and builds a
// RunReport; the report is rendered as text or JSON. Exit status: 0 when every
// check passes, 1 when a verdict fails, 2 on usage or input errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "suite.hpp"
#include "syncat.hpp"

namespace ifol::cli {

struct Entry {
    std::string id;
    std::string status;  // pass, fail, unknown, info
    std::string detail;
    std::string payload;  // re-readable text form
};

struct RunReport {
    std::string command;
    std::string digest;
    std::vector<Entry> entries;

    void add(std::string id, std::string status, std::string detail, std::string payload = "") {
        entries.push_back({std::move(id), std::move(status), std::move(detail), std::move(payload)});
    }
    void info(std::string id, std::string detail, std::string payload = "") { add(std::move(id), "info", std::move(detail), std::move(payload)); }
    void check(bool ok, std::string id, std::string detail, std::string payload = "") {
        add(std::move(id), ok ? "pass" : "fail", std::move(detail), std::move(payload));
    }
    void verdict(Verdict v, std::string id, std::string detail, std::string payload = "") {
        add(std::move(id), v == Verdict::Yes ? "pass" : v == Verdict::No ? "fail" : "unknown", std::move(detail), std::move(payload));
    }
    int exit_code() const {
        for (auto& e : entries)
            if (e.status == "fail" || e.status == "unknown") return 1;
        return 0;
    }
    void sort() {
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
    }
};

inline std::string render_text(const RunReport& r) {
    std::ostringstream o;
    o << "ifol " << r.command << " (inputs " << r.digest << ")\n";
    for (auto& e : r.entries) {
        std::string tag = e.status == "pass" ? "PASS" : e.status == "fail" ? "FAIL" : e.status == "unknown" ? "UNKNOWN" : "INFO";
        o << tag << " " << e.id;
        if (!e.detail.empty()) o << ": " << e.detail;
        o << "\n";
        if (!e.payload.empty()) o << e.payload << (e.payload.back() == '\n' ? "" : "\n");
    }
    return o.str();
}

inline std::string render_machine(const RunReport& r) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    j["inputs"] = r.digest;
    j["exit"] = r.exit_code();
    j["checks"] = nlohmann::ordered_json::array();
    for (auto& e : r.entries) {
        nlohmann::ordered_json c;
        c["id"] = e.id;
        c["status"] = e.status;
        c["detail"] = e.detail;
        if (!e.payload.empty()) c["payload"] = e.payload;
        j["checks"].push_back(c);
    }
    return j.dump(2) + "\n";
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** inputs seen by a run; the digest covers the arguments and every file read */
struct Inputs {
    std::string seen;

    std::string file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw UsageError("cannot read " + path);
        std::ostringstream s;
        s << in.rdbuf();
        seen += "\x1f" + path + "\x1e" + s.str();
        return s.str();
    }
    SExpr sexpr(const std::string& path) { return read_sexpr(file(path)); }
    // inline text, or the contents of a file of that name
    SExpr text_or_file(const std::string& arg) {
        if (!arg.empty() && arg[0] != '(' && std::filesystem::is_regular_file(arg)) return sexpr(arg);
        return read_sexpr(arg);
    }
    std::string digest(const std::vector<std::string>& args) const {
        std::string all = seen;
        for (auto& a : args) all += "\x1d" + a;
        std::ostringstream o;
        o << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(all);
        return o.str();
    }
};

namespace detail {

inline std::string pretty(const SExpr& e) { return to_pretty(e); }

inline Context context_arg(const std::string& s) { return s.empty() ? Context{} : ifol::detail::read_context(read_sexpr(s)); }

inline int object_index(const FinCat& C, const std::string& s) {
    for (int c = 0; c < C.n; ++c)
        if (C.obj_name(c) == s) return c;
    try {
        int v = std::stoi(s);
        if (v >= 0 && v < C.n) return v;
    } catch (const std::logic_error&) {
    }
    throw UsageError("unknown object '" + s + "'");
}

inline int element_index(const FinLattice& L, const std::string& s) {
    for (int a = 0; a < L.n; ++a)
        if (L.name(a) == s) return a;
    try {
        int v = std::stoi(s);
        if (v >= 0 && v < L.n) return v;
    } catch (const std::logic_error&) {
    }
    throw UsageError("unknown lattice element '" + s + "'");
}

inline std::string ints_text(const std::vector<int>& xs) {
    std::string s = "(";
    for (size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
    return s + ")";
}

inline std::string filter_text(const FinLattice& L, const LatFilter& F) {
    std::string s = "(";
    bool first = true;
    for (int a = 0; a < L.n; ++a)
        if (F.contains(a)) {
            s += (first ? "" : " ") + L.name(a);
            first = false;
        }
    return s + ")";
}

inline std::string rule_text(const std::string& name, const RuleInstance& r) {
    SExpr ps = SExpr::list({SExpr::sym("premises")});
    for (auto& p : r.premises) ps.add(sequent_sexpr(p));
    return to_pretty(SExpr::list({SExpr::sym("rule"), SExpr::sym(name), ps, SExpr::list({SExpr::sym("conclusion"), sequent_sexpr(r.conclusion)})}));
}

inline std::string sub_text(const CatStructure& S, const Context& ctx, const Subfunctor& sub) {
    std::vector<std::string> ss;
    for (auto& d : ctx) ss.push_back(d.sort);
    SExpr l = SExpr::list({SExpr::sym("sub")});
    for (int c = 0; c < S.cat.n; ++c) {
        SExpr at = SExpr::list({SExpr::sym("at"), SExpr::sym(S.cat.obj_name(c))});
        auto radix = S.radix(c, ss);
        for (size_t x = 0; x < sub.in[c].size(); ++x)
            if (sub.in[c][x]) {
                SExpr t = SExpr::list();
                for (int v : tuple_at(x, radix)) t.add(SExpr::sym(std::to_string(v)));
                at.add(t);
            }
        l.add(at);
    }
    return to_string(l);
}

}  // namespace detail

/** global flags shared by all subcommands */
struct Globals {
    uint64_t seed = 7;
    int bound = 2;
    std::string fragment;
    std::string oracle = "semantic";
    std::string format = "text";

    std::optional<Fragment> frag() const {
        if (fragment.empty()) return std::nullopt;
        try {
            return parse_fragment(fragment);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
};

// ------------------------------------------------------------ subcommands

struct CheckArgs {
    std::vector<std::string> files;
    std::string formula, context;
    std::vector<std::string> substs;
};

inline void run_check(const CheckArgs& a, const Globals& g, Inputs& in, RunReport& r) {
    if (!a.formula.empty()) {
        Signature sig;
        Context ctx = detail::context_arg(a.context);
        Formula f;
        if (!a.files.empty()) {
            sig = read_theory(in.sexpr(a.files[0])).sig;
            f = read_formula(read_sexpr(a.formula), &sig, ctx);
        } else {
            for (auto& d : ctx) sig.add_sort(d.sort);
            f = read_formula(read_sexpr(a.formula), nullptr, ctx, &sig);
        }
        std::string frs;
        for (Fragment fr : {Fragment::Regular, Fragment::Coherent, Fragment::Geometric, Fragment::FirstOrder})
            if (in_fragment(f, fr)) frs += (frs.empty() ? "" : " ") + fragment_name(fr);
        r.info("formula", frs.empty() ? "outside the listed fragments" : "in " + frs, print(f));
        if (!a.substs.empty()) {
            Subst s;
            for (auto& item : a.substs) {
                auto eqpos = item.find('=');
                if (eqpos == std::string::npos) throw UsageError("--subst expects VAR=TERM");
                std::string v = item.substr(0, eqpos);
                Formula e = read_formula(read_sexpr("(= " + v + " " + item.substr(eqpos + 1) + ")"), &sig, ctx);
                s[v] = e->terms[1];
            }
            r.info("substituted", "", print(substitute(f, s)));
        }
        return;
    }
    if (a.files.size() != 2) throw UsageError("check needs THEORY PROOF, or --formula");
    Theory T = read_theory(in.sexpr(a.files[0]));
    Proof p = read_proof(in.sexpr(a.files[1]), T.sig);
    auto res = check_proof(T, p, g.frag());
    if (res.ok) {
        r.check(true, "proof", "valid, " + std::to_string(proof_size(p)) + " nodes, concludes " + print(p.concl));
        return;
    }
    const Proof* at = &p;
    for (int i : res.path) at = &at->premises.at(i);
    r.check(false, "proof", "rule " + res.rule + " at path " + detail::ints_text(res.path) + ": " + res.reason, print(*at));
}

struct SchemaArgs {
    std::string name;
    std::vector<std::string> entries;
    int gamma = 0;
    std::string theory, tree, bar, blocks, context;
};

inline void run_schema(const SchemaArgs& a, const Globals&, Inputs& in, RunReport& r) {
    Signature sig;
    bool declared = !a.theory.empty();
    if (declared) sig = read_theory(in.sexpr(a.theory)).sig;
    std::vector<Context> blocks;
    Context root = detail::context_arg(a.context);
    Context bound = root;
    if (!a.blocks.empty()) {
        SExpr bs = read_sexpr(a.blocks);
        for (auto& b : bs.items) {
            blocks.push_back(ifol::detail::read_context(b));
            bound.insert(bound.end(), blocks.back().begin(), blocks.back().end());
        }
    }
    for (auto& d : bound) sig.add_sort(d.sort);
    std::vector<Formula> fs;
    for (auto& e : a.entries) fs.push_back(declared ? read_formula(read_sexpr(e), &sig, bound) : read_formula(read_sexpr(e), nullptr, bound, &sig));
    int gamma = a.gamma;
    auto tree = [&] {
        if (a.tree.empty()) throw UsageError(a.name + " needs --tree FILE");
        TreeAssignment t = read_tree(in.sexpr(a.tree), sig);
        t.validate();
        return t;
    };
    auto matrix = [&] {
        if (gamma <= 0) {
            while (gamma * gamma < static_cast<int>(fs.size())) ++gamma;
        }
        if (gamma * gamma != static_cast<int>(fs.size())) throw UsageError("need gamma*gamma entries");
        std::vector<std::vector<Formula>> m(gamma);
        for (int i = 0; i < gamma; ++i) m[i].assign(fs.begin() + i * gamma, fs.begin() + (i + 1) * gamma);
        return m;
    };
    auto chain = [&] {
        DcChain c{root, fs, blocks};
        c.blocks.resize(fs.empty() ? 0 : fs.size() - 1);
        return c;
    };
    const std::string& n = a.name;
    if (n == "classical-distributivity" || n == "classical-DC") {
        if (gamma <= 0) gamma = n == "classical-DC" ? static_cast<int>(fs.size()) : 0;
        if (n == "classical-distributivity") matrix();
        auto s = classical_schema(n, gamma, fs, blocks);
        r.info("instance", s.name, print(s.rendered));
    } else if (n == "tt-axiom" || n == "intuitionistic-distributivity-axiom") {
        auto s = tt_axiom(tree(), n == "intuitionistic-distributivity-axiom");
        r.info("instance", s.name, print(s.rendered));
    } else if (n == "intuitionistic-DC-axiom") {
        auto s = intuitionistic_dc_axiom(chain());
        r.info("instance", s.name, print(s.rendered));
    } else if (n == "tt") {
        r.info("instance", "", detail::rule_text("tt", tt_rule_instance(tree())));
    } else if (n == "tt-bar") {
        TreeAssignment t = tree();
        Bar b;
        if (a.bar.empty()) b = t.leaves();
        else
            for (auto& e : read_sexpr(a.bar).items) b.push_back(ifol::detail::read_node(e));
        r.info("instance", "", detail::rule_text("tt-bar", tt_bar_instance(t, b)));
    } else if (n == "dist") {
        r.info("instance", "", detail::rule_text("dist", distributivity_instance(tree())));
    } else if (n == "dc") {
        r.info("instance", "", detail::rule_text("dc", dc_instance(chain())));
    } else if (n == "choice") {
        if (fs.empty()) throw UsageError("choice needs PHI PART...");
        ChoiceData c{root, fs[0], blocks, std::vector<Formula>(fs.begin() + 1, fs.end())};
        r.info("instance", "", detail::rule_text("choice", choice_instance(c)));
    } else if (n == "equivl") {
        auto m = matrix();
        TreeAssignment t = equivl_assignment(m);
        r.info("assignment", "gamma " + std::to_string(gamma), to_pretty(tree_sexpr(t)));
        Theory empty{sig, {}, Fragment::Coherent};
        GuardedTree gt = equivl_premises(m);
        Proof p = derive_tt_from_cut(gt.tree, gt.tree.leaves(), gt.premises);
        auto c = check_proof(empty, p);
        r.check(c.ok && same(p.concl, tt_rule_instance(gt.tree).conclusion), "derivation",
                c.ok ? "full-bar conclusion by cuts, " + std::to_string(proof_size(p)) + " nodes" : c.rule + ": " + c.reason, print(p));
        Proof d = classical_distributivity_proof(m);
        auto cd = check_proof(empty, d);
        r.check(cd.ok && same(d.concl, classical_distributivity(m).rendered), "distributivity",
                cd.ok ? "classical distributivity proved" : cd.rule + ": " + cd.reason, print(d));
    } else {
        std::string known;
        for (auto& s : schema_names()) known += s + " ";
        throw UsageError("unknown schema " + n + "; one of " + known + "tt tt-bar dist dc choice equivl");
    }
}

struct DeduceArgs {
    std::string theory, sigma, proof;
};

inline void run_deduce(const DeduceArgs& a, const Globals&, Inputs& in, RunReport& r) {
    Theory T = read_theory(in.sexpr(a.theory));
    Formula s = read_formula(in.text_or_file(a.sigma), &T.sig);
    Proof p = read_proof(in.sexpr(a.proof), T.sig);
    Theory plus = T;
    plus.axioms.push_back({{}, top(), s});
    auto c0 = check_proof(plus, p);
    if (!c0.ok) {
        r.check(false, "input", "not a proof in the theory plus the hypothesis: " + c0.rule + ": " + c0.reason);
        return;
    }
    Proof d = deduction(T, s, p);
    auto c = check_proof(T, d);
    r.check(c.ok, "proof", c.ok ? "concludes " + print(d.concl) : c.rule + ": " + c.reason, print(d));
}

struct MorleyArgs {
    std::string theory, goal;
    bool classical = false, subformulas = false;
};

inline void run_morleyize(const MorleyArgs& a, const Globals& g, Inputs& in, RunReport& r) {
    Theory T = read_theory(in.sexpr(a.theory));
    if (a.subformulas) {
        std::string s;
        for (auto& f : subformula_set(T)) s += print(f) + "\n";
        r.info("subformulas", std::to_string(subformula_set(T).size()) + " formulas", s);
    }
    Morleyization m;
    if (a.classical) {
        Sequent goal = a.goal.empty() ? Sequent{{}, top(), top()} : read_sequent(read_sexpr(a.goal), &T.sig);
        m = classical_morleyize(T, goal);
    } else {
        EntailmentOracle o;
        if (g.oracle == "two-valued") o = two_valued_oracle(T, g.bound);
        else if (g.oracle == "kripke") o = kripke_oracle(T);
        else if (g.oracle != "semantic") throw UsageError("morleyize oracle: semantic, two-valued or kripke");
        Fragment fr = g.frag().value_or(Fragment::Coherent);
        m = coherent_morleyize(T, fr, o);
    }
    r.info("symbols", std::to_string(m.symbols.size()) + " named formulas", m.table());
    r.info("theory", std::to_string(m.theory.axioms.size()) + " axioms", print(m.theory));
}

struct EncodeArgs {
    std::string kind, input;
    bool improper = false;
};

inline void run_encode(const EncodeArgs& a, const Globals&, Inputs& in, RunReport& r) {
    if (a.kind == "diagram") {
        Diagram d = positive_diagram(read_structure(in.text_or_file(a.input)));
        std::string names;
        for (auto& [s, ns] : d.names)
            for (size_t i = 0; i < ns.size(); ++i) names += s + " " + std::to_string(i) + " " + ns[i] + "\n";
        r.info("names", "", names);
        r.info("theory", std::to_string(d.theory.axioms.size()) + " axioms", print(d.theory));
    } else if (a.kind == "branch") {
        std::vector<int> parent = read_ints(in.text_or_file(a.input));
        Theory T = encode_branch_theory(parent);
        r.info("theory", std::to_string(cofinal_branches(parent).size()) + " cofinal branches", print(T));
    } else if (a.kind == "ultrafilter") {
        Theory T = encode_ultrafilter_theory(read_lattice(in.text_or_file(a.input)), !a.improper);
        r.info("theory", std::to_string(T.axioms.size()) + " axioms", print(T));
    } else {
        throw UsageError("encode diagram|branch|ultrafilter");
    }
}

struct ModelsArgs {
    std::vector<std::string> files;
    bool all = false, exploding = false, kripke = false;
    int min_size = 1, max_nodes = 3, max_domain = 2;
    std::string check, eval, context, los;
    std::vector<int> env, cls;
    long long filter = -1;
};

inline void run_models(const ModelsArgs& a, const Globals& g, Inputs& in, RunReport& r) {
    if (!a.eval.empty()) {
        if (a.files.size() != 1) throw UsageError("--eval needs one STRUCTURE");
        FinStructure M = read_structure(in.sexpr(a.files[0]));
        Context ctx = detail::context_arg(a.context);
        if (a.env.size() != ctx.size()) throw UsageError("--env needs one element per context variable");
        Env env;
        for (size_t i = 0; i < ctx.size(); ++i) env[ctx[i].name] = a.env[i];
        Formula f = read_formula(read_sexpr(a.eval), &M.sig, ctx);
        r.check(holds(M, f, env), "holds", print(f));
        return;
    }
    if (a.filter >= 0) {
        if (a.files.empty()) throw UsageError("--filter needs STRUCTURE...");
        std::vector<FinStructure> fam;
        for (auto& f : a.files) fam.push_back(read_structure(in.sexpr(f)));
        SetFilter F = SetFilter::principal(static_cast<int>(fam.size()), static_cast<unsigned>(a.filter));
        ReducedProduct R = reduced_product(fam, F);
        r.info("product", "reduced product", to_pretty(structure_sexpr(R.M)));
        if (!a.los.empty()) {
            Context ctx = detail::context_arg(a.context);
            Formula f = read_formula(read_sexpr(a.los), &R.M.sig, ctx);
            LosResult l = los_check(fam, F, R, f, ctx, a.cls);
            r.check(l.in_product == l.in_filter, "los",
                    std::string("holds in the product: ") + (l.in_product ? "yes" : "no") + ", index set in the filter: " +
                        (l.in_filter ? "yes" : "no"));
        }
        return;
    }
    if (a.files.empty()) throw UsageError("models needs a THEORY");
    Theory T = read_theory(in.sexpr(a.files[0]));
    if (!a.check.empty()) {
        FinStructure M = read_structure(in.text_or_file(a.check), &T.sig);
        ModelCheck mc = model_check(T, M);
        std::string w;
        for (auto& [x, v] : mc.witness) w += "(" + x + " " + std::to_string(v) + ")";
        r.check(mc.ok, "model", mc.ok ? "satisfies every axiom" : "fails axiom " + std::to_string(mc.axiom) + ": " + print(T.axioms[mc.axiom]),
                mc.ok ? "" : "(env " + w + ")");
        return;
    }
    if (a.kripke) {
        KripkeBounds b;
        b.max_nodes = a.max_nodes;
        b.max_domain = a.max_domain;
        auto ks = kripke_models(T, b);
        r.info("count", std::to_string(ks.size()) + " Kripke models");
        for (size_t i = 0; i < ks.size(); ++i) {
            std::ostringstream id;
            id << "model-" << std::setw(5) << std::setfill('0') << i + 1;
            r.info(id.str(), std::to_string(ks[i].size()) + " nodes", to_string(kripke_sexpr(ks[i])));
        }
        return;
    }
    EnumerateOptions o;
    o.bound = g.bound;
    o.min_size = a.min_size;
    o.up_to_iso = !a.all;
    o.include_exploding = a.exploding;
    auto ms = enumerate_models(T, o);
    r.info("count", std::to_string(ms.size()) + (a.all ? " models" : " models up to isomorphism"));
    for (size_t i = 0; i < ms.size(); ++i) {
        std::ostringstream id;
        id << "model-" << std::setw(5) << std::setfill('0') << i + 1;
        r.info(id.str(), "", to_string(structure_sexpr(ms[i])));
    }
}

struct LatticeArgs {
    std::string action;
    std::vector<std::string> args;
    int gamma = 2, height = -1;
};

inline void run_lattice(const LatticeArgs& a, const Globals&, Inputs& in, RunReport& r) {
    auto need = [&](size_t n) {
        if (a.args.size() != n) throw UsageError("lattice " + a.action + " takes " + std::to_string(n) + " argument(s)");
    };
    auto num = [](const std::string& s) {
        try {
            long long v = std::stoll(s);
            if (v < 0) throw UsageError("expected a natural number");
            return v;
        } catch (const std::logic_error&) {
            throw UsageError("expected a natural number, got '" + s + "'");
        }
    };
    if (a.action == "pairing") {
        need(2);
        long long b = num(a.args[0]), c = num(a.args[1]);
        r.info("value", "f(" + a.args[0] + "," + a.args[1] + ")", std::to_string(pairing(b, c)));
        return;
    }
    if (a.action == "unpair") {
        need(1);
        auto [b, c] = pairing_inverse(num(a.args[0]));
        r.info("value", "", "(" + std::to_string(b) + " " + std::to_string(c) + ")");
        return;
    }
    if (a.args.empty()) throw UsageError("lattice " + a.action + " needs a LATTICE");
    FinLattice L = read_lattice(in.text_or_file(a.args[0]));
    if (a.action == "check") {
        need(1);
        auto v = check_distributivity(L, a.gamma, a.height);
        std::string w;
        for (int x : v.witness) w += (w.empty() ? "" : " ") + L.name(x);
        r.check(v.holds, "distributivity", v.holds ? "distributive and tree-transitive" : v.law + " fails", v.holds ? "" : "(" + w + ")");
    } else if (a.action == "quotient") {
        need(2);
        LatFilter F = principal_filter(L, detail::element_index(L, a.args[1]));
        Quotient q = quotient_by_filter(L, F);
        std::string theta;
        for (int x = 0; x < L.n; ++x) theta += "(" + L.name(x) + " " + std::to_string(q.theta[x]) + ")";
        r.info("quotient", std::to_string(q.K.n) + " classes", to_string(lattice_sexpr(q.K)));
        r.info("theta", "", "(map " + theta + ")");
        bool pre = true;
        for (int x = 0; x < L.n; ++x) pre = pre && ((q.theta[x] == q.K.top) == F.contains(x));
        r.check(pre, "preimage-of-top", "theta^-1(top) is the filter " + detail::filter_text(L, F));
        r.check(q.is_morphism, "morphism", q.is_morphism ? "theta is a lattice map" : "theta does not preserve the operations");
    } else if (a.action == "primes") {
        need(1);
        auto ps = prime_filters(L);
        std::string s;
        for (auto& F : ps) s += detail::filter_text(L, F) + "\n";
        r.info("primes", std::to_string(ps.size()) + " prime filters", s);
        Representation rep = representation_map(L);
        std::string img;
        for (int x = 0; x < L.n; ++x) {
            img += "(" + L.name(x);
            for (int i : rep.image[x]) img += " " + std::to_string(i);
            img += ")\n";
        }
        r.info("representation", "", img);
        r.check(rep.embedding(), "embedding", rep.embedding() ? "injective lattice map into the powerset of primes" : "not injective");
    } else {
        throw UsageError("lattice check|quotient|primes|pairing|unpair");
    }
}

struct ForceArgs {
    std::string model, formula, engine = "kripke", context, site;
    std::vector<int> env;
    std::string node;
};

inline void run_force(const ForceArgs& a, const Globals&, Inputs& in, RunReport& r) {
    SExpr me = in.sexpr(a.model);
    Context ctx = detail::context_arg(a.context);
    if (!a.env.empty() && a.env.size() != ctx.size()) throw UsageError("--env needs one element per context variable");
    CatEnv env = CatEnv::of(ctx, a.env);
    if (a.engine == "kripke" || a.engine == "beth") {
        BethModel B;
        if (a.engine == "beth") B = read_beth(me);
        else B = as_beth(read_kripke(me));
        if (a.engine == "beth") B.validate();
        const KripkeModel& K = B.frame;
        K.validate();
        Formula f = read_formula(in.text_or_file(a.formula), &K.sig, ctx);
        auto at = [&](int k) { return a.engine == "beth" ? beth_force(B, k, f, env) : kripke_force(K, k, f, env); };
        if (!a.node.empty()) {
            int k = std::stoi(a.node);
            if (k < 0 || k >= K.size()) throw UsageError("node out of range");
            r.check(at(k), "node-" + a.node, print(f));
        } else {
            for (int k = 0; k < K.size(); ++k) r.info("node-" + std::to_string(k), at(k) ? "forced" : "not forced");
        }
        return;
    }
    if (a.engine != "kj" && a.engine != "interpret") throw UsageError("--engine kripke|beth|kj|interpret");
    CatStructure S = me.head() == "kripke" ? to_cat_structure(read_kripke(me)) : read_cat_structure(me);
    std::optional<Topology> J;
    if (!a.site.empty()) {
        Site site = read_site(in.sexpr(a.site));
        if (site.cat.n != S.cat.n || site.cat.num_arrows() != S.cat.num_arrows()) throw UsageError("site and structure disagree on the category");
        J = saturate(site);
    }
    Formula f = read_formula(in.text_or_file(a.formula), &S.sig, ctx);
    if (a.engine == "interpret") {
        Subfunctor sub = interpret(S, ctx, f, J ? &*J : nullptr);
        r.info("interpretation", print(f), detail::sub_text(S, ctx, sub));
        return;
    }
    if (!a.node.empty()) {
        int c = detail::object_index(S.cat, a.node);
        r.check(kj_force(S, c, env, f, J ? &*J : nullptr), "object-" + S.cat.obj_name(c), print(f));
    } else {
        for (int c = 0; c < S.cat.n; ++c)
            r.info("object-" + S.cat.obj_name(c), kj_force(S, c, env, f, J ? &*J : nullptr) ? "forced" : "not forced");
    }
}

struct SearchArgs {
    std::string goal, theory;
    int max_nodes = 3, max_domain = 2, min_domain = 1;
    size_t limit = 2000000;
    std::vector<std::string> smash;
};

inline void run_search(const SearchArgs& a, const Globals&, Inputs& in, RunReport& r) {
    Theory T;
    T.fragment = Fragment::FirstOrder;
    if (!a.theory.empty()) T = read_theory(in.sexpr(a.theory));
    if (!a.smash.empty()) {
        std::vector<KripkeModel> ms;
        for (auto& f : a.smash) ms.push_back(read_kripke(in.sexpr(f)));
        Signature sig = a.theory.empty() ? ms[0].sig : T.sig;
        KripkeModel M = smash(ms, sig);
        r.info("smash", std::to_string(M.size()) + " nodes", to_string(kripke_sexpr(M)));
        if (!a.theory.empty()) r.check(is_kripke_model_of(M, T), "model", "the smashed model satisfies the theory");
        if (!a.goal.empty()) {
            Sequent s = read_sequent(in.text_or_file(a.goal), &sig);
            r.check(!kripke_forces_sequent(M, 0, s), "refutes", print(s));
        }
        return;
    }
    if (a.goal.empty()) throw UsageError("search needs --goal SEQUENT or --smash MODEL...");
    Sequent s = a.theory.empty() ? read_sequent(in.text_or_file(a.goal), nullptr, &T.sig) : read_sequent(in.text_or_file(a.goal), &T.sig);
    KripkeBounds b;
    b.max_nodes = a.max_nodes;
    b.max_domain = a.max_domain;
    b.min_domain = a.min_domain;
    b.limit = a.limit;
    SearchResult res = countermodel_search(T, s, b);
    std::string n = std::to_string(res.examined) + " candidates examined";
    if (res.found) r.check(true, "countermodel", std::to_string(res.model.size()) + " nodes, " + n, to_pretty(kripke_sexpr(res.model)));
    else r.check(false, "countermodel", (res.truncated ? "none found before the candidate limit, " : "none within the bounds, ") + n);
}

struct BethArgs {
    std::string structure, site, lattice, root;
    std::vector<std::string> atoms, formulas;
    int height = 3;
    bool linear = false, singleton = false;
};

inline void run_beth_build(const BethArgs& a, const Globals&, Inputs& in, RunReport& r) {
    CatStructure S;
    Site site;
    if (!a.lattice.empty()) {
        FinLattice L = read_lattice(in.text_or_file(a.lattice));
        site = joint_cover_site(L);
        S.cat = site.cat;
        for (auto& item : a.atoms) {
            auto eqpos = item.find('=');
            if (eqpos == std::string::npos) throw UsageError("--atom expects NAME=ELEMENT");
            std::string p = item.substr(0, eqpos);
            S.sig.add_rel({p, {}});
            S.rels[p] = yoneda_sub(L, detail::element_index(L, item.substr(eqpos + 1)));
        }
        S.validate();
    } else {
        if (a.structure.empty() || a.site.empty()) throw UsageError("beth-build needs STRUCTURE SITE, or --lattice");
        S = read_cat_structure(in.sexpr(a.structure));
        site = read_site(in.sexpr(a.site));
    }
    std::vector<Formula> phis;
    for (auto& f : a.formulas) phis.push_back(read_formula(read_sexpr(f), &S.sig));
    int root = a.root.empty() ? 0 : detail::object_index(S.cat, a.root);
    BethBuild b = a.linear ? beth_build_linear(S, site, root, phis, a.height) : beth_build(S, site, root, phis, a.height, a.singleton);
    std::string objs;
    for (size_t k = 0; k < b.object.size(); ++k) objs += "(" + std::to_string(k) + " " + S.cat.obj_name(b.object[k]) + ")";
    r.info("model", std::to_string(b.model.frame.size()) + " nodes", to_pretty(beth_sexpr(b.model)));
    r.info("objects", "", "(objects " + objs + ")");
    r.info("exhausted", b.exhausted ? "every formula stable at the root" : "not exhausted: " + b.progress);
    Topology J = saturate(site);
    int checked = 0;
    std::string bad;
    for (int p = 0; p < b.model.frame.size() && bad.empty(); ++p)
        for (size_t fi = 0; fi < b.formulas.size(); ++fi) {
            if (!b.stable[p][fi]) continue;
            const Formula& f = b.formulas[fi];
            if (!free_vars(f).empty()) continue;
            ++checked;
            if (kj_force(S, b.object[p], {}, f, &J) != beth_force(b.model, p, f)) {
                bad = print(f) + " at node " + std::to_string(p);
                break;
            }
        }
    r.check(bad.empty(), "agreement", bad.empty() ? std::to_string(checked) + " stable (node, formula) pairs agree" : "disagreement on " + bad);
}

struct SheafifyArgs {
    std::string site, presheaf;
};

inline void run_sheafify(const SheafifyArgs& a, const Globals&, Inputs& in, RunReport& r) {
    Site site = read_site(in.sexpr(a.site));
    Topology J = saturate(site);
    Presheaf F = read_presheaf(in.sexpr(a.presheaf), site.cat);
    SheafCheck sc = check_sheaf(site.cat, J, F);
    r.info("input", sc.ok ? "already a sheaf" : "not a sheaf");
    Sheafification s = sheafify(site.cat, J, F);
    r.info("sheaf", "", to_string(presheaf_sexpr(s.sheaf, site.cat)));
    std::string unit;
    for (int c = 0; c < site.cat.n; ++c) unit += "(" + site.cat.obj_name(c) + " " + detail::ints_text(s.unit.at[c]) + ")";
    r.info("unit", "", "(unit " + unit + ")");
    r.check(is_sheaf(site.cat, J, s.sheaf) && s.unit.is_natural(site.cat, F, s.sheaf), "result", "a sheaf with a natural unit");
}

struct SiteArgs {
    std::string site, lattice, chains, tt;
    int gamma = 2, height = 2;
};

inline void run_site_check(const SiteArgs& a, const Globals&, Inputs& in, RunReport& r) {
    if (!a.chains.empty()) {
        FinCat M = read_category(in.text_or_file(a.chains));
        ChainPoset R = chain_poset(M);
        r.info("chains", std::to_string(R.P.n) + " composable chains", to_string(category_sexpr(R.P)));
        for (int c = 0; c < M.n; ++c) {
            Presheaf F = representable(M, c);
            auto t = verify_transport(M, R, F);
            std::vector<const Presheaf*> two = {&F, &F};
            auto u = verify_transport_along(M, R, product(M, two), F, projection(M, two, 1));
            r.check(t.ok && u.ok, "transport-" + M.obj_name(c), t.ok ? (u.ok ? std::to_string(t.checks + u.checks) + " checks" : u.failure) : t.failure);
        }
        return;
    }
    if (!a.lattice.empty()) {
        FinLattice L = read_lattice(in.text_or_file(a.lattice));
        if (!a.tt.empty()) {
            Site S = joint_cover_site(L);
            Topology J = saturate(S);
            SheafFamily fam{a.gamma, a.height, {}};
            for (auto& e : read_sexpr(a.tt).items) fam.labels.push_back(yoneda_sub(L, detail::element_index(L, e.text)));
            TTVerdict v = check_tt_in_sheaves(S.cat, J, terminal_presheaf(S.cat), fam);
            if (!v.premises_hold) r.info("premises", "fail at level " + std::to_string(v.failing_level) + ": " + v.detail);
            else r.check(v.ok, "tree-transitivity", v.ok ? "the bottom level covers" : v.detail);
            return;
        }
        EmbeddingReport rep = check_embedding(L);
        for (auto& i : rep.items) {
            if (!i.applicable) r.add("embedding-" + i.name, "fail", "inapplicable: " + i.detail);
            else r.check(i.ok, "embedding-" + i.name, i.detail);
        }
        return;
    }
    if (a.site.empty()) throw UsageError("site-check needs SITE, --lattice or --chains");
    Site S = read_site(in.sexpr(a.site));
    Topology J = saturate(S);
    for (int c = 0; c < S.cat.n; ++c) {
        std::string s;
        for (auto& sv : J.covering[c]) {
            s += "(";
            bool first = true;
            for (int f = 0; f < S.cat.num_arrows(); ++f)
                if (sv[f]) {
                    s += (first ? "" : " ") + S.cat.arrows[f].name;
                    first = false;
                }
            s += ")\n";
        }
        r.info("covers-" + S.cat.obj_name(c), std::to_string(J.covering[c].size()) + " covering sieves", s);
    }
    for (int c = 0; c < S.cat.n; ++c) {
        Presheaf Y = representable(S.cat, c);
        r.check(is_sheaf(S.cat, J, Y), "representable-" + S.cat.obj_name(c), "representable is a sheaf");
    }
}

struct SyncatArgs {
    std::string action, theory;
    std::vector<std::string> args;
};

inline void run_syncat(const SyncatArgs& a, const Globals& g, Inputs& in, RunReport& r) {
    if (a.theory.empty()) throw UsageError("syncat needs --theory FILE");
    Theory T = read_theory(in.sexpr(a.theory));
    SynOracle oracle = make_oracle(g.oracle, T, g.bound);
    auto mor = [&](const std::string& s) { return read_syn_morphism(in.text_or_file(s), T.sig); };
    auto obj = [&](const std::string& s) { return read_syn_object(in.text_or_file(s), T.sig); };
    auto need = [&](size_t lo, size_t hi) {
        if (a.args.size() < lo || a.args.size() > hi) throw UsageError("wrong number of arguments for syncat " + a.action);
    };
    auto verify = [&](const std::string& id, const SynMorphism& m) {
        MorphismVerdict v = verify_morphism(oracle, m);
        r.verdict(v.verdict, id, v.verdict == Verdict::Yes ? "functional relation (" + oracle.name + " oracle)" : v.failed + " is " + verdict_name(v.verdict));
    };
    if (a.action == "verify") {
        need(1, 1);
        verify("morphism", mor(a.args[0]));
    } else if (a.action == "compose") {
        need(2, 2);
        SynMorphism c = compose(mor(a.args[0]), mor(a.args[1]));
        r.info("composite", "", to_string(syn_morphism_sexpr(c)));
        verify("morphism", c);
    } else if (a.action == "classify") {
        need(1, 1);
        SynMorphism m = mor(a.args[0]);
        Classification c = classify(oracle, m);
        r.info("mono", verdict_name(c.mono));
        r.info("iso", verdict_name(c.iso));
        if (c.mono == Verdict::Yes) r.info("subobject", "normal form", to_string(syn_object_sexpr(subobject_normal_form(m))));
    } else if (a.action == "construct") {
        if (a.args.empty()) throw UsageError("syncat construct product|equalizer|image|union|pullback|forall ...");
        std::string kind = a.args[0];
        std::vector<std::string> rest(a.args.begin() + 1, a.args.end());
        if (kind == "product") {
            std::vector<SynObject> fs;
            for (auto& s : rest) fs.push_back(obj(s));
            ProductData p = product(fs);
            r.info("object", "", to_string(syn_object_sexpr(p.object)));
            for (size_t i = 0; i < p.projections.size(); ++i) r.info("projection-" + std::to_string(i), "", to_string(syn_morphism_sexpr(p.projections[i])));
        } else if (kind == "equalizer" && rest.size() == 2) {
            EqualizerData e = equalizer(mor(rest[0]), mor(rest[1]));
            r.info("object", "", to_string(syn_object_sexpr(e.object)));
            r.info("inclusion", "", to_string(syn_morphism_sexpr(e.inclusion)));
        } else if (kind == "image" && rest.size() == 1) {
            ImageData d = image(mor(rest[0]));
            r.info("object", "", to_string(syn_object_sexpr(d.object)));
            r.info("inclusion", "", to_string(syn_morphism_sexpr(d.inclusion)));
            r.info("cover", "", to_string(syn_morphism_sexpr(d.cover)));
        } else if (kind == "union" && !rest.empty()) {
            std::vector<SynObject> subs;
            for (auto& s : rest) subs.push_back(obj(s));
            r.info("object", "", to_string(syn_object_sexpr(union_of(subs))));
        } else if (kind == "pullback" && rest.size() == 2) {
            r.info("object", "", to_string(syn_object_sexpr(pullback(mor(rest[0]), obj(rest[1])))));
        } else if (kind == "forall" && rest.size() == 2) {
            r.info("object", "", to_string(syn_object_sexpr(forall_along(mor(rest[0]), obj(rest[1]), g.frag().value_or(Fragment::FirstOrder)))));
        } else {
            throw UsageError("syncat construct product OBJ... | equalizer M M | image M | union OBJ... | pullback M OBJ | forall M OBJ");
        }
    } else {
        throw UsageError("syncat verify|compose|classify|construct");
    }
}

struct SuiteArgs {
    std::vector<std::string> which;
};

inline void run_suite(const SuiteArgs& a, const Globals& g, Inputs&, RunReport& r, std::ostream& err) {
    std::vector<int> ids;
    for (auto& w : a.which) {
        if (w == "all") {
            for (auto& c : suite::criteria()) ids.push_back(c.id);
            continue;
        }
        try {
            ids.push_back(std::stoi(w));
        } catch (const std::logic_error&) {
            throw UsageError("suite takes 'all' or criterion numbers");
        }
    }
    if (ids.empty()) throw UsageError("suite takes 'all' or criterion numbers");
    for (int id : ids) {
        suite::CriterionResult c;
        try {
            c = suite::run(id, g.seed);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        std::ostringstream key;
        key << std::setw(2) << std::setfill('0') << c.id << "-" << c.name;
        r.check(c.pass, key.str(), c.detail, c.counterexample);
        err << "  " << key.str() << " " << c.seconds << " s\n";
    }
}

// ------------------------------------------------------------ entry point

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"check",     "schema", "deduce", "morleyize",  "encode",  "models",     "lattice",
                                               "force",     "search", "beth-build", "sheafify", "site-check", "syncat", "suite"};
    return s;
}

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Proof kernel and finite-semantics workbench for infinitary intuitionistic logic", "ifol"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "seed for every random choice");
    app.add_option("--bound", g.bound, "carrier bound for set models and oracles");
    app.add_option("--fragment", g.fragment, "regular, coherent, geometric, first-order or first-order+em");
    app.add_option("--oracle", g.oracle, "syncat: semantic or search; morleyize: semantic, two-valued or kripke");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"text", "machine"}));

    Inputs in;
    RunReport report;
    std::function<void()> action;

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "check a proof against a theory, or sort-check a formula");
    check->add_option("files", ca.files, "THEORY PROOF");
    check->add_option("--formula", ca.formula, "formula to sort-check");
    check->add_option("--context", ca.context, "context of the formula, e.g. ((x U))");
    check->add_option("--subst", ca.substs, "substitution VAR=TERM")->delimiter(',')->allow_extra_args(false);
    check->callback([&] { action = [&] { run_check(ca, g, in, report); }; });

    SchemaArgs sa;
    auto* schema = app.add_subcommand("schema", "render a schema or rule instance");
    schema->add_option("name", sa.name, "schema or rule name")->required();
    schema->add_option("entries", sa.entries, "formulas, row-major for matrices");
    schema->add_option("--gamma", sa.gamma, "width");
    schema->add_option("--theory", sa.theory, "theory supplying the signature");
    schema->add_option("--tree", sa.tree, "tree assignment file");
    schema->add_option("--bar", sa.bar, "bar as a list of nodes, e.g. ((0) (1 0))");
    schema->add_option("--blocks", sa.blocks, "variable blocks, e.g. (((y U)) ((z U)))");
    schema->add_option("--context", sa.context, "root context of a chain or choice instance");
    schema->callback([&] { action = [&] { run_schema(sa, g, in, report); }; });

    DeduceArgs da;
    auto* deduce = app.add_subcommand("deduce", "discharge a closed hypothesis from a proof");
    deduce->add_option("theory", da.theory)->required();
    deduce->add_option("sigma", da.sigma, "closed formula or file")->required();
    deduce->add_option("proof", da.proof)->required();
    deduce->callback([&] { action = [&] { run_deduce(da, g, in, report); }; });

    MorleyArgs ma;
    auto* morley = app.add_subcommand("morleyize", "name formulas with fresh relations");
    morley->add_option("theory", ma.theory)->required();
    morley->add_flag("--classical", ma.classical, "classical Morleyization into a coherent theory");
    morley->add_option("--goal", ma.goal, "sequent whose formulas are named too (classical)");
    morley->add_flag("--subformulas", ma.subformulas, "also list the subformula set");
    morley->callback([&] { action = [&] { run_morleyize(ma, g, in, report); }; });

    EncodeArgs ea;
    auto* encode = app.add_subcommand("encode", "theories from finite data");
    encode->add_option("kind", ea.kind, "diagram, branch or ultrafilter")->required();
    encode->add_option("input", ea.input, "structure, parent list or lattice")->required();
    encode->add_flag("--improper", ea.improper, "ultrafilter: allow the improper filter");
    encode->callback([&] { action = [&] { run_encode(ea, g, in, report); }; });

    ModelsArgs mo;
    auto* models = app.add_subcommand("models", "enumerate, check and combine finite models");
    models->add_option("files", mo.files, "THEORY, or STRUCTURE... with --eval/--filter");
    models->add_flag("--all", mo.all, "do not identify isomorphic models");
    models->add_flag("--exploding", mo.exploding, "include the exploding model");
    models->add_option("--min", mo.min_size, "smallest carrier");
    models->add_flag("--kripke", mo.kripke, "Kripke models instead");
    models->add_option("--max-nodes", mo.max_nodes);
    models->add_option("--max-domain", mo.max_domain);
    models->add_option("--check", mo.check, "structure to check against the theory");
    models->add_option("--eval", mo.eval, "formula to evaluate in the structure");
    models->add_option("--context", mo.context);
    models->add_option("--env", mo.env, "one element per context variable")->delimiter(',')->allow_extra_args(false);
    models->add_option("--filter", mo.filter, "reduced product by the principal filter of this index mask");
    models->add_option("--los", mo.los, "regular formula to compare across the reduced product");
    models->add_option("--class", mo.cls, "product elements for the context")->delimiter(',')->allow_extra_args(false);
    models->callback([&] { action = [&] { run_models(mo, g, in, report); }; });

    LatticeArgs la;
    auto* lattice = app.add_subcommand("lattice", "finite lattice checks and the pairing function");
    lattice->add_option("action", la.action, "check, quotient, primes, pairing or unpair")->required();
    lattice->add_option("args", la.args);
    lattice->add_option("--gamma", la.gamma);
    lattice->add_option("--height", la.height);
    lattice->callback([&] { action = [&] { run_lattice(la, g, in, report); }; });

    ForceArgs fa;
    auto* force = app.add_subcommand("force", "forcing in Kripke, Beth and categorical models");
    force->add_option("model", fa.model)->required();
    force->add_option("formula", fa.formula)->required();
    force->add_option("--engine", fa.engine)->check(CLI::IsMember({"kripke", "beth", "kj", "interpret"}));
    force->add_option("--node", fa.node, "node or object");
    force->add_option("--context", fa.context);
    force->add_option("--env", fa.env)->delimiter(',')->allow_extra_args(false);
    force->add_option("--site", fa.site, "site whose topology the forcing uses");
    force->callback([&] { action = [&] { run_force(fa, g, in, report); }; });

    SearchArgs se;
    auto* search = app.add_subcommand("search", "bounded Kripke countermodel search");
    search->add_option("--goal", se.goal);
    search->add_option("--theory", se.theory);
    search->add_option("--max-nodes", se.max_nodes);
    search->add_option("--max-domain", se.max_domain);
    search->add_option("--min-domain", se.min_domain);
    search->add_option("--limit", se.limit, "candidate models examined");
    search->add_option("--smash", se.smash, "Kripke models to put under a fresh root");
    search->callback([&] { action = [&] { run_search(se, g, in, report); }; });

    BethArgs ba;
    auto* beth = app.add_subcommand("beth-build", "Beth model from a structure on a site");
    beth->add_option("structure", ba.structure);
    beth->add_option("site", ba.site);
    beth->add_option("--lattice", ba.lattice, "lattice site with joint covers instead");
    beth->add_option("--atom", ba.atoms, "NAME=ELEMENT, true on the down-set")->delimiter(',')->allow_extra_args(false);
    beth->add_option("--formula", ba.formulas)->allow_extra_args(false)->required();
    beth->add_option("--root", ba.root);
    beth->add_option("--height", ba.height);
    beth->add_flag("--linear", ba.linear, "single-witness chain");
    beth->add_flag("--singleton", ba.singleton, "singleton covers only");
    beth->callback([&] { action = [&] { run_beth_build(ba, g, in, report); }; });

    SheafifyArgs sh;
    auto* sheafify_cmd = app.add_subcommand("sheafify", "associated sheaf of a presheaf");
    sheafify_cmd->add_option("site", sh.site)->required();
    sheafify_cmd->add_option("presheaf", sh.presheaf)->required();
    sheafify_cmd->callback([&] { action = [&] { run_sheafify(sh, g, in, report); }; });

    SiteArgs si;
    auto* site = app.add_subcommand("site-check", "topology, embedding and transport checks");
    site->add_option("site", si.site);
    site->add_option("--lattice", si.lattice, "lattice under joint covers");
    site->add_option("--tt", si.tt, "tree labels in level order, e.g. (1 a b a 0 0 b)");
    site->add_option("--gamma", si.gamma);
    site->add_option("--height", si.height);
    site->add_option("--chains", si.chains, "acyclic category for the chain transport");
    site->callback([&] { action = [&] { run_site_check(si, g, in, report); }; });

    SyncatArgs sy;
    auto* syncat = app.add_subcommand("syncat", "syntactic category: verify, compose, classify, construct");
    syncat->add_option("action", sy.action)->required();
    syncat->add_option("args", sy.args);
    syncat->add_option("--theory", sy.theory);
    syncat->callback([&] { action = [&] { run_syncat(sy, g, in, report); }; });

    SuiteArgs su;
    auto* suite_cmd = app.add_subcommand("suite", "acceptance criteria");
    suite_cmd->add_option("which", su.which, "all, or criterion numbers")->required();
    suite_cmd->callback([&] { action = [&] { run_suite(su, g, in, report, err); }; });

    std::vector<const char*> cargv{"ifol"};
    for (auto& s : argv) cargv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    report.command = app.get_subcommands().front()->get_name();
    try {
        action();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ifol::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    report.digest = in.digest(argv);
    report.sort();
    out << (g.format == "machine" ? render_machine(report) : render_text(report));
    return report.exit_code();
}

}  // namespace ifol::cli

#endif
