#ifndef IFOL_TEXT_HPP
#define IFOL_TEXT_HPP

#include "sexpr.hpp"
#include "syntax.hpp"

namespace ifol {

inline const std::string kDefaultSort = "U";

namespace detail {

inline bool is_keyword(const std::string& s) {
    static const std::set<std::string> kw = {"true", "false", "and", "or", "imp", "not", "iff", "ex", "all",
                                             "eq", "=", "rel", "seq", "exists", "forall"};
    return kw.count(s) > 0;
}

/**
 * Name resolution while reading. With `infer` set, unknown symbols extend
 * that signature; otherwise `sig` must declare everything.
 */
struct Scope {
    const Signature* sig = nullptr;
    Signature* infer = nullptr;
    std::map<std::string, std::string> free;  // context variables
    bool unknown_is_var = true;                // standalone formulas: unknown symbols are variables
    std::vector<Context> binders;
    std::vector<VarDecl>* seen_free = nullptr;

    const Signature& decls() const { return infer ? *infer : *sig; }

    std::optional<Term> lookup_bound(const std::string& n) const {
        for (int i = static_cast<int>(binders.size()) - 1; i >= 0; --i) {
            const Context& b = binders[i];
            for (int j = static_cast<int>(b.size()) - 1; j >= 0; --j)
                if (b[j].name == n) return bound_ref(static_cast<int>(binders.size()) - 1 - i, j, b[j].sort);
        }
        return std::nullopt;
    }
};

inline VarDecl read_decl(const SExpr& e) {
    if (e.is_symbol()) {
        auto c = e.text.find(':');
        if (c == std::string::npos) return {e.text, kDefaultSort};
        if (c == 0 || c + 1 == e.text.size()) throw ParseError("malformed variable declaration '" + e.text + "'", e.pos);
        return {e.text.substr(0, c), e.text.substr(c + 1)};
    }
    if (e.is_list() && e.size() == 2 && e[0].is_symbol() && e[1].is_symbol()) return {e[0].text, e[1].text};
    throw ParseError("expected variable declaration", e.pos);
}

inline Context read_context(const SExpr& e) {
    if (!e.is_list()) throw ParseError("expected context list", e.pos);
    Context ctx;
    std::set<std::string> names;
    for (auto& d : e.items) {
        VarDecl v = read_decl(d);
        if (is_keyword(v.name)) throw ParseError("keyword used as variable: " + v.name, d.pos);
        if (!names.insert(v.name).second) throw ParseError("duplicate variable '" + v.name + "'", d.pos);
        ctx.push_back(v);
    }
    return ctx;
}

inline Term read_term(const SExpr& e, Scope& sc) {
    if (e.is_symbol()) {
        const std::string& n = e.text;
        if (auto b = sc.lookup_bound(n)) return *b;
        auto it = sc.free.find(n);
        if (it != sc.free.end()) return var(n, it->second);
        if (auto* f = sc.decls().func(n)) {
            if (!f->args.empty()) throw SortError(n, "function used without arguments");
            return constant(n, f->result);
        }
        if (sc.infer && sc.unknown_is_var) {
            sc.free[n] = kDefaultSort;
            if (sc.seen_free) sc.seen_free->push_back({n, kDefaultSort});
            return var(n, kDefaultSort);
        }
        if (sc.infer) {
            sc.infer->add_func({n, {}, kDefaultSort});
            return constant(n, kDefaultSort);
        }
        throw SortError(n, "unknown symbol");
    }
    if (e.is_list() && e.size() >= 1 && e[0].is_symbol()) {
        std::string f = e[0].text;
        std::vector<Term> args;
        std::vector<std::string> sorts;
        for (size_t i = 1; i < e.size(); ++i) {
            args.push_back(read_term(e[i], sc));
            sorts.push_back(args.back()->sort);
        }
        if (auto* d = sc.decls().func(f)) {
            if (d->args.size() != args.size()) throw SortError(f, "wrong arity");
            for (size_t i = 0; i < args.size(); ++i)
                if (d->args[i] != sorts[i]) throw SortError(f, "argument " + std::to_string(i) + " has sort " + sorts[i] + ", expected " + d->args[i]);
            return app(f, std::move(args), d->result);
        }
        if (!sc.infer) throw SortError(f, "undeclared function symbol");
        sc.infer->add_func({f, sorts, kDefaultSort});
        return app(f, std::move(args), kDefaultSort);
    }
    throw ParseError("malformed term", e.pos);
}

inline Formula read_formula(const SExpr& e, Scope& sc);

inline Formula read_rel(const std::string& r, const std::vector<SExpr>& argx, Scope& sc, Pos pos) {
    std::vector<Term> args;
    std::vector<std::string> sorts;
    for (auto& a : argx) {
        args.push_back(read_term(a, sc));
        sorts.push_back(args.back()->sort);
    }
    if (auto* d = sc.decls().rel(r)) {
        if (d->args.size() != args.size()) throw SortError(r, "wrong arity");
        for (size_t i = 0; i < args.size(); ++i)
            if (d->args[i] != sorts[i]) throw SortError(r, "argument " + std::to_string(i) + " has sort " + sorts[i] + ", expected " + d->args[i]);
    } else if (sc.infer) {
        sc.infer->add_rel({r, sorts});
    } else {
        throw SortError(r, "undeclared relation symbol");
    }
    (void)pos;
    return rel(r, std::move(args));
}

inline Formula read_formula(const SExpr& e, Scope& sc) {
    if (e.is_symbol()) {
        if (e.text == "true") return top();
        if (e.text == "false") return bot();
        if (is_keyword(e.text)) throw ParseError("unexpected keyword '" + e.text + "'", e.pos);
        return read_rel(e.text, {}, sc, e.pos);
    }
    if (!e.is_list() || e.size() == 0 || !e[0].is_symbol()) throw ParseError("malformed formula", e.pos);
    const std::string h = e[0].text;
    auto rest = [&](size_t from) {
        std::vector<Formula> xs;
        for (size_t i = from; i < e.size(); ++i) xs.push_back(read_formula(e[i], sc));
        return xs;
    };
    auto need = [&](size_t n) {
        if (e.size() != n) throw ParseError("'" + h + "' expects " + std::to_string(n - 1) + " arguments", e.pos);
    };
    if (h == "and") return conj(rest(1));
    if (h == "or") return disj(rest(1));
    if (h == "imp") {
        need(3);
        auto xs = rest(1);
        return imp(xs[0], xs[1]);
    }
    if (h == "not") {
        need(2);
        return neg(read_formula(e[1], sc));
    }
    if (h == "iff") {
        need(3);
        auto xs = rest(1);
        return conj({imp(xs[0], xs[1]), imp(xs[1], xs[0])});
    }
    if (h == "eq" || h == "=") {
        need(3);
        Term a = read_term(e[1], sc), b = read_term(e[2], sc);
        if (a->sort != b->sort) throw SortError("eq", "sides have sorts " + a->sort + " and " + b->sort);
        return eq(a, b);
    }
    if (h == "rel") {
        if (e.size() < 2 || !e[1].is_symbol()) throw ParseError("'rel' expects a relation symbol", e.pos);
        return read_rel(e[1].text, std::vector<SExpr>(e.items.begin() + 2, e.items.end()), sc, e.pos);
    }
    if (h == "ex" || h == "exists" || h == "all" || h == "forall") {
        need(3);
        Context block = read_context(e[1]);
        if (sc.infer)
            for (auto& d : block) sc.infer->add_sort(d.sort);
        else
            for (auto& d : block)
                if (!sc.sig->has_sort(d.sort)) throw SortError(d.sort, "undeclared sort");
        sc.binders.push_back(block);
        Formula body = read_formula(e[2], sc);
        sc.binders.pop_back();
        auto kind = (h == "ex" || h == "exists") ? FormulaNode::Exists : FormulaNode::Forall;
        return mk_formula(FormulaNode{kind, "", {}, {body}, block});
    }
    if (is_keyword(h)) throw ParseError("misplaced keyword '" + h + "'", e.pos);
    return read_rel(h, std::vector<SExpr>(e.items.begin() + 1, e.items.end()), sc, e.pos);
}

// ------------------------------------------------------------ printing

struct Printer {
    std::set<std::string> avoid;
    std::vector<std::vector<std::string>> names;

    SExpr term(const Term& t) const {
        switch (t->kind) {
            case TermNode::Free: return SExpr::sym(t->name);
            case TermNode::Bound: {
                int i = static_cast<int>(names.size()) - 1 - t->depth;
                if (i < 0) return SExpr::sym("#" + std::to_string(t->depth) + "." + std::to_string(t->pos));
                return SExpr::sym(names[i].at(t->pos));
            }
            case TermNode::App: {
                if (t->args.empty()) return SExpr::sym(t->name);
                SExpr l = SExpr::list({SExpr::sym(t->name)});
                for (auto& a : t->args) l.add(term(a));
                return l;
            }
        }
        return {};
    }

    SExpr formula(const Formula& f) {
        switch (f->kind) {
            case FormulaNode::Rel: {
                if (f->terms.empty() && !is_keyword(f->name)) return SExpr::sym(f->name);
                SExpr l = SExpr::list({SExpr::sym("rel"), SExpr::sym(f->name)});
                for (auto& t : f->terms) l.add(term(t));
                return l;
            }
            case FormulaNode::Eq: return SExpr::list({SExpr::sym("eq"), term(f->terms[0]), term(f->terms[1])});
            case FormulaNode::And:
            case FormulaNode::Or: {
                if (f->subs.empty()) return SExpr::sym(f->kind == FormulaNode::And ? "true" : "false");
                SExpr l = SExpr::list({SExpr::sym(f->kind == FormulaNode::And ? "and" : "or")});
                for (auto& s : f->subs) l.add(formula(s));
                return l;
            }
            case FormulaNode::Imp:
                if (is_bot(f->subs[1])) return SExpr::list({SExpr::sym("not"), formula(f->subs[0])});
                return SExpr::list({SExpr::sym("imp"), formula(f->subs[0]), formula(f->subs[1])});
            case FormulaNode::Exists:
            case FormulaNode::Forall: {
                std::vector<std::string> ns;
                SExpr ctx = SExpr::list();
                for (auto& d : f->block) {
                    std::string n = fresh_name(d.name.empty() || d.name[0] == '#' ? "v" : d.name, avoid);
                    avoid.insert(n);
                    ns.push_back(n);
                    ctx.add(SExpr::sym(n + ":" + d.sort));
                }
                names.push_back(ns);
                SExpr body = formula(f->subs[0]);
                names.pop_back();
                for (auto& n : ns) avoid.erase(n);
                return SExpr::list({SExpr::sym(f->kind == FormulaNode::Exists ? "ex" : "all"), ctx, body});
            }
        }
        return {};
    }
};

}  // namespace detail

inline SExpr context_sexpr(const Context& ctx) {
    SExpr l = SExpr::list();
    for (auto& d : ctx) l.add(SExpr::sym(d.name + ":" + d.sort));
    return l;
}

inline SExpr term_sexpr(const Term& t) { return detail::Printer{}.term(t); }

inline SExpr formula_sexpr(const Formula& f, const Context& ctx = {}) {
    detail::Printer p;
    p.avoid = free_names(f);
    for (auto& d : ctx) p.avoid.insert(d.name);
    return p.formula(f);
}

inline std::string print(const Formula& f) { return to_string(formula_sexpr(f)); }
inline std::string print(const Term& t) { return to_string(term_sexpr(t)); }

inline SExpr sequent_sexpr(const Sequent& s) {
    return SExpr::list({SExpr::sym("seq"), context_sexpr(s.ctx), formula_sexpr(s.lhs, s.ctx), formula_sexpr(s.rhs, s.ctx)});
}
inline std::string print(const Sequent& s) { return to_string(sequent_sexpr(s)); }

inline SExpr signature_sexpr(const Signature& sig) {
    SExpr l = SExpr::list({SExpr::sym("signature")});
    for (auto& s : sig.sorts) l.add(SExpr::list({SExpr::sym("sort"), SExpr::sym(s)}));
    for (auto& f : sig.funcs) {
        SExpr a = SExpr::list();
        for (auto& s : f.args) a.add(SExpr::sym(s));
        l.add(SExpr::list({SExpr::sym("func"), SExpr::sym(f.name), a, SExpr::sym(f.result)}));
    }
    for (auto& r : sig.rels) {
        SExpr a = SExpr::list();
        for (auto& s : r.args) a.add(SExpr::sym(s));
        l.add(SExpr::list({SExpr::sym("rel"), SExpr::sym(r.name), a}));
    }
    return l;
}

inline SExpr theory_sexpr(const Theory& t) {
    SExpr l = SExpr::list({SExpr::sym("theory"), SExpr::list({SExpr::sym("fragment"), SExpr::sym(fragment_name(t.fragment))})});
    SExpr sig = signature_sexpr(t.sig);
    for (size_t i = 1; i < sig.size(); ++i) l.add(sig[i]);
    for (auto& a : t.axioms) l.add(SExpr::list({SExpr::sym("axiom"), sequent_sexpr(a)}));
    return l;
}
inline std::string print(const Theory& t) { return to_pretty(theory_sexpr(t)); }

// ------------------------------------------------------------ reading

/** \brief Read signature declarations (sort/func/rel/const items) into sig. Returns true if e was one. */
inline bool read_decl_item(const SExpr& e, Signature& sig) {
    std::string h = e.head();
    auto sorts_of = [&](const SExpr& l) {
        std::vector<std::string> out;
        if (!l.is_list()) throw ParseError("expected sort list", l.pos);
        for (auto& s : l.items) {
            if (!s.is_symbol()) throw ParseError("expected sort name", s.pos);
            out.push_back(s.text);
        }
        return out;
    };
    if (h == "sort" || h == "sorts") {
        for (size_t i = 1; i < e.size(); ++i) sig.add_sort(e[i].text);
        return true;
    }
    if (h == "func") {
        if (e.size() != 4 || !e[1].is_symbol() || !e[3].is_symbol()) throw ParseError("(func NAME (ARGSORTS) SORT)", e.pos);
        sig.add_func({e[1].text, sorts_of(e[2]), e[3].text});
        return true;
    }
    if (h == "const") {
        if (e.size() != 3) throw ParseError("(const NAME SORT)", e.pos);
        sig.add_func({e[1].text, {}, e[2].text});
        return true;
    }
    if (h == "rel") {
        if (e.size() < 2 || e.size() > 3 || !e[1].is_symbol()) throw ParseError("(rel NAME (ARGSORTS))", e.pos);
        sig.add_rel({e[1].text, e.size() == 3 ? sorts_of(e[2]) : std::vector<std::string>{}});
        return true;
    }
    return false;
}

inline Signature read_signature(const SExpr& e) {
    if (e.head() != "signature") throw ParseError("expected (signature ...)", e.pos);
    Signature sig;
    for (size_t i = 1; i < e.size(); ++i)
        if (!read_decl_item(e[i], sig)) throw ParseError("unknown signature item", e[i].pos);
    return sig;
}

/** \brief Read a formula. Without a signature, symbols are inferred into `inferred` (if given). */
inline Formula read_formula(const SExpr& e, const Signature* sig = nullptr, const Context& ctx = {},
                            Signature* inferred = nullptr) {
    detail::Scope sc;
    Signature local;
    if (sig) {
        sc.sig = sig;
        sc.unknown_is_var = false;
    } else {
        sc.infer = inferred ? inferred : &local;
    }
    for (auto& d : ctx) sc.free[d.name] = d.sort;
    return detail::read_formula(e, sc);
}

inline Sequent read_sequent(const SExpr& e, const Signature* sig = nullptr, Signature* inferred = nullptr) {
    if (e.head() != "seq" || e.size() != 4) throw ParseError("expected (seq CONTEXT LHS RHS)", e.pos);
    Sequent s;
    s.ctx = detail::read_context(e[1]);
    detail::Scope sc;
    Signature local;
    if (sig) {
        sc.sig = sig;
        for (auto& d : s.ctx)
            if (!sig->has_sort(d.sort)) throw SortError(d.sort, "undeclared sort");
    } else {
        sc.infer = inferred ? inferred : &local;
        for (auto& d : s.ctx) sc.infer->add_sort(d.sort);
    }
    sc.unknown_is_var = false;
    for (auto& d : s.ctx) sc.free[d.name] = d.sort;
    s.lhs = detail::read_formula(e[2], sc);
    s.rhs = detail::read_formula(e[3], sc);
    return s;
}

inline Theory read_theory(const SExpr& e) {
    if (e.head() != "theory") throw ParseError("expected (theory ...)", e.pos);
    Theory t;
    bool declared = false;
    std::vector<const SExpr*> axioms;
    for (size_t i = 1; i < e.size(); ++i) {
        const SExpr& it = e[i];
        std::string h = it.head();
        if (h == "fragment") {
            if (it.size() != 2) throw ParseError("(fragment NAME)", it.pos);
            try {
                t.fragment = parse_fragment(it[1].text);
            } catch (const std::invalid_argument& ex) {
                throw ParseError(ex.what(), it.pos);
            }
        } else if (h == "signature") {
            t.sig.merge(read_signature(it));
            declared = true;
        } else if (h == "axiom") {
            if (it.size() != 2) throw ParseError("(axiom SEQUENT)", it.pos);
            axioms.push_back(&it[1]);
        } else if (read_decl_item(it, t.sig)) {
            declared = true;
        } else {
            throw ParseError("unknown theory item '" + h + "'", it.pos);
        }
    }
    for (auto* a : axioms) t.axioms.push_back(declared ? read_sequent(*a, &t.sig) : read_sequent(*a, nullptr, &t.sig));
    check_theory(t);
    return t;
}

inline Formula parse_formula(const std::string& s, const Signature* sig = nullptr, const Context& ctx = {}) {
    return read_formula(read_sexpr(s), sig, ctx);
}
inline Sequent parse_sequent(const std::string& s, const Signature* sig = nullptr) { return read_sequent(read_sexpr(s), sig); }
inline Theory parse_theory(const std::string& s) { return read_theory(read_sexpr(s)); }

/** \brief Signature with every symbol used by the given formulas (sort U for unknowns). */
inline Signature infer_signature(const std::vector<std::string>& formulas) {
    Signature sig;
    for (auto& f : formulas) read_formula(read_sexpr(f), nullptr, {}, &sig);
    return sig;
}

}  // namespace ifol

#endif
