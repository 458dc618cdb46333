#ifndef IFOL_SYNTAX_HPP
#define IFOL_SYNTAX_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ifol {

class SortError : public std::runtime_error {
public:
    SortError(const std::string& sym, const std::string& msg)
        : std::runtime_error("sort error at '" + sym + "': " + msg), symbol(sym) {}
    std::string symbol;
};

class ProvisoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FragmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** \brief A typed variable (name + sort). Used for contexts and binder blocks. */
struct VarDecl {
    std::string name;
    std::string sort;
    bool operator==(const VarDecl& o) const { return name == o.name && sort == o.sort; }
    bool operator<(const VarDecl& o) const { return std::tie(name, sort) < std::tie(o.name, o.sort); }
};

using Context = std::vector<VarDecl>;

inline size_t hash_mix(size_t h, size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

// ---------------------------------------------------------------- terms

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

/**
 * \brief Terms are locally nameless: free variables carry names, bound
 * occurrences carry (binder distance, position in block).
 */
struct TermNode {
    enum Kind { Free, Bound, App } kind;
    std::string name;  // variable name or function symbol
    int depth = 0;     // Bound: number of binders between occurrence and binder
    int pos = 0;       // Bound: position in the binder block
    std::string sort;
    std::vector<Term> args;
    size_t hash = 0;
};

inline Term mk_term(TermNode n) {
    size_t h = std::hash<int>()(n.kind);
    if (n.kind == TermNode::Bound) {
        h = hash_mix(h, n.depth);
        h = hash_mix(h, n.pos);
    } else {
        h = hash_mix(h, std::hash<std::string>()(n.name));
    }
    h = hash_mix(h, std::hash<std::string>()(n.sort));
    for (auto& a : n.args) h = hash_mix(h, a->hash);
    n.hash = h;
    return std::make_shared<const TermNode>(std::move(n));
}

inline Term var(const std::string& name, const std::string& sort) {
    return mk_term(TermNode{TermNode::Free, name, 0, 0, sort, {}});
}
inline Term var(const VarDecl& d) { return var(d.name, d.sort); }
inline Term bound_ref(int depth, int pos, const std::string& sort) {
    return mk_term(TermNode{TermNode::Bound, "", depth, pos, sort, {}});
}
inline Term app(const std::string& f, std::vector<Term> args, const std::string& sort) {
    return mk_term(TermNode{TermNode::App, f, 0, 0, sort, std::move(args)});
}
inline Term constant(const std::string& c, const std::string& sort) { return app(c, {}, sort); }

inline int compare(const Term& a, const Term& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    if (a->kind == TermNode::Bound) {
        if (a->depth != b->depth) return a->depth < b->depth ? -1 : 1;
        if (a->pos != b->pos) return a->pos < b->pos ? -1 : 1;
    } else if (int c = a->name.compare(b->name)) {
        return c < 0 ? -1 : 1;
    }
    if (int c = a->sort.compare(b->sort)) return c < 0 ? -1 : 1;
    if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (int c = compare(a->args[i], b->args[i])) return c;
    return 0;
}
inline bool term_eq(const Term& a, const Term& b) { return a->hash == b->hash && compare(a, b) == 0; }

// ---------------------------------------------------------------- formulas

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

/**
 * \brief Infinitary-style formula tree. Conjunction/disjunction take lists
 * (empty conjunction is top, empty disjunction is bottom). Quantifiers bind a
 * block; the block names are display hints only and ignored by equality.
 */
struct FormulaNode {
    enum Kind { Rel, Eq, And, Or, Imp, Exists, Forall } kind;
    std::string name;           // Rel
    std::vector<Term> terms;    // Rel args, Eq lhs/rhs
    std::vector<Formula> subs;  // And/Or children, Imp (a,b), quantifier body
    Context block;              // quantifier block
    size_t hash = 0;
};

inline Formula mk_formula(FormulaNode n) {
    size_t h = std::hash<int>()(n.kind) + 17;
    h = hash_mix(h, std::hash<std::string>()(n.name));
    for (auto& t : n.terms) h = hash_mix(h, t->hash);
    for (auto& s : n.subs) h = hash_mix(h, s->hash);
    h = hash_mix(h, n.block.size());
    for (auto& d : n.block) h = hash_mix(h, std::hash<std::string>()(d.sort));
    n.hash = h;
    return std::make_shared<const FormulaNode>(std::move(n));
}

inline int compare(const Formula& a, const Formula& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
    if (a->terms.size() != b->terms.size()) return a->terms.size() < b->terms.size() ? -1 : 1;
    for (size_t i = 0; i < a->terms.size(); ++i)
        if (int c = compare(a->terms[i], b->terms[i])) return c;
    if (a->block.size() != b->block.size()) return a->block.size() < b->block.size() ? -1 : 1;
    for (size_t i = 0; i < a->block.size(); ++i)
        if (int c = a->block[i].sort.compare(b->block[i].sort)) return c < 0 ? -1 : 1;
    if (a->subs.size() != b->subs.size()) return a->subs.size() < b->subs.size() ? -1 : 1;
    for (size_t i = 0; i < a->subs.size(); ++i)
        if (int c = compare(a->subs[i], b->subs[i])) return c;
    return 0;
}

/** alpha-equivalence is structural equality */
inline bool same(const Formula& a, const Formula& b) { return a->hash == b->hash && compare(a, b) == 0; }

struct FormulaLess {
    bool operator()(const Formula& a, const Formula& b) const { return compare(a, b) < 0; }
};

// raw constructors
inline Formula rel(const std::string& r, std::vector<Term> args = {}) {
    return mk_formula(FormulaNode{FormulaNode::Rel, r, std::move(args), {}, {}});
}
inline Formula atom(const std::string& p) { return rel(p); }
inline Formula eq(Term a, Term b) { return mk_formula(FormulaNode{FormulaNode::Eq, "", {std::move(a), std::move(b)}, {}, {}}); }
inline Formula conj(std::vector<Formula> xs) { return mk_formula(FormulaNode{FormulaNode::And, "", {}, std::move(xs), {}}); }
inline Formula disj(std::vector<Formula> xs) { return mk_formula(FormulaNode{FormulaNode::Or, "", {}, std::move(xs), {}}); }
inline Formula imp(Formula a, Formula b) { return mk_formula(FormulaNode{FormulaNode::Imp, "", {}, {std::move(a), std::move(b)}, {}}); }
inline Formula top() { return conj({}); }
inline Formula bot() { return disj({}); }
inline Formula neg(Formula a) { return imp(std::move(a), bot()); }
inline Formula conj2(Formula a, Formula b) { return conj({std::move(a), std::move(b)}); }
inline Formula disj2(Formula a, Formula b) { return disj({std::move(a), std::move(b)}); }

inline bool is_top(const Formula& f) { return f->kind == FormulaNode::And && f->subs.empty(); }
inline bool is_bot(const Formula& f) { return f->kind == FormulaNode::Or && f->subs.empty(); }
inline bool is_atomic(const Formula& f) { return f->kind == FormulaNode::Rel || f->kind == FormulaNode::Eq; }

/** collapsing constructors: singleton lists become their element */
inline Formula conj_c(std::vector<Formula> xs) { return xs.size() == 1 ? xs[0] : conj(std::move(xs)); }
inline Formula disj_c(std::vector<Formula> xs) { return xs.size() == 1 ? xs[0] : disj(std::move(xs)); }

// ---------------------------------------------------------------- locally nameless plumbing

namespace detail {

inline Term map_term(const Term& t, int depth, const std::function<Term(const Term&, int)>& leaf) {
    if (t->kind != TermNode::App) return leaf(t, depth);
    bool changed = false;
    std::vector<Term> args;
    args.reserve(t->args.size());
    for (auto& a : t->args) {
        args.push_back(map_term(a, depth, leaf));
        changed |= args.back().get() != a.get();
    }
    if (!changed) return t;
    return app(t->name, std::move(args), t->sort);
}

inline Formula map_formula(const Formula& f, int depth, const std::function<Term(const Term&, int)>& leaf) {
    FormulaNode n = *f;
    bool changed = false;
    for (auto& t : n.terms) {
        Term u = map_term(t, depth, leaf);
        changed |= u.get() != t.get();
        t = u;
    }
    int inner = depth + ((f->kind == FormulaNode::Exists || f->kind == FormulaNode::Forall) ? 1 : 0);
    for (auto& s : n.subs) {
        Formula u = map_formula(s, inner, leaf);
        changed |= u.get() != s.get();
        s = u;
    }
    if (!changed) return f;
    return mk_formula(std::move(n));
}

inline void term_free(const Term& t, std::vector<VarDecl>& out, std::set<std::string>& seen) {
    if (t->kind == TermNode::Free) {
        if (seen.insert(t->name).second) out.push_back({t->name, t->sort});
    } else if (t->kind == TermNode::App) {
        for (auto& a : t->args) term_free(a, out, seen);
    }
}

inline void formula_free(const Formula& f, std::vector<VarDecl>& out, std::set<std::string>& seen) {
    for (auto& t : f->terms) term_free(t, out, seen);
    for (auto& s : f->subs) formula_free(s, out, seen);
}

inline bool term_has_loose(const Term& t, int depth) {
    if (t->kind == TermNode::Bound) return t->depth >= depth;
    for (auto& a : t->args)
        if (term_has_loose(a, depth)) return true;
    return false;
}

inline bool formula_has_loose(const Formula& f, int depth) {
    for (auto& t : f->terms)
        if (term_has_loose(t, depth)) return true;
    int inner = depth + ((f->kind == FormulaNode::Exists || f->kind == FormulaNode::Forall) ? 1 : 0);
    for (auto& s : f->subs)
        if (formula_has_loose(s, inner)) return true;
    return false;
}

}  // namespace detail

/** \brief Free variables in first-occurrence order. */
inline Context free_vars(const Formula& f) {
    Context out;
    std::set<std::string> seen;
    detail::formula_free(f, out, seen);
    return out;
}

inline Context free_vars(const Term& t) {
    Context out;
    std::set<std::string> seen;
    detail::term_free(t, out, seen);
    return out;
}

inline std::set<std::string> free_names(const Formula& f) {
    std::set<std::string> s;
    for (auto& d : free_vars(f)) s.insert(d.name);
    return s;
}

inline bool is_locally_closed(const Formula& f) { return !detail::formula_has_loose(f, 0); }

/** \brief Replace the outermost bound block (distance 0 at top) by free variables. */
inline Formula open_body(const Formula& body, const Context& names) {
    return detail::map_formula(body, 0, [&](const Term& t, int d) -> Term {
        if (t->kind == TermNode::Bound && t->depth == d) return var(names.at(t->pos).name, t->sort);
        return t;
    });
}

/** \brief Abstract free variables `names` into bound references of a new outermost block. */
inline Formula close_body(const Formula& f, const Context& names) {
    std::map<std::string, int> idx;
    for (size_t i = 0; i < names.size(); ++i) idx[names[i].name] = static_cast<int>(i);
    return detail::map_formula(f, 0, [&](const Term& t, int d) -> Term {
        if (t->kind == TermNode::Free) {
            auto it = idx.find(t->name);
            if (it != idx.end()) return bound_ref(d, it->second, t->sort);
        }
        return t;
    });
}

/** raw quantifiers over the given (free) variables of `f` */
inline Formula exists_raw(const Context& vars, const Formula& f) {
    return mk_formula(FormulaNode{FormulaNode::Exists, "", {}, {close_body(f, vars)}, vars});
}
inline Formula forall_raw(const Context& vars, const Formula& f) {
    return mk_formula(FormulaNode{FormulaNode::Forall, "", {}, {close_body(f, vars)}, vars});
}
/** quantifiers omitting empty blocks */
inline Formula exists(const Context& vars, const Formula& f) { return vars.empty() ? f : exists_raw(vars, f); }
inline Formula forall(const Context& vars, const Formula& f) { return vars.empty() ? f : forall_raw(vars, f); }

/** \brief Fresh name based on `base` avoiding `used`. */
inline std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
    if (!used.count(base)) return base;
    std::string stem = base;
    while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
    if (stem.empty()) stem = "v";
    for (int i = 1;; ++i) {
        std::string c = stem + std::to_string(i);
        if (!used.count(c)) return c;
    }
}

/**
 * \brief Names for opening a quantifier block: the hint names, renamed away
 * from `avoid` and from each other.
 */
inline Context opening_names(const Context& block, std::set<std::string> avoid) {
    Context out;
    for (auto& d : block) {
        std::string n = fresh_name(d.name.empty() ? "v" : d.name, avoid);
        avoid.insert(n);
        out.push_back({n, d.sort});
    }
    return out;
}

/** \brief Open a quantified formula with names fresh for its free variables (plus `avoid`). */
inline std::pair<Context, Formula> open_quantifier(const Formula& q, std::set<std::string> avoid = {}) {
    for (auto& n : free_names(q)) avoid.insert(n);
    Context names = opening_names(q->block, avoid);
    return {names, open_body(q->subs[0], names)};
}

// ---------------------------------------------------------------- substitution

using Subst = std::map<std::string, Term>;

inline Term substitute(const Term& t, const Subst& s) {
    return detail::map_term(t, 0, [&](const Term& u, int) -> Term {
        if (u->kind == TermNode::Free) {
            auto it = s.find(u->name);
            if (it != s.end()) return it->second;
        }
        return u;
    });
}

/** \brief Capture-avoiding substitution of terms for free variables. */
inline Formula substitute(const Formula& f, const Subst& s) {
    if (s.empty()) return f;
    return detail::map_formula(f, 0, [&](const Term& u, int) -> Term {
        if (u->kind == TermNode::Free) {
            auto it = s.find(u->name);
            if (it != s.end()) return it->second;
        }
        return u;
    });
}

inline Formula rename(const Formula& f, const Context& from, const Context& to) {
    Subst s;
    for (size_t i = 0; i < from.size(); ++i) s[from[i].name] = var(to.at(i));
    return substitute(f, s);
}

// ---------------------------------------------------------------- signature / theory

enum class Fragment { Regular, Coherent, Geometric, FirstOrder, Classical };

inline std::string fragment_name(Fragment f) {
    switch (f) {
        case Fragment::Regular: return "regular";
        case Fragment::Coherent: return "coherent";
        case Fragment::Geometric: return "geometric";
        case Fragment::FirstOrder: return "first-order";
        case Fragment::Classical: return "first-order+em";
    }
    return "?";
}

inline Fragment parse_fragment(const std::string& s) {
    if (s == "regular") return Fragment::Regular;
    if (s == "coherent") return Fragment::Coherent;
    if (s == "geometric" || s == "geometric-bounded") return Fragment::Geometric;
    if (s == "first-order" || s == "fo" || s == "intuitionistic") return Fragment::FirstOrder;
    if (s == "first-order+em" || s == "classical" || s == "fo+em") return Fragment::Classical;
    throw std::invalid_argument("unknown fragment '" + s + "'");
}

/** does the fragment admit this connective-level shape? */
inline bool in_fragment(const Formula& f, Fragment fr) {
    switch (f->kind) {
        case FormulaNode::Rel:
        case FormulaNode::Eq: return true;
        case FormulaNode::Or:
            if (fr == Fragment::Regular) return false;
            break;
        case FormulaNode::Imp:
        case FormulaNode::Forall:
            if (fr != Fragment::FirstOrder && fr != Fragment::Classical) return false;
            break;
        default: break;
    }
    for (auto& s : f->subs)
        if (!in_fragment(s, fr)) return false;
    return true;
}

/** smallest fragment containing f */
inline Fragment fragment_of(const Formula& f) {
    for (Fragment fr : {Fragment::Regular, Fragment::Coherent, Fragment::FirstOrder})
        if (in_fragment(f, fr)) return fr;
    return Fragment::FirstOrder;
}

struct FuncDecl {
    std::string name;
    std::vector<std::string> args;
    std::string result;
};

struct RelDecl {
    std::string name;
    std::vector<std::string> args;
};

/** \brief Many-sorted signature; declaration order is kept for determinism. */
struct Signature {
    std::vector<std::string> sorts;
    std::vector<FuncDecl> funcs;
    std::vector<RelDecl> rels;

    bool has_sort(const std::string& s) const { return std::find(sorts.begin(), sorts.end(), s) != sorts.end(); }
    const FuncDecl* func(const std::string& n) const {
        for (auto& f : funcs)
            if (f.name == n) return &f;
        return nullptr;
    }
    const RelDecl* rel(const std::string& n) const {
        for (auto& r : rels)
            if (r.name == n) return &r;
        return nullptr;
    }
    void add_sort(const std::string& s) {
        if (!has_sort(s)) sorts.push_back(s);
    }
    void add_func(FuncDecl d) {
        if (auto* f = func(d.name)) {
            if (f->args != d.args || f->result != d.result) throw SortError(d.name, "conflicting function declaration");
            return;
        }
        for (auto& a : d.args) add_sort(a);
        add_sort(d.result);
        funcs.push_back(std::move(d));
    }
    void add_rel(RelDecl d) {
        if (auto* r = rel(d.name)) {
            if (r->args != d.args) throw SortError(d.name, "conflicting relation declaration");
            return;
        }
        for (auto& a : d.args) add_sort(a);
        rels.push_back(std::move(d));
    }
    void merge(const Signature& o) {
        for (auto& s : o.sorts) add_sort(s);
        for (auto& f : o.funcs) add_func(f);
        for (auto& r : o.rels) add_rel(r);
    }
    bool operator==(const Signature& o) const {
        if (sorts != o.sorts || funcs.size() != o.funcs.size() || rels.size() != o.rels.size()) return false;
        for (size_t i = 0; i < funcs.size(); ++i)
            if (funcs[i].name != o.funcs[i].name || funcs[i].args != o.funcs[i].args || funcs[i].result != o.funcs[i].result)
                return false;
        for (size_t i = 0; i < rels.size(); ++i)
            if (rels[i].name != o.rels[i].name || rels[i].args != o.rels[i].args) return false;
        return true;
    }
};

struct Sequent {
    Context ctx;
    Formula lhs;
    Formula rhs;
};

inline bool same(const Sequent& a, const Sequent& b) {
    return a.ctx == b.ctx && same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

struct Theory {
    Signature sig;
    std::vector<Sequent> axioms;
    Fragment fragment = Fragment::Coherent;
};

// ---------------------------------------------------------------- sort checking

inline std::string sort_of(const Signature& sig, const Term& t, const std::map<std::string, std::string>& scope) {
    switch (t->kind) {
        case TermNode::Free: {
            auto it = scope.find(t->name);
            if (it == scope.end()) throw SortError(t->name, "variable not in context");
            if (it->second != t->sort) throw SortError(t->name, "variable used at sort " + t->sort + " but declared " + it->second);
            return t->sort;
        }
        case TermNode::Bound: return t->sort;
        case TermNode::App: {
            auto* f = sig.func(t->name);
            if (!f) throw SortError(t->name, "undeclared function symbol");
            if (f->args.size() != t->args.size()) throw SortError(t->name, "wrong arity");
            for (size_t i = 0; i < t->args.size(); ++i) {
                std::string s = sort_of(sig, t->args[i], scope);
                if (s != f->args[i]) throw SortError(t->name, "argument " + std::to_string(i) + " has sort " + s + ", expected " + f->args[i]);
            }
            if (t->sort != f->result) throw SortError(t->name, "result sort mismatch");
            return f->result;
        }
    }
    return "";
}

namespace detail {
inline void check_formula_rec(const Signature& sig, const Formula& f, const std::map<std::string, std::string>& scope,
                              std::vector<const Context*>& binders) {
    auto check_bound = [&](const Term& t, auto&& self) -> void {
        if (t->kind == TermNode::Bound) {
            int d = t->depth;
            if (d >= static_cast<int>(binders.size())) throw SortError("#", "dangling bound reference");
            const Context& b = *binders[binders.size() - 1 - d];
            if (t->pos >= static_cast<int>(b.size()) || b[t->pos].sort != t->sort) throw SortError("#", "bound reference sort mismatch");
        }
        for (auto& a : t->args) self(a, self);
    };
    switch (f->kind) {
        case FormulaNode::Rel: {
            auto* r = sig.rel(f->name);
            if (!r) throw SortError(f->name, "undeclared relation symbol");
            if (r->args.size() != f->terms.size()) throw SortError(f->name, "wrong arity");
            for (size_t i = 0; i < f->terms.size(); ++i) {
                check_bound(f->terms[i], check_bound);
                std::string s = sort_of(sig, f->terms[i], scope);
                if (s != r->args[i]) throw SortError(f->name, "argument " + std::to_string(i) + " has sort " + s + ", expected " + r->args[i]);
            }
            return;
        }
        case FormulaNode::Eq: {
            for (auto& t : f->terms) check_bound(t, check_bound);
            std::string a = sort_of(sig, f->terms[0], scope), b = sort_of(sig, f->terms[1], scope);
            if (a != b) throw SortError("eq", "sides have sorts " + a + " and " + b);
            return;
        }
        case FormulaNode::Exists:
        case FormulaNode::Forall:
            for (auto& d : f->block)
                if (!sig.has_sort(d.sort)) throw SortError(d.sort, "undeclared sort");
            binders.push_back(&f->block);
            check_formula_rec(sig, f->subs[0], scope, binders);
            binders.pop_back();
            return;
        default:
            for (auto& s : f->subs) check_formula_rec(sig, s, scope, binders);
    }
}
}  // namespace detail

/** \brief Throws SortError (naming the offending symbol) unless f is well-sorted in ctx. */
inline void check_formula(const Signature& sig, const Context& ctx, const Formula& f) {
    std::map<std::string, std::string> scope;
    for (auto& d : ctx) {
        if (!sig.has_sort(d.sort)) throw SortError(d.sort, "undeclared sort");
        if (!scope.emplace(d.name, d.sort).second) throw SortError(d.name, "duplicate context variable");
    }
    std::vector<const Context*> binders;
    detail::check_formula_rec(sig, f, scope, binders);
}

inline void check_sequent(const Signature& sig, const Sequent& s) {
    check_formula(sig, s.ctx, s.lhs);
    check_formula(sig, s.ctx, s.rhs);
}

inline void check_theory(const Theory& t) {
    for (auto& a : t.axioms) {
        check_sequent(t.sig, a);
        if (!in_fragment(a.lhs, t.fragment) || !in_fragment(a.rhs, t.fragment))
            throw FragmentError("axiom outside the " + fragment_name(t.fragment) + " fragment");
    }
}

// ---------------------------------------------------------------- subformulas

/** \brief Immediate subformulas, quantifier bodies opened with fresh hint names. */
inline std::vector<Formula> immediate_subformulas(const Formula& f) {
    switch (f->kind) {
        case FormulaNode::Exists:
        case FormulaNode::Forall: return {open_quantifier(f).second};
        default: return f->subs;
    }
}

/** \brief Closure under immediate subformulas, preorder, duplicates dropped. */
inline std::vector<Formula> subformula_closure(const std::vector<Formula>& roots) {
    std::vector<Formula> out;
    std::set<Formula, FormulaLess> seen;
    std::function<void(const Formula&)> go = [&](const Formula& f) {
        if (!seen.insert(f).second) return;
        out.push_back(f);
        for (auto& s : immediate_subformulas(f)) go(s);
    };
    for (auto& r : roots) go(r);
    return out;
}

inline std::vector<Formula> subformula_set(const Theory& t, const std::vector<Formula>& extra = {}) {
    std::vector<Formula> roots;
    for (auto& a : t.axioms) {
        roots.push_back(a.lhs);
        roots.push_back(a.rhs);
    }
    for (auto& e : extra) roots.push_back(e);
    return subformula_closure(roots);
}

// ---------------------------------------------------------------- misc helpers

inline Context context_union(const Context& a, const Context& b) {
    Context out = a;
    for (auto& d : b)
        if (std::none_of(out.begin(), out.end(), [&](const VarDecl& e) { return e.name == d.name; })) out.push_back(d);
    return out;
}

inline bool context_contains(const Context& ctx, const std::string& name) {
    return std::any_of(ctx.begin(), ctx.end(), [&](const VarDecl& d) { return d.name == name; });
}

inline std::set<std::string> context_names(const Context& ctx) {
    std::set<std::string> s;
    for (auto& d : ctx) s.insert(d.name);
    return s;
}

/** conjunction of pointwise equalities */
inline Formula eqs(const Context& xs, const Context& ys) {
    std::vector<Formula> parts;
    for (size_t i = 0; i < xs.size(); ++i) parts.push_back(eq(var(xs[i]), var(ys[i])));
    return conj_c(parts);
}

}  // namespace ifol

#endif
