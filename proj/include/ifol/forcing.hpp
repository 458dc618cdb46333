#ifndef IFOL_FORCING_HPP
#define IFOL_FORCING_HPP

#include "lattice.hpp"
#include "presheaf.hpp"
#include "setmodels.hpp"
#include "sheaf.hpp"

namespace ifol {

/**
 * \brief A Kripke model on a finite rooted tree. Nodes are numbered so that
 * parents come first (parent[0] = -1). up[k][sort] maps D(parent k) into D(k).
 */
struct KripkeModel {
    Signature sig;
    std::vector<int> parent;
    std::vector<FinStructure> worlds;
    std::vector<std::map<std::string, std::vector<int>>> up;

    int size() const { return static_cast<int>(parent.size()); }
    int level(int k) const {
        int d = 0;
        for (int x = parent[k]; x >= 0; x = parent[x]) ++d;
        return d;
    }
    /** k is below or equal to l */
    bool le(int k, int l) const {
        for (int x = l; x >= 0; x = parent[x])
            if (x == k) return true;
        return false;
    }
    std::vector<int> children(int k) const {
        std::vector<int> c;
        for (int i = 0; i < size(); ++i)
            if (parent[i] == k) c.push_back(i);
        return c;
    }
    int height() const {
        int h = 0;
        for (int k = 0; k < size(); ++k) h = std::max(h, level(k));
        return h;
    }
    std::vector<int> leaves() const {
        std::vector<int> out;
        for (int k = 0; k < size(); ++k)
            if (children(k).empty()) out.push_back(k);
        return out;
    }
    /** D_{kl}(x) for k <= l */
    int transit(int k, int l, const std::string& sort, int x) const {
        std::vector<int> path;
        for (int y = l; y != k; y = parent[y]) {
            if (y < 0) throw std::invalid_argument("transit needs k below l");
            path.push_back(y);
        }
        for (auto it = path.rbegin(); it != path.rend(); ++it) x = up[*it].at(sort).at(x);
        return x;
    }

    /** tree shape, transition maps, naturality of functions, monotone relations */
    void validate(bool allow_exploding = false) const {
        int n = size();
        if (n == 0) throw std::invalid_argument("a Kripke model needs a root");
        if (parent[0] != -1) throw std::invalid_argument("node 0 must be the root");
        if (static_cast<int>(worlds.size()) != n || static_cast<int>(up.size()) != n)
            throw std::invalid_argument("one world and one transition map per node");
        for (int k = 1; k < n; ++k)
            if (parent[k] < 0 || parent[k] >= k) throw std::invalid_argument("parents must precede children");
        for (int k = 0; k < n; ++k) {
            const FinStructure& W = worlds[k];
            if (!(W.sig == sig)) throw std::invalid_argument("node " + std::to_string(k) + " has another signature");
            if (W.exploding && !allow_exploding) throw std::invalid_argument("node " + std::to_string(k) + " forces falsity");
            if (k == 0) continue;
            const FinStructure& P = worlds[parent[k]];
            for (auto& s : sig.sorts) {
                auto it = up[k].find(s);
                if (it == up[k].end() || static_cast<int>(it->second.size()) != P.size(s))
                    throw std::invalid_argument("transition into node " + std::to_string(k) + " missing for sort " + s);
                for (int v : it->second)
                    if (v < 0 || v >= W.size(s)) throw std::invalid_argument("transition into node " + std::to_string(k) + " out of range");
            }
            auto move = [&](const std::vector<std::string>& ss, const std::vector<int>& xs) {
                std::vector<int> ys;
                for (size_t i = 0; i < xs.size(); ++i) ys.push_back(up[k].at(ss[i]).at(xs[i]));
                return ys;
            };
            for (auto& f : sig.funcs)
                for_tuples(P.radix(f.args), [&](const std::vector<int>& xs) {
                    if (W.apply(f.name, move(f.args, xs)) != up[k].at(f.result).at(P.apply(f.name, xs)))
                        throw std::invalid_argument(f.name + " does not commute with the transition into node " + std::to_string(k));
                });
            if (P.exploding) continue;
            for (auto& r : sig.rels)
                for_tuples(P.radix(r.args), [&](const std::vector<int>& xs) {
                    if (P.holds_rel(r.name, xs) && !W.exploding && !W.holds_rel(r.name, move(r.args, xs)))
                        throw std::invalid_argument(r.name + " is not monotone into node " + std::to_string(k));
                });
        }
    }
};

/**
 * \brief A partial Beth model: a tree of uniform height with designated
 * branches (given by their leaves; empty means all). Nodes on no designated
 * branch force everything. max_offset bounds the bar offsets (-1: the height).
 */
struct BethModel {
    KripkeModel frame;
    std::vector<int> branches;
    int max_offset = -1;

    std::vector<char> exploding() const {
        int n = frame.size();
        std::vector<char> live(n, 0);
        std::vector<int> bs = branches.empty() ? frame.leaves() : branches;
        for (int b : bs)
            for (int x = b; x >= 0; x = frame.parent[x]) live[x] = 1;
        std::vector<char> dead(n);
        for (int k = 0; k < n; ++k) dead[k] = !live[k];
        return dead;
    }

    void validate() const {
        frame.validate(true);
        auto ls = frame.leaves();
        if (max_offset != 0) {
            int h = frame.height();
            for (int l : ls)
                if (frame.level(l) != h) throw std::invalid_argument("Beth trees need uniform height");
        }
        for (int b : branches)
            if (b >= 0 && std::find(ls.begin(), ls.end(), b) == ls.end()) throw std::invalid_argument("designated branch " + std::to_string(b) + " is not maximal");
    }
};

namespace detail {

/** values of free variables and bound blocks, moved together along transitions */
struct TreeVals {
    CatEnv env;
    std::vector<std::vector<std::pair<std::string, int>>> bound;

    TreeVals along(const KripkeModel& K, int child) const {
        TreeVals v = *this;
        for (auto& [n, s, x] : v.env.vals) x = K.up[child].at(s).at(x);
        for (auto& blk : v.bound)
            for (auto& [s, x] : blk) x = K.up[child].at(s).at(x);
        return v;
    }
};

/** Kripke clauses with offset 0; Beth clauses with level-offset bars otherwise */
struct TreeForcer {
    const KripkeModel& K;
    int max_offset = 0;
    std::vector<char> dead;
    int height = 0;
    std::vector<std::vector<int>> kids;
    std::vector<int> lvl;

    TreeForcer(const KripkeModel& k, int offset, std::vector<char> d) : K(k), max_offset(offset), dead(std::move(d)) {
        int n = K.size();
        if (dead.empty()) dead.assign(n, 0);
        kids.resize(n);
        lvl.assign(n, 0);
        for (int i = 1; i < n; ++i) {
            kids[K.parent[i]].push_back(i);
            lvl[i] = lvl[K.parent[i]] + 1;
        }
        for (int i = 0; i < n; ++i) height = std::max(height, lvl[i]);
    }

    int term(int k, const TreeVals& v, const Term& t) const {
        switch (t->kind) {
            case TermNode::Free: return v.env.get(t->name);
            case TermNode::Bound: return v.bound.at(v.bound.size() - 1 - t->depth).at(t->pos).second;
            case TermNode::App: {
                std::vector<int> a;
                for (auto& x : t->args) a.push_back(term(k, v, x));
                return K.worlds[k].apply(t->name, a);
            }
        }
        return 0;
    }

    /** every l >= k (preorder), with values moved along; stops when fn returns false */
    bool all_above(int k, const TreeVals& v, const std::function<bool(int, const TreeVals&)>& fn) const {
        if (!fn(k, v)) return false;
        for (int c : kids[k])
            if (!all_above(c, v.along(K, c), fn)) return false;
        return true;
    }

    /** some offset a such that every live node at level(k)+a above k satisfies pred */
    bool bar(int k, const TreeVals& v, const std::function<bool(int, const TreeVals&)>& pred) const {
        int top = height - lvl[k];
        if (max_offset >= 0) top = std::min(top, max_offset);
        for (int a = 0; a <= top; ++a) {
            int target = lvl[k] + a;
            bool all = all_above(k, v, [&](int l, const TreeVals& w) {
                if (dead[l]) return true;
                if (lvl[l] == target) return pred(l, w);
                return true;
            });
            if (all) return true;
        }
        return false;
    }

    bool force(int k, const TreeVals& v, const Formula& phi) const {
        if (dead[k]) return true;
        switch (phi->kind) {
            case FormulaNode::Rel:
                return bar(k, v, [&](int l, const TreeVals& w) {
                    std::vector<int> a;
                    for (auto& t : phi->terms) a.push_back(term(l, w, t));
                    return K.worlds[l].holds_rel(phi->name, a);
                });
            case FormulaNode::Eq:
                return bar(k, v, [&](int l, const TreeVals& w) { return term(l, w, phi->terms[0]) == term(l, w, phi->terms[1]); });
            case FormulaNode::And:
                for (auto& s : phi->subs)
                    if (!force(k, v, s)) return false;
                return true;
            case FormulaNode::Or:
                return bar(k, v, [&](int l, const TreeVals& w) {
                    for (auto& s : phi->subs)
                        if (force(l, w, s)) return true;
                    return false;
                });
            case FormulaNode::Imp:
                return all_above(k, v, [&](int l, const TreeVals& w) { return !force(l, w, phi->subs[0]) || force(l, w, phi->subs[1]); });
            case FormulaNode::Exists:
            case FormulaNode::Forall: {
                std::vector<std::string> ss;
                for (auto& d : phi->block) ss.push_back(d.sort);
                auto scan = [&](int l, const TreeVals& w, bool want_all) {
                    auto rad = K.worlds[l].radix(ss);
                    size_t n = tuple_count(rad);
                    for (size_t i = 0; i < n; ++i) {
                        auto xs = tuple_at(i, rad);
                        TreeVals w2 = w;
                        std::vector<std::pair<std::string, int>> blk;
                        for (size_t j = 0; j < xs.size(); ++j) blk.push_back({ss[j], xs[j]});
                        w2.bound.push_back(blk);
                        if (force(l, w2, phi->subs[0]) != want_all) return !want_all;
                    }
                    return want_all;
                };
                if (phi->kind == FormulaNode::Exists) return bar(k, v, [&](int l, const TreeVals& w) { return scan(l, w, false); });
                return all_above(k, v, [&](int l, const TreeVals& w) { return scan(l, w, true); });
            }
        }
        return false;
    }
};

inline CatEnv env_for(const Formula& phi, const Env& env) {
    CatEnv e;
    for (auto& d : free_vars(phi)) {
        auto it = env.find(d.name);
        if (it == env.end()) throw std::invalid_argument("unassigned variable " + d.name);
        e.vals.push_back({d.name, d.sort, it->second});
    }
    return e;
}

inline void check_env(const FinStructure& W, const CatEnv& env) {
    for (auto& [n, s, x] : env.vals)
        if (x < 0 || x >= W.size(s)) throw std::invalid_argument("value of " + n + " is not in the domain of the node");
}

}  // namespace detail

inline bool kripke_force(const KripkeModel& K, int k, const Formula& phi, const CatEnv& env = {}) {
    detail::check_env(K.worlds.at(k), env);
    return detail::TreeForcer(K, 0, {}).force(k, {env, {}}, phi);
}
inline bool kripke_force(const KripkeModel& K, int k, const Formula& phi, const Env& env) {
    return kripke_force(K, k, phi, detail::env_for(phi, env));
}

inline bool beth_force(const BethModel& B, int k, const Formula& phi, const CatEnv& env = {}) {
    detail::check_env(B.frame.worlds.at(k), env);
    return detail::TreeForcer(B.frame, B.max_offset, B.exploding()).force(k, {env, {}}, phi);
}
inline bool beth_force(const BethModel& B, int k, const Formula& phi, const Env& env) {
    return beth_force(B, k, phi, detail::env_for(phi, env));
}

/** every env of ctx at k, as CatEnv */
inline std::vector<CatEnv> node_envs(const FinStructure& W, const Context& ctx) {
    std::vector<std::string> ss;
    for (auto& d : ctx) ss.push_back(d.sort);
    std::vector<CatEnv> out;
    for_tuples(W.radix(ss), [&](const std::vector<int>& xs) { out.push_back(CatEnv::of(ctx, xs)); });
    return out;
}

/** k forces the sequent: at every l >= k, every env forcing the left side forces the right */
inline bool kripke_forces_sequent(const KripkeModel& K, int k, const Sequent& s, CatEnv* witness = nullptr, int* where = nullptr) {
    for (int l = k; l < K.size(); ++l) {
        if (!K.le(k, l)) continue;
        for (auto& e : node_envs(K.worlds[l], s.ctx))
            if (kripke_force(K, l, s.lhs, e) && !kripke_force(K, l, s.rhs, e)) {
                if (witness) *witness = e;
                if (where) *where = l;
                return false;
            }
    }
    return true;
}

inline bool beth_forces_sequent(const BethModel& B, int k, const Sequent& s) {
    for (int l = k; l < B.frame.size(); ++l) {
        if (!B.frame.le(k, l)) continue;
        for (auto& e : node_envs(B.frame.worlds[l], s.ctx))
            if (beth_force(B, l, s.lhs, e) && !beth_force(B, l, s.rhs, e)) return false;
    }
    return true;
}

inline bool is_kripke_model_of(const KripkeModel& K, const Theory& T) {
    for (auto& a : T.axioms)
        if (!kripke_forces_sequent(K, 0, a)) return false;
    return true;
}

/** the same data read with Beth clauses at offset 0 */
inline BethModel as_beth(const KripkeModel& K) { return BethModel{K, {}, 0}; }

/** \brief The tree as a site (l -> k when k <= l) with presheaf sorts. */
inline CatStructure to_cat_structure(const KripkeModel& K) {
    CatStructure S;
    S.sig = K.sig;
    S.cat = FinCat::of_tree(K.parent);
    const FinCat& C = S.cat;
    for (auto& s : K.sig.sorts) {
        Presheaf P;
        for (int k = 0; k < K.size(); ++k) P.size.push_back(K.worlds[k].size(s));
        P.restrict.resize(C.num_arrows());
        for (int f = 0; f < C.num_arrows(); ++f) {
            int from = C.cod(f), to = C.dom(f);
            for (int x = 0; x < P.size[from]; ++x) P.restrict[f].push_back(K.transit(from, to, s, x));
        }
        S.sorts[s] = P;
    }
    for (auto& f : K.sig.funcs) {
        NatTrans t;
        for (int k = 0; k < K.size(); ++k) t.at.push_back(K.worlds[k].funcs.at(f.name));
        S.funcs[f.name] = t;
    }
    for (auto& r : K.sig.rels) {
        Subfunctor sub;
        for (int k = 0; k < K.size(); ++k) sub.in.push_back(K.worlds[k].rels.at(r.name));
        S.rels[r.name] = sub;
    }
    return S;
}

// ------------------------------------------------------------ enumeration and search

struct KripkeBounds {
    int max_nodes = 3;
    int max_domain = 2;
    int min_domain = 1;
    size_t limit = 2000000;  // candidate models examined
};

/** rooted trees up to isomorphism with at most n nodes, parents first, fewest nodes first */
inline std::vector<std::vector<int>> rooted_trees(int max_nodes) {
    std::vector<std::vector<int>> out;
    for (int n = 1; n <= max_nodes; ++n) {
        std::set<std::string> seen;
        std::vector<int> par(n, -1);
        std::function<std::string(int)> code = [&](int k) {
            std::vector<std::string> cs;
            for (int i = 0; i < n; ++i)
                if (par[i] == k && i != k) cs.push_back(code(i));
            std::sort(cs.begin(), cs.end());
            std::string s = "(";
            for (auto& c : cs) s += c;
            return s + ")";
        };
        std::function<void(int)> go = [&](int i) {
            if (i == n) {
                if (seen.insert(code(0)).second) out.push_back(par);
                return;
            }
            for (int p = 0; p < i; ++p) {
                par[i] = p;
                go(i + 1);
            }
        };
        go(1);
    }
    return out;
}

/**
 * \brief Kripke models with inclusion transitions (D(parent) is an initial
 * segment of D(child)), in a fixed order: trees, then per node the domain
 * sizes, function tables and relation tables. fn returns false to stop.
 * Returns the number of candidates visited.
 */
inline size_t enumerate_kripke(const Signature& sig, const KripkeBounds& b, const std::function<bool(const KripkeModel&)>& fn) {
    size_t visited = 0;
    bool stop = false;
    for (auto& par : rooted_trees(b.max_nodes)) {
        int n = static_cast<int>(par.size());
        KripkeModel K;
        K.sig = sig;
        K.parent = par;
        K.worlds.assign(n, FinStructure{});
        K.up.assign(n, {});
        std::function<void(int)> node = [&](int k) {
            if (stop) return;
            if (k == n) {
                ++visited;
                if (!fn(K) || visited >= b.limit) stop = true;
                return;
            }
            const FinStructure* P = k ? &K.worlds[par[k]] : nullptr;
            std::vector<int> sizes(sig.sorts.size());
            std::function<void(size_t)> dom = [&](size_t si) {
                if (stop) return;
                if (si < sig.sorts.size()) {
                    int lo = P ? P->size(sig.sorts[si]) : b.min_domain;
                    for (int m = std::max(lo, b.min_domain); m <= b.max_domain; ++m) {
                        sizes[si] = m;
                        dom(si + 1);
                    }
                    return;
                }
                FinStructure& W = K.worlds[k];
                W = FinStructure{};
                W.sig = sig;
                for (size_t i = 0; i < sizes.size(); ++i) W.carrier[sig.sorts[i]] = sizes[i];
                W.init_tables();
                K.up[k].clear();
                if (P)
                    for (auto& s : sig.sorts) {
                        std::vector<int> inc(P->size(s));
                        std::iota(inc.begin(), inc.end(), 0);
                        K.up[k][s] = inc;
                    }
                // free cells: (kind, symbol, index, range)
                struct Cell {
                    bool func;
                    std::string sym;
                    size_t idx;
                    int range;
                };
                std::vector<Cell> cells;
                auto inherited = [&](const std::vector<std::string>& ss, const std::vector<int>& xs) {
                    if (!P) return false;
                    for (size_t i = 0; i < xs.size(); ++i)
                        if (xs[i] >= P->size(ss[i])) return false;
                    return true;
                };
                for (auto& f : sig.funcs)
                    for_tuples(W.radix(f.args), [&](const std::vector<int>& xs) {
                        size_t idx = tuple_index(xs, W.radix(f.args));
                        if (inherited(f.args, xs)) W.funcs[f.name][idx] = P->apply(f.name, xs);
                        else cells.push_back({true, f.name, idx, W.size(f.result)});
                    });
                for (auto& r : sig.rels)
                    for_tuples(W.radix(r.args), [&](const std::vector<int>& xs) {
                        size_t idx = tuple_index(xs, W.radix(r.args));
                        if (inherited(r.args, xs) && P->holds_rel(r.name, xs)) W.rels[r.name][idx] = 1;
                        else cells.push_back({false, r.name, idx, 2});
                    });
                std::function<void(size_t)> fill = [&](size_t c) {
                    if (stop) return;
                    if (c == cells.size()) {
                        node(k + 1);
                        return;
                    }
                    auto& cell = cells[c];
                    for (int v = 0; v < cell.range; ++v) {
                        if (cell.func) K.worlds[k].funcs[cell.sym][cell.idx] = v;
                        else K.worlds[k].rels[cell.sym][cell.idx] = static_cast<char>(v);
                        fill(c + 1);
                        if (stop) return;
                    }
                };
                fill(0);
            };
            dom(0);
        };
        node(0);
        if (stop) break;
    }
    return visited;
}

/** all Kripke models of T within the bounds */
inline std::vector<KripkeModel> kripke_models(const Theory& T, const KripkeBounds& b) {
    std::vector<KripkeModel> out;
    enumerate_kripke(T.sig, b, [&](const KripkeModel& K) {
        if (is_kripke_model_of(K, T)) out.push_back(K);
        return true;
    });
    return out;
}

struct SearchResult {
    bool found = false;
    KripkeModel model;
    size_t examined = 0;
    bool truncated = false;  // stopped by the candidate limit, not by exhaustion
};

/** \brief First Kripke model of T (in enumeration order) whose root does not force the goal. */
inline SearchResult countermodel_search(const Theory& T, const Sequent& goal, const KripkeBounds& b) {
    SearchResult r;
    r.examined = enumerate_kripke(T.sig, b, [&](const KripkeModel& K) {
        if (is_kripke_model_of(K, T) && !kripke_forces_sequent(K, 0, goal)) {
            r.found = true;
            r.model = K;
            return false;
        }
        return true;
    });
    r.truncated = !r.found && r.examined >= b.limit;
    return r;
}

/**
 * \brief A fresh root below the roots of the given models. Its domain is the
 * constants of each sort (empty for a sort without constants) and it forces
 * no atom. Function symbols of positive arity are rejected.
 */
inline KripkeModel smash(const std::vector<KripkeModel>& models, const Signature& sig) {
    for (auto& f : sig.funcs)
        if (!f.args.empty()) throw std::invalid_argument("smash needs a signature of constants; " + f.name + " has arguments");
    for (auto& m : models)
        if (!(m.sig == sig)) throw std::invalid_argument("smash needs a shared signature");
    KripkeModel K;
    K.sig = sig;
    FinStructure root;
    root.sig = sig;
    std::map<std::string, std::vector<std::string>> consts;
    for (auto& f : sig.funcs) consts[f.result].push_back(f.name);
    for (auto& s : sig.sorts) root.carrier[s] = static_cast<int>(consts[s].size());
    root.init_tables();
    for (auto& f : sig.funcs) {
        auto& cs = consts[f.result];
        root.funcs[f.name][0] = static_cast<int>(std::find(cs.begin(), cs.end(), f.name) - cs.begin());
    }
    K.parent.push_back(-1);
    K.worlds.push_back(root);
    K.up.push_back({});
    for (auto& m : models) {
        int base = K.size();
        for (int k = 0; k < m.size(); ++k) {
            K.parent.push_back(k == 0 ? 0 : m.parent[k] + base);
            K.worlds.push_back(m.worlds[k]);
            if (k > 0) {
                K.up.push_back(m.up[k]);
                continue;
            }
            std::map<std::string, std::vector<int>> u;
            for (auto& s : sig.sorts)
                for (auto& c : consts[s]) u[s].push_back(m.worlds[0].apply(c, {}));
            for (auto& s : sig.sorts) u[s];
            K.up.push_back(u);
        }
    }
    return K;
}

// ------------------------------------------------------------ Beth trees from site models

/** a covering family of an object, with the formula that asked for it */
struct WitnessCover {
    std::vector<int> arrows;
    int formula = -1;  // index into the subformula closure; -1 for the arrow-with-identity families
};

struct BethBuild {
    BethModel model;
    std::vector<int> object;                       // site object per node
    std::vector<Formula> formulas;                 // subformula closure of S
    std::vector<std::vector<WitnessCover>> covers; // per site object
    std::vector<std::vector<char>> processed;      // per node, per cover index
    std::vector<std::vector<char>> stable;         // per node, per closure formula
    bool exhausted = false;                        // every S-formula stable at the root
    int unprocessed = 0;                           // covers left over at nodes below the top level
    std::string progress;
};

namespace detail {

inline bool is_meet_poset(const FinCat& C, std::vector<std::vector<int>>& meet) {
    meet.assign(C.n, std::vector<int>(C.n, -1));
    for (int a = 0; a < C.n; ++a)
        for (int b = 0; b < C.n; ++b)
            if (C.hom(a, b).size() > 1 || (a != b && !C.hom(a, b).empty() && !C.hom(b, a).empty())) return false;
    auto le = [&](int a, int b) { return !C.hom(a, b).empty(); };
    for (int a = 0; a < C.n; ++a)
        for (int b = 0; b < C.n; ++b) {
            for (int m = 0; m < C.n; ++m) {
                if (!le(m, a) || !le(m, b)) continue;
                bool greatest = true;
                for (int x = 0; x < C.n && greatest; ++x)
                    if (le(x, a) && le(x, b) && !le(x, m)) greatest = false;
                if (greatest) meet[a][b] = m;
            }
            if (meet[a][b] < 0) return false;
        }
    return true;
}

}  // namespace detail

/**
 * \brief Levelwise Beth tree over a poset site with meets: level a+1, with
 * a = pairing(b, g), pulls back the b-th witnessing cover of each level-g
 * ancestor to the nodes at level a. Nodes without a b-th cover get one
 * identity child. An empty family marks its node exploding.
 *
 * Witnessing covers per object, in order of the subformula closure and of
 * environments: for a disjunction or existential forced but not decided on
 * the spot, the first basic covering family on which it is decided (else the
 * arrows of the deciding sieve); with an implication or universal in the
 * closure, each non-identity arrow together with the identity.
 */
inline BethBuild beth_build(const CatStructure& S, const Site& site, int root, const std::vector<Formula>& phis, int h,
                            bool singleton_only = false, size_t max_nodes = 200000) {
    const FinCat& C = S.cat;
    if (C.n != site.cat.n || C.num_arrows() != site.cat.num_arrows()) throw std::invalid_argument("structure and site disagree on the category");
    std::vector<std::vector<int>> meet;
    if (!detail::is_meet_poset(C, meet)) throw std::invalid_argument("beth_build needs a poset site with meets");
    if (root < 0 || root >= C.n) throw std::invalid_argument("root object out of range");
    Topology J = saturate(site);
    BethBuild out;
    out.formulas = subformula_closure(phis);
    // sheaf semantics needs the relations closed; an open one makes forcing at covered objects disagree
    for (auto& [name, sub] : S.rels) {
        std::vector<std::string> args;
        for (auto& r : S.sig.rels)
            if (r.name == name) args = r.args;
        SubHeyting H{C, S.product_of(args), &J};
        if (H.closure(sub) != sub) throw std::invalid_argument("relation " + name + " is not closed for the topology");
    }
    std::map<Formula, int, FormulaLess> index;
    for (size_t i = 0; i < out.formulas.size(); ++i) index[out.formulas[i]] = static_cast<int>(i);
    bool local = false;
    for (auto& f : out.formulas) local = local || f->kind == FormulaNode::Imp || f->kind == FormulaNode::Forall;

    // witnessing covers per object
    out.covers.resize(C.n);
    std::vector<std::map<std::pair<int, size_t>, int>> asked(C.n);  // (formula, env) -> cover index
    for (int c = 0; c < C.n; ++c) {
        auto& cv = out.covers[c];
        auto add = [&](WitnessCover w) {
            std::vector<int> key = w.arrows;
            std::sort(key.begin(), key.end());
            for (size_t i = 0; i < cv.size(); ++i) {
                std::vector<int> k2 = cv[i].arrows;
                std::sort(k2.begin(), k2.end());
                if (k2 == key) return static_cast<int>(i);
            }
            cv.push_back(std::move(w));
            return static_cast<int>(cv.size() - 1);
        };
        for (size_t fi = 0; fi < out.formulas.size(); ++fi) {
            const Formula& phi = out.formulas[fi];
            if (phi->kind != FormulaNode::Or && phi->kind != FormulaNode::Exists) continue;
            Context ctx = free_vars(phi);
            std::vector<std::string> ss;
            for (auto& d : ctx) ss.push_back(d.sort);
            auto rad = S.radix(c, ss);
            for (size_t ei = 0; ei < tuple_count(rad); ++ei) {
                CatEnv env = CatEnv::of(ctx, tuple_at(ei, rad));
                if (!kj_force(S, c, env, phi, &J)) continue;
                // decided at c: some disjunct, or a witness
                auto decided = [&](int d, const CatEnv& e) {
                    if (phi->kind == FormulaNode::Or) {
                        for (auto& s : phi->subs)
                            if (kj_force(S, d, e, s, &J)) return true;
                        return false;
                    }
                    auto [names, body] = open_quantifier(phi);
                    std::vector<std::string> bs;
                    for (auto& v : names) bs.push_back(v.sort);
                    auto r2 = S.radix(d, bs);
                    for (size_t i = 0; i < tuple_count(r2); ++i) {
                        CatEnv e2 = e;
                        auto xs = tuple_at(i, r2);
                        for (size_t j = 0; j < names.size(); ++j) e2.vals.push_back({names[j].name, names[j].sort, xs[j]});
                        if (kj_force(S, d, e2, body, &J)) return true;
                    }
                    return false;
                };
                if (decided(c, env)) continue;
                auto good = [&](int f) { return decided(C.dom(f), env.restrict(S, f)); };
                std::optional<std::vector<int>> fam;
                for (auto& basic : site.coverage[c]) {
                    if (singleton_only && basic.size() != 1) continue;
                    if (std::all_of(basic.begin(), basic.end(), good)) {
                        fam = basic;
                        break;
                    }
                }
                if (!fam && !singleton_only) {
                    std::vector<int> arrs;
                    for (int f : C.into(c))
                        if (good(f)) arrs.push_back(f);
                    fam = arrs;
                }
                if (fam) asked[c][{static_cast<int>(fi), ei}] = add({*fam, static_cast<int>(fi)});
            }
        }
        if (local && !singleton_only)
            for (int f : C.into(c))
                if (f != C.identity[c]) add({{f, C.identity[c]}, -1});
    }

    // the tree
    KripkeModel& K = out.model.frame;
    K.sig = S.sig;
    std::vector<int> lvl{0}, dead{0};
    std::vector<int>& obj = out.object;
    K.parent = {-1};
    obj = {root};
    out.processed.assign(1, std::vector<char>(out.covers[root].size(), 0));
    std::vector<int> frontier{0};
    auto ancestor_at = [&](int q, int level) {
        while (lvl[q] > level) q = K.parent[q];
        return q;
    };
    // objects covered by the empty sieve explode at once; their empty cover would otherwise wait its turn
    auto empty_cover = [&](int o) { return J.covers(o, Sieve(C.num_arrows(), 0)); };
    dead[0] = empty_cover(root);
    auto add_node = [&](int par, int o, bool d) {
        if (K.parent.size() >= max_nodes)
            throw std::runtime_error("Beth tree exceeds " + std::to_string(max_nodes) + " nodes at level " + std::to_string(lvl[par] + 1));
        K.parent.push_back(par);
        obj.push_back(o);
        lvl.push_back(lvl[par] + 1);
        dead.push_back(d || empty_cover(o));
        out.processed.push_back(std::vector<char>(out.covers[o].size(), 0));
        return static_cast<int>(K.parent.size() - 1);
    };
    for (int a = 0; a < h; ++a) {
        auto [beta, gamma] = pairing_inverse(a);
        std::vector<int> next;
        for (int q : frontier) {
            int p = ancestor_at(q, static_cast<int>(gamma));
            const auto& cv = out.covers[obj[p]];
            if (dead[q] || beta >= static_cast<long long>(cv.size())) {
                next.push_back(add_node(q, obj[q], dead[q]));
                continue;
            }
            out.processed[p][beta] = 1;
            const auto& fam = cv[beta].arrows;
            if (fam.empty()) {
                dead[q] = 1;
                next.push_back(add_node(q, obj[q], true));
                continue;
            }
            for (int f : fam) next.push_back(add_node(q, meet[C.dom(f)][obj[q]], false));
        }
        frontier = std::move(next);
    }
    // exploding marks set late must reach the subtree
    for (int k = 1; k < K.size(); ++k)
        if (dead[K.parent[k]]) dead[k] = 1;

    // worlds: site data at each object, atoms closed under the topology
    int n = K.size();
    std::vector<FinStructure> at_obj(C.n);
    for (int c = 0; c < C.n; ++c) {
        FinStructure& W = at_obj[c];
        W.sig = S.sig;
        for (auto& s : S.sig.sorts) W.carrier[s] = S.sorts.at(s).size[c];
        W.init_tables();
        for (auto& f : S.sig.funcs) W.funcs[f.name] = S.funcs.at(f.name).at[c];
        for (auto& r : S.sig.rels) {
            Presheaf P = S.product_of(r.args);
            SubHeyting H{C, P, &J};
            Subfunctor cl = H.closure(S.rels.at(r.name));
            W.rels[r.name] = cl.in[c];
        }
    }
    K.worlds.resize(n);
    K.up.assign(n, {});
    for (int k = 0; k < n; ++k) {
        K.worlds[k] = at_obj[obj[k]];
        K.worlds[k].exploding = dead[k];
        if (k == 0) continue;
        int f = C.thin_arrow(obj[k], obj[K.parent[k]]);
        for (auto& s : S.sig.sorts) K.up[k][s] = S.sorts.at(s).restrict[f];
    }
    for (int k = 0; k < n; ++k)
        if (lvl[k] == h && !dead[k]) out.model.branches.push_back(k);
    if (out.model.branches.empty()) out.model.branches.push_back(-1);  // no designated branch at all
    out.model.max_offset = -1;

    // stability: covers a formula depends on are processed where they are needed
    std::vector<std::vector<int>> kids(n);
    for (int k = 1; k < n; ++k) kids[K.parent[k]].push_back(k);
    int m = static_cast<int>(out.formulas.size());
    out.stable.assign(n, std::vector<char>(m, 0));
    std::vector<std::vector<char>> known(n, std::vector<char>(m, 0));
    std::function<bool(int, int)> stable = [&](int p, int fi) -> bool {
        if (known[p][fi]) return out.stable[p][fi];
        const Formula& phi = out.formulas[fi];
        bool ok = true;
        if (dead[p] || is_atomic(phi)) ok = true;
        else if (phi->kind == FormulaNode::And) {
            for (auto& s : immediate_subformulas(phi)) ok = ok && stable(p, index.at(s));
        } else {
            std::function<bool(int)> above = [&](int l) {
                for (auto& s : immediate_subformulas(phi))
                    if (!stable(l, index.at(s))) return false;
                for (int c : kids[l])
                    if (!above(c)) return false;
                return true;
            };
            ok = above(p);
            const auto& cv = out.covers[obj[p]];
            for (size_t i = 0; i < cv.size() && ok; ++i) {
                bool needed = (phi->kind == FormulaNode::Imp || phi->kind == FormulaNode::Forall) ? cv[i].formula < 0 : false;
                if (phi->kind == FormulaNode::Or || phi->kind == FormulaNode::Exists)
                    for (auto& [key, idx] : asked[obj[p]])
                        if (key.first == fi && idx == static_cast<int>(i)) needed = true;
                if (needed && !out.processed[p][i]) ok = false;
            }
        }
        known[p][fi] = 1;
        out.stable[p][fi] = ok;
        return ok;
    };
    for (int p = n - 1; p >= 0; --p)
        for (int fi = 0; fi < m; ++fi) stable(p, fi);
    out.exhausted = true;
    for (auto& f : phis) out.exhausted = out.exhausted && out.stable[0][index.at(f)];
    for (int k = 0; k < n; ++k)
        if (lvl[k] < h)
            for (char c : out.processed[k]) out.unprocessed += !c;
    int st = 0;
    for (auto& row : out.stable) st += static_cast<int>(std::count(row.begin(), row.end(), 1));
    out.progress = std::to_string(n) + " nodes, height " + std::to_string(h) + ", " + std::to_string(st) + "/" + std::to_string(n * m) +
                   " (node, formula) pairs stable, " + std::to_string(out.unprocessed) + " covers unprocessed";
    return out;
}

/** \brief Singleton covers only; S must be regular. The tree is a chain. */
inline BethBuild beth_build_linear(const CatStructure& S, const Site& site, int root, const std::vector<Formula>& phis, int h) {
    for (auto& f : phis)
        if (!in_fragment(f, Fragment::Regular)) throw std::invalid_argument("linear Beth trees need regular formulas: " + print(f));
    return beth_build(S, site, root, phis, h, true);
}

// ------------------------------------------------------------ text form

namespace detail {

inline SExpr node_items(const char* head, const KripkeModel& K, int k) {
    SExpr s = structure_sexpr(K.worlds[k]);
    SExpr l = SExpr::list({SExpr::sym(head)});
    if (k > 0) l.add(SExpr::list({SExpr::sym("parent"), SExpr::sym(std::to_string(K.parent[k]))}));
    for (size_t i = 1; i < s.size(); ++i)
        if (s[i].head() != "signature" && s[i].head() != "exploding") l.add(s[i]);
    if (k > 0)
        for (auto& srt : K.sig.sorts) {
            SExpr u = SExpr::list({SExpr::sym("up"), SExpr::sym(srt)});
            for (int v : K.up[k].at(srt)) u.add(SExpr::sym(std::to_string(v)));
            l.add(u);
        }
    return l;
}

inline void read_nodes(const SExpr& e, size_t from, KripkeModel& K) {
    for (size_t i = from; i < e.size(); ++i) {
        const SExpr& it = e[i];
        if (it.head() != "node") continue;
        int k = K.size();
        int par = -1;
        SExpr st = SExpr::list({SExpr::sym("structure")});
        std::map<std::string, std::vector<int>> up;
        for (size_t j = 1; j < it.size(); ++j) {
            auto h = it[j].head();
            if (h == "parent") par = read_int(it[j][1]);
            else if (h == "up") {
                if (it[j].size() < 2 || !K.sig.has_sort(it[j][1].text)) throw ParseError("(up SORT v...) needs a declared sort", it[j].pos);
                auto& v = up[it[j][1].text];
                for (size_t q = 2; q < it[j].size(); ++q) v.push_back(read_int(it[j][q]));
            } else st.add(it[j]);
        }
        if ((k == 0) != (par < 0)) throw ParseError("the first node is the root; every other node needs (parent k)", it.pos);
        if (par >= k) throw ParseError("parents must precede children", it.pos);
        K.parent.push_back(par);
        K.worlds.push_back(read_structure(st, &K.sig));
        K.up.push_back(up);
    }
}

}  // namespace detail

/** (kripke (signature ...) (node ITEMS...)...) ; non-root nodes carry (parent k) and (up SORT images...) */
inline SExpr kripke_sexpr(const KripkeModel& K) {
    SExpr l = SExpr::list({SExpr::sym("kripke"), signature_sexpr(K.sig)});
    for (int k = 0; k < K.size(); ++k) l.add(detail::node_items("node", K, k));
    return l;
}

inline KripkeModel read_kripke(const SExpr& e) {
    if (e.head() != "kripke") throw ParseError("expected (kripke ...)", e.pos);
    KripkeModel K;
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i].head() == "signature") K.sig = read_signature(e[i]);
    detail::read_nodes(e, 1, K);
    try {
        K.validate();
    } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what(), e.pos);
    }
    return K;
}

/** (beth (signature ...) (offset n)? (branches leaf...)? (node ...)...) */
inline SExpr beth_sexpr(const BethModel& B) {
    SExpr l = SExpr::list({SExpr::sym("beth"), signature_sexpr(B.frame.sig)});
    if (B.max_offset >= 0) l.add(SExpr::list({SExpr::sym("offset"), SExpr::sym(std::to_string(B.max_offset))}));
    if (!B.branches.empty()) {
        SExpr b = SExpr::list({SExpr::sym("branches")});
        for (int x : B.branches)
            if (x >= 0) b.add(SExpr::sym(std::to_string(x)));
        l.add(b);
    }
    for (int k = 0; k < B.frame.size(); ++k) l.add(detail::node_items("node", B.frame, k));
    return l;
}

inline BethModel read_beth(const SExpr& e) {
    if (e.head() != "beth") throw ParseError("expected (beth ...)", e.pos);
    BethModel B;
    for (size_t i = 1; i < e.size(); ++i) {
        auto h = e[i].head();
        if (h == "signature") B.frame.sig = read_signature(e[i]);
        else if (h == "offset") B.max_offset = read_int(e[i][1]);
        else if (h == "branches") {
            for (size_t j = 1; j < e[i].size(); ++j) B.branches.push_back(read_int(e[i][j]));
            if (B.branches.empty()) B.branches.push_back(-1);
        }
    }
    detail::read_nodes(e, 1, B.frame);
    try {
        B.validate();
    } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what(), e.pos);
    }
    return B;
}

}  // namespace ifol

#endif
