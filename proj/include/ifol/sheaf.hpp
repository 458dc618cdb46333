#ifndef IFOL_SHEAF_HPP
#define IFOL_SHEAF_HPP

#include "lattice.hpp"
#include "presheaf.hpp"

namespace ifol {

/** \brief A finite category with covering families (arrow lists into each object). */
struct Site {
    FinCat cat;
    std::vector<std::vector<std::vector<int>>> coverage;

    void validate() const {
        cat.validate();
        if (static_cast<int>(coverage.size()) != cat.n) throw std::invalid_argument("coverage needs one entry per object");
        for (int c = 0; c < cat.n; ++c)
            for (auto& fam : coverage[c])
                for (int f : fam)
                    if (f < 0 || f >= cat.num_arrows() || cat.cod(f) != c)
                        throw std::invalid_argument("covering family of " + cat.obj_name(c) + " has an arrow with another codomain");
    }
};

/** every sieve on c, in a fixed order */
inline std::vector<Sieve> all_sieves(const FinCat& C, int c) {
    auto into = C.into(c);
    std::vector<Sieve> out;
    size_t n = into.size();
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        Sieve s(C.num_arrows(), 0);
        for (size_t i = 0; i < n; ++i)
            if (mask >> i & 1) s[into[i]] = 1;
        if (is_sieve(C, c, s)) out.push_back(s);
    }
    return out;
}

/**
 * \brief Least Grothendieck topology containing the sieves generated by the
 * covering families: maximal sieves, stability under pullback, transitivity.
 */
inline Topology saturate(const Site& S) {
    S.validate();
    const FinCat& C = S.cat;
    Topology J = Topology::trivial(C);
    for (int c = 0; c < C.n; ++c)
        for (auto& fam : S.coverage[c]) J.covering[c].insert(generated_sieve(C, c, fam));
    std::vector<std::vector<Sieve>> sieves(C.n);
    for (int c = 0; c < C.n; ++c) sieves[c] = all_sieves(C, c);
    for (bool changed = true; changed;) {
        changed = false;
        for (int c = 0; c < C.n; ++c) {
            std::vector<Sieve> cur(J.covering[c].begin(), J.covering[c].end());
            for (auto& s : cur)
                for (int f : C.into(c))
                    if (J.covering[C.dom(f)].insert(pullback_sieve(C, s, f)).second) changed = true;
        }
        for (int c = 0; c < C.n; ++c)
            for (auto& r : sieves[c]) {
                if (J.covers(c, r)) continue;
                for (auto& s : std::vector<Sieve>(J.covering[c].begin(), J.covering[c].end())) {
                    bool local = true;
                    for (int f = 0; f < C.num_arrows() && local; ++f)
                        if (s[f] && !J.covers(C.dom(f), pullback_sieve(C, r, f))) local = false;
                    if (local) {
                        J.covering[c].insert(r);
                        changed = true;
                        break;
                    }
                }
            }
    }
    return J;
}

/** the smallest covering sieve on c (covering sieves are closed under intersection) */
inline Sieve minimal_cover(const FinCat& C, const Topology& J, int c) {
    Sieve m = max_sieve(C, c);
    for (auto& s : J.covering[c])
        for (size_t i = 0; i < m.size(); ++i) m[i] = m[i] && s[i];
    return m;
}

/** \brief All matching families for F on sieve s; entry i is the value at the i-th arrow of arrows(s). */
inline std::vector<std::vector<int>> matching_families(const FinCat& C, const Presheaf& F, const Sieve& s, size_t limit = 1u << 16) {
    std::vector<int> arr;
    for (int f = 0; f < C.num_arrows(); ++f)
        if (s[f]) arr.push_back(f);
    std::map<int, int> pos;
    for (size_t i = 0; i < arr.size(); ++i) pos[arr[i]] = static_cast<int>(i);
    std::vector<int> val(arr.size(), -1);
    std::vector<std::vector<int>> out;
    std::function<void(size_t)> go = [&](size_t k) {
        if (out.size() >= limit) return;
        if (k == arr.size()) {
            out.push_back(val);
            return;
        }
        int f = arr[k];
        for (int x = 0; x < F.size[C.dom(f)]; ++x) {
            val[k] = x;
            bool ok = true;
            // x.g must equal the value at f.g; and values at arrows h with h.g = f must restrict to x
            for (int g : C.into(C.dom(f))) {
                int i = pos.at(C.compose(f, g));
                if (val[i] >= 0 && val[i] != F.at(g, x)) ok = false;
            }
            for (size_t j = 0; j < k && ok; ++j) {
                int h = arr[j];
                for (int g : C.into(C.dom(h)))
                    if (C.compose(h, g) == f && F.at(g, val[j]) != x) ok = false;
            }
            if (ok) go(k + 1);
        }
        val[k] = -1;
    };
    go(0);
    return out;
}

struct SheafCheck {
    bool ok = true;
    int object = -1;
    Sieve sieve;
    std::vector<int> family;
    int amalgamations = 0;
};

/** \brief Unique glueing for every covering sieve of J, checked exhaustively. */
inline SheafCheck check_sheaf(const FinCat& C, const Topology& J, const Presheaf& F) {
    for (int c = 0; c < C.n; ++c)
        for (auto& s : J.covering[c]) {
            std::vector<int> arr;
            for (int f = 0; f < C.num_arrows(); ++f)
                if (s[f]) arr.push_back(f);
            for (auto& fam : matching_families(C, F, s)) {
                int count = 0;
                for (int x = 0; x < F.size[c]; ++x) {
                    bool glues = true;
                    for (size_t i = 0; i < arr.size() && glues; ++i) glues = F.at(arr[i], x) == fam[i];
                    count += glues;
                }
                if (count != 1) return {false, c, s, fam, count};
            }
        }
    return {};
}

inline bool is_sheaf(const FinCat& C, const Topology& J, const Presheaf& F) { return check_sheaf(C, J, F).ok; }

/** \brief F+ on minimal covering sieves, with its unit F -> F+. */
struct PlusResult {
    Presheaf plus;
    NatTrans unit;
    std::vector<std::vector<std::vector<int>>> families;  // families[c][i] = element i of F+(c)
};

inline PlusResult plus_construction(const FinCat& C, const Topology& J, const Presheaf& F) {
    PlusResult r;
    std::vector<Sieve> smin(C.n);
    std::vector<std::vector<int>> arrs(C.n);
    std::vector<std::map<int, int>> pos(C.n);
    for (int c = 0; c < C.n; ++c) {
        smin[c] = minimal_cover(C, J, c);
        for (int f = 0; f < C.num_arrows(); ++f)
            if (smin[c][f]) {
                pos[c][f] = static_cast<int>(arrs[c].size());
                arrs[c].push_back(f);
            }
        r.families.push_back(matching_families(C, F, smin[c]));
        r.plus.size.push_back(static_cast<int>(r.families[c].size()));
    }
    auto index_of = [&](int c, const std::vector<int>& fam) {
        auto it = std::find(r.families[c].begin(), r.families[c].end(), fam);
        if (it == r.families[c].end()) throw std::logic_error("restricted family is not matching");
        return static_cast<int>(it - r.families[c].begin());
    };
    r.plus.restrict.resize(C.num_arrows());
    for (int g = 0; g < C.num_arrows(); ++g) {
        int c = C.cod(g), d = C.dom(g);
        for (auto& fam : r.families[c]) {
            std::vector<int> y;
            for (int h : arrs[d]) y.push_back(fam[pos[c].at(C.compose(g, h))]);
            r.plus.restrict[g].push_back(index_of(d, y));
        }
    }
    for (int c = 0; c < C.n; ++c) {
        std::vector<int> comp;
        for (int x = 0; x < F.size[c]; ++x) {
            std::vector<int> y;
            for (int f : arrs[c]) y.push_back(F.at(f, x));
            comp.push_back(index_of(c, y));
        }
        r.unit.at.push_back(comp);
    }
    return r;
}

struct Sheafification {
    Presheaf sheaf;
    NatTrans unit;
};

inline NatTrans compose_nat(const FinCat& C, const NatTrans& second, const NatTrans& first) {
    NatTrans t;
    for (int c = 0; c < C.n; ++c) {
        std::vector<int> comp;
        for (int x : first.at[c]) comp.push_back(second.at[c][x]);
        t.at.push_back(comp);
    }
    return t;
}

/** \brief Double plus construction. */
inline Sheafification sheafify(const FinCat& C, const Topology& J, const Presheaf& F) {
    PlusResult a = plus_construction(C, J, F);
    PlusResult b = plus_construction(C, J, a.plus);
    return {b.plus, compose_nat(C, b.unit, a.unit)};
}

inline bool is_iso(const FinCat& C, const Presheaf& E, const Presheaf& F, const NatTrans& t) {
    for (int c = 0; c < C.n; ++c) {
        if (E.size[c] != F.size[c]) return false;
        std::set<int> im(t.at[c].begin(), t.at[c].end());
        if (static_cast<int>(im.size()) != F.size[c]) return false;
    }
    return true;
}

// ------------------------------------------------------------ lattice sites

/** the category of a lattice: an arrow a -> b iff a <= b */
inline FinCat lattice_category(const FinLattice& L) {
    return FinCat::thin(L.n, [&](int a, int b) { return L.leq(a, b); }, L.names);
}

/** coverage by finite families whose join is the object (the empty family covers bottom) */
inline Site joint_cover_site(const FinLattice& L) {
    Site S;
    S.cat = lattice_category(L);
    S.coverage.resize(L.n);
    for (int c = 0; c < L.n; ++c) {
        std::vector<int> below;
        for (int a = 0; a < L.n; ++a)
            if (L.leq(a, c)) below.push_back(a);
        for (size_t mask = 0; mask < (size_t{1} << below.size()); ++mask) {
            std::vector<int> els, fam;
            for (size_t i = 0; i < below.size(); ++i)
                if (mask >> i & 1) els.push_back(below[i]);
            if (L.join(els) != c) continue;
            for (int a : els) fam.push_back(S.cat.thin_arrow(a, c));
            S.coverage[c].push_back(fam);
        }
    }
    return S;
}

/** y(a) as a subfunctor of the terminal presheaf: the principal down-set */
inline Subfunctor yoneda_sub(const FinLattice& L, int a) {
    Subfunctor s;
    for (int d = 0; d < L.n; ++d) s.in.push_back({static_cast<char>(L.leq(d, a))});
    return s;
}

struct CheckItem {
    std::string name;
    bool ok = true;
    bool applicable = true;
    std::string detail;
};

struct EmbeddingReport {
    std::vector<CheckItem> items;
    bool ok() const {
        return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.ok && i.applicable; });
    }
    const CheckItem* find(const std::string& n) const {
        for (auto& i : items)
            if (i.name == n) return &i;
        return nullptr;
    }
};

/**
 * \brief Yoneda into sheaves on a finite lattice under the joint-cover
 * coverage: subcanonical, preserves meets, covers, unions, implication and
 * forall, and reflects the order. Needs joins stable under meets; otherwise
 * the remaining items are reported inapplicable.
 */
inline EmbeddingReport check_embedding(const FinLattice& L) {
    EmbeddingReport rep;
    auto add = [&](const std::string& n, bool ok, const std::string& d = "") { rep.items.push_back({n, ok, true, d}); };
    std::string unstable;
    for (int a = 0; a < L.n && unstable.empty(); ++a)
        for (int b = 0; b < L.n && unstable.empty(); ++b)
            for (int c = 0; c < L.n && unstable.empty(); ++c)
                if (L.meet(a, L.join(b, c)) != L.join(L.meet(a, b), L.meet(a, c)))
                    unstable = "pullback of the cover {" + L.name(b) + "," + L.name(c) + "} along " + L.name(a) + " does not cover";
    if (!unstable.empty()) {
        rep.items.push_back({"stability", false, true, unstable});
        for (auto n : {"subcanonical", "meets", "covers", "unions", "implication", "forall", "conservative"})
            rep.items.push_back({n, false, false, "inapplicable: covers are not stable under pullback"});
        return rep;
    }
    add("stability", true);
    Site S = joint_cover_site(L);
    const FinCat& C = S.cat;
    Topology J = saturate(S);
    Presheaf one = terminal_presheaf(C);
    SubHeyting H{C, one, &J};

    std::string bad;
    for (int c = 0; c < L.n && bad.empty(); ++c)
        if (!is_sheaf(C, J, representable(C, c))) bad = L.name(c);
    add("subcanonical", bad.empty(), bad.empty() ? "" : "y(" + bad + ") is not a sheaf");

    std::vector<Subfunctor> y;
    for (int a = 0; a < L.n; ++a) y.push_back(yoneda_sub(L, a));
    bool meets = true, unions = true, imps = true, cons = true;
    for (int a = 0; a < L.n; ++a)
        for (int b = 0; b < L.n; ++b) {
            meets = meets && H.meet(y[a], y[b]) == y[L.meet(a, b)];
            unions = unions && H.join(y[a], y[b]) == y[L.join(a, b)];
            imps = imps && H.implies(y[a], y[b]) == y[*L.implies(a, b)];
            cons = cons && (y[a].leq(y[b]) == L.leq(a, b));
        }
    add("meets", meets);

    bool covers = true;
    for (int c = 0; c < L.n; ++c)
        for (auto& fam : S.coverage[c]) {
            std::vector<Subfunctor> parts;
            for (int f : fam) parts.push_back(y[C.dom(f)]);
            covers = covers && H.join(parts) == y[c];
        }
    add("covers", covers);
    add("unions", unions);
    add("implication", imps);

    // forall along y(a) -> y(b), a <= b, of y(c) <= y(a) is y(b meet (a -> c))
    bool foralls = true;
    std::string fdetail;
    for (int a = 0; a < L.n; ++a)
        for (int b = 0; b < L.n; ++b) {
            if (!L.leq(a, b)) continue;
            Presheaf E = representable(C, a), F = representable(C, b);
            NatTrans incl;
            for (int d = 0; d < L.n; ++d) incl.at.push_back(std::vector<int>(E.size[d], 0));
            for (int c = 0; c < L.n; ++c) {
                if (!L.leq(c, a)) continue;
                Subfunctor A = empty_sub(E);
                for (int d = 0; d < L.n; ++d)
                    if (E.size[d] && L.leq(d, c)) A.in[d][0] = 1;
                Subfunctor got = forall_along(C, E, F, incl, A);
                int want = L.meet(b, *L.implies(a, c));
                for (int d = 0; d < L.n; ++d)
                    if (F.size[d] && (got.in[d][0] != 0) != L.leq(d, want)) {
                        foralls = false;
                        fdetail = "forall of y(" + L.name(c) + ") along y(" + L.name(a) + ") -> y(" + L.name(b) + ")";
                    }
            }
        }
    add("forall", foralls, fdetail);
    add("conservative", cons);
    return rep;
}

/** \brief Tree-indexed subsheaves of an ambient sheaf, labels in level order. */
struct SheafFamily {
    int gamma = 1;
    int height = 0;
    std::vector<Subfunctor> labels;
};

struct TTVerdict {
    bool ok = true;
    bool premises_hold = true;
    int failing_level = -1;
    std::string detail;
};

/**
 * \brief Premises: each internal S_f is covered by the union of its children.
 * For each element c of S_root(C) the covering family is built level by
 * level: an arrow l into C at node f is refined by the sieve of arrows h with
 * c.l.h in some child of f. The final arrows must generate a covering sieve,
 * each landing in the meet of the labels along a root-to-leaf path.
 */
inline TTVerdict check_tt_in_sheaves(const FinCat& C, const Topology& J, const Presheaf& A, const SheafFamily& fam) {
    TTVerdict v;
    SubHeyting H{C, A, &J};
    int g = fam.gamma;
    int total = 0, lvl = 1;
    for (int d = 0; d <= fam.height; ++d, lvl *= g) total += lvl;
    if (static_cast<int>(fam.labels.size()) != total) throw std::invalid_argument("family needs one label per tree node");
    int internal = total - lvl / g;
    auto depth = [&](int i) {
        int d = 0;
        while (i > 0) {
            i = (i - 1) / g;
            ++d;
        }
        return d;
    };
    for (auto& s : fam.labels)
        if (!is_subfunctor(C, A, s) || H.closure(s) != s) throw std::invalid_argument("family label is not a subsheaf");
    for (int i = 0; i < internal; ++i) {
        std::vector<Subfunctor> kids;
        for (int k = 0; k < g; ++k) kids.push_back(fam.labels[g * i + 1 + k]);
        if (!fam.labels[i].leq(H.join(kids))) {
            v.ok = v.premises_hold = false;
            v.failing_level = depth(i) + 1;
            v.detail = "children of node " + std::to_string(i) + " do not cover it";
            return v;
        }
    }
    for (int c = 0; c < C.n; ++c)
        for (int x = 0; x < A.size[c]; ++x) {
            if (!fam.labels[0].contains(c, x)) continue;
            std::vector<std::pair<int, int>> front{{C.identity[c], 0}};  // (arrow into c, node)
            for (int d = 0; d < fam.height; ++d) {
                std::vector<std::pair<int, int>> next;
                for (auto [l, f] : front)
                    for (int h : C.into(C.dom(l))) {
                        int lh = C.compose(l, h);
                        int y = A.at(lh, x);
                        for (int k = 0; k < g; ++k)
                            if (fam.labels[g * f + 1 + k].contains(C.dom(h), y)) {
                                next.push_back({lh, g * f + 1 + k});
                                break;
                            }
                    }
                front = std::move(next);
            }
            std::vector<int> arrows;
            for (auto [l, f] : front) {
                arrows.push_back(l);
                for (int j = f;; j = (j - 1) / g) {
                    if (!fam.labels[j].contains(C.dom(l), A.at(l, x))) {
                        v.ok = false;
                        v.detail = "refined arrow leaves the path meet";
                        return v;
                    }
                    if (j == 0) break;
                }
            }
            if (!J.covers(c, generated_sieve(C, c, arrows))) {
                v.ok = false;
                v.detail = "bottom-level family does not cover object " + C.obj_name(c);
                return v;
            }
        }
    return v;
}

// ------------------------------------------------------------ text form

/** (site CATEGORY (cover OBJ (ARROW...))...) ; identities are id_OBJ, arrows of a poset category a<=b */
inline Site read_site(const SExpr& e) {
    if (e.head() != "site" || e.size() < 2) throw ParseError("expected (site CATEGORY COVER...)", e.pos);
    Site S;
    S.cat = read_category(e[1]);
    S.coverage.resize(S.cat.n);
    for (size_t i = 2; i < e.size(); ++i) {
        const SExpr& it = e[i];
        if (it.head() != "cover" || it.size() != 3) throw ParseError("(cover OBJECT (ARROWS...))", it.pos);
        int c = -1;
        for (int k = 0; k < S.cat.n; ++k)
            if (S.cat.obj_name(k) == it[1].text) c = k;
        if (c < 0) throw ParseError("unknown object '" + it[1].text + "'", it[1].pos);
        std::vector<int> fam;
        for (auto& a : it[2].items) {
            int f = -1;
            for (int k = 0; k < S.cat.num_arrows(); ++k)
                if (S.cat.arrows[k].name == a.text || (S.cat.identity[S.cat.dom(k)] == k && a.text == "id_" + S.cat.obj_name(S.cat.dom(k))))
                    f = k;
            if (f < 0) throw ParseError("unknown arrow '" + a.text + "'", a.pos);
            fam.push_back(f);
        }
        S.coverage[c].push_back(fam);
    }
    try {
        S.validate();
    } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what(), e.pos);
    }
    return S;
}

inline SExpr site_sexpr(const Site& S) {
    SExpr l = SExpr::list({SExpr::sym("site"), category_sexpr(S.cat)});
    for (int c = 0; c < S.cat.n; ++c)
        for (auto& fam : S.coverage[c]) {
            SExpr as = SExpr::list();
            for (int f : fam)
                as.add(SExpr::sym(S.cat.identity[S.cat.dom(f)] == f ? "id_" + S.cat.obj_name(c) : S.cat.arrows[f].name));
            l.add(SExpr::list({SExpr::sym("cover"), SExpr::sym(S.cat.obj_name(c)), as}));
        }
    return l;
}

}  // namespace ifol

#endif
