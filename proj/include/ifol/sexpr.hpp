#ifndef IFOL_SEXPR_HPP
#define IFOL_SEXPR_HPP

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifol {

/** \brief Source position, 1-based. */
struct Pos {
    int line = 1;
    int col = 1;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, Pos p)
        : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg), pos(p) {}
    Pos pos;
};

/** \brief A node of an s-expression tree. */
struct SExpr {
    enum Kind { Symbol, String, List } kind = Symbol;
    std::string text;
    std::vector<SExpr> items;
    Pos pos;

    bool is_symbol() const { return kind == Symbol; }
    bool is_symbol(const std::string& s) const { return kind == Symbol && text == s; }
    bool is_list() const { return kind == List; }
    bool is_string() const { return kind == String; }
    size_t size() const { return items.size(); }
    const SExpr& operator[](size_t i) const { return items.at(i); }

    /** Head symbol of a list, or "" */
    std::string head() const {
        if (kind == List && !items.empty() && items[0].kind == Symbol) return items[0].text;
        return "";
    }

    static SExpr sym(std::string s) { SExpr e; e.kind = Symbol; e.text = std::move(s); return e; }
    static SExpr str(std::string s) { SExpr e; e.kind = String; e.text = std::move(s); return e; }
    static SExpr list(std::vector<SExpr> xs = {}) { SExpr e; e.kind = List; e.items = std::move(xs); return e; }

    SExpr& add(SExpr e) { items.push_back(std::move(e)); return *this; }
};

namespace detail {

inline bool plain_symbol_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != '"' && c != '|' && c != ';';
}

class Reader {
public:
    explicit Reader(const std::string& s) : src_(s) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip();
        while (i_ < src_.size()) {
            out.push_back(read());
            skip();
        }
        return out;
    }

private:
    const std::string& src_;
    size_t i_ = 0;
    Pos p_;

    void advance() {
        if (src_[i_] == '\n') { p_.line++; p_.col = 1; } else { p_.col++; }
        i_++;
    }

    void skip() {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (std::isspace(static_cast<unsigned char>(c))) advance();
            else if (c == ';') { while (i_ < src_.size() && src_[i_] != '\n') advance(); }
            else break;
        }
    }

    SExpr read() {
        skip();
        if (i_ >= src_.size()) throw ParseError("unexpected end of input", p_);
        Pos start = p_;
        char c = src_[i_];
        if (c == '(') {
            advance();
            SExpr e = SExpr::list();
            e.pos = start;
            for (;;) {
                skip();
                if (i_ >= src_.size()) throw ParseError("unbalanced parenthesis", start);
                if (src_[i_] == ')') { advance(); break; }
                e.items.push_back(read());
            }
            return e;
        }
        if (c == ')') throw ParseError("unexpected ')'", start);
        if (c == '"' || c == '|') {
            char close = c;
            advance();
            std::string t;
            while (i_ < src_.size() && src_[i_] != close) {
                if (src_[i_] == '\\' && i_ + 1 < src_.size()) advance();
                t += src_[i_];
                advance();
            }
            if (i_ >= src_.size()) throw ParseError("unterminated quoted token", start);
            advance();
            SExpr e = close == '"' ? SExpr::str(t) : SExpr::sym(t);
            e.pos = start;
            return e;
        }
        std::string t;
        while (i_ < src_.size() && plain_symbol_char(src_[i_])) { t += src_[i_]; advance(); }
        SExpr e = SExpr::sym(t);
        e.pos = start;
        return e;
    }
};

inline bool needs_quote(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s)
        if (!plain_symbol_char(c)) return true;
    return false;
}

inline std::string escape(const std::string& s, char q) {
    std::string out;
    for (char c : s) {
        if (c == q || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace detail

inline std::vector<SExpr> read_sexprs(const std::string& text) { return detail::Reader(text).read_all(); }

inline SExpr read_sexpr(const std::string& text) {
    auto all = read_sexprs(text);
    if (all.empty()) throw ParseError("empty input", Pos{});
    if (all.size() > 1) throw ParseError("trailing input after first expression", all[1].pos);
    return all[0];
}

inline std::string to_string(const SExpr& e) {
    switch (e.kind) {
        case SExpr::Symbol:
            return detail::needs_quote(e.text) ? "|" + detail::escape(e.text, '|') + "|" : e.text;
        case SExpr::String:
            return "\"" + detail::escape(e.text, '"') + "\"";
        case SExpr::List: {
            std::string s = "(";
            for (size_t i = 0; i < e.items.size(); ++i) {
                if (i) s += ' ';
                s += to_string(e.items[i]);
            }
            return s + ")";
        }
    }
    return "";
}

/** \brief Multi-line rendering; lists longer than `width` break one item per line. */
inline std::string to_pretty(const SExpr& e, int indent = 0, size_t width = 90) {
    std::string flat = to_string(e);
    if (e.kind != SExpr::List || flat.size() + indent <= width || e.items.size() < 2) return flat;
    std::string pad(indent + 2, ' ');
    std::string s = "(" + to_string(e.items[0]);
    for (size_t i = 1; i < e.items.size(); ++i) s += "\n" + pad + to_pretty(e.items[i], indent + 2, width);
    return s + ")";
}

}  // namespace ifol

#endif
