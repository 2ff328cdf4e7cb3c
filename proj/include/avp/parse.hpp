#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

#include "avp/expr.hpp"

namespace avp {

struct ParseError : Error {
    std::size_t pos;
    ParseError(const std::string& msg, std::size_t p)
        : Error(msg + " (at offset " + std::to_string(p) + ")"), pos(p) {}
};

// Resolves identifiers to symbols while parsing; return null to reject.
using SymbolLookup = std::function<SymbolPtr(const std::string&)>;

namespace detail {

class Parser {
  public:
    Parser(std::string_view src, SymbolLookup lookup)
        : src_(src), lookup_(std::move(lookup)) {}

    ExprPtr parse() {
        ExprPtr e = sum();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr sum() {
        ExprPtr e = product();
        for (;;) {
            if (eat('+')) e = ex_add2(std::move(e), product());
            else if (eat('-')) e = ex_sub(std::move(e), product());
            else return e;
        }
    }

    ExprPtr product() {
        ExprPtr e = unary();
        for (;;) {
            if (eat('*')) e = ex_mul2(std::move(e), unary());
            else if (eat('/')) e = ex_div(std::move(e), unary());
            else return e;
        }
    }

    ExprPtr unary() {
        if (eat('-')) return ex_neg(unary());
        if (eat('+')) return unary();
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (eat('^')) return ex_pow(std::move(base), exponent());
        return base;
    }

    // Exponents are rational constants: 2, -2, (3/2), (-1/2), 0.5
    Rational exponent(bool allow_bare_slash = false) {
        skip_ws();
        bool paren = eat('(');
        bool negative = false;
        if (eat('-')) negative = true;
        ExprPtr n = number();
        Rational r;
        if (n->op == Op::Num) {
            r = n->rat;
        } else {
            throw ParseError("exponent must be an exact rational constant", pos_);
        }
        if ((paren || allow_bare_slash) && eat('/')) {
            ExprPtr d = number();
            if (d->op != Op::Num || !d->rat.is_integer() || !r.is_integer())
                throw ParseError("malformed rational exponent", pos_);
            auto q = rat_div(r, d->rat);
            if (!q) throw ParseError("exponent overflow", pos_);
            r = *q;
        }
        if (negative) {
            auto m = rat_neg(r);
            if (!m) throw ParseError("exponent overflow", pos_);
            r = *m;
        }
        if (paren && !eat(')')) throw ParseError("expected ')' in exponent", pos_);
        return r;
    }

    ExprPtr atom() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            ExprPtr e = sum();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        if (peek() == '(') {
            ++pos_;
            ExprPtr arg = sum();
            if (name == "pow") {
                if (!eat(',')) throw ParseError("pow expects two arguments", pos_);
                Rational e = exponent(true);
                if (!eat(')')) throw ParseError("expected ')'", pos_);
                return ex_pow(std::move(arg), e);
            }
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            if (name == "sin") return ex_sin(std::move(arg));
            if (name == "cos") return ex_cos(std::move(arg));
            if (name == "exp") return ex_exp(std::move(arg));
            if (name == "ln") return ex_ln(std::move(arg));
            if (name == "sqrt") return ex_sqrt(std::move(arg));
            throw ParseError("unknown function '" + name + "'", start);
        }
        SymbolPtr s = lookup_ ? lookup_(name) : nullptr;
        if (!s) throw ParseError("unknown symbol '" + name + "'", start);
        return ex_sym(std::move(s));
    }

    // Finite decimals and integer exponents stay exact; overflow falls back
    // to the nearest double.
    ExprPtr number() {
        skip_ws();
        const std::size_t start = pos_;
        __int128 mant = 0;
        int frac_digits = 0;
        bool any = false, overflow = false, seen_dot = false;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                any = true;
                if (!overflow) {
                    mant = mant * 10 + (c - '0');
                    if (mant > (__int128)INT64_MAX * 1000000) overflow = true;
                }
                if (seen_dot) ++frac_digits;
                ++pos_;
            } else if (c == '.' && !seen_dot) {
                seen_dot = true;
                ++pos_;
            } else {
                break;
            }
        }
        if (!any) throw ParseError("expected a number", start);
        std::int64_t exp10 = 0;
        bool has_exp = false;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            bool neg = false;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) neg = (src_[pos_++] == '-');
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                has_exp = true;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    if (exp10 < 10000) exp10 = exp10 * 10 + (src_[pos_] - '0');
                    else overflow = true;
                    ++pos_;
                }
                if (exp10 > 1000) overflow = true;
                if (neg) exp10 = -exp10;
            } else {
                pos_ = save;  // bare 'e' belongs to an identifier? reject via fallthrough
            }
        }
        const std::int64_t net = exp10 - frac_digits;
        if (!overflow) {
            __int128 num = mant, den = 1;
            std::int64_t k = net;
            bool ok = true;
            while (k > 0 && ok) {
                num *= 10;
                ok = num < ((__int128)1 << 100);
                --k;
            }
            while (k < 0 && ok) {
                den *= 10;
                ok = den < ((__int128)1 << 100);
                ++k;
            }
            if (ok) {
                if (auto r = rat_make(num, den)) return ex_num(*r);
            }
        }
        double v = 0;
        auto text = src_.substr(start, pos_ - start);
        std::from_chars(text.data(), text.data() + text.size(), v);
        (void)has_exp;
        return ex_numf(v);
    }

    std::string_view src_;
    SymbolLookup lookup_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expr(std::string_view src, const SymbolLookup& lookup) {
    return detail::Parser(src, lookup).parse();
}

// ---------------------------------------------------------------------------
// Printing. Output re-parses to the same value: a/b sugar for negative
// exponents, unary minus for negative coefficients, sqrt for exponent 1/2.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string print_numf(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// prec: 0 sum context, 1 product, 2 power-base / unary
inline std::string print_rec(const ExprPtr& e, int prec);

inline bool is_negative_number(const ExprPtr& e) {
    return (e->op == Op::Num && e->rat.num < 0) || (e->op == Op::NumF && e->fval < 0);
}

inline std::string print_product(const ExprPtr& e, int prec) {
    // Split into numerator and denominator by exponent sign.
    std::vector<std::string> nums, dens;
    std::string sign;
    auto feed = [&](const ExprPtr& f) {
        if (f->op == Op::Pow && f->rat.num < 0) {
            auto flipped = rat_neg(f->rat);
            ExprPtr fe = ex_pow(f->kids[0], *flipped);
            std::string ds = print_rec(fe, 1);
            if (fe->op == Op::Mul || fe->op == Op::Add) ds = "(" + ds + ")";
            dens.push_back(std::move(ds));
        } else if (is_num(f) && is_negative_number(f)) {
            sign = "-";
            ExprPtr a = f->op == Op::Num ? ex_num(*rat_neg(f->rat)) : ex_numf(-f->fval);
            if (!is_one(a)) nums.push_back(print_rec(a, 1));
        } else {
            nums.push_back(print_rec(f, 1));
        }
    };
    if (e->op == Op::Mul)
        for (const auto& k : e->kids) feed(k);
    else
        feed(e);
    std::string body;
    if (nums.empty()) body = "1";
    else {
        for (std::size_t i = 0; i < nums.size(); ++i) {
            if (i) body += "*";
            body += nums[i];
        }
    }
    for (const auto& d : dens) body += "/" + d;
    std::string out = sign + body;
    if (!sign.empty() && prec >= 1) return "(" + out + ")";
    return out;
}

inline std::string print_rec(const ExprPtr& e, int prec) {
    switch (e->op) {
        case Op::Num: {
            std::string s = rat_str(e->rat);
            if ((e->rat.num < 0 || !e->rat.is_integer()) && prec >= 2) return "(" + s + ")";
            if (e->rat.num < 0 && prec >= 1) return "(" + s + ")";
            return s;
        }
        case Op::NumF: {
            std::string s = print_numf(e->fval);
            if (e->fval < 0 && prec >= 1) return "(" + s + ")";
            return s;
        }
        case Op::Sym:
            return e->sym->name;
        case Op::Add: {
            std::string out;
            bool first = true;
            for (const auto& k : e->kids) {
                std::string term = print_rec(k, 0);
                if (first) {
                    out = term;
                    first = false;
                } else if (!term.empty() && term[0] == '-') {
                    out += " - " + term.substr(1);
                } else {
                    out += " + " + term;
                }
            }
            if (prec >= 1) return "(" + out + ")";
            return out;
        }
        case Op::Mul:
            return print_product(e, prec);
        case Op::Pow: {
            if (e->rat == Rational{1, 2}) return "sqrt(" + print_rec(e->kids[0], 0) + ")";
            if (e->rat.num < 0) return print_product(e, prec);  // 1/x^k form
            const Op bop = e->kids[0]->op;
            const bool atom_like = bop == Op::Sym || bop == Op::Sin || bop == Op::Cos ||
                                   bop == Op::Exp || bop == Op::Ln;
            std::string base = atom_like ? print_rec(e->kids[0], 0)
                                         : "(" + print_rec(e->kids[0], 0) + ")";
            std::string ex = e->rat.is_integer() ? std::to_string(e->rat.num)
                                                 : "(" + rat_str(e->rat) + ")";
            return base + "^" + ex;
        }
        case Op::Sin: return "sin(" + print_rec(e->kids[0], 0) + ")";
        case Op::Cos: return "cos(" + print_rec(e->kids[0], 0) + ")";
        case Op::Exp: return "exp(" + print_rec(e->kids[0], 0) + ")";
        case Op::Ln: return "ln(" + print_rec(e->kids[0], 0) + ")";
    }
    throw Error("unreachable op in print");
}

}  // namespace detail

inline std::string print_expr(const ExprPtr& e) { return detail::print_rec(e, 0); }

}  // namespace avp
