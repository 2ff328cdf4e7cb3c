#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "avp/rational.hpp"

namespace avp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EvalError : Error {
    using Error::Error;
};
struct DomainError : EvalError {
    using EvalError::EvalError;
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

enum class SymKind : std::uint8_t { Coordinate, Parameter, JetField, Derived };

// A symbol is identified by its address; the name is for printing and
// canonical ordering. Jet and derived symbols carry differentiation rules so
// the expression layer needs no knowledge of field bookkeeping.
struct Symbol {
    SymKind kind;
    std::string name;
    int coord_index = -1;  // Coordinate only

    // d(symbol)/dx^mu as an expression (total derivative). Null means zero.
    std::function<ExprPtr(int)> total_rule;
    // d(symbol)/d(other symbol) for Derived symbols that secretly depend on
    // jet symbols. Null or nullopt means independent.
    std::function<std::optional<ExprPtr>(const Symbol*)> partial_rule;

    std::uint64_t uid;

    Symbol(SymKind k, std::string n) : kind(k), name(std::move(n)), uid(next_uid()) {}

    static std::uint64_t next_uid() {
        static std::atomic<std::uint64_t> counter{1};
        return counter.fetch_add(1);
    }
};
using SymbolPtr = std::shared_ptr<Symbol>;

inline SymbolPtr make_coordinate(std::string name, int index) {
    auto s = std::make_shared<Symbol>(SymKind::Coordinate, std::move(name));
    s->coord_index = index;
    return s;
}
inline SymbolPtr make_parameter(std::string name) {
    return std::make_shared<Symbol>(SymKind::Parameter, std::move(name));
}

enum class Op : std::uint8_t {
    Num,   // exact rational
    NumF,  // double
    Sym,
    Add,  // n-ary, operands canonically sorted
    Mul,  // n-ary, operands canonically sorted
    Pow,  // base ^ rational constant
    Sin,
    Cos,
    Exp,
    Ln,
};

struct ExprNode {
    Op op;
    Rational rat{};         // Num payload, Pow exponent
    double fval = 0.0;      // NumF payload
    SymbolPtr sym;          // Sym payload
    std::vector<ExprPtr> kids;
    std::uint64_t hash = 0;
    std::uint32_t depth = 0;
    std::size_t size = 1;  // node count, for swell diagnostics
};

namespace detail {

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 12) + (h >> 4);
    return h * 0x2545f4914f6cdd1dull;
}

inline std::uint64_t hash_node(const ExprNode& n) {
    std::uint64_t h = detail::mix(0x243f6a8885a308d3ull, static_cast<std::uint64_t>(n.op));
    switch (n.op) {
        case Op::Num:
            h = mix(h, static_cast<std::uint64_t>(n.rat.num));
            h = mix(h, static_cast<std::uint64_t>(n.rat.den));
            break;
        case Op::NumF:
            h = mix(h, std::bit_cast<std::uint64_t>(n.fval));
            break;
        case Op::Sym: {
            std::uint64_t sh = 0xcbf29ce484222325ull;
            for (char c : n.sym->name) sh = (sh ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
            h = mix(h, static_cast<std::uint64_t>(n.sym->kind));
            h = mix(h, sh);
            break;
        }
        case Op::Pow:
            h = mix(h, static_cast<std::uint64_t>(n.rat.num));
            h = mix(h, static_cast<std::uint64_t>(n.rat.den));
            break;
        default:
            break;
    }
    for (const auto& k : n.kids) h = mix(h, k->hash);
    return h;
}

}  // namespace detail

namespace detail {

// Proven-equal node pairs, per thread. Hash consing makes equal nodes share a
// pointer in the common case, but nodes predating an intern-table reset can
// duplicate structure; without this memo a structural compare of two such
// DAGs walks their tree expansion.
struct EqPair {
    ExprPtr a, b;
};
struct EqPairHash {
    std::size_t operator()(const EqPair& p) const {
        return std::hash<const ExprNode*>()(p.a.get()) * 31 ^
               std::hash<const ExprNode*>()(p.b.get());
    }
};
struct EqPairEq {
    bool operator()(const EqPair& x, const EqPair& y) const {
        return x.a.get() == y.a.get() && x.b.get() == y.b.get();
    }
};

inline std::unordered_set<EqPair, EqPairHash, EqPairEq>& eq_cache() {
    static thread_local std::unordered_set<EqPair, EqPairHash, EqPairEq> c;
    return c;
}

}  // namespace detail

// Total order on expressions, deterministic within a process: hash first,
// then structure. Distinct same-named symbols fall back to creation order.
inline int expr_cmp(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->hash != b->hash) return a->hash < b->hash ? -1 : 1;
    if (a->op != b->op) return a->op < b->op ? -1 : 1;
    switch (a->op) {
        case Op::Num:
        case Op::Pow:
            if (a->rat.num != b->rat.num) return a->rat.num < b->rat.num ? -1 : 1;
            if (a->rat.den != b->rat.den) return a->rat.den < b->rat.den ? -1 : 1;
            break;
        case Op::NumF:
            if (a->fval != b->fval) return a->fval < b->fval ? -1 : 1;
            break;
        case Op::Sym: {
            if (a->sym.get() == b->sym.get()) return 0;
            if (a->sym->kind != b->sym->kind) return a->sym->kind < b->sym->kind ? -1 : 1;
            int c = a->sym->name.compare(b->sym->name);
            if (c) return c < 0 ? -1 : 1;
            return a->sym->uid < b->sym->uid ? -1 : 1;
        }
        default:
            break;
    }
    if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
    auto& eq = detail::eq_cache();
    detail::EqPair key{a.get() < b.get() ? a : b, a.get() < b.get() ? b : a};
    if (eq.count(key)) return 0;
    for (std::size_t i = 0; i < a->kids.size(); ++i) {
        int c = expr_cmp(a->kids[i], b->kids[i]);
        if (c) return c;
    }
    if (eq.size() >= 2'000'000) eq.clear();
    eq.insert(std::move(key));
    return 0;
}

inline bool expr_eq(const ExprPtr& a, const ExprPtr& b) { return expr_cmp(a, b) == 0; }

// Memo tables key nodes by address; the shared_ptr key pins each node so its
// address cannot be recycled while the table lives.
struct ExprPtrHash {
    std::size_t operator()(const ExprPtr& p) const {
        return std::hash<const ExprNode*>()(p.get());
    }
};
struct ExprPtrEq {
    bool operator()(const ExprPtr& a, const ExprPtr& b) const { return a.get() == b.get(); }
};
template <class V>
using NodeMap = std::unordered_map<ExprPtr, V, ExprPtrHash, ExprPtrEq>;

namespace detail {

// payload-and-children equality; hash equality is checked by the caller
inline bool shallow_eq(const ExprNode& a, const ExprNode& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case Op::Num:
        case Op::Pow:
            if (a.rat.num != b.rat.num || a.rat.den != b.rat.den) return false;
            break;
        case Op::NumF:
            if (std::bit_cast<std::uint64_t>(a.fval) != std::bit_cast<std::uint64_t>(b.fval))
                return false;
            break;
        case Op::Sym:
            if (a.sym.get() != b.sym.get()) return false;
            break;
        default:
            break;
    }
    if (a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (a.kids[i].get() != b.kids[i].get()) return false;
    return true;
}

// Hash consing, per thread. Children are interned before parents, so
// structural identity reduces to payload plus child pointers; equal
// expressions then share one node and every pointer-keyed memo table
// (simplify, diff, eval, substitution) hits across expressions. The table
// resets when it grows past the cap; that only forfeits future sharing.
class InternTable {
  public:
    ExprPtr intern(ExprNode&& n) {
        if (count_ >= kCap) {
            map_.clear();
            count_ = 0;
        }
        auto& bucket = map_[n.hash];
        for (const ExprPtr& p : bucket)
            if (shallow_eq(*p, n)) return p;
        ExprPtr p = std::make_shared<const ExprNode>(std::move(n));
        bucket.push_back(p);
        ++count_;
        return p;
    }

  private:
    static constexpr std::size_t kCap = 6'000'000;
    std::unordered_map<std::uint64_t, std::vector<ExprPtr>> map_;
    std::size_t count_ = 0;
};

inline ExprPtr seal(ExprNode n) {
    n.depth = 0;
    n.size = 1;
    for (const auto& k : n.kids) {
        n.depth = std::max(n.depth, k->depth + 1);
        n.size += k->size;
    }
    n.hash = hash_node(n);
    static thread_local InternTable table;
    return table.intern(std::move(n));
}

}  // namespace detail

inline ExprPtr ex_num(Rational r) {
    ExprNode n;
    n.op = Op::Num;
    n.rat = r;
    return detail::seal(std::move(n));
}
inline ExprPtr ex_num(std::int64_t v) { return ex_num(Rational{v}); }
inline ExprPtr ex_numf(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite constant");
    ExprNode n;
    n.op = Op::NumF;
    n.fval = v;
    return detail::seal(std::move(n));
}
inline ExprPtr ex_sym(SymbolPtr s) {
    ExprNode n;
    n.op = Op::Sym;
    n.sym = std::move(s);
    return detail::seal(std::move(n));
}

inline const ExprPtr& ex_zero() {
    static const ExprPtr z = ex_num(0);
    return z;
}
inline const ExprPtr& ex_one() {
    static const ExprPtr o = ex_num(1);
    return o;
}

inline bool is_num(const ExprPtr& e) { return e->op == Op::Num || e->op == Op::NumF; }
inline bool is_zero(const ExprPtr& e) {
    return (e->op == Op::Num && e->rat.is_zero()) || (e->op == Op::NumF && e->fval == 0.0);
}
inline bool is_one(const ExprPtr& e) {
    return (e->op == Op::Num && e->rat.is_one()) || (e->op == Op::NumF && e->fval == 1.0);
}
inline double num_value(const ExprPtr& e) {
    return e->op == Op::Num ? e->rat.to_double() : e->fval;
}

ExprPtr ex_add(std::vector<ExprPtr> terms);
ExprPtr ex_mul(std::vector<ExprPtr> factors);

namespace detail {

// Accumulates numeric constants, staying exact while it can.
struct NumFold {
    Rational rat;
    double f = 0.0;
    bool have_f = false;
    bool additive;

    explicit NumFold(bool add) : rat(add ? 0 : 1), additive(add) {}

    void feed(const ExprPtr& e) {
        if (e->op == Op::Num) {
            if (!have_f) {
                auto r = additive ? rat_add(rat, e->rat) : rat_mul(rat, e->rat);
                if (r) {
                    rat = *r;
                    return;
                }
                spill();
            }
            apply(e->rat.to_double());
        } else {
            if (!have_f) spill();
            apply(e->fval);
        }
    }
    void spill() {
        f = rat.to_double();
        have_f = true;
    }
    void apply(double v) { f = additive ? f + v : f * v; }
    bool is_identity() const {
        return !have_f && (additive ? rat.is_zero() : rat.is_one());
    }
    ExprPtr to_expr() const { return have_f ? ex_numf(f) : ex_num(rat); }
};

inline void sort_operands(std::vector<ExprPtr>& v) {
    std::sort(v.begin(), v.end(), [](const ExprPtr& a, const ExprPtr& b) { return expr_cmp(a, b) < 0; });
}

}  // namespace detail

inline ExprPtr ex_add(std::vector<ExprPtr> terms) {
    std::vector<ExprPtr> flat;
    detail::NumFold fold(true);
    for (auto& t : terms) {
        if (t->op == Op::Add) {
            for (const auto& k : t->kids) {
                if (is_num(k)) fold.feed(k); else flat.push_back(k);
            }
        } else if (is_num(t)) {
            fold.feed(t);
        } else {
            flat.push_back(std::move(t));
        }
    }
    if (!fold.is_identity()) flat.push_back(fold.to_expr());
    if (flat.empty()) return ex_zero();
    if (flat.size() == 1) return flat[0];
    detail::sort_operands(flat);
    ExprNode n;
    n.op = Op::Add;
    n.kids = std::move(flat);
    return detail::seal(std::move(n));
}

inline ExprPtr ex_mul(std::vector<ExprPtr> factors) {
    std::vector<ExprPtr> flat;
    detail::NumFold fold(false);
    for (auto& t : factors) {
        if (t->op == Op::Mul) {
            for (const auto& k : t->kids) {
                if (is_num(k)) fold.feed(k); else flat.push_back(k);
            }
        } else if (is_num(t)) {
            fold.feed(t);
        } else {
            flat.push_back(std::move(t));
        }
    }
    const ExprPtr coeff = fold.to_expr();
    if (is_zero(coeff)) return ex_zero();
    if (!is_one(coeff)) flat.push_back(coeff);
    if (flat.empty()) return ex_one();
    if (flat.size() == 1) return flat[0];
    detail::sort_operands(flat);
    ExprNode n;
    n.op = Op::Mul;
    n.kids = std::move(flat);
    return detail::seal(std::move(n));
}

inline ExprPtr ex_add2(ExprPtr a, ExprPtr b) { return ex_add({std::move(a), std::move(b)}); }
inline ExprPtr ex_mul2(ExprPtr a, ExprPtr b) { return ex_mul({std::move(a), std::move(b)}); }
inline ExprPtr ex_neg(ExprPtr a) { return ex_mul2(ex_num(-1), std::move(a)); }
inline ExprPtr ex_sub(ExprPtr a, ExprPtr b) { return ex_add2(std::move(a), ex_neg(std::move(b))); }

inline ExprPtr ex_pow(ExprPtr base, Rational e) {
    if (e.is_zero()) return ex_one();
    if (e.is_one()) return base;
    if (base->op == Op::Num) {
        if (e.is_integer()) {
            if (auto r = rat_pow_int(base->rat, e.num)) return ex_num(*r);
            return ex_numf(std::pow(base->rat.to_double(), e.to_double()));
        }
        if (base->rat.num >= 0) {
            if (auto root = rat_root(base->rat, e.den)) {
                if (auto r = rat_pow_int(*root, e.num)) return ex_num(*r);
            }
        }
        // no exact value: keep 2^(1/2) and friends symbolic
    }
    if (base->op == Op::NumF && !(base->fval < 0 && !e.is_integer()))
        return ex_numf(std::pow(base->fval, e.to_double()));
    if (base->op == Op::Pow && e.is_integer()) {
        // (b^q)^n == b^(qn) for integer n
        if (auto q = rat_mul(base->rat, e)) return ex_pow(base->kids[0], *q);
    }
    ExprNode n;
    n.op = Op::Pow;
    n.rat = e;
    n.kids = {std::move(base)};
    return detail::seal(std::move(n));
}

inline ExprPtr ex_div(ExprPtr a, ExprPtr b) {
    if (b->op == Op::Num && b->rat.is_zero()) throw DomainError("division by exact zero");
    return ex_mul2(std::move(a), ex_pow(std::move(b), Rational{-1}));
}
inline ExprPtr ex_sqrt(ExprPtr a) { return ex_pow(std::move(a), Rational{1, 2}); }

namespace detail {

inline ExprPtr unary(Op op, ExprPtr a) {
    if (a->op == Op::Num || a->op == Op::NumF) {
        const double v = num_value(a);
        if (a->op == Op::Num) {  // exact special values only; stay symbolic otherwise
            if (op == Op::Sin && v == 0.0) return ex_zero();
            if (op == Op::Cos && v == 0.0) return ex_one();
            if (op == Op::Exp && v == 0.0) return ex_one();
            if (op == Op::Ln && v == 1.0) return ex_zero();
        } else {
            switch (op) {
                case Op::Sin: return ex_numf(std::sin(v));
                case Op::Cos: return ex_numf(std::cos(v));
                case Op::Exp: return ex_numf(std::exp(v));
                case Op::Ln:
                    if (v <= 0) throw DomainError("ln of non-positive constant");
                    return ex_numf(std::log(v));
                default: break;
            }
        }
    }
    ExprNode n;
    n.op = op;
    n.kids = {std::move(a)};
    return seal(std::move(n));
}

}  // namespace detail

inline ExprPtr ex_sin(ExprPtr a) { return detail::unary(Op::Sin, std::move(a)); }
inline ExprPtr ex_cos(ExprPtr a) { return detail::unary(Op::Cos, std::move(a)); }
inline ExprPtr ex_exp(ExprPtr a) { return detail::unary(Op::Exp, std::move(a)); }
inline ExprPtr ex_ln(ExprPtr a) { return detail::unary(Op::Ln, std::move(a)); }

// ---------------------------------------------------------------------------
// Differentiation.
//
// diff(e, s) with s a Coordinate is the total derivative d/dx^mu: jet symbols
// shift via their total_rule, derived symbols use their registered rule.
// With s a Parameter or JetField it is the partial derivative treating all
// other symbols as independent, except Derived symbols which chain through
// their partial_rule.
// ---------------------------------------------------------------------------

namespace detail {

// (expression, symbol) -> derivative, shared process-wide per thread. The
// shared_ptr keys pin both the node and the symbol, so addresses stay valid.
struct DiffKey {
    ExprPtr e;
    SymbolPtr s;
};
struct DiffKeyHash {
    std::size_t operator()(const DiffKey& k) const {
        return std::hash<const ExprNode*>()(k.e.get()) * 31 ^
               std::hash<const Symbol*>()(k.s.get());
    }
};
struct DiffKeyEq {
    bool operator()(const DiffKey& a, const DiffKey& b) const {
        return a.e.get() == b.e.get() && a.s.get() == b.s.get();
    }
};

inline std::unordered_map<DiffKey, ExprPtr, DiffKeyHash, DiffKeyEq>& diff_cache() {
    static thread_local std::unordered_map<DiffKey, ExprPtr, DiffKeyHash, DiffKeyEq> c;
    return c;
}

}  // namespace detail

class Differ {
  public:
    explicit Differ(SymbolPtr wrt) : wrt_(std::move(wrt)) {}

    ExprPtr run(const ExprPtr& e) {
        auto& cache = detail::diff_cache();
        detail::DiffKey key{e, wrt_};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        ExprPtr r = compute(e);
        if (cache.size() >= 4'000'000) cache.clear();
        cache.emplace(std::move(key), r);
        return r;
    }

  private:
    ExprPtr compute(const ExprPtr& e) {
        switch (e->op) {
            case Op::Num:
            case Op::NumF:
                return ex_zero();
            case Op::Sym: {
                const Symbol* s = e->sym.get();
                if (s == wrt_.get()) return ex_one();
                if (wrt_->kind == SymKind::Coordinate) {
                    if (s->kind == SymKind::Coordinate)
                        return ex_zero();  // distinct coordinates
                    if (s->total_rule) {
                        ExprPtr r = s->total_rule(wrt_->coord_index);
                        return r ? r : ex_zero();
                    }
                    return ex_zero();
                }
                if (s->kind == SymKind::Derived && s->partial_rule) {
                    if (auto r = s->partial_rule(wrt_.get())) return *r;
                }
                return ex_zero();
            }
            case Op::Add: {
                std::vector<ExprPtr> parts;
                parts.reserve(e->kids.size());
                for (const auto& k : e->kids) {
                    ExprPtr d = run(k);
                    if (!is_zero(d)) parts.push_back(std::move(d));
                }
                return ex_add(std::move(parts));
            }
            case Op::Mul: {
                std::vector<ExprPtr> parts;
                for (std::size_t i = 0; i < e->kids.size(); ++i) {
                    ExprPtr d = run(e->kids[i]);
                    if (is_zero(d)) continue;
                    std::vector<ExprPtr> fs;
                    fs.reserve(e->kids.size());
                    for (std::size_t j = 0; j < e->kids.size(); ++j)
                        if (j != i) fs.push_back(e->kids[j]);
                    fs.push_back(std::move(d));
                    parts.push_back(ex_mul(std::move(fs)));
                }
                return ex_add(std::move(parts));
            }
            case Op::Pow: {
                ExprPtr d = run(e->kids[0]);
                if (is_zero(d)) return ex_zero();
                auto em1 = rat_add(e->rat, Rational{-1});
                if (!em1) throw Error("exponent overflow in diff");
                return ex_mul({ex_num(e->rat), ex_pow(e->kids[0], *em1), std::move(d)});
            }
            case Op::Sin: {
                ExprPtr d = run(e->kids[0]);
                if (is_zero(d)) return ex_zero();
                return ex_mul2(ex_cos(e->kids[0]), std::move(d));
            }
            case Op::Cos: {
                ExprPtr d = run(e->kids[0]);
                if (is_zero(d)) return ex_zero();
                return ex_neg(ex_mul2(ex_sin(e->kids[0]), std::move(d)));
            }
            case Op::Exp: {
                ExprPtr d = run(e->kids[0]);
                if (is_zero(d)) return ex_zero();
                return ex_mul2(ExprPtr(e), std::move(d));
            }
            case Op::Ln: {
                ExprPtr d = run(e->kids[0]);
                if (is_zero(d)) return ex_zero();
                return ex_div(std::move(d), e->kids[0]);
            }
        }
        throw Error("unreachable op in diff");
    }

    SymbolPtr wrt_;
};

inline ExprPtr diff(const ExprPtr& e, const SymbolPtr& wrt) { return Differ(wrt).run(e); }

// ---------------------------------------------------------------------------
// Evaluation. Bindings map symbols to numbers; unbound symbols are an error.
// ---------------------------------------------------------------------------

using Binding = std::unordered_map<const Symbol*, double>;

class Evaluator {
  public:
    explicit Evaluator(const Binding& b) : bind_(b) {}

    double run(const ExprPtr& e) {
        auto it = cache_.find(e);
        if (it != cache_.end()) return it->second;
        double v = compute(e);
        cache_.emplace(e, v);
        return v;
    }

  private:
    double compute(const ExprPtr& e) {
        switch (e->op) {
            case Op::Num: return e->rat.to_double();
            case Op::NumF: return e->fval;
            case Op::Sym: {
                auto it = bind_.find(e->sym.get());
                if (it == bind_.end()) throw EvalError("unbound symbol '" + e->sym->name + "'");
                return it->second;
            }
            case Op::Add: {
                double s = 0;
                for (const auto& k : e->kids) s += run(k);
                return s;
            }
            case Op::Mul: {
                double p = 1;
                for (const auto& k : e->kids) p *= run(k);
                return p;
            }
            case Op::Pow: {
                const double b = run(e->kids[0]);
                if (e->rat.is_integer()) {
                    if (b == 0 && e->rat.num < 0) throw DomainError("division by zero");
                    return std::pow(b, static_cast<double>(e->rat.num));
                }
                if (b < 0) throw DomainError("fractional power of negative value");
                return std::pow(b, e->rat.to_double());
            }
            case Op::Sin: return std::sin(run(e->kids[0]));
            case Op::Cos: return std::cos(run(e->kids[0]));
            case Op::Exp: return std::exp(run(e->kids[0]));
            case Op::Ln: {
                const double v = run(e->kids[0]);
                if (v <= 0) throw DomainError("ln of non-positive value");
                return std::log(v);
            }
        }
        throw EvalError("unreachable op in eval");
    }

    const Binding& bind_;
    NodeMap<double> cache_;
};

inline double eval(const ExprPtr& e, const Binding& b) { return Evaluator(b).run(e); }

// ---------------------------------------------------------------------------
// Substitution. Single pass: resolver results are spliced in verbatim.
// ---------------------------------------------------------------------------

using Resolver = std::function<std::optional<ExprPtr>(const SymbolPtr&)>;

class Substituter {
  public:
    explicit Substituter(Resolver r) : res_(std::move(r)) {}

    ExprPtr run(const ExprPtr& e) {
        auto it = cache_.find(e);
        if (it != cache_.end()) return it->second;
        ExprPtr r = compute(e);
        cache_.emplace(e, r);
        return r;
    }

  private:
    ExprPtr compute(const ExprPtr& e) {
        if (e->op == Op::Sym) {
            if (auto r = res_(e->sym)) return *r;
            return e;
        }
        if (e->kids.empty()) return e;
        std::vector<ExprPtr> kids;
        kids.reserve(e->kids.size());
        bool changed = false;
        for (const auto& k : e->kids) {
            ExprPtr nk = run(k);
            changed |= (nk.get() != k.get());
            kids.push_back(std::move(nk));
        }
        if (!changed) return e;
        switch (e->op) {
            case Op::Add: return ex_add(std::move(kids));
            case Op::Mul: return ex_mul(std::move(kids));
            case Op::Pow: return ex_pow(std::move(kids[0]), e->rat);
            case Op::Sin: return ex_sin(std::move(kids[0]));
            case Op::Cos: return ex_cos(std::move(kids[0]));
            case Op::Exp: return ex_exp(std::move(kids[0]));
            case Op::Ln: return ex_ln(std::move(kids[0]));
            default: throw Error("unreachable op in substitute");
        }
    }

    Resolver res_;
    NodeMap<ExprPtr> cache_;
};

inline ExprPtr substitute(const ExprPtr& e, const Resolver& r) {
    return Substituter(r).run(e);
}

// Collects the distinct symbols appearing in an expression.
inline void collect_symbols(const ExprPtr& e, std::vector<SymbolPtr>& out) {
    std::unordered_map<const ExprNode*, bool> seen;
    std::vector<const ExprNode*> stack{e.get()};
    seen[e.get()] = true;
    std::unordered_map<const Symbol*, bool> have;
    while (!stack.empty()) {
        const ExprNode* n = stack.back();
        stack.pop_back();
        if (n->op == Op::Sym) {
            if (!have.count(n->sym.get())) {
                have[n->sym.get()] = true;
                out.push_back(n->sym);
            }
            continue;
        }
        for (const auto& k : n->kids)
            if (!seen.count(k.get())) {
                seen[k.get()] = true;
                stack.push_back(k.get());
            }
    }
}

}  // namespace avp
