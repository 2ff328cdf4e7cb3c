#pragma once

#include <map>
#include <vector>

#include "avp/expr.hpp"

namespace avp {

// Canonicalizing simplifier. Bottom-up and memoized: collects like terms in
// sums and like factors in products, folds exact constants, and distributes
// integer powers over products so factor collection can see through them.
// It never expands sums, so expression size cannot blow up here. Idempotent
// by construction: the output decomposes into the same (coefficient, core)
// and (base, exponent) data it was built from.
class Simplifier {
  public:
    ExprPtr run(const ExprPtr& e) {
        auto it = cache_.find(e);
        if (it != cache_.end()) return it->second;
        ExprPtr r = compute(e);
        // canonicalization is contractive; iterate in case one pass exposes
        // new like terms (e.g. after numeric absorption into sums)
        for (int guard = 0; guard < 8; ++guard) {
            ExprPtr r2 = compute(r);
            if (expr_eq(r2, r)) break;
            r = std::move(r2);
        }
        cache_.emplace(e, r);
        cache_.emplace(r, r);
        return r;
    }

  private:
    struct CmpExpr {
        bool operator()(const ExprPtr& a, const ExprPtr& b) const { return expr_cmp(a, b) < 0; }
    };

    ExprPtr compute(const ExprPtr& e) {
        switch (e->op) {
            case Op::Num:
            case Op::NumF:
            case Op::Sym:
                return e;
            case Op::Add: {
                std::vector<ExprPtr> kids;
                kids.reserve(e->kids.size());
                for (const auto& k : e->kids) kids.push_back(run(k));
                return collect_sum(ex_add(std::move(kids)));
            }
            case Op::Mul: {
                std::vector<ExprPtr> kids;
                kids.reserve(e->kids.size());
                for (const auto& k : e->kids) kids.push_back(run(k));
                return collect_product(ex_mul(std::move(kids)));
            }
            case Op::Pow: {
                ExprPtr b = run(e->kids[0]);
                if (b->op == Op::Mul && e->rat.is_integer()) {
                    std::vector<ExprPtr> fs;
                    fs.reserve(b->kids.size());
                    for (const auto& k : b->kids) fs.push_back(ex_pow(k, e->rat));
                    return collect_product(ex_mul(std::move(fs)));
                }
                return ex_pow(std::move(b), e->rat);
            }
            case Op::Sin: return ex_sin(run(e->kids[0]));
            case Op::Cos: return ex_cos(run(e->kids[0]));
            case Op::Exp: return ex_exp(run(e->kids[0]));
            case Op::Ln: return ex_ln(run(e->kids[0]));
        }
        throw Error("unreachable op in simplify");
    }

    // term -> (numeric coefficient, core). The core of 6*x*y is x*y.
    static std::pair<ExprPtr, ExprPtr> split_term(const ExprPtr& t) {
        if (t->op != Op::Mul) return {ex_one(), t};
        std::vector<ExprPtr> core;
        ExprPtr coeff = ex_one();
        for (const auto& k : t->kids) {
            if (is_num(k)) coeff = k;  // at most one numeric factor post-ctor
            else core.push_back(k);
        }
        return {std::move(coeff), ex_mul(std::move(core))};
    }

    ExprPtr collect_sum(ExprPtr sum) {
        if (sum->op != Op::Add) return sum;
        std::map<ExprPtr, detail::NumFold, CmpExpr> groups;
        ExprPtr numeric = ex_zero();
        for (const auto& t : sum->kids) {
            if (is_num(t)) {
                numeric = ex_add2(numeric, t);
                continue;
            }
            auto [coeff, core] = split_term(t);
            auto [it, fresh] = groups.try_emplace(core, detail::NumFold(true));
            (void)fresh;
            it->second.feed(coeff);
        }
        std::vector<ExprPtr> out;
        for (const auto& [core, fold] : groups) {
            ExprPtr c = fold.to_expr();
            if (is_zero(c)) continue;
            out.push_back(is_one(c) ? core : absorb_numeric(ex_mul2(c, core)));
        }
        if (!is_zero(numeric)) out.push_back(numeric);
        return ex_add(std::move(out));
    }

    // factor -> (base, rational exponent)
    static std::pair<ExprPtr, Rational> split_factor(const ExprPtr& f) {
        if (f->op == Op::Pow) return {f->kids[0], f->rat};
        return {f, Rational{1}};
    }

    ExprPtr collect_product(ExprPtr prod) {
        if (prod->op != Op::Mul) return prod;
        std::map<ExprPtr, Rational, CmpExpr> groups;
        std::vector<ExprPtr> passthrough;  // numeric factor, overflow refugees
        for (const auto& f : prod->kids) {
            if (is_num(f)) {
                passthrough.push_back(f);
                continue;
            }
            auto [base, expo] = split_factor(f);
            auto it = groups.find(base);
            if (it == groups.end()) {
                groups.emplace(std::move(base), expo);
            } else if (auto s = rat_add(it->second, expo)) {
                it->second = *s;
            } else {
                passthrough.push_back(f);  // exponent overflow: leave as-is
            }
        }
        std::vector<ExprPtr> out = std::move(passthrough);
        for (const auto& [base, expo] : groups) {
            if (expo.is_zero()) continue;
            out.push_back(ex_pow(base, expo));
        }
        return absorb_numeric(ex_mul(std::move(out)));
    }

    // c * (a + b + ...) * rest -> (ca + cb + ...) * rest for numeric c. Node
    // count is unchanged, but the sum can now flatten into a parent sum and
    // participate in like-term collection.
    static ExprPtr absorb_numeric(ExprPtr r) {
        for (;;) {
            if (r->op != Op::Mul) return r;
            int inum = -1, iadd = -1;
            for (std::size_t i = 0; i < r->kids.size(); ++i) {
                if (is_num(r->kids[i])) inum = static_cast<int>(i);
                else if (iadd < 0 && r->kids[i]->op == Op::Add) iadd = static_cast<int>(i);
            }
            if (inum < 0 || iadd < 0) return r;
            std::vector<ExprPtr> terms;
            terms.reserve(r->kids[iadd]->kids.size());
            for (const auto& t : r->kids[iadd]->kids)
                terms.push_back(absorb_numeric(ex_mul2(r->kids[inum], t)));
            std::vector<ExprPtr> kids;
            for (std::size_t i = 0; i < r->kids.size(); ++i)
                if (static_cast<int>(i) != inum && static_cast<int>(i) != iadd)
                    kids.push_back(r->kids[i]);
            kids.push_back(ex_add(std::move(terms)));
            r = ex_mul(std::move(kids));
        }
    }

    NodeMap<ExprPtr> cache_;

  public:
    std::size_t cache_size() const { return cache_.size(); }
    void clear() { cache_.clear(); }
};

// One canonical form per node per thread: with interned nodes the cache keys
// are value identities, so repeated simplification of shared structure is a
// lookup. The reset on overflow only costs future reuse.
inline ExprPtr simplify(const ExprPtr& e) {
    static thread_local Simplifier s;
    if (s.cache_size() >= 4'000'000) s.clear();
    return s.run(e);
}

inline bool is_symbolically_zero(const ExprPtr& e) { return is_zero(simplify(e)); }

}  // namespace avp
