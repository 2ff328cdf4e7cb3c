#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avp/jet.hpp"
#include "avp/simplify.hpp"
#include "avp/tensor.hpp"

namespace avp {

// Concrete configuration: fields of a jet context assigned tensors of
// coordinate expressions. Jet symbols resolve on demand to derivatives of
// the assigned components; each derivative is computed once per jet key and
// the substituter memoizes per expression node, so sweeping many points over
// one expression does the symbolic work a single time.
class FieldConfig {
  public:
    explicit FieldConfig(JetContextPtr ctx) : ctx_(std::move(ctx)) { reset_subst(); }

    FieldConfig(const FieldConfig&) = delete;
    FieldConfig& operator=(const FieldConfig&) = delete;

    const JetContextPtr& context() const { return ctx_; }
    const Chart& chart() const { return ctx_->chart(); }

    void assign(const std::string& field, Tensor values) {
        const int fi = ctx_->field_index(field);
        if (fi < 0) throw Error("unknown field '" + field + "'");
        if (values.dims() != ctx_->fields()[fi].dims)
            throw Error("component shape mismatch for field '" + field + "'");
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::vector<SymbolPtr> syms;
            collect_symbols(values.flat_at(i), syms);
            for (const auto& s : syms)
                if (s->kind != SymKind::Coordinate && s->kind != SymKind::Parameter)
                    throw Error("assigned components must be coordinate expressions (field '" +
                                field + "' uses '" + s->name + "')");
        }
        assigned_[fi] = std::move(values);
        deriv_cache_.clear();
        reset_subst();
    }

    bool assigned(const std::string& field) const {
        const int fi = ctx_->field_index(field);
        return fi >= 0 && assigned_.count(fi);
    }

    void set_param(const SymbolPtr& p, double v) { params_[p.get()] = v; }
    const Binding& params() const { return params_; }

    // splice assigned component derivatives over every jet symbol
    ExprPtr resolve(const ExprPtr& e) const { return subst_->run(e); }
    Tensor resolve(const Tensor& t) const {
        Tensor out(t.dims());
        for (std::size_t i = 0; i < t.size(); ++i) out.flat_at(i) = subst_->run(t.flat_at(i));
        return out;
    }

    double eval_at(const ExprPtr& e, const std::vector<double>& x) const {
        return eval(resolve(e), binding_at(x));
    }

    Binding binding_at(const std::vector<double>& x) const {
        Binding b = params_;
        const Chart& ch = ctx_->chart();
        if (static_cast<int>(x.size()) != ch.dim()) throw Error("point dimension mismatch");
        for (int i = 0; i < ch.dim(); ++i) b[ch.coords[i].get()] = x[i];
        return b;
    }

  private:
    void reset_subst() {
        subst_.emplace([this](const SymbolPtr& s) { return resolve_symbol(s); });
    }

    std::optional<ExprPtr> resolve_symbol(const SymbolPtr& s) const {
        const auto* key = ctx_->key_of(s.get());
        if (!key) return std::nullopt;
        return resolve_key(*key);
    }

    ExprPtr resolve_key(const JetContext::JetKey& k) const {
        auto it = deriv_cache_.find(k);
        if (it != deriv_cache_.end()) return it->second;
        ExprPtr v;
        if (k.derivs.empty()) {
            auto a = assigned_.find(k.field);
            if (a == assigned_.end())
                throw Error("field '" + ctx_->fields()[k.field].name + "' has no assignment");
            v = a->second[k.comp];
        } else {
            JetContext::JetKey parent = k;
            const int mu = parent.derivs.back();
            parent.derivs.pop_back();
            v = simplify(diff(resolve_key(parent), ctx_->chart().coords[mu]));
        }
        deriv_cache_.emplace(k, v);
        return v;
    }

    JetContextPtr ctx_;
    std::map<int, Tensor> assigned_;
    mutable std::map<JetContext::JetKey, ExprPtr> deriv_cache_;
    Binding params_;
    mutable std::optional<Substituter> subst_;
};

}  // namespace avp
