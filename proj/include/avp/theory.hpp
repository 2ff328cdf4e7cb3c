#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "avp/config.hpp"
#include "avp/forms.hpp"
#include "avp/gauge.hpp"
#include "avp/geometry.hpp"
#include "avp/jet.hpp"

namespace avp {

// Vertical deformation X = delta y^i: per-field component expressions.
// Components may reference jet symbols (a Lie drag is itself a deformation).
using Deformation = std::map<std::string, Tensor>;

// Xi = xi^mu d_mu + xi^A rho_A. Vertical parts are keyed by the gauge field
// they act on and shaped like that field's algebra slot.
struct Generator {
    Tensor xi;
    std::map<std::string, Tensor> vertical;

    bool horizontal_only() const { return vertical.empty(); }
    bool is_field_free(const JetContextPtr& ctx) const {
        auto clean = [&](const Tensor& t) {
            for (std::size_t i = 0; i < t.size(); ++i) {
                std::vector<SymbolPtr> syms;
                collect_symbols(t.flat_at(i), syms);
                for (const auto& s : syms)
                    if (ctx->key_of(s.get())) return false;
            }
            return true;
        };
        if (xi.rank() == 1 && !clean(xi)) return false;
        for (const auto& [name, v] : vertical)
            if (!clean(v)) return false;
        return true;
    }
};

// Which generators a theory's covariance identity is valid for. Local
// Lagrangians only transform under maps preserving their chart patch.
enum class GeneratorClass {
    Any,                            // arbitrary xi(x) and vertical parts
    Affine,                         // xi = c + L x, no vertical part
    HorizontalAndConstantVertical,  // arbitrary xi(x), constant vertical
    ConstantHorizontal,             // constant xi only (mechanics time shift)
};

enum class AlphaMode { Canonical, Matched };

// Horizontal p-form on the interior-product bases of forms.hpp:
// degree m <-> L ds, degree m-1 <-> a^l ds_l, degree m-2 <-> U^{mn} ds_{mn}.
struct HorizontalForm {
    Chart chart;
    int degree = 0;
    Tensor coeff;

    static HorizontalForm top(const Chart& ch, ExprPtr L) {
        HorizontalForm f{ch, ch.dim(), Tensor(std::vector<int>{})};
        f.coeff.flat_at(0) = std::move(L);
        return f;
    }
    static HorizontalForm current(const Chart& ch, Tensor a) {
        if (a.dims() != std::vector<int>{ch.dim()}) throw Error("current coefficient shape");
        return {ch, ch.dim() - 1, std::move(a)};
    }
    static HorizontalForm surface(const Chart& ch, Tensor U) {
        if (U.dims() != std::vector<int>{ch.dim(), ch.dim()})
            throw Error("surface coefficient shape");
        return {ch, ch.dim() - 2, std::move(U)};
    }

    ExprPtr scalar() const {
        if (degree != chart.dim()) throw Error("not a top form");
        return coeff.flat_at(0);
    }
};

// d/ds F(y + sX)|_0 with the partials of F precomputed once; contracting
// against many deformations then reuses them. Symmetric components carry a
// single interned symbol for both slot orders, so pairing the canonical
// component of a symmetric X accounts for the multiplicity by itself.
class VerticalPartials {
  public:
    VerticalPartials() = default;
    VerticalPartials(JetContextPtr ctx, ExprPtr F) : ctx_(std::move(ctx)), expr_(std::move(F)) {
        std::vector<SymbolPtr> syms;
        collect_symbols(expr_, syms);
        for (const auto& s : syms) {
            const auto* key = ctx_->key_of(s.get());
            if (!key) continue;
            ExprPtr p = diff(expr_, s);
            if (is_zero(p)) continue;
            parts_.emplace_back(*key, std::move(p));
        }
    }

    const ExprPtr& expr() const { return expr_; }

    ExprPtr contract(const Deformation& X) const {
        std::vector<ExprPtr> terms;
        for (const auto& [key, partial] : parts_) {
            auto it = X.find(ctx_->fields()[key.field].name);
            if (it == X.end()) continue;
            ExprPtr xc = it->second[key.comp];
            if (is_zero(xc)) continue;
            for (int mu : key.derivs) xc = dmu(ctx_->chart(), xc, mu);
            terms.push_back(ex_mul2(partial, std::move(xc)));
        }
        return simplify(ex_add(std::move(terms)));
    }

  private:
    JetContextPtr ctx_;
    ExprPtr expr_;
    std::vector<std::pair<JetContext::JetKey, ExprPtr>> parts_;
};

inline ExprPtr vertical_derivative(const JetContextPtr& ctx, const ExprPtr& F,
                                   const Deformation& X) {
    return VerticalPartials(ctx, F).contract(X);
}

inline Tensor vertical_derivative(const JetContextPtr& ctx, const Tensor& t,
                                  const Deformation& X) {
    Tensor out(t.dims());
    for (std::size_t i = 0; i < t.size(); ++i)
        out.flat_at(i) = vertical_derivative(ctx, t.flat_at(i), X);
    return out;
}

// Tensorial Euler-Lagrange expressions of L with respect to one field:
// sum over the derivative multi-indices D present in L of
// (-1)^{|D|} d_D(dL/dy^i_D), with the shared symbol of a symmetric pair
// split evenly between the two mirrored slots.
inline Tensor euler_lagrange_tensor(const JetContextPtr& ctx, const ExprPtr& L, int field) {
    const FieldSpec& fs = ctx->fields()[field];
    const Chart& ch = ctx->chart();
    std::vector<SymbolPtr> syms;
    collect_symbols(L, syms);
    std::map<std::vector<int>, std::vector<JetContext::JetKey>> by_comp;
    for (const auto& s : syms) {
        const auto* key = ctx->key_of(s.get());
        if (key && key->field == field) by_comp[key->comp].push_back(*key);
    }
    Tensor el(fs.dims);
    for (const auto& [comp, keys] : by_comp) {
        std::vector<ExprPtr> terms;
        for (const auto& key : keys) {
            ExprPtr p = diff(L, ctx->jet(field, key.comp, key.derivs));
            for (int mu : key.derivs) p = dmu(ch, p, mu);
            terms.push_back(key.derivs.size() % 2 ? ex_neg(std::move(p)) : std::move(p));
        }
        ExprPtr v = simplify(ex_add(std::move(terms)));
        std::vector<int> mirror = comp;
        bool off_diagonal = false;
        if (fs.sym == IndexSym::FirstTwo && comp.size() >= 2 && comp[0] != comp[1]) {
            std::swap(mirror[0], mirror[1]);
            off_diagonal = true;
        } else if (fs.sym == IndexSym::LastTwo && comp.size() >= 2 &&
                   comp[comp.size() - 2] != comp[comp.size() - 1]) {
            std::swap(mirror[mirror.size() - 2], mirror[mirror.size() - 1]);
            off_diagonal = true;
        }
        if (off_diagonal) {
            v = simplify(ex_mul2(ex_num(Rational{1, 2}), v));
            el[mirror] = v;
        }
        el[comp] = v;
    }
    return el;
}

// Full contraction sum_i E_i X^i over all slots of all fields.
inline ExprPtr contract_deformation(const std::map<std::string, Tensor>& per_field,
                                    const Deformation& X) {
    std::vector<ExprPtr> terms;
    for (const auto& [name, t] : per_field) {
        auto it = X.find(name);
        if (it == X.end()) continue;
        if (it->second.dims() != t.dims()) throw Error("deformation shape mismatch");
        for (std::size_t i = 0; i < t.size(); ++i)
            terms.push_back(ex_mul2(t.flat_at(i), it->second.flat_at(i)));
    }
    return simplify(ex_add(std::move(terms)));
}

// First-order boundary morphism Theta^mu(X) = dL/dy^i_mu X^i, for use when
// L depends on first derivatives only.
inline Tensor theta_first_order(const JetContextPtr& ctx, const ExprPtr& L,
                                const Deformation& X) {
    const Chart& ch = ctx->chart();
    const int m = ch.dim();
    std::vector<SymbolPtr> syms;
    collect_symbols(L, syms);
    std::vector<std::vector<ExprPtr>> terms(m);
    for (const auto& s : syms) {
        const auto* key = ctx->key_of(s.get());
        if (!key || key->derivs.size() != 1) continue;
        auto it = X.find(ctx->fields()[key->field].name);
        if (it == X.end()) continue;
        ExprPtr xc = it->second[key->comp];
        if (is_zero(xc)) continue;
        terms[key->derivs[0]].push_back(ex_mul2(diff(L, s), std::move(xc)));
    }
    Tensor theta({m});
    for (int mu = 0; mu < m; ++mu) theta(mu) = simplify(ex_add(std::move(terms[mu])));
    return theta;
}

// One dynamical field of a theory. Every field gets a vacuum twin named
// `<name>_bar` in the same jet context; formulas are built once per view.
struct TheoryField {
    enum class Kind { Metric, Connection, Gauge, Scalar };
    std::string name;
    FieldSpec spec;
    Kind kind = Kind::Metric;
    GaugeAlgebra algebra;  // Gauge only
};

class Theory {
  public:
    static constexpr int kViews = 2;  // 0: physical y, 1: vacuum ybar

    virtual ~Theory() = default;

    const std::string& name() const { return name_; }
    const std::string& description() const { return description_; }
    int order() const { return order_; }
    bool mechanics() const { return mechanics_; }
    const Chart& chart() const { return ctx_->chart(); }
    int dim() const { return ctx_->dim(); }
    const JetContextPtr& context() const { return ctx_; }
    const std::vector<TheoryField>& fields() const { return fields_; }

    const TheoryField& field(const std::string& name) const {
        for (const auto& f : fields_)
            if (f.name == name) return f;
        throw Error("theory '" + name_ + "' has no field '" + name + "'");
    }

    // 0-jet component tensor of a field on one view
    Tensor base(const std::string& name, int view = 0) const {
        field(name);
        const int fi = ctx_->field_index(view == 0 ? name : name + "_bar");
        return ctx_->base_tensor(fi);
    }

    const ExprPtr& lagrangian(int view = 0) const {
        std::scoped_lock lk(mu_);
        return lag_locked(view);
    }

    // tensorial EL morphism w.r.t. one field (cached per view)
    const Tensor& euler_lagrange(const std::string& fname, int view = 0) const {
        field(fname);
        std::scoped_lock lk(mu_);
        auto key = std::make_pair(check_view(view), fname);
        auto it = el_.find(key);
        if (it == el_.end()) {
            const int fi = ctx_->field_index(view == 0 ? fname : fname + "_bar");
            it = el_.emplace(key, euler_lagrange_tensor(ctx_, lag_locked(view), fi)).first;
        }
        return it->second;
    }

    // partials of the Lagrangian w.r.t. every jet symbol (cached per view)
    const VerticalPartials& lagrangian_partials(int view = 0) const {
        std::scoped_lock lk(mu_);
        auto& slot = partials_[check_view(view)];
        if (!slot) slot.emplace(ctx_, lag_locked(view));
        return *slot;
    }

    // first-variation momenta dL/dy^i_D for |D| in {1, 2}, per field
    std::map<std::string, std::vector<std::pair<JetContext::JetKey, ExprPtr>>> momenta(
        int view = 0) const {
        const ExprPtr& L = lagrangian(view);
        std::vector<SymbolPtr> syms;
        collect_symbols(L, syms);
        std::map<std::string, std::vector<std::pair<JetContext::JetKey, ExprPtr>>> out;
        for (const auto& s : syms) {
            const auto* key = ctx_->key_of(s.get());
            if (!key || key->derivs.empty()) continue;
            ExprPtr p = simplify(diff(L, s));
            if (is_zero(p)) continue;
            std::string logical = ctx_->fields()[key->field].name;
            if (logical.size() > 4 && logical.substr(logical.size() - 4) == "_bar")
                logical = logical.substr(0, logical.size() - 4);
            out[logical].emplace_back(*key, std::move(p));
        }
        return out;
    }

    // Deformations are keyed by logical field names; jet symbols of view 1
    // belong to the bar twins. Rename before pairing against jet symbols.
    Deformation context_keys(const Deformation& X, int view) const {
        if (check_view(view) == 0) return X;
        Deformation out;
        for (const auto& [k, v] : X) out[k + "_bar"] = v;
        return out;
    }

    // Lie drag of every field along Xi (role dispatch)
    Deformation lie_drag(const Generator& gen, int view = 0) const {
        const Chart& ch = ctx_->chart();
        Tensor xi = gen.xi.rank() == 1 ? gen.xi : Tensor({ch.dim()});
        Deformation out;
        for (const auto& f : fields_) {
            Tensor b = base(f.name, view);
            switch (f.kind) {
                case TheoryField::Kind::Metric: out[f.name] = lie_metric(ch, xi, b); break;
                case TheoryField::Kind::Connection:
                    out[f.name] = lie_connection(ch, xi, b);
                    break;
                case TheoryField::Kind::Gauge: {
                    auto it = gen.vertical.find(f.name);
                    Tensor vert = it != gen.vertical.end()
                                      ? it->second
                                      : Tensor(f.spec.dims.size() == 1
                                                   ? std::vector<int>{}
                                                   : std::vector<int>{f.algebra.dim});
                    out[f.name] = lie_gauge_potential(ch, f.algebra, b, xi, vert);
                    break;
                }
                case TheoryField::Kind::Scalar: {
                    Tensor l((std::vector<int>{}));
                    std::vector<ExprPtr> terms;
                    for (int mu = 0; mu < ch.dim(); ++mu)
                        terms.push_back(ex_mul2(xi(mu), dmu(ch, b.flat_at(0), mu)));
                    l.flat_at(0) = simplify(ex_add(std::move(terms)));
                    out[f.name] = std::move(l);
                    break;
                }
            }
        }
        return out;
    }

    // W(L, Xi) = -<E | lie_Xi y> as a density
    ExprPtr work_density(const Generator& gen, int view = 0) const {
        Deformation lie = lie_drag(gen, view);
        std::map<std::string, Tensor> el;
        for (const auto& f : fields_) el[f.name] = euler_lagrange(f.name, view);
        return simplify(ex_neg(contract_deformation(el, lie)));
    }

    // left side minus right side of the covariance identity,
    // delta_{lie y} L - d_mu(xi^mu L); Theta-independent form
    ExprPtr covariance_density(const Generator& gen, int view = 0) const {
        const Chart& ch = ctx_->chart();
        Tensor xi = gen.xi.rank() == 1 ? gen.xi : Tensor({ch.dim()});
        ExprPtr lhs = lagrangian_partials(view).contract(context_keys(lie_drag(gen, view), view));
        std::vector<ExprPtr> rhs;
        for (int mu = 0; mu < ch.dim(); ++mu)
            rhs.push_back(dmu(ch, ex_mul2(xi(mu), lagrangian(view)), mu));
        return simplify(ex_sub(lhs, ex_add(std::move(rhs))));
    }

    // boundary morphism contraction <F | X>: coefficients of an (m-1)-form
    virtual Tensor pc_contract(const Deformation& X, int view = 0) const = 0;

    virtual bool has_superpotential() const { return ctx_->dim() >= 2; }
    // closed-form U(L, Xi): coefficients of an (m-2)-form, antisymmetric
    virtual Tensor superpotential(const Generator& gen, int view = 0) const = 0;
    // reduced current Etilde(L, Xi): coefficients of an (m-1)-form
    virtual Tensor reduced_current(const Generator& gen, int view = 0) const = 0;

    virtual bool has_alpha() const { return true; }
    // correction term alpha(j y, j ybar): (m-1)-form coefficients
    virtual Tensor alpha(AlphaMode mode = AlphaMode::Canonical) const = 0;

    virtual GeneratorClass generator_class() const { return GeneratorClass::Any; }

  protected:
    Theory(std::string name, std::string description, int order, Chart chart,
           std::vector<TheoryField> fields, bool mechanics = false)
        : name_(std::move(name)),
          description_(std::move(description)),
          order_(order),
          mechanics_(mechanics),
          fields_(std::move(fields)) {
        std::vector<FieldSpec> specs;
        for (const auto& f : fields_) {
            FieldSpec s = f.spec;
            s.name = f.name;
            specs.push_back(s);
        }
        for (const auto& f : fields_) {
            FieldSpec s = f.spec;
            s.name = f.name + "_bar";
            specs.push_back(s);
        }
        ctx_ = JetContext::make(std::move(chart), std::move(specs));
    }

    // wrapper constructor: reuse an existing context whose fields (and bar
    // twins) are already interned
    Theory(std::string name, std::string description, int order, JetContextPtr ctx,
           std::vector<TheoryField> fields, bool mechanics = false)
        : ctx_(std::move(ctx)),
          name_(std::move(name)),
          description_(std::move(description)),
          order_(order),
          mechanics_(mechanics),
          fields_(std::move(fields)) {
        for (const auto& f : fields_)
            if (ctx_->field_index(f.name) < 0 || ctx_->field_index(f.name + "_bar") < 0)
                throw Error("shared context lacks field '" + f.name + "'");
    }

    virtual ExprPtr build_lagrangian(int view) const = 0;

    int check_view(int view) const {
        if (view < 0 || view >= kViews) throw Error("bad view index");
        return view;
    }

    // requires mu_ held
    const ExprPtr& lag_locked(int view) const {
        auto& slot = lag_[check_view(view)];
        if (!slot) slot = simplify(build_lagrangian(view));
        return *slot;
    }

    JetContextPtr ctx_;

  private:
    std::string name_;
    std::string description_;
    int order_ = 1;
    bool mechanics_ = false;
    std::vector<TheoryField> fields_;

    mutable std::mutex mu_;
    mutable std::array<std::optional<ExprPtr>, kViews> lag_;
    mutable std::array<std::optional<VerticalPartials>, kViews> partials_;
    mutable std::map<std::pair<int, std::string>, Tensor> el_;
};

using TheoryPtr = std::shared_ptr<const Theory>;

}  // namespace avp
