#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "avp/config.hpp"
#include "avp/forms.hpp"
#include "avp/theory.hpp"

namespace avp {

// Module operations on a theory and a concrete field configuration. Results
// carry config-resolved coefficients, ready for pointwise evaluation; the
// jet-level expressions stay available on the Theory itself.

namespace detail {

inline Tensor resolved(const FieldConfig& cfg, const Tensor& t) { return cfg.resolve(t); }

inline Tensor xi_of(const Theory& th, const Generator& gen) {
    return gen.xi.rank() == 1 ? gen.xi : Tensor({th.dim()});
}

}  // namespace detail

// <F | X> as an (m-1)-form
inline HorizontalForm pc_contract(const Theory& th, const FieldConfig& cfg, const Deformation& X,
                                  int view = 0) {
    return HorizontalForm::current(th.chart(), cfg.resolve(th.pc_contract(X, view)));
}

// E(L, Xi) = <F | lie_Xi y> - i_xi L
inline Tensor noether_current_jet(const Theory& th, const Generator& gen, int view = 0) {
    Tensor xi = detail::xi_of(th, gen);
    Tensor e = th.pc_contract(th.lie_drag(gen, view), view);
    Tensor il = interior_scalar(xi, th.lagrangian(view));
    for (std::size_t i = 0; i < e.size(); ++i)
        e.flat_at(i) = simplify(ex_sub(e.flat_at(i), il.flat_at(i)));
    return e;
}

inline HorizontalForm noether_current(const Theory& th, const FieldConfig& cfg,
                                      const Generator& gen, int view = 0) {
    return HorizontalForm::current(th.chart(), cfg.resolve(noether_current_jet(th, gen, view)));
}

// W(L, Xi) = -<E | lie_Xi y>
inline HorizontalForm work_form(const Theory& th, const FieldConfig& cfg, const Generator& gen,
                                int view = 0) {
    return HorizontalForm::top(th.chart(), cfg.resolve(th.work_density(gen, view)));
}

// left minus right of the covariance identity; vanishes off-shell for
// generators in the theory's admissible class
inline ExprPtr covariance_residual(const Theory& th, const FieldConfig& cfg, const Generator& gen,
                                   int view = 0) {
    return cfg.resolve(th.covariance_density(gen, view));
}

// exterior differential on coefficients; degree raised by one
inline HorizontalForm formal_divergence(const HorizontalForm& f) {
    const int m = f.chart.dim();
    if (f.degree == m - 1) return HorizontalForm::top(f.chart, divergence_vector(f.chart, f.coeff));
    if (f.degree == m - 2)
        return HorizontalForm::current(f.chart, divergence_bivector(f.chart, f.coeff));
    throw Error("formal_divergence: unsupported degree");
}

inline HorizontalForm formal_divergence(const HorizontalForm& f, const FieldConfig& cfg) {
    HorizontalForm d = formal_divergence(f);
    d.coeff = cfg.resolve(d.coeff);
    return d;
}

// closed-form U(L, Xi)
inline HorizontalForm superpotential(const Theory& th, const FieldConfig& cfg,
                                     const Generator& gen, int view = 0) {
    if (!th.has_superpotential())
        throw Error("theory '" + th.name() + "' has no registered superpotential");
    return HorizontalForm::surface(th.chart(), cfg.resolve(th.superpotential(gen, view)));
}

// Etilde(L, Xi), the reduced current of the split E = Etilde + Div U
inline HorizontalForm reduced_current(const Theory& th, const FieldConfig& cfg,
                                      const Generator& gen, int view = 0) {
    return HorizontalForm::current(th.chart(), cfg.resolve(th.reduced_current(gen, view)));
}

// B(L, Xi) = W(L, Xi) - Div Etilde(L, Xi); vanishes identically off-shell
inline ExprPtr bianchi_residual(const Theory& th, const FieldConfig& cfg, const Generator& gen,
                                int view = 0) {
    ExprPtr w = th.work_density(gen, view);
    ExprPtr div = divergence_vector(th.chart(), th.reduced_current(gen, view));
    return cfg.resolve(simplify(ex_sub(std::move(w), std::move(div))));
}

// Lie derivative of an (m-1)-form coefficient vector (a vector density):
// (lie_xi a)^l = xi^m d_m a^l - a^m d_m xi^l + a^l d_m xi^m
inline Tensor lie_vector_density(const Chart& ch, const Tensor& xi, const Tensor& a) {
    const int m = ch.dim();
    Tensor out({m});
    std::vector<ExprPtr> divxi;
    for (int mu = 0; mu < m; ++mu) divxi.push_back(dmu(ch, xi(mu), mu));
    ExprPtr trace = ex_add(std::move(divxi));
    for (int l = 0; l < m; ++l) {
        std::vector<ExprPtr> terms;
        for (int mu = 0; mu < m; ++mu) {
            terms.push_back(ex_mul2(xi(mu), dmu(ch, a(l), mu)));
            terms.push_back(ex_neg(ex_mul2(a(mu), dmu(ch, xi(l), mu))));
        }
        terms.push_back(ex_mul2(a(l), trace));
        out(l) = simplify(ex_add(std::move(terms)));
    }
    return out;
}

// omega(X, lie_Xi y) = delta_X <F | lie_Xi> - lie_xi <F | X>
inline HorizontalForm symplectic_form(const Theory& th, const FieldConfig& cfg,
                                      const Deformation& X, const Generator& gen, int view = 0) {
    if (!gen.is_field_free(th.context()))
        throw Error("symplectic_form requires a field-independent generator");
    const Chart& ch = th.chart();
    Tensor first = vertical_derivative(th.context(), th.pc_contract(th.lie_drag(gen, view), view),
                                       th.context_keys(X, view));
    Tensor second = lie_vector_density(ch, detail::xi_of(th, gen), th.pc_contract(X, view));
    for (std::size_t i = 0; i < first.size(); ++i)
        first.flat_at(i) = simplify(ex_sub(first.flat_at(i), second.flat_at(i)));
    return HorizontalForm::current(ch, cfg.resolve(first));
}

// delta_X Q(L, Xi) = delta_X U(L, Xi) - i_xi <F | X>
inline Tensor corrected_variation_jet(const Theory& th, const Deformation& X, const Generator& gen,
                                      int view = 0) {
    if (!th.has_superpotential())
        throw Error("theory '" + th.name() + "' has no registered superpotential");
    Tensor du = vertical_derivative(th.context(), th.superpotential(gen, view),
                                    th.context_keys(X, view));
    Tensor ix = interior_vector(detail::xi_of(th, gen), th.pc_contract(X, view));
    for (std::size_t i = 0; i < du.size(); ++i)
        du.flat_at(i) = simplify(ex_sub(du.flat_at(i), ix.flat_at(i)));
    return du;
}

inline HorizontalForm corrected_variation(const Theory& th, const FieldConfig& cfg,
                                          const Deformation& X, const Generator& gen,
                                          int view = 0) {
    return HorizontalForm::surface(th.chart(),
                                   cfg.resolve(corrected_variation_jet(th, X, gen, view)));
}

// L' = L + Div beta for a fixed (m-1)-form constructor beta of the fields.
// Theta picks up delta_X beta and U picks up i_xi beta; the reduced current
// is recomputed from the deformed split (beta need not be natural, so the
// base Etilde is not reusable). Shares the base theory's jet context.
class DivergenceDeformedTheory : public Theory {
  public:
    using BetaBuilder = std::function<Tensor(const Theory&, int view)>;

    DivergenceDeformedTheory(TheoryPtr base, BetaBuilder beta)
        : Theory(base->name() + "+div", "divergence deformation of " + base->name(),
                 base->order(), base->context(), base->fields(), base->mechanics()),
          base_(std::move(base)),
          beta_(std::move(beta)) {}

    Tensor beta(int view = 0) const { return beta_(*base_, view); }

    Tensor pc_contract(const Deformation& X, int view = 0) const override {
        Tensor t = base_->pc_contract(X, view);
        Tensor db = vertical_derivative(context(), beta(view), context_keys(X, view));
        for (std::size_t i = 0; i < t.size(); ++i)
            t.flat_at(i) = simplify(ex_add2(t.flat_at(i), db.flat_at(i)));
        return t;
    }

    Tensor superpotential(const Generator& gen, int view = 0) const override {
        Tensor u = base_->superpotential(gen, view);
        Tensor ib = interior_vector(detail::xi_of(*this, gen), beta(view));
        for (std::size_t i = 0; i < u.size(); ++i)
            u.flat_at(i) = simplify(ex_add2(u.flat_at(i), ib.flat_at(i)));
        return u;
    }

    Tensor reduced_current(const Generator& gen, int view = 0) const override {
        Tensor e = noether_current_jet(*this, gen, view);
        Tensor div = divergence_bivector(chart(), superpotential(gen, view));
        for (std::size_t i = 0; i < e.size(); ++i)
            e.flat_at(i) = simplify(ex_sub(e.flat_at(i), div.flat_at(i)));
        return e;
    }

    Tensor alpha(AlphaMode mode = AlphaMode::Canonical) const override {
        return base_->alpha(mode);
    }

    GeneratorClass generator_class() const override { return base_->generator_class(); }

  protected:
    ExprPtr build_lagrangian(int view) const override {
        return ex_add2(base_->lagrangian(view), divergence_vector(chart(), beta(view)));
    }

  private:
    TheoryPtr base_;
    BetaBuilder beta_;
};

}  // namespace avp
