#pragma once

#include "avp/theories/common.hpp"

namespace avp::theories {

// L = sqrt(g) R for a Lorentzian metric, second order.
//   Theta: <F | X> = sqrt(g) g^{ab} delta_X u^l_{(ab)} ds_l
//   U(L, xi) = -(sqrt(g)/2)(nabla^m xi^n - nabla^n xi^m) ds_{mn}   (Komar)
//   Etilde  = 2 sqrt(g) G^m_s xi^s ds_m
//   alpha   = -sqrt(g) g^{ab} w^l_{(ab)} ds_l, w = u - ubar; the canonical
//             weighting uses the vacuum metric, the matched one the dynamical.
class HilbertTheory final : public Theory {
  public:
    explicit HilbertTheory(Chart ch = default_gravity_chart())
        : Theory("hilbert", "metric gravity, scalar curvature density", 2, ch,
                 {metric_field(ch.dim())}) {}

    const MetricGeo& geo(int view) const {
        return geo_.get(view, [&](int v) {
            return build_metric_geo(chart(), base("g", v), GeoLevel::Curvature);
        });
    }

    Tensor pc_contract(const Deformation& X, int view = 0) const override {
        const MetricGeo& G = geo(view);
        const int m = dim();
        Tensor du = vertical_derivative(ctx_, G.u, context_keys(X, view));
        Tensor theta({m});
        for (int l = 0; l < m; ++l) {
            std::vector<ExprPtr> terms;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) terms.push_back(ex_mul2(G.gdens(a, b), du(l, a, b)));
            theta(l) = simplify(ex_add(std::move(terms)));
        }
        return theta;
    }

    Tensor superpotential(const Generator& gen, int view = 0) const override {
        const MetricGeo& G = geo(view);
        const int m = dim();
        Tensor nab = cov_deriv_vector(chart(), G.gamma, gen.xi);  // [l][mu]
        Tensor U({m, m});
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                std::vector<ExprPtr> terms;
                for (int s = 0; s < m; ++s) {
                    terms.push_back(ex_mul2(G.ginv(a, s), nab(b, s)));
                    terms.push_back(ex_neg(ex_mul2(G.ginv(b, s), nab(a, s))));
                }
                ExprPtr v = simplify(ex_mul2(ex_mul2(ex_num(Rational{-1, 2}), G.sqrtg),
                                             ex_add(std::move(terms))));
                U(a, b) = v;
                U(b, a) = ex_neg(v);
            }
        return U;
    }

    Tensor reduced_current(const Generator& gen, int view = 0) const override {
        const MetricGeo& G = geo(view);
        const int m = dim();
        Tensor e({m});
        for (int a = 0; a < m; ++a) {
            std::vector<ExprPtr> terms;
            for (int s = 0; s < m; ++s)
                terms.push_back(ex_mul2(G.einmix(a, s), gen.xi(s)));
            e(a) = simplify(ex_mul2(ex_mul2(ex_num(2), G.sqrtg), ex_add(std::move(terms))));
        }
        return e;
    }

    Tensor alpha(AlphaMode mode = AlphaMode::Canonical) const override {
        const MetricGeo& dyn = geo(0);
        const MetricGeo& vac = geo(1);
        const Tensor& weight = mode == AlphaMode::Matched ? dyn.gdens : vac.gdens;
        const int m = dim();
        Tensor a({m});
        for (int l = 0; l < m; ++l) {
            std::vector<ExprPtr> terms;
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q)
                    terms.push_back(
                        ex_mul2(weight(p, q), ex_sub(dyn.u(l, p, q), vac.u(l, p, q))));
            a(l) = simplify(ex_neg(ex_add(std::move(terms))));
        }
        return a;
    }

  protected:
    ExprPtr build_lagrangian(int view) const override {
        const MetricGeo& G = geo(view);
        return ex_mul2(G.sqrtg, G.scal);
    }

  private:
    ViewCache<MetricGeo> geo_;
};

}  // namespace avp::theories
