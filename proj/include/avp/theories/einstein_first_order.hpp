#pragma once

#include "avp/theories/common.hpp"

namespace avp::theories {

// The first order Einstein Lagrangian: sqrt(g) R minus the divergence of
// A^l = sqrt(g) g^{ab} u^l_{ab}, which removes all second derivatives at the
// price of covariance. Only generators affine in the chart coordinates
// preserve it, so the entry is flagged accordingly.
//   Theta: <F | X> = -delta_X(sqrt(g) g^{ab}) u^l_{ab} ds_l
//   U(L, xi) = U_Komar + (1/2)(xi^m A^n - xi^n A^m) ds_{mn}
//   Etilde  = 2 sqrt(g) G^m_s xi^s ds_m        (shared with the second order form)
//   alpha^l = (sqrt(g) g^{ab} - sqrt(gbar) gbar^{ab}) uref^l_{ab}, uref = ubar
//             (canonical, as printed) or u (matched)
class EinsteinFirstOrderTheory final : public Theory {
  public:
    explicit EinsteinFirstOrderTheory(Chart ch = default_gravity_chart())
        : Theory("einstein_first_order", "first order metric gravity, patch local", 1, ch,
                 {metric_field(ch.dim())}) {}

    struct Geo {
        MetricGeo m;
        Tensor A;  // sqrt(g) g^{ab} u^l_{ab}
    };

    const Geo& geo(int view) const {
        return geo_.get(view, [&](int v) {
            Geo G{build_metric_geo(chart(), base("g", v), GeoLevel::Curvature), Tensor({dim()})};
            for (int l = 0; l < dim(); ++l) {
                std::vector<ExprPtr> terms;
                for (int a = 0; a < dim(); ++a)
                    for (int b = 0; b < dim(); ++b)
                        terms.push_back(ex_mul2(G.m.gdens(a, b), G.m.u(l, a, b)));
                G.A(l) = simplify(ex_add(std::move(terms)));
            }
            return G;
        });
    }

    Tensor pc_contract(const Deformation& X, int view = 0) const override {
        const Geo& G = geo(view);
        const int m = dim();
        Tensor dd = vertical_derivative(ctx_, G.m.gdens, context_keys(X, view));
        Tensor theta({m});
        for (int l = 0; l < m; ++l) {
            std::vector<ExprPtr> terms;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    terms.push_back(ex_mul2(dd(a, b), G.m.u(l, a, b)));
            theta(l) = simplify(ex_neg(ex_add(std::move(terms))));
        }
        return theta;
    }

    Tensor superpotential(const Generator& gen, int view = 0) const override {
        const Geo& G = geo(view);
        const int m = dim();
        Tensor nab = cov_deriv_vector(chart(), G.m.gamma, gen.xi);
        Tensor U({m, m});
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                std::vector<ExprPtr> komar;
                for (int s = 0; s < m; ++s) {
                    komar.push_back(ex_mul2(G.m.ginv(a, s), nab(b, s)));
                    komar.push_back(ex_neg(ex_mul2(G.m.ginv(b, s), nab(a, s))));
                }
                ExprPtr v = ex_add2(
                    ex_mul2(ex_mul2(ex_num(Rational{-1, 2}), G.m.sqrtg),
                            ex_add(std::move(komar))),
                    ex_mul2(ex_num(Rational{1, 2}),
                            ex_sub(ex_mul2(gen.xi(a), G.A(b)), ex_mul2(gen.xi(b), G.A(a)))));
                v = simplify(v);
                U(a, b) = v;
                U(b, a) = ex_neg(v);
            }
        return U;
    }

    Tensor reduced_current(const Generator& gen, int view = 0) const override {
        const Geo& G = geo(view);
        const int m = dim();
        Tensor e({m});
        for (int a = 0; a < m; ++a) {
            std::vector<ExprPtr> terms;
            for (int s = 0; s < m; ++s) terms.push_back(ex_mul2(G.m.einmix(a, s), gen.xi(s)));
            e(a) = simplify(ex_mul2(ex_mul2(ex_num(2), G.m.sqrtg), ex_add(std::move(terms))));
        }
        return e;
    }

    Tensor alpha(AlphaMode mode = AlphaMode::Canonical) const override {
        const Geo& dyn = geo(0);
        const Geo& vac = geo(1);
        const Tensor& uref = mode == AlphaMode::Canonical ? vac.m.u : dyn.m.u;
        const int m = dim();
        Tensor a({m});
        for (int l = 0; l < m; ++l) {
            std::vector<ExprPtr> terms;
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q)
                    terms.push_back(ex_mul2(ex_sub(dyn.m.gdens(p, q), vac.m.gdens(p, q)),
                                            uref(l, p, q)));
            a(l) = simplify(ex_add(std::move(terms)));
        }
        return a;
    }

    GeneratorClass generator_class() const override { return GeneratorClass::Affine; }

  protected:
    ExprPtr build_lagrangian(int view) const override {
        const Geo& G = geo(view);
        const Chart& ch = chart();
        const int m = dim();
        std::vector<ExprPtr> terms;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                for (int l = 0; l < m; ++l) {
                    terms.push_back(
                        ex_neg(ex_mul2(dmu(ch, G.m.gdens(a, b), l), G.m.gamma(l, a, b))));
                    terms.push_back(ex_mul2(dmu(ch, G.m.gdens(a, b), b), G.m.gamma(l, a, l)));
                    for (int r = 0; r < m; ++r) {
                        terms.push_back(ex_mul2(G.m.gdens(a, b),
                                                ex_mul2(G.m.gamma(l, r, l), G.m.gamma(r, a, b))));
                        terms.push_back(ex_neg(ex_mul2(
                            G.m.gdens(a, b), ex_mul2(G.m.gamma(l, r, b), G.m.gamma(r, a, l)))));
                    }
                }
            }
        return ex_add(std::move(terms));
    }

  private:
    ViewCache<Geo> geo_;
};

}  // namespace avp::theories
