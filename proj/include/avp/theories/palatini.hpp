#pragma once

#include "avp/theories/common.hpp"

namespace avp::theories {

// L = sqrt(g) g^{ab} R_(ab)(Gamma), first order in an independent torsionless
// connection; the metric enters algebraically. Writing gd^{ab} = sqrt(g) g^{ab}
// and u^l_{ab} = Gamma^l_{ab} - delta^l_a Gamma_b (unsymmetrized):
//   Theta: <F | X> = gd^{ab} delta u^l_{ab} ds_l
//   U(L, xi) = -(1/2)(gd^{bm} D_b xi^n - gd^{bn} D_b xi^m) ds_{mn}
//   Etilde^l = xi^s (gd^{ab} R^l_{bsa} + gd^{lb} R_{bs}) - xi^l gd^{ab} R_{ab}
//              + (D_n gd^{bl}) D_b xi^n - (D_n gd^{bn}) D_b xi^l
//   alpha^l  = -gd_weight^{ab} (u - ubar)^l_{ab}, weight from the vacuum
//              (canonical) or the dynamical fields (matched)
// with D and the curvatures built from the independent connection.
class PalatiniTheory final : public Theory {
  public:
    explicit PalatiniTheory(Chart ch = default_gravity_chart())
        : Theory("palatini", "metric and independent torsionless connection", 1, ch,
                 {metric_field(ch.dim()), connection_field(ch.dim())}) {}

    struct Geo {
        ExprPtr sqrtg;
        Tensor ginv;
        Tensor gdens;
        Tensor gamma;
        Tensor u;      // unsymmetrized
        Tensor riem;   // of the independent connection
        Tensor ric;    // not symmetric in general
        Tensor ddens;  // D_n gdens^{bl}, [b][l][n]
    };

    const Geo& geo(int view) const {
        return geo_.get(view, [&](int v) {
            const Chart& ch = chart();
            const int m = dim();
            Geo G;
            Tensor g = base("g", v);
            G.sqrtg = ex_sqrt(ex_neg(det_metric(g)));
            G.ginv = inverse_metric(g);
            G.gdens = Tensor({m, m});
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    G.gdens(a, b) = simplify(ex_mul2(G.sqrtg, G.ginv(a, b)));
            G.gamma = base("Gamma", v);
            G.u = u_tensor(G.gamma, /*symmetrized=*/false);
            G.riem = riemann(ch, G.gamma);
            G.ric = ricci_from_riemann(G.riem);
            G.ddens = cov_deriv_density2(ch, G.gamma, G.gdens);
            return G;
        });
    }

    Tensor pc_contract(const Deformation& X, int view = 0) const override {
        const Geo& G = geo(view);
        const int m = dim();
        Tensor theta({m});
        auto it = X.find("Gamma");
        if (it == X.end()) return theta;
        const Tensor& xg = it->second;
        for (int l = 0; l < m; ++l) {
            std::vector<ExprPtr> terms;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    terms.push_back(ex_mul2(G.gdens(a, b), xg(l, a, b)));
                    terms.push_back(ex_neg(ex_mul2(G.gdens(l, b), xg(a, a, b))));
                }
            theta(l) = simplify(ex_add(std::move(terms)));
        }
        return theta;
    }

    Tensor superpotential(const Generator& gen, int view = 0) const override {
        const Geo& G = geo(view);
        const int m = dim();
        Tensor nab = cov_deriv_vector(chart(), G.gamma, gen.xi);  // [l][mu]
        Tensor U({m, m});
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                std::vector<ExprPtr> terms;
                for (int s = 0; s < m; ++s) {
                    terms.push_back(ex_mul2(G.gdens(s, a), nab(b, s)));
                    terms.push_back(ex_neg(ex_mul2(G.gdens(s, b), nab(a, s))));
                }
                ExprPtr v =
                    simplify(ex_mul2(ex_num(Rational{-1, 2}), ex_add(std::move(terms))));
                U(a, b) = v;
                U(b, a) = ex_neg(v);
            }
        return U;
    }

    Tensor reduced_current(const Generator& gen, int view = 0) const override {
        const Geo& G = geo(view);
        const int m = dim();
        const ExprPtr& L = lagrangian(view);
        Tensor nab = cov_deriv_vector(chart(), G.gamma, gen.xi);
        Tensor e({m});
        for (int l = 0; l < m; ++l) {
            std::vector<ExprPtr> terms;
            for (int s = 0; s < m; ++s) {
                std::vector<ExprPtr> curv;
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        curv.push_back(ex_mul2(G.gdens(a, b), G.riem(l, b, s, a)));
                for (int b = 0; b < m; ++b) curv.push_back(ex_mul2(G.gdens(l, b), G.ric(b, s)));
                terms.push_back(ex_mul2(gen.xi(s), ex_add(std::move(curv))));
            }
            terms.push_back(ex_neg(ex_mul2(gen.xi(l), L)));
            for (int n = 0; n < m; ++n)
                for (int b = 0; b < m; ++b) {
                    terms.push_back(ex_mul2(G.ddens(b, l, n), nab(n, b)));
                    terms.push_back(ex_neg(ex_mul2(G.ddens(b, n, n), nab(l, b))));
                }
            e(l) = simplify(ex_add(std::move(terms)));
        }
        return e;
    }

    Tensor alpha(AlphaMode mode = AlphaMode::Canonical) const override {
        const Geo& dyn = geo(0);
        const Geo& vac = geo(1);
        const Tensor& weight = mode == AlphaMode::Matched ? dyn.gdens : vac.gdens;
        const int m = dim();
        Tensor a({m});
        for (int l = 0; l < m; ++l) {
            std::vector<ExprPtr> terms;
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q)
                    terms.push_back(ex_mul2(weight(p, q), ex_sub(dyn.u(l, p, q), vac.u(l, p, q))));
            a(l) = simplify(ex_neg(ex_add(std::move(terms))));
        }
        return a;
    }

  protected:
    ExprPtr build_lagrangian(int view) const override {
        const Geo& G = geo(view);
        const int m = dim();
        std::vector<ExprPtr> terms;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) terms.push_back(ex_mul2(G.gdens(a, b), G.ric(a, b)));
        return ex_add(std::move(terms));
    }

  private:
    ViewCache<Geo> geo_;
};

}  // namespace avp::theories
