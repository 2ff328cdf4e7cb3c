#pragma once

#include "avp/chart.hpp"
#include "avp/simplify.hpp"
#include "avp/tensor.hpp"

namespace avp {

// Horizontal forms are stored by their density coefficients against the
// interior-product basis built from ds = dx^0 ^ ... ^ dx^{m-1}:
//   m-form:      L ds                 -> scalar L
//   (m-1)-form:  a^l ds_l             -> rank-1 tensor a    (ds_l = del_l | ds)
//   (m-2)-form:  U^{mn} ds_{mn}       -> rank-2 antisymmetric U
// ds_{mn} = del_n | del_m | ds, both index orders summed over.

// d(a^l ds_l) = (d_l a^l) ds
inline ExprPtr divergence_vector(const Chart& ch, const Tensor& alpha) {
    std::vector<ExprPtr> terms;
    for (int l = 0; l < ch.dim(); ++l) terms.push_back(dmu(ch, alpha(l), l));
    return ex_add(std::move(terms));
}

// d(U^{mn} ds_{mn}) = 2 (d_n U^{mn}) ds_m; the 2 comes from the double sum.
inline Tensor divergence_bivector(const Chart& ch, const Tensor& U) {
    const int m = ch.dim();
    Tensor out({m});
    for (int mu = 0; mu < m; ++mu) {
        std::vector<ExprPtr> terms;
        for (int nu = 0; nu < m; ++nu) terms.push_back(dmu(ch, U(mu, nu), nu));
        out(mu) = ex_mul2(ex_num(2), ex_add(std::move(terms)));
    }
    return out;
}

// xi | (L ds) = L xi^l ds_l
inline Tensor interior_scalar(const Tensor& xi, const ExprPtr& L) {
    const int m = xi.dims()[0];
    Tensor out({m});
    for (int l = 0; l < m; ++l) out(l) = ex_mul2(L, xi(l));
    return out;
}

// xi | (a^m ds_m) = a^[m xi^n] ds_{mn}, brackets carrying the half
inline Tensor interior_vector(const Tensor& xi, const Tensor& alpha) {
    const int m = xi.dims()[0];
    Tensor out({m, m});
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            ExprPtr v = ex_mul2(ex_num(Rational{1, 2}),
                                ex_sub(ex_mul2(alpha(a), xi(b)), ex_mul2(alpha(b), xi(a))));
            out(a, b) = v;
            out(b, a) = ex_neg(v);
        }
    return out;
}

// Coordinate 2-form F = (1/2) F_{ab} dx^a ^ dx^b rewritten on the ds_{mn}
// basis (m = 4): dx^a ^ dx^b = (1/2) eps^{mnab} ds_{mn}, so
// U^{mn} = (1/4) eps^{mnab} F_{ab}.
inline Tensor two_form_to_bivector_density(const Tensor& F) {
    const int m = F.dims()[0];
    if (m != 4) throw Error("two_form_to_bivector_density expects dimension 4");
    Tensor U({4, 4});
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            std::vector<ExprPtr> terms;
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    const int s = levi_civita({a, b, c, d});
                    if (!s) continue;
                    terms.push_back(ex_mul2(ex_num(Rational{s, 4}), F(c, d)));
                }
            ExprPtr v = simplify(ex_add(std::move(terms)));
            U(a, b) = v;
            U(b, a) = ex_neg(v);
        }
    return U;
}

}  // namespace avp
