#pragma once

#include "avp/chart.hpp"
#include "avp/simplify.hpp"
#include "avp/tensor.hpp"

namespace avp {

// Components here are plain expressions: concrete coordinate functions and
// formal jet symbols both work, since jets differentiate through their
// registered rules.

namespace detail {

inline ExprPtr det_minor(const Tensor& g, std::vector<int> rows, std::vector<int> cols) {
    if (rows.size() == 1) return g(rows[0], cols[0]);
    std::vector<ExprPtr> terms;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        std::vector<int> sub_rows(rows.begin() + 1, rows.end());
        std::vector<int> sub_cols;
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (j != k) sub_cols.push_back(cols[j]);
        ExprPtr term = ex_mul2(g(rows[0], cols[k]), det_minor(g, sub_rows, sub_cols));
        terms.push_back(k % 2 ? ex_neg(term) : term);
    }
    return ex_add(std::move(terms));
}

}  // namespace detail

inline ExprPtr det_metric(const Tensor& g) {
    const int m = g.dims()[0];
    std::vector<int> all(m);
    for (int i = 0; i < m; ++i) all[i] = i;
    return simplify(detail::det_minor(g, all, all));
}

inline Tensor inverse_metric(const Tensor& g) {
    const int m = g.dims()[0];
    ExprPtr det = det_metric(g);
    Tensor inv({m, m});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            std::vector<int> rows, cols;
            for (int k = 0; k < m; ++k) {
                if (k != j) rows.push_back(k);
                if (k != i) cols.push_back(k);
            }
            ExprPtr cof = m == 1 ? ex_one() : detail::det_minor(g, rows, cols);
            if ((i + j) % 2) cof = ex_neg(cof);
            inv(i, j) = simplify(ex_div(cof, det));
        }
    return inv;
}

inline Tensor christoffel(const Chart& ch, const Tensor& g, const Tensor& ginv) {
    const int m = ch.dim();
    Tensor gamma({m, m, m});  // [lambda][alpha][beta], symmetric in alpha beta
    for (int l = 0; l < m; ++l)
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                std::vector<ExprPtr> terms;
                for (int r = 0; r < m; ++r) {
                    ExprPtr s = ex_add({dmu(ch, g(r, b), a), dmu(ch, g(r, a), b),
                                        ex_neg(dmu(ch, g(a, b), r))});
                    terms.push_back(ex_mul2(ginv(l, r), s));
                }
                ExprPtr v = simplify(ex_mul2(ex_num(Rational{1, 2}), ex_add(std::move(terms))));
                gamma(l, a, b) = v;
                gamma(l, b, a) = v;
            }
    return gamma;
}

// R^lambda_{beta mu nu} = d_mu Gamma^l_{b nu} - d_nu Gamma^l_{b mu}
//                        + Gamma^l_{r mu} Gamma^r_{b nu} - Gamma^l_{r nu} Gamma^r_{b mu}
inline Tensor riemann(const Chart& ch, const Tensor& gamma) {
    const int m = ch.dim();
    Tensor riem({m, m, m, m});
    for (int l = 0; l < m; ++l)
        for (int b = 0; b < m; ++b)
            for (int mu = 0; mu < m; ++mu)
                for (int nu = mu + 1; nu < m; ++nu) {
                    std::vector<ExprPtr> terms{dmu(ch, gamma(l, b, nu), mu),
                                               ex_neg(dmu(ch, gamma(l, b, mu), nu))};
                    for (int r = 0; r < m; ++r) {
                        terms.push_back(ex_mul2(gamma(l, r, mu), gamma(r, b, nu)));
                        terms.push_back(ex_neg(ex_mul2(gamma(l, r, nu), gamma(r, b, mu))));
                    }
                    ExprPtr v = simplify(ex_add(std::move(terms)));
                    riem(l, b, mu, nu) = v;
                    riem(l, b, nu, mu) = simplify(ex_neg(v));
                }
    return riem;
}

inline Tensor ricci_from_riemann(const Tensor& riem) {
    const int m = riem.dims()[0];
    Tensor ric({m, m});
    for (int b = 0; b < m; ++b)
        for (int n = 0; n < m; ++n) {
            std::vector<ExprPtr> terms;
            for (int l = 0; l < m; ++l) terms.push_back(riem(l, b, l, n));
            ric(b, n) = simplify(ex_add(std::move(terms)));
        }
    return ric;
}

inline ExprPtr scalar_curvature(const Tensor& ginv, const Tensor& ric) {
    const int m = ginv.dims()[0];
    std::vector<ExprPtr> terms;
    for (int b = 0; b < m; ++b)
        for (int n = 0; n < m; ++n) terms.push_back(ex_mul2(ginv(b, n), ric(b, n)));
    return simplify(ex_add(std::move(terms)));
}

// G^mu_sigma, the mixed Einstein tensor.
inline Tensor einstein_mixed(const Tensor& ginv, const Tensor& ric, const ExprPtr& scal) {
    const int m = ginv.dims()[0];
    Tensor G({m, m});
    for (int mu = 0; mu < m; ++mu)
        for (int s = 0; s < m; ++s) {
            std::vector<ExprPtr> terms;
            for (int b = 0; b < m; ++b) terms.push_back(ex_mul2(ginv(mu, b), ric(b, s)));
            if (mu == s) terms.push_back(ex_mul2(ex_num(Rational{-1, 2}), scal));
            G(mu, s) = simplify(ex_add(std::move(terms)));
        }
    return G;
}

// u^l_{(ab)} = Gamma^l_{ab} - delta^l_{(a} Gamma_{b)} with the trace
// Gamma_b = Gamma^a_{ab}; symmetrized=false drops the symmetrization,
// u^l_{ab} = Gamma^l_{ab} - delta^l_a Gamma_b.
inline Tensor u_tensor(const Tensor& gamma, bool symmetrized = true) {
    const int m = gamma.dims()[0];
    Tensor trace({m});
    for (int b = 0; b < m; ++b) {
        std::vector<ExprPtr> terms;
        for (int a = 0; a < m; ++a) terms.push_back(gamma(a, a, b));
        trace(b) = simplify(ex_add(std::move(terms)));
    }
    Tensor u({m, m, m});
    for (int l = 0; l < m; ++l)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                std::vector<ExprPtr> terms{gamma(l, a, b)};
                if (symmetrized) {
                    if (l == a) terms.push_back(ex_mul2(ex_num(Rational{-1, 2}), trace(b)));
                    if (l == b) terms.push_back(ex_mul2(ex_num(Rational{-1, 2}), trace(a)));
                } else {
                    if (l == a) terms.push_back(ex_neg(trace(b)));
                }
                u(l, a, b) = simplify(ex_add(std::move(terms)));
            }
    return u;
}

// Lie derivatives along xi (contravariant components).

inline Tensor lie_metric(const Chart& ch, const Tensor& xi, const Tensor& g) {
    const int m = ch.dim();
    Tensor out({m, m});
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            std::vector<ExprPtr> terms;
            for (int s = 0; s < m; ++s) {
                terms.push_back(ex_mul2(xi(s), dmu(ch, g(a, b), s)));
                terms.push_back(ex_mul2(g(s, b), dmu(ch, xi(s), a)));
                terms.push_back(ex_mul2(g(a, s), dmu(ch, xi(s), b)));
            }
            ExprPtr v = simplify(ex_add(std::move(terms)));
            out(a, b) = v;
            out(b, a) = v;
        }
    return out;
}

inline Tensor lie_vector(const Chart& ch, const Tensor& xi, const Tensor& v) {
    const int m = ch.dim();
    Tensor out({m});
    for (int a = 0; a < m; ++a) {
        std::vector<ExprPtr> terms;
        for (int s = 0; s < m; ++s) {
            terms.push_back(ex_mul2(xi(s), dmu(ch, v(a), s)));
            terms.push_back(ex_neg(ex_mul2(v(s), dmu(ch, xi(a), s))));
        }
        out(a) = simplify(ex_add(std::move(terms)));
    }
    return out;
}

// Lie derivative of a symmetric connection: a tensor despite Gamma not being
// one. Coordinate form, valid for any generator:
//   (L_xi Gamma)^l_{ab} = xi^s d_s Gamma^l_{ab} - Gamma^s_{ab} d_s xi^l
//                       + Gamma^l_{sb} d_a xi^s + Gamma^l_{as} d_b xi^s + d_a d_b xi^l
inline Tensor lie_connection(const Chart& ch, const Tensor& xi, const Tensor& gamma) {
    const int m = ch.dim();
    Tensor out({m, m, m});
    for (int l = 0; l < m; ++l)
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                std::vector<ExprPtr> terms;
                for (int s = 0; s < m; ++s) {
                    terms.push_back(ex_mul2(xi(s), dmu(ch, gamma(l, a, b), s)));
                    terms.push_back(ex_neg(ex_mul2(gamma(s, a, b), dmu(ch, xi(l), s))));
                    terms.push_back(ex_mul2(gamma(l, s, b), dmu(ch, xi(s), a)));
                    terms.push_back(ex_mul2(gamma(l, a, s), dmu(ch, xi(s), b)));
                }
                terms.push_back(dmu(ch, dmu(ch, xi(l), b), a));
                ExprPtr v = simplify(ex_add(std::move(terms)));
                out(l, a, b) = v;
                out(l, b, a) = v;
            }
    return out;
}

// nabla_mu V^lambda, stored as [lambda][mu].
inline Tensor cov_deriv_vector(const Chart& ch, const Tensor& gamma, const Tensor& v) {
    const int m = ch.dim();
    Tensor out({m, m});
    for (int l = 0; l < m; ++l)
        for (int mu = 0; mu < m; ++mu) {
            std::vector<ExprPtr> terms{dmu(ch, v(l), mu)};
            for (int s = 0; s < m; ++s) terms.push_back(ex_mul2(gamma(l, mu, s), v(s)));
            out(l, mu) = simplify(ex_add(std::move(terms)));
        }
    return out;
}

// nabla_nu of a weight-1 contravariant density T^{bl}, stored [b][l][nu]:
// d_nu T^{bl} + G^b_{nu s} T^{sl} + G^l_{nu s} T^{bs} - G^s_{s nu} T^{bl}.
inline Tensor cov_deriv_density2(const Chart& ch, const Tensor& gamma, const Tensor& dens) {
    const int m = ch.dim();
    Tensor out({m, m, m});
    for (int b = 0; b < m; ++b)
        for (int l = 0; l < m; ++l)
            for (int n = 0; n < m; ++n) {
                std::vector<ExprPtr> terms{dmu(ch, dens(b, l), n)};
                for (int s = 0; s < m; ++s) {
                    terms.push_back(ex_mul2(gamma(b, n, s), dens(s, l)));
                    terms.push_back(ex_mul2(gamma(l, n, s), dens(b, s)));
                    terms.push_back(ex_neg(ex_mul2(gamma(s, s, n), dens(b, l))));
                }
                out(b, l, n) = simplify(ex_add(std::move(terms)));
            }
    return out;
}

// nabla_mu W_lambda, stored as [lambda][mu].
inline Tensor cov_deriv_covector(const Chart& ch, const Tensor& gamma, const Tensor& w) {
    const int m = ch.dim();
    Tensor out({m, m});
    for (int l = 0; l < m; ++l)
        for (int mu = 0; mu < m; ++mu) {
            std::vector<ExprPtr> terms{dmu(ch, w(l), mu)};
            for (int s = 0; s < m; ++s) terms.push_back(ex_neg(ex_mul2(gamma(s, mu, l), w(s))));
            out(l, mu) = simplify(ex_add(std::move(terms)));
        }
    return out;
}

inline Tensor lower_index(const Tensor& g, const Tensor& v) {
    const int m = g.dims()[0];
    Tensor out({m});
    for (int a = 0; a < m; ++a) {
        std::vector<ExprPtr> terms;
        for (int s = 0; s < m; ++s) terms.push_back(ex_mul2(g(a, s), v(s)));
        out(a) = simplify(ex_add(std::move(terms)));
    }
    return out;
}

inline Tensor raise_index(const Tensor& ginv, const Tensor& w) { return lower_index(ginv, w); }

}  // namespace avp
