#pragma once

#include <cmath>
#include <string>

#include "avp/chart.hpp"
#include "avp/geometry.hpp"
#include "avp/simplify.hpp"
#include "avp/tensor.hpp"

namespace avp {

// Finite-dimensional gauge algebra: structure constants c^A_{BC} and an
// invariant pairing eta_{AB}, both numeric. Gauge potentials carry one
// algebra slot first, then the spacetime covector slot.
struct GaugeAlgebra {
    std::string name;
    int dim = 0;
    std::vector<double> c;    // c^A_{BC}, row-major A,B,C
    std::vector<double> eta;  // eta_{AB}

    double cc(int a, int b, int k) const { return c[(a * dim + b) * dim + k]; }
    double pairing(int a, int b) const { return eta[a * dim + b]; }

    // antisymmetry and the Jacobi identity; pairing symmetry
    bool consistent(double tol = 1e-12) const {
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                if (std::abs(pairing(a, b) - pairing(b, a)) > tol) return false;
                for (int k = 0; k < dim; ++k)
                    if (std::abs(cc(a, b, k) + cc(a, k, b)) > tol) return false;
            }
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int k = 0; k < dim; ++k)
                    for (int d = 0; d < dim; ++d) {
                        double s = 0;
                        for (int e = 0; e < dim; ++e)
                            s += cc(d, a, e) * cc(e, b, k) + cc(d, b, e) * cc(e, k, a) +
                                 cc(d, k, e) * cc(e, a, b);
                        if (std::abs(s) > tol) return false;
                    }
        return true;
    }

    static GaugeAlgebra abelian(int n = 1) {
        GaugeAlgebra g;
        g.name = n == 1 ? "u1" : "u1^" + std::to_string(n);
        g.dim = n;
        g.c.assign(static_cast<std::size_t>(n) * n * n, 0.0);
        g.eta.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) g.eta[i * n + i] = 1.0;
        return g;
    }

    // so(3): c^i_{jk} = eps_{ijk}, pairing the Kronecker delta.
    static GaugeAlgebra so3() {
        GaugeAlgebra g;
        g.name = "so3";
        g.dim = 3;
        g.c.assign(27, 0.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) g.c[(i * 3 + j) * 3 + k] = levi_civita({i, j, k});
        g.eta = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return g;
    }
};

namespace detail {

inline ExprPtr alg_num(double v) {
    double r = std::round(v);
    if (std::abs(v - r) < 1e-12 && std::abs(r) < 1e6) return ex_num(static_cast<std::int64_t>(r));
    return ex_numf(v);
}

}  // namespace detail

// F^A_{mn} = d_m A^A_n - d_n A^A_m + c^A_{BC} A^B_m A^C_n, for A with dims
// {alg.dim, m}. Abelian one-component potentials may be stored flat {m}.
inline Tensor field_strength(const Chart& ch, const GaugeAlgebra& alg, const Tensor& A) {
    const int m = ch.dim();
    const bool flat = A.rank() == 1;
    if (flat && alg.dim != 1) throw Error("flat potential only valid for a 1-dim algebra");
    auto at = [&](int a, int mu) { return flat ? A(mu) : A(a, mu); };
    Tensor F(flat ? std::vector<int>{m, m} : std::vector<int>{alg.dim, m, m});
    for (int a = 0; a < alg.dim; ++a)
        for (int mu = 0; mu < m; ++mu)
            for (int nu = mu + 1; nu < m; ++nu) {
                std::vector<ExprPtr> terms{dmu(ch, at(a, nu), mu), ex_neg(dmu(ch, at(a, mu), nu))};
                for (int b = 0; b < alg.dim; ++b)
                    for (int k = 0; k < alg.dim; ++k) {
                        const double s = alg.cc(a, b, k);
                        if (s == 0) continue;
                        terms.push_back(
                            ex_mul({detail::alg_num(s), at(b, mu), at(k, nu)}));
                    }
                ExprPtr v = simplify(ex_add(std::move(terms)));
                if (flat) {
                    F(mu, nu) = v;
                    F(nu, mu) = ex_neg(v);
                } else {
                    F(a, mu, nu) = v;
                    F(a, nu, mu) = ex_neg(v);
                }
            }
    return F;
}

// Gauge-covariant derivative of an algebra-valued scalar:
// D_mu s^A = d_mu s^A + c^A_{BC} A^B_mu s^C.
inline Tensor gauge_cov_deriv_scalar(const Chart& ch, const GaugeAlgebra& alg, const Tensor& A,
                                     const Tensor& s) {
    const int m = ch.dim();
    const bool flat = A.rank() == 1;
    auto at = [&](int a, int mu) { return flat ? A(mu) : A(a, mu); };
    auto st = [&](int a) { return flat ? s.flat_at(0) : s(a); };
    Tensor out(flat ? std::vector<int>{m} : std::vector<int>{alg.dim, m});
    for (int a = 0; a < alg.dim; ++a)
        for (int mu = 0; mu < m; ++mu) {
            std::vector<ExprPtr> terms{dmu(ch, st(a), mu)};
            for (int b = 0; b < alg.dim; ++b)
                for (int k = 0; k < alg.dim; ++k) {
                    const double c = alg.cc(a, b, k);
                    if (c == 0) continue;
                    terms.push_back(ex_mul({detail::alg_num(c), at(b, mu), st(k)}));
                }
            ExprPtr v = simplify(ex_add(std::move(terms)));
            if (flat) out(mu) = v;
            else out(a, mu) = v;
        }
    return out;
}

// Gauge-natural Lie drag of a potential along Xi = (xi, xi_vert):
//   lie A^A_mu = xi^nu F^A_{nu mu} + D_mu(xiV^A),  xiV^A = xi_vert^A + A^A_nu xi^nu.
// The vertical tensor is algebra-shaped ({alg.dim} or {} for flat storage).
inline Tensor lie_gauge_potential(const Chart& ch, const GaugeAlgebra& alg, const Tensor& A,
                                  const Tensor& xi, const Tensor& vert) {
    const int m = ch.dim();
    const bool flat = A.rank() == 1;
    auto at = [&](int a, int mu) { return flat ? A(mu) : A(a, mu); };
    Tensor F = field_strength(ch, alg, A);
    auto Ft = [&](int a, int mu, int nu) { return flat ? F(mu, nu) : F(a, mu, nu); };

    Tensor xiV(flat ? std::vector<int>{} : std::vector<int>{alg.dim});
    for (int a = 0; a < alg.dim; ++a) {
        std::vector<ExprPtr> terms{flat ? vert.flat_at(0) : vert(a)};
        for (int nu = 0; nu < m; ++nu) terms.push_back(ex_mul2(at(a, nu), xi(nu)));
        ExprPtr v = simplify(ex_add(std::move(terms)));
        if (flat) xiV.flat_at(0) = v;
        else xiV(a) = v;
    }
    Tensor DxiV = gauge_cov_deriv_scalar(ch, alg, A, xiV);
    auto Dt = [&](int a, int mu) { return flat ? DxiV(mu) : DxiV(a, mu); };

    Tensor out(flat ? std::vector<int>{m} : std::vector<int>{alg.dim, m});
    for (int a = 0; a < alg.dim; ++a)
        for (int mu = 0; mu < m; ++mu) {
            std::vector<ExprPtr> terms{Dt(a, mu)};
            for (int nu = 0; nu < m; ++nu) terms.push_back(ex_mul2(xi(nu), Ft(a, nu, mu)));
            ExprPtr v = simplify(ex_add(std::move(terms)));
            if (flat) out(mu) = v;
            else out(a, mu) = v;
        }
    return out;
}

}  // namespace avp
