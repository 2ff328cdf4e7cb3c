#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "avp/chart.hpp"
#include "avp/geometry.hpp"
#include "avp/simplify.hpp"

using namespace avp;

namespace {

struct Sphere {
    Chart ch = Chart::make("sphere", {"theta", "phi"});
    Tensor g{{2, 2}};
    Sphere() {
        ExprPtr th = ch.coord_expr(0);
        g(0, 0) = ex_one();
        g(1, 1) = ex_pow(ex_sin(th), Rational{2});
    }
};

struct Schwarzschild {
    Chart ch = Chart::make("schw", {"t", "r", "theta", "phi"});
    SymbolPtr M = make_parameter("M");
    Tensor g{{4, 4}};
    Schwarzschild() {
        ExprPtr r = ch.coord_expr(1), th = ch.coord_expr(2);
        ExprPtr f = ex_sub(ex_one(), ex_div(ex_mul2(ex_num(2), ex_sym(M)), r));
        g(0, 0) = ex_neg(f);
        g(1, 1) = ex_div(ex_one(), f);
        g(2, 2) = ex_pow(r, Rational{2});
        g(3, 3) = ex_mul2(ex_pow(r, Rational{2}), ex_pow(ex_sin(th), Rational{2}));
    }
};

// Uniform sample points over a box, fixed seed.
struct Sampler {
    std::mt19937 rng{421337u};
    double in(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
};

double norm_resid(double got, double want) {
    return std::abs(got - want) / (1.0 + std::abs(want));
}

}  // namespace

TEST_CASE("unit sphere connection and curvature") {
    Sphere s;
    Tensor ginv = inverse_metric(s.g);
    Tensor gamma = christoffel(s.ch, s.g, ginv);

    // Gamma^theta_{phi phi} = -sin cos, Gamma^phi_{theta phi} = cos/sin: exact
    ExprPtr th = s.ch.coord_expr(0);
    REQUIRE(is_symbolically_zero(
        ex_sub(gamma(0, 1, 1), ex_neg(ex_mul2(ex_sin(th), ex_cos(th))))));
    REQUIRE(is_symbolically_zero(
        ex_sub(gamma(1, 0, 1), ex_div(ex_cos(th), ex_sin(th)))));
    REQUIRE(is_zero(gamma(0, 0, 0)));
    REQUIRE(is_zero(gamma(1, 0, 0)));

    Tensor riem = riemann(s.ch, gamma);
    Tensor ric = ricci_from_riemann(riem);
    ExprPtr scal = scalar_curvature(ginv, ric);

    Sampler smp;
    for (int i = 0; i < 20; ++i) {
        Binding b{{s.ch.coords[0].get(), smp.in(0.3, 2.8)}, {s.ch.coords[1].get(), smp.in(0.1, 6.1)}};
        REQUIRE(norm_resid(eval(scal, b), 2.0) < 1e-12);  // R = 2 on the unit sphere
        // Ricci = g on the unit sphere
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c)
                REQUIRE(norm_resid(eval(ric(a, c), b), eval(s.g(a, c), b)) < 1e-12);
    }
}

TEST_CASE("schwarzschild connection, vacuum equations, einstein tensor") {
    Schwarzschild s;
    Tensor ginv = inverse_metric(s.g);
    Tensor gamma = christoffel(s.ch, s.g, ginv);
    Tensor riem = riemann(s.ch, gamma);
    Tensor ric = ricci_from_riemann(riem);
    ExprPtr scal = scalar_curvature(ginv, ric);
    Tensor G = einstein_mixed(ginv, ric, scal);

    Sampler smp;
    for (int i = 0; i < 15; ++i) {
        const double Mv = smp.in(0.5, 2.0);
        const double rv = smp.in(5.0, 40.0);
        const double thv = smp.in(0.3, 2.8);
        Binding b{{s.ch.coords[0].get(), smp.in(-1, 1)},
                  {s.ch.coords[1].get(), rv},
                  {s.ch.coords[2].get(), thv},
                  {s.ch.coords[3].get(), smp.in(0.1, 6.1)},
                  {s.M.get(), Mv}};

        // frozen closed forms
        const double f = 1 - 2 * Mv / rv;
        REQUIRE(norm_resid(eval(gamma(1, 0, 0), b), Mv * (rv - 2 * Mv) / (rv * rv * rv)) < 1e-12);
        REQUIRE(norm_resid(eval(gamma(0, 0, 1), b), Mv / (rv * rv * f)) < 1e-12);
        REQUIRE(norm_resid(eval(gamma(1, 1, 1), b), -Mv / (rv * rv * f)) < 1e-12);
        REQUIRE(norm_resid(eval(gamma(1, 2, 2), b), -(rv - 2 * Mv)) < 1e-12);
        REQUIRE(norm_resid(eval(gamma(2, 1, 2), b), 1 / rv) < 1e-12);

        // vacuum: Ricci, scalar and Einstein all vanish
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                REQUIRE(std::abs(eval(ric(a, c), b)) < 1e-10);
                REQUIRE(std::abs(eval(G(a, c), b)) < 1e-10);
            }
        REQUIRE(std::abs(eval(scal, b)) < 1e-10);

        // Kretschmann-level sanity: R^t_{r t r} nonzero
        REQUIRE(std::abs(eval(riem(0, 1, 0, 1), b)) > 1e-8);
    }
}

TEST_CASE("metric compatibility and bianchi symmetry") {
    Schwarzschild s;
    Tensor ginv = inverse_metric(s.g);
    Tensor gamma = christoffel(s.ch, s.g, ginv);
    Tensor riem = riemann(s.ch, gamma);

    Sampler smp;
    Binding b{{s.ch.coords[0].get(), 0.4},
              {s.ch.coords[1].get(), smp.in(5, 20)},
              {s.ch.coords[2].get(), smp.in(0.4, 2.6)},
              {s.ch.coords[3].get(), smp.in(0.1, 6)},
              {s.M.get(), 1.17}};

    // nabla_c g_{ab} = 0
    for (int c = 0; c < 4; ++c)
        for (int a = 0; a < 4; ++a)
            for (int e = 0; e < 4; ++e) {
                std::vector<ExprPtr> terms{dmu(s.ch, s.g(a, e), c)};
                for (int t = 0; t < 4; ++t) {
                    terms.push_back(ex_neg(ex_mul2(gamma(t, c, a), s.g(t, e))));
                    terms.push_back(ex_neg(ex_mul2(gamma(t, c, e), s.g(a, t))));
                }
                REQUIRE(std::abs(eval(ex_add(std::move(terms)), b)) < 1e-11);
            }

    // first Bianchi: R^l_{[b mu nu]} = 0
    for (int l = 0; l < 4; ++l)
        for (int bb = 0; bb < 4; ++bb)
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) {
                    ExprPtr cyc = ex_add({riem(l, bb, mu, nu), riem(l, mu, nu, bb), riem(l, nu, bb, mu)});
                    REQUIRE(std::abs(eval(cyc, b)) < 1e-11);
                }
}

TEST_CASE("curvature commutator on a vector field") {
    Schwarzschild s;
    Tensor ginv = inverse_metric(s.g);
    Tensor gamma = christoffel(s.ch, s.g, ginv);
    Tensor riem = riemann(s.ch, gamma);

    // a fixed polynomial vector field
    ExprPtr t = s.ch.coord_expr(0), r = s.ch.coord_expr(1), th = s.ch.coord_expr(2);
    Tensor V({4});
    V(0) = ex_mul2(r, r);
    V(1) = ex_mul2(t, th);
    V(2) = ex_add2(r, ex_num(1));
    V(3) = ex_mul2(th, th);

    Tensor dV = cov_deriv_vector(s.ch, gamma, V);  // [l][b] = nabla_b V^l
    // second covariant derivative: nabla_mu nabla_nu V^l, stored [l][nu][mu]
    Tensor ddV({4, 4, 4});
    for (int l = 0; l < 4; ++l)
        for (int nu = 0; nu < 4; ++nu)
            for (int mu = 0; mu < 4; ++mu) {
                std::vector<ExprPtr> terms{dmu(s.ch, dV(l, nu), mu)};
                for (int x = 0; x < 4; ++x) {
                    terms.push_back(ex_mul2(gamma(l, mu, x), dV(x, nu)));
                    terms.push_back(ex_neg(ex_mul2(gamma(x, mu, nu), dV(l, x))));
                }
                ddV(l, nu, mu) = ex_add(std::move(terms));
            }

    Sampler smp;
    for (int trial = 0; trial < 5; ++trial) {
        Binding b{{s.ch.coords[0].get(), smp.in(-1, 1)},
                  {s.ch.coords[1].get(), smp.in(4, 15)},
                  {s.ch.coords[2].get(), smp.in(0.4, 2.7)},
                  {s.ch.coords[3].get(), smp.in(0.1, 6)},
                  {s.M.get(), 0.8}};
        for (int l = 0; l < 4; ++l)
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) {
                    // [nabla_mu, nabla_nu] V^l = R^l_{s mu nu} V^s
                    double lhs = eval(ddV(l, nu, mu), b) - eval(ddV(l, mu, nu), b);
                    double rhs = 0;
                    for (int x = 0; x < 4; ++x) rhs += eval(riem(l, x, mu, nu), b) * eval(V(x), b);
                    REQUIRE(norm_resid(lhs, rhs) < 1e-10);
                }
    }
}

TEST_CASE("lie derivatives: killing vectors and the connection identity") {
    Schwarzschild s;
    Tensor ginv = inverse_metric(s.g);
    Tensor gamma = christoffel(s.ch, s.g, ginv);
    Tensor riem = riemann(s.ch, gamma);

    // static and axial generators kill the metric exactly
    Tensor dt({4}), dphi({4});
    dt(0) = ex_one();
    dphi(3) = ex_one();
    for (const Tensor* xi : {&dt, &dphi}) {
        Tensor lg = lie_metric(s.ch, *xi, s.g);
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) REQUIRE(is_zero(lg(a, c)));
    }

    // radial translation does not
    Tensor dr({4});
    dr(1) = ex_one();
    Tensor lg = lie_metric(s.ch, dr, s.g);
    Binding b0{{s.ch.coords[0].get(), 0.0},
               {s.ch.coords[1].get(), 7.0},
               {s.ch.coords[2].get(), 1.0},
               {s.ch.coords[3].get(), 2.0},
               {s.M.get(), 1.0}};
    REQUIRE(std::abs(eval(lg(0, 0), b0)) > 1e-4);

    // L_xi Gamma^l_{ab} = D_a D_b xi^l + R^l_{b s a} xi^s for any xi
    ExprPtr t = s.ch.coord_expr(0), r = s.ch.coord_expr(1), th = s.ch.coord_expr(2);
    Tensor xi({4});
    xi(0) = ex_mul2(r, th);
    xi(1) = ex_mul2(t, t);
    xi(2) = r;
    xi(3) = ex_add2(th, ex_num(2));

    Tensor lhs = lie_connection(s.ch, xi, gamma);
    Tensor dxi = cov_deriv_vector(s.ch, gamma, xi);  // [l][b]
    Sampler smp;
    for (int trial = 0; trial < 5; ++trial) {
        Binding b{{s.ch.coords[0].get(), smp.in(-1, 1)},
                  {s.ch.coords[1].get(), smp.in(4, 15)},
                  {s.ch.coords[2].get(), smp.in(0.4, 2.7)},
                  {s.ch.coords[3].get(), smp.in(0.1, 6)},
                  {s.M.get(), 1.21}};
        for (int l = 0; l < 4; ++l)
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) {
                    // D_a (D xi)^l_c
                    std::vector<ExprPtr> terms{dmu(s.ch, dxi(l, c), a)};
                    for (int x = 0; x < 4; ++x) {
                        terms.push_back(ex_mul2(gamma(l, a, x), dxi(x, c)));
                        terms.push_back(ex_neg(ex_mul2(gamma(x, a, c), dxi(l, x))));
                    }
                    double rhs = eval(ex_add(std::move(terms)), b);
                    for (int x = 0; x < 4; ++x)
                        rhs += eval(riem(l, c, x, a), b) * eval(xi(x), b);
                    REQUIRE(norm_resid(eval(lhs(l, a, c), b), rhs) < 1e-10);
                }
    }
}

TEST_CASE("lie derivative is linear and respects brackets on vectors") {
    Sphere s;
    ExprPtr th = s.ch.coord_expr(0), ph = s.ch.coord_expr(1);
    Tensor X({2}), Y({2}), V({2});
    X(0) = ex_sin(ph);
    X(1) = th;
    Y(0) = ex_mul2(th, th);
    Y(1) = ex_cos(th);
    V(0) = ex_add2(th, ph);
    V(1) = ex_mul2(th, ph);

    // L_{X+Y} V = L_X V + L_Y V
    Tensor XY({2});
    for (int i = 0; i < 2; ++i) XY(i) = ex_add2(X(i), Y(i));
    Tensor l_sum = lie_vector(s.ch, XY, V);
    Tensor lx = lie_vector(s.ch, X, V), ly = lie_vector(s.ch, Y, V);
    for (double thv : {0.5, 1.1, 2.2}) {
        Binding bl{{s.ch.coords[0].get(), thv}, {s.ch.coords[1].get(), 1.7 * thv}};
        for (int i = 0; i < 2; ++i)
            REQUIRE(norm_resid(eval(l_sum(i), bl), eval(lx(i), bl) + eval(ly(i), bl)) < 1e-13);
    }

    // L_X L_Y - L_Y L_X = L_{[X,Y]}
    Tensor lylv = lie_vector(s.ch, X, lie_vector(s.ch, Y, V));
    Tensor lxlv = lie_vector(s.ch, Y, lie_vector(s.ch, X, V));
    Tensor bracket = lie_vector(s.ch, X, Y);  // [X,Y] = L_X Y
    Tensor lb = lie_vector(s.ch, bracket, V);
    Binding b{{s.ch.coords[0].get(), 0.9}, {s.ch.coords[1].get(), 2.3}};
    for (int i = 0; i < 2; ++i) {
        double lhs = eval(lylv(i), b) - eval(lxlv(i), b);
        REQUIRE(norm_resid(lhs, eval(lb(i), b)) < 1e-12);
    }
}
