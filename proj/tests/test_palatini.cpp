#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "avp/integrate.hpp"
#include "avp/noether.hpp"
#include "avp/parse.hpp"
#include "avp/theories/palatini.hpp"

namespace {

using namespace avp;
using theories::PalatiniTheory;

struct Fix {
    std::shared_ptr<PalatiniTheory> th = std::make_shared<PalatiniTheory>();
    SymbolPtr M = make_parameter("M");

    ExprPtr parse(const std::string& s) const {
        return parse_expr(s, [&](const std::string& n) -> SymbolPtr {
            if (n == "M") return M;
            std::string full = n == "h" ? "theta" : n == "p" ? "phi" : n;
            int i = th->chart().index_of(full);
            if (i < 0) throw Error("unknown symbol " + n);
            return th->chart().coords[i];
        });
    }

    Tensor metric(const std::map<std::string, std::string>& comps) const {
        Tensor g({4, 4});
        auto idx = [&](char c) { return std::string("trhp").find(c); };
        for (const auto& [k, v] : comps) {
            int a = static_cast<int>(idx(k[0])), b = static_cast<int>(idx(k[1]));
            g(a, b) = parse(v);
            g(b, a) = g(a, b);
        }
        return g;
    }

    Tensor schwarzschild() const {
        return metric({{"tt", "-(1 - 2*M/r)"},
                       {"rr", "1/(1 - 2*M/r)"},
                       {"hh", "r^2"},
                       {"pp", "r^2*sin(h)^2"}});
    }
    Tensor minkowski_spherical() const {
        return metric({{"tt", "-1"}, {"rr", "1"}, {"hh", "r^2"}, {"pp", "r^2*sin(h)^2"}});
    }
    Tensor offshell() const {
        return metric({{"tt", "-1 - r/10 - t^2/50"},
                       {"rr", "1 + r^2/100 + h/20"},
                       {"hh", "r^2*(1 + p/30)"},
                       {"pp", "r^2*sin(h)^2 + 1/2"},
                       {"tr", "r/25 + h*p/40"},
                       {"th", "t*r/200"},
                       {"rp", "h/35"}});
    }

    Tensor lc(const Tensor& g) const { return christoffel(th->chart(), g, inverse_metric(g)); }

    // smooth symmetric connection unrelated to any metric
    Tensor offshell_connection() const {
        Tensor G({4, 4, 4});
        const char* cs = "trhp";
        for (int l = 0; l < 4; ++l)
            for (int a = 0; a < 4; ++a)
                for (int b = a; b < 4; ++b) {
                    std::string e = std::to_string((l * 7 + a * 3 + b + 1) % 5) + "/10 + " +
                                    std::string(1, cs[(l + b) % 4]) + "*" +
                                    std::to_string(a + 2) + "/40";
                    G(l, a, b) = parse(e);
                    G(l, b, a) = G(l, a, b);
                }
        return G;
    }

    Generator xi_generic() const {
        Generator gen;
        gen.xi = Tensor({4});
        gen.xi(0) = parse("3/10 + r/10 - h^2/5");
        gen.xi(1) = parse("1/5 + t/20 + p/15");
        gen.xi(2) = parse("-1/4 + r*h/30");
        gen.xi(3) = parse("1/8 + t*p/100");
        return gen;
    }
    Generator xi_t() const {
        Generator gen;
        gen.xi = Tensor({4});
        gen.xi(0) = ex_num(1);
        return gen;
    }

    Deformation gamma_deformation() const {
        Tensor x({4, 4, 4});
        auto set = [&](int l, int a, int b, const std::string& s) {
            x(l, a, b) = parse(s);
            x(l, b, a) = x(l, a, b);
        };
        set(0, 0, 0, "r/12 + h/9");
        set(0, 0, 1, "1/3 - t/40");
        set(1, 1, 1, "h^2/6");
        set(1, 2, 3, "p/20");
        set(2, 0, 2, "r/7");
        set(3, 3, 3, "1 + t/50");
        set(2, 1, 1, "t*r/80");
        return {{"Gamma", x}};
    }

    std::vector<std::vector<double>> points() const {
        return {{0.3, 3.1, 0.8, 0.5},
                {1.1, 2.4, 1.2, 2.0},
                {0.0, 5.0, 0.55, 4.1},
                {2.2, 3.7, 1.9, 1.3},
                {0.7, 4.2, 2.4, 5.6}};
    }
};

Fix& fix() {
    static Fix f;
    return f;
}

double maxad(const FieldConfig& cfg, const Tensor& t, const std::vector<std::vector<double>>& pts) {
    double worst = 0;
    for (const auto& p : pts)
        for (std::size_t i = 0; i < t.size(); ++i)
            worst = std::max(worst, std::abs(cfg.eval_at(t.flat_at(i), p)));
    return worst;
}

TEST_CASE("komar superpotential with the metric connection") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.schwarzschild());
    cfg.assign("Gamma", fx.lc(fx.schwarzschild()));
    cfg.set_param(fx.M, 1.0);

    Tensor U = fx.th->superpotential(fx.xi_t());
    for (const auto& p : fx.points()) {
        const double expect = std::sin(p[2]);
        CHECK(cfg.eval_at(U(0, 1), p) == Catch::Approx(expect).margin(1e-10));
        CHECK(cfg.eval_at(U(1, 0), p) == Catch::Approx(-expect).margin(1e-10));
        for (auto [a, b] : {std::pair{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})
            CHECK(std::abs(cfg.eval_at(U(a, b), p)) < 1e-10);
    }

    Tensor Ur = cfg.resolve(U);
    for (double r0 : {3.0, 10.0}) {
        SurfaceSpec sphere{0, 1, 0.0, r0, {{0.0, M_PI}, {0.0, 2 * M_PI}}};
        auto res =
            integrate_bivector_on_surface(fx.th->chart(), Ur, sphere, {{fx.M.get(), 1.0}}, 32);
        CHECK(res.value == Catch::Approx(8 * M_PI).epsilon(1e-10));
    }
}

TEST_CASE("metric field equation matches its closed form") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    Tensor gvals = fx.offshell();
    Tensor cvals = fx.offshell_connection();
    cfg.assign("g", gvals);
    cfg.assign("Gamma", cvals);

    // reference: sqrt(g) (g^{mn} ghat/2 - g^{ma} g^{nb} R_(ab)) with the
    // Ricci tensor of the independent connection, ghat its g-trace
    const Chart& ch = fx.th->chart();
    Tensor ginv = inverse_metric(gvals);
    Tensor ric = ricci_from_riemann(riemann(ch, cvals));
    ExprPtr sqrtg = ex_sqrt(ex_neg(det_metric(gvals)));

    const Tensor& el = fx.th->euler_lagrange("g");
    for (const auto& p : fx.points()) {
        Binding b = cfg.binding_at(p);
        double hat = 0;
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) hat += eval(ginv(a, c), b) * eval(ric(a, c), b);
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n) {
                double raised = 0;
                for (int a = 0; a < 4; ++a)
                    for (int c = 0; c < 4; ++c)
                        raised += eval(ginv(m, a), b) * eval(ginv(n, c), b) * 0.5 *
                                  (eval(ric(a, c), b) + eval(ric(c, a), b));
                double ref = eval(sqrtg, b) * (0.5 * eval(ginv(m, n), b) * hat - raised);
                CHECK(cfg.eval_at(el(m, n), p) == Catch::Approx(ref).margin(1e-8));
            }
    }
}

TEST_CASE("connection field equation enforces metricity") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.offshell());
    cfg.assign("Gamma", fx.lc(fx.offshell()));

    // Levi-Civita of any metric solves the connection equation even when the
    // metric equation fails
    CHECK(maxad(cfg, fx.th->euler_lagrange("Gamma"), fx.points()) < 1e-8);
    REQUIRE(maxad(cfg, fx.th->euler_lagrange("g"), fx.points()) > 1e-3);

    FieldConfig vac(fx.th->context());
    vac.assign("g", fx.schwarzschild());
    vac.assign("Gamma", fx.lc(fx.schwarzschild()));
    vac.set_param(fx.M, 1.0);
    CHECK(maxad(vac, fx.th->euler_lagrange("g"), fx.points()) < 1e-9);
    CHECK(maxad(vac, fx.th->euler_lagrange("Gamma"), fx.points()) < 1e-9);
}

TEST_CASE("covariance identity holds for independent fields") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.offshell());
    cfg.assign("Gamma", fx.offshell_connection());
    ExprPtr resid = covariance_residual(*fx.th, cfg, fx.xi_generic());
    for (const auto& p : fx.points()) CHECK(std::abs(eval(resid, cfg.binding_at(p))) < 1e-7);
}

TEST_CASE("noether split and conservation off-shell") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.offshell());
    cfg.assign("Gamma", fx.offshell_connection());
    Generator gen = fx.xi_generic();
    auto pts = fx.points();

    HorizontalForm E = noether_current(*fx.th, cfg, gen);
    HorizontalForm Et = reduced_current(*fx.th, cfg, gen);
    HorizontalForm U = superpotential(*fx.th, cfg, gen);
    HorizontalForm divU = formal_divergence(U, cfg);

    Tensor split({4});
    for (int l = 0; l < 4; ++l)
        split(l) = ex_sub(E.coeff(l), ex_add2(Et.coeff(l), divU.coeff(l)));
    CHECK(maxad(cfg, split, pts) < 1e-7);

    HorizontalForm divE = formal_divergence(E, cfg);
    HorizontalForm W = work_form(*fx.th, cfg, gen);
    for (const auto& p : pts)
        CHECK(std::abs(cfg.eval_at(ex_sub(divE.scalar(), W.scalar()), p)) < 1e-6);

    ExprPtr B = bianchi_residual(*fx.th, cfg, gen);
    for (const auto& p : pts) CHECK(std::abs(eval(B, cfg.binding_at(p))) < 1e-6);
}

TEST_CASE("boundary morphism ignores the metric slot") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.offshell());
    cfg.assign("Gamma", fx.offshell_connection());
    auto pts = fx.points();

    Deformation X = fx.gamma_deformation();
    Tensor t1 = fx.th->pc_contract(X);
    Deformation Xs = X;
    for (auto& [k, v] : Xs)
        for (std::size_t i = 0; i < v.size(); ++i)
            v.flat_at(i) = ex_mul2(ex_numf(2.4), v.flat_at(i));
    Tensor t2 = fx.th->pc_contract(Xs);
    Tensor lin({4});
    for (int l = 0; l < 4; ++l) lin(l) = ex_sub(t2(l), ex_mul2(ex_numf(2.4), t1(l)));
    CHECK(maxad(cfg, lin, pts) < 1e-10);

    // the morphism has no metric slot: a pure metric deformation drops out
    Tensor gpart({4, 4});
    gpart(0, 0) = fx.parse("r/3");
    gpart(1, 2) = fx.parse("t/2");
    gpart(2, 1) = gpart(1, 2);
    CHECK(maxad(cfg, fx.th->pc_contract({{"g", gpart}}), pts) == 0.0);

    Generator off;
    off.xi = Tensor({4});
    CHECK(maxad(cfg, noether_current_jet(*fx.th, off), pts) == 0.0);
}

TEST_CASE("reduced current vanishes along solutions") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.schwarzschild());
    cfg.assign("Gamma", fx.lc(fx.schwarzschild()));
    cfg.set_param(fx.M, 1.0);
    CHECK(maxad(cfg, fx.th->reduced_current(fx.xi_generic()), fx.points()) < 1e-9);
}

TEST_CASE("correction term agrees with the metric pair values") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.schwarzschild());
    cfg.assign("Gamma", fx.lc(fx.schwarzschild()));
    cfg.assign("g_bar", fx.minkowski_spherical());
    cfg.assign("Gamma_bar", fx.lc(fx.minkowski_spherical()));
    cfg.set_param(fx.M, 1.0);

    Tensor am = fx.th->alpha(AlphaMode::Matched);
    Tensor ac = fx.th->alpha(AlphaMode::Canonical);
    for (const auto& p : fx.points()) {
        const double s = std::sin(p[2]);
        CHECK(cfg.eval_at(am(1), p) == Catch::Approx(-2.0 * s).margin(1e-10));
        const double e = 2.0 / p[1], f = 1.0 - e;
        CHECK(cfg.eval_at(ac(1), p) == Catch::Approx(-(2.0 - e * e / f) * s).margin(1e-10));
        for (int l : {0, 2, 3}) {
            CHECK(std::abs(cfg.eval_at(am(l), p)) < 1e-10);
            CHECK(std::abs(cfg.eval_at(ac(l), p)) < 1e-10);
        }
    }

    FieldConfig both(fx.th->context());
    both.assign("g", fx.minkowski_spherical());
    both.assign("Gamma", fx.lc(fx.minkowski_spherical()));
    both.assign("g_bar", fx.minkowski_spherical());
    both.assign("Gamma_bar", fx.lc(fx.minkowski_spherical()));
    CHECK(maxad(both, fx.th->alpha(AlphaMode::Matched), fx.points()) < 1e-14);
    CHECK(maxad(both, fx.th->alpha(AlphaMode::Canonical), fx.points()) < 1e-14);
}

TEST_CASE("relative energy matches the second order value") {
    Fix& fx = fix();
    FieldConfig cfg(fx.th->context());
    cfg.assign("g", fx.schwarzschild());
    cfg.assign("Gamma", fx.lc(fx.schwarzschild()));
    cfg.assign("g_bar", fx.minkowski_spherical());
    cfg.assign("Gamma_bar", fx.lc(fx.minkowski_spherical()));
    cfg.set_param(fx.M, 1.0);
    Generator gen = fx.xi_t();

    Tensor U = cfg.resolve(fx.th->superpotential(gen, 0));
    Tensor Ub = cfg.resolve(fx.th->superpotential(gen, 1));
    Tensor ia = cfg.resolve(interior_vector(gen.xi, fx.th->alpha(AlphaMode::Matched)));

    Binding params{{fx.M.get(), 1.0}};
    for (double r0 : {3.0, 10.0}) {
        SurfaceSpec sphere{0, 1, 0.0, r0, {{0.0, M_PI}, {0.0, 2 * M_PI}}};
        double total = 0;
        for (const Tensor* t : {&U, &Ub, &ia}) {
            auto res = integrate_bivector_on_surface(fx.th->chart(), *t, sphere, params, 32);
            total += (t == &Ub ? -res.value : res.value);
        }
        CHECK(total == Catch::Approx(16 * M_PI).epsilon(1e-9));
    }
}

TEST_CASE("momenta live on the connection only") {
    Fix& fx = fix();
    auto mom = fx.th->momenta();
    REQUIRE(mom.count("Gamma"));
    CHECK(!mom.count("g"));
    for (const auto& [key, p] : mom["Gamma"]) CHECK(key.derivs.size() == 1);
    CHECK(mom["Gamma"].size() > 0);
}

}  // namespace
