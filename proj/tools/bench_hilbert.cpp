#include <chrono>
#include <cstdio>

#include "avp/noether.hpp"
#include "avp/parse.hpp"
#include "avp/theories/hilbert.hpp"

using namespace avp;
using theories::HilbertTheory;

static double lap(const char* label, std::chrono::steady_clock::time_point& t0) {
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::printf("%-28s %10.1f ms\n", label, ms);
    t0 = t1;
    return ms;
}

int main() {
    auto th = std::make_shared<HilbertTheory>();
    auto M = make_parameter("M");
    auto look = [&](const std::string& n) -> SymbolPtr {
        if (n == "M") return M;
        std::string full = n == "h" ? "theta" : n == "p" ? "phi" : n;
        int i = th->chart().index_of(full);
        if (i < 0) throw Error("unknown symbol " + n);
        return th->chart().coords[i];
    };

    auto t0 = std::chrono::steady_clock::now();
    th->geo(0);
    lap("geo(0)", t0);
    const ExprPtr& L = th->lagrangian(0);
    lap("lagrangian", t0);

    Generator gen;
    gen.xi = Tensor({4});
    gen.xi(0) = parse_expr("3/10 + r/10 - h^2/5", look);
    gen.xi(1) = parse_expr("1/5 + t/20 + p/15", look);
    gen.xi(2) = parse_expr("-1/4 + r*h/30", look);
    gen.xi(3) = parse_expr("1/8 + t*p/100", look);

    Deformation lie = th->lie_drag(gen, 0);
    lap("lie_drag", t0);
    Tensor theta = th->pc_contract(lie, 0);
    lap("pc_contract(lie)", t0);
    th->lagrangian_partials(0);
    lap("lagrangian_partials", t0);
    ExprPtr cov = th->covariance_density(gen, 0);
    lap("covariance_density", t0);
    const Tensor& el = th->euler_lagrange("g");
    lap("euler_lagrange", t0);
    Tensor u = th->superpotential(gen, 0);
    lap("superpotential", t0);
    Tensor et = th->reduced_current(gen, 0);
    lap("reduced_current", t0);

    FieldConfig cfg(th->context());
    Tensor g({4, 4});
    auto set = [&](int a, int b, const char* s) {
        g(a, b) = parse_expr(s, look);
        g(b, a) = g(a, b);
    };
    set(0, 0, "-1 - r/10 - t^2/50");
    set(1, 1, "1 + r^2/100 + h/20");
    set(2, 2, "r^2*(1 + p/30)");
    set(3, 3, "r^2*sin(h)^2 + 1/2");
    set(0, 1, "r/25 + h*p/40");
    set(0, 2, "t*r/200");
    set(1, 3, "h/35");
    cfg.assign("g", g);
    lap("assign", t0);

    ExprPtr covr = cfg.resolve(cov);
    lap("resolve(cov)", t0);
    double worst = 0;
    for (const auto& p :
         {std::vector<double>{0.3, 3.1, 0.8, 0.5}, std::vector<double>{1.1, 2.4, 1.2, 2.0}}) {
        double v = eval(covr, cfg.binding_at(p));
        worst = std::max(worst, std::abs(v));
    }
    lap("eval cov x2", t0);
    std::printf("cov residual max |.| = %.3e\n", worst);

    Tensor elr = cfg.resolve(el);
    lap("resolve(el)", t0);
    double v0 = eval(elr(0, 0), cfg.binding_at({0.3, 3.1, 0.8, 0.5}));
    lap("eval el(0,0)", t0);
    std::printf("el(0,0) = %.6f\n", v0);
    (void)L;
    (void)theta;
    (void)u;
    (void)et;
    return 0;
}
