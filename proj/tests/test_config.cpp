#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "avp/fieldfile.hpp"
#include "avp/geometry.hpp"

using namespace avp;

namespace {

JetContextPtr metric_ctx() {
    Chart ch = Chart::make("sph", {"t", "r", "theta", "phi"});
    return JetContext::make(ch, {{"g", {4, 4}, IndexSym::FirstTwo},
                                 {"g_bar", {4, 4}, IndexSym::FirstTwo}});
}

const char* kSchwarzschild = R"(# schwarzschild exterior, geometrized units
chart t r theta phi
param M = 1
field g : metric [dd]
  [0 0] = -(1 - 2*M/r)
  [1 1] = 1/(1 - 2*M/r)
  [2 2] = r^2
  [3 3] = r^2 * sin(theta)^2
)";

}  // namespace

TEST_CASE("jet symbols resolve to derivatives of assigned components") {
    auto ctx = metric_ctx();
    FieldConfig cfg(ctx);
    SymbolPtr M = make_parameter("M");

    Tensor g({4, 4});
    ExprPtr r = ctx->chart().coord_expr(1), th = ctx->chart().coord_expr(2);
    ExprPtr f = ex_sub(ex_one(), ex_div(ex_mul2(ex_num(2), ex_sym(M)), r));
    g(0, 0) = ex_neg(f);
    g(1, 1) = ex_div(ex_one(), f);
    g(2, 2) = ex_pow(r, Rational{2});
    g(3, 3) = ex_mul2(ex_pow(r, Rational{2}), ex_pow(ex_sin(th), Rational{2}));
    cfg.assign("g", g);
    cfg.set_param(M, 1.0);

    std::vector<double> x{0.0, 4.0, 1.2, 0.3};

    // d_r g_tt = -2M/r^2
    ExprPtr e1 = ctx->jet_expr(0, {0, 0}, {1});
    REQUIRE(cfg.eval_at(e1, x) == Catch::Approx(-2.0 / 16.0));
    // d_r d_r g_{theta theta} = 2
    ExprPtr e2 = ctx->jet_expr(0, {2, 2}, {1, 1});
    REQUIRE(cfg.eval_at(e2, x) == Catch::Approx(2.0));
    // symmetric slots share one symbol: (1,0) canonicalizes onto (0,1)
    REQUIRE(ctx->jet(0, {1, 0}, {}) == ctx->jet(0, {0, 1}, {}));
    // mixed derivative of g_{phi phi}: d_theta d_r = 2 r sin(2 theta)/... = 4 r sin cos
    ExprPtr e3 = ctx->jet_expr(0, {3, 3}, {2, 1});
    REQUIRE(cfg.eval_at(e3, x) ==
            Catch::Approx(4.0 * x[1] * std::sin(x[2]) * std::cos(x[2])));

    // composite expressions resolve through every symbol at once
    ExprPtr mix = ex_mul2(e1, ex_add2(e2, ctx->jet_expr(0, {0, 0})));
    double want = (-2.0 / 16.0) * (2.0 + -(1.0 - 2.0 / 4.0));
    REQUIRE(cfg.eval_at(mix, x) == Catch::Approx(want));
}

TEST_CASE("configs reject bad assignments") {
    auto ctx = metric_ctx();
    FieldConfig cfg(ctx);
    REQUIRE_THROWS_AS(cfg.assign("h", Tensor({4, 4})), Error);
    REQUIRE_THROWS_AS(cfg.assign("g", Tensor({3, 3})), Error);

    Tensor bad({4, 4});
    bad(0, 0) = ctx->jet_expr(0, {0, 0});  // jets are not coordinate expressions
    REQUIRE_THROWS_AS(cfg.assign("g", bad), Error);

    // unassigned field: resolution must fail loudly
    REQUIRE_THROWS_AS(cfg.eval_at(ctx->jet_expr(1, {0, 0}), {0, 1, 1, 1}), Error);
}

TEST_CASE("field files parse, bake parameters, and fill configs") {
    std::istringstream in(kSchwarzschild);
    FieldFile ff = parse_field_file(in, "inline");
    REQUIRE(ff.chart_names == std::vector<std::string>{"t", "r", "theta", "phi"});
    REQUIRE(ff.params.size() == 1);
    REQUIRE(ff.find("g") != nullptr);
    REQUIRE(ff.find("g")->role == "metric");

    auto ctx = metric_ctx();
    FieldConfig cfg(ctx);
    apply_field_file(cfg, ff);
    // g_rr at r=4 with the baked M=1: 1/(1-1/2) = 2
    REQUIRE(cfg.eval_at(ctx->jet_expr(0, {1, 1}), {0, 4, 1, 1}) == Catch::Approx(2.0));

    // override the default mass
    FieldConfig cfg2(metric_ctx());
    apply_field_file(cfg2, ff, "", {{"M", ex_num(2)}});
    REQUIRE(cfg2.eval_at(cfg2.context()->jet_expr(0, {0, 0}), {0, 8, 1, 1}) ==
            Catch::Approx(-(1.0 - 4.0 / 8.0)));

    // vacuum twin loading via suffix
    FieldConfig cfg3(metric_ctx());
    std::istringstream in2(kSchwarzschild);
    apply_field_file(cfg3, parse_field_file(in2, "inline"), "_bar");
    REQUIRE(cfg3.assigned("g_bar"));
    REQUIRE_FALSE(cfg3.assigned("g"));
}

TEST_CASE("field files report malformed input") {
    auto parse_text = [](const char* text) {
        std::istringstream in(text);
        return parse_field_file(in, "inline");
    };
    REQUIRE_THROWS_AS(parse_text("field g : metric\n"), Error);       // no chart
    REQUIRE_THROWS_AS(parse_text("chart t\nparam M 1\n"), Error);     // missing '='
    REQUIRE_THROWS_AS(parse_text("chart t\n[0] = 1\n"), Error);       // component first
    REQUIRE_THROWS_AS(parse_text("chart t\nbogus x\n"), Error);       // unknown directive

    auto ctx = metric_ctx();
    FieldConfig cfg(ctx);
    FieldFile wrong = parse_text("chart t r theta\nfield g : metric [dd]\n");
    REQUIRE_THROWS_AS(apply_field_file(cfg, wrong), Error);  // dim mismatch

    FieldFile role = parse_text("chart t r theta phi\nfield g : frobnicator [dd]\n");
    REQUIRE_THROWS_AS(apply_field_file(cfg, role), Error);

    FieldFile okff = parse_text(kSchwarzschild);
    REQUIRE_THROWS_AS(apply_field_file(cfg, okff, "", {{"Q", ex_num(1)}}), Error);
}

TEST_CASE("metric blocks mirror symmetric components") {
    const char* text = R"(chart t x
field g : metric [dd]
  [0 1] = x
  [0 0] = -1
  [1 1] = 1
)";
    Chart ch = Chart::make("c2", {"t", "x"});
    auto ctx = JetContext::make(ch, {{"g", {2, 2}, IndexSym::FirstTwo}});
    FieldConfig cfg(ctx);
    std::istringstream in(text);
    apply_field_file(cfg, parse_field_file(in, "inline"));
    REQUIRE(cfg.eval_at(ctx->jet_expr(0, {1, 0}), {0, 0.7}) == Catch::Approx(0.7));
}
