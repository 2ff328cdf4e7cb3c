#pragma once

#include <array>
#include <memory>
#include <mutex>

#include "avp/geometry.hpp"
#include "avp/theory.hpp"

namespace avp::theories {

inline Chart default_gravity_chart() { return Chart::make("spherical", {"t", "r", "theta", "phi"}); }

inline TheoryField metric_field(int m, const std::string& name = "g") {
    return {name, FieldSpec{name, {m, m}, IndexSym::FirstTwo}, TheoryField::Kind::Metric, {}};
}

inline TheoryField connection_field(int m, const std::string& name = "Gamma") {
    return {name, FieldSpec{name, {m, m, m}, IndexSym::LastTwo}, TheoryField::Kind::Connection, {}};
}

// Metric-derived objects on the jet symbols of one view, built once.
// Signature is Lorentzian throughout the catalog: sqrtg = sqrt(-det g).
struct MetricGeo {
    Tensor g;
    ExprPtr det;
    ExprPtr sqrtg;
    Tensor ginv;    // g^{ab}
    Tensor gdens;   // sqrtg g^{ab}
    Tensor gamma;   // Christoffel [l][a][b]
    Tensor u;       // u^l_{(ab)}
    Tensor riem;    // R^l_{b mn}
    Tensor ric;     // R_{ab}
    ExprPtr scal;   // R
    Tensor einmix;  // G^mu_sigma
};

enum class GeoLevel { Inverse, Connection, Curvature };

inline MetricGeo build_metric_geo(const Chart& ch, Tensor g,
                                  GeoLevel level = GeoLevel::Curvature) {
    MetricGeo G;
    G.g = std::move(g);
    G.det = simplify(det_metric(G.g));
    G.sqrtg = ex_sqrt(ex_neg(G.det));
    G.ginv = inverse_metric(G.g);
    if (level == GeoLevel::Inverse) return G;
    const int m = ch.dim();
    G.gdens = Tensor({m, m});
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) G.gdens(a, b) = simplify(ex_mul2(G.sqrtg, G.ginv(a, b)));
    G.gamma = christoffel(ch, G.g, G.ginv);
    G.u = u_tensor(G.gamma);
    if (level == GeoLevel::Connection) return G;
    G.riem = riemann(ch, G.gamma);
    G.ric = ricci_from_riemann(G.riem);
    G.scal = scalar_curvature(G.ginv, G.ric);
    G.einmix = einstein_mixed(G.ginv, G.ric, G.scal);
    return G;
}

// Lazy two-view cache for theory-owned geometry.
template <class Geo>
class ViewCache {
  public:
    template <class Build>
    const Geo& get(int view, Build&& build) const {
        std::call_once(once_[view], [&] { slot_[view] = std::make_unique<Geo>(build(view)); });
        return *slot_[view];
    }

  private:
    mutable std::array<std::once_flag, Theory::kViews> once_;
    mutable std::array<std::unique_ptr<Geo>, Theory::kViews> slot_;
};

}  // namespace avp::theories
