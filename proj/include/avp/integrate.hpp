#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "avp/chart.hpp"
#include "avp/quadrature.hpp"
#include "avp/tape.hpp"
#include "avp/tensor.hpp"

namespace avp {

// Compiles expressions whose free symbols are chart coordinates plus bound
// parameters; evaluation then takes a full coordinate point.
class ChartFunction {
  public:
    ChartFunction(const Chart& ch, const std::vector<ExprPtr>& roots, const Binding& params)
        : m_(ch.dim()) {
        std::vector<const Symbol*> inputs;
        for (const auto& c : ch.coords) inputs.push_back(c.get());
        std::vector<SymbolPtr> syms;
        for (const auto& r : roots) collect_symbols(r, syms);
        std::vector<const Symbol*> extra;
        for (const auto& s : syms) {
            if (s->kind == SymKind::Coordinate) continue;
            auto it = params.find(s.get());
            if (it == params.end()) throw EvalError("unbound symbol '" + s->name + "' in chart function");
            if (std::find(extra.begin(), extra.end(), s.get()) == extra.end()) extra.push_back(s.get());
        }
        std::sort(extra.begin(), extra.end(),
                  [](const Symbol* a, const Symbol* b) { return a->name < b->name; });
        for (const Symbol* s : extra) {
            inputs.push_back(s);
            tail_.push_back(params.at(s));
        }
        tape_.emplace(roots, inputs);
        buf_.resize(inputs.size());
    }

    // point: chart coordinates, length m
    void eval(const double* point, double* out) const {
        std::copy(point, point + m_, buf_.begin());
        std::copy(tail_.begin(), tail_.end(), buf_.begin() + m_);
        tape_->eval(buf_.data(), out);
    }
    double eval1(const double* point) const {
        double v;
        eval(point, &v);
        return v;
    }

  private:
    int m_;
    std::optional<Tape> tape_;
    std::vector<double> tail_;
    mutable std::vector<double> buf_;
};

// A closed coordinate 2-surface: two coordinates pinned, the rest sweep a box.
struct SurfaceSpec {
    int fix_a = 0, fix_b = 1;
    double val_a = 0, val_b = 0;
    std::vector<std::pair<double, double>> bounds;  // free coordinates, ascending order
};

inline std::vector<int> surface_free_coords(const Chart& ch, const SurfaceSpec& s) {
    std::vector<int> free;
    for (int i = 0; i < ch.dim(); ++i)
        if (i != s.fix_a && i != s.fix_b) free.push_back(i);
    return free;
}

// integral over S of U^{mn} ds_{mn}: only ds_{ab} survives the pullback, with
// the sign of the permutation (a, b, free...) of (0...m-1); the double sum
// over index orders contributes the factor 2.
inline IntegralResult integrate_bivector_on_surface(const Chart& ch, const Tensor& U,
                                                    const SurfaceSpec& spec, const Binding& params,
                                                    int n) {
    std::vector<int> free = surface_free_coords(ch, spec);
    std::vector<int> perm{spec.fix_a, spec.fix_b};
    perm.insert(perm.end(), free.begin(), free.end());
    const int sign = levi_civita(perm);
    if (!sign) throw Error("degenerate surface spec");

    ChartFunction f(ch, {U(spec.fix_a, spec.fix_b)}, params);
    std::vector<double> pt(ch.dim());
    pt[spec.fix_a] = spec.val_a;
    pt[spec.fix_b] = spec.val_b;
    auto integrand = [&](const double* q) {
        for (std::size_t k = 0; k < free.size(); ++k) pt[free[k]] = q[k];
        return f.eval1(pt.data());
    };
    IntegralResult r = gl_integrate(integrand, spec.bounds, n);
    r.value *= 2.0 * sign;
    r.error *= 2.0;
    return r;
}

// A coordinate region of codimension one: a single pinned coordinate.
struct RegionSpec {
    int fix = 0;
    double val = 0;
    std::vector<std::pair<double, double>> bounds;  // free coordinates, ascending order
};

// integral over the region of a^l ds_l: only ds_fix survives.
inline IntegralResult integrate_vector_on_region(const Chart& ch, const Tensor& alpha,
                                                 const RegionSpec& spec, const Binding& params,
                                                 int n) {
    std::vector<int> free;
    for (int i = 0; i < ch.dim(); ++i)
        if (i != spec.fix) free.push_back(i);
    std::vector<int> perm{spec.fix};
    perm.insert(perm.end(), free.begin(), free.end());
    const int sign = levi_civita(perm);

    ChartFunction f(ch, {alpha(spec.fix)}, params);
    std::vector<double> pt(ch.dim());
    pt[spec.fix] = spec.val;
    auto integrand = [&](const double* q) {
        for (std::size_t k = 0; k < free.size(); ++k) pt[free[k]] = q[k];
        return f.eval1(pt.data());
    };
    IntegralResult r = gl_integrate(integrand, spec.bounds, n);
    r.value *= sign;
    return r;
}

}  // namespace avp
