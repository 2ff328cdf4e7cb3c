#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "avp/expr.hpp"

namespace avp {

// Gauss-Legendre rule on (-1, 1). Nodes from Newton iteration on P_n with
// the Tricomi initial guess; exact for polynomials of degree 2n-1.
class GaussLegendre {
  public:
    static const GaussLegendre& rule(int n) {
        static std::map<int, GaussLegendre> cache;
        auto it = cache.find(n);
        if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
        return it->second;
    }

    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& weights() const { return w_; }

  private:
    explicit GaussLegendre(int n) : x_(n), w_(n) {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double p0 = 0, p1 = 0;
            for (int it = 0; it < 100; ++it) {
                p0 = 1.0;
                p1 = 0.0;
                for (int k = 0; k < n; ++k) {  // recurrence up to P_n(x)
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
                }
                const double dp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            p0 = 1.0;
            p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
            }
            const double dp = n * (x * p0 - p1) / (x * x - 1.0);
            x_[i] = -x;
            x_[n - 1 - i] = x;
            w_[i] = w_[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    std::vector<double> x_, w_;
};

struct IntegralResult {
    double value = 0;
    double error = 0;  // conservative estimate from order refinement
};

// Product Gauss-Legendre over a box, f reads one point per call.
template <class F>
double gl_product(F&& f, const std::vector<std::pair<double, double>>& bounds, int n) {
    const int k = static_cast<int>(bounds.size());
    const auto& rule = GaussLegendre::rule(n);
    std::vector<int> idx(k, 0);
    std::vector<double> pt(k);
    double total = 0;
    for (;;) {
        double w = 1;
        for (int d = 0; d < k; ++d) {
            const double half = 0.5 * (bounds[d].second - bounds[d].first);
            const double mid = 0.5 * (bounds[d].second + bounds[d].first);
            pt[d] = mid + half * rule.nodes()[idx[d]];
            w *= half * rule.weights()[idx[d]];
        }
        total += w * f(pt.data());
        int d = k - 1;
        for (; d >= 0; --d) {
            if (++idx[d] < n) break;
            idx[d] = 0;
        }
        if (d < 0) break;
    }
    return total;
}

template <class F>
IntegralResult gl_integrate(F&& f, const std::vector<std::pair<double, double>>& bounds, int n) {
    IntegralResult r;
    r.value = gl_product(f, bounds, n);
    const double refined = gl_product(f, bounds, n + 8);
    r.error = std::abs(refined - r.value) + 1e-13 * (1.0 + std::abs(refined));
    r.value = refined;
    return r;
}

}  // namespace avp
