#pragma once

#include <string>
#include <vector>

#include "avp/expr.hpp"

namespace avp {

// Coordinate chart: an ordered list of coordinate symbols. Everything
// downstream (jets, geometry, quadrature) indexes coordinates by position.
struct Chart {
    std::string name;
    std::vector<SymbolPtr> coords;

    int dim() const { return static_cast<int>(coords.size()); }
    const SymbolPtr& coord(int i) const { return coords[i]; }
    ExprPtr coord_expr(int i) const { return ex_sym(coords[i]); }

    int index_of(const std::string& n) const {
        for (int i = 0; i < dim(); ++i)
            if (coords[i]->name == n) return i;
        return -1;
    }

    static Chart make(std::string name, const std::vector<std::string>& names) {
        Chart c;
        c.name = std::move(name);
        for (std::size_t i = 0; i < names.size(); ++i)
            c.coords.push_back(make_coordinate(names[i], static_cast<int>(i)));
        return c;
    }
};

// total coordinate derivative d/dx^mu
inline ExprPtr dmu(const Chart& ch, const ExprPtr& e, int mu) { return diff(e, ch.coords[mu]); }

}  // namespace avp
