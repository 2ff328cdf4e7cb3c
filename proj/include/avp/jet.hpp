#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "avp/chart.hpp"
#include "avp/expr.hpp"
#include "avp/tensor.hpp"

namespace avp {

// Index symmetry a field carries among its component slots. Only the cases
// the catalog needs: a metric is symmetric in its two slots, a connection in
// its last two.
enum class IndexSym : std::uint8_t { None, FirstTwo, LastTwo };

struct FieldSpec {
    std::string name;
    std::vector<int> dims;  // component extents; empty for a scalar field
    IndexSym sym = IndexSym::None;

    std::size_t component_count() const {
        std::size_t n = 1;
        for (int d : dims) n *= static_cast<std::size_t>(d);
        return n;
    }
};

// Interns jet symbols y^i_{comp, derivs} for a list of fields over a chart.
// Derivative multi-indices are kept sorted (partials commute); symmetric
// component pairs share one symbol. Symbols carry their own total-derivative
// rule, so expression code stays agnostic of this bookkeeping.
class JetContext : public std::enable_shared_from_this<JetContext> {
  public:
    static std::shared_ptr<JetContext> make(Chart chart, std::vector<FieldSpec> fields) {
        auto p = std::shared_ptr<JetContext>(new JetContext());
        p->chart_ = std::move(chart);
        p->fields_ = std::move(fields);
        return p;
    }

    const Chart& chart() const { return chart_; }
    int dim() const { return chart_.dim(); }
    const std::vector<FieldSpec>& fields() const { return fields_; }

    int field_index(const std::string& name) const {
        for (std::size_t i = 0; i < fields_.size(); ++i)
            if (fields_[i].name == name) return static_cast<int>(i);
        return -1;
    }

    struct JetKey {
        int field;
        std::vector<int> comp;
        std::vector<int> derivs;
        auto operator<=>(const JetKey&) const = default;
    };

    SymbolPtr jet(int field, std::vector<int> comp, std::vector<int> derivs) {
        canonicalize_comp(fields_[field], comp);
        std::sort(derivs.begin(), derivs.end());
        JetKey key{field, std::move(comp), std::move(derivs)};
        auto it = interned_.find(key);
        if (it != interned_.end()) return it->second;

        auto s = std::make_shared<Symbol>(SymKind::JetField, mangle(key));
        auto self = shared_from_this();
        JetKey base = key;
        s->total_rule = [self, base](int mu) -> ExprPtr {
            JetKey k = base;
            k.derivs.push_back(mu);
            return ex_sym(self->jet(k.field, k.comp, k.derivs));
        };
        keys_.emplace(s.get(), key);
        interned_.emplace(std::move(key), s);
        return s;
    }

    ExprPtr jet_expr(int field, std::vector<int> comp, std::vector<int> derivs = {}) {
        return ex_sym(jet(field, std::move(comp), std::move(derivs)));
    }

    // 0-jet component tensor of a field, e.g. the symbols g_{ab}.
    Tensor base_tensor(int field) {
        Tensor t(fields_[field].dims);
        for_indices(fields_[field].dims, [&](const std::vector<int>& idx) {
            t[idx] = jet_expr(field, idx);
        });
        return t;
    }

    // All interned symbols of a given field (inspection, resolvers).
    const std::map<JetKey, SymbolPtr>& interned() const { return interned_; }

    // Reverse lookup; null when the symbol was not interned here. Raw keys are
    // safe: interned_ keeps every symbol alive as long as the context.
    const JetKey* key_of(const Symbol* s) const {
        auto it = keys_.find(s);
        return it == keys_.end() ? nullptr : &it->second;
    }

    static void canonicalize_comp(const FieldSpec& f, std::vector<int>& comp) {
        if (f.sym == IndexSym::FirstTwo && comp.size() >= 2 && comp[0] > comp[1])
            std::swap(comp[0], comp[1]);
        if (f.sym == IndexSym::LastTwo && comp.size() >= 2) {
            auto n = comp.size();
            if (comp[n - 2] > comp[n - 1]) std::swap(comp[n - 2], comp[n - 1]);
        }
    }

  private:
    JetContext() = default;

    std::string mangle(const JetKey& k) const {
        std::string s = fields_[k.field].name;
        if (!k.comp.empty()) {
            s += "_";
            for (int c : k.comp) s += std::to_string(c);
        }
        if (!k.derivs.empty()) {
            s += "_d";
            for (int d : k.derivs) s += std::to_string(d);
        }
        return s;
    }

    Chart chart_;
    std::vector<FieldSpec> fields_;
    std::map<JetKey, SymbolPtr> interned_;
    std::map<const Symbol*, JetKey> keys_;
};

using JetContextPtr = std::shared_ptr<JetContext>;

}  // namespace avp
