#pragma once

#include <initializer_list>
#include <numeric>
#include <vector>

#include "avp/expr.hpp"

namespace avp {

// Dense component holder with symbolic entries, row-major. Rank and extents
// are dynamic; all entries start as exact zero.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<int> dims) : dims_(std::move(dims)) {
        std::size_t n = 1;
        for (int d : dims_) n *= static_cast<std::size_t>(d);
        data_.assign(n, ex_zero());
    }

    const std::vector<int>& dims() const { return dims_; }
    int rank() const { return static_cast<int>(dims_.size()); }
    std::size_t size() const { return data_.size(); }

    ExprPtr& operator[](const std::vector<int>& idx) { return data_[flat(idx)]; }
    const ExprPtr& operator[](const std::vector<int>& idx) const { return data_[flat(idx)]; }

    template <class... I>
    ExprPtr& operator()(I... is) {
        return data_[flat({static_cast<int>(is)...})];
    }
    template <class... I>
    const ExprPtr& operator()(I... is) const {
        return data_[flat({static_cast<int>(is)...})];
    }

    ExprPtr& flat_at(std::size_t i) { return data_[i]; }
    const ExprPtr& flat_at(std::size_t i) const { return data_[i]; }

    std::size_t flat(std::initializer_list<int> idx) const {
        std::size_t f = 0;
        auto it = idx.begin();
        for (std::size_t k = 0; k < dims_.size(); ++k, ++it) f = f * dims_[k] + *it;
        return f;
    }
    std::size_t flat(const std::vector<int>& idx) const {
        std::size_t f = 0;
        for (std::size_t k = 0; k < dims_.size(); ++k) f = f * dims_[k] + idx[k];
        return f;
    }

  private:
    std::vector<int> dims_;
    std::vector<ExprPtr> data_;
};

// Odometer over a dense index range.
class MultiIndex {
  public:
    explicit MultiIndex(const std::vector<int>& dims) : dims_(dims), idx_(dims.size(), 0) {
        done_ = dims_.empty() ? false : false;
        for (int d : dims_)
            if (d == 0) done_ = true;
    }
    bool done() const { return done_; }
    const std::vector<int>& operator*() const { return idx_; }
    void next() {
        for (int k = static_cast<int>(dims_.size()) - 1; k >= 0; --k) {
            if (++idx_[k] < dims_[k]) return;
            idx_[k] = 0;
        }
        done_ = true;
    }

  private:
    std::vector<int> dims_;
    std::vector<int> idx_;
    bool done_ = false;
};

template <class F>
void for_indices(const std::vector<int>& dims, F&& f) {
    for (MultiIndex mi(dims); !mi.done(); mi.next()) f(*mi);
}

// Totally antisymmetric Levi-Civita symbol, values in {-1, 0, 1}.
inline int levi_civita(const std::vector<int>& idx) {
    int sign = 1;
    std::vector<int> v = idx;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[i] == v[j]) return 0;
            if (v[i] > v[j]) {
                std::swap(v[i], v[j]);
                sign = -sign;
            }
        }
    return sign;
}

}  // namespace avp
