#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "avp/expr.hpp"

namespace avp {

// Flattens expression DAGs into a register program so repeated evaluation
// (quadrature grids, sample sweeps) skips tree walking and hash lookups.
// Shared subexpressions are computed once per point.
class Tape {
  public:
    Tape(const std::vector<ExprPtr>& roots, const std::vector<const Symbol*>& inputs) {
        for (std::size_t i = 0; i < inputs.size(); ++i) input_slot_[inputs[i]] = static_cast<int>(i);
        for (const auto& r : roots) out_regs_.push_back(compile(r));
        scratch_.resize(next_reg_);
    }

    std::size_t arity() const { return input_slot_.size(); }
    std::size_t outputs() const { return out_regs_.size(); }

    void eval(const double* in, double* out) const {
        double* r = scratch_.data();
        for (const auto& ins : code_) {
            switch (ins.k) {
                case K::Const: r[ins.dst] = ins.c; break;
                case K::Input: r[ins.dst] = in[ins.a]; break;
                case K::Add: r[ins.dst] = r[ins.a] + r[ins.b]; break;
                case K::Mul: r[ins.dst] = r[ins.a] * r[ins.b]; break;
                case K::PowI: {
                    const double b = r[ins.a];
                    if (b == 0.0 && ins.c < 0) throw DomainError("division by zero");
                    r[ins.dst] = std::pow(b, ins.c);
                    break;
                }
                case K::PowR: {
                    const double b = r[ins.a];
                    if (b < 0.0) throw DomainError("fractional power of negative value");
                    r[ins.dst] = std::pow(b, ins.c);
                    break;
                }
                case K::Sin: r[ins.dst] = std::sin(r[ins.a]); break;
                case K::Cos: r[ins.dst] = std::cos(r[ins.a]); break;
                case K::Exp: r[ins.dst] = std::exp(r[ins.a]); break;
                case K::Ln: {
                    const double v = r[ins.a];
                    if (v <= 0) throw DomainError("ln of non-positive value");
                    r[ins.dst] = std::log(v);
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < out_regs_.size(); ++i) out[i] = r[out_regs_[i]];
    }

    double eval1(const double* in) const {
        double v;
        eval(in, &v);
        return v;
    }

  private:
    enum class K : std::uint8_t { Const, Input, Add, Mul, PowI, PowR, Sin, Cos, Exp, Ln };
    struct Instr {
        K k;
        int dst = 0, a = 0, b = 0;
        double c = 0;
    };

    int emit(Instr ins) {
        ins.dst = next_reg_++;
        code_.push_back(ins);
        return ins.dst;
    }

    int compile(const ExprPtr& e) {
        auto it = reg_.find(e.get());
        if (it != reg_.end()) return it->second;
        int r = -1;
        switch (e->op) {
            case Op::Num: r = emit({K::Const, 0, 0, 0, e->rat.to_double()}); break;
            case Op::NumF: r = emit({K::Const, 0, 0, 0, e->fval}); break;
            case Op::Sym: {
                auto slot = input_slot_.find(e->sym.get());
                if (slot == input_slot_.end())
                    throw EvalError("symbol '" + e->sym->name + "' is not a tape input");
                r = emit({K::Input, 0, slot->second, 0, 0});
                break;
            }
            case Op::Add:
            case Op::Mul: {
                const K k = e->op == Op::Add ? K::Add : K::Mul;
                r = compile(e->kids[0]);
                for (std::size_t i = 1; i < e->kids.size(); ++i)
                    r = emit({k, 0, r, compile(e->kids[i]), 0});
                break;
            }
            case Op::Pow: {
                int a = compile(e->kids[0]);
                if (e->rat.is_integer())
                    r = emit({K::PowI, 0, a, 0, static_cast<double>(e->rat.num)});
                else
                    r = emit({K::PowR, 0, a, 0, e->rat.to_double()});
                break;
            }
            case Op::Sin: r = emit({K::Sin, 0, compile(e->kids[0]), 0, 0}); break;
            case Op::Cos: r = emit({K::Cos, 0, compile(e->kids[0]), 0, 0}); break;
            case Op::Exp: r = emit({K::Exp, 0, compile(e->kids[0]), 0, 0}); break;
            case Op::Ln: r = emit({K::Ln, 0, compile(e->kids[0]), 0, 0}); break;
        }
        reg_.emplace(e.get(), r);
        roots_keepalive_.push_back(e);  // pin nodes so pointer keys stay valid
        return r;
    }

    std::unordered_map<const Symbol*, int> input_slot_;
    std::unordered_map<const ExprNode*, int> reg_;
    std::vector<ExprPtr> roots_keepalive_;
    std::vector<Instr> code_;
    std::vector<int> out_regs_;
    int next_reg_ = 0;
    mutable std::vector<double> scratch_;
};

}  // namespace avp
