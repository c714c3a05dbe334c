#include "ad/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "common/error.hpp"

namespace vdea::ad {

const Tensor& Var::val() const {
    require(tape_ != nullptr, "tape: use of empty Var");
    return tape_->value(node_);
}

const Tensor& Tape::value(int node) const {
    require(node >= 0 && node < static_cast<int>(nodes_.size()),
            "tape: Var refers to a cleared tape");
    return nodes_[node].val();
}

int Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

std::vector<double>& Tape::adjoint(int node) {
    auto& adj = nodes_[node].adj;
    if (adj.empty()) adj.assign(nodes_[node].val().size(), 0.0);
    return adj;
}

Var Tape::constant(Tensor t) {
    Node n;
    t.requires_grad = false;
    n.owned = std::move(t);
    n.needs_grad = false;
    return Var(this, push(std::move(n)));
}

Var Tape::param(Tensor& external) {
    require(external.requires_grad, "tape: param() tensor must require grad");
    Node n;
    n.external = &external;
    n.needs_grad = true;
    return Var(this, push(std::move(n)));
}

void Tape::backward(Var loss) {
    require(loss.tape_ == this, "tape: loss Var belongs to another tape");
    require(loss.val().is_scalar(), "tape: backward requires a scalar loss");
    adjoint(loss.node_)[0] = 1.0;
    for (int i = loss.node_; i >= 0; --i) {
        Node& node = nodes_[i];
        if (!node.needs_grad || !node.backprop || node.adj.empty()) continue;
        node.backprop(*this, i);
    }
    for (auto& node : nodes_) {
        if (!node.external) continue;
        if (node.adj.empty()) node.adj.assign(node.val().size(), 0.0);
        node.external->grad = std::move(node.adj);
    }
    nodes_.clear();
}

namespace detail {

struct Ops {
    static Tape* tape_of(Var v) {
        require(v.tape_ != nullptr, "tape: op on empty Var");
        return v.tape_;
    }

    static void same_tape(Var a, Var b) {
        require(a.tape_ == b.tape_, "tape: operands from different tapes");
    }

    static int node(Var v) { return v.node_; }
    static bool needs(Tape& t, int node) { return t.nodes_[node].needs_grad; }
    static const Tensor& val(Tape& t, int node) { return t.nodes_[node].val(); }
    static const std::vector<double>& self_adj(Tape& t, int node) { return t.nodes_[node].adj; }
    static std::vector<double>& adj(Tape& t, int node) { return t.adjoint(node); }

    static Var make(Tape& t, Tensor value, std::vector<int> parents,
                    std::function<void(Tape&, int)> backprop) {
        Tape::Node n;
        n.owned = std::move(value);
        n.parents = std::move(parents);
        for (int p : n.parents) {
            if (t.nodes_[p].needs_grad) {
                n.needs_grad = true;
                break;
            }
        }
        if (n.needs_grad) n.backprop = std::move(backprop);
        return Var(&t, t.push(std::move(n)));
    }

    // index into a possibly broadcast operand
    static std::size_t bidx(const Tensor& v, std::size_t i, std::size_t j) {
        return (v.rows() == 1 ? 0 : i) * v.cols() + (v.cols() == 1 ? 0 : j);
    }

    enum class BinOp { add, sub, mul, div };

    static Var binary(Var va, Var vb, BinOp op, const char* name) {
        same_tape(va, vb);
        Tape& t = *tape_of(va);
        const Tensor& a = va.val();
        const Tensor& b = vb.val();
        const std::size_t R = std::max(a.rows(), b.rows());
        const std::size_t C = std::max(a.cols(), b.cols());
        require((a.rows() == R || a.rows() == 1) && (a.cols() == C || a.cols() == 1) &&
                    (b.rows() == R || b.rows() == 1) && (b.cols() == C || b.cols() == 1),
                std::string(name) + ": shapes do not broadcast");
        Tensor out(R, C);
        for (std::size_t i = 0; i < R; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                const double x = a[bidx(a, i, j)];
                const double y = b[bidx(b, i, j)];
                double r = 0.0;
                switch (op) {
                    case BinOp::add: r = x + y; break;
                    case BinOp::sub: r = x - y; break;
                    case BinOp::mul: r = x * y; break;
                    case BinOp::div:
                        if (y == 0.0) throw NumericError("divide: zero denominator");
                        r = x / y;
                        break;
                }
                out.at(i, j) = r;
            }
        }
        const int pa = va.node_;
        const int pb = vb.node_;
        return make(t, std::move(out), {pa, pb}, [pa, pb, op, R, C](Tape& tp, int self) {
            const auto& dy = tp.nodes_[self].adj;
            const Tensor& a2 = tp.nodes_[pa].val();
            const Tensor& b2 = tp.nodes_[pb].val();
            const bool na = needs(tp, pa);
            const bool nb = needs(tp, pb);
            auto* da = na ? &tp.adjoint(pa) : nullptr;
            auto* db = nb ? &tp.adjoint(pb) : nullptr;
            for (std::size_t i = 0; i < R; ++i) {
                for (std::size_t j = 0; j < C; ++j) {
                    const double g = dy[i * C + j];
                    const std::size_t ia = bidx(a2, i, j);
                    const std::size_t ib = bidx(b2, i, j);
                    switch (op) {
                        case BinOp::add:
                            if (da) (*da)[ia] += g;
                            if (db) (*db)[ib] += g;
                            break;
                        case BinOp::sub:
                            if (da) (*da)[ia] += g;
                            if (db) (*db)[ib] -= g;
                            break;
                        case BinOp::mul:
                            if (da) (*da)[ia] += g * b2[ib];
                            if (db) (*db)[ib] += g * a2[ia];
                            break;
                        case BinOp::div: {
                            const double y = b2[ib];
                            if (da) (*da)[ia] += g / y;
                            if (db) (*db)[ib] -= g * a2[ia] / (y * y);
                            break;
                        }
                    }
                }
            }
        });
    }

    // df receives (x, y) with y = f(x)
    template <class F, class DF>
    static Var unary(Var va, F f, DF df) {
        Tape& t = *tape_of(va);
        const Tensor& a = va.val();
        Tensor out(a.rows(), a.cols());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
        const int pa = va.node_;
        return make(t, std::move(out), {pa}, [pa, df](Tape& tp, int self) {
            if (!needs(tp, pa)) return;
            const auto& dy = tp.nodes_[self].adj;
            const Tensor& x = tp.nodes_[pa].val();
            const Tensor& y = tp.nodes_[self].val();
            auto& da = tp.adjoint(pa);
            for (std::size_t i = 0; i < x.size(); ++i) da[i] += dy[i] * df(x[i], y[i]);
        });
    }

    static Var axis_sum(Var va, int axis) {  // axis 1: RxC -> Rx1; axis 0: -> 1xC
        Tape& t = *tape_of(va);
        const Tensor& a = va.val();
        const std::size_t R = a.rows();
        const std::size_t C = a.cols();
        Tensor out = (axis == 1) ? Tensor(R, 1) : Tensor(1, C);
        for (std::size_t i = 0; i < R; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                if (axis == 1)
                    out.at(i, 0) += a.at(i, j);
                else
                    out.at(0, j) += a.at(i, j);
            }
        }
        const int pa = va.node_;
        return make(t, std::move(out), {pa}, [pa, axis, R, C](Tape& tp, int self) {
            if (!needs(tp, pa)) return;
            const auto& dy = tp.nodes_[self].adj;
            auto& da = tp.adjoint(pa);
            for (std::size_t i = 0; i < R; ++i)
                for (std::size_t j = 0; j < C; ++j)
                    da[i * C + j] += (axis == 1) ? dy[i] : dy[j];
        });
    }

    static Var concat(std::span<const Var> parts, int axis) {
        require(!parts.empty(), "concat: no operands");
        Tape& t = *tape_of(parts[0]);
        std::size_t R = parts[0].rows();
        std::size_t C = parts[0].cols();
        std::vector<int> parents;
        parents.reserve(parts.size());
        std::size_t total = 0;
        for (const Var& p : parts) {
            same_tape(parts[0], p);
            if (axis == 0) {
                require(p.cols() == C, "concat_rows: column mismatch");
                total += p.rows();
            } else {
                require(p.rows() == R, "concat_cols: row mismatch");
                total += p.cols();
            }
            parents.push_back(p.node_);
        }
        const std::size_t OR = (axis == 0) ? total : R;
        const std::size_t OC = (axis == 0) ? C : total;
        Tensor out(OR, OC);
        std::size_t off = 0;
        for (const Var& p : parts) {
            const Tensor& v = p.val();
            for (std::size_t i = 0; i < v.rows(); ++i)
                for (std::size_t j = 0; j < v.cols(); ++j) {
                    if (axis == 0)
                        out.at(off + i, j) = v.at(i, j);
                    else
                        out.at(i, off + j) = v.at(i, j);
                }
            off += (axis == 0) ? v.rows() : v.cols();
        }
        return make(t, std::move(out), parents, [parents, axis, OC](Tape& tp, int self) {
            const auto& dy = tp.nodes_[self].adj;
            std::size_t off2 = 0;
            for (int p : parents) {
                const Tensor& v = tp.nodes_[p].val();
                if (needs(tp, p)) {
                    auto& dp = tp.adjoint(p);
                    for (std::size_t i = 0; i < v.rows(); ++i)
                        for (std::size_t j = 0; j < v.cols(); ++j) {
                            const std::size_t oi = (axis == 0) ? off2 + i : i;
                            const std::size_t oj = (axis == 0) ? j : off2 + j;
                            dp[i * v.cols() + j] += dy[oi * OC + oj];
                        }
                }
                off2 += (axis == 0) ? v.rows() : v.cols();
            }
        });
    }
};

}  // namespace detail

using detail::Ops;

Var matmul(Var va, Var vb) {
    Ops::same_tape(va, vb);
    Tape& t = *Ops::tape_of(va);
    const Tensor& a = va.val();
    const Tensor& b = vb.val();
    require(a.cols() == b.rows(), "matmul: inner dimensions differ");
    const std::size_t M = a.rows(), K = a.cols(), N = b.cols();
    Tensor out(M, N);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t k = 0; k < K; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < N; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    const int pa = Ops::node(va), pb = Ops::node(vb);
    return Ops::make(t, std::move(out), {pa, pb}, [pa, pb, M, K, N](Tape& tp, int self) {
        const auto& dy = Ops::self_adj(tp, self);
        const Tensor& a2 = Ops::val(tp, pa);
        const Tensor& b2 = Ops::val(tp, pb);
        if (Ops::needs(tp, pa)) {  // dA = dY B^T
            auto& da = Ops::adj(tp, pa);
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t k = 0; k < K; ++k) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < N; ++j) acc += dy[i * N + j] * b2.at(k, j);
                    da[i * K + k] += acc;
                }
        }
        if (Ops::needs(tp, pb)) {  // dB = A^T dY
            auto& db = Ops::adj(tp, pb);
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t k = 0; k < K; ++k) {
                    const double aik = a2.at(i, k);
                    if (aik == 0.0) continue;
                    for (std::size_t j = 0; j < N; ++j) db[k * N + j] += aik * dy[i * N + j];
                }
        }
    });
}

Var transpose(Var va) {
    Tape& t = *Ops::tape_of(va);
    const Tensor& a = va.val();
    const std::size_t R = a.rows(), C = a.cols();
    Tensor out(C, R);
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) out.at(j, i) = a.at(i, j);
    const int pa = Ops::node(va);
    return Ops::make(t, std::move(out), {pa}, [pa, R, C](Tape& tp, int self) {
        if (!Ops::needs(tp, pa)) return;
        const auto& dy = Ops::self_adj(tp, self);
        auto& da = Ops::adj(tp, pa);
        for (std::size_t i = 0; i < R; ++i)
            for (std::size_t j = 0; j < C; ++j) da[i * C + j] += dy[j * R + i];
    });
}

Var add(Var a, Var b) { return Ops::binary(a, b, Ops::BinOp::add, "add"); }
Var sub(Var a, Var b) { return Ops::binary(a, b, Ops::BinOp::sub, "sub"); }
Var mul(Var a, Var b) { return Ops::binary(a, b, Ops::BinOp::mul, "mul"); }
Var divide(Var a, Var b) { return Ops::binary(a, b, Ops::BinOp::div, "divide"); }

Var add_scalar(Var a, double s) {
    return Ops::unary(a, [s](double x) { return x + s; },
                      [](double, double) { return 1.0; });
}

Var mul_scalar(Var a, double s) {
    return Ops::unary(a, [s](double x) { return x * s; },
                      [s](double, double) { return s; });
}

Var neg(Var a) {
    return Ops::unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Var exp(Var a) {
    return Ops::unary(a, [](double x) { return std::exp(x); },
                      [](double, double y) { return y; });
}

Var log(Var a) {
    for (double v : a.val().values())
        if (v <= 0.0) throw NumericError("log: non-positive operand");
    return Ops::unary(a, [](double x) { return std::log(x); },
                      [](double x, double) { return 1.0 / x; });
}

Var sigmoid(Var a) {
    auto f = [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
    };
    return Ops::unary(a, f, [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
    return Ops::unary(a, [](double x) { return std::tanh(x); },
                      [](double, double y) { return 1.0 - y * y; });
}

Var softplus(Var a) {
    auto f = [](double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
    auto df = [](double x, double) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
    };
    return Ops::unary(a, f, df);
}

Var square(Var a) {
    return Ops::unary(a, [](double x) { return x * x; },
                      [](double x, double) { return 2.0 * x; });
}

Var sqrt(Var a) {
    for (double v : a.val().values())
        if (v < 0.0) throw NumericError("sqrt: negative operand");
    return Ops::unary(a, [](double x) { return std::sqrt(x); },
                      [](double, double y) { return 0.5 / y; });
}

Var clamp(Var a, double lo, double hi) {
    require(lo <= hi, "clamp: lo > hi");
    return Ops::unary(a, [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
                      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Var row_sum(Var a) { return Ops::axis_sum(a, 1); }
Var col_sum(Var a) { return Ops::axis_sum(a, 0); }

Var sum(Var va) {
    Tape& t = *Ops::tape_of(va);
    const Tensor& a = va.val();
    double acc = 0.0;
    for (double v : a.values()) acc += v;
    const int pa = Ops::node(va);
    return Ops::make(t, Tensor::scalar(acc), {pa}, [pa](Tape& tp, int self) {
        if (!Ops::needs(tp, pa)) return;
        const double g = Ops::self_adj(tp, self)[0];
        auto& da = Ops::adj(tp, pa);
        for (double& d : da) d += g;
    });
}

Var mean(Var va) {
    Tape& t = *Ops::tape_of(va);
    const Tensor& a = va.val();
    require(a.size() > 0, "mean: empty tensor");
    double acc = 0.0;
    for (double v : a.values()) acc += v;
    const double inv = 1.0 / static_cast<double>(a.size());
    const int pa = Ops::node(va);
    return Ops::make(t, Tensor::scalar(acc * inv), {pa}, [pa, inv](Tape& tp, int self) {
        if (!Ops::needs(tp, pa)) return;
        const double g = Ops::self_adj(tp, self)[0] * inv;
        auto& da = Ops::adj(tp, pa);
        for (double& d : da) d += g;
    });
}

Var softmax(Var va, int axis) {
    require(axis == 0 || axis == 1, "softmax: axis must be 0 or 1");
    Tape& t = *Ops::tape_of(va);
    const Tensor& a = va.val();
    const std::size_t R = a.rows(), C = a.cols();
    Tensor out(R, C);
    const std::size_t lanes = (axis == 1) ? R : C;
    const std::size_t len = (axis == 1) ? C : R;
    auto at = [&](std::size_t lane, std::size_t k) -> std::size_t {
        return (axis == 1) ? lane * C + k : k * C + lane;
    };
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        double m = a[at(lane, 0)];
        for (std::size_t k = 1; k < len; ++k) m = std::max(m, a[at(lane, k)]);
        double z = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double e = std::exp(a[at(lane, k)] - m);
            out[at(lane, k)] = e;
            z += e;
        }
        for (std::size_t k = 0; k < len; ++k) out[at(lane, k)] /= z;
    }
    const int pa = Ops::node(va);
    return Ops::make(t, std::move(out), {pa}, [pa, axis, R, C](Tape& tp, int self) {
        if (!Ops::needs(tp, pa)) return;
        const auto& dy = Ops::self_adj(tp, self);
        const Tensor& s = Ops::val(tp, self);
        auto& da = Ops::adj(tp, pa);
        const std::size_t lanes = (axis == 1) ? R : C;
        const std::size_t len = (axis == 1) ? C : R;
        auto at = [&](std::size_t lane, std::size_t k) -> std::size_t {
            return (axis == 1) ? lane * C + k : k * C + lane;
        };
        for (std::size_t lane = 0; lane < lanes; ++lane) {
            double dot = 0.0;
            for (std::size_t k = 0; k < len; ++k) dot += dy[at(lane, k)] * s[at(lane, k)];
            for (std::size_t k = 0; k < len; ++k)
                da[at(lane, k)] += s[at(lane, k)] * (dy[at(lane, k)] - dot);
        }
    });
}

Var concat_rows(std::span<const Var> parts) { return Ops::concat(parts, 0); }
Var concat_cols(std::span<const Var> parts) { return Ops::concat(parts, 1); }

Var slice(Var va, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
    Tape& t = *Ops::tape_of(va);
    const Tensor& a = va.val();
    require(r0 < r1 && r1 <= a.rows() && c0 < c1 && c1 <= a.cols(), "slice: bad range");
    Tensor out(r1 - r0, c1 - c0);
    for (std::size_t i = r0; i < r1; ++i)
        for (std::size_t j = c0; j < c1; ++j) out.at(i - r0, j - c0) = a.at(i, j);
    const int pa = Ops::node(va);
    const std::size_t C = a.cols();
    return Ops::make(t, std::move(out), {pa}, [pa, r0, r1, c0, c1, C](Tape& tp, int self) {
        if (!Ops::needs(tp, pa)) return;
        const auto& dy = Ops::self_adj(tp, self);
        auto& da = Ops::adj(tp, pa);
        const std::size_t oc = c1 - c0;
        for (std::size_t i = r0; i < r1; ++i)
            for (std::size_t j = c0; j < c1; ++j)
                da[i * C + j] += dy[(i - r0) * oc + (j - c0)];
    });
}

}  // namespace vdea::ad
