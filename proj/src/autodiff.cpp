#include "gkp/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gkp/errors.hpp"

namespace gkp {
namespace {

// splitmix64; used for dropout masks so the tape owns no RNG object.
std::uint64_t next_u64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t& state) {
    return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

Tape::ValueRef Tape::push(Tensor value, std::function<void(Tape&, const Node&)> backprop) {
    Node n;
    n.grad = Tensor(value.shape(), 0.0);
    n.value = std::move(value);
    n.backprop = std::move(backprop);
    nodes_.push_back(std::move(n));
    return ValueRef{nodes_.size() - 1};
}

Tape::Node& Tape::node(ValueRef ref) {
    if (!ref.valid() || ref.index >= nodes_.size())
        throw ContractViolation("tape: invalid value reference");
    return nodes_[ref.index];
}

const Tape::Node& Tape::cnode(ValueRef ref) const {
    if (!ref.valid() || ref.index >= nodes_.size())
        throw ContractViolation("tape: invalid value reference");
    return nodes_[ref.index];
}

const Tensor& Tape::value(ValueRef ref) const { return cnode(ref).value; }

Tape::ValueRef Tape::constant(Tensor value) { return push(std::move(value), nullptr); }

Tape::ValueRef Tape::parameter(ParamStore& store, const std::string& name) {
    Tensor copy = store.param(name);
    ParamStore* bound = &store;
    return push(std::move(copy), [bound, name](Tape&, const Node& self) {
        Tensor& g = bound->grad(name);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
}

Tape::ValueRef Tape::matmul(ValueRef a, ValueRef b) {
    const Tensor& va = cnode(a).value;
    const Tensor& vb = cnode(b).value;
    if (va.rank() != 2 || vb.rank() != 2 || va.dim(1) != vb.dim(0))
        throw ContractViolation("matmul: shape mismatch");
    const std::size_t m = va.dim(0), k = va.dim(1), n = vb.dim(1);
    Tensor out({m, n}, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = va.at(i, p);
            if (aip == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += aip * vb.at(p, j);
        }
    const std::size_t ia = a.index, ib = b.index;
    return push(std::move(out), [ia, ib, m, k, n](Tape& t, const Node& self) {
        const Tensor& A = t.nodes_[ia].value;
        const Tensor& B = t.nodes_[ib].value;
        Tensor& dA = t.grad_of(ia);
        Tensor& dB = t.grad_of(ib);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double g = self.grad.at(i, j);
                if (g == 0.0) continue;
                for (std::size_t p = 0; p < k; ++p) {
                    dA.at(i, p) += g * B.at(p, j);
                    dB.at(p, j) += g * A.at(i, p);
                }
            }
    });
}

Tape::ValueRef Tape::spmm(const CsrMatrix& s, ValueRef h) {
    const Tensor& vh = cnode(h).value;
    if (vh.rank() != 2 || static_cast<std::size_t>(s.cols) != vh.dim(0))
        throw ContractViolation("spmm: shape mismatch");
    const std::size_t c = vh.dim(1);
    Tensor out({static_cast<std::size_t>(s.rows), c}, 0.0);
    for (int r = 0; r < s.rows; ++r)
        for (int e = s.row_ptr[r]; e < s.row_ptr[r + 1]; ++e) {
            const double w = s.values[e];
            const std::size_t col = static_cast<std::size_t>(s.col_idx[e]);
            for (std::size_t j = 0; j < c; ++j)
                out.at(r, j) += w * vh.at(col, j);
        }
    const std::size_t ih = h.index;
    CsrMatrix scopy = s;  // tape outlives the caller's matrix
    return push(std::move(out), [ih, scopy, c](Tape& t, const Node& self) {
        Tensor& dH = t.grad_of(ih);
        for (int r = 0; r < scopy.rows; ++r)
            for (int e = scopy.row_ptr[r]; e < scopy.row_ptr[r + 1]; ++e) {
                const double w = scopy.values[e];
                const std::size_t col = static_cast<std::size_t>(scopy.col_idx[e]);
                for (std::size_t j = 0; j < c; ++j)
                    dH.at(col, j) += w * self.grad.at(r, j);
            }
    });
}

Tape::ValueRef Tape::tanh_act(ValueRef x) {
    Tensor out = cnode(x).value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
    const std::size_t ix = x.index;
    return push(std::move(out), [ix](Tape& t, const Node& self) {
        Tensor& dX = t.grad_of(ix);
        for (std::size_t i = 0; i < dX.size(); ++i)
            dX[i] += self.grad[i] * (1.0 - self.value[i] * self.value[i]);
    });
}

Tape::ValueRef Tape::relu(ValueRef x) {
    Tensor out = cnode(x).value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
    const std::size_t ix = x.index;
    return push(std::move(out), [ix](Tape& t, const Node& self) {
        const Tensor& X = t.nodes_[ix].value;
        Tensor& dX = t.grad_of(ix);
        for (std::size_t i = 0; i < dX.size(); ++i)
            if (X[i] > 0.0) dX[i] += self.grad[i];
    });
}

Tape::ValueRef Tape::conv1d(ValueRef x, ValueRef filters, int stride) {
    const Tensor& vx = cnode(x).value;
    const Tensor& vf = cnode(filters).value;
    if (vx.rank() != 2 || vf.rank() != 3) throw ContractViolation("conv1d: rank mismatch");
    if (stride < 1) throw ContractViolation("conv1d: stride must be >= 1");
    const std::size_t in_ch = vx.dim(0), len = vx.dim(1);
    const std::size_t out_ch = vf.dim(0), f_in = vf.dim(1), width = vf.dim(2);
    if (f_in != in_ch) throw ContractViolation("conv1d: channel mismatch");
    if (len < width) throw ContractViolation("conv1d: input length shorter than filter width");
    const std::size_t out_len = (len - width) / static_cast<std::size_t>(stride) + 1;

    Tensor out({out_ch, out_len}, 0.0);
    auto xat = [&](std::size_t ch, std::size_t p) { return vx[ch * len + p]; };
    auto fat = [&](std::size_t o, std::size_t i, std::size_t w) {
        return vf[(o * in_ch + i) * width + w];
    };
    for (std::size_t o = 0; o < out_ch; ++o)
        for (std::size_t t = 0; t < out_len; ++t) {
            double acc = 0.0;
            const std::size_t base = t * static_cast<std::size_t>(stride);
            for (std::size_t i = 0; i < in_ch; ++i)
                for (std::size_t w = 0; w < width; ++w) acc += xat(i, base + w) * fat(o, i, w);
            out.at(o, t) = acc;
        }

    const std::size_t ix = x.index, iff = filters.index;
    return push(std::move(out),
                [ix, iff, in_ch, len, out_ch, width, stride](Tape& t, const Node& self) {
                    const Tensor& X = t.nodes_[ix].value;
                    const Tensor& F = t.nodes_[iff].value;
                    Tensor& dX = t.grad_of(ix);
                    Tensor& dF = t.grad_of(iff);
                    const std::size_t out_len = self.value.dim(1);
                    for (std::size_t o = 0; o < out_ch; ++o)
                        for (std::size_t pos = 0; pos < out_len; ++pos) {
                            const double g = self.grad.at(o, pos);
                            if (g == 0.0) continue;
                            const std::size_t base = pos * static_cast<std::size_t>(stride);
                            for (std::size_t i = 0; i < in_ch; ++i)
                                for (std::size_t w = 0; w < width; ++w) {
                                    dX[i * len + base + w] += g * F[(o * in_ch + i) * width + w];
                                    dF[(o * in_ch + i) * width + w] += g * X[i * len + base + w];
                                }
                        }
                });
}

Tape::ValueRef Tape::sortpool(ValueRef h, int k) {
    if (k < 1) throw ContractViolation("sortpool: k must be >= 1");
    const Tensor& vh = cnode(h).value;
    if (vh.rank() != 2) throw ContractViolation("sortpool: rank-2 input required");
    const std::size_t n = vh.dim(0), c = vh.dim(1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t col = c; col-- > 0;) {
            const double va = vh.at(a, col), vb = vh.at(b, col);
            if (va != vb) return va > vb;
        }
        return a < b;
    });

    const std::size_t kept = std::min<std::size_t>(n, static_cast<std::size_t>(k));
    std::vector<std::size_t> selected(order.begin(), order.begin() + kept);

    Tensor out({static_cast<std::size_t>(k), c}, 0.0);
    for (std::size_t t = 0; t < kept; ++t)
        for (std::size_t col = 0; col < c; ++col) out.at(t, col) = vh.at(selected[t], col);

    const std::size_t ih = h.index;
    return push(std::move(out), [ih, selected, c](Tape& t, const Node& self) {
        Tensor& dH = t.grad_of(ih);
        for (std::size_t row = 0; row < selected.size(); ++row)
            for (std::size_t col = 0; col < c; ++col)
                dH.at(selected[row], col) += self.grad.at(row, col);
    });
}

Tape::ValueRef Tape::concat_cols(const std::vector<ValueRef>& parts) {
    if (parts.empty()) throw ContractViolation("concat_cols: no inputs");
    const std::size_t rows = cnode(parts[0]).value.dim(0);
    std::size_t total_cols = 0;
    for (ValueRef p : parts) {
        const Tensor& v = cnode(p).value;
        if (v.rank() != 2 || v.dim(0) != rows) throw ContractViolation("concat_cols: row mismatch");
        total_cols += v.dim(1);
    }
    Tensor out({rows, total_cols}, 0.0);
    std::size_t offset = 0;
    std::vector<std::size_t> indices;
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> widths;
    for (ValueRef p : parts) {
        const Tensor& v = cnode(p).value;
        const std::size_t w = v.dim(1);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t col = 0; col < w; ++col) out.at(r, offset + col) = v.at(r, col);
        indices.push_back(p.index);
        offsets.push_back(offset);
        widths.push_back(w);
        offset += w;
    }
    return push(std::move(out), [indices, offsets, widths, rows](Tape& t, const Node& self) {
        for (std::size_t part = 0; part < indices.size(); ++part) {
            Tensor& dP = t.grad_of(indices[part]);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t col = 0; col < widths[part]; ++col)
                    dP.at(r, col) += self.grad.at(r, offsets[part] + col);
        }
    });
}

Tape::ValueRef Tape::flatten_to_row(ValueRef h) {
    const Tensor& vh = cnode(h).value;
    if (vh.rank() != 2) throw ContractViolation("flatten_to_row: rank-2 input required");
    Tensor out({1, vh.size()}, 0.0);
    for (std::size_t i = 0; i < vh.size(); ++i) out[i] = vh[i];
    const std::size_t ih = h.index;
    return push(std::move(out), [ih](Tape& t, const Node& self) {
        Tensor& dH = t.grad_of(ih);
        for (std::size_t i = 0; i < dH.size(); ++i) dH[i] += self.grad[i];
    });
}

Tape::ValueRef Tape::flatten_to_vector(ValueRef h) {
    const Tensor& vh = cnode(h).value;
    Tensor out({vh.size()}, 0.0);
    for (std::size_t i = 0; i < vh.size(); ++i) out[i] = vh[i];
    const std::size_t ih = h.index;
    return push(std::move(out), [ih](Tape& t, const Node& self) {
        Tensor& dH = t.grad_of(ih);
        for (std::size_t i = 0; i < dH.size(); ++i) dH[i] += self.grad[i];
    });
}

Tape::ValueRef Tape::vec_mat(ValueRef x, ValueRef w) {
    const Tensor& vx = cnode(x).value;
    const Tensor& vw = cnode(w).value;
    if (vx.rank() != 1 || vw.rank() != 2 || vx.dim(0) != vw.dim(0))
        throw ContractViolation("vec_mat: shape mismatch");
    const std::size_t d_in = vw.dim(0), d_out = vw.dim(1);
    Tensor out({d_out}, 0.0);
    for (std::size_t i = 0; i < d_in; ++i) {
        const double xi = vx[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < d_out; ++j) out[j] += xi * vw.at(i, j);
    }
    const std::size_t ix = x.index, iw = w.index;
    return push(std::move(out), [ix, iw, d_in, d_out](Tape& t, const Node& self) {
        const Tensor& X = t.nodes_[ix].value;
        const Tensor& W = t.nodes_[iw].value;
        Tensor& dX = t.grad_of(ix);
        Tensor& dW = t.grad_of(iw);
        for (std::size_t i = 0; i < d_in; ++i)
            for (std::size_t j = 0; j < d_out; ++j) {
                dX[i] += self.grad[j] * W.at(i, j);
                dW.at(i, j) += self.grad[j] * X[i];
            }
    });
}

Tape::ValueRef Tape::add_bias(ValueRef x, ValueRef b) {
    const Tensor& vx = cnode(x).value;
    const Tensor& vb = cnode(b).value;
    if (vb.rank() != 1) throw ContractViolation("add_bias: bias must be rank-1");
    Tensor out = vx;
    if (vx.rank() == 1) {
        if (vx.dim(0) != vb.dim(0)) throw ContractViolation("add_bias: length mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += vb[i];
    } else if (vx.rank() == 2) {
        if (vx.dim(1) != vb.dim(0)) throw ContractViolation("add_bias: width mismatch");
        for (std::size_t r = 0; r < vx.dim(0); ++r)
            for (std::size_t col = 0; col < vx.dim(1); ++col) out.at(r, col) += vb[col];
    } else {
        throw ContractViolation("add_bias: unsupported rank");
    }
    const std::size_t ix = x.index, ib = b.index;
    return push(std::move(out), [ix, ib](Tape& t, const Node& self) {
        Tensor& dX = t.grad_of(ix);
        Tensor& dB = t.grad_of(ib);
        if (self.value.rank() == 1) {
            for (std::size_t i = 0; i < dX.size(); ++i) {
                dX[i] += self.grad[i];
                dB[i] += self.grad[i];
            }
        } else {
            for (std::size_t r = 0; r < self.value.dim(0); ++r)
                for (std::size_t col = 0; col < self.value.dim(1); ++col) {
                    dX.at(r, col) += self.grad.at(r, col);
                    dB[col] += self.grad.at(r, col);
                }
        }
    });
}

Tape::ValueRef Tape::add_channel_bias(ValueRef x, ValueRef b) {
    const Tensor& vx = cnode(x).value;
    const Tensor& vb = cnode(b).value;
    if (vx.rank() != 2 || vb.rank() != 1 || vx.dim(0) != vb.dim(0))
        throw ContractViolation("add_channel_bias: shape mismatch");
    Tensor out = vx;
    for (std::size_t ch = 0; ch < vx.dim(0); ++ch)
        for (std::size_t p = 0; p < vx.dim(1); ++p) out.at(ch, p) += vb[ch];
    const std::size_t ix = x.index, ib = b.index;
    return push(std::move(out), [ix, ib](Tape& t, const Node& self) {
        Tensor& dX = t.grad_of(ix);
        Tensor& dB = t.grad_of(ib);
        for (std::size_t ch = 0; ch < self.value.dim(0); ++ch)
            for (std::size_t p = 0; p < self.value.dim(1); ++p) {
                dX.at(ch, p) += self.grad.at(ch, p);
                dB[ch] += self.grad.at(ch, p);
            }
    });
}

Tape::ValueRef Tape::log_softmax(ValueRef x) {
    const Tensor& vx = cnode(x).value;
    if (vx.rank() != 1 || vx.size() == 0) throw ContractViolation("log_softmax: rank-1 input required");
    double mx = vx[0];
    for (std::size_t i = 1; i < vx.size(); ++i) mx = std::max(mx, vx[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < vx.size(); ++i) sum += std::exp(vx[i] - mx);
    const double lse = mx + std::log(sum);
    Tensor out({vx.size()}, 0.0);
    for (std::size_t i = 0; i < vx.size(); ++i) out[i] = vx[i] - lse;
    const std::size_t ix = x.index;
    return push(std::move(out), [ix](Tape& t, const Node& self) {
        Tensor& dX = t.grad_of(ix);
        double gsum = 0.0;
        for (std::size_t i = 0; i < self.grad.size(); ++i) gsum += self.grad[i];
        for (std::size_t i = 0; i < dX.size(); ++i)
            dX[i] += self.grad[i] - std::exp(self.value[i]) * gsum;
    });
}

Tape::ValueRef Tape::dropout(ValueRef x, double rate, std::uint64_t* rng_state) {
    if (rate <= 0.0) return x;
    if (rate >= 1.0) throw ContractViolation("dropout: rate must be < 1");
    const Tensor& vx = cnode(x).value;
    const double scale = 1.0 / (1.0 - rate);
    std::vector<char> keep(vx.size());
    Tensor out = vx;
    for (std::size_t i = 0; i < vx.size(); ++i) {
        keep[i] = unit_double(*rng_state) >= rate;
        out[i] = keep[i] ? out[i] * scale : 0.0;
    }
    const std::size_t ix = x.index;
    return push(std::move(out), [ix, keep, scale](Tape& t, const Node& self) {
        Tensor& dX = t.grad_of(ix);
        for (std::size_t i = 0; i < dX.size(); ++i)
            if (keep[i]) dX[i] += self.grad[i] * scale;
    });
}

Tape::ValueRef Tape::dot(ValueRef a, ValueRef b) {
    const Tensor& va = cnode(a).value;
    const Tensor& vb = cnode(b).value;
    if (va.rank() != 1 || vb.rank() != 1 || va.dim(0) != vb.dim(0))
        throw ContractViolation("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) acc += va[i] * vb[i];
    const std::size_t ia = a.index, ib = b.index;
    return push(Tensor::scalar(acc), [ia, ib](Tape& t, const Node& self) {
        const Tensor& A = t.nodes_[ia].value;
        const Tensor& B = t.nodes_[ib].value;
        Tensor& dA = t.grad_of(ia);
        Tensor& dB = t.grad_of(ib);
        const double g = self.grad[0];
        for (std::size_t i = 0; i < dA.size(); ++i) {
            dA[i] += g * B[i];
            dB[i] += g * A[i];
        }
    });
}

Tape::ValueRef Tape::mse(ValueRef pred, double target) {
    const Tensor& vp = cnode(pred).value;
    if (vp.size() != 1) throw ContractViolation("mse: scalar prediction required");
    const double diff = vp[0] - target;
    const std::size_t ip = pred.index;
    return push(Tensor::scalar(diff * diff), [ip, diff](Tape& t, const Node& self) {
        t.grad_of(ip)[0] += self.grad[0] * 2.0 * diff;
    });
}

Tape::ValueRef Tape::nll(ValueRef log_probs, int class_id) {
    const Tensor& vp = cnode(log_probs).value;
    if (vp.rank() != 1) throw ContractViolation("nll: rank-1 log-probs required");
    if (class_id < 0 || static_cast<std::size_t>(class_id) >= vp.size())
        throw ContractViolation("nll: class id " + std::to_string(class_id) + " out of range");
    const std::size_t ip = log_probs.index;
    return push(Tensor::scalar(-vp[class_id]), [ip, class_id](Tape& t, const Node& self) {
        t.grad_of(ip)[class_id] -= self.grad[0];
    });
}

void Tape::backward(ValueRef loss, double seed) {
    if (nodes_.empty() || !loss.valid() || loss.index >= nodes_.size())
        throw ContractViolation("backward without a recorded forward pass");
    if (backward_done_) throw ContractViolation("backward called twice on one tape");
    Node& l = nodes_[loss.index];
    if (l.value.size() != 1) throw ContractViolation("backward: loss must be scalar");
    backward_done_ = true;
    l.grad[0] = seed;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].backprop) nodes_[i].backprop(*this, nodes_[i]);
    }
}

}  // namespace gkp
