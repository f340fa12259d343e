// Copyright 2026 The Stylo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stylo/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stylo/error.hpp"

namespace stylo::ops {
namespace {

// Gradient buffer of a parent, or an empty span when it does not take one.
std::span<double> grad_of(Tensor t) {
  return t.requires_grad() ? t.mutable_grad() : std::span<double>();
}

void require_matrix(const Tensor& t, const char* what) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(what) + " must be a matrix, got " +
                     shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
  }
}

double apply(Activation f, double x) {
  switch (f) {
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::kIdentity:
      break;
  }
  return x;
}

// Derivative expressed through the activation's output y.
double derivative_from_output(Activation f, double y) {
  switch (f) {
    case Activation::kTanh:
      return 1.0 - y * y;
    case Activation::kSigmoid:
      return y * (1.0 - y);
    case Activation::kIdentity:
      break;
  }
  return 1.0;
}

Tensor unary(const Tensor& a, Activation f) {
  std::vector<double> out(a.size());
  const auto x = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply(f, x[i]);
  return Tensor::make_result(
      a.shape(), std::move(out), {a},
      [a, f](std::span<const double> y, std::span<const double> g) {
        auto ga = grad_of(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * derivative_from_output(f, y[i]);
        }
      });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul lhs");
  require_matrix(b, "matmul rhs");
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
  if (b.rows() != k) {
    throw ShapeError("matmul: inner extents differ, " + shape_string(a.shape()) +
                     " x " + shape_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return Tensor::make_result(
      {m, n}, std::move(out), {a, b},
      [a, b, m, k, n](std::span<const double>, std::span<const double> g) {
        const auto av = a.values();
        const auto bv = b.values();
        // dA = dC . B^T
        if (auto ga = grad_of(a); !ga.empty()) {
          for (std::size_t i = 0; i < m; ++i) {
            const double* grow = g.data() + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const double* brow = bv.data() + p * n;
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
              ga[i * k + p] += acc;
            }
          }
        }
        // dB = A^T . dC
        if (auto gb = grad_of(b); !gb.empty()) {
          for (std::size_t i = 0; i < m; ++i) {
            const double* grow = g.data() + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const double aip = av[i * k + p];
              if (aip == 0.0) continue;
              double* gbrow = gb.data() + p * n;
              for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
            }
          }
        }
      });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const Tensor terms[] = {a, b};
  return add_n(terms);
}

Tensor add_n(std::span<const Tensor> terms) {
  if (terms.empty()) throw ShapeError("add: no operands");
  for (const auto& t : terms) require_same_shape(terms.front(), t, "add");
  std::vector<double> out(terms.front().values().begin(), terms.front().values().end());
  for (std::size_t t = 1; t < terms.size(); ++t) {
    const auto v = terms[t].values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  std::vector<Tensor> parents(terms.begin(), terms.end());
  return Tensor::make_result(
      terms.front().shape(), std::move(out), parents,
      [parents](std::span<const double>, std::span<const double> g) {
        for (const auto& p : parents) {
          auto gp = grad_of(p);
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[i];
        }
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return Tensor::make_result(
      a.shape(), std::move(out), {a, b},
      [a, b](std::span<const double>, std::span<const double> g) {
        const auto av = a.values();
        const auto bv = b.values();
        if (auto ga = grad_of(a); !ga.empty()) {
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
        }
        if (auto gb = grad_of(b); !gb.empty()) {
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
        }
      });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= factor;
  return Tensor::make_result(
      a.shape(), std::move(out), {a},
      [a, factor](std::span<const double>, std::span<const double> g) {
        auto ga = grad_of(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
      });
}

Tensor sigmoid(const Tensor& a) { return unary(a, Activation::kSigmoid); }
Tensor tanh(const Tensor& a) { return unary(a, Activation::kTanh); }

Tensor activate(const Tensor& a, Activation f) {
  return f == Activation::kIdentity ? a : unary(a, f);
}

Tensor softmax(const Tensor& x) {
  if (x.size() == 0) throw ShapeError("softmax of an empty tensor");
  const auto v = x.values();
  for (double e : v) {
    if (!std::isfinite(e)) throw NumericError("softmax: non-finite input");
  }
  const double peak = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - peak);
    total += out[i];
  }
  for (double& e : out) e /= total;
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [x](std::span<const double> y, std::span<const double> g) {
        // dx = (diag(y) - y y^T) g = y * (g - <g, y>)
        double dot = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) dot += g[i] * y[i];
        auto gx = grad_of(x);
        for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (g[i] - dot);
      });
}

Tensor conv2d_valid(const Tensor& input, const Tensor& filter, const Tensor& bias,
                    Activation f) {
  require_matrix(input, "conv2d input");
  require_matrix(filter, "conv2d filter");
  if (bias.size() != 1) {
    throw ShapeError("conv2d bias must hold one value, got " + shape_string(bias.shape()));
  }
  const std::size_t l = input.rows();
  const std::size_t w = input.cols();
  const std::size_t k = filter.rows();
  const std::size_t d = filter.cols();
  if (k > l || d > w || k == 0 || d == 0) {
    throw ShapeError("conv2d: filter " + shape_string(filter.shape()) +
                     " does not fit input " + shape_string(input.shape()));
  }
  const std::size_t oh = l - k + 1;
  const std::size_t ow = w - d + 1;
  const auto in = input.values();
  const auto fv = filter.values();
  const double b = bias.values()[0];

  std::vector<double> out(oh * ow, b);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t c = 0; c < d; ++c) {
      const double m = fv[a * d + c];
      for (std::size_t i = 0; i < oh; ++i) {
        const double* src = in.data() + (i + a) * w + c;
        double* dst = out.data() + i * ow;
        for (std::size_t j = 0; j < ow; ++j) dst[j] += m * src[j];
      }
    }
  }
  for (double& v : out) v = apply(f, v);

  return Tensor::make_result(
      {oh, ow}, std::move(out), {input, filter, bias},
      [input, filter, bias, f, w, k, d, oh, ow](std::span<const double> y,
                                                std::span<const double> g) {
        std::vector<double> pre(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
          pre[i] = g[i] * derivative_from_output(f, y[i]);
        }
        if (auto gb = grad_of(bias); !gb.empty()) {
          double acc = 0.0;
          for (double v : pre) acc += v;
          gb[0] += acc;
        }
        const auto in = input.values();
        const auto fv = filter.values();
        auto gf = grad_of(filter);
        auto gi = grad_of(input);
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t c = 0; c < d; ++c) {
            const double m = fv[a * d + c];
            double acc = 0.0;
            for (std::size_t i = 0; i < oh; ++i) {
              const double* src = in.data() + (i + a) * w + c;
              const double* gp = pre.data() + i * ow;
              if (!gf.empty()) {
                for (std::size_t j = 0; j < ow; ++j) acc += gp[j] * src[j];
              }
              if (!gi.empty()) {
                double* dst = gi.data() + (i + a) * w + c;
                for (std::size_t j = 0; j < ow; ++j) dst[j] += m * gp[j];
              }
            }
            if (!gf.empty()) gf[a * d + c] += acc;
          }
        }
      });
}

Tensor maxpool2d(const Tensor& input, std::size_t p1, std::size_t p2) {
  require_matrix(input, "maxpool input");
  const std::size_t a = input.rows();
  const std::size_t b = input.cols();
  if (p1 == 0 || p2 == 0 || p1 > a || p2 > b) {
    throw ShapeError("maxpool2d: window " + std::to_string(p1) + "x" +
                     std::to_string(p2) + " does not fit input " +
                     shape_string(input.shape()));
  }
  const std::size_t oh = a / p1;
  const std::size_t ow = b / p2;
  const auto in = input.values();
  std::vector<double> out(oh * ow);
  std::vector<std::size_t> argmax(oh * ow);
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      std::size_t best = (i * p1) * b + j * p2;
      for (std::size_t r = i * p1; r < (i + 1) * p1; ++r) {
        for (std::size_t c = j * p2; c < (j + 1) * p2; ++c) {
          if (in[r * b + c] > in[best]) best = r * b + c;
        }
      }
      out[i * ow + j] = in[best];
      argmax[i * ow + j] = best;
    }
  }
  return Tensor::make_result(
      {oh, ow}, std::move(out), {input},
      [input, argmax = std::move(argmax)](std::span<const double>,
                                          std::span<const double> g) {
        auto gi = grad_of(input);
        for (std::size_t i = 0; i < g.size(); ++i) gi[argmax[i]] += g[i];
      });
}

Tensor row(const Tensor& m, std::size_t r) {
  require_matrix(m, "row source");
  if (r >= m.rows()) {
    throw ShapeError("row " + std::to_string(r) + " outside " + shape_string(m.shape()));
  }
  const std::size_t n = m.cols();
  const auto v = m.values();
  std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(r * n),
                          v.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
  return Tensor::make_result({1, n}, std::move(out), {m},
                             [m, r, n](std::span<const double>, std::span<const double> g) {
                               auto gm = grad_of(m);
                               for (std::size_t j = 0; j < n; ++j) gm[r * n + j] += g[j];
                             });
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no rows");
  const std::size_t n = rows.front().size();
  std::vector<double> out;
  out.reserve(rows.size() * n);
  for (const auto& r : rows) {
    if (r.rank() != 2 || r.rows() != 1 || r.cols() != n) {
      throw ShapeError("stack_rows: expected [1x" + std::to_string(n) + "], got " +
                       shape_string(r.shape()));
    }
    out.insert(out.end(), r.values().begin(), r.values().end());
  }
  std::vector<Tensor> parents(rows.begin(), rows.end());
  return Tensor::make_result(
      {rows.size(), n}, std::move(out), parents,
      [parents, n](std::span<const double>, std::span<const double> g) {
        for (std::size_t i = 0; i < parents.size(); ++i) {
          auto gp = grad_of(parents[i]);
          for (std::size_t j = 0; j < gp.size(); ++j) gp[j] += g[i * n + j];
        }
      });
}

Tensor concat(std::span<const Tensor> parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  std::vector<Tensor> parents(parts.begin(), parts.end());
  const std::size_t total = out.size();
  return Tensor::make_result(
      {1, total}, std::move(out), parents,
      [parents](std::span<const double>, std::span<const double> g) {
        std::size_t offset = 0;
        for (const auto& p : parents) {
          const std::size_t n = p.size();
          auto gp = grad_of(p);
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[offset + i];
          offset += n;
        }
      });
}

Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids,
                   std::size_t length, std::size_t pad_row) {
  require_matrix(table, "embedding table");
  const std::size_t vocab = table.rows();
  const std::size_t dim = table.cols();
  if (pad_row >= vocab) throw ShapeError("pad row outside embedding table");
  std::vector<std::size_t> index(length, pad_row);
  for (std::size_t i = 0; i < std::min(length, ids.size()); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw ShapeError("token id " + std::to_string(ids[i]) +
                       " outside embedding table of " + std::to_string(vocab) + " rows");
    }
    index[i] = static_cast<std::size_t>(ids[i]);
  }
  const auto v = table.values();
  std::vector<double> out(length * dim, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    if (index[i] == pad_row) continue;
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(index[i] * dim), dim,
                out.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  return Tensor::make_result(
      {length, dim}, std::move(out), {table},
      [table, index = std::move(index), dim, pad_row](std::span<const double>,
                                                      std::span<const double> g) {
        auto gt = grad_of(table);
        for (std::size_t i = 0; i < index.size(); ++i) {
          if (index[i] == pad_row) continue;
          for (std::size_t j = 0; j < dim; ++j) gt[index[i] * dim + j] += g[i * dim + j];
        }
      });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return Tensor::make_result({1}, {total}, {x},
                             [x](std::span<const double>, std::span<const double> g) {
                               auto gx = grad_of(x);
                               for (double& v : gx) v += g[0];
                             });
}

Tensor sum_squares(const Tensor& x, std::size_t skip_rows) {
  std::size_t begin = 0;
  if (skip_rows > 0) {
    require_matrix(x, "sum_squares input");
    begin = std::min(skip_rows, x.rows()) * x.cols();
  }
  const auto v = x.values();
  double total = 0.0;
  for (std::size_t i = begin; i < v.size(); ++i) total += v[i] * v[i];
  return Tensor::make_result({1}, {total}, {x},
                             [x, begin](std::span<const double>, std::span<const double> g) {
                               const auto v = x.values();
                               auto gx = grad_of(x);
                               for (std::size_t i = begin; i < v.size(); ++i) {
                                 gx[i] += 2.0 * v[i] * g[0];
                               }
                             });
}

Tensor neg_log(const Tensor& probs, std::size_t index, double floor) {
  if (index >= probs.size()) {
    throw ShapeError("neg_log: index " + std::to_string(index) + " outside " +
                     shape_string(probs.shape()));
  }
  const double p = probs.values()[index];
  const bool clamped = !(p > floor);
  const double value = -std::log(clamped ? floor : p);
  return Tensor::make_result(
      {1}, {value}, {probs},
      [probs, index, p, clamped](std::span<const double>, std::span<const double> g) {
        if (clamped) return;
        grad_of(probs)[index] -= g[0] / p;
      });
}

}  // namespace stylo::ops
