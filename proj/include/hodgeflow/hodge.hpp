// Copyright 2026 The hodgeflow Authors.
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

// Helmholtz-Hodge decomposition of a flow network.
//
// Potentials minimise the weighted squared mismatch between observed flow and
// gradient flow,
//
//   sum_{i<j} (F_ij - w_ij (phi_i - phi_j))^2 / w_ij,
//
// whose normal equations are L phi = f with the weighted graph Laplacian
// L_ii = sum_j w_ij, L_ij = -w_ij and net outflow f_i = sum_j F_ij. L is
// singular with the per-component constants as nullspace; every solution is
// shifted to zero mean on each connected component. Components with at most
// `dense_limit` nodes are solved by Cholesky on L + c/m 11^T; larger ones by
// Jacobi-preconditioned conjugate gradients with mean-zero projection.
//
// The circular remainder F^c = F - F^p is divergence free at the solution,
// hence orthogonal to F^p under <X, Y> = sum X_ij Y_ij / w_ij, and the
// gradient and loop ratios are the shares of <F, F> carried by each part.

#ifndef HODGEFLOW_HODGE_HPP_
#define HODGEFLOW_HODGE_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hodgeflow/common.hpp"
#include "hodgeflow/netbuild.hpp"

namespace hodgeflow {

// Sparse symmetric Laplacian in CSR form with the net-outflow right-hand side.
struct LaplacianSystem {
  std::vector<std::string> nodes;
  std::vector<std::size_t> row_start;  // size n + 1
  std::vector<std::size_t> column;
  std::vector<double> value;
  std::vector<double> rhs;
  std::vector<std::size_t> component;  // labelled in order of smallest node
  std::size_t component_count = 0;

  std::size_t size() const { return rhs.size(); }

  double At(std::size_t i, std::size_t j) const {
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
      if (column[k] == j) return value[k];
    }
    return 0.0;
  }

  void Multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < size(); ++i) {
      double sum = 0.0;
      for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
        sum += value[k] * x[column[k]];
      }
      y[i] = sum;
    }
  }
};

inline LaplacianSystem AssembleLaplacian(const FlowNetwork& flow) {
  const std::size_t n = flow.size();
  LaplacianSystem sys;
  sys.nodes = flow.nodes;
  sys.rhs.assign(n, 0.0);
  std::vector<double> diagonal(n, 0.0);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& p : flow.pairs) {
    if (p.i >= n || p.j >= n || p.i == p.j) throw Error("flow pair out of range");
    if (!(p.weight > 0.0)) throw Error("flow pair with non-positive weight");
    diagonal[p.i] += p.weight;
    diagonal[p.j] += p.weight;
    rows[p.i].emplace_back(p.j, -p.weight);
    rows[p.j].emplace_back(p.i, -p.weight);
    sys.rhs[p.i] += p.flow;
    sys.rhs[p.j] -= p.flow;
    adjacency[p.i].push_back(p.j);
    adjacency[p.j].push_back(p.i);
  }
  sys.row_start.assign(1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].emplace_back(i, diagonal[i]);
    std::sort(rows[i].begin(), rows[i].end());
    for (const auto& [col, val] : rows[i]) {
      sys.column.push_back(col);
      sys.value.push_back(val);
    }
    sys.row_start.push_back(sys.column.size());
  }

  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  sys.component.assign(n, kUnset);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (sys.component[root] != kUnset) continue;
    const std::size_t label = sys.component_count++;
    sys.component[root] = label;
    stack.push_back(root);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adjacency[u]) {
        if (sys.component[v] == kUnset) {
          sys.component[v] = label;
          stack.push_back(v);
        }
      }
    }
  }
  return sys;
}

struct SolverOptions {
  double tol = 1e-10;
  std::size_t dense_limit = 64;
  std::size_t iteration_factor = 100;  // CG cap is iteration_factor * n
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct PotentialVector {
  std::vector<std::string> nodes;
  std::vector<double> value;
  std::vector<std::size_t> component;
  double residual = 0.0;  // max-norm of L phi - f
  std::size_t iterations = 0;
};

namespace internal {

inline double MaxAbs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline void CenterMean(std::span<double> v) {
  if (v.empty()) return;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

// Restriction of the system to one component, with local indices.
struct LocalSystem {
  std::vector<std::size_t> row_start{0};
  std::vector<std::size_t> column;
  std::vector<double> value;
  std::vector<double> diagonal;
  std::vector<double> rhs;

  std::size_t size() const { return rhs.size(); }

  void Multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < size(); ++i) {
      double sum = 0.0;
      for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
        sum += value[k] * x[column[k]];
      }
      y[i] = sum;
    }
  }

  double ResidualMax(std::span<const double> x, std::vector<double>& scratch) const {
    scratch.resize(size());
    Multiply(x, scratch);
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      m = std::max(m, std::abs(rhs[i] - scratch[i]));
    }
    return m;
  }
};

inline LocalSystem Restrict(const LaplacianSystem& sys,
                            const std::vector<std::size_t>& members) {
  std::vector<std::size_t> local(sys.size(), 0);
  for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = k;
  LocalSystem out;
  for (std::size_t i : members) {
    double diag = 0.0;
    for (std::size_t k = sys.row_start[i]; k < sys.row_start[i + 1]; ++k) {
      out.column.push_back(local[sys.column[k]]);
      out.value.push_back(sys.value[k]);
      if (sys.column[k] == i) diag = sys.value[k];
    }
    out.row_start.push_back(out.column.size());
    out.diagonal.push_back(diag);
    out.rhs.push_back(sys.rhs[i]);
  }
  return out;
}

inline void DenseSolve(const LocalSystem& sys, std::vector<double>& x) {
  const std::size_t m = sys.size();
  double shift = 0.0;
  for (double d : sys.diagonal) shift += d;
  shift /= static_cast<double>(m);
  // L + shift/m * 11^T is positive definite on a connected component and
  // agrees with L on mean-zero vectors.
  std::vector<double> a(m * m, shift / static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = sys.row_start[i]; k < sys.row_start[i + 1]; ++k) {
      a[i * m + sys.column[k]] += sys.value[k];
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j * m + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * m + k] * a[j * m + k];
    if (!(d > 0.0)) throw SolverError("dense factorisation lost definiteness", 0.0);
    d = std::sqrt(d);
    a[j * m + j] = d;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
      a[i * m + j] = s / d;
    }
  }
  auto solve = [&](std::vector<double> b) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= a[i * m + k] * b[k];
      b[i] = s / a[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
      double s = b[i];
      for (std::size_t k = i + 1; k < m; ++k) s -= a[k * m + i] * b[k];
      b[i] = s / a[i * m + i];
    }
    return b;
  };
  std::vector<double> b = sys.rhs;
  CenterMean(b);
  x = solve(b);
  CenterMean(x);
  // One round of iterative refinement.
  std::vector<double> lx(m);
  sys.Multiply(x, lx);
  for (std::size_t i = 0; i < m; ++i) b[i] = sys.rhs[i] - lx[i];
  CenterMean(b);
  const auto dx = solve(b);
  for (std::size_t i = 0; i < m; ++i) x[i] += dx[i];
  CenterMean(x);
}

// Projected Jacobi-preconditioned CG. Iterates past `target` toward
// `polish`, a much tighter residual, since orthogonality of the two flow
// components degrades with the residual; success only requires `target`.
inline std::size_t ConjugateGradient(const LocalSystem& sys, double target,
                                     std::size_t cap, std::vector<double>& x) {
  const std::size_t m = sys.size();
  const double polish = target * 1e-4;
  x.assign(m, 0.0);
  std::vector<double> r = sys.rhs, z(m), p(m), q(m), scratch;
  CenterMean(r);
  auto precondition = [&] {
    for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / sys.diagonal[i];
    CenterMean(z);
  };
  precondition();
  p = z;
  double rz = Dot(r, z);
  std::vector<double> best_x = x;
  double best = sys.ResidualMax(x, scratch);
  std::size_t since_improvement = 0;
  std::size_t it = 0;
  while (it < cap && best > polish) {
    ++it;
    sys.Multiply(p, q);
    const double pq = Dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < m; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    CenterMean(x);
    if (MaxAbs(r) <= polish || it % 50 == 0) {
      // Re-anchor on the true residual to shed accumulated drift.
      const double true_res = sys.ResidualMax(x, scratch);
      if (true_res < best) {
        best = true_res;
        best_x = x;
        since_improvement = 0;
      } else if (++since_improvement >= 4) {
        break;
      }
      for (std::size_t i = 0; i < m; ++i) r[i] = sys.rhs[i] - scratch[i];
      CenterMean(r);
      precondition();
      p = z;
      rz = Dot(r, z);
      continue;
    }
    precondition();
    const double rz_next = Dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
    CenterMean(p);
  }
  x = best_x;
  if (best > target) {
    throw SolverError("conjugate gradient did not converge: residual " +
                          FormatReal(best) + " exceeds " + FormatReal(target),
                      best);
  }
  return it;
}

}  // namespace internal

inline PotentialVector SolvePotentials(const LaplacianSystem& sys,
                                       const SolverOptions& options = {}) {
  if (!(options.tol > 0.0)) throw Error("solver tolerance must be positive");
  const std::size_t n = sys.size();
  PotentialVector out;
  out.nodes = sys.nodes;
  out.value.assign(n, 0.0);
  out.component = sys.component;
  const double target = options.tol * std::max(1.0, internal::MaxAbs(sys.rhs));

  std::vector<std::vector<std::size_t>> members(sys.component_count);
  for (std::size_t i = 0; i < n; ++i) members[sys.component[i]].push_back(i);
  std::vector<double> x;
  for (const auto& group : members) {
    if (group.size() < 2) continue;  // isolated node: phi = 0
    const auto local = internal::Restrict(sys, group);
    if (group.size() <= options.dense_limit) {
      internal::DenseSolve(local, x);
    } else {
      out.iterations += internal::ConjugateGradient(
          local, target, options.iteration_factor * group.size(), x);
    }
    for (std::size_t k = 0; k < group.size(); ++k) out.value[group[k]] = x[k];
  }

  std::vector<double> lx(n);
  sys.Multiply(out.value, lx);
  for (std::size_t i = 0; i < n; ++i) {
    out.residual = std::max(out.residual, std::abs(lx[i] - sys.rhs[i]));
  }
  if (out.residual > target) {
    throw SolverError("potential solve residual " + FormatReal(out.residual) +
                          " exceeds " + FormatReal(target),
                      out.residual);
  }
  return out;
}

inline PotentialVector SolvePotentials(const FlowNetwork& flow,
                                       const SolverOptions& options = {}) {
  return SolvePotentials(AssembleLaplacian(flow), options);
}

struct DecomposedPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double flow = 0.0;
  double weight = 0.0;
  double gradient = 0.0;
  double circular = 0.0;
};

struct HodgeDecomposition {
  PotentialVector potentials;
  std::vector<DecomposedPair> pairs;
  WeightMode mode = WeightMode::kMean;
  bool ratios_defined = false;
  double gradient_ratio = std::numeric_limits<double>::quiet_NaN();
  double loop_ratio = std::numeric_limits<double>::quiet_NaN();
  double residual_norm = 0.0;
};

// <X, Y> = sum over pairs of X_ij Y_ij / w_ij.
template <class Left, class Right>
double WeightedInner(const std::vector<DecomposedPair>& pairs, Left left,
                     Right right) {
  double s = 0.0;
  for (const auto& p : pairs) s += left(p) * right(p) / p.weight;
  return s;
}

namespace internal {

inline std::pair<double, double> Ratios(const std::vector<DecomposedPair>& pairs) {
  const auto flow = [](const DecomposedPair& p) { return p.flow; };
  const auto grad = [](const DecomposedPair& p) { return p.gradient; };
  const auto circ = [](const DecomposedPair& p) { return p.circular; };
  const double total = WeightedInner(pairs, flow, flow);
  if (!(total > 0.0)) {
    throw Error("flow ratios undefined: every pair carries zero net flow");
  }
  return {WeightedInner(pairs, grad, grad) / total,
          WeightedInner(pairs, circ, circ) / total};
}

// Splits F into (F^p, F^c) so that F^p + F^c == F holds bit for bit. The
// gradient is rounded onto a power-of-two grid that divides F and is fine
// enough to keep both sums exact; the shift is below one ulp of max(|F|, |g|).
inline std::pair<double, double> SplitExact(double flow, double gradient) {
  const double m = std::max(std::abs(flow), std::abs(gradient));
  if (gradient == 0.0 || !std::isfinite(m)) return {gradient, flow - gradient};
  int quantum = std::ilogb(m) - 51;
  if (flow != 0.0) {
    const int e = std::ilogb(flow);
    const auto mantissa = static_cast<std::uint64_t>(std::abs(std::ldexp(flow, 52 - e)));
    quantum = std::min(quantum, e - 52 + std::countr_zero(mantissa));
  }
  const double g = std::nearbyint(std::ldexp(gradient, -quantum));
  const double rounded = std::ldexp(g, quantum);
  const double circular = flow - rounded;
  if (rounded + circular == flow && flow - circular == rounded) return {rounded, circular};
  return {gradient, flow - gradient};
}

}  // namespace internal

inline HodgeDecomposition Decompose(const FlowNetwork& flow,
                                    const PotentialVector& potentials) {
  if (potentials.value.size() != flow.size() || potentials.nodes != flow.nodes) {
    throw Error("potentials were not solved on this flow network (node mismatch)");
  }
  HodgeDecomposition out;
  out.potentials = potentials;
  out.mode = flow.mode;
  out.residual_norm = potentials.residual;
  out.pairs.reserve(flow.pairs.size());
  const auto& phi = potentials.value;
  for (const auto& p : flow.pairs) {
    const auto [gradient, circular] =
        internal::SplitExact(p.flow, p.weight * (phi[p.i] - phi[p.j]));
    out.pairs.push_back({p.i, p.j, p.flow, p.weight, gradient, circular});
  }
  const bool any_flow = std::any_of(flow.pairs.begin(), flow.pairs.end(),
                                    [](const FlowPair& p) { return p.flow != 0.0; });
  if (any_flow) {
    std::tie(out.gradient_ratio, out.loop_ratio) = internal::Ratios(out.pairs);
    out.ratios_defined = true;
  }
  return out;
}

inline std::pair<double, double> FlowRatios(const HodgeDecomposition& decomp,
                                            const FlowNetwork& flow) {
  if (decomp.pairs.size() != flow.pairs.size()) {
    throw Error("decomposition does not match the flow network");
  }
  for (std::size_t k = 0; k < flow.pairs.size(); ++k) {
    const auto& a = decomp.pairs[k];
    const auto& b = flow.pairs[k];
    if (a.i != b.i || a.j != b.j || a.flow != b.flow || a.weight != b.weight) {
      throw Error("decomposition does not match the flow network");
    }
  }
  return internal::Ratios(decomp.pairs);
}

// Net divergence of the circular part at each node.
inline std::vector<double> CircularDivergence(const HodgeDecomposition& decomp) {
  std::vector<double> div(decomp.potentials.value.size(), 0.0);
  for (const auto& p : decomp.pairs) {
    div[p.i] += p.circular;
    div[p.j] -= p.circular;
  }
  return div;
}

// Export tables: nodes `node,component,potential`; pairs
// `i,j,F,w,F_grad,F_circ`; summary `key,value`. Reals carry 17 significant
// digits and read back bit-exactly.
inline void WriteNodeTable(const HodgeDecomposition& d, std::ostream& out) {
  WriteCsvRow(out, {"node", "component", "potential"});
  const auto& pv = d.potentials;
  for (std::size_t i = 0; i < pv.nodes.size(); ++i) {
    WriteCsvRow(out, {pv.nodes[i], std::to_string(pv.component[i]),
                      FormatReal(pv.value[i])});
  }
}

inline void WritePairTable(const HodgeDecomposition& d, std::ostream& out) {
  WriteCsvRow(out, {"i", "j", "F", "w", "F_grad", "F_circ"});
  const auto& names = d.potentials.nodes;
  for (const auto& p : d.pairs) {
    WriteCsvRow(out, {names[p.i], names[p.j], FormatReal(p.flow), FormatReal(p.weight),
                      FormatReal(p.gradient), FormatReal(p.circular)});
  }
}

inline void WriteSummary(const HodgeDecomposition& d, std::ostream& out) {
  WriteCsvRow(out, {"key", "value"});
  WriteCsvRow(out, {"nodes", std::to_string(d.potentials.nodes.size())});
  WriteCsvRow(out, {"pairs", std::to_string(d.pairs.size())});
  WriteCsvRow(out, {"weight_mode", std::string(ToString(d.mode))});
  WriteCsvRow(out, {"ratios_defined", d.ratios_defined ? "true" : "false"});
  WriteCsvRow(out, {"gradient_ratio",
                    d.ratios_defined ? FormatReal(d.gradient_ratio) : "nan"});
  WriteCsvRow(out, {"loop_ratio", d.ratios_defined ? FormatReal(d.loop_ratio) : "nan"});
  WriteCsvRow(out, {"residual_norm", FormatReal(d.residual_norm)});
  WriteCsvRow(out, {"iterations", std::to_string(d.potentials.iterations)});
}

namespace internal {

inline std::vector<std::vector<std::string>> ReadTable(
    std::istream& in, const std::vector<std::string>& header) {
  SkipCommentHeader(in);
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.Next(fields) || fields != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    throw Error("table header must be '" + expected + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (reader.Next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size()) {
      throw Error("line " + std::to_string(reader.line()) + ": expected " +
                  std::to_string(header.size()) + " fields");
    }
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace internal

inline PotentialVector ReadNodeTable(std::istream& in) {
  PotentialVector pv;
  for (const auto& row : internal::ReadTable(in, {"node", "component", "potential"})) {
    pv.nodes.push_back(row[0]);
    pv.component.push_back(
        static_cast<std::size_t>(ParseInteger(row[1], "component")));
    pv.value.push_back(ParseReal(row[2], "potential"));
  }
  if (!std::is_sorted(pv.nodes.begin(), pv.nodes.end())) {
    throw Error("potential table rows must be in node order");
  }
  return pv;
}

inline HodgeDecomposition ReadDecomposition(std::istream& nodes, std::istream& pairs,
                                            std::istream& summary) {
  HodgeDecomposition d;
  d.potentials = ReadNodeTable(nodes);
  const auto& names = d.potentials.nodes;
  auto index = [&](const std::string& name) {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) {
      throw Error("pair table names unknown node '" + name + "'");
    }
    return static_cast<std::size_t>(it - names.begin());
  };
  for (const auto& row :
       internal::ReadTable(pairs, {"i", "j", "F", "w", "F_grad", "F_circ"})) {
    d.pairs.push_back({index(row[0]), index(row[1]), ParseReal(row[2], "F"),
                       ParseReal(row[3], "w"), ParseReal(row[4], "F_grad"),
                       ParseReal(row[5], "F_circ")});
  }
  std::map<std::string, std::string> kv;
  for (const auto& row : internal::ReadTable(summary, {"key", "value"})) {
    kv[row[0]] = row[1];
  }
  d.mode = ParseWeightMode(kv["weight_mode"]);
  d.ratios_defined = kv["ratios_defined"] == "true";
  if (d.ratios_defined) {
    d.gradient_ratio = ParseReal(kv["gradient_ratio"], "gradient_ratio");
    d.loop_ratio = ParseReal(kv["loop_ratio"], "loop_ratio");
  }
  d.residual_norm = ParseReal(kv["residual_norm"], "residual_norm");
  d.potentials.residual = d.residual_norm;
  d.potentials.iterations =
      static_cast<std::size_t>(ParseInteger(kv["iterations"], "iterations"));
  return d;
}

}  // namespace hodgeflow

#endif  // HODGEFLOW_HODGE_HPP_
