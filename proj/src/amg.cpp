#include "ctamg/amg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ctamg {

struct Hierarchy::CoarseSolver {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

Vector Hierarchy::coarse_solve(const Vector& b) const {
  const Eigen::Map<const Eigen::VectorXd> bmap(b.data(), b.size());
  Eigen::VectorXd x = coarse_solver->lu.solve(bmap);
  return Vector(x.data(), x.data() + x.size());
}

StrengthSets strength_sets(const SparseMatrix& a, double eps_str) {
  if (a.n_rows != a.n_cols) throw std::invalid_argument("strength_sets: matrix not square");
  const int n = a.n_rows;
  StrengthSets s;
  s.strong.resize(n);
  s.strong_transpose.resize(n);
  for (int i = 0; i < n; ++i) {
    double max_off = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      if (a.col_indices[k] != i) max_off = std::max(max_off, std::abs(a.values[k]));
    if (max_off == 0.0) continue;
    const double threshold = eps_str * max_off;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int j = a.col_indices[k];
      if (j != i && -a.values[k] >= threshold) s.strong[i].push_back(j);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j : s.strong[i]) s.strong_transpose[j].push_back(i);
  return s;
}

CFSplitting standard_coarsening(const SparseMatrix& a, double eps_str, bool ff_second_pass) {
  const int n = a.n_rows;
  const StrengthSets s = strength_sets(a, eps_str);

  enum State : char { kUndecided, kCoarse, kFine };
  std::vector<State> state(n, kUndecided);
  std::vector<long> lambda(n, 0);
  for (int i = 0; i < n; ++i) lambda[i] = static_cast<long>(s.strong_transpose[i].size());

  auto recompute = [&](int i) {
    long v = 0;
    for (int j : s.strong_transpose[i]) {
      if (state[j] == kUndecided) v += 1;
      else if (state[j] == kFine) v += 2;
    }
    lambda[i] = v;
  };

  // greedy selection; lambda values are bounded and change only near the
  // selected variable, so a full argmax scan per step is fine at desk scale
  while (true) {
    int best = -1;
    long best_lambda = 0;
    for (int i = 0; i < n; ++i)
      if (state[i] == kUndecided && lambda[i] > best_lambda) {
        best_lambda = lambda[i];
        best = i;
      }
    if (best < 0) break;
    state[best] = kCoarse;
    // lambda(i) depends on the states of S^T(i), so a state change of x
    // invalidates exactly the variables in S(x)
    std::set<int> touched(s.strong[best].begin(), s.strong[best].end());
    for (int j : s.strong_transpose[best]) {
      if (state[j] != kUndecided) continue;
      state[j] = kFine;
      touched.insert(s.strong[j].begin(), s.strong[j].end());
    }
    for (int k : touched)
      if (state[k] == kUndecided) recompute(k);
  }

  for (int i = 0; i < n; ++i)
    if (state[i] == kUndecided) {
      // never reached by the loop: isolated rows become coarse, the rest fine
      state[i] = (a.row_nnz(i) <= 1) ? kCoarse : kFine;
    }

  if (ff_second_pass) {
    // strong F-F pairs must share a coarse interpolatory point; tentatively
    // promote the offending neighbor, promote i itself on a second offense
    std::vector<char> in_si(n, 0);
    for (int i = 0; i < n; ++i) {
      if (state[i] != kFine) continue;
      for (int j : s.strong[i]) in_si[j] = 1;
      int tentative = -1;
      for (int j : s.strong[i]) {
        if (state[j] != kFine) continue;
        bool common = false;
        for (int k : s.strong[j])
          if (state[k] == kCoarse && in_si[k]) { common = true; break; }
        if (common) continue;
        if (tentative < 0) {
          tentative = j;
          state[j] = kCoarse;
        } else {
          state[tentative] = kFine;
          state[i] = kCoarse;
          break;
        }
      }
      for (int j : s.strong[i]) in_si[j] = 0;
    }
  }

  CFSplitting split;
  split.is_coarse.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (state[i] == kCoarse) {
      split.coarse.push_back(i);
      split.is_coarse[i] = 1;
    } else {
      split.fine.push_back(i);
    }
  }
  return split;
}

SparseMatrix standard_interpolation(const SparseMatrix& a, const CFSplitting& split,
                                    const StrengthSets& s,
                                    bool interpolatory_set_intersection) {
  const int n = a.n_rows;
  const int nc = static_cast<int>(split.coarse.size());
  std::vector<int> coarse_index(n, -1);
  for (int c = 0; c < nc; ++c) coarse_index[split.coarse[c]] = c;

  std::vector<int> ti, tj;
  std::vector<double> tv;
  std::vector<char> in_ci(n, 0);
  std::vector<char> is_strong(n, 0);
  std::vector<int> ci;

  for (int i = 0; i < n; ++i) {
    if (split.is_coarse[i]) {
      ti.push_back(i);
      tj.push_back(coarse_index[i]);
      tv.push_back(1.0);
      continue;
    }
    if (s.strong[i].empty()) continue;  // no strong couplings: zero row

    // interpolatory set: strong coarse neighbors, extended through strong
    // fine neighbors
    ci.clear();
    std::vector<int> strong_fine;
    for (int j : s.strong[i]) {
      if (split.is_coarse[j]) {
        if (!in_ci[j]) {
          in_ci[j] = 1;
          ci.push_back(j);
        }
      } else {
        strong_fine.push_back(j);
      }
    }
    if (interpolatory_set_intersection) {
      // the displayed intersection form is empty whenever there is no strong
      // fine neighbor; fall back to the direct set in that case
      if (!strong_fine.empty()) {
        std::vector<char> in_ext(n, 0);
        for (int j : strong_fine)
          for (int k : s.strong[j])
            if (split.is_coarse[k]) in_ext[k] = 1;
        std::vector<int> kept;
        for (int k : ci) {
          if (in_ext[k]) kept.push_back(k);
          else in_ci[k] = 0;
        }
        ci = kept;
      }
    } else {
      for (int j : strong_fine)
        for (int k : s.strong[j])
          if (split.is_coarse[k] && !in_ci[k]) {
            in_ci[k] = 1;
            ci.push_back(k);
          }
    }
    if (ci.empty()) {
      throw std::runtime_error("standard_interpolation: fine variable " + std::to_string(i) +
                               " has strong couplings but an empty interpolatory set");
    }
    std::sort(ci.begin(), ci.end());

    double diag = a.at(i, i);
    std::vector<double> w(ci.size(), 0.0);

    // direct couplings into the interpolatory set; only strong coarse
    // neighbors enter here, weak couplings are lumped below
    for (std::size_t k = 0; k < ci.size(); ++k) {
      const int c = ci[k];
      bool strong_coarse = false;
      for (int j : s.strong[i])
        if (j == c) { strong_coarse = true; break; }
      if (strong_coarse) w[k] = a.at(i, c);
    }

    // distribute strong fine couplings a_ij over row j's entries in the set
    for (int j : s.strong[i]) is_strong[j] = 1;
    for (int j : strong_fine) {
      double sj = 0.0;
      for (int kk = a.row_offsets[j]; kk < a.row_offsets[j + 1]; ++kk)
        if (in_ci[a.col_indices[kk]]) sj += a.values[kk];
      const double aij = a.at(i, j);
      if (sj == 0.0) {
        diag += aij;  // fallback: nothing to distribute onto, treat as weak
        continue;
      }
      for (std::size_t k = 0; k < ci.size(); ++k) w[k] += aij * a.at(j, ci[k]) / sj;
    }

    // weak couplings (including strong coarse neighbors dropped by the
    // intersection variant) are lumped into the diagonal
    for (int kk = a.row_offsets[i]; kk < a.row_offsets[i + 1]; ++kk) {
      const int j = a.col_indices[kk];
      if (j == i) continue;
      if (is_strong[j] && (split.is_coarse[j] ? in_ci[j] : true)) continue;
      diag += a.values[kk];
    }

    if (diag == 0.0)
      throw std::runtime_error("standard_interpolation: zero lumped diagonal at variable " +
                               std::to_string(i));
    for (std::size_t k = 0; k < ci.size(); ++k) {
      const double weight = -w[k] / diag;
      if (weight != 0.0) {
        ti.push_back(i);
        tj.push_back(coarse_index[ci[k]]);
        tv.push_back(weight);
      }
    }
    for (int c : ci) in_ci[c] = 0;
    for (int j : s.strong[i]) is_strong[j] = 0;
  }
  return SparseMatrix::from_triplets(n, nc, std::move(ti), std::move(tj), std::move(tv));
}

SparseMatrix cap_interpolation_rows(const SparseMatrix& p, const CFSplitting& split,
                                    int max_entries) {
  if (max_entries <= 0) return p;
  std::vector<int> ti, tj;
  std::vector<double> tv;
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < p.n_rows; ++i) {
    const int nnz = p.row_nnz(i);
    if (split.is_coarse[i] || nnz <= max_entries) {
      for (int k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k) {
        ti.push_back(i);
        tj.push_back(p.col_indices[k]);
        tv.push_back(p.values[k]);
      }
      continue;
    }
    order.clear();
    double row_sum = 0.0;
    for (int k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k) {
      order.emplace_back(-std::abs(p.values[k]), p.col_indices[k]);
      row_sum += p.values[k];
    }
    std::sort(order.begin(), order.end());
    order.resize(max_entries);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    double kept_sum = 0.0;
    for (const auto& [negabs, col] : order) kept_sum += p.at(i, col);
    const double rescale = (kept_sum != 0.0 && row_sum != 0.0) ? row_sum / kept_sum : 1.0;
    for (const auto& [negabs, col] : order) {
      ti.push_back(i);
      tj.push_back(col);
      tv.push_back(p.at(i, col) * rescale);
    }
  }
  return SparseMatrix::from_triplets(p.n_rows, p.n_cols, std::move(ti), std::move(tj),
                                     std::move(tv));
}

SparseMatrix jacobi_prolongation_smoothing(const SparseMatrix& a, const SparseMatrix& p,
                                           const CFSplitting& split, int passes,
                                           double truncation, int max_entries) {
  if (a.n_rows != p.n_rows) throw std::invalid_argument("jacobi smoothing: dimension mismatch");
  Vector inv_diag(a.n_rows);
  for (int i = 0; i < a.n_rows; ++i) {
    const double d = a.at(i, i);
    if (d == 0.0) throw std::runtime_error("jacobi smoothing: zero diagonal at row " +
                                           std::to_string(i));
    inv_diag[i] = 1.0 / d;
  }

  SparseMatrix cur = p;
  for (int pass = 0; pass < passes; ++pass) {
    // Q = (I - D^-1 A) * cur on fine rows
    std::vector<int> ti, tj;
    std::vector<double> tv;
    std::vector<double> acc(cur.n_cols, 0.0);
    std::vector<int> marker(cur.n_cols, -1);
    std::vector<int> cols;
    for (int i = 0; i < p.n_rows; ++i) {
      if (split.is_coarse[i]) {
        ti.push_back(i);
        tj.push_back(cur.col_indices[cur.row_offsets[i]]);
        tv.push_back(1.0);
        continue;
      }
      cols.clear();
      for (int k = cur.row_offsets[i]; k < cur.row_offsets[i + 1]; ++k) {
        const int c = cur.col_indices[k];
        marker[c] = i;
        acc[c] = cur.values[k];
        cols.push_back(c);
      }
      for (int ka = a.row_offsets[i]; ka < a.row_offsets[i + 1]; ++ka) {
        const int j = a.col_indices[ka];
        const double f = -inv_diag[i] * a.values[ka];
        for (int kp = cur.row_offsets[j]; kp < cur.row_offsets[j + 1]; ++kp) {
          const int c = cur.col_indices[kp];
          if (marker[c] != i) {
            marker[c] = i;
            acc[c] = 0.0;
            cols.push_back(c);
          }
          acc[c] += f * cur.values[kp];
        }
      }
      std::sort(cols.begin(), cols.end());

      double row_sum = 0.0, row_max = 0.0;
      for (int c : cols) {
        row_sum += acc[c];
        row_max = std::max(row_max, std::abs(acc[c]));
      }
      double kept_sum = 0.0;
      const double cut = truncation * row_max;
      for (int c : cols)
        if (std::abs(acc[c]) >= cut && acc[c] != 0.0) kept_sum += acc[c];
      const double rescale =
          (kept_sum != 0.0 && row_sum != 0.0) ? row_sum / kept_sum : 1.0;
      for (int c : cols) {
        if (std::abs(acc[c]) < cut || acc[c] == 0.0) continue;
        ti.push_back(i);
        tj.push_back(c);
        tv.push_back(acc[c] * rescale);
      }
    }
    cur = SparseMatrix::from_triplets(p.n_rows, p.n_cols, std::move(ti), std::move(tj),
                                      std::move(tv));
    cur = cap_interpolation_rows(cur, split, max_entries);
  }
  return cur;
}

Hierarchy build_hierarchy(const SparseMatrix& a_fine, const CoarseningParams& params) {
  if (a_fine.n_rows != a_fine.n_cols)
    throw std::invalid_argument("build_hierarchy: matrix not square");
  if (!(params.eps_str > 0.0 && params.eps_str < 1.0))
    throw std::invalid_argument("build_hierarchy: eps_str must be in (0,1)");

  Hierarchy h;
  h.matrices.push_back(a_fine);
  while (true) {
    const SparseMatrix& a = h.matrices.back();
    const int n = a.n_rows;
    if (n <= params.min_coarse_size) break;
    if (h.level_count() >= params.max_levels) break;

    const StrengthSets s = strength_sets(a, params.eps_str);
    const CFSplitting split =
        standard_coarsening(a, params.eps_str, params.ff_second_pass);
    const int nc = static_cast<int>(split.coarse.size());
    if (nc == 0 || nc > static_cast<int>(0.9 * n)) break;  // coarsening stagnated

    SparseMatrix p =
        standard_interpolation(a, split, s, params.interpolatory_set_intersection);
    p = cap_interpolation_rows(p, split, params.interp_max_entries);
    if (params.jacobi_passes > 0)
      p = jacobi_prolongation_smoothing(a, p, split, params.jacobi_passes,
                                        params.truncation_threshold,
                                        params.interp_max_entries);
    SparseMatrix coarse = triple_product(transpose(p), a, p);
    h.prolongations.push_back(std::move(p));
    h.matrices.push_back(std::move(coarse));
  }

  const SparseMatrix& bottom = h.matrices.back();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(bottom.n_rows, bottom.n_cols);
  for (int i = 0; i < bottom.n_rows; ++i)
    for (int k = bottom.row_offsets[i]; k < bottom.row_offsets[i + 1]; ++k)
      dense(i, bottom.col_indices[k]) = bottom.values[k];
  auto solver = std::make_shared<Hierarchy::CoarseSolver>();
  solver->lu = Eigen::PartialPivLU<Eigen::MatrixXd>(dense);
  h.coarse_solver = std::move(solver);
  return h;
}

double operator_complexity(const Hierarchy& h) {
  if (h.matrices.empty()) throw std::invalid_argument("operator_complexity: empty hierarchy");
  double total = 0.0;
  for (const SparseMatrix& a : h.matrices) total += a.nnz();
  return total / h.matrices.front().nnz();
}

SparseMatrix compose_prolongation(const Hierarchy& h, int from_depth, int to_depth) {
  if (to_depth > from_depth || to_depth < 0 || from_depth >= h.level_count())
    throw std::invalid_argument("compose_prolongation: level out of range");
  if (from_depth == to_depth) return SparseMatrix::identity(h.size(from_depth));
  SparseMatrix p = h.prolongations[from_depth - 1];
  for (int d = from_depth - 2; d >= to_depth; --d) p = multiply(h.prolongations[d], p);
  return p;
}

void write_hierarchy(const Hierarchy& h, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path dir(directory);
  for (int d = 0; d < h.level_count(); ++d)
    write_matrix_market(h.matrices[d], (dir / ("matrix_" + std::to_string(d) + ".mtx")).string());
  for (int d = 0; d + 1 < h.level_count(); ++d)
    write_matrix_market(h.prolongations[d],
                        (dir / ("prolongation_" + std::to_string(d) + ".mtx")).string());

  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot write manifest in " + directory);
  manifest << "levels " << h.level_count() << "\n";
  manifest << "sizes";
  for (int d = 0; d < h.level_count(); ++d) manifest << " " << h.size(d);
  manifest << "\nnnz";
  for (const SparseMatrix& a : h.matrices) manifest << " " << a.nnz();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", operator_complexity(h));
  manifest << "\noperator_complexity " << buf << "\n";
}

}  // namespace ctamg
