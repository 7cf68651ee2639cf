#include "ctamg/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace ctamg {

FrameSystem build_frame(const Hierarchy& h) {
  const int levels = h.level_count();
  FrameSystem fs;
  fs.level_sizes.resize(levels);
  for (int d = 0; d < levels; ++d) fs.level_sizes[d] = h.size(d);

  std::vector<SparseMatrix> composed(levels);  // depth d -> finest
  for (int d = 0; d < levels; ++d) composed[d] = compose_prolongation(h, d, 0);

  fs.blocks.assign(levels, std::vector<SparseMatrix>(levels));
  const SparseMatrix& a_fine = h.matrices.front();
  for (int d1 = 0; d1 < levels; ++d1) {
    fs.blocks[d1][d1] = h.matrices[d1];
    for (int d2 = d1 + 1; d2 < levels; ++d2) {
      fs.blocks[d1][d2] = triple_product(transpose(composed[d1]), a_fine, composed[d2]);
      fs.blocks[d2][d1] = transpose(fs.blocks[d1][d2]);
    }
  }
  return fs;
}

FrameVector frame_rhs(const Hierarchy& h, const Vector& f_fine) {
  if (static_cast<int>(f_fine.size()) != h.size(0))
    throw std::invalid_argument("frame_rhs: dimension mismatch");
  FrameVector v;
  v.parts.resize(h.level_count());
  v.parts[0] = f_fine;
  for (int d = 1; d < h.level_count(); ++d)
    v.parts[d] = spmv_transpose(h.prolongations[d - 1], v.parts[d - 1]);
  return v;
}

Vector project_to_fine(const Hierarchy& h, const FrameVector& u) {
  if (static_cast<int>(u.parts.size()) != h.level_count())
    throw std::invalid_argument("project_to_fine: part count mismatch");
  Vector out = u.parts[0];
  for (int d = 1; d < h.level_count(); ++d) {
    if (static_cast<int>(u.parts[d].size()) != h.size(d))
      throw std::invalid_argument("project_to_fine: part size mismatch");
    // prolongate depth d -> 0 through the stored two-level operators
    Vector w = u.parts[d];
    for (int k = d - 1; k >= 0; --k) w = spmv(h.prolongations[k], w);
    axpy(1.0, w, out);
  }
  return out;
}

namespace {

FrameVector apply(const FrameSystem& fs, const FrameVector& x) {
  const int levels = fs.level_count();
  FrameVector y;
  y.parts.resize(levels);
  for (int d1 = 0; d1 < levels; ++d1) {
    y.parts[d1].assign(fs.level_sizes[d1], 0.0);
    for (int d2 = 0; d2 < levels; ++d2) {
      const Vector t = spmv(fs.block(d1, d2), x.parts[d2]);
      axpy(1.0, t, y.parts[d1]);
    }
  }
  return y;
}

double frame_dot(const FrameVector& a, const FrameVector& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.parts.size(); ++d) s += dot(a.parts[d], b.parts[d]);
  return s;
}

void frame_axpy(double alpha, const FrameVector& x, FrameVector& y) {
  for (std::size_t d = 0; d < x.parts.size(); ++d) axpy(alpha, x.parts[d], y.parts[d]);
}

}  // namespace

FrameSolveResult frame_solve(const FrameSystem& fs, const FrameVector& rhs, double tol,
                             int max_it) {
  const int levels = fs.level_count();
  if (static_cast<int>(rhs.parts.size()) != levels)
    throw std::invalid_argument("frame_solve: rhs part count mismatch");

  FrameVector inv_diag;
  inv_diag.parts.resize(levels);
  for (int d = 0; d < levels; ++d) {
    inv_diag.parts[d].resize(fs.level_sizes[d]);
    for (int i = 0; i < fs.level_sizes[d]; ++i) {
      const double v = fs.block(d, d).at(i, i);
      inv_diag.parts[d][i] = (v != 0.0) ? 1.0 / v : 1.0;
    }
  }
  auto precondition = [&](const FrameVector& r) {
    FrameVector z = r;
    for (int d = 0; d < levels; ++d)
      for (std::size_t i = 0; i < z.parts[d].size(); ++i) z.parts[d][i] *= inv_diag.parts[d][i];
    return z;
  };

  FrameSolveResult res;
  res.solution.parts.resize(levels);
  for (int d = 0; d < levels; ++d) res.solution.parts[d].assign(fs.level_sizes[d], 0.0);

  const double rhs_norm = std::sqrt(frame_dot(rhs, rhs));
  if (rhs_norm == 0.0) return res;

  FrameVector r = rhs;
  FrameVector z = precondition(r);
  FrameVector p = z;
  double rz = frame_dot(r, z);
  double rel = 1.0;
  int it = 0;
  for (; it < max_it; ++it) {
    rel = std::sqrt(frame_dot(r, r)) / rhs_norm;
    if (rel <= tol) break;
    const FrameVector ap = apply(fs, p);
    const double pap = frame_dot(p, ap);
    if (!(pap > 0.0)) break;  // direction fell into the kernel
    const double alpha = rz / pap;
    frame_axpy(alpha, p, res.solution);
    frame_axpy(-alpha, ap, r);
    z = precondition(r);
    const double rz_new = frame_dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int d = 0; d < levels; ++d)
      for (std::size_t i = 0; i < p.parts[d].size(); ++i)
        p.parts[d][i] = z.parts[d][i] + beta * p.parts[d][i];
  }
  res.iterations = it;
  res.relative_residual = rel;
  res.converged = rel <= tol;
  return res;
}

}  // namespace ctamg
