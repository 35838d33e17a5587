#include "affectcl/kernels.hpp"

#include <cstddef>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "affectcl/errors.hpp"

namespace affectcl::kernels {
namespace {

using std::size_t;

void check(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("kernel shape mismatch: ") + what);
}

void prepare_affine(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& out) {
  check(x.cols() == w.cols(), "affine_rows input width");
  check(b.size() == w.rows(), "affine_rows bias length");
  if (out.rows() != x.rows() || out.cols() != w.rows()) out.resize(x.rows(), w.rows());
}

inline void affine_row(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& out,
                       size_t i) {
  const auto xi = x.row(i);
  auto oi = out.row(i);
  const size_t n = xi.size();
  size_t o = 0;
  for (; o + 4 <= w.rows(); o += 4) {
    const double* w0 = w.row(o).data();
    const double* w1 = w0 + n;
    const double* w2 = w1 + n;
    const double* w3 = w2 + n;
    double s0 = b[o], s1 = b[o + 1], s2 = b[o + 2], s3 = b[o + 3];
    for (size_t k = 0; k < n; ++k) {
      const double v = xi[k];
      s0 += w0[k] * v;
      s1 += w1[k] * v;
      s2 += w2[k] * v;
      s3 += w3[k] * v;
    }
    oi[o] = s0;
    oi[o + 1] = s1;
    oi[o + 2] = s2;
    oi[o + 3] = s3;
  }
  for (; o < w.rows(); ++o) {
    const auto wo = w.row(o);
    double s = b[o];
    for (size_t k = 0; k < n; ++k) s += wo[k] * xi[k];
    oi[o] = s;
  }
}

// Fills row i from column i onward and mirrors into column i; products
// commute exactly, so the result equals the full computation.
inline void gram_row(const Matrix& z, Matrix& out, size_t i) {
  const size_t n = z.rows(), d = z.cols();
  const double* zi = z.row(i).data();
  size_t j = i;
  for (; j + 4 <= n; j += 4) {
    const double* z0 = z.row(j).data();
    const double* z1 = z0 + d;
    const double* z2 = z1 + d;
    const double* z3 = z2 + d;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (size_t k = 0; k < d; ++k) {
      const double v = zi[k];
      s0 += v * z0[k];
      s1 += v * z1[k];
      s2 += v * z2[k];
      s3 += v * z3[k];
    }
    out(i, j) = out(j, i) = s0;
    out(i, j + 1) = out(j + 1, i) = s1;
    out(i, j + 2) = out(j + 2, i) = s2;
    out(i, j + 3) = out(j + 3, i) = s3;
  }
  for (; j < n; ++j) {
    const double* zj = z.row(j).data();
    double s = 0.0;
    for (size_t k = 0; k < d; ++k) s += zi[k] * zj[k];
    out(i, j) = out(j, i) = s;
  }
}

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& out, size_t i) {
  auto oi = out.row(i);
  const size_t m = oi.size(), inner = a.cols();
  const double* ai = a.row(i).data();
  for (auto& v : oi) v = 0.0;
  size_t k = 0;
  for (; k + 4 <= inner; k += 4) {
    const double a0 = ai[k], a1 = ai[k + 1], a2 = ai[k + 2], a3 = ai[k + 3];
    const double* b0 = b.row(k).data();
    const double* b1 = b0 + m;
    const double* b2 = b1 + m;
    const double* b3 = b2 + m;
    for (size_t j = 0; j < m; ++j) oi[j] = (((oi[j] + a0 * b0[j]) + a1 * b1[j]) + a2 * b2[j]) + a3 * b3[j];
  }
  for (; k < inner; ++k) {
    const double aik = ai[k];
    const double* bk = b.row(k).data();
    for (size_t j = 0; j < m; ++j) oi[j] += aik * bk[j];
  }
}

inline void weight_grad_row(const Matrix& delta, const Matrix& x, Matrix& dw, std::span<double> db,
                            size_t o) {
  auto dwo = dw.row(o);
  for (auto& v : dwo) v = 0.0;
  double bsum = 0.0;
  for (size_t i = 0; i < delta.rows(); ++i) {
    const double d = delta(i, o);
    bsum += d;
    if (d == 0.0) continue;
    const auto xi = x.row(i);
    for (size_t k = 0; k < dwo.size(); ++k) dwo[k] += d * xi[k];
  }
  db[o] = bsum;
}

void prepare_weight_grad(const Matrix& delta, const Matrix& x, Matrix& dw, std::span<double> db) {
  check(delta.rows() == x.rows(), "weight_grad batch size");
  check(db.size() == delta.cols(), "weight_grad bias length");
  if (dw.rows() != delta.cols() || dw.cols() != x.cols()) dw.resize(delta.cols(), x.cols());
}

}  // namespace

namespace serial {

void affine_rows(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& out) {
  prepare_affine(x, w, b, out);
  for (size_t i = 0; i < x.rows(); ++i) affine_row(x, w, b, out, i);
}

void gram(const Matrix& z, Matrix& out) {
  if (out.rows() != z.rows() || out.cols() != z.rows()) out.resize(z.rows(), z.rows());
  for (size_t i = 0; i < z.rows(); ++i) gram_row(z, out, i);
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  check(a.cols() == b.rows(), "matmul inner dimension");
  if (out.rows() != a.rows() || out.cols() != b.cols()) out.resize(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, out, i);
}

void weight_grad(const Matrix& delta, const Matrix& x, Matrix& dw, std::span<double> db) {
  prepare_weight_grad(delta, x, dw, db);
  for (size_t o = 0; o < delta.cols(); ++o) weight_grad_row(delta, x, dw, db, o);
}

}  // namespace serial

namespace omp {

void affine_rows(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& out) {
  prepare_affine(x, w, b, out);
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) affine_row(x, w, b, out, static_cast<size_t>(i));
}

void gram(const Matrix& z, Matrix& out) {
  if (out.rows() != z.rows() || out.cols() != z.rows()) out.resize(z.rows(), z.rows());
  const auto n = static_cast<std::ptrdiff_t>(z.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) gram_row(z, out, static_cast<size_t>(i));
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  check(a.cols() == b.rows(), "matmul inner dimension");
  if (out.rows() != a.rows() || out.cols() != b.cols()) out.resize(a.rows(), b.cols());
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) matmul_row(a, b, out, static_cast<size_t>(i));
}

void weight_grad(const Matrix& delta, const Matrix& x, Matrix& dw, std::span<double> db) {
  prepare_weight_grad(delta, x, dw, db);
  const auto n = static_cast<std::ptrdiff_t>(delta.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t o = 0; o < n; ++o) weight_grad_row(delta, x, dw, db, static_cast<size_t>(o));
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace affectcl::kernels
