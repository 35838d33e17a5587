#pragma once

// Data-parallel dense kernels. Every kernel exists twice: a serial reference in
// `serial::` and an OpenMP version in `omp::`. Both evaluate each output element
// with the same operation order, so they agree bit-for-bit; the parallel
// versions only split independent rows across threads.

#include <span>

#include "affectcl/matrix.hpp"

namespace affectcl {

enum class Exec { serial, parallel };

namespace kernels {

namespace serial {

/// out(i, :) = w · x(i, :) + b   (w is out_dim × in_dim)
void affine_rows(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& out);

/// out = z · zᵀ
void gram(const Matrix& z, Matrix& out);

/// out = a · b
void matmul(const Matrix& a, const Matrix& b, Matrix& out);

/// dw = deltaᵀ · x,  db = column sums of delta
void weight_grad(const Matrix& delta, const Matrix& x, Matrix& dw, std::span<double> db);

}  // namespace serial

namespace omp {

void affine_rows(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& out);
void gram(const Matrix& z, Matrix& out);
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void weight_grad(const Matrix& delta, const Matrix& x, Matrix& dw, std::span<double> db);

}  // namespace omp

inline void affine_rows(Exec e, const Matrix& x, const Matrix& w, std::span<const double> b,
                        Matrix& out) {
  e == Exec::parallel ? omp::affine_rows(x, w, b, out) : serial::affine_rows(x, w, b, out);
}
inline void gram(Exec e, const Matrix& z, Matrix& out) {
  e == Exec::parallel ? omp::gram(z, out) : serial::gram(z, out);
}
inline void matmul(Exec e, const Matrix& a, const Matrix& b, Matrix& out) {
  e == Exec::parallel ? omp::matmul(a, b, out) : serial::matmul(a, b, out);
}
inline void weight_grad(Exec e, const Matrix& delta, const Matrix& x, Matrix& dw,
                        std::span<double> db) {
  e == Exec::parallel ? omp::weight_grad(delta, x, dw, db) : serial::weight_grad(delta, x, dw, db);
}

/// Threads the OpenMP kernels will use (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace kernels
}  // namespace affectcl
