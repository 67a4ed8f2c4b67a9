#include "paramred/kernels.hpp"

#include "paramred/errors.hpp"

namespace paramred::kernels {

namespace {

// Per-output workers. Serial and OpenMP variants both call these, which is
// what makes their outputs bitwise identical.

inline double outer_sum_entry(const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& w, Eigen::Index a,
                              Eigen::Index b) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    acc += w[i] * (A(a, i) * A(b, i));
  return acc;
}

inline double dot_columns(const Eigen::MatrixXd& A, Eigen::Index i,
                          const Eigen::MatrixXd& B, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < A.rows(); ++a) acc += A(a, i) * B(a, j);
  return acc;
}

inline double dot_column_vector(const Eigen::MatrixXd& A, Eigen::Index i,
                                const Eigen::VectorXd& u) {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < A.rows(); ++a) acc += A(a, i) * u[a];
  return acc;
}

inline double combination_entry(const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& w,
                                const Eigen::VectorXd& phi, Eigen::Index a) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    acc += (w[i] * phi[i]) * A(a, i);
  return acc;
}

// One (i,j) block of the block kernel, i <= j. The (k,l) summation order is
// fixed so diagonal blocks need an explicit symmetrization afterwards.
inline Eigen::MatrixXd kernel_block(
    const std::vector<Eigen::MatrixXd>& components,
    const std::vector<std::vector<Eigen::MatrixXd>>& frame_factors,
    Eigen::Index i, Eigen::Index j) {
  const std::size_t k_count = components.size();
  const Eigen::Index e = frame_factors[0][0].rows();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(e, e);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t l = 0; l < k_count; ++l) {
      const double g = dot_columns(components[k], i, components[l], j);
      block.noalias() += g * frame_factors[k][l];
    }
  }
  if (i == j) block = 0.5 * (block + block.transpose()).eval();
  return block;
}

void check_block_inputs(
    const std::vector<Eigen::MatrixXd>& components,
    const std::vector<std::vector<Eigen::MatrixXd>>& frame_factors) {
  if (components.empty())
    throw InputError("block_kernel: no components");
  if (frame_factors.size() != components.size())
    throw InputError("block_kernel: frame factor count mismatch");
  for (const auto& row : frame_factors)
    if (row.size() != components.size())
      throw InputError("block_kernel: frame factor count mismatch");
}

}  // namespace

// ---- OpenMP versions --------------------------------------------------

Eigen::MatrixXd weighted_outer_sum(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& w) {
  const Eigen::Index d = A.rows();
  Eigen::MatrixXd C(d, d);
  // Cyclic distribution: row a computes d-a entries of the triangle.
#pragma omp parallel for schedule(static, 1)
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      const double v = outer_sum_entry(A, w, a, b);
      C(a, b) = v;
      C(b, a) = v;
    }
  }
  return C;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.cols();
  Eigen::MatrixXd G(n, n);
#pragma omp parallel for schedule(static, 1)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = dot_columns(A, i, A, j);
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

Eigen::MatrixXd cross_gram_matrix(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows())
    throw InputError("cross_gram: state dimensions differ");
  Eigen::MatrixXd G(A.cols(), B.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j)
      G(i, j) = dot_columns(A, i, B, j);
  return G;
}

Eigen::VectorXd matvec_transposed(const Eigen::MatrixXd& A,
                                  const Eigen::VectorXd& u) {
  Eigen::VectorXd out(A.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    out[i] = dot_column_vector(A, i, u);
  return out;
}

Eigen::VectorXd weighted_combination(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& phi) {
  Eigen::VectorXd out(A.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index a = 0; a < A.rows(); ++a)
    out[a] = combination_entry(A, w, phi, a);
  return out;
}

Eigen::MatrixXd block_kernel(
    const std::vector<Eigen::MatrixXd>& components,
    const std::vector<std::vector<Eigen::MatrixXd>>& frame_factors) {
  check_block_inputs(components, frame_factors);
  const Eigen::Index n_samples = components[0].cols();
  const Eigen::Index e = frame_factors[0][0].rows();
  Eigen::MatrixXd big(n_samples * e, n_samples * e);
#pragma omp parallel for schedule(static, 1)
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    for (Eigen::Index j = i; j < n_samples; ++j) {
      const Eigen::MatrixXd block =
          kernel_block(components, frame_factors, i, j);
      big.block(i * e, j * e, e, e) = block;
      if (i != j) big.block(j * e, i * e, e, e) = block.transpose();
    }
  }
  return big;
}

// ---- Serial reference versions ----------------------------------------

namespace serial {

Eigen::MatrixXd weighted_outer_sum(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& w) {
  const Eigen::Index d = A.rows();
  Eigen::MatrixXd C(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      const double v = outer_sum_entry(A, w, a, b);
      C(a, b) = v;
      C(b, a) = v;
    }
  }
  return C;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.cols();
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = dot_columns(A, i, A, j);
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

Eigen::MatrixXd cross_gram_matrix(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows())
    throw InputError("cross_gram: state dimensions differ");
  Eigen::MatrixXd G(A.cols(), B.cols());
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j)
      G(i, j) = dot_columns(A, i, B, j);
  return G;
}

Eigen::VectorXd matvec_transposed(const Eigen::MatrixXd& A,
                                  const Eigen::VectorXd& u) {
  Eigen::VectorXd out(A.cols());
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    out[i] = dot_column_vector(A, i, u);
  return out;
}

Eigen::VectorXd weighted_combination(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& phi) {
  Eigen::VectorXd out(A.rows());
  for (Eigen::Index a = 0; a < A.rows(); ++a)
    out[a] = combination_entry(A, w, phi, a);
  return out;
}

Eigen::MatrixXd block_kernel(
    const std::vector<Eigen::MatrixXd>& components,
    const std::vector<std::vector<Eigen::MatrixXd>>& frame_factors) {
  check_block_inputs(components, frame_factors);
  const Eigen::Index n_samples = components[0].cols();
  const Eigen::Index e = frame_factors[0][0].rows();
  Eigen::MatrixXd big(n_samples * e, n_samples * e);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    for (Eigen::Index j = i; j < n_samples; ++j) {
      const Eigen::MatrixXd block =
          kernel_block(components, frame_factors, i, j);
      big.block(i * e, j * e, e, e) = block;
      if (i != j) big.block(j * e, i * e, e, e) = block.transpose();
    }
  }
  return big;
}

}  // namespace serial

}  // namespace paramred::kernels
