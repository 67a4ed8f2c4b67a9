#ifndef PARAMRED_KERNELS_HPP
#define PARAMRED_KERNELS_HPP

#include <vector>

#include <Eigen/Core>

namespace paramred::kernels {

// Dense assembly kernels behind the module-level operations. Each kernel
// exists twice: the OpenMP version used by the library and a serial
// reference in kernels::serial. Both call the same per-output routines and
// parallelism is only ever over independent outputs, so the two variants
// (and any thread count) produce bitwise-identical results. The serial
// versions stay as the comparison baseline for tests and the benchmark.

/// C = sum_i w_i a_i a_i^T for the columns a_i of A. Output is exactly
/// symmetric: only the upper triangle is computed, the rest mirrored.
Eigen::MatrixXd weighted_outer_sum(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& w);

/// G = A^T A, exactly symmetric by construction.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& A);

/// A^T B for two snapshot matrices sharing the state dimension.
Eigen::MatrixXd cross_gram_matrix(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B);

/// A^T u: the coordinate functions (R u)(mu_i).
Eigen::VectorXd matvec_transposed(const Eigen::MatrixXd& A,
                                  const Eigen::VectorXd& u);

/// sum_i w_i phi_i a_i: the adjoint R* phi.
Eigen::VectorXd weighted_combination(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& phi);

/// Assembles the (N*e) x (N*e) block kernel with blocks
///   B(i,j) = sum_{k,l} G_kl(i,j) * F[k][l]
/// where G_kl is the cross gram of components k and l and F[k][l] is the
/// e x e frame factor. Blocks with i < j are computed, the mirror filled as
/// B(j,i) = B(i,j)^T and diagonal blocks symmetrized, so the assembled
/// matrix is exactly symmetric.
Eigen::MatrixXd block_kernel(const std::vector<Eigen::MatrixXd>& components,
                             const std::vector<std::vector<Eigen::MatrixXd>>& frame_factors);

namespace serial {

Eigen::MatrixXd weighted_outer_sum(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& w);
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& A);
Eigen::MatrixXd cross_gram_matrix(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B);
Eigen::VectorXd matvec_transposed(const Eigen::MatrixXd& A,
                                  const Eigen::VectorXd& u);
Eigen::VectorXd weighted_combination(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& phi);
Eigen::MatrixXd block_kernel(const std::vector<Eigen::MatrixXd>& components,
                             const std::vector<std::vector<Eigen::MatrixXd>>& frame_factors);

}  // namespace serial

}  // namespace paramred::kernels

#endif  // PARAMRED_KERNELS_HPP
