#ifndef PARAMRED_LIE_HPP
#define PARAMRED_LIE_HPP

#include <Eigen/Core>

namespace paramred {

// Matrix exponential and logarithm on the two manifolds used by the
// structure-preserving encodings: Sym+(n) with algebra sym(n), and SO(n)
// with algebra so(n). Symmetric cases go through spectral calculus; the
// skew exponential uses scaling-and-squaring with a diagonal Pade(6,6)
// approximant and the rotation logarithm reads the planar rotation angles
// off the real Schur form.

/// exp(H) for symmetric H; output is symmetric positive definite.
Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& h);

/// log(A) for symmetric positive definite A. Throws DomainError when A is
/// not positive definite, InputError when not symmetric.
Eigen::MatrixXd sym_log(const Eigen::MatrixXd& a);

/// exp(S) for skew-symmetric S; output is a rotation (orthogonal, det +1).
Eigen::MatrixXd skew_exp(const Eigen::MatrixXd& s);

/// Principal logarithm of a rotation matrix; rotation angles lie in
/// (-pi, pi). Throws LogBranchError when any rotation angle is within
/// 1e-6 of pi (the principal log is ill-conditioned there).
Eigen::MatrixXd rotation_log(const Eigen::MatrixXd& q);

}  // namespace paramred

#endif  // PARAMRED_LIE_HPP
