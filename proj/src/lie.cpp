#include "paramred/lie.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "paramred/errors.hpp"

namespace paramred {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_square(const Eigen::MatrixXd& m, const char* who) {
  if (m.rows() != m.cols())
    throw InputError(std::string(who) + ": matrix is not square");
  if (!m.allFinite())
    throw InputError(std::string(who) + ": non-finite entries");
}

double sym_defect(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& h) {
  require_square(h, "sym_exp");
  const double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
  if (sym_defect(h) > 1e-10 * scale)
    throw InputError("sym_exp: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (h + h.transpose()));
  Eigen::MatrixXd a = es.eigenvectors() *
                      es.eigenvalues().array().exp().matrix().asDiagonal() *
                      es.eigenvectors().transpose();
  return 0.5 * (a + a.transpose()).eval();
}

Eigen::MatrixXd sym_log(const Eigen::MatrixXd& a) {
  require_square(a, "sym_log");
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
  if (sym_defect(a) > 1e-10 * scale)
    throw InputError("sym_log: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (a + a.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw DomainError("sym_log: matrix is not positive definite (eigenvalue " +
                      std::to_string(es.eigenvalues().minCoeff()) + ")");
  Eigen::MatrixXd h = es.eigenvectors() *
                      es.eigenvalues().array().log().matrix().asDiagonal() *
                      es.eigenvectors().transpose();
  return 0.5 * (h + h.transpose()).eval();
}

Eigen::MatrixXd skew_exp(const Eigen::MatrixXd& s) {
  require_square(s, "skew_exp");
  if ((s + s.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(s.cwiseAbs().maxCoeff(), 1.0))
    throw InputError("skew_exp: matrix is not skew-symmetric");

  const Eigen::Index n = s.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  // Scale so the Pade(6,6) approximant is well inside its accuracy radius.
  const double norm = s.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  if (norm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    if (squarings > 60) throw InputError("skew_exp: matrix norm too large");
  }
  const Eigen::MatrixXd x = s / std::ldexp(1.0, squarings);

  // Diagonal Pade(6,6): exp(x) ~ q(-x)^{-1} q(x).
  static const double coeff[7] = {1.0,         1.0 / 2.0,    5.0 / 44.0,
                                  1.0 / 66.0,  1.0 / 792.0,  1.0 / 15840.0,
                                  1.0 / 665280.0};
  const Eigen::MatrixXd x2 = x * x;
  const Eigen::MatrixXd x4 = x2 * x2;
  const Eigen::MatrixXd x6 = x4 * x2;
  const Eigen::MatrixXd even =
      coeff[0] * eye + coeff[2] * x2 + coeff[4] * x4 + coeff[6] * x6;
  const Eigen::MatrixXd odd_part =
      (coeff[1] * eye + coeff[3] * x2 + coeff[5] * x4) * x;
  Eigen::MatrixXd num = even + odd_part;
  Eigen::MatrixXd den = even - odd_part;
  Eigen::MatrixXd r = den.partialPivLu().solve(num);

  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Eigen::MatrixXd rotation_log(const Eigen::MatrixXd& q) {
  require_square(q, "rotation_log");
  const Eigen::Index n = q.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  if ((q.transpose() * q - eye).norm() > 1e-8)
    throw InputError("rotation_log: matrix is not orthogonal");
  if (q.determinant() <= 0.0)
    throw InputError("rotation_log: determinant is not positive");

  // A rotation is normal, so its real Schur form is block diagonal: 1x1
  // blocks +-1 and 2x2 planar rotation blocks. The principal log rotates
  // each plane by its angle; an angle at pi has no principal log.
  Eigen::RealSchur<Eigen::MatrixXd> schur(q);
  if (schur.info() != Eigen::Success)
    throw Error("rotation_log: Schur decomposition failed");
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& u = schur.matrixU();

  Eigen::MatrixXd log_t = Eigen::MatrixXd::Zero(n, n);
  // Subdiagonal entries of T are exact zeros outside 2x2 blocks.
  const double block_tol = 1e-14;
  for (Eigen::Index i = 0; i < n;) {
    const bool pair = (i + 1 < n) && (std::abs(t(i + 1, i)) > block_tol);
    if (pair) {
      const double c = 0.5 * (t(i, i) + t(i + 1, i + 1));
      const double sn = 0.5 * (t(i + 1, i) - t(i, i + 1));
      const double angle = std::atan2(sn, c);
      if (kPi - std::abs(angle) < 1e-6)
        throw LogBranchError("rotation_log: rotation angle within 1e-6 of pi");
      log_t(i, i + 1) = -angle;
      log_t(i + 1, i) = angle;
      i += 2;
    } else {
      if (t(i, i) < 0.0)
        throw LogBranchError(
            "rotation_log: eigenvalue -1 (rotation angle pi)");
      // Eigenvalue +1: zero log contribution.
      i += 1;
    }
  }
  Eigen::MatrixXd s = u * log_t * u.transpose();
  return 0.5 * (s - s.transpose()).eval();
}

}  // namespace paramred
