#ifndef PARAMRED_COUPLED_HPP
#define PARAMRED_COUPLED_HPP

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "paramred/ensemble.hpp"
#include "paramred/spectral.hpp"

namespace paramred {

/// Split of the parameter coordinates into the subsystem-1 and subsystem-2
/// index sets (disjoint, each a subset of the coordinate list).
struct Partition {
  std::vector<Eigen::Index> m1;
  std::vector<Eigen::Index> m2;
};

/// Two-subsystem model r(mu) = (r_1(mu), r_2(mu)) on U_1 x U_2 over one
/// shared sample measure, optionally with a parameter-set partition
/// declaring that r_1 depends only on the M_1 coordinates and r_2 on M_2.
class CoupledEnsemble {
 public:
  CoupledEnsemble(Eigen::MatrixXd data1, Eigen::MatrixXd data2,
                  SampledMeasure measure,
                  std::optional<Partition> partition = std::nullopt);

  const SnapshotEnsemble& sub1() const { return sub1_; }
  const SnapshotEnsemble& sub2() const { return sub2_; }
  const SampledMeasure& measure() const { return sub1_.measure(); }
  Eigen::Index sample_count() const { return sub1_.sample_count(); }
  const std::optional<Partition>& partition() const { return partition_; }

 private:
  SnapshotEnsemble sub1_;
  SnapshotEnsemble sub2_;
  std::optional<Partition> partition_;
};

/// The 2 x 2 diagonal matrix kernel: diag_j(i,i') = <r_j(mu_i), r_j(mu_i')>.
/// Off-diagonal blocks are identically zero by construction and not stored.
struct CoupledKernel {
  Eigen::MatrixXd diag1;
  Eigen::MatrixXd diag2;
};

/// Tensor-grid layout of a partitioned coupled ensemble: N = n1 * n2 with
/// the M_1 coordinates varying slowest (row-major over (mu_1, mu_2)).
struct GridStructure {
  Eigen::Index n1;
  Eigen::Index n2;
};

/// The R^2-valued coordinate functions (<u_1, r_1(mu_i)>, <u_2, r_2(mu_i)>).
std::pair<Eigen::VectorXd, Eigen::VectorXd> coupled_R(
    const CoupledEnsemble& ce, const Eigen::VectorXd& u1,
    const Eigen::VectorXd& u2);

/// Block-diagonal coupling correlation diag(C_1, C_2) on R^{d1+d2}.
CorrelationMatrix coupling_correlation(const CoupledEnsemble& ce);

CoupledKernel coupled_kernel(const CoupledEnsemble& ce);

struct CoupledPod {
  KLExpansion kl1;
  KLExpansion kl2;
  double joint_squared_error;
};

/// Independent KL expansions per subsystem over the shared measure,
/// truncated to n1 and n2 modes.
CoupledPod coupled_pod(const CoupledEnsemble& ce, Eigen::Index n1,
                       Eigen::Index n2);

/// Validates the tensor-grid layout required by the partitioned variant
/// and returns the grid sizes. Throws InputError when no partition is
/// declared or the samples are not a row-major grid.
GridStructure grid_structure(const CoupledEnsemble& ce);

}  // namespace paramred

#endif  // PARAMRED_COUPLED_HPP
