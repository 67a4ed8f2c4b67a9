#include "paramred/coupled.hpp"

#include <algorithm>
#include <cmath>

#include "paramred/errors.hpp"
#include "paramred/kernel.hpp"
#include "paramred/kernels.hpp"

namespace paramred {

namespace {

void check_partition(const Partition& p, std::size_t coord_dim) {
  for (Eigen::Index idx : p.m1)
    if (idx < 0 || static_cast<std::size_t>(idx) >= coord_dim)
      throw InputError("partition: M1 index out of range");
  for (Eigen::Index idx : p.m2)
    if (idx < 0 || static_cast<std::size_t>(idx) >= coord_dim)
      throw InputError("partition: M2 index out of range");
  for (Eigen::Index a : p.m1)
    for (Eigen::Index b : p.m2)
      if (a == b)
        throw InputError("partition: index " + std::to_string(a) +
                         " appears in both M1 and M2");
  if (p.m1.empty() || p.m2.empty())
    throw InputError("partition: both index sets must be non-empty");
}

std::vector<double> sub_coords(const ParameterPoint& pt,
                               const std::vector<Eigen::Index>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (Eigen::Index k : idx)
    out.push_back(pt.coords[static_cast<std::size_t>(k)]);
  return out;
}

}  // namespace

CoupledEnsemble::CoupledEnsemble(Eigen::MatrixXd data1, Eigen::MatrixXd data2,
                                 SampledMeasure measure,
                                 std::optional<Partition> partition)
    : sub1_(std::move(data1), measure),
      sub2_(std::move(data2), std::move(measure)),
      partition_(std::move(partition)) {
  if (partition_)
    check_partition(*partition_, sub1_.measure().point(0).coords.size());
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> coupled_R(
    const CoupledEnsemble& ce, const Eigen::VectorXd& u1,
    const Eigen::VectorXd& u2) {
  return {apply_R(ce.sub1(), u1), apply_R(ce.sub2(), u2)};
}

CorrelationMatrix coupling_correlation(const CoupledEnsemble& ce) {
  const Eigen::Index d1 = ce.sub1().state_dim();
  const Eigen::Index d2 = ce.sub2().state_dim();
  const Eigen::VectorXd& w = ce.measure().weights();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d1 + d2, d1 + d2);
  c.topLeftCorner(d1, d1) = kernels::weighted_outer_sum(ce.sub1().data(), w);
  c.bottomRightCorner(d2, d2) =
      kernels::weighted_outer_sum(ce.sub2().data(), w);
  return CorrelationMatrix(std::move(c));
}

CoupledKernel coupled_kernel(const CoupledEnsemble& ce) {
  return CoupledKernel{kernels::gram_matrix(ce.sub1().data()),
                       kernels::gram_matrix(ce.sub2().data())};
}

CoupledPod coupled_pod(const CoupledEnsemble& ce, Eigen::Index n1,
                       Eigen::Index n2) {
  KLExpansion kl1 = truncate(kl_expand(ce.sub1()), n1);
  KLExpansion kl2 = truncate(kl_expand(ce.sub2()), n2);
  const double joint = kl1.discarded_energy() + kl2.discarded_energy();
  return CoupledPod{std::move(kl1), std::move(kl2), joint};
}

GridStructure grid_structure(const CoupledEnsemble& ce) {
  if (!ce.partition())
    throw InputError("grid_structure: ensemble has no partition");
  const Partition& p = *ce.partition();
  const Eigen::Index n = ce.sample_count();

  // Count distinct leading M1 tuples assuming mu1 varies slowest; the
  // block length gives n2.
  Eigen::Index n2 = 1;
  while (n2 < n) {
    if (sub_coords(ce.measure().point(n2), p.m1) !=
        sub_coords(ce.measure().point(0), p.m1))
      break;
    ++n2;
  }
  if (n % n2 != 0)
    throw InputError(
        "grid_structure: sample count is not a multiple of the mu2 block "
        "length; non-grid partitioned sampling is not supported");
  const Eigen::Index n1 = n / n2;

  for (Eigen::Index i1 = 0; i1 < n1; ++i1) {
    const auto m1_ref = sub_coords(ce.measure().point(i1 * n2), p.m1);
    for (Eigen::Index i2 = 0; i2 < n2; ++i2) {
      const auto& pt = ce.measure().point(i1 * n2 + i2);
      if (sub_coords(pt, p.m1) != m1_ref)
        throw InputError(
            "grid_structure: M1 coordinates vary inside a mu2 block; "
            "samples are not a row-major tensor grid");
      if (sub_coords(pt, p.m2) != sub_coords(ce.measure().point(i2), p.m2))
        throw InputError(
            "grid_structure: M2 coordinates do not repeat across mu1 "
            "blocks; samples are not a row-major tensor grid");
    }
  }
  return GridStructure{n1, n2};
}

}  // namespace paramred
