#include "paramred/structured.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "paramred/errors.hpp"
#include "paramred/kernels.hpp"
#include "paramred/lie.hpp"

namespace paramred {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::vector<Eigen::MatrixXd> component_data(
    const std::vector<SnapshotEnsemble>& components) {
  std::vector<Eigen::MatrixXd> data;
  data.reserve(components.size());
  for (const auto& c : components) data.push_back(c.data());
  return data;
}

void check_shared_measure(const std::vector<SnapshotEnsemble>& components,
                          const char* who) {
  if (components.empty())
    throw InputError(std::string(who) + ": no components");
  for (std::size_t k = 1; k < components.size(); ++k) {
    if (components[k].state_dim() != components[0].state_dim())
      throw InputError(std::string(who) +
                       ": components have different state dimensions");
    if (!components[k].measure().same_samples(components[0].measure()))
      throw InputError(std::string(who) +
                       ": components do not share the sample measure");
  }
}

}  // namespace

const char* manifold_name(Manifold m) {
  switch (m) {
    case Manifold::kSpd: return "spd";
    case Manifold::kRotation: return "rotation";
    case Manifold::kSymmetricLogCoords: return "symmetric-log-coords";
    case Manifold::kSkewLogCoords: return "skew-log-coords";
  }
  return "?";
}

Manifold manifold_from_name(const std::string& name) {
  if (name == "spd") return Manifold::kSpd;
  if (name == "rotation") return Manifold::kRotation;
  if (name == "symmetric-log-coords") return Manifold::kSymmetricLogCoords;
  if (name == "skew-log-coords") return Manifold::kSkewLogCoords;
  throw InputError("unknown manifold tag '" + name + "'");
}

// ---- VectorFieldEnsemble ---------------------------------------------------

VectorFieldEnsemble::VectorFieldEnsemble(
    std::vector<SnapshotEnsemble> components, Eigen::MatrixXd frame)
    : components_(std::move(components)), frame_(std::move(frame)) {
  check_shared_measure(components_, "vector field");
  if (frame_.cols() != static_cast<Eigen::Index>(components_.size()))
    throw InputError("vector field: " + std::to_string(components_.size()) +
                     " components but " + std::to_string(frame_.cols()) +
                     " frame vectors");
  if (frame_.rows() < 1)
    throw InputError("vector field: frame dimension must be at least 1");
  if (!frame_.allFinite())
    throw InputError("vector field: non-finite frame vector");
}

// ---- MatrixFieldEnsemble ---------------------------------------------------

MatrixFieldEnsemble::MatrixFieldEnsemble(std::vector<Eigen::MatrixXd> samples,
                                         Manifold manifold)
    : samples_(std::move(samples)), manifold_(manifold) {
  if (samples_.empty()) throw InputError("matrix field: no samples");
  const Eigen::Index n = samples_[0].rows();
  for (const auto& a : samples_) {
    if (a.rows() != n || a.cols() != n)
      throw InputError("matrix field: samples have inconsistent shapes");
    if (!a.allFinite())
      throw InputError("matrix field: non-finite sample");
  }

  log_coords_.resize(samples_.size());
  const auto n_samples = static_cast<Eigen::Index>(samples_.size());
  // Per-sample transform; outputs are independent.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    try {
      const Eigen::MatrixXd& a = samples_[static_cast<std::size_t>(i)];
      Eigen::MatrixXd h;
      switch (manifold_) {
        case Manifold::kSpd: {
          if ((a - a.transpose()).cwiseAbs().maxCoeff() >
              1e-10 * std::max(a.cwiseAbs().maxCoeff(), 1.0))
            throw DomainError("matrix field: sample " + std::to_string(i) +
                              " is not symmetric");
          h = sym_log(a);
          break;
        }
        case Manifold::kRotation: {
          if ((a.transpose() * a -
               Eigen::MatrixXd::Identity(a.rows(), a.cols()))
                  .norm() > 1e-8 ||
              a.determinant() <= 0.0)
            throw DomainError("matrix field: sample " + std::to_string(i) +
                              " is not a rotation");
          h = rotation_log(a);
          break;
        }
        case Manifold::kSymmetricLogCoords: {
          if ((a - a.transpose()).cwiseAbs().maxCoeff() >
              1e-10 * std::max(a.cwiseAbs().maxCoeff(), 1.0))
            throw DomainError("matrix field: sample " + std::to_string(i) +
                              " is not symmetric");
          h = 0.5 * (a + a.transpose());
          break;
        }
        case Manifold::kSkewLogCoords: {
          if ((a + a.transpose()).cwiseAbs().maxCoeff() >
              1e-10 * std::max(a.cwiseAbs().maxCoeff(), 1.0))
            throw DomainError("matrix field: sample " + std::to_string(i) +
                              " is not skew-symmetric");
          h = 0.5 * (a - a.transpose());
          break;
        }
      }
      log_coords_[static_cast<std::size_t>(i)] = std::move(h);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// ---- MatrixKernelBlock -----------------------------------------------------

MatrixKernelBlock::MatrixKernelBlock(Eigen::MatrixXd assembled,
                                     Eigen::Index sample_count)
    : assembled_(std::move(assembled)), sample_count_(sample_count) {
  if (sample_count_ < 1)
    throw InputError("matrix kernel: needs at least one sample");
  if (assembled_.rows() != assembled_.cols() ||
      assembled_.rows() % sample_count_ != 0)
    throw InputError("matrix kernel: assembled shape is not N*e x N*e");
  block_dim_ = assembled_.rows() / sample_count_;
  if (assembled_ != assembled_.transpose())
    throw InputError("matrix kernel: assembled matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assembled_,
                                                    Eigen::EigenvaluesOnly);
  const double lambda_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(lambda_max, 1e-300))
    throw NotPsdError("matrix kernel: assembled matrix is not PSD");
}

Eigen::MatrixXd MatrixKernelBlock::block(Eigen::Index i, Eigen::Index j) const {
  if (i < 0 || i >= sample_count_ || j < 0 || j >= sample_count_)
    throw InputError("matrix kernel: block index out of range");
  return assembled_.block(i * block_dim_, j * block_dim_, block_dim_,
                          block_dim_);
}

Eigen::MatrixXd MatrixKernelBlock::weighted_assembled(
    const SampledMeasure& measure) const {
  if (measure.size() != sample_count_)
    throw InputError("matrix kernel: measure size mismatch");
  const Eigen::VectorXd sw = measure.sqrt_weights();
  Eigen::MatrixXd out(assembled_.rows(), assembled_.cols());
  for (Eigen::Index i = 0; i < sample_count_; ++i)
    for (Eigen::Index j = 0; j < sample_count_; ++j)
      out.block(i * block_dim_, j * block_dim_, block_dim_, block_dim_) =
          sw[i] * sw[j] *
          assembled_.block(i * block_dim_, j * block_dim_, block_dim_,
                           block_dim_);
  return out;
}

// ---- Vector kernels --------------------------------------------------------

MatrixKernelBlock vector_kernel(const VectorFieldEnsemble& vfe) {
  const auto k_count = static_cast<std::size_t>(vfe.component_count());
  std::vector<std::vector<Eigen::MatrixXd>> factors(
      k_count, std::vector<Eigen::MatrixXd>(k_count));
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t l = 0; l < k_count; ++l)
      factors[k][l] = vfe.frame().col(static_cast<Eigen::Index>(k)) *
                      vfe.frame().col(static_cast<Eigen::Index>(l)).transpose();
  return MatrixKernelBlock(
      kernels::block_kernel(component_data(vfe.components()), factors),
      vfe.sample_count());
}

SnapshotEnsemble flatten(const VectorFieldEnsemble& vfe) {
  const Eigen::Index d = vfe.state_dim();
  const Eigen::Index e = vfe.frame_dim();
  const Eigen::Index n = vfe.sample_count();
  Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(d * e, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < vfe.component_count(); ++k)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index p = 0; p < e; ++p)
          flat(a * e + p, i) +=
              vfe.components()[static_cast<std::size_t>(k)].data()(a, i) *
              vfe.frame()(p, k);
  return SnapshotEnsemble(std::move(flat), vfe.measure());
}

CorrelationMatrix vector_correlation(const VectorFieldEnsemble& vfe) {
  const Eigen::Index d = vfe.state_dim();
  const Eigen::Index e = vfe.frame_dim();
  const Eigen::Index kc = vfe.component_count();

  // C_E = sum_{k,l} C_kl (x) rvec_k rvec_l^T with
  // C_kl(a,b) = sum_i w_i r_k(a,i) r_l(b,i); the (k,l) and (l,k) terms are
  // transposes of each other, so assembling k <= l keeps C_E exactly
  // symmetric up to the final symmetrization.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d * e, d * e);
  const Eigen::VectorXd& w = vfe.measure().weights();
  for (Eigen::Index k = 0; k < kc; ++k) {
    const Eigen::MatrixXd& rk =
        vfe.components()[static_cast<std::size_t>(k)].data();
    for (Eigen::Index l = k; l < kc; ++l) {
      const Eigen::MatrixXd& rl =
          vfe.components()[static_cast<std::size_t>(l)].data();
      Eigen::MatrixXd ckl(d, d);
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
          double acc = 0.0;
          for (Eigen::Index i = 0; i < rk.cols(); ++i)
            acc += w[i] * (rk(a, i) * rl(b, i));
          ckl(a, b) = acc;
        }
      const Eigen::MatrixXd fkl =
          vfe.frame().col(k) * vfe.frame().col(l).transpose();
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
          for (Eigen::Index p = 0; p < e; ++p)
            for (Eigen::Index q = 0; q < e; ++q) {
              const double term = ckl(a, b) * fkl(p, q);
              c(a * e + p, b * e + q) += term;
              if (l != k) c(b * e + q, a * e + p) += term;
            }
    }
  }
  c = 0.5 * (c + c.transpose()).eval();
  return CorrelationMatrix(std::move(c));
}

MatrixKernelBlock tensor_kernel(const std::vector<SnapshotEnsemble>& components,
                                const std::vector<Eigen::MatrixXd>& maps,
                                Algebra algebra) {
  check_shared_measure(components, "tensor kernel");
  if (maps.size() != components.size())
    throw InputError("tensor kernel: " + std::to_string(components.size()) +
                     " components but " + std::to_string(maps.size()) +
                     " coefficient matrices");
  const Eigen::Index n = maps[0].rows();
  for (const auto& r : maps) {
    if (r.rows() != n || r.cols() != n)
      throw InputError("tensor kernel: coefficient matrices have "
                       "inconsistent shapes");
    const double scale = std::max(r.cwiseAbs().maxCoeff(), 1.0);
    const double defect = algebra == Algebra::kSymmetric
                              ? (r - r.transpose()).cwiseAbs().maxCoeff()
                              : (r + r.transpose()).cwiseAbs().maxCoeff();
    if (defect > 1e-10 * scale)
      throw InputError("tensor kernel: coefficient matrix outside the "
                       "declared algebra");
  }

  const auto k_count = components.size();
  std::vector<std::vector<Eigen::MatrixXd>> factors(
      k_count, std::vector<Eigen::MatrixXd>(k_count));
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t l = 0; l < k_count; ++l)
      factors[k][l] = maps[k].transpose() * maps[l];
  return MatrixKernelBlock(
      kernels::block_kernel(component_data(components), factors),
      components[0].sample_count());
}

// ---- Lie-algebra flattening ------------------------------------------------

Eigen::Index sym_coord_count(Eigen::Index n) { return n * (n + 1) / 2; }
Eigen::Index skew_coord_count(Eigen::Index n) { return n * (n - 1) / 2; }

Eigen::VectorXd flatten_sym(const Eigen::MatrixXd& h) {
  const Eigen::Index n = h.rows();
  Eigen::VectorXd c(sym_coord_count(n));
  Eigen::Index idx = 0;
  for (Eigen::Index a = 0; a < n; ++a) c[idx++] = h(a, a);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) c[idx++] = kSqrt2 * h(a, b);
  return c;
}

Eigen::MatrixXd unflatten_sym(const Eigen::VectorXd& c, Eigen::Index n) {
  if (c.size() != sym_coord_count(n))
    throw InputError("unflatten_sym: coordinate count mismatch");
  Eigen::MatrixXd h(n, n);
  Eigen::Index idx = 0;
  for (Eigen::Index a = 0; a < n; ++a) h(a, a) = c[idx++];
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double v = c[idx++] / kSqrt2;
      h(a, b) = v;
      h(b, a) = v;
    }
  return h;
}

Eigen::VectorXd flatten_skew(const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  Eigen::VectorXd c(skew_coord_count(n));
  Eigen::Index idx = 0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) c[idx++] = kSqrt2 * s(a, b);
  return c;
}

Eigen::MatrixXd unflatten_skew(const Eigen::VectorXd& c, Eigen::Index n) {
  if (c.size() != skew_coord_count(n))
    throw InputError("unflatten_skew: coordinate count mismatch");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index idx = 0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double v = c[idx++] / kSqrt2;
      s(a, b) = v;
      s(b, a) = -v;
    }
  return s;
}

// ---- Field encode / decode -------------------------------------------------

namespace {

bool symmetric_coords(Manifold m) {
  return m == Manifold::kSpd || m == Manifold::kSymmetricLogCoords;
}

}  // namespace

SnapshotEnsemble encode_field(const MatrixFieldEnsemble& mfe,
                              const SampledMeasure& measure) {
  if (measure.size() != mfe.sample_count())
    throw InputError("encode_field: measure size does not match field");
  const Eigen::Index n = mfe.matrix_dim();
  const bool sym = symmetric_coords(mfe.manifold());
  const Eigen::Index dim = sym ? sym_coord_count(n) : skew_coord_count(n);
  if (dim < 1)
    throw InputError("encode_field: so(1) has no coordinates to encode");

  Eigen::MatrixXd data(dim, mfe.sample_count());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < mfe.sample_count(); ++i) {
    const Eigen::MatrixXd& h = mfe.log_coords()[static_cast<std::size_t>(i)];
    data.col(i) = sym ? flatten_sym(h) : flatten_skew(h);
  }
  return SnapshotEnsemble(std::move(data), measure);
}

SnapshotEnsemble encode_field(const MatrixFieldEnsemble& mfe) {
  return encode_field(mfe, SampledMeasure::uniform_indexed(mfe.sample_count()));
}

MatrixFieldEnsemble decode_field(const SnapshotEnsemble& ens,
                                 Manifold manifold, Eigen::Index n) {
  const bool sym = symmetric_coords(manifold);
  const Eigen::Index expected =
      sym ? sym_coord_count(n) : skew_coord_count(n);
  if (ens.state_dim() != expected)
    throw DomainError("decode_field: ensemble dimension " +
                      std::to_string(ens.state_dim()) + " does not match " +
                      std::to_string(expected) + " coordinates of the tag");

  std::vector<Eigen::MatrixXd> samples(
      static_cast<std::size_t>(ens.sample_count()));
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < ens.sample_count(); ++i) {
    try {
      const Eigen::MatrixXd h = sym ? unflatten_sym(ens.data().col(i), n)
                                    : unflatten_skew(ens.data().col(i), n);
      Eigen::MatrixXd a;
      switch (manifold) {
        case Manifold::kSpd: a = sym_exp(h); break;
        case Manifold::kRotation: a = skew_exp(h); break;
        case Manifold::kSymmetricLogCoords:
        case Manifold::kSkewLogCoords: a = h; break;
      }
      samples[static_cast<std::size_t>(i)] = std::move(a);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return MatrixFieldEnsemble(std::move(samples), manifold);
}

}  // namespace paramred
