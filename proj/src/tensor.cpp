#include "paramred/tensor.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "paramred/errors.hpp"
#include "paramred/spectral.hpp"

namespace paramred {

namespace {

Eigen::Index product(const std::vector<Eigen::Index>& dims) {
  Eigen::Index p = 1;
  for (Eigen::Index d : dims) p *= d;
  return p;
}

// Row-major strides (last axis fastest).
std::vector<Eigen::Index> strides_of(const std::vector<Eigen::Index>& dims) {
  std::vector<Eigen::Index> s(dims.size());
  Eigen::Index acc = 1;
  for (std::size_t a = dims.size(); a-- > 0;) {
    s[a] = acc;
    acc *= dims[a];
  }
  return s;
}

// sqrt(w) factor of a full multi-index, parameter axes only.
double scale_factor(const std::vector<Eigen::VectorXd>& axis_weights,
                    const std::vector<Eigen::Index>& index) {
  double f = 1.0;
  for (std::size_t j = 0; j < axis_weights.size(); ++j)
    f *= std::sqrt(axis_weights[j][index[j + 1]]);
  return f;
}

void next_index(std::vector<Eigen::Index>& index,
                const std::vector<Eigen::Index>& dims) {
  for (std::size_t a = dims.size(); a-- > 0;) {
    if (++index[a] < dims[a]) return;
    index[a] = 0;
  }
}

}  // namespace

// ---- SnapshotTensor --------------------------------------------------------

SnapshotTensor::SnapshotTensor(std::vector<Eigen::Index> dims,
                               std::vector<double> data,
                               std::vector<Eigen::VectorXd> axis_weights)
    : dims_(std::move(dims)),
      data_(std::move(data)),
      axis_weights_(std::move(axis_weights)) {
  if (dims_.size() < 2)
    throw InputError("tensor: order must be at least 2 (state + parameters)");
  for (Eigen::Index d : dims_)
    if (d < 1) throw InputError("tensor: axis sizes must be at least 1");
  if (static_cast<Eigen::Index>(data_.size()) != product(dims_))
    throw InputError("tensor: data size does not match the shape");
  for (double v : data_)
    if (!std::isfinite(v)) throw InputError("tensor: non-finite entry");
  if (axis_weights_.size() != dims_.size() - 1)
    throw InputError("tensor: expected one weight vector per parameter axis");
  for (std::size_t j = 0; j < axis_weights_.size(); ++j) {
    if (axis_weights_[j].size() != dims_[j + 1])
      throw InputError("tensor: weight vector length does not match axis " +
                       std::to_string(j + 1));
    for (Eigen::Index i = 0; i < axis_weights_[j].size(); ++i)
      if (!(axis_weights_[j][i] > 0.0))
        throw InputError("tensor: non-positive axis weight");
  }
}

namespace {

std::vector<Eigen::VectorXd> unit_weights(
    const std::vector<Eigen::Index>& dims) {
  std::vector<Eigen::VectorXd> w;
  for (std::size_t a = 1; a < dims.size(); ++a)
    w.push_back(Eigen::VectorXd::Ones(dims[a]));
  return w;
}

}  // namespace

SnapshotTensor::SnapshotTensor(std::vector<Eigen::Index> dims,
                               std::vector<double> data)
    : SnapshotTensor(dims, std::move(data), unit_weights(dims)) {}

Eigen::Index SnapshotTensor::total_size() const { return product(dims_); }

double SnapshotTensor::at(const std::vector<Eigen::Index>& index) const {
  if (index.size() != dims_.size())
    throw InputError("tensor: index order mismatch");
  const auto strides = strides_of(dims_);
  Eigen::Index flat = 0;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (index[a] < 0 || index[a] >= dims_[a])
      throw InputError("tensor: index out of range");
    flat += index[a] * strides[a];
  }
  return data_[static_cast<std::size_t>(flat)];
}

double SnapshotTensor::frobenius_norm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

double SnapshotTensor::weighted_frobenius_norm() const {
  std::vector<Eigen::Index> index(dims_.size(), 0);
  double acc = 0.0;
  for (std::size_t f = 0; f < data_.size(); ++f) {
    double w = 1.0;
    for (std::size_t j = 0; j < axis_weights_.size(); ++j)
      w *= axis_weights_[j][index[j + 1]];
    acc += w * data_[f] * data_[f];
    next_index(index, dims_);
  }
  return std::sqrt(acc);
}

double SnapshotTensor::weighted_error(const SnapshotTensor& other) const {
  if (dims_ != other.dims_)
    throw InputError("tensor: shapes differ");
  std::vector<Eigen::Index> index(dims_.size(), 0);
  double acc = 0.0;
  for (std::size_t f = 0; f < data_.size(); ++f) {
    double w = 1.0;
    for (std::size_t j = 0; j < axis_weights_.size(); ++j)
      w *= axis_weights_[j][index[j + 1]];
    const double diff = data_[f] - other.data_[f];
    acc += w * diff * diff;
    next_index(index, dims_);
  }
  return std::sqrt(acc);
}

// ---- TTDecomposition -------------------------------------------------------

TTDecomposition::TTDecomposition(
    std::vector<TTCore> cores, std::vector<double> discarded_energies,
    std::vector<Eigen::VectorXd> split_singular_values,
    std::vector<Eigen::VectorXd> axis_weights)
    : cores_(std::move(cores)),
      discarded_energies_(std::move(discarded_energies)),
      split_singular_values_(std::move(split_singular_values)),
      axis_weights_(std::move(axis_weights)) {
  if (cores_.empty()) throw StructureError("tt: no cores");
  if (cores_.front().left != 1 || cores_.back().right != 1)
    throw StructureError("tt: boundary bond dimensions must be 1");
  for (std::size_t s = 0; s + 1 < cores_.size(); ++s)
    if (cores_[s].right != cores_[s + 1].left)
      throw StructureError("tt: bond mismatch between cores " +
                           std::to_string(s) + " and " + std::to_string(s + 1));
  for (const TTCore& c : cores_)
    if (c.mat.rows() != c.left * c.mid || c.mat.cols() != c.right)
      throw StructureError("tt: core storage shape mismatch");
}

std::vector<Eigen::Index> TTDecomposition::bond_dims() const {
  std::vector<Eigen::Index> r;
  r.push_back(1);
  for (const TTCore& c : cores_) r.push_back(c.right);
  return r;
}

double TTDecomposition::error_bound() const {
  double acc = 0.0;
  for (double e : discarded_energies_) acc += e;
  return std::sqrt(acc);
}

// ---- tensorize / detensorize ----------------------------------------------

SnapshotTensor tensorize(const SnapshotEnsemble& ens,
                         const std::vector<Eigen::Index>& grid_shape,
                         std::vector<Eigen::VectorXd> axis_weights) {
  if (grid_shape.empty())
    throw InputError("tensorize: grid shape is empty");
  if (product(grid_shape) != ens.sample_count())
    throw InputError("tensorize: grid holds " +
                     std::to_string(product(grid_shape)) +
                     " samples, ensemble has " +
                     std::to_string(ens.sample_count()));

  std::vector<Eigen::Index> dims;
  dims.push_back(ens.state_dim());
  dims.insert(dims.end(), grid_shape.begin(), grid_shape.end());

  // Columns are row-major over the grid, and so is the tensor with the
  // state axis in front: entry (a, i1, ..) = A(a, flat(i1, ..)).
  const Eigen::Index n = ens.sample_count();
  std::vector<double> data(static_cast<std::size_t>(product(dims)));
  for (Eigen::Index a = 0; a < ens.state_dim(); ++a)
    for (Eigen::Index i = 0; i < n; ++i)
      data[static_cast<std::size_t>(a * n + i)] = ens.data()(a, i);

  return SnapshotTensor(std::move(dims), std::move(data),
                        std::move(axis_weights));
}

SnapshotTensor tensorize(const SnapshotEnsemble& ens,
                         const std::vector<Eigen::Index>& grid_shape) {
  if (grid_shape.empty())
    throw InputError("tensorize: grid shape is empty");
  if (product(grid_shape) != ens.sample_count())
    throw InputError("tensorize: grid holds " +
                     std::to_string(product(grid_shape)) +
                     " samples, ensemble has " +
                     std::to_string(ens.sample_count()));

  // Factor the measure weights into per-axis marginals; valid only for
  // product measures, which is verified below.
  const Eigen::VectorXd& w = ens.measure().weights();
  const double total = w.sum();
  const auto p_axes = grid_shape.size();
  const auto strides = strides_of(grid_shape);
  std::vector<Eigen::VectorXd> axis_weights;
  for (std::size_t j = 0; j < p_axes; ++j) {
    Eigen::VectorXd marginal = Eigen::VectorXd::Zero(grid_shape[j]);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      marginal[(i / strides[j]) % grid_shape[j]] += w[i];
    axis_weights.push_back(marginal /
                           std::pow(total, (double(p_axes) - 1.0) /
                                               double(p_axes)));
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < p_axes; ++j)
      prod *= axis_weights[j][(i / strides[j]) % grid_shape[j]];
    if (std::abs(prod - w[i]) > 1e-12 * std::max(w[i], 1e-300))
      throw InputError(
          "tensorize: measure weights do not factor over the grid; pass "
          "per-axis weights explicitly");
  }
  return tensorize(ens, grid_shape, std::move(axis_weights));
}

Eigen::MatrixXd detensorize(const SnapshotTensor& t) {
  const Eigen::Index d = t.state_dim();
  const Eigen::Index n = t.total_size() / d;
  Eigen::MatrixXd a(d, n);
  for (Eigen::Index row = 0; row < d; ++row)
    for (Eigen::Index i = 0; i < n; ++i)
      a(row, i) = t.data()[static_cast<std::size_t>(row * n + i)];
  return a;
}

// ---- split -----------------------------------------------------------------

namespace {

// Gathers the tensor into a rows x cols matrix for the given axis groups
// (row-major within each group), scaling parameter axes by sqrt(w).
Eigen::MatrixXd matricize_scaled(const SnapshotTensor& t,
                                 const std::vector<Eigen::Index>& row_axes,
                                 const std::vector<Eigen::Index>& col_axes) {
  const auto& dims = t.dims();
  const auto strides = strides_of(dims);

  Eigen::Index rows = 1, cols = 1;
  for (Eigen::Index a : row_axes) rows *= dims[static_cast<std::size_t>(a)];
  for (Eigen::Index a : col_axes) cols *= dims[static_cast<std::size_t>(a)];

  Eigen::MatrixXd m(rows, cols);
  std::vector<Eigen::Index> index(dims.size(), 0);
  const std::size_t count = t.data().size();
  for (std::size_t f = 0; f < count; ++f) {
    Eigen::Index r = 0, c = 0;
    for (Eigen::Index a : row_axes)
      r = r * dims[static_cast<std::size_t>(a)] +
          index[static_cast<std::size_t>(a)];
    for (Eigen::Index a : col_axes)
      c = c * dims[static_cast<std::size_t>(a)] +
          index[static_cast<std::size_t>(a)];
    m(r, c) = scale_factor(t.axis_weights(), index) * t.data()[f];
    next_index(index, dims);
  }
  return m;
}

// Inverse sqrt(w) scaling of a factor whose rows run row-major over
// `axes` (state axis carries no weight).
void unscale_factor(Eigen::MatrixXd& factor,
                    const std::vector<Eigen::Index>& axes,
                    const SnapshotTensor& t) {
  const auto& dims = t.dims();
  std::vector<Eigen::Index> index(axes.size(), 0);
  for (Eigen::Index r = 0; r < factor.rows(); ++r) {
    double f = 1.0;
    for (std::size_t a = 0; a < axes.size(); ++a)
      if (axes[a] > 0)
        f *= std::sqrt(
            t.axis_weights()[static_cast<std::size_t>(axes[a] - 1)][index[a]]);
    factor.row(r) /= f;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++index[a] < dims[static_cast<std::size_t>(axes[a])]) break;
      index[a] = 0;
    }
  }
}

struct TruncatedSvd {
  Eigen::MatrixXd u;        // rows x r
  Eigen::MatrixXd v;        // cols x r
  Eigen::VectorXd sigma;    // r
  double discarded_energy;  // sum of dropped sigma^2
};

TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, double eps_sq,
                           Eigen::Index max_rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  Eigen::Index rank = 0;
  const double cutoff = sigma.size() > 0 ? kRankTolerance * sigma[0] : 0.0;
  while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;

  // Energy tolerance: drop trailing values while the dropped energy stays
  // within eps^2 (smallest first, exact tail sums).
  std::vector<double> tail(static_cast<std::size_t>(sigma.size()) + 1, 0.0);
  for (Eigen::Index i = sigma.size() - 1; i >= 0; --i)
    tail[static_cast<std::size_t>(i)] =
        tail[static_cast<std::size_t>(i) + 1] + sigma[i] * sigma[i];
  while (rank > 0 && tail[static_cast<std::size_t>(rank - 1)] <= eps_sq)
    --rank;
  if (max_rank > 0) rank = std::min(rank, max_rank);

  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(rank);
  out.v = svd.matrixV().leftCols(rank);
  out.sigma = sigma.head(rank);
  out.discarded_energy = tail[static_cast<std::size_t>(rank)];
  return out;
}

}  // namespace

SplitResult split(const SnapshotTensor& t, const std::vector<Eigen::Index>& j1,
                  const std::vector<Eigen::Index>& j2, double eps) {
  if (!(eps >= 0.0)) throw InputError("split: tolerance must be >= 0");
  const Eigen::Index p_axes = t.order() - 1;
  std::vector<bool> seen(static_cast<std::size_t>(p_axes), false);
  for (const auto* set : {&j1, &j2})
    for (Eigen::Index j : *set) {
      if (j < 0 || j >= p_axes)
        throw InputError("split: parameter axis " + std::to_string(j) +
                         " out of range");
      if (seen[static_cast<std::size_t>(j)])
        throw InputError("split: axis " + std::to_string(j) +
                         " appears twice in the partition");
      seen[static_cast<std::size_t>(j)] = true;
    }
  for (std::size_t j = 0; j < seen.size(); ++j)
    if (!seen[j])
      throw InputError("split: axis " + std::to_string(j) +
                       " missing from the partition");
  if (j2.empty()) throw InputError("split: second axis set is empty");

  // Canonical ascending order, state axis grouped left.
  std::vector<Eigen::Index> row_axes = {0};
  for (Eigen::Index j : j1) row_axes.push_back(j + 1);
  std::sort(row_axes.begin(), row_axes.end());
  std::vector<Eigen::Index> col_axes(j2);
  for (Eigen::Index& j : col_axes) j += 1;
  std::sort(col_axes.begin(), col_axes.end());

  const Eigen::MatrixXd m = matricize_scaled(t, row_axes, col_axes);
  TruncatedSvd svd = truncated_svd(m, eps * eps, 0);

  unscale_factor(svd.u, row_axes, t);
  unscale_factor(svd.v, col_axes, t);
  return SplitResult{std::move(svd.u),     std::move(svd.v),
                     std::move(svd.sigma), svd.discarded_energy,
                     std::move(row_axes),  std::move(col_axes)};
}

// ---- TT-SVD ----------------------------------------------------------------

TTDecomposition tt_svd(const SnapshotTensor& t, double eps,
                       Eigen::Index max_bond) {
  if (!(eps >= 0.0)) throw InputError("tt_svd: tolerance must be >= 0");
  const auto& dims = t.dims();
  const auto order = static_cast<std::size_t>(t.order());
  const std::size_t n_splits = order - 1;
  const double eps_sq_split = eps * eps / double(n_splits);

  // Scale parameter axes by sqrt(w), flatten to (dims[0]) x rest.
  std::vector<Eigen::Index> all_axes(order);
  for (std::size_t a = 0; a < order; ++a)
    all_axes[a] = static_cast<Eigen::Index>(a);
  Eigen::MatrixXd c = matricize_scaled(t, {0},
                                       {all_axes.begin() + 1, all_axes.end()});

  std::vector<TTCore> cores;
  std::vector<double> discarded;
  std::vector<Eigen::VectorXd> split_sigmas;
  Eigen::Index r_prev = 1;
  for (std::size_t s = 0; s < n_splits; ++s) {
    // c currently holds (r_prev * dims[s]) x (prod of remaining dims).
    TruncatedSvd svd = truncated_svd(c, eps_sq_split, max_bond);
    const Eigen::Index r = svd.sigma.size();
    cores.push_back(TTCore{r_prev, dims[s], r, svd.u});
    discarded.push_back(svd.discarded_energy);
    split_sigmas.push_back(svd.sigma);

    // Remainder sigma * V^T, reshaped so the next axis joins the rows.
    const Eigen::MatrixXd rest =
        svd.sigma.asDiagonal() * svd.v.transpose();  // r x rest_size
    const Eigen::Index next_dim = dims[s + 1];
    const Eigen::Index next_cols = rest.cols() / next_dim;
    Eigen::MatrixXd reshaped(r * next_dim, next_cols);
    for (Eigen::Index row = 0; row < r; ++row)
      for (Eigen::Index i = 0; i < next_dim; ++i)
        for (Eigen::Index col = 0; col < next_cols; ++col)
          reshaped(row * next_dim + i, col) = rest(row, i * next_cols + col);
    c = std::move(reshaped);
    r_prev = r;
  }
  // Last core is the remainder itself.
  cores.push_back(TTCore{r_prev, dims[order - 1], 1, c});

  // Undo the sqrt(w) scaling on every parameter-axis core.
  for (std::size_t s = 1; s < order; ++s) {
    TTCore& core = cores[s];
    const Eigen::VectorXd& w = t.axis_weights()[s - 1];
    for (Eigen::Index l = 0; l < core.left; ++l)
      for (Eigen::Index i = 0; i < core.mid; ++i)
        core.mat.row(l * core.mid + i) /= std::sqrt(w[i]);
  }

  return TTDecomposition(std::move(cores), std::move(discarded),
                         std::move(split_sigmas), t.axis_weights());
}

SnapshotTensor tt_reconstruct(const TTDecomposition& tt) {
  const auto& cores = tt.cores();
  // Left-to-right contraction: m holds (prod of processed dims) x r_s.
  Eigen::MatrixXd m = cores[0].mat;  // (1 * mid0) x r_1
  for (std::size_t s = 1; s < cores.size(); ++s) {
    const TTCore& core = cores[s];
    const Eigen::Index prefix = m.rows();
    Eigen::MatrixXd next(prefix * core.mid, core.right);
    for (Eigen::Index p = 0; p < prefix; ++p)
      for (Eigen::Index i = 0; i < core.mid; ++i)
        for (Eigen::Index rr = 0; rr < core.right; ++rr) {
          double acc = 0.0;
          for (Eigen::Index r = 0; r < core.left; ++r)
            acc += m(p, r) * core.mat(r * core.mid + i, rr);
          next(p * core.mid + i, rr) = acc;
        }
    m = std::move(next);
  }

  std::vector<Eigen::Index> dims;
  for (const TTCore& c : cores) dims.push_back(c.mid);
  std::vector<double> data(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    data[static_cast<std::size_t>(i)] = m(i, 0);
  return SnapshotTensor(std::move(dims), std::move(data), tt.axis_weights());
}

}  // namespace paramred
