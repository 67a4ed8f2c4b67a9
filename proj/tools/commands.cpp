#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "json_value.hpp"
#include "paramred/coupled.hpp"
#include "paramred/csv.hpp"
#include "paramred/ensemble.hpp"
#include "paramred/errors.hpp"
#include "paramred/kernel.hpp"
#include "paramred/piston.hpp"
#include "paramred/rng.hpp"
#include "paramred/spectral.hpp"
#include "paramred/structured.hpp"
#include "paramred/tensor.hpp"

namespace paramred::tools {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- audit plumbing --------------------------------------------------------

struct Audit {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

Audit make_audit(const std::string& name, double value, double tolerance) {
  return Audit{name, value, tolerance, value <= tolerance};
}

JsonValue audits_json(const std::vector<Audit>& audits) {
  JsonValue arr = JsonValue::array();
  for (const Audit& a : audits) {
    JsonValue obj = JsonValue::object();
    obj.set("name", JsonValue::string(a.name));
    obj.set("value", JsonValue::number(a.value));
    obj.set("tolerance", JsonValue::number(a.tolerance));
    obj.set("pass", JsonValue::boolean(a.pass));
    arr.push(std::move(obj));
  }
  return arr;
}

int finish_report(JsonValue& report, std::vector<Audit> audits,
                  const fs::path& out_dir) {
  bool all_pass = true;
  for (const Audit& a : audits) {
    all_pass = all_pass && a.pass;
    std::cout << "audit " << a.name << ": " << (a.pass ? "PASS" : "FAIL")
              << " (value=" << a.value << ", tolerance=" << a.tolerance
              << ")\n";
  }
  report.set("audits", audits_json(audits));
  report.set("pass", JsonValue::boolean(all_pass));
  write_file_atomic(out_dir / "report.json", report.dump());
  std::cout << "report: " << (out_dir / "report.json").string() << "\n";
  return all_pass ? 0 : 1;
}

// ---- config plumbing -------------------------------------------------------

json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& config_path, const std::string& rel) {
  const fs::path p(rel);
  if (p.is_absolute()) return p;
  return config_path.parent_path() / p;
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& where) {
  if (!j.contains(key) || !j[key].is_string())
    throw InputError(where + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

double require_number(const json& j, const std::string& key,
                      const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw InputError(where + "." + key + ": expected a number");
  return j[key].get<double>();
}

LoadOptions load_options_from(const json& j, const CliFlags& flags) {
  LoadOptions opt;
  if (j.contains("weight_column"))
    opt.weight_column = j["weight_column"].get<bool>();
  if (j.contains("probability"))
    opt.probability_normalize = j["probability"].get<bool>();
  // Command-line switches turn the options on (they never turn them off).
  opt.weight_column = opt.weight_column || flags.weight_column;
  opt.probability_normalize =
      opt.probability_normalize || flags.probability;
  return opt;
}

// ---- shared numeric audits -------------------------------------------------

// Maximum pairwise gap between two descending spectra (zero-padded),
// relative to the largest eigenvalue.
double spectra_gap(Eigen::VectorXd a, Eigen::VectorXd b) {
  std::sort(a.data(), a.data() + a.size(), std::greater<double>());
  std::sort(b.data(), b.data() + b.size(), std::greater<double>());
  const auto n = std::max(a.size(), b.size());
  const double scale =
      std::max({a.size() ? a[0] : 0.0, b.size() ? b[0] : 0.0, 1e-300});
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double av = i < a.size() ? a[i] : 0.0;
    const double bv = i < b.size() ? b[i] : 0.0;
    worst = std::max(worst, std::abs(av - bv) / scale);
  }
  return worst;
}

struct TruncationRow {
  Eigen::Index n;
  double predicted;
  double measured;
  bool pass;
};

// Predicted-vs-measured check with a floor: at the roundoff level of the
// total energy the ratio is meaningless, so tiny predicted tails only
// require the measured error to be tiny as well.
bool truncation_row_pass(double predicted, double measured, double total) {
  const double floor_tol = 1e-12 * total;
  if (predicted <= floor_tol) return measured <= 2e-12 * total + 1e-300;
  return std::abs(measured / predicted - 1.0) <= 1e-8;
}

std::vector<TruncationRow> truncation_table(const KLExpansion& kl,
                                            const SnapshotEnsemble& ens) {
  const double total = kl.eigenvalues().sum();
  std::vector<TruncationRow> rows;
  for (Eigen::Index n = 1; n <= kl.rank(); ++n) {
    const KLExpansion cut = truncate(kl, n);
    const double predicted = cut.discarded_energy();
    const double measured = reconstruction_error_sq(cut, ens);
    rows.push_back(TruncationRow{
        n, predicted, measured, truncation_row_pass(predicted, measured, total)});
  }
  return rows;
}

JsonValue truncation_json(const std::vector<TruncationRow>& rows) {
  JsonValue arr = JsonValue::array();
  for (const TruncationRow& r : rows) {
    JsonValue obj = JsonValue::object();
    obj.set("n", JsonValue::integer(r.n));
    obj.set("predicted_error_sq", JsonValue::number(r.predicted));
    obj.set("measured_error_sq", JsonValue::number(r.measured));
    obj.set("pass", JsonValue::boolean(r.pass));
    arr.push(std::move(obj));
  }
  return arr;
}

Audit truncation_audit(const std::vector<TruncationRow>& rows,
                       const std::string& name) {
  double worst = 0.0;
  bool pass = true;
  for (const TruncationRow& r : rows) {
    pass = pass && r.pass;
    if (r.predicted > 0.0)
      worst = std::max(worst, std::abs(r.measured / r.predicted - 1.0));
  }
  return Audit{name, worst, 1e-8, pass};
}

// Weighted POD audits shared by pod/coupled: U-side vs Q-side spectrum,
// mode orthonormality.
void append_pod_audits(std::vector<Audit>& audits, const std::string& prefix,
                       const SnapshotEnsemble& ens, const KLExpansion& kl) {
  const CorrelationMatrix c = assemble_correlation(ens);
  const SpectralDecomposition sd = eigendecompose(c);
  const KernelSpectrum q_side =
      method_of_snapshots(gram(ens), ens.measure());

  audits.push_back(make_audit(prefix + "spectrum_duality",
                              spectra_gap(sd.eigenvalues, q_side.eigenvalues),
                              1e-10));

  const Eigen::MatrixXd& v = kl.spatial_modes();
  const double v_ortho =
      (v.transpose() * v -
       Eigen::MatrixXd::Identity(kl.rank(), kl.rank()))
          .cwiseAbs()
          .maxCoeff();
  const Eigen::MatrixXd& s = kl.parametric_modes();
  const Eigen::MatrixXd sw =
      s.transpose() * ens.measure().weights().asDiagonal() * s;
  const double s_ortho =
      (sw - Eigen::MatrixXd::Identity(kl.rank(), kl.rank()))
          .cwiseAbs()
          .maxCoeff();
  audits.push_back(
      make_audit(prefix + "spatial_mode_orthonormality", v_ortho, 1e-10));
  audits.push_back(
      make_audit(prefix + "parametric_mode_orthonormality", s_ortho, 1e-10));
}

// RKHS isometry |a^T G a - |sum_i a_i r_i|^2| on seeded random coefficient
// vectors, relative to the kernel scale.
Audit rkhs_isometry_audit(const SnapshotEnsemble& ens, Rng& rng) {
  const GramKernel g = gram(ens);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::VectorXd a = rng.uniform_vector(ens.sample_count(), -1.0, 1.0);
    Eigen::VectorXd combo = Eigen::VectorXd::Zero(ens.state_dim());
    for (Eigen::Index i = 0; i < ens.sample_count(); ++i)
      combo += a[i] * ens.data().col(i);
    const RKHSFunction fa{a};
    const double lhs = combo.squaredNorm();
    const double rhs = rkhs_inner(fa, fa, g);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return make_audit("rkhs_isometry", worst, 1e-12);
}

void export_expansion(const fs::path& out_dir, const KLExpansion& kl,
                      Eigen::Index n_modes, const std::string& stem) {
  const Eigen::Index n = std::min(n_modes, kl.rank());
  write_csv_matrix(out_dir / (stem + "modes.csv"),
                   kl.spatial_modes().leftCols(n));
  write_csv_matrix(out_dir / (stem + "parametric_modes.csv"),
                   kl.parametric_modes().leftCols(n));
  write_file_atomic(
      out_dir / (stem + "singular_values.json"),
      JsonValue::number_array(kl.singular_values()).dump());
}

}  // namespace

// ---- simulate ---------------------------------------------------------------

namespace {

constexpr const char* kCoordNames[5] = {"m", "k", "S", "c0", "gamma_minus_1"};

std::vector<std::vector<double>> coordinate_values(const json& grid) {
  std::vector<std::vector<double>> values;
  for (const char* name : kCoordNames) {
    if (!grid.contains(name))
      throw InputError(std::string("scenario.grid.") + name + ": missing");
    const json& spec = grid[name];
    if (spec.is_number()) {
      values.push_back({spec.get<double>()});
    } else if (spec.is_object()) {
      const double lo = require_number(spec, "min", "scenario.grid." + std::string(name));
      const double hi = require_number(spec, "max", "scenario.grid." + std::string(name));
      const auto count = static_cast<Eigen::Index>(
          require_number(spec, "count", "scenario.grid." + std::string(name)));
      if (count < 1)
        throw InputError(std::string("scenario.grid.") + name +
                         ".count: must be at least 1");
      std::vector<double> v;
      for (Eigen::Index i = 0; i < count; ++i)
        v.push_back(count == 1 ? lo
                               : lo + (hi - lo) * double(i) / double(count - 1));
      values.push_back(std::move(v));
    } else {
      throw InputError(std::string("scenario.grid.") + name +
                       ": expected a number or {min, max, count}");
    }
  }
  return values;
}

std::vector<PistonParams> expand_grid(const json& grid, double p0) {
  std::vector<PistonParams> out;
  if (grid.contains("points")) {
    for (const json& pt : grid["points"]) {
      if (!pt.is_array() || pt.size() != 5)
        throw InputError(
            "scenario.grid.points: each point needs 5 coordinates "
            "(m, k, S, c0, gamma-1)");
      PistonParams p{pt[0].get<double>(), pt[1].get<double>(),
                     pt[2].get<double>(), pt[3].get<double>(),
                     pt[4].get<double>() + 1.0, p0};
      out.push_back(p);
    }
    if (out.empty())
      throw InputError("scenario.grid.points: empty grid");
    return out;
  }

  // Row-major cartesian product, last coordinate fastest.
  const auto values = coordinate_values(grid);
  std::vector<std::size_t> idx(values.size(), 0);
  while (true) {
    PistonParams p{values[0][idx[0]], values[1][idx[1]], values[2][idx[2]],
                   values[3][idx[3]], values[4][idx[4]] + 1.0, p0};
    out.push_back(p);
    std::size_t a = values.size();
    while (a-- > 0) {
      if (++idx[a] < values[a].size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

}  // namespace

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir,
                 const CliFlags& flags) {
  const json config = load_config(config_path);
  if (!config.contains("scenario"))
    throw InputError("config: missing 'scenario'");
  const json& sc = config["scenario"];
  if (!sc.contains("grid")) throw InputError("scenario.grid: missing");

  const double p0 = sc.contains("p0") ? sc["p0"].get<double>() : 1.0;
  const double T = require_number(sc, "T", "scenario");
  const double dt = require_number(sc, "dt", "scenario");
  const auto stride = static_cast<Eigen::Index>(
      sc.contains("observe_stride") ? sc["observe_stride"].get<double>() : 1);
  PistonState s0{0.0, 0.0};
  if (sc.contains("initial_state")) {
    s0.w = require_number(sc["initial_state"], "w", "scenario.initial_state");
    s0.v = require_number(sc["initial_state"], "v", "scenario.initial_state");
  }

  const std::vector<PistonParams> grid = expand_grid(sc["grid"], p0);
  const CoupledEnsemble ce = sample_snapshots(grid, s0, T, dt, stride);

  fs::create_directories(out_dir);
  write_csv_matrix(out_dir / "solid_snapshots.csv", ce.sub1().data());
  write_csv_matrix(out_dir / "gas_snapshots.csv", ce.sub2().data());

  Eigen::MatrixXd params(ce.sample_count(), 5);
  for (Eigen::Index i = 0; i < ce.sample_count(); ++i)
    for (Eigen::Index c = 0; c < 5; ++c)
      params(i, c) = ce.measure().point(i).coords[static_cast<std::size_t>(c)];
  write_csv_matrix(out_dir / "parameters.csv", params);

  JsonValue manifest = JsonValue::object();
  manifest.set("snapshots1", JsonValue::string("solid_snapshots.csv"));
  manifest.set("snapshots2", JsonValue::string("gas_snapshots.csv"));
  manifest.set("params", JsonValue::string("parameters.csv"));
  manifest.set("weight_column", JsonValue::boolean(false));
  manifest.set("state_dim", JsonValue::integer(ce.sub1().state_dim()));
  manifest.set("sample_count", JsonValue::integer(ce.sample_count()));
  JsonValue coord_names = JsonValue::array();
  for (const char* n : kCoordNames) coord_names.push(JsonValue::string(n));
  manifest.set("coordinates", std::move(coord_names));
  write_file_atomic(out_dir / "manifest.json", manifest.dump());

  // Shape audit: re-read what was written and compare against the manifest.
  const Eigen::MatrixXd solid_back =
      read_csv_matrix(out_dir / "solid_snapshots.csv");
  const Eigen::MatrixXd gas_back =
      read_csv_matrix(out_dir / "gas_snapshots.csv");
  const Eigen::MatrixXd params_back =
      read_csv_matrix(out_dir / "parameters.csv");
  const bool shapes_ok = solid_back.rows() == ce.sub1().state_dim() &&
                         solid_back.cols() == ce.sample_count() &&
                         gas_back.rows() == ce.sub2().state_dim() &&
                         gas_back.cols() == ce.sample_count() &&
                         params_back.rows() == ce.sample_count() &&
                         params_back.cols() == 5;

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue::string("simulate"));
  report.set("seed", JsonValue::integer(static_cast<std::int64_t>(flags.seed)));
  report.set("state_dim", JsonValue::integer(ce.sub1().state_dim()));
  report.set("sample_count", JsonValue::integer(ce.sample_count()));

  std::vector<Audit> audits;
  audits.push_back(Audit{"output_shapes_match_manifest",
                         shapes_ok ? 0.0 : 1.0, 0.0, shapes_ok});
  return finish_report(report, std::move(audits), out_dir);
}

// ---- pod ---------------------------------------------------------------------

int cmd_pod(const fs::path& config_path, const fs::path& out_dir,
            const CliFlags& flags) {
  const json config = load_config(config_path);
  const SnapshotEnsemble ens = load_ensemble(
      resolve(config_path, require_string(config, "snapshots", "config")),
      resolve(config_path, require_string(config, "params", "config")),
      load_options_from(config, flags));

  const KLExpansion kl = kl_expand(ens);
  const auto rows = truncation_table(kl, ens);

  fs::create_directories(out_dir);
  const auto export_n = config.contains("export_modes")
                            ? static_cast<Eigen::Index>(
                                  config["export_modes"].get<double>())
                            : kl.rank();
  export_expansion(out_dir, kl, export_n > 0 ? export_n : kl.rank(), "");
  write_csv_matrix(out_dir / "gram.csv", gram(ens).entries());

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue::string("pod"));
  report.set("seed", JsonValue::integer(static_cast<std::int64_t>(flags.seed)));
  report.set("state_dim", JsonValue::integer(ens.state_dim()));
  report.set("sample_count", JsonValue::integer(ens.sample_count()));
  report.set("rank", JsonValue::integer(kl.rank()));
  report.set("singular_values", JsonValue::number_array(kl.singular_values()));
  report.set("truncation", truncation_json(rows));
  report.set("modes_csv", JsonValue::string("modes.csv"));
  report.set("parametric_modes_csv",
             JsonValue::string("parametric_modes.csv"));
  report.set("singular_values_json",
             JsonValue::string("singular_values.json"));
  report.set("gram_csv", JsonValue::string("gram.csv"));

  // Both spectral routes, for comparison by downstream tooling. The
  // correlation has at most min(d, N) nonzero eigenvalues; the rest are
  // omitted.
  const Eigen::Index spectrum_len =
      std::min(ens.state_dim(), ens.sample_count());
  report.set("u_side_eigenvalues",
             JsonValue::number_array(
                 eigendecompose(assemble_correlation(ens))
                     .eigenvalues.head(spectrum_len)));
  report.set("q_side_eigenvalues",
             JsonValue::number_array(
                 method_of_snapshots(gram(ens), ens.measure()).eigenvalues));

  Rng rng(flags.seed);
  std::vector<Audit> audits;
  audits.push_back(truncation_audit(rows, "truncation_predicted_vs_measured"));
  append_pod_audits(audits, "", ens, kl);
  audits.push_back(rkhs_isometry_audit(ens, rng));
  return finish_report(report, std::move(audits), out_dir);
}

// ---- coupled -------------------------------------------------------------------

namespace {

std::optional<Partition> partition_from(const json& config) {
  if (!config.contains("partition") || config["partition"].is_null())
    return std::nullopt;
  const json& p = config["partition"];
  Partition out;
  for (const json& v : p.at("m1")) out.m1.push_back(v.get<Eigen::Index>());
  for (const json& v : p.at("m2")) out.m2.push_back(v.get<Eigen::Index>());
  return out;
}

// Max variation of kernel entries along fibres that the partition declares
// irrelevant: diag1 may only depend on the M1 block indices.
double fibre_variation(const Eigen::MatrixXd& diag, Eigen::Index n_outer,
                       Eigen::Index n_inner, bool outer_is_relevant) {
  double worst = 0.0;
  for (Eigen::Index bi = 0; bi < n_outer; ++bi)
    for (Eigen::Index bj = 0; bj < n_outer; ++bj) {
      // Entries across the irrelevant fibre must coincide.
      double lo = 0.0, hi = 0.0;
      bool first = true;
      for (Eigen::Index ii = 0; ii < n_inner; ++ii)
        for (Eigen::Index jj = 0; jj < n_inner; ++jj) {
          const Eigen::Index row =
              outer_is_relevant ? bi * n_inner + ii : ii * n_outer + bi;
          const Eigen::Index col =
              outer_is_relevant ? bj * n_inner + jj : jj * n_outer + bj;
          const double v = diag(row, col);
          if (first) {
            lo = hi = v;
            first = false;
          } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        }
      worst = std::max(worst, hi - lo);
    }
  return worst;
}

}  // namespace

int cmd_coupled(const fs::path& config_path, const fs::path& out_dir,
                const CliFlags& flags) {
  const json config = load_config(config_path);
  const LoadOptions opts = load_options_from(config, flags);
  const SampledMeasure measure = load_measure(
      resolve(config_path, require_string(config, "params", "config")), opts);
  const Eigen::MatrixXd data1 = read_csv_matrix(
      resolve(config_path, require_string(config, "snapshots1", "config")));
  const Eigen::MatrixXd data2 = read_csv_matrix(
      resolve(config_path, require_string(config, "snapshots2", "config")));
  const CoupledEnsemble ce(data1, data2, measure, partition_from(config));

  const CorrelationMatrix c1 = assemble_correlation(ce.sub1());
  const CorrelationMatrix c2 = assemble_correlation(ce.sub2());
  const CorrelationMatrix cc = coupling_correlation(ce);
  const CoupledKernel kernel = coupled_kernel(ce);

  const SpectralDecomposition sd1 = eigendecompose(c1);
  const SpectralDecomposition sd2 = eigendecompose(c2);
  const SpectralDecomposition sdc = eigendecompose(cc);

  // Spectrum union.
  Eigen::VectorXd joined(sd1.eigenvalues.size() + sd2.eigenvalues.size());
  joined << sd1.eigenvalues, sd2.eigenvalues;
  const double union_gap = spectra_gap(sdc.eigenvalues, joined);

  // Block additivity on seeded random vectors: the block-diagonal
  // quadratic form against the per-subsystem sum.
  Rng rng(flags.seed);
  double additivity = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::VectorXd u1 =
        rng.uniform_vector(ce.sub1().state_dim(), -1.0, 1.0);
    const Eigen::VectorXd u2 =
        rng.uniform_vector(ce.sub2().state_dim(), -1.0, 1.0);
    Eigen::VectorXd u(u1.size() + u2.size());
    u << u1, u2;
    const double lhs = u.dot(cc.entries() * u);
    const double rhs =
        u1.dot(c1.entries() * u1) + u2.dot(c2.entries() * u2);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    additivity = std::max(additivity, std::abs(lhs - rhs) / scale);
  }

  // Kernel consistency per subsystem (U/Q duality).
  const double dual1 = spectra_gap(
      sd1.eigenvalues,
      method_of_snapshots(GramKernel(kernel.diag1, ce.sub1().state_dim()),
                          ce.measure())
          .eigenvalues);
  const double dual2 = spectra_gap(
      sd2.eigenvalues,
      method_of_snapshots(GramKernel(kernel.diag2, ce.sub2().state_dim()),
                          ce.measure())
          .eigenvalues);

  // Joint truncation table over equal per-subsystem mode counts.
  const KLExpansion kl1 = kl_expand(ce.sub1());
  const KLExpansion kl2 = kl_expand(ce.sub2());
  const double total_energy =
      kl1.eigenvalues().sum() + kl2.eigenvalues().sum();
  JsonValue joint_table = JsonValue::array();
  bool joint_pass = true;
  double joint_worst = 0.0;
  const Eigen::Index max_n = std::max(kl1.rank(), kl2.rank());
  for (Eigen::Index n = 1; n <= max_n; ++n) {
    const Eigen::Index n1 = std::min(n, kl1.rank());
    const Eigen::Index n2 = std::min(n, kl2.rank());
    const CoupledPod pod = coupled_pod(ce, n1, n2);
    const double predicted = pod.joint_squared_error;
    const double measured = reconstruction_error_sq(pod.kl1, ce.sub1()) +
                            reconstruction_error_sq(pod.kl2, ce.sub2());
    const bool row_pass =
        truncation_row_pass(predicted, measured, total_energy);
    joint_pass = joint_pass && row_pass;
    if (predicted > 0.0)
      joint_worst =
          std::max(joint_worst, std::abs(measured / predicted - 1.0));
    JsonValue row = JsonValue::object();
    row.set("n1", JsonValue::integer(n1));
    row.set("n2", JsonValue::integer(n2));
    row.set("predicted_error_sq", JsonValue::number(predicted));
    row.set("measured_error_sq", JsonValue::number(measured));
    row.set("pass", JsonValue::boolean(row_pass));
    joint_table.push(std::move(row));
  }

  fs::create_directories(out_dir);
  write_csv_matrix(out_dir / "kernel_diag1.csv", kernel.diag1);
  write_csv_matrix(out_dir / "kernel_diag2.csv", kernel.diag2);

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue::string("coupled"));
  report.set("seed", JsonValue::integer(static_cast<std::int64_t>(flags.seed)));
  report.set("state_dims",
             JsonValue::array()
                 .push(JsonValue::integer(ce.sub1().state_dim()))
                 .push(JsonValue::integer(ce.sub2().state_dim())));
  report.set("sample_count", JsonValue::integer(ce.sample_count()));
  report.set("subsystem1_eigenvalues",
             JsonValue::number_array(sd1.eigenvalues));
  report.set("subsystem2_eigenvalues",
             JsonValue::number_array(sd2.eigenvalues));
  report.set("joint_truncation", std::move(joint_table));

  std::vector<Audit> audits;
  audits.push_back(make_audit("spectrum_union", union_gap, 1e-10));
  audits.push_back(make_audit("block_additivity", additivity, 1e-12));
  audits.push_back(make_audit("kernel_duality_sub1", dual1, 1e-10));
  audits.push_back(make_audit("kernel_duality_sub2", dual2, 1e-10));
  audits.push_back(Audit{"joint_truncation_predicted_vs_measured",
                         joint_worst, 1e-8, joint_pass});

  if (ce.partition()) {
    const GridStructure gs = grid_structure(ce);
    const double var1 = fibre_variation(kernel.diag1, gs.n1, gs.n2, true);
    const double var2 = fibre_variation(kernel.diag2, gs.n2, gs.n1, false);
    audits.push_back(make_audit("partition_fibre_constancy_sub1", var1, 1e-12));
    audits.push_back(make_audit("partition_fibre_constancy_sub2", var2, 1e-12));
    report.set("grid", JsonValue::array()
                           .push(JsonValue::integer(gs.n1))
                           .push(JsonValue::integer(gs.n2)));
  }
  return finish_report(report, std::move(audits), out_dir);
}

// ---- tensor --------------------------------------------------------------------

int cmd_tensor(const fs::path& config_path, const fs::path& out_dir,
               const CliFlags& flags) {
  const json config = load_config(config_path);
  const SnapshotEnsemble ens = load_ensemble(
      resolve(config_path, require_string(config, "snapshots", "config")),
      resolve(config_path, require_string(config, "params", "config")),
      load_options_from(config, flags));

  if (!config.contains("grid_shape") || !config["grid_shape"].is_array())
    throw InputError("config.grid_shape: expected an array of axis sizes");
  std::vector<Eigen::Index> grid_shape;
  for (const json& v : config["grid_shape"])
    grid_shape.push_back(v.get<Eigen::Index>());
  const double eps =
      config.contains("epsilon") ? config["epsilon"].get<double>() : 0.0;
  const auto max_bond = static_cast<Eigen::Index>(
      config.contains("max_bond") ? config["max_bond"].get<double>() : 0);

  const SnapshotTensor t = tensorize(ens, grid_shape);
  const TTDecomposition tt = tt_svd(t, eps, max_bond);
  const SnapshotTensor back = tt_reconstruct(tt);
  const double measured = t.weighted_error(back);
  const double bound = tt.error_bound();
  const double norm = t.weighted_frobenius_norm();

  fs::create_directories(out_dir);
  JsonValue tt_manifest = JsonValue::object();
  JsonValue shape = JsonValue::array();
  for (Eigen::Index dsize : t.dims()) shape.push(JsonValue::integer(dsize));
  tt_manifest.set("shape", std::move(shape));
  JsonValue bonds = JsonValue::array();
  for (Eigen::Index b : tt.bond_dims()) bonds.push(JsonValue::integer(b));
  tt_manifest.set("bond_dims", std::move(bonds));
  JsonValue energies = JsonValue::array();
  for (double e : tt.discarded_energies()) energies.push(JsonValue::number(e));
  tt_manifest.set("discarded_energies", std::move(energies));
  JsonValue core_files = JsonValue::array();
  for (std::size_t s = 0; s < tt.cores().size(); ++s) {
    const std::string name = "core_" + std::to_string(s) + ".csv";
    write_csv_matrix(out_dir / name, tt.cores()[s].mat);
    core_files.push(JsonValue::string(name));
  }
  tt_manifest.set("core_files", std::move(core_files));
  write_file_atomic(out_dir / "tt_manifest.json", tt_manifest.dump());

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue::string("tensor"));
  report.set("seed", JsonValue::integer(static_cast<std::int64_t>(flags.seed)));
  report.set("epsilon", JsonValue::number(eps));
  report.set("max_bond", JsonValue::integer(max_bond));
  report.set("weighted_norm", JsonValue::number(norm));
  report.set("error_bound", JsonValue::number(bound));
  report.set("measured_error", JsonValue::number(measured));

  std::vector<Audit> audits;
  // Measured error never exceeds the TT-SVD bound (with roundoff slack).
  audits.push_back(make_audit("tt_error_within_bound",
                              measured - bound, 1e-10 * std::max(norm, 1e-300)));
  Eigen::Index worst_bond = 0;
  for (Eigen::Index b : tt.bond_dims()) worst_bond = std::max(worst_bond, b);
  if (max_bond > 0)
    audits.push_back(make_audit("bond_caps_respected",
                                double(worst_bond > max_bond ? 1 : 0), 0.0));
  if (eps == 0.0 && max_bond == 0)
    audits.push_back(make_audit("exact_reconstruction_at_eps_zero", measured,
                                1e-10 * std::max(norm, 1e-300)));
  return finish_report(report, std::move(audits), out_dir);
}

// ---- matrix-field ---------------------------------------------------------------

int cmd_matrix_field(const fs::path& config_path, const fs::path& out_dir,
                     const CliFlags& flags) {
  const json config = load_config(config_path);
  const auto n =
      static_cast<Eigen::Index>(require_number(config, "n", "config"));
  const Manifold manifold =
      manifold_from_name(require_string(config, "manifold", "config"));
  const Eigen::MatrixXd raw = read_csv_matrix(
      resolve(config_path, require_string(config, "matrix_csv", "config")));
  if (raw.cols() != n * n)
    throw InputError("matrix_csv: expected " + std::to_string(n * n) +
                     " columns (row-major " + std::to_string(n) + "x" +
                     std::to_string(n) + " matrices)");

  std::vector<Eigen::MatrixXd> samples;
  samples.reserve(static_cast<std::size_t>(raw.rows()));
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) a(r, c) = raw(i, r * n + c);
    samples.push_back(std::move(a));
  }
  const MatrixFieldEnsemble mfe(samples, manifold);

  SampledMeasure measure = SampledMeasure::uniform_indexed(mfe.sample_count());
  if (config.contains("params") && config["params"].is_string())
    measure = load_measure(resolve(config_path, config["params"].get<std::string>()),
                           load_options_from(config, flags));
  const SnapshotEnsemble encoded = encode_field(mfe, measure);
  const KLExpansion kl = kl_expand(encoded);

  // Full-rank roundtrip: encode -> expand -> reconstruct -> decode.
  Eigen::MatrixXd rebuilt(encoded.state_dim(), encoded.sample_count());
  for (Eigen::Index i = 0; i < encoded.sample_count(); ++i)
    rebuilt.col(i) = reconstruct(kl, i);
  const MatrixFieldEnsemble decoded = decode_field(
      SnapshotEnsemble(rebuilt, encoded.measure()), manifold, n);

  Eigen::VectorXd roundtrip(mfe.sample_count());
  for (Eigen::Index i = 0; i < mfe.sample_count(); ++i)
    roundtrip[i] = (decoded.samples()[static_cast<std::size_t>(i)] -
                    mfe.samples()[static_cast<std::size_t>(i)])
                       .norm();

  const auto rows = truncation_table(kl, encoded);

  fs::create_directories(out_dir);
  export_expansion(out_dir, kl, kl.rank(), "encoded_");

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue::string("matrix-field"));
  report.set("seed", JsonValue::integer(static_cast<std::int64_t>(flags.seed)));
  report.set("manifold", JsonValue::string(manifold_name(manifold)));
  report.set("matrix_dim", JsonValue::integer(n));
  report.set("sample_count", JsonValue::integer(mfe.sample_count()));
  report.set("encoded_dim", JsonValue::integer(encoded.state_dim()));
  report.set("singular_values", JsonValue::number_array(kl.singular_values()));
  report.set("roundtrip_errors", JsonValue::number_array(roundtrip));
  report.set("truncation", truncation_json(rows));

  std::vector<Audit> audits;
  audits.push_back(make_audit("full_rank_roundtrip",
                              roundtrip.size() ? roundtrip.maxCoeff() : 0.0,
                              1e-8));
  audits.push_back(truncation_audit(rows, "truncation_predicted_vs_measured"));
  return finish_report(report, std::move(audits), out_dir);
}

}  // namespace paramred::tools
