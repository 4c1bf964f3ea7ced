#pragma once

// Monte-Carlo experiment families for the bench command. Each trial owns the stream
// (seed, trial index), so tables are identical for any number of worker threads.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eigenpath/eigenpath.hpp"
#include "eigenpath/harness/matrix_io.hpp"
#include "eigenpath/harness/parallel.hpp"
#include "eigenpath/harness/stats.hpp"

namespace eigenpath::harness {

struct ExperimentConfig {
  char experiment = 'a';
  std::vector<Eigen::Index> sizes{4};
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  ComplexMatrix center;  // empty means zero
  unsigned jobs = 1;
  std::size_t quadrature_points = 10'000;
};

struct TrialRow {
  std::size_t trial = 0;
  Eigen::Index n = 0;
  std::vector<double> values;
  bool ok = true;
  std::string error;
};

struct ExperimentTable {
  std::vector<std::string> columns;
  std::vector<TrialRow> rows;
};

// ---------------------------------------------------------------------------
// Single-trial quantities

/// mu_{F,av}^2(A) / |A|_F^2
inline double normalized_mu_f_av_squared(const ComplexMatrix& a) {
  const double m = mu_F_av(a);
  return m * m / a.squaredNorm();
}

/// (|det G|^2, |G^{-1}|_F^2 |det G|^2) for G ~ N(center, sigma^2 Id), m x m.
inline std::vector<double> determinant_moments(RngStream& rng, Eigen::Index m, const ComplexMatrix& center,
                                               double sigma) {
  const ComplexMatrix g = sample_gaussian_matrix(rng, m, m, center, sigma);
  Eigen::PartialPivLU<ComplexMatrix> lu(g);
  const double det2 = std::norm(lu.determinant());
  const double inv2 = lu.inverse().squaredNorm();
  return {det2, inv2 * det2};
}

/// |M^+|_F^2 for M ~ N(0, sigma^2), (n-1) x n.
inline double pseudoinverse_moment(RngStream& rng, Eigen::Index n, double sigma) {
  return pseudoinverse(sample_gaussian_matrix(rng, n - 1, n, sigma)).squaredNorm();
}

// ---------------------------------------------------------------------------

namespace detail {

inline ComplexMatrix center_for(const ExperimentConfig& c, Eigen::Index n) {
  if (c.center.size() == 0) return ComplexMatrix::Zero(n, n);
  if (c.center.rows() != n || c.center.cols() != n) throw ArgumentError("center shape does not match n");
  return c.center;
}

inline std::vector<std::string> columns_for(char experiment) {
  switch (experiment) {
    case 'a': return {"gaussian", "truncated", "sphere"};
    case 'b': return {"det2", "inv_weighted_det2"};
    case 'c': return {"pinv_frobenius2"};
    case 'd': return {"proposals"};
    case 'e': return {"single_steps", "all_steps_mean", "random_steps", "random_proposals"};
    case 'f': return {"steps", "ceiling", "ratio"};
    default: throw ArgumentError(std::string("unknown experiment '") + experiment + "'");
  }
}

inline std::vector<double> run_trial(const ExperimentConfig& c, Eigen::Index n, RngStream& rng) {
  switch (c.experiment) {
    case 'a': {
      const ComplexMatrix center = center_for(c, n);
      const ComplexMatrix g = sample_gaussian_matrix(rng, n, n, center, c.sigma);
      const ComplexMatrix t = sample_truncated_gaussian(rng, n, center, c.sigma).matrix;
      ComplexMatrix s = sample_gaussian_matrix(rng, n, n);
      s /= s.norm();
      const double sphere = mu_F_av(s);
      return {normalized_mu_f_av_squared(g), normalized_mu_f_av_squared(t), sphere * sphere};
    }
    case 'b': return determinant_moments(rng, n, center_for(c, n), c.sigma);
    case 'c': return {pseudoinverse_moment(rng, n, c.sigma)};
    case 'd': return {static_cast<double>(sample_omega(rng, n).proposals)};
    case 'e': {
      const ComplexMatrix a = sample_gaussian_matrix(rng, n, n, center_for(c, n), c.sigma);
      const double single = static_cast<double>(single_eigenpair(a).trace.steps);
      double all = 0.0;
      for (const auto& r : all_eigenpairs(a)) {
        if (!r.result) throw NumericalError(*r.failure, r.message);
        all += static_cast<double>(r.result->trace.steps);
      }
      const RandomSolve rs = random_eigenpair(rng, a);
      return {single, all / static_cast<double>(n), static_cast<double>(rs.path.trace.steps),
              static_cast<double>(rs.start.proposals)};
    }
    case 'f': {
      const ComplexMatrix a = sample_gaussian_matrix(rng, n, n, center_for(c, n), c.sigma);
      const EigenTriple h = single_start(n);
      const double steps = static_cast<double>(single_eigenpair(a).trace.steps);
      const double ceiling =
          std::ceil(step_count_ceiling(a, h.matrix, {h.eigenvalue, h.eigenvector}, c.quadrature_points));
      return {steps, ceiling, steps / ceiling};
    }
    default: throw ArgumentError(std::string("unknown experiment '") + c.experiment + "'");
  }
}

}  // namespace detail

inline ExperimentTable run_experiment(const ExperimentConfig& c) {
  if (c.trials < 1) throw ArgumentError("trials must be at least 1");
  if (!(c.sigma > 0.0)) throw ArgumentError("sigma must be positive");
  if (c.sizes.empty()) throw ArgumentError("no matrix size given");
  for (auto n : c.sizes) {
    if (n < 2) throw ArgumentError("n must be at least 2");
  }
  ExperimentTable table;
  table.columns = detail::columns_for(c.experiment);
  const std::size_t total = c.trials * c.sizes.size();
  table.rows = run_indexed<TrialRow>(total, c.jobs, [&c](std::size_t i) {
    TrialRow row;
    row.trial = i;
    row.n = c.sizes[i / c.trials];
    RngStream rng(c.seed, i);
    try {
      row.values = detail::run_trial(c, row.n, rng);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    return row;
  });
  return table;
}

inline std::string to_csv(const ExperimentTable& t) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "trial,n";
  for (const auto& c : t.columns) out << ',' << c;
  out << ",ok\n";
  for (const auto& r : t.rows) {
    out << r.trial << ',' << r.n;
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      out << ',';
      if (r.ok) out << r.values[k];
    }
    out << ',' << (r.ok ? 1 : 0) << '\n';
  }
  return out.str();
}

inline json rows_to_json(const ExperimentTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = {{"trial", r.trial}, {"n", r.n}, {"ok", r.ok}};
    if (r.ok) {
      for (std::size_t k = 0; k < t.columns.size(); ++k) row[t.columns[k]] = r.values[k];
    } else {
      row["error"] = r.error;
    }
    rows.push_back(row);
  }
  return rows;
}

inline json summary_to_json(const MetricSummary& s) {
  return {{"mean", s.mean}, {"standard_error", s.standard_error}, {"min", s.min}, {"max", s.max},
          {"median_of_means", s.median_of_means}, {"count", s.count}};
}

/// Per-metric statistics over successful trials, grouped by n.
inline std::map<Eigen::Index, std::map<std::string, MetricSummary>> aggregate(const ExperimentTable& t) {
  std::map<Eigen::Index, std::map<std::string, std::vector<double>>> values;
  for (const auto& r : t.rows) {
    if (!r.ok) continue;
    for (std::size_t k = 0; k < t.columns.size(); ++k) values[r.n][t.columns[k]].push_back(r.values[k]);
  }
  std::map<Eigen::Index, std::map<std::string, MetricSummary>> out;
  for (const auto& [n, cols] : values) {
    for (const auto& [name, v] : cols) out[n][name] = summarize(v);
  }
  return out;
}

inline json stats_report(const ExperimentTable& t, const ExperimentConfig& c, double wall_seconds,
                         const std::string& git_describe) {
  json sizes = json::array();
  for (auto n : c.sizes) sizes.push_back(n);
  json report;
  report["config"] = {{"experiment", std::string(1, c.experiment)}, {"n", sizes}, {"trials", c.trials},
                      {"seed", c.seed}, {"sigma", c.sigma}, {"center", c.center.size() == 0 ? "zero" : "file"},
                      {"jobs", c.jobs}};
  report["wall_seconds"] = wall_seconds;
  report["git_describe"] = git_describe;
  json failures = json::array();
  for (const auto& r : t.rows) {
    if (!r.ok) failures.push_back({{"trial", r.trial}, {"n", r.n}, {"error", r.error}});
  }
  report["failures"] = failures;
  json metrics = json::object();
  for (const auto& [n, cols] : aggregate(t)) {
    json per_n = json::object();
    for (const auto& [name, s] : cols) per_n[name] = summary_to_json(s);
    metrics[std::to_string(n)] = per_n;
  }
  report["metrics"] = metrics;
  if (c.experiment == 'a') {
    report["note"] = "fixed center only; the supremum over centers is not evaluated";
  }
  return report;
}

}  // namespace eigenpath::harness
