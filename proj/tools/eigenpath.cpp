#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eigenpath/eigenpath.hpp"
#include "eigenpath/harness/experiments.hpp"
#include "eigenpath/harness/matrix_io.hpp"

#ifndef EIGENPATH_GIT_DESCRIBE
#define EIGENPATH_GIT_DESCRIBE "unknown"
#endif

namespace {

using eigenpath::Complex;
using eigenpath::ComplexMatrix;
using eigenpath::ComplexVector;
using nlohmann::json;
namespace ep = eigenpath;
namespace hx = eigenpath::harness;

enum ExitCode { kOk = 0, kArgument = 2, kNumerical = 3, kBudget = 4 };

struct Options {
  std::string sizes;
  std::size_t trials = 100;
  std::optional<std::uint64_t> seed;
  double sigma = 1.0;
  std::string center;
  double epsilon = 1e-6;
  std::string input;
  std::string out;
  std::string format = "json";
  unsigned jobs = 1;
  std::string experiment = "a";
  std::string pair;
  std::uint64_t max_steps = 1'000'000'000ULL;
};

std::vector<Eigen::Index> parse_sizes(const std::string& text) {
  std::vector<Eigen::Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 2) throw std::invalid_argument(item);
      out.push_back(static_cast<Eigen::Index>(v));
    } catch (const std::exception&) {
      throw ep::ArgumentError("--n expects integers >= 2, got '" + item + "'");
    }
  }
  if (out.empty()) throw ep::ArgumentError("--n is empty");
  return out;
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw ep::ArgumentError("--seed is required for randomized commands");
  return *o.seed;
}

/// Matrix from --input, or a Gaussian N(center, sigma^2) draw of size --n from stream 0.
ComplexMatrix matrix_source(const Options& o) {
  if (!o.input.empty()) {
    ComplexMatrix a = hx::load_matrix(o.input);
    ep::require_square(a, "--input");
    return a;
  }
  if (o.sizes.empty()) throw ep::ArgumentError("give --input <file> or --n with --seed");
  const auto sizes = parse_sizes(o.sizes);
  if (sizes.size() != 1) throw ep::ArgumentError("--n must be a single size here");
  ep::RngStream rng(require_seed(o), 0);
  ComplexMatrix center;
  if (!o.center.empty()) center = hx::load_matrix(o.center);
  return ep::sample_gaussian_matrix(rng, sizes[0], sizes[0], center, o.sigma);
}

double relative_residual(const ComplexMatrix& a, const ep::ApproxEigenpair& p) {
  return (a * p.w - p.zeta * p.w).norm() / (a.norm() * p.w.norm());
}

json pair_json(const ComplexMatrix& a, const ep::ApproxEigenpair& p) {
  return {{"zeta", hx::complex_to_json(p.zeta)}, {"w", hx::vector_to_json(p.w)},
          {"residual", relative_residual(a, p)}};
}

ep::PathOptions path_options(const Options& o, bool record) {
  ep::PathOptions opts;
  opts.max_steps = o.max_steps;
  opts.record_steps = record;
  return opts;
}

void maybe_write_trace(const Options& o, const ep::PathResult& r, Eigen::Index n, const ComplexMatrix& a) {
  if (o.out.empty()) return;
  const json t = hx::trace_to_json(r.trace, n, o.seed.value_or(0), relative_residual(a, r.pair));
  hx::write_file(o.out, t.dump(2) + "\n");
}

int cmd_solve_one(const Options& o) {
  const ComplexMatrix a = matrix_source(o);
  const ep::PathResult r = ep::single_eigenpair(a, path_options(o, !o.out.empty()));
  json j = pair_json(a, r.pair);
  j["algorithm"] = "single";
  j["n"] = a.rows();
  j["steps"] = r.trace.steps;
  j["alpha"] = r.trace.alpha;
  std::cout << j.dump(2) << "\n";
  maybe_write_trace(o, r, a.rows(), a);
  return kOk;
}

int cmd_solve_random(const Options& o) {
  const ComplexMatrix a = matrix_source(o);
  ep::RngStream rng(require_seed(o), 1);
  const ep::RandomSolve r = ep::random_eigenpair(rng, a, path_options(o, !o.out.empty()));
  json j = pair_json(a, r.path.pair);
  j["algorithm"] = "random";
  j["n"] = a.rows();
  j["steps"] = r.path.trace.steps;
  j["alpha"] = r.path.trace.alpha;
  j["proposals"] = r.start.proposals;
  j["start_residual"] = r.start.triple.residual();
  std::cout << j.dump(2) << "\n";
  maybe_write_trace(o, r.path, a.rows(), a);
  return kOk;
}

int cmd_solve_all(const Options& o) {
  const ComplexMatrix a = matrix_source(o);
  const auto results = ep::all_eigenpairs(a, path_options(o, false));
  json pairs = json::array();
  std::size_t failures = 0;
  std::optional<ep::FailureKind> first_failure;
  std::vector<std::pair<ep::ApproxEigenpair, double>> certified;  // pair, certify radius
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    json p = {{"index", i}, {"ok", r.result.has_value()}};
    if (r.result) {
      p.update(pair_json(a, r.result->pair));
      p["steps"] = r.result->trace.steps;
      const double m = ep::mu(a, r.result->pair.zeta, r.result->pair.w);
      certified.emplace_back(r.result->pair, std::isfinite(m) ? ep::certify_radius(std::max(m, 1.0 / std::sqrt(2.0))) : 0.0);
    } else {
      ++failures;
      if (!first_failure) first_failure = r.failure;
      p["error"] = std::string(ep::to_string(*r.failure));
      p["message"] = r.message;
    }
    pairs.push_back(p);
  }
  bool distinct = true;
  for (std::size_t i = 0; i < certified.size(); ++i) {
    for (std::size_t k = i + 1; k < certified.size(); ++k) {
      const auto& [p, rp] = certified[i];
      const auto& [q, rq] = certified[k];
      if (ep::dist_a(a, p.zeta, p.w, q.zeta, q.w) <= rp + rq) distinct = false;
    }
  }
  json j = {{"algorithm", "all"}, {"n", a.rows()}, {"pairs", pairs}, {"failures", failures}, {"distinct", distinct}};
  std::cout << j.dump(2) << "\n";
  if (first_failure) {
    std::cerr << json({{"error", ep::to_string(*first_failure)}, {"message", "one or more paths failed"}}).dump()
              << "\n";
    return *first_failure == ep::FailureKind::kBudgetExceeded ? kBudget : kNumerical;
  }
  if (!distinct) {
    std::cerr << json({{"error", "path_failure"}, {"message", "approximate eigenpairs are not separated"}}).dump()
              << "\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_refine(const Options& o) {
  const ComplexMatrix a = matrix_source(o);
  const double scale = a.norm();
  if (!(scale > 0.0)) throw ep::ArgumentError("zero matrix");
  ep::ApproxEigenpair start;
  if (!o.pair.empty()) {
    const json j = json::parse(hx::read_file(o.pair));
    start = {hx::complex_from_json(j.at("zeta")), hx::vector_from_json(j.at("w"))};
    if (start.w.size() != a.rows()) throw ep::ArgumentError("--pair vector has the wrong dimension");
  } else {
    start = ep::single_eigenpair(a, path_options(o, false)).pair;
  }
  const ComplexMatrix normalized = a / scale;
  const ep::RefineResult r = ep::relative_error_refine(normalized, {start.zeta / scale, start.w}, o.epsilon);
  const ep::ApproxEigenpair out{r.pair.zeta * scale, r.pair.w};
  json j = pair_json(a, out);
  j["iterations"] = r.iterations;
  j["epsilon"] = o.epsilon;
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_bench(const Options& o) {
  if (o.experiment.size() != 1 || o.experiment[0] < 'a' || o.experiment[0] > 'f') {
    throw ep::ArgumentError("--experiment must be one of a..f");
  }
  hx::ExperimentConfig c;
  c.experiment = o.experiment[0];
  c.sizes = parse_sizes(o.sizes.empty() ? "4" : o.sizes);
  c.trials = o.trials;
  c.seed = require_seed(o);
  c.sigma = o.sigma;
  c.jobs = o.jobs;
  if (!o.center.empty()) c.center = hx::load_matrix(o.center);
  const auto t0 = std::chrono::steady_clock::now();
  const hx::ExperimentTable table = hx::run_experiment(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.out.empty()) {
    hx::write_file(o.out, o.format == "csv" ? hx::to_csv(table) : hx::rows_to_json(table).dump(2) + "\n");
  }
  std::cout << hx::stats_report(table, c, wall, EIGENPATH_GIT_DESCRIBE).dump(2) << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.sizes, "matrix size (comma-separated list for bench)");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--sigma", o.sigma, "Gaussian standard deviation")->check(CLI::PositiveNumber);
  sub->add_option("--center", o.center, "matrix file used as Gaussian center");
  sub->add_option("--out", o.out, "output path");
}

void add_solver(CLI::App* sub, Options& o) {
  add_common(sub, o);
  sub->add_option("--input", o.input, "matrix file (JSON or EIGP binary)");
  sub->add_option("--max-steps", o.max_steps, "homotopy step budget")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified eigenpair homotopy solver and Monte-Carlo harness", "eigenpath"};
  app.require_subcommand(1);
  Options o;

  auto* one = app.add_subcommand("solve-one", "one eigenpair, continued from diag(1, 0, ..., 0)");
  add_solver(one, o);
  auto* all = app.add_subcommand("solve-all", "all eigenpairs, continued from the hexagonal-lattice start");
  add_solver(all, o);
  auto* rnd = app.add_subcommand("solve-random", "one eigenpair from a random start");
  add_solver(rnd, o);
  auto* ref = app.add_subcommand("refine", "refine an eigenpair to relative error epsilon");
  add_solver(ref, o);
  ref->add_option("--pair", o.pair, "JSON file {zeta: [re, im], w: [[re, im], ...]}; default: solve-one");
  ref->add_option("--epsilon", o.epsilon, "relative accuracy in (0, 1/2)");
  auto* bench = app.add_subcommand("bench", "Monte-Carlo experiments a..f");
  add_common(bench, o);
  bench->add_option("--trials", o.trials, "trials per size")->check(CLI::PositiveNumber);
  bench->add_option("--experiment", o.experiment, "a: condition moments, b: determinant moments, "
                    "c: pseudoinverse moment, d: sampler rate, e: step scaling, f: step ceiling");
  bench->add_option("--format", o.format, "per-trial table format")->check(CLI::IsMember({"json", "csv"}));
  bench->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kArgument;
  }

  try {
    if (one->parsed()) return cmd_solve_one(o);
    if (all->parsed()) return cmd_solve_all(o);
    if (rnd->parsed()) return cmd_solve_random(o);
    if (ref->parsed()) return cmd_refine(o);
    return cmd_bench(o);
  } catch (const ep::BudgetExceeded& e) {
    std::cerr << json({{"error", ep::to_string(e.kind())}, {"message", e.what()}}).dump() << "\n";
    return kBudget;
  } catch (const ep::NumericalError& e) {
    std::cerr << json({{"error", ep::to_string(e.kind())}, {"message", e.what()}}).dump() << "\n";
    return kNumerical;
  } catch (const ep::ArgumentError& e) {
    std::cerr << json({{"error", "argument"}, {"message", e.what()}}).dump() << "\n";
    return kArgument;
  } catch (const json::exception& e) {
    std::cerr << json({{"error", "argument"}, {"message", e.what()}}).dump() << "\n";
    return kArgument;
  }
}
