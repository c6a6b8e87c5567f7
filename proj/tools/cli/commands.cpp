#include "cli/commands.hpp"

#include "drm/chisq.hpp"
#include "drm/data.hpp"
#include "drm/errors.hpp"
#include "drm/inference.hpp"
#include "drm/montecarlo.hpp"
#include "drm/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace drm::cli {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

struct Config {
  std::string input;
  std::string sample_col = "sample";
  std::string h = "identity";
  double lambda = 0.0;
  double q = 2.0;
  double eps = 1e-8;
  double tol = 1e-8;
  int max_iter = 100;
  std::size_t cdf_col = 0;
  std::uint64_t seed = 20080601;
  int reps = 1000;
  std::string lambda_grid;
  double alpha = 0.05;
  std::string output;
  std::string format = "json";
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma = 1.0;
  int n1 = 10;
  int n2 = 10;
  double penalty_scale = 1.0;
  bool table1 = false;
  unsigned threads = 0;
};

std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

// Flattens a JSON report into key,value CSV rows: nested objects join keys
// with '.', arrays append [i].
void flatten(const json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    }
  } else if (j.is_number_float()) {
    out += prefix + "," + num(j.get<double>()) + "\n";
  } else if (j.is_string()) {
    out += prefix + "," + j.get<std::string>() + "\n";
  } else {
    out += prefix + "," + j.dump() + "\n";
  }
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

void emit_report(const Config& cfg, const json& report, std::ostream& out) {
  Sink sink(cfg.output, out);
  if (cfg.format == "csv") {
    std::string text = "field,value\n";
    flatten(report, "", text);
    sink.stream() << text;
  } else {
    sink.stream() << report.dump(2) << '\n';
  }
}

DesignData load_design(const Config& cfg, std::ostream& err) {
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file '" + cfg.input + "'");
  const auto data = load_two_sample_csv(in, cfg.sample_col);
  auto design = apply_h(data, HTransform::parse(cfg.h));
  if (!origin_within_design_range(design)) {
    err << "warning: no observation range contains h(x) = 0; alpha and G2 may not be "
           "identifiable under this h\n";
  }
  return design;
}

PenaltySpec penalty_of(const Config& cfg) { return {cfg.q, cfg.lambda, cfg.eps}; }

FitOptions options_of(const Config& cfg) {
  FitOptions o;
  o.tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  return o;
}

json theta_json(const Theta& theta) {
  return {{"alpha", theta.alpha}, {"beta", vector_json(theta.beta)}};
}

int cmd_fit(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto design = load_design(cfg, err);
  const auto spec = penalty_of(cfg);
  const auto result = fit(design, spec, options_of(cfg));

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "fit";
  report["h"] = cfg.h;
  report["n1"] = design.n1;
  report["n2"] = design.n2;
  report["rho1"] = design.rho1;
  report["penalty"] = {{"q", spec.q}, {"lambda", spec.lambda}, {"eps", spec.eps}};
  report["theta"] = theta_json(result.theta);
  report["converged"] = result.converged;
  report["iterations"] = result.iterations;
  report["loglik"] = result.loglik;
  report["penalized_loglik"] = result.penalized_loglik;
  report["score_norm"] = result.score_norm;
  report["separation"] = to_string(result.separation);

  int status = kOk;
  try {
    const auto cov = sandwich_sigma(design, result.theta, spec);
    report["A_hat"] = matrix_json(cov.A_hat);
    report["V_hat"] = matrix_json(cov.V_hat);
    report["sigma"] = matrix_json(cov.Sigma_hat);
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << '\n';
    report["sigma"] = nullptr;
    status = kSingular;
  }

  const std::vector<double> xs(design.raw.col(static_cast<Eigen::Index>(cfg.cdf_col)).begin(),
                               design.raw.col(static_cast<Eigen::Index>(cfg.cdf_col)).end());
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const auto [g1, g2] = cdf_estimates(design, result.theta, sorted, cfg.cdf_col);
  const auto p = jump_weights(design, result.theta).p;
  json obs = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    obs.push_back({{"sample", design.group[i]},
                   {"x", xs[i]},
                   {"p", p[static_cast<Eigen::Index>(i)]},
                   {"G1", g1(xs[i])},
                   {"G2", g2(xs[i])}});
  }
  report["observations"] = std::move(obs);

  emit_report(cfg, report, out);
  if (!result.converged) {
    err << "warning: Newton iterations did not reach the score tolerance\n";
  }
  return status;
}

int cmd_test(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidArgument("--alpha must lie in (0, 1)");
  const auto design = load_design(cfg, err);
  const auto spec = penalty_of(cfg);
  const auto result = fit(design, spec, options_of(cfg));
  const auto cov = sandwich_sigma(design, result.theta, spec);
  const auto test = wald_test(result.theta.beta, cov.Sigma_hat, design.n());
  const double critical = chi_square_quantile(1.0 - cfg.alpha, test.df);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "test";
  report["theta"] = theta_json(result.theta);
  report["W"] = test.W;
  report["df"] = test.df;
  report["p_value"] = test.p_value;
  report["alpha"] = cfg.alpha;
  report["critical_value"] = critical;
  report["reject"] = test.W > critical;
  report["decision"] = test.W > critical ? "reject" : "accept";
  emit_report(cfg, report, out);
  return kOk;
}

SimCell cell_of(const Config& cfg) {
  SimCell c;
  c.mu1 = cfg.mu1;
  c.mu2 = cfg.mu2;
  c.sigma = cfg.sigma;
  c.n1 = cfg.n1;
  c.n2 = cfg.n2;
  c.lambda = cfg.lambda;
  c.q = cfg.q;
  c.reps = cfg.reps;
  c.seed = cfg.seed;
  c.alpha_level = cfg.alpha;
  c.penalty_scale = cfg.penalty_scale;
  c.validate();
  return c;
}

int cmd_simulate(const Config& cfg, std::ostream& out, std::ostream&) {
  std::vector<SimCell> cells;
  if (cfg.table1) {
    cells = table1_cells(cfg.reps, cfg.seed);
  } else if (!cfg.lambda_grid.empty()) {
    for (double l : parse_grid(cfg.lambda_grid)) {
      auto c = cell_of(cfg);
      c.lambda = l;
      cells.push_back(c);
    }
  } else {
    cells.push_back(cell_of(cfg));
  }
  std::vector<SimRow> rows;
  rows.reserve(cells.size());
  for (const auto& c : cells) rows.push_back(run_table_cell(c, {cfg.threads}));

  Sink sink(cfg.output, out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      arr.push_back({{"beta_true", cells[k].beta_true()},
                     {"n1", cells[k].n1},
                     {"n2", cells[k].n2},
                     {"lambda", cells[k].lambda},
                     {"penalty_scale", cells[k].penalty_scale},
                     {"mean_beta_hat", rows[k].mean_beta_hat},
                     {"mse", rows[k].mse_beta_hat},
                     {"power", rows[k].power},
                     {"n_nonconverged", rows[k].n_nonconverged},
                     {"reps_used", rows[k].reps_used}});
    }
    sink.stream() << json{{"schema_version", kSchemaVersion}, {"rows", arr}}.dump(2) << '\n';
  } else {
    write_sim_rows_csv(sink.stream(), cells, rows);
  }
  return kOk;
}

int cmd_curve(const Config& cfg, std::ostream& out, std::ostream&) {
  if (cfg.lambda_grid.empty()) throw InvalidArgument("curve needs --lambda-grid");
  const auto grid = parse_grid(cfg.lambda_grid);
  const auto curve = mse_efficiency_curve(cell_of(cfg), grid, {cfg.threads});
  Sink sink(cfg.output, out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& p : curve) {
      arr.push_back({{"lambda", p.lambda}, {"mse", p.mse}, {"efficiency", p.efficiency}});
    }
    sink.stream() << json{{"schema_version", kSchemaVersion}, {"curve", arr}}.dump(2) << '\n';
  } else {
    std::string text = "lambda,mse,efficiency\n";
    for (const auto& p : curve) {
      text += num(p.lambda) + "," + num(p.mse) + "," + num(p.efficiency) + "\n";
    }
    sink.stream() << text;
  }
  return kOk;
}

int cmd_qq(const Config& cfg, std::ostream& out, std::ostream&) {
  auto w = null_wald_sample(cell_of(cfg), {cfg.threads});
  std::sort(w.begin(), w.end());
  const double m = static_cast<double>(w.size());
  Sink sink(cfg.output, out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < w.size(); ++i) {
      arr.push_back({w[i], chi_square_quantile((static_cast<double>(i) + 0.5) / m, 1)});
    }
    sink.stream() << json{{"schema_version", kSchemaVersion}, {"pairs", arr}}.dump(2) << '\n';
  } else {
    std::string text = "empirical,theoretical\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
      text += num(w[i]) + "," + num(chi_square_quantile((static_cast<double>(i) + 0.5) / m, 1)) +
              "\n";
    }
    sink.stream() << text;
  }
  return kOk;
}

void add_penalty_flags(CLI::App* app, Config& cfg) {
  app->add_option("--lambda", cfg.lambda, "Penalty weight lambda (>= 0)")->capture_default_str();
  app->add_option("--q", cfg.q, "Penalty exponent q (> 1)")->capture_default_str();
}

void add_fit_flags(CLI::App* app, Config& cfg) {
  app->add_option("--input", cfg.input, "Two-sample CSV file")->required();
  app->add_option("--sample-col", cfg.sample_col, "Name of the 1/2 sample label column")
      ->capture_default_str();
  app->add_option("--h", cfg.h, "h transform: identity | log | quad | cols=i,j,...")
      ->capture_default_str();
  add_penalty_flags(app, cfg);
  app->add_option("--eps", cfg.eps, "Smoothing of |beta| for 1 < q < 2")->capture_default_str();
  app->add_option("--tol", cfg.tol, "Score sup-norm tolerance")->capture_default_str();
  app->add_option("--max-iter", cfg.max_iter, "Newton iteration cap")->capture_default_str();
  app->add_option("--cdf-col", cfg.cdf_col, "Raw column ordering the CDF estimates")
      ->capture_default_str();
  app->add_option("--output", cfg.output, "Output file (default stdout)");
  app->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_sim_flags(CLI::App* app, Config& cfg) {
  app->add_option("--mu1", cfg.mu1, "Log-scale mean of sample 1")->capture_default_str();
  app->add_option("--mu2", cfg.mu2, "Log-scale mean of sample 2")->capture_default_str();
  app->add_option("--sigma", cfg.sigma, "Common log-scale standard deviation")
      ->capture_default_str();
  app->add_option("--n1", cfg.n1, "Size of sample 1")->capture_default_str();
  app->add_option("--n2", cfg.n2, "Size of sample 2")->capture_default_str();
  add_penalty_flags(app, cfg);
  app->add_option("--penalty-scale", cfg.penalty_scale,
                  "Fit with penalty weight scale*lambda; 0.5 reads lambda as the half-ridge "
                  "weight of the bundled lognormal study")
      ->capture_default_str();
  app->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app->add_option("--reps", cfg.reps, "Monte Carlo replications")->capture_default_str();
  app->add_option("--alpha", cfg.alpha, "Test level")->capture_default_str();
  app->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  app->add_option("--output", cfg.output, "Output file (default stdout)");
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  auto to_double = [&](std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw InvalidArgument("bad number '" + std::string(s) + "' in lambda grid");
    }
    return v;
  };
  std::vector<double> grid;
  if (text.find(':') == std::string::npos) {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      grid.push_back(to_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  } else {
    std::vector<std::string_view> parts;
    std::string_view rest(text);
    for (auto colon = rest.find(':'); colon != std::string_view::npos; colon = rest.find(':')) {
      parts.push_back(rest.substr(0, colon));
      rest.remove_prefix(colon + 1);
    }
    parts.push_back(rest);
    if (parts.size() != 3) throw InvalidArgument("lambda grid must look like a:b:step");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw InvalidArgument("lambda grid needs a <= b and step > 0");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= count; ++k) grid.push_back(a + static_cast<double>(k) * step);
  }
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end())) {
    throw InvalidArgument("lambda grid must be a nonempty ascending list");
  }
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Penalized empirical likelihood for the two-sample density ratio model",
               "densratio"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  auto* fit_cmd = app.add_subcommand("fit", "Fit (alpha, beta), covariance and CDF estimates");
  add_fit_flags(fit_cmd, cfg);

  auto* test_cmd = app.add_subcommand("test", "Wald test of beta = 0");
  add_fit_flags(test_cmd, cfg);
  test_cmd->add_option("--alpha", cfg.alpha, "Test level")->capture_default_str();

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo table cell(s) as CSV");
  add_sim_flags(sim_cmd, cfg);
  sim_cmd->add_option("--lambda-grid", cfg.lambda_grid, "One row per lambda: a:b:step or list");
  sim_cmd->add_flag("--table1", cfg.table1, "Run the twelve cells of the lognormal study");
  sim_cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_str("csv");

  auto* curve_cmd = app.add_subcommand("curve", "MSE and efficiency over a lambda grid");
  add_sim_flags(curve_cmd, cfg);
  curve_cmd->add_option("--lambda-grid", cfg.lambda_grid, "Grid a:b:step, must include 0")
      ->required();
  curve_cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_str("csv");

  auto* qq_cmd = app.add_subcommand("qq", "Null Wald statistics against chi-square quantiles");
  add_sim_flags(qq_cmd, cfg);
  qq_cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_str("csv");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    // Simulation outputs default to CSV; fit/test reports to JSON.
    for (const auto& a : args) {
      if (a == "simulate" || a == "curve" || a == "qq") {
        cfg.format = "csv";
        break;
      }
    }
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(cfg, out, err);
    if (test_cmd->parsed()) return cmd_test(cfg, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(cfg, out, err);
    if (curve_cmd->parsed()) return cmd_curve(cfg, out, err);
    if (qq_cmd->parsed()) return cmd_qq(cfg, out, err);
  } catch (const NonexistenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNonexistence;
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << "; consider lambda > 0 or more data\n";
    return kSingular;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace drm::cli
