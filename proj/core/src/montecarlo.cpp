#include "drm/montecarlo.hpp"

#include "drm/chisq.hpp"
#include "drm/errors.hpp"
#include "drm/inference.hpp"
#include "drm/solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

namespace drm {

namespace {

template <class Fn>
void parallel_for(int count, Parallelism par, Fn&& fn) {
  unsigned threads = par.threads ? par.threads : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(std::max(count, 1)));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
}

struct Replicate {
  bool usable = false;
  bool nonconverged = false;
  bool reject = false;
  bool has_w = false;
  double beta_hat = 0.0;
  double W = 0.0;
};

Replicate run_replication(const DesignData& design, const PenaltySpec& spec, double critical) {
  Replicate out;
  FitResult fitted;
  try {
    fitted = fit(design, spec);
    out.nonconverged = !fitted.converged;
  } catch (const NonexistenceError& e) {
    fitted = e.capped();
    out.nonconverged = true;
  } catch (const Error&) {
    return out;
  }
  out.usable = true;
  out.beta_hat = fitted.theta.beta[0];
  try {
    const auto cov = sandwich_sigma(design, fitted.theta, spec);
    const auto test = wald_test(fitted.theta.beta, cov.Sigma_hat, design.n());
    out.W = test.W;
    out.has_w = std::isfinite(test.W);
    out.reject = out.has_w && test.W > critical;
  } catch (const Error&) {
    out.nonconverged = true;
  }
  return out;
}

void append_number(std::string& s, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  s.append(buf, ptr);
}

}  // namespace

void SimCell::validate() const {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (n1 < 1 || n2 < 1) throw InvalidArgument("sample sizes must be >= 1");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(q > 1.0)) throw UnsupportedPenaltyError("q must be > 1");
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) {
    throw InvalidArgument("alpha level must lie in (0, 1)");
  }
  if (!(penalty_scale > 0.0)) throw InvalidArgument("penalty_scale must be > 0");
}

double SimCell::beta_true() const { return (mu1 - mu2) / (sigma * sigma); }

std::vector<Observation> sample_lognormal(int n, double mu, double sigma, RngStream& stream) {
  if (n < 1) throw InvalidArgument("sample size must be >= 1");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.push_back({std::exp(mu + sigma * stream.normal())});
  return out;
}

TwoSampleData draw_replication(const SimCell& cell, std::uint64_t rep) {
  RngStream stream(cell.seed, rep);
  TwoSampleData data;
  data.sample1 = sample_lognormal(cell.n1, cell.mu1, cell.sigma, stream);
  data.sample2 = sample_lognormal(cell.n2, cell.mu2, cell.sigma, stream);
  return data;
}

SimRow run_table_cell(const SimCell& cell, Parallelism par) {
  cell.validate();
  const PenaltySpec spec = cell.penalty();
  const double critical = chi_square_quantile(1.0 - cell.alpha_level, 1);
  std::vector<Replicate> reps(static_cast<std::size_t>(cell.reps));
  parallel_for(cell.reps, par, [&](int i) {
    const auto design = apply_h(draw_replication(cell, static_cast<std::uint64_t>(i)),
                                HTransform::log());
    reps[static_cast<std::size_t>(i)] = run_replication(design, spec, critical);
  });

  SimRow row;
  const double beta0 = cell.beta_true();
  double sum = 0.0, sq = 0.0;
  int rejections = 0;
  for (const auto& r : reps) {
    if (r.nonconverged) ++row.n_nonconverged;
    if (!r.usable) continue;
    ++row.reps_used;
    sum += r.beta_hat;
    sq += (r.beta_hat - beta0) * (r.beta_hat - beta0);
    rejections += r.reject ? 1 : 0;
  }
  if (row.reps_used > 0) {
    row.mean_beta_hat = sum / row.reps_used;
    row.mse_beta_hat = sq / row.reps_used;
    row.power = static_cast<double>(rejections) / row.reps_used;
  }
  return row;
}

std::vector<CurvePoint> mse_efficiency_curve(const SimCell& cell_base,
                                             std::span<const double> lambda_grid,
                                             Parallelism par) {
  cell_base.validate();
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end())) {
    throw InvalidArgument("lambda grid must be sorted");
  }
  const auto zero = std::find(lambda_grid.begin(), lambda_grid.end(), 0.0);
  if (zero == lambda_grid.end()) throw InvalidArgument("lambda grid must contain 0");
  if (lambda_grid.front() < 0.0) throw InvalidArgument("lambda values must be >= 0");
  const auto zero_idx = static_cast<std::size_t>(zero - lambda_grid.begin());

  const auto g = lambda_grid.size();
  const double critical = chi_square_quantile(1.0 - cell_base.alpha_level, 1);
  std::vector<Replicate> results(static_cast<std::size_t>(cell_base.reps) * g);
  parallel_for(cell_base.reps, par, [&](int i) {
    const auto design = apply_h(draw_replication(cell_base, static_cast<std::uint64_t>(i)),
                                HTransform::log());
    for (std::size_t k = 0; k < g; ++k) {
      results[static_cast<std::size_t>(i) * g + k] =
          run_replication(design, cell_base.penalty(lambda_grid[k]), critical);
    }
  });

  const double beta0 = cell_base.beta_true();
  std::vector<CurvePoint> curve(g);
  for (std::size_t k = 0; k < g; ++k) {
    double sq = 0.0;
    int used = 0;
    for (int i = 0; i < cell_base.reps; ++i) {
      const auto& r = results[static_cast<std::size_t>(i) * g + k];
      if (!r.usable) continue;
      sq += (r.beta_hat - beta0) * (r.beta_hat - beta0);
      ++used;
    }
    curve[k].lambda = lambda_grid[k];
    curve[k].mse = used ? sq / used : 0.0;
  }
  const double base = curve[zero_idx].mse;
  for (auto& point : curve) point.efficiency = efficiency(point.mse, base);
  return curve;
}

std::vector<double> null_wald_sample(const SimCell& cell, Parallelism par) {
  cell.validate();
  if (cell.mu1 != cell.mu2) throw InvalidArgument("null Wald sampling requires mu1 == mu2");
  const PenaltySpec spec = cell.penalty();
  std::vector<Replicate> reps(static_cast<std::size_t>(cell.reps));
  parallel_for(cell.reps, par, [&](int i) {
    const auto design = apply_h(draw_replication(cell, static_cast<std::uint64_t>(i)),
                                HTransform::log());
    reps[static_cast<std::size_t>(i)] = run_replication(design, spec, 0.0);
  });
  std::vector<double> w;
  w.reserve(reps.size());
  for (const auto& r : reps) {
    if (r.has_w) w.push_back(r.W);
  }
  return w;
}

std::vector<double> g2_scaled_variance(const SimCell& cell, std::span<const double> points,
                                       Parallelism par) {
  cell.validate();
  if (!std::is_sorted(points.begin(), points.end())) {
    throw InvalidArgument("evaluation points must be sorted");
  }
  const PenaltySpec spec = cell.penalty();
  const auto k = points.size();
  std::vector<double> values(static_cast<std::size_t>(cell.reps) * k, 0.0);
  std::vector<char> ok(static_cast<std::size_t>(cell.reps), 0);
  parallel_for(cell.reps, par, [&](int i) {
    const auto design = apply_h(draw_replication(cell, static_cast<std::uint64_t>(i)),
                                HTransform::log());
    Theta theta;
    try {
      theta = fit(design, spec).theta;
    } catch (const NonexistenceError& e) {
      theta = e.capped().theta;
    } catch (const Error&) {
      return;
    }
    const auto g2 = cdf_estimates(design, theta, points).second;
    for (std::size_t j = 0; j < k; ++j) values[static_cast<std::size_t>(i) * k + j] = g2.values[j];
    ok[static_cast<std::size_t>(i)] = 1;
  });

  std::vector<double> out(k, 0.0);
  const double n = static_cast<double>(cell.n1 + cell.n2);
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0, sq = 0.0;
    int used = 0;
    for (int i = 0; i < cell.reps; ++i) {
      if (!ok[static_cast<std::size_t>(i)]) continue;
      const double v = values[static_cast<std::size_t>(i) * k + j];
      sum += v;
      sq += v * v;
      ++used;
    }
    if (used < 2) throw InvalidArgument("too few usable replications for a variance");
    const double mean = sum / used;
    out[j] = n * (sq - used * mean * mean) / (used - 1);
  }
  return out;
}

std::vector<SimCell> table1_cells(int reps, std::uint64_t seed) {
  std::vector<SimCell> cells;
  for (double mu1 : {0.0, 1.0}) {
    for (int n2 : {10, 30}) {
      for (double lambda : {0.0, 0.5, 1.0}) {
        SimCell c;
        c.mu1 = mu1;
        c.mu2 = 0.0;
        c.sigma = 1.0;
        c.n1 = 10;
        c.n2 = n2;
        c.lambda = lambda;
        c.q = 2.0;
        c.reps = reps;
        c.seed = seed;
        c.penalty_scale = kStudyPenaltyScale;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

void write_sim_rows_csv(std::ostream& out, std::span<const SimCell> cells,
                        std::span<const SimRow> rows) {
  if (cells.size() != rows.size()) throw DimensionError("cells and rows differ in length");
  std::string s = "beta_true,n1,n2,lambda,mean_beta_hat,mse,power,n_nonconverged\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    append_number(s, cells[k].beta_true());
    s += ',' + std::to_string(cells[k].n1) + ',' + std::to_string(cells[k].n2) + ',';
    append_number(s, cells[k].lambda);
    s += ',';
    append_number(s, rows[k].mean_beta_hat);
    s += ',';
    append_number(s, rows[k].mse_beta_hat);
    s += ',';
    append_number(s, rows[k].power);
    s += ',' + std::to_string(rows[k].n_nonconverged) + '\n';
  }
  out << s;
}

}  // namespace drm
