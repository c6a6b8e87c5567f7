#include "drm/chisq.hpp"
#include "drm/errors.hpp"
#include "drm/inference.hpp"
#include "drm/montecarlo.hpp"
#include "drm/solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace drm;

namespace {

SimCell cell(double mu1, int n1, int n2, double lambda, int reps) {
  SimCell c;
  c.mu1 = mu1;
  c.n1 = n1;
  c.n2 = n2;
  c.lambda = lambda;
  c.reps = reps;
  c.seed = 97;
  c.penalty_scale = kStudyPenaltyScale;
  return c;
}

}  // namespace

TEST_CASE("lognormal sampler") {
  RngStream a(5, 1), b(5, 1), c(5, 1);
  const auto x = sample_lognormal(50, 0.0, 1.0, a);
  const auto y = sample_lognormal(50, 0.0, 1.0, b);
  const auto z = sample_lognormal(50, 1.0, 1.0, c);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i] == y[i]);
    CHECK(x[i][0] > 0.0);
    CHECK(z[i][0] == doctest::Approx(std::exp(1.0) * x[i][0]).epsilon(1e-14));
  }
  RngStream d(11, 0);
  CHECK_THROWS_AS(sample_lognormal(5, 0.0, 0.0, d), InvalidArgument);
  CHECK_THROWS_AS(sample_lognormal(0, 0.0, 1.0, d), InvalidArgument);
}

TEST_CASE("lognormal sampler moments") {
  RngStream s(123, 0);
  const int n = 100000;
  const auto x = sample_lognormal(n, 0.0, 1.0, s);
  double m = 0.0, v = 0.0;
  for (const auto& o : x) m += std::log(o[0]);
  m /= n;
  for (const auto& o : x) v += (std::log(o[0]) - m) * (std::log(o[0]) - m);
  v /= n - 1;
  CHECK(std::abs(m) < 4 / std::sqrt(double(n)));
  CHECK(v >= 0.97);
  CHECK(v <= 1.03);
}

TEST_CASE("single replication reduces to one fit") {
  for (double mu1 : {0.0, 1.0}) {
    for (double lambda : {0.5, 1.0}) {
      auto c = cell(mu1, 10, 12, lambda, 1);
      const auto row = run_table_cell(c);
      const auto design = apply_h(draw_replication(c, 0), HTransform::log());
      const PenaltySpec spec{2.0, kStudyPenaltyScale * lambda};
      const auto f = fit(design, spec);
      const auto cov = sandwich_sigma(design, f.theta, spec);
      const double W = wald_test(f.theta.beta, cov.Sigma_hat, design.n()).W;
      const double err = f.theta.beta[0] - c.beta_true();
      CHECK(row.reps_used == 1);
      CHECK(row.mean_beta_hat == f.theta.beta[0]);
      CHECK(row.mse_beta_hat == doctest::Approx(err * err).epsilon(1e-14));
      CHECK(row.power == (W > chi_square_quantile(0.95, 1) ? 1.0 : 0.0));
      CHECK(row.n_nonconverged == 0);
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  const auto c = cell(1.0, 10, 10, 0.0, 200);
  const auto a = run_table_cell(c, {1});
  const auto b = run_table_cell(c, {4});
  const auto again = run_table_cell(c, {3});
  CHECK(a.mean_beta_hat == b.mean_beta_hat);
  CHECK(a.mse_beta_hat == b.mse_beta_hat);
  CHECK(a.power == b.power);
  CHECK(a.n_nonconverged == b.n_nonconverged);
  CHECK(again.mse_beta_hat == a.mse_beta_hat);

  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto ca = mse_efficiency_curve(cell(1.0, 20, 20, 0.0, 100), grid, {1});
  const auto cb = mse_efficiency_curve(cell(1.0, 20, 20, 0.0, 100), grid, {4});
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(ca[k].mse == cb[k].mse);

  const auto wa = null_wald_sample(cell(0.0, 10, 10, 1.0, 100), {1});
  const auto wb = null_wald_sample(cell(0.0, 10, 10, 1.0, 100), {2});
  CHECK(wa == wb);
}

TEST_CASE("separated replications at lambda = 0 are counted") {
  // n = 3 per group at beta = 1 separates often
  const auto row = run_table_cell(cell(1.0, 3, 3, 0.0, 200));
  CHECK(row.n_nonconverged > 0);
  CHECK(row.reps_used == 200);
  CHECK(std::isfinite(row.mse_beta_hat));
}

TEST_CASE("curve") {
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0, 2.0};
  const auto curve = mse_efficiency_curve(cell(1.0, 20, 20, 0.0, 200), grid);
  REQUIRE(curve.size() == grid.size());
  CHECK(curve[0].lambda == 0.0);
  CHECK(curve[0].efficiency == 1.0);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    CHECK(curve[k].lambda == grid[k]);
    CHECK(curve[k].efficiency == doctest::Approx(curve[k].mse / curve[0].mse));
  }
  // common random numbers: the curve point equals a separate table run
  auto c = cell(1.0, 20, 20, 1.0, 200);
  CHECK(run_table_cell(c).mse_beta_hat == doctest::Approx(curve[3].mse).epsilon(1e-14));

  const std::vector<double> no_zero{0.5, 1.0};
  CHECK_THROWS_AS(mse_efficiency_curve(cell(1.0, 5, 5, 0.0, 2), no_zero), InvalidArgument);
  const std::vector<double> unsorted{0.0, 1.0, 0.5};
  CHECK_THROWS_AS(mse_efficiency_curve(cell(1.0, 5, 5, 0.0, 2), unsorted), InvalidArgument);
}

TEST_CASE("null Wald sample") {
  const auto w = null_wald_sample(cell(0.0, 10, 10, 1.0, 300));
  CHECK(w.size() == 300);
  for (double x : w) CHECK(x >= 0.0);
  CHECK_THROWS_AS(null_wald_sample(cell(1.0, 10, 10, 1.0, 10)), InvalidArgument);
}

TEST_CASE("MSE at lambda = 1 is below lambda = 0 in every study configuration") {
  const auto cells = table1_cells(1000, 20080601);
  REQUIRE(cells.size() == 12);
  for (std::size_t k = 0; k < cells.size(); k += 3) {
    REQUIRE(cells[k].lambda == 0.0);
    REQUIRE(cells[k + 2].lambda == 1.0);
    CHECK(run_table_cell(cells[k + 2]).mse_beta_hat < run_table_cell(cells[k]).mse_beta_hat);
  }
}

TEST_CASE("study cells and csv") {
  const auto cells = table1_cells(10, 1);
  CHECK(cells[0].beta_true() == 0.0);
  CHECK(cells[6].beta_true() == 1.0);
  CHECK(cells[3].n2 == 30);
  for (const auto& c : cells) {
    CHECK(c.penalty_scale == kStudyPenaltyScale);
    CHECK(c.reps == 10);
    CHECK(c.q == 2.0);
  }
  std::vector<SimRow> rows(cells.size());
  std::ostringstream out;
  write_sim_rows_csv(out, cells, rows);
  const std::string text = out.str();
  CHECK(text.rfind("beta_true,n1,n2,lambda,mean_beta_hat,mse,power,n_nonconverged\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 13);
  CHECK_THROWS_AS(write_sim_rows_csv(out, cells, std::span<const SimRow>(rows).first(3)),
                  DimensionError);
}

TEST_CASE("cell validation") {
  auto c = cell(0.0, 10, 10, 1.0, 10);
  c.sigma = 0.0;
  CHECK_THROWS_AS(run_table_cell(c), InvalidArgument);
  c = cell(0.0, 0, 10, 1.0, 10);
  CHECK_THROWS_AS(run_table_cell(c), InvalidArgument);
  c = cell(0.0, 10, 10, -1.0, 10);
  CHECK_THROWS_AS(run_table_cell(c), InvalidArgument);
  c = cell(0.0, 10, 10, 1.0, 0);
  CHECK_THROWS_AS(run_table_cell(c), InvalidArgument);
  c = cell(0.0, 10, 10, 1.0, 10);
  c.q = 1.0;
  CHECK_THROWS_AS(run_table_cell(c), UnsupportedPenaltyError);
  c.q = 2.0;
  c.alpha_level = 1.0;
  CHECK_THROWS_AS(run_table_cell(c), InvalidArgument);
}

TEST_CASE("scaled G2 variance is positive and bounded") {
  auto c = cell(0.0, 50, 50, 0.0, 200);
  const std::vector<double> pts{0.5, 1.0, 2.0};
  const auto v = g2_scaled_variance(c, pts);
  REQUIRE(v.size() == 3);
  for (double x : v) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  const std::vector<double> bad{2.0, 1.0};
  CHECK_THROWS_AS(g2_scaled_variance(c, bad), InvalidArgument);
}
