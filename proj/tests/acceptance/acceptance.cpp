// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include "drm/asymptotics.hpp"
#include "drm/chisq.hpp"
#include "drm/errors.hpp"
#include "drm/inference.hpp"
#include "drm/likelihood.hpp"
#include "drm/montecarlo.hpp"
#include "drm/solver.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace drm;

namespace {

constexpr std::uint64_t kSeed = 20080601;

struct TargetRow {
  double beta_true;
  int n1, n2;
  double lambda;
  double mean, mse, power;
};

constexpr std::array<TargetRow, 12> kStudyTable{{
    {0, 10, 10, 0.0, 0.0193, 0.3488, 0.021},
    {0, 10, 10, 0.5, 0.0089, 0.2301, 0.043},
    {0, 10, 10, 1.0, -0.0181, 0.1821, 0.050},
    {0, 10, 30, 0.0, -0.0189, 0.1728, 0.038},
    {0, 10, 30, 0.5, 0.0070, 0.1540, 0.057},
    {0, 10, 30, 1.0, 0.0027, 0.1138, 0.045},
    {1, 10, 10, 0.0, 1.4123, 9.7126, 0.402},
    {1, 10, 10, 0.5, 1.0023, 0.2486, 0.530},
    {1, 10, 10, 1.0, 0.8525, 0.1718, 0.550},
    {1, 10, 30, 0.0, 1.1321, 0.3999, 0.707},
    {1, 10, 30, 0.5, 1.0122, 0.1746, 0.750},
    {1, 10, 30, 1.0, 0.8978, 0.1450, 0.749},
}};

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::vector<SimRow> run_table(const std::vector<SimCell>& cells) {
  std::vector<SimRow> rows;
  for (const auto& c : cells) rows.push_back(run_table_cell(c));
  return rows;
}

bool criterion1(const std::vector<SimCell>& cells, const std::vector<SimRow>& rows) {
  bool ok = true;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& p = kStudyTable[k];
    const auto& r = rows[k];
    const bool exempt = p.beta_true == 1.0 && p.n2 == 10 && p.lambda == 0.0;
    bool cell_ok;
    std::string note;
    if (exempt) {
      const double mse1 = rows[k + 2].mse_beta_hat;
      cell_ok = r.mse_beta_hat > 5 * mse1 && r.n_nonconverged > 0;
      note = "MSE > 5 * MSE(lambda=1) = " + std::to_string(5 * mse1) + " and n_nonconverged > 0";
    } else {
      const bool m = std::abs(r.mean_beta_hat - p.mean) <= 0.1;
      const bool s = std::abs(r.mse_beta_hat - p.mse) <= 0.2 * p.mse;
      const bool w = std::abs(r.power - p.power) <= 0.03;
      cell_ok = m && s && w;
      note = std::string(m ? "" : " mean") + (s ? "" : " mse") + (w ? "" : " power");
      note = note.empty() ? "ok" : "off:" + note;
    }
    std::printf(
        "  %s beta=%g n=%d/%d lambda=%.1f  mean %.4f (target %.4f)  mse %.4f (%.4f)  power %.3f "
        "(%.3f)  nonconv %d  [%s]\n",
        cell_ok ? "ok  " : "MISS", p.beta_true, p.n1, p.n2, p.lambda, r.mean_beta_hat, p.mean,
        r.mse_beta_hat, p.mse, r.power, p.power, r.n_nonconverged, note.c_str());
    ok = ok && cell_ok;
  }
  return ok;
}

bool criterion2(const std::vector<SimRow>& rows) {
  bool ok = true;
  for (std::size_t k : {1, 2, 4, 5}) {
    const double size = rows[k].power;
    std::printf("  n=%d/%d lambda=%.1f size %.3f\n", kStudyTable[k].n1, kStudyTable[k].n2,
                kStudyTable[k].lambda, size);
    ok = ok && size >= 0.03 && size <= 0.07;
  }
  return ok;
}

double ks_to_chisq1(std::vector<double> w) {
  std::sort(w.begin(), w.end());
  const double m = static_cast<double>(w.size());
  double d = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double f = chi_square_cdf(w[i], 1);
    d = std::max({d, (i + 1) / m - f, f - i / m});
  }
  return d;
}

SimCell study_cell(double mu1, int n1, int n2, double lambda, int reps) {
  SimCell c;
  c.mu1 = mu1;
  c.n1 = n1;
  c.n2 = n2;
  c.lambda = lambda;
  c.reps = reps;
  c.seed = kSeed;
  c.penalty_scale = kStudyPenaltyScale;
  return c;
}

bool criterion3() {
  const auto w = null_wald_sample(study_cell(0.0, 10, 10, 1.0, 1000));
  const double ks = ks_to_chisq1(w);
  std::printf("  KS distance %.4f (bound 0.06), %zu statistics\n", ks, w.size());
  return w.size() == 1000 && ks < 0.06;
}

bool criterion4() {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.25 * k);
  const auto curve = mse_efficiency_curve(study_cell(1.0, 20, 20, 0.0, 1000), grid);
  std::size_t best = 0;
  double max_e = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (curve[k].mse < curve[best].mse) best = k;
    max_e = std::max(max_e, curve[k].efficiency);
  }
  std::printf("  argmin lambda %.2f (mse %.4f), mse(0) %.4f, mse(5) %.4f, max efficiency %.4f\n",
              curve[best].lambda, curve[best].mse, curve.front().mse, curve.back().mse, max_e);
  return best > 0 && best + 1 < curve.size() && max_e <= 1.02;
}

bool criterion5() {
  const auto pm = population_matrices(DistSpec::lognormal(0.0, 1.0), Theta::zero(1), 1.0,
                                      HTransform::log());
  const Eigen::MatrixXd Si = pm.S.inverse();
  const double sigma22 = (Si * pm.V * Si)(1, 1);
  const double errA = (pm.A - 0.5 * Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>();
  const double errV = std::abs(pm.V(1, 1) - 0.25);
  const double errS = std::abs(sigma22 - 4.0);
  std::printf("  |A - I/2| %.2e  |V22 - 1/4| %.2e  |Sigma22 - 4| %.2e\n", errA, errV, errS);
  return errA <= 1e-8 && errV <= 1e-8 && errS <= 1e-8;
}

bool criterion6() {
  SimCell c;
  c.n1 = 200;
  c.n2 = 200;
  c.lambda = 0.0;
  c.reps = 2000;
  c.seed = kSeed;
  const double z75 = 0.6744897501960817;
  const std::vector<double> pts{std::exp(-z75), 1.0, std::exp(z75)};
  const auto mc = g2_scaled_variance(c, pts);
  const auto dist = DistSpec::lognormal(0.0, 1.0);
  bool ok = true;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double th = g2_process_cov(pts[k], pts[k], dist, Theta::zero(1), 1.0,
                                     HTransform::log());
    const double rel = mc[k] / th - 1.0;
    std::printf("  t=%.4f  MC %.5f  limit %.5f  rel %+.3f\n", pts[k], mc[k], th, rel);
    ok = ok && std::abs(rel) <= 0.15;
  }
  return ok;
}

DesignData random_design(std::mt19937_64& gen, int n1, int n2, int d, double shift) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd t1(n1, d), t2(n2, d);
  for (int i = 0; i < n1; ++i)
    for (int k = 0; k < d; ++k) t1(i, k) = z(gen) + shift;
  for (int i = 0; i < n2; ++i)
    for (int k = 0; k < d; ++k) t2(i, k) = z(gen);
  return make_design(t1, t2);
}

bool criterion7() {
  std::mt19937_64 gen(kSeed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);

  double fd_worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = random_design(gen, 1 + trial % 6, 1 + trial % 7, 1 + trial % 3, 0.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.dim()) + 1);
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = u(gen);
    const Eigen::VectorXd g = score(d, Theta::from_vector(v));
    const Eigen::MatrixXd H = hessian(d, Theta::from_vector(v));
    const double h = 1e-5;
    Eigen::VectorXd gfd(v.size());
    Eigen::MatrixXd Hfd(v.size(), v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      Eigen::VectorXd up = v, dn = v;
      up[k] += h;
      dn[k] -= h;
      gfd[k] = (empirical_loglik(d, Theta::from_vector(up)) -
                empirical_loglik(d, Theta::from_vector(dn))) / (2 * h);
      Hfd.col(k) = (score(d, Theta::from_vector(up)) - score(d, Theta::from_vector(dn))) / (2 * h);
    }
    fd_worst = std::max(fd_worst, (g - gfd).lpNorm<Eigen::Infinity>() /
                                      std::max(1.0, g.lpNorm<Eigen::Infinity>()));
    fd_worst = std::max(fd_worst, (H - Hfd).lpNorm<Eigen::Infinity>() /
                                      std::max(1.0, H.lpNorm<Eigen::Infinity>()));
  }

  double jump_worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = random_design(gen, 2 + trial % 15, 2 + trial % 11, 1 + trial % 3, 0.6);
    const auto f = fit(d, {2.0, 0.1 + 0.01 * trial});
    if (!f.converged) continue;
    const auto p = jump_weights(d, f.theta).p;
    const Eigen::VectorXd e = linear_predictor(d, f.theta).array().exp();
    jump_worst = std::max({jump_worst, std::abs(p.sum() - 1.0), std::abs(p.dot(e) - 1.0)});
  }

  double plugin_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_design(gen, 2 + trial % 9, 1 + trial % 12, 1 + trial % 3, 0.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.dim()) + 1);
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = u(gen);
    const auto th = Theta::from_vector(v);
    const Eigen::MatrixXd diff = d.rho1 / (1 + d.rho1) * estimate_A_V(d, th).first +
                                 hessian(d, th) / double(d.n());
    plugin_worst = std::max(plugin_worst, diff.lpNorm<Eigen::Infinity>());
  }

  double grid_worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto d = random_design(gen, 6 + trial, 8, 1, 0.5);
    const PenaltySpec spec{2.0, trial % 2 ? 0.0 : 1.0};
    if (spec.lambda == 0.0 && detect_separation(d) != SeparationKind::none) continue;
    const auto f = fit(d, spec);
    const double ca = std::abs(f.theta.alpha) + 3, cb = std::abs(f.theta.beta[0]) + 3;
    const auto g = grid_oracle_refined(d, spec, {{-ca, ca}, {-cb, cb}}, 40, 10);
    grid_worst = std::max(grid_worst, (g.to_vector() - f.theta.to_vector()).lpNorm<Eigen::Infinity>());
  }

  bool shrink_ok = true;
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_design(gen, 10, 8 + trial % 5, 1 + trial % 3, 0.8);
    double prev = INFINITY;
    for (double lambda = 0.0; lambda <= 8.0; lambda += 0.5) {
      FitResult f;
      try {
        f = fit(d, {2.0, lambda});
      } catch (const NonexistenceError&) {
        continue;
      }
      const double norm = f.theta.beta.norm();
      shrink_ok = shrink_ok && norm <= prev + 1e-10;
      prev = norm;
    }
  }

  const auto c = study_cell(1.0, 10, 10, 0.5, 300);
  const auto a = run_table_cell(c, {1});
  const auto b = run_table_cell(c, {4});
  const std::vector<double> grid{0.0, 1.0};
  const auto ca = mse_efficiency_curve(c, grid, {1});
  const auto cb = mse_efficiency_curve(c, grid, {3});
  const bool det_ok = a.mean_beta_hat == b.mean_beta_hat && a.mse_beta_hat == b.mse_beta_hat &&
                      a.power == b.power && ca[1].mse == cb[1].mse &&
                      null_wald_sample(study_cell(0.0, 10, 10, 1.0, 200), {1}) ==
                          null_wald_sample(study_cell(0.0, 10, 10, 1.0, 200), {2});

  std::printf("  finite differences: worst relative error %.2e (1e-5)\n", fd_worst);
  std::printf("  jump weights: worst |sum p - 1|, |sum p e - 1| = %.2e (1e-10)\n", jump_worst);
  std::printf("  plug-in identity: worst error %.2e (1e-10)\n", plugin_worst);
  std::printf("  grid oracle vs fit: worst coordinate gap %.2e (1e-3)\n", grid_worst);
  std::printf("  shrinkage monotone: %s\n", shrink_ok ? "yes" : "no");
  std::printf("  determinism across thread counts: %s\n", det_ok ? "yes" : "no");
  return fd_worst <= 1e-5 && jump_worst <= 1e-10 && plugin_worst <= 1e-10 && grid_worst <= 1e-3 &&
         shrink_ok && det_ok;
}

}  // namespace

int main() {
  const auto cells = table1_cells(1000, kSeed);
  const auto rows = run_table(cells);
  report(1, criterion1(cells, rows),
         "study table reproduction (mean +-0.1, MSE +-20%, power +-0.03; separated cell rule)");
  report(2, criterion2(rows), "null size at lambda in {0.5, 1.0} within [0.03, 0.07]");
  report(3, criterion3(), "KS distance of 1000 null W to chi-square(1) below 0.06");
  report(4, criterion4(), "MSE curve has an interior minimum and efficiency <= 1.02");
  report(5, criterion5(), "population A, V22, Sigma22 for lognormal(0,1) to 1e-8");
  report(6, criterion6(), "MC variance of sqrt(n)(G2_hat - G2) within 15% of the limit");
  report(7, criterion7(), "property suites");
  std::printf("%d of 7 criteria failed\n", failures);
  return failures;
}
