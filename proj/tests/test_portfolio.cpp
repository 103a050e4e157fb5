#include "lssa/portfolio.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lssa/solvers.hpp"

namespace {

using namespace lssa;

PriceSeries constant_series(std::size_t n_assets, std::size_t n_periods, double price) {
  PriceSeries s;
  s.n_assets = n_assets;
  s.n_periods = n_periods;
  s.prices = Eigen::MatrixXd::Constant(n_assets, n_periods, price);
  return s;
}

std::vector<std::uint8_t> bits_of(std::uint64_t k, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t b = 0; b < n; ++b) x[b] = (k >> b) & 1;
  return x;
}

TEST(EstimateMuSigma, ConstantPricesGiveZeroes) {
  const auto [mu, sigma] = estimate_mu_sigma(constant_series(3, 6, 50.0));
  EXPECT_NEAR(mu.cwiseAbs().maxCoeff(), 0.0, 1e-15);
  EXPECT_NEAR(sigma.cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(EstimateMuSigma, DoublingAssetHasUnitReturnNoVariance) {
  PriceSeries s;
  s.n_assets = 1;
  s.n_periods = 5;
  s.prices.resize(1, 5);
  s.prices << 1.0, 2.0, 4.0, 8.0, 16.0;
  const auto [mu, sigma] = estimate_mu_sigma(s);
  EXPECT_NEAR(mu[0], 1.0, 1e-12);
  EXPECT_NEAR(sigma(0, 0), 0.0, 1e-12);
}

// Independent two-pass covariance oracle over explicitly computed returns.
TEST(EstimateMuSigma, MatchesTwoPassOracle) {
  const PriceSeries s = simulate_stock_data(3, 5, 77);
  const auto [mu, sigma] = estimate_mu_sigma(s);
  const std::size_t t_ret = s.n_periods - 1;
  std::vector<std::vector<double>> r(3, std::vector<double>(t_ret));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t t = 0; t < t_ret; ++t)
      r[a][t] = s.prices(a, t + 1) / s.prices(a, t) - 1.0;
  for (std::size_t a = 0; a < 3; ++a) {
    double mean = 0.0;
    for (double v : r[a]) mean += v;
    mean /= static_cast<double>(t_ret);
    EXPECT_NEAR(mu[a], mean, 1e-14);
    for (std::size_t b = 0; b < 3; ++b) {
      double mean_b = 0.0;
      for (double v : r[b]) mean_b += v;
      mean_b /= static_cast<double>(t_ret);
      double cov = 0.0;
      for (std::size_t t = 0; t < t_ret; ++t) cov += (r[a][t] - mean) * (r[b][t] - mean_b);
      cov /= static_cast<double>(t_ret - 1);
      EXPECT_NEAR(sigma(a, b), cov, 1e-14);
    }
  }
}

TEST(EstimateMuSigma, RejectsNonPositivePrice) {
  PriceSeries s = constant_series(2, 3, 10.0);
  s.prices(1, 2) = 0.0;
  EXPECT_THROW(estimate_mu_sigma(s), std::invalid_argument);
}

TEST(PortfolioQubo, PurePenaltyExpansion) {
  PortfolioSpec spec;
  spec.gamma = 0.0;
  spec.rho = 1.0;
  spec.budget_k = 1;
  spec.mu = Eigen::VectorXd::Zero(2);
  spec.sigma = Eigen::MatrixXd::Zero(2, 2);
  const QuboProblem q = build_portfolio_qubo(spec);
  EXPECT_DOUBLE_EQ(q.linear()[0], -1.0);
  EXPECT_DOUBLE_EQ(q.linear()[1], -1.0);
  ASSERT_EQ(q.quadratic().size(), 1u);
  EXPECT_DOUBLE_EQ(q.quadratic()[0].value, 2.0);
  EXPECT_DOUBLE_EQ(q.offset(), 1.0);
}

TEST(PortfolioQubo, NoRiskNoPenaltyIsPureReturn) {
  PortfolioSpec spec;
  spec.gamma = 0.0;
  spec.rho = 0.0;
  spec.budget_k = 2;
  spec.mu = Eigen::VectorXd::Zero(3);
  spec.mu << 0.1, 0.2, 0.3;
  spec.sigma = Eigen::MatrixXd::Zero(3, 3);
  const QuboProblem q = build_portfolio_qubo(spec);
  EXPECT_TRUE(q.quadratic().empty());
  EXPECT_DOUBLE_EQ(q.linear()[0], -0.1);
  EXPECT_DOUBLE_EQ(q.linear()[1], -0.2);
  EXPECT_DOUBLE_EQ(q.linear()[2], -0.3);
  EXPECT_DOUBLE_EQ(q.offset(), 0.0);
}

TEST(PortfolioQubo, ExhaustiveEquivalenceTwelveAssets) {
  const PriceSeries series = simulate_stock_data(12, 30, 5);
  const PortfolioSpec spec = portfolio_spec_from_series(series);
  const QuboProblem qubo = build_portfolio_qubo(spec);
  const IsingProblem ising = qubo_to_ising(qubo);
  double max_err = 0.0;
  for (std::uint64_t k = 0; k < 4096; ++k) {
    const auto w = bits_of(k, 12);
    const double direct = spec.hamiltonian(w);
    max_err = std::max(max_err, std::abs(qubo.energy(w) - direct));
    const auto z = SpinConfiguration::from_basis_index(k, 12);
    max_err = std::max(max_err, std::abs(ising.energy(z) - direct));
  }
  EXPECT_LT(max_err, 1e-9);
}

TEST(PortfolioQubo, PenaltyDominanceForcesBudget) {
  // With rho = 10 * n the brute-force ground state satisfies 1^T w = K.
  for (std::size_t n : {10u, 14u}) {
    const PriceSeries series = simulate_stock_data(n, 30, 100 + n);
    const PortfolioSpec spec = portfolio_spec_from_series(series);
    const IsingProblem ising = qubo_to_ising(build_portfolio_qubo(spec));
    const SolveOutcome out = brute_force_ground_state(ising);
    std::size_t ones = 0;
    for (auto s : out.config.spins) ones += s > 0;
    EXPECT_EQ(ones, spec.budget_k) << "n = " << n;
  }
}

TEST(Metrics, EmptyPortfolioHasZeroVolatilityAndNoSharpe) {
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd mu = Eigen::VectorXd::Ones(3);
  const std::vector<std::uint8_t> w{0, 0, 0};
  EXPECT_DOUBLE_EQ(volatility(w, sigma), 0.0);
  EXPECT_THROW(sharpe_ratio(w, mu, sigma), std::domain_error);
}

TEST(Metrics, IdentityCovarianceVolatilityIsSqrtK) {
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(5, 5);
  const std::vector<std::uint8_t> w{1, 0, 1, 1, 0};
  EXPECT_NEAR(volatility(w, sigma), std::sqrt(3.0), 1e-12);
}

TEST(Metrics, SharpeMatchesDirectRecomputation) {
  const PriceSeries series = simulate_stock_data(8, 40, 3);
  const PortfolioSpec spec = portfolio_spec_from_series(series);
  const std::vector<std::uint8_t> w{1, 0, 1, 1, 0, 0, 1, 0};
  double ret = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (!w[i]) continue;
    ret += spec.mu[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < 8; ++j)
      if (w[j]) var += spec.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  EXPECT_NEAR(sharpe_ratio(w, spec.mu, spec.sigma), ret / std::sqrt(var), 1e-12);
}

TEST(Metrics, VolatilityInvariantUnderConsistentPermutation) {
  const PriceSeries series = simulate_stock_data(6, 25, 9);
  const PortfolioSpec spec = portfolio_spec_from_series(series);
  const std::vector<std::uint8_t> w{1, 1, 0, 1, 0, 0};
  const std::vector<std::size_t> perm{4, 2, 0, 5, 1, 3};
  std::vector<std::uint8_t> wp(6);
  Eigen::MatrixXd sp(6, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    wp[i] = w[perm[i]];
    for (std::size_t j = 0; j < 6; ++j) sp(i, j) = spec.sigma(perm[i], perm[j]);
  }
  EXPECT_NEAR(volatility(w, spec.sigma), volatility(wp, sp), 1e-12);
}

TEST(SimulatedData, PositiveAndDeterministic) {
  const PriceSeries a = simulate_stock_data(16, 30, 4);
  const PriceSeries b = simulate_stock_data(16, 30, 4);
  a.validate();
  EXPECT_TRUE(a.prices.isApprox(b.prices, 0.0));
  const PriceSeries c = simulate_stock_data(16, 30, 5);
  EXPECT_FALSE(a.prices.isApprox(c.prices, 0.0));
}

TEST(SimulatedData, LogReturnVolatilityWithinConfiguredBand) {
  // Long horizon, so per-asset sample volatility estimates sit well inside a
  // slack band around [0.005, 0.03].
  const PriceSeries s = simulate_stock_data(64, 2000, 11);
  for (std::size_t a = 0; a < s.n_assets; ++a) {
    std::vector<double> lr(s.n_periods - 1);
    for (std::size_t t = 0; t + 1 < s.n_periods; ++t)
      lr[t] = std::log(s.prices(a, t + 1) / s.prices(a, t));
    double mean = 0.0;
    for (double v : lr) mean += v;
    mean /= static_cast<double>(lr.size());
    double var = 0.0;
    for (double v : lr) var += (v - mean) * (v - mean);
    var /= static_cast<double>(lr.size() - 1);
    const double vol = std::sqrt(var);
    EXPECT_GT(vol, 0.005 * 0.8) << "asset " << a;
    EXPECT_LT(vol, 0.03 * 1.2) << "asset " << a;
  }
}

TEST(RandomBaseline, AllOnesWhenBudgetEqualsAssets) {
  PortfolioSpec spec;
  spec.rho = 1.0;
  spec.budget_k = 4;
  spec.mu = Eigen::VectorXd::Ones(4);
  spec.sigma = Eigen::MatrixXd::Identity(4, 4);
  const auto samples = random_portfolio_baseline(spec, 10, 3);
  for (const auto& s : samples) {
    EXPECT_NEAR(s.expected_return, 4.0, 1e-12);
    EXPECT_NEAR(s.volatility, 2.0, 1e-12);
  }
}

TEST(RandomBaseline, EverySampleHasExactlyKAssets) {
  const PriceSeries series = simulate_stock_data(12, 30, 8);
  const PortfolioSpec spec = portfolio_spec_from_series(series);
  // Metrics must be reproducible per seed and respect the cardinality; the
  // return of each sample equals mu restricted to some K-subset, so check
  // against the direct min/max bounds.
  const auto samples = random_portfolio_baseline(spec, 200, 17);
  std::vector<double> sorted_mu(spec.mu.data(), spec.mu.data() + spec.mu.size());
  std::sort(sorted_mu.begin(), sorted_mu.end());
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < spec.budget_k; ++k) {
    lo += sorted_mu[k];
    hi += sorted_mu[sorted_mu.size() - 1 - k];
  }
  for (const auto& s : samples) {
    EXPECT_GE(s.expected_return, lo - 1e-12);
    EXPECT_LE(s.expected_return, hi + 1e-12);
    EXPECT_GT(s.volatility, 0.0);
    EXPECT_FALSE(std::isnan(s.sharpe));
  }
}

TEST(PricesCsv, ParsesWellFormedFile) {
  const std::string path = std::filesystem::temp_directory_path() / "lssa_prices_ok.csv";
  {
    std::ofstream out(path);
    out << "alpha,10.0,11.0,12.5\nbeta,20.0,19.5,21.0\n";
  }
  const PriceSeries s = load_prices_csv(path);
  EXPECT_EQ(s.n_assets, 2u);
  EXPECT_EQ(s.n_periods, 3u);
  EXPECT_EQ(s.labels[0], "alpha");
  EXPECT_DOUBLE_EQ(s.prices(1, 2), 21.0);
  std::remove(path.c_str());
}

TEST(PricesCsv, NamesTheOffendingCell) {
  const std::string path = std::filesystem::temp_directory_path() / "lssa_prices_bad.csv";
  {
    std::ofstream out(path);
    out << "alpha,10.0,11.0\nbeta,20.0,0.0\n";
  }
  try {
    load_prices_csv(path);
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 3"), std::string::npos) << msg;
  }
  std::remove(path.c_str());
}

TEST(PricesCsv, RejectsRaggedAndNonNumericRows) {
  const std::string path = std::filesystem::temp_directory_path() / "lssa_prices_ragged.csv";
  {
    std::ofstream out(path);
    out << "alpha,10.0,11.0\nbeta,20.0\n";
  }
  EXPECT_THROW(load_prices_csv(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "alpha,10.0,abc\n";
  }
  EXPECT_THROW(load_prices_csv(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST(PricesCsv, WriteThenReadRoundTrips) {
  const PriceSeries original = simulate_stock_data(5, 30, 21);
  const std::string path = std::filesystem::temp_directory_path() / "lssa_prices_rt.csv";
  write_prices_csv(original, path);
  const PriceSeries loaded = load_prices_csv(path);
  ASSERT_EQ(loaded.n_assets, original.n_assets);
  ASSERT_EQ(loaded.n_periods, original.n_periods);
  EXPECT_LT((loaded.prices - original.prices).cwiseAbs().maxCoeff(), 1e-9);
  std::remove(path.c_str());
}

TEST(PortfolioSpecType, ValidatesShapeAndSymmetry) {
  PortfolioSpec spec;
  spec.mu = Eigen::VectorXd::Zero(3);
  spec.sigma = Eigen::MatrixXd::Zero(3, 3);
  spec.budget_k = 4;  // > n
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.budget_k = 2;
  spec.sigma(0, 1) = 1e-6;  // asymmetric
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.sigma = Eigen::MatrixXd::Identity(3, 3);
  spec.sigma(0, 1) = spec.sigma(1, 0) = 1e-6;
  EXPECT_NO_THROW(spec.validate());
  spec.sigma = -Eigen::MatrixXd::Identity(3, 3);  // not PSD
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

}  // namespace
