#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lssa/ising.hpp"
#include "lssa/rng.hpp"

// Portfolio-optimization front end: price series, return/covariance
// estimation, the cardinality-constrained mean-variance QUBO, portfolio
// metrics, simulated stock data and random-portfolio baselines.

namespace lssa {

struct PriceSeries {
  std::size_t n_assets = 0;
  std::size_t n_periods = 0;
  // Row-major n_assets x n_periods.
  Eigen::MatrixXd prices;
  std::vector<std::string> labels;

  void validate() const {
    if (n_assets == 0 || n_periods < 2)
      throw std::invalid_argument("PriceSeries: need >= 1 asset and >= 2 periods");
    if (prices.rows() != static_cast<Eigen::Index>(n_assets) ||
        prices.cols() != static_cast<Eigen::Index>(n_periods))
      throw std::invalid_argument("PriceSeries: matrix shape mismatch");
    for (Eigen::Index a = 0; a < prices.rows(); ++a)
      for (Eigen::Index t = 0; t < prices.cols(); ++t)
        if (!(prices(a, t) > 0.0))
          throw std::invalid_argument("PriceSeries: non-positive price at asset " +
                                      std::to_string(a) + ", period " + std::to_string(t));
  }
};

// H(w) = -mu^T w + (gamma/2) w^T Sigma w + rho (1^T w - K)^2 over binary w.
struct PortfolioSpec {
  double gamma = 1.0;
  double rho = 0.0;
  std::size_t budget_k = 1;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  std::size_t n_assets() const { return static_cast<std::size_t>(mu.size()); }

  void validate() const {
    if (mu.size() == 0 || sigma.rows() != mu.size() || sigma.cols() != mu.size())
      throw std::invalid_argument("PortfolioSpec: mu/sigma dimension mismatch");
    if (gamma < 0.0 || rho < 0.0)
      throw std::invalid_argument("PortfolioSpec: gamma and rho must be non-negative");
    if (budget_k == 0 || budget_k > n_assets())
      throw std::invalid_argument("PortfolioSpec: require 0 < K <= n_assets");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("PortfolioSpec: sigma is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw std::invalid_argument("PortfolioSpec: sigma is not positive semidefinite");
  }

  double hamiltonian(const std::vector<std::uint8_t>& w) const {
    if (w.size() != n_assets())
      throw std::invalid_argument("PortfolioSpec: assignment length mismatch");
    Eigen::VectorXd wv(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) wv[k] = w[k] ? 1.0 : 0.0;
    const double card = wv.sum() - static_cast<double>(budget_k);
    return -mu.dot(wv) + 0.5 * gamma * wv.dot(sigma * wv) + rho * card * card;
  }
};

// Per-period simple returns r_t = p_t / p_{t-1} - 1; mu is the mean return
// per asset and sigma the sample covariance (divisor n_returns - 1). With a
// single return observation sigma is the zero matrix.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> estimate_mu_sigma(
    const PriceSeries& series) {
  series.validate();
  const auto n = static_cast<Eigen::Index>(series.n_assets);
  const auto t_ret = static_cast<Eigen::Index>(series.n_periods) - 1;
  Eigen::MatrixXd returns(n, t_ret);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index t = 0; t < t_ret; ++t)
      returns(a, t) = series.prices(a, t + 1) / series.prices(a, t) - 1.0;
  const Eigen::VectorXd mu = returns.rowwise().mean();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
  if (t_ret > 1) {
    const Eigen::MatrixXd centered = returns.colwise() - mu;
    sigma = centered * centered.transpose() / static_cast<double>(t_ret - 1);
  }
  return {mu, sigma};
}

// Expands the portfolio Hamiltonian into QUBO form using w_i^2 = w_i:
//   linear_i    = -mu_i + (gamma/2) Sigma_ii + rho (1 - 2K)
//   quad_(i<j)  = gamma Sigma_ij + 2 rho
//   offset      = rho K^2
inline QuboProblem build_portfolio_qubo(const PortfolioSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_assets();
  std::vector<double> linear(n);
  const double k = static_cast<double>(spec.budget_k);
  for (std::size_t i = 0; i < n; ++i)
    linear[i] = -spec.mu[static_cast<Eigen::Index>(i)] +
                0.5 * spec.gamma * spec.sigma(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(i)) +
                spec.rho * (1.0 - 2.0 * k);
  std::vector<CouplingTerm> quad;
  quad.reserve(n * (n - 1) / 2);
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double q = spec.gamma * spec.sigma(i, j) + 2.0 * spec.rho;
      if (q != 0.0) quad.push_back({i, j, q});
    }
  return QuboProblem(n, std::move(quad), std::move(linear), spec.rho * k * k);
}

inline double volatility(const std::vector<std::uint8_t>& w, const Eigen::MatrixXd& sigma) {
  if (static_cast<Eigen::Index>(w.size()) != sigma.rows())
    throw std::invalid_argument("volatility: dimension mismatch");
  Eigen::VectorXd wv(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) wv[k] = w[k] ? 1.0 : 0.0;
  return std::sqrt(std::max(0.0, wv.dot(sigma * wv)));
}

inline double sharpe_ratio(const std::vector<std::uint8_t>& w, const Eigen::VectorXd& mu,
                           const Eigen::MatrixXd& sigma) {
  const double vol = volatility(w, sigma);
  if (vol <= 0.0) throw std::domain_error("sharpe_ratio: zero volatility");
  double ret = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k]) ret += mu[static_cast<Eigen::Index>(k)];
  return ret / vol;
}

// Geometric random walk: p_0 = 100, log-return per step normal with
// per-asset drift uniform in [-0.002, 0.004] and per-asset volatility
// uniform in [0.005, 0.03].
inline PriceSeries simulate_stock_data(std::size_t n_assets, std::size_t n_periods,
                                       std::uint64_t seed) {
  if (n_assets == 0 || n_periods < 2)
    throw std::invalid_argument("simulate_stock_data: need >= 1 asset and >= 2 periods");
  Rng rng(seed);
  PriceSeries series;
  series.n_assets = n_assets;
  series.n_periods = n_periods;
  series.prices.resize(static_cast<Eigen::Index>(n_assets),
                       static_cast<Eigen::Index>(n_periods));
  series.labels.resize(n_assets);
  for (std::size_t a = 0; a < n_assets; ++a) {
    series.labels[a] = "asset" + std::to_string(a);
    const double drift = rng.uniform(-0.002, 0.004);
    const double vol = rng.uniform(0.005, 0.03);
    double log_price = std::log(100.0);
    series.prices(static_cast<Eigen::Index>(a), 0) = 100.0;
    for (std::size_t t = 1; t < n_periods; ++t) {
      log_price += drift + vol * rng.normal();
      series.prices(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) =
          std::exp(log_price);
    }
  }
  return series;
}

struct PortfolioSample {
  double expected_return = 0.0;
  double volatility = 0.0;
  double sharpe = std::numeric_limits<double>::quiet_NaN();  // NaN when volatility is 0
};

// Uniformly random portfolios with exactly K assets selected.
inline std::vector<PortfolioSample> random_portfolio_baseline(const PortfolioSpec& spec,
                                                              std::size_t n_samples,
                                                              std::uint64_t seed) {
  spec.validate();
  if (n_samples == 0)
    throw std::invalid_argument("random_portfolio_baseline: n_samples must be positive");
  const std::size_t n = spec.n_assets();
  Rng rng(seed);
  std::vector<std::uint32_t> order(n);
  std::vector<PortfolioSample> samples;
  samples.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::iota(order.begin(), order.end(), 0u);
    // Partial Fisher-Yates: the first K entries are a uniform K-subset.
    for (std::size_t k = 0; k < spec.budget_k; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.uniform_int(n - k));
      std::swap(order[k], order[j]);
    }
    std::vector<std::uint8_t> w(n, 0);
    for (std::size_t k = 0; k < spec.budget_k; ++k) w[order[k]] = 1;
    PortfolioSample sample;
    for (std::size_t k = 0; k < n; ++k)
      if (w[k]) sample.expected_return += spec.mu[static_cast<Eigen::Index>(k)];
    sample.volatility = volatility(w, spec.sigma);
    if (sample.volatility > 0.0)
      sample.sharpe = sample.expected_return / sample.volatility;
    samples.push_back(sample);
  }
  return samples;
}

// CSV price format: one row per asset, first column the asset label, then
// the prices in chronological order. No header row.
inline PriceSeries load_prices_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_prices_csv: cannot open '" + path + "'");
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ','))
      throw std::runtime_error("load_prices_csv: row " + std::to_string(line_no) +
                               ": missing label");
    labels.push_back(cell);
    std::vector<double> prices;
    std::size_t col = 1;
    while (std::getline(ss, cell, ',')) {
      ++col;
      double value = 0.0;
      try {
        std::size_t pos = 0;
        value = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::runtime_error("load_prices_csv: row " + std::to_string(line_no) +
                                 ", column " + std::to_string(col) + ": '" + cell +
                                 "' is not a number");
      }
      if (!(value > 0.0))
        throw std::runtime_error("load_prices_csv: row " + std::to_string(line_no) +
                                 ", column " + std::to_string(col) +
                                 ": price must be positive");
      prices.push_back(value);
    }
    if (!rows.empty() && prices.size() != rows.front().size())
      throw std::runtime_error("load_prices_csv: row " + std::to_string(line_no) + " has " +
                               std::to_string(prices.size()) + " prices, expected " +
                               std::to_string(rows.front().size()));
    rows.push_back(std::move(prices));
  }
  if (rows.empty()) throw std::runtime_error("load_prices_csv: empty file");
  PriceSeries series;
  series.n_assets = rows.size();
  series.n_periods = rows.front().size();
  series.labels = std::move(labels);
  series.prices.resize(static_cast<Eigen::Index>(series.n_assets),
                       static_cast<Eigen::Index>(series.n_periods));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t t = 0; t < rows[a].size(); ++t)
      series.prices(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = rows[a][t];
  series.validate();
  return series;
}

inline void write_prices_csv(const PriceSeries& series, const std::string& path) {
  series.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_prices_csv: cannot open '" + path + "'");
  out.precision(17);
  for (std::size_t a = 0; a < series.n_assets; ++a) {
    out << (a < series.labels.size() ? series.labels[a] : "asset" + std::to_string(a));
    for (std::size_t t = 0; t < series.n_periods; ++t)
      out << ',' << series.prices(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t));
    out << '\n';
  }
}

// Spec with the parameter choices used throughout the experiments:
// gamma = 1, rho = 10 * n_assets, K = n_assets / 2 (rounded down).
inline PortfolioSpec portfolio_spec_from_series(const PriceSeries& series,
                                                double gamma = 1.0,
                                                std::optional<double> rho = std::nullopt,
                                                std::optional<std::size_t> budget =
                                                    std::nullopt) {
  auto [mu, sigma] = estimate_mu_sigma(series);
  PortfolioSpec spec;
  spec.gamma = gamma;
  spec.rho = rho ? *rho : 10.0 * static_cast<double>(series.n_assets);
  spec.budget_k = budget ? *budget : std::max<std::size_t>(1, series.n_assets / 2);
  spec.mu = std::move(mu);
  spec.sigma = std::move(sigma);
  spec.validate();
  return spec;
}

}  // namespace lssa
