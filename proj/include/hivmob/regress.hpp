#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hivmob/matrix.hpp"
#include "hivmob/model.hpp"

namespace hivmob {

enum class Method { ridge, svr };
/// per_round: hyperparameter re-selected by LOO before every elimination; once: chosen on the full set.
enum class Reselect { per_round, once };
/// nested: selection and RFE inside every LOO training fold; global: once on all rows.
enum class Protocol { nested, global };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);
std::string_view to_string(Reselect r);
std::optional<Reselect> parse_reselect(std::string_view s);
std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view s);

/// count log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);
/// ridge: lambda in 1e-4..1e4; svr: C in 1e-3..1e3; 9 points each.
std::vector<double> default_grid(Method m);

struct ModelSpec {
  Method method = Method::svr;
  std::vector<double> grid;  // empty means default_grid(method)
  double epsilon = 0.1;
  std::optional<std::size_t> rfe_target;
  Reselect reselect = Reselect::per_round;
  Protocol protocol = Protocol::nested;
  bool normalize = true;  // divide every column by its mean before evaluation

  std::span<const double> effective_grid() const;
  /// Throws ConfigError for an empty or non-positive grid or negative epsilon.
  void check() const;
};

/// Columns divided by their means; zero-mean columns unchanged.
Matrix normalize_columns(const Matrix& x);

LinearFit fit_linear(Method m, const Matrix& x, std::span<const double> y, double hyper, double epsilon);

/// Leave-one-out mean squared error of one hyperparameter.
double loo_mse(Method m, const Matrix& x, std::span<const double> y, double hyper, double epsilon);

/// Grid value with the lowest LOO MSE; near-ties (1e-12 relative) go to the
/// strongest regularisation (largest lambda, smallest C).
double loo_select(const ModelSpec& spec, const Matrix& x, std::span<const double> y);

struct RfeResult {
  std::vector<std::size_t> selected;           // surviving columns, ascending
  std::vector<std::size_t> elimination_order;  // dropped columns, first dropped first
  double hyper = 0.0;                          // hyperparameter of the final round
};

/// Drops the smallest |coefficient| until `target` columns remain; ties drop the higher index.
RfeResult rfe(const ModelSpec& spec, const Matrix& x, std::span<const double> y, std::size_t target);

struct FittedModel {
  Method method = Method::svr;
  std::vector<std::size_t> features;  // columns of the matrix it was fitted on
  LinearFit fit;
  double hyper = 0.0;
  std::vector<std::size_t> elimination_order;

  double predict(std::span<const double> row) const;
};

/// RFE (when the spec has a target), LOO hyperparameter selection, final fit. No normalisation.
FittedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y);

struct Metrics {
  double rho = 0.0;
  bool rho_undefined = false;  // zero-variance predictions or target
  double rrmse = 0.0;          // RMSE / mean(actual)
};

/// Pearson (sample normalisation) and mean-relative RMSE.
Metrics compute_metrics(std::span<const double> predicted, std::span<const double> actual);

struct EvaluationReport {
  Method method = Method::svr;
  std::vector<double> predictions;  // LOO, row order
  std::vector<double> actual;
  Metrics metrics;
  bool permuted = false;
  std::optional<std::uint64_t> seed;
  std::vector<FittedModel> folds;  // model used to predict row i
};

/// Requires at least three rows.
EvaluationReport loo_evaluate(const ModelSpec& spec, const Matrix& x, std::span<const double> y);

/// Every column shuffled independently per seed (streams keyed by seed and column).
Matrix permute_columns(const Matrix& x, std::uint64_t seed);

std::vector<EvaluationReport> permutation_baseline(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                                                   std::span<const std::uint64_t> seeds);

/// Index of the report with the highest rho.
std::size_t best_random(std::span<const EvaluationReport> reports);

struct StackResult {
  std::vector<double> weights;
  std::vector<double> predictions;
  Metrics metrics;
  bool degenerate = false;  // all base predictions zero
};

/// Non-negative least squares of y on the base prediction vectors, no intercept.
/// Identical base vectors share their combined weight equally.
StackResult stack_ensemble(std::span<const std::vector<double>> base, std::span<const double> y);

}  // namespace hivmob
