#pragma once

#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "blrm/model.hpp"

namespace blrm {

/// Raised when an iterative numerical routine fails to converge.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Log prior density plus binomial log likelihood at theta = (log alpha, log beta).
double log_posterior_unnormalized(const Vec2& theta, const TrialData& data,
                                  const ModelSpec& model, const BivariatePrior& prior);

struct PosteriorMode {
  Vec2 theta;
  Mat2 neg_hessian;  // Hessian of the negative log posterior at the mode
  int iterations = 0;
};

/// Damped Newton search from the prior mean.
PosteriorMode posterior_mode(const TrialData& data, const ModelSpec& model,
                             const BivariatePrior& prior);

/// Deterministic quadrature layout: Gauss-Hermite nodes along log beta,
/// Gauss-Legendre panels along log alpha. Interval boundaries are handled by
/// splitting the log-alpha panel they fall into, so interval probabilities
/// converge like the smooth integrands they condition on rather than like
/// indicator functions on a tensor grid.
struct QuadratureConfig {
  int outer_nodes = 64;
  int panels = 16;
  int panel_nodes = 8;
  double span_sigma = 8.0;  // log-alpha window half-width, in conditional sigmas

  void validate() const;
};

/// Posterior probability of each toxicity interval at every dose.
IntervalProbs interval_probs(const TrialData& data, const ModelSpec& model,
                             const BivariatePrior& prior, const ToxicityIntervals& intervals,
                             const QuadratureConfig& quad = {});

struct GridPoint {
  double log_alpha;
  double log_beta;
  double weight;  // quadrature weight; sum(weight * exp(log_post)) estimates the evidence
  double log_post;
};

/// Base evaluation grid of the quadrature, for debugging/plotting.
std::vector<GridPoint> quadrature_grid(const TrialData& data, const ModelSpec& model,
                                       const BivariatePrior& prior,
                                       const QuadratureConfig& quad = {});

/// Binds (model, prior, intervals, quadrature) and memoizes fits by data.
/// Fits are pure functions of the data, so the cache only ever stores values
/// identical to a fresh computation; safe to share across threads.
class PosteriorEngine {
 public:
  PosteriorEngine(ModelSpec model, BivariatePrior prior, ToxicityIntervals intervals,
                  QuadratureConfig quad = {});

  const IntervalProbs& probs(const TrialData& data) const;

  const ModelSpec& model() const { return model_; }
  const BivariatePrior& prior() const { return prior_; }
  const ToxicityIntervals& intervals() const { return intervals_; }
  const QuadratureConfig& quadrature() const { return quad_; }
  std::size_t cache_size() const;

 private:
  ModelSpec model_;
  BivariatePrior prior_;
  ToxicityIntervals intervals_;
  QuadratureConfig quad_;
  mutable std::unordered_map<std::string, std::unique_ptr<IntervalProbs>> cache_;
  mutable std::shared_mutex mutex_;
};

}  // namespace blrm
