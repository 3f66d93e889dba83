#include "blrm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>

#include "blrm/quadrature.hpp"

namespace blrm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

inline double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

struct Derivatives {
  double log_post = 0.0;
  Vec2 grad;   // of the log posterior
  Mat2 hess;   // of the log posterior
};

Derivatives evaluate(const Vec2& theta, const TrialData& data, const ModelSpec& model,
                     const BivariatePrior& prior, const Mat2& precision) {
  Derivatives d;
  const Vec2 centered = theta - prior.mean;
  d.log_post = -kLog2Pi - 0.5 * std::log(prior.covariance.det())
               - 0.5 * precision.quad_form(centered);
  const Vec2 prior_grad = precision.mul(centered);
  d.grad = {-prior_grad.x, -prior_grad.y};
  d.hess = {-precision.a, -precision.b, -precision.c};

  const double beta = std::exp(theta.y);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int n = data.patients[i];
    if (n == 0) continue;
    const int y = data.dlts[i];
    const double bl = beta * model.log_ratio(i);
    const double eta = theta.x + bl;
    const double p = inverse_logit(eta);
    const double resid = y - n * p;
    const double curv = n * p * (1.0 - p);
    d.log_post += y * eta - n * log1pexp(eta);
    d.grad.x += resid;
    d.grad.y += resid * bl;
    d.hess.a -= curv;
    d.hess.b -= curv * bl;
    d.hess.c += -curv * bl * bl + resid * bl;
  }
  return d;
}

std::string cache_key(const TrialData& data) {
  std::string key(data.size() * 2 * sizeof(int), '\0');
  std::memcpy(key.data(), data.patients.data(), data.size() * sizeof(int));
  std::memcpy(key.data() + data.size() * sizeof(int), data.dlts.data(),
              data.size() * sizeof(int));
  return key;
}

// Shared layout for interval_probs and quadrature_grid.
struct QuadFrame {
  PosteriorMode mode;
  QuadratureRule outer;   // Gauss-Hermite
  QuadratureRule panel;   // Gauss-Legendre on [-1, 1]
  double sigma_v = 0.0;   // marginal sd of log beta
  double slope = 0.0;     // d E[log alpha | log beta] / d log beta
  double sigma_cond = 0.0;
  std::vector<double> edges;  // panel edges, offsets from the conditional center
};

QuadFrame make_frame(const TrialData& data, const ModelSpec& model, const BivariatePrior& prior,
                     const QuadratureConfig& quad) {
  QuadFrame f;
  f.mode = posterior_mode(data, model, prior);
  f.outer = gauss_hermite(quad.outer_nodes);
  f.panel = gauss_legendre(quad.panel_nodes);
  const Mat2 cov = f.mode.neg_hessian.inverse();
  f.sigma_v = std::sqrt(cov.c);
  f.slope = cov.b / cov.c;
  const double cond_var = std::max(cov.a - cov.b * cov.b / cov.c, 1e-300);
  f.sigma_cond = std::sqrt(cond_var);
  f.edges.resize(quad.panels + 1);
  for (int p = 0; p <= quad.panels; ++p) {
    f.edges[p] = quad.span_sigma * f.sigma_cond * (2.0 * p / quad.panels - 1.0);
  }
  return f;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (outer_nodes < 2 || panels < 2 || panel_nodes < 2 || span_sigma <= 0.0)
    throw std::invalid_argument("QuadratureConfig: nodes, panels and span must be positive");
}

double log_posterior_unnormalized(const Vec2& theta, const TrialData& data,
                                  const ModelSpec& model, const BivariatePrior& prior) {
  model.validate();
  prior.validate();
  data.validate(model.num_doses());
  const Mat2 precision = prior.covariance.inverse();
  return evaluate(theta, data, model, prior, precision).log_post;
}

PosteriorMode posterior_mode(const TrialData& data, const ModelSpec& model,
                             const BivariatePrior& prior) {
  model.validate();
  prior.validate();
  data.validate(model.num_doses());
  const Mat2 precision = prior.covariance.inverse();

  constexpr int kMaxIterations = 100;
  constexpr double kGradTol = 1e-10;
  constexpr double kGradAccept = 1e-8;

  Vec2 theta = prior.mean;
  Derivatives d = evaluate(theta, data, model, prior, precision);
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    if (d.grad.sup_norm() < kGradTol) break;
    Mat2 neg_hess{-d.hess.a, -d.hess.b, -d.hess.c};
    double ridge = 0.0;
    while (!neg_hess.positive_definite()) {
      ridge = std::max(2.0 * ridge, 1e-6 * (std::abs(neg_hess.a) + std::abs(neg_hess.c)) + 1e-12);
      neg_hess = Mat2{-d.hess.a + ridge, -d.hess.b, -d.hess.c + ridge};
    }
    const Vec2 step = neg_hess.solve(d.grad);
    double t = 1.0;
    bool improved = false;
    while (t >= 1e-12) {
      const Vec2 candidate = theta + step * t;
      const Derivatives dc = evaluate(candidate, data, model, prior, precision);
      // Near the optimum the objective change underflows; Newton is still
      // contractive there, so a shrinking gradient counts as progress as long
      // as the objective did not actually drop.
      if (dc.log_post > d.log_post ||
          (dc.log_post >= d.log_post - 1e-12 * (1.0 + std::abs(d.log_post)) &&
           dc.grad.sup_norm() < 0.5 * d.grad.sup_norm())) {
        theta = candidate;
        d = dc;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;  // stalled; the gradient check below decides
  }

  const Mat2 neg_hess{-d.hess.a, -d.hess.b, -d.hess.c};
  if (d.grad.sup_norm() > kGradAccept || !neg_hess.positive_definite()) {
    std::ostringstream msg;
    msg << "posterior_mode: no convergence after " << iter
        << " iterations (|grad| = " << d.grad.sup_norm()
        << ", theta = (" << theta.x << ", " << theta.y << "), n = " << data.total_patients()
        << ", dlt = " << data.total_dlts() << ")";
    throw NumericalError(msg.str());
  }
  return {theta, neg_hess, iter};
}

IntervalProbs interval_probs(const TrialData& data, const ModelSpec& model,
                             const BivariatePrior& prior, const ToxicityIntervals& intervals,
                             const QuadratureConfig& quad) {
  intervals.validate();
  quad.validate();
  const QuadFrame f = make_frame(data, model, prior, quad);
  const Mat2 precision = prior.covariance.inverse();
  const std::size_t K = model.num_doses();
  const double cut_under = logit(intervals.lower);
  const double cut_over = logit(intervals.upper);
  const int panels = quad.panels;
  const int pn = quad.panel_nodes;

  // Per-dose accumulators for the two posterior CDF values, plus the evidence.
  std::vector<double> cdf_under(K, 0.0), cdf_over(K, 0.0);
  double evidence = 0.0;
  double scale = 0.0;  // running log scale; first row fixes it
  bool scale_set = false;

  std::vector<double> panel_cumulative(panels + 1, 0.0);
  for (int j = 0; j < quad.outer_nodes; ++j) {
    const double xj = f.outer.nodes[j];
    const double v = f.mode.theta.y + M_SQRT2 * f.sigma_v * xj;
    const double center = f.mode.theta.x + f.slope * (v - f.mode.theta.y);
    const double log_w_outer = std::log(f.outer.weights[j]) + xj * xj;

    // Base pass over the panels; remember the row maximum for scaling.
    double row_max = -HUGE_VAL;
    std::vector<double> lp(panels * pn);
    for (int p = 0; p < panels; ++p) {
      const double mid = 0.5 * (f.edges[p] + f.edges[p + 1]);
      const double half = 0.5 * (f.edges[p + 1] - f.edges[p]);
      for (int q = 0; q < pn; ++q) {
        const Vec2 theta{center + mid + half * f.panel.nodes[q], v};
        const double value = evaluate(theta, data, model, prior, precision).log_post;
        lp[p * pn + q] = value;
        row_max = std::max(row_max, value);
      }
    }
    if (!scale_set) {
      scale = row_max + log_w_outer;
      scale_set = true;
    }
    const double row_factor = std::exp(log_w_outer + row_max - scale);
    if (row_factor == 0.0 || !std::isfinite(row_max)) continue;

    panel_cumulative[0] = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double half = 0.5 * (f.edges[p + 1] - f.edges[p]);
      double s = 0.0;
      for (int q = 0; q < pn; ++q) s += f.panel.weights[q] * std::exp(lp[p * pn + q] - row_max);
      panel_cumulative[p + 1] = panel_cumulative[p] + half * s;
    }
    const double row_total = panel_cumulative[panels];
    evidence += row_factor * row_total;

    // Partial integral up to `limit` (offset from the conditional center):
    // whole panels below plus a Gauss-Legendre pass over the clipped panel.
    const double beta = std::exp(v);
    auto partial = [&](double limit) -> double {
      if (limit <= f.edges.front()) return 0.0;
      if (limit >= f.edges.back()) return row_total;
      const auto it = std::upper_bound(f.edges.begin(), f.edges.end(), limit);
      const int p = static_cast<int>(it - f.edges.begin()) - 1;
      double acc = panel_cumulative[p];
      const double mid = 0.5 * (f.edges[p] + limit);
      const double half = 0.5 * (limit - f.edges[p]);
      double s = 0.0;
      for (int q = 0; q < pn; ++q) {
        const Vec2 theta{center + mid + half * f.panel.nodes[q], v};
        s += f.panel.weights[q] * std::exp(evaluate(theta, data, model, prior, precision).log_post - row_max);
      }
      return acc + half * s;
    };

    for (std::size_t k = 0; k < K; ++k) {
      const double shift = beta * model.log_ratio(k) + center;
      cdf_under[k] += row_factor * partial(cut_under - shift);
      cdf_over[k] += row_factor * partial(cut_over - shift);
    }
  }

  if (!(evidence > 0.0) || !std::isfinite(evidence))
    throw NumericalError("interval_probs: quadrature produced a non-positive evidence");

  IntervalProbs probs;
  probs.under.resize(K);
  probs.target.resize(K);
  probs.over.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double cu = std::clamp(cdf_under[k], 0.0, evidence);
    const double co = std::clamp(cdf_over[k], cu, evidence);
    probs.under[k] = cu / evidence;
    probs.over[k] = 1.0 - co / evidence;
    probs.target[k] = 1.0 - probs.under[k] - probs.over[k];
  }
  return probs;
}

std::vector<GridPoint> quadrature_grid(const TrialData& data, const ModelSpec& model,
                                       const BivariatePrior& prior, const QuadratureConfig& quad) {
  quad.validate();
  const QuadFrame f = make_frame(data, model, prior, quad);
  const Mat2 precision = prior.covariance.inverse();
  std::vector<GridPoint> grid;
  grid.reserve(static_cast<std::size_t>(quad.outer_nodes) * quad.panels * quad.panel_nodes);
  for (int j = 0; j < quad.outer_nodes; ++j) {
    const double xj = f.outer.nodes[j];
    const double v = f.mode.theta.y + M_SQRT2 * f.sigma_v * xj;
    const double center = f.mode.theta.x + f.slope * (v - f.mode.theta.y);
    const double w_outer = M_SQRT2 * f.sigma_v * f.outer.weights[j] * std::exp(xj * xj);
    for (int p = 0; p < quad.panels; ++p) {
      const double mid = 0.5 * (f.edges[p] + f.edges[p + 1]);
      const double half = 0.5 * (f.edges[p + 1] - f.edges[p]);
      for (int q = 0; q < quad.panel_nodes; ++q) {
        const Vec2 theta{center + mid + half * f.panel.nodes[q], v};
        grid.push_back({theta.x, theta.y, w_outer * half * f.panel.weights[q],
                        evaluate(theta, data, model, prior, precision).log_post});
      }
    }
  }
  return grid;
}

PosteriorEngine::PosteriorEngine(ModelSpec model, BivariatePrior prior,
                                 ToxicityIntervals intervals, QuadratureConfig quad)
    : model_(std::move(model)), prior_(prior), intervals_(intervals), quad_(quad) {
  model_.validate();
  prior_.validate();
  intervals_.validate();
  quad_.validate();
}

const IntervalProbs& PosteriorEngine::probs(const TrialData& data) const {
  const std::string key = cache_key(data);
  {
    std::shared_lock lock(mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
  }
  auto computed = std::make_unique<IntervalProbs>(
      interval_probs(data, model_, prior_, intervals_, quad_));
  std::unique_lock lock(mutex_);
  const auto [it, inserted] = cache_.try_emplace(key, std::move(computed));
  return *it->second;
}

std::size_t PosteriorEngine::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

}  // namespace blrm
