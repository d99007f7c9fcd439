#include "dyadic/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dyadic/rng.hpp"

namespace dyadic {

namespace {

void require_positive_finite(const std::vector<double>& values,
                             const char* who) {
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0)
      throw std::invalid_argument(std::string(who) +
                                  ": density values must be finite and > 0");
    // Extreme magnitudes would overflow the paired reciprocal.
    if (v < 0x1.0p-500 || v > 0x1.0p500)
      throw std::invalid_argument(std::string(who) +
                                  ": density value magnitude out of range");
  }
}

}  // namespace

namespace {

// The correctly rounded reciprocal or one of its immediate neighbors are the
// only doubles whose product with v can round to 1.0; anything farther moves
// the product by more than the width of the rounding interval.
double reciprocal_partner(double v) {
  const double s = 1.0 / v;
  if (v * s == 1.0) return s;
  const double up = std::nextafter(s, std::numeric_limits<double>::infinity());
  if (v * up == 1.0) return up;
  const double down =
      std::nextafter(s, -std::numeric_limits<double>::infinity());
  if (v * down == 1.0) return down;
  return 0.0;
}

}  // namespace

ReciprocalPair paired_reciprocal(double value) {
  double hi = value, lo = value;
  for (int step = 0; step < 64; ++step) {
    if (const double s = reciprocal_partner(hi); s != 0.0) return {hi, s};
    if (hi != lo) {
      if (const double s = reciprocal_partner(lo); s != 0.0) return {lo, s};
    }
    hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
    lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
  }
  throw std::logic_error("paired_reciprocal: no invertible value nearby");
}

Weight::Weight(StepFunction w, StepFunction sigma)
    : w_(std::move(w)), sigma_(std::move(sigma)) {}

Weight Weight::from_density(StepFunction w) {
  require_positive_finite(w.values(), "Weight");
  std::vector<double> snapped(w.size()), sigma(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const ReciprocalPair pair = paired_reciprocal(w[i]);
    snapped[i] = pair.value;
    sigma[i] = pair.dual;
  }
  return Weight(StepFunction(w.model(), std::move(snapped)),
                StepFunction(w.model(), std::move(sigma)));
}

Weight dual_weight(const Weight& v) { return Weight(v.sigma_, v.w_); }

A2Report a2_constant(const Weight& v, const FiniteModel& model) {
  require_same_model(v.model(), model);
  const auto ws = cube_sums(v.density());
  const auto ss = cube_sums(v.dual_density());
  A2Report report;
  report.constant = 0.0;
  for (int g = 0; g <= model.depth(); ++g) {
    const std::size_t count = model.cubes_at(g);
    const double inv_vol = 1.0 / model.cube_volume(g);
    for (std::size_t i = 0; i < count; ++i) {
      const double p = (cube_sum(ws, model, g, i) * inv_vol) *
                       (cube_sum(ss, model, g, i) * inv_vol);
      if (p > report.constant) {
        report.constant = p;
        report.argmax = cube_from_index(model, g, i);
      }
    }
  }
  return report;
}

Weight power_weight(double alpha, const FiniteModel& model) {
  if (!(std::fabs(alpha) < 1.0))
    throw std::invalid_argument("power_weight: |alpha| must be < 1");
  if (alpha == 0.0) return constant_weight(model, 1.0);

  const int N = model.depth();
  const int d = model.dimension();
  const std::size_t edge = std::size_t{1} << N;
  // Exact mean of x^alpha over [j/2^N, (j+1)/2^N) via the antiderivative.
  std::vector<double> edge_means(edge);
  const double e = 1.0 + alpha;
  for (std::size_t j = 0; j < edge; ++j) {
    const double a = std::ldexp(static_cast<double>(j), -N);
    const double b = std::ldexp(static_cast<double>(j + 1), -N);
    edge_means[j] =
        (std::pow(b, e) - std::pow(a, e)) / (e * (b - a));
  }
  std::vector<double> values(model.leaf_count());
  if (d == 1) {
    values = edge_means;
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const CubeId leaf = cube_from_index(model, N, i);
      values[i] = edge_means[leaf.position[0]];
    }
  }
  return Weight::from_density(StepFunction(model, std::move(values)));
}

Weight constant_weight(const FiniteModel& model, double c) {
  return Weight::from_density(StepFunction(model, c));
}

Weight explicit_weight(std::vector<double> values, const FiniteModel& model) {
  return Weight::from_density(StepFunction(model, std::move(values)));
}

namespace {

// Cascade leaf densities for a given global amplitude scale in [0, 1).
// Factor pairs are keyed per parent cube, so the same seed yields the same
// coarse structure at every depth.
std::vector<double> cascade_values(double scale, std::uint64_t seed,
                                   const FiniteModel& model) {
  const int N = model.depth();
  const int d = model.dimension();
  const std::size_t fan = std::size_t{1} << d;
  std::vector<double> level{1.0};
  for (int g = 0; g < N; ++g) {
    std::vector<double> next(level.size() * fan);
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t k = 0; k < fan; k += 2) {
        const double amp =
            scale * (0.5 + 0.5 * keyed_uniform01(seed, static_cast<std::uint64_t>(g),
                                                 i, k));
        next[i * fan + k] = level[i] * (1.0 + amp);
        next[i * fan + k + 1] = level[i] * (1.0 - amp);
      }
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace

Weight random_a2_weight(double target, std::uint64_t seed,
                        const FiniteModel& model) {
  if (!(target >= 1.0) || !std::isfinite(target))
    throw std::invalid_argument("random_a2_weight: target must be >= 1");
  const double scale_max = 0.95;
  auto characteristic = [&](double s) {
    Weight w = Weight::from_density(
        StepFunction(model, cascade_values(s, seed, model)));
    return a2_constant(w, model).constant;
  };
  if (target == 1.0)
    return Weight::from_density(StepFunction(model, cascade_values(0.0, seed, model)));

  const double reachable = characteristic(scale_max);
  if (reachable < target / 4.0)
    throw std::runtime_error(
        "random_a2_weight: target characteristic unreachable at this depth "
        "(max ~" + std::to_string(reachable) + ")");

  // Characteristic grows monotonically with the amplitude scale; bisect.
  double lo = 0.0, hi = scale_max;
  double s = scale_max;
  for (int iter = 0; iter < 60; ++iter) {
    s = 0.5 * (lo + hi);
    const double c = characteristic(s);
    if (c < target / std::sqrt(2.0))
      lo = s;
    else if (c > target * std::sqrt(2.0))
      hi = s;
    else
      break;
  }
  Weight w =
      Weight::from_density(StepFunction(model, cascade_values(s, seed, model)));
  const double achieved = a2_constant(w, model).constant;
  if (achieved < target / 4.0 || achieved > target * 4.0)
    throw std::runtime_error(
        "random_a2_weight: bisection failed to land within a factor 4 of target");
  return w;
}

}  // namespace dyadic
