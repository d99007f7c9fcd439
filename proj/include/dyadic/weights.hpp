#pragma once

#include <cstdint>
#include <vector>

#include "dyadic/model.hpp"

// A2 weights on the finite model.  A Weight stores the density w together
// with its pointwise dual sigma; the pair satisfies w[i] * sigma[i] == 1.0
// exactly (as doubles) on every leaf.  Since 1/(1/x) does not always round
// back to x in binary64, sigma[i] is chosen as the double nearest to 1/w[i]
// whose product with w[i] rounds to exactly 1.0; it differs from the rounded
// reciprocal by at most a couple of ulps.

namespace dyadic {

class Weight {
 public:
  /// Build from a density; the dual density is derived.
  static Weight from_density(StepFunction w);

  const FiniteModel& model() const { return w_.model(); }
  const StepFunction& density() const { return w_; }
  const StepFunction& dual_density() const { return sigma_; }

  Measure measure() const { return Measure(w_); }
  Measure dual_measure() const { return Measure(sigma_); }

 private:
  Weight(StepFunction w, StepFunction sigma);
  StepFunction w_;
  StepFunction sigma_;
  friend Weight dual_weight(const Weight&);
};

/// The weight whose density is sigma and whose dual is w.  Involutive bit
/// for bit: dual(dual(v)) == v.
Weight dual_weight(const Weight& v);

/// A positive double paired with an exact reciprocal.  Not every double
/// admits a partner whose product rounds to 1.0, so the value itself may be
/// nudged by a few ulps; the returned pair always multiplies to exactly 1.0.
struct ReciprocalPair {
  double value = 1.0;
  double dual = 1.0;
};

ReciprocalPair paired_reciprocal(double value);

struct A2Report {
  double constant = 0.0;
  CubeId argmax;
};

/// Dyadic A2 characteristic: sup over all cubes of avg(w) * avg(sigma),
/// averages against Lebesgue measure.  Ties resolved toward the coarsest
/// generation, then the smallest cube index.
A2Report a2_constant(const Weight& v, const FiniteModel& model);

/// w(x) = x_1^alpha discretized by exact leaf means, |alpha| < 1.  The
/// singularity sits at the x_1 = 0 face, a cube corner.  For alpha < 0 the
/// characteristic tracks 1/(1 - alpha^2) closely at moderate depth; for
/// alpha > 0 it saturates near depth * log 2 once the dual mass near the
/// corner is resolved by single leaves.
Weight power_weight(double alpha, const FiniteModel& model);

/// Constant density (characteristic exactly 1 for any c > 0).
Weight constant_weight(const FiniteModel& model, double c = 1.0);

/// Weight from explicit leaf values (all finite and strictly positive).
Weight explicit_weight(std::vector<double> values, const FiniteModel& model);

/// Seeded multiplicative cascade with target characteristic: sibling pairs
/// get factors (1 + delta, 1 - delta) with per-cube amplitudes drawn once
/// from the seed and rescaled globally (bisection) until the measured
/// characteristic lands within a factor 4 of `target`.  Throws if the target
/// is unreachable at this depth.
Weight random_a2_weight(double target, std::uint64_t seed,
                        const FiniteModel& model);

}  // namespace dyadic
