#pragma once

#include <vector>

#include "dyadic/model.hpp"

namespace dyadic {

// Conditional expectation of f at one generation, relative to mu.
StepFunction expectation(const StepFunction& f, const Measure& mu,
                         int generation);

// expectation(fine) - expectation(coarse); requires coarse <= fine.
StepFunction difference(const StepFunction& f, const Measure& mu, int fine,
                        int coarse);

// Expectation generations start, start + step, ... up to the deepest one not
// exceeding the model depth.  Every cube at every ladder generation must carry
// positive mass.
class MartingaleLadder {
 public:
  MartingaleLadder(FiniteModel model, Measure measure, int start, int step);

  const FiniteModel& model() const { return model_; }
  const Measure& measure() const { return measure_; }
  int start() const { return start_; }
  int step() const { return step_; }
  const std::vector<int>& generations() const { return generations_; }

  // Integrals of the density over every cube, generation-major.
  const std::vector<double>& mass() const { return mass_; }

  struct Decomposition {
    StepFunction coarse;                      // expectation at the first rung
    std::vector<StepFunction> differences;    // successive rung differences
    std::vector<int> fine_generations;        // fine rung of each difference
    StepFunction residual;                    // f minus the last expectation
  };

  // f = coarse + sum(differences) + residual, the summands mutually
  // orthogonal in L2 of the ladder measure.
  Decomposition decompose(const StepFunction& f) const;

  // Pointwise sum of the pieces; equals the decomposed function up to
  // rounding.
  static StepFunction recombine(const Decomposition& parts);

  // ||f||^2 - sum ||difference||^2, in L2 of the ladder measure.  Equals the
  // coarse plus residual energy, hence is nonnegative up to rounding.
  double bessel_gap(const StepFunction& f) const;

 private:
  FiniteModel model_;
  Measure measure_;
  int start_;
  int step_;
  std::vector<int> generations_;
  std::vector<double> mass_;
};

}  // namespace dyadic
