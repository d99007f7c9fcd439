#pragma once

#include <cstdint>
#include <vector>

#include "dyadic/model.hpp"
#include "dyadic/shift.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

// Stopping family for |f| relative to a measure, built top down: a cube
// becomes stopping when its average exceeds threshold times the average of
// its innermost stopping ancestor.  Cubes live on generations congruent to
// residue mod step; the cubes at the residue generation are the roots.
struct StoppingForest {
  FiniteModel model;
  int step = 1;
  int residue = 0;
  double threshold = 4.0;
  double energy = 0.0;  // squared L2 norm of f in the construction measure

  std::vector<CubeId> stopping;        // generation-major
  std::vector<double> rho;             // average of |f| on each stopping cube
  std::vector<std::int32_t> parent;    // innermost stopping ancestor, -1 at roots

  // For every ladder generation (outer index in ladder order), the stopping
  // index owning each cube of that generation.
  std::vector<std::vector<std::int32_t>> corona;

  std::vector<int> ladder_generations() const;
  // Stopping index owning a ladder cube.
  std::int32_t corona_of(const CubeId& q) const;
};

StoppingForest build_stopping_cubes(const StepFunction& f, const Measure& sigma,
                                    double threshold = 4.0, int step = 1,
                                    int residue = 0);

struct CarlesonStats {
  double packing = 0.0;       // sup_F sum of stopping mass inside F over mass of F
  int overlap = 0;            // deepest stopping chain
  double second_moment = 0.0; // sum of mass times rho^2 over the f energy
};

CarlesonStats carleson_check(const StoppingForest& forest, const Measure& sigma);

// Largest ladder-cube average of |f| relative to its corona's rho; bounded by
// the threshold by construction.
double corona_normalization(const StoppingForest& forest, const StepFunction& f,
                            const Measure& sigma);

// Exact split of <T(f sigma), g>_w by expanding f sigma and g w around their
// block averages.  recombined = u + vstar + w_part with u = vtilde + v, and
// total is computed through an independent path (dense matrix on small
// models, operator application otherwise).
struct BilinearReport {
  double total = 0.0;
  double u = 0.0;
  double v = 0.0;
  double vstar = 0.0;
  double w_part = 0.0;
  double vtilde = 0.0;
  double recombined = 0.0;
  double gap = 0.0;  // |total - recombined| relative to the part sizes
};

BilinearReport decompose_form(const HaarShift& shift, const Weight& weight,
                              const StepFunction& f, const StepFunction& g);

// Energy bookkeeping for u(x) = sum over blocks of avg_Q(f; sigma) times the
// block applied to sigma.  norm_u^2 equals diagonal + 2 * nested exactly.
struct CoronaDiagnostics {
  double diagonal = 0.0;  // sum of squared single-block energies
  double nested = 0.0;    // cross terms of strictly nested block pairs
  double norm_u = 0.0;    // L2(w) norm of u
};

CoronaDiagnostics corona_diagnostics(const HaarShift& shift,
                                     const Weight& weight,
                                     const StepFunction& f);

// Average of ||sum of signed block pieces of u||^2 over a complete family of
// orthogonal sign patterns; matches the diagonal term to rounding accuracy.
struct SignAverageReport {
  double averaged = 0.0;
  double diagonal = 0.0;
  int patterns = 0;
};

SignAverageReport sign_average_check(const HaarShift& shift,
                                     const Weight& weight,
                                     const StepFunction& f, int min_patterns,
                                     std::uint64_t seed);

}  // namespace dyadic
