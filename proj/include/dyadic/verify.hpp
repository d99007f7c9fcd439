#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic/model.hpp"
#include "dyadic/shift.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

// Thrown when an iterative solver exhausts its budget without meeting its
// tolerance.  Callers that can tolerate a partial answer catch it.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PowerIterationOptions {
  double tolerance = 1e-12;    // on ||Mv - lambda v|| relative to lambda
  long max_iterations = 500000;
  std::uint64_t seed = 1;
  bool operator==(const PowerIterationOptions&) const = default;
};

struct NormResult {
  double value = 0.0;      // estimated top singular value
  long iterations = 0;
  double residual = 0.0;   // certified bound on |value - exact singular value|
};

using LinearMap =
    std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Top singular value of a square linear map given by forward and adjoint
// callbacks, via power iteration on the normal operator.  The residual bound
// follows from symmetric eigenvalue perturbation and is valid whether or not
// the iteration converged; the value itself approaches the norm from below.
NormResult power_iteration(std::size_t dim, const LinearMap& apply,
                           const LinearMap& apply_adjoint,
                           const PowerIterationOptions& opts);

// Norm of f |-> T(f sigma) from L2(sigma) to L2(w).  Throws ConvergenceError
// when the certificate cannot be brought below the tolerance in budget.
NormResult weighted_norm(const HaarShift& shift, const Weight& weight,
                         const PowerIterationOptions& opts = {});

// Same norm through a dense SVD; small models only.
double svd_norm(const HaarShift& shift, const Weight& weight);

// Relative gap between the operator norm and its dual (w and sigma swapped,
// operator transposed); zero in exact arithmetic.
double duality_check(const HaarShift& shift, const Weight& weight,
                     const PowerIterationOptions& opts = {});

struct IndicatorRatios {
  double max_forward = 0.0;  // sup_Q ||1_Q T(sigma 1_Q)||_{L2(w)} / sigma(Q)^{1/2}
  double max_adjoint = 0.0;  // sup_Q ||1_Q T*(w 1_Q)||_{L2(sigma)} / w(Q)^{1/2}
  CubeId argmax_forward;
  CubeId argmax_adjoint;
};

IndicatorRatios indicator_test_ratios(const HaarShift& shift,
                                      const Weight& weight);

struct WeightSpec {
  std::string family = "power";  // power | random | constant
  double param = 0.0;            // exponent, target constant, or value
  std::uint64_t seed = 0;
  bool operator==(const WeightSpec&) const = default;
};

Weight build_weight(const WeightSpec& spec, const FiniteModel& model);

struct SweepRow {
  double param = 0.0;
  double a2 = 0.0;
  double norm = 0.0;
  int kappa = 0;
  int dimension = 0;
  int depth = 0;
  std::string shift_id;
  std::uint64_t seed = 0;
  double residual = 0.0;
  long iterations = 0;
  std::string error;  // empty on success
};

struct SweepConfig {
  int dimension = 1;
  int depth = 10;
  ShiftSpec shift;
  std::vector<WeightSpec> weights;
  int jobs = 1;
  PowerIterationOptions power;
  bool operator==(const SweepConfig&) const = default;
};

// One row per weight spec; rows are computed independently, so the result is
// identical for any job count.
std::vector<SweepRow> a2_sweep(const SweepConfig& config);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // in log-log coordinates
  double r2 = 0.0;
  int count = 0;
};

// Least squares on (log a2, log norm) over successful rows with a2 >= a2_min.
SlopeFit fit_slope(const std::vector<SweepRow>& rows, double a2_min);

}  // namespace dyadic
