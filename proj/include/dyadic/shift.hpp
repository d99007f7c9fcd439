#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/model.hpp"
#include "dyadic/weights.hpp"

// Haar shift operators in block-kernel form.  A shift is a family of blocks,
// one per cube Q of selected generations; the block kernel s_Q lives on
// Q x Q, is constant on R x S rectangles (R a depth-m descendant of Q, S a
// depth-n descendant), and obeys |s_Q| <= 1/|Q|.  The operator acts by
//
//   (S f)(x) = sum_Q  integral_Q s_Q(x, y) f(y) dy.
//
// Blocks are placed only at generations congruent to `residue` modulo
// `step`, and only where they resolve fully (generation + max(m,n) <= N).
// The canonical constructions keep the classical normalizations:
//
//  * haar_multiplier: f -> sum eps_Q <f, h_Q> h_Q over every generation
//    (step 1); in d >= 2 the block kernel is scaled by 1/(2^d - 1) so the
//    pointwise bound 1/|Q| survives summing the child-basis kernels.
//  * petermichl_shift (d = 1): f -> sum eps_I <f, h_I>(h_{I-} - h_{I+})/sqrt2,
//    complexity (2,1), step 3; block sup is exactly 1/|I|.
//  * random_shift: seeded tables, rescaled so the sampled operator-norm
//    certificate stays <= 1 on every tested subcollection.

namespace dyadic {

struct ComplexityType {
  int m = 1;
  int n = 1;
  int kappa() const { return 1 + (m > n ? m : n); }
};

struct ShiftBlock {
  CubeId cube;
  int m = 1;
  int n = 1;
  // Row-major table: rows indexed by depth-m descendants of the cube, in
  // hierarchical order; columns by depth-n descendants.
  std::vector<double> table;
};

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
};

class HaarShift {
 public:
  HaarShift(FiniteModel model, ComplexityType type, int step, int residue,
            std::string family, std::uint64_t seed,
            std::vector<ShiftBlock> blocks);

  const FiniteModel& model() const { return model_; }
  const ComplexityType& type() const { return type_; }
  int step() const { return step_; }
  int residue() const { return residue_; }
  const std::string& family() const { return family_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<ShiftBlock>& blocks() const { return blocks_; }
  const ShiftBlock* find_block(const CubeId& q) const;
  std::vector<int> block_generations() const;

  StepFunction apply(const StepFunction& f) const;
  StepFunction apply_adjoint(const StepFunction& f) const;

  /// Low-level kernel application on raw leaf vectors.  `mask`, if present,
  /// selects a subcollection of blocks (aligned with blocks()).
  void apply_values(const std::vector<double>& in, std::vector<double>& out,
                    bool adjoint, const std::vector<char>* mask) const;

  /// Transposed kernels: tables transposed, (m, n) swapped.
  HaarShift adjoint() const;

  /// Subcollection restricted to the given cubes; every cube must carry a
  /// block.
  HaarShift restrict_to(const std::vector<CubeId>& cubes) const;

  /// Raw kernel value sum_Q s_Q(x_i, y_j) at a pair of leaves.
  double kernel_value(std::size_t leaf_i, std::size_t leaf_j) const;

 private:
  FiniteModel model_;
  ComplexityType type_;
  int step_;
  int residue_;
  std::string family_;
  std::uint64_t seed_;
  std::vector<ShiftBlock> blocks_;
  // Per generation with blocks: dense cube-index -> block position map.
  std::vector<int> lookup_gens_;
  std::vector<std::vector<std::int32_t>> lookup_;

  void build_lookup();
};

using SignFunction = std::function<double(const CubeId&)>;

SignFunction constant_signs(double value);
/// Per-cube signs uniform in [-1, 1], keyed by the cube.
SignFunction seeded_real_signs(std::uint64_t seed);
/// Per-cube signs uniform over {-1, 0, +1}, keyed by the cube.
SignFunction seeded_ternary_signs(std::uint64_t seed);

/// Haar multiplier over all generations 0..N-1 (complexity (1,1), step 1).
/// Signs must satisfy |eps| <= 1.
HaarShift haar_multiplier(const FiniteModel& model, const SignFunction& signs);

/// Petermichl-type shift, d = 1 only, complexity (2,1), step 3.  Signs must
/// take values in {-1, 0, +1}.
HaarShift petermichl_shift(const FiniteModel& model, const SignFunction& signs,
                           int residue = 0);

/// Seeded random shift of the given complexity; step = kappa = 1 + max(m,n).
/// Tables drawn uniform within the pointwise bound, then globally shrunk so
/// the sampled unconditionality certificate is <= 1 with margin.
HaarShift random_shift(const ComplexityType& type, int residue,
                       std::uint64_t seed, const FiniteModel& model);

/// Dense leaf matrix: entry (i, j) = sum_Q s_Q(x_i, y_j) * leaf volume.
DenseMatrix assemble_matrix(const HaarShift& shift);

/// S(f sigma) for the weight's dual density sigma.
StepFunction apply_weighted(const HaarShift& shift, const StepFunction& f,
                            const Weight& weight);

/// Certified lower bound on the unconditionality constant: the largest
/// L2 -> L2 norm over the full collection, every single block, every
/// generation slice, and `samples` seeded random subcollections.  Subsets are
/// keyed by (seed, sample index), so enlarging `samples` refines the same
/// family and the value never decreases.
double unconditionality_check(const HaarShift& shift, int samples,
                              std::uint64_t seed);

/// max over leaf pairs x != y of |K(x,y)| |x-y|^d for the summed kernel.
double kernel_decay_check(const HaarShift& shift);

// --- descriptors -----------------------------------------------------------

/// Plain-data recipe for building a shift; this is what serializes.
struct ShiftSpec {
  std::string type = "haar_multiplier";  // haar_multiplier|petermichl|random
  int m = 1;
  int n = 1;
  int residue = 0;
  std::uint64_t seed = 0;
  std::string signs = "constant";  // constant|random
  double sign_value = 1.0;

  bool operator==(const ShiftSpec&) const = default;
};

HaarShift build_shift(const ShiftSpec& spec, const FiniteModel& model);

}  // namespace dyadic
