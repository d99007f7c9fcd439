#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

// Finite dyadic model on [0,1)^d: generations 0..N, 2^(d*g) half-open cubes
// per generation, 2^(d*N) leaves.  Leaves are ordered hierarchically
// (Z-order): the leaves of any cube form one contiguous index range, and a
// cube's ancestor at generation g is found by shifting its index right by
// d*(N-g) bits.  For d = 1 this is the usual left-to-right interval order.

namespace dyadic {

class FiniteModel {
 public:
  FiniteModel(int dimension, int depth);

  int dimension() const { return d_; }
  int depth() const { return n_; }

  std::size_t leaf_count() const { return leaf_count_; }
  double leaf_volume() const { return leaf_volume_; }

  /// Number of cubes at one generation: 2^(d*g).
  std::size_t cubes_at(int gen) const;

  /// Cubes of all generations 0..N laid out generation-major; offset of the
  /// first generation-g cube inside that flat array.
  std::size_t node_offset(int gen) const { return offsets_[static_cast<std::size_t>(gen)]; }
  std::size_t node_count() const { return offsets_.back(); }

  /// Lebesgue volume 2^(-d*g) of a generation-g cube.
  double cube_volume(int gen) const;

  bool operator==(const FiniteModel& other) const {
    return d_ == other.d_ && n_ == other.n_;
  }

 private:
  int d_;
  int n_;
  std::size_t leaf_count_;
  double leaf_volume_;
  std::vector<std::size_t> offsets_;  // size N+2, offsets_[N+1] == node_count
};

/// A cube is addressed by its generation and integer position vector
/// (coordinates in [0, 2^g) each; unused coordinates stay 0).
struct CubeId {
  int generation = 0;
  std::array<std::uint32_t, 3> position{0, 0, 0};

  bool operator==(const CubeId&) const = default;
};

/// Hierarchical linear index of a cube within its generation.
std::uint64_t cube_index(const FiniteModel& model, const CubeId& q);
CubeId cube_from_index(const FiniteModel& model, int gen, std::uint64_t index);

CubeId parent_cube(const CubeId& q);
bool cube_contains(const CubeId& outer, const CubeId& inner);

double side_length(const CubeId& q);

/// Half-open leaf index range [first, last) covered by q.
std::pair<std::size_t, std::size_t> cube_leaf_range(const FiniteModel& model,
                                                    const CubeId& q);

/// Explicit list of the leaf indices of q (contiguous ascending).
std::vector<std::size_t> cube_leaves(const FiniteModel& model, const CubeId& q);

/// Center point of a leaf, for kernel-distance diagnostics.
std::array<double, 3> leaf_center(const FiniteModel& model, std::size_t leaf);

// ---------------------------------------------------------------------------

/// Function constant on leaves, stored as one value per leaf.
class StepFunction {
 public:
  StepFunction(FiniteModel model, std::vector<double> values);
  StepFunction(FiniteModel model, double constant);

  const FiniteModel& model() const { return model_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  FiniteModel model_;
  std::vector<double> values_;
};

void require_same_model(const FiniteModel& a, const FiniteModel& b);

/// Nonnegative density against Lebesgue measure.
class Measure {
 public:
  explicit Measure(StepFunction density);
  static Measure lebesgue(const FiniteModel& model);

  const StepFunction& density() const { return density_; }
  const FiniteModel& model() const { return density_.model(); }

  /// True if the density is bounded away from zero on every leaf.
  bool strictly_positive() const { return strictly_positive_; }

 private:
  StepFunction density_;
  bool strictly_positive_;
};

// ---------------------------------------------------------------------------
// Integrals and averages.  cube_sums returns the Lebesgue integral of f over
// every cube, laid out by FiniteModel::node_offset; all other helpers are
// built on that bottom-up pass, so summation order is fixed.

std::vector<double> cube_sums(const StepFunction& f);

double cube_sum(const std::vector<double>& sums, const FiniteModel& model,
                int gen, std::uint64_t index);

/// mu-average of f over q: (1/mu(q)) * integral_q f dmu.
double average(const StepFunction& f, const Measure& mu, const CubeId& q);

/// integral f * g dmu.
double inner_product(const StepFunction& f, const StepFunction& g,
                     const Measure& mu);

/// L2(mu) norm.
double norm_l2(const StepFunction& f, const Measure& mu);

/// Dyadic maximal function: at each leaf, the maximum of |mu-average of f|
/// over all ancestor cubes (generations 0..N).
StepFunction maximal_function(const StepFunction& f, const Measure& mu);

// Small arithmetic helpers used across modules.
StepFunction pointwise_product(const StepFunction& a, const StepFunction& b);
StepFunction absolute_value(const StepFunction& f);

}  // namespace dyadic
