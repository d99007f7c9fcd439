#include "dyadic/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dyadic {

FiniteModel::FiniteModel(int dimension, int depth) : d_(dimension), n_(depth) {
  if (dimension < 1 || dimension > 3)
    throw std::invalid_argument("FiniteModel: dimension must be 1, 2, or 3");
  if (depth < 1 || depth > 24 || dimension * depth > 24)
    throw std::invalid_argument("FiniteModel: depth out of range (d*N <= 24)");
  leaf_count_ = std::size_t{1} << (d_ * n_);
  leaf_volume_ = std::ldexp(1.0, -d_ * n_);
  offsets_.resize(static_cast<std::size_t>(n_) + 2);
  offsets_[0] = 0;
  for (int g = 0; g <= n_; ++g)
    offsets_[static_cast<std::size_t>(g) + 1] =
        offsets_[static_cast<std::size_t>(g)] + (std::size_t{1} << (d_ * g));
}

std::size_t FiniteModel::cubes_at(int gen) const {
  if (gen < 0 || gen > n_)
    throw std::invalid_argument("cubes_at: generation out of range");
  return std::size_t{1} << (d_ * gen);
}

double FiniteModel::cube_volume(int gen) const {
  if (gen < 0 || gen > n_)
    throw std::invalid_argument("cube_volume: generation out of range");
  return std::ldexp(1.0, -d_ * gen);
}

std::uint64_t cube_index(const FiniteModel& model, const CubeId& q) {
  const int d = model.dimension();
  const int g = q.generation;
  if (g < 0 || g > model.depth())
    throw std::invalid_argument("cube_index: generation out of range");
  for (int s = 0; s < 3; ++s) {
    const bool used = s < d;
    const std::uint64_t limit = used ? (std::uint64_t{1} << g) : 1;
    if (q.position[static_cast<std::size_t>(s)] >= limit)
      throw std::invalid_argument("cube_index: position out of range");
  }
  // Interleave one bit per coordinate per level, coarsest level first; the
  // first coordinate supplies the high bit of each d-bit digit.  This is what
  // makes descendant index ranges contiguous.
  std::uint64_t idx = 0;
  for (int level = g - 1; level >= 0; --level) {
    std::uint64_t digit = 0;
    for (int s = 0; s < d; ++s)
      digit = (digit << 1) |
              ((q.position[static_cast<std::size_t>(s)] >> level) & 1u);
    idx = (idx << d) | digit;
  }
  return idx;
}

CubeId cube_from_index(const FiniteModel& model, int gen, std::uint64_t index) {
  const int d = model.dimension();
  if (gen < 0 || gen > model.depth())
    throw std::invalid_argument("cube_from_index: generation out of range");
  if (index >= (std::uint64_t{1} << (d * gen)))
    throw std::invalid_argument("cube_from_index: index out of range");
  CubeId q;
  q.generation = gen;
  for (int level = 0; level < gen; ++level) {
    const std::uint64_t digit = (index >> (d * level)) & ((1u << d) - 1u);
    for (int s = 0; s < d; ++s) {
      const std::uint64_t bit = (digit >> (d - 1 - s)) & 1u;
      q.position[static_cast<std::size_t>(s)] |=
          static_cast<std::uint32_t>(bit << level);
    }
  }
  return q;
}

CubeId parent_cube(const CubeId& q) {
  if (q.generation == 0)
    throw std::invalid_argument("parent_cube: root has no parent");
  CubeId p = q;
  p.generation = q.generation - 1;
  for (auto& c : p.position) c >>= 1;
  return p;
}

bool cube_contains(const CubeId& outer, const CubeId& inner) {
  if (outer.generation > inner.generation) return false;
  const int shift = inner.generation - outer.generation;
  for (int s = 0; s < 3; ++s)
    if ((inner.position[static_cast<std::size_t>(s)] >> shift) !=
        outer.position[static_cast<std::size_t>(s)])
      return false;
  return true;
}

double side_length(const CubeId& q) { return std::ldexp(1.0, -q.generation); }

std::pair<std::size_t, std::size_t> cube_leaf_range(const FiniteModel& model,
                                                    const CubeId& q) {
  const std::uint64_t idx = cube_index(model, q);
  const int span = model.dimension() * (model.depth() - q.generation);
  const std::size_t first = static_cast<std::size_t>(idx) << span;
  const std::size_t count = std::size_t{1} << span;
  return {first, first + count};
}

std::vector<std::size_t> cube_leaves(const FiniteModel& model, const CubeId& q) {
  const auto [first, last] = cube_leaf_range(model, q);
  std::vector<std::size_t> out;
  out.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) out.push_back(i);
  return out;
}

std::array<double, 3> leaf_center(const FiniteModel& model, std::size_t leaf) {
  if (leaf >= model.leaf_count())
    throw std::invalid_argument("leaf_center: leaf index out of range");
  const CubeId q = cube_from_index(model, model.depth(), leaf);
  const double h = std::ldexp(1.0, -model.depth());
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int s = 0; s < model.dimension(); ++s)
    x[static_cast<std::size_t>(s)] =
        (static_cast<double>(q.position[static_cast<std::size_t>(s)]) + 0.5) * h;
  return x;
}

// ---------------------------------------------------------------------------

StepFunction::StepFunction(FiniteModel model, std::vector<double> values)
    : model_(model), values_(std::move(values)) {
  if (values_.size() != model_.leaf_count())
    throw std::invalid_argument("StepFunction: value count != leaf count");
}

StepFunction::StepFunction(FiniteModel model, double constant)
    : model_(model), values_(model.leaf_count(), constant) {}

void require_same_model(const FiniteModel& a, const FiniteModel& b) {
  if (!(a == b))
    throw std::invalid_argument("model mismatch: operands live on different grids");
}

Measure::Measure(StepFunction density) : density_(std::move(density)) {
  strictly_positive_ = true;
  for (double v : density_.values()) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("Measure: density must be finite and nonnegative");
    if (v <= 0.0) strictly_positive_ = false;
  }
}

Measure Measure::lebesgue(const FiniteModel& model) {
  return Measure(StepFunction(model, 1.0));
}

std::vector<double> cube_sums(const StepFunction& f) {
  const FiniteModel& m = f.model();
  const int N = m.depth();
  const int d = m.dimension();
  std::vector<double> sums(m.node_count());
  const double vol = m.leaf_volume();
  const std::size_t leaf_off = m.node_offset(N);
  for (std::size_t i = 0; i < f.size(); ++i) sums[leaf_off + i] = f[i] * vol;
  for (int g = N - 1; g >= 0; --g) {
    const std::size_t off = m.node_offset(g);
    const std::size_t child_off = m.node_offset(g + 1);
    const std::size_t count = m.cubes_at(g);
    const std::size_t fan = std::size_t{1} << d;
    for (std::size_t i = 0; i < count; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < fan; ++k) s += sums[child_off + i * fan + k];
      sums[off + i] = s;
    }
  }
  return sums;
}

double cube_sum(const std::vector<double>& sums, const FiniteModel& model,
                int gen, std::uint64_t index) {
  return sums[model.node_offset(gen) + index];
}

double average(const StepFunction& f, const Measure& mu, const CubeId& q) {
  require_same_model(f.model(), mu.model());
  const auto [first, last] = cube_leaf_range(f.model(), q);
  const auto& dens = mu.density();
  double mass = 0.0, val = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    mass += dens[i];
    val += f[i] * dens[i];
  }
  if (mass <= 0.0)
    throw std::domain_error("average: cube has zero measure");
  return val / mass;
}

double inner_product(const StepFunction& f, const StepFunction& g,
                     const Measure& mu) {
  require_same_model(f.model(), g.model());
  require_same_model(f.model(), mu.model());
  const auto& dens = mu.density();
  const double vol = f.model().leaf_volume();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i] * dens[i];
  return s * vol;
}

double norm_l2(const StepFunction& f, const Measure& mu) {
  return std::sqrt(inner_product(f, f, mu));
}

StepFunction maximal_function(const StepFunction& f, const Measure& mu) {
  require_same_model(f.model(), mu.model());
  if (!mu.strictly_positive())
    throw std::domain_error("maximal_function: measure must be strictly positive");
  const FiniteModel& m = f.model();
  const int N = m.depth();
  const int d = m.dimension();
  const auto mass = cube_sums(mu.density());
  const auto fmass = cube_sums(pointwise_product(f, mu.density()));
  StepFunction out(m, 0.0);
  for (std::size_t i = 0; i < m.leaf_count(); ++i) {
    double best = 0.0;
    for (int g = 0; g <= N; ++g) {
      const std::uint64_t anc = static_cast<std::uint64_t>(i) >> (d * (N - g));
      const double avg = cube_sum(fmass, m, g, anc) / cube_sum(mass, m, g, anc);
      best = std::max(best, std::fabs(avg));
    }
    out[i] = best;
  }
  return out;
}

StepFunction pointwise_product(const StepFunction& a, const StepFunction& b) {
  require_same_model(a.model(), b.model());
  StepFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

StepFunction absolute_value(const StepFunction& f) {
  StepFunction out = f;
  for (auto& v : out.values()) v = std::fabs(v);
  return out;
}

}  // namespace dyadic
