#include "dyadic/martingale.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace dyadic {

namespace {

constexpr double kMassFloor = 1e-300;

// Leaf values of the expectation at `generation` from precomputed cube
// integrals of f d(mu) and of mu.
std::vector<double> expectation_values(const FiniteModel& m,
                                       const std::vector<double>& fmu,
                                       const std::vector<double>& mass,
                                       int generation) {
  const int N = m.depth();
  const int d = m.dimension();
  const std::size_t off = m.node_offset(generation);
  const int shift = d * (N - generation);
  std::vector<double> out(m.leaf_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t q = off + (i >> shift);
    const double mq = mass[q];
    if (!(mq >= kMassFloor))
      throw std::domain_error("expectation: cube mass vanishes");
    out[i] = fmu[q] / mq;
  }
  return out;
}

}  // namespace

StepFunction expectation(const StepFunction& f, const Measure& mu,
                         int generation) {
  const FiniteModel& m = f.model();
  require_same_model(m, mu.model());
  if (generation < 0 || generation > m.depth())
    throw std::invalid_argument("expectation: generation out of range");
  const std::vector<double> fmu = cube_sums(pointwise_product(f, mu.density()));
  const std::vector<double> mass = cube_sums(mu.density());
  return StepFunction(m, expectation_values(m, fmu, mass, generation));
}

StepFunction difference(const StepFunction& f, const Measure& mu, int fine,
                        int coarse) {
  if (coarse > fine)
    throw std::invalid_argument("difference: coarse generation must not exceed fine");
  const FiniteModel& m = f.model();
  require_same_model(m, mu.model());
  if (coarse < 0 || fine > m.depth())
    throw std::invalid_argument("difference: generation out of range");
  const std::vector<double> fmu = cube_sums(pointwise_product(f, mu.density()));
  const std::vector<double> mass = cube_sums(mu.density());
  std::vector<double> v = expectation_values(m, fmu, mass, fine);
  const std::vector<double> c = expectation_values(m, fmu, mass, coarse);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c[i];
  return StepFunction(m, std::move(v));
}

MartingaleLadder::MartingaleLadder(FiniteModel model, Measure measure,
                                   int start, int step)
    : model_(model), measure_(std::move(measure)), start_(start), step_(step) {
  require_same_model(model_, measure_.model());
  if (start_ < 0 || start_ > model_.depth())
    throw std::invalid_argument("MartingaleLadder: start out of range");
  if (step_ < 1) throw std::invalid_argument("MartingaleLadder: step must be >= 1");
  for (int g = start_; g <= model_.depth(); g += step_)
    generations_.push_back(g);
  mass_ = cube_sums(measure_.density());
  for (int g : generations_) {
    const std::size_t off = model_.node_offset(g);
    for (std::size_t i = 0; i < model_.cubes_at(g); ++i)
      if (!(mass_[off + i] >= kMassFloor))
        throw std::domain_error("MartingaleLadder: cube mass vanishes");
  }
}

MartingaleLadder::Decomposition MartingaleLadder::decompose(
    const StepFunction& f) const {
  require_same_model(model_, f.model());
  const std::vector<double> fmu =
      cube_sums(pointwise_product(f, measure_.density()));

  std::vector<double> prev =
      expectation_values(model_, fmu, mass_, generations_.front());
  Decomposition parts{StepFunction(model_, prev), {}, {}, StepFunction(model_, 0.0)};
  for (std::size_t k = 1; k < generations_.size(); ++k) {
    std::vector<double> cur =
        expectation_values(model_, fmu, mass_, generations_[k]);
    std::vector<double> diff(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) diff[i] = cur[i] - prev[i];
    parts.differences.emplace_back(model_, std::move(diff));
    parts.fine_generations.push_back(generations_[k]);
    prev = std::move(cur);
  }
  std::vector<double> res(f.size());
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = f[i] - prev[i];
  parts.residual = StepFunction(model_, std::move(res));
  return parts;
}

StepFunction MartingaleLadder::recombine(const Decomposition& parts) {
  std::vector<double> v = parts.coarse.values();
  for (const auto& piece : parts.differences) {
    require_same_model(parts.coarse.model(), piece.model());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += piece[i];
  }
  require_same_model(parts.coarse.model(), parts.residual.model());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += parts.residual[i];
  return StepFunction(parts.coarse.model(), std::move(v));
}

double MartingaleLadder::bessel_gap(const StepFunction& f) const {
  const Decomposition parts = decompose(f);
  double total = norm_l2(f, measure_);
  total *= total;
  for (const auto& piece : parts.differences) {
    const double n = norm_l2(piece, measure_);
    total -= n * n;
  }
  return total;
}

}  // namespace dyadic
