#include "dyadic/corona.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dyadic/rng.hpp"

namespace dyadic {

namespace {

constexpr double kMassFloor = 1e-300;

std::vector<int> ladder_gens(const FiniteModel& model, int step, int residue) {
  std::vector<int> gens;
  for (int g = residue; g <= model.depth(); g += step) gens.push_back(g);
  return gens;
}

double checked_average(double integral, double mass) {
  if (!(mass >= kMassFloor))
    throw std::domain_error("stopping construction: cube mass vanishes");
  return integral / mass;
}

// Per-block data shared by the diagnostics and the sign averaging: the block
// average of f, the block's action on sigma as one constant per output cube,
// and that action's pairing with w.
struct BlockAction {
  std::size_t out_base = 0;   // node index of the first output cube
  double avg_f = 0.0;
  std::vector<double> out;    // constants on the output cubes
  double w_pairing = 0.0;     // integral of the action against w
  double w_energy = 0.0;      // squared L2(w) norm of the action
  int out_depth = 0;
};

std::vector<BlockAction> block_actions(const HaarShift& shift,
                                       const Weight& weight,
                                       const StepFunction& f) {
  const FiniteModel& m = shift.model();
  const int d = m.dimension();
  const std::vector<double> ss = cube_sums(weight.dual_density());
  const std::vector<double> ws = cube_sums(weight.density());
  const std::vector<double> fs =
      cube_sums(pointwise_product(f, weight.dual_density()));

  std::vector<BlockAction> actions;
  actions.reserve(shift.blocks().size());
  for (const auto& b : shift.blocks()) {
    const int g = b.cube.generation;
    const std::uint64_t c = cube_index(m, b.cube);
    const std::size_t nq = m.node_offset(g) + c;
    const std::size_t nr = std::size_t{1} << (d * b.m);
    const std::size_t ns = std::size_t{1} << (d * b.n);
    const std::size_t rbase =
        m.node_offset(g + b.m) + (static_cast<std::size_t>(c) << (d * b.m));
    const std::size_t sbase =
        m.node_offset(g + b.n) + (static_cast<std::size_t>(c) << (d * b.n));

    BlockAction act;
    act.out_base = rbase;
    act.out_depth = b.m;
    act.avg_f = checked_average(fs[nq], ss[nq]);
    act.out.resize(nr);
    for (std::size_t r = 0; r < nr; ++r) {
      double cr = 0.0;
      for (std::size_t s = 0; s < ns; ++s) cr += b.table[r * ns + s] * ss[sbase + s];
      act.out[r] = cr;
      act.w_pairing += cr * ws[rbase + r];
      act.w_energy += cr * cr * ws[rbase + r];
    }
    actions.push_back(std::move(act));
  }
  return actions;
}

// Push per-node constants down one full sweep, in place.
void push_down(const FiniteModel& m, std::vector<double>& node_values) {
  const int d = m.dimension();
  const std::size_t fan = std::size_t{1} << d;
  for (int g = 0; g < m.depth(); ++g) {
    const std::size_t o = m.node_offset(g), co = m.node_offset(g + 1);
    for (std::size_t i = 0; i < m.cubes_at(g); ++i) {
      const double v = node_values[o + i];
      if (v == 0.0) continue;
      for (std::size_t k = 0; k < fan; ++k) node_values[co + i * fan + k] += v;
    }
  }
}

double leaf_energy(const FiniteModel& m, const std::vector<double>& nodes,
                   const StepFunction& density) {
  const std::size_t off = m.node_offset(m.depth());
  const double vol = m.leaf_volume();
  double e = 0.0;
  for (std::size_t i = 0; i < m.leaf_count(); ++i) {
    const double v = nodes[off + i];
    e += v * v * density[i] * vol;
  }
  return e;
}

}  // namespace

std::vector<int> StoppingForest::ladder_generations() const {
  return ladder_gens(model, step, residue);
}

std::int32_t StoppingForest::corona_of(const CubeId& q) const {
  if (q.generation < residue || (q.generation - residue) % step != 0)
    throw std::invalid_argument("corona_of: cube not on the ladder");
  const std::size_t slot = static_cast<std::size_t>((q.generation - residue) / step);
  return corona[slot][cube_index(model, q)];
}

StoppingForest build_stopping_cubes(const StepFunction& f, const Measure& sigma,
                                    double threshold, int step, int residue) {
  const FiniteModel& m = f.model();
  require_same_model(m, sigma.model());
  if (!(threshold > 1.0))
    throw std::invalid_argument("build_stopping_cubes: threshold must exceed 1");
  if (step < 1 || residue < 0 || residue >= step || residue > m.depth())
    throw std::invalid_argument("build_stopping_cubes: bad ladder parameters");

  const std::vector<double> fs =
      cube_sums(pointwise_product(absolute_value(f), sigma.density()));
  const std::vector<double> ms = cube_sums(sigma.density());

  StoppingForest forest{m, step, residue, threshold, 0.0, {}, {}, {}, {}};
  forest.energy = inner_product(f, f, sigma);

  const std::vector<int> gens = ladder_gens(m, step, residue);
  const int d = m.dimension();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const int g = gens[k];
    const std::size_t off = m.node_offset(g);
    std::vector<std::int32_t> owner(m.cubes_at(g));
    if (k == 0) {
      for (std::size_t i = 0; i < owner.size(); ++i) {
        owner[i] = static_cast<std::int32_t>(forest.stopping.size());
        forest.stopping.push_back(cube_from_index(m, g, i));
        forest.rho.push_back(checked_average(fs[off + i], ms[off + i]));
        forest.parent.push_back(-1);
      }
    } else {
      const int up = d * (g - gens[k - 1]);
      const auto& prev = forest.corona.back();
      for (std::size_t i = 0; i < owner.size(); ++i) {
        const std::int32_t above = prev[i >> up];
        const double avg = checked_average(fs[off + i], ms[off + i]);
        if (avg > threshold * forest.rho[static_cast<std::size_t>(above)]) {
          owner[i] = static_cast<std::int32_t>(forest.stopping.size());
          forest.stopping.push_back(cube_from_index(m, g, i));
          forest.rho.push_back(avg);
          forest.parent.push_back(above);
        } else {
          owner[i] = above;
        }
      }
    }
    forest.corona.push_back(std::move(owner));
  }
  return forest;
}

CarlesonStats carleson_check(const StoppingForest& forest,
                             const Measure& sigma) {
  require_same_model(forest.model, sigma.model());
  const std::vector<double> ms = cube_sums(sigma.density());
  const std::size_t n = forest.stopping.size();
  std::vector<double> mass(n), subtree(n);
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] = cube_sum(ms, forest.model, forest.stopping[i].generation,
                       cube_index(forest.model, forest.stopping[i]));
    subtree[i] = mass[i];
  }
  CarlesonStats stats;
  // Generation-major order puts every stopping cube after its forest parent.
  for (std::size_t i = n; i-- > 0;) {
    const std::int32_t p = forest.parent[i];
    if (p >= 0) subtree[static_cast<std::size_t>(p)] += subtree[i];
  }
  std::vector<int> chain(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t p = forest.parent[i];
    if (p >= 0) chain[i] = chain[static_cast<std::size_t>(p)] + 1;
    stats.overlap = std::max(stats.overlap, chain[i]);
  }
  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mass[i] >= kMassFloor))
      throw std::domain_error("carleson_check: stopping cube mass vanishes");
    stats.packing = std::max(stats.packing, subtree[i] / mass[i]);
    second += mass[i] * forest.rho[i] * forest.rho[i];
  }
  stats.second_moment = forest.energy > 0.0 ? second / forest.energy : 0.0;
  return stats;
}

double corona_normalization(const StoppingForest& forest, const StepFunction& f,
                            const Measure& sigma) {
  require_same_model(forest.model, f.model());
  require_same_model(forest.model, sigma.model());
  const std::vector<double> fs =
      cube_sums(pointwise_product(absolute_value(f), sigma.density()));
  const std::vector<double> ms = cube_sums(sigma.density());
  const std::vector<int> gens = forest.ladder_generations();
  double worst = 0.0;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const std::size_t off = forest.model.node_offset(gens[k]);
    const auto& owner = forest.corona[k];
    for (std::size_t i = 0; i < owner.size(); ++i) {
      const double avg = checked_average(fs[off + i], ms[off + i]);
      const double rho = forest.rho[static_cast<std::size_t>(owner[i])];
      if (rho > 0.0) worst = std::max(worst, avg / rho);
    }
  }
  return worst;
}

BilinearReport decompose_form(const HaarShift& shift, const Weight& weight,
                              const StepFunction& f, const StepFunction& g) {
  const FiniteModel& m = shift.model();
  require_same_model(m, weight.model());
  require_same_model(m, f.model());
  require_same_model(m, g.model());
  const int d = m.dimension();

  const std::vector<double> ss = cube_sums(weight.dual_density());
  const std::vector<double> ws = cube_sums(weight.density());
  const std::vector<double> fs =
      cube_sums(pointwise_product(f, weight.dual_density()));
  const std::vector<double> gs = cube_sums(pointwise_product(g, weight.density()));

  BilinearReport rep;
  std::vector<double> dr, ds;
  for (const auto& b : shift.blocks()) {
    const int gq = b.cube.generation;
    const std::uint64_t c = cube_index(m, b.cube);
    const std::size_t nq = m.node_offset(gq) + c;
    const std::size_t nr = std::size_t{1} << (d * b.m);
    const std::size_t ns = std::size_t{1} << (d * b.n);
    const std::size_t rbase =
        m.node_offset(gq + b.m) + (static_cast<std::size_t>(c) << (d * b.m));
    const std::size_t sbase =
        m.node_offset(gq + b.n) + (static_cast<std::size_t>(c) << (d * b.n));

    const double ef = checked_average(fs[nq], ss[nq]);
    const double eg = checked_average(gs[nq], ws[nq]);
    dr.resize(nr);
    ds.resize(ns);
    for (std::size_t r = 0; r < nr; ++r) dr[r] = gs[rbase + r] - eg * ws[rbase + r];
    for (std::size_t s = 0; s < ns; ++s) ds[s] = fs[sbase + s] - ef * ss[sbase + s];

    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t s = 0; s < ns; ++s) {
        const double t = b.table[r * ns + s];
        if (t == 0.0) continue;
        rep.vtilde += ef * eg * t * ss[sbase + s] * ws[rbase + r];
        rep.v += ef * t * ss[sbase + s] * dr[r];
        rep.vstar += eg * t * ds[s] * ws[rbase + r];
        rep.w_part += t * ds[s] * dr[r];
      }
    }
  }
  rep.u = rep.vtilde + rep.v;
  rep.recombined = rep.u + rep.vstar + rep.w_part;

  // Independent evaluation of the form.
  const double vol = m.leaf_volume();
  if (m.leaf_count() <= 2048) {
    const DenseMatrix a = assemble_matrix(shift);
    const std::size_t L = m.leaf_count();
    double total = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < L; ++j)
        row += a.a[i * L + j] * f[j] * weight.dual_density()[j];
      total += row * g[i] * weight.density()[i] * vol;
    }
    rep.total = total;
  } else {
    const StepFunction out =
        shift.apply(pointwise_product(f, weight.dual_density()));
    double total = 0.0;
    for (std::size_t i = 0; i < m.leaf_count(); ++i)
      total += out[i] * g[i] * weight.density()[i] * vol;
    rep.total = total;
  }

  const double scale =
      std::max({std::fabs(rep.total), std::fabs(rep.vtilde) + std::fabs(rep.v) +
                                          std::fabs(rep.vstar) +
                                          std::fabs(rep.w_part)});
  rep.gap = scale > 0.0 ? std::fabs(rep.total - rep.recombined) / scale : 0.0;
  return rep;
}

CoronaDiagnostics corona_diagnostics(const HaarShift& shift,
                                     const Weight& weight,
                                     const StepFunction& f) {
  const FiniteModel& m = shift.model();
  require_same_model(m, weight.model());
  require_same_model(m, f.model());
  const std::vector<BlockAction> actions = block_actions(shift, weight, f);

  std::vector<double> nodes(m.node_count(), 0.0);
  CoronaDiagnostics diag;
  for (const auto& act : actions) {
    diag.diagonal += act.avg_f * act.avg_f * act.w_energy;
    for (std::size_t r = 0; r < act.out.size(); ++r)
      nodes[act.out_base + r] += act.avg_f * act.out[r];
  }
  push_down(m, nodes);

  // After the push, the value at a block's cube gathers every contribution
  // placed at that generation or above; subtracting the self term (possible
  // only for output depth zero) leaves the strictly coarser blocks.
  const auto& blocks = shift.blocks();
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& b = blocks[bi];
    const std::size_t nq =
        m.node_offset(b.cube.generation) + cube_index(m, b.cube);
    double above = nodes[nq];
    if (b.m == 0) above -= actions[bi].avg_f * actions[bi].out[0];
    diag.nested += above * actions[bi].avg_f * actions[bi].w_pairing;
  }
  diag.norm_u = std::sqrt(leaf_energy(m, nodes, weight.density()));
  return diag;
}

SignAverageReport sign_average_check(const HaarShift& shift,
                                     const Weight& weight,
                                     const StepFunction& f, int min_patterns,
                                     std::uint64_t seed) {
  const FiniteModel& m = shift.model();
  require_same_model(m, weight.model());
  require_same_model(m, f.model());
  const std::vector<BlockAction> actions = block_actions(shift, weight, f);

  SignAverageReport rep;
  for (const auto& act : actions)
    rep.diagonal += act.avg_f * act.avg_f * act.w_energy;

  const std::size_t need =
      std::max<std::size_t>(static_cast<std::size_t>(std::max(min_patterns, 1)),
                            actions.size() + 1);
  const std::size_t patterns = std::bit_ceil(need);
  rep.patterns = static_cast<int>(patterns);

  // Distinct nonzero Walsh indices make the signs exactly orthogonal over the
  // full pattern family.
  std::vector<std::uint64_t> index(patterns - 1);
  std::iota(index.begin(), index.end(), 1);
  RngStream rng(mix64(seed ^ 0x77a150ffULL));
  for (std::size_t i = index.size(); i > 1; --i)
    std::swap(index[i - 1], index[rng.below(i)]);

  std::vector<double> nodes(m.node_count());
  double sum = 0.0;
  for (std::size_t p = 0; p < patterns; ++p) {
    std::fill(nodes.begin(), nodes.end(), 0.0);
    for (std::size_t bi = 0; bi < actions.size(); ++bi) {
      const double s = walsh_sign(p, index[bi]) * actions[bi].avg_f;
      for (std::size_t r = 0; r < actions[bi].out.size(); ++r)
        nodes[actions[bi].out_base + r] += s * actions[bi].out[r];
    }
    push_down(m, nodes);
    sum += leaf_energy(m, nodes, weight.density());
  }
  rep.averaged = sum / static_cast<double>(patterns);
  return rep;
}

}  // namespace dyadic
