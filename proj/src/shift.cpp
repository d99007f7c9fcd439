#include "dyadic/shift.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dyadic/rng.hpp"
#include "dyadic/verify.hpp"

namespace dyadic {

namespace {

std::size_t block_rows(const FiniteModel& model, const ShiftBlock& b) {
  return std::size_t{1} << (model.dimension() * b.m);
}
std::size_t block_cols(const FiniteModel& model, const ShiftBlock& b) {
  return std::size_t{1} << (model.dimension() * b.n);
}

}  // namespace

HaarShift::HaarShift(FiniteModel model, ComplexityType type, int step,
                     int residue, std::string family, std::uint64_t seed,
                     std::vector<ShiftBlock> blocks)
    : model_(model),
      type_(type),
      step_(step),
      residue_(residue),
      family_(std::move(family)),
      seed_(seed),
      blocks_(std::move(blocks)) {
  if (type_.m < 0 || type_.n < 0)
    throw std::invalid_argument("HaarShift: complexity must be nonnegative");
  if (step_ < 1 || step_ < std::max(type_.m, type_.n))
    throw std::invalid_argument("HaarShift: step must be >= max(m, n) and >= 1");
  if (residue_ < 0 || residue_ >= step_)
    throw std::invalid_argument("HaarShift: residue out of range");
  const int N = model_.depth();
  const int mx = std::max(type_.m, type_.n);
  for (const auto& b : blocks_) {
    if (b.m != type_.m || b.n != type_.n)
      throw std::invalid_argument("HaarShift: block complexity mismatch");
    const int g = b.cube.generation;
    if (g % step_ != residue_)
      throw std::invalid_argument("HaarShift: block generation outside residue class");
    if (g + mx > N)
      throw std::invalid_argument("HaarShift: unresolved block (generation + max(m,n) > N)");
    if (b.table.size() != block_rows(model_, b) * block_cols(model_, b))
      throw std::invalid_argument("HaarShift: table size mismatch");
    const double bound = std::ldexp(1.0, model_.dimension() * g);  // 1/|Q|
    for (double v : b.table)
      if (!(std::fabs(v) <= bound))
        throw std::invalid_argument("HaarShift: table exceeds pointwise bound 1/|Q|");
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [&](const ShiftBlock& a, const ShiftBlock& b) {
              if (a.cube.generation != b.cube.generation)
                return a.cube.generation < b.cube.generation;
              return cube_index(model_, a.cube) < cube_index(model_, b.cube);
            });
  build_lookup();
}

void HaarShift::build_lookup() {
  lookup_gens_.clear();
  lookup_.clear();
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int g = blocks_[i].cube.generation;
    if (lookup_gens_.empty() || lookup_gens_.back() != g) {
      lookup_gens_.push_back(g);
      lookup_.emplace_back(model_.cubes_at(g), -1);
    }
    lookup_.back()[cube_index(model_, blocks_[i].cube)] =
        static_cast<std::int32_t>(i);
  }
}

const ShiftBlock* HaarShift::find_block(const CubeId& q) const {
  for (std::size_t gi = 0; gi < lookup_gens_.size(); ++gi) {
    if (lookup_gens_[gi] != q.generation) continue;
    const std::int32_t pos = lookup_[gi][cube_index(model_, q)];
    return pos >= 0 ? &blocks_[static_cast<std::size_t>(pos)] : nullptr;
  }
  return nullptr;
}

std::vector<int> HaarShift::block_generations() const { return lookup_gens_; }

void HaarShift::apply_values(const std::vector<double>& in,
                             std::vector<double>& out, bool adjoint,
                             const std::vector<char>* mask) const {
  const FiniteModel& m = model_;
  if (in.size() != m.leaf_count())
    throw std::invalid_argument("apply_values: input size mismatch");
  const int N = m.depth();
  const int d = m.dimension();

  // Integrals of the input over every cube.
  std::vector<double> sums(m.node_count());
  {
    const double vol = m.leaf_volume();
    const std::size_t off = m.node_offset(N);
    for (std::size_t i = 0; i < in.size(); ++i) sums[off + i] = in[i] * vol;
    const std::size_t fan = std::size_t{1} << d;
    for (int g = N - 1; g >= 0; --g) {
      const std::size_t o = m.node_offset(g), co = m.node_offset(g + 1);
      const std::size_t count = m.cubes_at(g);
      for (std::size_t i = 0; i < count; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < fan; ++k) s += sums[co + i * fan + k];
        sums[o + i] = s;
      }
    }
  }

  // Each block output is constant on its output cubes; accumulate those
  // constants per cube and resolve them to leaves in one downward pass.
  std::vector<double> acc(m.node_count(), 0.0);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    if (mask && !(*mask)[bi]) continue;
    const ShiftBlock& b = blocks_[bi];
    const int g = b.cube.generation;
    const int om = adjoint ? b.n : b.m;  // output depth
    const int im = adjoint ? b.m : b.n;  // input depth
    const std::uint64_t c = cube_index(m, b.cube);
    const std::size_t nr = std::size_t{1} << (d * b.m);
    const std::size_t ns = std::size_t{1} << (d * b.n);
    const std::size_t out_base =
        m.node_offset(g + om) + (static_cast<std::size_t>(c) << (d * om));
    const std::size_t in_base =
        m.node_offset(g + im) + (static_cast<std::size_t>(c) << (d * im));
    if (!adjoint) {
      for (std::size_t r = 0; r < nr; ++r) {
        double v = 0.0;
        for (std::size_t s = 0; s < ns; ++s)
          v += b.table[r * ns + s] * sums[in_base + s];
        acc[out_base + r] += v;
      }
    } else {
      for (std::size_t s = 0; s < ns; ++s) {
        double v = 0.0;
        for (std::size_t r = 0; r < nr; ++r)
          v += b.table[r * ns + s] * sums[in_base + r];
        acc[out_base + s] += v;
      }
    }
  }

  // Push the per-cube constants down to leaf level.
  const std::size_t fan = std::size_t{1} << d;
  for (int g = 0; g < N; ++g) {
    const std::size_t o = m.node_offset(g), co = m.node_offset(g + 1);
    const std::size_t count = m.cubes_at(g);
    for (std::size_t i = 0; i < count; ++i) {
      const double v = acc[o + i];
      if (v == 0.0) continue;
      for (std::size_t k = 0; k < fan; ++k) acc[co + i * fan + k] += v;
    }
  }
  out.assign(acc.begin() + static_cast<std::ptrdiff_t>(m.node_offset(N)),
             acc.end());
}

StepFunction HaarShift::apply(const StepFunction& f) const {
  require_same_model(f.model(), model_);
  std::vector<double> out;
  apply_values(f.values(), out, false, nullptr);
  return StepFunction(model_, std::move(out));
}

StepFunction HaarShift::apply_adjoint(const StepFunction& f) const {
  require_same_model(f.model(), model_);
  std::vector<double> out;
  apply_values(f.values(), out, true, nullptr);
  return StepFunction(model_, std::move(out));
}

HaarShift HaarShift::adjoint() const {
  std::vector<ShiftBlock> tblocks;
  tblocks.reserve(blocks_.size());
  const int d = model_.dimension();
  for (const auto& b : blocks_) {
    ShiftBlock t;
    t.cube = b.cube;
    t.m = b.n;
    t.n = b.m;
    const std::size_t nr = std::size_t{1} << (d * b.m);
    const std::size_t ns = std::size_t{1} << (d * b.n);
    t.table.resize(b.table.size());
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t s = 0; s < ns; ++s)
        t.table[s * nr + r] = b.table[r * ns + s];
    tblocks.push_back(std::move(t));
  }
  return HaarShift(model_, ComplexityType{type_.n, type_.m}, step_, residue_,
                   family_ + "_adjoint", seed_, std::move(tblocks));
}

HaarShift HaarShift::restrict_to(const std::vector<CubeId>& cubes) const {
  std::vector<ShiftBlock> sub;
  sub.reserve(cubes.size());
  for (const auto& q : cubes) {
    const ShiftBlock* b = find_block(q);
    if (!b)
      throw std::invalid_argument("restrict_to: cube carries no block");
    sub.push_back(*b);
  }
  return HaarShift(model_, type_, step_, residue_, family_ + "_restricted",
                   seed_, std::move(sub));
}

double HaarShift::kernel_value(std::size_t leaf_i, std::size_t leaf_j) const {
  const int N = model_.depth();
  const int d = model_.dimension();
  if (leaf_i >= model_.leaf_count() || leaf_j >= model_.leaf_count())
    throw std::invalid_argument("kernel_value: leaf index out of range");
  // Deepest generation at which both leaves share a cube.
  int meet = N;
  const std::uint64_t x = static_cast<std::uint64_t>(leaf_i) ^
                          static_cast<std::uint64_t>(leaf_j);
  if (x != 0) {
    const int b = std::bit_width(x);
    meet = N - (b + d - 1) / d;
  }
  double value = 0.0;
  for (std::size_t gi = 0; gi < lookup_gens_.size(); ++gi) {
    const int g = lookup_gens_[gi];
    if (g > meet) continue;
    const std::uint64_t anc = static_cast<std::uint64_t>(leaf_i) >> (d * (N - g));
    const std::int32_t pos = lookup_[gi][anc];
    if (pos < 0) continue;
    const ShiftBlock& blk = blocks_[static_cast<std::size_t>(pos)];
    const std::size_t ns = std::size_t{1} << (d * blk.n);
    const std::uint64_t r =
        (static_cast<std::uint64_t>(leaf_i) >> (d * (N - g - blk.m))) &
        ((std::uint64_t{1} << (d * blk.m)) - 1);
    const std::uint64_t s =
        (static_cast<std::uint64_t>(leaf_j) >> (d * (N - g - blk.n))) &
        ((std::uint64_t{1} << (d * blk.n)) - 1);
    value += blk.table[r * ns + s];
  }
  return value;
}

// --- canonical constructions ------------------------------------------------

SignFunction constant_signs(double value) {
  return [value](const CubeId&) { return value; };
}

SignFunction seeded_real_signs(std::uint64_t seed) {
  return [seed](const CubeId& q) {
    return keyed_symmetric(seed, static_cast<std::uint64_t>(q.generation),
                           q.position[0], q.position[1], q.position[2]);
  };
}

SignFunction seeded_ternary_signs(std::uint64_t seed) {
  return [seed](const CubeId& q) {
    const std::uint64_t b =
        keyed_bits(seed, static_cast<std::uint64_t>(q.generation),
                   q.position[0], q.position[1], q.position[2]);
    return static_cast<double>(static_cast<int>(b % 3) - 1);
  };
}

HaarShift haar_multiplier(const FiniteModel& model, const SignFunction& signs) {
  const int N = model.depth();
  const int d = model.dimension();
  const std::size_t fan = std::size_t{1} << d;
  std::vector<ShiftBlock> blocks;
  for (int g = 0; g + 1 <= N; ++g) {
    const std::size_t count = model.cubes_at(g);
    const double inv_vol = std::ldexp(1.0, d * g);  // 1/|Q|
    for (std::size_t i = 0; i < count; ++i) {
      const CubeId q = cube_from_index(model, g, i);
      const double eps = signs(q);
      if (!(std::fabs(eps) <= 1.0))
        throw std::invalid_argument("haar_multiplier: |sign| must be <= 1");
      ShiftBlock b;
      b.cube = q;
      b.m = 1;
      b.n = 1;
      b.table.assign(fan * fan, 0.0);
      if (d == 1) {
        // eps * h_Q(x) h_Q(y), h_Q the L2-normalized Haar function.
        b.table[0] = eps * inv_vol;
        b.table[1] = -eps * inv_vol;
        b.table[2] = -eps * inv_vol;
        b.table[3] = eps * inv_vol;
      } else {
        // Scaled projection onto mean-zero child-constant functions; the
        // 1/(2^d - 1) factor keeps the kernel within the pointwise bound.
        const double off = -eps * inv_vol / static_cast<double>(fan - 1);
        const double diag = eps * inv_vol;
        for (std::size_t r = 0; r < fan; ++r)
          for (std::size_t s = 0; s < fan; ++s)
            b.table[r * fan + s] = (r == s) ? diag : off;
      }
      blocks.push_back(std::move(b));
    }
  }
  return HaarShift(model, ComplexityType{1, 1}, 1, 0, "haar_multiplier", 0,
                   std::move(blocks));
}

HaarShift petermichl_shift(const FiniteModel& model, const SignFunction& signs,
                           int residue) {
  if (model.dimension() != 1)
    throw std::invalid_argument("petermichl_shift: defined for d = 1 only");
  const int N = model.depth();
  const int step = 3;
  if (residue < 0 || residue >= step)
    throw std::invalid_argument("petermichl_shift: residue out of range");
  // Output pattern over grandchildren, input pattern over children:
  //   (h_{I-} - h_{I+})/sqrt2  and  h_I,   both times 1/sqrt|I|.
  static const double u[4] = {1.0, -1.0, -1.0, 1.0};
  static const double v[2] = {1.0, -1.0};
  std::vector<ShiftBlock> blocks;
  for (int g = residue; g + 2 <= N; g += step) {
    const std::size_t count = model.cubes_at(g);
    const double inv_len = std::ldexp(1.0, g);  // 1/|I|
    for (std::size_t i = 0; i < count; ++i) {
      const CubeId q = cube_from_index(model, g, i);
      const double eps = signs(q);
      if (eps != -1.0 && eps != 0.0 && eps != 1.0)
        throw std::invalid_argument(
            "petermichl_shift: signs must take values in {-1, 0, +1}");
      ShiftBlock b;
      b.cube = q;
      b.m = 2;
      b.n = 1;
      b.table.resize(8);
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 2; ++s) b.table[r * 2 + s] = eps * u[r] * v[s] * inv_len;
      blocks.push_back(std::move(b));
    }
  }
  return HaarShift(model, ComplexityType{2, 1}, step, residue, "petermichl", 0,
                   std::move(blocks));
}

HaarShift random_shift(const ComplexityType& type, int residue,
                       std::uint64_t seed, const FiniteModel& model) {
  const int N = model.depth();
  const int d = model.dimension();
  const int mx = std::max(type.m, type.n);
  const int step = type.kappa();
  if (residue < 0 || residue >= step)
    throw std::invalid_argument("random_shift: residue out of range");
  if (residue + mx > N)
    throw std::invalid_argument("random_shift: no resolvable block generation");
  const std::string family =
      "random_m" + std::to_string(type.m) + "n" + std::to_string(type.n);

  std::vector<ShiftBlock> blocks;
  const std::size_t nr = std::size_t{1} << (d * type.m);
  const std::size_t ns = std::size_t{1} << (d * type.n);
  for (int g = residue; g + mx <= N; g += step) {
    const std::size_t count = model.cubes_at(g);
    const double bound = std::ldexp(1.0, d * g);  // 1/|Q|
    for (std::size_t i = 0; i < count; ++i) {
      ShiftBlock b;
      b.cube = cube_from_index(model, g, i);
      b.m = type.m;
      b.n = type.n;
      b.table.resize(nr * ns);
      for (std::size_t e = 0; e < nr * ns; ++e)
        b.table[e] = bound * keyed_symmetric(seed, static_cast<std::uint64_t>(g),
                                             i, e);
      blocks.push_back(std::move(b));
    }
  }
  HaarShift raw(model, type, step, residue, family, seed, std::move(blocks));
  // The construction-time certificate uses more samples than any downstream
  // check; nested subset seeding then guarantees later checks stay <= 1.
  const double u = unconditionality_check(raw, 64, seed);
  const double scale = (1.05 * u > 1.0) ? 1.0 / (1.05 * u) : 1.0;
  if (scale == 1.0) return raw;
  std::vector<ShiftBlock> scaled = raw.blocks();
  for (auto& b : scaled)
    for (auto& t : b.table) t *= scale;
  return HaarShift(model, type, step, residue, family, seed, std::move(scaled));
}

// --- derived objects --------------------------------------------------------

DenseMatrix assemble_matrix(const HaarShift& shift) {
  const FiniteModel& m = shift.model();
  const std::size_t L = m.leaf_count();
  if (L > 4096)
    throw std::invalid_argument("assemble_matrix: model too large for dense assembly");
  const int N = m.depth();
  const int d = m.dimension();
  DenseMatrix out;
  out.rows = out.cols = L;
  out.a.assign(L * L, 0.0);
  const double vol = m.leaf_volume();
  for (const auto& b : shift.blocks()) {
    const int g = b.cube.generation;
    const std::uint64_t c = cube_index(m, b.cube);
    const std::size_t nr = std::size_t{1} << (d * b.m);
    const std::size_t ns = std::size_t{1} << (d * b.n);
    const int rspan = d * (N - g - b.m);
    const int sspan = d * (N - g - b.n);
    for (std::size_t r = 0; r < nr; ++r) {
      const std::size_t i0 = ((static_cast<std::size_t>(c) << (d * b.m)) + r)
                             << rspan;
      for (std::size_t s = 0; s < ns; ++s) {
        const double val = b.table[r * ns + s] * vol;
        if (val == 0.0) continue;
        const std::size_t j0 = ((static_cast<std::size_t>(c) << (d * b.n)) + s)
                               << sspan;
        for (std::size_t i = i0; i < i0 + (std::size_t{1} << rspan); ++i)
          for (std::size_t j = j0; j < j0 + (std::size_t{1} << sspan); ++j)
            out.a[i * L + j] += val;
      }
    }
  }
  return out;
}

StepFunction apply_weighted(const HaarShift& shift, const StepFunction& f,
                            const Weight& weight) {
  require_same_model(shift.model(), f.model());
  require_same_model(shift.model(), weight.model());
  return shift.apply(pointwise_product(f, weight.dual_density()));
}

double unconditionality_check(const HaarShift& shift, int samples,
                              std::uint64_t seed) {
  if (samples < 0)
    throw std::invalid_argument("unconditionality_check: samples must be >= 0");
  const FiniteModel& m = shift.model();
  const auto& blocks = shift.blocks();
  if (blocks.empty()) return 0.0;
  const int d = m.dimension();

  double best = 0.0;

  // Single blocks.  A lone block maps functions constant on its input cubes
  // to functions constant on its output cubes, so its L2 norm is the top
  // singular value of the table conjugated by the sqrt cube volumes, which is
  // a constant multiple of the raw table's top singular value.
  std::vector<double> single(blocks.size());
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& b = blocks[bi];
    const std::size_t nr = std::size_t{1} << (d * b.m);
    const std::size_t ns = std::size_t{1} << (d * b.n);
    Eigen::MatrixXd t(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(ns));
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t s = 0; s < ns; ++s)
        t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
            b.table[r * ns + s];
    const double smax = t.jacobiSvd().singularValues()(0);
    const int g = b.cube.generation;
    const double scale = std::sqrt(m.cube_volume(g + b.m) * m.cube_volume(g + b.n));
    single[bi] = smax * scale;
    best = std::max(best, single[bi]);
  }

  // Generation slices: blocks of one generation have disjoint inputs and
  // outputs, so the slice norm is the max of its single-block norms.
  // (Already dominated by the loop above.)

  auto masked_norm = [&](const std::vector<char>* mask,
                         std::uint64_t start_key) {
    std::vector<double> tmp;
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      shift.apply_values(in, out, false, mask);
    };
    auto apply_t = [&](const std::vector<double>& in, std::vector<double>& out) {
      shift.apply_values(in, out, true, mask);
    };
    const PowerIterationOptions opts{1e-11, 50000, start_key};
    return power_iteration(m.leaf_count(), apply, apply_t, opts).value;
  };

  // Full collection.
  best = std::max(best, masked_norm(nullptr, keyed_bits(seed, 0xf011u)));

  // Seeded random subcollections, nested in the sample index.
  std::vector<char> mask(blocks.size());
  for (int t = 0; t < samples; ++t) {
    for (std::size_t bi = 0; bi < blocks.size(); ++bi)
      mask[bi] = static_cast<char>(
          keyed_bits(seed, 0x5eaau, static_cast<std::uint64_t>(t), bi) & 1u);
    best = std::max(best,
                    masked_norm(&mask, keyed_bits(seed, 0xbeefu,
                                                  static_cast<std::uint64_t>(t))));
  }
  return best;
}

double kernel_decay_check(const HaarShift& shift) {
  const FiniteModel& m = shift.model();
  const std::size_t L = m.leaf_count();
  if (L > 4096)
    throw std::invalid_argument("kernel_decay_check: model too large");
  const int d = m.dimension();
  std::vector<std::array<double, 3>> centers(L);
  for (std::size_t i = 0; i < L; ++i) centers[i] = leaf_center(m, i);
  double best = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      if (i == j) continue;
      const double k = shift.kernel_value(i, j);
      if (k == 0.0) continue;
      double dist2 = 0.0;
      for (int s = 0; s < d; ++s) {
        const double t = centers[i][static_cast<std::size_t>(s)] -
                         centers[j][static_cast<std::size_t>(s)];
        dist2 += t * t;
      }
      best = std::max(best, std::fabs(k) * std::pow(std::sqrt(dist2), d));
    }
  }
  return best;
}

HaarShift build_shift(const ShiftSpec& spec, const FiniteModel& model) {
  if (spec.type == "haar_multiplier") {
    if (spec.signs == "random")
      return haar_multiplier(model, seeded_real_signs(spec.seed));
    return haar_multiplier(model, constant_signs(spec.sign_value));
  }
  if (spec.type == "petermichl") {
    if (spec.signs == "random")
      return petermichl_shift(model, seeded_ternary_signs(spec.seed),
                              spec.residue);
    return petermichl_shift(model, constant_signs(spec.sign_value),
                            spec.residue);
  }
  if (spec.type == "random")
    return random_shift(ComplexityType{spec.m, spec.n}, spec.residue, spec.seed,
                        model);
  throw std::invalid_argument("build_shift: unknown type '" + spec.type + "'");
}

}  // namespace dyadic
