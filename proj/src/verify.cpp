#include "dyadic/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dyadic/rng.hpp"

namespace dyadic {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

NormResult power_iteration(std::size_t dim, const LinearMap& apply,
                           const LinearMap& apply_adjoint,
                           const PowerIterationOptions& opts) {
  if (dim == 0) return {};
  std::vector<double> v(dim), av, mv(dim);
  for (std::size_t i = 0; i < dim; ++i)
    v[i] = keyed_uniform01(opts.seed, 0x9041u, i) - 0.5;
  {
    const double n = nrm2(v);
    if (n == 0.0) v[0] = 1.0;
    else
      for (double& x : v) x /= n;
  }

  NormResult result;
  for (long it = 1; it <= opts.max_iterations; ++it) {
    apply(v, av);
    apply_adjoint(av, mv);
    const double lambda = dot(av, av);  // Rayleigh quotient of the normal map
    if (!std::isfinite(lambda))
      throw ConvergenceError("power_iteration: iterate left the finite range");
    double resid = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = mv[i] - lambda * v[i];
      resid += r * r;
    }
    resid = std::sqrt(resid);

    result.iterations = it;
    result.value = std::sqrt(lambda);
    // |sqrt(lambda) - sigma| <= resid / (2 sqrt(lambda)) for some exact
    // singular value sigma, by Weyl's inequality on the normal map.
    result.residual = result.value > 0.0 ? resid / (2.0 * result.value) : 0.0;
    if (resid <= opts.tolerance * lambda) return result;

    const double n = nrm2(mv);
    if (n == 0.0) return {0.0, it, 0.0};
    for (std::size_t i = 0; i < dim; ++i) v[i] = mv[i] / n;
  }
  return result;  // residual reports how far the certificate got
}

NormResult weighted_norm(const HaarShift& shift, const Weight& weight,
                         const PowerIterationOptions& opts) {
  const FiniteModel& m = shift.model();
  require_same_model(m, weight.model());
  const std::size_t L = m.leaf_count();
  std::vector<double> sw(L), ss(L);
  for (std::size_t i = 0; i < L; ++i) {
    sw[i] = std::sqrt(weight.density()[i]);
    ss[i] = std::sqrt(weight.dual_density()[i]);
  }
  std::vector<double> tmp(L);
  const LinearMap fwd = [&](const std::vector<double>& in,
                            std::vector<double>& out) {
    for (std::size_t i = 0; i < L; ++i) tmp[i] = in[i] * ss[i];
    shift.apply_values(tmp, out, false, nullptr);
    for (std::size_t i = 0; i < L; ++i) out[i] *= sw[i];
  };
  const LinearMap adj = [&](const std::vector<double>& in,
                            std::vector<double>& out) {
    for (std::size_t i = 0; i < L; ++i) tmp[i] = in[i] * sw[i];
    shift.apply_values(tmp, out, true, nullptr);
    for (std::size_t i = 0; i < L; ++i) out[i] *= ss[i];
  };
  const NormResult r = power_iteration(L, fwd, adj, opts);
  if (r.residual > opts.tolerance * std::max(r.value, 1e-300))
    throw ConvergenceError(
        "weighted_norm: certificate " + std::to_string(r.residual) +
        " after " + std::to_string(r.iterations) + " iterations");
  return r;
}

double svd_norm(const HaarShift& shift, const Weight& weight) {
  const FiniteModel& m = shift.model();
  require_same_model(m, weight.model());
  const std::size_t L = m.leaf_count();
  if (L > 2048) throw std::invalid_argument("svd_norm: model too large");
  const DenseMatrix a = assemble_matrix(shift);
  Eigen::MatrixXd b(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
  for (std::size_t i = 0; i < L; ++i) {
    const double wi = std::sqrt(weight.density()[i]);
    for (std::size_t j = 0; j < L; ++j)
      b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          wi * a.a[i * L + j] * std::sqrt(weight.dual_density()[j]);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b);
  return svd.singularValues()(0);
}

double duality_check(const HaarShift& shift, const Weight& weight,
                     const PowerIterationOptions& opts) {
  const NormResult a = weighted_norm(shift, weight, opts);
  PowerIterationOptions dual_opts = opts;
  dual_opts.seed = mix64(opts.seed ^ 0xd0a1u);
  const NormResult b =
      weighted_norm(shift.adjoint(), dual_weight(weight), dual_opts);
  const double scale = std::max({a.value, b.value, 1e-300});
  return std::fabs(a.value - b.value) / scale;
}

IndicatorRatios indicator_test_ratios(const HaarShift& shift,
                                      const Weight& weight) {
  const FiniteModel& m = shift.model();
  require_same_model(m, weight.model());
  const int N = m.depth();
  const double vol = m.leaf_volume();
  const std::vector<double> ss = cube_sums(weight.dual_density());
  const std::vector<double> ws = cube_sums(weight.density());

  IndicatorRatios ratios;
  std::vector<double> in(m.leaf_count()), out;
  for (int g = 0; g <= N; ++g) {
    for (std::size_t q = 0; q < m.cubes_at(g); ++q) {
      const auto [lo, hi] = cube_leaf_range(m, cube_from_index(m, g, q));
      const double mass_s = cube_sum(ss, m, g, q);
      const double mass_w = cube_sum(ws, m, g, q);

      std::fill(in.begin(), in.end(), 0.0);
      for (std::size_t i = lo; i < hi; ++i) in[i] = weight.dual_density()[i];
      shift.apply_values(in, out, false, nullptr);
      double energy = 0.0;
      for (std::size_t i = lo; i < hi; ++i)
        energy += out[i] * out[i] * weight.density()[i] * vol;
      const double fwd = std::sqrt(energy / mass_s);
      if (fwd > ratios.max_forward) {
        ratios.max_forward = fwd;
        ratios.argmax_forward = cube_from_index(m, g, q);
      }

      std::fill(in.begin(), in.end(), 0.0);
      for (std::size_t i = lo; i < hi; ++i) in[i] = weight.density()[i];
      shift.apply_values(in, out, true, nullptr);
      energy = 0.0;
      for (std::size_t i = lo; i < hi; ++i)
        energy += out[i] * out[i] * weight.dual_density()[i] * vol;
      const double bwd = std::sqrt(energy / mass_w);
      if (bwd > ratios.max_adjoint) {
        ratios.max_adjoint = bwd;
        ratios.argmax_adjoint = cube_from_index(m, g, q);
      }
    }
  }
  return ratios;
}

Weight build_weight(const WeightSpec& spec, const FiniteModel& model) {
  if (spec.family == "power") return power_weight(spec.param, model);
  if (spec.family == "random")
    return random_a2_weight(spec.param, spec.seed, model);
  if (spec.family == "constant") return constant_weight(model, spec.param);
  throw std::invalid_argument("build_weight: unknown family '" + spec.family +
                              "'");
}

std::vector<SweepRow> a2_sweep(const SweepConfig& config) {
  const FiniteModel model(config.dimension, config.depth);
  const HaarShift shift = build_shift(config.shift, model);
  const int jobs = std::max(1, config.jobs);

  std::vector<SweepRow> rows(config.weights.size());
  auto worker = [&](std::size_t first) {
    for (std::size_t i = first; i < rows.size();
         i += static_cast<std::size_t>(jobs)) {
      SweepRow& row = rows[i];
      const WeightSpec& wspec = config.weights[i];
      row.param = wspec.param;
      row.kappa = shift.type().kappa();
      row.dimension = config.dimension;
      row.depth = config.depth;
      row.shift_id = shift.family();
      row.seed = wspec.seed;
      try {
        const Weight weight = build_weight(wspec, model);
        row.a2 = a2_constant(weight, model).constant;
        PowerIterationOptions opts = config.power;
        opts.seed = mix64(config.power.seed ^ keyed_bits(wspec.seed, i));
        const NormResult r = weighted_norm(shift, weight, opts);
        row.norm = r.value;
        row.residual = r.residual;
        row.iterations = r.iterations;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.a2 = row.a2 > 0.0 ? row.a2 : std::numeric_limits<double>::quiet_NaN();
        row.norm = std::numeric_limits<double>::quiet_NaN();
        row.residual = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };

  if (jobs == 1 || rows.size() <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back(worker, static_cast<std::size_t>(t));
    for (auto& th : pool) th.join();
  }
  return rows;
}

SlopeFit fit_slope(const std::vector<SweepRow>& rows, double a2_min) {
  std::vector<double> x, y;
  for (const auto& row : rows) {
    if (!row.error.empty()) continue;
    if (!(row.a2 >= a2_min) || !(row.norm > 0.0)) continue;
    if (!std::isfinite(row.a2) || !std::isfinite(row.norm)) continue;
    x.push_back(std::log(row.a2));
    y.push_back(std::log(row.norm));
  }
  if (x.size() < 3)
    throw std::invalid_argument("fit_slope: need at least 3 usable rows");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("fit_slope: degenerate abscissa");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.count = static_cast<int>(x.size());
  return fit;
}

}  // namespace dyadic
