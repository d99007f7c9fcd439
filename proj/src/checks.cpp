#include "dyadic/checks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dyadic/corona.hpp"
#include "dyadic/martingale.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

namespace {

StepFunction keyed_function(const FiniteModel& m, std::uint64_t seed,
                            std::uint64_t tag, std::uint64_t k) {
  std::vector<double> v(m.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = keyed_symmetric(seed, tag, k, i);
  return StepFunction(m, std::move(v));
}

double rel_gap(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

double sup_rel(const StepFunction& a, const StepFunction& b) {
  double scale = 1e-300, gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    scale = std::max({scale, std::fabs(a[i]), std::fabs(b[i])});
  for (std::size_t i = 0; i < a.size(); ++i)
    gap = std::max(gap, std::fabs(a[i] - b[i]));
  return gap / scale;
}

using CheckFn = std::function<CheckResult(const CheckContext&)>;

CheckResult make_result(const std::string& name, double statistic, double bound,
                        const std::string& detail = "") {
  CheckResult r;
  r.name = name;
  r.statistic = statistic;
  r.bound = bound;
  r.passed = statistic <= bound;
  r.detail = detail;
  return r;
}

// Worst statistic over the corpus together with the offending label.
template <typename Fn>
CheckResult corpus_max(const std::string& name, const CheckContext& ctx,
                       double bound, Fn&& statistic) {
  const std::vector<CorpusItem> corpus = standard_corpus(ctx);
  double worst = 0.0;
  std::string at = "all skipped";
  bool any = false;
  for (const auto& item : corpus) {
    double s = 0.0;
    if (!statistic(item, s)) continue;
    any = true;
    if (s >= worst) {
      worst = s;
      at = item.label;
    }
  }
  if (!any) {
    CheckResult r = make_result(name, 0.0, bound, at);
    r.passed = true;
    return r;
  }
  return make_result(name, worst, bound, "worst at " + at);
}

CheckResult check_expectation_algebra(const CheckContext& ctx) {
  return corpus_max(
      "expectation-algebra", ctx, 1e-12,
      [&](const CorpusItem& item, double& out) {
        const Measure mu = item.weight.dual_measure();
        const int N = item.f.model().depth();
        const int ga = std::min(2, N), gb = std::min(5, N);
        const StepFunction ea = expectation(item.f, mu, ga);
        const StepFunction eb = expectation(item.f, mu, gb);
        double worst = sup_rel(expectation(ea, mu, ga), ea);
        worst = std::max(worst, sup_rel(expectation(eb, mu, ga), ea));
        worst = std::max(worst, sup_rel(expectation(ea, mu, gb), ea));
        // Disjoint difference bands are orthogonal.
        if (gb > ga && N > gb) {
          const StepFunction d1 = difference(item.f, mu, gb, ga);
          const StepFunction d2 = difference(item.f, mu, N, gb);
          const double n1 = norm_l2(d1, mu), n2 = norm_l2(d2, mu);
          const double ip = inner_product(d1, d2, mu);
          worst = std::max(worst, std::fabs(ip) / std::max(n1 * n2, 1e-300));
        }
        out = worst;
        return true;
      });
}

CheckResult check_martingale_parseval(const CheckContext& ctx) {
  return corpus_max(
      "martingale-parseval", ctx, 1e-12,
      [&](const CorpusItem& item, double& out) {
        const Measure mu = item.weight.dual_measure();
        const MartingaleLadder ladder(item.f.model(), mu, 0,
                                      item.shift.step());
        const auto parts = ladder.decompose(item.f);
        double pieces = std::pow(norm_l2(parts.coarse, mu), 2) +
                        std::pow(norm_l2(parts.residual, mu), 2);
        for (const auto& piece : parts.differences)
          pieces += std::pow(norm_l2(piece, mu), 2);
        const double total = std::pow(norm_l2(item.f, mu), 2);
        double worst = rel_gap(total, pieces);
        worst = std::max(
            worst, sup_rel(MartingaleLadder::recombine(parts), item.f));
        out = worst;
        return true;
      });
}

CheckResult check_bessel_gap(const CheckContext& ctx) {
  return corpus_max(
      "bessel-gap", ctx, 1e-12,
      [&](const CorpusItem& item, double& out) {
        const Measure mu = item.weight.dual_measure();
        const MartingaleLadder ladder(item.f.model(), mu, 0,
                                      item.shift.step());
        const double gap = ladder.bessel_gap(item.f);
        const auto parts = ladder.decompose(item.f);
        const double explained = std::pow(norm_l2(parts.coarse, mu), 2) +
                                 std::pow(norm_l2(parts.residual, mu), 2);
        const double total = std::pow(norm_l2(item.f, mu), 2);
        double worst = std::max(0.0, -gap / std::max(total, 1e-300));
        worst = std::max(worst,
                         std::fabs(gap - explained) / std::max(total, 1e-300));
        out = worst;
        return true;
      });
}

CheckResult check_doob_maximal(const CheckContext& ctx) {
  return corpus_max(
      "doob-maximal", ctx, 2.0 * (1.0 + 1e-12),
      [&](const CorpusItem& item, double& out) {
        const Measure mu = item.weight.dual_measure();
        const StepFunction mf = maximal_function(absolute_value(item.f), mu);
        const double nf = norm_l2(item.f, mu);
        out = nf > 0.0 ? norm_l2(mf, mu) / nf : 0.0;
        return true;
      });
}

CheckResult check_carleson_packing(const CheckContext& ctx) {
  const double bound = ctx.threshold / (ctx.threshold - 1.0) + 1e-9;
  return corpus_max(
      "carleson-packing", ctx, bound,
      [&](const CorpusItem& item, double& out) {
        const Measure sigma = item.weight.dual_measure();
        const auto forest =
            build_stopping_cubes(item.f, sigma, ctx.threshold,
                                 item.shift.step(), item.shift.residue());
        out = carleson_check(forest, sigma).packing;
        return true;
      });
}

CheckResult check_quasiorthogonality(const CheckContext& ctx) {
  // Mass times squared average over the stopping family is controlled by the
  // sparse-selection factor times the maximal function bound.
  const double bound =
      4.0 * ctx.threshold / (ctx.threshold - 1.0) + 1e-9;
  return corpus_max(
      "quasiorthogonality", ctx, bound,
      [&](const CorpusItem& item, double& out) {
        const Measure sigma = item.weight.dual_measure();
        const auto forest =
            build_stopping_cubes(item.f, sigma, ctx.threshold,
                                 item.shift.step(), item.shift.residue());
        out = carleson_check(forest, sigma).second_moment;
        return true;
      });
}

CheckResult check_corona_normalization(const CheckContext& ctx) {
  return corpus_max(
      "corona-normalization", ctx, ctx.threshold * (1.0 + 1e-12),
      [&](const CorpusItem& item, double& out) {
        const Measure sigma = item.weight.dual_measure();
        const auto forest =
            build_stopping_cubes(item.f, sigma, ctx.threshold,
                                 item.shift.step(), item.shift.residue());
        out = corona_normalization(forest, item.f, sigma);
        return true;
      });
}

CheckResult check_bilinear_identity(const CheckContext& ctx) {
  return corpus_max("bilinear-identity", ctx, 1e-10,
                    [&](const CorpusItem& item, double& out) {
                      out = decompose_form(item.shift, item.weight, item.f,
                                           item.g)
                                .gap;
                      return true;
                    });
}

CheckResult check_nested_energy(const CheckContext& ctx) {
  return corpus_max(
      "nested-energy", ctx, 1e-10,
      [&](const CorpusItem& item, double& out) {
        const CoronaDiagnostics diag =
            corona_diagnostics(item.shift, item.weight, item.f);
        const double lhs = diag.norm_u * diag.norm_u;
        const double rhs = diag.diagonal + 2.0 * diag.nested;
        const double scale =
            std::max({lhs, diag.diagonal + 2.0 * std::fabs(diag.nested),
                      1e-300});
        out = std::fabs(lhs - rhs) / scale;
        return true;
      });
}

CheckResult check_sign_average(const CheckContext& ctx) {
  return corpus_max(
      "sign-average", ctx, 1e-10,
      [&](const CorpusItem& item, double& out) {
        const SignAverageReport rep = sign_average_check(
            item.shift, item.weight, item.f, 64, ctx.seed);
        out = rel_gap(rep.averaged, rep.diagonal);
        return true;
      });
}

CheckResult check_kernel_decay(const CheckContext& ctx) {
  const double d = static_cast<double>(ctx.dimension);
  const double bound = 2.0 * std::pow(std::sqrt(d), d) * (1.0 + 1e-12);
  return corpus_max(
      "kernel-decay", ctx, bound,
      [&](const CorpusItem& item, double& out) {
        if (item.shift.model().leaf_count() > 4096) return false;
        out = kernel_decay_check(item.shift);
        return true;
      });
}

CheckResult check_unconditionality(const CheckContext& ctx) {
  return corpus_max(
      "unconditionality", ctx, 1.0 + 1e-9,
      [&](const CorpusItem& item, double& out) {
        out = unconditionality_check(item.shift, 50, item.shift.seed());
        return true;
      });
}

CheckResult check_testing_bound(const CheckContext& ctx) {
  return corpus_max(
      "testing-bound", ctx, 1.0 + 1e-9,
      [&](const CorpusItem& item, double& out) {
        const IndicatorRatios ratios =
            indicator_test_ratios(item.shift, item.weight);
        const NormResult norm =
            weighted_norm(item.shift, item.weight, ctx.power);
        const double top = std::max(ratios.max_forward, ratios.max_adjoint);
        out = top / std::max(norm.value, 1e-300);
        if (norm.value == 0.0 && top == 0.0) out = 0.0;
        return true;
      });
}

CheckResult check_duality(const CheckContext& ctx) {
  return corpus_max("duality", ctx, 1e-9,
                    [&](const CorpusItem& item, double& out) {
                      out = duality_check(item.shift, item.weight, ctx.power);
                      return true;
                    });
}

CheckResult check_norm_crosscheck(const CheckContext& ctx) {
  return corpus_max(
      "norm-crosscheck", ctx, 1e-8,
      [&](const CorpusItem& item, double& out) {
        if (item.shift.model().leaf_count() > 1024) return false;
        const double direct = svd_norm(item.shift, item.weight);
        const double iterated =
            weighted_norm(item.shift, item.weight, ctx.power).value;
        out = rel_gap(direct, iterated);
        return true;
      });
}

CheckResult check_linear_bound(const CheckContext& ctx) {
  const double stat = linear_bound_statistic(ctx);
  std::ifstream in(ctx.baseline_path);
  if (!in) {
    CheckResult r = make_result("linear-bound", stat, 0.0,
                                "baseline file missing: " + ctx.baseline_path);
    r.passed = false;
    return r;
  }
  nlohmann::json j;
  in >> j;
  const std::string key = check_context_key(ctx);
  if (!j.contains("linear_bound") || !j["linear_bound"].contains(key)) {
    CheckResult r = make_result("linear-bound", stat, 0.0,
                                "no baseline entry for " + key);
    r.passed = false;
    return r;
  }
  const double base = j["linear_bound"][key].get<double>();
  return make_result("linear-bound", stat, base * 1.05,
                     "baseline " + std::to_string(base) + " at " + key);
}

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> table = {
      {"expectation-algebra", check_expectation_algebra},
      {"martingale-parseval", check_martingale_parseval},
      {"bessel-gap", check_bessel_gap},
      {"doob-maximal", check_doob_maximal},
      {"carleson-packing", check_carleson_packing},
      {"quasiorthogonality", check_quasiorthogonality},
      {"corona-normalization", check_corona_normalization},
      {"bilinear-identity", check_bilinear_identity},
      {"nested-energy", check_nested_energy},
      {"sign-average", check_sign_average},
      {"kernel-decay", check_kernel_decay},
      {"unconditionality", check_unconditionality},
      {"testing-bound", check_testing_bound},
      {"duality", check_duality},
      {"norm-crosscheck", check_norm_crosscheck},
      {"linear-bound", check_linear_bound},
  };
  return table;
}

}  // namespace

std::vector<CorpusItem> standard_corpus(const CheckContext& ctx) {
  const FiniteModel model(ctx.dimension, ctx.depth);
  std::vector<CorpusItem> corpus;
  for (int k = 0; k < ctx.instances; ++k) {
    const std::uint64_t ks = keyed_bits(ctx.seed, 0xc0bu, static_cast<std::uint64_t>(k));

    auto shift = [&]() -> HaarShift {
      switch (k % 5) {
        case 0:
          return haar_multiplier(model, constant_signs(1.0));
        case 1:
          return haar_multiplier(model, seeded_real_signs(ks));
        case 2:
          if (ctx.dimension == 1 && ctx.depth >= 2)
            return petermichl_shift(model, constant_signs(1.0), 0);
          return random_shift(ComplexityType{1, 1}, 0, ks, model);
        case 3:
          return random_shift(ComplexityType{1, 1}, 0, ks, model);
        default: {
          const ComplexityType type{std::min(2, ctx.depth), 1};
          return random_shift(type, k % type.kappa(), ks, model);
        }
      }
    }();

    auto weight = [&]() -> Weight {
      switch (k % 4) {
        case 0:
          return constant_weight(model, 1.0);
        case 1:
          return power_weight(k % 8 < 4 ? 0.6 : -0.6, model);
        case 2:
          return random_a2_weight(4.0 * (1.0 + k), ks ^ 0x11u, model);
        default:
          return power_weight(-0.9, model);
      }
    }();

    std::ostringstream label;
    label << shift.family() << "/" << (k % 4 == 0   ? "const"
                                       : k % 4 == 1 ? "power"
                                       : k % 4 == 2 ? "random"
                                                    : "power-steep")
          << "#" << k;
    corpus.push_back(CorpusItem{label.str(), std::move(shift),
                                std::move(weight),
                                keyed_function(model, ctx.seed, 0xf00du, k),
                                keyed_function(model, ctx.seed, 0x6006u, k)});
  }
  return corpus;
}

std::string check_context_key(const CheckContext& ctx) {
  std::ostringstream os;
  os << "d" << ctx.dimension << "_N" << ctx.depth << "_s" << ctx.seed << "_i"
     << ctx.instances;
  return os.str();
}

double linear_bound_statistic(const CheckContext& ctx) {
  const std::vector<CorpusItem> corpus = standard_corpus(ctx);
  double worst = 0.0;
  for (const auto& item : corpus) {
    const double a2 = a2_constant(item.weight, item.weight.model()).constant;
    const double norm = weighted_norm(item.shift, item.weight, ctx.power).value;
    worst = std::max(worst, norm / a2);
  }
  return worst;
}

std::vector<std::string> available_checks() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

CheckResult run_check(const std::string& name, const CheckContext& ctx) {
  const auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("run_check: unknown check '" + name + "'");
  return it->second(ctx);
}

std::vector<CheckResult> run_all_checks(const CheckContext& ctx) {
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : registry()) results.push_back(fn(ctx));
  return results;
}

}  // namespace dyadic
