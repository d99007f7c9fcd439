// Command line front end for the dyadic model laboratory: weight constants,
// shift construction, verification checks, norm sweeps, and form reports.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/checks.hpp"
#include "dyadic/corona.hpp"
#include "dyadic/model.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/serialize.hpp"
#include "dyadic/shift.hpp"
#include "dyadic/svg.hpp"
#include "dyadic/verify.hpp"
#include "dyadic/weights.hpp"

namespace {

constexpr int kExitFailure = 1;  // a bound or check did not hold
constexpr int kExitUsage = 2;    // bad flags, config, or input files

std::uint64_t base_seed() {
  const char* env = std::getenv("DYADIC_LAB_SEED");
  if (!env || !*env) return 2026;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw CLI::ValidationError("DYADIC_LAB_SEED must be an unsigned integer");
  return v;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return nlohmann::json::parse(in);
}

void dump_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << j.dump(2) << '\n';
}

dyadic::StepFunction keyed_function(const dyadic::FiniteModel& model,
                                    std::uint64_t seed, std::uint64_t tag) {
  std::vector<double> v(model.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = dyadic::keyed_symmetric(seed, tag, i);
  return dyadic::StepFunction(model, std::move(v));
}

struct ModelArgs {
  int dimension = 1;
  int depth = 8;
  void attach(CLI::App* app) {
    app->add_option("--dim", dimension, "spatial dimension (1..3)")
        ->check(CLI::Range(1, 3));
    app->add_option("--depth", depth, "number of refinement generations")
        ->check(CLI::Range(1, 24));
  }
  dyadic::FiniteModel build() const {
    return dyadic::FiniteModel(dimension, depth);
  }
};

struct ShiftArgs {
  dyadic::ShiftSpec spec;
  void attach(CLI::App* app, std::uint64_t seed_default) {
    spec.seed = seed_default;
    app->add_option("--type", spec.type,
                    "shift family: haar_multiplier, petermichl, random")
        ->check(CLI::IsMember({"haar_multiplier", "petermichl", "random"}));
    app->add_option("--m", spec.m, "output complexity")->check(CLI::Range(0, 8));
    app->add_option("--n", spec.n, "input complexity")->check(CLI::Range(0, 8));
    app->add_option("--residue", spec.residue, "generation residue class");
    app->add_option("--shift-seed", spec.seed, "seed for seeded tables/signs");
    app->add_option("--signs", spec.signs, "sign pattern: constant or random")
        ->check(CLI::IsMember({"constant", "random"}));
    app->add_option("--sign-value", spec.sign_value,
                    "sign used with --signs constant");
  }
};

struct WeightArgs {
  dyadic::WeightSpec spec;
  void attach(CLI::App* app, std::uint64_t seed_default) {
    spec.family = "power";
    spec.param = 0.6;
    spec.seed = seed_default;
    app->add_option("--family", spec.family,
                    "weight family: power, random, constant")
        ->check(CLI::IsMember({"power", "random", "constant"}));
    app->add_option("--param", spec.param,
                    "exponent, target constant, or constant value");
    app->add_option("--weight-seed", spec.seed, "seed for random weights");
  }
};

int cmd_a2(const ModelArgs& margs, const WeightArgs& wargs,
           const std::string& json_path) {
  const dyadic::FiniteModel model = margs.build();
  const dyadic::Weight weight = dyadic::build_weight(wargs.spec, model);
  const dyadic::A2Report report = dyadic::a2_constant(weight, model);
  std::cout << "a2 = " << dyadic::format_double(report.constant)
            << " attained at generation " << report.argmax.generation << '\n';
  if (!json_path.empty()) {
    nlohmann::json j = dyadic::a2_report_to_json(report);
    j["weight"] = wargs.spec;
    j["dimension"] = margs.dimension;
    j["depth"] = margs.depth;
    dump_json(json_path, j);
  }
  return 0;
}

int cmd_build_shift(const ModelArgs& margs, const ShiftArgs& sargs,
                    int samples, const std::string& json_path,
                    const std::string& matrix_path) {
  const dyadic::FiniteModel model = margs.build();
  const dyadic::HaarShift shift = dyadic::build_shift(sargs.spec, model);
  std::cout << "family " << shift.family() << ", blocks "
            << shift.blocks().size() << ", step " << shift.step()
            << ", residue " << shift.residue() << ", kappa "
            << shift.type().kappa() << '\n';
  nlohmann::json j{{"spec", sargs.spec},
                   {"dimension", margs.dimension},
                   {"depth", margs.depth},
                   {"family", shift.family()},
                   {"blocks", shift.blocks().size()},
                   {"generations", shift.block_generations()},
                   {"kappa", shift.type().kappa()}};
  if (samples > 0) {
    const double u =
        dyadic::unconditionality_check(shift, samples, shift.seed());
    std::cout << "unconditionality over " << samples << " subcollections: "
              << dyadic::format_double(u) << '\n';
    j["unconditionality"] = u;
    j["samples"] = samples;
  }
  if (!matrix_path.empty()) {
    std::ofstream out(matrix_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + matrix_path);
    dyadic::write_matrix(out, dyadic::assemble_matrix(shift));
  }
  if (!json_path.empty()) dump_json(json_path, j);
  return 0;
}

int cmd_verify(dyadic::CheckContext ctx, const std::vector<std::string>& only,
               const std::string& json_path, bool write_baseline) {
  if (write_baseline) {
    nlohmann::json baseline;
    {
      std::ifstream in(ctx.baseline_path);
      if (in) in >> baseline;
    }
    const double stat = dyadic::linear_bound_statistic(ctx);
    baseline["linear_bound"][dyadic::check_context_key(ctx)] = stat;
    dump_json(ctx.baseline_path, baseline);
    std::cout << "baseline " << dyadic::check_context_key(ctx) << " = "
              << dyadic::format_double(stat) << '\n';
  }

  std::vector<std::string> names =
      only.empty() ? dyadic::available_checks() : only;
  std::vector<dyadic::CheckResult> results;
  bool all_passed = true;
  for (const auto& name : names) {
    const dyadic::CheckResult r = dyadic::run_check(name, ctx);
    all_passed = all_passed && r.passed;
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name
              << "  statistic=" << dyadic::format_double(r.statistic)
              << "  bound=" << dyadic::format_double(r.bound);
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << '\n';
    results.push_back(r);
  }
  if (!json_path.empty()) {
    nlohmann::json j{{"context", ctx}, {"results", results},
                     {"passed", all_passed}};
    dump_json(json_path, j);
  }
  return all_passed ? 0 : kExitFailure;
}

int cmd_sweep(dyadic::SweepConfig config, const std::string& out_path,
              const std::string& fit_path, const std::string& svg_path,
              double a2_min, std::optional<double> max_slope) {
  const std::vector<dyadic::SweepRow> rows = dyadic::a2_sweep(config);
  if (out_path.empty()) {
    dyadic::write_sweep_csv(std::cout, rows);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    dyadic::write_sweep_csv(out, rows);
  }
  for (const auto& row : rows)
    if (!row.error.empty())
      std::cerr << "row param=" << dyadic::format_double(row.param)
                << " failed: " << row.error << '\n';

  const bool need_fit =
      !fit_path.empty() || !svg_path.empty() || max_slope.has_value();
  if (!need_fit) return 0;

  const dyadic::SlopeFit fit = dyadic::fit_slope(rows, a2_min);
  std::cout << "slope " << dyadic::format_double(fit.slope) << " over "
            << fit.count << " rows (r2 " << dyadic::format_double(fit.r2)
            << ")\n";
  if (!fit_path.empty()) {
    nlohmann::json j = fit;
    j["a2_min"] = a2_min;
    dump_json(fit_path, j);
  }
  if (!svg_path.empty()) {
    std::ofstream out(svg_path);
    if (!out) throw std::invalid_argument("cannot write " + svg_path);
    dyadic::write_loglog_plot(out, rows, &fit);
  }
  if (max_slope && fit.slope > *max_slope) {
    std::cerr << "slope " << dyadic::format_double(fit.slope) << " exceeds "
              << dyadic::format_double(*max_slope) << '\n';
    return kExitFailure;
  }
  return 0;
}

int cmd_decompose(const ModelArgs& margs, const ShiftArgs& sargs,
                  const WeightArgs& wargs, std::uint64_t fseed,
                  double threshold, const std::string& json_path) {
  const dyadic::FiniteModel model = margs.build();
  const dyadic::HaarShift shift = dyadic::build_shift(sargs.spec, model);
  const dyadic::Weight weight = dyadic::build_weight(wargs.spec, model);
  const dyadic::StepFunction f = keyed_function(model, fseed, 0xf00du);
  const dyadic::StepFunction g = keyed_function(model, fseed, 0x6006u);

  const dyadic::BilinearReport form =
      dyadic::decompose_form(shift, weight, f, g);
  const dyadic::CoronaDiagnostics diag =
      dyadic::corona_diagnostics(shift, weight, f);
  const dyadic::StoppingForest forest = dyadic::build_stopping_cubes(
      f, weight.dual_measure(), threshold, shift.step(), shift.residue());
  const dyadic::CarlesonStats stats =
      dyadic::carleson_check(forest, weight.dual_measure());

  std::cout << "form total " << dyadic::format_double(form.total)
            << ", recombined " << dyadic::format_double(form.recombined)
            << ", gap " << dyadic::format_double(form.gap) << '\n';
  std::cout << "stopping cubes " << forest.stopping.size() << ", packing "
            << dyadic::format_double(stats.packing) << ", chain depth "
            << stats.overlap << '\n';
  if (!json_path.empty()) {
    nlohmann::json j{{"form", form},
                     {"diagnostics",
                      {{"diagonal", diag.diagonal},
                       {"nested", diag.nested},
                       {"norm_u", diag.norm_u}}},
                     {"forest", dyadic::forest_to_json(forest)},
                     {"carleson",
                      {{"packing", stats.packing},
                       {"overlap", stats.overlap},
                       {"second_moment", stats.second_moment}}}};
    dump_json(json_path, j);
  }
  return 0;
}

int cmd_report(const std::string& in_path, double a2_min,
               const std::string& fit_path, const std::string& svg_path,
               std::optional<double> max_slope) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + in_path);
  const std::vector<dyadic::SweepRow> rows = dyadic::read_sweep_csv(in);
  const dyadic::SlopeFit fit = dyadic::fit_slope(rows, a2_min);
  std::cout << "rows " << rows.size() << ", fitted slope "
            << dyadic::format_double(fit.slope) << " (r2 "
            << dyadic::format_double(fit.r2) << ") over " << fit.count
            << " rows with a2 >= " << dyadic::format_double(a2_min) << '\n';
  if (!fit_path.empty()) {
    nlohmann::json j = fit;
    j["a2_min"] = a2_min;
    dump_json(fit_path, j);
  }
  if (!svg_path.empty()) {
    std::ofstream out(svg_path);
    if (!out) throw std::invalid_argument("cannot write " + svg_path);
    dyadic::write_loglog_plot(out, rows, &fit);
  }
  if (max_slope && fit.slope > *max_slope) {
    std::cerr << "slope " << dyadic::format_double(fit.slope) << " exceeds "
              << dyadic::format_double(*max_slope) << '\n';
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical laboratory for dyadic models: weights, shift operators, "
      "and weighted norm experiments.  DYADIC_LAB_SEED overrides the "
      "default seed of every --*-seed option."};
  app.require_subcommand(1);

  try {
    const std::uint64_t seed0 = base_seed();

    // a2
    auto* a2 = app.add_subcommand("a2", "a2 constant of a weight");
    ModelArgs a2_model;
    WeightArgs a2_weight;
    std::string a2_json;
    a2_model.attach(a2);
    a2_weight.attach(a2, seed0);
    a2->add_option("--json", a2_json, "write the report as JSON");

    // build-shift
    auto* bs = app.add_subcommand("build-shift", "construct a shift operator");
    ModelArgs bs_model;
    ShiftArgs bs_shift;
    int bs_samples = 0;
    std::string bs_json, bs_matrix;
    bs_model.attach(bs);
    bs_shift.attach(bs, seed0);
    bs->add_option("--samples", bs_samples,
                   "subcollections for the unconditionality statistic");
    bs->add_option("--json", bs_json, "write a summary as JSON");
    bs->add_option("--matrix", bs_matrix, "dump the dense matrix (binary)");

    // verify
    auto* vf = app.add_subcommand("verify", "run verification checks");
    dyadic::CheckContext vf_ctx;
    vf_ctx.seed = seed0;
    std::string vf_config, vf_json;
    std::vector<std::string> vf_only;
    bool vf_write_baseline = false;
    vf->add_option("--config", vf_config, "check context as JSON");
    vf->add_option("--dim", vf_ctx.dimension)->check(CLI::Range(1, 3));
    vf->add_option("--depth", vf_ctx.depth)->check(CLI::Range(1, 24));
    vf->add_option("--seed", vf_ctx.seed);
    vf->add_option("--instances", vf_ctx.instances)->check(CLI::Range(1, 64));
    vf->add_option("--threshold", vf_ctx.threshold);
    vf->add_option("--baseline", vf_ctx.baseline_path);
    vf->add_option("--only", vf_only, "run only the named checks");
    vf->add_option("--json", vf_json, "write results as JSON");
    vf->add_flag("--write-baseline", vf_write_baseline,
                 "record the linear-bound statistic before checking");

    // sweep
    auto* sw = app.add_subcommand("sweep", "weighted norms across a2 values");
    ModelArgs sw_model;
    ShiftArgs sw_shift;
    std::string sw_config, sw_out, sw_fit, sw_svg;
    std::string sw_family = "power";
    std::vector<double> sw_params;
    std::uint64_t sw_wseed = seed0;
    int sw_jobs = 1;
    double sw_a2min = 0.0;
    double sw_max_slope_val = 0.0;
    sw_model.attach(sw);
    sw_shift.attach(sw, seed0);
    sw->add_option("--config", sw_config, "full sweep configuration as JSON");
    sw->add_option("--family", sw_family, "weight family for --params")
        ->check(CLI::IsMember({"power", "random", "constant"}));
    sw->add_option("--params", sw_params, "weight parameters, one row each")
        ->delimiter(',');
    sw->add_option("--weight-seed", sw_wseed, "base seed for random weights");
    sw->add_option("--jobs", sw_jobs, "worker threads")->check(CLI::Range(1, 64));
    sw->add_option("--out", sw_out, "CSV output path (stdout when absent)");
    sw->add_option("--fit", sw_fit, "write the slope fit as JSON");
    sw->add_option("--svg", sw_svg, "write a log-log plot");
    sw->add_option("--a2-min", sw_a2min, "fit only rows with a2 at least this");
    auto* sw_max_slope =
        sw->add_option("--max-slope", sw_max_slope_val,
                       "fail when the fitted slope exceeds this");

    // decompose
    auto* dc = app.add_subcommand("decompose",
                                  "bilinear form split and corona summary");
    ModelArgs dc_model;
    ShiftArgs dc_shift;
    WeightArgs dc_weight;
    std::uint64_t dc_fseed = seed0;
    double dc_threshold = 4.0;
    std::string dc_json;
    dc_model.attach(dc);
    dc_shift.attach(dc, seed0);
    dc_weight.attach(dc, seed0);
    dc->add_option("--function-seed", dc_fseed, "seed for the test functions");
    dc->add_option("--threshold", dc_threshold, "stopping threshold");
    dc->add_option("--json", dc_json, "write the full report as JSON");

    // report
    auto* rp = app.add_subcommand("report", "fit and plot an existing sweep");
    std::string rp_in, rp_fit, rp_svg;
    double rp_a2min = 0.0;
    double rp_max_slope_val = 0.0;
    rp->add_option("--in", rp_in, "sweep CSV to read")->required();
    rp->add_option("--a2-min", rp_a2min, "fit only rows with a2 at least this");
    rp->add_option("--fit", rp_fit, "write the slope fit as JSON");
    rp->add_option("--svg", rp_svg, "write a log-log plot");
    auto* rp_max_slope =
        rp->add_option("--max-slope", rp_max_slope_val,
                       "fail when the fitted slope exceeds this");

    app.parse(argc, argv);

    if (a2->parsed()) return cmd_a2(a2_model, a2_weight, a2_json);
    if (bs->parsed())
      return cmd_build_shift(bs_model, bs_shift, bs_samples, bs_json,
                             bs_matrix);
    if (vf->parsed()) {
      dyadic::CheckContext ctx = vf_ctx;
      if (!vf_config.empty()) ctx = load_json(vf_config).get<dyadic::CheckContext>();
      return cmd_verify(ctx, vf_only, vf_json, vf_write_baseline);
    }
    if (sw->parsed()) {
      dyadic::SweepConfig config;
      if (!sw_config.empty()) {
        config = load_json(sw_config).get<dyadic::SweepConfig>();
      } else {
        config.dimension = sw_model.dimension;
        config.depth = sw_model.depth;
        config.shift = sw_shift.spec;
        for (std::size_t i = 0; i < sw_params.size(); ++i)
          config.weights.push_back(
              dyadic::WeightSpec{sw_family, sw_params[i], sw_wseed + i});
        if (config.weights.empty())
          throw CLI::ValidationError("sweep needs --params or --config");
      }
      config.jobs = sw_jobs;
      return cmd_sweep(config, sw_out, sw_fit, sw_svg, sw_a2min,
                       sw_max_slope->count() ? std::optional<double>(sw_max_slope_val)
                                             : std::nullopt);
    }
    if (dc->parsed())
      return cmd_decompose(dc_model, dc_shift, dc_weight, dc_fseed,
                           dc_threshold, dc_json);
    if (rp->parsed())
      return cmd_report(rp_in, rp_a2min, rp_fit, rp_svg,
                        rp_max_slope->count()
                            ? std::optional<double>(rp_max_slope_val)
                            : std::nullopt);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
