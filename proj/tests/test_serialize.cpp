#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic/corona.hpp"
#include "dyadic/model.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/serialize.hpp"
#include "dyadic/shift.hpp"
#include "dyadic/verify.hpp"
#include "dyadic/weights.hpp"

using namespace dyadic;
using nlohmann::json;

TEST_SUITE("serialize") {

TEST_CASE("doubles format to round-trippable text") {
  for (double x : {0.1, 1.0 / 3.0, 1e300, 5e-324, -2.5, 0.0,
                   10.256410130485165}) {
    std::string text = format_double(x);
    CHECK(std::strtod(text.c_str(), nullptr) == x);
  }
}

TEST_CASE("shift spec round-trips through json") {
  ShiftSpec spec;
  spec.type = "random";
  spec.m = 2;
  spec.n = 1;
  spec.residue = 2;
  spec.seed = 0xdeadbeefULL;
  spec.signs = "random";
  spec.sign_value = -0.5;
  json j = spec;
  ShiftSpec back = j.get<ShiftSpec>();
  CHECK(back == spec);
}

TEST_CASE("weight spec and solver options round-trip") {
  WeightSpec w;
  w.family = "random";
  w.param = 12.5;
  w.seed = 99;
  json jw = w;
  CHECK(jw.get<WeightSpec>() == w);

  PowerIterationOptions opts;
  opts.tolerance = 1e-10;
  opts.max_iterations = 1234;
  opts.seed = 77;
  json jo = opts;
  CHECK(jo.get<PowerIterationOptions>() == opts);
}

TEST_CASE("sweep config round-trips with nested specs") {
  SweepConfig config;
  config.dimension = 2;
  config.depth = 5;
  config.shift.type = "random";
  config.shift.m = 2;
  config.jobs = 4;
  config.power.tolerance = 1e-11;
  for (double alpha : {-0.5, -0.9}) {
    WeightSpec w;
    w.family = "power";
    w.param = alpha;
    config.weights.push_back(w);
  }
  json j = config;
  CHECK(j.get<SweepConfig>() == config);
}

TEST_CASE("check context round-trips") {
  CheckContext ctx;
  ctx.dimension = 2;
  ctx.depth = 5;
  ctx.seed = 31;
  ctx.instances = 9;
  ctx.threshold = 3.0;
  ctx.baseline_path = "elsewhere.json";
  ctx.power.tolerance = 1e-9;
  json j = ctx;
  CHECK(j.get<CheckContext>() == ctx);
}

TEST_CASE("report structures expose their fields") {
  CheckResult result;
  result.name = "sample";
  result.passed = true;
  result.statistic = 0.5;
  result.bound = 1.0;
  result.detail = "note";
  json jr = result;
  CHECK(jr["name"] == "sample");
  CHECK(jr["passed"] == true);

  SlopeFit fit;
  fit.slope = 1.25;
  fit.count = 5;
  json jf = fit;
  CHECK(jf["slope"] == 1.25);

  BilinearReport report;
  report.total = 2.0;
  report.gap = 1e-15;
  json jb = report;
  CHECK(jb["total"] == 2.0);
  CHECK(jb.contains("vstar"));
  CHECK(jb.contains("w"));

  NormResult nr;
  nr.value = 3.5;
  nr.iterations = 10;
  json jn = nr;
  CHECK(jn["value"] == 3.5);

  CubeId q{2, {3, 1, 0}};
  json jq = q;
  CHECK(jq["generation"] == 2);
}

TEST_CASE("step functions and weights round-trip bit for bit") {
  FiniteModel m(2, 3);
  std::vector<double> v(m.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = keyed_symmetric(3, i);
  }
  StepFunction f(m, v);
  StepFunction f2 = step_function_from_json(step_function_to_json(f));
  CHECK(f2.model() == m);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(f2[i] == f[i]);
  }

  Weight w = random_a2_weight(5.0, 21, FiniteModel(1, 7));
  Weight w2 = weight_from_json(weight_to_json(w));
  for (std::size_t i = 0; i < w.model().leaf_count(); ++i) {
    CHECK(w2.density()[i] == w.density()[i]);
    CHECK(w2.dual_density()[i] == w.dual_density()[i]);
  }
}

TEST_CASE("characteristic report serializes the witness cube") {
  FiniteModel m(1, 4);
  A2Report report = a2_constant(power_weight(-0.5, m), m);
  json j = a2_report_to_json(report);
  CHECK(j["constant"].get<double>() == report.constant);
  CHECK(j["argmax"]["generation"].get<int>() == report.argmax.generation);
}

TEST_CASE("stopping forests serialize their shape") {
  FiniteModel m(1, 4);
  std::vector<double> v(m.leaf_count(), 0.0);
  v[0] = 16.0;
  StoppingForest forest = build_stopping_cubes(
      StepFunction(m, v), Measure::lebesgue(m), 1.9, 1, 0);
  json j = forest_to_json(forest);
  CHECK(j["stopping"].size() == forest.stopping.size());
  CHECK(j["threshold"].get<double>() == 1.9);
}

TEST_CASE("sweep csv round-trips and flags failures") {
  std::vector<SweepRow> rows(3);
  rows[0].param = -0.5;
  rows[0].a2 = 4.0 / 3.0;
  rows[0].norm = 1.75;
  rows[0].kappa = 3;
  rows[0].dimension = 1;
  rows[0].depth = 8;
  rows[0].shift_id = "petermichl";
  rows[0].seed = 2026;
  rows[0].residual = 1e-13;
  rows[1] = rows[0];
  rows[1].param = -0.9;
  rows[1].a2 = 5.26;
  rows[1].norm = 3.0;
  rows[2] = rows[0];
  rows[2].error = "did not converge";
  // failure rows carry a nan norm; that is what survives the csv round trip
  rows[2].norm = std::nan("");
  rows[2].residual = std::nan("");

  std::ostringstream out;
  write_sweep_csv(out, rows);
  std::string text = out.str();
  CHECK(text.rfind("param,a2,norm,kappa,d,N,shift_id,seed,residual\n", 0) ==
        0);

  std::istringstream in(text);
  std::vector<SweepRow> back = read_sweep_csv(in);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].param == rows[i].param);
    CHECK(back[i].a2 == rows[i].a2);
    CHECK(back[i].norm == rows[i].norm);
    CHECK(back[i].kappa == rows[i].kappa);
    CHECK(back[i].depth == rows[i].depth);
    CHECK(back[i].shift_id == rows[i].shift_id);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].residual == rows[i].residual);
    CHECK(back[i].error.empty());
  }
  CHECK(!back[2].error.empty());

  std::istringstream junk("not,a,header\n1,2,3\n");
  CHECK_THROWS_AS(read_sweep_csv(junk), std::invalid_argument);
}

TEST_CASE("identical rows serialize to identical bytes") {
  FiniteModel m(1, 6);
  SweepConfig config;
  config.depth = 6;
  config.shift.type = "haar_multiplier";
  WeightSpec w;
  w.family = "power";
  w.param = -0.7;
  config.weights.assign(2, w);
  config.weights[1].param = -0.9;

  std::ostringstream first, second;
  write_sweep_csv(first, a2_sweep(config));
  write_sweep_csv(second, a2_sweep(config));
  CHECK(first.str() == second.str());
}

TEST_CASE("dense matrices round-trip through the binary format") {
  FiniteModel m(1, 4);
  DenseMatrix a = assemble_matrix(petermichl_shift(m, constant_signs(1.0)));
  std::ostringstream out(std::ios::binary);
  write_matrix(out, a);
  std::istringstream in(out.str(), std::ios::binary);
  DenseMatrix b = read_matrix(in);
  REQUIRE(b.rows == a.rows);
  REQUIRE(b.cols == a.cols);
  CHECK(b.a == a.a);
}

}  // TEST_SUITE
