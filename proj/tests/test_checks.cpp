#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic/checks.hpp"

using namespace dyadic;

TEST_SUITE("checks") {

TEST_CASE("registry lists a stable set of names") {
  std::vector<std::string> names = available_checks();
  CHECK(names.size() == 16);
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (const char* expected :
       {"bilinear-identity", "carleson-packing", "expectation-algebra",
        "martingale-parseval", "corona-normalization", "testing-bound",
        "unconditionality", "linear-bound"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
  CHECK_THROWS_AS(run_check("no-such-check", CheckContext{}),
                  std::invalid_argument);
}

TEST_CASE("context key encodes the construction parameters") {
  CheckContext ctx;
  ctx.dimension = 2;
  ctx.depth = 6;
  ctx.seed = 5;
  ctx.instances = 3;
  CHECK(check_context_key(ctx) == "d2_N6_s5_i3");
}

TEST_CASE("corpus size follows the instance count") {
  CheckContext ctx;
  ctx.depth = 6;
  ctx.instances = 4;
  auto corpus = standard_corpus(ctx);
  CHECK(corpus.size() == 4);
  for (const CorpusItem& item : corpus) {
    CHECK(item.shift.model() == item.weight.model());
    CHECK(item.f.size() == item.shift.model().leaf_count());
    CHECK(!item.label.empty());
  }
  // labels are distinct
  for (std::size_t a = 0; a < corpus.size(); ++a) {
    for (std::size_t b = a + 1; b < corpus.size(); ++b) {
      CHECK(corpus[a].label != corpus[b].label);
    }
  }
}

TEST_CASE("every identity check passes on a small context") {
  CheckContext ctx;
  ctx.depth = 6;
  ctx.instances = 4;
  for (const char* name :
       {"expectation-algebra", "martingale-parseval", "bessel-gap",
        "bilinear-identity", "nested-energy", "sign-average", "duality",
        "norm-crosscheck"}) {
    CheckResult r = run_check(name, ctx);
    INFO(r.name << ": " << r.statistic << " vs " << r.bound << " "
                << r.detail);
    CHECK(r.passed);
    CHECK(r.statistic <= r.bound);
  }
}

TEST_CASE("every structural bound holds on a small context") {
  CheckContext ctx;
  ctx.depth = 6;
  ctx.instances = 4;
  for (const char* name :
       {"doob-maximal", "carleson-packing", "quasiorthogonality",
        "corona-normalization", "kernel-decay", "unconditionality",
        "testing-bound"}) {
    CheckResult r = run_check(name, ctx);
    INFO(r.name << ": " << r.statistic << " vs " << r.bound << " "
                << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("the linear bound check needs a recorded baseline") {
  CheckContext ctx;
  ctx.depth = 6;
  ctx.instances = 4;
  ctx.baseline_path = "/nonexistent/baseline.json";
  CheckResult r = run_check("linear-bound", ctx);
  CHECK(!r.passed);
  CHECK(r.statistic > 0.0);
}

}  // TEST_SUITE
