#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dyadic/martingale.hpp"
#include "dyadic/model.hpp"
#include "dyadic/rng.hpp"

using namespace dyadic;

namespace {

StepFunction keyed_function(const FiniteModel& m, std::uint64_t seed) {
  std::vector<double> v(m.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = keyed_symmetric(seed, i);
  }
  return StepFunction(m, v);
}

Measure keyed_measure(const FiniteModel& m, std::uint64_t seed) {
  std::vector<double> v(m.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::exp(keyed_symmetric(seed, i));
  }
  return Measure(StepFunction(m, v));
}

}  // namespace

TEST_SUITE("martingale") {

TEST_CASE("expectation averages over each cube") {
  FiniteModel m(1, 2);
  StepFunction f(m, std::vector<double>{1.0, 2.0, 3.0, 4.0});
  Measure leb = Measure::lebesgue(m);
  StepFunction e1 = expectation(f, leb, 1);
  CHECK(e1[0] == 1.5);
  CHECK(e1[1] == 1.5);
  CHECK(e1[2] == 3.5);
  CHECK(e1[3] == 3.5);
  StepFunction e0 = expectation(f, leb, 0);
  CHECK(e0[0] == 2.5);
  StepFunction en = expectation(f, leb, 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(en[i] == f[i]);

  Measure mu{StepFunction(m, std::vector<double>{1.0, 3.0, 1.0, 1.0})};
  StepFunction w1 = expectation(f, mu, 1);
  CHECK(w1[0] == 7.0 / 4.0);  // (1*1 + 2*3) / (1 + 3)
  CHECK(w1[1] == 7.0 / 4.0);
  CHECK(w1[2] == 3.5);
}

TEST_CASE("expectation operators are idempotent and nested") {
  FiniteModel m(1, 6);
  Measure mu = keyed_measure(m, 9);
  StepFunction f = keyed_function(m, 10);
  StepFunction e3 = expectation(f, mu, 3);
  StepFunction twice = expectation(e3, mu, 3);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(twice[i] == doctest::Approx(e3[i]).epsilon(1e-14));
  }
  // coarse of fine equals coarse
  StepFunction coarse = expectation(e3, mu, 1);
  StepFunction direct = expectation(f, mu, 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(coarse[i] == doctest::Approx(direct[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(expectation(f, mu, 7), std::invalid_argument);
}

TEST_CASE("differences have zero mean and are orthogonal") {
  FiniteModel m(1, 6);
  Measure mu = keyed_measure(m, 4);
  StepFunction f = keyed_function(m, 5);
  StepFunction d21 = difference(f, mu, 2, 1);
  StepFunction d10 = difference(f, mu, 1, 0);
  CHECK(std::abs(inner_product(d21, d10, mu)) <= 1e-14);
  // each difference integrates to zero against the measure
  StepFunction one(m, 1.0);
  CHECK(std::abs(inner_product(d21, one, mu)) <= 1e-14);
  CHECK_THROWS_AS(difference(f, mu, 1, 2), std::invalid_argument);
}

TEST_CASE("ladder lists its generations and masses") {
  FiniteModel m(1, 8);
  MartingaleLadder ladder(m, Measure::lebesgue(m), 1, 3);
  CHECK(ladder.generations() == std::vector<int>{1, 4, 7});
  CHECK(ladder.mass()[0] == 1.0);  // root mass, generation-major layout
  CHECK_THROWS_AS(MartingaleLadder(m, Measure::lebesgue(m), 9, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(MartingaleLadder(m, Measure::lebesgue(m), 0, 0),
                  std::invalid_argument);
}

TEST_CASE("ladder rejects vanishing cube mass") {
  FiniteModel m(1, 2);
  Measure mu{StepFunction(m, std::vector<double>{0.0, 0.0, 1.0, 1.0})};
  CHECK_THROWS_AS(MartingaleLadder(m, mu, 1, 1), std::domain_error);
}

TEST_CASE("decomposition recombines and satisfies the energy identity") {
  FiniteModel m(1, 8);
  for (int step : {1, 2, 3}) {
    Measure mu = keyed_measure(m, 40 + static_cast<std::uint64_t>(step));
    MartingaleLadder ladder(m, mu, 1, step);
    StepFunction f = keyed_function(m, 50 + static_cast<std::uint64_t>(step));

    auto parts = ladder.decompose(f);
    StepFunction back = MartingaleLadder::recombine(parts);
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-13));
    }

    // orthogonality: total energy splits across the pieces
    double total = inner_product(f, f, mu);
    double pieces = inner_product(parts.coarse, parts.coarse, mu) +
                    inner_product(parts.residual, parts.residual, mu);
    for (const StepFunction& d : parts.differences) {
      pieces += inner_product(d, d, mu);
    }
    CHECK(pieces == doctest::Approx(total).epsilon(1e-12));

    double gap = ladder.bessel_gap(f);
    CHECK(gap >= -1e-12 * total);
    double coarse_energy = inner_product(parts.coarse, parts.coarse, mu) +
                           inner_product(parts.residual, parts.residual, mu);
    CHECK(gap == doctest::Approx(coarse_energy).epsilon(1e-11));
  }
}

TEST_CASE("ladder reaching the leaves has no residual") {
  FiniteModel m(1, 6);
  Measure mu = keyed_measure(m, 8);
  MartingaleLadder ladder(m, mu, 0, 2);  // generations 0, 2, 4, 6
  CHECK(ladder.generations().back() == 6);
  StepFunction f = keyed_function(m, 3);
  auto parts = ladder.decompose(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::abs(parts.residual[i]) <= 1e-14);
  }
}

TEST_CASE("single-rung ladder keeps everything in the coarse part") {
  FiniteModel m(1, 4);
  Measure mu = keyed_measure(m, 2);
  MartingaleLadder ladder(m, mu, 4, 5);
  CHECK(ladder.generations() == std::vector<int>{4});
  StepFunction f = keyed_function(m, 12);
  auto parts = ladder.decompose(f);
  CHECK(parts.differences.empty());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(parts.coarse[i] == doctest::Approx(f[i]).epsilon(1e-14));
    CHECK(std::abs(parts.residual[i]) <= 1e-15);
  }
}

TEST_CASE("doob inequality for the maximal function") {
  FiniteModel m(1, 8);
  Measure mu = keyed_measure(m, 77);
  StepFunction f = keyed_function(m, 78);
  StepFunction big = maximal_function(f, mu);
  // L2 bound with the dual-exponent constant
  CHECK(norm_l2(big, mu) <= 2.0 * norm_l2(f, mu) * (1.0 + 1e-12));
}

}  // TEST_SUITE
