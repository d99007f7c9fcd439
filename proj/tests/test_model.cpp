#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dyadic/model.hpp"
#include "dyadic/rng.hpp"

using namespace dyadic;

TEST_SUITE("model") {

TEST_CASE("geometry counts and volumes") {
  FiniteModel m(1, 8);
  CHECK(m.leaf_count() == 256);
  CHECK(m.leaf_volume() == 0x1p-8);
  CHECK(m.cubes_at(0) == 1);
  CHECK(m.cubes_at(8) == 256);
  CHECK(m.cube_volume(3) == 0.125);

  FiniteModel q(2, 3);
  CHECK(q.leaf_count() == 64);
  CHECK(q.cubes_at(1) == 4);
  CHECK(q.cube_volume(2) == 0x1p-4);

  FiniteModel c(3, 2);
  CHECK(c.leaf_count() == 64);
  CHECK(c.leaf_volume() == 1.0 / 64.0);
}

TEST_CASE("node offsets are generation-major prefix sums") {
  FiniteModel m(2, 2);
  // generations hold 1, 4, 16 cubes
  CHECK(m.node_offset(0) == 0);
  CHECK(m.node_offset(1) == 1);
  CHECK(m.node_offset(2) == 5);
  CHECK(m.node_count() == 21);
}

TEST_CASE("constructor rejects bad parameters") {
  CHECK_THROWS_AS(FiniteModel(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(FiniteModel(4, 3), std::invalid_argument);
  CHECK_THROWS_AS(FiniteModel(1, 25), std::invalid_argument);
  CHECK_THROWS_AS(FiniteModel(2, 13), std::invalid_argument);
  CHECK_THROWS_AS(FiniteModel(3, 9), std::invalid_argument);
}

TEST_CASE("cube index interleaves with the first coordinate highest") {
  FiniteModel m(2, 3);
  CHECK(cube_index(m, CubeId{1, {0, 0, 0}}) == 0);
  CHECK(cube_index(m, CubeId{1, {0, 1, 0}}) == 1);
  CHECK(cube_index(m, CubeId{1, {1, 0, 0}}) == 2);
  CHECK(cube_index(m, CubeId{1, {1, 1, 0}}) == 3);
  // two-digit case: position (2,1) = binary (10,01) interleaves to 1001
  CHECK(cube_index(m, CubeId{2, {2, 1, 0}}) == 9);
}

TEST_CASE("cube index round-trips at every generation") {
  for (int d = 1; d <= 3; ++d) {
    FiniteModel m(d, 2);
    for (int g = 0; g <= m.depth(); ++g) {
      for (std::uint64_t i = 0; i < m.cubes_at(g); ++i) {
        CubeId q = cube_from_index(m, g, i);
        CHECK(q.generation == g);
        CHECK(cube_index(m, q) == i);
      }
    }
  }
}

TEST_CASE("parent halves every coordinate") {
  CubeId q{2, {3, 1, 0}};
  CubeId p = parent_cube(q);
  CHECK(p.generation == 1);
  CHECK(p.position[0] == 1);
  CHECK(p.position[1] == 0);
  CHECK_THROWS_AS(parent_cube(CubeId{0, {0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("containment follows the ancestor chain") {
  FiniteModel m(2, 3);
  CubeId leaf = cube_from_index(m, 3, 37);
  CubeId q = leaf;
  for (int g = 3; g > 0; --g) {
    CubeId p = parent_cube(q);
    CHECK(cube_contains(p, leaf));
    q = p;
  }
  CHECK(cube_contains(q, leaf));  // root
  CHECK(!cube_contains(CubeId{1, {0, 0, 0}}, CubeId{1, {0, 1, 0}}));
  CHECK(!cube_contains(CubeId{2, {0, 0, 0}}, CubeId{1, {0, 0, 0}}));
  CHECK(side_length(CubeId{2, {0, 0, 0}}) == 0.25);
}

TEST_CASE("leaf ranges are contiguous and consistent with centers") {
  FiniteModel m(1, 4);
  auto [a, b] = cube_leaf_range(m, CubeId{2, {3, 0, 0}});
  CHECK(a == 12);
  CHECK(b == 16);

  FiniteModel q(2, 2);
  // every leaf center lies inside the box of every cube that claims it
  for (int g = 0; g <= 2; ++g) {
    for (std::uint64_t i = 0; i < q.cubes_at(g); ++i) {
      CubeId cube = cube_from_index(q, g, i);
      double side = side_length(cube);
      auto [lo, hi] = cube_leaf_range(q, cube);
      CHECK(hi - lo == q.leaf_count() >> (2 * g));
      for (std::size_t leaf = lo; leaf < hi; ++leaf) {
        auto c = leaf_center(q, leaf);
        for (int k = 0; k < 2; ++k) {
          double left = cube.position[static_cast<std::size_t>(k)] * side;
          CHECK(c[static_cast<std::size_t>(k)] >= left);
          CHECK(c[static_cast<std::size_t>(k)] < left + side);
        }
      }
      auto leaves = cube_leaves(q, cube);
      CHECK(leaves.size() == hi - lo);
      CHECK(leaves.front() == lo);
      CHECK(leaves.back() == hi - 1);
    }
  }
}

TEST_CASE("leaf centers in one dimension") {
  FiniteModel m(1, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    auto c = leaf_center(m, i);
    CHECK(c[0] == (static_cast<double>(i) + 0.5) / 8.0);
    CHECK(c[1] == 0.0);
    CHECK(c[2] == 0.0);
  }
  CHECK_THROWS_AS(leaf_center(m, 8), std::invalid_argument);
}

TEST_CASE("step function constructors") {
  FiniteModel m(1, 3);
  StepFunction c(m, 2.5);
  CHECK(c.size() == 8);
  CHECK(c[5] == 2.5);
  CHECK_THROWS_AS(StepFunction(m, std::vector<double>(7, 1.0)),
                  std::invalid_argument);
  FiniteModel other(1, 4);
  CHECK_THROWS_AS(require_same_model(m, other), std::invalid_argument);
}

TEST_CASE("measure validation and total mass") {
  FiniteModel m(1, 4);
  CHECK_THROWS_AS(Measure(StepFunction(m, -1.0)), std::invalid_argument);
  Measure leb = Measure::lebesgue(m);
  CHECK(leb.strictly_positive());
  CHECK(cube_sums(leb.density())[0] == 1.0);

  std::vector<double> dens(m.leaf_count(), 1.0);
  dens[3] = 0.0;
  Measure flat(StepFunction(m, dens));
  CHECK(!flat.strictly_positive());
}

TEST_CASE("cube sums of the coordinate function are exact dyadics") {
  FiniteModel m(1, 6);
  std::vector<double> v(m.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = leaf_center(m, i)[0];
  }
  StepFunction f(m, v);
  auto sums = cube_sums(f);
  // integral of x over [0,1) through exact midpoint values: 1/2 exactly
  CHECK(sums[0] == 0.5);
  CHECK(cube_sum(sums, m, 1, 0) == 0.125);
  CHECK(cube_sum(sums, m, 1, 1) == 0.375);
}

TEST_CASE("cube sums match direct leaf totals in two dimensions") {
  FiniteModel m(2, 3);
  std::vector<double> v(m.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = keyed_symmetric(77, i);
  }
  StepFunction f(m, v);
  auto sums = cube_sums(f);
  for (int g = 0; g <= 3; ++g) {
    for (std::uint64_t i = 0; i < m.cubes_at(g); ++i) {
      auto [lo, hi] = cube_leaf_range(m, cube_from_index(m, g, i));
      double direct = 0.0;
      for (std::size_t leaf = lo; leaf < hi; ++leaf) {
        direct += v[leaf] * m.leaf_volume();
      }
      CHECK(cube_sum(sums, m, g, i) ==
            doctest::Approx(direct).epsilon(1e-13));
    }
  }
}

TEST_CASE("weighted average over a cube") {
  FiniteModel m(1, 1);
  StepFunction f(m, std::vector<double>{1.0, 3.0});
  Measure mu{StepFunction(m, std::vector<double>{3.0, 1.0})};
  // integral f dmu = (1*3 + 3*1)/2 = 3, mass = 2
  CHECK(average(f, mu, CubeId{0, {0, 0, 0}}) == 1.5);
  CHECK(average(f, mu, CubeId{1, {1, 0, 0}}) == 3.0);

  Measure dead{StepFunction(m, std::vector<double>{1.0, 0.0})};
  CHECK_THROWS_AS(average(f, dead, CubeId{1, {1, 0, 0}}), std::domain_error);
}

TEST_CASE("inner products and norms") {
  FiniteModel m(1, 1);
  StepFunction f(m, std::vector<double>{1.0, 3.0});
  StepFunction g(m, std::vector<double>{2.0, -1.0});
  Measure mu{StepFunction(m, std::vector<double>{3.0, 1.0})};
  // (1*2*3 + 3*(-1)*1)/2 = 3/2
  CHECK(inner_product(f, g, mu) == 1.5);
  CHECK(norm_l2(f, mu) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
  CHECK(norm_l2(f, mu) * norm_l2(f, mu) ==
        doctest::Approx(inner_product(f, f, mu)).epsilon(1e-15));
}

TEST_CASE("maximal function dominates the function and is monotone") {
  FiniteModel m(1, 1);
  Measure leb = Measure::lebesgue(m);
  StepFunction f(m, std::vector<double>{4.0, 0.0});
  StepFunction big = maximal_function(f, leb);
  CHECK(big[0] == 4.0);
  CHECK(big[1] == 2.0);

  StepFunction flipped(m, std::vector<double>{-4.0, 0.0});
  StepFunction same = maximal_function(flipped, leb);
  CHECK(same[0] == 4.0);
  CHECK(same[1] == 2.0);

  FiniteModel deep(1, 6);
  std::vector<double> v(deep.leaf_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = keyed_symmetric(5, i);
  }
  StepFunction h(deep, v);
  StepFunction mh = maximal_function(h, Measure::lebesgue(deep));
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(mh[i] >= std::abs(v[i]) - 1e-15);
  }
}

TEST_CASE("pointwise helpers") {
  FiniteModel m(1, 1);
  StepFunction f(m, std::vector<double>{-2.0, 3.0});
  StepFunction g(m, std::vector<double>{4.0, 0.5});
  StepFunction p = pointwise_product(f, g);
  CHECK(p[0] == -8.0);
  CHECK(p[1] == 1.5);
  StepFunction a = absolute_value(f);
  CHECK(a[0] == 2.0);
  CHECK(a[1] == 3.0);
}

}  // TEST_SUITE
