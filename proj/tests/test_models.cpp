#include <doctest.h>

#include <cmath>
#include <limits>

#include "hydrolim/catalog.hpp"
#include "hydrolim/errors.hpp"
#include "hydrolim/models.hpp"
#include "hydrolim/rng.hpp"

using namespace hydrolim;

TEST_CASE("nearest neighbour kernel moments") {
  const TransitionKernel k = TransitionKernel::nearest_neighbour_symmetric();
  CHECK(k.mean() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(k.second_moment() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.max_range() == 1);
  CHECK(k.moments_consistent());
}

TEST_CASE("centred range-2 kernel moments") {
  const TransitionKernel k({{1, 0.3}, {-1, 0.3}, {2, 0.2}, {-2, 0.2}});
  CHECK(std::abs(k.mean()) < 1e-15);
  CHECK(k.second_moment() == doctest::Approx(2.2).epsilon(1e-14));
  CHECK(k.max_range() == 2);
}

TEST_CASE("kernel construction rejects bad input") {
  CHECK_THROWS_AS(TransitionKernel({}), ConfigError);
  CHECK_THROWS_AS(TransitionKernel({{0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(TransitionKernel({{1, 0.5}, {-1, 0.4}}), ConfigError);
  CHECK_THROWS_AS(TransitionKernel({{1, -0.5}, {-1, 1.5}}), ConfigError);
}

TEST_CASE("kernel sampling matches the law") {
  const TransitionKernel k({{1, 0.3}, {-1, 0.3}, {2, 0.2}, {-2, 0.2}});
  Rng rng(99);
  const int n = 200000;
  int c1 = 0, cm1 = 0, c2 = 0, cm2 = 0;
  for (int i = 0; i < n; ++i) {
    switch (k.sample_displacement(rng)) {
      case 1: ++c1; break;
      case -1: ++cm1; break;
      case 2: ++c2; break;
      case -2: ++cm2; break;
      default: FAIL("sampled displacement outside the kernel support");
    }
  }
  const auto within = [n](int count, double p) {
    const double se = std::sqrt(p * (1.0 - p) / n);
    return std::abs(static_cast<double>(count) / n - p) < 5.0 * se;
  };
  CHECK(within(c1, 0.3));
  CHECK(within(cm1, 0.3));
  CHECK(within(c2, 0.2));
  CHECK(within(cm2, 0.2));
}

TEST_CASE("jump rate tabulation and linear extension") {
  const JumpRate g([](std::int64_t k) { return static_cast<double>(k); }, 64, {});
  CHECK(g(0) == 0.0);
  CHECK(g(-5) == 0.0);
  CHECK(g(7) == 7.0);
  CHECK(g(64) == 64.0);
  CHECK(g(1000) == 1000.0);  // slope-1 extension beyond the table
  CHECK(g.is_linear());
  CHECK(std::isinf(g.rate_limit()));
}

TEST_CASE("indicator rate saturates") {
  const JumpRate g([](std::int64_t k) { return k >= 1 ? 1.0 : 0.0; }, 64, {});
  CHECK(g(0) == 0.0);
  CHECK(g(1) == 1.0);
  CHECK(g(10000) == 1.0);
  CHECK_FALSE(g.is_linear());
  CHECK(g.rate_limit() == 1.0);
}

TEST_CASE("jump rate rejects tiny table") {
  CHECK_THROWS_AS(JumpRate([](std::int64_t) { return 1.0; }, 1, {}), ConfigError);
}

TEST_CASE("potential requires evaluators and positive convexity") {
  Potential::Parts good;
  good.v = [](double r) { return 0.5 * r * r; };
  good.v_prime = [](double r) { return r; };
  good.v0 = good.v;
  CHECK_NOTHROW(Potential{good});

  Potential::Parts no_deriv = good;
  no_deriv.v_prime = nullptr;
  CHECK_THROWS_AS(Potential{no_deriv}, ConfigError);

  Potential::Parts flat = good;
  flat.convexity = 0.0;
  CHECK_THROWS_AS(Potential{flat}, ConfigError);
}

TEST_CASE("builtin zrp models validate against their declarations") {
  const ModelCatalog cat = ModelCatalog::builtin();

  const auto lin = validate_zrp(cat.zrp("zrp-linear").rate, 200);
  CHECK(lin.all_passed());
  CHECK(cat.zrp("zrp-linear").hypotheses_declared_satisfied);

  const auto capped = validate_zrp(cat.zrp("zrp-capped").rate, 200);
  CHECK(capped.all_passed());

  // The indicator rate is the deliberate out-of-hypothesis reference: its
  // increments vanish, so the gap clause must fail with a witness.
  const auto con = validate_zrp(cat.zrp("zrp-constant").rate, 200);
  CHECK_FALSE(con.all_passed());
  CHECK_FALSE(cat.zrp("zrp-constant").hypotheses_declared_satisfied);
  bool gap_failed = false;
  for (const auto& c : con.clauses) {
    if (!c.passed) {
      gap_failed = true;
      CHECK(c.witness.has_value());
    }
  }
  CHECK(gap_failed);
}

TEST_CASE("glk potentials validate on a grid") {
  const ModelCatalog cat = ModelCatalog::builtin();
  std::vector<double> grid;
  for (int i = 0; i <= 120; ++i) grid.push_back(-6.0 + 0.1 * i);
  CHECK(validate_glk(cat.glk("glk-gaussian").potential, grid).all_passed());
  CHECK(validate_glk(cat.glk("glk-perturbed").potential, grid).all_passed());

  // Declaring a sup bound below the actual perturbation must fail.
  Potential::Parts parts;
  parts.v = [](double r) { return 0.5 * r * r + std::cos(r); };
  parts.v_prime = [](double r) { return r - std::sin(r); };
  parts.v0 = [](double r) { return 0.5 * r * r; };
  parts.v1 = [](double r) { return std::cos(r); };
  parts.v1_prime = [](double r) { return -std::sin(r); };
  parts.v1_sup = 0.5;  // understated on purpose
  parts.v1_lipschitz = 1.0;
  const auto rep = validate_glk(Potential(std::move(parts)), grid);
  CHECK_FALSE(rep.all_passed());
}

TEST_CASE("catalog round trips through its own JSON text") {
  const ModelCatalog a = ModelCatalog::builtin();
  const ModelCatalog b = ModelCatalog::from_json_text(ModelCatalog::builtin_json_text());
  CHECK(a.model_names() == b.model_names());
  CHECK(a.kernel_names() == b.kernel_names());
  for (const auto& name : a.model_names()) {
    if (a.has_zrp(name)) {
      for (std::int64_t k : {0, 1, 2, 5, 17, 600})
        CHECK(a.zrp(name).rate(k) == b.zrp(name).rate(k));
    }
  }
}

TEST_CASE("catalog rejects unknown keys and forms") {
  CHECK_THROWS_AS(ModelCatalog::from_json_text(R"({"models": {}, "kernels": {}, "extra": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(ModelCatalog::from_json_text(
                      R"({"models": {"m": {"kind": "zrp", "rate": {"form": "cubic"},
                          "hzrp": {}}}, "kernels": {}})"),
                  ConfigError);
  const ModelCatalog cat = ModelCatalog::builtin();
  CHECK_THROWS_AS(cat.zrp("missing"), ConfigError);
  CHECK_THROWS_AS(cat.glk("zrp-linear"), ConfigError);
  CHECK_THROWS_AS(cat.kernel("missing"), ConfigError);
}

TEST_CASE("capped-linear catalog rate matches its closed form") {
  const ModelCatalog cat = ModelCatalog::builtin();
  const JumpRate& g = cat.zrp("zrp-capped").rate;
  for (std::int64_t k = 0; k <= 40; ++k) {
    const double expected = std::min(static_cast<double>(k), 5.0) + 0.1 * static_cast<double>(k);
    CHECK(g(k) == doctest::Approx(expected).epsilon(1e-14));
  }
}
