#include <doctest.h>

#include <random>

#include "flatlab/errors.hpp"
#include "flatlab/levelsets.hpp"
#include "flatlab/multipliers.hpp"
#include "support.hpp"

using namespace flatlab;

namespace {
const Exponent P2(2.0);
}

TEST_CASE("level sets of the identity multiplier") {
  const auto s = MeasureSpace::uniform_interval(1024);
  const auto phi = make_multiplier(s, "identity");
  const auto e = level_set(phi, LevelKind::AtLeast, 0.25);
  CHECK(std::abs(e.set.measure() - 0.75) <= 1.0 / 1024);

  const double v = phi[100];
  CHECK(level_set(phi, LevelKind::Between, v, v).set.count() <= 1);
  CHECK(level_set(phi, LevelKind::Between, 0.0, phi.sup_norm()).set == MeasurableSet::full(s));

  const auto band = level_set(phi, LevelKind::Between, 0.2, 0.6).set;
  CHECK(band == (level_set(phi, LevelKind::AtLeast, 0.2).set & level_set(phi, LevelKind::AtMost, 0.6).set));
  CHECK(level_set(phi, LevelKind::Open, 0.2, 0.6).set.is_subset_of(band));
  CHECK(level_set(phi, LevelKind::Above, 0.5).set == level_set(phi, LevelKind::AtMost, 0.5).set.complement());

  CHECK_THROWS_AS(level_set(phi, LevelKind::Between, 0.6, 0.2), InvalidInterval);
  CHECK_THROWS_AS(level_set(phi, LevelKind::Between, 0.2), InvalidInterval);
}

TEST_CASE("flat detection") {
  const auto s = MeasureSpace::uniform_interval(256);
  const auto c = detect_flats(LpFunction::constant(s, 3.0, Exponent::infinity()), 0.01, 0.0);
  REQUIRE(c.flats.size() == 1);
  CHECK(c.flats[0].measure == doctest::Approx(1.0));
  CHECK(c.flats[0].value == 3.0);

  const auto id = make_multiplier(s, "identity");
  CHECK_FALSE(detect_flats(id, 3.0 / 256, 0.0).has_flat());

  const auto plateau = make_multiplier(s, "plateau(0.25,0.5)");
  const auto r = detect_flats(plateau, 0.01, 0.0);
  REQUIRE(r.flats.size() == 1);
  CHECK(std::abs(r.flats[0].measure - 0.25) <= 1.0 / 256);
  CHECK(r.flats[0].value == 0.25);

  // Staircase(4): four flats of measure 1/4, pairwise disjoint.
  const auto st = detect_flats(make_multiplier(s, "staircase(4)"), 0.1, 0.0);
  REQUIRE(st.flats.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(st.flats[i].measure == doctest::Approx(0.25));
    for (std::size_t j = i + 1; j < 4; ++j) CHECK_FALSE(st.flats[i].set.intersects(st.flats[j].set));
  }

  // tau chains nearby values; every member stays within tau of the value.
  const auto loose = detect_flats(id, 0.05, 0.1);
  CHECK(loose.has_flat());
  for (const auto& f : loose.flats) {
    CHECK(f.measure >= 0.05);
    for (std::size_t i : f.set.indices()) CHECK(std::abs(id[i] - f.value) <= 0.1);
  }
  CHECK_THROWS_AS(detect_flats(id, 0.0, 0.0), PreconditionError);
}

TEST_CASE("band projections") {
  std::mt19937_64 rng(3);
  const auto s = MeasureSpace::uniform_interval(16);
  const auto e = testing::random_set(s, rng);
  const auto pe = band_projection(e, P2);
  CHECK(band_projection(MeasurableSet::full(s), P2).matrix() == Matrix::Identity(16, 16));
  CHECK((pe * band_projection(e.complement(), P2)).is_zero());
  CHECK((pe * pe).matrix() == pe.matrix());
  CHECK(pe.is_positive());
}

TEST_CASE("invariance of sets under operators") {
  std::mt19937_64 rng(12);
  const auto s = MeasureSpace::uniform_interval(16);
  const auto d = multiplication(testing::random_function(s, P2, rng), P2);
  CHECK(leaves_invariant(d, testing::random_set(s, rng)).invariant);

  const auto g = MeasureSpace::product_grid(16, 16);
  const auto r = averaging_counterexample(g, P2);
  const auto vertical = MeasurableSet::where(g, [&](std::size_t i) { return g.center(i).x < 0.5; });
  const auto v = leaves_invariant(r, vertical);
  CHECK_FALSE(v.invariant);
  // Each row block of P_{E^c} R P_E is 8x8 with entries 1/16: spectral norm 1/2.
  CHECK(v.violation == doctest::Approx(0.5).epsilon(1e-10));

  const auto y = make_multiplier(g, "y");
  for (double alpha : {0.1, 0.33, 0.5, 0.77}) {
    CHECK(leaves_invariant(r, level_set(y, LevelKind::AtMost, alpha).set).violation <= 1e-12);
    CHECK(leaves_invariant(r, level_set(y, LevelKind::AtLeast, alpha).set).invariant);
  }
}

TEST_CASE("hyperinvariant bands") {
  const auto s = MeasureSpace::uniform_interval(1024);
  const auto bands = enumerate_hyperinvariant_bands(make_multiplier(s, "identity"), 4);
  REQUIRE(bands.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(bands[i].set.measure() == doctest::Approx(0.25).epsilon(1e-12));
    for (std::size_t j = i + 1; j < 4; ++j) CHECK_FALSE(bands[i].set.intersects(bands[j].set));
  }
  CHECK_THROWS_AS(enumerate_hyperinvariant_bands(LpFunction::constant(s, 1.0, P2), 3),
                  SingleBandOnly);

  // Fewer bands than requested when the range is small.
  const auto few = enumerate_hyperinvariant_bands(make_multiplier(s, "staircase(3)"), 8);
  CHECK(few.size() == 3);
  MeasurableSet covered = MeasurableSet::empty(s);
  for (const auto& b : few) covered = covered | b.set;
  CHECK(covered == MeasurableSet::full(s));
}

namespace {

// Random operator commuting with M_phi for phi taking a few values on
// random atoms: block-diagonal over the level sets {phi = v}.
LinearOperator random_commutant(const LpFunction& phi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto n = static_cast<Eigen::Index>(phi.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (phi[static_cast<std::size_t>(i)] == phi[static_cast<std::size_t>(j)]) m(i, j) = u(rng);
  return {phi.space(), m, P2};
}

LpFunction random_levels(const MeasureSpace& s, std::size_t levels, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, levels - 1);
  Vector v(static_cast<Eigen::Index>(s.size()));
  for (auto& x : v) x = 0.1 + static_cast<double>(pick(rng)) * 0.3;
  return {s, v, Exponent::infinity()};
}

}  // namespace

TEST_CASE("property: commutant members leave every level set invariant") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_weight_space(12 + trial % 10, rng);
    const auto phi = random_levels(s, 2 + trial % 5, rng);
    const auto t = random_commutant(phi, rng);
    REQUIRE(commutator_norm(t, multiplication(phi, P2)) <= 1e-12);
    const double tol = 1e-9 * operator_norm(t).upper;
    for (std::size_t i = 0; i < phi.size(); i += 3) {
      const double alpha = phi[i];
      for (LevelKind k : {LevelKind::AtLeast, LevelKind::AtMost, LevelKind::Above, LevelKind::Below}) {
        const auto res = leaves_invariant(t, level_set(phi, k, alpha).set, tol);
        REQUIRE(res.invariant);
      }
      const double beta = alpha + 0.3;
      for (LevelKind k : {LevelKind::Between, LevelKind::ClosedOpen, LevelKind::Open, LevelKind::OpenClosed})
        REQUIRE(leaves_invariant(t, level_set(phi, k, alpha, beta).set, tol).invariant);
    }
  }
}

TEST_CASE("property: invariance is closed under union and intersection") {
  std::mt19937_64 rng(1618);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::random_weight_space(15, rng);
    const auto phi = random_levels(s, 4, rng);
    const auto t = random_commutant(phi, rng);
    std::uniform_real_distribution<double> cut(0.0, 1.2);
    const auto e = level_set(phi, LevelKind::AtMost, cut(rng)).set;
    const auto f = level_set(phi, LevelKind::AtLeast, cut(rng)).set;
    REQUIRE(leaves_invariant(t, e).invariant);
    REQUIRE(leaves_invariant(t, f).invariant);
    REQUIRE(leaves_invariant(t, e & f).invariant);
    REQUIRE(leaves_invariant(t, e | f).invariant);
  }
}

TEST_CASE("property: dominated operators inherit invariance") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> shrink(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = testing::random_weight_space(10 + trial % 7, rng);
    const auto phi = random_levels(s, 3, rng);
    const auto r = random_commutant(phi, rng).modulus();
    Matrix am = r.matrix();
    for (Eigen::Index i = 0; i < am.size(); ++i) am(i) *= shrink(rng);
    const LinearOperator a(s, am, P2);
    REQUIRE(dominates(r, a));
    std::uniform_real_distribution<double> cut(0.0, 1.0);
    const auto e = level_set(phi, LevelKind::AtMost, cut(rng)).set;
    REQUIRE(leaves_invariant(r, e).violation == 0.0);
    REQUIRE(leaves_invariant(a, e).invariant);
  }
}
