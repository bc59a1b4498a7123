#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "liesim/bounds.hpp"
#include "liesim/numerics.hpp"
#include "taylor_oracle.hpp"

using namespace liesim::numerics;
using liesim::suzuki::build;
using liesim::suzuki::merge_adjacent;
constexpr std::complex<double> kIu{0.0, 1.0};

TEST_CASE("ladder matrix elements match the analytic values") {
  auto rep = fock_rep(2, {.x = true, .p = true});
  const auto& x = rep.matrix("x");
  const auto& p = rep.matrix("p");
  CHECK(std::abs(x(0, 1) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(x(1, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(x(0, 0)) == 0.0);
  CHECK(std::abs(p(0, 1) - (-kIu / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(p(1, 0) - (kIu / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("canonical commutator holds away from the truncation corner") {
  const int d = 64;
  auto rep = fock_rep(d, {.x = true, .p = true});
  Eigen::MatrixXcd c = rep.matrix("x") * rep.matrix("p") - rep.matrix("p") * rep.matrix("x");
  Eigen::MatrixXcd expected = kIu * Eigen::MatrixXcd::Identity(d, d);
  CHECK((c - expected).topLeftCorner(d - 1, d - 1).cwiseAbs().maxCoeff() < 1e-13);
  // the corner carries the whole truncation defect: <D-1|[x,p]|D-1> = i(1-D)
  CHECK(std::abs(c(d - 1, d - 1) - kIu * (1.0 - d)) < 1e-12);
}

TEST_CASE("quadratic generators close the advertised algebra on the interior") {
  auto sys = qho_split(64);
  REQUIRE(sys.constants.has_value());
  const auto labels = sys.constants->basis().labels;
  auto res = structure_residuals(sys.rep, *sys.constants, labels, 4);
  REQUIRE(res.size() == 3);  // pairs (0,1), (0,2), (1,2)
  for (double r : res) CHECK(r < 1e-8);

  // the headline relation at full precision: [i x2, i p2] = -2 i{x,p}
  auto rep = fock_rep(64, {.x2 = true, .p2 = true, .xp = true});
  const auto& a = rep.matrix("i*x2");
  const auto& b = rep.matrix("i*p2");
  Eigen::MatrixXcd lhs = a * b - b * a + 2.0 * rep.matrix("i*{x,p}");
  CHECK(lhs.topLeftCorner(60, 60).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("x^q blocks are plain ladder powers") {
  auto rep = fock_rep(12, {.x = true, .xq_power = 3});
  Eigen::MatrixXcd x3 = rep.matrix("x") * rep.matrix("x") * rep.matrix("x");
  CHECK((rep.matrix("x^3") - x3).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rep.matrix("i*x^3") - kIu * x3).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(rep.boundary_band == 3);
}

TEST_CASE("spin representations are exact") {
  auto half = spin_rep(0.5);
  CHECK(std::abs(half.matrix("Jx")(0, 1) - 0.5) < 1e-15);
  CHECK(std::abs(half.matrix("Jy")(0, 1) - (-0.5 * kIu)) < 1e-15);
  CHECK(std::abs(half.matrix("Jz")(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(half.matrix("Jz")(1, 1) + 0.5) < 1e-15);

  auto big = spin_split(10.0);
  REQUIRE(big.constants.has_value());
  auto res = structure_residuals(big.rep, *big.constants, big.constants->basis().labels, 0);
  for (double r : res) CHECK(r < 1e-12);  // no truncation: exact closure
  // operator norm of Jx stays below J + 1
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(big.rep.matrix("Jx"));
  CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= 10.0 + 1e-9);
}

TEST_CASE("coupled-chain generators close their algebra on the interior") {
  auto sys = coupled_qho_split(2, 8);
  REQUIRE(sys.constants.has_value());
  CHECK(sys.rep.dimension == 64);
  CHECK(static_cast<int>(sys.x_labels.size()) == 5);  // 2M + M(M-1)/2
  auto res = structure_residuals(sys.rep, *sys.constants, sys.constants->basis().labels, 3);
  for (double r : res) CHECK(r < 1e-8);
}

TEST_CASE("spectral propagator matches the Taylor oracle") {
  for (int seed = 1; seed <= 10; ++seed) {
    Eigen::MatrixXcd a = test_support::seeded_skew(8, static_cast<unsigned long long>(seed));
    SpectralPropagator prop(a);
    Eigen::MatrixXcd u = prop.unitary(1.0);
    CHECK((u - test_support::taylor_expm(a)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-13);
  }
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(4, 4);
  CHECK_THROWS_AS(SpectralPropagator{h}, std::invalid_argument);
}

TEST_CASE("eigenstate phases of the oscillator evolution") {
  const int d = 64;
  auto sys = qho_split(d);
  Eigen::MatrixXcd x = sum_generators(sys.rep, sys.x_labels);
  for (int m = 0; m <= 8; ++m) {
    Eigen::VectorXcd phi = fock_basis_state(d, m);
    for (double t : {0.3, 1.0, 2.7}) {
      Eigen::VectorXcd evolved = exact_evolution(x, t, phi);
      std::complex<double> phase = std::exp(-kIu * t * (m + 0.5));
      CHECK((evolved - phase * phi).norm() < 1e-10);
    }
  }
}

TEST_CASE("exponential cache identities") {
  auto rep = fock_rep(16, {.x2 = true, .p2 = true});
  ExponentialCache cache(rep);
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(16, 16);
  CHECK((cache.exponential("i*x2", 0.0) - id).cwiseAbs().maxCoeff() < 1e-14);
  // group law in the duration argument
  Eigen::MatrixXcd ab = cache.exponential("i*x2", 0.3) * cache.exponential("i*x2", 0.45);
  CHECK((ab - cache.exponential("i*x2", 0.75)).cwiseAbs().maxCoeff() < 1e-13);

  Eigen::VectorXcd psi = random_state_below(16, 12, 7);
  Eigen::VectorXcd direct = cache.exponential("i*p2", -0.2) * psi;
  Eigen::VectorXcd in_place = psi;
  Eigen::VectorXcd scratch(16);
  cache.apply_in_place("i*p2", -0.2, in_place, scratch);
  CHECK((direct - in_place).norm() < 1e-13);
}

TEST_CASE("large-dimension cache applies through the eigenbasis") {
  auto rep = fock_rep(512, {.x2 = true});
  ExponentialCache cache(rep);
  Eigen::VectorXcd psi = random_state_below(512, 100, 3);
  Eigen::VectorXcd via_apply = psi;
  Eigen::VectorXcd scratch(512);
  cache.apply_in_place("i*x2", 0.17, via_apply, scratch);
  Eigen::VectorXcd via_matrix = cache.exponential("i*x2", 0.17) * psi;
  CHECK((via_apply - via_matrix).norm() < 1e-11);
  CHECK(std::abs(via_apply.norm() - 1.0) < 1e-12);
}

TEST_CASE("schedule evaluation is unitary and matches step-by-step application") {
  const int d = 16;
  auto sys = qho_split(d);
  auto sched = build({.half_order = 1,
                      .num_generators = 2,
                      .time = 0.8,
                      .segments = 2,
                      .labels = sys.x_labels});
  Eigen::VectorXcd psi = random_state_below(d, 8, 11);
  auto result = evaluate_schedule(sys.rep, sched, psi);
  CHECK(std::abs(result.final_state.norm() - 1.0) < 1e-12);

  // manual right-to-left replay through spectral propagators
  Eigen::VectorXcd manual = psi;
  for (std::int64_t n = 0; n < sched.total_steps(); ++n) {
    auto st = sched.step(n);
    SpectralPropagator prop(sys.rep.matrix(sched.labels()[st.generator]));
    manual = prop.apply(st.duration, manual);
  }
  CHECK((manual - result.final_state).norm() < 1e-12);

  Eigen::MatrixXcd x = sum_generators(sys.rep, sys.x_labels);
  double err = (exact_evolution(x, 0.8, psi) - manual).norm();
  CHECK(result.observed_error == doctest::Approx(err).epsilon(1e-10));
}

TEST_CASE("merging preserves the evaluated unitary") {
  const int d = 16;
  auto sys = qho_split(d);
  for (int p : {1, 2}) {
    auto plain = build({.half_order = p,
                        .num_generators = 2,
                        .time = 1.0,
                        .segments = 3,
                        .labels = sys.x_labels});
    auto merged = merge_adjacent(plain);
    ExponentialCache cache(sys.rep);
    auto unitary_of = [&](const liesim::suzuki::Schedule& s) {
      Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
      for (std::int64_t n = 0; n < s.total_steps(); ++n) {
        auto st = s.step(n);
        u = cache.exponential(s.labels()[st.generator], st.duration) * u;
      }
      return u;
    };
    CHECK((unitary_of(plain) - unitary_of(merged)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("commuting generators make the formula exact") {
  TruncatedRep rep;
  rep.dimension = 8;
  rep.mode_dims = {8};
  rep.boundary_band = 0;
  rep.boundary_mask.assign(8, 0);
  Eigen::VectorXcd da(8), db(8);
  for (int i = 0; i < 8; ++i) {
    da(i) = kIu * (0.3 * i - 1.0);
    db(i) = kIu * (1.7 - 0.45 * i);
  }
  rep.add_skew("a", da.asDiagonal());
  rep.add_skew("b", db.asDiagonal());

  auto sched = build({.half_order = 1,
                      .num_generators = 2,
                      .time = 2.0,
                      .segments = 1,
                      .labels = {"a", "b"}});
  Eigen::VectorXcd psi = random_state_below(8, 8, 5);
  auto result = evaluate_schedule(rep, sched, psi);
  CHECK(result.observed_error < 1e-12);
  CHECK(result.leakage == 0.0);
}

TEST_CASE("extended-precision defect agrees above the double floor and resolves below it") {
  const int d = 64;
  auto sys = qho_split(d);
  Eigen::VectorXcd phi = fock_basis_state(d, 4);

  // well above the floor the two evaluations must coincide
  auto coarse = build({.half_order = 1,
                       .num_generators = 2,
                       .time = 1.0 / 16,
                       .segments = 1,
                       .labels = sys.x_labels});
  double via_double = evaluate_schedule(sys.rep, coarse, phi).observed_error;
  double via_long = schedule_defect_extended(sys.rep, coarse, phi);
  CHECK(via_long == doctest::Approx(via_double).epsilon(1e-8));

  // below the double floor (~4e-14 at this dimension) the fifth-order lambda
  // scaling must stay clean; 2^-9 keeps the true defect (~3e-16) well above
  // the extended evaluation's own floor, which 2^-10 would start to brush
  auto defect_at = [&](double lambda) {
    auto sched = build({.half_order = 2,
                        .num_generators = 2,
                        .time = lambda,
                        .segments = 1,
                        .labels = sys.x_labels});
    return schedule_defect_extended(sys.rep, sched, phi);
  };
  double ratio = defect_at(std::pow(2.0, -8)) / defect_at(std::pow(2.0, -9));
  CHECK(ratio == doctest::Approx(32.0).epsilon(0.05));
}

TEST_CASE("trotter error decreases with segment count") {
  const int d = 32;
  auto sys = qho_split(d);
  Eigen::VectorXcd psi = random_state_below(d, 8, 2);
  double prev = 1e300;
  for (std::int64_t r : {1, 2, 4, 8}) {
    auto sched = build({.half_order = 1,
                        .num_generators = 2,
                        .time = 1.0,
                        .segments = r,
                        .labels = sys.x_labels});
    auto result = evaluate_schedule(sys.rep, sched, psi);
    CHECK(result.observed_error < prev);
    prev = result.observed_error;
  }
}

TEST_CASE("boundary masks mark the top band of every tensor factor") {
  auto single = boundary_mask_for({6}, 2);
  REQUIRE(single.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(static_cast<bool>(single[i]) == (i >= 4));

  auto pair = boundary_mask_for({3, 4}, 1);
  REQUIRE(pair.size() == 12);
  // index = 4*l0 + l1 (first factor slowest); marked iff l0 == 2 or l1 == 3
  for (int l0 = 0; l0 < 3; ++l0)
    for (int l1 = 0; l1 < 4; ++l1)
      CHECK(static_cast<bool>(pair[4 * l0 + l1]) == (l0 == 2 || l1 == 3));

  CHECK(boundary_mask_for({5}, 0) == std::vector<char>(5, 0));
  CHECK_THROWS_AS(boundary_mask_for({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(boundary_mask_for({4}, -1), std::invalid_argument);
}

TEST_CASE("state leakage measures boundary-band weight") {
  auto rep = fock_rep(16, {.x2 = true});  // band 2: levels 14, 15
  Eigen::VectorXcd interior = fock_basis_state(16, 5);
  CHECK(state_leakage(rep, interior) == 0.0);
  Eigen::VectorXcd edge = fock_basis_state(16, 15);
  CHECK(state_leakage(rep, edge) == doctest::Approx(1.0));
  Eigen::VectorXcd mix = (interior + edge) / std::sqrt(2.0);
  CHECK(state_leakage(rep, mix) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("seeded states are deterministic, normalized, and supported low") {
  Eigen::VectorXcd a = random_state_below(32, 10, 42);
  Eigen::VectorXcd b = random_state_below(32, 10, 42);
  CHECK((a - b).norm() == 0.0);
  CHECK(std::abs(a.norm() - 1.0) < 1e-13);
  for (int i = 10; i < 32; ++i) CHECK(std::abs(a(i)) == 0.0);
  Eigen::VectorXcd c = random_state_below(32, 10, 43);
  CHECK((a - c).norm() > 1e-3);
  CHECK_THROWS_AS(random_state_below(8, 9, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_state_below(8, 0, 1), std::invalid_argument);
}

TEST_CASE("state CSV round trip is exact") {
  Eigen::VectorXcd v = random_state_below(12, 12, 9);
  std::ostringstream os;
  write_state_csv(os, v);
  std::istringstream is(os.str());
  Eigen::VectorXcd back = read_state_csv(is);
  REQUIRE(back.size() == v.size());
  CHECK((back - v).norm() == 0.0);

  std::istringstream bad("index,real,imag\n0,1.0,0.0\n2,0.0,0.0\n");
  CHECK_THROWS_AS(read_state_csv(bad), std::invalid_argument);
}

TEST_CASE("representation construction rejects malformed input") {
  CHECK_THROWS_AS(fock_rep(1, {.x = true}), std::invalid_argument);
  CHECK_THROWS_AS(fock_rep(2000, {.x = true}), std::invalid_argument);
  CHECK_THROWS_AS(spin_rep(0.3), std::invalid_argument);
  CHECK_THROWS_AS(spin_rep(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(anharmonic_split(16, 2), std::invalid_argument);
  CHECK_THROWS_AS(coupled_qho_split(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(coupled_qho_split(2, 64), std::invalid_argument);  // 64^2 > cap

  auto rep = fock_rep(8, {.x = true});
  CHECK_THROWS_AS(rep.matrix("nope"), std::invalid_argument);
  Eigen::MatrixXcd not_skew = Eigen::MatrixXcd::Identity(8, 8);
  CHECK_THROWS_AS(rep.add_skew("bad", not_skew), std::invalid_argument);
  CHECK_THROWS_AS(rep.add_hermitian_aux("x", Eigen::MatrixXcd::Zero(8, 8)),
                  std::invalid_argument);
}

TEST_CASE("fock basis states are one-hot") {
  Eigen::VectorXcd v = fock_basis_state(8, 3);
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(std::abs(v(3) - 1.0) < 1e-15);
  CHECK(std::abs(v(0)) == 0.0);
  CHECK_THROWS_AS(fock_basis_state(8, 8), std::invalid_argument);
}
