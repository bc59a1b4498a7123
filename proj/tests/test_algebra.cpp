#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "liesim/algebra.hpp"

using namespace liesim::algebra;

namespace {

bool has_kind(const std::vector<Violation>& vs, Violation::Kind k) {
  for (const auto& v : vs)
    if (v.kind == k) return true;
  return false;
}

}  // namespace

TEST_CASE("built-in algebras pass antisymmetry and Jacobi") {
  CHECK(abelian(3).validate().empty());
  CHECK(su2().validate().empty());
  CHECK(sp2().validate().empty());
  CHECK(heisenberg().validate().empty());
  for (int m = 1; m <= 3; ++m) CHECK(sp2m(m).validate().empty());
}

TEST_CASE("row-sum beta matches hand-computed values") {
  // sp(2) relations: [ix^2, ip^2] = -2 i{x,p}, [ix^2, i{x,p}] = -4 ix^2,
  // [ip^2, i{x,p}] = +4 ip^2. Row sums per pair: 2, 4, 4.
  auto sp = sp2();
  CHECK(sp.gamma(0, 1, 2) == doctest::Approx(-2.0));
  CHECK(sp.gamma(0, 2, 0) == doctest::Approx(-4.0));
  CHECK(sp.gamma(1, 2, 1) == doctest::Approx(4.0));
  CHECK(sp.beta() == doctest::Approx(4.0));

  CHECK(su2().beta() == doctest::Approx(1.0));
  CHECK(heisenberg().beta() == doctest::Approx(1.0));
  CHECK(abelian(4).beta() == doctest::Approx(0.0));
}

TEST_CASE("gamma resolves the mirrored order by antisymmetry") {
  auto sp = sp2();
  CHECK(sp.gamma(1, 0, 2) == doctest::Approx(2.0));
  CHECK(sp.gamma(2, 0, 0) == doctest::Approx(4.0));
  CHECK(sp.gamma(0, 0, 1) == doctest::Approx(0.0));
  CHECK(sp.gamma(0, 1, 0) == doctest::Approx(0.0));  // absent entry
}

TEST_CASE("single-mode sp(2m) reduces to the quadratic triple") {
  auto one_mode = sp2m(1);
  auto reference = sp2();
  REQUIRE(one_mode.size() == 3);
  // Basis order in both: x-type, p-type, mixed.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        CHECK(one_mode.gamma(a, b, c) == doctest::Approx(reference.gamma(a, b, c)));
}

TEST_CASE("sp(2m) sizes and closure for two and three modes") {
  CHECK(sp2m(2).size() == 10);
  CHECK(sp2m(3).size() == 21);
  CHECK(sp2m(2).beta() > 0.0);
  CHECK_THROWS_AS(sp2m(0), std::invalid_argument);
  CHECK_THROWS_AS(sp2m(8), std::invalid_argument);
}

TEST_CASE("inconsistent double-listed entries surface as antisymmetry violations") {
  // A raw document may list both (k, k') and (k', k). Listing them with the
  // same sign contradicts antisymmetry and must be reported, not resolved.
  StructureConstants sc(GeneratorBasis{{"a", "b", "c"}, 3});
  sc.set(0, 1, 2, 1.0);
  sc.set(1, 0, 2, 1.0);
  auto vs = sc.validate();
  REQUIRE(!vs.empty());
  CHECK(has_kind(vs, Violation::Kind::antisymmetry));

  // The consistent mirrored listing is fine.
  StructureConstants ok(GeneratorBasis{{"a", "b", "c"}, 3});
  ok.set(0, 1, 2, 1.0);
  ok.set(1, 0, 2, -1.0);
  CHECK(!has_kind(ok.validate(), Violation::Kind::antisymmetry));
}

TEST_CASE("diagonal entries are antisymmetry violations") {
  StructureConstants sc(GeneratorBasis{{"a", "b"}, 2});
  sc.set(0, 0, 1, 0.5);
  CHECK(has_kind(sc.validate(), Violation::Kind::antisymmetry));
}

TEST_CASE("a flipped sign breaks Jacobi but not antisymmetry") {
  // Flipping the [i x^2, i{x,p}] coefficient leaves every commutator still
  // proportional to a basis element (antisymmetry intact) but de-balances the
  // double-commutator cancellation: the (0,1,2) Jacobi residual becomes -16.
  auto sc = sp2();
  sc.set(0, 2, 0, 4.0);  // canonical entry only; true value is -4
  auto vs = sc.validate();
  CHECK(!has_kind(vs, Violation::Kind::antisymmetry));
  CHECK(has_kind(vs, Violation::Kind::jacobi));

  // rescaling a cyclic 3-generator algebra can never break Jacobi: each
  // double commutator [[a,b],c] is proportional to [c,c] or cancels pairwise,
  // so the flipped-sign su(2) variant must still validate clean
  auto cyclic = su2();
  cyclic.set(0, 1, 2, 1.0);
  CHECK(cyclic.validate().empty());
}

TEST_CASE("rescaling absorbs coefficients with the c_k c_k' / c_k'' rule") {
  auto sc = su2().rescaled({2.0, 3.0, 4.0});
  CHECK(sc.gamma(0, 1, 2) == doctest::Approx(-1.0 * 2.0 * 3.0 / 4.0));
  CHECK(sc.gamma(1, 2, 0) == doctest::Approx(-1.0 * 3.0 * 4.0 / 2.0));
  CHECK(sc.gamma(2, 0, 1) == doctest::Approx(-1.0 * 4.0 * 2.0 / 3.0));
  CHECK(sc.validate().empty());

  auto back = sc.rescaled({0.5, 1.0 / 3.0, 0.25});
  for (int c = 0; c < 3; ++c)
    CHECK(back.gamma(0, 1, c) == doctest::Approx(su2().gamma(0, 1, c)));

  auto named = su2().rescaled({-1.0, -1.0, -1.0}, {"-i*Jx", "-i*Jy", "-i*Jz"});
  CHECK(named.basis().labels[0] == "-i*Jx");
  CHECK(named.gamma(0, 1, 2) == doctest::Approx(1.0));
  CHECK(named.beta() == doctest::Approx(1.0));

  CHECK_THROWS_AS(su2().rescaled({1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(su2().rescaled({1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("reordering permutes labels and constants consistently") {
  auto sc = sp2().reordered({1, 2, 0});
  CHECK(sc.basis().labels[0] == "i*p2");
  CHECK(sc.basis().labels[1] == "i*{x,p}");
  CHECK(sc.basis().labels[2] == "i*x2");
  // [ip^2, i{x,p}] = 4 ip^2: new indices (0, 1) -> 4 at new position 0.
  CHECK(sc.gamma(0, 1, 0) == doctest::Approx(4.0));
  CHECK(sc.validate().empty());
  CHECK(sc.beta() == doctest::Approx(sp2().beta()));
  CHECK_THROWS_AS(sp2().reordered({0, 0, 1}), std::invalid_argument);
}

TEST_CASE("JSON round trip preserves labels and entries") {
  auto sc = sp2();
  auto text = sc.to_json_text();
  auto back = StructureConstants::from_json_text(text);
  REQUIRE(back.size() == sc.size());
  for (int i = 0; i < 3; ++i) CHECK(back.basis().labels[i] == sc.basis().labels[i]);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) CHECK(back.gamma(a, b, c) == doctest::Approx(sc.gamma(a, b, c)));
  CHECK(back.validate().empty());

  CHECK_THROWS_AS(StructureConstants::from_json_text("[]"), std::invalid_argument);
  CHECK_THROWS_AS(StructureConstants::from_json_text("{\"labels\": [\"a\"]}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      StructureConstants::from_json_text(
          "{\"labels\": [\"a\", \"b\"], \"entries\": [[0, 1, 5, 1.0]]}"),
      std::invalid_argument);
}

TEST_CASE("basis construction rejects malformed input") {
  CHECK_THROWS_AS(StructureConstants(GeneratorBasis{{"a", "a"}, 2}), std::invalid_argument);
  CHECK_THROWS_AS(StructureConstants(GeneratorBasis{{}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(StructureConstants(GeneratorBasis{{"a", ""}, 2}), std::invalid_argument);
  CHECK_THROWS_AS(StructureConstants(GeneratorBasis{{"a", "b"}, 3}), std::invalid_argument);
  CHECK_THROWS_AS(StructureConstants(GeneratorBasis{{"a", "b"}, 0}), std::invalid_argument);

  StructureConstants sc(GeneratorBasis{{"a", "b"}, 2});
  CHECK_THROWS_AS(sc.set(0, 1, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sc.set(-1, 1, 0, 1.0), std::invalid_argument);
}
