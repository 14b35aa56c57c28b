#include <doctest.h>

#include <cmath>

#include "altreg/adversary.hpp"
#include "altreg/learners.hpp"
#include "altreg/regret.hpp"

using namespace altreg;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("ledger accounting") {
  SUBCASE("constant play at the comparator has zero alternating regret") {
    RegretLedger ledger(Domain::simplex(2));
    Vector u = vec({0.25, 0.75});
    SplitMix64 rng(1);
    for (std::int64_t t = 1; t <= 50; ++t)
      ledger.record(t, u, LossFn::linear(rng.uniform_vector(2, 0, 1)), u);
    CHECK(ledger.reg_alt(u) == 0.0);
    CHECK(ledger.reg_alt(u) == ledger.reg_std(u) + ledger.reg_cht(u));
  }
  SUBCASE("single round example") {
    RegretLedger ledger(Domain::simplex(2));
    ledger.record(1, vec({1, 0}), LossFn::linear(vec({1, 0})), vec({0, 1}));
    Vector u = vec({0, 1});
    CHECK(ledger.reg_std(u) == doctest::Approx(1.0));
    CHECK(ledger.reg_cht(u) == doctest::Approx(0.0));
    CHECK(ledger.reg_alt(u) == doctest::Approx(1.0));
  }
  SUBCASE("out-of-order records are rejected") {
    RegretLedger ledger(Domain::simplex(2));
    ledger.record(1, vec({0.5, 0.5}), LossFn::linear(vec({1, 0})), vec({0.5, 0.5}));
    CHECK_THROWS_AS(ledger.record(3, vec({0.5, 0.5}), LossFn::linear(vec({1, 0})),
                                  vec({0.5, 0.5})),
                    ValidationError);
  }
  SUBCASE("additivity is exact for every probe") {
    SplitMix64 rng(2);
    RegretLedger ledger(Domain::simplex(3));
    Domain s = Domain::simplex(3);
    Vector prev = s.sample(rng);
    for (std::int64_t t = 1; t <= 100; ++t) {
      Vector next = s.sample(rng);
      ledger.record(t, prev, LossFn::linear(rng.uniform_vector(3, 0, 1)), next);
      prev = next;
    }
    for (int i = 0; i < 20; ++i) {
      Vector u = s.sample(rng);
      CHECK(ledger.reg_alt(u) == ledger.reg_std(u) + ledger.reg_cht(u));
    }
  }
}

TEST_CASE("hedge on the cycling environment hits the closed form") {
  const double eta = 1.0;
  const std::int64_t cycles = 50;
  Hedge h(3, eta);
  Environment env = Environment::hedge_cycle();
  RegretLedger ledger(Domain::simplex(3));
  for (std::int64_t t = 1; t <= 3 * cycles; ++t) {
    Vector x = h.act();
    LossFn f = env.loss(t);
    h.observe(f);
    ledger.record(t, x, f, h.act());
  }
  const double oracle = hedge_cycle_regret_oracle(eta, cycles);
  CHECK(std::abs(ledger.reg_alt() - oracle) <= 1e-9 * std::abs(oracle));
}

TEST_CASE("best_fixed") {
  SUBCASE("cycling one-hot losses tie at value T, lowest index wins") {
    Environment env = Environment::hedge_cycle();
    auto losses = env.sequence(3 * 40);
    BestFixed b = best_fixed(losses, Domain::simplex(3));
    CHECK(b.value == doctest::Approx(40.0));
    CHECK(b.point[0] == 1.0);
  }
  SUBCASE("constant (1,0,0) losses have benchmark zero") {
    Environment env = Environment::hedge_constant();
    auto losses = env.sequence(25);
    BestFixed b = best_fixed(losses, Domain::simplex(3));
    CHECK(b.value == 0.0);
    CHECK(b.point[1] == 1.0);  // ties between actions 2 and 3 break low
  }
  SUBCASE("single quadratic on the ball") {
    std::vector<LossFn> losses = {
        LossFn::quadratic(Matrix::Identity(2, 2), Vector::Zero(2), 0.0)};
    BestFixed b = best_fixed(losses, Domain::ball(2));
    CHECK(b.value == doctest::Approx(0.0));
    CHECK(b.point.norm() <= 1e-9);
  }
  SUBCASE("linear over the ball points against the gradient sum") {
    std::vector<LossFn> losses = {LossFn::linear(vec({3, 4}))};
    BestFixed b = best_fixed(losses, Domain::ball(2));
    CHECK(b.value == doctest::Approx(-5.0));
    CHECK((b.point - vec({-0.6, -0.8})).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("empty sequence is rejected") {
    CHECK_THROWS_AS(best_fixed({}, Domain::simplex(2)), ValidationError);
  }
}

TEST_CASE("best_fixed quadratics agree with a multistart descent oracle") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<LossFn> losses;
    for (int i = 0; i < 5; ++i) {
      Matrix g(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) g(r, c) = rng.uniform(-1, 1);
      losses.push_back(LossFn::quadratic(g.transpose() * g,
                                         rng.uniform_vector(2, -1, 1), 0.0));
    }
    for (const Domain& dom : {Domain::ball(2), Domain::box(2, -1, 1)}) {
      BestFixed b = best_fixed(losses, dom);
      auto total = [&](const Vector& x) {
        double v = 0;
        for (const auto& f : losses) v += f.eval(x);
        return v;
      };
      auto total_grad = [&](const Vector& x) {
        Vector g = Vector::Zero(2);
        for (const auto& f : losses) g += f.grad(x);
        return g;
      };
      // independent multistart projected-gradient oracle
      double oracle = std::numeric_limits<double>::infinity();
      for (int s = 0; s < 40; ++s) {
        Vector x = dom.sample(rng);
        double fx = total(x);
        double step = 0.2;
        for (int it = 0; it < 4000; ++it) {
          Vector cand = dom.project(x - step * total_grad(x));
          double fc = total(cand);
          if (fc < fx) {
            x = cand;
            fx = fc;
          } else {
            step *= 0.7;
            if (step < 1e-12) break;
          }
        }
        oracle = std::min(oracle, fx);
      }
      CHECK(std::abs(b.value - oracle) <= 1e-8);
      CHECK(dom.contains(b.point, 1e-9));
    }
  }
}

TEST_CASE("linear reg_alt maximizes at a vertex") {
  SplitMix64 rng(44);
  RegretLedger ledger(Domain::simplex(4));
  Hedge h(4, 0.2);
  for (std::int64_t t = 1; t <= 120; ++t) {
    Vector x = h.act();
    LossFn f = LossFn::linear(rng.uniform_vector(4, 0, 1));
    h.observe(f);
    ledger.record(t, x, f, h.act());
  }
  double best_vertex = -1e300;
  for (int i = 0; i < 4; ++i) {
    Vector e = Vector::Zero(4);
    e[i] = 1.0;
    best_vertex = std::max(best_vertex, ledger.reg_alt(e));
  }
  CHECK(ledger.reg_alt() == doctest::Approx(best_vertex).epsilon(1e-12));
  for (int i = 0; i < 10; ++i)
    CHECK(ledger.reg_alt() >= ledger.reg_alt(Domain::simplex(4).sample(rng)) - 1e-12);
}

TEST_CASE("hedge identity gap") {
  SUBCASE("single step at u = p1") {
    const double eta = 0.4;
    Hedge h(3, eta);
    std::vector<Vector> ps = {h.act()};
    std::vector<Vector> ells = {vec({0.7, 0.1, 0.3})};
    h.observe(LossFn::linear(ells[0]));
    ps.push_back(h.act());
    CHECK(hedge_identity_gap(ps, ells, eta, ps[0]) <= 1e-12);
  }
  SUBCASE("long random trace, uniform comparator") {
    SplitMix64 rng(55);
    const double eta = 0.11;
    Hedge h(5, eta);
    std::vector<Vector> ps, ells;
    for (int t = 0; t < 1000; ++t) {
      ps.push_back(h.act());
      Vector ell = rng.uniform_vector(5, 0, 1);
      ells.push_back(ell);
      h.observe(LossFn::linear(ell));
    }
    ps.push_back(h.act());
    CHECK(hedge_identity_gap(ps, ells, eta, Vector::Constant(5, 0.2)) <= 1e-8);
  }
  SUBCASE("vertex comparator via the zero-entry convention") {
    const double eta = 0.5;
    Hedge h(3, eta);
    Environment env = Environment::hedge_cycle();
    std::vector<Vector> ps, ells;
    for (std::int64_t t = 1; t <= 99; ++t) {
      ps.push_back(h.act());
      ells.push_back(env.loss(t).ell());
      h.observe(env.loss(t));
    }
    ps.push_back(h.act());
    CHECK(hedge_identity_gap(ps, ells, eta, vec({1, 0, 0})) <= 1e-8);
  }
  SUBCASE("mismatched eta is detected") {
    const double eta = 0.3;
    Hedge h(3, eta);
    std::vector<Vector> ps = {h.act()};
    std::vector<Vector> ells = {vec({1, 0, 0}), vec({0, 1, 0})};
    h.observe(LossFn::linear(ells[0]));
    ps.push_back(h.act());
    h.observe(LossFn::linear(ells[1]));
    ps.push_back(h.act());
    CHECK_THROWS_AS(hedge_identity_gap(ps, ells, 0.9, Vector::Constant(3, 1.0 / 3)),
                    ValidationError);
  }
}
