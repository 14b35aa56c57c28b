#include <doctest.h>

#include <cmath>

#include "altreg/geometry.hpp"

using namespace altreg;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Interior point of the regularizer's coordinate space, margin well away
// from the boundary gate.
Vector interior_point(const Regularizer& reg, SplitMix64& rng) {
  if (reg.kind() == RegularizerKind::BallBarrier) {
    for (;;) {
      Vector v = rng.uniform_vector(reg.dim(), -1.0, 1.0);
      if (v.norm() <= 0.95) return v;
    }
  }
  const int d = reg.dim() + 1;
  Vector e(d);
  for (int i = 0; i < d; ++i) e[i] = 0.05 + rng.next_double();
  e /= e.sum();
  return e.head(reg.dim());
}

Vector central_diff_grad(const std::function<double(const Vector&)>& f,
                         const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("domain basics") {
  Domain s = Domain::simplex(3);
  CHECK(s.diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.contains(vec({0.2, 0.3, 0.5})));
  CHECK_FALSE(s.contains(vec({0.2, 0.3, 0.4})));
  CHECK(s.center().sum() == doctest::Approx(1.0));

  Domain b = Domain::ball(4);
  CHECK(b.diameter() == 2.0);
  CHECK(b.contains(Vector::Zero(4)));
  CHECK_FALSE(b.interior(vec({1.0, 0, 0, 0}), 1e-10));

  Domain iv = Domain::interval(-1.0, 3.0);
  CHECK(iv.diameter() == 4.0);
  CHECK(iv.project(vec({7.0}))[0] == 3.0);

  Domain box = Domain::box(2, -1.0, 1.0);
  CHECK(box.diameter() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(Domain::interval(2.0, 1.0), ValidationError);
}

TEST_CASE("simplex embedding round trips") {
  SplitMix64 rng(11);
  Domain s = Domain::simplex(5);
  for (int i = 0; i < 100; ++i) {
    Vector p = s.sample(rng);
    Vector back = simplex_lift(simplex_embed(p));
    CHECK((back - p).cwiseAbs().maxCoeff() <= 1e-15);
  }
  Vector z = vec({0.1, 0.2});
  CHECK((simplex_embed(simplex_lift(z)) - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bregman divergence definition") {
  auto sqnorm = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  auto sqgrad = [](const Vector& x) { return x; };
  CHECK(bregman(sqnorm, sqgrad, vec({0.3, 0.7}), vec({0.3, 0.7})) == 0.0);
  CHECK(bregman(sqnorm, sqgrad, vec({1, 0}), vec({0, 1})) ==
        doctest::Approx(1.0).epsilon(1e-15));

  // Finite-difference oracle for the ball barrier in d=3.
  Regularizer reg = Regularizer::ball_barrier(3);
  SplitMix64 rng(7);
  for (int i = 0; i < 50; ++i) {
    Vector x = interior_point(reg, rng), y = interior_point(reg, rng);
    auto f = [&](const Vector& v) { return reg.value(v); };
    double oracle = reg.value(x) - reg.value(y) -
                    central_diff_grad(f, y, 1e-6).dot(x - y);
    CHECK(bregman(reg, x, y) == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(bregman(reg, x, y) >= -1e-12);
  }
}

TEST_CASE("kl divergence") {
  Vector u = vec({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(kl(u, u) == 0.0);
  CHECK(kl(vec({1, 0}), vec({0.5, 0.5})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(std::isinf(kl(vec({0.5, 0.5}), vec({1, 0}))));

  // Bregman form of negative entropy over full probability vectors.
  auto negent = [](const Vector& p) {
    double s = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p[i] > 0) s += p[i] * std::log(p[i]);
    return s;
  };
  auto negent_grad = [](const Vector& p) {
    Vector g(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) g[i] = std::log(p[i]) + 1.0;
    return g;
  };
  SplitMix64 rng(3);
  Domain s = Domain::simplex(5);
  for (int i = 0; i < 200; ++i) {
    Vector p = s.sample(rng), q = s.sample(rng);
    CHECK(kl(p, q) ==
          doctest::Approx(bregman(negent, negent_grad, p, q)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(kl(vec({0.2, 0.3}), vec({0.5, 0.5})), DomainError);
}

TEST_CASE("regularizer closed forms") {
  Regularizer ball = Regularizer::ball_barrier(2);
  CHECK(ball.sigma() == 2.0);
  CHECK(ball.third_order_m() == 4.0);
  CHECK(ball.barrier_nu().value() == 1.0);
  CHECK(ball.conj_value(Vector::Zero(2)) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-15));
  CHECK(ball.conj_grad(Vector::Zero(2)).norm() == 0.0);

  Regularizer ent = Regularizer::simplex_entropy(4);
  CHECK(ent.sigma() == 1.0);
  CHECK(ent.third_order_m() == 8.0);
  CHECK_FALSE(ent.barrier_nu().has_value());
  CHECK(ent.conj_value(Vector::Zero(3)) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));

  // grad(conj) inverts grad.
  SplitMix64 rng(17);
  for (const Regularizer& reg : {ball, ent}) {
    for (int i = 0; i < 200; ++i) {
      Vector x = interior_point(reg, rng);
      Vector back = reg.conj_grad(reg.grad(x));
      CHECK((back - x).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("regularizer boundary gate") {
  Regularizer ball = Regularizer::ball_barrier(2);
  Vector near = vec({1.0 - 1e-12, 0.0});
  CHECK_THROWS_AS(ball.value(near), DomainError);
  CHECK_THROWS_AS(ball.grad(vec({1.5, 0.0})), DomainError);
  Regularizer ent = Regularizer::simplex_entropy(3);
  CHECK_THROWS_AS(ent.value(vec({1e-12, 0.5})), DomainError);
  CHECK_NOTHROW(ent.value(vec({0.3, 0.3})));
}

TEST_CASE("conjugate duality") {
  SplitMix64 rng(23);
  for (const Regularizer& reg :
       {Regularizer::ball_barrier(3), Regularizer::simplex_entropy(4)}) {
    for (int i = 0; i < 1000; ++i) {
      Vector x1 = interior_point(reg, rng), x2 = interior_point(reg, rng);
      double lhs = bregman(reg, x1, x2);
      Vector w1 = reg.grad(x1), w2 = reg.grad(x2);
      double rhs = reg.conj_value(w2) - reg.conj_value(w1) -
                   reg.conj_grad(w1).dot(w2 - w1);
      CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
  }
}

TEST_CASE("strong convexity and gradient consistency") {
  SplitMix64 rng(29);
  for (const Regularizer& reg :
       {Regularizer::ball_barrier(3), Regularizer::simplex_entropy(4)}) {
    for (int i = 0; i < 500; ++i) {
      Vector x = interior_point(reg, rng), y = interior_point(reg, rng);
      CHECK(bregman(reg, x, y) >=
            0.5 * reg.sigma() * (x - y).squaredNorm() - 1e-9);
    }
    for (int i = 0; i < 100; ++i) {
      Vector x = interior_point(reg, rng);
      auto f = [&](const Vector& v) { return reg.value(v); };
      Vector fd = central_diff_grad(f, x, 1e-6);
      Vector g = reg.grad(x);
      CHECK((g - fd).norm() <= 1e-6 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("ball conjugate hessian is positive semidefinite") {
  SplitMix64 rng(31);
  Regularizer ball = Regularizer::ball_barrier(3);
  for (int i = 0; i < 300; ++i) {
    Vector w = rng.uniform_vector(3, -5.0, 5.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(ball.conj_hess(w));
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("commutator gap obeys the third-order bound") {
  Regularizer ball = Regularizer::ball_barrier(3);
  auto zero = commutator_gap(ball, vec({0.4, -0.2, 1.0}), vec({0.4, -0.2, 1.0}));
  CHECK(zero.gap == 0.0);
  CHECK(zero.bound == 0.0);

  SplitMix64 rng(37);
  for (const Regularizer& reg :
       {Regularizer::ball_barrier(3), Regularizer::simplex_entropy(4)}) {
    for (int i = 0; i < 10000; ++i) {
      Vector w = rng.uniform_vector(reg.dim(), -3.0, 3.0);
      Vector dw = rng.uniform_vector(reg.dim(), -1.0, 1.0);
      dw *= rng.next_double() / std::max(dw.norm(), 1e-9);  // |dw| <= 1
      auto r = commutator_gap(reg, w, w + dw);
      CHECK(r.gap <= r.bound + 1e-9);
    }
  }
}

TEST_CASE("project_simplex") {
  CHECK((project_simplex(vec({0.2, 0.8})) - vec({0.2, 0.8})).norm() <= 1e-15);
  CHECK((project_simplex(vec({2.0, 0.0})) - vec({1.0, 0.0})).norm() <= 1e-15);
  CHECK((project_simplex(vec({0.6, 0.6})) - vec({0.5, 0.5})).norm() <= 1e-15);

  // Feasibility, idempotence and grid optimality on random inputs.
  SplitMix64 rng(41);
  Domain s = Domain::simplex(3);
  for (int i = 0; i < 200; ++i) {
    Vector v = rng.uniform_vector(3, -2.0, 2.0);
    Vector p = project_simplex(v);
    CHECK(s.contains(p, 1e-12));
    CHECK((project_simplex(p) - p).cwiseAbs().maxCoeff() <= 1e-12);
    if (i >= 20) continue;
    // brute-force grid minimization of |p - v|^2 over the simplex
    double best_grid = std::numeric_limits<double>::infinity();
    const int n = 60;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b)
        best_grid = std::min(
            best_grid,
            (vec({double(a) / n, double(b) / n, double(n - a - b) / n}) - v)
                .squaredNorm());
    CHECK((p - v).squaredNorm() <= best_grid + 1e-12);
  }
  CHECK_THROWS_AS(project_simplex(vec({std::nan(""), 0.0})), DomainError);
}

TEST_CASE("shrink_comparator") {
  Vector u = vec({1, 0, 0});
  Vector anchor = vec({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK((shrink_comparator(u, anchor, 1.0) - anchor).norm() == 0.0);
  Vector mid = shrink_comparator(u, anchor, 0.5);
  CHECK((mid - vec({2.0 / 3, 1.0 / 6, 1.0 / 6})).cwiseAbs().maxCoeff() <= 1e-15);

  const double eps = 1e-3;  // vertex pulled interior, min coordinate eps/3
  Vector w = shrink_comparator(u, anchor, eps);
  CHECK(w.minCoeff() == doctest::Approx(eps / 3.0).epsilon(1e-12));
  CHECK(w.minCoeff() > 0.0);

  CHECK_THROWS_AS(shrink_comparator(u, anchor, 0.0), ValidationError);
  CHECK_THROWS_AS(shrink_comparator(u, anchor, 1.5), ValidationError);
  CHECK_THROWS_AS(shrink_comparator(u, anchor, -0.1), ValidationError);
}
