#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hdlda/bench.hpp"
#include "hdlda/errors.hpp"
#include "hdlda/model.hpp"
#include "oracles.hpp"

using namespace hdlda;
using Catch::Matchers::WithinAbs;

namespace {

GaussianPair sim1(Eigen::Index p = 10) {
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(p);
  mu1[3] = 3.0;
  return GaussianPair(Eigen::VectorXd::Zero(p), mu1, PsdMatrix::identity(p));
}

/// 2-d model with Bayes direction of length 2d along e1, and a rule rotated by
/// angle a with offset error d0 along its own unit direction.
LinearRule rotated(const GaussianPair& model, double a, double d0 = 0.0) {
  const Eigen::Vector2d dir(std::cos(a), std::sin(a));
  return LinearRule{dir, model.midpoint() + d0 * dir};
}

GaussianPair planar(double d) {
  return GaussianPair(Eigen::Vector2d(-d, 0.0), Eigen::Vector2d(d, 0.0), PsdMatrix::identity(2));
}

}  // namespace

TEST_CASE("bayes rule of the first simulation", "[model]") {
  const GaussianPair m = sim1();
  const LinearRule r = bayes_rule(m);
  Eigen::VectorXd e4 = Eigen::VectorXd::Zero(10);
  e4[3] = 1.0;
  CHECK(r.direction.isApprox(3.0 * e4));
  CHECK(r.offset.isApprox(1.5 * e4));
  CHECK_THAT(l2pc_norm(r.direction, m.cov()), WithinAbs(3.0, 1e-15));
  CHECK_THAT(conditional_risk(r, m), WithinAbs(oracle::phi(-1.5), 1e-12));
  CHECK_THAT(bayes_risk(m), WithinAbs(0.0668072, 5e-8));
}

TEST_CASE("degenerate models and rules", "[model]") {
  const GaussianPair same(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1), PsdMatrix::identity(2));
  CHECK(bayes_rule(same).degenerate());
  CHECK(bayes_risk(same) == 0.5);
  const GaussianPair nullspace(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1),
                               PsdMatrix::diagonal(Eigen::Vector2d(1.0, 0.0)));
  CHECK(bayes_rule(nullspace).degenerate());
  const LinearRule zero{Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(10)};
  CHECK(conditional_risk(zero, sim1()) == 0.5);
  CHECK_THROWS_AS(rule_geometry(zero, sim1()), DegenerateGeometry);
  CHECK_THROWS_AS(GaussianPair(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0), PsdMatrix::identity(2)),
                  ContractViolation);
}

TEST_CASE("L2(P_C) inner product", "[model]") {
  const Eigen::Vector2d e1(1.0, 0.0);
  CHECK(l2pc_inner(e1, e1, PsdMatrix::identity(2)) == 1.0);
  CHECK(l2pc_inner(e1, e1, PsdMatrix::diagonal(Eigen::Vector2d(2.0, 1.0))) == 2.0);
  CHECK_THROWS_AS(l2pc_inner(e1, Eigen::Vector3d::Ones(), PsdMatrix::identity(2)), ContractViolation);
}

TEST_CASE("risk of a rotated rule", "[model]") {
  const GaussianPair m = planar(1.0);  // ||F10|| = 2
  const double a = std::acos(0.9);
  const LinearRule r = rotated(m, a);
  CHECK_THAT(conditional_risk(r, m), WithinAbs(oracle::phi(-0.9), 1e-12));
  CHECK_THAT(conditional_risk(r, m), WithinAbs(0.184060, 5e-7));
  CHECK_THAT(excess_risk(r, m), WithinAbs(0.025405, 5e-7));

  // Scale invariance and class flip.
  const LinearRule scaled{3.5 * r.direction, r.offset};
  CHECK_THAT(conditional_risk(scaled, m), WithinAbs(conditional_risk(r, m), 1e-15));
  const LinearRule flipped{-r.direction, r.offset};
  CHECK_THAT(conditional_risk(flipped, m), WithinAbs(1.0 - conditional_risk(r, m), 1e-15));
}

TEST_CASE("risk agrees with Monte Carlo", "[model]") {
  const GaussianPair m = planar(1.0);
  const LinearRule r = rotated(m, std::acos(0.9), 0.3);
  RngStream rng(3);
  const Dataset test = sample(m, 500000, 500000, rng);
  const auto labels = predict(r, test.rows);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) wrong += labels[i] != test.labels[i];
  const double rate = static_cast<double>(wrong) / static_cast<double>(labels.size());
  const double risk = conditional_risk(r, m);
  CHECK(std::abs(rate - risk) <= 3.0 * std::sqrt(risk * (1 - risk) / 1e6));
}

TEST_CASE("geometry of a rule", "[model]") {
  const GaussianPair m = planar(1.0);
  const RuleGeometry bayes = rule_geometry(bayes_rule(m), m);
  CHECK_THAT(bayes.alpha, WithinAbs(0.0, 1e-7));
  CHECK(bayes.d0 == 0.0);
  CHECK(bayes.separation_d == 1.0);

  const RuleGeometry ortho = rule_geometry(rotated(m, std::numbers::pi / 2), m);
  CHECK_THAT(ortho.alpha, WithinAbs(std::numbers::pi / 2, 1e-12));

  // Offset error along the Euclidean unit direction, non-identity covariance.
  const GaussianPair g(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 2), PsdMatrix::diagonal(Eigen::Vector2d(4.0, 0.5)));
  const Eigen::Vector2d f(1.0, 3.0);
  const double delta = 0.7;
  const LinearRule r{f, g.midpoint() + delta * f.normalized()};
  const RuleGeometry geo = rule_geometry(r, g);
  CHECK_THAT(geo.d0, WithinAbs(delta * f.norm() / l2pc_norm(f, g.cov()), 1e-14));
  CHECK_THAT(std::cos(geo.alpha), WithinAbs(geo.cos_alpha, 1e-12));
}

TEST_CASE("excess-risk bounds at a reference point", "[model]") {
  const GaussianPair m = planar(1.0);
  const RuleGeometry geo = rule_geometry(rotated(m, std::acos(0.9)), m);
  const RiskBounds b = th1_bounds(geo);
  // b = 0.1, a = 0.9
  const double lower = 0.5 * (oracle::phi(0.1) - 0.5) * std::exp(-0.5);
  const double upper = (oracle::phi(0.2) - 0.5) * std::exp(-0.405);
  CHECK_THAT(b.lower, WithinAbs(lower, 1e-12));
  CHECK_THAT(b.upper, WithinAbs(upper, 1e-12));
  CHECK_THAT(b.lower, WithinAbs(0.012078, 5e-7));
  CHECK_THAT(b.upper, WithinAbs(0.052865, 1e-6));
  const double excess = excess_risk(rotated(m, std::acos(0.9)), m);
  CHECK(b.lower <= excess);
  CHECK(excess <= b.upper);

  const RiskBounds zero = th1_bounds(rule_geometry(bayes_rule(m), m));
  CHECK_THAT(zero.lower, WithinAbs(0.0, 1e-15));
  CHECK_THAT(zero.upper, WithinAbs(0.0, 1e-15));
}

TEST_CASE("pure rotation: excess has the closed form and respects the bounds", "[model]") {
  for (int i = 1; i <= 16; ++i) {
    const double d = 0.25 * i;
    const GaussianPair m = planar(d);
    for (int k = 0; k <= 12; ++k) {
      const double a = k * std::numbers::pi / 24.0;
      const LinearRule r = rotated(m, a);
      const double excess = excess_risk(r, m);
      INFO("d = " << d << ", alpha = " << a);
      CHECK_THAT(excess, WithinAbs(oracle::phi(-d * std::cos(a)) - oracle::phi(-d), 1e-12));
      const RiskBounds b = th1_bounds(rule_geometry(r, m));
      CHECK(b.lower <= excess + 1e-12);
      CHECK(excess <= b.upper + 1e-12);
      CHECK(excess >= -1e-12);
    }
  }
}

TEST_CASE("bayes risk equals the risk of the bayes rule on random models", "[model]") {
  RngStream rng(17);
  for (int t = 0; t < 100; ++t) {
    const int p = 1 + t % 7;
    Eigen::VectorXd mu0(p), mu1(p), var(p);
    for (int i = 0; i < p; ++i) {
      mu0[i] = rng.normal();
      mu1[i] = rng.normal();
      var[i] = 0.1 + 3.0 * rng.uniform();
    }
    const GaussianPair m(mu0, mu1, PsdMatrix::diagonal(var));
    CHECK_THAT(bayes_risk(m), WithinAbs(conditional_risk(bayes_rule(m), m), 1e-12));
  }
}

TEST_CASE("class distance is nonnegative", "[model]") {
  const GaussianPair m = planar(1.0);
  CHECK_THAT(class_l1_distance(m), WithinAbs(oracle::phi(1.0) - oracle::phi(-1.0), 1e-12));
}

TEST_CASE("reconciled second simulation", "[model]") {
  const GaussianPair m = make_simulation(Simulation::sim2, 100);
  CHECK_THAT(std::pow(l2pc_norm(m.bayes_direction(), m.cov()), 2), WithinAbs(5.125, 1e-9));
  CHECK_THAT(bayes_risk(m), WithinAbs(oracle::phi(-std::sqrt(5.125) / 2), 1e-12));
  CHECK_THAT(bayes_risk(m), WithinAbs(0.1288, 5e-5));
  CHECK(bayes_risk(make_simulation(Simulation::sim2_literal, 100)) > 0.45);
}

TEST_CASE("l^q quasi-norm and sparsity class", "[model]") {
  const PsdMatrix id = PsdMatrix::identity(2);
  CHECK(lq_quasi_norm(Eigen::Vector2d::Zero(), id, 0.5) == 0.0);
  for (double q : {0.3, 1.0, 1.7}) CHECK_THAT(lq_quasi_norm(Eigen::Vector2d(1, 0), id, q), WithinAbs(1.0, 1e-15));
  CHECK_THAT(lq_quasi_norm(Eigen::Vector2d(1, 1), PsdMatrix::diagonal(Eigen::Vector2d(4, 1)), 1.0), WithinAbs(3.0, 1e-15));
  CHECK_THROWS_AS(lq_quasi_norm(Eigen::Vector2d(1, 1), id, 2.0), DomainError);
  CHECK_THROWS_AS(SparsityClass(0.0, 1.0), DomainError);
  const SparsityClass ball(1.0, 3.0);
  CHECK(ball.contains(Eigen::Vector2d(1, 1), PsdMatrix::diagonal(Eigen::Vector2d(4, 1))));
  CHECK_FALSE(SparsityClass(1.0, 2.9).contains(Eigen::Vector2d(1, 1), PsdMatrix::diagonal(Eigen::Vector2d(4, 1))));
}

TEST_CASE("oracle complexity", "[model]") {
  CHECK(oracle_complexity(GaussianPair(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), PsdMatrix::identity(2)), 5) == 0.0);
  CHECK(oracle_complexity(sim1(), 1) == 1.0);
  CHECK(oracle_complexity(sim1(), 1000) == 1.0);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(8);
  mu1.head(3).setConstant(1.0);
  CHECK(oracle_complexity(GaussianPair(Eigen::VectorXd::Zero(8), mu1, PsdMatrix::identity(8)), 4) == 3.0);
  const GaussianPair dense(Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(), PsdMatrix::dense(Eigen::Matrix2d::Identity()));
  CHECK_THROWS_AS(oracle_complexity(dense, 3), Unsupported);
}

TEST_CASE("sampling", "[model]") {
  const GaussianPair m = sim1(5);
  RngStream a(1), b(1);
  const Dataset x = sample(m, 3, 4, a);
  const Dataset y = sample(m, 3, 4, b);
  CHECK(x.rows == y.rows);
  CHECK(x.labels == std::vector<int>{0, 0, 0, 1, 1, 1, 1});

  RngStream c(2);
  const Dataset only1 = sample(m, 0, 5, c);
  CHECK(only1.size() == 5);
  CHECK(only1.count(0) == 0);

  RngStream d(4);
  const std::size_t n = 100000;
  const Dataset big = sample(m, 0, n, d);
  const Eigen::VectorXd mean = big.rows.colwise().mean().transpose();
  CHECK((mean - m.mu1()).norm() <= 4.0 * std::sqrt(5.0) / std::sqrt(static_cast<double>(n)));

  Eigen::Matrix2d c2;
  c2 << 2.0, 0.8, 0.8, 1.0;
  const GaussianPair dm(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), PsdMatrix::dense(c2));
  RngStream e(8);
  const Dataset dd = sample(dm, n, 0, e);
  const Eigen::MatrixXd centered = dd.rows.rowwise() - dd.rows.colwise().mean();
  const Eigen::Matrix2d cov = centered.transpose() * centered / (n - 1.0);
  CHECK((cov - c2).cwiseAbs().maxCoeff() < 0.03);
}
