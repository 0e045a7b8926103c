#include <random>

#include "doctest.h"
#include "support.hpp"

#include "pairscope/scattering.hpp"

using namespace pairscope;
using testsupport::prototypical;

namespace {

double op_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).jacobiSvd().singularValues()(0);
}

ModelParams weak_exchange(double peak = 0.02) {
  ModelParams p = prototypical();
  p.upsilon = MomentumProfile(peak, 1.0);
  return p;
}

}  // namespace

TEST_CASE("exact interaction-picture propagator") {
  ModelParams p = prototypical();
  const TorusGrid grid(6);
  const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
  const int dim = fiber.dim();

  SUBCASE("coincident times give the identity") {
    const Eigen::MatrixXcd v = interaction_picture_exact(fiber, 0.8, 0.8);
    CHECK(op_distance(v, Eigen::MatrixXcd::Identity(dim, dim)) < 1e-12);
  }
  SUBCASE("unitarity and the two-parameter group law") {
    const double s = 0.2, t = 1.9, r = -0.7;
    const Eigen::MatrixXcd vts = interaction_picture_exact(fiber, s, t);
    CHECK(op_distance(vts.adjoint() * vts, Eigen::MatrixXcd::Identity(dim, dim)) < 1e-8);
    const Eigen::MatrixXcd vsr = interaction_picture_exact(fiber, r, s);
    const Eigen::MatrixXcd vtr = interaction_picture_exact(fiber, r, t);
    CHECK(op_distance(vts * vsr, vtr) < 1e-10);
  }
  SUBCASE("uncoupled fiber is frozen at the identity") {
    ModelParams q = p;
    q.upsilon = LatticeCoupling{};
    const ScatteringFiber free(q, grid, -kPi, 0.3 * kPi, q.onsite.value());
    const Eigen::MatrixXcd v = interaction_picture_exact(free, -0.4, 2.2);
    CHECK(op_distance(v, Eigen::MatrixXcd::Identity(dim, dim)) < 1e-12);
  }
  SUBCASE("conjugation preserves the fiber spectrum") {
    const Eigen::MatrixXcd a = fiber.full();
    const Eigen::MatrixXcd v = interaction_picture_exact(fiber, 0.0, 1.3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ec(v.adjoint() * a * v);
    CHECK((ea.eigenvalues() - ec.eigenvalues()).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("non-autonomous integration") {
  ModelParams p = prototypical();
  const TorusGrid grid(6);
  const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
  const double horizon = 2.0 / p.epsilon_ev;

  SUBCASE("fourth-order convergence under step halving") {
    const double e1 = propagate_ode(fiber, 0.0, horizon, 100).oracle_error;
    const double e2 = propagate_ode(fiber, 0.0, horizon, 200).oracle_error;
    const double e3 = propagate_ode(fiber, 0.0, horizon, 400).oracle_error;
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
    CHECK(e2 / e3 > 12.0);
    CHECK(e2 / e3 < 20.0);
  }
  SUBCASE("long-horizon accuracy and unitarity") {
    const PropagatorRecord rec = propagate_ode(fiber, 0.0, 5.0 / p.epsilon_ev, 2000);
    CHECK(rec.oracle_error < 1e-6);
    CHECK(rec.unitarity_error < 1e-8);
  }
  SUBCASE("uncoupled fiber stays at the identity to machine precision") {
    ModelParams q = p;
    q.upsilon = LatticeCoupling{};
    const ScatteringFiber free(q, grid, 0.4, 0.4, q.onsite.value());
    const PropagatorRecord rec = propagate_ode(free, 0.0, horizon, 64, false);
    CHECK(op_distance(rec.matrix, Eigen::MatrixXcd::Identity(free.dim(), free.dim())) < 1e-14);
  }
  SUBCASE("too few steps are rejected") {
    CHECK_THROWS_AS(propagate_ode(fiber, 0.0, 1.0, 3), Error);
  }
}

TEST_CASE("time-ordered series blocks") {
  const TorusGrid grid(6);

  SUBCASE("order one in the weak-coupling regime") {
    ModelParams p = weak_exchange(0.01 * 0.266);
    const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
    const double horizon = 1.0 / p.epsilon_ev;
    const Eigen::MatrixXcd d1 = dyson_blocks(fiber, 0.0, horizon, 1, 2);
    const Eigen::MatrixXcd exact = interaction_picture_exact(fiber, 0.0, horizon);
    CHECK(op_distance(d1, exact) < 1e-3);
  }
  SUBCASE("order four against the integrated propagator") {
    ModelParams p = weak_exchange();
    const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
    const double horizon = 2.0 / p.epsilon_ev;
    const Eigen::MatrixXcd d4 = dyson_blocks(fiber, 0.0, horizon, 4, 2);
    const PropagatorRecord ode = propagate_ode(fiber, 0.0, horizon, 2000);
    CHECK(op_distance(d4, ode.matrix) < 1e-5);
    // Truncation of a unitary series stays near-unitary at weak coupling.
    CHECK(op_distance(d4.adjoint() * d4, Eigen::MatrixXcd::Identity(fiber.dim(), fiber.dim())) <
          1e-5);
  }
  SUBCASE("truncation error scales with the stated power of the horizon") {
    ModelParams p = weak_exchange(0.05);
    const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
    std::vector<double> horizons{0.5, 1.0, 2.0};
    std::vector<double> errs;
    for (double T : horizons)
      errs.push_back(op_distance(dyson_blocks(fiber, 0.0, T, 2, 4),
                                 interaction_picture_exact(fiber, 0.0, T)));
    // Order-2 truncation leaves a third-order remainder: slope ~ 3 on log-log.
    const double slope1 = std::log2(errs[1] / errs[0]);
    const double slope2 = std::log2(errs[2] / errs[1]);
    CHECK(slope1 > 2.4);
    CHECK(slope1 < 3.6);
    CHECK(slope2 > 2.2);
    CHECK(slope2 < 3.6);
  }
  SUBCASE("adjoint consistency for reversed times") {
    ModelParams p = weak_exchange();
    const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
    const Eigen::MatrixXcd fwd = dyson_blocks(fiber, 0.0, 1.2, 3, 2);
    const Eigen::MatrixXcd bwd = dyson_blocks(fiber, 1.2, 0.0, 3, 2);
    CHECK(op_distance(bwd, fwd.adjoint()) < 1e-13);
  }
  SUBCASE("invalid orders are rejected") {
    ModelParams p = weak_exchange();
    const ScatteringFiber fiber(p, grid, 0.4, 0.4, p.onsite.value());
    CHECK_THROWS_AS(dyson_blocks(fiber, 0.0, 1.0, 0), Error);
    CHECK_THROWS_AS(dyson_blocks(fiber, 0.0, 1.0, 7), Error);
  }
}

TEST_CASE("scalar exchange kernel two-path identity") {
  ModelParams p = prototypical();
  const TorusGrid grid(8);
  const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const KernelCheck check = exchange_kernel_check(fiber, unif(rng), unif(rng));
    CHECK(check.deviation < 1e-10);
  }
}

TEST_CASE("unbound-channel diagnostic") {
  const TorusGrid grid(8);
  SUBCASE("uncoupled fiber does not leak") {
    ModelParams q = prototypical();
    q.upsilon = LatticeCoupling{};
    const ScatteringFiber free(q, grid, -kPi, 0.3 * kPi, q.onsite.value());
    Eigen::VectorXcd probe = Eigen::VectorXcd::Zero(grid.size());
    probe[grid.index(2, 3)] = 1.0;
    const UnboundReport rep = unbound_channel_diagnostic(free, probe, 20.0);
    for (const auto& step : rep.steps) {
      CHECK(step.boson_leakage < 1e-13);
      CHECK(step.cauchy_increment < 1e-13);
    }
  }
  SUBCASE("coupled fiber reports bounded finite-time diagnostics") {
    ModelParams p = prototypical();
    const ScatteringFiber fiber(p, grid, -kPi, 0.3 * kPi, p.onsite.value());
    Eigen::VectorXcd probe = Eigen::VectorXcd::Zero(grid.size());
    probe[grid.index(2, 3)] = 1.0;
    const UnboundReport rep = unbound_channel_diagnostic(fiber, probe, 40.0 / p.epsilon_ev);
    REQUIRE(rep.steps.size() == 5);
    double prev = rep.steps.front().horizon;
    for (size_t i = 1; i < rep.steps.size(); ++i) {
      CHECK(rep.steps[i].horizon == doctest::Approx(2.0 * prev));
      prev = rep.steps[i].horizon;
    }
    for (const auto& step : rep.steps) {
      CHECK(step.boson_leakage >= 0.0);
      CHECK(step.boson_leakage < 1.0);
    }
  }
  SUBCASE("wave operator approximant matches the adjoint series at weak coupling") {
    ModelParams p = weak_exchange(0.01 * 0.266);
    const TorusGrid g6(6);
    const ScatteringFiber fiber(p, g6, -kPi, 0.3 * kPi, p.onsite.value());
    const double T = 1.5 / p.epsilon_ev;
    // W(T) = e^{iTA} e^{-iTX} equals the adjoint of the interaction-picture
    // propagator at (s,t) = (T,0); the truncated series approximates it.
    const Eigen::MatrixXcd w = interaction_picture_exact(fiber, 0.0, T).adjoint();
    const Eigen::MatrixXcd d = dyson_blocks(fiber, 0.0, T, 6, 1).adjoint();
    CHECK(op_distance(w, d) < 1e-6);
  }
}

TEST_CASE("bound-channel intertwining") {
  ModelParams p = prototypical();
  const TorusGrid grid(8);

  SUBCASE("zero time gives zero residual") {
    const ScatteringFiber fiber(p, grid, -kPi, 0.0, p.onsite.value());
    const PairState state = solve_ground_state(p, grid, -kPi, 0.0, p.onsite);
    CHECK(bound_channel_check(fiber, state, 0.0) < 1e-14);
  }
  SUBCASE("phase evolution of the solved eigenpair") {
    const ScatteringFiber fiber(p, grid, -kPi, 0.0, p.onsite.value());
    const PairState state = solve_ground_state(p, grid, -kPi, 0.0, p.onsite);
    CHECK(bound_channel_check(fiber, state, 10.0 / p.epsilon_ev) < 1e-9);
  }
  SUBCASE("large-repulsion proxy for the hard-core state") {
    const double big_u = 1e6 * p.epsilon_ev;
    const ScatteringFiber fiber(p, grid, -kPi, 0.0, big_u);
    const PairState state = solve_ground_state(p, grid, -kPi, 0.0, OnSite::finite(big_u));
    CHECK(bound_channel_check(fiber, state, 5.0 / p.epsilon_ev) < 1e-6);
  }
}
