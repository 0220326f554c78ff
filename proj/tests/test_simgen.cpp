#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dive/csv_mixing.hpp"
#include "dive/metrics.hpp"
#include "dive/rng.hpp"
#include "dive/simgen.hpp"
#include "dive/types.hpp"

using namespace dive;
using Catch::Approx;

TEST_CASE("variance profile grid") {
  SECTION("alpha = 0 is flat") {
    MatR g = variance_profile(3, 4, 0.0);
    CHECK((g - MatR::Ones(3, 4)).norm() == 0.0);
  }

  SECTION("T = 1, L = 2, alpha = 1") {
    MatR g = variance_profile(1, 2, 1.0);
    CHECK(g(0, 0) == Approx(std::sqrt(3.0) / 2).margin(1e-15));
    CHECK(g(0, 1) == Approx(std::sqrt(3.0) / 2).margin(1e-15));
  }

  SECTION("center cell of an odd grid peaks at one") {
    MatR g = variance_profile(3, 5, 2.0);
    CHECK(g(1, 2) == Approx(1.0).margin(1e-15));
    CHECK(g.maxCoeff() == Approx(1.0).margin(1e-15));
    CHECK(g.minCoeff() > 0.0);
  }

  SECTION("invalid arguments") {
    CHECK_THROWS_AS(variance_profile(0, 2, 1.0), ShapeError);
    CHECK_THROWS_AS(variance_profile(2, 2, -0.5), InvalidParamsError);
  }
}

TEST_CASE("generalized Gaussian sampler moments") {
  StreamRng rng(601);
  auto gen = rng.stream({kTagSoi, 0});
  const Eigen::Index n = 200000;

  SECTION("c = 1, delta = 0 is circular Gaussian") {
    VecC s = sample_cggd(n, 1.0, cd(0, 0), gen);
    const double p2 = s.cwiseAbs2().mean();
    const double p4 = s.cwiseAbs2().cwiseAbs2().mean();
    CHECK(p2 == Approx(1.0).epsilon(0.02));
    CHECK(p4 / (p2 * p2) == Approx(2.0).epsilon(0.02));
    CHECK(std::abs(s.cwiseProduct(s).mean()) < 0.02);
  }

  SECTION("c = 0.5 is super-Gaussian with normalized kurtosis 10/3") {
    VecC s = sample_cggd(n, 0.5, cd(0, 0), gen);
    const double p2 = s.cwiseAbs2().mean();
    const double p4 = s.cwiseAbs2().cwiseAbs2().mean();
    CHECK(p2 == Approx(1.0).epsilon(0.03));
    CHECK(p4 / (p2 * p2) == Approx(10.0 / 3).epsilon(0.05));
  }

  SECTION("delta sets the pseudo-variance") {
    VecC s = sample_cggd(n, 1.0, cd(0.3, 0.4), gen);
    const cd pv = s.cwiseProduct(s).mean();
    CHECK(std::abs(pv - cd(0.3, 0.4)) < 0.02);
    CHECK(s.cwiseAbs2().mean() == Approx(1.0).epsilon(0.02));
  }

  SECTION("invalid parameters") {
    CHECK_THROWS_AS(sample_cggd(8, 0.0, cd(0, 0), gen), InvalidParamsError);
    CHECK_THROWS_AS(sample_cggd(8, 1.0, cd(1, 0), gen), InvalidParamsError);
  }
}

TEST_CASE("generated trials satisfy the mixing-model invariants") {
  TrialConfig tc;
  tc.K = 2;
  tc.T = 2;
  tc.L = 3;
  tc.Ns = 400;
  tc.d = 4;
  tc.delta = cd(0.4, 0.1);
  tc.alpha = 1.0;
  tc.seed = 602;
  auto [ds, gt] = generate_trial(tc);

  REQUIRE(ds.K == 2);
  REQUIRE(ds.Ns == 400);
  REQUIRE(gt.w_star.size() == 2);
  REQUIRE(gt.variances.rows() == 2);
  REQUIRE(gt.variances.cols() == 3);

  SECTION("constraint and shared separator per dataset") {
    for (int k = 0; k < 2; ++k)
      for (int t = 0; t < 2; ++t) {
        const auto& p = gt.params[k][t];
        CHECK(std::abs(constraint_residual(p)) < 1e-12);
        CHECK((separating_vector(p) - gt.w_star[k]).norm() == 0.0);
        CHECK(std::abs(mixing_vector(p).dot(gt.w_star[k]).real() - 1.0) <
              1e-12);
      }
  }

  SECTION("oracle separator recovers the stored source rows exactly") {
    for (int k = 0; k < 2; ++k)
      for (int t = 0; t < 2; ++t)
        for (int l = 0; l < 3; ++l) {
          const Eigen::Index off = (t * 3 + l) * 400;
          RowVecC s = gt.w_star[k].adjoint() * ds.cell(k, t, l);
          RowVecC want = gt.sources[k].row(0).segment(off, 400);
          CHECK((s - want).norm() < 1e-10);
        }
  }

  SECTION("oracle separator sits on the metric floor") {
    CHECK(isr_db(gt.w_star[0], gt, 0) == kIsrFloorDb);
    CHECK(isr_db(gt.w_star[1], gt, 1) == kIsrFloorDb);
  }

  SECTION("per-cell source power follows the variance profile") {
    for (int t = 0; t < 2; ++t)
      for (int l = 0; l < 3; ++l) {
        const Eigen::Index off = (t * 3 + l) * 400;
        const double power =
            gt.sources[0].row(0).segment(off, 400).cwiseAbs2().mean();
        const double want = gt.variances(t, l) * gt.soi_scale[0];
        CHECK(power == Approx(want).epsilon(4.0 / std::sqrt(400.0)));
      }
  }

  SECTION("regeneration is bitwise identical") {
    auto [ds2, gt2] = generate_trial(tc);
    for (std::size_t i = 0; i < ds.cells.size(); ++i)
      CHECK((ds.cells[i] - ds2.cells[i]).norm() == 0.0);
    CHECK((gt.w_star[0] - gt2.w_star[0]).norm() == 0.0);
  }
}

TEST_CASE("trial configuration validation") {
  TrialConfig tc;
  tc.d = 3;
  tc.T = 4;  // more segments than channels: no shared min-norm separator
  CHECK_THROWS_AS(generate_trial(tc), InvalidParamsError);

  TrialConfig one_channel;
  one_channel.d = 1;
  CHECK_THROWS_AS(generate_trial(one_channel), ShapeError);

  TrialConfig bad_ns;
  bad_ns.Ns = 0;
  CHECK_THROWS_AS(generate_trial(bad_ns), ShapeError);
}

TEST_CASE("coupled multi-dataset sources") {
  SECTION("dense coupling scales the SOI power by the mixer row norms") {
    TrialConfig tc;
    tc.K = 3;
    tc.Ns = 5000;
    tc.d = 3;
    tc.seed = 603;
    tc.coupling = Coupling::kDependent;
    auto [ds, gt] = generate_trial(tc);
    REQUIRE(gt.soi_scale.size() == 3);
    for (int k = 0; k < 3; ++k) {
      const double power = gt.sources[k].row(0).cwiseAbs2().mean();
      CHECK(power ==
            Approx(gt.soi_scale[k]).epsilon(4.0 / std::sqrt(5000.0)));
    }
  }

  SECTION("tridiagonal coupling keeps unit power and 0.3 neighbours") {
    TrialConfig tc;
    tc.K = 6;
    tc.Ns = 20000;
    tc.d = 3;
    tc.seed = 604;
    tc.coupling = Coupling::kTridiag;
    auto [ds, gt] = generate_trial(tc);
    CHECK((gt.soi_scale - VecR::Ones(6)).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 0; k + 1 < 6; ++k) {
      const cd corr = (gt.sources[k].row(0).array() *
                       gt.sources[k + 1].row(0).conjugate().array())
                          .mean();
      CHECK(std::abs(corr - cd(0.3, 0)) < 0.03);
    }
  }
}

TEST_CASE("perturbed initializations") {
  TrialConfig tc;
  tc.d = 5;
  tc.seed = 605;
  auto [ds, gt] = generate_trial(tc);
  StreamRng rng(606);
  auto gen = rng.stream({kTagInit, 0});

  const VecC& w = gt.w_star[0];
  VecC w0 = perturb_init(w, gen);
  const VecC eps = w0 - w;
  CHECK(std::abs(w.dot(eps)) < 1e-12);
  CHECK(eps.squaredNorm() == Approx(0.01).margin(1e-12));
  CHECK(w0.squaredNorm() ==
        Approx(w.squaredNorm() + 0.01).margin(1e-10));

  CHECK((perturb_init(w, gen, 0.0) - w).norm() == 0.0);

  VecC tiny(1);
  tiny << cd(1, 0);
  CHECK_THROWS_AS(perturb_init(tiny, gen), InvalidParamsError);
}
