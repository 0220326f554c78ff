#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SVD>

#include "dive/csv_mixing.hpp"
#include "dive/metrics.hpp"
#include "dive/rng.hpp"
#include "dive/simgen.hpp"
#include "dive/types.hpp"

using namespace dive;
using Catch::Approx;

TEST_CASE("trimmed mean") {
  CHECK(trimmed_mean({1, 2, 3, 4, 100}, 0.01) == Approx(3.0));

  std::vector<double> v(100, 0.0);
  v[57] = std::numeric_limits<double>::infinity();
  CHECK(trimmed_mean(v, 0.01) == 0.0);

  CHECK(trimmed_mean({1, 2, 3, 4}, 0.0) == Approx(2.5));
  CHECK_THROWS_AS(trimmed_mean({}, 0.01), InvalidParamsError);
  CHECK_THROWS_AS(trimmed_mean({1.0}, -0.1), InvalidParamsError);

  // even with aggressive trimming at least one value survives
  CHECK(trimmed_mean({5.0, 7.0}, 0.9) == Approx(6.0));
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == Approx(2.0));
  CHECK(median({4, 1, 3, 2}) == Approx(2.5));
  CHECK_THROWS_AS(median({}), InvalidParamsError);
}

TEST_CASE("interference-to-signal ratio") {
  TrialConfig tc;
  tc.T = 2;
  tc.L = 2;
  tc.Ns = 2000;
  tc.d = 4;
  tc.delta = cd(0.3, 0);
  tc.alpha = 1.0;
  tc.seed = 701;
  auto [ds, gt] = generate_trial(tc);

  SECTION("input validation") {
    CHECK_THROWS_AS(isr_db(gt.w_star[0], gt, 1), ShapeError);
    CHECK_THROWS_AS(isr_db(VecC::Ones(3), gt, 0), ShapeError);
  }

  SECTION("exact separation hits the floor") {
    CHECK(isr_db(gt.w_star[0], gt, 0) == kIsrFloorDb);
  }

  SECTION("zero gain on the source gives +inf") {
    // hand-built truth where a = e1 exactly, probed with w = e2
    GroundTruth flat;
    MixingParams p;
    p.beta = cd(1, 0);
    p.gamma = cd(1, 0);
    p.h = VecC::Zero(1);
    p.g = VecC::Zero(1);
    flat.params = {{p}};
    flat.w_star = {separating_vector(p)};
    flat.variances = MatR::Ones(1, 1);
    flat.soi_scale = VecR::Ones(1);
    VecC e2(2);
    e2 << cd(0, 0), cd(1, 0);
    CHECK(std::isinf(isr_db(e2, flat, 0)));

    // a merely orthogonalized direction leaves round-off in the gain, which
    // must land far above any plausible extraction instead of overflowing
    MatC a(4, 2);
    a.col(0) = mixing_vector(gt.params[0][0]);
    a.col(1) = mixing_vector(gt.params[0][1]);
    VecC w = VecC::Ones(4);
    w -= a * (a.adjoint() * a).ldlt().solve(a.adjoint() * w);
    CHECK(isr_db(w, gt, 0) > 60.0);
  }

  SECTION("matches a signal-domain measurement") {
    StreamRng rng(702);
    auto gen = rng.stream({kTagInit, 0});
    for (double mag2 : {0.01, 0.1}) {
      VecC w = perturb_init(gt.w_star[0], gen, mag2);

      // direct measurement: project the estimate onto the known source row
      double num = 0.0, den = 0.0;
      for (int t = 0; t < tc.T; ++t) {
        const cd g1 = mixing_vector(gt.params[0][t]).dot(w);
        for (int l = 0; l < tc.L; ++l) {
          const Eigen::Index off =
              (static_cast<Eigen::Index>(t) * tc.L + l) * tc.Ns;
          RowVecC s_true =
              gt.sources[0].row(0).segment(off, tc.Ns);
          RowVecC s_hat = w.adjoint() * ds.cell(0, t, l);
          RowVecC leak = s_hat - std::conj(g1) * s_true;
          num += leak.squaredNorm() / double(tc.Ns) / (tc.T * tc.L);
          den += std::norm(g1) * s_true.squaredNorm() / double(tc.Ns) /
                 (tc.T * tc.L);
        }
      }
      const double brute = 10.0 * std::log10(num / den);
      CHECK(isr_db(w, gt, 0) == Approx(brute).margin(0.5));
    }
  }
}
