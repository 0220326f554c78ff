#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <vector>

#include "dive/diagnostics.hpp"
#include "dive/rng.hpp"
#include "dive/simgen.hpp"
#include "dive/solver.hpp"
#include "dive/types.hpp"
#include "oracles.hpp"

using namespace dive;
using Catch::Approx;

namespace {

struct Frozen {
  diag::ModelProvider provider;
  std::vector<VecC> nus;
};

// freeze per-cell models (and their empirical normalizations) at w0 so the
// finite-difference functionals see a fixed density
Frozen freeze_at(const SegmentedDataset& ds, const BlockStats& stats,
                 const std::string& name, const VecC& w0) {
  auto build = make_model(name, ModelOptions{});
  std::vector<std::shared_ptr<const SourceModel>> models;
  std::vector<VecC> nus;
  for (int t = 0; t < ds.T; ++t)
    for (int l = 0; l < ds.L; ++l) {
      auto ce = diag::detail::eval_cell(ds, stats, {w0}, t, l);
      std::shared_ptr<const SourceModel> m(build(ce.u));
      const MatC phi = m->score(ce.u);
      VecC nu(ds.K);
      for (Eigen::Index k = 0; k < ds.K; ++k)
        nu[k] = (phi.row(k).array() * ce.u.row(k).array()).mean();
      models.push_back(std::move(m));
      nus.push_back(std::move(nu));
    }
  return {diag::frozen_provider(std::move(models), ds.L), std::move(nus)};
}

}  // namespace

TEST_CASE("density and variance gradient matches finite differences") {
  StreamRng rng(501);
  auto gen = rng.stream({kTagTrial, 0});
  const Eigen::Index d = 4, L = 3;
  auto ds = segment(cnormal_matrix(d, 3 * 200, gen), 1, int(L));
  auto stats = compute_stats(ds);
  VecC w0 = cnormal_vector(d, gen);

  for (const char* name : {"rati", "gauss", "gauss-circ"}) {
    auto frozen = freeze_at(ds, stats, name, w0);
    auto g = diag::first_terms_gradient(ds, stats, frozen.provider, {w0});
    auto f = [&](const VecC& w) {
      auto ct = diag::contrast_eval(ds, stats, frozen.provider, {w});
      return ct.density + ct.variance;
    };
    VecC gfd = oracles::fd_grad(f, w0);
    INFO("model " << name);
    CHECK((g[0] - gfd).norm() / gfd.norm() < 1e-6);
  }
}

// the two-dataset case routes gauss through the vector model and rati through
// the joint score, so each dataset's gradient block gets its own check
TEST_CASE("two-dataset gradient matches finite differences per dataset") {
  TrialConfig cfg;
  cfg.K = 2;
  cfg.d = 4;
  cfg.T = 1;
  cfg.L = 2;
  cfg.Ns = 150;
  cfg.delta = cd(0.4, 0.2);
  cfg.alpha = 1.0;
  cfg.seed = 503;
  cfg.coupling = Coupling::kDependent;
  auto [ds, gt] = generate_trial(cfg);
  auto stats = compute_stats(ds);
  StreamRng rng(504);
  auto gen = rng.stream({kTagInit, 0});
  std::vector<VecC> ws(2);
  for (int k = 0; k < 2; ++k)
    ws[k] = gt.w_star[k] + 0.3 * cnormal_vector(cfg.d, gen);

  for (const char* name : {"rati", "gauss"}) {
    std::vector<std::shared_ptr<const SourceModel>> models;
    auto build = make_model(name, ModelOptions{.mu = 0.0});
    for (Eigen::Index t = 0; t < ds.T; ++t)
      for (Eigen::Index l = 0; l < ds.L; ++l)
        models.emplace_back(
            build(diag::detail::eval_cell(ds, stats, ws, t, l).u));
    auto prov = diag::frozen_provider(std::move(models), ds.L);
    auto g = diag::first_terms_gradient(ds, stats, prov, ws);
    for (int kt = 0; kt < 2; ++kt) {
      auto f = [&](const VecC& w) {
        std::vector<VecC> ws2 = ws;
        ws2[kt] = w;
        auto ct = diag::contrast_eval(ds, stats, prov, ws2);
        return ct.density + ct.variance;
      };
      VecC gfd = oracles::fd_grad(f, ws[kt]);
      INFO("model " << name << " dataset " << kt);
      CHECK((g[kt] - gfd).norm() / gfd.norm() < 1e-6);
    }
  }
}

TEST_CASE("background and gain contrast terms have closed values") {
  StreamRng rng(502);
  auto gen = rng.stream({kTagTrial, 0});

  SECTION("background trace identity") {
    for (Eigen::Index d : {3, 5}) {
      auto ds = segment(cnormal_matrix(d, 2 * 2 * 50, gen), 2, 2);
      auto stats = compute_stats(ds);
      VecC w = cnormal_vector(d, gen);
      auto frozen = freeze_at(ds, stats, "gauss", w);
      auto ct = diag::contrast_eval(ds, stats, frozen.provider, {w});
      CHECK(ct.background == Approx(-double(d - 1)).margin(1e-10));
    }
  }

  SECTION("gain term vanishes when the leading mixing entry is one") {
    const Eigen::Index d = 3;
    MatC x = cnormal_matrix(d, 200, gen);
    MatC u = oracles::match_cov(x, MatC::Identity(d, d));
    auto ds = segment(u, 1, 1);
    auto stats = compute_stats(ds);
    VecC e1 = VecC::Zero(d);
    e1[0] = cd(1, 0);  // whitened data: a = e1, gamma = 1
    auto frozen = freeze_at(ds, stats, "gauss", e1);
    auto ct = diag::contrast_eval(ds, stats, frozen.provider, {e1});
    CHECK(ct.gain == Approx(0.0).margin(1e-10));
  }

  SECTION("gain term is identically zero at d = 2") {
    auto ds = segment(cnormal_matrix(2, 100, gen), 1, 1);
    auto stats = compute_stats(ds);
    VecC w = cnormal_vector(2, gen);
    auto frozen = freeze_at(ds, stats, "gauss", w);
    CHECK(diag::contrast_eval(ds, stats, frozen.provider, {w}).gain == 0.0);
  }
}

TEST_CASE("hessian assemblies match finite-difference jacobians") {
  StreamRng rng(503);
  auto gen = rng.stream({kTagTrial, 0});
  const Eigen::Index d = 3, L = 2, Ns = 20000;
  auto ds = segment(cnormal_matrix(d, L * Ns, gen), 1, int(L));
  auto stats = compute_stats(ds);
  VecC w0 = cnormal_vector(d, gen);

  for (const char* name : {"gauss", "rati"}) {
    auto frozen = freeze_at(ds, stats, name, w0);
    std::vector<std::vector<VecC>> a_frz(1);
    a_frz[0].push_back(update_a(stats.cov_mean(0, 0), w0));

    auto gfun = [&](const VecC& w) {
      return diag::normalized_gradient(ds, stats, frozen.provider, {w},
                                       &frozen.nus, &a_frz)[0];
    };
    auto [h1fd, h2fd] = oracles::fd_jacobians(gfun, w0);
    auto hp = diag::full_hessians(ds, stats, frozen.provider, {w0},
                                   frozen.nus, false);
    const double scale = hp[0].h2.norm();
    INFO("model " << name);
    CHECK((h2fd - hp[0].h2).norm() / scale < 0.05);
    CHECK((h1fd.conjugate() - hp[0].h1_conj).norm() / scale < 0.05);
  }
}

TEST_CASE("dependent-mixing hessian differs by the exact rank structure") {
  StreamRng rng(504);
  auto gen = rng.stream({kTagTrial, 0});
  const Eigen::Index d = 4, L = 3;
  auto ds = segment(cnormal_matrix(d, 3 * 150, gen), 1, int(L));
  auto stats = compute_stats(ds);
  VecC w0 = cnormal_vector(d, gen);

  for (const char* name : {"gauss", "rati"}) {
    auto frozen = freeze_at(ds, stats, name, w0);
    auto dep = diag::full_hessians(ds, stats, frozen.provider, {w0},
                                    frozen.nus, true);
    auto ind = diag::full_hessians(ds, stats, frozen.provider, {w0},
                                    frozen.nus, false);

    const MatC cbar = stats.cov_mean(0, 0);
    const double s2bar = w0.dot(cbar * w0).real();
    const VecC a = update_a(cbar, w0);

    const MatC want_h2 =
        cbar.conjugate() / s2bar - a.conjugate() * a.transpose();
    const MatC want_h1 = -a * a.transpose();

    const double scale = dep[0].h2.norm();
    INFO("model " << name);
    CHECK((dep[0].h2 - ind[0].h2 - want_h2).norm() / scale < 1e-10);
    CHECK((dep[0].h1_conj - ind[0].h1_conj - want_h1).norm() / scale < 1e-10);
  }
}

TEST_CASE("gradient shrinks at the oracle separator as samples grow") {
  TrialConfig tc;
  tc.T = 1;
  tc.L = 3;
  tc.Ns = 30000;
  tc.d = 4;
  tc.c = 1.0;
  tc.delta = cd(0.5, 0);
  tc.alpha = 1.0;
  tc.seed = 505;
  auto [ds, gt] = generate_trial(tc);
  auto stats = compute_stats(ds);
  auto build = make_model("gauss");
  auto ev = evaluate_iteration(ds, stats, build, {gt.w_star[0]});
  const double anorm = ev.a[0][0].norm();
  CHECK(ev.grad[0].norm() < 5e-2 * anorm);
}
