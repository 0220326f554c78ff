// dive/experiment.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dive/metrics.hpp"
#include "dive/simgen.hpp"
#include "dive/solver.hpp"
#include "dive/types.hpp"

namespace dive {

// What the sweep axis means.  kAlphaSweep varies the nonstationarity
// exponent, kNSweep varies the total sample count N = T*L*Ns.  The trace
// modes run a single grid point and additionally record the ISR after every
// iteration; kFrequency is the emulated frequency-domain setup where the K
// datasets are per-frequency mixtures with tridiagonally correlated sources.
enum class ExperimentMode { kAlphaSweep, kNSweep, kIterationTrace, kFrequency };

inline ExperimentMode mode_from_name(const std::string& name) {
  if (name == "alpha-sweep") return ExperimentMode::kAlphaSweep;
  if (name == "n-sweep") return ExperimentMode::kNSweep;
  if (name == "iteration-trace") return ExperimentMode::kIterationTrace;
  if (name == "frequency") return ExperimentMode::kFrequency;
  throw ConfigError("unknown experiment mode: " + name);
}

inline const char* mode_name(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::kAlphaSweep: return "alpha-sweep";
    case ExperimentMode::kNSweep: return "n-sweep";
    case ExperimentMode::kIterationTrace: return "iteration-trace";
    case ExperimentMode::kFrequency: return "frequency";
  }
  return "?";
}

// One algorithm/model/segmentation combination to evaluate.  Every variant
// sees the same generated data, resegmented to its own analysis grid (L
// sub-blocks per segment; 0 keeps the generation grid).  joint = false runs
// each dataset separately instead of coupling the K extractions.
struct AlgorithmVariant {
  std::string label;
  Algorithm algorithm = Algorithm::kFastDiva;
  std::string model = "gauss";
  int L = 0;
  bool joint = true;
  double tol = 1e-6;
  int max_iter = 1000;
  ModelOptions model_options{};
};

struct ExperimentSpec {
  std::string name = "experiment";
  ExperimentMode mode = ExperimentMode::kAlphaSweep;
  std::vector<double> sweep;  // alpha values, or N values; empty for traces
  int trials = 100;
  double init_mag2 = 0.01;
  TrialConfig base;  // generation grid; base.seed is the master seed
  std::vector<AlgorithmVariant> algorithms;
};

// One (trial, algorithm, dataset) record.  isr_trace holds the ISR after
// each iteration when traces are recorded; error is nonempty when the run
// threw, in which case the ISR fields are NaN.
struct TrialOutcome {
  double sweep_value = 0.0;
  int sweep_index = 0;
  int trial = 0;
  std::string algorithm;
  int k = 0;
  double isr_init_db = std::numeric_limits<double>::quiet_NaN();
  double isr_final_db = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
  int fallbacks = 0;
  std::string error;
  std::vector<double> isr_trace;
};

struct ExperimentResult {
  ExperimentSpec spec;
  bool traces = false;
  std::vector<TrialOutcome> rows;  // fixed deterministic order
};

// Thread count resolution: explicit request, then the DIVE_THREADS
// environment variable, then hardware concurrency.
inline int thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DIVE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

inline std::uint64_t trial_seed(std::uint64_t master, int sweep_index,
                                int trial) {
  std::uint64_t h = splitmix64(master ^ 0x7f4a7c15ull);
  h = splitmix64(h ^ static_cast<std::uint64_t>(sweep_index));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

inline TrialConfig config_for(const ExperimentSpec& spec, int sweep_index,
                              int trial) {
  TrialConfig cfg = spec.base;
  if (!spec.sweep.empty()) {
    const double v = spec.sweep[sweep_index];
    if (spec.mode == ExperimentMode::kAlphaSweep) {
      cfg.alpha = v;
    } else if (spec.mode == ExperimentMode::kNSweep) {
      const auto cells = static_cast<Eigen::Index>(cfg.T) * cfg.L;
      const auto n = static_cast<Eigen::Index>(v);
      if (n <= 0 || n % cells != 0)
        throw ConfigError("N sweep values must be positive multiples of T*L");
      cfg.Ns = n / cells;
    }
  }
  cfg.seed = trial_seed(spec.base.seed, sweep_index, trial);
  return cfg;
}

// Runs one variant on an already-generated trial and appends K outcome rows.
inline void run_variant(const SegmentedDataset& ds, const GroundTruth& gt,
                        const std::vector<VecC>& inits,
                        const AlgorithmVariant& v, bool record_traces,
                        std::vector<TrialOutcome>& out) {
  const int K = ds.K;
  std::vector<TrialOutcome> rows(K);
  for (int k = 0; k < K; ++k) {
    rows[k].algorithm = v.label;
    rows[k].k = k;
    rows[k].isr_init_db = isr_db(inits[k], gt, k);
  }

  SolverConfig sc;
  sc.algorithm = v.algorithm;
  sc.model = v.model;
  sc.model_options = v.model_options;
  sc.tol = v.tol;
  sc.max_iter = v.max_iter;

  const int L_eff = v.L > 0 ? v.L : ds.L;
  const SegmentedDataset* data = &ds;
  SegmentedDataset reseg;
  if (L_eff != ds.L) {
    reseg = resegment(ds, ds.T, L_eff);
    data = &reseg;
  }

  auto finish = [&](int k, const ExtractionState& st, const VecC& w) {
    rows[k].isr_final_db = isr_db(w, gt, k);
    rows[k].iterations = st.iterations;
    rows[k].converged = st.converged;
    rows[k].fallbacks = st.hessian_fallbacks;
  };

  if (v.joint) {
    try {
      std::function<void(int, const std::vector<VecC>&)> cb;
      if (record_traces)
        cb = [&](int, const std::vector<VecC>& ws) {
          for (int k = 0; k < K; ++k)
            rows[k].isr_trace.push_back(isr_db(ws[k], gt, k));
        };
      const ExtractionState st = run(*data, sc, inits, cb);
      for (int k = 0; k < K; ++k) finish(k, st, st.w[k]);
    } catch (const std::exception& e) {
      for (int k = 0; k < K; ++k) rows[k].error = e.what();
    }
  } else {
    for (int k = 0; k < K; ++k) {
      try {
        std::function<void(int, const std::vector<VecC>&)> cb;
        if (record_traces)
          cb = [&](int, const std::vector<VecC>& ws) {
            rows[k].isr_trace.push_back(isr_db(ws[0], gt, k));
          };
        const SegmentedDataset single = select_dataset(*data, k);
        const ExtractionState st = run(single, sc, {inits[k]}, cb);
        finish(k, st, st.w[0]);
      } catch (const std::exception& e) {
        rows[k].error = e.what();
      }
    }
  }
  for (auto& r : rows) out.push_back(std::move(r));
}

}  // namespace detail

// Runs the full grid: sweep points x trials, all algorithm variants on the
// same per-trial data.  Trials execute on a worker pool; the row order of
// the result is fixed by (sweep, trial, algorithm, k) regardless of the
// thread count, so outputs are reproducible byte for byte.
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       int threads = 0) {
  if (spec.trials < 1) throw ConfigError("trials must be >= 1");
  if (spec.algorithms.empty()) throw ConfigError("no algorithms configured");
  const bool sweeping = spec.mode == ExperimentMode::kAlphaSweep ||
                        spec.mode == ExperimentMode::kNSweep;
  if (sweeping && spec.sweep.empty()) throw ConfigError("empty sweep grid");

  ExperimentResult res;
  res.spec = spec;
  res.traces = spec.mode == ExperimentMode::kIterationTrace ||
               spec.mode == ExperimentMode::kFrequency;

  const int sweeps = sweeping ? static_cast<int>(spec.sweep.size()) : 1;
  const int tasks = sweeps * spec.trials;
  const int K = spec.base.K;
  const auto rows_per_task = spec.algorithms.size() * K;
  res.rows.resize(static_cast<std::size_t>(tasks) * rows_per_task);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const int task = next.fetch_add(1);
      if (task >= tasks || failed.load()) return;
      const int sweep_index = task / spec.trials;
      const int trial = task % spec.trials;
      try {
        const TrialConfig cfg = detail::config_for(spec, sweep_index, trial);
        auto [ds, gt] = generate_trial(cfg);
        std::vector<VecC> inits(K);
        const StreamRng root(cfg.seed);
        for (int k = 0; k < K; ++k) {
          auto gen = root.stream({kTagInit, static_cast<std::uint64_t>(k)});
          inits[k] = perturb_init(gt.w_star[k], gen, spec.init_mag2);
        }
        std::vector<TrialOutcome> rows;
        rows.reserve(rows_per_task);
        for (const auto& v : spec.algorithms)
          detail::run_variant(ds, gt, inits, v, res.traces, rows);
        const double sweep_value =
            sweeping ? spec.sweep[sweep_index] : spec.base.alpha;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          rows[i].sweep_value = sweep_value;
          rows[i].sweep_index = sweep_index;
          rows[i].trial = trial;
          res.rows[task * rows_per_task + i] = std::move(rows[i]);
        }
      } catch (const std::exception& e) {
        // config or generation problems abort the experiment; individual
        // solver failures were already recorded per row inside run_variant
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
        failed.store(true);
        return;
      }
    }
  };

  const int pool = std::min(thread_count(threads), tasks);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> team;
    team.reserve(pool);
    for (int i = 0; i < pool; ++i) team.emplace_back(worker);
    for (auto& th : team) th.join();
  }
  if (failed.load()) throw ConfigError("experiment aborted: " + first_error);
  return res;
}

// Final-ISR statistics of one algorithm at one sweep point, aggregated over
// trials and datasets.  Failed runs are excluded from the averages and
// counted separately.
struct SweepStats {
  double sweep_value = 0.0;
  int completed = 0;
  int failures = 0;
  double isr_trimmed_mean_db = std::numeric_limits<double>::quiet_NaN();
  double isr_median_db = std::numeric_limits<double>::quiet_NaN();
  double init_trimmed_mean_db = std::numeric_limits<double>::quiet_NaN();
  double converged_fraction = 0.0;
  double mean_iterations = 0.0;
};

inline std::vector<SweepStats> sweep_stats(const ExperimentResult& res,
                                           const std::string& label,
                                           double trim_fraction = 0.01) {
  std::map<int, std::vector<const TrialOutcome*>> by_sweep;
  for (const auto& r : res.rows)
    if (r.algorithm == label) by_sweep[r.sweep_index].push_back(&r);

  std::vector<SweepStats> out;
  for (const auto& [idx, rows] : by_sweep) {
    SweepStats s;
    s.sweep_value = rows.front()->sweep_value;
    std::vector<double> finals, inits;
    int converged = 0;
    double iter_sum = 0.0;
    for (const TrialOutcome* r : rows) {
      if (!r->error.empty()) {
        ++s.failures;
        continue;
      }
      finals.push_back(r->isr_final_db);
      inits.push_back(r->isr_init_db);
      converged += r->converged ? 1 : 0;
      iter_sum += r->iterations;
    }
    s.completed = static_cast<int>(finals.size());
    if (s.completed > 0) {
      s.isr_trimmed_mean_db = trimmed_mean(finals, trim_fraction);
      s.isr_median_db = median(finals);
      s.init_trimmed_mean_db = trimmed_mean(inits, trim_fraction);
      s.converged_fraction = static_cast<double>(converged) / s.completed;
      s.mean_iterations = iter_sum / s.completed;
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Per-iteration ISR statistics for trace-recording modes.  Traces shorter
// than the longest one (runs that stopped early) are padded with their final
// value, matching the convention that a converged run keeps its w.
struct IterationStats {
  int iteration = 0;  // 1-based
  double min_db = 0.0;
  double median_db = 0.0;
  double max_db = 0.0;
  // median over trials of the ISR averaged (in dB) over the K datasets
  double freq_avg_median_db = 0.0;
};

inline std::vector<IterationStats> iteration_stats(const ExperimentResult& res,
                                                   const std::string& label) {
  std::vector<const TrialOutcome*> rows;
  std::size_t span = 0;
  for (const auto& r : res.rows)
    if (r.algorithm == label && r.error.empty() && !r.isr_trace.empty()) {
      rows.push_back(&r);
      span = std::max(span, r.isr_trace.size());
    }

  auto at_iter = [](const TrialOutcome& r, std::size_t i) {
    return r.isr_trace[std::min(i, r.isr_trace.size() - 1)];
  };

  std::vector<IterationStats> out;
  for (std::size_t i = 0; i < span; ++i) {
    IterationStats st;
    st.iteration = static_cast<int>(i) + 1;
    std::vector<double> vals;
    vals.reserve(rows.size());
    std::map<std::pair<int, int>, std::pair<double, int>> per_trial;
    for (const TrialOutcome* r : rows) {
      const double v = at_iter(*r, i);
      vals.push_back(v);
      auto& acc = per_trial[{r->sweep_index, r->trial}];
      acc.first += v;
      acc.second += 1;
    }
    if (vals.empty()) break;
    st.min_db = *std::min_element(vals.begin(), vals.end());
    st.max_db = *std::max_element(vals.begin(), vals.end());
    st.median_db = median(vals);
    std::vector<double> freq_avg;
    freq_avg.reserve(per_trial.size());
    for (const auto& [key, acc] : per_trial)
      freq_avg.push_back(acc.first / acc.second);
    st.freq_avg_median_db = median(freq_avg);
    out.push_back(st);
  }
  return out;
}

// Fraction of runs of one algorithm that reached the direction-change
// criterion within the given iteration budget.  Failed runs count against.
inline double converged_within(const ExperimentResult& res,
                               const std::string& label, int budget) {
  int total = 0, good = 0;
  for (const auto& r : res.rows) {
    if (r.algorithm != label) continue;
    ++total;
    if (r.error.empty() && r.converged && r.iterations <= budget) ++good;
  }
  return total > 0 ? static_cast<double>(good) / total : 0.0;
}

}  // namespace dive
