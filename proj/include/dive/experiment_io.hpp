// dive/experiment_io.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// JSON experiment configs and the result files (RFC-4180 CSV tables plus a
// JSON summary).  Kept separate from the engine so that code which only runs
// experiments in memory does not pull in the JSON dependency.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dive/experiment.hpp"
#include "dive/types.hpp"

namespace dive {

inline constexpr int kConfigSchemaVersion = 1;

namespace detail {

inline Coupling coupling_from_name(const std::string& name) {
  if (name == "none") return Coupling::kNone;
  if (name == "dependent") return Coupling::kDependent;
  if (name == "tridiag") return Coupling::kTridiag;
  throw ConfigError("unknown coupling: " + name);
}

inline const char* coupling_name(Coupling c) {
  switch (c) {
    case Coupling::kNone: return "none";
    case Coupling::kDependent: return "dependent";
    case Coupling::kTridiag: return "tridiag";
  }
  return "?";
}

inline cd parse_delta(const nlohmann::json& j) {
  if (j.is_number()) return cd(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return cd(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("delta must be a number or [re, im]");
}

}  // namespace detail

inline ExperimentSpec parse_experiment(const nlohmann::json& j) {
  try {
    if (!j.contains("schema_version") ||
        j.at("schema_version").get<int>() != kConfigSchemaVersion)
      throw ConfigError("config must declare schema_version 1");

    ExperimentSpec spec;
    spec.name = j.value("name", std::string("experiment"));
    spec.mode = mode_from_name(j.at("mode").get<std::string>());
    if (j.contains("sweep"))
      spec.sweep = j.at("sweep").get<std::vector<double>>();
    spec.trials = j.value("trials", 100);
    spec.init_mag2 = j.value("init_mag2", 0.01);

    const auto& d = j.at("data");
    spec.base.K = d.at("K").get<int>();
    spec.base.T = d.at("T").get<int>();
    spec.base.L = d.at("L").get<int>();
    spec.base.Ns = d.at("Ns").get<Eigen::Index>();
    spec.base.d = d.at("d").get<Eigen::Index>();
    spec.base.c = d.value("c", 1.0);
    if (d.contains("delta")) spec.base.delta = detail::parse_delta(d["delta"]);
    spec.base.alpha = d.value("alpha", 0.0);
    spec.base.seed = d.value("seed", std::uint64_t{0});
    spec.base.coupling =
        detail::coupling_from_name(d.value("coupling", std::string("none")));

    for (const auto& a : j.at("algorithms")) {
      AlgorithmVariant v;
      v.algorithm = algorithm_from_name(a.at("algorithm").get<std::string>());
      v.model = a.at("model").get<std::string>();
      v.L = a.value("L", 0);
      v.joint = a.value("joint", true);
      v.tol = a.value("tol", 1e-6);
      v.max_iter = a.value("max_iter", 1000);
      v.model_options.mu = a.value("mu", v.model_options.mu);
      v.model_options.truncated_score =
          a.value("truncated_score", v.model_options.truncated_score);
      v.model_options.k_max = a.value("k_max", v.model_options.k_max);
      v.label = a.value("label", a.at("algorithm").get<std::string>() + "-" +
                                     v.model + "-" +
                                     std::to_string(v.L > 0 ? v.L : spec.base.L));
      spec.algorithms.push_back(std::move(v));
    }
    if (spec.algorithms.empty()) throw ConfigError("no algorithms configured");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
}

inline ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cannot parse ") + path + ": " + e.what());
  }
  return parse_experiment(j);
}

namespace detail {

// 17 significant digits round-trip doubles exactly, so re-running a config
// reproduces result files byte for byte.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    quoted += ch;
    if (ch == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

}  // namespace detail

// One row per (sweep point, trial, algorithm, dataset).
inline void write_results_csv(const ExperimentResult& res,
                              const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "sweep,trial,algorithm,k,isr_init_db,isr_final_db,iterations,"
         "converged,fallbacks,error\r\n";
  for (const auto& r : res.rows) {
    out << detail::fmt_double(r.sweep_value) << ',' << r.trial << ','
        << detail::csv_field(r.algorithm) << ',' << r.k << ','
        << detail::fmt_double(r.isr_init_db) << ','
        << detail::fmt_double(r.isr_final_db) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << r.fallbacks << ','
        << detail::csv_field(r.error) << "\r\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

// Per-iteration ISR rows; only written for trace-recording modes.
inline void write_traces_csv(const ExperimentResult& res,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "sweep,trial,algorithm,k,iteration,isr_db\r\n";
  for (const auto& r : res.rows)
    for (std::size_t i = 0; i < r.isr_trace.size(); ++i)
      out << detail::fmt_double(r.sweep_value) << ',' << r.trial << ','
          << detail::csv_field(r.algorithm) << ',' << r.k << ',' << (i + 1)
          << ',' << detail::fmt_double(r.isr_trace[i]) << "\r\n";
  if (!out) throw ConfigError("write failed: " + path);
}

inline void write_summary_json(const ExperimentResult& res,
                               const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["name"] = res.spec.name;
  j["mode"] = mode_name(res.spec.mode);
  j["trials"] = res.spec.trials;
  j["data"] = {{"K", res.spec.base.K},
               {"T", res.spec.base.T},
               {"L", res.spec.base.L},
               {"Ns", res.spec.base.Ns},
               {"d", res.spec.base.d},
               {"c", res.spec.base.c},
               {"delta", {res.spec.base.delta.real(), res.spec.base.delta.imag()}},
               {"alpha", res.spec.base.alpha},
               {"seed", res.spec.base.seed},
               {"coupling", detail::coupling_name(res.spec.base.coupling)}};

  nlohmann::json curves = nlohmann::json::object();
  for (const auto& v : res.spec.algorithms) {
    nlohmann::json c;
    for (const auto& s : sweep_stats(res, v.label)) {
      c["sweep"].push_back(s.sweep_value);
      c["isr_trimmed_mean_db"].push_back(s.isr_trimmed_mean_db);
      c["isr_median_db"].push_back(s.isr_median_db);
      c["init_isr_trimmed_mean_db"].push_back(s.init_trimmed_mean_db);
      c["converged_fraction"].push_back(s.converged_fraction);
      c["mean_iterations"].push_back(s.mean_iterations);
      c["completed"].push_back(s.completed);
      c["failures"].push_back(s.failures);
    }
    curves[v.label] = std::move(c);
  }
  j["algorithms"] = std::move(curves);

  if (res.traces) {
    nlohmann::json traces = nlohmann::json::object();
    for (const auto& v : res.spec.algorithms) {
      nlohmann::json t;
      for (const auto& s : iteration_stats(res, v.label)) {
        t["iteration"].push_back(s.iteration);
        t["min_db"].push_back(s.min_db);
        t["median_db"].push_back(s.median_db);
        t["max_db"].push_back(s.max_db);
        t["freq_avg_median_db"].push_back(s.freq_avg_median_db);
      }
      traces[v.label] = std::move(t);
    }
    j["iteration_stats"] = std::move(traces);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("write failed: " + path);
}

// results.csv + summary.json (+ traces.csv when traces were recorded) under
// out_dir, which is created if missing.
inline void write_outputs(const ExperimentResult& res,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_results_csv(res, (dir / "results.csv").string());
  if (res.traces) write_traces_csv(res, (dir / "traces.csv").string());
  write_summary_json(res, (dir / "summary.json").string());
}

}  // namespace dive
