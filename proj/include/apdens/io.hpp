#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "apdens/bench.hpp"
#include "apdens/solver.hpp"

namespace apdens {

/// Shortest decimal form that parses back to exactly the same double. CSV and
/// JSON emitters share it so both carry identical values.
inline std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buffer, ptr);
}

inline std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "generation,fes,np,pfeas,rdiv,best_f,best_v\n";
  for (const auto& rec : trace) {
    out += std::to_string(rec.generation);
    out += ',';
    out += std::to_string(rec.fes);
    out += ',';
    out += std::to_string(rec.np);
    out += ',';
    out += format_double(rec.pfeas);
    out += ',';
    out += format_double(rec.rdiv);
    out += ',';
    out += format_double(rec.best_f);
    out += ',';
    out += format_double(rec.best_v);
    out += '\n';
  }
  return out;
}

inline std::string metrics_to_csv(const std::vector<ProblemMetrics>& metrics) {
  std::string out = "problem,dim,algo,runs,fr,mean_vio,mean_obj,sr\n";
  for (const auto& m : metrics) {
    out += m.problem;
    out += ',';
    out += std::to_string(m.dim);
    out += ',';
    out += m.algo;
    out += ',';
    out += std::to_string(m.runs);
    out += ',';
    out += format_double(m.fr);
    out += ',';
    out += format_double(m.mean_vio);
    out += ',';
    out += format_double(m.mean_obj);
    out += ',';
    out += m.sr_success ? "1" : "0";
    out += '\n';
  }
  return out;
}

inline nlohmann::json metrics_to_json(const std::vector<ProblemMetrics>& metrics) {
  nlohmann::json problems = nlohmann::json::array();
  for (const auto& m : metrics) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : m.records) {
      records.push_back({{"seed", rec.seed},
                         {"f", rec.f},
                         {"v", rec.v},
                         {"feasible", rec.feasible},
                         {"fes_used", rec.fes_used},
                         {"generations", rec.generations}});
    }
    problems.push_back({{"problem", m.problem},
                        {"dim", m.dim},
                        {"algo", m.algo},
                        {"runs", m.runs},
                        {"fr", m.fr},
                        {"mean_vio", m.mean_vio},
                        {"mean_obj", m.mean_obj},
                        {"sr", m.sr_success},
                        {"records", records}});
  }
  return {{"problems", problems}};
}

inline std::vector<ProblemMetrics> metrics_from_json(const nlohmann::json& doc) {
  std::vector<ProblemMetrics> out;
  for (const auto& entry : doc.at("problems")) {
    ProblemMetrics m;
    m.problem = entry.at("problem").get<std::string>();
    m.dim = entry.at("dim").get<int>();
    m.algo = entry.at("algo").get<std::string>();
    m.runs = entry.at("runs").get<int>();
    m.fr = entry.at("fr").get<double>();
    m.mean_vio = entry.at("mean_vio").get<double>();
    m.mean_obj = entry.at("mean_obj").get<double>();
    m.sr_success = entry.at("sr").get<bool>();
    for (const auto& r : entry.at("records")) {
      RunRecord rec;
      rec.seed = r.at("seed").get<std::uint64_t>();
      rec.f = r.at("f").get<double>();
      rec.v = r.at("v").get<double>();
      rec.feasible = r.at("feasible").get<bool>();
      rec.fes_used = r.at("fes_used").get<std::uint64_t>();
      rec.generations = r.at("generations").get<std::uint64_t>();
      m.records.push_back(rec);
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline char ordering_symbol(Ordering o) {
  switch (o) {
    case Ordering::FirstBetter: return '+';
    case Ordering::SecondBetter: return '-';
    case Ordering::Tie: return '=';
  }
  return '=';
}

inline char sign_symbol(SignVerdict v) {
  switch (v) {
    case SignVerdict::FirstBetter: return '+';
    case SignVerdict::SecondBetter: return '-';
    case SignVerdict::NoDifference: return '=';
  }
  return '=';
}

inline std::string comparison_to_text(const ComparisonReport& report) {
  std::string out = "comparison: " + report.algo_a + " vs " + report.algo_b + "\n";
  for (const auto& pc : report.problems) {
    out += pc.problem + " (D=" + std::to_string(pc.dim) + "): criterion-I ";
    out += ordering_symbol(pc.criterion1);
    out += "  sign-test ";
    out += sign_symbol(pc.criterion2);
    out += " (wins " + std::to_string(pc.sign.wins_first) + "/" +
           std::to_string(pc.sign.wins_second) + ", ties " + std::to_string(pc.sign.ties) +
           ", need " + std::to_string(pc.sign.threshold) + ")\n";
  }
  out += "criterion-I  +/=/-: " + std::to_string(report.c1_wins) + "/" +
         std::to_string(report.c1_ties) + "/" + std::to_string(report.c1_losses) + "\n";
  out += "criterion-II +/=/-: " + std::to_string(report.c2_wins) + "/" +
         std::to_string(report.c2_ties) + "/" + std::to_string(report.c2_losses) + "\n";
  return out;
}

inline nlohmann::json comparison_to_json(const ComparisonReport& report) {
  nlohmann::json problems = nlohmann::json::array();
  for (const auto& pc : report.problems) {
    problems.push_back({{"problem", pc.problem},
                        {"dim", pc.dim},
                        {"criterion1", std::string(1, ordering_symbol(pc.criterion1))},
                        {"criterion2", std::string(1, sign_symbol(pc.criterion2))},
                        {"wins_a", pc.sign.wins_first},
                        {"wins_b", pc.sign.wins_second},
                        {"ties", pc.sign.ties},
                        {"threshold", pc.sign.threshold}});
  }
  return {{"algo_a", report.algo_a},
          {"algo_b", report.algo_b},
          {"problems", problems},
          {"criterion1", {{"wins", report.c1_wins}, {"ties", report.c1_ties}, {"losses", report.c1_losses}}},
          {"criterion2", {{"wins", report.c2_wins}, {"ties", report.c2_ties}, {"losses", report.c2_losses}}}};
}

inline nlohmann::json manifest_to_json() {
  nlohmann::json problems = nlohmann::json::array();
  for (const auto& info : problem_manifest()) {
    nlohmann::json entry = {{"name", info.name},
                            {"min_dim", info.min_dim},
                            {"max_dim", info.max_dim},
                            {"default_dim", info.default_dim},
                            {"inequalities", info.num_inequalities},
                            {"equalities", info.num_equalities},
                            {"has_known_optimum", info.has_known_optimum}};
    if (info.has_known_optimum) {
      const auto problem = info.make(info.default_dim);
      entry["optimum_f_at_default_dim"] = problem.optimum->f;
    }
    problems.push_back(std::move(entry));
  }
  return {{"problems", problems}};
}

}  // namespace apdens
