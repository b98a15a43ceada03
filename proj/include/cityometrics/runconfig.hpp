#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cityometrics/commands.hpp"

namespace cityom::cmd {

// Declarative run file: one key=value per line, '#' comments. Drives the
// whole pipeline into output_dir with deterministic artifact names.
struct RunConfig {
  std::vector<std::string> corpus_paths;
  std::string format = "jsonl";
  std::string gazetteer_path;
  std::string aliases_path;
  std::string membership_path;
  std::string institution_path;
  std::string travel_time_path;
  std::string strategy = "lookup";
  std::string tier = "CSA";
  std::optional<double> distance_km;
  std::optional<int64_t> core_population;
  std::optional<double> threshold_minutes;
  std::vector<std::string> regimes = {"integer", "dedup", "fractional"};
  std::string fractional_basis = "distinct_locality";
  std::string years;
  double unresolved_tolerance = 0.0;
  std::string metro;  // optional ranked-table target
  int top_n = 25;
  std::string output_dir;
  uint64_t seed = 42;
  unsigned threads = 0;  // 0 = resolve via env / hardware
};

inline RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);

  std::map<std::string, std::string> kv;
  std::vector<std::string> violations;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto pos = t.find('=');
    if (pos == std::string_view::npos) {
      violations.push_back("line " + std::to_string(line_no) + ": expected key=value");
      continue;
    }
    std::string key(text::trim(t.substr(0, pos)));
    std::string value(text::trim(t.substr(pos + 1)));
    if (!kv.emplace(key, value).second)
      violations.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }

  RunConfig cfg;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto list_of = [](const std::string& v) {
    std::vector<std::string> out;
    for (std::string_view piece : text::split(v, ',')) {
      std::string t(text::trim(piece));
      if (!t.empty()) out.push_back(t);
    }
    return out;
  };
  auto number = [&](const char* key, const std::string& v) -> std::optional<double> {
    char* endp = nullptr;
    double d = std::strtod(v.c_str(), &endp);
    if (endp == v.c_str() || *endp != '\0') {
      violations.push_back(std::string(key) + ": not a number: '" + v + "'");
      return std::nullopt;
    }
    return d;
  };

  if (auto v = take("corpus")) cfg.corpus_paths = list_of(*v);
  if (auto v = take("format")) cfg.format = *v;
  if (auto v = take("gazetteer")) cfg.gazetteer_path = *v;
  if (auto v = take("aliases")) cfg.aliases_path = *v;
  if (auto v = take("memberships")) cfg.membership_path = *v;
  if (auto v = take("institutions")) cfg.institution_path = *v;
  if (auto v = take("travel_times")) cfg.travel_time_path = *v;
  if (auto v = take("strategy")) cfg.strategy = *v;
  if (auto v = take("tier")) cfg.tier = *v;
  if (auto v = take("distance_km")) cfg.distance_km = number("distance_km", *v);
  if (auto v = take("core_population")) {
    if (auto d = number("core_population", *v)) cfg.core_population = static_cast<int64_t>(*d);
  }
  if (auto v = take("threshold_minutes")) cfg.threshold_minutes = number("threshold_minutes", *v);
  if (auto v = take("regimes")) cfg.regimes = list_of(*v);
  if (auto v = take("fractional_basis")) cfg.fractional_basis = *v;
  if (auto v = take("year_range")) cfg.years = *v;
  if (auto v = take("unresolved_tolerance")) {
    if (auto d = number("unresolved_tolerance", *v)) cfg.unresolved_tolerance = *d;
  }
  if (auto v = take("metro")) cfg.metro = *v;
  if (auto v = take("top_n")) {
    if (auto d = number("top_n", *v)) cfg.top_n = static_cast<int>(*d);
  }
  if (auto v = take("output_dir")) cfg.output_dir = *v;
  if (auto v = take("seed")) {
    if (auto d = number("seed", *v)) cfg.seed = static_cast<uint64_t>(*d);
  }
  if (auto v = take("threads")) {
    if (auto d = number("threads", *v)) cfg.threads = static_cast<unsigned>(*d);
  }
  for (const auto& [key, value] : kv) violations.push_back("unknown key '" + key + "'");

  // validate everything at once
  if (cfg.corpus_paths.empty()) violations.push_back("corpus is required");
  for (const auto& p : cfg.corpus_paths)
    if (!std::filesystem::exists(p)) violations.push_back("corpus file does not exist: " + p);
  if (cfg.gazetteer_path.empty()) violations.push_back("gazetteer is required");
  else if (!std::filesystem::exists(cfg.gazetteer_path))
    violations.push_back("gazetteer does not exist: " + cfg.gazetteer_path);
  for (const std::string* p : {&cfg.aliases_path, &cfg.membership_path, &cfg.institution_path,
                               &cfg.travel_time_path})
    if (!p->empty() && !std::filesystem::exists(*p))
      violations.push_back("file does not exist: " + *p);
  if (cfg.output_dir.empty()) violations.push_back("output_dir is required");
  auto strat = strategy_from_string(cfg.strategy);
  if (!strat) violations.push_back("unknown strategy '" + cfg.strategy + "'");
  else {
    if (*strat == Strategy::lookup && cfg.membership_path.empty())
      violations.push_back("strategy lookup needs memberships");
    if (*strat == Strategy::distance && !cfg.distance_km)
      violations.push_back("strategy distance needs distance_km");
    if (*strat == Strategy::travel_time) {
      if (!cfg.distance_km)
        violations.push_back("strategy travel_time needs distance_km for the base partition");
      if (cfg.travel_time_path.empty()) violations.push_back("strategy travel_time needs travel_times");
      if (!cfg.threshold_minutes) violations.push_back("strategy travel_time needs threshold_minutes");
    }
  }
  if (!tier_from_string(cfg.tier)) violations.push_back("unknown tier '" + cfg.tier + "'");
  for (const auto& r : cfg.regimes)
    if (!regime_from_string(r)) violations.push_back("unknown regime '" + r + "'");
  if (!basis_from_string(cfg.fractional_basis))
    violations.push_back("unknown fractional_basis '" + cfg.fractional_basis + "'");
  if (cfg.top_n < 1) violations.push_back("top_n must be >= 1");
  if (!cfg.years.empty()) {
    try {
      parse_year_range(cfg.years);
    } catch (const ConfigError& e) {
      for (const auto& v : e.violations()) violations.push_back(v);
    }
  }
  if (!violations.empty()) throw ConfigError(violations);
  return cfg;
}

// Full batch run: ingest -> resolve -> delineate -> counts -> dyads ->
// reports (+ mismatch when institutions are configured).
inline void run_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  unsigned threads = resolve_threads(cfg.threads);
  auto out = [&](const std::string& name) { return cfg.output_dir + "/" + name; };

  IngestOpts ingest_opts;
  ingest_opts.inputs = cfg.corpus_paths;
  ingest_opts.format = cfg.format;
  ingest_opts.out = out("corpus.jsonl");
  ingest_opts.quarantine_out = out("quarantine.csv");
  ingest_opts.threads = threads;
  run_ingest(ingest_opts);

  ResolveOpts resolve_opts;
  resolve_opts.corpus_path = out("corpus.jsonl");
  resolve_opts.gazetteer_path = cfg.gazetteer_path;
  resolve_opts.aliases_path = cfg.aliases_path;
  resolve_opts.out = out("corpus.resolved.jsonl");
  resolve_opts.quarantine_out = out("unresolved.csv");
  resolve_opts.threads = threads;
  run_resolve(resolve_opts);

  DelineateOpts del_opts;
  del_opts.gazetteer_path = cfg.gazetteer_path;
  del_opts.strategy = cfg.strategy;
  del_opts.memberships_path = cfg.membership_path;
  del_opts.tier = cfg.tier;
  del_opts.distance_km = cfg.distance_km;
  del_opts.core_population = cfg.core_population;
  del_opts.travel_times_path = cfg.travel_time_path;
  del_opts.threshold_minutes = cfg.threshold_minutes;
  if (strategy_from_string(cfg.strategy) == Strategy::travel_time) {
    // base partition from the distance threshold, then merge on top
    DelineateOpts base;
    base.gazetteer_path = cfg.gazetteer_path;
    base.strategy = "distance";
    base.distance_km = cfg.distance_km;
    base.core_population = cfg.core_population;
    base.out = out("partition.base.csv");
    run_delineate(base);
    del_opts.base_partition_path = out("partition.base.csv");
    del_opts.skipped_out = out("skipped_edges.csv");
  }
  del_opts.out = out("partition.csv");
  run_delineate(del_opts);

  for (const auto& regime : cfg.regimes) {
    CountOpts copts;
    copts.corpus_path = out("corpus.resolved.jsonl");
    copts.partition_path = (regime == "integer") ? "" : out("partition.csv");
    copts.regime = regime;
    copts.basis = cfg.fractional_basis;
    copts.years = cfg.years;
    copts.unresolved_tolerance = cfg.unresolved_tolerance;
    copts.out = out("count_" + regime + ".csv");
    copts.threads = threads;
    run_count(copts);
  }

  for (const char* regime : {"integer", "fractional"}) {
    CollabOpts dopts;
    dopts.corpus_path = out("corpus.resolved.jsonl");
    dopts.partition_path = out("partition.csv");
    dopts.regime = regime;
    dopts.years = cfg.years;
    dopts.unresolved_tolerance = cfg.unresolved_tolerance;
    dopts.out = out(std::string("dyads_") + regime + ".csv");
    dopts.threads = threads;
    run_collab(dopts);
  }

  if (!cfg.metro.empty()) {
    ReportOpts ropts;
    ropts.kind = "ranked";
    ropts.corpus_path = out("corpus.resolved.jsonl");
    ropts.partition_path = out("partition.csv");
    ropts.gazetteer_path = cfg.gazetteer_path;
    ropts.metro = cfg.metro;
    ropts.top_n = cfg.top_n;
    ropts.basis = cfg.fractional_basis;
    ropts.years = cfg.years;
    ropts.unresolved_tolerance = cfg.unresolved_tolerance;
    ropts.threads = threads;
    ropts.format = "csv";
    ropts.out = out("ranked_" + cfg.metro + ".csv");
    run_report(ropts);
    ropts.format = "text";
    ropts.out = out("ranked_" + cfg.metro + ".txt");
    run_report(ropts);
  }

  ReportOpts sopts;
  sopts.kind = "summary";
  sopts.corpus_path = out("corpus.resolved.jsonl");
  sopts.partition_path = out("partition.csv");
  sopts.basis = cfg.fractional_basis;
  sopts.years = cfg.years;
  sopts.unresolved_tolerance = cfg.unresolved_tolerance;
  sopts.threads = threads;
  sopts.out = out("summary.csv");
  run_report(sopts);

  if (!cfg.institution_path.empty()) {
    MismatchOpts mopts;
    mopts.corpus_path = out("corpus.resolved.jsonl");
    mopts.gazetteer_path = cfg.gazetteer_path;
    mopts.institutions_path = cfg.institution_path;
    mopts.years = cfg.years;
    mopts.out = out("mismatch.csv");
    mopts.unmatched_out = out("mismatch_unmatched.csv");
    mopts.threads = threads;
    run_mismatch(mopts);
  }
}

}  // namespace cityom::cmd
