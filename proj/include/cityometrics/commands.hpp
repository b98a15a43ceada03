#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cityometrics/collab.hpp"
#include "cityometrics/corpus.hpp"
#include "cityometrics/counting.hpp"
#include "cityometrics/delineation.hpp"
#include "cityometrics/fixtures.hpp"
#include "cityometrics/gazetteer.hpp"
#include "cityometrics/hash.hpp"
#include "cityometrics/io.hpp"
#include "cityometrics/report.hpp"
#include "cityometrics/version.hpp"

// Batch commands behind the CLI. Each function is pure file-in/file-out:
// inputs are read fresh, outputs are written atomically with a header
// block carrying the tool version, a config hash and input hashes, so a
// re-run with identical inputs is byte-identical.

namespace cityom::cmd {

namespace detail {

inline std::string basename(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

// Hash of the command's resolved option string; stamped into outputs.
inline std::string config_hash(const std::vector<std::pair<std::string, std::string>>& kv) {
  Fnv1a64 h;
  for (const auto& [k, v] : kv) {
    h.update(k);
    h.update("=");
    h.update(v);
    h.update(";");
  }
  return h.hex();
}

inline io::HeaderBlock standard_header(const std::string& command,
                                       const std::vector<std::pair<std::string, std::string>>& cfg,
                                       const std::vector<std::string>& inputs) {
  io::HeaderBlock hb;
  hb.add("tool", kToolStamp);
  hb.add("command", command);
  hb.add("config_hash", config_hash(cfg));
  for (const auto& in : inputs) hb.add("input:" + basename(in), hash_file(in));
  return hb;
}

inline void write_artifact(const std::string& path, const io::HeaderBlock& hb,
                           const std::string& body) {
  io::write_file_atomic(path, hb.render() + body);
}

inline std::string quarantine_csv(const Corpus& corpus) {
  csv::Writer w;
  w.row({"record_id", "line_no", "reason"});
  bool many = corpus.sources.size() > 1;
  for (const auto& q : corpus.quarantine) {
    std::string reason = many ? basename(q.source) + ": " + q.reason : q.reason;
    w.row({q.record_id, std::to_string(q.line_no), reason});
  }
  for (const auto& u : corpus.unresolved) {
    const PublicationRecord* rec = corpus.find(u.record_id);
    long line = rec ? rec->line_no : 0;
    w.row({u.record_id, std::to_string(line),
           "affiliation[" + std::to_string(u.affiliation_index) + "]: " + u.reason});
  }
  return w.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestOpts {
  std::vector<std::string> inputs;
  std::string format = "jsonl";
  std::string out;
  std::string quarantine_out;  // optional
  unsigned threads = 1;
};

inline Corpus run_ingest(const IngestOpts& opts) {
  std::vector<std::string> violations;
  if (opts.inputs.empty()) violations.push_back("ingest: at least one --in file is required");
  if (opts.out.empty()) violations.push_back("ingest: --out is required");
  for (const auto& p : opts.inputs)
    if (!std::filesystem::exists(p)) violations.push_back("ingest: input does not exist: " + p);
  if (!violations.empty()) throw ConfigError(violations);

  CorpusFormat format = corpus_format_from_string(opts.format);
  Corpus corpus = ingest(opts.inputs, format, opts.threads);

  std::string in_joined;
  for (const auto& p : opts.inputs) in_joined += (in_joined.empty() ? "" : ",") + p;
  auto hb = detail::standard_header(
      "ingest", {{"format", opts.format}, {"in", in_joined}, {"out", opts.out}}, opts.inputs);
  hb.add("records", std::to_string(corpus.records.size()));
  hb.add("quarantined", std::to_string(corpus.quarantine.size()));
  hb.add("corpus_hash", corpus_hash(corpus));
  detail::write_artifact(opts.out, hb, corpus_to_jsonl(corpus));
  if (!opts.quarantine_out.empty())
    detail::write_artifact(opts.quarantine_out, hb, detail::quarantine_csv(corpus));
  return corpus;
}

// ---------------------------------------------------------------------------
// resolve
// ---------------------------------------------------------------------------

struct ResolveOpts {
  std::string corpus_path;
  std::string gazetteer_path;
  std::string aliases_path;  // optional
  std::string out;
  std::string quarantine_out;  // optional
  unsigned threads = 1;
};

inline Corpus run_resolve(const ResolveOpts& opts) {
  std::vector<std::string> violations;
  if (opts.corpus_path.empty()) violations.push_back("resolve: --corpus is required");
  if (opts.gazetteer_path.empty()) violations.push_back("resolve: --gazetteer is required");
  if (opts.out.empty()) violations.push_back("resolve: --out is required");
  for (const std::string& p : {opts.corpus_path, opts.gazetteer_path})
    if (!p.empty() && !std::filesystem::exists(p))
      violations.push_back("resolve: input does not exist: " + p);
  if (!opts.aliases_path.empty() && !std::filesystem::exists(opts.aliases_path))
    violations.push_back("resolve: input does not exist: " + opts.aliases_path);
  if (!violations.empty()) throw ConfigError(violations);

  Corpus corpus = ingest(opts.corpus_path, CorpusFormat::jsonl, opts.threads);
  LocalityRegistry registry = load_gazetteer(opts.gazetteer_path);
  AliasTable aliases;
  if (!opts.aliases_path.empty()) aliases = load_aliases(opts.aliases_path, registry);
  size_t failed =
      resolve_corpus(corpus, registry, opts.aliases_path.empty() ? nullptr : &aliases,
                     opts.threads);

  std::vector<std::string> inputs = {opts.corpus_path, opts.gazetteer_path};
  if (!opts.aliases_path.empty()) inputs.push_back(opts.aliases_path);
  auto hb = detail::standard_header("resolve",
                                    {{"corpus", opts.corpus_path},
                                     {"gazetteer", opts.gazetteer_path},
                                     {"aliases", opts.aliases_path},
                                     {"out", opts.out}},
                                    inputs);
  hb.add("records", std::to_string(corpus.records.size()));
  hb.add("unresolved_entries", std::to_string(failed));
  hb.add("corpus_hash", corpus_hash(corpus));
  detail::write_artifact(opts.out, hb, corpus_to_jsonl(corpus));
  if (!opts.quarantine_out.empty())
    detail::write_artifact(opts.quarantine_out, hb, detail::quarantine_csv(corpus));
  return corpus;
}

// ---------------------------------------------------------------------------
// delineate
// ---------------------------------------------------------------------------

struct DelineateOpts {
  std::string gazetteer_path;
  std::string strategy;  // lookup | distance | travel_time
  std::string memberships_path;
  std::string tier = "CSA";
  std::optional<double> distance_km;
  std::optional<int64_t> core_population;
  std::string base_partition_path;  // travel_time
  std::string travel_times_path;    // travel_time
  std::optional<double> threshold_minutes;
  std::string out;
  std::string skipped_out;  // optional
  std::string diff_against;  // optional: second partition to compare with
  std::string diff_out;
};

inline Partition run_delineate(const DelineateOpts& opts) {
  std::vector<std::string> violations;
  if (opts.gazetteer_path.empty()) violations.push_back("delineate: --gazetteer is required");
  auto strat = strategy_from_string(opts.strategy);
  if (!strat) violations.push_back("delineate: unknown strategy '" + opts.strategy + "'");
  if (opts.out.empty()) violations.push_back("delineate: --out is required");
  if (strat) {
    if (*strat == Strategy::lookup && opts.memberships_path.empty())
      violations.push_back("delineate: lookup strategy needs --memberships");
    if (*strat == Strategy::distance && !opts.distance_km)
      violations.push_back("delineate: distance strategy needs --distance-km");
    if (*strat == Strategy::travel_time) {
      if (opts.base_partition_path.empty())
        violations.push_back("delineate: travel_time strategy needs --base");
      if (opts.travel_times_path.empty())
        violations.push_back("delineate: travel_time strategy needs --travel-times");
      if (!opts.threshold_minutes)
        violations.push_back("delineate: travel_time strategy needs --threshold-minutes");
    }
  }
  for (const std::string& p : {opts.gazetteer_path, opts.memberships_path,
                               opts.base_partition_path, opts.travel_times_path})
    if (!p.empty() && !std::filesystem::exists(p))
      violations.push_back("delineate: input does not exist: " + p);
  if (!violations.empty()) throw ConfigError(violations);

  LocalityRegistry registry = load_gazetteer(opts.gazetteer_path);
  Partition partition;
  std::vector<SkippedEdge> skipped;
  std::vector<std::pair<std::string, std::string>> cfg = {{"strategy", opts.strategy},
                                                          {"gazetteer", opts.gazetteer_path},
                                                          {"out", opts.out}};
  std::vector<std::string> inputs = {opts.gazetteer_path};

  if (*strat == Strategy::lookup) {
    auto tier = tier_from_string(opts.tier);
    if (!tier) throw ConfigError({"delineate: unknown tier '" + opts.tier + "'"});
    MembershipTable table = load_memberships(opts.memberships_path, registry);
    partition = delineate_lookup(registry, table, *tier);
    cfg.push_back({"memberships", opts.memberships_path});
    cfg.push_back({"tier", opts.tier});
    inputs.push_back(opts.memberships_path);
  } else if (*strat == Strategy::distance) {
    partition = delineate_distance(registry, *opts.distance_km, opts.core_population);
    cfg.push_back({"distance_km", format_double(*opts.distance_km)});
    if (opts.core_population)
      cfg.push_back({"core_population", std::to_string(*opts.core_population)});
  } else {
    Partition base = load_partition(opts.base_partition_path);
    base.validate(registry);
    auto edges = load_travel_times(opts.travel_times_path, registry);
    TravelTimeResult result = delineate_travel_time(base, edges, *opts.threshold_minutes);
    partition = std::move(result.partition);
    skipped = std::move(result.skipped);
    cfg.push_back({"base", opts.base_partition_path});
    cfg.push_back({"travel_times", opts.travel_times_path});
    cfg.push_back({"threshold_minutes", format_double(*opts.threshold_minutes)});
    inputs.push_back(opts.base_partition_path);
    inputs.push_back(opts.travel_times_path);
  }
  partition.validate(registry);

  auto hb = detail::standard_header("delineate", cfg, inputs);
  hb.add("metros", std::to_string(partition.metros.size()));
  hb.add("singletons", std::to_string(partition.singletons.size()));
  csv::Writer w;
  write_partition_rows(w, partition);
  detail::write_artifact(opts.out, hb, w.str());

  if (!opts.skipped_out.empty()) {
    csv::Writer sw;
    sw.row({"locality_a", "locality_b", "minutes", "reason"});
    for (const auto& e : skipped)
      sw.row({e.a, e.b, format_double(e.minutes), e.reason});
    detail::write_artifact(opts.skipped_out, hb, sw.str());
  }

  if (!opts.diff_against.empty()) {
    if (opts.diff_out.empty())
      throw ConfigError({"delineate: --diff-against needs --diff-out"});
    Partition other = load_partition(opts.diff_against);
    other.validate(registry);
    PartitionDiff diff = compare_partitions(partition, other);
    csv::Writer dw;
    dw.comment("changed", std::to_string(diff.changed_count));
    dw.comment("split_events", std::to_string(diff.split_events));
    dw.comment("merge_events", std::to_string(diff.merge_events));
    dw.row({"locality_id", "metro_id_p1", "metro_id_p2", "changed"});
    for (const auto& r : diff.rows)
      dw.row({r.locality_id, r.unit_p1, r.unit_p2, r.changed ? "true" : "false"});
    detail::write_artifact(opts.diff_out, hb, dw.str());
  }
  return partition;
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

struct CountOpts {
  std::string corpus_path;   // resolved corpus JSONL
  std::string partition_path;  // required for dedup / integer_sum / metro fractional
  std::string regime = "integer";
  std::string basis = "distinct_locality";
  std::string years;  // "min:max", optional
  double unresolved_tolerance = 0.0;
  std::string out;
  unsigned threads = 1;
};

inline std::optional<YearRange> parse_year_range(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto pos = s.find(':');
  if (pos == std::string::npos)
    throw ConfigError({"year range must be min:max, got '" + s + "'"});
  YearRange r;
  try {
    r.min = std::stoi(s.substr(0, pos));
    r.max = std::stoi(s.substr(pos + 1));
  } catch (const std::exception&) {
    throw ConfigError({"year range must be min:max, got '" + s + "'"});
  }
  if (r.min > r.max) throw ConfigError({"year range min exceeds max in '" + s + "'"});
  return r;
}

inline CountReport run_count(const CountOpts& opts) {
  std::vector<std::string> violations;
  if (opts.corpus_path.empty()) violations.push_back("count: --corpus is required");
  if (opts.out.empty()) violations.push_back("count: --out is required");
  auto regime = regime_from_string(opts.regime);
  if (!regime) violations.push_back("count: unknown regime '" + opts.regime + "'");
  auto basis = basis_from_string(opts.basis);
  if (!basis) violations.push_back("count: unknown basis '" + opts.basis + "'");
  if (regime && (*regime == Regime::dedup || *regime == Regime::integer_sum) &&
      opts.partition_path.empty())
    violations.push_back("count: regime " + opts.regime + " needs --partition");
  for (const std::string& p : {opts.corpus_path, opts.partition_path})
    if (!p.empty() && !std::filesystem::exists(p))
      violations.push_back("count: input does not exist: " + p);
  if (!violations.empty()) throw ConfigError(violations);

  Corpus corpus = ingest(opts.corpus_path, CorpusFormat::jsonl, opts.threads);
  if (corpus.empty()) throw EmptyCorpusError("empty corpus: " + opts.corpus_path);

  Partition partition;
  bool have_partition = !opts.partition_path.empty();
  if (have_partition) partition = load_partition(opts.partition_path);

  CountingOptions copts;
  copts.year_filter = parse_year_range(opts.years);
  copts.unresolved_tolerance = opts.unresolved_tolerance;
  copts.threads = opts.threads;

  CountReport report;
  switch (*regime) {
    case Regime::integer:
      report = integer_count(corpus, copts);
      break;
    case Regime::integer_sum:
      report = metro_integer_sum(integer_count(corpus, copts), partition);
      break;
    case Regime::dedup:
      report = dedup_count(corpus, partition, copts);
      break;
    case Regime::fractional: {
      AttributionPolicy policy;
      policy.fractional_basis = *basis;
      policy.metro_mapping = have_partition ? &partition : nullptr;
      report = fractional_count(corpus, policy, copts);
      break;
    }
  }

  std::vector<std::string> inputs = {opts.corpus_path};
  if (have_partition) inputs.push_back(opts.partition_path);
  auto hb = detail::standard_header("count",
                                    {{"corpus", opts.corpus_path},
                                     {"partition", opts.partition_path},
                                     {"regime", opts.regime},
                                     {"basis", opts.basis},
                                     {"years", opts.years},
                                     {"tolerance", format_double(opts.unresolved_tolerance)},
                                     {"out", opts.out}},
                                    inputs);
  csv::Writer w;
  write_count_report(w, report);
  detail::write_artifact(opts.out, hb, w.str());
  return report;
}

// ---------------------------------------------------------------------------
// collab
// ---------------------------------------------------------------------------

struct CollabOpts {
  std::string corpus_path;
  std::string partition_path;  // optional: absent = locality level
  std::string regime = "integer";
  bool include_diagonal = true;
  std::string expand;  // "metroA:metroB" -> link expansion instead of matrix
  std::string intra_city;  // locality or metro id -> institution matrix
  std::string institutions_path;
  std::string gazetteer_path;
  std::string years;
  double unresolved_tolerance = 0.0;
  std::string out;
  unsigned threads = 1;
};

inline void run_collab(const CollabOpts& opts) {
  std::vector<std::string> violations;
  if (opts.corpus_path.empty()) violations.push_back("collab: --corpus is required");
  if (opts.out.empty()) violations.push_back("collab: --out is required");
  if (!opts.expand.empty() && opts.partition_path.empty())
    violations.push_back("collab: --expand needs --partition");
  if (!opts.intra_city.empty()) {
    if (opts.institutions_path.empty())
      violations.push_back("collab: --intra-city needs --institutions");
    if (opts.gazetteer_path.empty())
      violations.push_back("collab: --intra-city needs --gazetteer");
  }
  for (const std::string& p : {opts.corpus_path, opts.partition_path, opts.institutions_path,
                               opts.gazetteer_path})
    if (!p.empty() && !std::filesystem::exists(p))
      violations.push_back("collab: input does not exist: " + p);
  if (!violations.empty()) throw ConfigError(violations);

  Corpus corpus = ingest(opts.corpus_path, CorpusFormat::jsonl, opts.threads);
  if (corpus.empty()) throw EmptyCorpusError("empty corpus: " + opts.corpus_path);

  Partition partition;
  bool have_partition = !opts.partition_path.empty();
  if (have_partition) partition = load_partition(opts.partition_path);

  CountingOptions copts;
  copts.year_filter = parse_year_range(opts.years);
  copts.unresolved_tolerance = opts.unresolved_tolerance;
  copts.threads = opts.threads;

  std::vector<std::string> inputs = {opts.corpus_path};
  if (have_partition) inputs.push_back(opts.partition_path);
  if (!opts.institutions_path.empty()) inputs.push_back(opts.institutions_path);
  if (!opts.gazetteer_path.empty()) inputs.push_back(opts.gazetteer_path);
  auto hb = detail::standard_header("collab",
                                    {{"corpus", opts.corpus_path},
                                     {"partition", opts.partition_path},
                                     {"regime", opts.regime},
                                     {"expand", opts.expand},
                                     {"intra_city", opts.intra_city},
                                     {"years", opts.years},
                                     {"out", opts.out}},
                                    inputs);

  if (!opts.expand.empty()) {
    auto pos = opts.expand.find(':');
    if (pos == std::string::npos)
      throw ConfigError({"collab: --expand expects metroA:metroB"});
    LinkExpansion e = expand_links(corpus, partition, opts.expand.substr(0, pos),
                                   opts.expand.substr(pos + 1), copts);
    csv::Writer w;
    write_link_expansion(w, e);
    detail::write_artifact(opts.out, hb, w.str());
    return;
  }

  if (!opts.intra_city.empty()) {
    LocalityRegistry registry = load_gazetteer(opts.gazetteer_path);
    InstitutionRegistry institutions = load_institutions(opts.institutions_path, registry);
    DyadMatrix m = intra_city_matrix(corpus, opts.intra_city, institutions,
                                     have_partition ? &partition : nullptr, &registry, copts);
    csv::Writer w;
    write_dyad_matrix(w, m);
    detail::write_artifact(opts.out, hb, w.str());
    return;
  }

  auto regime = regime_from_string(opts.regime);
  if (!regime || (*regime != Regime::integer && *regime != Regime::fractional))
    throw ConfigError({"collab: regime must be integer or fractional"});
  DyadMatrix m = dyad_matrix(corpus, have_partition ? &partition : nullptr, *regime,
                             opts.include_diagonal, copts);
  csv::Writer w;
  write_dyad_matrix(w, m);
  detail::write_artifact(opts.out, hb, w.str());
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportOpts {
  std::string kind = "ranked";  // ranked | summary
  std::string corpus_path;
  std::string partition_path;
  std::string gazetteer_path;  // ranked: settlement types
  std::string metro;           // ranked
  int top_n = 25;
  std::string basis = "distinct_locality";
  std::string regimes = "integer_sum,dedup,fractional";  // summary columns
  std::string years;
  double unresolved_tolerance = 0.0;
  std::string format = "csv";  // csv | text
  std::string out;
  unsigned threads = 1;
};

inline void run_report(const ReportOpts& opts) {
  std::vector<std::string> violations;
  if (opts.corpus_path.empty()) violations.push_back("report: --corpus is required");
  if (opts.partition_path.empty()) violations.push_back("report: --partition is required");
  if (opts.out.empty()) violations.push_back("report: --out is required");
  if (opts.kind != "ranked" && opts.kind != "summary")
    violations.push_back("report: kind must be ranked or summary");
  if (opts.kind == "ranked") {
    if (opts.metro.empty()) violations.push_back("report: ranked needs --metro");
    if (opts.gazetteer_path.empty()) violations.push_back("report: ranked needs --gazetteer");
  }
  if (opts.format != "csv" && opts.format != "text")
    violations.push_back("report: format must be csv or text");
  for (const std::string& p : {opts.corpus_path, opts.partition_path, opts.gazetteer_path})
    if (!p.empty() && !std::filesystem::exists(p))
      violations.push_back("report: input does not exist: " + p);
  if (!violations.empty()) throw ConfigError(violations);

  Corpus corpus = ingest(opts.corpus_path, CorpusFormat::jsonl, opts.threads);
  if (corpus.empty()) throw EmptyCorpusError("empty corpus: " + opts.corpus_path);
  Partition partition = load_partition(opts.partition_path);

  CountingOptions copts;
  copts.year_filter = parse_year_range(opts.years);
  copts.unresolved_tolerance = opts.unresolved_tolerance;
  copts.threads = opts.threads;

  auto basis = basis_from_string(opts.basis);
  if (!basis) throw ConfigError({"report: unknown basis '" + opts.basis + "'"});

  std::vector<std::string> inputs = {opts.corpus_path, opts.partition_path};
  if (!opts.gazetteer_path.empty()) inputs.push_back(opts.gazetteer_path);
  auto hb = detail::standard_header("report",
                                    {{"kind", opts.kind},
                                     {"corpus", opts.corpus_path},
                                     {"partition", opts.partition_path},
                                     {"metro", opts.metro},
                                     {"top_n", std::to_string(opts.top_n)},
                                     {"basis", opts.basis},
                                     {"regimes", opts.regimes},
                                     {"years", opts.years},
                                     {"format", opts.format},
                                     {"out", opts.out}},
                                    inputs);

  CountReport integer = integer_count(corpus, copts);

  if (opts.kind == "ranked") {
    LocalityRegistry registry = load_gazetteer(opts.gazetteer_path);
    CountReport dedup = dedup_count(corpus, partition, copts);
    AttributionPolicy policy{*basis, &partition};
    CountReport fractional = fractional_count(corpus, policy, copts);
    RankedTable table =
        ranked_table(opts.metro, partition, registry, integer, dedup, fractional, opts.top_n);
    if (opts.format == "csv") {
      csv::Writer w;
      write_ranked_table_csv(w, table);
      detail::write_artifact(opts.out, hb, w.str());
    } else {
      detail::write_artifact(opts.out, hb, render_ranked_table_text(table));
    }
    return;
  }

  // summary over the requested regimes
  std::vector<CountReport> reports;
  for (std::string_view piece : text::split(opts.regimes, ',')) {
    std::string name(text::trim(piece));
    if (name.empty()) continue;
    auto regime = regime_from_string(name);
    if (!regime) throw ConfigError({"report: unknown regime '" + name + "'"});
    switch (*regime) {
      case Regime::integer_sum:
        reports.push_back(metro_integer_sum(integer, partition));
        break;
      case Regime::dedup:
        reports.push_back(dedup_count(corpus, partition, copts));
        break;
      case Regime::fractional: {
        AttributionPolicy policy{*basis, &partition};
        reports.push_back(fractional_count(corpus, policy, copts));
        break;
      }
      case Regime::integer:
        throw ConfigError(
            {"report summary: use integer_sum for metro-level integer columns"});
    }
  }
  std::vector<const CountReport*> ptrs;
  for (const auto& r : reports) ptrs.push_back(&r);
  RegimeSummary summary = regime_summary(ptrs);
  csv::Writer w;
  write_regime_summary_csv(w, summary, corpus_hash(corpus));
  detail::write_artifact(opts.out, hb, w.str());
}

// ---------------------------------------------------------------------------
// mismatch
// ---------------------------------------------------------------------------

struct MismatchOpts {
  std::string corpus_path;
  std::string gazetteer_path;
  std::string institutions_path;
  std::string years;
  std::string out;
  std::string unmatched_out;  // optional
  unsigned threads = 1;
};

inline MismatchReport run_mismatch(const MismatchOpts& opts) {
  std::vector<std::string> violations;
  if (opts.corpus_path.empty()) violations.push_back("mismatch: --corpus is required");
  if (opts.gazetteer_path.empty()) violations.push_back("mismatch: --gazetteer is required");
  if (opts.institutions_path.empty()) violations.push_back("mismatch: --institutions is required");
  if (opts.out.empty()) violations.push_back("mismatch: --out is required");
  for (const std::string& p : {opts.corpus_path, opts.gazetteer_path, opts.institutions_path})
    if (!p.empty() && !std::filesystem::exists(p))
      violations.push_back("mismatch: input does not exist: " + p);
  if (!violations.empty()) throw ConfigError(violations);

  Corpus corpus = ingest(opts.corpus_path, CorpusFormat::jsonl, opts.threads);
  if (corpus.empty()) throw EmptyCorpusError("empty corpus: " + opts.corpus_path);
  LocalityRegistry registry = load_gazetteer(opts.gazetteer_path);
  InstitutionRegistry institutions = load_institutions(opts.institutions_path, registry);

  CountingOptions copts;
  copts.year_filter = parse_year_range(opts.years);
  copts.threads = opts.threads;
  MismatchReport report = hq_mismatch(corpus, institutions, copts);

  auto hb = detail::standard_header("mismatch",
                                    {{"corpus", opts.corpus_path},
                                     {"gazetteer", opts.gazetteer_path},
                                     {"institutions", opts.institutions_path},
                                     {"years", opts.years},
                                     {"out", opts.out}},
                                    {opts.corpus_path, opts.gazetteer_path,
                                     opts.institutions_path});
  csv::Writer w;
  write_mismatch_report(w, report);
  detail::write_artifact(opts.out, hb, w.str());
  if (!opts.unmatched_out.empty()) {
    csv::Writer uw;
    uw.row({"institution_name", "papers"});
    for (const auto& [name, n] : report.unmatched) uw.row({name, std::to_string(n)});
    detail::write_artifact(opts.unmatched_out, hb, uw.str());
  }
  return report;
}

// ---------------------------------------------------------------------------
// fixture
// ---------------------------------------------------------------------------

struct FixtureOpts {
  std::string profile;
  uint64_t seed = 42;
  size_t papers = 10000;
  size_t localities = 500;
  std::string out_dir;
};

inline FixtureResult run_fixture(const FixtureOpts& opts) {
  std::vector<std::string> violations;
  if (opts.profile.empty()) violations.push_back("fixture: --profile is required");
  if (opts.out_dir.empty()) violations.push_back("fixture: --out-dir is required");
  if (!violations.empty()) throw ConfigError(violations);
  FixtureSpec spec;
  spec.profile = opts.profile;
  spec.seed = opts.seed;
  spec.papers = opts.papers;
  spec.localities = opts.localities;
  spec.out_dir = opts.out_dir;
  return generate_fixture(spec);
}

}  // namespace cityom::cmd
