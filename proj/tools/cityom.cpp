// cityom: batch toolkit for city- and metro-level publication indicators.
//
// Subcommands compose through files: ingest raw corpus files, resolve
// reported localities against a gazetteer, delineate metropolitan areas,
// then count, build collaboration matrices and render reports. `run`
// executes the whole pipeline from a declarative config file.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cityometrics/cityometrics.hpp"

namespace {

int fail_with_json(const std::string& type, const std::string& message,
                   const std::vector<std::string>& details = {}) {
  nlohmann::json err = {{"error", {{"type", type}, {"message", message}}}};
  if (!details.empty()) err["error"]["details"] = details;
  std::cerr << err.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"city-level scientometric indicators from publication records"};
  app.set_version_flag("--version", std::string(cityom::kToolStamp));
  app.require_subcommand(1);

  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (default: CITYOMETRICS_THREADS or hardware)");

  // ingest
  cityom::cmd::IngestOpts ingest_opts;
  auto* c_ingest = app.add_subcommand("ingest", "read corpus files into canonical JSONL");
  c_ingest->add_option("--in", ingest_opts.inputs, "input corpus file(s)")->required();
  c_ingest->add_option("--format", ingest_opts.format, "jsonl or csv");
  c_ingest->add_option("--out", ingest_opts.out, "canonical corpus JSONL")->required();
  c_ingest->add_option("--quarantine", ingest_opts.quarantine_out, "quarantine CSV");

  // resolve
  cityom::cmd::ResolveOpts resolve_opts;
  auto* c_resolve = app.add_subcommand("resolve", "resolve reported localities to gazetteer ids");
  c_resolve->add_option("--corpus", resolve_opts.corpus_path, "corpus JSONL")->required();
  c_resolve->add_option("--gazetteer", resolve_opts.gazetteer_path, "gazetteer CSV")->required();
  c_resolve->add_option("--aliases", resolve_opts.aliases_path, "alias CSV");
  c_resolve->add_option("--out", resolve_opts.out, "resolved corpus JSONL")->required();
  c_resolve->add_option("--quarantine", resolve_opts.quarantine_out, "unresolved CSV");

  // delineate
  cityom::cmd::DelineateOpts del_opts;
  double opt_distance_km = 0.0;
  long long opt_core_pop = 0;
  double opt_threshold_min = 0.0;
  auto* c_del = app.add_subcommand("delineate", "build a metropolitan-area partition");
  c_del->add_option("--gazetteer", del_opts.gazetteer_path, "gazetteer CSV")->required();
  c_del->add_option("--strategy", del_opts.strategy, "lookup, distance or travel_time")
      ->required();
  c_del->add_option("--memberships", del_opts.memberships_path, "membership CSV (lookup)");
  c_del->add_option("--tier", del_opts.tier, "MSA, CSA or custom (lookup)");
  auto* dk = c_del->add_option("--distance-km", opt_distance_km, "merge threshold (distance)");
  auto* cp = c_del->add_option("--core-population", opt_core_pop,
                               "minimum core settlement population (distance)");
  c_del->add_option("--base", del_opts.base_partition_path, "base partition CSV (travel_time)");
  c_del->add_option("--travel-times", del_opts.travel_times_path, "travel-time CSV");
  auto* tm = c_del->add_option("--threshold-minutes", opt_threshold_min,
                               "merge below this travel time (travel_time)");
  c_del->add_option("--out", del_opts.out, "partition CSV")->required();
  c_del->add_option("--skipped-edges", del_opts.skipped_out, "skipped travel edges CSV");
  c_del->add_option("--diff-against", del_opts.diff_against, "partition CSV to compare with");
  c_del->add_option("--diff-out", del_opts.diff_out, "diff report CSV");

  // count
  cityom::cmd::CountOpts count_opts;
  auto* c_count = app.add_subcommand("count", "publication credits per unit");
  c_count->add_option("--corpus", count_opts.corpus_path, "resolved corpus JSONL")->required();
  c_count->add_option("--partition", count_opts.partition_path, "partition CSV");
  c_count->add_option("--regime", count_opts.regime, "integer, dedup, fractional or integer_sum")
      ->required();
  c_count->add_option("--basis", count_opts.basis, "distinct_locality or address_instance");
  c_count->add_option("--years", count_opts.years, "year filter min:max");
  c_count->add_option("--unresolved-tolerance", count_opts.unresolved_tolerance,
                      "abort above this unresolved-entry ratio (default 0)");
  c_count->add_option("--out", count_opts.out, "report CSV")->required();

  // collab
  cityom::cmd::CollabOpts collab_opts;
  bool no_diagonal = false;
  auto* c_collab = app.add_subcommand("collab", "collaboration dyad matrices");
  c_collab->add_option("--corpus", collab_opts.corpus_path, "resolved corpus JSONL")->required();
  c_collab->add_option("--partition", collab_opts.partition_path, "partition CSV");
  c_collab->add_option("--regime", collab_opts.regime, "integer or fractional");
  c_collab->add_flag("--no-diagonal", no_diagonal, "drop intra-metro diagonal cells");
  c_collab->add_option("--expand", collab_opts.expand,
                       "metroA:metroB -> locality-level link expansion");
  c_collab->add_option("--intra-city", collab_opts.intra_city,
                       "locality or metro id -> institution matrix");
  c_collab->add_option("--institutions", collab_opts.institutions_path, "institution CSV");
  c_collab->add_option("--gazetteer", collab_opts.gazetteer_path, "gazetteer CSV");
  c_collab->add_option("--years", collab_opts.years, "year filter min:max");
  c_collab->add_option("--unresolved-tolerance", collab_opts.unresolved_tolerance,
                       "abort above this unresolved-entry ratio (default 0)");
  c_collab->add_option("--out", collab_opts.out, "edge-list CSV")->required();

  // report
  cityom::cmd::ReportOpts report_opts;
  auto* c_report = app.add_subcommand("report", "ranked settlement table / regime summary");
  c_report->add_option("kind", report_opts.kind, "ranked or summary")->required();
  c_report->add_option("--corpus", report_opts.corpus_path, "resolved corpus JSONL")->required();
  c_report->add_option("--partition", report_opts.partition_path, "partition CSV")->required();
  c_report->add_option("--gazetteer", report_opts.gazetteer_path, "gazetteer CSV (ranked)");
  c_report->add_option("--metro", report_opts.metro, "metro id (ranked)");
  c_report->add_option("--top-n", report_opts.top_n, "rows in the ranked table (default 25)");
  c_report->add_option("--basis", report_opts.basis, "fractional basis");
  c_report->add_option("--regimes", report_opts.regimes, "summary columns (comma list)");
  c_report->add_option("--years", report_opts.years, "year filter min:max");
  c_report->add_option("--unresolved-tolerance", report_opts.unresolved_tolerance,
                       "abort above this unresolved-entry ratio (default 0)");
  c_report->add_option("--format", report_opts.format, "csv or text");
  c_report->add_option("--out", report_opts.out, "output file")->required();

  // mismatch
  cityom::cmd::MismatchOpts mismatch_opts;
  auto* c_mismatch = app.add_subcommand("mismatch", "headquarters attribution audit");
  c_mismatch->add_option("--corpus", mismatch_opts.corpus_path, "resolved corpus JSONL")
      ->required();
  c_mismatch->add_option("--gazetteer", mismatch_opts.gazetteer_path, "gazetteer CSV")->required();
  c_mismatch->add_option("--institutions", mismatch_opts.institutions_path, "institution CSV")
      ->required();
  c_mismatch->add_option("--years", mismatch_opts.years, "year filter min:max");
  c_mismatch->add_option("--out", mismatch_opts.out, "mismatch CSV")->required();
  c_mismatch->add_option("--unmatched", mismatch_opts.unmatched_out,
                         "CSV of institution names missing from the registry");

  // fixture
  cityom::cmd::FixtureOpts fixture_opts;
  auto* c_fixture = app.add_subcommand("fixture", "generate synthetic corpora");
  c_fixture
      ->add_option("--profile", fixture_opts.profile,
                   "mini-ny, ibm, geneva, upton-berkeley or random")
      ->required();
  c_fixture->add_option("--seed", fixture_opts.seed, "RNG seed (default 42)");
  c_fixture->add_option("--papers", fixture_opts.papers, "record count (random profile)");
  c_fixture->add_option("--localities", fixture_opts.localities,
                        "gazetteer size (random profile)");
  c_fixture->add_option("--out-dir", fixture_opts.out_dir, "output directory")->required();

  // run
  std::string config_path;
  auto* c_run = app.add_subcommand("run", "execute a full pipeline from a config file");
  c_run->add_option("--config", config_path, "key=value run file")->required();

  CLI11_PARSE(app, argc, argv);

  unsigned n_threads = cityom::resolve_threads(threads);
  try {
    if (c_ingest->parsed()) {
      ingest_opts.threads = n_threads;
      cityom::cmd::run_ingest(ingest_opts);
    } else if (c_resolve->parsed()) {
      resolve_opts.threads = n_threads;
      cityom::cmd::run_resolve(resolve_opts);
    } else if (c_del->parsed()) {
      if (dk->count()) del_opts.distance_km = opt_distance_km;
      if (cp->count()) del_opts.core_population = opt_core_pop;
      if (tm->count()) del_opts.threshold_minutes = opt_threshold_min;
      cityom::cmd::run_delineate(del_opts);
    } else if (c_count->parsed()) {
      count_opts.threads = n_threads;
      cityom::cmd::run_count(count_opts);
    } else if (c_collab->parsed()) {
      collab_opts.include_diagonal = !no_diagonal;
      collab_opts.threads = n_threads;
      cityom::cmd::run_collab(collab_opts);
    } else if (c_report->parsed()) {
      report_opts.threads = n_threads;
      cityom::cmd::run_report(report_opts);
    } else if (c_mismatch->parsed()) {
      mismatch_opts.threads = n_threads;
      cityom::cmd::run_mismatch(mismatch_opts);
    } else if (c_fixture->parsed()) {
      cityom::cmd::run_fixture(fixture_opts);
    } else if (c_run->parsed()) {
      cityom::cmd::RunConfig cfg = cityom::cmd::parse_run_config(config_path);
      if (threads) cfg.threads = threads;
      cityom::cmd::run_pipeline(cfg);
    }
  } catch (const cityom::ConfigError& e) {
    return fail_with_json(e.kind(), "invalid configuration", e.violations());
  } catch (const cityom::Error& e) {
    return fail_with_json(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail_with_json("internal", e.what());
  }
  return 0;
}
