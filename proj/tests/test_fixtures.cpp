#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "cityometrics/cityometrics.hpp"

using namespace cityom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cityom_fix_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string dir() const { return path.string(); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

Corpus load_resolved(const std::string& dir, const LocalityRegistry& reg) {
  Corpus corpus = ingest(dir + "/corpus.jsonl", CorpusFormat::jsonl);
  resolve_corpus(corpus, reg);
  return corpus;
}

}  // namespace

TEST_CASE("mini-ny fixture: engineered 100 vs 92 over a 30-locality metro") {
  TempDir tmp;
  FixtureResult fx = generate_fixture({"mini-ny", 42, 0, 0, tmp.dir()});
  LocalityRegistry reg = load_gazetteer(tmp.sub("gazetteer.csv"));
  CHECK(reg.size() == 30);
  MembershipTable table = load_memberships(tmp.sub("memberships.csv"), reg);
  Corpus corpus = load_resolved(tmp.dir(), reg);
  CHECK(corpus.records.size() == 92);
  CHECK(corpus.unresolved.empty());

  Partition p = delineate_lookup(reg, table, Tier::CSA);
  p.validate(reg);
  REQUIRE(p.metros.size() == 1);
  CHECK(p.metros[0].members.size() == 30);

  CountReport integer = integer_count(corpus);
  CountReport sum = metro_integer_sum(integer, p);
  CountReport dedup = dedup_count(corpus, p);
  CountReport frac = fractional_count(corpus, {FractionalBasis::distinct_locality, &p});
  CHECK(sum.credit("new-york-csa") == 100.0);
  CHECK(dedup.credit("new-york-csa") == 92.0);
  CHECK(frac.credit("new-york-csa") == 92.0);

  // generator bookkeeping is the oracle for per-locality credits
  for (const auto& [loc, credit] : fx.expected["integer_credits"].items())
    CHECK(integer.credit(loc) == credit.get<double>());

  RankedTable t = ranked_table("new-york-csa", p, reg, integer, dedup, frac, 25);
  CHECK(format_percent(t.dedup_over_integer()) == "92.0");
  REQUIRE(t.rows.size() == 25);
  CHECK(t.rows[0].credit == 20.0);
}

TEST_CASE("mini-ny engineered numbers hold for any seed") {
  for (uint64_t seed : {1ull, 7ull, 999ull}) {
    TempDir tmp;
    generate_fixture({"mini-ny", seed, 0, 0, tmp.dir()});
    LocalityRegistry reg = load_gazetteer(tmp.sub("gazetteer.csv"));
    MembershipTable table = load_memberships(tmp.sub("memberships.csv"), reg);
    Corpus corpus = load_resolved(tmp.dir(), reg);
    Partition p = delineate_lookup(reg, table, Tier::CSA);
    CountReport sum = metro_integer_sum(integer_count(corpus), p);
    CountReport dedup = dedup_count(corpus, p);
    CHECK(sum.credit("new-york-csa") == 100.0);
    CHECK(dedup.credit("new-york-csa") == 92.0);
  }
}

TEST_CASE("ibm fixture: 876 papers, 30 at headquarters, 3.4 percent") {
  TempDir tmp;
  FixtureResult fx = generate_fixture({"ibm", 42, 0, 0, tmp.dir()});
  LocalityRegistry reg = load_gazetteer(tmp.sub("gazetteer.csv"));
  InstitutionRegistry insts = load_institutions(tmp.sub("institutions.csv"), reg);
  Corpus corpus = load_resolved(tmp.dir(), reg);
  CHECK(corpus.unresolved.empty());

  MismatchReport report = hq_mismatch(corpus, insts);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].institution_id == "ibm");  // ascending share: 3.4% first
  CHECK(report.rows[0].total == 876);
  CHECK(report.rows[0].at_hq == 30);
  CHECK(format_percent(report.rows[0].hq_share()) == "3.4");
  CHECK(report.rows[1].institution_id == "hometown-university");
  CHECK(format_percent(report.rows[1].hq_share()) == "100.0");
  CHECK(fx.expected["ibm_share_pct"] == "3.4");
}

TEST_CASE("geneva fixture: 340 / 45 / 0 institution triangle") {
  TempDir tmp;
  generate_fixture({"geneva", 42, 0, 0, tmp.dir()});
  LocalityRegistry reg = load_gazetteer(tmp.sub("gazetteer.csv"));
  InstitutionRegistry insts = load_institutions(tmp.sub("institutions.csv"), reg);
  Corpus corpus = load_resolved(tmp.dir(), reg);
  CHECK(corpus.records.size() == 6241);

  DyadMatrix m = intra_city_matrix(corpus, "geneva", insts, nullptr, &reg);
  CHECK(m.cell("cern", "univ-geneva") == 340.0);
  CHECK(m.cell("univ-geneva", "who") == 45.0);
  CHECK(m.cell("cern", "who") == 0.0);
  CHECK(m.cells.count(make_pair_key("cern", "who")) == 1);

  // per-institution totals match the documented reference values
  MismatchReport mm = hq_mismatch(corpus, insts);
  std::map<std::string, int64_t> totals;
  for (const auto& r : mm.rows) totals[r.institution_id] = r.total;
  CHECK(totals["cern"] == 1216);
  CHECK(totals["univ-geneva"] == 4406);
  CHECK(totals["who"] == 1004);
}

TEST_CASE("upton-berkeley fixture: 228 joint papers and one locality link") {
  TempDir tmp;
  generate_fixture({"upton-berkeley", 42, 0, 0, tmp.dir()});
  LocalityRegistry reg = load_gazetteer(tmp.sub("gazetteer.csv"));
  MembershipTable table = load_memberships(tmp.sub("memberships.csv"), reg);
  Corpus corpus = load_resolved(tmp.dir(), reg);
  Partition p = delineate_lookup(reg, table, Tier::CSA);

  DyadMatrix m = dyad_matrix(corpus, &p, Regime::integer);
  CHECK(m.cell("new-york-csa", "sf-bay-csa") == 228.0);

  LinkExpansion e = expand_links(corpus, p, "new-york-csa", "sf-bay-csa");
  REQUIRE(e.locality_links.size() == 1);
  CHECK(e.locality_links.at(make_pair_key("upton", "berkeley")) == 228);
  CHECK(e.link_total() == e.metro_cell);

  CountReport integer = integer_count(corpus);
  CHECK(integer.credit("upton") == 1335.0);
  CHECK(integer.credit("berkeley") == 9764.0);
}

TEST_CASE("random fixture: fully resolvable, seed-deterministic corpus") {
  TempDir a, b, c;
  generate_fixture({"random", 7, 800, 120, a.dir()});
  generate_fixture({"random", 7, 800, 120, b.dir()});
  generate_fixture({"random", 8, 800, 120, c.dir()});

  auto read = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(read(a.sub("corpus.jsonl")) == read(b.sub("corpus.jsonl")));
  CHECK(read(a.sub("gazetteer.csv")) == read(b.sub("gazetteer.csv")));
  CHECK(read(a.sub("corpus.jsonl")) != read(c.sub("corpus.jsonl")));

  LocalityRegistry reg = load_gazetteer(a.sub("gazetteer.csv"));
  CHECK(reg.size() == 120);
  Corpus corpus = ingest(a.sub("corpus.jsonl"), CorpusFormat::jsonl);
  CHECK(corpus.records.size() == 800);
  size_t failed = resolve_corpus(corpus, reg);
  CHECK(failed == 0);
  CHECK(corpus.quarantine.empty());

  MembershipTable table = load_memberships(a.sub("memberships.csv"), reg);
  Partition p = delineate_lookup(reg, table, Tier::custom);
  p.validate(reg);
  CHECK(!p.metros.empty());
  CHECK(!p.singletons.empty());  // ~10% stay outside the table

  // the partition supports all counting regimes end to end
  CountReport dedup = dedup_count(corpus, p);
  CHECK(dedup.paper_total == 800);
}

TEST_CASE("unknown profile lists the valid ones") {
  TempDir tmp;
  try {
    generate_fixture({"bogus", 42, 0, 0, tmp.dir()});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mini-ny") != std::string::npos);
  }
}
