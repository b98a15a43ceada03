#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "cityometrics/gazetteer.hpp"

using namespace cityom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cityom_gaz_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    std::string p = (path / name).string();
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
  }
};

Locality make_loc(std::string id, std::string name, std::string admin, std::string country,
                  double lat = 0, double lon = 0) {
  Locality l;
  l.id = std::move(id);
  l.name = std::move(name);
  l.admin_name = std::move(admin);
  l.country = std::move(country);
  l.lat = lat;
  l.lon = lon;
  l.settlement_type = SettlementType::city;
  return l;
}

AffiliationEntry entry(std::string loc, std::string admin, std::string country) {
  AffiliationEntry e;
  e.locality_name = std::move(loc);
  e.admin_name = std::move(admin);
  e.country_name = std::move(country);
  return e;
}

}  // namespace

TEST_CASE("five-row gazetteer CSV loads to a registry of five") {
  TempDir dir;
  std::string csv =
      "id,name,alt_names,admin,country,lat,lon,population,settlement_type\n"
      "deb,Debrecen,,HB,Hungary,47.53,21.63,200000,city\n"
      "gen,Geneva,Genève|Genf,,Switzerland,46.2,6.15,200000,city\n"
      "sta,Stanford,,CA,USA,37.42,-122.17,14000,census_designated_place\n"
      "nyc,New York City,New York,NY,USA,40.71,-74.01,8400000,city\n"
      "ham,Armonk,,NY,USA,41.13,-73.71,,hamlet\n";
  LocalityRegistry reg = load_gazetteer(dir.file("g.csv", csv));
  CHECK(reg.size() == 5);
  REQUIRE(reg.find("ham"));
  CHECK_FALSE(reg.find("ham")->population.has_value());
  CHECK(reg.find("sta")->settlement_type == SettlementType::census_designated_place);
}

TEST_CASE("duplicate (name, admin, country) rejected with both rows") {
  TempDir dir;
  std::string csv =
      "id,name,alt_names,admin,country,lat,lon,population,settlement_type\n"
      "a,Springfield,,IL,USA,39.8,-89.6,110000,city\n"
      "b,Springfield,,IL,USA,39.9,-89.7,1000,town\n";
  try {
    load_gazetteer(dir.file("dup.csv", csv));
    FAIL("expected DuplicateKeyError");
  } catch (const DuplicateKeyError& e) {
    std::string msg = e.what();
    CHECK(msg.find("rows 2 and 3") != std::string::npos);
  }
}

TEST_CASE("membership rows referencing unknown localities abort with the row") {
  TempDir dir;
  std::string gaz =
      "id,name,alt_names,admin,country,lat,lon,population,settlement_type\n"
      "a,Alpha,,,X,0,0,,city\n";
  LocalityRegistry reg = load_gazetteer(dir.file("g.csv", gaz));
  std::string mem = "locality_id,metro_id,tier\nnope,m1,MSA\n";
  try {
    load_memberships(dir.file("m.csv", mem), reg);
    FAIL("expected DanglingReferenceError");
  } catch (const DanglingReferenceError& e) {
    CHECK(e.row() == 2);
  }
}

TEST_CASE("resolution: admin disambiguates two Rochesters") {
  LocalityRegistry reg;
  reg.add(make_loc("roch-ny", "Rochester", "NY", "USA"));
  reg.add(make_loc("roch-mn", "Rochester", "MN", "USA"));
  reg.finalize();
  auto r = reg.resolve(entry("Rochester", "NY", "USA"));
  CHECK(r.status == ResolveStatus::resolved);
  CHECK(r.locality_id == "roch-ny");
  // without admin the name is ambiguous, reported distinctly from not-found
  auto amb = reg.resolve(entry("Rochester", "", "USA"));
  CHECK(amb.status == ResolveStatus::ambiguous);
  auto missing = reg.resolve(entry("Nowhere", "", "USA"));
  CHECK(missing.status == ResolveStatus::not_found);
}

TEST_CASE("resolution is case- and diacritic-insensitive") {
  LocalityRegistry reg;
  reg.add(make_loc("deb", "Debrecen", "", "Hungary"));
  reg.finalize();
  CHECK(reg.resolve(entry("debrecen", "", "HUNGARY")).status == ResolveStatus::resolved);
  CHECK(reg.resolve(entry("DEBRECEN", "", "hungary")).locality_id == "deb");
}

TEST_CASE("three Springfields without admin stay ambiguous") {
  LocalityRegistry reg;
  reg.add(make_loc("s1", "Springfield", "IL", "USA"));
  reg.add(make_loc("s2", "Springfield", "MA", "USA"));
  reg.add(make_loc("s3", "Springfield", "MO", "USA"));
  reg.finalize();
  CHECK(reg.resolve(entry("Springfield", "", "USA")).status == ResolveStatus::ambiguous);
  CHECK(reg.resolve(entry("Springfield", "MA", "USA")).locality_id == "s2");
}

TEST_CASE("alt names resolve after primary names") {
  LocalityRegistry reg;
  Locality nyc = make_loc("nyc", "New York City", "NY", "USA");
  nyc.alt_names = {"New York", "NYC"};
  reg.add(nyc);
  reg.finalize();
  CHECK(reg.resolve(entry("NYC", "", "USA")).locality_id == "nyc");
  CHECK(reg.resolve(entry("new  york", "", "USA")).locality_id == "nyc");
}

TEST_CASE("alias table takes precedence and is the only correction channel") {
  LocalityRegistry reg;
  reg.add(make_loc("gen", "Geneva", "", "Switzerland"));
  reg.add(make_loc("mey", "Meyrin", "", "Switzerland"));
  reg.finalize();
  AliasTable aliases;
  aliases.add("Geneve area", "Switzerland", "gen");
  CHECK(reg.resolve(entry("Geneve area", "", "Switzerland"), &aliases).locality_id == "gen");
  // reported-name primacy: Geneva stays Geneva even though CERN sits in Meyrin
  CHECK(reg.resolve(entry("Geneva", "", "Switzerland"), &aliases).locality_id == "gen");
}

TEST_CASE("registry insertion order does not change resolution") {
  std::vector<Locality> rows = {
      make_loc("a", "Alpha", "X", "Land"), make_loc("b", "Beta", "", "Land"),
      make_loc("c", "Alpha", "Y", "Land"), make_loc("d", "Gamma", "", "Other")};
  std::mt19937_64 rng(3);
  auto resolve_all = [&](const std::vector<Locality>& order) {
    LocalityRegistry reg;
    for (const auto& l : order) reg.add(l);
    reg.finalize();
    std::vector<std::string> out;
    out.push_back(reg.resolve(entry("Alpha", "X", "Land")).locality_id);
    out.push_back(std::to_string(static_cast<int>(reg.resolve(entry("Alpha", "", "Land")).status)));
    out.push_back(reg.resolve(entry("Beta", "", "Land")).locality_id);
    return out;
  };
  auto baseline = resolve_all(rows);
  for (int i = 0; i < 8; ++i) {
    std::shuffle(rows.begin(), rows.end(), rng);
    CHECK(resolve_all(rows) == baseline);
  }
}

TEST_CASE("haversine distance: identity, one degree of arc, antipode") {
  Locality a = make_loc("a", "A", "", "X", 0.0, 0.0);
  CHECK(distance_km(a, a) == 0.0);

  Locality b = make_loc("b", "B", "", "X", 0.0, 1.0);
  // oracle: one equatorial degree = 2*pi*R/360 with R = 6371.0088
  CHECK(distance_km(a, b) == Catch::Approx(111.1950802335329).margin(0.001));

  Locality c = make_loc("c", "C", "", "X", 0.0, 180.0);
  // oracle: half circumference = pi*R
  CHECK(distance_km(a, c) == Catch::Approx(20015.114442035923).margin(0.01));
}

TEST_CASE("haversine is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-179.999, 180.0);
  for (int i = 0; i < 500; ++i) {
    Locality a = make_loc("a", "A", "", "X", lat(rng), lon(rng));
    Locality b = make_loc("b", "B", "", "X", lat(rng), lon(rng));
    Locality c = make_loc("c", "C", "", "X", lat(rng), lon(rng));
    double ab = distance_km(a, b), ba = distance_km(b, a);
    double bc = distance_km(b, c), ac = distance_km(a, c);
    REQUIRE(ab == ba);
    REQUIRE(ac <= ab + bc + 1e-6);
  }
}

TEST_CASE("travel-time loader rejects self-loops, duplicates, dangling ids") {
  TempDir dir;
  std::string gaz =
      "id,name,alt_names,admin,country,lat,lon,population,settlement_type\n"
      "edi,Edinburgh,,,UK,55.95,-3.19,500000,city\n"
      "gla,Glasgow,,,UK,55.86,-4.25,600000,city\n";
  LocalityRegistry reg = load_gazetteer(dir.file("g.csv", gaz));

  CHECK_THROWS_AS(
      load_travel_times(dir.file("t1.csv", "locality_a,locality_b,minutes\nedi,edi,10\n"), reg),
      SchemaError);
  CHECK_THROWS_AS(
      load_travel_times(
          dir.file("t2.csv", "locality_a,locality_b,minutes\nedi,gla,44\ngla,edi,44\n"), reg),
      DuplicateKeyError);
  CHECK_THROWS_AS(
      load_travel_times(dir.file("t3.csv", "locality_a,locality_b,minutes\nedi,xxx,44\n"), reg),
      DanglingReferenceError);
  auto edges =
      load_travel_times(dir.file("t4.csv", "locality_a,locality_b,minutes\nedi,gla,44\n"), reg);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].minutes == 44.0);
}

TEST_CASE("institution registry validates hq references and matches names") {
  TempDir dir;
  std::string gaz =
      "id,name,alt_names,admin,country,lat,lon,population,settlement_type\n"
      "arm,Armonk,,NY,USA,41.13,-73.71,4400,hamlet\n";
  LocalityRegistry reg = load_gazetteer(dir.file("g.csv", gaz));
  std::string inst = "id,name,alt_names,hq_locality_id\nibm,IBM,IBM Corp|IBM Research,arm\n";
  InstitutionRegistry ir = load_institutions(dir.file("i.csv", inst), reg);
  CHECK(ir.size() == 1);
  CHECK(ir.match("IBM")->id == "ibm");
  CHECK(ir.match("ibm research")->id == "ibm");
  CHECK(ir.match("Unknown Org") == nullptr);

  std::string bad = "id,name,alt_names,hq_locality_id\nx,X,,nowhere\n";
  CHECK_THROWS_AS(load_institutions(dir.file("b.csv", bad), reg), DanglingReferenceError);
}

TEST_CASE("latitude and longitude bounds are enforced with the row number") {
  TempDir dir;
  std::string bad =
      "id,name,alt_names,admin,country,lat,lon,population,settlement_type\n"
      "a,Alpha,,,X,91.0,0,,city\n";
  try {
    load_gazetteer(dir.file("bad.csv", bad));
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.row() == 2);
  }
}

TEST_CASE("resolve_corpus partitions entries into resolved and quarantined") {
  TempDir dir;
  std::string gaz =
      "id,name,alt_names,admin,country,lat,lon,population,settlement_type\n"
      "gen,Geneva,,,Switzerland,46.2,6.15,200000,city\n";
  LocalityRegistry reg = load_gazetteer(dir.file("g.csv", gaz));
  std::string corpus_body =
      "{\"id\":\"p1\",\"year\":2016,\"affiliations\":[{\"raw\":\"CERN, Geneva, Switzerland\"}]}\n"
      "{\"id\":\"p2\",\"year\":2016,\"affiliations\":[{\"raw\":\"U, Nowhere, Switzerland\"},"
      "{\"raw\":\"oops\"}]}\n";
  Corpus corpus = ingest(dir.file("c.jsonl", corpus_body), CorpusFormat::jsonl);
  size_t failed = resolve_corpus(corpus, reg);
  CHECK(failed == 1);
  // partition property: every entry is resolved or accounted for
  size_t resolved = 0;
  for (const auto& r : corpus.records)
    for (const auto& a : r.affiliations)
      if (!a.resolved_locality.empty()) ++resolved;
  CHECK(resolved == 1);
  REQUIRE(corpus.unresolved.size() == 2);  // one not_found + one parse failure
  CHECK(corpus.unresolved[0].reason == "resolve: not_found");   // affiliation[0]
  CHECK(corpus.unresolved[1].reason.substr(0, 6) == "parse:");  // affiliation[1]
  // re-running resolve does not duplicate quarantine entries
  resolve_corpus(corpus, reg);
  CHECK(corpus.unresolved.size() == 2);
}
