#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cityometrics/corpus.hpp"
#include "cityometrics/csv.hpp"
#include "cityometrics/io.hpp"
#include "cityometrics/version.hpp"

namespace cityom {

// Synthetic corpora for tests, benchmarks and demos. Engineered profiles
// (mini-ny, ibm, geneva, upton-berkeley) produce fixed aggregate numbers
// for any seed; the seed only permutes record ids and file order. The
// random profile is fully seed-driven.
struct FixtureSpec {
  std::string profile;
  uint64_t seed = 42;
  size_t papers = 10000;      // random profile
  size_t localities = 500;    // random profile
  std::string out_dir;
};

struct FixtureResult {
  std::vector<std::string> files;
  nlohmann::json expected;
};

namespace fixture_detail {

inline std::string two_digits(size_t n) {
  std::string s = std::to_string(n);
  return s.size() < 2 ? "0" + s : s;
}

// Digit-free pronounceable locality names, unique by construction.
inline std::string synth_name(size_t i) {
  static const char* pre[] = {"Al",  "Bar", "Cos", "Dren", "El",   "Fen",  "Gor", "Hale",
                              "Iv",  "Jor", "Kel", "Lund", "Mar",  "Nor",  "Os",  "Pell",
                              "Quin", "Ros", "Sel", "Tor", "Ul",   "Ver",  "Wes", "Xan",
                              "Yor", "Zel", "Bren", "Cald", "Dor", "East", "Falk", "Gren"};
  static const char* mid[] = {"a", "be", "ca", "do", "e", "fi", "ga", "ho",
                              "i", "ku", "la", "mo", "ne", "o", "pa", "ri"};
  static const char* suf[] = {"berg", "field", "ton", "ville", "stad", "minster", "ford", "haven",
                              "wick", "mouth", "bridge", "holm", "gate", "crest", "dale", "port",
                              "burgh", "shore", "mead", "brook", "cliff", "hurst", "moor", "side",
                              "march", "fell", "worth", "den", "leigh", "stow", "combe", "wold"};
  constexpr size_t np = sizeof(pre) / sizeof(pre[0]);
  constexpr size_t nm = sizeof(mid) / sizeof(mid[0]);
  constexpr size_t ns = sizeof(suf) / sizeof(suf[0]);
  size_t a = i % np;
  size_t b = (i / np) % nm;
  size_t c = (i / (np * nm)) % ns;
  size_t rep = i / (np * nm * ns);
  std::string name = std::string(pre[a]) + mid[b] + suf[c];
  for (size_t k = 0; k < rep; ++k) name += " Nova";
  return name;
}

struct GazRow {
  std::string id, name, alt, admin, country, settlement;
  double lat = 0, lon = 0;
  int64_t population = 0;
};

inline std::string gazetteer_csv(const std::vector<GazRow>& rows, const std::string& profile,
                                 uint64_t seed) {
  csv::Writer w;
  w.comment("tool", kToolStamp);
  w.comment("fixture_profile", profile);
  w.comment("seed", std::to_string(seed));
  w.row({"id", "name", "alt_names", "admin", "country", "lat", "lon", "population",
         "settlement_type"});
  for (const auto& r : rows)
    w.row({r.id, r.name, r.alt, r.admin, r.country, format_double(r.lat), format_double(r.lon),
           std::to_string(r.population), r.settlement});
  return w.str();
}

struct Paper {
  std::vector<std::string> raws;
};

inline std::string corpus_jsonl(std::vector<Paper>& papers, const std::string& id_prefix,
                                int year, std::mt19937_64& rng, const std::string& profile,
                                uint64_t seed) {
  std::shuffle(papers.begin(), papers.end(), rng);
  std::string out;
  out += std::string("# tool=") + kToolStamp + "\n";
  out += "# fixture_profile=" + profile + "\n";
  out += "# seed=" + std::to_string(seed) + "\n";
  char idbuf[32];
  for (size_t i = 0; i < papers.size(); ++i) {
    std::snprintf(idbuf, sizeof(idbuf), "%s%07zu", id_prefix.c_str(), i + 1);
    out += "{\"id\":\"";
    out += idbuf;
    out += "\",\"year\":";
    out += std::to_string(year);
    out += ",\"affiliations\":[";
    for (size_t k = 0; k < papers[i].raws.size(); ++k) {
      if (k) out.push_back(',');
      out += "{\"raw\":\"";
      jsonmin::escape_to(out, papers[i].raws[k]);
      out += "\"}";
    }
    out += "]}\n";
  }
  return out;
}

}  // namespace fixture_detail

inline FixtureResult generate_fixture(const FixtureSpec& spec);

namespace fixture_detail {

// 30-locality metro with integer_sum 100 vs dedup 92: 84 single-locality
// papers plus 8 papers each spanning two member localities.
inline FixtureResult make_mini_ny(const FixtureSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  FixtureResult out;

  std::vector<GazRow> gaz;
  static const char* kinds[] = {"city", "town", "borough", "township"};
  for (size_t i = 1; i <= 30; ++i) {
    GazRow r;
    r.id = "ny-" + two_digits(i);
    r.name = synth_name(i * 7 + 3);
    r.admin = "NY";
    r.country = "USA";
    r.settlement = kinds[i % 4];
    r.lat = 40.5 + 0.01 * static_cast<double>(i);
    r.lon = -74.2 + 0.012 * static_cast<double>(i);
    r.population = 1000000 / static_cast<int64_t>(i);
    gaz.push_back(r);
  }

  csv::Writer mem;
  mem.comment("fixture_profile", spec.profile);
  mem.row({"locality_id", "metro_id", "tier"});
  for (size_t i = 1; i <= 30; ++i) mem.row({"ny-" + two_digits(i), "new-york-csa", "CSA"});
  for (size_t i = 1; i <= 20; ++i) mem.row({"ny-" + two_digits(i), "new-york-msa", "MSA"});

  // engineered integer credits per locality index (1-based); 25 localities
  // carry credit, 5 are quiet members
  auto raw_for = [&](size_t i) {
    return "Institute of " + gaz[i - 1].name + ", " + gaz[i - 1].name + ", NY, USA";
  };
  std::vector<Paper> papers;
  auto single = [&](size_t i, int n) {
    for (int k = 0; k < n; ++k) papers.push_back({{raw_for(i)}});
  };
  auto cross = [&](size_t i, size_t j, int n) {
    for (int k = 0; k < n; ++k) papers.push_back({{raw_for(i), raw_for(j)}});
  };
  single(1, 14);
  single(2, 7);
  single(3, 7);
  single(4, 5);
  single(5, 5);
  for (size_t i = 6; i <= 11; ++i) single(i, 3);
  for (size_t i = 12; i <= 25; ++i) single(i, 2);
  cross(1, 2, 4);
  cross(1, 3, 2);
  cross(2, 3, 1);
  cross(4, 5, 1);

  nlohmann::json credits = nlohmann::json::object();
  auto credit_of = [](size_t i) -> int {
    if (i == 1) return 20;
    if (i == 2) return 12;
    if (i == 3) return 10;
    if (i == 4 || i == 5) return 6;
    if (i <= 11) return 3;
    if (i <= 25) return 2;
    return 0;
  };
  for (size_t i = 1; i <= 30; ++i) credits["ny-" + two_digits(i)] = credit_of(i);

  out.expected = {{"profile", "mini-ny"},
                  {"metro", "new-york-csa"},
                  {"papers", 92},
                  {"integer_sum", 100},
                  {"dedup", 92},
                  {"fractional", 92.0},
                  {"dedup_over_integer_pct", "92.0"},
                  {"integer_credits", credits}};

  io::write_file_atomic(spec.out_dir + "/gazetteer.csv",
                        gazetteer_csv(gaz, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/memberships.csv", mem.str());
  io::write_file_atomic(spec.out_dir + "/corpus.jsonl",
                        corpus_jsonl(papers, "ny-paper-", 2016, rng, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/expected.json", out.expected.dump(2) + "\n");
  out.files = {spec.out_dir + "/gazetteer.csv", spec.out_dir + "/memberships.csv",
               spec.out_dir + "/corpus.jsonl", spec.out_dir + "/expected.json"};
  return out;
}

// Headquarters-mismatch fixture: 876 papers mention the corporation, 30
// of them from the HQ locality.
inline FixtureResult make_ibm(const FixtureSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  FixtureResult out;

  std::vector<GazRow> gaz = {
      {"armonk", "Armonk", "", "NY", "USA", "hamlet", 41.13, -73.71, 4400},
      {"san-jose", "San Jose", "", "CA", "USA", "city", 37.34, -121.89, 1030000},
      {"san-diego", "San Diego", "", "CA", "USA", "city", 32.72, -117.16, 1420000},
      {"yorktown-heights", "Yorktown Heights", "", "NY", "USA", "hamlet", 41.27, -73.78, 1700},
      {"albany", "Albany", "", "NY", "USA", "city", 42.65, -73.75, 99000},
      {"zurich", "Zurich", "Zürich", "", "Switzerland", "city", 47.37, 8.54, 430000},
  };

  csv::Writer inst;
  inst.comment("fixture_profile", spec.profile);
  inst.row({"id", "name", "alt_names", "hq_locality_id"});
  inst.row({"ibm", "IBM", "IBM Corp|IBM Research", "armonk"});
  inst.row({"hometown-university", "Hometown University", "", "albany"});

  std::vector<Paper> papers;
  for (int k = 0; k < 30; ++k) papers.push_back({{"IBM, Armonk, NY, USA"}});
  const char* sites[] = {"IBM, San Jose, CA, USA", "IBM, San Diego, CA, USA",
                         "IBM Research, Yorktown Heights, NY, USA", "IBM, Zurich, Switzerland"};
  for (int k = 0; k < 846; ++k) papers.push_back({{sites[k % 4]}});
  for (int k = 0; k < 50; ++k) papers.push_back({{"Hometown University, Albany, NY, USA"}});

  out.expected = {{"profile", "ibm"},      {"papers", 926},      {"ibm_total", 876},
                  {"ibm_at_hq", 30},       {"ibm_share_pct", "3.4"},
                  {"hometown_total", 50},  {"hometown_share_pct", "100.0"}};

  io::write_file_atomic(spec.out_dir + "/gazetteer.csv",
                        gazetteer_csv(gaz, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/institutions.csv", inst.str());
  io::write_file_atomic(spec.out_dir + "/corpus.jsonl",
                        corpus_jsonl(papers, "ibm-paper-", 2016, rng, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/expected.json", out.expected.dump(2) + "\n");
  out.files = {spec.out_dir + "/gazetteer.csv", spec.out_dir + "/institutions.csv",
               spec.out_dir + "/corpus.jsonl", spec.out_dir + "/expected.json"};
  return out;
}

// Intra-city collaboration fixture: three institutions in one city with
// joint-paper counts 340 / 45 / 0.
inline FixtureResult make_geneva(const FixtureSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  FixtureResult out;

  std::vector<GazRow> gaz = {
      {"geneva", "Geneva", "Genève|Genf", "", "Switzerland", "city", 46.2, 6.15, 200000},
      {"meyrin", "Meyrin", "", "", "Switzerland", "town", 46.23, 6.08, 26000},
      {"lausanne", "Lausanne", "", "", "Switzerland", "city", 46.52, 6.63, 140000},
  };

  csv::Writer inst;
  inst.comment("fixture_profile", spec.profile);
  inst.row({"id", "name", "alt_names", "hq_locality_id"});
  inst.row({"cern", "CERN", "European Organization for Nuclear Research", "geneva"});
  inst.row({"univ-geneva", "University of Geneva", "Universite de Geneve", "geneva"});
  inst.row({"who", "World Health Organization", "WHO", "geneva"});

  const std::string cern = "CERN, Geneva, Switzerland";
  const std::string ug = "University of Geneva, Geneva, Switzerland";
  const std::string who = "World Health Organization, Geneva, Switzerland";
  std::vector<Paper> papers;
  for (int k = 0; k < 876; ++k) papers.push_back({{cern}});
  for (int k = 0; k < 4021; ++k) papers.push_back({{ug}});
  for (int k = 0; k < 959; ++k) papers.push_back({{who}});
  for (int k = 0; k < 340; ++k) papers.push_back({{cern, ug}});
  for (int k = 0; k < 45; ++k) papers.push_back({{ug, who}});

  out.expected = {{"profile", "geneva"},   {"papers", 6241},   {"cern_ug", 340},
                  {"ug_who", 45},          {"cern_who", 0},    {"cern_total", 1216},
                  {"ug_total", 4406},      {"who_total", 1004}};

  io::write_file_atomic(spec.out_dir + "/gazetteer.csv",
                        gazetteer_csv(gaz, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/institutions.csv", inst.str());
  io::write_file_atomic(spec.out_dir + "/corpus.jsonl",
                        corpus_jsonl(papers, "gva-paper-", 2016, rng, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/expected.json", out.expected.dump(2) + "\n");
  out.files = {spec.out_dir + "/gazetteer.csv", spec.out_dir + "/institutions.csv",
               spec.out_dir + "/corpus.jsonl", spec.out_dir + "/expected.json"};
  return out;
}

// Metro-dyad fixture: two CSAs whose only joint papers run between one
// locality on each side.
inline FixtureResult make_upton_berkeley(const FixtureSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  FixtureResult out;

  std::vector<GazRow> gaz = {
      {"upton", "Upton", "", "NY", "USA", "hamlet", 40.87, -72.88, 2100},
      {"new-york-city", "New York City", "New York", "NY", "USA", "city", 40.71, -74.01, 8400000},
      {"berkeley", "Berkeley", "", "CA", "USA", "city", 37.87, -122.27, 121000},
      {"san-francisco", "San Francisco", "", "CA", "USA", "city", 37.77, -122.42, 870000},
  };

  csv::Writer mem;
  mem.comment("fixture_profile", spec.profile);
  mem.row({"locality_id", "metro_id", "tier"});
  mem.row({"upton", "new-york-csa", "CSA"});
  mem.row({"new-york-city", "new-york-csa", "CSA"});
  mem.row({"berkeley", "sf-bay-csa", "CSA"});
  mem.row({"san-francisco", "sf-bay-csa", "CSA"});

  const std::string upton = "Brookhaven National Laboratory, Upton, NY, USA";
  const std::string berkeley = "University of California Berkeley, Berkeley, CA, USA";
  std::vector<Paper> papers;
  for (int k = 0; k < 1107; ++k) papers.push_back({{upton}});
  for (int k = 0; k < 9536; ++k) papers.push_back({{berkeley}});
  for (int k = 0; k < 228; ++k) papers.push_back({{upton, berkeley}});

  out.expected = {{"profile", "upton-berkeley"}, {"papers", 10871},     {"joint", 228},
                  {"upton_total", 1335},         {"berkeley_total", 9764},
                  {"metro_a", "new-york-csa"},   {"metro_b", "sf-bay-csa"}};

  io::write_file_atomic(spec.out_dir + "/gazetteer.csv",
                        gazetteer_csv(gaz, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/memberships.csv", mem.str());
  io::write_file_atomic(spec.out_dir + "/corpus.jsonl",
                        corpus_jsonl(papers, "ub-paper-", 2016, rng, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/expected.json", out.expected.dump(2) + "\n");
  out.files = {spec.out_dir + "/gazetteer.csv", spec.out_dir + "/memberships.csv",
               spec.out_dir + "/corpus.jsonl", spec.out_dir + "/expected.json"};
  return out;
}

// Seed-driven corpus over a clustered synthetic gazetteer; used by the
// property suites and the throughput benchmark.
inline FixtureResult make_random(const FixtureSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  FixtureResult out;

  static const char* countries[] = {"USA", "Hungary", "Switzerland", "Germany",
                                    "Japan", "China", "France", "United Kingdom"};
  static const char* us_states[] = {"NY", "CA", "TX", "MA", "IL", "WA"};
  constexpr size_t n_countries = sizeof(countries) / sizeof(countries[0]);

  size_t n_loc = std::max<size_t>(spec.localities, 2);
  size_t n_metros = std::max<size_t>(1, n_loc / 8);

  std::uniform_real_distribution<double> center_lat(-55.0, 55.0);
  std::uniform_real_distribution<double> center_lon(-170.0, 170.0);
  std::uniform_real_distribution<double> jitter(-0.12, 0.12);
  std::uniform_int_distribution<int64_t> pop(1000, 5000000);

  std::vector<std::pair<double, double>> centers;
  centers.reserve(n_metros);
  for (size_t m = 0; m < n_metros; ++m) centers.emplace_back(center_lat(rng), center_lon(rng));

  char idbuf[32];
  std::vector<GazRow> gaz;
  csv::Writer mem;
  mem.comment("fixture_profile", spec.profile);
  mem.row({"locality_id", "metro_id", "tier"});
  static const char* kinds[] = {"city", "town", "borough", "township", "village",
                                "hamlet", "census_designated_place", "district"};
  for (size_t i = 0; i < n_loc; ++i) {
    size_t metro = i * n_metros / n_loc;
    GazRow r;
    std::snprintf(idbuf, sizeof(idbuf), "loc-%05zu", i);
    r.id = idbuf;
    r.name = synth_name(i);
    r.country = countries[i % n_countries];
    if (r.country == std::string("USA")) r.admin = us_states[i % 6];
    r.settlement = kinds[i % 8];
    r.lat = centers[metro].first + jitter(rng);
    r.lon = centers[metro].second + jitter(rng);
    r.population = pop(rng);
    gaz.push_back(r);
    if (i % 10 != 7) {
      std::snprintf(idbuf, sizeof(idbuf), "metro-%04zu", metro);
      mem.row({r.id, idbuf, "custom"});
    }
  }

  std::uniform_int_distribution<size_t> n_affs(1, 6);
  std::uniform_int_distribution<size_t> any_loc(0, n_loc - 1);
  std::uniform_int_distribution<size_t> any_metro(0, n_metros - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> inst_no(1, 400);

  auto raw_for = [&](size_t loc_idx, int inst) {
    const GazRow& r = gaz[loc_idx];
    std::string raw = "Institute " + std::to_string(inst) + ", " + r.name;
    if (!r.admin.empty() && coin(rng) < 0.5) raw += ", " + r.admin;
    raw += ", " + r.country;
    return raw;
  };

  std::string corpus;
  corpus += std::string("# tool=") + kToolStamp + "\n";
  corpus += "# fixture_profile=random\n";
  corpus += "# seed=" + std::to_string(spec.seed) + "\n";
  corpus.reserve(corpus.size() + spec.papers * 120);
  for (size_t p = 0; p < spec.papers; ++p) {
    size_t k = n_affs(rng);
    bool intra_metro = coin(rng) < 0.5;
    size_t metro = any_metro(rng);
    size_t lo = metro * n_loc / n_metros;
    size_t hi = (metro + 1) * n_loc / n_metros;  // block of the metro
    std::uniform_int_distribution<size_t> in_metro(lo, hi - 1);

    std::snprintf(idbuf, sizeof(idbuf), "p-%07zu", p + 1);
    corpus += "{\"id\":\"";
    corpus += idbuf;
    corpus += "\",\"year\":";
    corpus += std::to_string(2010 + static_cast<int>(p % 9));
    corpus += ",\"affiliations\":[";
    for (size_t a = 0; a < k; ++a) {
      if (a) corpus.push_back(',');
      size_t loc = intra_metro ? in_metro(rng) : any_loc(rng);
      corpus += "{\"raw\":\"";
      jsonmin::escape_to(corpus, raw_for(loc, inst_no(rng)));
      corpus += "\"}";
    }
    corpus += "]}\n";
  }

  out.expected = {{"profile", "random"},
                  {"papers", spec.papers},
                  {"localities", n_loc},
                  {"metros", n_metros},
                  {"seed", spec.seed}};

  io::write_file_atomic(spec.out_dir + "/gazetteer.csv",
                        gazetteer_csv(gaz, spec.profile, spec.seed));
  io::write_file_atomic(spec.out_dir + "/memberships.csv", mem.str());
  io::write_file_atomic(spec.out_dir + "/corpus.jsonl", corpus);
  io::write_file_atomic(spec.out_dir + "/expected.json", out.expected.dump(2) + "\n");
  out.files = {spec.out_dir + "/gazetteer.csv", spec.out_dir + "/memberships.csv",
               spec.out_dir + "/corpus.jsonl", spec.out_dir + "/expected.json"};
  return out;
}

}  // namespace fixture_detail

inline FixtureResult generate_fixture(const FixtureSpec& spec) {
  if (spec.out_dir.empty()) throw ConfigError({"fixture: out_dir is required"});
  if (spec.profile == "mini-ny") return fixture_detail::make_mini_ny(spec);
  if (spec.profile == "ibm") return fixture_detail::make_ibm(spec);
  if (spec.profile == "geneva") return fixture_detail::make_geneva(spec);
  if (spec.profile == "upton-berkeley") return fixture_detail::make_upton_berkeley(spec);
  if (spec.profile == "random") return fixture_detail::make_random(spec);
  throw ConfigError({"unknown fixture profile '" + spec.profile +
                     "' (expected mini-ny, ibm, geneva, upton-berkeley or random)"});
}

}  // namespace cityom
