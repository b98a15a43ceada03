#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cityometrics/counting.hpp"

namespace cityom {

using UnitPair = std::pair<std::string, std::string>;  // canonical: first <= second

inline UnitPair make_pair_key(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

struct DyadMatrix {
  UnitKind unit_kind = UnitKind::locality;
  Regime regime = Regime::integer;
  bool include_diagonal = true;
  std::map<UnitPair, double> cells;
  int64_t paper_total = 0;
  std::string corpus_hash;

  double cell(const std::string& a, const std::string& b) const {
    auto it = cells.find(make_pair_key(a, b));
    return it == cells.end() ? 0.0 : it->second;
  }
};

namespace detail {

struct DyadPartial {
  std::map<UnitPair, int64_t> ints;
  std::map<UnitPair, FractionalTally> fracs;
  int64_t papers = 0;

  void merge(DyadPartial&& other) {
    for (auto& [k, v] : other.ints) ints[k] += v;
    for (auto& [k, t] : other.fracs) fracs[k].merge(t);
    papers += other.papers;
  }
};

}  // namespace detail

// Pairwise collaboration counts between units. Integer regime: +1 per
// unordered unit pair a paper spans; with include_diagonal and a metro
// partition, +1 on a metro's diagonal when a paper joins two or more of
// its member localities. Fractional regime: each of the C(|U|,2) pairs
// receives 1/C(|U|,2), so every collaborative paper carries total link
// weight 1 (no diagonal cells).
inline DyadMatrix dyad_matrix(const Corpus& corpus, const Partition* partition, Regime regime,
                              bool include_diagonal = true, const CountingOptions& opts = {}) {
  if (regime != Regime::integer && regime != Regime::fractional)
    throw ConfigError({"dyad_matrix supports regimes integer and fractional"});
  auto picked = detail::filtered_records(corpus, opts.year_filter);
  detail::check_unresolved(corpus, picked, opts.unresolved_tolerance);

  auto partial = chunked_fold<detail::DyadPartial>(
      picked.size(), opts.chunk_size, opts.threads,
      [&](size_t begin, size_t end) {
        detail::DyadPartial p;
        for (size_t i = begin; i < end; ++i) {
          const auto& rec = corpus.records[picked[i]];
          auto locs = detail::distinct_localities(rec);
          if (locs.empty()) continue;
          ++p.papers;
          auto units = detail::distinct_units(locs, partition);
          size_t k = units.size();
          if (regime == Regime::integer) {
            for (size_t a = 0; a < k; ++a)
              for (size_t b = a + 1; b < k; ++b) ++p.ints[{units[a], units[b]}];
            if (include_diagonal && partition) {
              // metros where the paper joins >= 2 distinct member localities
              std::map<std::string, int> per_unit;
              for (const std::string* l : locs) ++per_unit[*partition->unit_of(*l)];
              for (const auto& [unit, n] : per_unit)
                if (n >= 2) ++p.ints[{unit, unit}];
            }
          } else if (k >= 2) {
            uint32_t denom = static_cast<uint32_t>(k * (k - 1) / 2);
            for (size_t a = 0; a < k; ++a)
              for (size_t b = a + 1; b < k; ++b) p.fracs[{units[a], units[b]}].add(denom);
          }
        }
        return p;
      },
      [](detail::DyadPartial& acc, detail::DyadPartial&& next) { acc.merge(std::move(next)); });

  DyadMatrix m;
  m.unit_kind = partition ? UnitKind::metro : UnitKind::locality;
  m.regime = regime;
  m.include_diagonal = include_diagonal && regime == Regime::integer;
  m.paper_total = partial.papers;
  m.corpus_hash = corpus_hash(corpus);
  if (regime == Regime::integer)
    for (const auto& [k, v] : partial.ints) m.cells[k] = static_cast<double>(v);
  else
    for (const auto& [k, t] : partial.fracs) m.cells[k] = t.value();
  return m;
}

struct LinkExpansion {
  UnitPair metro_pair;
  std::map<UnitPair, int64_t> locality_links;
  int64_t metro_cell = 0;          // papers joining the two metros (dedup-lifted)
  int64_t multi_link_papers = 0;   // papers contributing more than one link
  std::string corpus_hash;

  int64_t link_total() const {
    int64_t t = 0;
    for (const auto& [k, v] : locality_links) t += v;
    return t;
  }
};

// Unfold one metro dyad cell into the locality-level links behind it.
// The link total equals the metro cell exactly when every contributing
// paper touches one locality per metro; otherwise multi_link_papers says
// how many papers break the equality.
inline LinkExpansion expand_links(const Corpus& corpus, const Partition& partition,
                                  const std::string& metro_a, const std::string& metro_b,
                                  const CountingOptions& opts = {}) {
  auto find_members = [&](const std::string& id) -> std::set<std::string> {
    if (const MetroArea* m = partition.metro(id))
      return std::set<std::string>(m->members.begin(), m->members.end());
    for (const auto& s : partition.singletons)
      if (s == id) return {s};
    throw UnknownMetroError("unknown metro '" + id + "'");
  };
  std::set<std::string> members_a = find_members(metro_a);
  std::set<std::string> members_b = find_members(metro_b);

  auto picked = detail::filtered_records(corpus, opts.year_filter);
  detail::check_unresolved(corpus, picked, opts.unresolved_tolerance);

  LinkExpansion out;
  out.metro_pair = make_pair_key(metro_a, metro_b);
  out.corpus_hash = corpus_hash(corpus);
  bool diagonal = metro_a == metro_b;

  for (size_t idx : picked) {
    auto locs = detail::distinct_localities(corpus.records[idx]);
    if (diagonal) {
      std::vector<std::string> in_m;
      for (const std::string* l : locs)
        if (members_a.count(*l)) in_m.push_back(*l);
      if (in_m.size() < 2) continue;
      ++out.metro_cell;
      int64_t links = 0;
      for (size_t a = 0; a < in_m.size(); ++a)
        for (size_t b = a + 1; b < in_m.size(); ++b) {
          ++out.locality_links[make_pair_key(in_m[a], in_m[b])];
          ++links;
        }
      if (links > 1) ++out.multi_link_papers;
    } else {
      std::vector<std::string> in_a, in_b;
      for (const std::string* l : locs) {
        if (members_a.count(*l)) in_a.push_back(*l);
        if (members_b.count(*l)) in_b.push_back(*l);
      }
      if (in_a.empty() || in_b.empty()) continue;
      ++out.metro_cell;
      for (const auto& a : in_a)
        for (const auto& b : in_b) ++out.locality_links[make_pair_key(a, b)];
      if (in_a.size() * in_b.size() > 1) ++out.multi_link_papers;
    }
  }
  return out;
}

// Institution-by-institution collaboration within one city (a locality or
// a metro of the given partition). The emitted triangle covers every
// registry institution headquartered in the city, zero cells included.
inline DyadMatrix intra_city_matrix(const Corpus& corpus, const std::string& city,
                                    const InstitutionRegistry& institutions,
                                    const Partition* partition = nullptr,
                                    const LocalityRegistry* registry = nullptr,
                                    const CountingOptions& opts = {}) {
  std::set<std::string> city_localities;
  if (registry && registry->find(city)) {
    city_localities.insert(city);
  } else if (partition) {
    if (const MetroArea* m = partition->metro(city))
      city_localities.insert(m->members.begin(), m->members.end());
  }
  if (city_localities.empty() && !registry && !partition) city_localities.insert(city);
  if (city_localities.empty())
    throw UnknownUnitError("'" + city + "' is neither a known locality nor a metro");

  // all institutions headquartered in the city
  std::vector<std::string> city_insts;
  for (const auto& inst : institutions.all())
    if (city_localities.count(inst.hq_locality)) city_insts.push_back(inst.id);
  std::sort(city_insts.begin(), city_insts.end());

  DyadMatrix m;
  m.unit_kind = UnitKind::institution;
  m.regime = Regime::integer;
  m.include_diagonal = false;
  m.corpus_hash = corpus_hash(corpus);
  for (size_t a = 0; a < city_insts.size(); ++a)
    for (size_t b = a + 1; b < city_insts.size(); ++b)
      m.cells[{city_insts[a], city_insts[b]}] = 0.0;

  std::set<std::string> city_inst_set(city_insts.begin(), city_insts.end());
  auto picked = detail::filtered_records(corpus, opts.year_filter);
  for (size_t idx : picked) {
    const auto& rec = corpus.records[idx];
    bool in_city = false;
    for (const auto& a : rec.affiliations)
      if (!a.resolved_locality.empty() && city_localities.count(a.resolved_locality)) {
        in_city = true;
        break;
      }
    if (!in_city) continue;
    ++m.paper_total;
    std::set<std::string> mentioned;
    for (const auto& a : rec.affiliations) {
      if (a.institution.empty()) continue;
      if (const Institution* inst = institutions.match(a.institution))
        if (city_inst_set.count(inst->id)) mentioned.insert(inst->id);
    }
    std::vector<std::string> v(mentioned.begin(), mentioned.end());
    for (size_t a = 0; a < v.size(); ++a)
      for (size_t b = a + 1; b < v.size(); ++b) m.cells[{v[a], v[b]}] += 1.0;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Edge-list CSV: unit_a,unit_b,weight,regime (canonical pair order)
// ---------------------------------------------------------------------------

inline void write_dyad_matrix(csv::Writer& w, const DyadMatrix& m) {
  w.comment("corpus_hash", m.corpus_hash);
  w.comment("unit_kind", to_string(m.unit_kind));
  w.comment("regime", to_string(m.regime));
  w.comment("include_diagonal", m.include_diagonal ? "true" : "false");
  w.comment("paper_total", std::to_string(m.paper_total));
  w.row({"unit_a", "unit_b", "weight", "regime"});
  for (const auto& [pair, weight] : m.cells)
    w.row({pair.first, pair.second, format_double(weight), to_string(m.regime)});
}

inline void write_link_expansion(csv::Writer& w, const LinkExpansion& e) {
  w.comment("corpus_hash", e.corpus_hash);
  w.comment("metro_pair", e.metro_pair.first + "|" + e.metro_pair.second);
  w.comment("metro_cell", std::to_string(e.metro_cell));
  w.comment("link_total", std::to_string(e.link_total()));
  w.comment("multi_locality_papers", std::to_string(e.multi_link_papers));
  w.row({"locality_a", "locality_b", "joint_papers"});
  for (const auto& [pair, n] : e.locality_links)
    w.row({pair.first, pair.second, std::to_string(n)});
}

}  // namespace cityom
