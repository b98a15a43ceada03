#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cityometrics/errors.hpp"
#include "cityometrics/format.hpp"
#include "cityometrics/gazetteer.hpp"

namespace cityom {

enum class Strategy { lookup, distance, travel_time };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::lookup: return "lookup";
    case Strategy::distance: return "distance";
    case Strategy::travel_time: return "travel_time";
  }
  return "lookup";
}

inline std::optional<Strategy> strategy_from_string(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "lookup") return Strategy::lookup;
  if (v == "distance") return Strategy::distance;
  if (v == "travel_time" || v == "travel-time") return Strategy::travel_time;
  return std::nullopt;
}

struct MetroArea {
  std::string id;
  std::vector<std::string> members;  // sorted, non-empty
  Strategy strategy = Strategy::lookup;
  std::string params;
};

// A full partition of the gazetteer: disjoint metros plus (for the lookup
// strategy) localities outside every metro.
struct Partition {
  std::vector<MetroArea> metros;       // sorted by id
  std::vector<std::string> singletons; // sorted

  // locality -> owning unit id; singletons map to themselves
  std::unordered_map<std::string, std::string> unit_by_locality;

  void rebuild_index() {
    unit_by_locality.clear();
    for (const auto& m : metros)
      for (const auto& loc : m.members) unit_by_locality.emplace(loc, m.id);
    for (const auto& s : singletons) unit_by_locality.emplace(s, s);
  }

  const std::string* unit_of(const std::string& locality) const {
    auto it = unit_by_locality.find(locality);
    return it == unit_by_locality.end() ? nullptr : &it->second;
  }

  const MetroArea* metro(std::string_view id) const {
    auto it = std::lower_bound(metros.begin(), metros.end(), id,
                               [](const MetroArea& m, std::string_view v) { return m.id < v; });
    return (it != metros.end() && it->id == id) ? &*it : nullptr;
  }

  size_t locality_count() const {
    size_t n = singletons.size();
    for (const auto& m : metros) n += m.members.size();
    return n;
  }

  // Partition property: every gazetteer locality in exactly one metro or
  // in singletons.
  void validate(const LocalityRegistry& registry) const {
    std::set<std::string> seen;
    auto take = [&](const std::string& loc) {
      if (!registry.find(loc))
        throw GazetteerMismatchError("partition names unknown locality '" + loc + "'");
      if (!seen.insert(loc).second)
        throw GazetteerMismatchError("locality '" + loc + "' appears twice in partition");
    };
    for (const auto& m : metros) {
      if (m.members.empty())
        throw GazetteerMismatchError("metro '" + m.id + "' has no members");
      for (const auto& loc : m.members) take(loc);
    }
    for (const auto& s : singletons) take(s);
    if (seen.size() != registry.size())
      throw GazetteerMismatchError("partition covers " + std::to_string(seen.size()) +
                                   " of " + std::to_string(registry.size()) + " localities");
  }

  void canonicalize() {
    for (auto& m : metros) std::sort(m.members.begin(), m.members.end());
    std::sort(metros.begin(), metros.end(),
              [](const MetroArea& a, const MetroArea& b) { return a.id < b.id; });
    std::sort(singletons.begin(), singletons.end());
    rebuild_index();
  }
};

namespace detail {

struct UnionFind {
  std::vector<size_t> parent;
  std::vector<size_t> rank_;

  explicit UnionFind(size_t n) : parent(n), rank_(n, 0) {
    for (size_t i = 0; i < n; ++i) parent[i] = i;
  }
  size_t find(size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
};

// Metro id rule for distance components: largest population first
// (missing population counts as zero), then lexicographically smallest id.
inline std::string pick_representative(const std::vector<const Locality*>& members) {
  const Locality* best = members.front();
  auto pop = [](const Locality* l) -> int64_t { return l->population.value_or(0); };
  for (const Locality* l : members)
    if (pop(l) > pop(best) || (pop(l) == pop(best) && l->id < best->id)) best = l;
  return best->id;
}

}  // namespace detail

// Groups straight from a membership table; everything else is a singleton.
// A fully empty table is a legitimate no-metros delineation (all
// singletons); a tier missing from a populated table is a config error.
inline Partition delineate_lookup(const LocalityRegistry& registry,
                                  const MembershipTable& memberships, Tier tier) {
  auto table = memberships.tier(tier);
  if (table.empty() && !memberships.empty())
    throw EmptyTierError("membership table has no entries for tier " + to_string(tier));

  Partition out;
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& loc : registry.all()) {
    auto it = table.find(loc.id);
    if (it == table.end()) {
      out.singletons.push_back(loc.id);
    } else {
      groups[it->second].push_back(loc.id);
    }
  }
  for (auto& [metro_id, members] : groups) {
    MetroArea m;
    m.id = metro_id;
    m.members = std::move(members);
    m.strategy = Strategy::lookup;
    m.params = "tier=" + to_string(tier);
    out.metros.push_back(std::move(m));
  }
  out.canonicalize();
  return out;
}

// Single-linkage agglomeration: metros are connected components of the
// graph joining localities at distance <= threshold. With a core
// population requirement, components lacking a core settlement dissolve
// into per-locality metros marked below_core.
inline Partition delineate_distance(const LocalityRegistry& registry, double threshold_km,
                                    std::optional<int64_t> core_population = std::nullopt) {
  const auto& locs = registry.all();
  if (core_population) {
    for (const auto& l : locs)
      if (!l.population)
        throw MissingPopulationError("core_population set but locality '" + l.id +
                                     "' has no population");
  }

  detail::UnionFind uf(locs.size());
  for (size_t i = 0; i < locs.size(); ++i)
    for (size_t j = i + 1; j < locs.size(); ++j)
      if (distance_km(locs[i], locs[j]) <= threshold_km) uf.unite(i, j);

  std::map<size_t, std::vector<const Locality*>> components;
  for (size_t i = 0; i < locs.size(); ++i) components[uf.find(i)].push_back(&locs[i]);

  std::string params = "D=" + format_double(threshold_km) + "km";
  if (core_population) params += ";core_pop=" + std::to_string(*core_population);

  Partition out;
  for (auto& [root, members] : components) {
    bool has_core = !core_population;
    if (core_population)
      for (const Locality* l : members)
        if (l->population.value_or(0) >= *core_population) {
          has_core = true;
          break;
        }
    if (has_core) {
      MetroArea m;
      m.id = detail::pick_representative(members);
      for (const Locality* l : members) m.members.push_back(l->id);
      m.strategy = Strategy::distance;
      m.params = params;
      out.metros.push_back(std::move(m));
    } else {
      for (const Locality* l : members) {
        MetroArea m;
        m.id = l->id;
        m.members = {l->id};
        m.strategy = Strategy::distance;
        m.params = params + ";below_core";
        out.metros.push_back(std::move(m));
      }
    }
  }
  out.canonicalize();
  return out;
}

struct SkippedEdge {
  std::string a;
  std::string b;
  double minutes = 0.0;
  std::string reason;
};

struct TravelTimeResult {
  Partition partition;
  std::vector<SkippedEdge> skipped;
};

// Merge base metros whose representative localities (the metro id's
// locality) are connected by an edge strictly below the threshold;
// merging is transitive. Edges not touching two representatives are
// skipped and reported, never fatal.
inline TravelTimeResult delineate_travel_time(const Partition& base,
                                              const std::vector<TravelTimeEdge>& edges,
                                              double threshold_minutes) {
  TravelTimeResult out;
  std::unordered_map<std::string, size_t> rep_to_metro;
  for (size_t i = 0; i < base.metros.size(); ++i) rep_to_metro.emplace(base.metros[i].id, i);

  detail::UnionFind uf(base.metros.size());
  for (const auto& e : edges) {
    auto ia = rep_to_metro.find(e.a);
    auto ib = rep_to_metro.find(e.b);
    if (ia == rep_to_metro.end() || ib == rep_to_metro.end()) {
      const std::string& missing = (ia == rep_to_metro.end()) ? e.a : e.b;
      out.skipped.push_back({e.a, e.b, e.minutes,
                             "'" + missing + "' is not a metro representative"});
      continue;
    }
    if (e.minutes < threshold_minutes) uf.unite(ia->second, ib->second);
  }

  std::map<size_t, std::vector<size_t>> merged;
  for (size_t i = 0; i < base.metros.size(); ++i) merged[uf.find(i)].push_back(i);

  for (auto& [root, group] : merged) {
    if (group.size() == 1) {
      out.partition.metros.push_back(base.metros[group.front()]);
      continue;
    }
    // merged id: the larger metro by member count, ties lexicographic
    size_t best = group.front();
    for (size_t idx : group) {
      if (base.metros[idx].members.size() > base.metros[best].members.size() ||
          (base.metros[idx].members.size() == base.metros[best].members.size() &&
           base.metros[idx].id < base.metros[best].id))
        best = idx;
    }
    MetroArea m;
    m.id = base.metros[best].id;
    for (size_t idx : group)
      m.members.insert(m.members.end(), base.metros[idx].members.begin(),
                       base.metros[idx].members.end());
    m.strategy = Strategy::travel_time;
    m.params = "T<" + format_double(threshold_minutes) + "min";
    out.partition.metros.push_back(std::move(m));
  }
  out.partition.singletons = base.singletons;
  out.partition.canonicalize();
  std::sort(out.skipped.begin(), out.skipped.end(), [](const SkippedEdge& x, const SkippedEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

struct PartitionDiffRow {
  std::string locality_id;
  std::string unit_p1;
  std::string unit_p2;
  bool changed = false;
};

struct PartitionDiff {
  std::vector<PartitionDiffRow> rows;  // sorted by locality id
  size_t changed_count = 0;
  size_t split_events = 0;   // p1 groups scattered over >1 p2 group
  size_t merge_events = 0;   // p2 groups absorbing >1 p1 group
};

// Assignment comparison via best-overlap group matching in both
// directions; a locality is "changed" when it sits outside the dominant
// counterpart of either of its groups. Metro ids may differ freely
// between strategies without flagging whole groups.
inline PartitionDiff compare_partitions(const Partition& p1, const Partition& p2) {
  auto group_ids = [](const Partition& p, std::map<std::string, std::string>& unit_of) {
    for (const auto& m : p.metros)
      for (const auto& loc : m.members) unit_of[loc] = m.id;
    for (const auto& s : p.singletons) unit_of[s] = s;
  };
  std::map<std::string, std::string> u1, u2;
  group_ids(p1, u1);
  group_ids(p2, u2);
  if (u1.size() != u2.size())
    throw GazetteerMismatchError("partitions cover different locality sets");
  for (const auto& [loc, g] : u1)
    if (!u2.count(loc))
      throw GazetteerMismatchError("locality '" + loc + "' missing from second partition");

  // overlap counts between group pairs
  std::map<std::pair<std::string, std::string>, size_t> overlap;
  std::map<std::string, size_t> size1, size2;
  for (const auto& [loc, g1] : u1) {
    const std::string& g2 = u2.at(loc);
    ++overlap[{g1, g2}];
    ++size1[g1];
    ++size2[g2];
  }
  // dominant counterpart per group (max overlap, ties lexicographic)
  std::map<std::string, std::pair<size_t, std::string>> best12, best21;
  std::map<std::string, size_t> fanout1, fanout2;
  for (const auto& [pair, n] : overlap) {
    const auto& [g1, g2] = pair;
    ++fanout1[g1];
    ++fanout2[g2];
    auto upd = [n](std::map<std::string, std::pair<size_t, std::string>>& best,
                   const std::string& from, const std::string& to) {
      auto it = best.find(from);
      if (it == best.end() || n > it->second.first ||
          (n == it->second.first && to < it->second.second))
        best[from] = {n, to};
    };
    upd(best12, g1, g2);
    upd(best21, g2, g1);
  }

  PartitionDiff diff;
  for (const auto& [g1, n] : fanout1)
    if (n > 1) ++diff.split_events;
  for (const auto& [g2, n] : fanout2)
    if (n > 1) ++diff.merge_events;

  for (const auto& [loc, g1] : u1) {
    const std::string& g2 = u2.at(loc);
    bool changed = best12.at(g1).second != g2 || best21.at(g2).second != g1;
    diff.rows.push_back({loc, g1, g2, changed});
    if (changed) ++diff.changed_count;
  }
  return diff;
}

// ---------------------------------------------------------------------------
// Partition artifact I/O: locality_id,metro_id,strategy,params
// ---------------------------------------------------------------------------

inline void write_partition_rows(csv::Writer& w, const Partition& p) {
  w.row({"locality_id", "metro_id", "strategy", "params"});
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : p.metros)
    for (const auto& loc : m.members)
      rows.push_back({loc, m.id, to_string(m.strategy), m.params});
  for (const auto& s : p.singletons) rows.push_back({s, s, "lookup", "singleton"});
  std::sort(rows.begin(), rows.end());
  for (const auto& r : rows) w.row(r);
}

inline Partition load_partition(const std::string& path) {
  csv::Reader reader(path);
  Partition p;
  std::map<std::string, MetroArea> metros;
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "locality_id") continue;
    }
    long row = reader.line_no();
    if (f.size() != 4) throw SchemaError(path + ": expected 4 columns", row);
    if (f[3] == "singleton") {
      p.singletons.push_back(f[0]);
      continue;
    }
    auto strat = strategy_from_string(f[2]);
    if (!strat) throw SchemaError("unknown strategy '" + f[2] + "'", row);
    MetroArea& m = metros[f[1]];
    if (m.id.empty()) {
      m.id = f[1];
      m.strategy = *strat;
      m.params = f[3];
    }
    m.members.push_back(f[0]);
  }
  for (auto& [id, m] : metros) p.metros.push_back(std::move(m));
  p.canonicalize();
  return p;
}

}  // namespace cityom
