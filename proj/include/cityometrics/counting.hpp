#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cityometrics/corpus.hpp"
#include "cityometrics/csv.hpp"
#include "cityometrics/delineation.hpp"
#include "cityometrics/errors.hpp"
#include "cityometrics/format.hpp"
#include "cityometrics/parallel.hpp"
#include "cityometrics/tally.hpp"

namespace cityom {

enum class UnitKind { locality, metro, institution };
enum class Regime { integer, dedup, fractional, integer_sum };

inline std::string to_string(UnitKind k) {
  switch (k) {
    case UnitKind::locality: return "locality";
    case UnitKind::metro: return "metro";
    case UnitKind::institution: return "institution";
  }
  return "locality";
}

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::integer: return "integer";
    case Regime::dedup: return "dedup";
    case Regime::fractional: return "fractional";
    case Regime::integer_sum: return "integer_sum";
  }
  return "integer";
}

inline std::optional<Regime> regime_from_string(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "integer") return Regime::integer;
  if (v == "dedup") return Regime::dedup;
  if (v == "fractional") return Regime::fractional;
  if (v == "integer_sum") return Regime::integer_sum;
  return std::nullopt;
}

struct YearRange {
  int min = 0;
  int max = 0;

  bool contains(int y) const { return y >= min && y <= max; }
  std::string str() const { return std::to_string(min) + ":" + std::to_string(max); }
};

enum class FractionalBasis { distinct_locality, address_instance };

inline std::string to_string(FractionalBasis b) {
  return b == FractionalBasis::distinct_locality ? "distinct_locality" : "address_instance";
}

inline std::optional<FractionalBasis> basis_from_string(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "distinct_locality") return FractionalBasis::distinct_locality;
  if (v == "address_instance") return FractionalBasis::address_instance;
  return std::nullopt;
}

// How fractional shares are grouped: the denominator basis plus an
// optional metro partition (nullptr = identity, i.e. locality level).
struct AttributionPolicy {
  FractionalBasis fractional_basis = FractionalBasis::distinct_locality;
  const Partition* metro_mapping = nullptr;
};

struct CountingOptions {
  std::optional<YearRange> year_filter;
  double unresolved_tolerance = 0.0;  // abort above this unresolved-entry ratio
  unsigned threads = 1;
  size_t chunk_size = 4096;  // fold granularity; results are identical for any value
};

struct CountReport {
  UnitKind unit_kind = UnitKind::locality;
  Regime regime = Regime::integer;
  std::optional<YearRange> year_filter;
  std::map<std::string, double> credits;
  int64_t paper_total = 0;
  std::string corpus_hash;
  std::string policy;  // basis / rollup note, empty otherwise
  int64_t unresolved_count = 0;

  double credit(const std::string& unit) const {
    auto it = credits.find(unit);
    return it == credits.end() ? 0.0 : it->second;
  }

  double total() const {
    double t = 0.0;
    for (const auto& [u, c] : credits) t += c;
    return t;
  }
};

namespace detail {

// Records passing the year filter, as indexes into corpus.records.
inline std::vector<size_t> filtered_records(const Corpus& corpus,
                                            const std::optional<YearRange>& years) {
  std::vector<size_t> out;
  out.reserve(corpus.records.size());
  for (size_t i = 0; i < corpus.records.size(); ++i)
    if (!years || years->contains(corpus.records[i].year)) out.push_back(i);
  return out;
}

// Enforce the unresolved-affiliation gate and return the count.
inline int64_t check_unresolved(const Corpus& corpus, const std::vector<size_t>& picked,
                                double tolerance) {
  int64_t unresolved = 0, total = 0;
  for (size_t idx : picked) {
    for (const auto& a : corpus.records[idx].affiliations) {
      ++total;
      if (a.resolved_locality.empty()) ++unresolved;
    }
  }
  double ratio = total == 0 ? 0.0 : static_cast<double>(unresolved) / static_cast<double>(total);
  if (ratio > tolerance)
    throw UnresolvedAffiliationsError(
        std::to_string(unresolved) + " of " + std::to_string(total) +
            " affiliations unresolved (ratio " + format_double(ratio) + " > tolerance " +
            format_double(tolerance) + "); run resolve or raise --unresolved-tolerance",
        unresolved, total);
  return unresolved;
}

// Distinct resolved localities of one record, sorted.
inline std::vector<const std::string*> distinct_localities(const PublicationRecord& rec) {
  std::vector<const std::string*> locs;
  for (const auto& a : rec.affiliations)
    if (!a.resolved_locality.empty()) locs.push_back(&a.resolved_locality);
  std::sort(locs.begin(), locs.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  locs.erase(std::unique(locs.begin(), locs.end(),
                         [](const std::string* a, const std::string* b) { return *a == *b; }),
             locs.end());
  return locs;
}

// Map distinct localities to distinct units under a partition (identity
// when partition is null). Unknown localities raise GazetteerMismatch.
inline std::vector<std::string> distinct_units(const std::vector<const std::string*>& locs,
                                               const Partition* partition) {
  std::vector<std::string> units;
  units.reserve(locs.size());
  for (const std::string* l : locs) {
    if (!partition) {
      units.push_back(*l);
    } else {
      const std::string* u = partition->unit_of(*l);
      if (!u)
        throw GazetteerMismatchError("locality '" + *l + "' is not covered by the partition");
      units.push_back(*u);
    }
  }
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
  return units;
}

struct CountPartial {
  std::map<std::string, int64_t> ints;
  std::map<std::string, FractionalTally> fracs;
  int64_t papers = 0;

  void merge(CountPartial&& other) {
    for (auto& [k, v] : other.ints) ints[k] += v;
    for (auto& [k, t] : other.fracs) fracs[k].merge(t);
    papers += other.papers;
  }
};

}  // namespace detail

// Integer counting at locality level: every distinct resolved locality of
// a paper receives full credit 1.
inline CountReport integer_count(const Corpus& corpus, const CountingOptions& opts = {}) {
  auto picked = detail::filtered_records(corpus, opts.year_filter);
  int64_t unresolved = detail::check_unresolved(corpus, picked, opts.unresolved_tolerance);

  auto partial = chunked_fold<detail::CountPartial>(
      picked.size(), opts.chunk_size, opts.threads,
      [&](size_t begin, size_t end) {
        detail::CountPartial p;
        for (size_t i = begin; i < end; ++i) {
          const auto& rec = corpus.records[picked[i]];
          auto locs = detail::distinct_localities(rec);
          if (locs.empty()) continue;
          ++p.papers;
          for (const std::string* l : locs) ++p.ints[*l];
        }
        return p;
      },
      [](detail::CountPartial& acc, detail::CountPartial&& next) { acc.merge(std::move(next)); });

  CountReport report;
  report.unit_kind = UnitKind::locality;
  report.regime = Regime::integer;
  report.year_filter = opts.year_filter;
  report.paper_total = partial.papers;
  report.corpus_hash = corpus_hash(corpus);
  report.unresolved_count = unresolved;
  for (const auto& [k, v] : partial.ints) report.credits[k] = static_cast<double>(v);
  return report;
}

// Member-wise sum of locality credits: reproduces the integer-counting
// double-count at metro level as a comparison baseline. Singleton
// localities pass through as their own units.
inline CountReport metro_integer_sum(const CountReport& locality_report,
                                     const Partition& partition) {
  if (locality_report.unit_kind != UnitKind::locality)
    throw ReportMismatchError("metro_integer_sum needs a locality-level report");
  CountReport report;
  report.unit_kind = UnitKind::metro;
  report.regime = Regime::integer_sum;
  report.year_filter = locality_report.year_filter;
  report.paper_total = locality_report.paper_total;
  report.corpus_hash = locality_report.corpus_hash;
  report.unresolved_count = locality_report.unresolved_count;
  for (const auto& [loc, credit] : locality_report.credits) {
    const std::string* unit = partition.unit_of(loc);
    if (!unit)
      throw GazetteerMismatchError("locality '" + loc + "' is not covered by the partition");
    report.credits[*unit] += credit;
  }
  return report;
}

// Deduplicated ("OR") counting: a paper counts once per unit it touches,
// however many member localities are involved.
inline CountReport dedup_count(const Corpus& corpus, const Partition& partition,
                               const CountingOptions& opts = {}) {
  auto picked = detail::filtered_records(corpus, opts.year_filter);
  int64_t unresolved = detail::check_unresolved(corpus, picked, opts.unresolved_tolerance);

  auto partial = chunked_fold<detail::CountPartial>(
      picked.size(), opts.chunk_size, opts.threads,
      [&](size_t begin, size_t end) {
        detail::CountPartial p;
        for (size_t i = begin; i < end; ++i) {
          const auto& rec = corpus.records[picked[i]];
          auto locs = detail::distinct_localities(rec);
          if (locs.empty()) continue;
          ++p.papers;
          for (const auto& unit : detail::distinct_units(locs, &partition)) ++p.ints[unit];
        }
        return p;
      },
      [](detail::CountPartial& acc, detail::CountPartial&& next) { acc.merge(std::move(next)); });

  CountReport report;
  report.unit_kind = UnitKind::metro;
  report.regime = Regime::dedup;
  report.year_filter = opts.year_filter;
  report.paper_total = partial.papers;
  report.corpus_hash = corpus_hash(corpus);
  report.unresolved_count = unresolved;
  for (const auto& [k, v] : partial.ints) report.credits[k] = static_cast<double>(v);
  return report;
}

// Fractional counting: each paper distributes exactly credit 1. Shares
// are exact unit fractions accumulated without float drift.
inline CountReport fractional_count(const Corpus& corpus, const AttributionPolicy& policy,
                                    const CountingOptions& opts = {}) {
  auto picked = detail::filtered_records(corpus, opts.year_filter);
  int64_t unresolved = detail::check_unresolved(corpus, picked, opts.unresolved_tolerance);

  const Partition* partition = policy.metro_mapping;
  auto partial = chunked_fold<detail::CountPartial>(
      picked.size(), opts.chunk_size, opts.threads,
      [&](size_t begin, size_t end) {
        detail::CountPartial p;
        for (size_t i = begin; i < end; ++i) {
          const auto& rec = corpus.records[picked[i]];
          if (policy.fractional_basis == FractionalBasis::distinct_locality) {
            auto locs = detail::distinct_localities(rec);
            if (locs.empty()) continue;
            ++p.papers;
            uint32_t denom = static_cast<uint32_t>(locs.size());
            for (const std::string* l : locs) {
              if (!partition) {
                p.fracs[*l].add(denom);
              } else {
                const std::string* u = partition->unit_of(*l);
                if (!u)
                  throw GazetteerMismatchError("locality '" + *l +
                                               "' is not covered by the partition");
                p.fracs[*u].add(denom);
              }
            }
          } else {
            uint32_t instances = 0;
            for (const auto& a : rec.affiliations)
              if (!a.resolved_locality.empty()) ++instances;
            if (instances == 0) continue;
            ++p.papers;
            for (const auto& a : rec.affiliations) {
              if (a.resolved_locality.empty()) continue;
              if (!partition) {
                p.fracs[a.resolved_locality].add(instances);
              } else {
                const std::string* u = partition->unit_of(a.resolved_locality);
                if (!u)
                  throw GazetteerMismatchError("locality '" + a.resolved_locality +
                                               "' is not covered by the partition");
                p.fracs[*u].add(instances);
              }
            }
          }
        }
        return p;
      },
      [](detail::CountPartial& acc, detail::CountPartial&& next) { acc.merge(std::move(next)); });

  CountReport report;
  report.unit_kind = partition ? UnitKind::metro : UnitKind::locality;
  report.regime = Regime::fractional;
  report.year_filter = opts.year_filter;
  report.paper_total = partial.papers;
  report.corpus_hash = corpus_hash(corpus);
  report.policy = "basis=" + to_string(policy.fractional_basis);
  report.unresolved_count = unresolved;
  for (const auto& [k, t] : partial.fracs) report.credits[k] = t.value();
  return report;
}

// Integrate institution-level counts on locality level via each
// institution's headquarters. Cross-institution double counting is
// inherent to this method; the report header says so.
inline CountReport institution_rollup(const std::map<std::string, double>& inst_counts,
                                      const InstitutionRegistry& institutions) {
  CountReport report;
  report.unit_kind = UnitKind::locality;
  report.regime = Regime::integer_sum;
  report.policy = "institution_rollup: co-affiliated papers count once per institution";
  double total = 0.0;
  for (const auto& [inst_id, count] : inst_counts) {
    const Institution* inst = institutions.find(inst_id);
    if (!inst) throw UnknownInstitutionError("unknown institution '" + inst_id + "'");
    report.credits[inst->hq_locality] += count;
    total += count;
  }
  report.paper_total = static_cast<int64_t>(total);
  return report;
}

struct MismatchRow {
  std::string institution_id;
  int64_t total = 0;
  int64_t at_hq = 0;

  double hq_share() const {
    return total == 0 ? 0.0 : static_cast<double>(at_hq) / static_cast<double>(total);
  }
};

struct MismatchReport {
  std::vector<MismatchRow> rows;  // ascending hq_share, ties by id
  std::vector<std::pair<std::string, int64_t>> unmatched;  // institution name -> papers
  std::string corpus_hash;
};

// Headquarters attribution audit: per institution, how many of the papers
// mentioning it actually report an affiliation in its HQ locality.
inline MismatchReport hq_mismatch(const Corpus& corpus, const InstitutionRegistry& institutions,
                                  const CountingOptions& opts = {}) {
  auto picked = detail::filtered_records(corpus, opts.year_filter);

  std::map<std::string, MismatchRow> rows;
  std::map<std::string, int64_t> unmatched;
  for (size_t idx : picked) {
    const auto& rec = corpus.records[idx];
    // institution -> did any of its mentions resolve to its HQ
    std::map<const Institution*, bool> mentioned;
    std::set<std::string> unknown_names;
    for (const auto& a : rec.affiliations) {
      if (a.institution.empty()) continue;
      const Institution* inst = institutions.match(a.institution);
      if (!inst) {
        unknown_names.insert(a.institution);
        continue;
      }
      bool& at_hq = mentioned[inst];
      at_hq = at_hq || (!a.resolved_locality.empty() && a.resolved_locality == inst->hq_locality);
    }
    for (const auto& [inst, at_hq] : mentioned) {
      MismatchRow& r = rows[inst->id];
      r.institution_id = inst->id;
      ++r.total;
      if (at_hq) ++r.at_hq;
    }
    for (const auto& n : unknown_names) ++unmatched[n];
  }

  MismatchReport report;
  report.corpus_hash = corpus_hash(corpus);
  for (auto& [id, r] : rows) report.rows.push_back(r);
  std::sort(report.rows.begin(), report.rows.end(), [](const MismatchRow& a, const MismatchRow& b) {
    if (a.hq_share() != b.hq_share()) return a.hq_share() < b.hq_share();
    return a.institution_id < b.institution_id;
  });
  for (auto& [name, n] : unmatched) report.unmatched.emplace_back(name, n);
  return report;
}

// ---------------------------------------------------------------------------
// Report CSV: header block + unit_id,unit_kind,regime,credit
// ---------------------------------------------------------------------------

inline void write_count_report(csv::Writer& w, const CountReport& r) {
  w.comment("corpus_hash", r.corpus_hash);
  w.comment("unit_kind", to_string(r.unit_kind));
  w.comment("regime", to_string(r.regime));
  w.comment("year_filter", r.year_filter ? r.year_filter->str() : "none");
  w.comment("policy", r.policy.empty() ? "none" : r.policy);
  w.comment("unresolved", std::to_string(r.unresolved_count));
  w.comment("paper_total", std::to_string(r.paper_total));
  w.row({"unit_id", "unit_kind", "regime", "credit"});
  for (const auto& [unit, credit] : r.credits)
    w.row({unit, to_string(r.unit_kind), to_string(r.regime), format_double(credit)});
}

inline void write_mismatch_report(csv::Writer& w, const MismatchReport& r) {
  w.comment("corpus_hash", r.corpus_hash);
  w.row({"institution_id", "total", "at_hq", "hq_share"});
  for (const auto& row : r.rows)
    w.row({row.institution_id, std::to_string(row.total), std::to_string(row.at_hq),
           format_percent(row.hq_share())});
}

}  // namespace cityom
