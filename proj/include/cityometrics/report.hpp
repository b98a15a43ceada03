#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cityometrics/counting.hpp"
#include "cityometrics/delineation.hpp"
#include "cityometrics/format.hpp"
#include "cityometrics/gazetteer.hpp"

namespace cityom {

struct RankedRow {
  int rank = 0;
  std::string locality_id;
  SettlementType settlement_type = SettlementType::other;
  double credit = 0.0;
};

struct RankedTable {
  std::string metro_id;
  std::vector<RankedRow> rows;
  // footer totals over all members, not just the listed top rows
  double integer_sum_total = 0.0;
  double dedup_total = 0.0;
  double fractional_total = 0.0;

  double dedup_over_integer() const {
    return integer_sum_total == 0.0 ? 0.0 : dedup_total / integer_sum_total;
  }
};

// Top-n member localities of a metro by integer credit, with footer
// totals taken verbatim from the three count reports.
inline RankedTable ranked_table(const std::string& metro_id, const Partition& partition,
                                const LocalityRegistry& registry,
                                const CountReport& locality_integer,
                                const CountReport& metro_dedup,
                                const CountReport& metro_fractional, int top_n = 25) {
  if (top_n < 1) throw ConfigError({"top_n must be >= 1"});
  if (locality_integer.corpus_hash != metro_dedup.corpus_hash ||
      locality_integer.corpus_hash != metro_fractional.corpus_hash)
    throw ReportMismatchError("input reports were computed over different corpora");
  if (locality_integer.unit_kind != UnitKind::locality ||
      locality_integer.regime != Regime::integer)
    throw ReportMismatchError("first report must be locality-level integer counting");
  if (metro_dedup.regime != Regime::dedup || metro_fractional.regime != Regime::fractional)
    throw ReportMismatchError("expected dedup and fractional metro reports");

  const MetroArea* metro = partition.metro(metro_id);
  std::vector<std::string> members;
  if (metro) {
    members = metro->members;
  } else {
    for (const auto& s : partition.singletons)
      if (s == metro_id) members.push_back(s);
    if (members.empty()) throw UnknownMetroError("unknown metro '" + metro_id + "'");
  }

  RankedTable table;
  table.metro_id = metro_id;

  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& loc : members) {
    double credit = locality_integer.credit(loc);
    table.integer_sum_total += credit;
    ranked.emplace_back(credit, loc);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  int limit = std::min<size_t>(static_cast<size_t>(top_n), ranked.size());
  for (int i = 0; i < limit; ++i) {
    const Locality* loc = registry.find(ranked[i].second);
    if (!loc) throw GazetteerMismatchError("metro member '" + ranked[i].second +
                                           "' is not in the gazetteer");
    table.rows.push_back({i + 1, ranked[i].second, loc->settlement_type, ranked[i].first});
  }

  table.dedup_total = metro_dedup.credit(metro_id);
  table.fractional_total = metro_fractional.credit(metro_id);
  return table;
}

struct RegimeSummary {
  std::vector<std::string> regime_labels;              // column order
  std::map<std::string, std::vector<double>> units;   // unit -> credits per regime
  std::vector<double> totals;                          // per regime
};

// Side-by-side credits per unit under each input regime, plus global
// totals. Pairwise ratios are derived at render time.
inline RegimeSummary regime_summary(const std::vector<const CountReport*>& reports) {
  if (reports.size() < 2) throw ConfigError({"regime_summary needs at least 2 reports"});
  for (size_t i = 1; i < reports.size(); ++i) {
    if (reports[i]->corpus_hash != reports[0]->corpus_hash)
      throw ReportMismatchError("input reports were computed over different corpora");
    if (reports[i]->unit_kind != reports[0]->unit_kind)
      throw ReportMismatchError("input reports have different unit kinds");
  }
  RegimeSummary s;
  for (const CountReport* r : reports) s.regime_labels.push_back(to_string(r->regime));
  s.totals.assign(reports.size(), 0.0);
  for (size_t i = 0; i < reports.size(); ++i) {
    for (const auto& [unit, credit] : reports[i]->credits) {
      auto& row = s.units[unit];
      if (row.empty()) row.assign(reports.size(), 0.0);
      row[i] = credit;
    }
    s.totals[i] = reports[i]->total();
  }
  for (auto& [unit, row] : s.units)
    if (row.empty()) row.assign(reports.size(), 0.0);
  return s;
}

// ---------------------------------------------------------------------------
// Rendering: CSV and aligned plain text, both deterministic.
// ---------------------------------------------------------------------------

inline void write_ranked_table_csv(csv::Writer& w, const RankedTable& t) {
  w.comment("metro", t.metro_id);
  w.row({"rank", "locality_id", "settlement_type", "credit"});
  for (const auto& r : t.rows)
    w.row({std::to_string(r.rank), r.locality_id, to_string(r.settlement_type),
           format_double(r.credit)});
  w.comment("integer_sum_total", format_double(t.integer_sum_total));
  w.comment("dedup_total", format_double(t.dedup_total));
  w.comment("fractional_total", format_double(t.fractional_total));
  w.comment("dedup_over_integer_pct", format_percent(t.dedup_over_integer()));
}

namespace detail {

inline std::string pad(const std::string& s, size_t width, bool right_align) {
  if (s.size() >= width) return s;
  std::string fill(width - s.size(), ' ');
  return right_align ? fill + s : s + fill;
}

inline std::string render_text_table(const std::vector<std::string>& header,
                                     const std::vector<std::vector<std::string>>& rows,
                                     const std::vector<bool>& right_align) {
  std::vector<size_t> widths(header.size());
  for (size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& r : rows)
    for (size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  std::string out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (size_t c = 0; c < r.size(); ++c) {
      if (c) out += "  ";
      out += pad(r[c], widths[c], right_align[c]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  };
  emit(header);
  std::vector<std::string> rule;
  for (size_t c = 0; c < header.size(); ++c) rule.push_back(std::string(widths[c], '-'));
  emit(rule);
  for (const auto& r : rows) emit(r);
  return out;
}

}  // namespace detail

inline std::string render_ranked_table_text(const RankedTable& t) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : t.rows)
    rows.push_back({std::to_string(r.rank), r.locality_id, to_string(r.settlement_type),
                    format_double(r.credit)});
  std::string out = "Top settlements of " + t.metro_id + "\n";
  out += detail::render_text_table({"rank", "locality", "type", "papers"}, rows,
                                   {true, false, false, true});
  out += "\n";
  out += "Integer counting    " + format_double(t.integer_sum_total) + "\n";
  out += "Deduplicated (OR)   " + format_double(t.dedup_total) + "\n";
  out += "Fractional counting " + format_double(t.fractional_total) + "\n";
  out += "Dedup/integer       " + format_percent(t.dedup_over_integer()) + "%\n";
  return out;
}

// Per unit: credits per regime, the pairwise ratio, and its complement
// (the share of credit contributed by papers spanning several units).
inline void write_regime_summary_csv(csv::Writer& w, const RegimeSummary& s,
                                     const std::string& hash) {
  w.comment("corpus_hash", hash);
  std::vector<std::string> header = {"unit_id"};
  for (const auto& label : s.regime_labels) header.push_back(label);
  for (size_t i = 0; i < s.regime_labels.size(); ++i)
    for (size_t j = i + 1; j < s.regime_labels.size(); ++j) {
      header.push_back(s.regime_labels[j] + "_over_" + s.regime_labels[i] + "_pct");
      header.push_back("cross_unit_share_" + s.regime_labels[j] + "_vs_" + s.regime_labels[i] +
                       "_pct");
    }
  w.row(header);

  auto emit = [&](const std::string& unit, const std::vector<double>& credits) {
    std::vector<std::string> row = {unit};
    for (double c : credits) row.push_back(format_double(c));
    for (size_t i = 0; i < credits.size(); ++i)
      for (size_t j = i + 1; j < credits.size(); ++j) {
        if (credits[i] == 0.0) {
          row.push_back("");
          row.push_back("");
        } else {
          row.push_back(format_percent(credits[j] / credits[i]));
          row.push_back(format_percent(1.0 - credits[j] / credits[i]));
        }
      }
    w.row(row);
  };
  for (const auto& [unit, credits] : s.units) emit(unit, credits);
  emit("TOTAL", s.totals);
}

}  // namespace cityom
