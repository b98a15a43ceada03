#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cityometrics/text.hpp"

namespace cityom {

// One address instance as printed on a publication. Empty admin_name /
// resolved_locality mean "absent".
struct AffiliationEntry {
  std::string raw;
  std::string institution;
  std::string locality_name;
  std::string admin_name;
  std::string country_name;
  std::string resolved_locality;

  bool parsed() const { return !country_name.empty(); }

  friend bool operator==(const AffiliationEntry&, const AffiliationEntry&) = default;
};

struct AffiliationParse {
  std::optional<AffiliationEntry> entry;
  std::string error;  // set when !entry
};

namespace detail {

// State/province/territory tokens per country, used to tell an admin
// segment from a locality segment. Countries whose addresses commonly
// carry such a segment between locality and country.
inline const std::unordered_set<std::string>& admin_regions(const std::string& norm_country) {
  static const std::unordered_set<std::string> us = {
      "al", "ak", "az", "ar", "ca", "co", "ct", "de", "fl", "ga", "hi", "id", "il", "in",
      "ia", "ks", "ky", "la", "me", "md", "ma", "mi", "mn", "ms", "mo", "mt", "ne", "nv",
      "nh", "nj", "nm", "ny", "nc", "nd", "oh", "ok", "or", "pa", "ri", "sc", "sd", "tn",
      "tx", "ut", "vt", "va", "wa", "wv", "wi", "wy", "dc",
      "alabama", "alaska", "arizona", "arkansas", "california", "colorado", "connecticut",
      "delaware", "florida", "georgia", "hawaii", "idaho", "illinois", "indiana", "iowa",
      "kansas", "kentucky", "louisiana", "maine", "maryland", "massachusetts", "michigan",
      "minnesota", "mississippi", "missouri", "montana", "nebraska", "nevada",
      "new hampshire", "new jersey", "new mexico", "new york", "north carolina",
      "north dakota", "ohio", "oklahoma", "oregon", "pennsylvania", "rhode island",
      "south carolina", "south dakota", "tennessee", "texas", "utah", "vermont", "virginia",
      "washington", "west virginia", "wisconsin", "wyoming", "district of columbia"};
  static const std::unordered_set<std::string> canada = {
      "ab", "bc", "mb", "nb", "nl", "ns", "nt", "nu", "on", "pe", "qc", "sk", "yt",
      "alberta", "british columbia", "manitoba", "new brunswick",
      "newfoundland and labrador", "nova scotia", "northwest territories", "nunavut",
      "ontario", "prince edward island", "quebec", "saskatchewan", "yukon"};
  static const std::unordered_set<std::string> australia = {
      "act", "nsw", "nt", "qld", "sa", "tas", "vic", "wa",
      "australian capital territory", "new south wales", "northern territory", "queensland",
      "south australia", "tasmania", "victoria", "western australia"};
  static const std::unordered_set<std::string> empty;

  static const std::unordered_map<std::string, const std::unordered_set<std::string>*> by_country = {
      {"usa", &us},
      {"us", &us},
      {"united states", &us},
      {"united states of america", &us},
      {"canada", &canada},
      {"australia", &australia},
  };
  auto it = by_country.find(norm_country);
  return it == by_country.end() ? empty : *it->second;
}

inline bool is_admin_region(std::string_view country, std::string_view token) {
  const auto& set = admin_regions(text::normalize_name(country));
  return set.count(text::normalize_name(token)) > 0;
}

// A postal-code token is a whitespace-delimited token containing a run of
// >= 4 digits, possibly with letters attached ("94305", "H-4028").
inline bool looks_postal(std::string_view token) {
  int run = 0;
  for (char c : token) {
    if (c >= '0' && c <= '9') {
      if (++run >= 4) return true;
    } else {
      run = 0;
    }
  }
  return false;
}

// Strip one leading or trailing postal token from a segment; unmatched
// tokens stay put.
inline std::string_view strip_postal(std::string_view seg) {
  seg = text::trim(seg);
  size_t last_space = seg.rfind(' ');
  if (last_space != std::string_view::npos && looks_postal(seg.substr(last_space + 1)))
    return text::trim(seg.substr(0, last_space));
  size_t first_space = seg.find(' ');
  if (first_space != std::string_view::npos && looks_postal(seg.substr(0, first_space)))
    return text::trim(seg.substr(first_space + 1));
  if (looks_postal(seg) && (seg.find(' ') == std::string_view::npos)) {
    // entire segment is a postal token; nothing useful remains
    return std::string_view();
  }
  return seg;
}

}  // namespace detail

// Positional grammar for a single address: segments split on commas, the
// last segment is the country, the segment before it (postal code
// stripped) is the locality unless it names an admin region of that
// country, and the first segment is the institution. Segments between
// institution and locality are kept in `raw` only. Total and
// deterministic for any non-empty input.
inline AffiliationParse parse_affiliation(std::string_view raw) {
  AffiliationParse result;
  std::vector<std::string_view> segments;
  for (std::string_view piece : text::split(raw, ',')) {
    std::string_view t = text::trim(piece);
    if (!t.empty()) segments.push_back(t);
  }
  if (segments.size() < 2) {
    result.error = "fewer than 2 segments; no country separable";
    return result;
  }

  AffiliationEntry entry;
  entry.raw = std::string(text::trim(raw));
  entry.institution = std::string(segments.front());
  entry.country_name = std::string(segments.back());

  size_t n = segments.size();
  if (n >= 3) {
    std::string_view pre_country = detail::strip_postal(segments[n - 2]);
    // The admin rule needs a distinct locality segment to its left,
    // i.e. one that is not the institution segment.
    if (n >= 4 && !pre_country.empty() &&
        detail::is_admin_region(entry.country_name, pre_country)) {
      entry.admin_name = std::string(pre_country);
      entry.locality_name = std::string(segments[n - 3]);
    } else {
      entry.locality_name = std::string(pre_country);
      if (entry.locality_name.empty())
        entry.locality_name = std::string(segments[n - 2]);  // pure-postal segment kept as-is
    }
  }

  result.entry = std::move(entry);
  return result;
}

}  // namespace cityom
