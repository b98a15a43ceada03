#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cityom::jsonmin {

// Minimal hand-rolled JSON scanner for the hot ingestion path. The corpus
// line schema is flat and fixed, and parsing dominates ingest time at the
// million-record scale, so records take this path first and fall back to
// the full JSON library only when a line does not scan cleanly.

struct Cursor {
  const char* p;
  const char* end;

  bool at_end() const { return p >= end; }
  void skip_ws() {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == '\n')) ++p;
  }
  bool consume(char c) {
    skip_ws();
    if (p < end && *p == c) {
      ++p;
      return true;
    }
    return false;
  }
  bool peek(char c) {
    skip_ws();
    return p < end && *p == c;
  }
};

inline void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool parse_hex4(Cursor& c, uint32_t& out) {
  if (c.end - c.p < 4) return false;
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    char h = c.p[i];
    v <<= 4;
    if (h >= '0' && h <= '9') v |= static_cast<uint32_t>(h - '0');
    else if (h >= 'a' && h <= 'f') v |= static_cast<uint32_t>(h - 'a' + 10);
    else if (h >= 'A' && h <= 'F') v |= static_cast<uint32_t>(h - 'A' + 10);
    else return false;
  }
  c.p += 4;
  out = v;
  return true;
}

inline bool parse_string(Cursor& c, std::string& out) {
  if (!c.consume('"')) return false;
  out.clear();
  while (c.p < c.end) {
    char ch = *c.p++;
    if (ch == '"') return true;
    if (ch == '\\') {
      if (c.p >= c.end) return false;
      char esc = *c.p++;
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case '/': out.push_back('/'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'u': {
          uint32_t cp;
          if (!parse_hex4(c, cp)) return false;
          if (cp >= 0xD800 && cp <= 0xDBFF) {  // surrogate pair
            if (c.end - c.p < 6 || c.p[0] != '\\' || c.p[1] != 'u') return false;
            c.p += 2;
            uint32_t lo;
            if (!parse_hex4(c, lo) || lo < 0xDC00 || lo > 0xDFFF) return false;
            cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
          }
          append_utf8(out, cp);
          break;
        }
        default: return false;
      }
    } else {
      out.push_back(ch);
    }
  }
  return false;  // unterminated
}

inline bool parse_int(Cursor& c, long long& out) {
  c.skip_ws();
  const char* start = c.p;
  if (c.p < c.end && (*c.p == '-' || *c.p == '+')) ++c.p;
  bool any = false;
  long long v = 0;
  while (c.p < c.end && *c.p >= '0' && *c.p <= '9') {
    v = v * 10 + (*c.p - '0');
    ++c.p;
    any = true;
  }
  if (!any) {
    c.p = start;
    return false;
  }
  // reject floats on the fast path
  if (c.p < c.end && (*c.p == '.' || *c.p == 'e' || *c.p == 'E')) {
    c.p = start;
    return false;
  }
  out = (*start == '-') ? -v : v;
  return true;
}

// Skip any JSON value (used for unknown keys).
inline bool skip_value(Cursor& c) {
  c.skip_ws();
  if (c.at_end()) return false;
  char ch = *c.p;
  if (ch == '"') {
    std::string tmp;
    return parse_string(c, tmp);
  }
  if (ch == '{' || ch == '[') {
    char open = ch, close = (ch == '{') ? '}' : ']';
    int depth = 0;
    bool in_str = false;
    while (c.p < c.end) {
      char k = *c.p++;
      if (in_str) {
        if (k == '\\' && c.p < c.end) ++c.p;
        else if (k == '"') in_str = false;
      } else if (k == '"') {
        in_str = true;
      } else if (k == open) {
        ++depth;
      } else if (k == close) {
        if (--depth == 0) return true;
      }
    }
    return false;
  }
  // number / true / false / null
  const char* start = c.p;
  while (c.p < c.end && *c.p != ',' && *c.p != '}' && *c.p != ']' && *c.p != ' ' &&
         *c.p != '\t' && *c.p != '\r' && *c.p != '\n')
    ++c.p;
  return c.p > start;
}

inline void escape_to(std::string& out, std::string_view s) {
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (ch < 0x20) {
          static const char* hex = "0123456789abcdef";
          out += "\\u00";
          out.push_back(hex[ch >> 4]);
          out.push_back(hex[ch & 0xF]);
        } else {
          out.push_back(static_cast<char>(ch));
        }
    }
  }
}

}  // namespace cityom::jsonmin
