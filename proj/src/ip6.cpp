#include "v6scope/ip6.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

namespace v6scope {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  if (c >= 'A' && c <= 'F')
    return c - 'A' + 10;
  return -1;
}

// Parses a dotted quad into two 16-bit groups. Rejects leading-zero octets
// other than "0" to keep the text form unambiguous.
bool parse_v4_tail(std::string_view s, std::uint16_t& g0, std::uint16_t& g1) {
  std::array<int, 4> oct{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      if (pos >= s.size() || s[pos] != '.')
        return false;
      ++pos;
    }
    std::size_t start = pos;
    int v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      v = v * 10 + (s[pos] - '0');
      if (v > 255)
        return false;
      ++pos;
    }
    std::size_t len = pos - start;
    if (len == 0 || len > 3 || (len > 1 && s[start] == '0'))
      return false;
    oct[i] = v;
  }
  if (pos != s.size())
    return false;
  g0 = static_cast<std::uint16_t>(oct[0] << 8 | oct[1]);
  g1 = static_cast<std::uint16_t>(oct[2] << 8 | oct[3]);
  return true;
}

Address6 from_groups(const std::array<std::uint16_t, 8>& g) {
  Address6 a;
  for (int i = 0; i < 4; ++i)
    a.hi = a.hi << 16 | g[i];
  for (int i = 4; i < 8; ++i)
    a.lo = a.lo << 16 | g[i];
  return a;
}

}  // namespace

Address6 Address6::with_bit(int i, bool v) const {
  Address6 a = *this;
  if (i < 64) {
    std::uint64_t m = 1ULL << (63 - i);
    a.hi = v ? (a.hi | m) : (a.hi & ~m);
  } else {
    std::uint64_t m = 1ULL << (127 - i);
    a.lo = v ? (a.lo | m) : (a.lo & ~m);
  }
  return a;
}

std::optional<Address6> Address6::parse(std::string_view text) {
  if (text.size() < 2 || text.size() > 45)
    return std::nullopt;

  // Zone identifiers and other suffixes are out of scope.
  if (text.find('%') != std::string_view::npos)
    return std::nullopt;

  // Split into colon-separated pieces, tracking a single "::" position.
  std::vector<std::string_view> pieces;
  int ellipsis = -1;
  std::size_t i = 0;
  if (text.substr(0, 2) == "::") {
    ellipsis = 0;
    i = 2;
    if (i == text.size())
      return Address6{};
  }
  while (i < text.size()) {
    std::size_t j = text.find(':', i);
    if (j == std::string_view::npos) {
      pieces.push_back(text.substr(i));
      break;
    }
    if (j == i)
      return std::nullopt;  // illegal ":::", or ":x" start
    pieces.push_back(text.substr(i, j - i));
    i = j + 1;
    if (i < text.size() && text[i] == ':') {
      if (ellipsis >= 0)
        return std::nullopt;  // second "::"
      ellipsis = static_cast<int>(pieces.size());
      ++i;
      if (i == text.size())
        break;
    } else if (i == text.size()) {
      return std::nullopt;  // trailing single ':'
    }
  }

  // Expand a trailing dotted quad into two groups.
  std::vector<std::uint16_t> groups;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    std::string_view p = pieces[k];
    if (k + 1 == pieces.size() && p.find('.') != std::string_view::npos) {
      std::uint16_t g0 = 0, g1 = 0;
      if (!parse_v4_tail(p, g0, g1))
        return std::nullopt;
      groups.push_back(g0);
      groups.push_back(g1);
      continue;
    }
    if (p.empty() || p.size() > 4)
      return std::nullopt;
    int v = 0;
    for (char c : p) {
      int d = hex_digit(c);
      if (d < 0)
        return std::nullopt;
      v = v << 4 | d;
    }
    groups.push_back(static_cast<std::uint16_t>(v));
  }

  std::array<std::uint16_t, 8> full{};
  if (ellipsis < 0) {
    if (groups.size() != 8)
      return std::nullopt;
    std::copy(groups.begin(), groups.end(), full.begin());
  } else {
    if (groups.size() > 7)
      return std::nullopt;
    std::size_t head = static_cast<std::size_t>(ellipsis);
    if (head > groups.size())
      return std::nullopt;
    for (std::size_t k = 0; k < head; ++k)
      full[k] = groups[k];
    std::size_t tail = groups.size() - head;
    for (std::size_t k = 0; k < tail; ++k)
      full[8 - tail + k] = groups[head + k];
  }
  return from_groups(full);
}

std::string Address6::str() const {
  std::array<std::uint16_t, 8> g;
  for (int i = 0; i < 4; ++i)
    g[i] = static_cast<std::uint16_t>(hi >> (16 * (3 - i)));
  for (int i = 0; i < 4; ++i)
    g[4 + i] = static_cast<std::uint16_t>(lo >> (16 * (3 - i)));

  // Longest run of zero groups, length >= 2, leftmost on ties.
  int best_start = -1, best_len = 0;
  for (int s = 0; s < 8;) {
    if (g[s] != 0) {
      ++s;
      continue;
    }
    int e = s;
    while (e < 8 && g[e] == 0)
      ++e;
    if (e - s > best_len) {
      best_start = s;
      best_len = e - s;
    }
    s = e;
  }
  if (best_len < 2)
    best_start = -1;

  char buf[8];
  std::string out;
  int i = 0;
  while (i < 8) {
    if (i == best_start) {
      out += "::";
      i += best_len;
      continue;
    }
    if (!out.empty() && out.back() != ':')
      out += ':';
    std::snprintf(buf, sizeof(buf), "%x", g[i]);
    out += buf;
    ++i;
  }
  return out;
}

Prefix6 Prefix6::of(const Address6& a, int length) {
  Prefix6 p{a, length};
  if (length == 0) {
    p.base = Address6{};
  } else if (length <= 64) {
    p.base.hi = length == 64 ? a.hi : a.hi & ~((1ULL << (64 - length)) - 1);
    p.base.lo = 0;
  } else if (length < 128) {
    p.base.lo = a.lo & ~((1ULL << (128 - length)) - 1);
  }
  return p;
}

bool Prefix6::contains(const Address6& a) const {
  if (length == 0)
    return true;
  if (length <= 64) {
    std::uint64_t m = length == 64 ? ~0ULL : ~((1ULL << (64 - length)) - 1);
    return (a.hi & m) == base.hi;
  }
  std::uint64_t m = length == 128 ? ~0ULL : ~((1ULL << (128 - length)) - 1);
  return a.hi == base.hi && (a.lo & m) == base.lo;
}

Address6 Prefix6::low_byte_address() const {
  Address6 a = base;
  a.lo |= 1;
  return a;
}

std::optional<Prefix6> Prefix6::parse(std::string_view text) {
  std::size_t slash = text.rfind('/');
  if (slash == std::string_view::npos || slash + 1 == text.size())
    return std::nullopt;
  auto addr = Address6::parse(text.substr(0, slash));
  if (!addr)
    return std::nullopt;
  int len = 0;
  for (char c : text.substr(slash + 1)) {
    if (c < '0' || c > '9')
      return std::nullopt;
    len = len * 10 + (c - '0');
    if (len > 128)
      return std::nullopt;
  }
  Prefix6 p{*addr, len};
  if (Prefix6::of(*addr, len).base != *addr)
    return std::nullopt;  // host bits set
  return p;
}

std::string Prefix6::str() const {
  return base.str() + "/" + std::to_string(length);
}

std::pair<Prefix6, Prefix6> split(const Prefix6& p) {
  if (p.length >= 128)
    throw std::invalid_argument("cannot split a /128 prefix");
  Prefix6 lower{p.base, p.length + 1};
  Prefix6 upper{p.base.with_bit(p.length, true), p.length + 1};
  return {lower, upper};
}

std::string_view to_string(AggLevel level) {
  return level == AggLevel::addr128 ? "128" : "64";
}

std::optional<AggLevel> parse_agg_level(std::string_view text) {
  if (text == "128" || text == "addr128")
    return AggLevel::addr128;
  if (text == "64" || text == "net64")
    return AggLevel::net64;
  return std::nullopt;
}

std::string SourceKey::str() const {
  if (level == AggLevel::net64)
    return Prefix6{value, 64}.str();
  return value.str();
}

}  // namespace v6scope
