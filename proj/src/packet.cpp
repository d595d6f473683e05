#include "v6scope/packet.hpp"

#include <cstdio>

namespace v6scope {

std::string_view to_string(Proto p) {
  switch (p) {
    case Proto::icmp6:
      return "icmp6";
    case Proto::tcp:
      return "tcp";
    case Proto::udp:
      return "udp";
  }
  return "?";
}

std::optional<Proto> parse_proto(std::string_view text) {
  if (text == "icmp6")
    return Proto::icmp6;
  if (text == "tcp")
    return Proto::tcp;
  if (text == "udp")
    return Proto::udp;
  return std::nullopt;
}

std::string tcp_flags_str(std::uint8_t flags) {
  std::string out;
  if (flags & tcpflag::syn)
    out += 'S';
  if (flags & tcpflag::ack)
    out += 'A';
  if (flags & tcpflag::fin)
    out += 'F';
  if (flags & tcpflag::rst)
    out += 'R';
  if (flags & tcpflag::psh)
    out += 'P';
  if (flags & tcpflag::urg)
    out += 'U';
  return out;
}

std::optional<std::uint8_t> parse_tcp_flags(std::string_view text) {
  std::uint8_t flags = 0;
  for (char c : text) {
    switch (c) {
      case 'S':
        flags |= tcpflag::syn;
        break;
      case 'A':
        flags |= tcpflag::ack;
        break;
      case 'F':
        flags |= tcpflag::fin;
        break;
      case 'R':
        flags |= tcpflag::rst;
        break;
      case 'P':
        flags |= tcpflag::psh;
        break;
      case 'U':
        flags |= tcpflag::urg;
        break;
      default:
        return std::nullopt;
    }
  }
  return flags;
}

std::string hex_encode(const std::vector<std::uint8_t>& bytes) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> hex_decode(std::string_view text) {
  if (text.size() % 2 != 0)
    return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9')
      return c - '0';
    if (c >= 'a' && c <= 'f')
      return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
      return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int h = nibble(text[i]), l = nibble(text[i + 1]);
    if (h < 0 || l < 0)
      return std::nullopt;
    out.push_back(static_cast<std::uint8_t>(h << 4 | l));
  }
  return out;
}

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::optional<std::int64_t> parse_rfc3339_us(std::string_view text) {
  // YYYY-MM-DDThh:mm:ss[.frac](Z|±hh:mm)
  if (text.size() < 20)
    return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    out = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (i >= text.size() || text[i] < '0' || text[i] > '9')
        return false;
      out = out * 10 + (text[i] - '0');
    }
    return true;
  };
  int y, mo, d, h, mi, s;
  if (!num(0, 4, y) || text[4] != '-' || !num(5, 2, mo) || text[7] != '-' ||
      !num(8, 2, d))
    return std::nullopt;
  if ((text[10] != 'T' && text[10] != 't' && text[10] != ' '))
    return std::nullopt;
  if (!num(11, 2, h) || text[13] != ':' || !num(14, 2, mi) ||
      text[16] != ':' || !num(17, 2, s))
    return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
    return std::nullopt;

  std::size_t pos = 19;
  std::int64_t frac_us = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 6)
        frac_us = frac_us * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0)
      return std::nullopt;
    for (; digits < 6; ++digits)
      frac_us *= 10;
  }
  std::int64_t off_s = 0;
  if (pos >= text.size())
    return std::nullopt;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int oh, om;
    bool neg = text[pos] == '-';
    if (!num(pos + 1, 2, oh) || pos + 3 >= text.size() ||
        text[pos + 3] != ':' || !num(pos + 4, 2, om))
      return std::nullopt;
    off_s = (neg ? -1 : 1) * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size())
    return std::nullopt;

  std::int64_t secs =
      days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s - off_s;
  return secs * 1000000 + frac_us;
}

std::string format_rfc3339_us(std::int64_t us) {
  std::int64_t secs = us / 1000000;
  std::int64_t frac = us % 1000000;
  if (frac < 0) {
    frac += 1000000;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06dZ", y, m,
                d, static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60),
                static_cast<int>(frac));
  return buf;
}

}  // namespace v6scope
