#include "v6scope/addrclass.hpp"

#include <algorithm>

namespace v6scope {

namespace {

// IID bytes indexed 0..7 (address bytes 8..15).
std::uint8_t iid_byte(std::uint64_t iid, int i) {
  return static_cast<std::uint8_t>(iid >> (8 * (7 - i)));
}

// Hex groups whose digits read as a decimal number, e.g. 0x0443 -> 443.
std::optional<int> hex_as_decimal(std::uint16_t group) {
  int out = 0;
  for (int shift = 12; shift >= 0; shift -= 4) {
    int digit = (group >> shift) & 0xf;
    if (digit > 9)
      return std::nullopt;
    out = out * 10 + digit;
  }
  return out;
}

bool is_embedded_ipv4(std::uint64_t iid) {
  // Hex embedding: high IID bytes zero and the low 32 bits a plausible
  // dotted quad (first octet nonzero).
  if ((iid >> 32) == 0 && iid_byte(iid, 4) != 0)
    return true;
  // Nibble-decimal embedding: every group reads as a decimal octet,
  // first octet nonzero (e.g. ::192:0:2:1 for 192.0.2.1).
  std::array<std::optional<int>, 4> octets;
  for (int g = 0; g < 4; ++g)
    octets[g] = hex_as_decimal(static_cast<std::uint16_t>(iid >> (16 * (3 - g))));
  for (const auto& o : octets)
    if (!o || *o > 255)
      return false;
  return *octets[0] != 0;
}

bool is_pattern_bytes(std::uint64_t iid) {
  // One nibble repeated across the whole IID.
  int first_nibble = static_cast<int>(iid >> 60);
  bool all_same = true;
  for (int i = 1; i < 16 && all_same; ++i)
    all_same = static_cast<int>(iid >> (60 - 4 * i) & 0xf) == first_nibble;
  if (all_same)
    return true;
  // A nonzero byte repeated in >= 3 consecutive positions, zeros elsewhere.
  for (int start = 0; start <= 5; ++start) {
    std::uint8_t v = iid_byte(iid, start);
    if (v == 0)
      continue;
    int run = 1;
    while (start + run < 8 && iid_byte(iid, start + run) == v)
      ++run;
    if (run < 3)
      continue;
    bool rest_zero = true;
    for (int i = 0; i < 8; ++i)
      if ((i < start || i >= start + run) && iid_byte(iid, i) != 0)
        rest_zero = false;
    if (rest_zero)
      return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(AddressType t) {
  switch (t) {
    case AddressType::low_byte:
      return "low-byte";
    case AddressType::embedded_ipv4:
      return "embedded-ipv4";
    case AddressType::embedded_port:
      return "embedded-port";
    case AddressType::ieee_derived:
      return "ieee-derived";
    case AddressType::isatap:
      return "isatap";
    case AddressType::pattern_bytes:
      return "pattern-bytes";
    case AddressType::subnet_anycast:
      return "subnet-anycast";
    case AddressType::randomized:
      return "randomized";
  }
  return "?";
}

std::string_view to_string(AddressSelectionLabel l) {
  switch (l) {
    case AddressSelectionLabel::structured:
      return "structured";
    case AddressSelectionLabel::random:
      return "random";
    case AddressSelectionLabel::unknown:
      return "unknown";
  }
  return "?";
}

AddressType classify_iid(const Address6& a, const AddrClassConfig& cfg) {
  std::uint64_t iid = a.iid();

  if (iid == 0)
    return AddressType::subnet_anycast;

  // ISATAP: IID starts 00:00:5e:fe or 02:00:5e:fe.
  std::uint32_t head =
      static_cast<std::uint32_t>(iid >> 32);
  if (head == 0x00005efe || head == 0x02005efe)
    return AddressType::isatap;

  // EUI-64 expansion inserts ff:fe in the middle of the MAC.
  if (iid_byte(iid, 3) == 0xff && iid_byte(iid, 4) == 0xfe)
    return AddressType::ieee_derived;

  if (is_embedded_ipv4(iid))
    return AddressType::embedded_ipv4;

  if ((iid >> 16) == 0) {
    auto last = static_cast<std::uint16_t>(iid);
    // Service ports written as hex-looking decimal (::443) or plain hex
    // (::1bb).
    auto as_dec = hex_as_decimal(last);
    bool port = (as_dec && cfg.service_ports.count(
                               static_cast<std::uint16_t>(*as_dec)) > 0) ||
                cfg.service_ports.count(last) > 0;
    if (port)
      return AddressType::embedded_port;
    return AddressType::low_byte;
  }

  if (is_pattern_bytes(iid))
    return AddressType::pattern_bytes;

  return AddressType::randomized;
}

std::array<std::uint64_t, kAddressTypeCount> type_histogram(
    const ScanSession& s, const AddrClassConfig& cfg) {
  std::array<std::uint64_t, kAddressTypeCount> hist{};
  for (const auto& t : s.targets)
    hist[static_cast<int>(classify_iid(t, cfg))]++;
  return hist;
}

bool targets_monotone(const ScanSession& s) {
  if (s.targets.size() < 2)
    return false;
  for (std::size_t i = 1; i < s.targets.size(); ++i)
    if (s.targets[i] < s.targets[i - 1])
      return false;
  return true;
}

AddressSelectionLabel classify_session_addresses(
    const ScanSession& s, std::optional<bool> random_verdict,
    const AddrClassConfig& cfg) {
  auto hist = type_histogram(s, cfg);
  std::uint64_t total = 0;
  for (auto c : hist)
    total += c;
  if (total > 0) {
    int dominant = 0;
    for (int i = 1; i < kAddressTypeCount; ++i)
      if (hist[i] > hist[dominant])
        dominant = i;
    double share = static_cast<double>(hist[dominant]) /
                   static_cast<double>(total);
    bool nonrandom_type =
        static_cast<AddressType>(dominant) != AddressType::randomized;
    if (nonrandom_type && share >= cfg.structured_threshold)
      return AddressSelectionLabel::structured;
    if (targets_monotone(s))
      return AddressSelectionLabel::structured;
  }
  if (random_verdict && *random_verdict)
    return AddressSelectionLabel::random;
  return AddressSelectionLabel::unknown;
}

}  // namespace v6scope
