#ifndef V6SCOPE_PACKET_HPP
#define V6SCOPE_PACKET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "v6scope/ip6.hpp"

namespace v6scope {

enum class Proto : std::uint8_t { icmp6 = 0, tcp = 1, udp = 2 };

std::string_view to_string(Proto p);
std::optional<Proto> parse_proto(std::string_view text);

// TCP flag bits in wire order; rendered as a subset of "SAFRPU".
namespace tcpflag {
inline constexpr std::uint8_t fin = 0x01;
inline constexpr std::uint8_t syn = 0x02;
inline constexpr std::uint8_t rst = 0x04;
inline constexpr std::uint8_t psh = 0x08;
inline constexpr std::uint8_t ack = 0x10;
inline constexpr std::uint8_t urg = 0x20;
}  // namespace tcpflag

std::string tcp_flags_str(std::uint8_t flags);
std::optional<std::uint8_t> parse_tcp_flags(std::string_view text);

/// One normalized captured probe.
struct ProbePacket {
  std::int64_t ts_us = 0;  // microseconds since the Unix epoch
  Address6 src;
  Address6 dst;
  Proto proto = Proto::icmp6;
  std::optional<std::uint16_t> sport;
  std::optional<std::uint16_t> dport;
  std::optional<std::uint8_t> icmp_type;
  std::optional<std::uint8_t> tcp_flags;
  std::vector<std::uint8_t> payload;
  std::string telescope;

  bool operator==(const ProbePacket&) const = default;

  /// icmp6 carries no ports; tcp/udp require a destination port.
  bool valid() const {
    if (proto == Proto::icmp6)
      return !sport && !dport;
    return dport.has_value();
  }

  SourceKey source(AggLevel level) const { return SourceKey::of(src, level); }
};

std::string hex_encode(const std::vector<std::uint8_t>& bytes);
std::optional<std::vector<std::uint8_t>> hex_decode(std::string_view text);

/// Parses "2023-08-24T12:34:56.123456Z" (or a +hh:mm offset) to epoch
/// microseconds.
std::optional<std::int64_t> parse_rfc3339_us(std::string_view text);
std::string format_rfc3339_us(std::int64_t us);

}  // namespace v6scope

#endif
