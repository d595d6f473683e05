#ifndef V6SCOPE_ADDRCLASS_HPP
#define V6SCOPE_ADDRCLASS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "v6scope/session.hpp"

namespace v6scope {

/// Target address types in the style of the addr6 tool; every address gets
/// exactly one, resolved by a fixed precedence.
enum class AddressType : std::uint8_t {
  low_byte = 0,
  embedded_ipv4,
  embedded_port,
  ieee_derived,
  isatap,
  pattern_bytes,
  subnet_anycast,
  randomized,
};

inline constexpr int kAddressTypeCount = 8;

std::string_view to_string(AddressType t);

struct AddrClassConfig {
  // Services whose ports count as embedded-port IIDs.
  std::set<std::uint16_t> service_ports{21,  22,  23,   25,   53,  80,  110,
                                        123, 143, 161,  179,  443, 445, 993,
                                        995, 3306, 3389, 5060, 8080, 8443};
  double structured_threshold = 0.8;
};

/// Classifies the interface identifier of one address.
AddressType classify_iid(const Address6& a, const AddrClassConfig& cfg = {});

enum class AddressSelectionLabel { structured, random, unknown };

std::string_view to_string(AddressSelectionLabel l);

/// Per-session histogram over address types, one count per target.
std::array<std::uint64_t, kAddressTypeCount> type_histogram(
    const ScanSession& s, const AddrClassConfig& cfg = {});

/// True when targets never decrease in numeric order (iterative traversal).
bool targets_monotone(const ScanSession& s);

/// Labels a session's address selection. `random_verdict` is the
/// frequency-test verdict on the IID section; pass std::nullopt when the
/// session is below the randomness input floor. Structured wins over
/// random.
AddressSelectionLabel classify_session_addresses(
    const ScanSession& s, std::optional<bool> random_verdict,
    const AddrClassConfig& cfg = {});

}  // namespace v6scope

#endif
