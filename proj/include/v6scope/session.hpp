#ifndef V6SCOPE_SESSION_HPP
#define V6SCOPE_SESSION_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "v6scope/packet.hpp"

namespace v6scope {

struct SessionizerConfig {
  std::int64_t timeout_us = 3600LL * 1000000;  // one hour
  AggLevel level = AggLevel::addr128;
};

/// A timeout-delimited packet run from one source at one telescope.
/// `packet_idx` refers into the packet vector handed to sessionize(); the
/// derived fields below are what the session wire format carries.
struct ScanSession {
  std::uint64_t id = 0;
  SourceKey source;
  std::string telescope;
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
  std::vector<std::uint32_t> packet_idx;

  std::uint64_t packet_count = 0;
  std::vector<Address6> targets;  // arrival order, one per packet
  std::array<std::uint64_t, 3> packets_by_proto{};  // indexed by Proto
  std::map<Proto, std::set<std::uint16_t>> dports;
  std::vector<std::uint8_t> payload;  // first non-empty payload in the run
  std::uint64_t distinct_targets = 0;

  bool has_proto(Proto p) const {
    return packets_by_proto[static_cast<int>(p)] > 0;
  }
};

/// Groups packets by (source key, telescope), orders them by
/// (ts, dst, proto, dport), and splits runs wherever the inter-arrival gap
/// exceeds the timeout. A gap equal to the timeout stays in-session.
/// Output is deterministic: sessions ordered by (source, telescope, start)
/// with sequential ids.
std::vector<ScanSession> sessionize(const std::vector<ProbePacket>& packets,
                                    const SessionizerConfig& cfg);

std::string session_to_json(const ScanSession& s);

struct SessionReadStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

void write_session_ndjson(std::ostream& out,
                          const std::vector<ScanSession>& sessions);
std::vector<ScanSession> read_session_ndjson(std::istream& in,
                                             SessionReadStats* stats = nullptr);
std::vector<ScanSession> read_session_file(const std::string& path,
                                           SessionReadStats* stats = nullptr);

}  // namespace v6scope

#endif
