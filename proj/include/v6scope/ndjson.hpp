#ifndef V6SCOPE_NDJSON_HPP
#define V6SCOPE_NDJSON_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "v6scope/packet.hpp"

namespace v6scope {

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct ReadStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t excluded = 0;
  std::vector<LineError> errors;  // one entry per rejected line
};

struct IngestOptions {
  std::vector<Prefix6> exclude;    // drop packets from or to these prefixes
  std::size_t payload_cap = 256;   // bytes kept per payload
};

/// Reads packet NDJSON. Invalid lines are reported and skipped; reading
/// continues. Packets are delivered in file order.
ReadStats read_packet_ndjson(std::istream& in,
                             const std::function<void(ProbePacket&&)>& sink,
                             const IngestOptions& opts = {});

std::vector<ProbePacket> read_packet_file(const std::string& path,
                                          ReadStats* stats = nullptr,
                                          const IngestOptions& opts = {});

std::string packet_to_json(const ProbePacket& p);
void write_packet_ndjson(std::ostream& out,
                         const std::vector<ProbePacket>& packets);

}  // namespace v6scope

#endif
