#ifndef V6SCOPE_PCAP_HPP
#define V6SCOPE_PCAP_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "v6scope/ndjson.hpp"
#include "v6scope/packet.hpp"

namespace v6scope {

struct PcapResult {
  std::vector<ProbePacket> packets;
  std::size_t skipped = 0;   // non-IPv6 frames, fragments, unknown transport
  std::string error;         // set when the stream ends mid-record
  bool ok() const { return error.empty(); }
};

/// Reads classic pcap or pcapng. Ethernet (with one VLAN tag) and raw-IP
/// link types are understood; everything else is counted as skipped.
/// The telescope id is attached to every packet.
PcapResult read_pcap(std::istream& in, const std::string& telescope,
                     const IngestOptions& opts = {});

PcapResult read_pcap_file(const std::string& path,
                          const std::string& telescope,
                          const IngestOptions& opts = {});

/// True when the buffer starts with a pcap or pcapng magic number.
bool looks_like_pcap(const unsigned char* data, std::size_t len);

}  // namespace v6scope

#endif
