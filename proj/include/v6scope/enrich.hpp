#ifndef V6SCOPE_ENRICH_HPP
#define V6SCOPE_ENRICH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "v6scope/ip6.hpp"

namespace v6scope {

enum class NetType { hosting, isp, education, business, government, unknown };

std::string_view to_string(NetType t);
std::optional<NetType> parse_net_type(std::string_view text);

/// Offline metadata snapshots; never a live lookup.
struct EnrichmentMaps {
  PrefixMap<std::uint32_t> asn;
  PrefixMap<std::string> geo;
  PrefixMap<NetType> nettype;
  std::map<Address6, std::string> rdns;  // exact /128 match only
};

struct SourceMeta {
  SourceKey key;
  std::optional<std::uint32_t> asn;
  std::optional<std::string> country;
  NetType nettype = NetType::unknown;
  std::optional<std::string> rdns;
};

SourceMeta enrich(const SourceKey& key, const EnrichmentMaps& maps);

struct CsvLoadStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Header-bearing CSV with columns (prefix,value).
CsvLoadStats load_asn_csv(const std::string& path, EnrichmentMaps& maps);
CsvLoadStats load_geo_csv(const std::string& path, EnrichmentMaps& maps);
CsvLoadStats load_nettype_csv(const std::string& path, EnrichmentMaps& maps);
/// CSV with columns (address,name).
CsvLoadStats load_rdns_csv(const std::string& path, EnrichmentMaps& maps);

}  // namespace v6scope

#endif
