#include "v6scope/enrich.hpp"

#include <fstream>
#include <functional>
#include <stdexcept>

namespace v6scope {

std::string_view to_string(NetType t) {
  switch (t) {
    case NetType::hosting:
      return "hosting";
    case NetType::isp:
      return "isp";
    case NetType::education:
      return "education";
    case NetType::business:
      return "business";
    case NetType::government:
      return "government";
    case NetType::unknown:
      return "unknown";
  }
  return "unknown";
}

std::optional<NetType> parse_net_type(std::string_view text) {
  if (text == "hosting")
    return NetType::hosting;
  if (text == "isp")
    return NetType::isp;
  if (text == "education")
    return NetType::education;
  if (text == "business")
    return NetType::business;
  if (text == "government")
    return NetType::government;
  if (text == "unknown")
    return NetType::unknown;
  return std::nullopt;
}

SourceMeta enrich(const SourceKey& key, const EnrichmentMaps& maps) {
  SourceMeta meta;
  meta.key = key;
  meta.asn = maps.asn.longest_match(key.value);
  meta.country = maps.geo.longest_match(key.value);
  meta.nettype = maps.nettype.longest_match(key.value).value_or(NetType::unknown);
  if (key.level == AggLevel::addr128) {
    auto it = maps.rdns.find(key.value);
    if (it != maps.rdns.end())
      meta.rdns = it->second;
  }
  return meta;
}

namespace {

CsvLoadStats load_two_column(
    const std::string& path,
    const std::function<bool(std::string_view, std::string_view)>& row) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  CsvLoadStats stats;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (header) {
      header = false;
      continue;
    }
    if (line.empty())
      continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      stats.rejected++;
      continue;
    }
    if (row(std::string_view(line).substr(0, comma),
            std::string_view(line).substr(comma + 1)))
      stats.accepted++;
    else
      stats.rejected++;
  }
  return stats;
}

}  // namespace

CsvLoadStats load_asn_csv(const std::string& path, EnrichmentMaps& maps) {
  return load_two_column(path, [&](std::string_view k, std::string_view v) {
    auto p = Prefix6::parse(k);
    if (!p || v.empty())
      return false;
    std::uint32_t asn = 0;
    for (char c : v) {
      if (c < '0' || c > '9')
        return false;
      asn = asn * 10 + static_cast<std::uint32_t>(c - '0');
    }
    maps.asn.insert(*p, asn);
    return true;
  });
}

CsvLoadStats load_geo_csv(const std::string& path, EnrichmentMaps& maps) {
  return load_two_column(path, [&](std::string_view k, std::string_view v) {
    auto p = Prefix6::parse(k);
    if (!p || v.empty())
      return false;
    maps.geo.insert(*p, std::string(v));
    return true;
  });
}

CsvLoadStats load_nettype_csv(const std::string& path, EnrichmentMaps& maps) {
  return load_two_column(path, [&](std::string_view k, std::string_view v) {
    auto p = Prefix6::parse(k);
    auto t = parse_net_type(v);
    if (!p || !t)
      return false;
    maps.nettype.insert(*p, *t);
    return true;
  });
}

CsvLoadStats load_rdns_csv(const std::string& path, EnrichmentMaps& maps) {
  return load_two_column(path, [&](std::string_view k, std::string_view v) {
    auto a = Address6::parse(k);
    if (!a || v.empty())
      return false;
    maps.rdns[*a] = std::string(v);
    return true;
  });
}

}  // namespace v6scope
