#include "v6scope/ndjson.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace v6scope {

namespace {

using nlohmann::json;

std::string parse_packet(const json& j, ProbePacket& p) {
  if (!j.is_object())
    return "record is not an object";

  // ts: integer microseconds or an RFC 3339 string.
  auto ts = j.find("ts");
  if (ts == j.end())
    return "missing field: ts";
  if (ts->is_number_integer()) {
    p.ts_us = ts->get<std::int64_t>();
  } else if (ts->is_string()) {
    auto us = parse_rfc3339_us(ts->get<std::string>());
    if (!us)
      return "unparseable ts string";
    p.ts_us = *us;
  } else {
    return "ts must be integer microseconds or RFC 3339 text";
  }

  auto address = [&](const char* field, Address6& out) -> std::string {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
      return std::string("missing field: ") + field;
    auto a = Address6::parse(it->get<std::string>());
    if (!a)
      return std::string("malformed address in ") + field;
    out = *a;
    return {};
  };
  if (auto err = address("src", p.src); !err.empty())
    return err;
  if (auto err = address("dst", p.dst); !err.empty())
    return err;

  auto proto = j.find("proto");
  if (proto == j.end() || !proto->is_string())
    return "missing field: proto";
  auto pr = parse_proto(proto->get<std::string>());
  if (!pr)
    return "unknown proto: " + proto->get<std::string>();
  p.proto = *pr;

  auto port = [&](const char* field, std::optional<std::uint16_t>& out)
      -> std::string {
    auto it = j.find(field);
    if (it == j.end() || it->is_null())
      return {};
    if (!it->is_number_integer())
      return std::string(field) + " must be an integer";
    auto v = it->get<std::int64_t>();
    if (v < 0 || v > 65535)
      return std::string(field) + " out of range";
    out = static_cast<std::uint16_t>(v);
    return {};
  };
  if (auto err = port("sport", p.sport); !err.empty())
    return err;
  if (auto err = port("dport", p.dport); !err.empty())
    return err;

  if (auto it = j.find("icmp_type"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer())
      return "icmp_type must be an integer";
    auto v = it->get<std::int64_t>();
    if (v < 0 || v > 255)
      return "icmp_type out of range";
    p.icmp_type = static_cast<std::uint8_t>(v);
  }

  if (auto it = j.find("tcp_flags"); it != j.end() && !it->is_null()) {
    if (!it->is_string())
      return "tcp_flags must be a string";
    auto f = parse_tcp_flags(it->get<std::string>());
    if (!f)
      return "tcp_flags must be a subset of SAFRPU";
    p.tcp_flags = *f;
  }

  if (auto it = j.find("payload_hex"); it != j.end() && !it->is_null()) {
    if (!it->is_string())
      return "payload_hex must be a string";
    auto bytes = hex_decode(it->get<std::string>());
    if (!bytes)
      return "payload_hex is not lowercase hex";
    p.payload = std::move(*bytes);
  }

  auto tel = j.find("telescope");
  if (tel == j.end() || !tel->is_string())
    return "missing field: telescope";
  p.telescope = tel->get<std::string>();

  if (!p.valid())
    return p.proto == Proto::icmp6 ? "icmp6 record carries ports"
                                   : "tcp/udp record lacks dport";
  return {};
}

}  // namespace

ReadStats read_packet_ndjson(std::istream& in,
                             const std::function<void(ProbePacket&&)>& sink,
                             const IngestOptions& opts) {
  ReadStats stats;
  std::string line;
  std::size_t lineno = 0;
  auto excluded = [&](const ProbePacket& p) {
    for (const auto& pre : opts.exclude)
      if (pre.contains(p.src) || pre.contains(p.dst))
        return true;
    return false;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      stats.rejected++;
      stats.errors.push_back({lineno, "invalid JSON"});
      continue;
    }
    ProbePacket p;
    if (auto err = parse_packet(j, p); !err.empty()) {
      stats.rejected++;
      stats.errors.push_back({lineno, err});
      continue;
    }
    if (excluded(p)) {
      stats.excluded++;
      continue;
    }
    if (p.payload.size() > opts.payload_cap)
      p.payload.resize(opts.payload_cap);
    stats.accepted++;
    sink(std::move(p));
  }
  return stats;
}

std::vector<ProbePacket> read_packet_file(const std::string& path,
                                          ReadStats* stats,
                                          const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::vector<ProbePacket> out;
  auto s = read_packet_ndjson(
      in, [&](ProbePacket&& p) { out.push_back(std::move(p)); }, opts);
  if (stats)
    *stats = std::move(s);
  return out;
}

std::string packet_to_json(const ProbePacket& p) {
  json j;
  j["ts"] = p.ts_us;
  j["src"] = p.src.str();
  j["dst"] = p.dst.str();
  j["proto"] = std::string(to_string(p.proto));
  if (p.sport)
    j["sport"] = *p.sport;
  if (p.dport)
    j["dport"] = *p.dport;
  if (p.icmp_type)
    j["icmp_type"] = *p.icmp_type;
  if (p.tcp_flags)
    j["tcp_flags"] = tcp_flags_str(*p.tcp_flags);
  if (!p.payload.empty())
    j["payload_hex"] = hex_encode(p.payload);
  j["telescope"] = p.telescope;
  return j.dump();
}

void write_packet_ndjson(std::ostream& out,
                         const std::vector<ProbePacket>& packets) {
  for (const auto& p : packets)
    out << packet_to_json(p) << '\n';
}

}  // namespace v6scope
