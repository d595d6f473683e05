#include "v6scope/session.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace v6scope {

namespace {

struct SortKey {
  Address6 key;
  std::uint32_t telescope;
  std::int64_t ts;
  Address6 dst;
  std::uint8_t proto;
  std::uint32_t dport;  // absent sorts first
  std::uint32_t index;

  bool operator<(const SortKey& o) const {
    return std::tie(key, telescope, ts, dst, proto, dport, index) <
           std::tie(o.key, o.telescope, o.ts, o.dst, o.proto, o.dport,
                    o.index);
  }
};

}  // namespace

std::vector<ScanSession> sessionize(const std::vector<ProbePacket>& packets,
                                    const SessionizerConfig& cfg) {
  // Telescope names to dense ids, in lexicographic order.
  std::map<std::string, std::uint32_t> tel_ids;
  for (const auto& p : packets)
    tel_ids.emplace(p.telescope, 0);
  {
    std::uint32_t next = 0;
    for (auto& [name, id] : tel_ids)
      id = next++;
  }

  std::vector<SortKey> order(packets.size());
  for (std::uint32_t i = 0; i < packets.size(); ++i) {
    const auto& p = packets[i];
    order[i] = {p.source(cfg.level).value,
                tel_ids[p.telescope],
                p.ts_us,
                p.dst,
                static_cast<std::uint8_t>(p.proto),
                p.dport ? 1u + *p.dport : 0u,
                i};
  }
  std::sort(order.begin(), order.end());

  // Session boundaries: group change or gap > timeout.
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && order[j].key == order[i].key &&
           order[j].telescope == order[i].telescope &&
           order[j].ts - order[j - 1].ts <= cfg.timeout_us)
      ++j;
    bounds.emplace_back(i, j);
    i = j;
  }

  std::vector<ScanSession> sessions(bounds.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t b = 0; b < bounds.size(); ++b) {
    auto [lo, hi] = bounds[b];
    ScanSession& s = sessions[b];
    const auto& first = packets[order[lo].index];
    s.source = first.source(cfg.level);
    s.telescope = first.telescope;
    s.start_us = order[lo].ts;
    s.end_us = order[hi - 1].ts;
    s.packet_idx.reserve(hi - lo);
    s.targets.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& p = packets[order[k].index];
      s.packet_idx.push_back(order[k].index);
      s.targets.push_back(p.dst);
      s.packets_by_proto[static_cast<int>(p.proto)]++;
      if (p.dport)
        s.dports[p.proto].insert(*p.dport);
      if (s.payload.empty() && !p.payload.empty())
        s.payload = p.payload;
    }
    s.packet_count = hi - lo;
    std::vector<Address6> uniq = s.targets;
    std::sort(uniq.begin(), uniq.end());
    s.distinct_targets =
        static_cast<std::uint64_t>(std::unique(uniq.begin(), uniq.end()) -
                                   uniq.begin());
  }

  for (std::size_t b = 0; b < sessions.size(); ++b)
    sessions[b].id = b;
  return sessions;
}

namespace {

using nlohmann::json;

}  // namespace

std::string session_to_json(const ScanSession& s) {
  json j;
  j["id"] = s.id;
  j["source"] = s.source.value.str();
  j["level"] = std::string(to_string(s.source.level));
  j["telescope"] = s.telescope;
  j["start"] = s.start_us;
  j["end"] = s.end_us;
  j["packets"] = s.packet_count;
  j["distinct_targets"] = s.distinct_targets;
  json protos = json::array();
  json by_proto = json::object();
  for (int i = 0; i < 3; ++i) {
    if (s.packets_by_proto[i] > 0) {
      auto name = std::string(to_string(static_cast<Proto>(i)));
      protos.push_back(name);
      by_proto[name] = s.packets_by_proto[i];
    }
  }
  j["protocols"] = protos;
  j["packets_by_proto"] = by_proto;
  json dports = json::object();
  for (const auto& [proto, ports] : s.dports) {
    json arr = json::array();
    for (auto p : ports)
      arr.push_back(p);
    dports[std::string(to_string(proto))] = arr;
  }
  j["dports"] = dports;
  json targets = json::array();
  for (const auto& t : s.targets)
    targets.push_back(t.str());
  j["targets"] = targets;
  if (!s.payload.empty())
    j["payload_hex"] = hex_encode(s.payload);
  return j.dump();
}

void write_session_ndjson(std::ostream& out,
                          const std::vector<ScanSession>& sessions) {
  for (const auto& s : sessions)
    out << session_to_json(s) << '\n';
}

std::vector<ScanSession> read_session_ndjson(std::istream& in,
                                             SessionReadStats* stats) {
  std::vector<ScanSession> out;
  SessionReadStats st;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      st.rejected++;
      continue;
    }
    try {
      ScanSession s;
      s.id = j.at("id").get<std::uint64_t>();
      auto level = parse_agg_level(j.at("level").get<std::string>());
      auto value = Address6::parse(j.at("source").get<std::string>());
      if (!level || !value)
        throw std::runtime_error("bad source");
      s.source = SourceKey{*level, *value};
      s.telescope = j.at("telescope").get<std::string>();
      s.start_us = j.at("start").get<std::int64_t>();
      s.end_us = j.at("end").get<std::int64_t>();
      s.packet_count = j.at("packets").get<std::uint64_t>();
      s.distinct_targets = j.at("distinct_targets").get<std::uint64_t>();
      if (auto it = j.find("packets_by_proto"); it != j.end())
        for (auto& [k, v] : it->items()) {
          auto pr = parse_proto(k);
          if (!pr)
            throw std::runtime_error("bad proto");
          s.packets_by_proto[static_cast<int>(*pr)] = v.get<std::uint64_t>();
        }
      if (auto it = j.find("dports"); it != j.end())
        for (auto& [k, v] : it->items()) {
          auto pr = parse_proto(k);
          if (!pr)
            throw std::runtime_error("bad proto");
          for (auto& port : v)
            s.dports[*pr].insert(port.get<std::uint16_t>());
        }
      for (auto& t : j.at("targets")) {
        auto a = Address6::parse(t.get<std::string>());
        if (!a)
          throw std::runtime_error("bad target");
        s.targets.push_back(*a);
      }
      if (auto it = j.find("payload_hex"); it != j.end()) {
        auto bytes = hex_decode(it->get<std::string>());
        if (!bytes)
          throw std::runtime_error("bad payload");
        s.payload = std::move(*bytes);
      }
      st.accepted++;
      out.push_back(std::move(s));
    } catch (const std::exception&) {
      st.rejected++;
    }
  }
  if (stats)
    *stats = st;
  return out;
}

std::vector<ScanSession> read_session_file(const std::string& path,
                                           SessionReadStats* stats) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  return read_session_ndjson(in, stats);
}

}  // namespace v6scope
