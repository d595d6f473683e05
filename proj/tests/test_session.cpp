#include <omp.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "doctest.h"
#include "v6scope/rng.hpp"
#include "v6scope/session.hpp"

using namespace v6scope;

namespace {

ProbePacket pkt(std::int64_t ts_s, const std::string& src,
                const std::string& dst, const std::string& telescope = "T1") {
  ProbePacket p;
  p.ts_us = ts_s * 1000000;
  p.src = *Address6::parse(src);
  p.dst = *Address6::parse(dst);
  p.proto = Proto::icmp6;
  p.telescope = telescope;
  return p;
}

// Naive oracle: per (key, telescope) bucket, sort by the same tuple and cut
// wherever the gap exceeds the timeout. Kept deliberately simple and
// independent of the library's grouping machinery.
struct OracleSession {
  Address6 key;
  std::string telescope;
  std::vector<std::int64_t> ts;
};

std::vector<OracleSession> oracle_sessionize(
    const std::vector<ProbePacket>& packets, const SessionizerConfig& cfg) {
  using Row =
      std::tuple<std::int64_t, Address6, int, std::uint32_t, std::size_t>;
  std::map<std::pair<Address6, std::string>, std::vector<Row>> buckets;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const auto& p = packets[i];
    auto key = SourceKey::of(p.src, cfg.level).value;
    buckets[{key, p.telescope}].push_back(
        {p.ts_us, p.dst, static_cast<int>(p.proto), p.dport ? 1u + *p.dport : 0u,
         i});
  }
  std::vector<OracleSession> out;
  for (auto& [bk, rows] : buckets) {
    std::sort(rows.begin(), rows.end());
    OracleSession cur{bk.first, bk.second, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!cur.ts.empty() &&
          std::get<0>(rows[i]) - cur.ts.back() > cfg.timeout_us) {
        out.push_back(cur);
        cur.ts.clear();
      }
      cur.ts.push_back(std::get<0>(rows[i]));
    }
    if (!cur.ts.empty())
      out.push_back(cur);
  }
  return out;
}

void check_matches_oracle(const std::vector<ProbePacket>& packets,
                          const SessionizerConfig& cfg) {
  auto got = sessionize(packets, cfg);
  auto want = oracle_sessionize(packets, cfg);
  REQUIRE(got.size() == want.size());
  // Both orderings are (key, telescope, time); compare in lockstep.
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].source.value == want[i].key);
    CHECK(got[i].telescope == want[i].telescope);
    REQUIRE(got[i].packet_count == want[i].ts.size());
    CHECK(got[i].start_us == want[i].ts.front());
    CHECK(got[i].end_us == want[i].ts.back());
  }
}

std::vector<ProbePacket> random_trace(std::uint64_t seed,
                                      std::size_t max_packets = 2000,
                                      std::size_t max_sources = 50) {
  SplitMix64 rng(seed);
  std::size_t n = 1 + rng.below(max_packets);
  std::size_t sources = 1 + rng.below(max_sources);
  std::vector<ProbePacket> pkts;
  pkts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ProbePacket p;
    // Cluster sources inside a handful of /64s so net64 aggregation merges
    // some of them.
    std::uint64_t sid = rng.below(sources);
    p.src = Address6{0x20010db800010000ULL + (sid / 4), 1 + sid % 4};
    p.dst = Address6{0x20010db8f0000000ULL, rng.next() & 0xffff};
    p.ts_us = static_cast<std::int64_t>(rng.below(86400ULL * 3 * 1000000));
    p.proto = static_cast<Proto>(rng.below(3));
    if (p.proto != Proto::icmp6)
      p.dport = static_cast<std::uint16_t>(rng.below(1024));
    p.telescope = rng.below(4) == 0 ? "T2" : "T1";
    pkts.push_back(std::move(p));
  }
  return pkts;
}

}  // namespace

TEST_CASE("one packet forms one session") {
  auto sessions = sessionize({pkt(0, "2001:db8:1::5", "2001:db8::1")}, {});
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].packet_count == 1);
  CHECK(sessions[0].start_us == sessions[0].end_us);
}

TEST_CASE("gap equal to the timeout stays in-session, above splits") {
  std::vector<ProbePacket> pkts{
      pkt(0, "2001:db8:1::5", "2001:db8::1"),
      pkt(1800, "2001:db8:1::5", "2001:db8::2"),
      pkt(5401, "2001:db8:1::5", "2001:db8::3"),
  };
  auto sessions = sessionize(pkts, {});
  REQUIRE(sessions.size() == 2);
  CHECK(sessions[0].packet_count == 2);
  CHECK(sessions[1].packet_count == 1);
  CHECK(sessions[1].start_us == 5401 * 1000000LL);

  // 1800 -> 5400 is a gap of exactly T and must not split.
  pkts[2].ts_us = 5400 * 1000000LL;
  sessions = sessionize(pkts, {});
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].packet_count == 3);
}

TEST_CASE("net64 aggregation interleaves /128 sources of one /64") {
  std::vector<ProbePacket> pkts;
  for (int i = 0; i < 10; ++i)
    pkts.push_back(pkt(i * 100, i % 2 ? "2001:db8:1:2::a" : "2001:db8:1:2::b",
                       "2001:db8::1"));
  SessionizerConfig cfg;
  cfg.level = AggLevel::net64;
  auto sessions = sessionize(pkts, cfg);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].packet_count == 10);
  CHECK(sessions[0].source.value.str() == "2001:db8:1:2::");
  check_matches_oracle(pkts, cfg);

  cfg.level = AggLevel::addr128;
  auto per_addr = sessionize(pkts, cfg);
  CHECK(per_addr.size() == 2);
}

TEST_CASE("sessions are computed per telescope") {
  std::vector<ProbePacket> pkts{
      pkt(0, "2001:db8:1::5", "2001:db8::1", "T1"),
      pkt(10, "2001:db8:1::5", "2001:db8::1", "T2"),
  };
  auto sessions = sessionize(pkts, {});
  CHECK(sessions.size() == 2);
}

TEST_CASE("session fields summarize the run") {
  std::vector<ProbePacket> pkts;
  auto p1 = pkt(0, "2001:db8:1::5", "2001:db8::1");
  auto p2 = pkt(1, "2001:db8:1::5", "2001:db8::2");
  p2.proto = Proto::tcp;
  p2.dport = 443;
  p2.payload = {0xde, 0xad};
  auto p3 = pkt(2, "2001:db8:1::5", "2001:db8::1");
  p3.proto = Proto::udp;
  p3.dport = 53;
  pkts = {p1, p2, p3};
  auto sessions = sessionize(pkts, {});
  REQUIRE(sessions.size() == 1);
  const auto& s = sessions[0];
  CHECK(s.packet_count == 3);
  CHECK(s.distinct_targets == 2);
  CHECK(s.packets_by_proto[static_cast<int>(Proto::icmp6)] == 1);
  CHECK(s.packets_by_proto[static_cast<int>(Proto::tcp)] == 1);
  CHECK(s.dports.at(Proto::tcp).count(443) == 1);
  CHECK(s.dports.at(Proto::udp).count(53) == 1);
  CHECK(s.payload == std::vector<std::uint8_t>{0xde, 0xad});
  CHECK(s.targets.size() == 3);
}

TEST_CASE("partition and gap invariants hold on random traces") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto pkts = random_trace(seed);
    for (auto level : {AggLevel::addr128, AggLevel::net64}) {
      SessionizerConfig cfg;
      cfg.level = level;
      auto sessions = sessionize(pkts, cfg);

      std::size_t total = 0;
      std::map<std::pair<std::string, std::string>, std::int64_t> last_end;
      for (const auto& s : sessions) {
        total += s.packet_count;
        REQUIRE(!s.packet_idx.empty());
        // Gaps inside a session never exceed the timeout.
        for (std::size_t i = 1; i < s.packet_idx.size(); ++i) {
          auto gap = pkts[s.packet_idx[i]].ts_us - pkts[s.packet_idx[i - 1]].ts_us;
          CHECK(gap >= 0);
          CHECK(gap <= cfg.timeout_us);
        }
        // Between consecutive sessions of one key the gap exceeds it.
        auto bk = std::make_pair(s.source.value.str(), s.telescope);
        if (auto it = last_end.find(bk); it != last_end.end())
          CHECK(s.start_us - it->second > cfg.timeout_us);
        last_end[bk] = s.end_us;
      }
      CHECK(total == pkts.size());
      check_matches_oracle(pkts, cfg);
    }
  }
}

TEST_CASE("every addr128 packet appears in exactly one net64 session") {
  auto pkts = random_trace(99);
  SessionizerConfig cfg;
  cfg.level = AggLevel::net64;
  auto sessions = sessionize(pkts, cfg);
  std::vector<int> seen(pkts.size(), 0);
  for (const auto& s : sessions)
    for (auto idx : s.packet_idx)
      seen[idx]++;
  CHECK(std::count(seen.begin(), seen.end(), 1) ==
        static_cast<long>(pkts.size()));
}

TEST_CASE("output does not depend on input chunking or thread count") {
  auto pkts = random_trace(7);
  auto renumber = [](std::vector<ScanSession> v) {
    return v;
  };
  auto base = renumber(sessionize(pkts, {}));

  // Shuffled input.
  auto shuffled = pkts;
  SplitMix64 rng(123);
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
  auto from_shuffled = sessionize(shuffled, {});
  REQUIRE(base.size() == from_shuffled.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].source.value == from_shuffled[i].source.value);
    CHECK(base[i].start_us == from_shuffled[i].start_us);
    CHECK(base[i].packet_count == from_shuffled[i].packet_count);
    CHECK(base[i].targets == from_shuffled[i].targets);
  }

  // Different thread counts produce identical serialized output.
  int saved = omp_get_max_threads();
  std::ostringstream one, four;
  omp_set_num_threads(1);
  write_session_ndjson(one, sessionize(pkts, {}));
  omp_set_num_threads(4);
  write_session_ndjson(four, sessionize(pkts, {}));
  omp_set_num_threads(saved);
  CHECK(one.str() == four.str());
}

TEST_CASE("session ndjson round-trips") {
  auto pkts = random_trace(13, 400, 10);
  auto sessions = sessionize(pkts, {});
  std::ostringstream out;
  write_session_ndjson(out, sessions);
  std::istringstream in(out.str());
  SessionReadStats stats;
  auto back = read_session_ndjson(in, &stats);
  CHECK(stats.rejected == 0);
  REQUIRE(back.size() == sessions.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == sessions[i].id);
    CHECK(back[i].source == sessions[i].source);
    CHECK(back[i].telescope == sessions[i].telescope);
    CHECK(back[i].start_us == sessions[i].start_us);
    CHECK(back[i].end_us == sessions[i].end_us);
    CHECK(back[i].packet_count == sessions[i].packet_count);
    CHECK(back[i].targets == sessions[i].targets);
    CHECK(back[i].dports == sessions[i].dports);
    CHECK(back[i].packets_by_proto == sessions[i].packets_by_proto);
    CHECK(back[i].payload == sessions[i].payload);
  }
}
