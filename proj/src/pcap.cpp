#include "v6scope/pcap.hpp"

#include <cstring>
#include <fstream>
#include <istream>

namespace v6scope {

namespace {

struct Cursor {
  const std::uint8_t* p;
  std::size_t len;
  bool swap = false;

  bool have(std::size_t n) const { return len >= n; }
  std::uint8_t u8(std::size_t off) const { return p[off]; }
  std::uint16_t u16(std::size_t off) const {
    std::uint16_t v;
    std::memcpy(&v, p + off, 2);
    return swap ? static_cast<std::uint16_t>(v << 8 | v >> 8) : v;
  }
  std::uint32_t u32(std::size_t off) const {
    std::uint32_t v;
    std::memcpy(&v, p + off, 4);
    return swap ? __builtin_bswap32(v) : v;
  }
  std::uint16_t be16(std::size_t off) const {
    return static_cast<std::uint16_t>(p[off] << 8 | p[off + 1]);
  }
  void advance(std::size_t n) {
    p += n;
    len -= n;
  }
};

constexpr std::uint32_t kPcapMagicUs = 0xA1B2C3D4;
constexpr std::uint32_t kPcapMagicUsSwap = 0xD4C3B2A1;
constexpr std::uint32_t kPcapMagicNs = 0xA1B23C4D;
constexpr std::uint32_t kPcapMagicNsSwap = 0x4D3CB2A1;
constexpr std::uint32_t kPcapngShb = 0x0A0D0D0A;

constexpr int kLinkEthernet = 1;
constexpr int kLinkRaw = 101;

// Decodes one captured frame into a ProbePacket. Returns false when the
// frame is not a usable IPv6 transport packet (counted as skipped).
bool decode_frame(const std::uint8_t* data, std::size_t len, int linktype,
                  std::int64_t ts_us, const std::string& telescope,
                  std::size_t payload_cap, ProbePacket& out) {
  std::size_t off = 0;
  if (linktype == kLinkEthernet) {
    if (len < 14)
      return false;
    std::uint16_t ethertype =
        static_cast<std::uint16_t>(data[12] << 8 | data[13]);
    off = 14;
    if (ethertype == 0x8100 || ethertype == 0x88A8) {
      if (len < 18)
        return false;
      ethertype = static_cast<std::uint16_t>(data[16] << 8 | data[17]);
      off = 18;
    }
    if (ethertype != 0x86DD)
      return false;
  } else if (linktype == kLinkRaw) {
    off = 0;
  } else {
    return false;
  }

  if (len < off + 40)
    return false;
  const std::uint8_t* ip = data + off;
  if ((ip[0] >> 4) != 6)
    return false;

  auto read_addr = [&](std::size_t at) {
    Address6 a;
    for (int i = 0; i < 8; ++i)
      a.hi = a.hi << 8 | ip[at + i];
    for (int i = 8; i < 16; ++i)
      a.lo = a.lo << 8 | ip[at + i];
    return a;
  };
  out.src = read_addr(8);
  out.dst = read_addr(24);
  out.ts_us = ts_us;
  out.telescope = telescope;

  int next = ip[6];
  std::size_t pos = off + 40;
  // Walk extension headers until a transport header or an unsupported type.
  for (int hops = 0; hops < 8; ++hops) {
    if (next == 0 || next == 43 || next == 60) {
      if (len < pos + 8)
        return false;
      std::size_t ext = 8u * (data[pos + 1] + 1u);
      next = data[pos];
      pos += ext;
    } else if (next == 44) {
      if (len < pos + 8)
        return false;
      std::uint16_t frag =
          static_cast<std::uint16_t>(data[pos + 2] << 8 | data[pos + 3]);
      if ((frag & 0xFFF8) != 0)
        return false;  // non-first fragment: no transport header
      next = data[pos];
      pos += 8;
    } else {
      break;
    }
    if (pos > len)
      return false;
  }

  auto take_payload = [&](std::size_t at) {
    std::size_t n = len > at ? len - at : 0;
    n = std::min(n, payload_cap);
    out.payload.assign(data + at, data + at + n);
  };

  if (next == 58) {
    if (len < pos + 4)
      return false;
    out.proto = Proto::icmp6;
    out.icmp_type = data[pos];
    take_payload(pos + 4);
    return true;
  }
  if (next == 6) {
    if (len < pos + 20)
      return false;
    out.proto = Proto::tcp;
    out.sport = static_cast<std::uint16_t>(data[pos] << 8 | data[pos + 1]);
    out.dport = static_cast<std::uint16_t>(data[pos + 2] << 8 | data[pos + 3]);
    out.tcp_flags = data[pos + 13] & 0x3F;
    std::size_t doff = (data[pos + 12] >> 4) * 4u;
    if (doff < 20 || len < pos + doff)
      return false;
    take_payload(pos + doff);
    return true;
  }
  if (next == 17) {
    if (len < pos + 8)
      return false;
    out.proto = Proto::udp;
    out.sport = static_cast<std::uint16_t>(data[pos] << 8 | data[pos + 1]);
    out.dport = static_cast<std::uint16_t>(data[pos + 2] << 8 | data[pos + 3]);
    take_payload(pos + 8);
    return true;
  }
  return false;
}

bool is_excluded(const ProbePacket& p, const IngestOptions& opts) {
  for (const auto& pre : opts.exclude)
    if (pre.contains(p.src) || pre.contains(p.dst))
      return true;
  return false;
}

void read_classic(Cursor c, const std::string& telescope,
                  const IngestOptions& opts, PcapResult& res) {
  std::uint32_t magic = c.u32(0);
  bool nanos = magic == kPcapMagicNs || magic == kPcapMagicNsSwap;
  if (!c.have(24)) {
    res.error = "truncated pcap header";
    return;
  }
  int linktype = static_cast<int>(c.u32(20) & 0x0FFFFFFF);
  c.advance(24);

  while (c.len > 0) {
    if (!c.have(16)) {
      res.error = "truncated pcap record header";
      return;
    }
    std::uint32_t ts_sec = c.u32(0);
    std::uint32_t ts_frac = c.u32(4);
    std::uint32_t incl = c.u32(8);
    c.advance(16);
    if (!c.have(incl)) {
      res.error = "truncated pcap record";
      return;
    }
    std::int64_t us = static_cast<std::int64_t>(ts_sec) * 1000000 +
                      (nanos ? ts_frac / 1000 : ts_frac);
    ProbePacket p;
    if (decode_frame(c.p, incl, linktype, us, telescope, opts.payload_cap,
                     p)) {
      if (is_excluded(p, opts))
        res.skipped++;
      else
        res.packets.push_back(std::move(p));
    } else {
      res.skipped++;
    }
    c.advance(incl);
  }
}

void read_pcapng(Cursor c, const std::string& telescope,
                 const IngestOptions& opts, PcapResult& res) {
  struct Iface {
    int linktype = kLinkEthernet;
    // Ticks per second; EPB timestamps divide by this.
    std::uint64_t ticks_per_s = 1000000;
  };
  std::vector<Iface> ifaces;

  while (c.len > 0) {
    if (!c.have(12)) {
      res.error = "truncated pcapng block";
      return;
    }
    std::uint32_t type = c.u32(0);
    if (type == kPcapngShb) {
      // Byte-order magic decides endianness for this section.
      std::uint32_t bom;
      std::memcpy(&bom, c.p + 8, 4);
      c.swap = bom == 0x4D3C2B1A;
      ifaces.clear();
    }
    std::uint32_t total = c.u32(4);
    if (total < 12 || total % 4 != 0 || !c.have(total)) {
      res.error = "truncated pcapng block";
      return;
    }
    const std::uint8_t* body = c.p + 8;
    std::size_t body_len = total - 12;

    if (type == 1) {  // interface description
      Iface ifc;
      if (body_len >= 8) {
        Cursor b{body, body_len, c.swap};
        ifc.linktype = b.u16(0);
        // Scan options for if_tsresol (code 9).
        std::size_t o = 8;
        while (o + 4 <= body_len) {
          Cursor ob{body + o, body_len - o, c.swap};
          std::uint16_t code = ob.u16(0), olen = ob.u16(2);
          if (code == 0)
            break;
          if (code == 9 && olen >= 1) {
            std::uint8_t r = body[o + 4];
            ifc.ticks_per_s = 1;
            if (r & 0x80) {
              ifc.ticks_per_s = 1ULL << (r & 0x7F);
            } else {
              for (int i = 0; i < r; ++i)
                ifc.ticks_per_s *= 10;
            }
          }
          o += 4 + ((olen + 3u) & ~3u);
        }
      }
      ifaces.push_back(ifc);
    } else if (type == 6) {  // enhanced packet
      Cursor b{body, body_len, c.swap};
      if (body_len >= 20) {
        std::uint32_t ifid = b.u32(0);
        std::uint64_t ticks =
            (static_cast<std::uint64_t>(b.u32(4)) << 32) | b.u32(8);
        std::uint32_t cap = b.u32(12);
        Iface ifc = ifid < ifaces.size() ? ifaces[ifid] : Iface{};
        if (20 + cap <= body_len) {
          std::int64_t us = static_cast<std::int64_t>(
              static_cast<__int128>(ticks) * 1000000 / ifc.ticks_per_s);
          ProbePacket p;
          if (decode_frame(body + 20, cap, ifc.linktype, us, telescope,
                           opts.payload_cap, p)) {
            if (is_excluded(p, opts))
              res.skipped++;
            else
              res.packets.push_back(std::move(p));
          } else {
            res.skipped++;
          }
        } else {
          res.error = "truncated pcapng packet block";
          return;
        }
      }
    } else if (type == 3) {
      // Simple packet blocks carry no timestamp; unusable for session math.
      res.skipped++;
    }
    c.advance(total);
  }
}

}  // namespace

bool looks_like_pcap(const unsigned char* data, std::size_t len) {
  if (len < 4)
    return false;
  std::uint32_t magic;
  std::memcpy(&magic, data, 4);
  return magic == kPcapMagicUs || magic == kPcapMagicUsSwap ||
         magic == kPcapMagicNs || magic == kPcapMagicNsSwap ||
         magic == kPcapngShb;
}

PcapResult read_pcap(std::istream& in, const std::string& telescope,
                     const IngestOptions& opts) {
  std::vector<std::uint8_t> buf{std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>()};
  PcapResult res;
  if (buf.size() < 4) {
    res.error = "not a capture file";
    return res;
  }
  std::uint32_t magic;
  std::memcpy(&magic, buf.data(), 4);
  Cursor c{buf.data(), buf.size(), false};
  if (magic == kPcapngShb) {
    read_pcapng(c, telescope, opts, res);
  } else if (magic == kPcapMagicUs || magic == kPcapMagicNs) {
    read_classic(c, telescope, opts, res);
  } else if (magic == kPcapMagicUsSwap || magic == kPcapMagicNsSwap) {
    c.swap = true;
    read_classic(c, telescope, opts, res);
  } else {
    res.error = "not a capture file";
  }
  return res;
}

PcapResult read_pcap_file(const std::string& path,
                          const std::string& telescope,
                          const IngestOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    PcapResult res;
    res.error = "cannot open " + path;
    return res;
  }
  return read_pcap(in, telescope, opts);
}

}  // namespace v6scope
