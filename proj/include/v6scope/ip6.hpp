#ifndef V6SCOPE_IP6_HPP
#define V6SCOPE_IP6_HPP

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace v6scope {

/// A 128-bit IPv6 address held as two big-endian halves.
struct Address6 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  auto operator<=>(const Address6&) const = default;

  /// Bit at position `i` counting from the most significant bit (i = 0..127).
  bool bit(int i) const {
    return i < 64 ? (hi >> (63 - i)) & 1 : (lo >> (127 - i)) & 1;
  }
  Address6 with_bit(int i, bool v) const;

  /// Byte at position `i` in network order (i = 0..15).
  std::uint8_t byte(int i) const {
    std::uint64_t w = i < 8 ? hi : lo;
    return static_cast<std::uint8_t>(w >> (8 * (7 - (i & 7))));
  }

  /// Interface identifier, the low 64 bits.
  std::uint64_t iid() const { return lo; }

  /// Parses any RFC 4291 text form, including embedded dotted quads.
  static std::optional<Address6> parse(std::string_view text);

  /// Canonical RFC 5952 form: lowercase, :: compression, hex groups only.
  std::string str() const;
};

/// An IPv6 prefix with host bits cleared.
struct Prefix6 {
  Address6 base;
  int length = 0;

  auto operator<=>(const Prefix6&) const = default;

  bool contains(const Address6& a) const;

  /// Base address with the least significant bit set, e.g. 2001:db8::1 for
  /// 2001:db8::/32.
  Address6 low_byte_address() const;

  static std::optional<Prefix6> parse(std::string_view text);
  std::string str() const;

  /// Clears bits below the prefix length so the invariant holds.
  static Prefix6 of(const Address6& a, int length);
};

/// Splits a prefix into its two equal-size halves (lower, upper).
/// Throws std::invalid_argument for length 128.
std::pair<Prefix6, Prefix6> split(const Prefix6& p);

enum class AggLevel { addr128, net64 };

std::string_view to_string(AggLevel level);
std::optional<AggLevel> parse_agg_level(std::string_view text);

/// A scan-source identity, either a full address or its /64 network.
struct SourceKey {
  AggLevel level = AggLevel::addr128;
  Address6 value;

  auto operator<=>(const SourceKey&) const = default;

  static SourceKey of(const Address6& a, AggLevel level) {
    if (level == AggLevel::net64)
      return {level, Address6{a.hi, 0}};
    return {level, a};
  }
  std::string str() const;
};

/// Longest-prefix-match table backed by a binary trie.
template <typename T>
class PrefixMap {
 public:
  void insert(const Prefix6& p, T value) {
    Node* n = root_.get();
    for (int i = 0; i < p.length; ++i) {
      auto& child = p.base.bit(i) ? n->one : n->zero;
      if (!child)
        child = std::make_unique<Node>();
      n = child.get();
    }
    n->value = std::move(value);
    ++size_;
  }

  std::optional<T> longest_match(const Address6& a) const {
    std::optional<T> best;
    const Node* n = root_.get();
    for (int i = 0; n != nullptr; ++i) {
      if (n->value)
        best = n->value;
      if (i == 128)
        break;
      n = (a.bit(i) ? n->one : n->zero).get();
    }
    return best;
  }

  std::size_t size() const { return size_; }

 private:
  struct Node {
    std::unique_ptr<Node> zero, one;
    std::optional<T> value;
  };
  std::unique_ptr<Node> root_ = std::make_unique<Node>();
  std::size_t size_ = 0;
};

/// Longest prefix containing `a` among `table`, or nullopt.
template <typename T>
std::optional<T> longest_prefix_match(
    const std::vector<std::pair<Prefix6, T>>& table, const Address6& a) {
  std::optional<T> best;
  int best_len = -1;
  for (const auto& [p, tag] : table) {
    if (p.length > best_len && p.contains(a)) {
      best = tag;
      best_len = p.length;
    }
  }
  return best;
}

}  // namespace v6scope

#endif
