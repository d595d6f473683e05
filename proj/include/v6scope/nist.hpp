#ifndef V6SCOPE_NIST_HPP
#define V6SCOPE_NIST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "v6scope/session.hpp"

namespace v6scope {

/// Address slice the bit stream is taken from: the 32 bits after the /32
/// telescope prefix, or the 64-bit interface identifier.
enum class BitSection { subnet32, iid64 };

std::string_view to_string(BitSection s);

struct RandomnessConfig {
  double alpha = 0.01;
  std::uint64_t min_packets = 100;
};

enum class NistTest { frequency, runs, fft, cusum0, cusum1 };

std::string_view to_string(NistTest t);

struct TestResult {
  NistTest test = NistTest::frequency;
  double p_value = 0.0;
  bool pass = false;          // p_value >= alpha
  std::size_t n_bits = 0;
  bool prereq_failed = false; // runs test only
};

using BitString = std::vector<std::uint8_t>;  // one bit per element, 0 or 1

/// Concatenates the chosen section of every target, arrival order,
/// MSB first. Throws std::invalid_argument when a target lies outside the
/// telescope prefix.
BitString extract_bits(const ScanSession& session, BitSection section,
                       const Prefix6& telescope_prefix);

// The four SP 800-22 tests. All throw std::invalid_argument below 100 bits.
TestResult frequency_test(const BitString& bits, double alpha = 0.01);
TestResult runs_test(const BitString& bits, double alpha = 0.01);
TestResult fft_test(const BitString& bits, double alpha = 0.01);
TestResult cusum_test(const BitString& bits, bool backward,
                      double alpha = 0.01);

struct SectionResult {
  std::map<NistTest, TestResult> tests;
  bool random = false;  // verdict: the frequency test alone gates it
};

struct SessionRandomness {
  bool applicable = false;  // packet count reached cfg.min_packets
  std::map<BitSection, SectionResult> sections;
  std::string error;  // set when bit extraction failed in a batch run
};

/// Runs the battery on both sections. The verdict per section follows the
/// frequency test; the other tests are reported for the breakdown only.
SessionRandomness session_randomness(const ScanSession& session,
                                     const RandomnessConfig& cfg,
                                     const Prefix6& telescope_prefix);

/// Battery over many sessions; parallel, deterministic output order.
std::vector<SessionRandomness> run_randomness(
    const std::vector<ScanSession>& sessions, const RandomnessConfig& cfg,
    const Prefix6& telescope_prefix);

}  // namespace v6scope

#endif
