#include "v6scope/nist.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace v6scope {

namespace {

constexpr std::size_t kMinBits = 100;

void require_bits(const BitString& bits) {
  if (bits.size() < kMinBits)
    throw std::invalid_argument("test requires at least 100 bits");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::mutex fftw_mutex;

}  // namespace

std::string_view to_string(BitSection s) {
  return s == BitSection::subnet32 ? "subnet32" : "iid64";
}

std::string_view to_string(NistTest t) {
  switch (t) {
    case NistTest::frequency:
      return "frequency";
    case NistTest::runs:
      return "runs";
    case NistTest::fft:
      return "fft";
    case NistTest::cusum0:
      return "cusum0";
    case NistTest::cusum1:
      return "cusum1";
  }
  return "?";
}

BitString extract_bits(const ScanSession& session, BitSection section,
                       const Prefix6& telescope_prefix) {
  BitString bits;
  int first = section == BitSection::subnet32 ? 32 : 64;
  int count = section == BitSection::subnet32 ? 32 : 64;
  bits.reserve(session.targets.size() * count);
  for (const auto& t : session.targets) {
    if (!telescope_prefix.contains(t))
      throw std::invalid_argument("target " + t.str() +
                                  " outside telescope prefix " +
                                  telescope_prefix.str());
    for (int b = 0; b < count; ++b)
      bits.push_back(t.bit(first + b) ? 1 : 0);
  }
  return bits;
}

TestResult frequency_test(const BitString& bits, double alpha) {
  require_bits(bits);
  std::size_t n = bits.size();
  std::int64_t sum = 0;
  for (auto b : bits)
    sum += b ? 1 : -1;
  double s_obs = std::abs(static_cast<double>(sum)) /
                 std::sqrt(static_cast<double>(n));
  double p = std::erfc(s_obs / std::sqrt(2.0));
  return {NistTest::frequency, p, p >= alpha, n, false};
}

TestResult runs_test(const BitString& bits, double alpha) {
  require_bits(bits);
  std::size_t n = bits.size();
  std::size_t ones = 0;
  for (auto b : bits)
    ones += b;
  double pi = static_cast<double>(ones) / static_cast<double>(n);
  double tau = 2.0 / std::sqrt(static_cast<double>(n));
  if (std::abs(pi - 0.5) > tau)
    return {NistTest::runs, 0.0, false, n, true};
  std::size_t v = 1;
  for (std::size_t i = 0; i + 1 < n; ++i)
    v += bits[i] != bits[i + 1];
  double num = std::abs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
  double den = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
  double p = std::erfc(num / den);
  return {NistTest::runs, p, p >= alpha, n, false};
}

TestResult fft_test(const BitString& bits, double alpha) {
  require_bits(bits);
  std::size_t n = bits.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = bits[i] ? 1.0 : -1.0;
  std::vector<double> re(n / 2 + 1), im(n / 2 + 1);
  {
    auto* out = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    fftw_plan plan;
    {
      // Planning is not thread-safe; executing a private plan is.
      std::lock_guard<std::mutex> lock(fftw_mutex);
      plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(), out,
                                  FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    for (std::size_t i = 0; i <= n / 2; ++i) {
      re[i] = out[i][0];
      im[i] = out[i][1];
    }
    {
      std::lock_guard<std::mutex> lock(fftw_mutex);
      fftw_destroy_plan(plan);
    }
    fftw_free(out);
  }
  // Peaks below the 95% threshold, counted over bins 0 .. n/2-1.
  double threshold = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
  double n0 = 0.95 * static_cast<double>(n) / 2.0;
  std::size_t n1 = 0;
  for (std::size_t i = 0; i < n / 2; ++i)
    if (std::sqrt(re[i] * re[i] + im[i] * im[i]) < threshold)
      ++n1;
  double d = (static_cast<double>(n1) - n0) /
             std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
  double p = std::erfc(std::abs(d) / std::sqrt(2.0));
  return {NistTest::fft, p, p >= alpha, n, false};
}

TestResult cusum_test(const BitString& bits, bool backward, double alpha) {
  require_bits(bits);
  std::size_t n = bits.size();
  std::int64_t s = 0, z = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto b = backward ? bits[n - 1 - i] : bits[i];
    s += b ? 1 : -1;
    z = std::max<std::int64_t>(z, std::abs(s));
  }
  auto test = backward ? NistTest::cusum1 : NistTest::cusum0;
  if (z == 0)
    return {test, 1.0, 1.0 >= alpha, n, false};
  double sqn = std::sqrt(static_cast<double>(n));
  auto ni = static_cast<std::int64_t>(n);
  double sum1 = 0.0;
  for (std::int64_t k = (-ni / z + 1) / 4; k <= (ni / z - 1) / 4; ++k)
    sum1 += normal_cdf((4.0 * k + 1) * z / sqn) -
            normal_cdf((4.0 * k - 1) * z / sqn);
  double sum2 = 0.0;
  for (std::int64_t k = (-ni / z - 3) / 4; k <= (ni / z - 1) / 4; ++k)
    sum2 += normal_cdf((4.0 * k + 3) * z / sqn) -
            normal_cdf((4.0 * k + 1) * z / sqn);
  double p = 1.0 - sum1 + sum2;
  p = std::min(1.0, std::max(0.0, p));
  return {test, p, p >= alpha, n, false};
}

SessionRandomness session_randomness(const ScanSession& session,
                                     const RandomnessConfig& cfg,
                                     const Prefix6& telescope_prefix) {
  SessionRandomness out;
  if (session.packet_count < cfg.min_packets)
    return out;
  out.applicable = true;
  for (auto section : {BitSection::subnet32, BitSection::iid64}) {
    auto bits = extract_bits(session, section, telescope_prefix);
    SectionResult res;
    res.tests[NistTest::frequency] = frequency_test(bits, cfg.alpha);
    res.tests[NistTest::runs] = runs_test(bits, cfg.alpha);
    res.tests[NistTest::fft] = fft_test(bits, cfg.alpha);
    res.tests[NistTest::cusum0] = cusum_test(bits, false, cfg.alpha);
    res.tests[NistTest::cusum1] = cusum_test(bits, true, cfg.alpha);
    res.random = res.tests[NistTest::frequency].pass;
    out.sections[section] = std::move(res);
  }
  return out;
}

std::vector<SessionRandomness> run_randomness(
    const std::vector<ScanSession>& sessions, const RandomnessConfig& cfg,
    const Prefix6& telescope_prefix) {
  std::vector<SessionRandomness> out(sessions.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    try {
      out[i] = session_randomness(sessions[i], cfg, telescope_prefix);
    } catch (const std::exception& e) {
      out[i].applicable = false;
      out[i].error = e.what();
    }
  }
  return out;
}

}  // namespace v6scope
