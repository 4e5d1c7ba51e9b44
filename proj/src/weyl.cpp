#include "modsig/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/FFT>

#include "modsig/parallel.hpp"

namespace modsig {

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

namespace {

constexpr std::size_t kSegment = std::size_t{1} << 16;

Phase to_phase(const BigInt& v) {
  // v < 2^128
  BigInt lo = v & BigInt(std::numeric_limits<std::uint64_t>::max());
  BigInt hi = v >> 64;
  return (static_cast<Phase>(hi.convert_to<std::uint64_t>()) << 64) | lo.convert_to<std::uint64_t>();
}

// Neumaier accumulator for complex values.
struct CompensatedSum {
  double re = 0, im = 0, cre = 0, cim = 0;
  static void add1(double& s, double& c, double x) {
    double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  void add(std::complex<double> z) {
    add1(re, cre, z.real());
    add1(im, cim, z.imag());
  }
  std::complex<double> value() const { return {re + cre, im + cim}; }
};

}  // namespace

PhaseReducer::PhaseReducer(const Frequency& beta, unsigned value_bits)
    : beta_(beta), fraction_bits_(std::max(value_bits, 64u) + 128) {
  ExtReal b = beta.approx(fraction_bits_ + 64);
  Mpfr f(b.precision() + 8);
  mpfr_frac(f.get(), b.mid().get(), MPFR_RNDN);
  if (mpfr_sgn(f.get()) < 0) mpfr_add_ui(f.get(), f.get(), 1, MPFR_RNDN);
  mpfr_mul_2ui(f.get(), f.get(), fraction_bits_, MPFR_RNDN);
  mpfr_get_z(frac_big_.backend().data(), f.get(), MPFR_RNDD);
  frac128_ = to_phase(frac_big_ >> (fraction_bits_ - 128));
  BigInt next = (frac_big_ >> (fraction_bits_ - 192)) & BigInt(std::numeric_limits<std::uint64_t>::max());
  frac_next64_ = next.convert_to<std::uint64_t>();
}

Phase PhaseReducer::operator()(const BigInt& v) const {
  if (v < 0) return Phase(0) - (*this)(BigInt(-v));
  if (bit_length(v) + 128 > fraction_bits_) return PhaseReducer(beta_, static_cast<unsigned>(bit_length(v)))(v);
  BigInt prod = v * frac_big_;
  BigInt mask = (BigInt(1) << fraction_bits_) - 1;
  prod &= mask;
  return to_phase(prod >> (fraction_bits_ - 128));
}

std::complex<double> unit(Phase p) {
  auto top = static_cast<std::int64_t>(static_cast<std::uint64_t>(p >> 64));
  double angle = 2.0 * std::numbers::pi * std::ldexp(static_cast<double>(top), -64);
  return {std::cos(angle), std::sin(angle)};
}

double to_turns(Phase p) { return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(p >> 64)), -64); }

std::size_t bin_of(Phase p, std::size_t bins) {
  const auto hi = static_cast<std::uint64_t>(p >> 64), lo = static_cast<std::uint64_t>(p);
  const unsigned __int128 b = bins;
  unsigned __int128 acc = hi * b + ((lo * b) >> 64);
  return static_cast<std::size_t>(acc >> 64);
}

std::vector<std::size_t> geometric_checkpoints(std::size_t n) {
  std::vector<std::size_t> c;
  for (std::size_t k = 1; k < n; k *= 2) c.push_back(k);
  if (n > 0) c.push_back(n);
  return c;
}

namespace {

// Shared driver: phase_at(i) gives the phase of term i.
template <class PhaseAt>
WeylSeries weyl_series_impl(std::size_t size, PhaseAt phase_at, std::span<const std::size_t> checkpoints,
                            unsigned workers) {
  std::vector<std::size_t> cps(checkpoints.begin(), checkpoints.end());
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (!cps.empty() && cps.back() > size) throw RangeError("checkpoint beyond the value stream");
  if (!cps.empty() && cps.front() == 0) throw std::invalid_argument("checkpoint N must be >= 1");
  const std::size_t end = cps.empty() ? 0 : cps.back();
  std::vector<std::size_t> bounds;
  for (std::size_t b = 0; b < end; b += kSegment) bounds.push_back(b);
  bounds.insert(bounds.end(), cps.begin(), cps.end());
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  if (bounds.empty() || bounds.front() != 0) bounds.insert(bounds.begin(), 0);
  const std::size_t segs = bounds.size() - 1;
  std::vector<std::complex<double>> part(segs);
  parallel_for(segs, workers, [&](std::size_t s) {
    CompensatedSum acc;
    std::complex<double> block = 0;
    for (std::size_t i = bounds[s], j = 0; i < bounds[s + 1]; ++i, ++j) {
      block += unit(phase_at(i));
      if ((j & 1023) == 1023) {
        acc.add(block);
        block = 0;
      }
    }
    acc.add(block);
    part[s] = acc.value();
  });
  WeylSeries out;
  CompensatedSum total;
  std::size_t ci = 0;
  for (std::size_t s = 0; s < segs; ++s) {
    total.add(part[s]);
    while (ci < cps.size() && cps[ci] == bounds[s + 1]) {
      out.checkpoints.push_back({cps[ci], total.value() / static_cast<double>(cps[ci])});
      ++ci;
    }
  }
  out.final_n = end;
  return out;
}

}  // namespace

template <class Int>
WeylSeries weyl_direct(std::span<const Int> values, const Frequency& beta, std::span<const std::size_t> checkpoints,
                       unsigned workers) {
  PhaseReducer red(beta);
  auto w = weyl_series_impl(values.size(), [&](std::size_t i) { return red(values[i]); }, checkpoints, workers);
  w.frequency_label = beta.label();
  return w;
}

template WeylSeries weyl_direct<std::uint32_t>(std::span<const std::uint32_t>, const Frequency&,
                                               std::span<const std::size_t>, unsigned);
template WeylSeries weyl_direct<std::int64_t>(std::span<const std::int64_t>, const Frequency&,
                                              std::span<const std::size_t>, unsigned);
template WeylSeries weyl_direct<std::uint64_t>(std::span<const std::uint64_t>, const Frequency&,
                                               std::span<const std::size_t>, unsigned);

WeylSeries weyl_direct_phases(std::span<const Phase> phases, std::span<const std::size_t> checkpoints, unsigned workers) {
  return weyl_series_impl(phases.size(), [&](std::size_t i) { return phases[i]; }, checkpoints, workers);
}

template <class Int>
std::vector<Phase> phases_of(std::span<const Int> values, const Frequency& beta) {
  PhaseReducer red(beta);
  std::vector<Phase> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = red(values[i]);
  return out;
}

template std::vector<Phase> phases_of<std::uint32_t>(std::span<const std::uint32_t>, const Frequency&);
template std::vector<Phase> phases_of<std::int64_t>(std::span<const std::int64_t>, const Frequency&);
template std::vector<Phase> phases_of<std::uint64_t>(std::span<const std::uint64_t>, const Frequency&);

std::vector<Phase> replacement_phases(const ReplacementMap& map, const Frequency& beta, std::uint64_t count) {
  const std::size_t L = map.target.size();
  std::size_t max_bits = 64;
  for (std::size_t j = 1; j <= L; ++j) max_bits = std::max(max_bits, bit_length(map.target.term(j)));
  PhaseReducer red(beta, static_cast<unsigned>(max_bits));
  std::vector<Phase> tp(L);
  for (std::size_t j = 1; j <= L; ++j) tp[j - 1] = red(map.target.term(j));
  std::vector<Phase> out(count);
  std::vector<Digit> digits;
  for (std::uint64_t n = 1; n < count; ++n) {
    encode_digits_u64(n, map.source, digits);
    Phase p = 0;
    for (const auto& d : digits) {
      if (d.index > L) throw RangeError("replacement target too short for " + map.name);
      p += tp[d.index - 1] * d.multiplicity;
    }
    out[n] = p;
  }
  return out;
}

namespace {

struct RecurrenceState {
  std::vector<BigInt> a;
  std::vector<std::complex<double>> e;   // e(beta b_j), index j-1
  std::vector<std::complex<double>> s;   // S(a_j), index j-1
};

// S(m) for 0 <= m < a_k, using S(a_j) for j < k.
std::complex<double> partial_sum(const RecurrenceState& st, BigInt m, std::size_t k) {
  std::complex<double> total = 0, prefix = 1;
  std::size_t j = k;
  while (m != 0) {
    while (st.a[j - 1] > m) --j;
    BigInt q = m / st.a[j - 1];
    m -= q * st.a[j - 1];
    for (BigInt r = 0; r < q; ++r) {
      total += prefix * st.s[j - 1];
      prefix *= st.e[j - 1];
    }
  }
  return total;
}

RecurrenceState build_state(const ReplacementMap& map, const Frequency& beta, std::size_t upto) {
  if (upto > map.source.size() || upto > map.target.size())
    throw RangeError("replacement map not materialized to index " + std::to_string(upto));
  if (upto >= 2) verify_signature(map.source, 1, upto);
  RecurrenceState st;
  auto terms = map.source.terms();
  st.a.assign(terms.begin(), terms.begin() + upto);
  std::size_t max_bits = 64;
  for (std::size_t j = 1; j <= upto; ++j) max_bits = std::max(max_bits, bit_length(map.target.term(j)));
  PhaseReducer red(beta, static_cast<unsigned>(max_bits));
  for (std::size_t j = 1; j <= upto; ++j) st.e.push_back(unit(red(map.target.term(j))));
  st.s.push_back(1.0);  // S(a_1) = S(1) = e(beta A(0)) = 1
  for (std::size_t k = 2; k <= upto; ++k)
    st.s.push_back(st.s[k - 2] + st.e[k - 2] * partial_sum(st, st.a[k - 1] - st.a[k - 2], k - 1));
  return st;
}

}  // namespace

std::vector<WeylCheckpoint> weyl_recurrence(const ReplacementMap& map, const Frequency& beta, std::size_t upto_index) {
  auto st = build_state(map, beta, upto_index);
  std::vector<WeylCheckpoint> out;
  for (std::size_t k = 1; k <= upto_index; ++k)
    out.push_back({st.a[k - 1].convert_to<std::size_t>(), st.s[k - 1] / st.a[k - 1].convert_to<double>()});
  return out;
}

std::complex<double> weyl_recurrence_at(const ReplacementMap& map, const Frequency& beta, const BigInt& n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::size_t k = map.source.table().count_at_most(n);
  if (k >= map.source.size()) throw RangeError("replacement map not materialized past n");
  auto st = build_state(map, beta, k + 1);
  return partial_sum(st, n, k + 1) / n.convert_to<double>();
}

FourierSpectrum fft_scan(std::span<const std::int64_t> values, std::size_t T, std::size_t M, std::string label) {
  if (T > values.size()) throw RangeError("fft_scan: T exceeds the available terms");
  FourierSpectrum out;
  out.source_label = std::move(label);
  std::int64_t vmax = 0;
  std::size_t used = 0;
  for (; used < T; ++used) {
    if (values[used] < 0) throw std::invalid_argument("fft_scan needs nonnegative values");
    if (static_cast<std::size_t>(values[used]) >= kMaxFftGrid) {
      out.truncated = true;
      break;
    }
    vmax = std::max(vmax, values[used]);
  }
  if (M == 0) {
    M = 1;
    while (M <= static_cast<std::size_t>(vmax)) M *= 2;
  }
  if ((M & (M - 1)) != 0) throw std::invalid_argument("grid size must be a power of two");
  if (M <= static_cast<std::size_t>(vmax)) throw std::invalid_argument("grid size too small for the largest value");
  if (M > kMaxFftGrid) throw std::invalid_argument("grid size above the 2^26 cap");
  std::vector<double> c(M, 0.0);
  for (std::size_t i = 0; i < used; ++i) c[values[i]] += 1.0;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> f;
  fft.fwd(f, c);
  out.grid_size = M;
  out.term_count = used;
  out.value_span = static_cast<std::size_t>(vmax) + 1;
  out.magnitudes.resize(M);
  for (std::size_t j = 0; j < M; ++j) out.magnitudes[j] = std::abs(f[j]) / static_cast<double>(used);
  return out;
}

std::vector<SpectralPeak> top_peaks(const FourierSpectrum& s, std::size_t k) {
  const std::size_t M = s.grid_size;
  std::vector<SpectralPeak> peaks;
  if (M < 4) return peaks;
  const auto& m = s.magnitudes;
  // The DC lobe of a prefix spanning V values has sidelobes of size about
  // 1/(2 V ||x||); skip ||x|| < 64/V.
  const std::size_t guard = s.value_span ? (64 * M + s.value_span - 1) / s.value_span : 1;
  for (std::size_t j = M / 2; j < M; ++j) {
    if (M - j < guard) continue;
    double left = m[j - 1], right = m[(j + 1) % M];
    if (m[j] >= left && m[j] >= right && m[j] > 0)
      peaks.push_back({j, static_cast<double>(j) / static_cast<double>(M), m[j]});
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.magnitude > b.magnitude; });
  if (peaks.size() > k) peaks.resize(k);
  return peaks;
}

double CircleHistogram::max_deviation() const {
  double worst = 0;
  for (std::size_t b = 0; b < bins; ++b) worst = std::max(worst, std::abs(density(b) - 1.0));
  return worst;
}

namespace {

template <class PhaseAt>
CircleHistogram histogram_impl(std::size_t size, PhaseAt phase_at, std::size_t bins, unsigned workers) {
  if (bins == 0) throw std::invalid_argument("bins must be >= 1");
  const std::size_t segs = (size + kSegment - 1) / kSegment;
  std::vector<std::vector<std::uint64_t>> part(segs, std::vector<std::uint64_t>(bins, 0));
  parallel_for(segs, workers, [&](std::size_t s) {
    auto& c = part[s];
    for (std::size_t i = s * kSegment, e = std::min(size, i + kSegment); i < e; ++i) ++c[bin_of(phase_at(i), bins)];
  });
  CircleHistogram h;
  h.bins = bins;
  h.counts.assign(bins, 0);
  for (const auto& c : part)
    for (std::size_t b = 0; b < bins; ++b) h.counts[b] += c[b];
  h.total = size;
  return h;
}

template <class PhaseAt>
std::vector<std::complex<double>> fourier_impl(std::size_t size, PhaseAt phase_at, std::size_t d_max, unsigned workers) {
  const std::size_t segs = (size + kSegment - 1) / kSegment;
  std::vector<std::vector<std::complex<double>>> part(segs, std::vector<std::complex<double>>(d_max));
  parallel_for(segs, workers, [&](std::size_t s) {
    std::vector<CompensatedSum> acc(d_max);
    // Plain real arithmetic: std::complex multiplication carries NaN checks.
    std::vector<double> bre(d_max, 0.0), bim(d_max, 0.0);
    auto flush = [&] {
      for (std::size_t d = 0; d < d_max; ++d) {
        acc[d].add({bre[d], bim[d]});
        bre[d] = bim[d] = 0.0;
      }
    };
    for (std::size_t i = s * kSegment, e = std::min(size, i + kSegment), j = 0; i < e; ++i, ++j) {
      const std::complex<double> z = unit(phase_at(i));
      const double zr = z.real(), zi = z.imag();
      double wr = zr, wi = zi;
      for (std::size_t d = 0; d < d_max; ++d) {
        bre[d] += wr;
        bim[d] += wi;
        const double t = wr * zr - wi * zi;
        wi = wr * zi + wi * zr;
        wr = t;
      }
      if ((j & 1023) == 1023) flush();
    }
    flush();
    for (std::size_t d = 0; d < d_max; ++d) part[s][d] = acc[d].value();
  });
  std::vector<CompensatedSum> total(d_max);
  for (const auto& p : part)
    for (std::size_t d = 0; d < d_max; ++d) total[d].add(p[d]);
  std::vector<std::complex<double>> out(d_max);
  for (std::size_t d = 0; d < d_max; ++d) out[d] = total[d].value() / static_cast<double>(size);
  return out;
}

}  // namespace

template <class Int>
CircleHistogram histogram(std::span<const Int> values, const Frequency& beta, std::size_t bins, unsigned workers) {
  PhaseReducer red(beta);
  auto h = histogram_impl(values.size(), [&](std::size_t i) { return red(values[i]); }, bins, workers);
  h.frequency_label = beta.label();
  return h;
}

template CircleHistogram histogram<std::uint32_t>(std::span<const std::uint32_t>, const Frequency&, std::size_t, unsigned);
template CircleHistogram histogram<std::int64_t>(std::span<const std::int64_t>, const Frequency&, std::size_t, unsigned);
template CircleHistogram histogram<std::uint64_t>(std::span<const std::uint64_t>, const Frequency&, std::size_t, unsigned);

CircleHistogram histogram_phases(std::span<const Phase> phases, std::size_t bins, unsigned workers) {
  return histogram_impl(phases.size(), [&](std::size_t i) { return phases[i]; }, bins, workers);
}

template <class Int>
std::vector<std::complex<double>> fourier_coeffs(std::span<const Int> values, const Frequency& beta, std::size_t d_max,
                                                 unsigned workers) {
  if (values.empty()) throw std::invalid_argument("fourier_coeffs needs at least one value");
  PhaseReducer red(beta);
  return fourier_impl(values.size(), [&](std::size_t i) { return red(values[i]); }, d_max, workers);
}

template std::vector<std::complex<double>> fourier_coeffs<std::uint32_t>(std::span<const std::uint32_t>,
                                                                         const Frequency&, std::size_t, unsigned);
template std::vector<std::complex<double>> fourier_coeffs<std::int64_t>(std::span<const std::int64_t>, const Frequency&,
                                                                        std::size_t, unsigned);
template std::vector<std::complex<double>> fourier_coeffs<std::uint64_t>(std::span<const std::uint64_t>,
                                                                         const Frequency&, std::size_t, unsigned);

std::vector<std::complex<double>> fourier_coeffs_phases(std::span<const Phase> phases, std::size_t d_max,
                                                        unsigned workers) {
  if (phases.empty()) throw std::invalid_argument("fourier_coeffs needs at least one value");
  return fourier_impl(phases.size(), [&](std::size_t i) { return phases[i]; }, d_max, workers);
}

nlohmann::ordered_json to_json(const WeylSeries& w) {
  nlohmann::ordered_json j;
  j["frequency"] = w.frequency_label;
  j["sequence"] = w.sequence_label;
  j["final_n"] = w.final_n;
  auto& arr = j["checkpoints"] = nlohmann::ordered_json::array();
  for (const auto& c : w.checkpoints)
    arr.push_back({{"n", c.n}, {"re", c.value.real()}, {"im", c.value.imag()}, {"abs", std::abs(c.value)}});
  return j;
}

void write_csv(std::ostream& out, const CircleHistogram& h) {
  out << "bin_index,count,density\n";
  for (std::size_t b = 0; b < h.bins; ++b) out << b << ',' << h.counts[b] << ',' << h.density(b) << '\n';
}

void write_csv(std::ostream& out, const FourierSpectrum& s) {
  out << "grid_index,magnitude\n";
  for (std::size_t j = 0; j < s.grid_size; ++j) out << j << ',' << s.magnitudes[j] << '\n';
}

}  // namespace modsig
