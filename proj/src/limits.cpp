#include "modsig/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace modsig {

std::string to_string(ProductStatus s) {
  switch (s) {
    case ProductStatus::converged: return "converged";
    case ProductStatus::divergent_argument: return "divergent_argument";
    case ProductStatus::undecided: return "undecided";
  }
  return "undecided";
}

InfiniteProductCoeff factorial_product_coeff(int d, const std::string& tag, std::size_t truncation, double tolerance) {
  if (tag != "inv_e" && tag != "e") throw std::invalid_argument("factorial product frequency must be inv_e or e");
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  InfiniteProductCoeff out;
  out.d = d;
  out.tag = tag;
  out.truncation_N = truncation;
  if (d == 0) {
    out.partial_products.push_back({truncation, 1.0});
    out.status = ProductStatus::converged;
    return out;
  }
  const Frequency beta = (tag == "e" ? Frequency::euler() : Frequency::inverse_euler()).scaled(BigRational(d));
  // x_n = {d beta n!} loses log2(n) bits per step; start with bits((N+2)!) + 64 to spare.
  double log2_fact = 0;
  for (std::size_t n = 2; n <= truncation + 2; ++n) log2_fact += std::log2(static_cast<double>(n));
  const unsigned prec = static_cast<unsigned>(log2_fact) + 64 + 32;
  ExtReal b = beta.approx(prec);
  Mpfr x(prec);
  mpfr_frac(x.get(), b.mid().get(), MPFR_RNDN);
  if (mpfr_sgn(x.get()) < 0) mpfr_add_ui(x.get(), x.get(), 1, MPFR_RNDN);

  std::complex<double> prod = 1.0;
  double arg = 0, arg_half = 0;
  double s_next[2] = {0, 0};
  std::size_t next_mark = 1;
  for (std::size_t n = 1; n <= truncation + 2; ++n) {
    mpfr_mul_ui(x.get(), x.get(), n, MPFR_RNDN);
    mpfr_frac(x.get(), x.get(), MPFR_RNDN);
    double s = mpfr_get_d(x.get(), MPFR_RNDN);
    if (s > 0.5) s -= 1.0;
    if (n > truncation) {
      s_next[n - truncation - 1] = s;
      continue;
    }
    const double c = std::cos(std::numbers::pi * s);
    prod *= std::polar(c, std::numbers::pi * s);
    arg += std::numbers::pi * s;
    if (n == truncation / 2) arg_half = arg;
    if (n == next_mark || n == truncation) {
      out.partial_products.push_back({n, prod});
      if (n == next_mark) next_mark *= 2;
    }
  }
  const double N = static_cast<double>(truncation);
  out.accumulated_argument = arg;
  out.tail_bound = std::numbers::pi * std::numbers::pi / (2.0 * N) +
                   std::numbers::pi * (N + 1.0) * std::abs(s_next[0] + s_next[1]);
  const bool moving = std::abs(arg - arg_half) > 0.1;
  if (out.tail_bound < tolerance) out.status = ProductStatus::converged;
  else if (std::abs(arg) > 4 * std::numbers::pi && moving) out.status = ProductStatus::divergent_argument;
  else out.status = ProductStatus::undecided;
  return out;
}

std::vector<DecayBoundEntry> coeff_decay_bound_check(std::span<const double> coeffs, int d_max) {
  if (d_max < 1 || static_cast<std::size_t>(d_max) > coeffs.size()) throw RangeError("d_max outside coefficient vector");
  std::vector<DecayBoundEntry> out;
  for (int d = 1; d <= d_max; ++d) {
    double bound = std::pow(0.98, d);
    out.push_back({d, coeffs[d - 1], bound, coeffs[d - 1] <= bound});
  }
  return out;
}

DensityBoundResult density_bound_check(const CircleHistogram& hist, std::span<const std::uint32_t> values,
                                       double B_lin, int C_mult) {
  std::uint32_t vmax = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (static_cast<double>(values[i]) > B_lin * static_cast<double>(i + 1))
      throw HypothesisError("linear bound a_n <= B n fails at n=" + std::to_string(i + 1));
    vmax = std::max(vmax, values[i]);
  }
  std::vector<std::uint8_t> mult(static_cast<std::size_t>(vmax) + 1, 0);
  for (auto v : values) {
    if (mult[v] < 255) ++mult[v];
    if (mult[v] > C_mult)
      throw HypothesisError("value " + std::to_string(v) + " repeats more than C=" + std::to_string(C_mult) + " times");
  }
  DensityBoundResult r;
  for (std::size_t b = 0; b < hist.bins; ++b) r.max_density = std::max(r.max_density, hist.density(b));
  r.bound = 4.0 * B_lin * C_mult;
  r.pass = r.max_density <= r.bound;
  return r;
}

namespace {

BinRun run_around(const std::vector<double>& dens, std::size_t seed, auto pred) {
  const std::size_t B = dens.size();
  std::size_t left = 0, right = 0;
  while (left + 1 < B && pred(dens[(seed + B - left - 1) % B])) ++left;
  while (left + right + 1 < B && pred(dens[(seed + right + 1) % B])) ++right;
  return {(seed + B - left) % B, left + right + 1};
}

double run_center(const BinRun& r, std::size_t B) {
  double c = (static_cast<double>(r.first) + static_cast<double>(r.length) / 2.0) / static_cast<double>(B);
  return c - std::floor(c);
}

double interp_circular(const std::vector<double>& dens, double pos) {
  // pos in bins; bin k has its center at k + 0.5
  const double B = static_cast<double>(dens.size());
  double x = pos - 0.5;
  x -= B * std::floor(x / B);
  auto k = static_cast<std::size_t>(std::floor(x));
  double t = x - std::floor(x);
  return (1 - t) * dens[k % dens.size()] + t * dens[(k + 1) % dens.size()];
}

}  // namespace

ValleyHillReport valley_hill_analysis(const CircleHistogram& hist, const Frequency& alpha, const ValleyHillOptions& opt) {
  ValleyHillReport r;
  const std::size_t B = hist.bins;
  std::vector<double> dens(B);
  for (std::size_t b = 0; b < B; ++b) dens[b] = hist.density(b);
  const auto mn = std::min_element(dens.begin(), dens.end()), mx = std::max_element(dens.begin(), dens.end());
  const std::size_t min_run = opt.min_run ? opt.min_run : std::max<std::size_t>(1, B / 64);
  {
    ExtReal two_alpha = alpha.approx(64) * BigInt(2);
    double t = two_alpha.to_double();
    r.expected_offset = t - std::floor(t);
  }
  if (*mn <= 0 || *mx / *mn < opt.min_contrast) {
    r.reason = "no contrast between extremal densities";
    return r;
  }
  const double lo_lim = *mn * (1 + opt.flat_tolerance), hi_lim = *mx * (1 - opt.flat_tolerance);
  r.valley = run_around(dens, mn - dens.begin(), [&](double v) { return v <= lo_lim; });
  r.hill = run_around(dens, mx - dens.begin(), [&](double v) { return v >= hi_lim; });
  if (r.valley.length < min_run || r.hill.length < min_run) {
    r.reason = "flat runs shorter than " + std::to_string(min_run) + " bins";
    return r;
  }
  auto mean_over = [&](const BinRun& run) {
    double s = 0;
    for (std::size_t i = 0; i < run.length; ++i) s += dens[(run.first + i) % B];
    return s / static_cast<double>(run.length);
  };
  r.valley_height = mean_over(r.valley);
  r.hill_height = mean_over(r.hill);
  r.height_ratio = r.hill_height / r.valley_height;
  double off = run_center(r.valley, B) - run_center(r.hill, B);
  r.offset = off - std::floor(off);

  const double shift = r.expected_offset * static_cast<double>(B);
  r.overlay.resize(B);
  for (std::size_t b = 0; b < B; ++b)
    r.overlay[b] = r.valley_height + r.hill_height - interp_circular(dens, static_cast<double>(b) + 0.5 - shift);
  for (std::size_t i = 0; i < r.valley.length; ++i) {
    std::size_t b = (r.valley.first + i) % B;
    r.fit_residual = std::max(r.fit_residual, std::abs(dens[b] - r.overlay[b]) / r.hill_height);
  }
  r.decided = true;
  return r;
}

nlohmann::ordered_json to_json(const ValleyHillReport& r) {
  nlohmann::ordered_json j;
  j["decided"] = r.decided;
  if (!r.decided) j["reason"] = r.reason;
  j["valley"] = {{"first_bin", r.valley.first}, {"length", r.valley.length}, {"height", r.valley_height}};
  j["hill"] = {{"first_bin", r.hill.first}, {"length", r.hill.length}, {"height", r.hill_height}};
  j["height_ratio"] = r.height_ratio;
  j["offset"] = r.offset;
  j["expected_offset"] = r.expected_offset;
  j["fit_residual"] = r.fit_residual;
  return j;
}

PreimageSplit preimage_split_histograms(const Frequency& beta, const HofstadterTable& h, std::size_t N,
                                        std::size_t bins) {
  auto values = h.head(N);
  std::uint32_t vmax = 0;
  for (auto v : values) vmax = std::max(vmax, v);
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(vmax) + 1, 0);
  for (auto v : values) {
    if (hits[v] == 2) throw HypothesisError("value " + std::to_string(v) + " has more than two preimages");
    ++hits[v];
  }
  PhaseReducer red(beta);
  PreimageSplit out;
  auto blank = [&] {
    CircleHistogram c;
    c.bins = bins;
    c.counts.assign(bins, 0);
    c.frequency_label = beta.label();
    return c;
  };
  out.total = out.uniform_part = out.eta1 = out.eta2 = blank();
  for (auto v : values) ++out.total.counts[bin_of(red(v), bins)];
  out.total.total = N;
  for (std::uint32_t v = 0; v <= vmax; ++v) {
    if (hits[v] == 0) continue;
    std::size_t b = bin_of(red(v), bins);
    ++out.uniform_part.counts[b];
    ++out.distinct_values;
    if (hits[v] == 2) ++out.eta1.counts[b];
    else ++out.eta2.counts[b];
  }
  // Densities of the parts share the normalization of the total.
  out.uniform_part.total = out.eta1.total = out.eta2.total = N;
  return out;
}

std::vector<std::vector<std::uint64_t>> fold_histogram(const CircleHistogram& hist, std::size_t m) {
  if (m == 0 || hist.bins % m != 0) throw std::invalid_argument("bin count must be a multiple of the fold");
  const std::size_t B = hist.bins / m;
  std::vector<std::vector<std::uint64_t>> seg(m);
  for (std::size_t j = 0; j < m; ++j) seg[j].assign(hist.counts.begin() + j * B, hist.counts.begin() + (j + 1) * B);
  return seg;
}

double scaled_copies_deviation(const CircleHistogram& scaled, const CircleHistogram& base, std::size_t m) {
  auto seg = fold_histogram(scaled, m);
  if (seg[0].size() != base.bins) throw std::invalid_argument("scaled histogram needs m times the base bins");
  double base_mass = 0;
  for (auto c : base.counts) base_mass += static_cast<double>(c);
  double worst = 0;
  for (const auto& s : seg) {
    double mass = 0;
    for (auto c : s) mass += static_cast<double>(c);
    for (std::size_t b = 0; b < base.bins; ++b) {
      double ref = static_cast<double>(base.counts[b]) / base_mass;
      worst = std::max(worst, std::abs(static_cast<double>(s[b]) / mass / ref - 1.0));
    }
  }
  return worst;
}

std::vector<MultisetCheckpoint> multiset_histogram_identity(const HofstadterTable& h, const Frequency& beta,
                                                            std::size_t bins, std::uint64_t limit) {
  if (h.depth() != 3) throw std::invalid_argument("multiset identity is stated for depth 3");
  if (h.upto() < limit) throw RangeError("Hofstadter table shorter than the identity limit");
  auto base = hofstadter_base(3, limit);
  auto a = base.words();
  PhaseReducer red(beta);
  std::vector<std::size_t> bin(limit);
  for (std::uint64_t i = 0; i < limit; ++i) bin[i] = bin_of(red(h(i)), bins);
  std::vector<MultisetCheckpoint> out;
  // prefix[n] = histogram of the first h_n values
  std::vector<std::vector<std::uint64_t>> prefix(a.size() + 1);
  std::vector<std::uint64_t> run(bins, 0);
  std::size_t next = 1;
  for (std::uint64_t i = 0; i <= limit && next <= a.size(); ++i) {
    while (next <= a.size() && a[next - 1] == i) prefix[next++] = run;
    if (i < limit) ++run[bin[i]];
  }
  for (std::size_t n = 4; n <= a.size() && a[n - 1] <= limit; ++n) {
    auto rhs = prefix[n - 1];
    const std::uint64_t shift = a[n - 3], count = a[n - 4];
    for (std::uint64_t l = 0; l < count; ++l) ++rhs[bin_of(red(shift + h(l)), bins)];
    out.push_back({n, a[n - 1], rhs == prefix[n]});
  }
  return out;
}

DecayExponentFit fourier_decay_exponent(std::span<const std::complex<double>> coeffs, std::size_t d_lo,
                                        std::size_t d_hi) {
  if (d_lo < 1 || d_hi > coeffs.size() || d_hi < d_lo + 2) throw RangeError("decay fit window outside coefficients");
  std::vector<double> xs, ys;
  for (std::size_t d = d_lo; d <= d_hi; ++d) {
    double m = std::abs(coeffs[d - 1]);
    if (m <= 0) continue;
    xs.push_back(std::log(static_cast<double>(d)));
    ys.push_back(std::log(m));
  }
  Eigen::MatrixXd A(xs.size(), 2);
  Eigen::VectorXd y(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i];
    y(i) = ys[i];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  const double ssr = (A * c - y).squaredNorm();
  const double mean = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size()).mean();
  double sxx = 0;
  for (double x : xs) sxx += (x - mean) * (x - mean);
  DecayExponentFit f;
  f.exponent = c(1);
  f.stderr_ = std::sqrt(ssr / static_cast<double>(xs.size() - 2) / sxx);
  f.ci_low = f.exponent - 1.96 * f.stderr_;
  f.ci_high = f.exponent + 1.96 * f.stderr_;
  f.d_lo = d_lo;
  f.d_hi = d_hi;
  return f;
}

nlohmann::ordered_json to_json(const InfiniteProductCoeff& c) {
  nlohmann::ordered_json j;
  j["d"] = c.d;
  j["frequency"] = c.tag;
  j["truncation"] = c.truncation_N;
  j["status"] = to_string(c.status);
  j["abs"] = std::abs(c.value());
  j["re"] = c.value().real();
  j["im"] = c.value().imag();
  j["tail_bound"] = c.tail_bound;
  j["accumulated_argument"] = c.accumulated_argument;
  auto& pp = j["partial_products"] = nlohmann::ordered_json::array();
  for (const auto& [n, v] : c.partial_products) pp.push_back({{"n", n}, {"abs", std::abs(v)}, {"re", v.real()}, {"im", v.imag()}});
  return j;
}

}  // namespace modsig
