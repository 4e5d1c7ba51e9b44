#include "modsig/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "modsig/algebra.hpp"
#include "modsig/hofstadter.hpp"
#include "modsig/limits.hpp"
#include "modsig/parallel.hpp"
#include "modsig/precision.hpp"
#include "modsig/weyl.hpp"

namespace modsig {

namespace {

constexpr std::size_t kBig = 10'000'000;
constexpr std::size_t kMid = 1'000'000;
constexpr std::size_t kSmall = 100'000;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// H_d(0..upto), shared between criteria run in one process.
std::shared_ptr<const HofstadterTable> hofstadter_cached(int d, std::size_t upto) {
  static std::mutex mu;
  static std::map<std::pair<int, std::size_t>, std::shared_ptr<const HofstadterTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{d, upto}];
  if (!slot) slot = std::make_shared<const HofstadterTable>(eval_direct(d, upto));
  return slot;
}

// H(1..n)
std::span<const std::uint32_t> h_values(const HofstadterTable& h, std::size_t n) { return h.head(n + 1).subspan(1); }

double max_abs(std::span<const std::complex<double>> c) {
  double m = 0;
  for (auto z : c) m = std::max(m, std::abs(z));
  return m;
}

CriterionResult c1(unsigned) {
  CriterionResult r;
  r.pass = true;
  for (int d = 1; d <= 7; ++d) {
    auto a = eval_direct(d, kSmall), b = eval_shift(d, kSmall);
    auto va = a.head(kSmall + 1), vb = b.head(kSmall + 1);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < va.size(); ++i) mismatches += va[i] != vb[i];
    r.measurements["d" + std::to_string(d)] = mismatches;
    r.pass = r.pass && mismatches == 0;
  }
  r.summary = r.pass ? "direct and shift agree for d=1..7, N=1e5" : "mismatch between direct and shift evaluation";
  return r;
}

CriterionResult c2(unsigned) {
  static const std::uint32_t expected[15] = {1, 1, 2, 3, 4, 4, 5, 5, 6, 7, 7, 8, 9, 10, 10};
  auto h = eval_direct(3, 16);
  CriterionResult r;
  r.pass = true;
  auto& got = r.measurements["first15"] = nlohmann::ordered_json::array();
  for (int n = 1; n <= 15; ++n) {
    got.push_back(h(n));
    r.pass = r.pass && h(n) == expected[n - 1];
  }
  r.measurements["H16"] = h(16);
  r.pass = r.pass && h(16) == 11;
  r.summary = "H(1..15) " + std::string(r.pass ? "match" : "differ") + ", H(16)=" + std::to_string(h(16));
  return r;
}

CriterionResult c3(unsigned) {
  auto seq = generate_recurrent(narayana_spec(), 120);
  auto alpha = named_frequency("alpha3");
  std::vector<double> xs, ys;
  for (std::size_t k = 10; k <= 120; ++k) {
    xs.push_back(static_cast<double>(k));
    ys.push_back(dist_to_int(alpha, seq.term(k)).log_mid());
  }
  Eigen::MatrixXd A(xs.size(), 2);
  Eigen::VectorXd y(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    A(i, 0) = 1;
    A(i, 1) = xs[i];
    y(i) = ys[i];
  }
  const double slope = A.colPivHouseholderQr().solve(y)(1);
  const double a = alpha.to_double();
  const double expected = -std::log(std::pow(a, -0.5));
  // |theta| from the root finder should equal alpha^{-1/2}
  auto roots = isolate_roots(alpha_polynomial(3));
  double theta = 0;
  for (const auto& z : roots.roots)
    if (!z.real) theta = std::abs(z.center);
  CriterionResult r;
  const double rel = std::abs(slope - expected) / std::abs(expected);
  r.pass = rel <= 0.02 && std::abs(theta - std::pow(a, -0.5)) < 1e-12;
  r.measurements["slope"] = slope;
  r.measurements["expected"] = expected;
  r.measurements["relative_error"] = rel;
  r.measurements["theta_modulus"] = theta;
  r.summary = "slope " + fmt("%.6f", slope) + " vs " + fmt("%.6f", expected) + " (" + fmt("%.2f", 100 * rel) +
              "%, limit 2%), |theta| " + fmt("%.6f", theta);
  return r;
}

CriterionResult c4(unsigned workers) {
  auto h = hofstadter_cached(3, kBig);
  auto v = h_values(*h, kBig);
  CriterionResult r;
  r.pass = true;
  std::string s;
  for (const char* tag : {"sqrt2", "sqrt3", "e"}) {
    auto beta = named_frequency(tag);
    auto hist = histogram<std::uint32_t>(v, beta, 512, workers);
    auto mu = fourier_coeffs<std::uint32_t>(v, beta, 5, workers);
    const double dev = hist.max_deviation(), m = max_abs(mu);
    r.measurements[tag] = {{"max_bin_deviation", dev}, {"max_mu_d_le_5", m}};
    r.pass = r.pass && dev < 0.03 && m < 0.02;
    s += std::string(tag) + " dev " + fmt("%.4f", dev) + " mu " + fmt("%.4f", m) + "; ";
  }
  auto alpha = named_frequency("alpha3");
  auto hist = histogram<std::uint32_t>(v, alpha, 512, workers);
  auto mu = fourier_coeffs<std::uint32_t>(v, alpha, 1, workers);
  const double dev = hist.max_deviation(), m = std::abs(mu[0]);
  r.measurements["alpha"] = {{"max_bin_deviation", dev}, {"mu_1", m}};
  r.pass = r.pass && dev > 0.25 && m > 0.05;
  r.summary = s + "alpha dev " + fmt("%.4f", dev) + " mu(1) " + fmt("%.4f", m);
  return r;
}

CriterionResult c5(unsigned) {
  auto h = hofstadter_cached(3, kBig);
  auto v = h_values(*h, kBig);
  CriterionResult r;
  r.pass = true;
  for (int m : {2, 3, 5, 7}) {
    std::vector<std::uint64_t> c(m, 0);
    for (auto x : v) ++c[x % m];
    double worst = 0;
    for (auto x : c) worst = std::max(worst, std::abs(static_cast<double>(x) / static_cast<double>(v.size()) * m - 1));
    r.measurements["m" + std::to_string(m)] = worst;
    r.pass = r.pass && worst < 0.01;
    r.summary += "m=" + std::to_string(m) + " " + fmt("%.2e", worst) + " ";
  }
  r.summary += "(relative, limit 1%)";
  return r;
}

CriterionResult c6(unsigned workers) {
  auto h = hofstadter_cached(3, kBig);
  auto v = h_values(*h, kBig);
  auto alpha = named_frequency("alpha3");
  auto base = histogram<std::uint32_t>(v, alpha, 512, workers);
  auto scaled = histogram<std::uint32_t>(v, alpha.scaled(BigRational(1, 3)), 3 * 512, workers);
  const double dev = scaled_copies_deviation(scaled, base, 3);
  CriterionResult r;
  r.pass = dev < 0.03;
  r.measurements["max_relative_deviation"] = dev;
  r.summary = "segment-wise deviation " + fmt("%.4f", dev) + " (limit 0.03)";
  return r;
}

CriterionResult c7(unsigned workers) {
  auto h = hofstadter_cached(3, kBig);
  auto alpha = named_frequency("alpha3");
  auto hist = histogram<std::uint32_t>(h_values(*h, kBig), alpha, 512, workers);
  auto vh = valley_hill_analysis(hist, alpha);
  CriterionResult r;
  r.measurements = to_json(vh);
  double off_bins = std::abs(vh.offset - vh.expected_offset);
  off_bins = std::min(off_bins, 1 - off_bins) * 512;
  r.measurements["offset_error_bins"] = off_bins;
  r.pass = vh.decided && vh.height_ratio >= 1.9 && vh.height_ratio <= 2.1 && off_bins <= 2 && vh.fit_residual < 0.05;
  r.summary = "ratio " + fmt("%.4f", vh.height_ratio) + ", offset " + fmt("%.5f", vh.offset) + " vs " +
              fmt("%.5f", vh.expected_offset) + " (" + fmt("%.2f", off_bins) + " bins), residual " +
              fmt("%.4f", vh.fit_residual);
  return r;
}

CriterionResult c8(unsigned workers) {
  auto h = hofstadter_cached(3, kBig);
  auto v = h_values(*h, kBig);
  auto hist = histogram<std::uint32_t>(v, named_frequency("alpha3"), 512, workers);
  CriterionResult r;
  try {
    auto d = density_bound_check(hist, v, 1.0, 2);
    r.pass = d.pass;
    r.measurements = {{"max_density", d.max_density}, {"bound", d.bound}, {"hypotheses", "hold"}};
    r.summary = "max density " + fmt("%.4f", d.max_density) + " <= " + fmt("%.0f", d.bound) + ", H(n) <= n and preimages <= 2";
  } catch (const HypothesisError& e) {
    r.measurements = {{"hypotheses", e.what()}};
    r.summary = e.what();
  }
  return r;
}

CriterionResult c9(unsigned workers) {
  CriterionResult r;
  auto prod = factorial_product_coeff(1, "inv_e", 10000);
  constexpr std::size_t N = std::size_t{1} << 20;
  auto f = generate_factorial_sums(N - 1);
  std::vector<std::int64_t> vals{0};
  for (auto x : f.machine()) vals.push_back(x);
  std::vector<std::size_t> cp{N};
  auto w = weyl_direct<std::int64_t>(vals, Frequency::inverse_euler(), cp, workers);
  const double emp = std::abs(w.checkpoints.back().value), lim = std::abs(prod.value());
  const bool match = std::abs(emp - lim) <= 0.01;

  std::vector<double> mags;
  for (int d = 1; d <= 50; ++d) mags.push_back(std::abs(factorial_product_coeff(d, "inv_e", 10000).value()));
  auto bound = coeff_decay_bound_check(mags, 50);
  bool bound_ok = true;
  double worst = 0;
  for (const auto& b : bound) {
    bound_ok = bound_ok && b.pass;
    worst = std::max(worst, b.value / b.bound);
  }
  auto e = factorial_product_coeff(1, "e", 10000);
  const bool divergent = e.status == ProductStatus::divergent_argument;

  r.pass = match && bound_ok && divergent;
  r.measurements["product_abs"] = lim;
  r.measurements["product_status"] = to_string(prod.status);
  r.measurements["empirical_abs_2p20"] = emp;
  r.measurements["gap"] = std::abs(emp - lim);
  r.measurements["bound_holds_d_le_50"] = bound_ok;
  r.measurements["worst_ratio_to_bound"] = worst;
  r.measurements["e_status"] = to_string(e.status);
  r.summary = "product " + fmt("%.5f", lim) + " vs Weyl at 2^20 " + fmt("%.5f", emp) + " (gap " +
              fmt("%.4f", std::abs(emp - lim)) + ", limit 0.01); 0.98^d bound " + (bound_ok ? "holds" : "fails") +
              "; e " + to_string(e.status);
  return r;
}

CriterionResult c10(unsigned workers) {
  CriterionResult r;
  r.pass = true;
  auto reg = Registry::builtin();
  constexpr std::size_t bins = 64;
  for (const char* name :
       {"fibonacci_digit_sum", "narayana_digit_sum", "binary_ternary", "binary_quaternary", "fibonacci_binary"}) {
    auto vals = replace_range(reg.map(name, BigInt(kMid)), kMid);
    for (const char* tag : {"sqrt2", "inv_e"}) {
      auto hist = histogram<std::int64_t>(vals, named_frequency(tag), bins, workers);
      const double dev = hist.max_deviation();
      r.measurements[name][tag] = dev;
      r.pass = r.pass && dev < 0.03;
      r.summary += std::string(name) + "/" + tag + " " + fmt("%.3f", dev) + " ";
    }
  }
  r.summary += "(B=64, limit 0.03)";
  return r;
}

CriterionResult c11(unsigned workers) {
  CriterionResult r;
  r.pass = true;
  for (int d = 2; d <= 7; ++d) {
    auto h = eval_direct(d, kMid);
    std::vector<std::size_t> cp{kMid};
    auto w = weyl_direct<std::uint32_t>(h_values(h, kMid), named_frequency("alpha" + std::to_string(d)), cp, workers);
    const double m = std::abs(w.checkpoints.back().value);
    const bool ok = d <= 5 ? m > 0.05 : m < 0.02;
    r.measurements["d" + std::to_string(d)] = m;
    r.pass = r.pass && ok;
    r.summary += "d=" + std::to_string(d) + " " + fmt("%.4g", m) + (ok ? "" : "(x)") + " ";
  }
  r.summary += "(>0.05 for d<=5, <0.02 for d>=6)";
  return r;
}

CriterionResult c12(unsigned) {
  CriterionResult r;
  r.pass = true;
  for (int d = 2; d <= 12; ++d) {
    const int c = count_outside_unit(trinomial(d));
    r.measurements["d" + std::to_string(d)] = c;
    r.pass = r.pass && (d <= 5 ? c == 1 : c >= 2);
    r.summary += std::to_string(c) + (d < 12 ? "," : "");
  }
  const int c60 = count_outside_unit(trinomial(60));
  r.measurements["d60"] = c60;
  r.pass = r.pass && std::abs(c60 - 20) <= 3;
  r.summary = "outside counts d=2..12: " + r.summary + "; d=60: " + std::to_string(c60);
  return r;
}

CriterionResult c13(unsigned) {
  CriterionResult r;
  r.pass = true;
  auto s13 = generate_recurrent(sqrt13_example_spec(), 120);
  auto s6 = generate_recurrent(sqrt6_example_spec(), 120);
  struct Case {
    const SequenceTable* seq;
    const char* tag;
    DecayClass expected;
  };
  const Case cases[] = {{&s13, "sqrt13_half", DecayClass::decays_geometric}, {&s13, "phi", DecayClass::non_decaying},
                        {&s13, "sqrt2", DecayClass::non_decaying},           {&s6, "sqrt6", DecayClass::decays_geometric},
                        {&s6, "one_plus_sqrt6", DecayClass::decays_geometric}, {&s6, "phi", DecayClass::non_decaying},
                        {&s6, "sqrt2", DecayClass::non_decaying}};
  for (const auto& c : cases) {
    auto rep = classify_decay(named_frequency(c.tag), *c.seq, 10, 120);
    const bool ok = rep.classification == c.expected;
    r.pass = r.pass && ok;
    r.measurements[c.seq->label()][c.tag] = to_string(rep.classification);
    r.summary += c.seq->label() + "/" + c.tag + "=" + to_string(rep.classification) + (ok ? " " : "(x) ");
  }
  return r;
}

CriterionResult c14(unsigned) {
  auto h = hofstadter_cached(3, kBig);
  auto rows = multiset_histogram_identity(*h, named_frequency("alpha3"), 512, kMid);
  CriterionResult r;
  std::size_t bad = 0;
  for (const auto& m : rows) bad += !m.equal;
  r.pass = bad == 0 && !rows.empty();
  r.measurements = {{"checkpoints", rows.size()}, {"mismatches", bad}, {"last_h", rows.empty() ? 0 : rows.back().h}};
  r.summary = std::to_string(rows.size()) + " checkpoints h_n <= 1e6, " + std::to_string(bad) + " mismatches";
  return r;
}

CriterionResult c15(unsigned workers) {
  auto h = hofstadter_cached(3, kBig);
  auto alpha = named_frequency("alpha3");
  auto map = make_shift_map(hofstadter_base(3, 2 * kMid));
  std::size_t upto = 0;
  auto words = map.source.words();
  while (upto < words.size() && words[upto] <= kMid) ++upto;
  auto rec = weyl_recurrence(map, alpha, upto);
  std::erase_if(rec, [](const WeylCheckpoint& c) { return c.n > kMid; });
  std::vector<std::size_t> cps;
  for (const auto& c : rec) cps.push_back(c.n);
  auto direct = weyl_direct<std::uint32_t>(h->head(kMid + 1), alpha, cps, workers);
  double worst = 0;
  for (std::size_t i = 0; i < rec.size(); ++i)
    worst = std::max(worst, std::abs(rec[i].value - direct.checkpoints[i].value));
  CriterionResult r;
  r.pass = worst <= 1e-9;
  r.measurements = {{"checkpoints", rec.size()}, {"max_difference", worst}};
  r.summary = std::to_string(rec.size()) + " checkpoints, max |difference| " + fmt("%.3e", worst) + " (limit 1e-9)";
  return r;
}

CriterionResult c16(unsigned workers) {
  auto h = hofstadter_cached(3, kBig);
  auto coeffs = fourier_coeffs<std::uint32_t>(h_values(*h, kBig), named_frequency("alpha3"), 200, workers);
  auto fit = fourier_decay_exponent(coeffs, 4, 200);
  CriterionResult r;
  r.pass = fit.exponent >= -1.8 && fit.exponent <= -1.1;
  r.measurements = {{"exponent", fit.exponent}, {"stderr", fit.stderr_}, {"ci95", {fit.ci_low, fit.ci_high}}};
  r.summary = "exponent " + fmt("%.4f", fit.exponent) + " +/- " + fmt("%.4f", fit.stderr_) + " (gate [-1.8, -1.1])";
  return r;
}

}  // namespace

std::string criterion_title(int id) {
  static const char* titles[kCriterionCount] = {
      "closed-formula equivalence",
      "first terms",
      "decay law of ||alpha h_k||",
      "dichotomy at N=1e7",
      "mod-m uniformity",
      "scaled copies",
      "valley/hill geometry",
      "density bound",
      "factorial-sum products",
      "replacement uniformity suite",
      "d-family signals",
      "root counting",
      "decay fixtures",
      "multiset recurrence",
      "recurrence vs direct Weyl sums",
      "Fourier decay exponent",
  };
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id");
  return titles[id - 1];
}

CriterionResult run_criterion(int id, unsigned workers) {
  using Fn = CriterionResult (*)(unsigned);
  static const Fn table[kCriterionCount] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14, c15, c16};
  const std::string title = criterion_title(id);
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](std::max(1u, workers));
  } catch (const std::exception& e) {
    r.pass = false;
    r.summary = std::string("error: ") + e.what();
  }
  r.id = id;
  r.title = title;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

nlohmann::ordered_json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary}, {"measurements", r.measurements}};
}

}  // namespace modsig
