#include "modsig/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace modsig {

namespace {

using QPoly = std::vector<BigRational>;

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly to_q(const PolynomialSpec& p) { return QPoly(p.coefficients.begin(), p.coefficients.end()); }

PolynomialSpec to_primitive(QPoly q) {
  trim(q);
  if (q.empty()) return {};
  BigInt l = 1;
  for (const auto& c : q) l = boost::multiprecision::lcm(l, BigInt(denominator(c)));
  std::vector<BigInt> z;
  BigInt g = 0;
  for (const auto& c : q) {
    z.push_back(BigInt(numerator(c)) * (l / BigInt(denominator(c))));
    g = boost::multiprecision::gcd(g, z.back());
  }
  if (z.back() < 0) g = -g;
  for (auto& c : z) c /= g;
  return {std::move(z)};
}

std::pair<QPoly, QPoly> divmod(QPoly a, const QPoly& b) {
  if (b.empty()) throw std::domain_error("polynomial division by zero");
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  QPoly q(a.size() - b.size() + 1);
  for (std::size_t i = q.size(); i-- > 0;) {
    BigRational c = a[i + b.size() - 1] / b.back();
    q[i] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[i + j] -= c * b[j];
  }
  a.resize(b.size() - 1);
  trim(a);
  trim(q);
  return {q, a};
}

void make_monic(QPoly& p) {
  BigRational l = p.back();
  for (auto& c : p) c /= l;
}

QPoly q_gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
    if (!b.empty()) make_monic(b);
  }
  if (!a.empty()) make_monic(a);
  return a;
}

QPoly q_derivative(const QPoly& p) {
  QPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

}  // namespace

PolynomialSpec make_polynomial(std::vector<BigInt> ascending) {
  while (!ascending.empty() && ascending.back() == 0) ascending.pop_back();
  return {std::move(ascending)};
}

std::string PolynomialSpec::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const BigInt& c = coefficients[i];
    if (c == 0) continue;
    BigInt a = abs(c);
    os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    if (a != 1 || i == 0) os << a;
    if (i > 0) os << "x";
    if (i > 1) os << "^" << i;
    first = false;
  }
  return first ? "0" : os.str();
}

PolynomialSpec trinomial(int d) {
  if (d < 2) throw std::invalid_argument("trinomial degree must be >= 2");
  std::vector<BigInt> c(d + 1, 0);
  c[d] = 1;
  c[d - 1] = -1;
  c[0] = -1;
  return {std::move(c)};
}

PolynomialSpec alpha_polynomial(int d) {
  if (d < 2) throw std::invalid_argument("degree must be >= 2");
  std::vector<BigInt> c(d + 1, 0);
  c[d] = 1;
  c[1] = 1;
  c[0] = -1;
  return {std::move(c)};
}

PolynomialSpec characteristic_polynomial(const RecurrenceSpec& spec) {
  return make_polynomial(spec.characteristic_polynomial());
}

PolynomialSpec parse_polynomial(const std::string& text) {
  auto tail_int = [&](std::size_t at) {
    std::size_t used = 0;
    int v = std::stoi(text.substr(at), &used);
    if (at + used != text.size()) throw std::invalid_argument("bad polynomial: " + text);
    return v;
  };
  if (text.rfind("trinomial:", 0) == 0) return trinomial(tail_int(10));
  if (text.rfind("alpha:", 0) == 0) return alpha_polynomial(tail_int(6));
  if (text.rfind("cyclotomic:", 0) == 0) return cyclotomic(tail_int(11));
  std::vector<BigInt> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) c.push_back(parse_bigint(item));
  auto p = make_polynomial(std::move(c));
  if (p.degree() < 0) throw std::invalid_argument("zero polynomial: " + text);
  return p;
}

PolynomialSpec derivative(const PolynomialSpec& p) {
  std::vector<BigInt> d;
  for (std::size_t i = 1; i < p.coefficients.size(); ++i) d.push_back(p.coefficients[i] * static_cast<long>(i));
  return make_polynomial(std::move(d));
}

PolynomialSpec gcd(const PolynomialSpec& a, const PolynomialSpec& b) { return to_primitive(q_gcd(to_q(a), to_q(b))); }

PolynomialSpec exact_divide(const PolynomialSpec& a, const PolynomialSpec& b) {
  auto [q, r] = divmod(to_q(a), to_q(b));
  if (!r.empty()) throw std::domain_error("polynomial does not divide");
  std::vector<BigInt> z;
  for (const auto& c : q) {
    if (denominator(c) != 1) throw std::domain_error("quotient is not integral");
    z.push_back(BigInt(numerator(c)));
  }
  return make_polynomial(std::move(z));
}

bool divides(const PolynomialSpec& b, const PolynomialSpec& a) {
  if (b.degree() > a.degree()) return false;
  return divmod(to_q(a), to_q(b)).second.empty();
}

PolynomialSpec cyclotomic(int m) {
  if (m < 1) throw std::invalid_argument("cyclotomic index must be >= 1");
  static std::mutex mu;
  static std::map<int, PolynomialSpec> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(m); it != cache.end()) return it->second;
  }
  std::vector<BigInt> c(m + 1, 0);
  c[0] = -1;
  c[m] = 1;
  PolynomialSpec p{std::move(c)};
  for (int k = 1; k < m; ++k)
    if (m % k == 0) p = exact_divide(p, cyclotomic(k));
  std::lock_guard lock(mu);
  cache.emplace(m, p);
  return p;
}

std::vector<SquarefreeFactor> squarefree_decomposition(const PolynomialSpec& p) {
  if (p.degree() < 1) return {};
  QPoly f = to_q(p);
  make_monic(f);
  QPoly a = q_gcd(f, q_derivative(f));
  QPoly b = divmod(f, a).first;
  QPoly c = divmod(q_derivative(f), a).first;
  QPoly d = c;
  {
    QPoly bd = q_derivative(b);
    d.resize(std::max(d.size(), bd.size()));
    for (std::size_t i = 0; i < bd.size(); ++i) d[i] -= bd[i];
    trim(d);
  }
  std::vector<SquarefreeFactor> out;
  for (int k = 1; b.size() > 1; ++k) {
    QPoly g = q_gcd(b, d);
    if (g.size() > 1) out.push_back({to_primitive(g), k});
    b = divmod(b, g).first;
    c = divmod(d, g).first;
    QPoly bd = q_derivative(b);
    d = c;
    d.resize(std::max(d.size(), bd.size()));
    for (std::size_t i = 0; i < bd.size(); ++i) d[i] -= bd[i];
    trim(d);
  }
  return out;
}

std::string to_string(UnitLocation u) {
  switch (u) {
    case UnitLocation::inside: return "inside";
    case UnitLocation::outside: return "outside";
    case UnitLocation::on_circle: return "on_circle";
    case UnitLocation::ambiguous: return "ambiguous";
  }
  return "ambiguous";
}

namespace {

// Complex number on two mpfr values; results carry the larger operand precision.
struct Cx {
  Mpfr re, im;
  explicit Cx(mpfr_prec_t p = 64) : re(p), im(p) {}
  Cx(std::complex<double> z, mpfr_prec_t p) : re(p), im(p) {
    mpfr_set_d(re.get(), z.real(), MPFR_RNDN);
    mpfr_set_d(im.get(), z.imag(), MPFR_RNDN);
  }
  mpfr_prec_t prec() const { return re.precision(); }
  std::complex<double> to_complex() const {
    return {mpfr_get_d(re.get(), MPFR_RNDN), mpfr_get_d(im.get(), MPFR_RNDN)};
  }
};

Cx operator+(const Cx& a, const Cx& b) {
  Cx r(std::max(a.prec(), b.prec()));
  mpfr_add(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  return r;
}

Cx operator-(const Cx& a, const Cx& b) {
  Cx r(std::max(a.prec(), b.prec()));
  mpfr_sub(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_sub(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  return r;
}

Cx operator*(const Cx& a, const Cx& b) {
  const mpfr_prec_t p = std::max(a.prec(), b.prec());
  Cx r(p);
  Mpfr t(p);
  mpfr_mul(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_sub(r.re.get(), r.re.get(), t.get(), MPFR_RNDN);
  mpfr_mul(r.im.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(r.im.get(), r.im.get(), t.get(), MPFR_RNDN);
  return r;
}

Mpfr norm2(const Cx& a) {
  Mpfr n(a.prec()), t(a.prec());
  mpfr_sqr(n.get(), a.re.get(), MPFR_RNDN);
  mpfr_sqr(t.get(), a.im.get(), MPFR_RNDN);
  mpfr_add(n.get(), n.get(), t.get(), MPFR_RNDN);
  return n;
}

Mpfr abs(const Cx& a, mpfr_rnd_t rnd = MPFR_RNDN) {
  Mpfr n(a.prec());
  mpfr_hypot(n.get(), a.re.get(), a.im.get(), rnd);
  return n;
}

Cx operator/(const Cx& a, const Cx& b) {
  const mpfr_prec_t p = std::max(a.prec(), b.prec());
  Cx conj_b = b;
  mpfr_neg(conj_b.im.get(), conj_b.im.get(), MPFR_RNDN);
  Cx r = a * conj_b;
  Mpfr n = norm2(b);
  mpfr_div(r.re.get(), r.re.get(), n.get(), MPFR_RNDN);
  mpfr_div(r.im.get(), r.im.get(), n.get(), MPFR_RNDN);
  (void)p;
  return r;
}

std::string decimal(const Mpfr& x, int digits) {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Rg", digits, x.get());
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

int decimal_digits(mpfr_prec_t p) { return std::max(17, static_cast<int>(static_cast<double>(p) * 0.30103)); }

std::vector<Mpfr> mp_coeffs(const PolynomialSpec& p, mpfr_prec_t prec) {
  std::vector<Mpfr> c;
  for (const auto& v : p.coefficients) {
    c.emplace_back(prec);
    mpfr_set_z(c.back().get(), v.backend().data(), MPFR_RNDN);
  }
  return c;
}

// p(z), p'(z) by Horner.
std::pair<Cx, Cx> eval_mp(const std::vector<Mpfr>& c, const Cx& z) {
  const mpfr_prec_t prec = z.prec();
  Cx v(prec), dv(prec);
  mpfr_set(v.re.get(), c.back().get(), MPFR_RNDN);
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    dv = dv * z + v;
    v = v * z;
    mpfr_add(v.re.get(), v.re.get(), c[i].get(), MPFR_RNDN);
  }
  return {v, dv};
}

std::pair<std::complex<double>, std::complex<double>> eval_d(const std::vector<double>& c, std::complex<double> z) {
  std::complex<double> v = c.back(), dv = 0;
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    dv = dv * z + v;
    v = v * z + c[i];
  }
  return {v, dv};
}

std::vector<std::complex<double>> aberth_double(const PolynomialSpec& p) {
  const int n = p.degree();
  std::vector<double> c;
  for (const auto& v : p.coefficients) c.push_back(v.convert_to<double>());
  double R = 0;
  for (int i = 0; i < n; ++i)
    R = std::max(R, std::pow(std::abs(c[i] / c[n]), 1.0 / static_cast<double>(n - i)));
  R = std::max(R, 1e-3);
  std::vector<std::complex<double>> z(n);
  for (int k = 0; k < n; ++k)
    z[k] = std::polar(R, 2 * std::numbers::pi * (k + 0.25) / n + 0.4);
  for (int iter = 0; iter < 2000; ++iter) {
    double worst = 0;
    for (int k = 0; k < n; ++k) {
      auto [v, dv] = eval_d(c, z[k]);
      if (v == 0.0) continue;
      std::complex<double> w = v / dv, s = 0;
      for (int j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      std::complex<double> step = w / (1.0 - w * s);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 1e-15) break;
  }
  return z;
}

void aberth_mp(const std::vector<Mpfr>& c, std::vector<Cx>& z, mpfr_prec_t prec) {
  const std::size_t n = z.size();
  Cx one(prec);
  mpfr_set_ui(one.re.get(), 1, MPFR_RNDN);
  Mpfr tol(prec);
  mpfr_set_ui_2exp(tol.get(), 1, -(prec - 16), MPFR_RNDN);
  for (int iter = 0; iter < 200; ++iter) {
    bool done = true;
    for (std::size_t k = 0; k < n; ++k) {
      auto [v, dv] = eval_mp(c, z[k]);
      if (mpfr_zero_p(v.re.get()) && mpfr_zero_p(v.im.get())) continue;
      Cx w = v / dv, s(prec);
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) s = s + one / (z[k] - z[j]);
      Cx step = w / (one - w * s);
      z[k] = z[k] - step;
      Mpfr rel = abs(step), mag = abs(z[k]);
      if (mpfr_cmp_ui(mag.get(), 1) < 0) mpfr_set_ui(mag.get(), 1, MPFR_RNDN);
      mpfr_div(rel.get(), rel.get(), mag.get(), MPFR_RNDN);
      if (mpfr_greater_p(rel.get(), tol.get())) done = false;
    }
    if (done) break;
  }
}

struct MpRoot {
  Cx center;
  Mpfr radius;
  int multiplicity = 1;
  int cyclotomic_order = 0;
  bool real = false;
  UnitLocation location = UnitLocation::ambiguous;
};

// Inclusion radii for a squarefree factor; every radius is rounded up and
// inflated for the rounding error of the evaluation.
std::vector<Mpfr> inclusion_radii(const PolynomialSpec& p, const std::vector<Cx>& z, mpfr_prec_t prec) {
  const std::size_t n = z.size();
  auto c = mp_coeffs(p, prec);
  std::vector<Mpfr> r;
  for (std::size_t i = 0; i < n; ++i) {
    auto [v, dv] = eval_mp(c, z[i]);
    Mpfr num = abs(v, MPFR_RNDU);
    // rounding error of Horner: 2 n u sum |c_k| |z|^k
    Mpfr mag = abs(z[i], MPFR_RNDU), acc(prec), pw(prec), t(prec);
    mpfr_set_ui(pw.get(), 1, MPFR_RNDN);
    for (std::size_t k = 0; k < c.size(); ++k) {
      mpfr_abs(t.get(), c[k].get(), MPFR_RNDU);
      mpfr_mul(t.get(), t.get(), pw.get(), MPFR_RNDU);
      mpfr_add(acc.get(), acc.get(), t.get(), MPFR_RNDU);
      mpfr_mul(pw.get(), pw.get(), mag.get(), MPFR_RNDU);
    }
    mpfr_mul_2si(acc.get(), acc.get(), -(prec - 2), MPFR_RNDU);
    mpfr_mul_ui(acc.get(), acc.get(), 2 * c.size(), MPFR_RNDU);
    mpfr_add(num.get(), num.get(), acc.get(), MPFR_RNDU);
    mpfr_mul_ui(num.get(), num.get(), n, MPFR_RNDU);

    Mpfr den(prec);
    mpfr_set_z(den.get(), p.leading().backend().data(), MPFR_RNDD);
    mpfr_abs(den.get(), den.get(), MPFR_RNDD);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      Mpfr d = abs(z[i] - z[j], MPFR_RNDD);
      mpfr_mul(den.get(), den.get(), d.get(), MPFR_RNDD);
    }
    // relative slack for the n rounded differences
    Mpfr slack(prec);
    mpfr_set_ui_2exp(slack.get(), 1, -(prec - 8 - static_cast<long>(std::log2(n + 1.0))), MPFR_RNDU);
    mpfr_ui_sub(slack.get(), 1, slack.get(), MPFR_RNDD);
    mpfr_mul(den.get(), den.get(), slack.get(), MPFR_RNDD);
    Mpfr rad(prec);
    if (mpfr_sgn(den.get()) <= 0) mpfr_set_inf(rad.get(), 1);
    else mpfr_div(rad.get(), num.get(), den.get(), MPFR_RNDU);
    r.push_back(std::move(rad));
  }
  return r;
}

bool disks_apart(const Cx& a, const Mpfr& ra, const Cx& b, const Mpfr& rb) {
  Mpfr d = abs(a - b, MPFR_RNDD), s(ra.precision());
  mpfr_add(s.get(), ra.get(), rb.get(), MPFR_RNDU);
  // distance itself carries rounding; demand a relative margin
  mpfr_mul_d(s.get(), s.get(), 1.0 + 1e-12, MPFR_RNDU);
  return mpfr_greater_p(d.get(), s.get());
}

UnitLocation locate(const Cx& z, const Mpfr& r) {
  Mpfr lo = abs(z, MPFR_RNDD), hi = abs(z, MPFR_RNDU);
  Mpfr eps(lo.precision());
  mpfr_set_ui_2exp(eps.get(), 1, -(lo.precision() - 4), MPFR_RNDU);
  mpfr_sub(lo.get(), lo.get(), r.get(), MPFR_RNDD);
  mpfr_sub(lo.get(), lo.get(), eps.get(), MPFR_RNDD);
  mpfr_add(hi.get(), hi.get(), r.get(), MPFR_RNDU);
  mpfr_add(hi.get(), hi.get(), eps.get(), MPFR_RNDU);
  if (mpfr_cmp_ui(lo.get(), 1) > 0) return UnitLocation::outside;
  if (mpfr_cmp_ui(hi.get(), 1) < 0) return UnitLocation::inside;
  return UnitLocation::ambiguous;
}

// Denominator of a continued-fraction convergent within tol of t, if any.
int root_of_unity_order(double t, int max_q) {
  t -= std::floor(t);
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = t;
  for (int step = 0; step < 40; ++step) {
    double a = std::floor(x);
    long h2 = static_cast<long>(a) * h1 + h0, k2 = static_cast<long>(a) * k1 + k0;
    if (k2 > max_q) break;
    if (k2 > 0 && std::abs(t - static_cast<double>(h2) / static_cast<double>(k2)) < 1e-9) return static_cast<int>(k2);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return 0;
}

int euler_phi(int m) {
  int r = m;
  for (int p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    while (m % p == 0) m /= p;
    r -= r / p;
  }
  if (m > 1) r -= r / m;
  return r;
}

// Splits exact cyclotomic factors off a squarefree polynomial.
std::pair<PolynomialSpec, std::vector<int>> split_cyclotomic(PolynomialSpec f) {
  std::vector<int> orders;
  bool found = true;
  while (found && f.degree() >= 1) {
    found = false;
    for (auto z : aberth_double(f)) {
      if (std::abs(std::abs(z) - 1.0) > 1e-6) continue;
      int m = root_of_unity_order(std::arg(z) / (2 * std::numbers::pi), 20000);
      if (m == 0 || euler_phi(m) > f.degree() || std::find(orders.begin(), orders.end(), m) != orders.end()) continue;
      PolynomialSpec phi = cyclotomic(m);
      if (divides(phi, f)) {
        f = exact_divide(f, phi);
        orders.push_back(m);
        found = true;
        break;
      }
    }
  }
  return {f, orders};
}

struct MpIsolation {
  std::vector<MpRoot> roots;
  mpfr_prec_t prec = 0;
};

// Roots of a squarefree, non-cyclotomic factor, certified at prec.
bool isolate_factor(const PolynomialSpec& f, mpfr_prec_t prec, std::vector<MpRoot>& out) {
  const int n = f.degree();
  if (n == 1) {
    MpRoot r{Cx(prec), Mpfr(prec)};
    BigRational q(BigInt(-f.coefficients[0]), f.coefficients[1]);
    mpfr_set_q(r.center.re.get(), q.backend().data(), MPFR_RNDN);
    mpfr_set_ui_2exp(r.radius.get(), 1, -(prec - 2), MPFR_RNDU);
    mpfr_mul(r.radius.get(), r.radius.get(), r.center.re.get(), MPFR_RNDU);
    mpfr_abs(r.radius.get(), r.radius.get(), MPFR_RNDU);
    r.real = true;
    r.location = locate(r.center, r.radius);
    out.push_back(std::move(r));
    return true;
  }
  std::vector<Cx> z;
  for (auto w : aberth_double(f)) z.emplace_back(w, prec);
  aberth_mp(mp_coeffs(f, prec + 32), z, prec);
  auto radii = inclusion_radii(f, z, prec);
  bool ok = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!disks_apart(z[i], radii[i], z[j], radii[j])) ok = false;
  for (int i = 0; i < n; ++i) {
    MpRoot r{z[i], radii[i]};
    // The conjugate of the unique root in D_i lies in conj(D_i); if that disk
    // meets no other D_j the root is its own conjugate.
    Cx cz = z[i];
    mpfr_neg(cz.im.get(), cz.im.get(), MPFR_RNDN);
    r.real = ok;
    for (int j = 0; j < n && r.real; ++j)
      if (j != i && !disks_apart(cz, radii[i], z[j], radii[j])) r.real = false;
    r.location = locate(r.center, r.radius);
    out.push_back(std::move(r));
  }
  return ok;
}

MpIsolation isolate_mp(const PolynomialSpec& p, long bits, long max_bits) {
  if (p.degree() < 1) throw std::invalid_argument("root isolation needs degree >= 1");
  if (p.coefficients[0] == 0) throw std::invalid_argument("root isolation needs a nonzero constant term");
  auto factors = squarefree_decomposition(p);
  for (long prec = std::max(bits, 64L);; prec *= 2) {
    MpIsolation iso;
    iso.prec = prec;
    bool ok = true;
    for (const auto& [factor, mult] : factors) {
      auto [rest, orders] = split_cyclotomic(factor);
      for (int m : orders) {
        for (int k = 0; k < m; ++k) {
          if (std::gcd(k, m) != 1) continue;
          MpRoot r{Cx(prec), Mpfr(prec)};
          Mpfr ang(prec);
          mpfr_const_pi(ang.get(), MPFR_RNDN);
          mpfr_mul_ui(ang.get(), ang.get(), 2 * static_cast<unsigned long>(k), MPFR_RNDN);
          mpfr_div_ui(ang.get(), ang.get(), static_cast<unsigned long>(m), MPFR_RNDN);
          mpfr_sin_cos(r.center.im.get(), r.center.re.get(), ang.get(), MPFR_RNDN);
          mpfr_set_ui_2exp(r.radius.get(), 1, -(prec - 4), MPFR_RNDU);
          r.multiplicity = mult;
          r.cyclotomic_order = m;
          r.real = (2 * k == m || k == 0);
          r.location = UnitLocation::on_circle;
          iso.roots.push_back(std::move(r));
        }
      }
      if (rest.degree() >= 1) {
        std::vector<MpRoot> part;
        ok = isolate_factor(rest, prec, part) && ok;
        for (auto& r : part) {
          r.multiplicity = mult;
          if (r.location == UnitLocation::ambiguous) ok = false;
          iso.roots.push_back(std::move(r));
        }
      }
    }
    if (ok) {
      std::stable_sort(iso.roots.begin(), iso.roots.end(), [](const MpRoot& a, const MpRoot& b) {
        auto za = a.center.to_complex(), zb = b.center.to_complex();
        if (std::abs(za) != std::abs(zb)) return std::abs(za) > std::abs(zb);
        return za.imag() > zb.imag();
      });
      return iso;
    }
    if (prec * 2 > max_bits) {
      throw CertificationError("root enclosures of " + p.to_string() + " not separated at " + std::to_string(prec) +
                               " bits");
    }
  }
}

RootSet to_root_set(const PolynomialSpec& p, const MpIsolation& iso) {
  RootSet rs;
  rs.polynomial = p;
  rs.precision_bits = iso.prec;
  const int digits = std::min(60, decimal_digits(iso.prec));
  for (const auto& r : iso.roots) {
    RootEnclosure e;
    e.center = r.center.to_complex();
    e.center_re = decimal(r.center.re, digits);
    e.center_im = decimal(r.center.im, digits);
    e.radius = mpfr_get_d(r.radius.get(), MPFR_RNDU);
    e.multiplicity = r.multiplicity;
    e.location = r.location;
    e.real = r.real;
    e.cyclotomic_order = r.cyclotomic_order;
    if (e.real) e.center = {e.center.real(), 0.0};
    switch (e.location) {
      case UnitLocation::outside: rs.count_outside_unit += e.multiplicity; break;
      case UnitLocation::on_circle: rs.count_on_unit += e.multiplicity; break;
      case UnitLocation::ambiguous: rs.count_on_unit_ambiguous += e.multiplicity; break;
      case UnitLocation::inside: break;
    }
    rs.roots.push_back(std::move(e));
  }
  return rs;
}

}  // namespace

RootSet isolate_roots(const PolynomialSpec& p, long bits, long max_bits) {
  return to_root_set(p, isolate_mp(p, bits, max_bits));
}

int count_outside_unit(const PolynomialSpec& p) { return isolate_roots(p).count_outside_unit; }

bool is_pisot(const PolynomialSpec& p) {
  auto rs = isolate_roots(p);
  int outside = 0, others_inside = 0, total = 0;
  bool dominant_real = false;
  for (const auto& r : rs.roots) {
    if (r.location == UnitLocation::on_circle) continue;
    total += r.multiplicity;
    if (r.location == UnitLocation::outside) {
      outside += r.multiplicity;
      dominant_real = r.real && r.center.real() > 1 && r.multiplicity == 1;
    } else if (r.location == UnitLocation::inside) {
      others_inside += r.multiplicity;
    }
  }
  return outside == 1 && dominant_real && others_inside == total - 1;
}

std::pair<double, double> vieta_check(const RootSet& r) {
  std::complex<double> prod = 1;
  double rel = 0;
  for (const auto& e : r.roots) {
    for (int m = 0; m < e.multiplicity; ++m) {
      prod *= e.center;
      rel += e.radius / std::max(std::abs(e.center), 1e-300);
    }
  }
  const auto& c = r.polynomial.coefficients;
  double expected = c.front().convert_to<double>() / c.back().convert_to<double>();
  if (r.polynomial.degree() % 2 == 1) expected = -expected;
  double n = static_cast<double>(r.polynomial.degree());
  double bound = std::abs(prod) * (std::expm1(rel) + 4 * n * 2.3e-16) + 1e-300;
  return {std::abs(prod - expected), bound};
}

double reciprocal_root_gap(int d, long bits) {
  auto to_vec = [](const PolynomialSpec& p) { return p.coefficients; };
  AlgebraicReal a(to_vec(alpha_polynomial(d)), BigRational(0), BigRational(1));
  AlgebraicReal rho(to_vec(trinomial(d)), BigRational(1), BigRational(2));
  const auto b = static_cast<unsigned>(bits);
  ExtReal g = a.refine(b) * rho.refine(b) - ExtReal::from_integer(BigInt(1), bits + 16);
  g = g.abs();
  Mpfr up(64);
  mpfr_add(up.get(), g.mid().get(), g.rad().get(), MPFR_RNDU);
  return mpfr_get_d(up.get(), MPFR_RNDU);
}

namespace {

// Gaussian elimination with partial pivoting on an n x n complex system.
std::vector<Cx> solve(std::vector<std::vector<Cx>> A, std::vector<Cx> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    Mpfr best = norm2(A[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Mpfr v = norm2(A[r][col]);
      if (mpfr_greater_p(v.get(), best.get())) {
        best = v;
        piv = r;
      }
    }
    if (mpfr_zero_p(best.get())) throw CertificationError("singular Vandermonde system");
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Cx f = A[r][col] / A[col][col];
      for (std::size_t k = col; k < n; ++k) A[r][k] = A[r][k] - f * A[col][k];
      b[r] = b[r] - f * b[col];
    }
  }
  std::vector<Cx> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Cx s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s = s - A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

Cx rounded(const Cx& z, mpfr_prec_t p) {
  Cx r(p);
  mpfr_set(r.re.get(), z.re.get(), MPFR_RNDN);
  mpfr_set(r.im.get(), z.im.get(), MPFR_RNDN);
  return r;
}

std::vector<Cx> coefficients_at(const std::vector<Cx>& rho, const SequenceTable& seq, mpfr_prec_t p) {
  const std::size_t L = rho.size();
  std::vector<std::vector<Cx>> A(L, std::vector<Cx>(L, Cx(p)));
  std::vector<Cx> b(L, Cx(p));
  for (std::size_t i = 0; i < L; ++i) {
    Cx r = rounded(rho[i], p), pw = r;
    for (std::size_t n = 0; n < L; ++n) {
      A[n][i] = pw;
      pw = pw * r;
    }
  }
  for (std::size_t n = 0; n < L; ++n) mpfr_set_z(b[n].re.get(), seq.term(n + 1).backend().data(), MPFR_RNDN);
  return solve(std::move(A), std::move(b));
}

ComplexEnclosure enclose(const Cx& z, double radius) {
  const int digits = std::min(40, decimal_digits(z.prec()));
  return {z.to_complex(), decimal(z.re, digits), decimal(z.im, digits), radius};
}

}  // namespace

ClosedFormDecomposition closed_form(const SequenceTable& seq, ClosedFormOrientation orientation) {
  if (!seq.spec()) throw std::invalid_argument("closed form needs a recurrence-backed sequence");
  const RecurrenceSpec& spec = *seq.spec();
  PolynomialSpec p = characteristic_polynomial(spec);
  if (p.coefficients[0] == 0) throw std::invalid_argument("characteristic polynomial has a zero root");
  if (gcd(p, derivative(p)).degree() > 0) throw std::invalid_argument("characteristic polynomial is not squarefree");
  if (seq.size() < spec.order()) throw RangeError("sequence shorter than its recurrence order");

  long top_bits = 0;
  for (std::size_t n = 1; n <= seq.size(); ++n) top_bits = std::max<long>(top_bits, static_cast<long>(bit_length(seq.term(n))));
  for (long prec = std::max(256L, 2 * (top_bits + 96)); prec <= 16384; prec *= 2) {
    MpIsolation iso = isolate_mp(p, prec, prec);
    std::vector<Cx> rho;
    for (const auto& r : iso.roots) rho.push_back(r.center);
    auto c_full = coefficients_at(rho, seq, prec);
    auto c_half = coefficients_at(rho, seq, prec / 2);
    std::vector<double> crad;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      Mpfr d = abs(c_full[i] - c_half[i], MPFR_RNDU);
      crad.push_back(2 * mpfr_get_d(d.get(), MPFR_RNDU) + std::ldexp(1.0, -static_cast<int>(prec / 2)));
    }

    ClosedFormDecomposition out;
    out.roots = to_root_set(p, iso);
    out.orientation = orientation;
    out.precision_bits = prec;
    // Reconstruct a_n; stop where the coefficient radii, scaled by |rho|^n,
    // no longer leave room for a 2^-32 check.
    const double limit = std::ldexp(1.0, -32);
    std::vector<Cx> pw = rho;
    bool ok = true;
    for (std::size_t n = 1; n <= seq.size(); ++n) {
      Cx sum(prec);
      double budget = 0;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        sum = sum + c_full[i] * pw[i];
        Mpfr m = abs(pw[i], MPFR_RNDU);
        budget += crad[i] * mpfr_get_d(m.get(), MPFR_RNDU);
        pw[i] = pw[i] * rho[i];
      }
      if (budget >= limit / 4) break;
      Cx target(prec);
      mpfr_set_z(target.re.get(), seq.term(n).backend().data(), MPFR_RNDN);
      Mpfr res = abs(sum - target, MPFR_RNDU);
      double r = mpfr_get_d(res.get(), MPFR_RNDU);
      out.max_residual = std::max(out.max_residual, r);
      if (r >= limit) {
        ok = false;
        break;
      }
      out.validated_through = n;
    }
    if (!ok || out.validated_through < spec.order()) continue;
    Cx one(prec);
    mpfr_set_ui(one.re.get(), 1, MPFR_RNDN);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      out.coefficients.push_back(enclose(c_full[i], crad[i]));
      if (orientation == ClosedFormOrientation::powers) {
        out.bases.push_back(enclose(rho[i], mpfr_get_d(iso.roots[i].radius.get(), MPFR_RNDU)));
      } else {
        Cx inv = one / rho[i];
        // |1/z - 1/w| <= r / (|z| (|z| - r))
        Mpfr m = abs(rho[i], MPFR_RNDD);
        double mz = mpfr_get_d(m.get(), MPFR_RNDD), r = mpfr_get_d(iso.roots[i].radius.get(), MPFR_RNDU);
        out.bases.push_back(enclose(inv, r / (mz * (mz - r))));
      }
    }
    return out;
  }
  throw CertificationError("closed form reconstruction failed up to 16384 bits");
}

nlohmann::ordered_json to_json(const RootSet& r) {
  nlohmann::ordered_json j;
  j["polynomial"] = r.polynomial.to_string();
  j["degree"] = r.polynomial.degree();
  j["precision_bits"] = r.precision_bits;
  j["count_outside_unit"] = r.count_outside_unit;
  j["count_on_unit"] = r.count_on_unit;
  j["count_on_unit_ambiguous"] = r.count_on_unit_ambiguous;
  auto& arr = j["roots"] = nlohmann::ordered_json::array();
  for (const auto& e : r.roots) {
    nlohmann::ordered_json x;
    x["re"] = e.center_re;
    x["im"] = e.center_im;
    x["modulus"] = std::abs(e.center);
    x["radius"] = e.radius;
    x["multiplicity"] = e.multiplicity;
    x["location"] = to_string(e.location);
    x["real"] = e.real;
    if (e.cyclotomic_order) x["root_of_unity_order"] = e.cyclotomic_order;
    arr.push_back(std::move(x));
  }
  return j;
}

nlohmann::ordered_json to_json(const ClosedFormDecomposition& c) {
  nlohmann::ordered_json j;
  j["orientation"] = c.orientation == ClosedFormOrientation::powers ? "powers" : "inverse_powers";
  j["precision_bits"] = c.precision_bits;
  j["validated_through"] = c.validated_through;
  j["max_residual"] = c.max_residual;
  auto& terms = j["terms"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < c.bases.size(); ++i) {
    terms.push_back({{"base", {{"re", c.bases[i].re}, {"im", c.bases[i].im}, {"radius", c.bases[i].radius}}},
                     {"coefficient",
                      {{"re", c.coefficients[i].re}, {"im", c.coefficients[i].im}, {"radius", c.coefficients[i].radius}}}});
  }
  j["roots"] = to_json(c.roots);
  return j;
}

}  // namespace modsig
