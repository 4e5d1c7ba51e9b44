#include "modsig/precision.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include <Eigen/Dense>

namespace modsig {

namespace {

constexpr mpfr_prec_t kRadPrec = 64;

mpz_srcptr z_src(const BigInt& v) { return v.backend().data(); }
mpq_srcptr q_src(const BigRational& v) { return v.backend().data(); }

// rad += ulp(mid) when the operation producing mid was inexact.
void add_roundoff(Mpfr& rad, const Mpfr& mid, int ternary) {
  if (ternary == 0 || mpfr_zero_p(mid.get())) return;
  Mpfr ulp(kRadPrec);
  mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_exp(mid.get()) - mid.precision(), MPFR_RNDU);
  mpfr_add(rad.get(), rad.get(), ulp.get(), MPFR_RNDU);
}

Mpfr abs_up(const Mpfr& x) {
  Mpfr r(kRadPrec);
  mpfr_abs(r.get(), x.get(), MPFR_RNDU);
  return r;
}

BigRational to_rational(const Mpfr& x) {
  BigInt z;
  mpfr_exp_t e = mpfr_get_z_2exp(z.backend().data(), x.get());
  if (e >= 0) return BigRational(z << static_cast<unsigned>(e));
  return BigRational(z, BigInt(1) << static_cast<unsigned>(-e));
}

// Exponent bound: |q| < 2^result.
long magnitude_exponent(const BigRational& q) {
  if (q == 0) return 0;
  return static_cast<long>(bit_length(numerator(q))) - static_cast<long>(bit_length(denominator(q))) + 1;
}

}  // namespace

// ---------------------------------------------------------------- ExtReal

ExtReal::ExtReal(Mpfr mid, Mpfr rad) : mid_(std::move(mid)), rad_(kRadPrec) {
  mpfr_set(rad_.get(), rad.get(), MPFR_RNDU);
  if (mpfr_sgn(rad_.get()) < 0) throw std::invalid_argument("negative error radius");
}

ExtReal ExtReal::from_integer(const BigInt& v, mpfr_prec_t prec) {
  Mpfr m(prec), r(kRadPrec);
  int t = mpfr_set_z(m.get(), z_src(v), MPFR_RNDN);
  add_roundoff(r, m, t);
  return ExtReal(std::move(m), std::move(r));
}

ExtReal ExtReal::from_rational(const BigRational& v, mpfr_prec_t prec) {
  Mpfr m(prec), r(kRadPrec);
  int t = mpfr_set_q(m.get(), q_src(v), MPFR_RNDN);
  add_roundoff(r, m, t);
  return ExtReal(std::move(m), std::move(r));
}

ExtReal ExtReal::from_double(double v) {
  Mpfr m(53);
  mpfr_set_d(m.get(), v, MPFR_RNDN);
  return ExtReal(std::move(m), Mpfr(kRadPrec));
}

double ExtReal::to_double() const { return mpfr_get_d(mid_.get(), MPFR_RNDN); }
double ExtReal::radius_double() const { return mpfr_get_d(rad_.get(), MPFR_RNDU); }

long ExtReal::error_exponent() const {
  if (is_exact()) return LONG_MIN;
  return mpfr_get_exp(rad_.get());
}

std::string ExtReal::to_decimal(int digits) const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Rg", digits, mid_.get());
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

double ExtReal::log_mid() const {
  if (mpfr_zero_p(mid_.get())) return -INFINITY;
  long e = 0;
  double d = mpfr_get_d_2exp(&e, mid_.get(), MPFR_RNDN);
  return std::log(std::abs(d)) + static_cast<double>(e) * std::log(2.0);
}

bool ExtReal::contains_zero() const { return mpfr_cmpabs(mid_.get(), rad_.get()) <= 0; }

std::partial_ordering ExtReal::compare(const ExtReal& o) const {
  ExtReal d = *this - o;
  if (d.is_exact() && mpfr_zero_p(d.mid_.get())) return std::partial_ordering::equivalent;
  if (d.contains_zero()) return std::partial_ordering::unordered;
  return mpfr_sgn(d.mid_.get()) > 0 ? std::partial_ordering::greater : std::partial_ordering::less;
}

ExtReal ExtReal::abs() const {
  ExtReal r = *this;
  mpfr_abs(r.mid_.get(), r.mid_.get(), MPFR_RNDN);
  return r;
}

ExtReal ExtReal::operator-() const {
  ExtReal r = *this;
  mpfr_neg(r.mid_.get(), r.mid_.get(), MPFR_RNDN);
  return r;
}

ExtReal ExtReal::frac_distance() const {
  Mpfr f(precision()), r = rad_;
  int t = mpfr_frac(f.get(), mid_.get(), MPFR_RNDN);
  add_roundoff(r, f, t);
  mpfr_abs(f.get(), f.get(), MPFR_RNDN);
  if (mpfr_cmp_d(f.get(), 0.5) > 0) {
    t = mpfr_ui_sub(f.get(), 1, f.get(), MPFR_RNDN);
    add_roundoff(r, f, t);
  }
  return ExtReal(std::move(f), std::move(r));
}

std::optional<BigInt> ExtReal::nearest_integer() const {
  Mpfr n(precision());
  mpfr_round(n.get(), mid_.get());
  Mpfr d(precision() + 2);
  mpfr_sub(d.get(), mid_.get(), n.get(), MPFR_RNDN);  // exact at this precision
  mpfr_abs(d.get(), d.get(), MPFR_RNDU);
  Mpfr lim(kRadPrec);
  mpfr_add(lim.get(), d.get(), rad_.get(), MPFR_RNDU);
  if (mpfr_cmp_d(lim.get(), 0.5) >= 0) return std::nullopt;
  BigInt z;
  mpfr_get_z(z.backend().data(), n.get(), MPFR_RNDN);
  return z;
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
  Mpfr m(std::max(a.precision(), b.precision())), r(kRadPrec);
  int t = mpfr_add(m.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
  mpfr_add(r.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
  add_roundoff(r, m, t);
  return ExtReal(std::move(m), std::move(r));
}

ExtReal operator-(const ExtReal& a, const ExtReal& b) { return a + (-b); }

ExtReal operator*(const ExtReal& a, const ExtReal& b) {
  Mpfr m(std::max(a.precision(), b.precision())), r(kRadPrec), tmp(kRadPrec);
  int t = mpfr_mul(m.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
  mpfr_mul(r.get(), abs_up(a.mid_).get(), b.rad_.get(), MPFR_RNDU);
  mpfr_mul(tmp.get(), abs_up(b.mid_).get(), a.rad_.get(), MPFR_RNDU);
  mpfr_add(r.get(), r.get(), tmp.get(), MPFR_RNDU);
  mpfr_mul(tmp.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
  mpfr_add(r.get(), r.get(), tmp.get(), MPFR_RNDU);
  add_roundoff(r, m, t);
  return ExtReal(std::move(m), std::move(r));
}

ExtReal operator*(const ExtReal& a, const BigInt& n) {
  Mpfr m(a.precision()), r(kRadPrec);
  int t = mpfr_mul_z(m.get(), a.mid_.get(), z_src(n), MPFR_RNDN);
  BigInt an = abs(n);
  mpfr_mul_z(r.get(), a.rad_.get(), z_src(an), MPFR_RNDU);
  add_roundoff(r, m, t);
  return ExtReal(std::move(m), std::move(r));
}

// ---------------------------------------------------------- AlgebraicReal

int sign_at(std::span<const BigInt> poly, const BigRational& x) {
  // sign of sum c_i p^i q^(n-i), q > 0
  const BigInt& p = numerator(x);
  const BigInt& q = denominator(x);
  BigInt acc = 0, qpow = 1;
  // Horner over homogenized form: acc = c_n; acc = acc*p + c_i*q^(n-i)
  const std::size_t n = poly.size() - 1;
  acc = poly[n];
  for (std::size_t i = n; i-- > 0;) {
    qpow *= q;
    acc = acc * p + poly[i] * qpow;
  }
  return acc.sign();
}

namespace {

using RatPoly = std::vector<BigRational>;

void trim(RatPoly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

RatPoly rat_rem(RatPoly a, const RatPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
    BigRational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    if (a.empty()) return {BigRational(0)};
    trim(a);
  }
  return a;
}

int rat_sign_at(const RatPoly& p, const BigRational& x) {
  BigRational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc.sign();
}

// Number of distinct real roots in (lo, hi] via a Sturm chain.
int sturm_count(std::span<const BigInt> poly, const BigRational& lo, const BigRational& hi) {
  std::vector<RatPoly> chain;
  RatPoly p(poly.begin(), poly.end()), dp;
  for (std::size_t i = 1; i < p.size(); ++i) dp.push_back(p[i] * BigRational(static_cast<long>(i)));
  chain.push_back(p);
  chain.push_back(dp);
  while (chain.back().size() > 1) {
    RatPoly r = rat_rem(chain[chain.size() - 2], chain.back());
    if (r.size() == 1 && r[0] == 0) break;
    for (auto& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  auto variations = [&](const BigRational& x) {
    int v = 0, last = 0;
    for (const auto& q : chain) {
      int s = rat_sign_at(q, x);
      if (s == 0) continue;
      if (last != 0 && s != last) ++v;
      last = s;
    }
    return v;
  };
  return variations(lo) - variations(hi);
}

void horner(Mpfr& out, Mpfr& dout, std::span<const BigInt> poly, const Mpfr& x) {
  const mpfr_prec_t p = out.precision();
  mpfr_set_z(out.get(), z_src(poly.back()), MPFR_RNDN);
  mpfr_set_zero(dout.get(), 1);
  Mpfr tmp(p);
  for (std::size_t i = poly.size() - 1; i-- > 0;) {
    mpfr_mul(dout.get(), dout.get(), x.get(), MPFR_RNDN);
    mpfr_add(dout.get(), dout.get(), out.get(), MPFR_RNDN);
    mpfr_mul(out.get(), out.get(), x.get(), MPFR_RNDN);
    mpfr_add_z(out.get(), out.get(), z_src(poly[i]), MPFR_RNDN);
  }
}

}  // namespace

struct AlgebraicReal::State {
  std::vector<BigInt> poly;
  std::mutex mu;
  BigRational lo, hi;
  int sign_lo = 0;
  std::optional<BigRational> exact_root;
  unsigned cached_bits = 0;
  std::optional<ExtReal> cached;
};

AlgebraicReal::AlgebraicReal(std::vector<BigInt> poly, BigRational lo, BigRational hi)
    : state_(std::make_shared<State>()) {
  while (poly.size() > 1 && poly.back() == 0) poly.pop_back();
  if (poly.size() < 2) throw std::invalid_argument("algebraic number needs a polynomial of degree >= 1");
  if (!(lo < hi)) throw std::invalid_argument("isolating interval must have lo < hi");
  int slo = sign_at(poly, lo), shi = sign_at(poly, hi);
  if (slo == 0 || shi == 0 || slo == shi)
    throw std::invalid_argument("polynomial must change sign strictly across the isolating interval");
  if (sturm_count(poly, lo, hi) != 1) throw std::invalid_argument("interval does not isolate exactly one real root");
  state_->poly = std::move(poly);
  state_->lo = lo;
  state_->hi = hi;
  state_->sign_lo = slo;
}

const std::vector<BigInt>& AlgebraicReal::min_poly() const { return state_->poly; }

std::pair<BigRational, BigRational> AlgebraicReal::isolating_interval() const {
  std::lock_guard<std::mutex> g(state_->mu);
  return {state_->lo, state_->hi};
}

ExtReal AlgebraicReal::refine(unsigned bits) const {
  State& s = *state_;
  std::lock_guard<std::mutex> g(s.mu);
  if (s.cached && s.cached_bits >= bits) return *s.cached;
  const long mag = std::max<long>(0, magnitude_exponent(abs(s.hi) > abs(s.lo) ? s.hi : s.lo));
  const mpfr_prec_t work = static_cast<mpfr_prec_t>(bits) + 24 + mag;

  auto finish = [&](ExtReal r) {
    s.cached = r;
    s.cached_bits = bits;
    return r;
  };
  auto bisect_once = [&]() {
    BigRational m = (s.lo + s.hi) / 2;
    int sm = sign_at(s.poly, m);
    if (sm == 0) s.exact_root = m;
    else if (sm == s.sign_lo) s.lo = m;
    else s.hi = m;
  };

  if (s.exact_root) return finish(ExtReal::from_rational(*s.exact_root, work));
  const BigRational coarse = BigRational(1, BigInt(1) << 50);
  while (s.hi - s.lo > coarse) {
    bisect_once();
    if (s.exact_root) return finish(ExtReal::from_rational(*s.exact_root, work));
  }

  // Newton with doubling precision from the bisection midpoint.
  Mpfr x(work);
  mpfr_set_q(x.get(), q_src((s.lo + s.hi) / 2), MPFR_RNDN);
  std::vector<mpfr_prec_t> schedule;
  for (mpfr_prec_t p = work; p > 48; p = p / 2 + 1) schedule.push_back(p);
  std::reverse(schedule.begin(), schedule.end());
  schedule.push_back(work);
  schedule.push_back(work);
  for (mpfr_prec_t p : schedule) {
    Mpfr f(p + 16), df(p + 16), step(p + 16);
    horner(f, df, s.poly, x);
    if (mpfr_zero_p(df.get())) break;
    mpfr_div(step.get(), f.get(), df.get(), MPFR_RNDN);
    mpfr_sub(x.get(), x.get(), step.get(), MPFR_RNDN);
  }

  // Certify x +- 2^-(bits+1) by exact signs at dyadic endpoints.
  const BigRational delta(BigInt(1), BigInt(1) << (bits + 1));
  const BigRational cx = to_rational(x);
  const BigRational lo2 = cx - delta, hi2 = cx + delta;
  if (s.lo <= lo2 && hi2 <= s.hi) {
    int a = sign_at(s.poly, lo2), b = sign_at(s.poly, hi2);
    if (a == 0 || b == 0 || a != b) {
      s.lo = lo2;
      s.hi = hi2;
      Mpfr rad(kRadPrec);
      mpfr_set_q(rad.get(), q_src(delta), MPFR_RNDU);
      return finish(ExtReal(std::move(x), std::move(rad)));
    }
  }
  // Newton did not certify: exact bisection to the requested width.
  const BigRational target = 2 * delta;
  while (s.hi - s.lo > target) {
    bisect_once();
    if (s.exact_root) return finish(ExtReal::from_rational(*s.exact_root, work));
  }
  ExtReal mid = ExtReal::from_rational((s.lo + s.hi) / 2, work);
  Mpfr rad(kRadPrec);
  mpfr_set_q(rad.get(), q_src((s.hi - s.lo) / 2), MPFR_RNDU);
  mpfr_add(rad.get(), rad.get(), mid.rad().get(), MPFR_RNDU);
  return finish(ExtReal(mid.mid(), std::move(rad)));
}

// ---------------------------------------------------------------- Frequency

struct Frequency::Node {
  enum class Kind { rational, algebraic, euler, inverse_euler, inverse_two_pi, decimal, sum, product };
  Kind kind;
  std::string label;
  BigRational value;  // rational and decimal
  unsigned digits = 0;
  std::optional<AlgebraicReal> alg;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Frequency::Node;

// Bracket [f(RNDD), f(RNDU)] as an enclosure.
template <class F>
ExtReal bracket(mpfr_prec_t prec, F f) {
  Mpfr lo(prec), hi(prec);
  f(lo.get(), MPFR_RNDD);
  f(hi.get(), MPFR_RNDU);
  Mpfr mid(prec + 1), rad(kRadPrec);
  mpfr_add(mid.get(), lo.get(), hi.get(), MPFR_RNDN);
  mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
  mpfr_sub(rad.get(), hi.get(), lo.get(), MPFR_RNDU);
  mpfr_div_2ui(rad.get(), rad.get(), 1, MPFR_RNDU);
  Mpfr ulp(kRadPrec);
  mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_exp(mid.get()) - mid.precision(), MPFR_RNDU);
  mpfr_add(rad.get(), rad.get(), ulp.get(), MPFR_RNDU);
  return ExtReal(std::move(mid), std::move(rad));
}

long coarse_exponent(const Node& n);

ExtReal approx_node(const Node& n, unsigned bits) {
  switch (n.kind) {
    case Node::Kind::rational:
      return ExtReal::from_rational(n.value, bits + 4 + std::max<long>(0, magnitude_exponent(n.value)));
    case Node::Kind::algebraic:
      return n.alg->refine(bits);
    case Node::Kind::euler:
      return bracket(bits + 8, [](mpfr_ptr r, mpfr_rnd_t rnd) {
        mpfr_set_ui(r, 1, MPFR_RNDN);
        mpfr_exp(r, r, rnd);
      });
    case Node::Kind::inverse_euler:
      return bracket(bits + 8, [](mpfr_ptr r, mpfr_rnd_t rnd) {
        mpfr_set_si(r, -1, MPFR_RNDN);
        mpfr_exp(r, r, rnd);
      });
    case Node::Kind::inverse_two_pi:
      return bracket(bits + 8, [](mpfr_ptr r, mpfr_rnd_t rnd) {
        // 1/(2 pi): round pi the opposite way.
        mpfr_const_pi(r, rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD);
        mpfr_mul_2ui(r, r, 1, MPFR_RNDN);
        mpfr_ui_div(r, 1, r, rnd);
      });
    case Node::Kind::decimal: {
      ExtReal v = ExtReal::from_rational(n.value, bits + 4 + std::max<long>(0, magnitude_exponent(n.value)));
      Mpfr extra(kRadPrec), r = v.rad();
      mpfr_set_ui(extra.get(), 10, MPFR_RNDN);
      mpfr_pow_si(extra.get(), extra.get(), -static_cast<long>(n.digits), MPFR_RNDU);
      mpfr_add(r.get(), r.get(), extra.get(), MPFR_RNDU);
      return ExtReal(v.mid(), std::move(r));
    }
    case Node::Kind::sum:
      return approx_node(*n.a, bits + 2) + approx_node(*n.b, bits + 2);
    case Node::Kind::product: {
      long ea = std::max<long>(0, coarse_exponent(*n.a)), eb = std::max<long>(0, coarse_exponent(*n.b));
      return approx_node(*n.a, bits + 3 + eb) * approx_node(*n.b, bits + 3 + ea);
    }
  }
  throw std::logic_error("bad frequency node");
}

long coarse_exponent(const Node& n) {
  ExtReal v = approx_node(n, 16);
  Mpfr up(kRadPrec);
  mpfr_abs(up.get(), v.mid().get(), MPFR_RNDU);
  mpfr_add(up.get(), up.get(), v.rad().get(), MPFR_RNDU);
  if (mpfr_zero_p(up.get())) return 0;
  return mpfr_get_exp(up.get());
}

bool limited(const Node& n) {
  if (n.kind == Node::Kind::decimal) return true;
  if (n.a && limited(*n.a)) return true;
  return n.b && limited(*n.b);
}

std::optional<BigRational> rational_of(const Node& n) {
  switch (n.kind) {
    case Node::Kind::rational: return n.value;
    case Node::Kind::sum: {
      auto x = rational_of(*n.a), y = rational_of(*n.b);
      if (x && y) return *x + *y;
      return std::nullopt;
    }
    case Node::Kind::product: {
      auto x = rational_of(*n.a), y = rational_of(*n.b);
      if (x && y) return *x * *y;
      if ((x && *x == 0) || (y && *y == 0)) return BigRational(0);
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

std::shared_ptr<Node> make_node(Node::Kind k, std::string label) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->label = std::move(label);
  return n;
}

std::string rational_label(const BigRational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace

Frequency::Frequency() : Frequency(rational(0)) {}

Frequency Frequency::rational(const BigRational& q) {
  auto n = make_node(Node::Kind::rational, rational_label(q));
  n->value = q;
  return Frequency(std::move(n));
}

Frequency Frequency::algebraic(AlgebraicReal a, std::string label) {
  auto n = make_node(Node::Kind::algebraic, std::move(label));
  n->alg = std::move(a);
  return Frequency(std::move(n));
}

Frequency Frequency::euler() { return Frequency(make_node(Node::Kind::euler, "e")); }
Frequency Frequency::inverse_euler() { return Frequency(make_node(Node::Kind::inverse_euler, "inv_e")); }
Frequency Frequency::inverse_two_pi() { return Frequency(make_node(Node::Kind::inverse_two_pi, "inv_two_pi")); }

Frequency Frequency::decimal(std::string_view text, unsigned digits) {
  std::string s(text);
  bool neg = !s.empty() && s[0] == '-';
  if (neg || (!s.empty() && s[0] == '+')) s.erase(0, 1);
  auto dot = s.find('.');
  std::string ip = dot == std::string::npos ? s : s.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : s.substr(dot + 1);
  if (ip.empty()) ip = "0";
  if ((ip + fp).find_first_not_of("0123456789") != std::string::npos || (ip + fp).empty())
    throw std::invalid_argument("bad decimal literal: " + std::string(text));
  BigInt num(ip + fp), den = pow(BigInt(10), static_cast<unsigned>(fp.size()));
  auto n = make_node(Node::Kind::decimal, "dec:" + std::string(text) + ":" + std::to_string(digits));
  n->value = BigRational(neg ? BigInt(-num) : num, den);
  n->digits = digits;
  return Frequency(std::move(n));
}

ExtReal Frequency::approx(unsigned bits) const {
  // Children are asked for a few guard bits; retry if rounding still leaks.
  Mpfr target(kRadPrec);
  mpfr_set_ui_2exp(target.get(), 1, -static_cast<long>(bits), MPFR_RNDN);
  unsigned ask = bits;
  for (int attempt = 0; attempt < 4; ++attempt) {
    ExtReal r = approx_node(*node_, ask);
    if (mpfr_cmp(r.rad().get(), target.get()) <= 0 || limited(*node_)) return r;
    ask += 32;
  }
  return approx_node(*node_, ask);
}

std::optional<BigRational> Frequency::as_rational() const { return rational_of(*node_); }
bool Frequency::intrinsically_limited() const { return limited(*node_); }
const std::string& Frequency::label() const { return node_->label; }

Frequency operator+(const Frequency& a, const Frequency& b) {
  auto n = make_node(Node::Kind::sum, "(" + a.label() + "+" + b.label() + ")");
  n->a = a.node_;
  n->b = b.node_;
  return Frequency(std::move(n));
}

Frequency operator*(const Frequency& a, const Frequency& b) {
  auto n = make_node(Node::Kind::product, a.label() + "*" + b.label());
  n->a = a.node_;
  n->b = b.node_;
  return Frequency(std::move(n));
}

AlgebraicReal hofstadter_alpha(int d) {
  if (d < 2) throw std::invalid_argument("alpha_d needs d >= 2");
  std::vector<BigInt> p(d + 1, BigInt(0));
  p[0] = -1;
  p[1] = 1;
  p[d] += 1;
  return AlgebraicReal(std::move(p), BigRational(1, 2), BigRational(1));
}

namespace {

AlgebraicReal quadratic(long b, long c, long lo, long hi) {
  // x^2 + b x + c on (lo, hi)
  return AlgebraicReal({BigInt(c), BigInt(b), BigInt(1)}, BigRational(lo), BigRational(hi));
}

}  // namespace

std::vector<std::string> named_frequency_tags() {
  return {"alpha",  "alpha2", "alpha3", "alpha4",      "alpha5",         "alpha6",    "alpha7",
          "phi",    "inv_phi", "e",     "inv_e",       "sqrt2",          "sqrt3",     "sqrt5",
          "sqrt6",  "sqrt13", "sqrt13_half", "one_plus_sqrt6", "inv_two_pi"};
}

Frequency named_frequency(std::string_view tag) {
  static std::mutex mu;
  static std::map<std::string, Frequency, std::less<>> cache;
  std::lock_guard<std::mutex> g(mu);
  if (auto it = cache.find(tag); it != cache.end()) return it->second;
  std::string t(tag);
  std::optional<Frequency> f;
  if (t == "alpha") f = Frequency::algebraic(hofstadter_alpha(3), "alpha3");
  else if (t.size() == 6 && t.rfind("alpha", 0) == 0 && t[5] >= '2' && t[5] <= '9')
    f = Frequency::algebraic(hofstadter_alpha(t[5] - '0'), t);
  else if (t == "phi") f = Frequency::algebraic(quadratic(-1, -1, 1, 2), t);
  else if (t == "inv_phi") f = Frequency::algebraic(quadratic(1, -1, 0, 1), t);
  else if (t == "e") f = Frequency::euler();
  else if (t == "inv_e") f = Frequency::inverse_euler();
  else if (t == "inv_two_pi") f = Frequency::inverse_two_pi();
  else if (t == "sqrt2") f = Frequency::algebraic(quadratic(0, -2, 1, 2), t);
  else if (t == "sqrt3") f = Frequency::algebraic(quadratic(0, -3, 1, 2), t);
  else if (t == "sqrt5") f = Frequency::algebraic(quadratic(0, -5, 2, 3), t);
  else if (t == "sqrt6") f = Frequency::algebraic(quadratic(0, -6, 2, 3), t);
  else if (t == "sqrt13") f = Frequency::algebraic(quadratic(0, -13, 3, 4), t);
  else if (t == "sqrt13_half") f = Frequency::algebraic(quadratic(-1, -3, 2, 3), t);
  else if (t == "one_plus_sqrt6") f = Frequency::algebraic(quadratic(-2, -5, 3, 4), t);
  else throw std::invalid_argument("unknown frequency tag " + t);
  cache.emplace(t, *f);
  return *f;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

BigRational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return BigRational(parse_bigint(s));
  BigInt den = parse_bigint(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in " + s);
  return BigRational(parse_bigint(s.substr(0, slash)), den);
}

Frequency parse_factor(const std::string& f) {
  if (f.empty()) throw std::invalid_argument("empty frequency factor");
  if (f.rfind("alg:", 0) == 0) return named_frequency(f.substr(4));
  if (f.rfind("rat:", 0) == 0) return Frequency::rational(parse_rational(f.substr(4)));
  if (f.rfind("dec:", 0) == 0) {
    auto parts = split(f.substr(4), ':');
    if (parts.size() != 2 || parts[1].empty())
      throw std::invalid_argument("decimal frequency needs an explicit digit count: dec:<value>:<digits>");
    return Frequency::decimal(parts[0], static_cast<unsigned>(std::stoul(parts[1])));
  }
  if (f.rfind("root:", 0) == 0) {
    auto at = f.find('@');
    if (at == std::string::npos) throw std::invalid_argument("root frequency needs @lo:hi");
    std::vector<BigInt> coeffs;
    for (const auto& c : split(f.substr(5, at - 5), ',')) coeffs.push_back(parse_bigint(c));
    auto ends = split(f.substr(at + 1), ':');
    if (ends.size() != 2) throw std::invalid_argument("root interval must be lo:hi");
    return Frequency::algebraic(AlgebraicReal(coeffs, parse_rational(ends[0]), parse_rational(ends[1])), f);
  }
  if (f.find_first_not_of("+-0123456789/") == std::string::npos) return Frequency::rational(parse_rational(f));
  return named_frequency(f);
}

}  // namespace

Frequency parse_frequency(std::string_view spec) {
  std::optional<Frequency> total;
  for (const auto& term : split(spec, '+')) {
    std::optional<Frequency> prod;
    for (const auto& factor : split(term, '*')) {
      Frequency f = parse_factor(factor);
      prod = prod ? *prod * f : f;
    }
    total = total ? *total + *prod : *prod;
  }
  return *total;
}

// ------------------------------------------------------------- dist_to_int

namespace {

BigRational rational_frac_distance(const BigRational& q) {
  BigInt num = numerator(q), den = denominator(q);
  BigInt r = num % den;
  if (r < 0) r += den;
  BigInt s = den - r;
  return BigRational(r < s ? r : s, den);
}

}  // namespace

ExtReal dist_to_int(const Frequency& beta, const BigInt& a, unsigned guard_bits) {
  if (auto q = beta.as_rational()) {
    BigRational d = rational_frac_distance(*q * a);
    return ExtReal::from_rational(d, 128 + guard_bits);
  }
  const unsigned bits = static_cast<unsigned>(bit_length(a)) + guard_bits;
  return (beta.approx(bits) * a).frac_distance();
}

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::decays_geometric: return "decays_geometric";
    case DecayClass::non_decaying: return "non_decaying";
    case DecayClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

bool sample_determinate(const ExtReal& d) {
  if (d.is_exact()) return true;
  Mpfr tenth(kRadPrec);
  mpfr_div_ui(tenth.get(), d.mid().get(), 10, MPFR_RNDD);
  return mpfr_cmp(d.rad().get(), tenth.get()) < 0;
}

ExtReal upper(const ExtReal& d) {
  Mpfr u(kRadPrec);
  mpfr_add(u.get(), abs_up(d.mid()).get(), d.rad().get(), MPFR_RNDU);
  return ExtReal(std::move(u), Mpfr(kRadPrec));
}

double lower_double(const ExtReal& d) {
  Mpfr l(kRadPrec);
  mpfr_sub(l.get(), d.mid().get(), d.rad().get(), MPFR_RNDD);
  return mpfr_get_d(l.get(), MPFR_RNDD);
}

}  // namespace

DecayReport classify_decay(const Frequency& beta, const SequenceTable& seq, std::size_t k_first, std::size_t k_last,
                           const DecayOptions& opt) {
  if (k_first < 1 || k_last > seq.size() || k_first > k_last)
    throw RangeError("decay window outside materialized range of " + seq.label());
  DecayReport rep;
  rep.frequency_label = beta.label();
  rep.sequence_label = seq.label();
  for (std::size_t k = k_first; k <= k_last; ++k) {
    const BigInt a = seq.term(k);
    unsigned guard = opt.guard_bits;
    ExtReal d = dist_to_int(beta, a, guard);
    while (!sample_determinate(d) && !beta.intrinsically_limited() && guard < opt.max_extra_bits) {
      guard *= 2;
      d = dist_to_int(beta, a, guard);
    }
    rep.samples.push_back({k, d, sample_determinate(d)});
  }

  // Least-squares fit of log ||beta a_k|| against k over determinate nonzero samples.
  std::vector<double> xs, ys;
  for (const auto& s : rep.samples)
    if (s.determinate && !mpfr_zero_p(s.distance.mid().get())) {
      xs.push_back(static_cast<double>(s.index));
      ys.push_back(s.distance.log_mid());
    }
  if (xs.size() >= 3) {
    Eigen::MatrixXd A(xs.size(), 2);
    Eigen::VectorXd y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      A(i, 0) = 1.0;
      A(i, 1) = xs[i];
      y(i) = ys[i];
    }
    Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    double ssr = (A * coef - y).squaredNorm();
    double mean = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size()).mean();
    double sxx = 0;
    for (double x : xs) sxx += (x - mean) * (x - mean);
    rep.fitted_rate = coef(1);
    if (xs.size() > 2 && sxx > 0) rep.rate_stderr = std::sqrt(ssr / static_cast<double>(xs.size() - 2) / sxx);
  }

  const std::size_t tail_from = k_first + (k_last - k_first) / 2;
  std::size_t tail = 0, indet = 0, spread = 0, zeros = 0;
  double tail_max = 0;
  for (const auto& s : rep.samples) {
    if (s.index < tail_from) continue;
    ++tail;
    if (!s.determinate) {
      ++indet;
      continue;
    }
    if (s.distance.is_exact() && mpfr_zero_p(s.distance.mid().get())) ++zeros;
    tail_max = std::max(tail_max, upper(s.distance).to_double());
    if (lower_double(s.distance) > opt.spread_level) ++spread;
  }
  if (indet * 10 > tail) {
    rep.classification = DecayClass::indeterminate;
  } else if (zeros == tail) {
    rep.classification = DecayClass::decays_geometric;
  } else if (rep.fitted_rate && *rep.fitted_rate < -opt.slope_threshold && tail_max < opt.tail_max) {
    rep.classification = DecayClass::decays_geometric;
  } else if (static_cast<double>(spread) >= opt.spread_fraction * static_cast<double>(tail)) {
    rep.classification = DecayClass::non_decaying;
  } else {
    rep.classification = DecayClass::indeterminate;
  }
  return rep;
}

nlohmann::ordered_json to_json(const DecayReport& r) {
  nlohmann::ordered_json j;
  j["frequency"] = r.frequency_label;
  j["sequence"] = r.sequence_label;
  j["classification"] = to_string(r.classification);
  j["fitted_rate"] = r.fitted_rate ? nlohmann::ordered_json(*r.fitted_rate) : nlohmann::ordered_json(nullptr);
  j["rate_stderr"] = r.rate_stderr ? nlohmann::ordered_json(*r.rate_stderr) : nlohmann::ordered_json(nullptr);
  auto& arr = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : r.samples) {
    nlohmann::ordered_json e;
    e["k"] = s.index;
    e["distance"] = s.distance.to_decimal(20);
    long ee = s.distance.error_exponent();
    e["error_exponent"] = ee == LONG_MIN ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(ee);
    e["determinate"] = s.determinate;
    arr.push_back(std::move(e));
  }
  return j;
}

// ------------------------------------------------------ nearest integers

namespace {

BigInt nearest_or_throw(const Frequency& beta, const BigInt& a, std::size_t index) {
  if (auto q = beta.as_rational()) {
    BigRational x = *q * a;
    BigRational shifted = x + BigRational(1, 2);
    BigInt fl = numerator(shifted) / denominator(shifted);
    if (fl * denominator(shifted) > numerator(shifted)) fl -= 1;  // floor for negatives
    if (BigRational(fl) == shifted) throw IndeterminateError("exact half-integer tie at index " + std::to_string(index), index);
    return fl;
  }
  for (unsigned guard = 64; guard <= 4096; guard *= 2) {
    ExtReal x = beta.approx(static_cast<unsigned>(bit_length(a)) + guard) * a;
    if (auto n = x.nearest_integer()) return *n;
    if (beta.intrinsically_limited()) break;
  }
  throw IndeterminateError("nearest integer undecided at index " + std::to_string(index), index);
}

}  // namespace

NearestIntegerSequence nearest_integer_sequence(const Frequency& beta, const SequenceTable& seq) {
  if (!seq.spec()) throw std::invalid_argument("nearest_integer_sequence needs a recurrence-backed sequence");
  const auto& spec = *seq.spec();
  NearestIntegerSequence out;
  out.frequency_label = beta.label();
  for (std::size_t k = 1; k <= seq.size(); ++k) out.terms.push_back(nearest_or_throw(beta, seq.term(k), k));
  const std::size_t L = spec.order(), n = out.terms.size();
  std::size_t last_bad = 0;  // 1-indexed position of the last residual failure
  for (std::size_t i = L + 1; i <= n; ++i) {
    BigInt r = out.terms[i - 1];
    for (std::size_t j = 1; j <= L; ++j) r -= spec.coefficients[j - 1] * out.terms[i - 1 - j];
    if (r != 0) last_bad = i;
  }
  std::size_t start = last_bad == 0 ? 1 : last_bad - L + 1;
  if (start + L <= n) out.residual_recurrence_index = start;
  return out;
}

namespace {

// Exact solve of a square integer system; nullopt if singular.
std::optional<std::vector<BigRational>> solve_exact(std::vector<std::vector<BigRational>> m, std::vector<BigRational> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(rhs[p], rhs[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      BigRational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<BigRational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return x;
}

using RowFn = std::function<std::vector<BigInt>(std::size_t k)>;

CoefficientRecovery recover_with_rows(const Frequency& beta, const SequenceTable& seq, std::size_t k_first,
                                      std::size_t k_last, std::size_t m, const RowFn& row) {
  CoefficientRecovery out;
  if (k_last < k_first + 2 * m) throw RangeError("coefficient window too short");
  std::optional<std::vector<BigInt>> sol;
  std::size_t solved_end = 0;
  // Try windows ending at k_last, k_last-1, ... until one is nonsingular.
  for (std::size_t end = k_last; end + 1 >= k_first + 2 * m && !sol; --end) {
    std::vector<std::vector<BigRational>> mat;
    std::vector<BigRational> rhs;
    for (std::size_t k = end + 1 - m; k <= end; ++k) {
      auto r = row(k);
      mat.emplace_back(r.begin(), r.end());
      rhs.emplace_back(nearest_or_throw(beta, seq.term(k), k));
    }
    auto x = solve_exact(std::move(mat), std::move(rhs));
    if (!x) continue;
    std::vector<BigInt> ints;
    for (const auto& v : *x) {
      if (denominator(v) != 1) {
        out.reason = "non-integral solution";
        return out;
      }
      ints.push_back(numerator(v));
    }
    sol = std::move(ints);
    solved_end = end;
  }
  if (!sol) {
    out.reason = "singular system on every window";
    return out;
  }
  // The same coefficients must reproduce the disjoint window just below.
  for (std::size_t k = solved_end + 1 - 2 * m; k <= solved_end - m; ++k) {
    auto r = row(k);
    BigInt lhs = 0;
    for (std::size_t j = 0; j < m; ++j) lhs += (*sol)[j] * r[j];
    if (lhs != nearest_or_throw(beta, seq.term(k), k)) {
      out.reason = "inconsistent across windows";
      return out;
    }
  }
  auto rep = classify_decay(beta, seq, k_first, k_last);
  if (rep.classification != DecayClass::decays_geometric) {
    out.reason = "decay check failed: " + to_string(rep.classification);
    return out;
  }
  out.accepted = true;
  out.coefficients = std::move(*sol);
  return out;
}

}  // namespace

CoefficientRecovery recover_coefficients(const Frequency& beta, std::span<const Frequency> basis,
                                         const SequenceTable& seq, std::size_t k_first, std::size_t k_last) {
  std::vector<Frequency> b(basis.begin(), basis.end());
  try {
    return recover_with_rows(beta, seq, k_first, k_last, b.size(), [&](std::size_t k) {
      std::vector<BigInt> r;
      for (const auto& g : b) r.push_back(nearest_or_throw(g, seq.term(k), k));
      return r;
    });
  } catch (const IndeterminateError& e) {
    return {false, {}, e.what()};
  }
}

CoefficientRecovery recover_coefficients(const Frequency& beta, const AlgebraicReal& base_alg, const SequenceTable& seq,
                                         std::size_t k_first, std::size_t k_last) {
  if (base_alg.degree() != 3) throw std::invalid_argument("degree-3 recovery needs a cubic base");
  if (k_first < 3) k_first = 3;
  try {
    return recover_with_rows(beta, seq, k_first, k_last, 3, [&](std::size_t k) {
      return std::vector<BigInt>{seq.term(k), seq.term(k - 1), seq.term(k - 2)};
    });
  } catch (const IndeterminateError& e) {
    return {false, {}, e.what()};
  }
}

std::optional<int> find_decay_multiplier(const Frequency& beta, const SequenceTable& seq, std::size_t k_first,
                                         std::size_t k_last, int d_max) {
  for (int d = 1; d <= d_max; ++d) {
    auto rep = classify_decay(beta.scaled(BigRational(d)), seq, k_first, k_last);
    if (rep.classification == DecayClass::decays_geometric) return d;
  }
  return std::nullopt;
}

}  // namespace modsig
