#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "kleinian/error.hpp"

namespace kleinian {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

inline Integer numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denominator(const Rational& r) { return boost::multiprecision::denominator(r); }
inline bool is_integral(const Rational& r) { return denominator(r) == 1; }

inline int sign(const Rational& r) { return r.sign(); }
inline int sign(const Integer& r) { return r.sign(); }

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Integer floor(const Rational& r) { return floor_div(numerator(r), denominator(r)); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Integer& v) { return v.str(); }

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty rational");
  auto valid_int = [](const std::string& t) {
    std::size_t i = (t.size() > 0 && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  auto to_int = [](std::string t) {
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    return Integer(t);
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!valid_int(s)) throw Error(ErrorCode::ParseError, "bad rational '" + s + "'");
    return Rational(to_int(s));
  }
  std::string p = s.substr(0, slash), q = s.substr(slash + 1);
  if (!valid_int(p) || !valid_int(q)) throw Error(ErrorCode::ParseError, "bad rational '" + s + "'");
  Integer den = to_int(q);
  if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + s + "'");
  return Rational(to_int(p), den);
}

/// Square-free part of a positive integer (trial division).
inline Integer squarefree_part(Integer n, Integer* square_root_of_rest = nullptr) {
  Integer free = 1, root = 1;
  for (Integer p = 2; p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      root *= p;
    }
    if (n % p == 0) {
      n /= p;
      free *= p;
    }
  }
  free *= n;
  if (square_root_of_rest) *square_root_of_rest = root;
  return free;
}

inline bool is_perfect_square(const Integer& n) {
  if (n < 0) return false;
  Integer r = boost::multiprecision::sqrt(n);
  return r * r == n;
}

/// Element a + b√d of the real quadratic field Q(√d).
///
/// d is square-free and > 1 whenever b ≠ 0. Pure rationals carry d = 0
/// ("field not yet fixed") and adopt the field of whatever they meet.
class QuadExt {
 public:
  QuadExt() = default;
  QuadExt(int a) : a_(a) {}
  QuadExt(long a) : a_(a) {}
  QuadExt(long long a) : a_(a) {}
  QuadExt(const Integer& a) : a_(a) {}
  QuadExt(const Rational& a) : a_(a) {}
  QuadExt(Rational a, Rational b, std::int64_t d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (b_ == 0) {
      d_ = d > 1 ? d : 0;
      return;
    }
    if (d <= 1 || squarefree_part(Integer(d)) != d)
      throw Error(ErrorCode::FieldMismatch, "radicand must be square-free and > 1");
  }

  const Rational& rational_part() const { return a_; }
  const Rational& radical_part() const { return b_; }
  std::int64_t radicand() const { return d_; }
  bool is_rational() const { return b_ == 0; }

  QuadExt conj() const { return QuadExt(a_, -b_, d_); }
  /// Field norm a² − d b².
  Rational norm() const { return a_ * a_ - b_ * b_ * d_; }

  int sign() const {
    int sa = a_.sign(), sb = b_.sign();
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    return (a_ * a_ > b_ * b_ * d_) ? sa : sb;
  }

  double to_double() const {
    if (b_ == 0) return kleinian::to_double(a_);
    double root = std::sqrt(static_cast<double>(d_));
    if (a_.sign() != 0 && a_.sign() != b_.sign()) {
      // a + b√d = N / (a − b√d) avoids cancellation
      return kleinian::to_double(norm()) /
             (kleinian::to_double(a_) - kleinian::to_double(b_) * root);
    }
    return kleinian::to_double(a_) + kleinian::to_double(b_) * root;
  }

  QuadExt operator-() const { return QuadExt(-a_, -b_, d_); }
  QuadExt& operator+=(const QuadExt& o) {
    d_ = common_field(o);
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  QuadExt& operator-=(const QuadExt& o) {
    d_ = common_field(o);
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  QuadExt& operator*=(const QuadExt& o) {
    std::int64_t d = common_field(o);
    Rational a = a_ * o.a_ + b_ * o.b_ * d;
    Rational b = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    d_ = d;
    return *this;
  }
  QuadExt& operator/=(const QuadExt& o) {
    if (o.a_ == 0 && o.b_ == 0) throw Error(ErrorCode::Singular, "division by zero in Q(√d)");
    if (o.b_ == 0) {
      a_ /= o.a_;
      b_ /= o.a_;
      return *this;
    }
    Rational n = o.norm();
    QuadExt c = o.conj();
    *this *= c;
    a_ /= n;
    b_ /= n;
    return *this;
  }

  friend QuadExt operator+(QuadExt x, const QuadExt& y) { return x += y; }
  friend QuadExt operator-(QuadExt x, const QuadExt& y) { return x -= y; }
  friend QuadExt operator*(QuadExt x, const QuadExt& y) { return x *= y; }
  friend QuadExt operator/(QuadExt x, const QuadExt& y) { return x /= y; }

  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && (x.b_ == 0 || x.d_ == y.d_);
  }
  friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }
  friend bool operator<(const QuadExt& x, const QuadExt& y) { return (x - y).sign() < 0; }
  friend bool operator>(const QuadExt& x, const QuadExt& y) { return y < x; }
  friend bool operator<=(const QuadExt& x, const QuadExt& y) { return !(y < x); }
  friend bool operator>=(const QuadExt& x, const QuadExt& y) { return !(x < y); }

  friend std::ostream& operator<<(std::ostream& os, const QuadExt& q);

 private:
  std::int64_t common_field(const QuadExt& o) const {
    if (b_ == 0) return o.b_ == 0 ? (d_ ? d_ : o.d_) : o.d_;
    if (o.b_ == 0 || o.d_ == d_) return d_;
    throw Error(ErrorCode::FieldMismatch,
                "Q(√" + std::to_string(d_) + ") vs Q(√" + std::to_string(o.d_) + ")");
  }

  Rational a_{0};
  Rational b_{0};
  std::int64_t d_ = 0;
};

inline int sign(const QuadExt& q) { return q.sign(); }
inline double to_double(const QuadExt& q) { return q.to_double(); }

inline Integer floor(const QuadExt& q) {
  if (q.is_rational()) return floor(q.rational_part());
  Integer f(static_cast<long long>(std::floor(q.to_double())));
  while (QuadExt(Rational(f)) > q) --f;
  while (QuadExt(Rational(f + 1)) <= q) ++f;
  return f;
}

inline std::string to_string(const QuadExt& q) {
  if (q.is_rational()) return to_string(q.rational_part());
  std::string out;
  if (q.rational_part() != 0) out = to_string(q.rational_part());
  const Rational& b = q.radical_part();
  if (b > 0 && !out.empty()) out += "+";
  if (b == -1)
    out += "-";
  else if (b != 1)
    out += to_string(b);
  out += "√" + std::to_string(q.radicand());
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const QuadExt& q) { return os << to_string(q); }

/// Accepts "p/q", "a+b√d", "a-b√d", "b√d" and "√d".
inline QuadExt parse_quadext(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  static const std::string root = "√";
  auto pos = s.find(root);
  if (pos == std::string::npos) return QuadExt(parse_rational(s));
  std::string radicand = s.substr(pos + root.size());
  std::string head = s.substr(0, pos);
  std::int64_t d = 0;
  try {
    d = std::stoll(radicand);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad radicand in '" + s + "'");
  }
  std::size_t split = std::string::npos;
  for (std::size_t i = head.size(); i-- > 1;) {
    if ((head[i] == '+' || head[i] == '-') && head[i - 1] != '/') {
      split = i;
      break;
    }
  }
  std::string a_text = split == std::string::npos ? "0" : head.substr(0, split);
  std::string b_text = split == std::string::npos ? head : head.substr(split);
  if (b_text.empty() || b_text == "+") b_text = "1";
  if (b_text == "-") b_text = "-1";
  return QuadExt(parse_rational(a_text), parse_rational(b_text), d);
}

inline std::string to_string(const Complex& z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+") << std::abs(z.imag())
     << "i";
  return os.str();
}

/// Per-kind behaviour the projective templates rely on.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static bool is_zero(const Rational& x, double = 0) { return x == 0; }
  static Complex to_complex(const Rational& x) { return {to_double(x), 0.0}; }
  static double magnitude(const Rational& x) { return std::abs(to_double(x)); }
  static std::string format(const Rational& x) { return to_string(x); }
};

template <>
struct ScalarTraits<QuadExt> {
  static constexpr bool exact = true;
  static bool is_zero(const QuadExt& x, double = 0) { return x == QuadExt(0); }
  static Complex to_complex(const QuadExt& x) { return {x.to_double(), 0.0}; }
  static double magnitude(const QuadExt& x) { return std::abs(x.to_double()); }
  static std::string format(const QuadExt& x) { return to_string(x); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static bool is_zero(const Complex& x, double tol) { return std::abs(x) <= tol; }
  static Complex to_complex(const Complex& x) { return x; }
  static double magnitude(const Complex& x) { return std::abs(x); }
  static std::string format(const Complex& x) { return to_string(x); }
};

template <class S>
concept ExactScalar = ScalarTraits<S>::exact;

/// Real-valued exact scalars with a decidable sign (ordered fields).
template <class S>
int real_sign(const S& x) {
  return sign(x);
}

}  // namespace kleinian
