#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "lfmo/errors.hpp"

namespace lfmo {

// Sign-magnitude arbitrary-precision integer, base 2^32. Small and slow by
// bignum-library standards, but signature arithmetic only ever touches a few
// hundred values per system, all well under a few hundred bits.
class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v) {  // NOLINT: implicit by design
    neg_ = v < 0;
    unsigned long long m = neg_ ? -(unsigned long long)v : (unsigned long long)v;
    while (m) {
      limbs_.push_back(static_cast<uint32_t>(m & 0xFFFFFFFFu));
      m >>= 32;
    }
  }
  static BigInt from_i128(__int128 v) {
    BigInt r;
    r.neg_ = v < 0;
    unsigned __int128 m = r.neg_ ? -(unsigned __int128)v : (unsigned __int128)v;
    while (m) {
      r.limbs_.push_back(static_cast<uint32_t>(m & 0xFFFFFFFFu));
      m >>= 32;
    }
    return r;
  }

  bool is_zero() const { return limbs_.empty(); }
  bool negative() const { return neg_; }
  BigInt operator-() const {
    BigInt r = *this;
    if (!r.is_zero()) r.neg_ = !r.neg_;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.neg_ == b.neg_) {
      BigInt r;
      r.limbs_ = add_mag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_ && !r.limbs_.empty();
      return r;
    }
    int c = cmp_mag(a.limbs_, b.limbs_);
    if (c == 0) return BigInt();
    BigInt r;
    if (c > 0) {
      r.limbs_ = sub_mag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
    } else {
      r.limbs_ = sub_mag(b.limbs_, a.limbs_);
      r.neg_ = b.neg_;
    }
    if (r.limbs_.empty()) r.neg_ = false;
    return r;
  }
  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }
  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.is_zero() || b.is_zero()) return r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
      uint64_t carry = 0;
      for (size_t j = 0; j < b.limbs_.size(); ++j) {
        uint64_t cur = r.limbs_[i + j] +
                       (uint64_t)a.limbs_[i] * b.limbs_[j] + carry;
        r.limbs_[i + j] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
      }
      size_t k = i + b.limbs_.size();
      while (carry) {
        uint64_t cur = r.limbs_[k] + carry;
        r.limbs_[k] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
        ++k;
      }
    }
    r.trim();
    r.neg_ = a.neg_ != b.neg_;
    return r;
  }

  // Shift-subtract long division on magnitudes; remainder keeps a's sign
  // convention unused here (we only divide exact multiples or for gcd).
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw ValidationError("BigInt division by zero");
    q = BigInt();
    r = BigInt();
    int bits = static_cast<int>(a.limbs_.size()) * 32;
    q.limbs_.assign(a.limbs_.size(), 0);
    for (int i = bits - 1; i >= 0; --i) {
      r.shl1();
      if (a.bit(i)) r.set_bit0();
      if (cmp_mag(r.limbs_, b.limbs_) >= 0) {
        r.limbs_ = sub_mag(r.limbs_, b.limbs_);
        q.limbs_[i / 32] |= (1u << (i % 32));
      }
    }
    q.trim();
    r.trim();
    q.neg_ = (a.neg_ != b.neg_) && !q.limbs_.empty();
    r.neg_ = a.neg_ && !r.limbs_.empty();
  }
  friend BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return q;
  }
  friend BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return r;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
  friend bool operator<(const BigInt& a, const BigInt& b) {
    if (a.neg_ != b.neg_) return a.neg_;
    int c = cmp_mag(a.limbs_, b.limbs_);
    return a.neg_ ? c > 0 : c < 0;
  }

  static BigInt gcd(BigInt a, BigInt b) {
    a.neg_ = b.neg_ = false;
    while (!b.is_zero()) {
      BigInt q, r;
      divmod(a, b, q, r);
      a = b;
      b = r;
    }
    return a;
  }

  double to_double() const {
    double v = 0.0;
    for (auto it = limbs_.rbegin(); it != limbs_.rend(); ++it)
      v = v * 4294967296.0 + static_cast<double>(*it);
    return neg_ ? -v : v;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::vector<uint32_t> m = limbs_;
    std::string digits;
    while (!m.empty()) {
      uint64_t rem = 0;
      for (size_t i = m.size(); i-- > 0;) {
        uint64_t cur = (rem << 32) | m[i];
        m[i] = static_cast<uint32_t>(cur / 1000000000u);
        rem = cur % 1000000000u;
      }
      while (!m.empty() && m.back() == 0) m.pop_back();
      for (int d = 0; d < 9; ++d) {
        digits.push_back('0' + static_cast<char>(rem % 10));
        rem /= 10;
      }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    std::string out = neg_ ? "-" : "";
    out.append(digits.rbegin(), digits.rend());
    return out;
  }

 private:
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
  }
  void shl1() {
    uint32_t carry = 0;
    for (auto& l : limbs_) {
      uint32_t nc = l >> 31;
      l = (l << 1) | carry;
      carry = nc;
    }
    if (carry) limbs_.push_back(carry);
  }
  void set_bit0() {
    if (limbs_.empty()) limbs_.push_back(0);
    limbs_[0] |= 1u;
  }
  bool bit(int i) const {
    size_t w = i / 32;
    if (w >= limbs_.size()) return false;
    return (limbs_[w] >> (i % 32)) & 1u;
  }
  static int cmp_mag(const std::vector<uint32_t>& a,
                     const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }
  static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r;
    r.reserve(std::max(a.size(), b.size()) + 1);
    uint64_t carry = 0;
    for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
      uint64_t cur = carry;
      if (i < a.size()) cur += a[i];
      if (i < b.size()) cur += b[i];
      r.push_back(static_cast<uint32_t>(cur));
      carry = cur >> 32;
    }
    if (carry) r.push_back(static_cast<uint32_t>(carry));
    return r;
  }
  // requires |a| >= |b|
  static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r = a;
    int64_t borrow = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      int64_t cur = (int64_t)r[i] - borrow - (i < b.size() ? b[i] : 0);
      if (cur < 0) {
        cur += (int64_t)1 << 32;
        borrow = 1;
      } else {
        borrow = 0;
      }
      r[i] = static_cast<uint32_t>(cur);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  std::vector<uint32_t> limbs_;  // little-endian, no leading zeros
  bool neg_ = false;
};

// Exact rational with reduced representation, denominator > 0.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT
  Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    normalize();
  }
  static Rational ratio(long long num, long long den) {
    return Rational(BigInt(num), BigInt(den));
  }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == BigInt(1); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw ValidationError("Rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (a.num_ * b.den_) < (b.num_ * a.den_);
  }

  double to_double() const { return num_.to_double() / den_.to_double(); }
  std::string to_string() const {
    if (is_integer()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
  }

  // Parses "a/b" or "a".
  static Rational parse(const std::string& text) {
    auto slash = text.find('/');
    auto to_big = [](const std::string& s) {
      if (s.empty()) throw ValidationError("empty rational component");
      BigInt v(0);
      size_t i = 0;
      bool neg = s[0] == '-';
      if (neg || s[0] == '+') i = 1;
      if (i == s.size()) throw ValidationError("bad rational: " + s);
      for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
          throw ValidationError("bad rational digit in: " + s);
        v = v * BigInt(10) + BigInt(s[i] - '0');
      }
      return neg ? -v : v;
    };
    if (slash == std::string::npos) return Rational(to_big(text), BigInt(1));
    return Rational(to_big(text.substr(0, slash)),
                    to_big(text.substr(slash + 1)));
  }

 private:
  void normalize() {
    if (den_.is_zero()) throw ValidationError("Rational with zero denominator");
    if (den_.negative()) {
      den_ = -den_;
      num_ = -num_;
    }
    if (num_.is_zero()) {
      den_ = BigInt(1);
      return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    num_ = num_ / g;
    den_ = den_ / g;
  }

  BigInt num_;
  BigInt den_;
};

}  // namespace lfmo
