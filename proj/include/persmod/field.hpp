#pragma once

#include <cstdint>
#include <stdexcept>

namespace pm {

using Elem = std::uint32_t;

bool is_prime(std::uint64_t n);

// Arithmetic in Z/p for a prime p < 2^31.
class Field {
 public:
  static constexpr Elem kDefaultPrime = 65521;

  explicit Field(Elem p = kDefaultPrime) : p_(p) {
    if (p < 2 || p >= (Elem(1) << 31) || !is_prime(p))
      throw std::invalid_argument("field characteristic must be a prime below 2^31");
  }

  Elem p() const { return p_; }

  Elem add(Elem a, Elem b) const {
    Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p_ - b; }
  Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
  Elem mul(Elem a, Elem b) const {
    return static_cast<Elem>(static_cast<std::uint64_t>(a) * b % p_);
  }
  Elem pow(Elem a, std::uint64_t e) const {
    Elem r = 1 % p_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  Elem inv(Elem a) const {
    if (a == 0) throw std::domain_error("inverse of zero in F_p");
    return pow(a, p_ - 2);
  }
  Elem from_int(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<Elem>(r);
  }

  bool operator==(const Field& o) const { return p_ == o.p_; }

 private:
  Elem p_;
};

}  // namespace pm
