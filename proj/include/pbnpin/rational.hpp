/*!
  \file rational.hpp
  \brief Exact rational scalars (arbitrary-precision, always in lowest terms)
*/

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <stdexcept>
#include <string>

namespace pbnpin {

using integer = boost::multiprecision::cpp_int;
using rational = boost::rational<integer>;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configured bound was exceeded (state space, in-degree, mode count, ...).
struct cap_error : error {
  using error::error;
};

/// A defining equation failed to verify after synthesis; indicates a bug.
struct internal_error : error {
  using error::error;
};

inline rational rat(long long num, long long den = 1) {
  return rational(integer(num), integer(den));
}

inline std::string to_string(const rational& r) {
  if (r.denominator() == 1) {
    return r.numerator().str();
  }
  return r.numerator().str() + "/" + r.denominator().str();
}

} // namespace pbnpin
