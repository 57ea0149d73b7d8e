#pragma once

/*!
  \file scalar.hpp
  \brief Numeric backends for probability weights.

  Two backends are supported: arbitrary-precision rationals (exact arithmetic,
  equality checks are meaningful) and binary64 floats (tolerance-based checks).
  Everything that manipulates weights is templated on the scalar type; the
  traits class here supplies the few operations that differ between backends.
*/

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "errors.hpp"

namespace lrchan
{

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

/* comparison tolerances for the float backend (design: closed-form values are
   checked tightly, derived quantities loosely) */
inline constexpr double closed_form_tol = 1e-12;
inline constexpr double general_tol = 1e-9;

/*! \brief Parses a decimal or fraction literal into an exact rational.
 *
 *  Accepts "a/b", integers, plain decimals ("0.125") and scientific notation
 *  ("2.5e-3"). Decimal forms are converted exactly (digits over a power of ten).
 */
namespace detail
{

/* cpp_int reads a leading zero as an octal prefix; digit strings here are decimal */
inline bigint decimal_bigint( std::string s )
{
  bool negative = false;
  std::size_t pos = 0;
  if ( pos < s.size() && ( s[pos] == '+' || s[pos] == '-' ) )
  {
    negative = s[pos] == '-';
    ++pos;
  }
  while ( pos + 1 < s.size() && s[pos] == '0' )
    ++pos;
  s = s.substr( pos );
  if ( s.empty() )
    throw validation_error( "empty numeric literal" );
  for ( char c : s )
    if ( c < '0' || c > '9' )
      throw validation_error( "malformed integer '" + s + "'" );
  bigint v( s );
  return negative ? -v : v;
}

} // namespace detail

inline rational parse_rational( const std::string& text )
{
  if ( text.empty() )
    throw validation_error( "empty numeric literal" );

  const auto slash = text.find( '/' );
  if ( slash != std::string::npos )
  {
    bigint num = detail::decimal_bigint( text.substr( 0, slash ) );
    bigint den = detail::decimal_bigint( text.substr( slash + 1 ) );
    if ( den == 0 )
      throw validation_error( "zero denominator in '" + text + "'" );
    return rational( num, den );
  }

  std::string digits = text;
  bool negative = false;
  std::size_t pos = 0;
  if ( pos < digits.size() && ( digits[pos] == '+' || digits[pos] == '-' ) )
  {
    negative = digits[pos] == '-';
    ++pos;
  }

  std::string mantissa;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  long exponent = 0;
  for ( ; pos < digits.size(); ++pos )
  {
    const char c = digits[pos];
    if ( c >= '0' && c <= '9' )
    {
      mantissa.push_back( c );
      seen_digit = true;
      if ( seen_dot )
        ++frac_digits;
    }
    else if ( c == '.' && !seen_dot )
    {
      seen_dot = true;
    }
    else if ( ( c == 'e' || c == 'E' ) && seen_digit )
    {
      try
      {
        exponent = std::stol( digits.substr( pos + 1 ) );
      }
      catch ( const std::exception& )
      {
        throw validation_error( "malformed exponent in '" + text + "'" );
      }
      break;
    }
    else
    {
      throw validation_error( "malformed numeric literal '" + text + "'" );
    }
  }
  if ( !seen_digit )
    throw validation_error( "malformed numeric literal '" + text + "'" );

  bigint num = detail::decimal_bigint( mantissa.empty() ? "0" : mantissa );
  if ( negative )
    num = -num;
  bigint den = 1;
  long net = exponent - frac_digits;
  for ( long i = 0; i < ( net < 0 ? -net : net ); ++i )
  {
    if ( net < 0 )
      den *= 10;
    else
      num *= 10;
  }
  return rational( num, den );
}

/*! \brief Renders a rational as "a/b" (or "a" when the denominator is one). */
inline std::string to_fraction_string( const rational& r )
{
  std::string s = numerator( r ).str();
  if ( denominator( r ) != 1 )
    s += "/" + denominator( r ).str();
  return s;
}

template<typename R>
struct scalar;

template<>
struct scalar<double>
{
  static constexpr bool exact = false;

  static double from_double( double v ) { return v; }
  static double to_double( double v ) { return v; }
  static double from_string( const std::string& s ); /* defined after the exact backend */

  /* multiplicative ratio bound e^eps */
  static double ratio_of_eps( double eps ) { return std::exp( eps ); }

  static bool close( double a, double b, double tol = general_tol )
  {
    return std::fabs( a - b ) <= tol;
  }

  static double to_double_checked( const std::string& );
};

template<>
struct scalar<rational>
{
  static constexpr bool exact = true;

  static rational from_double( double v )
  {
    if ( !std::isfinite( v ) )
      throw validation_error( "non-finite value cannot become a rational" );
    return rational( v ); /* exact: every finite double is dyadic */
  }

  static double to_double( const rational& v ) { return v.convert_to<double>(); }

  static rational from_string( const std::string& s ) { return parse_rational( s ); }

  /* Rational lower bound on e^eps. Rounding down is the sound direction for
     every use in this toolkit: at a smaller ratio bound the measured
     hockey-stick delta can only be larger, so "delta <= bound" conclusions
     remain valid for the true e^eps. */
  static rational ratio_of_eps( double eps )
  {
    if ( eps < 0.0 )
      throw validation_error( "ratio bound needs eps >= 0" );
    double v = std::exp( eps );
    v = std::nextafter( std::nextafter( v, 0.0 ), 0.0 );
    rational r = from_double( v );
    return r < 1 ? rational( 1 ) : r;
  }

  static bool close( const rational& a, const rational& b, double = 0.0 )
  {
    return a == b;
  }

  static double to_double_checked( const std::string& s )
  {
    return parse_rational( s ).convert_to<double>();
  }
};

inline double scalar<double>::to_double_checked( const std::string& s )
{
  return scalar<rational>::to_double_checked( s );
}

inline double scalar<double>::from_string( const std::string& s )
{
  /* fraction strings belong to the exact backend */
  if ( s.find( '/' ) != std::string::npos )
    throw validation_error( "fraction literal '" + s + "' requires the rational backend" );
  return parse_rational( s ).convert_to<double>();
}

/*! \brief A log-ratio value that is either a finite non-negative real or infinite.
 *
 *  Support mismatch between two distributions is a semantic outcome, so it is
 *  carried as a distinguished state instead of a float sentinel.
 */
class eps_value
{
public:
  eps_value() : finite_( true ), value_( 0.0 ) {}
  explicit eps_value( double v ) : finite_( true ), value_( v ) {}

  static eps_value infinite()
  {
    eps_value e;
    e.finite_ = false;
    e.value_ = 0.0;
    return e;
  }

  bool is_infinite() const { return !finite_; }
  bool is_finite() const { return finite_; }

  double value() const
  {
    if ( !finite_ )
      throw degenerate_error( "eps is infinite" );
    return value_;
  }

  /* infinite compares above every finite value */
  bool operator<( const eps_value& o ) const
  {
    if ( !finite_ )
      return false;
    if ( !o.finite_ )
      return true;
    return value_ < o.value_;
  }

  bool leq( double bound ) const { return finite_ && value_ <= bound; }

  std::string str() const
  {
    return finite_ ? std::to_string( value_ ) : std::string( "infinite" );
  }

private:
  bool finite_;
  double value_;
};

inline eps_value max( const eps_value& a, const eps_value& b )
{
  return a < b ? b : a;
}

} // namespace lrchan
