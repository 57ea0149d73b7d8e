#pragma once

/*!
  \file constructions.hpp
  \brief Concrete channels and functionalities: the binary symmetric channel,
  the noisy-hint example channel, the randomized-response channel and the
  XOR functionalities.
*/

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "functionality.hpp"
#include "scalar.hpp"
#include "tokens.hpp"

namespace lrchan
{

/*! \brief A biased coin specified by its probability of being one.
 *
 *  Stored that way to avoid sign confusion: a coin at bias b disagrees with
 *  its source with probability 1/2 - b, so from_bias(b) has p_one = 1/2 - b.
 */
template<typename R>
struct noise_spec
{
  R p_one;

  explicit noise_spec( R p ) : p_one( std::move( p ) )
  {
    if ( p_one < R( 0 ) || p_one > R( 1 ) )
      throw validation_error( "coin probability must lie in [0,1]" );
  }

  static noise_spec from_bias( const R& bias )
  {
    if ( bias < R( 0 ) || bias > R( 1 ) / R( 2 ) )
      throw validation_error( "coin bias must lie in [0, 1/2]" );
    return noise_spec( R( 1 ) / R( 2 ) - bias );
  }

  R p_zero() const { return R( 1 ) - p_one; }
};

/*! \brief Binary symmetric channel: out_a uniform, out_b = out_a xor Bernoulli(p),
 *  each view is the party's own output bit. */
template<typename R>
channel<R> bsc_channel( const R& p )
{
  if ( p < R( 0 ) || p > R( 1 ) )
    throw validation_error( "bsc_channel needs p in [0,1]" );
  std::vector<typename channel<R>::atom> atoms;
  const R half = R( 1 ) / R( 2 );
  for ( int oa = 0; oa < 2; ++oa )
    for ( int flip = 0; flip < 2; ++flip )
    {
      const int ob = oa ^ flip;
      atoms.push_back( { bit_token( oa ), oa, bit_token( ob ), ob,
                         half * ( flip ? p : R( 1 ) - p ) } );
    }
  return channel<R>( std::move( atoms ) );
}

/*!
  \brief Noisy-hint channel: out_a uniform, out_b = out_a xor U(1/2 - alpha),
  and each party additionally sees the other output through an independent
  U(1/2 - noise_eps) coin.

  Agreement is exactly alpha. At noise_eps = 0 the hints are fresh coin flips
  and the leakage vanishes; at positive noise_eps both parties leak the same
  finite amount.
*/
template<typename R>
channel<R> noisy_example_channel( const R& alpha, const R& noise_eps )
{
  const auto agree_coin = noise_spec<R>::from_bias( alpha );
  const auto hint_coin = noise_spec<R>::from_bias( noise_eps );

  std::vector<typename channel<R>::atom> atoms;
  const R half = R( 1 ) / R( 2 );
  for ( int oa = 0; oa < 2; ++oa )
    for ( int f0 = 0; f0 < 2; ++f0 )
      for ( int f1 = 0; f1 < 2; ++f1 )
        for ( int f2 = 0; f2 < 2; ++f2 )
        {
          const int ob = oa ^ f0;
          const int hint_a = ob ^ f1;
          const int hint_b = oa ^ f2;
          const R w = half * ( f0 ? agree_coin.p_one : agree_coin.p_zero() ) *
                      ( f1 ? hint_coin.p_one : hint_coin.p_zero() ) *
                      ( f2 ? hint_coin.p_one : hint_coin.p_zero() );
          atoms.push_back( { compose_tokens( { bit_token( oa ), bit_token( hint_a ) } ), oa,
                             compose_tokens( { bit_token( ob ), bit_token( hint_b ) } ), ob, w } );
        }
  return channel<R>( std::move( atoms ) );
}

/*! \brief Randomized-response flip probability 1/(1+e^eps).
 *
 *  On the exact backend the value is rounded up, so the realized message ratio
 *  (1-rho)/rho never exceeds e^eps.
 */
template<typename R>
R rr_flip_probability( double eps )
{
  if ( !( eps > 0.0 ) )
    throw validation_error( "randomized response needs eps > 0" );
  const double rho = 1.0 / ( 1.0 + std::exp( eps ) );
  if constexpr ( scalar<R>::exact )
    return scalar<R>::from_double( std::nextafter( std::nextafter( rho, 1.0 ), 1.0 ) );
  else
    return rho;
}

/*! \brief Agreement of the two-message randomized-response channel at flip
 *  probability rho: (1/2) * (1 - 2 rho)^2. */
template<typename R>
R rr_agreement_of_flip( const R& rho )
{
  const R d = R( 1 ) - R( 2 ) * rho;
  return d * d / R( 2 );
}

/*!
  \brief Two-message randomized-response channel.

  A samples a uniform bit a and sends a xor Bernoulli(rho); B symmetrically
  sends b xor Bernoulli(rho); A outputs a xor (received message), B outputs
  (received message) xor b, with rho = 1/(1+e^eps). Views hold the party's own
  bit, its own noise flip and the received message. Agreement is exactly
  (1/2) * ((e^eps - 1)/(e^eps + 1))^2.
*/
template<typename R>
channel<R> randomized_response_channel( double eps )
{
  const R rho = rr_flip_probability<R>( eps );
  const R quarter = R( 1 ) / R( 4 );

  std::vector<typename channel<R>::atom> atoms;
  for ( int a = 0; a < 2; ++a )
    for ( int fa = 0; fa < 2; ++fa )
      for ( int b = 0; b < 2; ++b )
        for ( int fb = 0; fb < 2; ++fb )
        {
          const int msg_a = a ^ fa; /* what A sends */
          const int msg_b = b ^ fb;
          const int out_a = a ^ msg_b;
          const int out_b = msg_a ^ b;
          const R w = quarter * ( fa ? rho : R( 1 ) - rho ) * ( fb ? rho : R( 1 ) - rho );
          atoms.push_back( { compose_tokens( { bit_token( a ), bit_token( fa ), bit_token( msg_b ) } ), out_a,
                             compose_tokens( { bit_token( b ), bit_token( fb ), bit_token( msg_a ) } ), out_b,
                             w } );
        }
  return channel<R>( std::move( atoms ) );
}

/*!
  \brief XOR functionality built from randomized response with reconciliation.

  Both messages are exchanged inside the functionality and both parties output
  the XOR of the two noisy messages, so agreement is perfect. Each view holds
  (output, own input, own flip, received message); the view distributions are
  exactly eps-DP via the message mechanism. When beta_target is given, the flip
  probability is raised so the average correctness is (approximately) the
  target; the target must stay within what eps-DP permits.
*/
template<typename R>
functionality<R> rr_xor_functionality( double eps, std::optional<double> beta_target = std::nullopt )
{
  R rho = rr_flip_probability<R>( eps );
  if ( beta_target )
  {
    if ( !( *beta_target > 0.0 ) || *beta_target > 0.5 )
      throw validation_error( "beta target must lie in (0, 1/2]" );
    const double r = ( 1.0 - std::sqrt( 2.0 * *beta_target ) ) / 2.0;
    const R candidate = scalar<R>::from_double( r );
    if ( candidate < rho )
      throw validation_error( "beta target exceeds what eps-DP randomized response can reach" );
    rho = candidate;
  }

  std::vector<std::vector<typename functionality<R>::view_atom>> cells( 4 );
  for ( unsigned x = 0; x < 2; ++x )
    for ( unsigned y = 0; y < 2; ++y )
    {
      auto& cell = cells[x * 2 + y];
      for ( int fa = 0; fa < 2; ++fa )
        for ( int fb = 0; fb < 2; ++fb )
        {
          const int msg_a = static_cast<int>( x ) ^ fa;
          const int msg_b = static_cast<int>( y ) ^ fb;
          const int out = msg_a ^ msg_b;
          const R w = ( fa ? rho : R( 1 ) - rho ) * ( fb ? rho : R( 1 ) - rho );
          cell.push_back( { compose_tokens( { bit_token( out ), bit_token( x ), bit_token( fa ), bit_token( msg_b ) } ),
                            compose_tokens( { bit_token( out ), bit_token( y ), bit_token( fb ), bit_token( msg_a ) } ),
                            w } );
        }
    }
  return functionality<R>( 1, std::move( cells ) );
}

/*! \brief Both parties receive the same bit x xor y xor U(1/2 - alpha); the view
 *  is the output alone. */
template<typename R>
functionality<R> noisy_xor_functionality( const R& alpha )
{
  const auto coin = noise_spec<R>::from_bias( alpha );
  std::vector<std::vector<typename functionality<R>::view_atom>> cells( 4 );
  for ( unsigned x = 0; x < 2; ++x )
    for ( unsigned y = 0; y < 2; ++y )
    {
      auto& cell = cells[x * 2 + y];
      for ( int flip = 0; flip < 2; ++flip )
      {
        const int out = static_cast<int>( x ^ y ) ^ flip;
        cell.push_back( { bit_token( out ), bit_token( out ),
                          flip ? coin.p_one : coin.p_zero() } );
      }
    }
  return functionality<R>( 1, std::move( cells ) );
}

} // namespace lrchan
