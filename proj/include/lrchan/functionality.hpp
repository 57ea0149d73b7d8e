#pragma once

/*!
  \file functionality.hpp
  \brief Finite two-party functionalities with differential privacy, accuracy
  and agreement evaluation, plus the XOR-to-channel reduction.

  A functionality maps every input pair (x, y) of n-bit strings to a joint
  distribution over view-token pairs. The first character of each view token is
  the party's designated output bit.
*/

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "dist.hpp"
#include "errors.hpp"
#include "scalar.hpp"
#include "tokens.hpp"

namespace lrchan
{

inline int view_output_bit( const std::string& token )
{
  if ( token.empty() || ( token[0] != '0' && token[0] != '1' ) )
    throw validation_error( "view token '" + token + "' does not start with its output bit" );
  return token[0] - '0';
}

/*! \brief Bit strings are read left to right, leftmost character is bit 0. */
inline unsigned bits_to_index( const std::string& bits, int n )
{
  if ( static_cast<int>( bits.size() ) != n )
    throw validation_error( "input '" + bits + "' is not an " + std::to_string( n ) + "-bit string" );
  unsigned v = 0;
  for ( int i = 0; i < n; ++i )
  {
    if ( bits[i] == '1' )
      v |= 1u << i;
    else if ( bits[i] != '0' )
      throw validation_error( "input '" + bits + "' contains a non-bit character" );
  }
  return v;
}

inline std::string index_to_bits( unsigned v, int n )
{
  std::string s( n, '0' );
  for ( int i = 0; i < n; ++i )
    if ( v & ( 1u << i ) )
      s[i] = '1';
  return s;
}

inline int hamming_distance( unsigned a, unsigned b )
{
  return __builtin_popcount( a ^ b );
}

template<typename R>
class functionality
{
public:
  struct view_atom
  {
    std::string view_a;
    std::string view_b;
    R weight;
  };

  functionality( int n, std::vector<std::vector<view_atom>> cells ) : n_( n ), cells_( std::move( cells ) )
  {
    if ( n_ < 1 || n_ > 16 )
      throw validation_error( "functionality input width must be in [1,16] bits" );
    const std::size_t side = std::size_t{ 1 } << n_;
    if ( cells_.size() != side * side )
      throw validation_error( "functionality needs one cell per input pair" );
    for ( std::size_t i = 0; i < cells_.size(); ++i )
    {
      R total = R( 0 );
      for ( const auto& a : cells_[i] )
      {
        view_output_bit( a.view_a );
        view_output_bit( a.view_b );
        if ( a.weight < R( 0 ) )
          throw validation_error( "negative weight in functionality cell" );
        total += a.weight;
      }
      const std::string where = " in cell (x=" + index_to_bits( i / side, n_ ) +
                                ", y=" + index_to_bits( i % side, n_ ) + ")";
      if constexpr ( scalar<R>::exact )
      {
        if ( total != R( 1 ) )
          throw validation_error( "weights sum to " + to_fraction_string( total ) + where );
      }
      else
      {
        if ( std::fabs( scalar<R>::to_double( total ) - 1.0 ) > general_tol )
          throw validation_error( "weights do not sum to 1" + where );
      }
    }
  }

  int input_bits() const { return n_; }
  unsigned side() const { return 1u << n_; }

  const std::vector<view_atom>& cell( unsigned x, unsigned y ) const
  {
    return cells_[static_cast<std::size_t>( x ) * side() + y];
  }

  /*! \brief True when both designated outputs coincide on every atom. */
  bool has_perfect_agreement() const
  {
    for ( unsigned x = 0; x < side(); ++x )
      for ( unsigned y = 0; y < side(); ++y )
        for ( const auto& a : cell( x, y ) )
          if ( a.weight > R( 0 ) && view_output_bit( a.view_a ) != view_output_bit( a.view_b ) )
            return false;
    return true;
  }

private:
  int n_;
  std::vector<std::vector<view_atom>> cells_; /* indexed x * side + y */
};

/*! \brief Measured differential privacy, the witnessing neighbor pair, and the
 *  accuracy statistics of a functionality. */
template<typename R>
struct dp_report
{
  eps_value eps_measured = eps_value( 0.0 );
  std::string neighbor_witness;

  bool has_accuracy = false;
  R avg_agreement = R( 0 );
  R avg_correctness_beta = R( 0 );
  R worst_case_correctness = R( 0 );
};

namespace detail
{

template<typename R>
dist<R> cell_view_dist( const functionality<R>& f, unsigned x, unsigned y, party p )
{
  std::vector<typename dist<R>::atom> parts;
  for ( const auto& a : f.cell( x, y ) )
    parts.push_back( { p == party::a ? a.view_a : a.view_b, a.weight } );
  return dist<R>::collect( parts );
}

} // namespace detail

/*! \brief Largest pointwise view ratio over all Hamming-1 neighbor input pairs,
 *  or nothing when some neighbor pair has one-sided support. */
template<typename R>
std::optional<R> dp_max_ratio( const functionality<R>& f )
{
  R best = R( 1 );
  const unsigned side = f.side();
  for ( unsigned x = 0; x < side; ++x )
  {
    for ( int bit = 0; bit < f.input_bits(); ++bit )
    {
      const unsigned x2 = x ^ ( 1u << bit );
      if ( x2 < x )
        continue;
      for ( unsigned y = 0; y < side; ++y )
      {
        /* x-neighbors threaten B's view; y plays the bystander */
        auto r = max_pointwise_ratio( detail::cell_view_dist( f, x, y, party::b ),
                                      detail::cell_view_dist( f, x2, y, party::b ) );
        if ( !r )
          return std::nullopt;
        if ( *r > best )
          best = *r;
        auto r2 = max_pointwise_ratio( detail::cell_view_dist( f, y, x, party::a ),
                                       detail::cell_view_dist( f, y, x2, party::a ) );
        if ( !r2 )
          return std::nullopt;
        if ( *r2 > best )
          best = *r2;
      }
    }
  }
  return best;
}

/*! \brief Measured eps over parties, Hamming-1 neighbor pairs and support points. */
template<typename R>
dp_report<R> check_eps_dp( const functionality<R>& f )
{
  dp_report<R> rep;
  R best = R( 1 );
  bool infinite = false;
  const unsigned side = f.side();

  auto consider = [&]( party p, unsigned u, unsigned u2, unsigned v ) {
    const auto d1 = p == party::b ? detail::cell_view_dist( f, u, v, party::b )
                                  : detail::cell_view_dist( f, v, u, party::a );
    const auto d2 = p == party::b ? detail::cell_view_dist( f, u2, v, party::b )
                                  : detail::cell_view_dist( f, v, u2, party::a );
    auto r = max_pointwise_ratio( d1, d2 );
    const std::string desc = std::string( "party " ) + party_name( p ) + ", inputs " +
                             index_to_bits( u, f.input_bits() ) + " vs " + index_to_bits( u2, f.input_bits() ) +
                             " with bystander " + index_to_bits( v, f.input_bits() );
    if ( !r )
    {
      if ( !infinite )
      {
        infinite = true;
        rep.neighbor_witness = desc + " (one-sided support)";
      }
      return;
    }
    if ( *r > best )
    {
      best = *r;
      rep.neighbor_witness = desc;
    }
  };

  for ( unsigned u = 0; u < side; ++u )
    for ( int bit = 0; bit < f.input_bits(); ++bit )
    {
      const unsigned u2 = u ^ ( 1u << bit );
      if ( u2 < u )
        continue;
      for ( unsigned v = 0; v < side; ++v )
      {
        consider( party::b, u, u2, v );
        consider( party::a, u, u2, v );
      }
    }

  rep.eps_measured = infinite ? eps_value::infinite()
                              : eps_value( std::log( scalar<R>::to_double( best ) ) );
  return rep;
}

/*! \brief Average agreement, average correctness and worst-case correctness of f
 *  against the Boolean reference g over uniform inputs. */
template<typename R>
dp_report<R> measure_accuracy( const functionality<R>& f,
                               const std::function<int( unsigned, unsigned )>& g )
{
  dp_report<R> rep;
  rep.has_accuracy = true;
  const unsigned side = f.side();
  const R cells = R( static_cast<long>( side ) * side );

  R agree_total = R( 0 ), correct_total = R( 0 );
  bool first = true;
  for ( unsigned x = 0; x < side; ++x )
  {
    for ( unsigned y = 0; y < side; ++y )
    {
      const int target = g( x, y );
      if ( target != 0 && target != 1 )
        throw validation_error( "reference function must be Boolean" );
      R agree = R( 0 ), correct = R( 0 );
      for ( const auto& a : f.cell( x, y ) )
      {
        const int oa = view_output_bit( a.view_a );
        const int ob = view_output_bit( a.view_b );
        if ( oa == ob )
        {
          agree += a.weight;
          if ( oa == target )
            correct += a.weight;
        }
      }
      agree_total += agree;
      correct_total += correct;
      const R wc = correct - R( 1 ) / R( 2 );
      if ( first || wc < rep.worst_case_correctness )
        rep.worst_case_correctness = wc;
      first = false;
    }
  }
  rep.avg_agreement = agree_total / cells - R( 1 ) / R( 2 );
  rep.avg_correctness_beta = correct_total / cells - R( 1 ) / R( 2 );
  return rep;
}

inline int xor_function( unsigned x, unsigned y )
{
  return __builtin_popcount( x ^ y ) & 1;
}

/*!
  \brief Exact channel induced by the no-input wrapper around a one-bit,
  perfect-agreement functionality.

  Both parties sample uniform input bits, call f jointly, and A publishes a
  uniform bit r. A outputs i_A xor r, B outputs out_B xor i_B xor r. The channel
  agreement equals the functionality's average correctness for XOR, and the
  zero-slack leakage is at most twice the functionality's measured eps.
*/
template<typename R>
channel<R> dp_xor_to_channel( const functionality<R>& f )
{
  if ( f.input_bits() != 1 )
    throw validation_error( "dp_xor_to_channel needs one-bit inputs, got " +
                            std::to_string( f.input_bits() ) );
  if ( !f.has_perfect_agreement() )
    throw validation_error( "dp_xor_to_channel needs a perfect-agreement functionality" );

  std::vector<typename channel<R>::atom> atoms;
  const R eighth = R( 1 ) / R( 8 );
  for ( unsigned ia = 0; ia < 2; ++ia )
    for ( unsigned ib = 0; ib < 2; ++ib )
      for ( int r = 0; r < 2; ++r )
        for ( const auto& a : f.cell( ia, ib ) )
        {
          const int out_f = view_output_bit( a.view_b );
          atoms.push_back( { compose_tokens( { bit_token( ia ), a.view_a, bit_token( r ) } ),
                             static_cast<int>( ia ) ^ r,
                             compose_tokens( { bit_token( ib ), a.view_b, bit_token( r ) } ),
                             out_f ^ static_cast<int>( ib ) ^ r,
                             a.weight * eighth } );
        }
  return channel<R>( std::move( atoms ) );
}

/*! \brief Leakage of the induced channel with respect to the other party's
 *  output, for both parties; bounded by the functionality's eps. */
template<typename R>
std::pair<eps_value, eps_value> leakage_wrt_outputs_check( const functionality<R>& f )
{
  const auto c = dp_xor_to_channel( f );
  return { leakage_wrt_output( c, party::a ), leakage_wrt_output( c, party::b ) };
}

/*! \brief Privacy of a group of inputs at the given Hamming radius. */
inline double group_privacy( double eps, int hamming_dist )
{
  if ( eps < 0.0 )
    throw validation_error( "group_privacy needs eps >= 0" );
  if ( hamming_dist < 1 )
    throw validation_error( "group_privacy needs distance >= 1" );
  return hamming_dist * eps;
}

/*! \brief One-bit-input functionality obtained by hard-wiring two inputs per party. */
template<typename R>
functionality<R> restrict_functionality( const functionality<R>& f,
                                         const std::string& x0, const std::string& x1,
                                         const std::string& y0, const std::string& y1 )
{
  const int n = f.input_bits();
  const unsigned xs[2] = { bits_to_index( x0, n ), bits_to_index( x1, n ) };
  const unsigned ys[2] = { bits_to_index( y0, n ), bits_to_index( y1, n ) };

  std::vector<std::vector<typename functionality<R>::view_atom>> cells( 4 );
  for ( unsigned b = 0; b < 2; ++b )
    for ( unsigned c = 0; c < 2; ++c )
      cells[b * 2 + c] = f.cell( xs[b], ys[c] );
  return functionality<R>( 1, std::move( cells ) );
}

} // namespace lrchan
