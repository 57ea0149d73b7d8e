#pragma once

/*!
  \file truth_table.hpp
  \brief Structural analysis of two-input Boolean functions: the
  monotone-under-relabeling decision and embedded-XOR extraction.

  A function is monotone under relabeling exactly when its row zero-sets (and
  then automatically its column zero-sets) form a chain under inclusion. When
  two rows have incomparable zero-sets, picking one column from each difference
  yields four inputs on which the function is the XOR of the selectors.
*/

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace lrchan
{

inline constexpr int truth_table_max_bits = 10;

class truth_table
{
public:
  truth_table( int n, std::vector<std::vector<std::uint8_t>> rows )
      : n_( n ), rows_( std::move( rows ) )
  {
    if ( n_ < 1 || n_ > truth_table_max_bits )
      throw validation_error( "truth table needs n in [1, " + std::to_string( truth_table_max_bits ) + "]" );
    const std::size_t side = std::size_t{ 1 } << n_;
    if ( rows_.size() != side )
      throw validation_error( "truth table needs " + std::to_string( side ) + " rows" );
    for ( const auto& r : rows_ )
    {
      if ( r.size() != side )
        throw validation_error( "truth table rows must have " + std::to_string( side ) + " entries" );
      for ( auto v : r )
        if ( v != 0 && v != 1 )
          throw validation_error( "truth table entries must be bits" );
    }
  }

  static truth_table from_function( int n, const std::function<int( unsigned, unsigned )>& g )
  {
    const unsigned side = 1u << n;
    std::vector<std::vector<std::uint8_t>> rows( side, std::vector<std::uint8_t>( side ) );
    for ( unsigned x = 0; x < side; ++x )
      for ( unsigned y = 0; y < side; ++y )
        rows[x][y] = static_cast<std::uint8_t>( g( x, y ) & 1 );
    return truth_table( n, std::move( rows ) );
  }

  int n() const { return n_; }
  unsigned side() const { return 1u << n_; }
  int value( unsigned x, unsigned y ) const { return rows_[x][y]; }

private:
  int n_;
  std::vector<std::vector<std::uint8_t>> rows_;
};

namespace detail
{

/* zero-set of one line as packed bits */
using bitrow = std::vector<std::uint64_t>;

inline bitrow zero_set( const truth_table& t, unsigned idx, bool row )
{
  const unsigned side = t.side();
  bitrow b( ( side + 63 ) / 64, 0 );
  for ( unsigned j = 0; j < side; ++j )
  {
    const int v = row ? t.value( idx, j ) : t.value( j, idx );
    if ( v == 0 )
      b[j / 64] |= std::uint64_t{ 1 } << ( j % 64 );
  }
  return b;
}

inline int popcount( const bitrow& b )
{
  int c = 0;
  for ( auto w : b )
    c += __builtin_popcountll( w );
  return c;
}

inline bool subset_of( const bitrow& a, const bitrow& b )
{
  for ( std::size_t i = 0; i < a.size(); ++i )
    if ( a[i] & ~b[i] )
      return false;
  return true;
}

inline int first_member_not_in( const bitrow& a, const bitrow& b )
{
  for ( std::size_t i = 0; i < a.size(); ++i )
  {
    const std::uint64_t d = a[i] & ~b[i];
    if ( d )
      return static_cast<int>( i * 64 + __builtin_ctzll( d ) );
  }
  return -1;
}

} // namespace detail

/*! \brief Result of the monotone-under-relabeling decision. When the table is
 *  monotone, sigma_x and sigma_y list the original indices in relabeled order
 *  (position i holds the index mapped to rank i). Otherwise the violating pair
 *  of lines with incomparable zero-sets is reported. */
struct monotone_result
{
  bool monotone = false;
  std::vector<unsigned> sigma_x;
  std::vector<unsigned> sigma_y;
  bool violation_on_rows = true;
  unsigned violator_a = 0;
  unsigned violator_b = 0;
};

namespace detail
{

inline bool chain_order( const truth_table& t, bool rows, std::vector<unsigned>& order,
                         unsigned& viol_a, unsigned& viol_b )
{
  const unsigned side = t.side();
  std::vector<bitrow> zs( side );
  std::vector<int> size( side );
  for ( unsigned i = 0; i < side; ++i )
  {
    zs[i] = zero_set( t, i, rows );
    size[i] = popcount( zs[i] );
  }
  order.resize( side );
  std::iota( order.begin(), order.end(), 0u );
  std::stable_sort( order.begin(), order.end(),
                    [&]( unsigned a, unsigned b ) { return size[a] > size[b]; } );

  /* descending sizes: each zero-set must contain the next; equal sizes force equality */
  for ( unsigned i = 0; i + 1 < side; ++i )
  {
    if ( !subset_of( zs[order[i + 1]], zs[order[i]] ) )
    {
      viol_a = order[i];
      viol_b = order[i + 1];
      return false;
    }
  }
  return true;
}

} // namespace detail

inline monotone_result is_monotone_under_relabeling( const truth_table& t )
{
  monotone_result res;
  if ( !detail::chain_order( t, true, res.sigma_x, res.violator_a, res.violator_b ) )
  {
    res.monotone = false;
    res.violation_on_rows = true;
    return res;
  }
  if ( !detail::chain_order( t, false, res.sigma_y, res.violator_a, res.violator_b ) )
  {
    res.monotone = false;
    res.violation_on_rows = false;
    return res;
  }
  res.monotone = true;
  return res;
}

/*! \brief Four inputs on which the table computes XOR of the selectors:
 *  value(x_b, y_c) = b xor c for all b, c. */
struct xor_witness
{
  unsigned x0, x1, y0, y1;
};

inline bool verify_xor_witness( const truth_table& t, const xor_witness& w )
{
  return t.value( w.x0, w.y0 ) == 0 && t.value( w.x0, w.y1 ) == 1 &&
         t.value( w.x1, w.y0 ) == 1 && t.value( w.x1, w.y1 ) == 0;
}

namespace detail
{

inline std::optional<xor_witness> witness_from_rows( const truth_table& t, unsigned x0, unsigned x1 )
{
  const auto z0 = zero_set( t, x0, true );
  const auto z1 = zero_set( t, x1, true );
  const int y0 = first_member_not_in( z0, z1 );
  const int y1 = first_member_not_in( z1, z0 );
  if ( y0 < 0 || y1 < 0 )
    return std::nullopt;
  xor_witness w{ x0, x1, static_cast<unsigned>( y0 ), static_cast<unsigned>( y1 ) };
  if ( !verify_xor_witness( t, w ) )
    throw degenerate_error( "internal: extracted witness fails the XOR identity" );
  return w;
}

} // namespace detail

/*! \brief First-found embedded XOR, scanning row pairs in index order; empty
 *  exactly when the table is monotone under relabeling. */
inline std::optional<xor_witness> find_embedded_xor( const truth_table& t )
{
  const unsigned side = t.side();
  for ( unsigned x0 = 0; x0 < side; ++x0 )
    for ( unsigned x1 = x0 + 1; x1 < side; ++x1 )
      if ( auto w = detail::witness_from_rows( t, x0, x1 ) )
        return w;
  return std::nullopt;
}

/*! \brief One witness per incomparable row pair, for exhaustive selection. */
inline std::vector<xor_witness> find_embedded_xor_all( const truth_table& t )
{
  std::vector<xor_witness> out;
  const unsigned side = t.side();
  for ( unsigned x0 = 0; x0 < side; ++x0 )
    for ( unsigned x1 = x0 + 1; x1 < side; ++x1 )
      if ( auto w = detail::witness_from_rows( t, x0, x1 ) )
        out.push_back( *w );
  return out;
}

/*! \brief Privacy-inflation report for the XOR reduction through a witness.
 *
 *  The restricted protocol's privacy degrades by the witness's actual Hamming
 *  distances rather than the blanket input width; the verdict compares beta
 *  against c * (inflated eps)^2.
 */
struct reduction_report_t
{
  xor_witness witness;
  int dist_x;
  int dist_y;
  double eps;
  double beta;
  double c;
  double inflated_eps; /* max(dist_x, dist_y) * eps */
  double blanket_eps;  /* n * eps */
  double threshold;    /* c * inflated_eps^2 */
  bool verdict;
};

inline reduction_report_t reduction_report( const truth_table& t, double eps, double beta,
                                            double c, bool exhaust_row_pairs = false )
{
  if ( eps < 0.0 )
    throw validation_error( "reduction_report needs eps >= 0" );
  std::optional<xor_witness> w;
  if ( exhaust_row_pairs )
  {
    int best = 0;
    for ( const auto& cand : find_embedded_xor_all( t ) )
    {
      const int d = std::max( __builtin_popcount( cand.x0 ^ cand.x1 ),
                              __builtin_popcount( cand.y0 ^ cand.y1 ) );
      if ( !w || d < best )
      {
        w = cand;
        best = d;
      }
    }
  }
  else
  {
    w = find_embedded_xor( t );
  }
  if ( !w )
    throw validation_error( "table is monotone under relabeling; no embedded XOR witness" );

  reduction_report_t rep;
  rep.witness = *w;
  rep.dist_x = __builtin_popcount( w->x0 ^ w->x1 );
  rep.dist_y = __builtin_popcount( w->y0 ^ w->y1 );
  rep.eps = eps;
  rep.beta = beta;
  rep.c = c;
  rep.inflated_eps = std::max( rep.dist_x, rep.dist_y ) * eps;
  rep.blanket_eps = t.n() * eps;
  rep.threshold = c * rep.inflated_eps * rep.inflated_eps;
  rep.verdict = beta >= rep.threshold;
  return rep;
}

} // namespace lrchan
