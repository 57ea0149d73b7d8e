#pragma once

/*!
  \file channel.hpp
  \brief Two-party channels: joint view/output distributions with agreement,
  leakage, balancing and weak-binary-symmetric-channel evaluation.

  A channel atom fixes both parties' opaque view tokens, their Boolean outputs
  and a probability weight. Each party's output must be a function of its view
  token across the atom set.
*/

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dist.hpp"
#include "errors.hpp"
#include "scalar.hpp"
#include "tokens.hpp"

namespace lrchan
{

enum class party
{
  a,
  b
};

inline party other_party( party p )
{
  return p == party::a ? party::b : party::a;
}

inline const char* party_name( party p )
{
  return p == party::a ? "A" : "B";
}

template<typename R>
class channel
{
public:
  struct atom
  {
    std::string view_a;
    int out_a;
    std::string view_b;
    int out_b;
    R weight;
  };

  channel() = default;

  /*! \brief Validates outputs, the view-determines-output dependency and the
   *  total weight; atoms with identical views are merged. */
  explicit channel( std::vector<atom> atoms )
  {
    std::unordered_map<std::string, int> out_of_a, out_of_b;
    std::unordered_map<std::string, std::size_t> index;
    R total = R( 0 );

    for ( const auto& a : atoms )
    {
      if ( ( a.out_a != 0 && a.out_a != 1 ) || ( a.out_b != 0 && a.out_b != 1 ) )
        throw validation_error( "channel outputs must be bits (views '" + a.view_a + "', '" + a.view_b + "')" );
      if ( a.weight < R( 0 ) )
        throw validation_error( "negative weight on channel atom ('" + a.view_a + "', '" + a.view_b + "')" );

      auto [ita, inserted_a] = out_of_a.emplace( a.view_a, a.out_a );
      if ( !inserted_a && ita->second != a.out_a )
        throw validation_error( "view '" + a.view_a + "' of party A maps to both outputs" );
      auto [itb, inserted_b] = out_of_b.emplace( a.view_b, a.out_b );
      if ( !inserted_b && itb->second != a.out_b )
        throw validation_error( "view '" + a.view_b + "' of party B maps to both outputs" );

      total += a.weight;
      const std::string key = compose_tokens( { a.view_a, a.view_b } );
      auto it = index.find( key );
      if ( it == index.end() )
      {
        index.emplace( key, atoms_.size() );
        atoms_.push_back( a );
      }
      else
      {
        atoms_[it->second].weight += a.weight;
      }
    }

    if constexpr ( scalar<R>::exact )
    {
      if ( total != R( 1 ) )
        throw validation_error( "channel weights sum to " + to_fraction_string( total ) + ", expected 1" );
    }
    else
    {
      if ( std::fabs( scalar<R>::to_double( total ) - 1.0 ) > general_tol )
        throw validation_error( "channel weights sum to " + std::to_string( scalar<R>::to_double( total ) ) + ", expected 1" );
    }
  }

  const std::vector<atom>& atoms() const { return atoms_; }

  std::size_t support_size() const
  {
    std::size_t n = 0;
    for ( const auto& a : atoms_ )
      if ( a.weight > R( 0 ) )
        ++n;
    return n;
  }

private:
  std::vector<atom> atoms_;
};

/*! \brief Pr[both outputs equal] - 1/2, in [-1/2, 1/2]. */
template<typename R>
R agreement( const channel<R>& c )
{
  R eq = R( 0 );
  for ( const auto& a : c.atoms() )
    if ( a.out_a == a.out_b )
      eq += a.weight;
  return eq - R( 1 ) / R( 2 );
}

/*! \brief Marginal output distribution check: both output bits individually uniform. */
template<typename R>
bool is_balanced( const channel<R>& c )
{
  R one_a = R( 0 ), one_b = R( 0 );
  for ( const auto& a : c.atoms() )
  {
    if ( a.out_a )
      one_a += a.weight;
    if ( a.out_b )
      one_b += a.weight;
  }
  const R half = R( 1 ) / R( 2 );
  if constexpr ( scalar<R>::exact )
    return one_a == half && one_b == half;
  else
    return std::fabs( scalar<R>::to_double( one_a ) - 0.5 ) <= general_tol &&
           std::fabs( scalar<R>::to_double( one_b ) - 0.5 ) <= general_tol;
}

/*! \brief One party's view distribution conditioned on output agreement or disagreement. */
template<typename R>
dist<R> view_given_agreement( const channel<R>& c, party p, bool agree )
{
  std::vector<typename dist<R>::atom> parts;
  R mass = R( 0 );
  for ( const auto& a : c.atoms() )
  {
    if ( ( a.out_a == a.out_b ) != agree )
      continue;
    parts.push_back( { p == party::a ? a.view_a : a.view_b, a.weight } );
    mass += a.weight;
  }
  if ( mass == R( 0 ) )
    throw degenerate_error( std::string( "conditioning event {outputs " ) +
                            ( agree ? "agree" : "disagree" ) + "} has probability zero" );
  for ( auto& a : parts )
    a.weight = a.weight / mass;
  return dist<R>::collect( parts );
}

/*! \brief Per-party minimal eps at the given delta between the view conditioned
 *  on agreement and on disagreement, plus the channel maximum. */
struct leakage_profile
{
  eps_value eps_a;
  eps_value eps_b;
  eps_value eps_max;
  double at_delta;
};

template<typename R>
leakage_profile leakage( const channel<R>& c, double delta = 0.0 )
{
  const auto va_eq = view_given_agreement( c, party::a, true );
  const auto va_ne = view_given_agreement( c, party::a, false );
  const auto vb_eq = view_given_agreement( c, party::b, true );
  const auto vb_ne = view_given_agreement( c, party::b, false );

  leakage_profile prof;
  prof.eps_a = log_ratio_epsilon( va_eq, va_ne, delta );
  prof.eps_b = log_ratio_epsilon( vb_eq, vb_ne, delta );
  prof.eps_max = max( prof.eps_a, prof.eps_b );
  prof.at_delta = delta;
  return prof;
}

/*! \brief Exact multiplicative bound e^eps of the zero-slack leakage for one party,
 *  as a scalar ratio; nothing when the leakage is infinite. */
template<typename R>
std::optional<R> leakage_ratio( const channel<R>& c, party p )
{
  return max_pointwise_ratio( view_given_agreement( c, p, true ),
                              view_given_agreement( c, p, false ) );
}

/*! \brief Minimal zero-slack eps between a party's view conditioned on the other
 *  party's output being 0 versus 1. */
template<typename R>
eps_value leakage_wrt_output( const channel<R>& c, party p )
{
  std::vector<typename dist<R>::atom> cond[2];
  R mass[2] = { R( 0 ), R( 0 ) };
  for ( const auto& a : c.atoms() )
  {
    const int o = p == party::a ? a.out_b : a.out_a;
    cond[o].push_back( { p == party::a ? a.view_a : a.view_b, a.weight } );
    mass[o] += a.weight;
  }
  if ( mass[0] == R( 0 ) || mass[1] == R( 0 ) )
    throw degenerate_error( std::string( "output of party " ) + party_name( other_party( p ) ) +
                            " is constant; both values are required" );
  for ( int o = 0; o < 2; ++o )
    for ( auto& a : cond[o] )
      a.weight = a.weight / mass[o];
  return log_ratio_epsilon( dist<R>::collect( cond[0] ), dist<R>::collect( cond[1] ), 0.0 );
}

/*! \brief Wrapper channel that XORs both outputs with a public uniform bit.
 *
 *  The bit is appended to both view tokens. The result is balanced and keeps
 *  the agreement and the full leakage profile of the input channel.
 */
template<typename R>
channel<R> balance( const channel<R>& c )
{
  std::vector<typename channel<R>::atom> out;
  out.reserve( c.atoms().size() * 2 );
  const R half = R( 1 ) / R( 2 );
  for ( const auto& a : c.atoms() )
  {
    for ( int r = 0; r < 2; ++r )
    {
      out.push_back( { compose_tokens( { a.view_a, bit_token( r ) } ), a.out_a ^ r,
                       compose_tokens( { a.view_b, bit_token( r ) } ), a.out_b ^ r,
                       a.weight * half } );
    }
  }
  return channel<R>( std::move( out ) );
}

/*! \brief Flips party B's output bit; used to normalize negative agreement. */
template<typename R>
channel<R> flip_output_b( const channel<R>& c )
{
  std::vector<typename channel<R>::atom> out = c.atoms();
  for ( auto& a : out )
    a.out_b ^= 1;
  return channel<R>( std::move( out ) );
}

/*! \brief Specialized weak binary symmetric channel parameters. */
template<typename R>
struct swbsc_params_t
{
  R eps0; /* disagreement probability, equal under both values of out_a */
  R p;    /* max statistical distance of a view under agreement vs disagreement */
};

/*! \brief General passive weak binary symmetric channel parameters. */
template<typename R>
struct wbsc_params_t
{
  R mu;
  R eps0;
  R eps1;
  R p;
  R q;
};

template<typename R>
swbsc_params_t<R> swbsc_params( const channel<R>& c )
{
  if ( !is_balanced( c ) )
    throw validation_error( "channel is not symmetric: outputs are not balanced" );

  R dis_given[2] = { R( 0 ), R( 0 ) };
  R pr_a[2] = { R( 0 ), R( 0 ) };
  for ( const auto& a : c.atoms() )
  {
    pr_a[a.out_a] += a.weight;
    if ( a.out_a != a.out_b )
      dis_given[a.out_a] += a.weight;
  }
  for ( int b = 0; b < 2; ++b )
  {
    if ( pr_a[b] == R( 0 ) )
      throw validation_error( "channel is not symmetric: Pr[out_a=" + std::to_string( b ) + "] is zero" );
    dis_given[b] = dis_given[b] / pr_a[b];
  }
  const bool symmetric = scalar<R>::exact
                             ? dis_given[0] == dis_given[1]
                             : std::fabs( scalar<R>::to_double( dis_given[0] - dis_given[1] ) ) <= general_tol;
  if ( !symmetric )
    throw validation_error( "channel is not symmetric: Pr[disagree | out_a=0] != Pr[disagree | out_a=1]" );

  swbsc_params_t<R> s;
  s.eps0 = dis_given[0];
  if ( s.eps0 == R( 0 ) || s.eps0 == R( 1 ) )
  {
    /* no conditioning possible; views reveal nothing beyond the certainty */
    s.p = R( 0 );
    return s;
  }
  const R pa = statistical_distance( view_given_agreement( c, party::a, true ),
                                     view_given_agreement( c, party::a, false ) );
  const R pb = statistical_distance( view_given_agreement( c, party::b, true ),
                                     view_given_agreement( c, party::b, false ) );
  s.p = pa > pb ? pa : pb;
  return s;
}

template<typename R>
wbsc_params_t<R> swbsc_to_wbsc( const swbsc_params_t<R>& s )
{
  return wbsc_params_t<R>{ R( 0 ), s.eps0, s.eps0, R( 2 ) * s.p, R( 2 ) * s.p };
}

/*! \brief Direct evaluation of the general WBSC parameters of a channel:
 *  output-bias mu, the disagreement range [eps0, eps1], the receiver distance p
 *  and the sender distance q. */
template<typename R>
wbsc_params_t<R> wbsc_params( const channel<R>& c )
{
  R one_a = R( 0 );
  R dis_given[2] = { R( 0 ), R( 0 ) };
  R pr_a[2] = { R( 0 ), R( 0 ) };
  for ( const auto& a : c.atoms() )
  {
    if ( a.out_a )
      one_a += a.weight;
    pr_a[a.out_a] += a.weight;
    if ( a.out_a != a.out_b )
      dis_given[a.out_a] += a.weight;
  }
  wbsc_params_t<R> w;
  const R half = R( 1 ) / R( 2 );
  w.mu = one_a > half ? R( 2 ) * ( one_a - half ) : R( 2 ) * ( half - one_a );
  for ( int b = 0; b < 2; ++b )
  {
    if ( pr_a[b] == R( 0 ) )
      throw validation_error( "wbsc_params: Pr[out_a=" + std::to_string( b ) + "] is zero" );
    dis_given[b] = dis_given[b] / pr_a[b];
  }
  w.eps0 = dis_given[0] < dis_given[1] ? dis_given[0] : dis_given[1];
  w.eps1 = dis_given[0] < dis_given[1] ? dis_given[1] : dis_given[0];

  w.p = statistical_distance( view_given_agreement( c, party::a, true ),
                              view_given_agreement( c, party::a, false ) );

  /* sender security: V^B | out_b=b conditioned on out_a=0 versus out_a=1 */
  w.q = R( 0 );
  for ( int b = 0; b < 2; ++b )
  {
    std::vector<typename dist<R>::atom> cond[2];
    R mass[2] = { R( 0 ), R( 0 ) };
    for ( const auto& a : c.atoms() )
    {
      if ( a.out_b != b )
        continue;
      cond[a.out_a].push_back( { a.view_b, a.weight } );
      mass[a.out_a] += a.weight;
    }
    if ( mass[0] == R( 0 ) || mass[1] == R( 0 ) )
      throw degenerate_error( "wbsc_params: conditional event {out_b, out_a} has probability zero" );
    for ( int o = 0; o < 2; ++o )
      for ( auto& at : cond[o] )
        at.weight = at.weight / mass[o];
    const R d = statistical_distance( dist<R>::collect( cond[0] ), dist<R>::collect( cond[1] ) );
    if ( d > w.q )
      w.q = d;
  }
  return w;
}

/*! \brief Verdict and both sides of the precondition
 *  150 * (1 - (1-p)^2) < (1 - 2 eps^2 / (eps^2 + (1-eps)^2))^2 evaluated at eps = eps0. */
template<typename R>
struct wullschleger_report_t
{
  R eps0;
  R p;
  R lhs;
  R rhs;
  bool holds;
  bool boundary; /* eps0 or p sits on the open-interval boundary */
};

template<typename R>
wullschleger_report_t<R> wullschleger_condition( const R& eps0, const R& p )
{
  if ( eps0 < R( 0 ) || eps0 > R( 1 ) / R( 2 ) )
    throw validation_error( "wullschleger_condition needs eps0 in [0, 1/2]" );
  if ( p < R( 0 ) )
    throw validation_error( "wullschleger_condition needs p >= 0" );

  wullschleger_report_t<R> rep;
  rep.eps0 = eps0;
  rep.p = p;
  const R one = R( 1 );
  rep.lhs = R( 150 ) * ( one - ( one - p ) * ( one - p ) );
  const R denom = eps0 * eps0 + ( one - eps0 ) * ( one - eps0 );
  const R inner = one - R( 2 ) * eps0 * eps0 / denom;
  rep.rhs = inner * inner;
  rep.holds = rep.lhs < rep.rhs;
  rep.boundary = eps0 == R( 0 ) || eps0 == R( 1 ) / R( 2 ) || p == R( 0 ) || p >= R( 1 );
  return rep;
}

} // namespace lrchan
