#pragma once

/*!
  \file dist.hpp
  \brief Finite probability distributions and divergence machinery.

  Distributions are finite lists of (opaque symbol, weight) atoms. All distance
  evaluators ignore zero-weight atoms, so a fixed symbol universe can be kept
  in the type. The multiplicative-closeness evaluators are parameterized by the
  ratio bound lambda = e^eps; the eps-level entry points convert through the
  scalar backend.
*/

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"
#include "tokens.hpp"

namespace lrchan
{

inline constexpr std::uint64_t default_enumeration_cap = 2'000'000;

/*! \brief A non-negative multiplicative bound eps together with additive slack delta. */
struct log_ratio_budget
{
  double eps;
  double delta;

  log_ratio_budget( double eps_, double delta_ ) : eps( eps_ ), delta( delta_ )
  {
    if ( eps < 0.0 )
      throw validation_error( "log-ratio budget needs eps >= 0" );
    if ( delta < 0.0 || delta > 1.0 )
      throw validation_error( "log-ratio budget needs delta in [0,1]" );
  }
};

/*! \brief Budget satisfied by ell-fold products of an (eps, delta)-close pair. */
struct repetition_bound_t
{
  int ell;
  double delta_prime;
  double eta;
  double delta_out;
};

/*! \brief Evaluates eta(eps, ell, delta') = ell*eps*(e^eps - 1) + eps*sqrt(2*ell*ln(1/delta'))
 *  and the additive budget ell*delta + delta'. */
inline repetition_bound_t repetition_bound( double eps, double delta, int ell, double delta_prime )
{
  if ( eps < 0.0 )
    throw validation_error( "repetition bound needs eps >= 0" );
  if ( delta < 0.0 || delta > 1.0 )
    throw validation_error( "repetition bound needs delta in [0,1]" );
  if ( ell < 1 )
    throw validation_error( "repetition bound needs ell >= 1" );
  if ( !( delta_prime > 0.0 && delta_prime < 1.0 ) )
    throw validation_error( "repetition bound needs delta' in (0,1)" );

  repetition_bound_t b;
  b.ell = ell;
  b.delta_prime = delta_prime;
  b.eta = ell * eps * ( std::exp( eps ) - 1.0 ) + eps * std::sqrt( 2.0 * ell * std::log( 1.0 / delta_prime ) );
  b.delta_out = ell * delta + delta_prime;
  return b;
}

template<typename R>
class dist
{
public:
  struct atom
  {
    std::string sym;
    R weight;
  };

  dist() = default;

  /*! \brief Validating constructor: distinct symbols, non-negative weights, total one. */
  explicit dist( std::vector<atom> atoms ) : atoms_( std::move( atoms ) )
  {
    std::unordered_set<std::string> seen;
    R total = R( 0 );
    for ( const auto& a : atoms_ )
    {
      if ( !seen.insert( a.sym ).second )
        throw validation_error( "duplicate symbol '" + a.sym + "' in distribution" );
      if ( a.weight < R( 0 ) )
        throw validation_error( "negative weight on symbol '" + a.sym + "'" );
      total += a.weight;
    }
    if constexpr ( scalar<R>::exact )
    {
      if ( total != R( 1 ) )
        throw validation_error( "weights sum to " + to_fraction_string( total ) + ", expected 1" );
    }
    else
    {
      if ( std::fabs( scalar<R>::to_double( total ) - 1.0 ) > general_tol )
        throw validation_error( "weights sum to " + std::to_string( scalar<R>::to_double( total ) ) + ", expected 1" );
    }
  }

  /*! \brief Builds a distribution from possibly repeated symbols, summing weights. */
  static dist collect( const std::vector<atom>& parts )
  {
    std::unordered_map<std::string, std::size_t> index;
    std::vector<atom> merged;
    for ( const auto& a : parts )
    {
      auto it = index.find( a.sym );
      if ( it == index.end() )
      {
        index.emplace( a.sym, merged.size() );
        merged.push_back( a );
      }
      else
      {
        merged[it->second].weight += a.weight;
      }
    }
    return dist( std::move( merged ) );
  }

  static dist point_mass( const std::string& sym )
  {
    return dist( { atom{ sym, R( 1 ) } } );
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

  R weight_of( const std::string& sym ) const
  {
    for ( const auto& a : atoms_ )
      if ( a.sym == sym )
        return a.weight;
    return R( 0 );
  }

private:
  std::vector<atom> atoms_;
};

namespace detail
{

/* aligned union support of two distributions, zero-weight atoms dropped */
template<typename R>
std::vector<std::tuple<std::string, R, R>> union_support( const dist<R>& p, const dist<R>& q )
{
  std::vector<std::tuple<std::string, R, R>> rows;
  std::unordered_map<std::string, R> qmap;
  for ( const auto& a : q.atoms() )
    if ( a.weight > R( 0 ) )
      qmap.emplace( a.sym, a.weight );

  for ( const auto& a : p.atoms() )
  {
    if ( a.weight == R( 0 ) )
      continue;
    auto it = qmap.find( a.sym );
    if ( it != qmap.end() )
    {
      rows.emplace_back( a.sym, a.weight, it->second );
      qmap.erase( it );
    }
    else
    {
      rows.emplace_back( a.sym, a.weight, R( 0 ) );
    }
  }
  for ( const auto& a : q.atoms() )
  {
    if ( a.weight == R( 0 ) )
      continue;
    auto it = qmap.find( a.sym );
    if ( it != qmap.end() )
      rows.emplace_back( a.sym, R( 0 ), a.weight );
  }
  return rows;
}

} // namespace detail

/*! \brief Total variation distance (1/2) * sum |p(x) - q(x)|. */
template<typename R>
R statistical_distance( const dist<R>& p, const dist<R>& q )
{
  R acc = R( 0 );
  for ( const auto& [sym, pw, qw] : detail::union_support( p, q ) )
  {
    (void)sym;
    acc += pw > qw ? pw - qw : qw - pw;
  }
  return acc / R( 2 );
}

/*! \brief Hockey-stick divergence at multiplicative bound lambda, symmetrized.
 *
 *  Returns max over directions of sum_x max(0, a(x) - lambda * b(x)). The
 *  supremum over event sets in the closeness definition is attained at the
 *  likelihood-ratio threshold set, which this pointwise sum evaluates.
 */
template<typename R>
R hockey_stick_delta( const dist<R>& p, const dist<R>& q, const R& lambda )
{
  if ( lambda < R( 1 ) )
    throw validation_error( "ratio bound lambda must be >= 1" );
  R fwd = R( 0 ), bwd = R( 0 );
  for ( const auto& [sym, pw, qw] : detail::union_support( p, q ) )
  {
    (void)sym;
    const R f = pw - lambda * qw;
    if ( f > R( 0 ) )
      fwd += f;
    const R b = qw - lambda * pw;
    if ( b > R( 0 ) )
      bwd += b;
  }
  return fwd > bwd ? fwd : bwd;
}

/*! \brief Minimal additive slack delta making the pair (eps, delta)-close. */
template<typename R>
R log_ratio_delta( const dist<R>& p, const dist<R>& q, double eps )
{
  if ( eps < 0.0 )
    throw validation_error( "log_ratio_delta needs eps >= 0" );
  return hockey_stick_delta( p, q, scalar<R>::ratio_of_eps( eps ) );
}

/*! \brief Largest pointwise probability ratio between the two distributions,
 *  or nothing if either one puts mass on a null point of the other. */
template<typename R>
std::optional<R> max_pointwise_ratio( const dist<R>& p, const dist<R>& q )
{
  R best = R( 1 );
  for ( const auto& [sym, pw, qw] : detail::union_support( p, q ) )
  {
    (void)sym;
    if ( pw == R( 0 ) || qw == R( 0 ) )
      return std::nullopt;
    const R r = pw > qw ? pw / qw : qw / pw;
    if ( r > best )
      best = r;
  }
  return best;
}

/*! \brief Minimal eps at which the pair is (eps, delta)-close, or infinite.
 *
 *  delta = 0 uses the closed form ln(max pointwise ratio). delta > 0 bisects
 *  over eps against the exact hockey-stick evaluator, starting from the
 *  bracket [0, ln(max finite pointwise ratio)].
 */
template<typename R>
eps_value log_ratio_epsilon( const dist<R>& p, const dist<R>& q, double delta = 0.0 )
{
  if ( delta < 0.0 || delta > 1.0 )
    throw validation_error( "log_ratio_epsilon needs delta in [0,1]" );

  /* mass that no finite eps can absorb */
  R p_uncovered = R( 0 ), q_uncovered = R( 0 );
  R max_ratio = R( 1 );
  for ( const auto& [sym, pw, qw] : detail::union_support( p, q ) )
  {
    (void)sym;
    if ( qw == R( 0 ) )
      p_uncovered += pw;
    else if ( pw == R( 0 ) )
      q_uncovered += qw;
    else
    {
      const R r = pw > qw ? pw / qw : qw / pw;
      if ( r > max_ratio )
        max_ratio = r;
    }
  }
  const R uncovered = p_uncovered > q_uncovered ? p_uncovered : q_uncovered;
  const double delta_slack = delta + ( scalar<R>::exact ? 0.0 : general_tol );
  if ( scalar<R>::to_double( uncovered ) > delta_slack )
    return eps_value::infinite();

  if ( delta == 0.0 )
    return eps_value( std::log( scalar<R>::to_double( max_ratio ) ) );

  if ( scalar<R>::to_double( hockey_stick_delta( p, q, R( 1 ) ) ) <= delta_slack )
    return eps_value( 0.0 );

  double lo = 0.0;
  double hi = std::log( scalar<R>::to_double( max_ratio ) ) + 1e-9;
  for ( int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter )
  {
    const double mid = 0.5 * ( lo + hi );
    if ( scalar<R>::to_double( log_ratio_delta( p, q, mid ) ) <= delta_slack )
      hi = mid;
    else
      lo = mid;
  }
  return eps_value( hi );
}

/*! \brief Distribution of ell independent samples; symbols are composed tuples. */
template<typename R>
dist<R> product( const dist<R>& p, int ell, std::uint64_t cap = default_enumeration_cap )
{
  if ( ell < 1 )
    throw validation_error( "product needs ell >= 1" );

  std::vector<typename dist<R>::atom> base;
  for ( const auto& a : p.atoms() )
    if ( a.weight > R( 0 ) )
      base.push_back( a );

  double needed = 1.0;
  for ( int i = 0; i < ell; ++i )
    needed *= static_cast<double>( base.size() );
  if ( needed > static_cast<double>( cap ) )
    throw cap_error( "product support exceeds enumeration cap",
                     static_cast<unsigned long long>( std::min( needed, 1e18 ) ) );

  std::vector<typename dist<R>::atom> out;
  std::vector<std::string> fields( ell );
  std::function<void( int, const R& )> rec = [&]( int i, const R& w ) {
    if ( i == ell )
    {
      out.push_back( { compose_tokens( fields ), w } );
      return;
    }
    for ( const auto& a : base )
    {
      fields[i] = a.sym;
      rec( i + 1, w * a.weight );
    }
  };
  rec( 0, R( 1 ) );
  return dist<R>( std::move( out ) );
}

/*! \brief Renormalized restriction of p to the symbols accepted by the predicate. */
template<typename R>
dist<R> condition( const dist<R>& p, const std::function<bool( const std::string& )>& event )
{
  R mass = R( 0 );
  std::vector<typename dist<R>::atom> kept;
  for ( const auto& a : p.atoms() )
  {
    if ( event( a.sym ) )
    {
      kept.push_back( a );
      mass += a.weight;
    }
  }
  if ( mass == R( 0 ) )
    throw degenerate_error( "conditioning on a zero-probability event" );
  for ( auto& a : kept )
    a.weight = a.weight / mass;
  return dist<R>( std::move( kept ) );
}

/*! \brief Image distribution under a deterministic symbol map. */
template<typename R>
dist<R> pushforward( const dist<R>& p, const std::function<std::string( const std::string& )>& f )
{
  std::vector<typename dist<R>::atom> parts;
  for ( const auto& a : p.atoms() )
    parts.push_back( { f( a.sym ), a.weight } );
  return dist<R>::collect( parts );
}

/*! \brief Image distribution under a randomized kernel. */
template<typename R>
dist<R> pushforward_kernel( const dist<R>& p, const std::function<dist<R>( const std::string& )>& kernel )
{
  std::vector<typename dist<R>::atom> parts;
  for ( const auto& a : p.atoms() )
  {
    if ( a.weight == R( 0 ) )
      continue;
    const dist<R> image = kernel( a.sym );
    for ( const auto& b : image.atoms() )
      parts.push_back( { b.sym, a.weight * b.weight } );
  }
  return dist<R>::collect( parts );
}

/*! \brief Relative entropy sum p(x) ln(p(x)/q(x)) in nats. */
template<typename R>
double kl_divergence( const dist<R>& p, const dist<R>& q )
{
  double acc = 0.0;
  for ( const auto& [sym, pw, qw] : detail::union_support( p, q ) )
  {
    if ( pw == R( 0 ) )
      continue;
    if ( qw == R( 0 ) )
      throw validation_error( "kl_divergence: p has mass on q-null symbol '" + sym + "'" );
    acc += scalar<R>::to_double( pw ) * std::log( scalar<R>::to_double( pw / qw ) );
  }
  return acc;
}

/*!
  \brief Constructive projection of d_b into the eps-ball around d_other.

  Returns a distribution whose pointwise ratios against d_other are within
  [1/lambda, lambda], at statistical distance from d_b of at most the measured
  hockey-stick delta. Over-heavy points are clipped to lambda * d_other,
  under-light points are raised to d_other / lambda, and the mass difference is
  rebalanced inside { x : d_other(x) > d_b(x) } (or its mirror image).
*/
template<typename R>
dist<R> project_to_eps_ball_at_ratio( const dist<R>& d_b, const dist<R>& d_other, const R& lambda )
{
  if ( lambda < R( 1 ) )
    throw validation_error( "ratio bound lambda must be >= 1" );

  auto rows = detail::union_support( d_b, d_other );
  std::vector<R> adjusted( rows.size() );

  R freed = R( 0 ), spent = R( 0 );
  for ( std::size_t i = 0; i < rows.size(); ++i )
  {
    const auto& [sym, pw, qw] = rows[i];
    (void)sym;
    const R hi = lambda * qw;
    const R lo = qw / lambda;
    if ( pw > hi )
    {
      adjusted[i] = hi;
      freed += pw - hi;
    }
    else if ( pw < lo )
    {
      adjusted[i] = lo;
      spent += lo - pw;
    }
    else
    {
      adjusted[i] = pw;
    }
  }

  if ( freed > spent )
  {
    R diff = freed - spent;
    for ( std::size_t i = 0; i < rows.size() && diff > R( 0 ); ++i )
    {
      const auto& [sym, pw, qw] = rows[i];
      (void)sym;
      if ( qw > pw )
      {
        const R headroom = qw - adjusted[i];
        if ( headroom <= R( 0 ) )
          continue;
        const R add = headroom < diff ? headroom : diff;
        adjusted[i] += add;
        diff -= add;
      }
    }
    if ( scalar<R>::to_double( diff ) > ( scalar<R>::exact ? 0.0 : general_tol ) )
      throw degenerate_error( "eps-ball projection infeasible: rebalancing cannot close the mass gap" );
  }
  else if ( spent > freed )
  {
    R diff = spent - freed;
    for ( std::size_t i = 0; i < rows.size() && diff > R( 0 ); ++i )
    {
      const auto& [sym, pw, qw] = rows[i];
      (void)sym;
      if ( pw > qw )
      {
        const R reducible = adjusted[i] - qw;
        if ( reducible <= R( 0 ) )
          continue;
        const R sub = reducible < diff ? reducible : diff;
        adjusted[i] -= sub;
        diff -= sub;
      }
    }
    if ( scalar<R>::to_double( diff ) > ( scalar<R>::exact ? 0.0 : general_tol ) )
      throw degenerate_error( "eps-ball projection infeasible: rebalancing cannot close the mass gap" );
  }

  std::vector<typename dist<R>::atom> out;
  out.reserve( rows.size() );
  for ( std::size_t i = 0; i < rows.size(); ++i )
    out.push_back( { std::get<0>( rows[i] ), adjusted[i] } );

  if constexpr ( !scalar<R>::exact )
  {
    /* absorb float round-off so the constructor's sum check passes */
    R total = R( 0 );
    for ( const auto& a : out )
      total += a.weight;
    const R residue = R( 1 ) - total;
    if ( !out.empty() && residue != R( 0 ) && std::fabs( scalar<R>::to_double( residue ) ) < general_tol )
      out.front().weight += residue;
  }
  return dist<R>( std::move( out ) );
}

template<typename R>
dist<R> project_to_eps_ball( const dist<R>& d_b, const dist<R>& d_other, double eps )
{
  return project_to_eps_ball_at_ratio( d_b, d_other, scalar<R>::ratio_of_eps( eps ) );
}

namespace detail
{

/* Walks all symbol-count vectors of ell-fold products over the union support,
   calling f(wp, wq) with the grouped weights multinomial * prod p^k and
   multinomial * prod q^k. Group count is C(ell + m - 1, m - 1) instead of m^ell. */
template<typename R, typename F>
void for_each_product_group( const std::vector<std::tuple<std::string, R, R>>& rows, int ell, F&& f )
{
  const std::size_t m = rows.size();
  if ( m == 0 )
    return;

  std::function<void( std::size_t, int, const R&, const R& )> rec =
      [&]( std::size_t i, int rem, const R& wp, const R& wq ) {
        const R& pi = std::get<1>( rows[i] );
        const R& qi = std::get<2>( rows[i] );
        if ( i + 1 == m )
        {
          R ap = wp, aq = wq;
          for ( int k = 0; k < rem; ++k )
          {
            ap *= pi;
            aq *= qi;
          }
          f( ap, aq );
          return;
        }
        R binom = R( 1 ), pp = R( 1 ), qq = R( 1 );
        for ( int k = 0; k <= rem; ++k )
        {
          if ( k > 0 )
          {
            binom = binom * R( rem - k + 1 ) / R( k );
            pp *= pi;
            qq *= qi;
          }
          rec( i + 1, rem - k, wp * binom * pp, wq * binom * qq );
        }
      };
  rec( 0, ell, R( 1 ), R( 1 ) );
}

} // namespace detail

/*! \brief Statistical distance between the ell-fold products p^ell and q^ell,
 *  computed by grouping tuples with equal symbol counts. */
template<typename R>
R product_statistical_distance( const dist<R>& p, const dist<R>& q, int ell )
{
  if ( ell < 1 )
    throw validation_error( "product distance needs ell >= 1" );
  R acc = R( 0 );
  detail::for_each_product_group( detail::union_support( p, q ), ell, [&]( const R& wp, const R& wq ) {
    acc += wp > wq ? wp - wq : wq - wp;
  } );
  return acc / R( 2 );
}

/*! \brief Hockey-stick divergence between p^ell and q^ell at ratio bound lambda. */
template<typename R>
R product_hockey_stick_delta( const dist<R>& p, const dist<R>& q, int ell, const R& lambda )
{
  if ( ell < 1 )
    throw validation_error( "product distance needs ell >= 1" );
  if ( lambda < R( 1 ) )
    throw validation_error( "ratio bound lambda must be >= 1" );
  R fwd = R( 0 ), bwd = R( 0 );
  detail::for_each_product_group( detail::union_support( p, q ), ell, [&]( const R& wp, const R& wq ) {
    const R f = wp - lambda * wq;
    if ( f > R( 0 ) )
      fwd += f;
    const R b = wq - lambda * wp;
    if ( b > R( 0 ) )
      bwd += b;
  } );
  return fwd > bwd ? fwd : bwd;
}

} // namespace lrchan
