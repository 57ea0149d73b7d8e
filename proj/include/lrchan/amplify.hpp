#pragma once

/*!
  \file amplify.hpp
  \brief Agreement amplification: the exact ell-sample channel transform, Monte
  Carlo simulators for the one-shot and the recursive protocol, bounded
  execution, parameter selection and the end-to-end pipeline.

  One amplification round draws the channel ell times and halts when the output
  tuples agree in every coordinate or disagree in every coordinate. On that
  event each party outputs the first bit of its tuple (the index of its tuple
  in the lexicographically ordered two-element candidate set). The exact
  transform models only the halting round; discarded rounds carry no
  information about the final outputs, and the Monte Carlo simulators, which
  keep them, are used to confirm the statistics match.
*/

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "dist.hpp"
#include "errors.hpp"
#include "scalar.hpp"
#include "tokens.hpp"

namespace lrchan
{

/*! \brief Samples per round, the equivalent recursion depth, and the agreement
 *  ceiling the parameters were derived from. */
struct amplify_params
{
  int ell;
  int depth;
  double alpha_max;
};

/*! \brief Parameter selection: ell = 2^(floor(log2(1/alpha_max)) - 2).
 *
 *  Requires alpha_max < 1/8 and alpha in [alpha_max/2, alpha_max]; this places
 *  ell * alpha inside [1/16, 1/4], which keeps the amplified agreement inside
 *  [1/32, 3/8].
 */
template<typename R>
amplify_params gap_amplification_params( const R& alpha, const R& alpha_max )
{
  if ( !( alpha_max > R( 0 ) ) || !( alpha_max < R( 1 ) / R( 8 ) ) )
    throw validation_error( "gap amplification needs alpha_max in (0, 1/8)" );
  if ( alpha < alpha_max / R( 2 ) || alpha > alpha_max )
    throw validation_error( "alpha outside the parameter window [alpha_max/2, alpha_max]" );

  int k = 3;
  while ( k < 40 && alpha_max * R( std::int64_t{ 1 } << ( k + 1 ) ) <= R( 1 ) )
    ++k;

  amplify_params p;
  p.depth = k - 2;
  p.ell = 1 << p.depth;
  p.alpha_max = scalar<R>::to_double( alpha_max );
  return p;
}

template<typename R>
struct predicted_agreement_t
{
  R alpha_out;
  std::optional<std::pair<R, R>> bracket; /* [alpha*ell/2, 3*alpha*ell/2] when alpha*ell < 1/4 */
};

/*! \brief Closed-form agreement of the ell-sample transform:
 *  (1/2+a)^ell / ((1/2+a)^ell + (1/2-a)^ell) - 1/2. */
template<typename R>
predicted_agreement_t<R> predicted_agreement( const R& alpha, int ell )
{
  const R half = R( 1 ) / R( 2 );
  if ( alpha <= -half || alpha >= half )
    throw validation_error( "predicted_agreement needs |alpha| < 1/2" );
  if ( ell < 1 )
    throw validation_error( "predicted_agreement needs ell >= 1" );

  R pe = R( 1 ), pd = R( 1 );
  for ( int i = 0; i < ell; ++i )
  {
    pe *= half + alpha;
    pd *= half - alpha;
  }
  predicted_agreement_t<R> out;
  out.alpha_out = pe / ( pe + pd ) - half;
  const R prod = alpha * R( ell );
  if ( alpha > R( 0 ) && prod < R( 1 ) / R( 4 ) )
    out.bracket = std::make_pair( prod / R( 2 ), R( 3 ) * prod / R( 2 ) );
  return out;
}

namespace detail
{

template<typename R>
void split_by_agreement( const channel<R>& c,
                         std::vector<typename channel<R>::atom>& agree,
                         std::vector<typename channel<R>::atom>& disagree )
{
  for ( const auto& a : c.atoms() )
  {
    if ( a.weight == R( 0 ) )
      continue;
    ( a.out_a == a.out_b ? agree : disagree ).push_back( a );
  }
}

inline double pow_count( std::size_t base, int e )
{
  double v = 1.0;
  for ( int i = 0; i < e; ++i )
    v *= static_cast<double>( base );
  return v;
}

} // namespace detail

/*!
  \brief Exact channel induced by the halting round of the ell-sample transform.

  Atoms are ell-tuples in which the coordinate outputs all agree or all
  disagree, renormalized. View tokens are the composed per-call views plus the
  candidate-set message (the lexicographically smaller of the output tuple and
  its complement); outputs are the tuples' first bits.
*/
template<typename R>
channel<R> delta_exact( const channel<R>& c, int ell, std::uint64_t cap = default_enumeration_cap )
{
  if ( ell < 1 )
    throw validation_error( "delta_exact needs ell >= 1" );
  if ( agreement( c ) < R( 0 ) )
    throw validation_error( "delta_exact needs non-negative agreement; flip one output first" );

  std::vector<typename channel<R>::atom> agree, disagree;
  detail::split_by_agreement( c, agree, disagree );

  const double needed = detail::pow_count( agree.size(), ell ) + detail::pow_count( disagree.size(), ell );
  if ( needed > static_cast<double>( cap ) )
    throw cap_error( "ell-fold tuple enumeration exceeds the cap",
                     static_cast<unsigned long long>( std::min( needed, 1e18 ) ) );
  if ( agree.empty() && disagree.empty() )
    throw degenerate_error( "channel has no positive-weight atoms" );

  std::vector<typename channel<R>::atom> out;
  R event_mass = R( 0 );

  auto emit_tuples = [&]( const std::vector<typename channel<R>::atom>& pool ) {
    if ( pool.empty() )
      return;
    std::vector<const typename channel<R>::atom*> picked( ell );
    std::function<void( int, const R& )> rec = [&]( int i, const R& w ) {
      if ( i == ell )
      {
        std::string oa_bits( ell, '0' ), flipped( ell, '0' );
        for ( int j = 0; j < ell; ++j )
        {
          oa_bits[j] = picked[j]->out_a ? '1' : '0';
          flipped[j] = picked[j]->out_a ? '0' : '1';
        }
        const std::string& set_msg = oa_bits < flipped ? oa_bits : flipped;

        std::vector<std::string> fa( ell + 1 ), fb( ell + 1 );
        for ( int j = 0; j < ell; ++j )
        {
          fa[j] = picked[j]->view_a;
          fb[j] = picked[j]->view_b;
        }
        fa[ell] = set_msg;
        fb[ell] = set_msg;

        out.push_back( { compose_tokens( fa ), picked[0]->out_a,
                         compose_tokens( fb ), picked[0]->out_b, w } );
        event_mass += w;
        return;
      }
      for ( const auto& a : pool )
      {
        picked[i] = &a;
        rec( i + 1, w * a.weight );
      }
    };
    rec( 0, R( 1 ) );
  };

  emit_tuples( agree );
  emit_tuples( disagree );

  if ( event_mass == R( 0 ) )
    throw degenerate_error( "halting event has probability zero" );
  for ( auto& a : out )
    a.weight = a.weight / event_mass;
  return channel<R>( std::move( out ) );
}

/*! \brief Exact output-pair distribution of the transform, optionally truncated.
 *
 *  Truncation after the given number of channel calls replaces the outputs by
 *  independent uniform bits, so the pair distribution is the mixture
 *  (1 - t) * exact + t * uniform with t = (1 - Pr[halt])^floor(cap/ell).
 */
template<typename R>
struct truncated_output_t
{
  dist<R> pair_dist; /* symbols "00","01","10","11" as (out_a, out_b) */
  R truncation_prob;
  R halt_prob;      /* per-round */
  R expected_calls; /* ell / halt_prob */
};

namespace detail
{

/* exact output-pair probabilities of the halting round plus the per-round halt mass */
template<typename R>
std::pair<std::array<R, 4>, R> delta_pair_probs( const channel<R>& c, int ell )
{
  R w_agree = R( 0 ), w_dis = R( 0 );
  R agree_zero = R( 0 ), dis_zero = R( 0 ); /* mass with out_a = 0 */
  for ( const auto& a : c.atoms() )
  {
    if ( a.out_a == a.out_b )
    {
      w_agree += a.weight;
      if ( a.out_a == 0 )
        agree_zero += a.weight;
    }
    else
    {
      w_dis += a.weight;
      if ( a.out_a == 0 )
        dis_zero += a.weight;
    }
  }

  R pe_agree = R( 1 ), pe_dis = R( 1 );
  for ( int i = 0; i < ell; ++i )
  {
    pe_agree *= w_agree;
    pe_dis *= w_dis;
  }
  const R halt = pe_agree + pe_dis;
  if ( halt == R( 0 ) )
    throw degenerate_error( "halting event has probability zero" );

  /* first coordinate decides both outputs */
  std::array<R, 4> p = { R( 0 ), R( 0 ), R( 0 ), R( 0 ) }; /* 00, 01, 10, 11 */
  if ( w_agree > R( 0 ) )
  {
    const R rest = pe_agree / w_agree;
    p[0] = agree_zero * rest / halt;
    p[3] = ( w_agree - agree_zero ) * rest / halt;
  }
  if ( w_dis > R( 0 ) )
  {
    const R rest = pe_dis / w_dis;
    p[1] = dis_zero * rest / halt;
    p[2] = ( w_dis - dis_zero ) * rest / halt;
  }
  return { p, halt };
}

} // namespace detail

template<typename R>
truncated_output_t<R> delta_truncated_output_dist( const channel<R>& c, int ell,
                                                   std::uint64_t cap_calls )
{
  if ( ell < 1 )
    throw validation_error( "delta_truncated_output_dist needs ell >= 1" );
  const auto [p, halt] = detail::delta_pair_probs( c, ell );

  const std::uint64_t rounds = cap_calls / static_cast<std::uint64_t>( ell );
  R trunc = R( 1 );
  const R miss = R( 1 ) - halt;
  for ( std::uint64_t i = 0; i < rounds; ++i )
    trunc *= miss;

  const R quarter = R( 1 ) / R( 4 );
  const R keep = R( 1 ) - trunc;
  truncated_output_t<R> t;
  t.pair_dist = dist<R>( { { "00", keep * p[0] + trunc * quarter },
                           { "01", keep * p[1] + trunc * quarter },
                           { "10", keep * p[2] + trunc * quarter },
                           { "11", keep * p[3] + trunc * quarter } } );
  t.truncation_prob = trunc;
  t.halt_prob = halt;
  t.expected_calls = R( ell ) / halt;
  return t;
}

/*! \brief Output-pair distribution of the untruncated transform. */
template<typename R>
dist<R> delta_output_pair_dist( const channel<R>& c, int ell )
{
  if ( ell < 1 )
    throw validation_error( "delta_output_pair_dist needs ell >= 1" );
  const auto [p, halt] = detail::delta_pair_probs( c, ell );
  (void)halt;
  return dist<R>( { { "00", p[0] }, { "01", p[1] }, { "10", p[2] }, { "11", p[3] } } );
}

/* ------------------------------------------------------------------ */
/* Monte Carlo                                                         */
/* ------------------------------------------------------------------ */

struct draw_outcome
{
  int out_a;
  int out_b;
  std::uint64_t calls;
  bool truncated;
};

/*! \brief Per-run sampler: draws one protocol execution within a call budget. */
using simulator = std::function<draw_outcome( std::mt19937_64&, std::uint64_t )>;

inline std::uint64_t splitmix64( std::uint64_t x )
{
  x += 0x9e3779b97f4a7c15ULL;
  x = ( x ^ ( x >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
  x = ( x ^ ( x >> 27 ) ) * 0x94d049bb133111ebULL;
  return x ^ ( x >> 31 );
}

inline double uniform_unit( std::mt19937_64& g )
{
  return static_cast<double>( g() >> 11 ) * 0x1.0p-53;
}

inline int uniform_bit( std::mt19937_64& g )
{
  return static_cast<int>( g() & 1u );
}

/*! \brief Cumulative-weight sampler over a channel's output pairs. */
class channel_sampler
{
public:
  template<typename R>
  explicit channel_sampler( const channel<R>& c )
  {
    double acc = 0.0;
    for ( const auto& a : c.atoms() )
    {
      const double w = scalar<R>::to_double( a.weight );
      if ( w <= 0.0 )
        continue;
      acc += w;
      cum_.push_back( acc );
      outs_.emplace_back( a.out_a, a.out_b );
    }
    if ( cum_.empty() )
      throw degenerate_error( "cannot sample an empty channel" );
    for ( auto& v : cum_ )
      v /= acc;
    cum_.back() = 1.0;
  }

  std::pair<int, int> sample( std::mt19937_64& g ) const
  {
    const double u = uniform_unit( g );
    std::size_t lo = 0, hi = cum_.size() - 1;
    while ( lo < hi )
    {
      const std::size_t mid = ( lo + hi ) / 2;
      if ( cum_[mid] <= u )
        lo = mid + 1;
      else
        hi = mid;
    }
    return outs_[lo];
  }

private:
  std::vector<double> cum_;
  std::vector<std::pair<int, int>> outs_;
};

inline draw_outcome truncated_outcome( std::mt19937_64& g, std::uint64_t calls )
{
  return { uniform_bit( g ), uniform_bit( g ), calls, true };
}

/*! \brief Rejection-sampling executor of the ell-sample protocol. */
inline simulator make_delta_simulator( channel_sampler sampler, int ell,
                                       std::uint64_t max_iterations = 1'000'000 )
{
  if ( ell < 1 )
    throw validation_error( "delta simulator needs ell >= 1" );
  if ( max_iterations < 1 )
    throw validation_error( "delta simulator needs max_iterations >= 1" );

  return [sampler, ell, max_iterations]( std::mt19937_64& g, std::uint64_t budget ) -> draw_outcome {
    std::uint64_t calls = 0;
    for ( std::uint64_t iter = 0; iter < max_iterations; ++iter )
    {
      if ( calls + static_cast<std::uint64_t>( ell ) > budget )
        return truncated_outcome( g, calls );

      auto first = sampler.sample( g );
      ++calls;
      const int pattern = first.first ^ first.second;
      bool halting = true;
      for ( int j = 1; j < ell; ++j )
      {
        auto next = sampler.sample( g );
        ++calls;
        if ( ( next.first ^ next.second ) != pattern )
        {
          /* keep drawing so every round costs ell calls */
          halting = false;
        }
      }
      if ( halting )
        return { first.first, first.second, calls, false };
    }
    return truncated_outcome( g, calls );
  };
}

namespace detail
{

inline draw_outcome lambda_draw( const channel_sampler& s, int depth, std::mt19937_64& g,
                                 std::uint64_t budget )
{
  if ( depth == 0 )
  {
    if ( budget < 1 )
      return truncated_outcome( g, 0 );
    auto [a, b] = s.sample( g );
    return { a, b, 1, false };
  }

  std::uint64_t calls = 0;
  while ( true )
  {
    if ( calls >= budget )
      return truncated_outcome( g, calls );
    auto r1 = lambda_draw( s, depth - 1, g, budget - calls );
    calls += r1.calls;
    if ( r1.truncated )
      return truncated_outcome( g, calls );

    if ( calls >= budget )
      return truncated_outcome( g, calls );
    auto r2 = lambda_draw( s, depth - 1, g, budget - calls );
    calls += r2.calls;
    if ( r2.truncated )
      return truncated_outcome( g, calls );

    /* halting test of the two-sample combiner on the pair of sub-draws */
    if ( ( r1.out_a ^ r1.out_b ) == ( r2.out_a ^ r2.out_b ) )
      return { r1.out_a, r1.out_b, calls, false };
  }
}

} // namespace detail

/*! \brief Recursive amplifier: depth d composes the two-sample combiner over
 *  itself, with depth 0 being a single channel draw. */
inline simulator make_lambda_simulator( channel_sampler sampler, int depth )
{
  if ( depth < 0 )
    throw validation_error( "lambda simulator needs depth >= 0" );
  return [sampler, depth]( std::mt19937_64& g, std::uint64_t budget ) {
    return detail::lambda_draw( sampler, depth, g, budget );
  };
}

/*! \brief Caps a simulator's channel calls; exceeding the cap aborts the run
 *  and both parties output independent uniform bits. */
inline simulator bounded_execution( simulator inner, std::uint64_t step_cap )
{
  if ( step_cap < 1 )
    throw validation_error( "bounded execution needs step_cap >= 1" );
  return [inner = std::move( inner ), step_cap]( std::mt19937_64& g, std::uint64_t budget ) {
    return inner( g, std::min( budget, step_cap ) );
  };
}

struct sim_stats
{
  std::uint64_t runs = 0;
  std::uint64_t agree_count = 0;
  double mean_channel_calls = 0.0;
  std::uint64_t max_channel_calls = 0;
  std::uint64_t seed = 0;
  std::uint64_t truncated_runs = 0;
  std::uint64_t pair_counts[4] = { 0, 0, 0, 0 }; /* index (out_a << 1) | out_b */
};

/*! \brief Runs independent executions; run i uses a generator derived from
 *  (seed, i), so results are reproducible and mergeable. */
inline sim_stats run_simulation( const simulator& sim, std::uint64_t runs, std::uint64_t seed )
{
  if ( runs < 1 )
    throw validation_error( "simulation needs runs >= 1" );
  sim_stats st;
  st.runs = runs;
  st.seed = seed;
  std::uint64_t total_calls = 0;
  for ( std::uint64_t i = 0; i < runs; ++i )
  {
    std::mt19937_64 g( splitmix64( seed ^ splitmix64( i ) ) );
    const auto o = sim( g, UINT64_MAX );
    total_calls += o.calls;
    if ( o.calls > st.max_channel_calls )
      st.max_channel_calls = o.calls;
    if ( o.truncated )
      ++st.truncated_runs;
    if ( o.out_a == o.out_b )
      ++st.agree_count;
    ++st.pair_counts[( o.out_a << 1 ) | o.out_b];
  }
  st.mean_channel_calls = static_cast<double>( total_calls ) / static_cast<double>( runs );
  return st;
}

template<typename R>
sim_stats delta_simulate( const channel<R>& c, int ell, std::uint64_t runs, std::uint64_t seed,
                          std::uint64_t max_iterations = 1'000'000 )
{
  return run_simulation( make_delta_simulator( channel_sampler( c ), ell, max_iterations ),
                         runs, seed );
}

template<typename R>
sim_stats lambda_simulate( const channel<R>& c, int depth, std::uint64_t runs, std::uint64_t seed )
{
  if ( agreement( c ) < R( 0 ) )
    throw validation_error( "lambda_simulate needs non-negative agreement; flip one output first" );
  return run_simulation( make_lambda_simulator( channel_sampler( c ), depth ), runs, seed );
}

/* ------------------------------------------------------------------ */
/* End-to-end pipeline                                                 */
/* ------------------------------------------------------------------ */

/*! \brief Repetition budget verification of the amplified conditional views. */
struct budget_check_t
{
  double eta;
  double delta_budget;
  double measured_delta; /* max over parties */
  bool satisfied;
};

template<typename R>
struct pipeline_report
{
  R input_agreement;
  bool flipped_output = false;
  bool was_balanced = true;
  R alpha; /* agreement after normalization and balancing */

  eps_value base_eps_a, base_eps_b, base_eps; /* zero-slack leakage of the balanced input */

  amplify_params params{};
  double delta_prime = 0.0;

  bool exact_channel = false;
  std::optional<channel<R>> amplified;
  R amplified_agreement;
  bool agreement_in_window = false; /* [1/32, 3/8] */
  eps_value amplified_eps_zero;

  std::optional<budget_check_t> budget;

  swbsc_params_t<R> swbsc;
  wbsc_params_t<R> wbsc;
  wullschleger_report_t<R> wull;
};

namespace detail
{

template<typename F>
auto pipeline_stage( const std::string& name, F&& f ) -> decltype( f() )
{
  try
  {
    return f();
  }
  catch ( const cap_error& e )
  {
    throw cap_error( "stage '" + name + "': " + e.what(), e.required_atoms() );
  }
  catch ( const degenerate_error& e )
  {
    throw degenerate_error( "stage '" + name + "': " + e.what() );
  }
  catch ( const validation_error& e )
  {
    throw validation_error( "stage '" + name + "': " + e.what() );
  }
}

} // namespace detail

/*!
  \brief Runs the whole analysis: normalize and balance the channel, derive
  parameters, amplify, evaluate agreement window, leakage budget, the weak
  binary symmetric channel parameters and the downstream precondition.

  When the exact tuple enumeration fits under the cap the amplified channel is
  materialized; otherwise the amplified statistics are computed from ell-fold
  products of the conditional views, which induce the same distributions.
*/
template<typename R>
pipeline_report<R> full_pipeline( const channel<R>& input, const R& alpha_max,
                                  double delta_prime = 0.0,
                                  std::uint64_t cap = default_enumeration_cap )
{
  pipeline_report<R> rep;

  channel<R> c = input;
  rep.input_agreement = agreement( c );
  if ( rep.input_agreement < R( 0 ) )
  {
    rep.flipped_output = true;
    c = flip_output_b( c );
  }

  detail::pipeline_stage( "balance", [&] {
    rep.was_balanced = is_balanced( c );
    if ( !rep.was_balanced )
      c = balance( c );
    rep.alpha = agreement( c );
    return 0;
  } );

  dist<R> va_eq = detail::pipeline_stage( "base-leakage", [&] { return view_given_agreement( c, party::a, true ); } );
  dist<R> va_ne = view_given_agreement( c, party::a, false );
  dist<R> vb_eq = view_given_agreement( c, party::b, true );
  dist<R> vb_ne = view_given_agreement( c, party::b, false );
  rep.base_eps_a = log_ratio_epsilon( va_eq, va_ne, 0.0 );
  rep.base_eps_b = log_ratio_epsilon( vb_eq, vb_ne, 0.0 );
  rep.base_eps = max( rep.base_eps_a, rep.base_eps_b );

  detail::pipeline_stage( "params", [&] {
    rep.params = gap_amplification_params( rep.alpha, alpha_max );
    return 0;
  } );
  const int ell = rep.params.ell;
  rep.delta_prime = delta_prime > 0.0 ? delta_prime : 1e-3;

  detail::pipeline_stage( "amplify", [&] {
    std::vector<typename channel<R>::atom> ag, di;
    detail::split_by_agreement( c, ag, di );
    const double needed = detail::pow_count( ag.size(), ell ) + detail::pow_count( di.size(), ell );
    if ( needed <= static_cast<double>( cap ) )
    {
      rep.exact_channel = true;
      rep.amplified = delta_exact( c, ell, cap );
      rep.amplified_agreement = agreement( *rep.amplified );
    }
    else
    {
      rep.exact_channel = false;
      rep.amplified_agreement = predicted_agreement( rep.alpha, ell ).alpha_out;
    }
    return 0;
  } );
  rep.agreement_in_window = rep.amplified_agreement >= R( 1 ) / R( 32 ) &&
                            rep.amplified_agreement <= R( 3 ) / R( 8 );

  detail::pipeline_stage( "amplified-leakage", [&] {
    if ( rep.base_eps.is_infinite() )
    {
      rep.amplified_eps_zero = eps_value::infinite();
      return 0;
    }
    rep.amplified_eps_zero = eps_value( ell * rep.base_eps.value() );
    const auto bud = repetition_bound( rep.base_eps.value(), 0.0, ell, rep.delta_prime );
    const R lam = scalar<R>::ratio_of_eps( bud.eta );
    R da, db;
    if ( rep.exact_channel )
    {
      da = hockey_stick_delta( view_given_agreement( *rep.amplified, party::a, true ),
                               view_given_agreement( *rep.amplified, party::a, false ), lam );
      db = hockey_stick_delta( view_given_agreement( *rep.amplified, party::b, true ),
                               view_given_agreement( *rep.amplified, party::b, false ), lam );
    }
    else
    {
      da = product_hockey_stick_delta( va_eq, va_ne, ell, lam );
      db = product_hockey_stick_delta( vb_eq, vb_ne, ell, lam );
    }
    budget_check_t bc;
    bc.eta = bud.eta;
    bc.delta_budget = bud.delta_out;
    bc.measured_delta = scalar<R>::to_double( da > db ? da : db );
    bc.satisfied = bc.measured_delta <= bc.delta_budget + ( scalar<R>::exact ? 0.0 : general_tol );
    rep.budget = bc;
    return 0;
  } );

  detail::pipeline_stage( "swbsc", [&] {
    if ( rep.exact_channel )
    {
      channel<R> amp = *rep.amplified;
      if ( !is_balanced( amp ) )
        amp = balance( amp );
      rep.swbsc = swbsc_params( amp );
    }
    else
    {
      const R pa = product_statistical_distance( va_eq, va_ne, ell );
      const R pb = product_statistical_distance( vb_eq, vb_ne, ell );
      rep.swbsc.eps0 = R( 1 ) / R( 2 ) - rep.amplified_agreement;
      rep.swbsc.p = pa > pb ? pa : pb;
    }
    return 0;
  } );

  rep.wbsc = swbsc_to_wbsc( rep.swbsc );
  rep.wull = detail::pipeline_stage( "wullschleger", [&] {
    return wullschleger_condition( rep.swbsc.eps0, rep.wbsc.p );
  } );
  return rep;
}

} // namespace lrchan
