#pragma once

/*!
  \file sweep.hpp
  \brief Threshold sweep: contrasts the agreement the randomized-response
  construction reaches at leakage eps with the smallest agreement at which the
  amplification pipeline clears the downstream precondition.

  The pipeline side runs on the noisy-hint channel family with the hint bias
  calibrated so the zero-slack leakage equals eps exactly
  (bias = tanh(eps/2)/2). A row's min_passing_alpha is empty when no grid alpha
  passes; the passing threshold then lies above the whole grid and the written
  CSV carries "inf" in that column.
*/

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "amplify.hpp"
#include "constructions.hpp"
#include "errors.hpp"

namespace lrchan
{

struct sweep_row
{
  double eps;
  double triviality_alpha;
  std::optional<double> min_passing_alpha;
  double triv_ratio;
  std::optional<double> pass_ratio;
};

/*! \brief Hint-coin bias at which the noisy-hint channel's zero-slack leakage
 *  is exactly eps: ln((1/2 + b)/(1/2 - b)) = eps at b = tanh(eps/2)/2. */
inline double noise_bias_for_leakage( double eps )
{
  if ( eps < 0.0 )
    throw validation_error( "noise bias needs eps >= 0" );
  return 0.5 * std::tanh( eps / 2.0 );
}

inline std::vector<sweep_row> sweep_threshold( const std::vector<double>& eps_grid,
                                               const std::vector<double>& alpha_grid,
                                               double delta_prime,
                                               std::uint64_t cap = default_enumeration_cap )
{
  if ( eps_grid.empty() )
    throw validation_error( "sweep needs a non-empty eps grid" );
  if ( alpha_grid.empty() )
    throw validation_error( "sweep needs a non-empty alpha grid" );
  for ( double a : alpha_grid )
    if ( !( a > 0.0 ) || !( a < 0.125 ) )
      throw validation_error( "sweep alpha grid must lie in (0, 1/8)" );

  std::vector<double> alphas = alpha_grid;
  std::sort( alphas.begin(), alphas.end() );

  std::vector<sweep_row> rows;
  for ( double eps : eps_grid )
  {
    sweep_row row;
    row.eps = eps;
    row.triviality_alpha = agreement( randomized_response_channel<double>( eps ) );
    row.triv_ratio = row.triviality_alpha / ( eps * eps );

    const double bias = noise_bias_for_leakage( eps );
    for ( double alpha : alphas )
    {
      const auto ch = noisy_example_channel<double>( alpha, bias );
      const auto rep = full_pipeline<double>( ch, alpha, delta_prime, cap );
      if ( rep.wull.holds )
      {
        row.min_passing_alpha = alpha;
        row.pass_ratio = alpha / ( eps * eps );
        break;
      }
    }
    rows.push_back( row );
  }
  return rows;
}

inline std::string sweep_rows_to_csv( const std::vector<sweep_row>& rows )
{
  std::ostringstream out;
  out.precision( 17 );
  out << "eps,triviality_alpha,min_passing_alpha,triv_ratio,pass_ratio\n";
  for ( const auto& r : rows )
  {
    out << r.eps << ',' << r.triviality_alpha << ',';
    if ( r.min_passing_alpha )
      out << *r.min_passing_alpha;
    else
      out << "inf";
    out << ',' << r.triv_ratio << ',';
    if ( r.pass_ratio )
      out << *r.pass_ratio;
    else
      out << "inf";
    out << '\n';
  }
  return out.str();
}

} // namespace lrchan
