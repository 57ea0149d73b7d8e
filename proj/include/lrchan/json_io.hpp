#pragma once

/*!
  \file json_io.hpp
  \brief File formats and report serialization.

  Distribution files:   {"atoms":[{"sym":<string>,"p":<number or "a/b">},...]}
  Channel files:        {"atoms":[{"va":<string>,"oa":0|1,"vb":<string>,"ob":0|1,"p":...},...]}
  Functionality files:  {"n":<int>,"cells":[{"x":<bits>,"y":<bits>,"atoms":[{"va":..,"vb":..,"p":..}]}]}
  Truth tables:         first line n, then 2^n lines of 2^n characters in {0,1};
                        or the JSON variant {"n":<int>,"rows":[<bitstring>,...]}.

  Fraction strings force the exact backend. All reports carry schema_version "1".
*/

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "amplify.hpp"
#include "channel.hpp"
#include "dist.hpp"
#include "errors.hpp"
#include "functionality.hpp"
#include "scalar.hpp"
#include "truth_table.hpp"

namespace lrchan
{

using nlohmann::json;

inline constexpr const char* schema_version = "1";

/* ------------------------------------------------------------------ */
/* weights                                                              */
/* ------------------------------------------------------------------ */

template<typename R>
json weight_to_json( const R& w )
{
  if constexpr ( scalar<R>::exact )
    return json( to_fraction_string( w ) );
  else
    return json( w );
}

template<typename R>
R weight_from_json( const json& j )
{
  if ( j.is_string() )
    return scalar<R>::from_string( j.get<std::string>() );
  if ( j.is_number() )
    return scalar<R>::from_double( j.get<double>() );
  throw validation_error( "weight must be a number or a fraction string" );
}

/*! \brief True when any probability field in the document is a fraction string. */
inline bool has_rational_literals( const json& j )
{
  if ( j.is_object() )
  {
    for ( auto it = j.begin(); it != j.end(); ++it )
    {
      if ( it.key() == "p" && it.value().is_string() )
        return true;
      if ( has_rational_literals( it.value() ) )
        return true;
    }
  }
  else if ( j.is_array() )
  {
    for ( const auto& v : j )
      if ( has_rational_literals( v ) )
        return true;
  }
  return false;
}

/*! \brief Doubles render as numbers; rationals as {"value", "exact"} pairs. */
template<typename R>
json value_to_json( const R& v )
{
  if constexpr ( scalar<R>::exact )
    return json{ { "value", scalar<R>::to_double( v ) }, { "exact", to_fraction_string( v ) } };
  else
    return json( v );
}

inline json eps_to_json( const eps_value& e )
{
  return e.is_infinite() ? json( "infinite" ) : json( e.value() );
}

/* ------------------------------------------------------------------ */
/* object formats                                                       */
/* ------------------------------------------------------------------ */

template<typename R>
json dist_to_json( const dist<R>& d )
{
  json atoms = json::array();
  for ( const auto& a : d.atoms() )
    atoms.push_back( { { "sym", a.sym }, { "p", weight_to_json( a.weight ) } } );
  return json{ { "atoms", atoms } };
}

template<typename R>
dist<R> dist_from_json( const json& j )
{
  if ( !j.is_object() || !j.contains( "atoms" ) || !j["atoms"].is_array() )
    throw validation_error( "distribution file needs an \"atoms\" array" );
  std::vector<typename dist<R>::atom> atoms;
  std::size_t idx = 0;
  for ( const auto& a : j["atoms"] )
  {
    try
    {
      atoms.push_back( { a.at( "sym" ).get<std::string>(), weight_from_json<R>( a.at( "p" ) ) } );
    }
    catch ( const json::exception& e )
    {
      throw validation_error( "distribution atom #" + std::to_string( idx ) + ": " + e.what() );
    }
    ++idx;
  }
  return dist<R>( std::move( atoms ) );
}

template<typename R>
json channel_to_json( const channel<R>& c )
{
  json atoms = json::array();
  for ( const auto& a : c.atoms() )
    atoms.push_back( { { "va", a.view_a },
                       { "oa", a.out_a },
                       { "vb", a.view_b },
                       { "ob", a.out_b },
                       { "p", weight_to_json( a.weight ) } } );
  return json{ { "atoms", atoms } };
}

template<typename R>
channel<R> channel_from_json( const json& j )
{
  if ( !j.is_object() || !j.contains( "atoms" ) || !j["atoms"].is_array() )
    throw validation_error( "channel file needs an \"atoms\" array" );
  std::vector<typename channel<R>::atom> atoms;
  std::size_t idx = 0;
  for ( const auto& a : j["atoms"] )
  {
    try
    {
      atoms.push_back( { a.at( "va" ).get<std::string>(), a.at( "oa" ).get<int>(),
                         a.at( "vb" ).get<std::string>(), a.at( "ob" ).get<int>(),
                         weight_from_json<R>( a.at( "p" ) ) } );
    }
    catch ( const json::exception& e )
    {
      throw validation_error( "channel atom #" + std::to_string( idx ) + ": " + e.what() );
    }
    ++idx;
  }
  return channel<R>( std::move( atoms ) );
}

template<typename R>
json functionality_to_json( const functionality<R>& f )
{
  json cells = json::array();
  for ( unsigned x = 0; x < f.side(); ++x )
    for ( unsigned y = 0; y < f.side(); ++y )
    {
      json atoms = json::array();
      for ( const auto& a : f.cell( x, y ) )
        atoms.push_back( { { "va", a.view_a }, { "vb", a.view_b }, { "p", weight_to_json( a.weight ) } } );
      cells.push_back( { { "x", index_to_bits( x, f.input_bits() ) },
                         { "y", index_to_bits( y, f.input_bits() ) },
                         { "atoms", atoms } } );
    }
  return json{ { "n", f.input_bits() }, { "cells", cells } };
}

template<typename R>
functionality<R> functionality_from_json( const json& j )
{
  if ( !j.is_object() || !j.contains( "n" ) || !j.contains( "cells" ) )
    throw validation_error( "functionality file needs \"n\" and \"cells\"" );
  const int n = j["n"].get<int>();
  if ( n < 1 || n > 16 )
    throw validation_error( "functionality input width must be in [1,16] bits" );
  const std::size_t side = std::size_t{ 1 } << n;
  std::vector<std::vector<typename functionality<R>::view_atom>> cells( side * side );
  std::vector<bool> seen( side * side, false );
  for ( const auto& cell : j["cells"] )
  {
    unsigned x, y;
    try
    {
      x = bits_to_index( cell.at( "x" ).get<std::string>(), n );
      y = bits_to_index( cell.at( "y" ).get<std::string>(), n );
    }
    catch ( const json::exception& e )
    {
      throw validation_error( std::string( "functionality cell header: " ) + e.what() );
    }
    const std::size_t idx = static_cast<std::size_t>( x ) * side + y;
    if ( seen[idx] )
      throw validation_error( "duplicate cell (x=" + index_to_bits( x, n ) + ", y=" + index_to_bits( y, n ) + ")" );
    seen[idx] = true;
    for ( const auto& a : cell.at( "atoms" ) )
    {
      try
      {
        cells[idx].push_back( { a.at( "va" ).get<std::string>(), a.at( "vb" ).get<std::string>(),
                                weight_from_json<R>( a.at( "p" ) ) } );
      }
      catch ( const json::exception& e )
      {
        throw validation_error( "functionality cell (x=" + index_to_bits( x, n ) + ", y=" +
                                index_to_bits( y, n ) + "): " + e.what() );
      }
    }
  }
  for ( std::size_t i = 0; i < seen.size(); ++i )
    if ( !seen[i] )
      throw validation_error( "missing cell (x=" + index_to_bits( i / side, n ) + ", y=" +
                              index_to_bits( i % side, n ) + ")" );
  return functionality<R>( n, std::move( cells ) );
}

inline json truth_table_to_json( const truth_table& t )
{
  json rows = json::array();
  for ( unsigned x = 0; x < t.side(); ++x )
  {
    std::string line( t.side(), '0' );
    for ( unsigned y = 0; y < t.side(); ++y )
      line[y] = t.value( x, y ) ? '1' : '0';
    rows.push_back( line );
  }
  return json{ { "n", t.n() }, { "rows", rows } };
}

inline truth_table truth_table_from_json( const json& j )
{
  if ( !j.is_object() || !j.contains( "n" ) || !j.contains( "rows" ) )
    throw validation_error( "truth table file needs \"n\" and \"rows\"" );
  const int n = j["n"].get<int>();
  std::vector<std::vector<std::uint8_t>> rows;
  for ( const auto& line : j["rows"] )
  {
    const std::string s = line.get<std::string>();
    std::vector<std::uint8_t> r;
    for ( char c : s )
    {
      if ( c != '0' && c != '1' )
        throw validation_error( "truth table rows must be bit strings" );
      r.push_back( c - '0' );
    }
    rows.push_back( std::move( r ) );
  }
  return truth_table( n, std::move( rows ) );
}

inline truth_table truth_table_from_text( const std::string& text )
{
  std::istringstream in( text );
  int n = 0;
  if ( !( in >> n ) )
    throw validation_error( "truth table text must begin with n" );
  const std::size_t side = n >= 1 && n <= truth_table_max_bits ? ( std::size_t{ 1 } << n ) : 0;
  std::vector<std::vector<std::uint8_t>> rows;
  std::string line;
  while ( in >> line )
  {
    std::vector<std::uint8_t> r;
    for ( char c : line )
    {
      if ( c != '0' && c != '1' )
        throw validation_error( "truth table line '" + line + "' contains a non-bit character" );
      r.push_back( c - '0' );
    }
    rows.push_back( std::move( r ) );
    if ( side && rows.size() == side )
      break;
  }
  return truth_table( n, std::move( rows ) );
}

/* ------------------------------------------------------------------ */
/* file helpers                                                         */
/* ------------------------------------------------------------------ */

inline std::string read_text_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw validation_error( "cannot open '" + path + "'" );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file( const std::string& path )
{
  const std::string text = read_text_file( path );
  try
  {
    return json::parse( text );
  }
  catch ( const json::exception& e )
  {
    throw validation_error( "'" + path + "' is not valid JSON: " + e.what() );
  }
}

inline void write_text_file( const std::string& path, const std::string& content )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw validation_error( "cannot write '" + path + "'" );
  out << content;
}

/*! \brief Truth tables arrive as JSON or as the plain text format; sniff by first byte. */
inline truth_table truth_table_from_file( const std::string& path )
{
  const std::string text = read_text_file( path );
  for ( char c : text )
  {
    if ( c == ' ' || c == '\t' || c == '\n' || c == '\r' )
      continue;
    if ( c == '{' )
      return truth_table_from_json( read_json_file( path ) );
    break;
  }
  return truth_table_from_text( text );
}

/* ------------------------------------------------------------------ */
/* report rendering                                                     */
/* ------------------------------------------------------------------ */

inline json leakage_profile_to_json( const leakage_profile& p )
{
  return json{ { "eps_a", eps_to_json( p.eps_a ) },
               { "eps_b", eps_to_json( p.eps_b ) },
               { "eps_max", eps_to_json( p.eps_max ) },
               { "at_delta", p.at_delta } };
}

template<typename R>
json swbsc_to_json( const swbsc_params_t<R>& s )
{
  return json{ { "eps0", value_to_json( s.eps0 ) }, { "p", value_to_json( s.p ) } };
}

template<typename R>
json wbsc_to_json( const wbsc_params_t<R>& w )
{
  return json{ { "mu", value_to_json( w.mu ) },
               { "eps0", value_to_json( w.eps0 ) },
               { "eps1", value_to_json( w.eps1 ) },
               { "p", value_to_json( w.p ) },
               { "q", value_to_json( w.q ) } };
}

template<typename R>
json wullschleger_to_json( const wullschleger_report_t<R>& w )
{
  return json{ { "eps0", value_to_json( w.eps0 ) },
               { "p", value_to_json( w.p ) },
               { "lhs", value_to_json( w.lhs ) },
               { "rhs", value_to_json( w.rhs ) },
               { "holds", w.holds },
               { "boundary", w.boundary } };
}

inline json sim_stats_to_json( const sim_stats& s )
{
  return json{ { "runs", s.runs },
               { "agree_count", s.agree_count },
               { "agreement_estimate", static_cast<double>( s.agree_count ) / static_cast<double>( s.runs ) - 0.5 },
               { "mean_channel_calls", s.mean_channel_calls },
               { "max_channel_calls", s.max_channel_calls },
               { "seed", s.seed },
               { "truncated_runs", s.truncated_runs },
               { "pair_counts", { s.pair_counts[0], s.pair_counts[1], s.pair_counts[2], s.pair_counts[3] } } };
}

inline json repetition_bound_to_json( const repetition_bound_t& b )
{
  return json{ { "ell", b.ell },
               { "delta_prime", b.delta_prime },
               { "eta", b.eta },
               { "delta_out", b.delta_out } };
}

inline json amplify_params_to_json( const amplify_params& p )
{
  return json{ { "ell", p.ell }, { "depth", p.depth }, { "alpha_max", p.alpha_max } };
}

template<typename R>
json pipeline_report_to_json( const pipeline_report<R>& r, bool include_channel = false )
{
  json j;
  j["schema_version"] = schema_version;
  j["input"] = { { "agreement", value_to_json( r.input_agreement ) },
                 { "flipped_output", r.flipped_output },
                 { "was_balanced", r.was_balanced },
                 { "alpha", value_to_json( r.alpha ) },
                 { "eps_a", eps_to_json( r.base_eps_a ) },
                 { "eps_b", eps_to_json( r.base_eps_b ) },
                 { "eps", eps_to_json( r.base_eps ) } };
  j["params"] = amplify_params_to_json( r.params );
  j["params"]["delta_prime"] = r.delta_prime;
  j["amplified"] = { { "exact_channel", r.exact_channel },
                     { "agreement", value_to_json( r.amplified_agreement ) },
                     { "agreement_in_window", r.agreement_in_window },
                     { "window", { "1/32", "3/8" } },
                     { "eps_zero_slack", eps_to_json( r.amplified_eps_zero ) } };
  if ( r.budget )
    j["amplified"]["budget"] = { { "eta", r.budget->eta },
                                 { "delta_budget", r.budget->delta_budget },
                                 { "measured_delta", r.budget->measured_delta },
                                 { "satisfied", r.budget->satisfied } };
  if ( include_channel && r.amplified )
    j["amplified"]["channel"] = channel_to_json( *r.amplified );
  j["swbsc"] = swbsc_to_json( r.swbsc );
  j["wbsc"] = wbsc_to_json( r.wbsc );
  j["wullschleger"] = wullschleger_to_json( r.wull );
  return j;
}

template<typename R>
json dp_report_to_json( const dp_report<R>& r )
{
  json j = { { "eps_measured", eps_to_json( r.eps_measured ) },
             { "neighbor_witness", r.neighbor_witness } };
  if ( r.has_accuracy )
  {
    j["avg_agreement"] = value_to_json( r.avg_agreement );
    j["avg_correctness_beta"] = value_to_json( r.avg_correctness_beta );
    j["worst_case_correctness"] = value_to_json( r.worst_case_correctness );
  }
  return j;
}

inline json monotone_result_to_json( const monotone_result& m )
{
  json j;
  j["monotone"] = m.monotone;
  if ( m.monotone )
  {
    j["sigma_x"] = m.sigma_x;
    j["sigma_y"] = m.sigma_y;
  }
  else
  {
    j["violation"] = { { "on", m.violation_on_rows ? "rows" : "columns" },
                       { "a", m.violator_a },
                       { "b", m.violator_b } };
  }
  return j;
}

inline json xor_witness_to_json( const xor_witness& w, int n )
{
  return json{ { "x0", index_to_bits( w.x0, n ) },
               { "x1", index_to_bits( w.x1, n ) },
               { "y0", index_to_bits( w.y0, n ) },
               { "y1", index_to_bits( w.y1, n ) } };
}

inline json reduction_report_to_json( const reduction_report_t& r, int n )
{
  return json{ { "witness", xor_witness_to_json( r.witness, n ) },
               { "dist_x", r.dist_x },
               { "dist_y", r.dist_y },
               { "eps", r.eps },
               { "beta", r.beta },
               { "c", r.c },
               { "inflated_eps", r.inflated_eps },
               { "blanket_eps", r.blanket_eps },
               { "threshold", r.threshold },
               { "verdict", r.verdict } };
}

} // namespace lrchan
