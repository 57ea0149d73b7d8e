#pragma once

/*!
  \file tokens.hpp
  \brief Composition of opaque symbol tokens.

  Transformed channels build structured view tokens out of constituent tokens.
  Fields are joined with ',' and the characters ',' and '\\' are escaped, so
  composition is injective and the first character of a composed token is the
  first character of its first field. Output-bit extraction for functionality
  views relies on that property.
*/

#include <initializer_list>
#include <string>
#include <vector>

namespace lrchan
{

inline std::string escape_token_field( const std::string& field )
{
  std::string out;
  out.reserve( field.size() );
  for ( char c : field )
  {
    if ( c == ',' || c == '\\' )
      out.push_back( '\\' );
    out.push_back( c );
  }
  return out;
}

inline std::string compose_tokens( const std::vector<std::string>& fields )
{
  std::string out;
  bool first = true;
  for ( const auto& f : fields )
  {
    if ( !first )
      out.push_back( ',' );
    out += escape_token_field( f );
    first = false;
  }
  return out;
}

inline std::string compose_tokens( std::initializer_list<std::string> fields )
{
  return compose_tokens( std::vector<std::string>( fields ) );
}

/*! \brief Splits a composed token back into its fields. */
inline std::vector<std::string> split_token( const std::string& token )
{
  std::vector<std::string> fields;
  std::string cur;
  bool escaped = false;
  for ( char c : token )
  {
    if ( escaped )
    {
      cur.push_back( c );
      escaped = false;
    }
    else if ( c == '\\' )
    {
      escaped = true;
    }
    else if ( c == ',' )
    {
      fields.push_back( cur );
      cur.clear();
    }
    else
    {
      cur.push_back( c );
    }
  }
  fields.push_back( cur );
  return fields;
}

inline std::string bit_token( int bit )
{
  return bit ? "1" : "0";
}

} // namespace lrchan
