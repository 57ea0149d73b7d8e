#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <lrchan/lrchan.hpp>

using namespace lrchan;

namespace
{

truth_table table_from_rows( int n, const std::vector<std::string>& lines )
{
  std::vector<std::vector<std::uint8_t>> rows;
  for ( const auto& l : lines )
  {
    std::vector<std::uint8_t> r;
    for ( char c : l )
      r.push_back( c - '0' );
    rows.push_back( r );
  }
  return truth_table( n, std::move( rows ) );
}

bool relabeled_is_monotone( const truth_table& t, const monotone_result& m )
{
  const unsigned side = t.side();
  for ( unsigned i = 0; i < side; ++i )
    for ( unsigned j = 0; j < side; ++j )
    {
      if ( i + 1 < side && t.value( m.sigma_x[i], m.sigma_y[j] ) > t.value( m.sigma_x[i + 1], m.sigma_y[j] ) )
        return false;
      if ( j + 1 < side && t.value( m.sigma_x[i], m.sigma_y[j] ) > t.value( m.sigma_x[i], m.sigma_y[j + 1] ) )
        return false;
    }
  return true;
}

truth_table random_table( std::mt19937_64& g, int n )
{
  const unsigned side = 1u << n;
  std::vector<std::vector<std::uint8_t>> rows( side, std::vector<std::uint8_t>( side ) );
  for ( auto& r : rows )
    for ( auto& v : r )
      v = static_cast<std::uint8_t>( g() & 1 );
  return truth_table( n, std::move( rows ) );
}

/* exactly one of the two witnesses, and the returned one verifies */
void check_dichotomy( const truth_table& t )
{
  const auto mono = is_monotone_under_relabeling( t );
  const auto w = find_embedded_xor( t );
  CHECK( mono.monotone != w.has_value() );
  if ( mono.monotone )
    CHECK( relabeled_is_monotone( t, mono ) );
  else
    CHECK( verify_xor_witness( t, *w ) );
}

} // namespace

TEST_CASE( "one-bit AND is monotone under relabeling" )
{
  const auto t = table_from_rows( 1, { "00", "01" } );
  const auto m = is_monotone_under_relabeling( t );
  REQUIRE( m.monotone );
  CHECK( m.sigma_x == std::vector<unsigned>{ 0, 1 } );
  CHECK( m.sigma_y == std::vector<unsigned>{ 0, 1 } );
  CHECK( relabeled_is_monotone( t, m ) );
  CHECK( !find_embedded_xor( t ).has_value() );
}

TEST_CASE( "one-bit XOR has an embedded witness" )
{
  const auto t = table_from_rows( 1, { "01", "10" } );
  CHECK( !is_monotone_under_relabeling( t ).monotone );
  const auto w = find_embedded_xor( t );
  REQUIRE( w.has_value() );
  CHECK( w->x0 == 0 );
  CHECK( w->x1 == 1 );
  CHECK( w->y0 == 0 );
  CHECK( w->y1 == 1 );
  CHECK( verify_xor_witness( t, *w ) );
}

TEST_CASE( "parity of both inputs is refused at three bits" )
{
  const auto t = truth_table::from_function( 3, xor_function );
  const auto m = is_monotone_under_relabeling( t );
  CHECK( !m.monotone );
  /* rows 000 and 100 have disjoint nonempty zero-sets */
  CHECK( m.violation_on_rows );

  const auto w = find_embedded_xor( t );
  REQUIRE( w.has_value() );
  CHECK( verify_xor_witness( t, *w ) );
  /* first-found scan lands on the single-bit selectors */
  CHECK( index_to_bits( w->x0, 3 ) == "000" );
  CHECK( index_to_bits( w->x1, 3 ) == "100" );
  CHECK( __builtin_popcount( w->x0 ^ w->x1 ) == 1 );
  CHECK( __builtin_popcount( w->y0 ^ w->y1 ) == 1 );
}

TEST_CASE( "dichotomy holds exhaustively at one bit" )
{
  for ( unsigned bits = 0; bits < 16; ++bits )
  {
    std::vector<std::vector<std::uint8_t>> rows( 2, std::vector<std::uint8_t>( 2 ) );
    for ( int i = 0; i < 4; ++i )
      rows[i / 2][i % 2] = ( bits >> i ) & 1;
    check_dichotomy( truth_table( 1, std::move( rows ) ) );
  }
}

TEST_CASE( "dichotomy holds on random larger tables", "[property]" )
{
  std::mt19937_64 g( 61 );
  for ( int i = 0; i < 2000; ++i )
    check_dichotomy( random_table( g, 2 ) );
  for ( int i = 0; i < 10000; ++i )
    check_dichotomy( random_table( g, 3 ) );
}

TEST_CASE( "monotone verdict is invariant under input relabeling", "[property]" )
{
  std::mt19937_64 g( 67 );
  for ( int i = 0; i < 300; ++i )
  {
    const auto t = random_table( g, 2 );
    const bool verdict = is_monotone_under_relabeling( t ).monotone;

    std::vector<unsigned> px( t.side() ), py( t.side() );
    std::iota( px.begin(), px.end(), 0u );
    std::iota( py.begin(), py.end(), 0u );
    std::shuffle( px.begin(), px.end(), g );
    std::shuffle( py.begin(), py.end(), g );
    const auto shuffled = truth_table::from_function(
        2, [&]( unsigned x, unsigned y ) { return t.value( px[x], py[y] ); } );
    CHECK( is_monotone_under_relabeling( shuffled ).monotone == verdict );
  }
}

TEST_CASE( "every enumerated witness satisfies the XOR identity", "[property]" )
{
  std::mt19937_64 g( 71 );
  for ( int i = 0; i < 200; ++i )
  {
    const auto t = random_table( g, 2 );
    for ( const auto& w : find_embedded_xor_all( t ) )
      CHECK( verify_xor_witness( t, w ) );
  }
}

TEST_CASE( "reduction report" )
{
  const auto t = table_from_rows( 1, { "01", "10" } );
  const auto rep = reduction_report( t, 0.2, 0.1, 1.0 );
  CHECK( rep.dist_x == 1 );
  CHECK( rep.dist_y == 1 );
  CHECK( rep.inflated_eps == 0.2 );
  CHECK( rep.blanket_eps == 0.2 );
  CHECK_THAT( rep.threshold, Catch::Matchers::WithinAbs( 0.04, 1e-15 ) );
  CHECK( rep.verdict );

  /* three-bit parity: the witness distances are 1, tighter than the blanket n */
  const auto par = truth_table::from_function( 3, xor_function );
  const auto rp = reduction_report( par, 0.2, 0.1, 1.0 );
  CHECK( rp.dist_x == 1 );
  CHECK( rp.dist_y == 1 );
  CHECK_THAT( rp.inflated_eps, Catch::Matchers::WithinAbs( 0.2, 1e-15 ) );
  CHECK_THAT( rp.blanket_eps, Catch::Matchers::WithinAbs( 0.6, 1e-15 ) );
  CHECK( rp.verdict );

  /* below threshold: verdict false, the report is still produced */
  const auto low = reduction_report( t, 0.5, 0.01, 1.0 );
  CHECK( !low.verdict );
  CHECK( low.threshold > low.beta );

  /* the exhaustive flag picks the least-inflating witness */
  const auto rx = reduction_report( par, 0.2, 0.1, 1.0, true );
  CHECK( rx.dist_x == 1 );

  const auto andt = table_from_rows( 1, { "00", "01" } );
  CHECK_THROWS_AS( reduction_report( andt, 0.2, 0.1, 1.0 ), validation_error );
}

TEST_CASE( "table validation and parsing" )
{
  CHECK_THROWS_AS( truth_table( 11, {} ), validation_error );
  CHECK_THROWS_AS( table_from_rows( 1, { "00" } ), validation_error );
  CHECK_THROWS_AS( table_from_rows( 1, { "0", "1" } ), validation_error );

  const auto t = truth_table_from_text( "1\n01\n10\n" );
  CHECK( t.n() == 1 );
  CHECK( t.value( 0, 1 ) == 1 );

  const auto j = truth_table_to_json( t );
  const auto back = truth_table_from_json( j );
  CHECK( back.value( 1, 0 ) == 1 );
  CHECK( back.value( 1, 1 ) == 0 );
}
