/*!
  \file lrchan.cpp
  \brief Command-line driver: generators, analyzers, the amplification
  pipeline, threshold sweeps and machine-readable reports.

  Exit codes: 0 success, 2 validation or usage, 3 enumeration cap,
  4 degenerate-math errors.
*/

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <lrchan/lrchan.hpp>

namespace
{

using lrchan::json;

enum class backend_kind
{
  automatic,
  exact,
  floating
};

struct global_opts
{
  backend_kind backend = backend_kind::automatic;
  std::uint64_t cap = lrchan::default_enumeration_cap;
  std::optional<std::uint64_t> seed;
  std::string out;
};

backend_kind parse_backend( const std::string& s )
{
  if ( s == "rational" )
    return backend_kind::exact;
  if ( s == "float" )
    return backend_kind::floating;
  if ( s == "auto" )
    return backend_kind::automatic;
  throw lrchan::validation_error( "unknown backend '" + s + "' (rational|float)" );
}

/* fraction literals force the exact backend */
bool use_exact_backend( backend_kind k, const json* doc )
{
  switch ( k )
  {
  case backend_kind::exact:
    return true;
  case backend_kind::floating:
    return false;
  case backend_kind::automatic:
  default:
    return doc ? lrchan::has_rational_literals( *doc ) : true;
  }
}

void emit_report( const global_opts& g, const json& report )
{
  const std::string text = report.dump( 2 ) + "\n";
  if ( g.out.empty() )
    std::cout << text;
  else
    lrchan::write_text_file( g.out, text );
}

std::vector<double> parse_double_list( const std::vector<std::string>& items )
{
  std::vector<double> out;
  for ( const auto& s : items )
    out.push_back( lrchan::parse_rational( s ).convert_to<double>() );
  return out;
}

/* ------------------------------------------------------------------ */
/* generate                                                             */
/* ------------------------------------------------------------------ */

struct generate_opts
{
  std::string kind;
  std::string p, alpha, noise, eps, beta;
};

template<typename R>
json generate_object( const generate_opts& o )
{
  using namespace lrchan;
  if ( o.kind == "bsc" )
    return channel_to_json( bsc_channel<R>( scalar<R>::from_string( o.p ) ) );
  if ( o.kind == "noisy-example" )
    return channel_to_json( noisy_example_channel<R>( scalar<R>::from_string( o.alpha ),
                                                      scalar<R>::from_string( o.noise ) ) );
  if ( o.kind == "rr-channel" )
    return channel_to_json( randomized_response_channel<R>( parse_rational( o.eps ).convert_to<double>() ) );
  if ( o.kind == "rr-xor" )
  {
    std::optional<double> beta;
    if ( !o.beta.empty() )
      beta = parse_rational( o.beta ).convert_to<double>();
    return functionality_to_json( rr_xor_functionality<R>( parse_rational( o.eps ).convert_to<double>(), beta ) );
  }
  if ( o.kind == "noisy-xor" )
    return functionality_to_json( noisy_xor_functionality<R>( scalar<R>::from_string( o.alpha ) ) );
  throw validation_error( "unknown generator '" + o.kind + "'" );
}

/* ------------------------------------------------------------------ */
/* analyze                                                              */
/* ------------------------------------------------------------------ */

template<typename R>
json analyze_channel( const json& doc, const std::vector<double>& deltas )
{
  using namespace lrchan;
  const auto c = channel_from_json<R>( doc );
  json rep;
  rep["schema_version"] = schema_version;
  rep["agreement"] = value_to_json( agreement( c ) );
  rep["balanced"] = is_balanced( c );
  rep["atoms"] = c.atoms().size();

  json leaks = json::array();
  for ( double d : deltas )
  {
    try
    {
      leaks.push_back( leakage_profile_to_json( leakage( c, d ) ) );
    }
    catch ( const degenerate_error& e )
    {
      leaks.push_back( { { "at_delta", d }, { "error", e.what() } } );
    }
  }
  rep["leakage"] = leaks;

  try
  {
    const auto s = swbsc_params( c );
    rep["swbsc"] = swbsc_to_json( s );
    rep["wbsc"] = wbsc_to_json( swbsc_to_wbsc( s ) );
    rep["wullschleger"] = wullschleger_to_json(
        wullschleger_condition( s.eps0, swbsc_to_wbsc( s ).p ) );
  }
  catch ( const error& e )
  {
    rep["swbsc"] = { { "error", e.what() } };
  }
  return rep;
}

/* ------------------------------------------------------------------ */
/* amplify                                                              */
/* ------------------------------------------------------------------ */

struct amplify_opts
{
  std::string mode = "exact";
  int ell = 0;
  int depth = -1;
  std::string alpha_max;
  std::uint64_t runs = 100000;
  std::uint64_t max_iterations = 1'000'000;
};

template<typename R>
json run_amplify( const json& doc, const amplify_opts& o, const global_opts& g )
{
  using namespace lrchan;
  const auto c = channel_from_json<R>( doc );

  int ell = o.ell;
  int depth = o.depth;
  if ( ell == 0 && depth < 0 )
  {
    if ( o.alpha_max.empty() )
      throw validation_error( "amplify needs --ell, --depth or --alpha-max" );
    const auto params = gap_amplification_params( agreement( c ), scalar<R>::from_string( o.alpha_max ) );
    ell = params.ell;
    depth = params.depth;
  }

  json rep;
  rep["schema_version"] = schema_version;
  if ( o.mode == "exact" )
  {
    if ( ell == 0 )
      ell = 1 << depth;
    const auto amp = delta_exact( c, ell, g.cap );
    rep["mode"] = "exact";
    rep["ell"] = ell;
    rep["agreement"] = value_to_json( agreement( amp ) );
    const auto pred = predicted_agreement( agreement( c ), ell );
    rep["predicted_agreement"] = value_to_json( pred.alpha_out );
    try
    {
      rep["leakage"] = leakage_profile_to_json( leakage( amp, 0.0 ) );
    }
    catch ( const degenerate_error& e )
    {
      rep["leakage"] = { { "error", e.what() } };
    }
    if ( !g.out.empty() )
    {
      const std::string channel_path = g.out + ".channel.json";
      write_text_file( channel_path, channel_to_json( amp ).dump( 2 ) + "\n" );
      rep["channel_file"] = channel_path;
    }
    else
    {
      rep["channel"] = channel_to_json( amp );
    }
    return rep;
  }
  if ( o.mode == "mc" )
  {
    if ( !g.seed )
      throw validation_error( "Monte Carlo mode needs an explicit --seed" );
    rep["mode"] = "mc";
    sim_stats st;
    if ( o.ell > 0 && o.depth < 0 )
    {
      st = delta_simulate( c, o.ell, o.runs, *g.seed, o.max_iterations );
      rep["protocol"] = "delta";
      rep["ell"] = o.ell;
      rep["predicted_agreement"] = value_to_json( predicted_agreement( agreement( c ), o.ell ).alpha_out );
    }
    else
    {
      if ( depth < 0 )
        throw validation_error( "Monte Carlo mode needs --ell, --depth or --alpha-max" );
      st = lambda_simulate( c, depth, o.runs, *g.seed );
      rep["protocol"] = "lambda";
      rep["depth"] = depth;
      rep["predicted_agreement"] =
          value_to_json( predicted_agreement( agreement( c ), 1 << depth ).alpha_out );
    }
    rep["stats"] = sim_stats_to_json( st );
    return rep;
  }
  throw validation_error( "unknown amplify mode '" + o.mode + "' (exact|mc)" );
}

/* ------------------------------------------------------------------ */
/* dpxor                                                                */
/* ------------------------------------------------------------------ */

template<typename R>
json run_dpxor( const json& doc )
{
  using namespace lrchan;
  const auto f = functionality_from_json<R>( doc );

  json rep;
  rep["schema_version"] = schema_version;

  auto dp = check_eps_dp( f );
  const auto acc = measure_accuracy<R>( f, xor_function );
  dp.has_accuracy = true;
  dp.avg_agreement = acc.avg_agreement;
  dp.avg_correctness_beta = acc.avg_correctness_beta;
  dp.worst_case_correctness = acc.worst_case_correctness;
  rep["functionality"] = dp_report_to_json( dp );
  rep["perfect_agreement"] = f.has_perfect_agreement();

  try
  {
    const auto c = dp_xor_to_channel( f );
    json cj;
    cj["agreement"] = value_to_json( agreement( c ) );
    cj["agreement_equals_beta"] = agreement( c ) == acc.avg_correctness_beta;
    cj["balanced"] = is_balanced( c );
    try
    {
      const auto prof = leakage( c, 0.0 );
      cj["leakage"] = leakage_profile_to_json( prof );
      if ( dp.eps_measured.is_finite() && prof.eps_max.is_finite() )
        cj["leakage_within_twice_eps"] =
            prof.eps_max.value() <= 2.0 * dp.eps_measured.value() + lrchan::closed_form_tol;
      const auto wrt = leakage_wrt_outputs_check( f );
      cj["leakage_wrt_output_a"] = eps_to_json( wrt.first );
      cj["leakage_wrt_output_b"] = eps_to_json( wrt.second );
    }
    catch ( const degenerate_error& e )
    {
      cj["leakage"] = { { "error", e.what() } };
    }
    rep["channel"] = cj;
  }
  catch ( const error& e )
  {
    rep["channel"] = { { "error", e.what() } };
  }
  return rep;
}

/* ------------------------------------------------------------------ */
/* embedded-xor                                                         */
/* ------------------------------------------------------------------ */

json run_embedded_xor( const lrchan::truth_table& t, std::optional<double> eps,
                       std::optional<double> beta, double c, bool exhaust )
{
  using namespace lrchan;
  json rep;
  rep["schema_version"] = schema_version;
  rep["n"] = t.n();

  const auto mono = is_monotone_under_relabeling( t );
  rep["monotone"] = monotone_result_to_json( mono );
  if ( !mono.monotone )
  {
    const auto w = find_embedded_xor( t );
    if ( !w )
      throw degenerate_error( "internal: refusal without an embedded XOR witness" );
    rep["witness"] = xor_witness_to_json( *w, t.n() );
    if ( eps && beta )
      rep["reduction"] = reduction_report_to_json( reduction_report( t, *eps, *beta, c, exhaust ), t.n() );
  }
  return rep;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "two-party channel analysis: leakage, agreement amplification, "
                "differential privacy reductions" };
  app.require_subcommand( 1 );

  global_opts g;
  std::string backend_str = "auto";
  app.add_option( "--backend", backend_str, "numeric backend: rational|float (default: auto)" );
  app.add_option( "--cap", g.cap, "enumeration cap in atoms" );
  std::uint64_t seed_arg = 0;
  auto* seed_opt = app.add_option( "--seed", seed_arg, "PRNG seed for Monte Carlo commands" );
  app.add_option( "--out", g.out, "write the report to this path instead of stdout" );

  /* generate */
  generate_opts gen;
  auto* cmd_gen = app.add_subcommand( "generate", "write a channel or functionality JSON file" );
  cmd_gen->add_option( "kind", gen.kind, "bsc|noisy-example|rr-channel|rr-xor|noisy-xor" )->required();
  cmd_gen->add_option( "--p", gen.p, "crossover probability (bsc)" );
  cmd_gen->add_option( "--alpha", gen.alpha, "agreement bias" );
  cmd_gen->add_option( "--noise", gen.noise, "hint-coin bias (noisy-example)" );
  cmd_gen->add_option( "--eps", gen.eps, "randomized-response eps" );
  cmd_gen->add_option( "--beta", gen.beta, "accuracy target (rr-xor)" );

  /* analyze */
  std::string analyze_file;
  std::vector<std::string> delta_strs;
  auto* cmd_analyze = app.add_subcommand( "analyze", "agreement, balance and leakage of a channel file" );
  cmd_analyze->add_option( "file", analyze_file, "channel JSON file" )->required();
  cmd_analyze->add_option( "--delta", delta_strs, "delta grid for leakage (default 0)" );

  /* amplify */
  std::string amplify_file;
  amplify_opts amp;
  auto* cmd_amplify = app.add_subcommand( "amplify", "run the ell-sample transform, exactly or by simulation" );
  cmd_amplify->add_option( "file", amplify_file, "channel JSON file" )->required();
  cmd_amplify->add_option( "--mode", amp.mode, "exact|mc (default exact)" );
  cmd_amplify->add_option( "--ell", amp.ell, "samples per round" );
  cmd_amplify->add_option( "--depth", amp.depth, "recursion depth (mc)" );
  cmd_amplify->add_option( "--alpha-max", amp.alpha_max, "derive ell from this agreement ceiling" );
  cmd_amplify->add_option( "--runs", amp.runs, "Monte Carlo runs (default 1e5)" );
  cmd_amplify->add_option( "--max-iterations", amp.max_iterations, "per-run round cap (delta mc)" );

  /* pipeline */
  std::string pipeline_file, pipeline_alpha_max;
  std::string pipeline_delta_prime;
  bool include_channel = false;
  auto* cmd_pipeline = app.add_subcommand( "pipeline", "balance, amplify and evaluate the downstream precondition" );
  cmd_pipeline->add_option( "file", pipeline_file, "channel JSON file" )->required();
  cmd_pipeline->add_option( "--alpha-max", pipeline_alpha_max, "agreement ceiling (< 1/8)" )->required();
  cmd_pipeline->add_option( "--delta-prime", pipeline_delta_prime,
                            "slack split for the repetition budget (default 1e-3)" );
  cmd_pipeline->add_flag( "--include-channel", include_channel, "embed the amplified channel in the report" );

  /* sweep-threshold */
  std::vector<std::string> sweep_eps, sweep_alphas;
  std::string sweep_alpha_min = "0.004", sweep_alpha_max = "0.124";
  int sweep_alpha_points = 0;
  std::string sweep_delta_prime = "0.001";
  auto* cmd_sweep = app.add_subcommand( "sweep-threshold",
                                        "CSV of triviality agreement vs the smallest pipeline-passing agreement" );
  cmd_sweep->add_option( "--eps", sweep_eps, "eps grid" )->required();
  cmd_sweep->add_option( "--alpha", sweep_alphas, "explicit alpha grid" );
  cmd_sweep->add_option( "--alpha-min", sweep_alpha_min, "geometric grid start (default 0.004)" );
  cmd_sweep->add_option( "--alpha-max", sweep_alpha_max, "geometric grid end (default 0.124)" );
  cmd_sweep->add_option( "--alpha-points", sweep_alpha_points, "geometric grid size" );
  cmd_sweep->add_option( "--delta-prime", sweep_delta_prime, "slack split (default 1e-3)" );

  /* dpxor */
  std::string dpxor_file;
  auto* cmd_dpxor = app.add_subcommand( "dpxor", "differential privacy, accuracy and the induced channel of a functionality" );
  cmd_dpxor->add_option( "file", dpxor_file, "functionality JSON file" )->required();

  /* embedded-xor */
  std::string table_file;
  std::string ex_eps, ex_beta, ex_c = "1";
  bool ex_exhaust = false;
  auto* cmd_xor = app.add_subcommand( "embedded-xor", "monotone-under-relabeling verdict or an embedded XOR witness" );
  cmd_xor->add_option( "file", table_file, "truth table file (text or JSON)" )->required();
  cmd_xor->add_option( "--eps", ex_eps, "privacy parameter for the reduction report" );
  cmd_xor->add_option( "--beta", ex_beta, "accuracy for the reduction report" );
  cmd_xor->add_option( "--c", ex_c, "reduction constant (default 1)" );
  cmd_xor->add_flag( "--exhaust", ex_exhaust, "search all row pairs for the least-inflating witness" );

  /* rep-check */
  std::string rc_eps, rc_delta = "0", rc_delta_prime;
  int rc_ell = 0;
  std::string rc_p_file, rc_q_file;
  auto* cmd_rep = app.add_subcommand( "rep-check", "repetition budget eta and additive slack, optionally verified on a pair" );
  cmd_rep->add_option( "--eps", rc_eps, "per-sample eps" )->required();
  cmd_rep->add_option( "--delta", rc_delta, "per-sample delta (default 0)" );
  cmd_rep->add_option( "--ell", rc_ell, "repetitions" )->required();
  cmd_rep->add_option( "--delta-prime", rc_delta_prime, "slack split" )->required();
  cmd_rep->add_option( "--p", rc_p_file, "distribution JSON to verify against" );
  cmd_rep->add_option( "--q", rc_q_file, "second distribution JSON" );

  for ( auto* sub : app.get_subcommands( []( const CLI::App* ) { return true; } ) )
    sub->fallthrough();

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::ParseError& e )
  {
    const int code = app.exit( e );
    return code == 0 ? 0 : 2;
  }

  try
  {
    g.backend = parse_backend( backend_str );
    if ( seed_opt->count() > 0 )
      g.seed = seed_arg;

    if ( cmd_gen->parsed() )
    {
      /* generators default to the exact backend so parameters stay exact */
      const bool exact = g.backend != backend_kind::floating;
      const json obj = exact ? generate_object<lrchan::rational>( gen ) : generate_object<double>( gen );
      emit_report( g, obj );
      return 0;
    }

    if ( cmd_analyze->parsed() )
    {
      const json doc = lrchan::read_json_file( analyze_file );
      std::vector<double> deltas =
          delta_strs.empty() ? std::vector<double>{ 0.0 } : parse_double_list( delta_strs );
      const json rep = use_exact_backend( g.backend, &doc )
                           ? analyze_channel<lrchan::rational>( doc, deltas )
                           : analyze_channel<double>( doc, deltas );
      emit_report( g, rep );
      return 0;
    }

    if ( cmd_amplify->parsed() )
    {
      const json doc = lrchan::read_json_file( amplify_file );
      const json rep = use_exact_backend( g.backend, &doc )
                           ? run_amplify<lrchan::rational>( doc, amp, g )
                           : run_amplify<double>( doc, amp, g );
      emit_report( g, rep );
      return 0;
    }

    if ( cmd_pipeline->parsed() )
    {
      const json doc = lrchan::read_json_file( pipeline_file );
      const double dp = pipeline_delta_prime.empty()
                            ? 0.0
                            : lrchan::parse_rational( pipeline_delta_prime ).convert_to<double>();
      json rep;
      if ( use_exact_backend( g.backend, &doc ) )
      {
        const auto c = lrchan::channel_from_json<lrchan::rational>( doc );
        rep = lrchan::pipeline_report_to_json(
            lrchan::full_pipeline<lrchan::rational>(
                c, lrchan::parse_rational( pipeline_alpha_max ), dp, g.cap ),
            include_channel );
      }
      else
      {
        const auto c = lrchan::channel_from_json<double>( doc );
        rep = lrchan::pipeline_report_to_json(
            lrchan::full_pipeline<double>(
                c, lrchan::parse_rational( pipeline_alpha_max ).convert_to<double>(), dp, g.cap ),
            include_channel );
      }
      emit_report( g, rep );
      return 0;
    }

    if ( cmd_sweep->parsed() )
    {
      std::vector<double> alphas;
      if ( !sweep_alphas.empty() )
      {
        alphas = parse_double_list( sweep_alphas );
      }
      else
      {
        if ( sweep_alpha_points < 1 )
          throw lrchan::validation_error( "sweep needs --alpha or --alpha-points" );
        const double lo = lrchan::parse_rational( sweep_alpha_min ).convert_to<double>();
        const double hi = lrchan::parse_rational( sweep_alpha_max ).convert_to<double>();
        if ( !( lo > 0.0 ) || !( hi > lo ) )
          throw lrchan::validation_error( "sweep needs 0 < alpha-min < alpha-max" );
        for ( int i = 0; i < sweep_alpha_points; ++i )
        {
          const double t = sweep_alpha_points == 1
                               ? 0.0
                               : static_cast<double>( i ) / ( sweep_alpha_points - 1 );
          alphas.push_back( lo * std::pow( hi / lo, t ) );
        }
      }
      const auto rows = lrchan::sweep_threshold(
          parse_double_list( sweep_eps ), alphas,
          lrchan::parse_rational( sweep_delta_prime ).convert_to<double>(), g.cap );
      const std::string csv = lrchan::sweep_rows_to_csv( rows );
      if ( g.out.empty() )
        std::cout << csv;
      else
        lrchan::write_text_file( g.out, csv );
      return 0;
    }

    if ( cmd_dpxor->parsed() )
    {
      const json doc = lrchan::read_json_file( dpxor_file );
      const json rep = use_exact_backend( g.backend, &doc ) ? run_dpxor<lrchan::rational>( doc )
                                                            : run_dpxor<double>( doc );
      emit_report( g, rep );
      return 0;
    }

    if ( cmd_xor->parsed() )
    {
      const auto t = lrchan::truth_table_from_file( table_file );
      std::optional<double> eps, beta;
      if ( !ex_eps.empty() )
        eps = lrchan::parse_rational( ex_eps ).convert_to<double>();
      if ( !ex_beta.empty() )
        beta = lrchan::parse_rational( ex_beta ).convert_to<double>();
      emit_report( g, run_embedded_xor( t, eps, beta,
                                        lrchan::parse_rational( ex_c ).convert_to<double>(), ex_exhaust ) );
      return 0;
    }

    if ( cmd_rep->parsed() )
    {
      const double eps = lrchan::parse_rational( rc_eps ).convert_to<double>();
      const double delta = lrchan::parse_rational( rc_delta ).convert_to<double>();
      const double dp = lrchan::parse_rational( rc_delta_prime ).convert_to<double>();
      const auto b = lrchan::repetition_bound( eps, delta, rc_ell, dp );
      json rep;
      rep["schema_version"] = lrchan::schema_version;
      rep["bound"] = lrchan::repetition_bound_to_json( b );
      if ( !rc_p_file.empty() || !rc_q_file.empty() )
      {
        if ( rc_p_file.empty() || rc_q_file.empty() )
          throw lrchan::validation_error( "verification needs both --p and --q" );
        const auto p = lrchan::dist_from_json<lrchan::rational>( lrchan::read_json_file( rc_p_file ) );
        const auto q = lrchan::dist_from_json<lrchan::rational>( lrchan::read_json_file( rc_q_file ) );
        const auto lam = lrchan::scalar<lrchan::rational>::ratio_of_eps( b.eta );
        const auto measured = lrchan::product_hockey_stick_delta( p, q, rc_ell, lam );
        rep["verification"] = { { "measured_delta", lrchan::value_to_json( measured ) },
                                { "delta_out", b.delta_out },
                                { "satisfied",
                                  lrchan::scalar<lrchan::rational>::to_double( measured ) <= b.delta_out } };
      }
      emit_report( g, rep );
      return 0;
    }

    throw lrchan::validation_error( "no subcommand given" );
  }
  catch ( const lrchan::error& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }
  catch ( const std::exception& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
