#pragma once

#include <stdexcept>
#include <string>

namespace lrchan
{

/*! \brief Base class for all toolkit errors; carries the process exit code. */
class error : public std::runtime_error
{
public:
  error( const std::string& msg, int exit_code )
      : std::runtime_error( msg ), exit_code_( exit_code )
  {
  }

  int exit_code() const { return exit_code_; }

private:
  int exit_code_;
};

/*! \brief Invalid inputs, violated invariants, unusable parameters. Exit code 2. */
class validation_error : public error
{
public:
  explicit validation_error( const std::string& msg ) : error( msg, 2 ) {}
};

/*! \brief Exact enumeration would exceed the configured atom cap. Exit code 3. */
class cap_error : public error
{
public:
  cap_error( const std::string& msg, unsigned long long required )
      : error( msg + " (required atoms: " + std::to_string( required ) + ")", 3 ),
        required_( required )
  {
  }

  unsigned long long required_atoms() const { return required_; }

private:
  unsigned long long required_;
};

/*! \brief Degenerate mathematical situation: conditioning on a null event,
 *  agreement at +-1/2, a constant output where both values are needed. Exit code 4. */
class degenerate_error : public error
{
public:
  explicit degenerate_error( const std::string& msg ) : error( msg, 4 ) {}
};

} // namespace lrchan
