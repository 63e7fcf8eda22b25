#pragma once

#include <stdexcept>
#include <string>

namespace ionflux {

/// Invalid or inconsistent user input (config files, parameters).
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed or produced an inconsistent result.
class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Two ions at the same position; the Coulomb energy is undefined.
class SingularityError : public SolverError
{
public:
  using SolverError::SolverError;
};

}  // namespace ionflux
