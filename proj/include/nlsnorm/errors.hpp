#pragma once

#include <stdexcept>
#include <string>

namespace nlsnorm
{

// Length or grid mismatches between arrays that must share a layout.
class StructuralError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite input or output in a numerical kernel.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Parameter sets violating the admissible ranges, or a solver called outside
// the regime it supports.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class RegimeError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

// Shooting could not bracket the ground-state initial value.
class NoBracketError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// A rescaled or dilated field cannot be represented on the grid.
class ResolutionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Path endpoints could not be placed on both sides of the separating set.
class GeometryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Output files could not be written.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlsnorm
