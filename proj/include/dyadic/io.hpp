#pragma once

/// \file io.hpp
/// Text serialization. Reals are written in shortest round-trip form, so
/// every format here reads back bit-identical values.
///
/// Step functions are CSV, one row per finest cell: c0,...,c{n-1},value.
/// Haar shifts, sparse families and coefficient maps use line-oriented text
/// starting with a "dyadic-<kind> 1" header line followed by a grid line
/// "grid <dim> <top> <finest> <shift_0> ... <shift_{n-1}>":
///
///   dyadic-haar-shift 1            dyadic-sparse-family 1     dyadic-coefficients 1
///   grid ...                       grid ...                   grid ...
///   type <m> <k>                   generations <G>            entries <E>
///   scale <s>                      generation <k> <count>     entry <level> <coords> <alpha>
///   terms <T>                      cube <level> <coords>
///   term <level> <coords>
///   input <level> <coords> <depth> <values...>
///   output <level> <coords> <depth> <values...>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dyadic/grid.hpp"
#include "dyadic/shifts.hpp"
#include "dyadic/sparse.hpp"

namespace dyadic {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double; "inf", "-inf"
/// and "nan" for non-finite values.
std::string format_double(double v);
double parse_double(std::string_view text);

void write_step_csv(std::ostream& os, const StepFunction& f);
StepFunction read_step_csv(std::istream& is, const DyadicGrid& grid);

void write_shift(std::ostream& os, const HaarShiftSpec& spec);
HaarShiftSpec read_shift(std::istream& is);

void write_sparse_family(std::ostream& os, const SparseFamily& family);
SparseFamily read_sparse_family(std::istream& is);

void write_coefficients(std::ostream& os, const CoefficientMap& alpha);
CoefficientMap read_coefficients(std::istream& is);

/// The header kind of a serialized document ("haar-shift", "sparse-family",
/// "coefficients"), or an empty string if the header is not recognized.
std::string detect_kind(std::string_view first_line);

}  // namespace dyadic
