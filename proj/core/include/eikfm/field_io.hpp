#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "eikfm/grid.hpp"

namespace eikfm {

// Binary field format:
//
//   EIKFIELD v1 <dim> <n0> <n1> [<n2>] <h> <o0> <o1> [<o2>]\n
//   <size * 8 bytes: little-endian IEEE-754 doubles in linear-index order>
//
// Reals in the header are printed with 17 significant digits so the grid
// round-trips exactly.

std::string field_header(const RegularGrid& grid);
RegularGrid parse_field_header(const std::string& line);

void write_field(std::ostream& os, const ScalarField& field);
ScalarField read_field(std::istream& is);
void write_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& path);

// CSV form for small fields: a "# EIKFIELD v1 ..." comment line carrying the
// grid, a column header "i0,i1[,i2],value", then one row per node in
// linear-index order.
void write_field_csv(std::ostream& os, const ScalarField& field);
ScalarField read_field_csv(std::istream& is);

// Little-endian double helpers shared with the survey format.
void write_le_doubles(std::ostream& os, std::span<const double> values);
void read_le_doubles(std::istream& is, std::span<double> values);
void write_le_int64(std::ostream& os, std::span<const std::int64_t> values);
void read_le_int64(std::istream& is, std::span<std::int64_t> values);

}  // namespace eikfm
