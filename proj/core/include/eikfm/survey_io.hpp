#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "eikfm/tomography.hpp"

namespace eikfm {

// Survey file:
//
//   EIKSURV v1 <dim> <n0> <n1> [<n2>] <h> <o0> <o1> [<o2>] <n_src> <n_rec>\n
//   n_src little-endian int64 linear source indices
//   n_rec little-endian int64 linear receiver indices
//   n_src * n_rec little-endian doubles, d_obs row by row (one row per source)

void write_survey(std::ostream& os, const Survey& survey);
Survey read_survey(std::istream& is);
void write_survey(const std::filesystem::path& path, const Survey& survey);
Survey read_survey(const std::filesystem::path& path);

// Inversion config: a JSON object. Every key is optional.
//
//   alpha, n_gn, n_cg, ls_factor, ls_max, armijo   numbers as in InversionConfig
//   m_low, m_high                                   bound-map limits
//   order                                           1 or 2
//   enforce_monotonicity                            bool
//   m_ref                                           EIKFIELD path, relative
//                                                   paths resolve against the
//                                                   config file's directory
//
// Unknown keys are rejected so typos do not pass silently.
InversionConfig parse_inversion_config(const std::string& text,
                                       const std::filesystem::path& base_dir = {});
InversionConfig read_inversion_config(const std::filesystem::path& path);

// Dense data matrix as CSV: header "source,r0,r1,...", one row per source.
void write_data_csv(std::ostream& os, const DataMatrix& data);
DataMatrix read_data_csv(std::istream& is);

}  // namespace eikfm
