#pragma once

#include <filesystem>
#include <string>

#include "degenlab/coeffs.hpp"
#include "json.hpp"

namespace degenlab {

/// Parses a profile document, e.g.
///   {"dimension":1,"family":{"kind":"power","delta":0.75,"centers":[0.0]},"domain":[-4.0,4.0]}
/// Sampled families reference a CSV file (one row per grid point, upper-triangular
/// entries of C per row); relative paths resolve against `base_dir`.
/// Throws SchemaError naming the offending field.
CoefficientProfile profile_from_json(const nlohmann::json& doc,
                                     const std::filesystem::path& base_dir = {});

nlohmann::json profile_to_json(const CoefficientProfile& profile);

/// Loads a sampled-coefficient CSV; `dimension` fixes the column count (1 or 3).
std::vector<CoefficientMatrix> load_coefficient_csv(const std::filesystem::path& path,
                                                    int dimension);

}  // namespace degenlab
