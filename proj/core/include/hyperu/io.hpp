#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperu/core.hpp"
#include "hyperu/spectral.hpp"

namespace hyperu {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Point-pattern text format: first non-comment line "d L", then one point
/// per line with d whitespace-separated coordinates. '#' starts a comment.
PointPattern read_pattern(std::istream& in);
PointPattern read_pattern_file(const std::filesystem::path& path);
void write_pattern(std::ostream& out, const PointPattern& pattern,
                   const std::vector<std::string>& header = {});

/// `kappa,x` CSV with optional '#' comment lines; the header row is required.
SpectralSample read_spectral_csv(std::istream& in);
SpectralSample read_spectral_csv_file(const std::filesystem::path& path);
void write_spectral_csv(std::ostream& out, const SpectralSample& sample,
                        const std::vector<std::string>& header = {});

/// Writes via a temporary file in the same directory followed by rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace hyperu
