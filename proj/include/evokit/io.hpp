#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "evokit/clustering_core.hpp"
#include "evokit/fca.hpp"
#include "evokit/matrix.hpp"
#include "evokit/reducer.hpp"

namespace evokit::io {

/// Whitespace-separated points, one per line; blank lines are skipped. D is
/// taken from the first line. Throws ErrorKind::parse naming the line for
/// ragged rows or non-numeric tokens and ErrorKind::input for an empty file.
Matrix read_points(std::istream& in, const std::string& source = "<stream>");
Matrix load_points(const std::filesystem::path& path);

/// Points plus optional ground-truth centroids (same layout).
clustering::Dataset load_dataset(const std::filesystem::path& path,
                                 const std::optional<std::filesystem::path>& ground_truth = std::nullopt);

fca::FormalContext load_context(const std::filesystem::path& path);
void save_context(const std::filesystem::path& path, const fca::FormalContext& ctx);
reducer::Taxonomy load_taxonomy(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories. Throws ErrorKind::io.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Shortest text that parses back to exactly `v` when `digits` is empty,
/// otherwise scientific notation with that many significant digits.
std::string format_number(double v, std::optional<int> digits = std::nullopt);

/// Strict full-token parse; none on failure.
std::optional<double> parse_number(std::string_view token);

/// EVOKIT_OUT_DIR when set and non-empty, otherwise the working directory.
std::filesystem::path default_output_dir();

}  // namespace evokit::io
