#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tilesub/hull.hpp"
#include "tilesub/orientstats.hpp"
#include "tilesub/spectral.hpp"
#include "tilesub/substitution.hpp"

namespace tilesub {

/// Patch JSON: {"rule", "rule_digest", "provenance", "tile_count", "tiles": [{prototile, angle, translation}]}.
/// Doubles are written in shortest round-trip form.
std::string patch_to_json(const Patch& patch);

/// Parse a patch document against `rule`. Checks rule name and digest, and for supertile provenance
/// that the tile count equals 1^T M^k e_i.
Patch patch_from_json(std::string_view document, RulePtr rule);

std::string stats_csv(const std::vector<EquidistributionReport>& rows);
std::string intensity_csv(const IntensityGrid& g);
std::string autocorrelation_csv(const PolarHistogram& h);
std::string hull_json(const SymmetricPatchDistance& d);

struct SvgOptions {
    double stroke = 0.02;
    bool orientation_ticks = false;
};

std::string render_svg(const Patch& patch, const SvgOptions& opts = {});

/// Binary PGM (P5) of the intensity grid on a log scale, ky increasing upwards.
std::string intensity_pgm(const IntensityGrid& g);
std::string intensity_svg(const IntensityGrid& g);

std::string read_file(const std::filesystem::path& path);

/// Write via a temporary sibling and rename, so failed runs leave no partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

} // namespace tilesub
