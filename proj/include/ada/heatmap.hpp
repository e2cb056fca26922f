#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ada {

enum class HeatmapFormat { pgm, svg, csv };

/// Writes a width x height visit-count grid. PGM is 8-bit grayscale scaled so
/// the max count maps to 255; SVG draws one filled cell rectangle per entry;
/// CSV emits the raw counts. Output bytes depend only on the input grid.
void export_heatmap(const std::vector<std::uint32_t>& grid, int width, int height,
                    const std::string& path, HeatmapFormat format);

HeatmapFormat heatmap_format_from_name(const std::string& name);

} // namespace ada
