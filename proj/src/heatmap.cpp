#include "ada/heatmap.hpp"

#include "ada/error.hpp"
#include "ada/util.hpp"

#include <algorithm>

namespace ada {

HeatmapFormat heatmap_format_from_name(const std::string& name) {
    if (name == "pgm") return HeatmapFormat::pgm;
    if (name == "svg") return HeatmapFormat::svg;
    if (name == "csv") return HeatmapFormat::csv;
    throw config_error("unknown heatmap format: " + name);
}

void export_heatmap(const std::vector<std::uint32_t>& grid, int width, int height,
                    const std::string& path, HeatmapFormat format) {
    if (width <= 0 || height <= 0 ||
        grid.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw validation_error("export_heatmap: grid is not width x height");

    std::string out;
    switch (format) {
        case HeatmapFormat::pgm: {
            std::uint32_t max_count = 0;
            for (std::uint32_t v : grid) max_count = std::max(max_count, v);
            out += "P5\n";
            out += fmt_int(width);
            out += ' ';
            out += fmt_int(height);
            out += "\n255\n";
            for (std::uint32_t v : grid) {
                unsigned byte = max_count == 0
                                    ? 0u
                                    : static_cast<unsigned>(
                                          (static_cast<std::uint64_t>(v) * 255 + max_count / 2) /
                                          max_count);
                out.push_back(static_cast<char>(byte));
            }
            break;
        }
        case HeatmapFormat::svg: {
            const int cell = 10;
            std::uint32_t max_count = 0;
            for (std::uint32_t v : grid) max_count = std::max(max_count, v);
            out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
            out += fmt_int(width * cell);
            out += "\" height=\"";
            out += fmt_int(height * cell);
            out += "\">\n";
            for (int r = 0; r < height; ++r) {
                for (int c = 0; c < width; ++c) {
                    std::uint32_t v = grid[static_cast<std::size_t>(r) * width + c];
                    unsigned level = max_count == 0
                                         ? 0u
                                         : static_cast<unsigned>(
                                               (static_cast<std::uint64_t>(v) * 255 +
                                                max_count / 2) /
                                               max_count);
                    // dark blue -> warm ramp keyed on visit density
                    unsigned red = level;
                    unsigned green = level / 2;
                    unsigned blue = 64 + (255 - level) / 2;
                    out += "<rect x=\"";
                    out += fmt_int(c * cell);
                    out += "\" y=\"";
                    out += fmt_int(r * cell);
                    out += "\" width=\"10\" height=\"10\" fill=\"rgb(";
                    out += fmt_int(red);
                    out += ',';
                    out += fmt_int(green);
                    out += ',';
                    out += fmt_int(blue);
                    out += ")\"/>\n";
                }
            }
            out += "</svg>\n";
            break;
        }
        case HeatmapFormat::csv: {
            for (int r = 0; r < height; ++r) {
                for (int c = 0; c < width; ++c) {
                    if (c) out += ',';
                    out += fmt_int(grid[static_cast<std::size_t>(r) * width + c]);
                }
                out += '\n';
            }
            break;
        }
    }
    write_text_file(path, out);
}

} // namespace ada
