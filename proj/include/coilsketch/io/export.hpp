#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "coilsketch/core/types.hpp"

namespace coilsketch {

/// 16-bit binary PGM of |img|, windowed to [0, max]. 3D images export the
/// central slice along the last axis.
void write_pgm16(const std::filesystem::path& path, const Image& img);

/// Shortest text that parses back to the same double.
std::string format_number(double v);

/// Comma-separated table with a fixed header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    CsvWriter& cell(const std::string& s);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(bool v) { return cell(std::string(v ? "true" : "false")); }
    /// Ends the current row; throws ShapeError on a column-count mismatch.
    void end_row();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_;
    std::vector<std::string> row_;
};

}  // namespace coilsketch
