#include "coilsketch/io/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "coilsketch/io/npy.hpp"

namespace coilsketch {

void write_pgm16(const std::filesystem::path& path, const Image& img)
{
    const GridShape& s = img.shape;
    const Index rows = s[0];
    const Index cols = s[1];
    const Index depth = s.ndim() == 3 ? s[2] : 1;
    const Index slice = depth / 2;
    RVec mag(rows * cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            mag[r * cols + c] = std::abs(img.values[(r * cols + c) * depth + slice]);
        }
    }
    const double peak = mag.size() > 0 ? mag.maxCoeff() : 0.0;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << "P5\n" << cols << " " << rows << "\n65535\n";
    for (Index i = 0; i < mag.size(); ++i) {
        const double u = peak > 0.0 ? std::clamp(mag[i] / peak, 0.0, 1.0) : 0.0;
        const auto v = static_cast<std::uint16_t>(std::lround(u * 65535.0));
        const char be[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
        out.write(be, 2);
    }
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::trunc), path_(path), columns_(header.size())
{
    if (!out_) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    row_ = std::move(header);
    end_row();
}

CsvWriter& CsvWriter::cell(const std::string& s)
{
    row_.push_back(s);
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row()
{
    if (row_.size() != columns_) {
        throw ShapeError("CSV row has " + std::to_string(row_.size()) + " cells, header has " +
                         std::to_string(columns_));
    }
    for (std::size_t i = 0; i < row_.size(); ++i) {
        out_ << row_[i] << (i + 1 < row_.size() ? "," : "\n");
    }
    row_.clear();
    out_.flush();
    if (!out_) {
        throw IoError("write to '" + path_.string() + "' failed");
    }
}

}  // namespace coilsketch
