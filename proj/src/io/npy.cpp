#include "coilsketch/io/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace coilsketch {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";

std::string shape_tuple(const std::vector<Index>& shape)
{
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        s += std::to_string(shape[i]);
        if (shape.size() == 1 || i + 1 < shape.size()) {
            s += ",";
        }
        if (i + 1 < shape.size()) {
            s += " ";
        }
    }
    return s + ")";
}

Index product(const std::vector<Index>& shape)
{
    Index n = 1;
    for (Index d : shape) {
        n *= d;
    }
    return n;
}

}  // namespace

Index NpyArray::count() const { return product(shape); }

Vec NpyArray::to_complex() const
{
    if (!is_complex) {
        throw IoError("expected a complex128 array");
    }
    Vec v(count());
    std::memcpy(static_cast<void*>(v.data()), data.data(), data.size() * sizeof(double));
    return v;
}

RVec NpyArray::to_real() const
{
    if (is_complex) {
        throw IoError("expected a float64 array");
    }
    return Eigen::Map<const RVec>(data.data(), count());
}

RMat NpyArray::to_real_matrix() const
{
    if (is_complex || shape.size() != 2) {
        throw IoError("expected a 2-d float64 array");
    }
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    return Eigen::Map<const RowMajor>(data.data(), shape[0], shape[1]);
}

NpyArray NpyArray::complex_array(const Vec& v, std::vector<Index> shape)
{
    if (product(shape) != v.size()) {
        throw ShapeError("array shape does not match the vector length");
    }
    NpyArray a{std::move(shape), true, std::vector<double>(2 * static_cast<std::size_t>(v.size()))};
    std::memcpy(a.data.data(), static_cast<const void*>(v.data()), a.data.size() * sizeof(double));
    return a;
}

NpyArray NpyArray::real_array(const RVec& v, std::vector<Index> shape)
{
    if (product(shape) != v.size()) {
        throw ShapeError("array shape does not match the vector length");
    }
    return {std::move(shape), false, std::vector<double>(v.data(), v.data() + v.size())};
}

NpyArray NpyArray::real_matrix(const RMat& m)
{
    NpyArray a{{m.rows(), m.cols()}, false, std::vector<double>(static_cast<std::size_t>(m.size()))};
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            a.data[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
        }
    }
    return a;
}

NpyArray NpyArray::coil_stack(const CMat& m, const GridShape& shape)
{
    if (m.rows() != shape.size()) {
        throw ShapeError("coil matrix rows do not match the grid");
    }
    std::vector<Index> dims{m.cols()};
    dims.insert(dims.end(), shape.dims().begin(), shape.dims().end());
    // Column-major storage already places each coil contiguously.
    return complex_array(Eigen::Map<const Vec>(m.data(), m.size()), std::move(dims));
}

CMat coil_columns(const NpyArray& arr, Index voxels)
{
    const Vec flat = arr.to_complex();
    if (arr.shape.empty() || voxels <= 0 || flat.size() != arr.shape[0] * voxels) {
        throw IoError("coil array does not hold " + std::to_string(voxels) + " voxels per coil");
    }
    return Eigen::Map<const CMat>(flat.data(), voxels, arr.shape[0]);
}

void write_npy(const std::filesystem::path& path, const NpyArray& arr)
{
    if (static_cast<Index>(arr.data.size()) != arr.count() * (arr.is_complex ? 2 : 1)) {
        throw ShapeError("NPY payload does not match its shape");
    }
    std::string header = std::string("{'descr': '") + (arr.is_complex ? "<c16" : "<f8") +
                         "', 'fortran_order': False, 'shape': " + shape_tuple(arr.shape) + ", }";
    // magic(6) + version(2) + length(2) + header + '\n' is padded to 64 bytes.
    const std::size_t unpadded = 10 + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header.push_back('\n');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(kMagic, 6);
    const char version[2] = {1, 0};
    out.write(version, 2);
    const auto len = static_cast<std::uint16_t>(header.size());
    const char len_bytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
    out.write(len_bytes, 2);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(arr.data.data()),
              static_cast<std::streamsize>(arr.data.size() * sizeof(double)));
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

NpyArray read_npy(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    char pre[10];
    if (!in.read(pre, 10) || std::memcmp(pre, kMagic, 6) != 0) {
        throw IoError("'" + path.string() + "' is not an NPY file");
    }
    if (pre[6] != 1 || pre[7] != 0) {
        throw IoError("unsupported NPY version in '" + path.string() + "'");
    }
    const std::size_t len = static_cast<unsigned char>(pre[8]) |
                            (static_cast<std::size_t>(static_cast<unsigned char>(pre[9])) << 8);
    std::string header(len, '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(len))) {
        throw IoError("truncated NPY header in '" + path.string() + "'");
    }

    std::smatch m;
    NpyArray arr;
    if (!std::regex_search(header, m, std::regex(R"('descr'\s*:\s*'([^']*)')"))) {
        throw IoError("NPY header lacks descr");
    }
    if (m[1] == "<c16") {
        arr.is_complex = true;
    } else if (m[1] != "<f8") {
        throw IoError("unsupported NPY dtype " + m[1].str());
    }
    if (!std::regex_search(header, m, std::regex(R"('fortran_order'\s*:\s*(True|False))")) ||
        m[1] == "True") {
        throw IoError("only C-order NPY arrays are supported");
    }
    if (!std::regex_search(header, m, std::regex(R"('shape'\s*:\s*\(([^)]*)\))"))) {
        throw IoError("NPY header lacks shape");
    }
    std::stringstream dims(m[1].str());
    std::string tok;
    while (std::getline(dims, tok, ',')) {
        if (tok.find_first_not_of(" ") == std::string::npos) {
            continue;
        }
        arr.shape.push_back(std::stoll(tok));
    }

    arr.data.resize(static_cast<std::size_t>(arr.count() * (arr.is_complex ? 2 : 1)));
    if (!in.read(reinterpret_cast<char*>(arr.data.data()),
                 static_cast<std::streamsize>(arr.data.size() * sizeof(double)))) {
        throw IoError("truncated NPY payload in '" + path.string() + "'");
    }
    return arr;
}

}  // namespace coilsketch
