#include "dfclrr/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace dfclrr {

namespace {

constexpr char kMagic[4] = {'D', 'F', 'C', 'M'};

static_assert(std::endian::native == std::endian::little,
              "DFCM I/O assumes a little-endian host");

void check_finite_or_throw(const Matrix& a, const std::string& path) {
    if (!all_finite(a))
        throw io_error(path + ": non-finite value in matrix payload");
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Matrix read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double val;
            try {
                val = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw io_error(path + ": unparsable cell '" + cell + "'");
            }
            row.push_back(val);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw io_error(path + ": ragged CSV rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw io_error(path + ": empty CSV");
    Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    check_finite_or_throw(a, path);
    return a;
}

void write_csv(const std::string& path, const Matrix& a) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out.precision(17);
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (j) out << ',';
            out << a(i, j);
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

Matrix read_dfcm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw io_error(path + ": bad DFCM magic");
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    if (!in || rows == 0 || cols == 0)
        throw io_error(path + ": bad DFCM header");
    if (rows * cols > (1ull << 31))
        throw io_error(path + ": DFCM payload implausibly large");
    Matrix a(static_cast<Index>(rows), static_cast<Index>(cols));
    // Eigen's default storage is column-major, matching the format.
    in.read(reinterpret_cast<char*>(a.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (!in) throw io_error(path + ": truncated DFCM payload");
    check_finite_or_throw(a, path);
    return a;
}

void write_dfcm(const std::string& path, const Matrix& a) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out.write(kMagic, 4);
    const std::uint64_t rows = static_cast<std::uint64_t>(a.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(a.cols());
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    out.write(reinterpret_cast<const char*>(a.data()),
              static_cast<std::streamsize>(a.size() * static_cast<Index>(sizeof(double))));
    if (!out) throw io_error("write failed: " + path);
}

Matrix read_matrix(const std::string& path) {
    return ends_with(path, ".csv") ? read_csv(path) : read_dfcm(path);
}

void write_matrix(const std::string& path, const Matrix& a) {
    if (ends_with(path, ".csv"))
        write_csv(path, a);
    else
        write_dfcm(path, a);
}

}  // namespace dfclrr
