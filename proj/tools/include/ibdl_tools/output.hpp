#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ibdl/grid.hpp"

namespace ibdl::tools {

using Cell = std::variant<long long, double, std::string>;

struct Column {
    std::string name;
    std::string type;  // int | float | string
    std::string description;
};

struct Table {
    std::string name;
    std::string description;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    // Throws std::invalid_argument when the row length differs from the column count.
    void add_row(std::vector<Cell> row);
    std::size_t column(const std::string& name) const;  // throws std::out_of_range
    double number(std::size_t row, const std::string& name) const;
    std::string text(std::size_t row, const std::string& name) const;  // strings come back unquoted
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Doubles print with 12 significant digits, non-finite values as nan/inf.
std::string format_cell(const Cell& c);

// CSV body: header row then one line per row. Strings containing commas or
// quotes are quoted. Metadata lines come first, each prefixed by "# ".
std::string render_csv(const Table& t, const Metadata& meta);
void write_csv(const Table& t, const Metadata& meta, const std::filesystem::path& path);
// JSON sidecar describing the columns.
void write_schema(const Table& t, const std::filesystem::path& path);

// Binary grid snapshot: a 32-byte header then N*N little-endian values in
// row-major order (index j*N + i). Header layout:
//   bytes 0-7   magic "IBDLGRID"
//   bytes 8-11  uint32 N
//   bytes 12-15 uint32 dtype (1 = float64, 2 = uint8)
//   bytes 16-23 float64 box length L
//   bytes 24-31 reserved, zero
// A text sidecar "<file>.txt" repeats the header fields and adds the origin.
constexpr char kSnapshotMagic[8] = {'I', 'B', 'D', 'L', 'G', 'R', 'I', 'D'};
enum class SnapshotType : std::uint32_t { Float64 = 1, UInt8 = 2 };

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, const std::string& label);
void write_snapshot(const std::filesystem::path& path, const PeriodicGrid& grid, const std::vector<unsigned char>& mask,
                    const std::string& label);

struct SnapshotHeader {
    std::uint32_t n = 0;
    SnapshotType type = SnapshotType::Float64;
    double length = 0.0;
};
// Reads the header and payload back (uint8 payloads are widened to double).
std::pair<SnapshotHeader, std::vector<double>> read_snapshot(const std::filesystem::path& path);

}  // namespace ibdl::tools
