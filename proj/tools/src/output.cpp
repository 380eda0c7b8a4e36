#include "ibdl_tools/output.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ibdl::tools {

static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("table '" + name + "': row has " + std::to_string(row.size()) +
                                    " cells, expected " + std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& col) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == col) return i;
    throw std::out_of_range("table '" + name + "' has no column '" + col + "'");
}

double Table::number(std::size_t row, const std::string& col) const {
    const Cell& c = rows.at(row).at(column(col));
    if (auto* d = std::get_if<double>(&c)) return *d;
    if (auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw std::invalid_argument("column '" + col + "' is not numeric");
}

std::string Table::text(std::size_t row, const std::string& col) const {
    const Cell& c = rows.at(row).at(column(col));
    if (auto* s = std::get_if<std::string>(&c)) return *s;
    return format_cell(c);
}

std::string format_cell(const Cell& c) {
    if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&c)) {
        if (std::isnan(*d)) return "nan";
        if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", *d);
        return buf;
    }
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch == '\n' ? ' ' : ch;
    }
    return q + "\"";
}

std::string render_csv(const Table& t, const Metadata& meta) {
    std::ostringstream out;
    for (const auto& [k, v] : meta) out << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i].name;
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
        out << "\n";
    }
    return out.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_grid(const std::filesystem::path& path, const PeriodicGrid& g, SnapshotType type, const void* data,
                std::size_t bytes, const std::string& label) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    unsigned char header[32] = {};
    std::memcpy(header, kSnapshotMagic, 8);
    const auto n = static_cast<std::uint32_t>(g.n());
    const auto code = static_cast<std::uint32_t>(type);
    const double length = g.length();
    std::memcpy(header + 8, &n, 4);
    std::memcpy(header + 12, &code, 4);
    std::memcpy(header + 16, &length, 8);
    out.write(reinterpret_cast<const char*>(header), 32);
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw std::runtime_error("failed writing " + path.string());

    std::ostringstream side;
    char buf[64];
    side << "label: " << label << "\n";
    side << "n: " << g.n() << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", g.length());
    side << "length: " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g %.17g", g.origin().x, g.origin().y);
    side << "origin: " << buf << "\n";
    side << "dtype: " << (type == SnapshotType::Float64 ? "float64" : "uint8") << "\n";
    side << "layout: row-major, value (i, j) at index j*n + i, node (origin.x + i*h, origin.y + j*h)\n";
    side << "header_bytes: 32\n";
    write_text(path.string() + ".txt", side.str());
}

}  // namespace

void write_csv(const Table& t, const Metadata& meta, const std::filesystem::path& path) {
    write_text(path, render_csv(t, meta));
}

void write_schema(const Table& t, const std::filesystem::path& path) {
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"type", c.type}, {"description", c.description}});
    nlohmann::ordered_json doc{{"table", t.name}, {"description", t.description}, {"columns", cols}};
    write_text(path, doc.dump(2) + "\n");
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, const std::string& label) {
    write_grid(path, field.grid, SnapshotType::Float64, field.values.data(), field.values.size() * sizeof(double),
               label);
}

void write_snapshot(const std::filesystem::path& path, const PeriodicGrid& grid, const std::vector<unsigned char>& mask,
                    const std::string& label) {
    if (mask.size() != grid.size()) throw std::invalid_argument("mask does not match grid");
    write_grid(path, grid, SnapshotType::UInt8, mask.data(), mask.size(), label);
}

std::pair<SnapshotHeader, std::vector<double>> read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    unsigned char header[32];
    if (!in.read(reinterpret_cast<char*>(header), 32)) throw std::runtime_error("truncated snapshot header");
    if (std::memcmp(header, kSnapshotMagic, 8) != 0) throw std::runtime_error("not a grid snapshot");
    SnapshotHeader h;
    std::uint32_t code = 0;
    std::memcpy(&h.n, header + 8, 4);
    std::memcpy(&code, header + 12, 4);
    std::memcpy(&h.length, header + 16, 8);
    if (code != 1 && code != 2) throw std::runtime_error("unknown snapshot dtype");
    h.type = static_cast<SnapshotType>(code);
    const std::size_t count = static_cast<std::size_t>(h.n) * h.n;
    std::vector<double> values(count);
    if (h.type == SnapshotType::Float64) {
        if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * 8)))
            throw std::runtime_error("truncated snapshot payload");
    } else {
        std::vector<unsigned char> raw(count);
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count)))
            throw std::runtime_error("truncated snapshot payload");
        for (std::size_t k = 0; k < count; ++k) values[k] = raw[k];
    }
    return {h, std::move(values)};
}

}  // namespace ibdl::tools
