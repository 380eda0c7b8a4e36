#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "ibdl_tools/output.hpp"

using namespace ibdl::tools;
namespace fs = std::filesystem;

namespace {

Table sample_table() {
    Table t;
    t.name = "demo";
    t.description = "a small table";
    t.columns = {{"n", "int", "size"}, {"err", "float", "error"}, {"label", "string", "tag"}};
    t.add_row({64LL, 0.125, std::string("plain")});
    t.add_row({128LL, std::numeric_limits<double>::quiet_NaN(), std::string("has, comma")});
    return t;
}

fs::path scratch(const std::string& leaf) {
    const fs::path d = fs::temp_directory_path() / "ibdl_output_test";
    fs::create_directories(d);
    return d / leaf;
}

}  // namespace

TEST_CASE("cell formatting", "[output]") {
    CHECK(format_cell(Cell{42LL}) == "42");
    CHECK(format_cell(Cell{0.1}) == "0.1");
    CHECK(format_cell(Cell{1.0 / 3.0}) == "0.333333333333");
    CHECK(format_cell(Cell{std::numeric_limits<double>::quiet_NaN()}) == "nan");
    CHECK(format_cell(Cell{-std::numeric_limits<double>::infinity()}) == "-inf");
    CHECK(format_cell(Cell{std::string("x")}) == "x");
}

TEST_CASE("tables check their row lengths", "[output]") {
    Table t = sample_table();
    CHECK_THROWS_AS(t.add_row({1LL}), std::invalid_argument);
    CHECK(t.column("err") == 1);
    CHECK_THROWS_AS(t.column("nope"), std::out_of_range);
    CHECK(t.number(0, "n") == 64.0);
    CHECK(t.number(0, "err") == 0.125);
    CHECK(std::isnan(t.number(1, "err")));
    CHECK(t.text(1, "label") == "has, comma");
}

TEST_CASE("CSV rendering", "[output]") {
    const std::string csv = render_csv(sample_table(), {{"run", "demo"}, {"config_hash", "abc"}});
    CHECK(csv == "# run: demo\n# config_hash: abc\nn,err,label\n64,0.125,plain\n128,nan,\"has, comma\"\n");

    const fs::path path = scratch("demo.csv");
    write_csv(sample_table(), {}, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,err,label");

    const fs::path schema = scratch("demo.schema.json");
    write_schema(sample_table(), schema);
    const auto doc = nlohmann::json::parse(std::ifstream(schema));
    CHECK(doc["table"] == "demo");
    REQUIRE(doc["columns"].size() == 3);
    CHECK(doc["columns"][1]["type"] == "float");
}

TEST_CASE("binary snapshots round trip", "[output]") {
    const ibdl::PeriodicGrid g(8, 2.5);
    ibdl::ScalarField f(g);
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = 0.5 * static_cast<double>(k) - 3.0;
    const fs::path path = scratch("field.bin");
    write_snapshot(path, f, "test field");
    CHECK(fs::file_size(path) == 32 + 64 * sizeof(double));
    {
        std::ifstream raw(path, std::ios::binary);
        char magic[8];
        raw.read(magic, 8);
        CHECK(std::string(magic, 8) == "IBDLGRID");
    }
    const auto [hdr, values] = read_snapshot(path);
    CHECK(hdr.n == 8);
    CHECK(hdr.type == SnapshotType::Float64);
    CHECK(hdr.length == 2.5);
    CHECK(values == f.values);
    CHECK(fs::exists(path.string() + ".txt"));

    std::vector<unsigned char> mask(g.size(), 0);
    mask[3] = 1;
    const fs::path mpath = scratch("mask.bin");
    write_snapshot(mpath, g, mask, "mask");
    CHECK(fs::file_size(mpath) == 32 + 64);
    const auto [mh, mv] = read_snapshot(mpath);
    CHECK(mh.type == SnapshotType::UInt8);
    CHECK(mv[3] == 1.0);
    CHECK(mv[4] == 0.0);

    std::ofstream(scratch("junk.bin"), std::ios::binary) << "not a snapshot at all, not even close....";
    CHECK_THROWS(read_snapshot(scratch("junk.bin")));
    fs::remove_all(scratch("").parent_path());
}
