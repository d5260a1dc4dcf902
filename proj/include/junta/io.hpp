#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "junta/boolfn.hpp"
#include "junta/conjunction.hpp"
#include "junta/localest.hpp"
#include "junta/tester.hpp"

namespace junta {

// Writes through a temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw DataError("cannot write " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw DataError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// truth tables

inline nlohmann::json truth_table_json(const BooleanFunction& f) {
    return {{"n", f.arity()}, {"sign_valued", f.sign_valued()}, {"values", f.values()}};
}

inline BooleanFunction truth_table_from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n").get<int>();
        auto values = j.at("values").get<std::vector<double>>();
        BooleanFunction f(n, std::move(values));
        if (j.contains("sign_valued") && j.at("sign_valued").get<bool>() != f.sign_valued())
            throw DataError("sign_valued flag does not match the values");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed truth table: ") + e.what());
    }
}

// "BFN1", u32 n (little-endian), then one bit per point in index order, bit
// set for -1, least significant bit first.
inline std::string truth_table_bfn1(const BooleanFunction& f) {
    if (!f.sign_valued()) throw DomainError("the packed format holds sign-valued tables only");
    std::string out = "BFN1";
    const auto n = static_cast<std::uint32_t>(f.arity());
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((n >> (8 * b)) & 0xffu));
    std::string bits((f.size() + 7) / 8, '\0');
    for (Point x = 0; x < f.size(); ++x)
        if (f(x) < 0) bits[x / 8] = static_cast<char>(static_cast<unsigned char>(bits[x / 8]) | (1u << (x % 8)));
    return out + bits;
}

inline BooleanFunction truth_table_from_bfn1(const std::string& data) {
    if (data.size() < 8 || data.compare(0, 4, "BFN1") != 0) throw DataError("not a BFN1 table");
    std::uint32_t n = 0;
    for (int b = 0; b < 4; ++b) n |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[4 + b])) << (8 * b);
    if (n > 24) throw DataError("BFN1 arity out of range");
    const std::size_t size = std::size_t{1} << n;
    if (data.size() != 8 + (size + 7) / 8) throw DataError("BFN1 payload has the wrong length");
    std::vector<double> v(size);
    for (std::size_t x = 0; x < size; ++x) v[x] = ((static_cast<unsigned char>(data[8 + x / 8]) >> (x % 8)) & 1u) ? -1.0 : 1.0;
    return BooleanFunction(static_cast<int>(n), std::move(v));
}

// ---------------------------------------------------------------------------
// bundles

inline nlohmann::json bundle_json(const SampleBundle& b) {
    return {{"x", b.x},           {"C", b.C.bits},         {"n", b.n},
            {"r", b.r},           {"rho", b.rho},          {"degree", b.degree},
            {"replicas", b.replicas}, {"seed", b.seed},    {"offsets", b.offsets},
            {"entries", b.entries()}};
}

inline SampleBundle bundle_from_json(const nlohmann::json& j) {
    SampleBundle b;
    try {
        b.x = j.at("x");
        b.C = CoordSet(j.at("C").get<std::uint32_t>());
        b.n = j.at("n");
        b.r = j.at("r");
        b.rho = j.at("rho");
        b.degree = j.at("degree");
        b.replicas = j.at("replicas");
        b.seed = j.at("seed");
        b.offsets = j.at("offsets").get<std::vector<Point>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed bundle: ") + e.what());
    }
    if (j.contains("entries") && j.at("entries").get<std::vector<Point>>() != b.entries())
        throw DataError("bundle entries do not regenerate from the seed");
    return b;
}

// ---------------------------------------------------------------------------
// datasets: CSV "x_bits,label" with x_bits the point bitmask, plus a JSON
// sidecar {"n", "count"}

inline std::string dataset_csv(const LabeledDataset& d) {
    std::string out = "x_bits,label\n";
    for (std::size_t i = 0; i < d.size(); ++i) out += std::to_string(d.x[i]) + "," + std::to_string(d.y[i]) + "\n";
    return out;
}

inline nlohmann::json dataset_sidecar(const LabeledDataset& d) { return {{"n", d.n}, {"count", d.size()}}; }

inline LabeledDataset dataset_from_csv(const std::string& csv, const nlohmann::json& sidecar) {
    LabeledDataset d;
    try {
        d.n = sidecar.at("n");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed dataset sidecar: ") + e.what());
    }
    std::istringstream is(csv);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && line == "x_bits,label") {
            first = false;
            continue;
        }
        first = false;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("dataset row without a comma: " + line);
        try {
            std::size_t used = 0;
            const unsigned long x = std::stoul(line.substr(0, comma), &used);
            if (used != comma) throw DataError("bad point: " + line);
            const int y = std::stoi(line.substr(comma + 1), &used);
            if (used != line.size() - comma - 1) throw DataError("bad label: " + line);
            d.push(static_cast<Point>(x), y);
        } catch (const std::logic_error&) {
            throw DataError("bad dataset row: " + line);
        }
    }
    if (sidecar.contains("count") && sidecar.at("count").get<std::size_t>() != d.size())
        throw DataError("dataset row count differs from the sidecar");
    return d;
}

inline void write_dataset(const std::filesystem::path& csv_path, const LabeledDataset& d) {
    write_file_atomic(csv_path, dataset_csv(d));
    auto side = csv_path;
    side += ".json";
    write_file_atomic(side, dataset_sidecar(d).dump() + "\n");
}

inline LabeledDataset read_dataset(const std::filesystem::path& csv_path) {
    auto side = csv_path;
    side += ".json";
    return dataset_from_csv(read_file(csv_path), nlohmann::json::parse(read_file(side)));
}

// ---------------------------------------------------------------------------
// tester reports

inline nlohmann::json report_json(const TesterReport& r, bool with_candidates = true) {
    nlohmann::json j = {{"gamma", r.gamma},
                        {"dist", r.dist},
                        {"best_set", r.best_set.bits},
                        {"best_set_str", r.best_set.str()},
                        {"query_count", r.query_count},
                        {"spectral_samples", r.spectral_samples},
                        {"aborted", r.aborted},
                        {"caps", r.caps}};
    if (with_candidates) {
        nlohmann::json c = nlohmann::json::array();
        for (const auto& rec : r.candidates)
            c.push_back({{"C", rec.C.bits}, {"I", rec.I.bits}, {"U", rec.U.bits}, {"est", rec.est}, {"passed", rec.passed},
                         {"kind", rec.kind}});
        j["candidates"] = c;
    }
    return j;
}

}  // namespace junta
