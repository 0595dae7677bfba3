#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace zeta_chaos {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

// Shortest-roundtrip decimal for a double; fixed format so outputs are
// byte-stable across runs and worker counts.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::string& manifest_hash,
              const std::string& header) {
        out_.open(path);
        if (!out_) throw std::ios_base::failure("cannot open " + path.string());
        out_ << "# manifest " << manifest_hash << "\n" << header << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << fmt_double(vals[i]);
        out_ << "\n";
    }
    void raw_row(const std::string& s) { out_ << s << "\n"; }

  private:
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace zeta_chaos
