#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace qsweep {

// CSV writer: LF line endings, '#'-prefixed metadata lines before the header,
// doubles printed with 17 significant digits so they round-trip exactly.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);
    void close();

    static std::string format_double(double v);

private:
    std::ofstream out_;
    std::string path_;
};

std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t v);

// Data section of a CSV = every line not starting with '#'.
std::string read_data_section(const std::string& path);

} // namespace qsweep
