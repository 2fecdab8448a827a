#include "patchyrx/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace patchyrx {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_field(const std::string& field, std::size_t line_number) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw std::runtime_error("csv line " + std::to_string(line_number) +
                                 ": invalid number '" + field + "'");
    }
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: value does not fit");
    }
    return std::string(buffer, ptr);
}

std::string csv_to_string(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i > 0) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const std::vector<double>& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::runtime_error("csv_to_string: row width does not match header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    for (const std::string& comment : table.comments) {
        out += "# ";
        out += comment;
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) {
        throw std::runtime_error("write_csv: cannot open " + path.string());
    }
    stream << csv_to_string(table);
    if (!stream) {
        throw std::runtime_error("write_csv: write failed for " + path.string());
    }
}

CsvTable parse_csv_string(const std::string& text) {
    CsvTable table;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_number = 0;
    bool header_seen = false;
    while (std::getline(stream, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            std::size_t begin = 1;
            if (begin < line.size() && line[begin] == ' ') ++begin;
            table.comments.push_back(line.substr(begin));
            continue;
        }
        if (!header_seen) {
            table.header = split_fields(line);
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != table.header.size()) {
            throw std::runtime_error("csv line " + std::to_string(line_number) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& field : fields) {
            row.push_back(parse_field(field, line_number));
        }
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw std::runtime_error("csv line 1: missing header row");
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) {
        throw std::runtime_error("read_csv: cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return parse_csv_string(buffer.str());
}

}  // namespace patchyrx
