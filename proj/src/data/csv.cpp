#include "data/csv.hpp"

#include "common/error.hpp"

namespace vdea::data {

std::optional<std::vector<std::string>> CsvReader::next() {
    std::string raw;
    // Accumulate physical lines until quotes balance (quoted fields may
    // contain newlines).
    while (true) {
        std::string piece;
        if (!std::getline(in_, piece)) {
            if (raw.empty()) return std::nullopt;
            throw DataError("csv: unterminated quoted field at line " + std::to_string(line_));
        }
        ++line_;
        if (!piece.empty() && piece.back() == '\r') piece.pop_back();
        raw += raw.empty() ? piece : "\n" + piece;
        std::size_t quotes = 0;
        for (char c : raw)
            if (c == '"') ++quotes;
        if (quotes % 2 == 0) break;
    }
    if (line_ == 1 && raw.size() >= 3 && static_cast<unsigned char>(raw[0]) == 0xEF &&
        static_cast<unsigned char>(raw[1]) == 0xBB && static_cast<unsigned char>(raw[2]) == 0xBF)
        raw.erase(0, 3);

    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < raw.size() && raw[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw DataError("csv: stray quote at line " + std::to_string(line_));
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw DataError("csv: unterminated quoted field at line " + std::to_string(line_));
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace vdea::data
