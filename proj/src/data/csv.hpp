#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace vdea::data {

// RFC-4180-style reader: comma separation, optional double-quoted fields with
// "" escapes, CRLF or LF line endings.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Next record, or nullopt at end of input. Throws DataError with the line
    // number on malformed input.
    std::optional<std::vector<std::string>> next();

    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

}  // namespace vdea::data
