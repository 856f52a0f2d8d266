#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rtb::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each padded/truncated to header size

  // Index of a header column, or nullopt when absent.
  std::optional<std::size_t> column(const std::string& name) const;
};

// Parses CSV text: quoted fields, doubled quotes, embedded delimiters and
// newlines, CRLF or LF row endings. First record is the header. Throws
// parse_error on an unterminated quote.
Table parse(const std::string& content, char delimiter = ',');

// Reads and parses a CSV file; io_error when unreadable.
Table read_file(const std::string& path, char delimiter = ',');

// Quotes `field` when it contains the delimiter, a quote, or a newline.
std::string escape_field(const std::string& field, char delimiter = ',');

// Reads an entire file into memory; io_error when unreadable.
std::string slurp_file(const std::string& path);

// Writes `content` to `path` atomically (write to temp, fsync, rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rtb::csv
