#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "endstyle/errors.hpp"

namespace endstyle {

// RFC 4180 CSV: quoted fields may contain commas, doubled quotes and
// newlines; records end at a bare LF or CRLF. Input must be valid UTF-8.

namespace detail {

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c >> 5) == 0x6) {
      extra = 1;
    } else if ((c >> 4) == 0xe) {
      extra = 2;
    } else if ((c >> 3) == 0x1e) {
      extra = 3;
    } else {
      return false;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= s.size()) return false;
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

}  // namespace detail

// Parses full CSV text into records. Throws MalformedRowError on broken
// quoting or invalid UTF-8, naming the record where it happened.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (!detail::valid_utf8(text)) {
    throw MalformedRowError("CSV input is not valid UTF-8");
  }
  // Strip a UTF-8 BOM if present.
  if (text.size() >= 3 && text.substr(0, 3) == "\xef\xbb\xbf") {
    text.remove_prefix(3);
  }

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t record_no = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    ++record_no;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        throw MalformedRowError("stray quote in record " +
                                std::to_string(record_no));
      }
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else {
      if (field_was_quoted) {
        throw MalformedRowError("garbage after closing quote in record " +
                                std::to_string(record_no));
      }
      field += c;
    }
    ++i;
  }
  if (in_quotes) {
    throw MalformedRowError("unterminated quote in record " +
                            std::to_string(record_no));
  }
  // Final record without trailing newline.
  if (!field.empty() || field_was_quoted || !record.empty()) {
    end_record();
  }
  return records;
}

inline std::vector<std::vector<std::string>> read_csv(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failure on " + path);
  }
  return parse_csv(buf.str());
}

}  // namespace endstyle
