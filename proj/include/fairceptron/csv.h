#ifndef FAIRCEPTRON_CSV_H_
#define FAIRCEPTRON_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace fairceptron::csv {

using Row = std::vector<std::string>;

// RFC 4180 quoting: fields containing comma, quote, CR or LF are quoted.
std::string EscapeField(std::string_view field);
std::string FormatRow(const Row& row);  // terminated by '\n'

// Parses a whole document. Accepts LF or CRLF endings; a trailing newline
// does not produce an empty row. Throws ValidationError on an unterminated
// quoted field.
std::vector<Row> Parse(std::string_view text);

}  // namespace fairceptron::csv

#endif  // FAIRCEPTRON_CSV_H_
