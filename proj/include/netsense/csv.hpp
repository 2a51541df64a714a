#pragma once

#include <istream>
#include <string>
#include <vector>

namespace netsense {

// RFC 4180 row reader: quoted fields, doubled-quote escapes, CRLF or LF line
// ends, optional trailing newline. Returns false at end of input.
bool read_csv_row(std::istream& in, std::vector<std::string>& row);

std::vector<std::vector<std::string>> read_csv(std::istream& in);

} // namespace netsense
