#include "netsense/csv.hpp"

namespace netsense {

bool read_csv_row(std::istream& in, std::vector<std::string>& row) {
    row.clear();
    int first = in.peek();
    if (first == std::istream::traits_type::eof()) return false;

    std::string field;
    bool quoted = false;
    for (;;) {
        int ci = in.get();
        if (ci == std::istream::traits_type::eof()) {
            row.push_back(field);
            return true;
        }
        char c = static_cast<char>(ci);
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            break;
        case ',':
            row.push_back(field);
            field.clear();
            break;
        case '\r':
            if (in.peek() == '\n') in.get();
            row.push_back(field);
            return true;
        case '\n':
            row.push_back(field);
            return true;
        default:
            field.push_back(c);
        }
    }
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    while (read_csv_row(in, row)) rows.push_back(row);
    return rows;
}

} // namespace netsense
