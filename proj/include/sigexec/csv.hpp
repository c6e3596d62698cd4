#pragma once

// Deterministic file I/O shared by the command-line tool and the tests.
// Every double is rendered with "%.17g" so a value survives a write/read
// round trip bit-exactly and repeated runs produce byte-identical files.

#include <string>
#include <vector>

#include "sigexec/estimation.hpp"

namespace sigexec::csv {

// Shortest-safe rendering of a double ("%.17g").
std::string format_double(double v);

// A rectangular numeric table plus leading "# " comment lines. Integer-valued
// cells print without a decimal point, so ids and flags stay readable.
struct Table {
    std::vector<std::string> comments;  // written as "# <line>"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // each row matches columns.size()
};

// Writes comments, the header row, then the data. Throws io_error when the
// file cannot be created or a row width disagrees with the header.
void write_table(const std::string& path, const Table& table);

// Appends "# <line>" comment lines to an existing file (gap reports and the
// like). Throws io_error when the file cannot be opened.
void append_comments(const std::string& path,
                     const std::vector<std::string>& lines);

// Uppercase tape names for participant classes ("GIB", "IB", ...).
const char* class_name(ParticipantClass cls);

// Inverse of class_name; throws config_error on an unknown name.
ParticipantClass class_from_name(const std::string& name);

// Reads a trade tape. The header row must list exactly
//   timestamp,price,signed_qty,best_bid_qty,best_ask_qty,
//   participant_class,mid_before,mid_after
// in that order. Any structural problem (missing file, wrong header, bad
// field, wrong column count) throws io_error naming the 1-based line.
std::vector<TradeRecord> read_trades(const std::string& path);

// Writes a tape in the exact format read_trades expects.
void write_trades(const std::string& path,
                  const std::vector<TradeRecord>& trades);

}  // namespace sigexec::csv
