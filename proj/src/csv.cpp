#include "sigexec/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sigexec/common.hpp"

namespace sigexec::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string format_cell(double v) {
    // Keep ids, counts and flags free of scientific notation.
    if (std::nearbyint(v) == v && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    return format_double(v);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("cannot open for writing: " + path);
    }
    return out;
}

}  // namespace

void write_table(const std::string& path, const Table& table) {
    auto out = open_out(path);
    for (const auto& c : table.comments) {
        out << "# " << c << "\n";
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw io_error("row width mismatch writing " + path);
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_cell(row[i]);
        }
        out << "\n";
    }
    if (!out) {
        throw io_error("write failed: " + path);
    }
}

void append_comments(const std::string& path,
                     const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw io_error("cannot open for appending: " + path);
    }
    for (const auto& l : lines) {
        out << "# " << l << "\n";
    }
    if (!out) {
        throw io_error("write failed: " + path);
    }
}

const char* class_name(ParticipantClass cls) {
    switch (cls) {
        case ParticipantClass::gib:
            return "GIB";
        case ParticipantClass::ib:
            return "IB";
        case ParticipantClass::hfmm:
            return "HFMM";
        case ParticipantClass::hfpt:
            return "HFPT";
        case ParticipantClass::other:
            return "OTHER";
    }
    throw config_error("unhandled participant class");
}

ParticipantClass class_from_name(const std::string& name) {
    if (name == "GIB") return ParticipantClass::gib;
    if (name == "IB") return ParticipantClass::ib;
    if (name == "HFMM") return ParticipantClass::hfmm;
    if (name == "HFPT") return ParticipantClass::hfpt;
    if (name == "OTHER") return ParticipantClass::other;
    throw config_error("unknown participant class '" + name + "'");
}

namespace {

constexpr const char* kTradeHeader =
    "timestamp,price,signed_qty,best_bid_qty,best_ask_qty,"
    "participant_class,mid_before,mid_after";

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
    throw io_error(path + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& field, const std::string& path,
                    std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        parse_fail(path, line, "not a number: '" + field + "'");
    }
    if (used != field.size()) {
        parse_fail(path, line, "trailing junk in number: '" + field + "'");
    }
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::vector<TradeRecord> read_trades(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open: " + path);
    }
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        parse_fail(path, 1, "empty file; expected header");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kTradeHeader) {
        parse_fail(path, 1,
                   std::string("bad header; expected '") + kTradeHeader + "'");
    }
    std::vector<TradeRecord> trades;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 8) {
            parse_fail(path, line_no,
                       "expected 8 fields, got " + std::to_string(fields.size()));
        }
        TradeRecord t;
        t.timestamp = parse_number(fields[0], path, line_no);
        t.price = parse_number(fields[1], path, line_no);
        t.signed_qty = parse_number(fields[2], path, line_no);
        t.best_bid_qty = parse_number(fields[3], path, line_no);
        t.best_ask_qty = parse_number(fields[4], path, line_no);
        try {
            t.participant = class_from_name(fields[5]);
        } catch (const config_error& e) {
            parse_fail(path, line_no, e.what());
        }
        t.mid_before = parse_number(fields[6], path, line_no);
        t.mid_after = parse_number(fields[7], path, line_no);
        trades.push_back(t);
    }
    return trades;
}

void write_trades(const std::string& path,
                  const std::vector<TradeRecord>& trades) {
    auto out = open_out(path);
    out << kTradeHeader << "\n";
    for (const auto& t : trades) {
        out << format_double(t.timestamp) << ',' << format_double(t.price)
            << ',' << format_double(t.signed_qty) << ','
            << format_double(t.best_bid_qty) << ','
            << format_double(t.best_ask_qty) << ',' << class_name(t.participant)
            << ',' << format_double(t.mid_before) << ','
            << format_double(t.mid_after) << "\n";
    }
    if (!out) {
        throw io_error("write failed: " + path);
    }
}

}  // namespace sigexec::csv
