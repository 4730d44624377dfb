#include "acl/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace acl {

namespace {

// Splits one CSV record. Quoted fields may contain commas and doubled
// quotes; multi-line quoted fields are not needed for numeric tables.
std::vector<std::string> split_record(const std::string& line, long line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty()) throw CsvError("unexpected quote inside unquoted field", line_no);
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw CsvError("unterminated quoted field", line_no);
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, long line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw CsvError("not a number: '" + s + "'", line_no);
    }
    while (used < s.size() && (s[used] == ' ' || s[used] == '\r')) ++used;
    if (used != s.size()) throw CsvError("not a number: '" + s + "'", line_no);
    return v;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    CsvTable table;
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw CsvError("missing header row", 1);
    ++line_no;
    table.header = split_record(strip_cr(line), line_no);
    if (table.header.empty()) throw CsvError("empty header row", line_no);

    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_record(line, line_no);
        if (fields.size() != table.header.size())
            throw CsvError("expected " + std::to_string(table.header.size()) + " fields, got " +
                               std::to_string(fields.size()),
                           line_no);
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) row[i] = parse_double(fields[i], line_no);
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw CsvError("no data rows", line_no);
    return table;
}

Eigen::MatrixXd to_matrix(const CsvTable& table) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t j = 0; j < table.header.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][j];
    return m;
}

Eigen::VectorXd column_by_name(const CsvTable& table, const std::string& name) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == name) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(table.rows.size()));
            for (std::size_t i = 0; i < table.rows.size(); ++i) v[static_cast<Eigen::Index>(i)] = table.rows[i][j];
            return v;
        }
    }
    throw CsvError("no column named '" + name + "'", 1);
}

Eigen::MatrixXd drop_column(const CsvTable& table, const std::string& name) {
    Eigen::Index keep = -1;
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (table.header[j] == name) keep = static_cast<Eigen::Index>(j);
    if (keep < 0) throw CsvError("no column named '" + name + "'", 1);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(table.header.size()) - 1);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < table.header.size(); ++j) {
            if (static_cast<Eigen::Index>(j) == keep) continue;
            m(static_cast<Eigen::Index>(i), col++) = table.rows[i][j];
        }
    }
    return m;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        out << header[j];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& column_ids) {
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            rows[static_cast<std::size_t>(i)].push_back(format_double(m(i, j)));
    }
    write_csv(path, column_ids, rows);
}

void write_vector_csv(const std::string& path, const Eigen::VectorXd& v, const std::string& name) {
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) rows[static_cast<std::size_t>(i)] = {format_double(v[i])};
    write_csv(path, {name}, rows);
}

PartitionCsv read_partition_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw CsvError("missing header row", 1);
    ++line_no;
    PartitionCsv out;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_record(line, line_no);
        if (fields.size() < 2) throw CsvError("expected column_id,cluster_id", line_no);
        out.column_ids.push_back(fields[0]);
        out.cluster_ids.push_back(static_cast<int>(parse_double(fields[1], line_no)));
    }
    if (out.column_ids.empty()) throw CsvError("no data rows", line_no);
    return out;
}

} // namespace acl
