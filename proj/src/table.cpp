#include "pulsesync/table.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "pulsesync/errors.hpp"
#include "pulsesync/format.hpp"

namespace pulsesync {

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw ValidationError("row has " + std::to_string(row.size()) + " values for " + std::to_string(columns.size()) +
                          " columns");
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ValidationError("unknown column '" + name + "'");
}

std::vector<double> ResultTable::column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

void ResultTable::validate() const {
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (c.empty() || c.find_first_of(",\"\r\n") != std::string::npos)
      throw ValidationError("invalid column name '" + c + "'");
    if (!seen.insert(c).second) throw ValidationError("duplicate column '" + c + "'");
  }
  for (const auto& r : rows)
    if (r.size() != columns.size()) throw ValidationError("table is not rectangular");
}

void write_csv(const ResultTable& table, std::ostream& out) {
  table.validate();
  if (!table.provenance.empty()) {
    out << '#';
    for (std::size_t i = 0; i < table.provenance.size(); ++i)
      out << (i == 0 ? " " : ",") << table.provenance[i].first << '=' << table.provenance[i].second;
    out << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream os;
  write_csv(table, os);
  return os.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ResultTable read_csv(std::istream& in) {
  ResultTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header && line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      for (const auto& kv : split_fields(body)) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        t.provenance.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      continue;
    }
    const auto fields = split_fields(line);
    if (!header) {
      t.columns = fields;
      header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f));
    t.add_row(std::move(row));
  }
  if (!header) throw ValidationError("CSV has no header row");
  t.validate();
  return t;
}

void write_output(const std::filesystem::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ModelError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw ModelError("failed writing '" + path.string() + "'");
}

}  // namespace pulsesync
