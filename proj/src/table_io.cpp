#include "spinlink/table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "spinlink/errors.hpp"

namespace spinlink {

using nlohmann::json;

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const TableCell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json cell_json(const TableCell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

TableCell cell_from_text(const std::string& s) {
  if (s == "inf" || s == "-inf" || s == "nan") return parse_double(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return v;
  return s;
}

std::vector<std::string> split_csv_line(std::istream& in, bool& ok) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  ok = any;
  if (any) fields.push_back(std::move(field));
  return fields;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void Table::add_column(const std::string& name, const TableCell& value) {
  columns.push_back(name);
  for (auto& r : rows) r.push_back(value);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("not a number: '" + s + "'");
  }
  return v;
}

Table to_table(const SweepResult& result) {
  Table t;
  for (const auto& a : result.axes) {
    t.columns.push_back(a.spacing == Spacing::Db ? a.parameter + "_loss_db" : a.parameter);
  }
  t.columns.insert(t.columns.end(), result.columns.begin(), result.columns.end());
  t.columns.push_back("status");
  for (std::size_t c = 0; c < result.cell_count(); ++c) {
    std::vector<TableCell> row;
    const auto idx = result.cell_indices(c);
    for (std::size_t a = 0; a < idx.size(); ++a) row.emplace_back(result.grids[a][idx[a]]);
    for (const auto& col : result.values) row.emplace_back(col[c]);
    row.emplace_back(status_name(result.status[c]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const RateResult& r) {
  Table t;
  t.columns = {"f0",     "p_det",     "p_lost",     "p_e",       "n_max",
               "unbounded", "cap_reached", "p_error", "p_success", "t_failures",
               "t_success", "rate",     "regime"};
  t.rows.push_back({r.f0, r.probs.p_det, r.probs.p_lost, r.probs.p_e, r.limit.n,
                    std::int64_t{r.limit.unbounded}, std::int64_t{r.limit.cap_reached},
                    r.p_error, r.p_success, r.t_failures, r.t_success, r.rate,
                    std::int64_t{static_cast<int>(r.regime)}});
  return t;
}

Table to_table(const FidelityReport& f) {
  Table t;
  t.columns = {"f_avg", "F_1", "F_2", "F_3", "F_4", "herald_probability_H", "fidelity_H",
               "herald_probability_V", "fidelity_V"};
  t.rows.push_back({f.f_avg, f.per_input[0].fidelity, f.per_input[1].fidelity,
                    f.per_input[2].fidelity, f.per_input[3].fidelity,
                    f.per_outcome[0].herald_probability, f.per_outcome[0].fidelity,
                    f.per_outcome[1].herald_probability, f.per_outcome[1].fidelity});
  return t;
}

void write_table(const Table& table, TableFormat format, std::ostream& out,
                 const json& metadata) {
  if (format == TableFormat::Csv) {
    Table t = table;
    if (metadata.is_object() && metadata.contains("config_hash")) {
      t.add_column("config_hash", metadata["config_hash"].get<std::string>());
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      out << (i ? "," : "") << csv_escape(t.columns[i]);
    }
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i]));
      out << '\n';
    }
  } else {
    json doc;
    doc["metadata"] = metadata.is_null() ? json::object() : metadata;
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(cell_json(c));
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
  }
  if (!out) throw IoError("write failed");
}

void write_table(const Table& table, TableFormat format, const std::filesystem::path& path,
                 const json& metadata) {
  auto out = open_output(path);
  try {
    write_table(table, format, out, metadata);
  } catch (const IoError&) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

void write_table(const SweepResult& result, TableFormat format, const std::filesystem::path& path,
                 const json& metadata) {
  write_table(to_table(result), format, path, metadata);
}

void write_table(const RateResult& result, TableFormat format, const std::filesystem::path& path,
                 const json& metadata) {
  write_table(to_table(result), format, path, metadata);
}

void write_table(const FidelityReport& report, TableFormat format,
                 const std::filesystem::path& path, const json& metadata) {
  write_table(to_table(report), format, path, metadata);
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Table t;
  bool ok = false;
  t.columns = split_csv_line(in, ok);
  if (!ok) return t;
  while (true) {
    auto fields = split_csv_line(in, ok);
    if (!ok) break;
    std::vector<TableCell> row;
    for (const auto& f : fields) row.push_back(cell_from_text(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_json_table(const std::filesystem::path& path, json* metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const json doc = json::parse(in);
  if (metadata) *metadata = doc.at("metadata");
  Table t;
  t.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const auto& r : doc.at("rows")) {
    std::vector<TableCell> row;
    for (const auto& c : r) {
      if (c.is_number_integer()) row.emplace_back(c.get<std::int64_t>());
      else if (c.is_number()) row.emplace_back(c.get<double>());
      else if (c.is_string()) {
        const auto s = c.get<std::string>();
        if (s == "nan" || s == "inf" || s == "-inf") row.emplace_back(parse_double(s));
        else row.emplace_back(s);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json run_metadata(const RunConfig& config) {
  return {{"config", config.resolved()},
          {"config_hash", config.hash()},
          {"code_version", kCodeVersion},
          {"seed", config.mc.seed}};
}

}  // namespace spinlink
