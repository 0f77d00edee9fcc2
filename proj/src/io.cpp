#include "ipm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ipm::io {

namespace fs = std::filesystem;

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw IoError("csv: missing column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < text.size() && text[k + 1] == '"') {
          field.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      // tolerated before \n
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw IoError("csv: unterminated quoted field");
  if (!field.empty() || !record.empty()) end_record();

  CsvTable t;
  if (records.empty()) throw IoError("csv: empty input");
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size())
      throw IoError("csv: row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                    " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

CsvTable read_csv(const fs::path& path) {
  try {
    return parse_csv(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out.push_back(',');
    out += csv_field(fields[k]);
  }
  out.push_back('\n');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

double parse_double(const std::string& s, const char* context) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw IoError(std::string(context) + ": not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const char* context) {
  const std::string t = trim(s);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw IoError(std::string(context) + ": not an integer: '" + s + "'");
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix read_matrix_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  Matrix m(static_cast<Index>(t.rows.size()), static_cast<Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.header.size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = parse_double(t.rows[r][c], path.c_str());
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m, const std::string& prefix) {
  std::string out;
  std::vector<std::string> row;
  for (Index c = 0; c < m.cols(); ++c) row.push_back(prefix + std::to_string(c));
  out += csv_row(row);
  for (Index r = 0; r < m.rows(); ++r) {
    row.clear();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(format_double(m(r, c)));
    out += csv_row(row);
  }
  write_text(path, out);
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
  return fs::path(stem.string() + suffix);
}

void write_instance(const fs::path& stem, const SyntheticInstance& inst, const GenConfig& cfg) {
  write_matrix_csv(with_suffix(stem, ".csv"), inst.X.items(), "x");
  write_matrix_csv(with_suffix(stem, ".ideal.csv"), inst.u_true.coords.transpose(), "u");
  write_matrix_csv(with_suffix(stem, ".metric.csv"), inst.M_true.matrix(), "m");
  std::ostringstream man;
  man << "schema_version=1\n"
      << "seed=" << inst.seed << "\n"
      << "D=" << cfg.D << "\n"
      << "N=" << cfg.N << "\n"
      << "eps_F=" << format_double(cfg.eps_F) << "\n"
      << "eps_S=" << format_double(cfg.eps_S) << "\n"
      << "eps_P=" << format_double(cfg.eps_P) << "\n"
      << "max_rejects=" << cfg.max_rejects << "\n"
      << "identity_metric=" << (cfg.identity_metric ? 1 : 0) << "\n"
      << "rejects=" << inst.rejects << "\n";
  write_text(with_suffix(stem, ".manifest"), man.str());
}

void write_comparisons(const fs::path& path, const ComparisonSet& omega, const Observations& y) {
  if (y.size() != omega.size()) throw IoError("write_comparisons: length mismatch");
  std::string out = "i,j,y\n";
  for (Index k = 0; k < omega.size(); ++k)
    out += std::to_string(omega[k].i) + "," + std::to_string(omega[k].j) + "," +
           (y[k] > 0 ? "1" : "-1") + "\n";
  write_text(path, out);
}

ItemEmbedding read_items(const fs::path& path) { return ItemEmbedding(read_matrix_csv(path)); }

IdealPoint read_ideal(const fs::path& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.rows() != 1) throw IoError(path.string() + ": expected exactly one row");
  return IdealPoint(m.row(0).transpose());
}

MetricMatrix read_metric(const fs::path& path) { return MetricMatrix(read_matrix_csv(path)); }

LabeledComparisons read_comparisons(const fs::path& path, Index item_count) {
  const CsvTable t = read_csv(path);
  const std::size_t ci = t.column("i"), cj = t.column("j"), cy = t.column("y");
  std::vector<IndexPair> pairs;
  Vector y(static_cast<Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    pairs.push_back({static_cast<Index>(parse_int(t.rows[r][ci], "comparison i")),
                     static_cast<Index>(parse_int(t.rows[r][cj], "comparison j"))});
    y(static_cast<Index>(r)) = static_cast<double>(parse_int(t.rows[r][cy], "comparison y"));
  }
  return {ComparisonSet(std::move(pairs), item_count), Observations(std::move(y))};
}

void write_estimate(const fs::path& stem, const ItemEmbedding& x, const Estimate& e) {
  write_matrix_csv(with_suffix(stem, ".metric.csv"), e.M_hat.matrix(), "m");
  write_matrix_csv(with_suffix(stem, ".ideal.csv"), e.u_hat.coords.transpose(), "u");
  const Vector d = all_distances(x, e.u_hat, e.M_hat).values;
  std::string out = "rank,item,distance\n";
  for (std::size_t r = 0; r < e.ranking.size(); ++r)
    out += std::to_string(r) + "," + std::to_string(e.ranking[r]) + "," + format_double(d(e.ranking[r])) + "\n";
  write_text(with_suffix(stem, ".ranking.csv"), out);
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw IoError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw IoError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace ipm::io
