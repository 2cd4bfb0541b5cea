#include "spinjj/cli/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace spinjj::cli {

void Metadata::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

void Metadata::add(std::string key, double value) { add(std::move(key), format_param(value)); }

void Metadata::add_params(const SystemParams& p) {
  if (p.is_symmetric()) {
    add("eps", p.eps_left);
    add("lambda_s", p.lambda_s_left);
    add("lambda_a", p.lambda_a_left);
  }
  add("j", p.j);
  add("eps_left", p.eps_left);
  add("eps_right", p.eps_right);
  add("lambda_s_left", p.lambda_s_left);
  add("lambda_s_right", p.lambda_s_right);
  add("lambda_a_left", p.lambda_a_left);
  add("lambda_a_right", p.lambda_a_right);
}

void Metadata::add_integrator(const IntegratorConfig& cfg) {
  add("rtol", cfg.rtol);
  add("atol", cfg.atol);
  add("dt_init", cfg.dt_init);
  add("dt_min", cfg.dt_min);
  add("t_max", cfg.t_max);
  add("sample_dt", cfg.sample_dt);
}

std::optional<std::string> Metadata::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "jsonl") return Format::Jsonl;
  return std::nullopt;
}

std::string_view extension(Format f) { return f == Format::Csv ? ".csv" : ".jsonl"; }

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_param(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void write_csv(std::ostream& os, const Table& table, const Metadata& meta) {
  for (const auto& [k, v] : meta.entries()) os << "# " << k << '=' << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      if (const double* d = std::get_if<double>(&row[c])) {
        os << format_value(*d);
      } else {
        // Status strings are free text; quote them.
        os << '"';
        for (char ch : std::get<std::string>(row[c])) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      }
    }
    os << '\n';
  }
}

void write_jsonl(std::ostream& os, const Table& table, const Metadata& meta) {
  nlohmann::ordered_json header = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta.entries()) header[k] = v;
  os << nlohmann::ordered_json{{"header", header}}.dump() << '\n';
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit([&](const auto& v) { obj[table.columns[c]] = v; }, row[c]);
    }
    os << obj.dump() << '\n';
  }
}

}  // namespace

void write_table(std::ostream& os, const Table& table, const Metadata& meta, Format format) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::logic_error("table row width does not match columns");
  }
  if (format == Format::Csv) {
    write_csv(os, table, meta);
  } else {
    write_jsonl(os, table, meta);
  }
}

void write_table_file(const std::filesystem::path& path, const Table& table, const Metadata& meta,
                      Format format) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_table(os, table, meta, format);
  if (!os) throw IoError("write to " + path.string() + " failed");
}

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {
      "t",           "xi_plus_re",  "xi_plus_im",  "xi_zero_re",  "xi_zero_im",   "xi_minus_re",
      "xi_minus_im", "eta_plus_re", "eta_plus_im", "eta_zero_re", "eta_zero_im",  "eta_minus_re",
      "eta_minus_im", "M_left",     "M_right",     "n0_left",     "R_plus",       "R_minus",
      "I_plus",      "I_minus",     "R0",          "I0",          "theta",        "energy",
      "total_norm",  "total_Fz"};
  return cols;
}

Table trajectory_table(const Trajectory& traj) {
  Table t;
  t.columns = trajectory_columns();
  t.rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::vector<Cell> row;
    row.reserve(t.columns.size());
    row.emplace_back(traj.times[i]);
    for (const Spinor* f : {&traj.states[i].left, &traj.states[i].right}) {
      for (std::size_t c = 0; c < 3; ++c) {
        row.emplace_back((*f)[c].real());
        row.emplace_back((*f)[c].imag());
      }
    }
    const Observables& l = traj.observables_left[i];
    row.emplace_back(l.m);
    row.emplace_back(traj.observables_right[i].m);
    row.emplace_back(l.n0);
    row.emplace_back(l.r_plus);
    row.emplace_back(l.r_minus);
    row.emplace_back(l.i_plus);
    row.emplace_back(l.i_minus);
    row.emplace_back(l.r0);
    row.emplace_back(l.i0);
    row.emplace_back(l.theta);
    row.emplace_back(traj.energy[i]);
    row.emplace_back(traj.total_norm[i]);
    row.emplace_back(traj.total_magnetization[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

LoadedTrajectory read_trajectory_csv(std::istream& is) {
  LoadedTrajectory out;
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind('#', 0) == 0) {
      const std::string body = line.substr(line.find_first_not_of("# ") == std::string::npos
                                               ? line.size()
                                               : line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) out.meta.add(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    header = split(line, ',');
    break;
  }
  if (header.empty()) throw std::invalid_argument("trajectory CSV has no column header");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
  std::vector<std::size_t> amp_cols;
  for (std::size_t c = 0; c < 13; ++c) {
    const std::string& name = trajectory_columns()[c];
    const auto it = index.find(name);
    if (it == index.end()) throw std::invalid_argument("trajectory CSV lacks column '" + name + "'");
    amp_cols.push_back(it->second);
  }

  SystemParams& p = out.traj.params;
  const std::pair<const char*, double*> keys[] = {
      {"eps_left", &p.eps_left},           {"eps_right", &p.eps_right},
      {"lambda_s_left", &p.lambda_s_left}, {"lambda_s_right", &p.lambda_s_right},
      {"lambda_a_left", &p.lambda_a_left}, {"lambda_a_right", &p.lambda_a_right},
      {"j", &p.j}};
  for (const auto& [key, dst] : keys) {
    if (const auto v = out.meta.find(key)) *dst = parse_double(*v, 0);
  }
  p.validate();

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    std::array<double, 13> v{};
    for (std::size_t c = 0; c < 13; ++c) v[c] = parse_double(cells[amp_cols[c]], line_no);
    SpinorPair s;
    for (std::size_t c = 0; c < 3; ++c) {
      s.left[c] = {v[1 + 2 * c], v[2 + 2 * c]};
      s.right[c] = {v[7 + 2 * c], v[8 + 2 * c]};
    }
    out.traj.push_back(v[0], s);
  }
  if (out.traj.size() > 1) out.traj.sample_dt = out.traj.times[1] - out.traj.times[0];
  if (const auto v = out.meta.find("sample_dt")) out.traj.sample_dt = parse_double(*v, 0);
  return out;
}

LoadedTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_trajectory_csv(is);
}

}  // namespace spinjj::cli
