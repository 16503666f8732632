#include "jointgraph/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "jointgraph/errors.hpp"

namespace jointgraph::io {

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fingerprint(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json grid_to_json(const GridInfo& grid) {
  return json{{"t_start", grid.t_start}, {"t_end", grid.t_end}, {"nu", grid.nu}};
}

GridInfo grid_from_json(const json& j) {
  GridInfo g;
  g.t_start = j.at("t_start").get<double>();
  g.t_end = j.at("t_end").get<double>();
  g.nu = j.at("nu").get<int>();
  if (g.nu < 2 || !(g.t_end > g.t_start)) throw ConfigError("invalid grid metadata");
  return g;
}

std::string curves_to_csv(const std::vector<CurvePanel>& panels) {
  std::string out = "group,subject,variable,time_index,value\n";
  for (const auto& panel : panels) {
    for (int i = 0; i < panel.n(); ++i)
      for (int j = 0; j < panel.p(); ++j)
        for (int q = 0; q < panel.nu(); ++q) {
          out += panel.group_id;
          out += ',' + std::to_string(i + 1) + ',' + std::to_string(j + 1) + ',' +
                 std::to_string(q + 1) + ',' + format_double(panel.values[j](i, q)) + '\n';
        }
  }
  return out;
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

int parse_int(std::string_view s, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s, std::size_t line_no) {
  // from_chars for double is missing on some standard libraries.
  const std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw InputError("line " + std::to_string(line_no) + ": bad number '" + copy + "'");
  }
  return v;
}

struct Cell {
  int subject, variable, time;
  double value;
};

}  // namespace

std::vector<CurvePanel> curves_from_csv(const std::string& text, const GridInfo& grid) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InputError("empty curve file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "group,subject,variable,time_index,value") {
    throw InputError("curve file header must be group,subject,variable,time_index,value");
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<Cell>> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw InputError("line " + std::to_string(line_no) + ": expected 5 fields");
    const std::string group(f[0]);
    if (!cells.count(group)) order.push_back(group);
    cells[group].push_back({parse_int(f[1], line_no), parse_int(f[2], line_no),
                            parse_int(f[3], line_no), parse_double(f[4], line_no)});
  }

  std::vector<CurvePanel> panels;
  for (const auto& group : order) {
    const auto& cs = cells[group];
    int n = 0, p = 0;
    for (const auto& c : cs) {
      if (c.subject < 1 || c.variable < 1 || c.time < 1 || c.time > grid.nu) {
        throw InputError("group " + group + ": index out of range");
      }
      n = std::max(n, c.subject);
      p = std::max(p, c.variable);
    }
    const std::size_t expected = static_cast<std::size_t>(n) * p * grid.nu;
    if (cs.size() != expected) {
      throw InputError("group " + group + ": expected " + std::to_string(expected) +
                       " values, found " + std::to_string(cs.size()));
    }
    CurvePanel panel;
    panel.group_id = group;
    panel.t_start = grid.t_start;
    panel.t_end = grid.t_end;
    panel.values.assign(p, Eigen::MatrixXd::Constant(n, grid.nu, std::nan("")));
    for (const auto& c : cs) {
      double& slot = panel.values[c.variable - 1](c.subject - 1, c.time - 1);
      if (!std::isnan(slot)) throw InputError("group " + group + ": duplicate cell");
      slot = c.value;
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

json matrix_to_json(const BlockMatrix& a) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(a.dim()) * a.dim());
  for (Eigen::Index r = 0; r < a.dim(); ++r)
    for (Eigen::Index c = 0; c < a.dim(); ++c) flat.push_back(a.data()(r, c));
  return json{{"p", a.p()}, {"M", a.block_size()}, {"data", flat}};
}

BlockMatrix matrix_from_json(const json& j) {
  const int p = j.at("p").get<int>();
  const int m = j.at("M").get<int>();
  const auto flat = j.at("data").get<std::vector<double>>();
  const Eigen::Index d = static_cast<Eigen::Index>(p) * m;
  if (static_cast<Eigen::Index>(flat.size()) != d * d) throw InputError("matrix data has the wrong length");
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) a(r, c) = flat[static_cast<std::size_t>(r * d + c)];
  return BlockMatrix(std::move(a), p, m);
}

json edges_to_json(const EdgeSet& edges) {
  json out = json::array();
  for (const auto& [j, l] : edges) out.push_back({j, l});
  return out;
}

EdgeSet edges_from_json(const json& j) {
  EdgeSet out;
  for (const auto& e : j) {
    const int a = e.at(0).get<int>();
    const int b = e.at(1).get<int>();
    if (a == b) throw InputError("self-loop in edge list");
    out.insert(make_edge(a, b));
  }
  return out;
}

json sim_config_to_json(const SimConfig& c) {
  return json{{"p", c.p},           {"n", c.n},         {"K", c.K},
              {"M", c.M},           {"nu", c.nu},       {"s", c.s},
              {"rho", c.rho},       {"sigma2", c.sigma2}, {"t_start", c.t_start},
              {"t_end", c.t_end},   {"basis", c.basis}, {"seed", c.seed},
              {"delta", c.delta}};
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig c;
  c.p = j.value("p", c.p);
  c.n = j.value("n", c.n);
  c.K = j.value("K", c.K);
  c.M = j.value("M", c.M);
  c.nu = j.value("nu", c.nu);
  c.s = j.value("s", c.s);
  c.rho = j.value("rho", c.rho);
  c.sigma2 = j.value("sigma2", c.sigma2);
  c.t_start = j.value("t_start", c.t_start);
  c.t_end = j.value("t_end", c.t_end);
  c.basis = j.value("basis", c.basis);
  c.seed = j.value("seed", c.seed);
  c.delta = j.value("delta", c.delta);
  return c;
}

json ground_truth_to_json(const GroundTruth& truth, int p, int M) {
  json j{{"p", p}, {"M", M}, {"K", truth.full.size()}, {"common", edges_to_json(truth.common)}};
  j["individual"] = json::array();
  j["full"] = json::array();
  j["omegas"] = json::array();
  for (const auto& e : truth.individual) j["individual"].push_back(edges_to_json(e));
  for (const auto& e : truth.full) j["full"].push_back(edges_to_json(e));
  for (const auto& o : truth.omegas) j["omegas"].push_back(matrix_to_json(o));
  return j;
}

GroundTruth ground_truth_from_json(const json& j) {
  GroundTruth t;
  t.common = edges_from_json(j.at("common"));
  for (const auto& e : j.at("individual")) t.individual.push_back(edges_from_json(e));
  for (const auto& e : j.at("full")) t.full.push_back(edges_from_json(e));
  if (j.contains("omegas"))
    for (const auto& o : j.at("omegas")) t.omegas.push_back(matrix_from_json(o));
  return t;
}

json admm_settings_to_json(const AdmmSettings& s) {
  return json{{"b", s.b},
              {"tol_primal", s.tol_primal},
              {"tol_dual", s.tol_dual},
              {"max_iter", s.max_iter},
              {"adaptive_b", s.adaptive_b},
              {"max_adaptations", s.max_adaptations}};
}

AdmmSettings admm_settings_from_json(const json& j) {
  AdmmSettings s;
  s.b = j.value("b", s.b);
  s.tol_primal = j.value("tol_primal", s.tol_primal);
  s.tol_dual = j.value("tol_dual", s.tol_dual);
  s.max_iter = j.value("max_iter", s.max_iter);
  s.adaptive_b = j.value("adaptive_b", s.adaptive_b);
  s.max_adaptations = j.value("max_adaptations", s.max_adaptations);
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace jointgraph::io
