#include "dagbag/io.hpp"

#include "dagbag/dataset.hpp"
#include "dagbag/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dagbag {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

bool parse_number(const std::string& text, double& value) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(value);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_label(const std::string& label) {
  if (label.empty() || label.find_first_of(",\t\r\n") != std::string::npos || label[0] == '#') {
    throw Error("node label '" + label + "' cannot be written to an edge list");
  }
}

constexpr const char* kNodesPrefix = "# nodes:";

bool is_nodes_header(const std::string& line) { return line.rfind(kNodesPrefix, 0) == 0; }

std::vector<std::string> parse_nodes_header(const std::string& line, const std::string& name,
                                            std::size_t line_no) {
  const std::string body = trim(line.substr(std::string(kNodesPrefix).size()));
  std::vector<std::string> labels;
  if (body.empty()) return labels;
  std::map<std::string, std::size_t> seen;
  for (const auto& raw : split(body, ',')) {
    const std::string label = trim(raw);
    if (label.empty()) throw ParseError(name, line_no, 0, "empty node label in header");
    if (!seen.emplace(label, labels.size()).second) {
      throw ParseError(name, line_no, 0, "duplicate node label '" + label + "'");
    }
    labels.push_back(label);
  }
  return labels;
}

std::map<std::string, std::size_t> index_labels(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  return index;
}

// Calls fn(fields, line_no) for every non-comment, non-blank line.
template <class Fn>
void for_each_row(std::istream& in, Fn&& fn,
                  const std::function<void(const std::string&, std::size_t)>& on_comment = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (trim(line).empty()) continue;
    if (line[0] == '#') {
      if (on_comment) on_comment(line, line_no);
      continue;
    }
    fn(split(line, '\t'), line_no);
  }
}

NodeId resolve(const std::map<std::string, std::size_t>& index, const std::string& label,
               const std::string& name, std::size_t line_no, std::size_t column) {
  const auto it = index.find(label);
  if (it == index.end()) throw ParseError(name, line_no, column, "unknown node '" + label + "'");
  return it->second;
}

}  // namespace

void write_edge_list(std::ostream& out, const Dag& g, const std::vector<std::string>& labels) {
  if (labels.size() != g.size()) throw DimensionMismatch("label table does not match graph size");
  out << kNodesPrefix;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    check_label(labels[i]);
    out << (i == 0 ? " " : ",") << labels[i];
  }
  out << '\n';
  for (const Edge& e : g.edges()) out << labels[e.source] << '\t' << labels[e.target] << '\n';
}

LabeledGraph read_edge_list(std::istream& in, const std::string& name) {
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> index;
  bool header = false;
  std::vector<Edge> edges;

  auto on_comment = [&](const std::string& line, std::size_t line_no) {
    if (!is_nodes_header(line)) return;
    if (header || !edges.empty()) {
      throw ParseError(name, line_no, 0, "node header must come first and only once");
    }
    labels = parse_nodes_header(line, name, line_no);
    index = index_labels(labels);
    header = true;
  };
  auto on_row = [&](const std::vector<std::string>& fields, std::size_t line_no) {
    if (fields.size() < 2) throw ParseError(name, line_no, 0, "expected source<TAB>target");
    NodeId ends[2];
    for (std::size_t c = 0; c < 2; ++c) {
      const std::string label = trim(fields[c]);
      if (label.empty()) throw ParseError(name, line_no, c + 1, "empty node label");
      if (header) {
        ends[c] = resolve(index, label, name, line_no, c + 1);
      } else {
        const auto [it, inserted] = index.emplace(label, labels.size());
        if (inserted) labels.push_back(label);
        ends[c] = it->second;
      }
    }
    edges.push_back({ends[0], ends[1]});
  };
  for_each_row(in, on_row, on_comment);

  try {
    return {Dag::from_edges(labels.size(), edges), labels};
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    throw ParseError(name, 0, 0, err.what());
  }
}

LabeledGraph read_edge_list_file(const fs::path& path) {
  auto in = open_in(path);
  return read_edge_list(in, path.string());
}

void write_edge_list_file(const fs::path& path, const Dag& g, const std::vector<std::string>& labels) {
  auto out = open_out(path);
  write_edge_list(out, g, labels);
}

std::vector<Edge> read_edge_pairs_file(const fs::path& path, const std::vector<std::string>& labels) {
  auto in = open_in(path);
  const std::string name = path.string();
  const auto index = index_labels(labels);
  std::vector<Edge> edges;
  auto on_comment = [&](const std::string& line, std::size_t line_no) {
    if (is_nodes_header(line) && parse_nodes_header(line, name, line_no) != labels) {
      throw ParseError(name, line_no, 0, "node header does not match the data's variables");
    }
  };
  auto on_row = [&](const std::vector<std::string>& fields, std::size_t line_no) {
    if (fields.size() < 2) throw ParseError(name, line_no, 0, "expected source<TAB>target");
    edges.push_back({resolve(index, trim(fields[0]), name, line_no, 1),
                     resolve(index, trim(fields[1]), name, line_no, 2)});
  };
  for_each_row(in, on_row, on_comment);
  return edges;
}

DataTable read_data(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t line_no = 0;
  char delim = ',';
  bool first = true;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (trim(line).empty()) continue;
    if (first) delim = line.find('\t') != std::string::npos ? '\t' : ',';
    const auto fields = split(line, delim);
    if (first) {
      first = false;
      width = fields.size();
      bool numeric = true;
      double v = 0.0;
      for (const auto& f : fields) numeric = numeric && parse_number(f, v);
      if (!numeric) {
        for (const auto& f : fields) names.push_back(trim(f));
        continue;
      }
    }
    if (fields.size() != width) {
      throw ParseError(name, line_no, 0,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_number(fields[c], row[c])) {
        throw ParseError(name, line_no, c + 1, "'" + trim(fields[c]) + "' is not a finite number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (first) throw ParseError(name, 0, 0, "no data");

  DataTable t;
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) t.values(r, c) = rows[r][c];
  t.names = names.empty() ? default_names(width) : names;
  return t;
}

DataTable read_data_file(const fs::path& path) {
  auto in = open_in(path);
  return read_data(in, path.string());
}

void write_data(std::ostream& out, const Eigen::MatrixXd& values,
                const std::vector<std::string>& names, char delimiter) {
  if (names.size() != static_cast<std::size_t>(values.cols())) {
    throw DimensionMismatch("name table does not match column count");
  }
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? std::string(1, delimiter) : "") << names[c];
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << delimiter;
      out << format_double(values(r, c));
    }
    out << '\n';
  }
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

std::optional<std::string> Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

std::string Manifest::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw Error("manifest is missing key '" + key + "'");
  return *v;
}

void write_manifest(std::ostream& out, const Manifest& m) {
  for (const auto& [k, v] : m.entries()) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw Error("manifest entry '" + k + "' cannot be written");
    }
    out << k << '=' << v << '\n';
  }
}

Manifest read_manifest(std::istream& in, const std::string& name) {
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (trim(line).empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(name, line_no, 0, "expected key=value");
    m.add(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

Manifest read_manifest_file(const fs::path& path) {
  auto in = open_in(path);
  return read_manifest(in, path.string());
}

void write_manifest_file(const fs::path& path, const Manifest& m) {
  auto out = open_out(path);
  write_manifest(out, m);
}

void write_ensemble(const fs::path& dir, const Ensemble& e, const std::vector<std::string>& labels) {
  fs::create_directories(dir);
  Manifest m;
  const auto& prov = e.provenance;
  m.add("p", std::to_string(e.p));
  m.add("boot", std::to_string(e.graphs.size()));
  m.add("seed", std::to_string(prov.seed));
  m.add("score", to_string(prov.kind));
  m.add("eps", format_double(prov.eps));
  m.add("max_steps", std::to_string(prov.max_steps));
  m.add("restarts", std::to_string(prov.restarts));
  m.add("perturb", std::to_string(prov.perturb));
  for (std::size_t b = 0; b < e.graphs.size(); ++b) {
    char file[32];
    std::snprintf(file, sizeof file, "member_%04zu.tsv", b);
    write_edge_list_file(dir / file, e.graphs[b], labels);
    m.add("member." + std::to_string(b), file);
  }
  write_manifest_file(dir / "ensemble.txt", m);
}

std::pair<Ensemble, std::vector<std::string>> read_ensemble(const fs::path& dir) {
  const Manifest m = read_manifest_file(dir / "ensemble.txt");
  Ensemble e;
  e.p = std::stoul(m.require("p"));
  const std::size_t boot = std::stoul(m.require("boot"));
  e.provenance.boot = boot;
  e.provenance.seed = std::stoull(m.require("seed"));
  e.provenance.kind = score_kind_from_string(m.require("score"));
  e.provenance.eps = std::stod(m.require("eps"));
  e.provenance.max_steps = std::stoul(m.require("max_steps"));
  e.provenance.restarts = std::stoul(m.get("restarts").value_or("0"));
  e.provenance.perturb = std::stoul(m.get("perturb").value_or("0"));
  std::vector<std::string> labels;
  for (std::size_t b = 0; b < boot; ++b) {
    LabeledGraph lg = read_edge_list_file(dir / m.require("member." + std::to_string(b)));
    if (b == 0) labels = lg.labels;
    if (lg.labels != labels || lg.graph.size() != e.p) {
      throw Error("ensemble member " + std::to_string(b) + " has a different node table");
    }
    e.graphs.push_back(std::move(lg.graph));
  }
  return {std::move(e), std::move(labels)};
}

void write_trace(std::ostream& out, const SearchTrace& trace, const std::vector<std::string>& labels) {
  const bool with_truth = !trace.steps.empty() && trace.steps.front().correct_edges.has_value();
  out << "# stop_reason: " << to_string(trace.stop_reason) << '\n';
  out << "step\top_kind\tsource\ttarget\tdelta\ttotal_edges";
  if (with_truth) out << "\tcorrect_edges";
  out << '\n';
  for (const TraceStep& s : trace.steps) {
    out << s.step << '\t' << to_string(s.op.kind) << '\t' << labels.at(s.op.source) << '\t'
        << labels.at(s.op.target) << '\t' << format_double(s.delta) << '\t' << s.total_edges;
    if (with_truth) out << '\t' << s.correct_edges.value_or(0);
    out << '\n';
  }
}

std::vector<Operation> read_trace_operations(std::istream& in, const std::vector<std::string>& labels,
                                             const std::string& name) {
  const auto index = index_labels(labels);
  std::vector<Operation> ops;
  for_each_row(in, [&](const std::vector<std::string>& fields, std::size_t line_no) {
    if (!fields.empty() && trim(fields[0]) == "step") return;
    if (fields.size() < 4) throw ParseError(name, line_no, 0, "expected step, op_kind, source, target");
    Operation op;
    try {
      op.kind = op_kind_from_string(trim(fields[1]));
    } catch (const Error& err) {
      throw ParseError(name, line_no, 2, err.what());
    }
    op.source = resolve(index, trim(fields[2]), name, line_no, 3);
    op.target = resolve(index, trim(fields[3]), name, line_no, 4);
    ops.push_back(op);
  });
  return ops;
}

namespace {

void write_aggregated_rows(std::ostream& out, const std::vector<Edge>& edges,
                           const SelectionTable& table, double alpha,
                           const std::vector<std::string>& labels) {
  out << "# alpha: " << format_double(alpha) << '\n';
  out << "# columns: source\ttarget\tsf\tsf_reversed\tgsf\n";
  for (const Edge& e : edges) {
    out << labels.at(e.source) << '\t' << labels.at(e.target) << '\t'
        << format_double(table.sf(e.source, e.target)) << '\t'
        << format_double(table.sf(e.target, e.source)) << '\t'
        << format_double(table.gsf(e.source, e.target, alpha)) << '\n';
  }
}

}  // namespace

void write_aggregated(std::ostream& graph_out, std::ostream& cyclic_out,
                      const AggregationResult& result, const SelectionTable& table,
                      const std::vector<std::string>& labels) {
  if (labels.size() != table.p()) throw DimensionMismatch("label table does not match ensemble");
  for (std::ostream* out : {&graph_out, &cyclic_out}) {
    *out << kNodesPrefix;
    for (std::size_t i = 0; i < labels.size(); ++i) *out << (i == 0 ? " " : ",") << labels[i];
    *out << '\n';
  }
  write_aggregated_rows(graph_out, result.additions, table, result.alpha, labels);
  write_aggregated_rows(cyclic_out, result.cyclic_edges, table, result.alpha, labels);
}

std::vector<Edge> read_aggregated_additions(std::istream& in, const std::vector<std::string>& labels,
                                            const std::string& name) {
  const auto index = index_labels(labels);
  std::vector<Edge> edges;
  for_each_row(in, [&](const std::vector<std::string>& fields, std::size_t line_no) {
    if (fields.size() < 2) throw ParseError(name, line_no, 0, "expected source<TAB>target");
    edges.push_back({resolve(index, trim(fields[0]), name, line_no, 1),
                     resolve(index, trim(fields[1]), name, line_no, 2)});
  });
  return edges;
}

void write_report(std::ostream& out, const EvalReport& r) {
  out << "# total_e\tcorrect_e\ttotal_v\tcorrect_v\ttotal_m\tcorrect_m\tprecision_e\trecall_e"
         "\tprecision_v\trecall_v\tprecision_m\trecall_m\n";
  out << r.total_e << '\t' << r.correct_e << '\t' << r.total_v << '\t' << r.correct_v << '\t'
      << r.total_m << '\t' << r.correct_m << '\t' << format_double(r.precision_e()) << '\t'
      << format_double(r.recall_e()) << '\t' << format_double(r.precision_v()) << '\t'
      << format_double(r.recall_v()) << '\t' << format_double(r.precision_m()) << '\t'
      << format_double(r.recall_m()) << '\n';
}

void write_curve(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "step\ttotal_e\tcorrect_e\ttotal_v\tcorrect_v\n";
  for (const CurveRow& r : rows) {
    out << r.step << '\t' << r.total_e << '\t' << r.correct_e << '\t' << r.total_v << '\t'
        << r.correct_v << '\n';
  }
}

}  // namespace dagbag
