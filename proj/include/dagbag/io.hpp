#pragma once

#include "dagbag/aggregation.hpp"
#include "dagbag/bootstrap.hpp"
#include "dagbag/evaluation.hpp"
#include "dagbag/graph.hpp"
#include "dagbag/hill_climb.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dagbag {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// ---- edge lists ----------------------------------------------------------
//
//   # nodes: a,b,c
//   a<TAB>b
//
// The header fixes the node index order. Without it, labels are numbered in
// order of first appearance. Other '#' lines are comments and columns past
// the second are ignored.

struct LabeledGraph {
  Dag graph;
  std::vector<std::string> labels;
};

void write_edge_list(std::ostream& out, const Dag& g, const std::vector<std::string>& labels);
LabeledGraph read_edge_list(std::istream& in, const std::string& name = "");
LabeledGraph read_edge_list_file(const std::filesystem::path& path);
void write_edge_list_file(const std::filesystem::path& path, const Dag& g,
                          const std::vector<std::string>& labels);

// Edge pairs resolved against a fixed label table (black/whitelists); the
// file's own header, if any, must match `labels`.
std::vector<Edge> read_edge_pairs_file(const std::filesystem::path& path,
                                       const std::vector<std::string>& labels);

// ---- data ----------------------------------------------------------------
//
// CSV or TSV (tab if the first line has one), optional header of names.

struct DataTable {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
};

DataTable read_data(std::istream& in, const std::string& name = "");
DataTable read_data_file(const std::filesystem::path& path);
void write_data(std::ostream& out, const Eigen::MatrixXd& values,
                const std::vector<std::string>& names, char delimiter = ',');

// ---- manifests: ordered key=value lines ----------------------------------

class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_manifest(std::ostream& out, const Manifest& m);
Manifest read_manifest(std::istream& in, const std::string& name = "");
Manifest read_manifest_file(const std::filesystem::path& path);
void write_manifest_file(const std::filesystem::path& path, const Manifest& m);

// ---- ensembles: directory of member_NNNN.tsv plus ensemble.txt -----------

void write_ensemble(const std::filesystem::path& dir, const Ensemble& e,
                    const std::vector<std::string>& labels);
std::pair<Ensemble, std::vector<std::string>> read_ensemble(const std::filesystem::path& dir);

// ---- search traces -------------------------------------------------------
// columns: step op_kind source target delta total_edges [correct_edges]

void write_trace(std::ostream& out, const SearchTrace& trace, const std::vector<std::string>& labels);
std::vector<Operation> read_trace_operations(std::istream& in, const std::vector<std::string>& labels,
                                             const std::string& name = "");

// ---- aggregation output --------------------------------------------------
// Edge list with extra columns sf, sf_reversed, gsf. Kept edges are written
// in the order they were added.

void write_aggregated(std::ostream& graph_out, std::ostream& cyclic_out,
                      const AggregationResult& result, const SelectionTable& table,
                      const std::vector<std::string>& labels);
// Additions in file order, for replaying an aggregation learning curve.
std::vector<Edge> read_aggregated_additions(std::istream& in, const std::vector<std::string>& labels,
                                            const std::string& name = "");

// ---- evaluation output -----------------------------------------------------

void write_report(std::ostream& out, const EvalReport& r);
void write_curve(std::ostream& out, const std::vector<CurveRow>& rows);

}  // namespace dagbag
