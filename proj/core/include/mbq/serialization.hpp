#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "mbq/bounds.hpp"
#include "mbq/estimation.hpp"
#include "mbq/mdp.hpp"

namespace mbq {

/// Shortest representation that round-trips exactly; "nan"/"inf" for
/// non-finite values.  Used for every number written to CSV or JSON so
/// identical runs produce identical bytes.
std::string format_double(double value);

// MDP document: num_states, num_actions, discount, reward (flat (s,a)),
// transition (flat (s,a,s')), reward_bound.
std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

// Q-table document: num_states, num_actions, values (flat (s,a)).
std::string qtable_to_json(const QTable& q);
QTable qtable_from_json(const std::string& text);
void save_qtable(const QTable& q, const std::string& path);
QTable load_qtable(const std::string& path);

// Model snapshot: the MDP shape plus count tensors and reward sums.
std::string model_to_json(const EmpiricalModel& model);
EmpiricalModel model_from_json(const std::string& text);
void save_model(const EmpiricalModel& model, const std::string& path);
EmpiricalModel load_model(const std::string& path);

std::string bound_report_to_json(const BoundReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Streaming CSV writer.  Line 1 may carry a timestamped metadata
/// comment; everything after it is deterministic.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void comment(const std::string& text);
  void row(const std::vector<std::string>& cells);

  static std::string cell(double value) { return format_double(value); }
  static std::string cell(long value) { return std::to_string(value); }
  static std::string cell(bool value) { return value ? "1" : "0"; }

 private:
  std::ofstream out_;
};

}  // namespace mbq
