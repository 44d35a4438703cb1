#include "mbq/serialization.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mbq {

using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

namespace {

json parse(const std::string& text) {
  json document = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) throw ValidationError("malformed JSON");
  return document;
}

template <typename T>
T field(const json& document, const char* name) {
  if (!document.contains(name)) {
    throw ValidationError(std::string("missing JSON field: ") + name);
  }
  try {
    return document.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad JSON field ") + name + ": " +
                          e.what());
  }
}

}  // namespace

std::string mdp_to_json(const TabularMdp& mdp) {
  json document;
  document["num_states"] = mdp.num_states;
  document["num_actions"] = mdp.num_actions;
  document["discount"] = mdp.discount;
  document["reward"] = mdp.reward;
  document["transition"] = mdp.transition;
  document["reward_bound"] = mdp.reward_bound;
  return document.dump(2) + "\n";
}

TabularMdp mdp_from_json(const std::string& text) {
  const json document = parse(text);
  TabularMdp mdp;
  mdp.num_states = field<int>(document, "num_states");
  mdp.num_actions = field<int>(document, "num_actions");
  mdp.discount = field<double>(document, "discount");
  mdp.reward = field<std::vector<double>>(document, "reward");
  mdp.transition = field<std::vector<double>>(document, "transition");
  mdp.reward_bound = field<double>(document, "reward_bound");
  return mdp;
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  write_text_file(path, mdp_to_json(mdp));
}

TabularMdp load_mdp(const std::string& path) {
  return mdp_from_json(read_text_file(path));
}

std::string qtable_to_json(const QTable& q) {
  json document;
  document["num_states"] = q.num_states;
  document["num_actions"] = q.num_actions;
  document["values"] = q.values;
  return document.dump(2) + "\n";
}

QTable qtable_from_json(const std::string& text) {
  const json document = parse(text);
  QTable q;
  q.num_states = field<int>(document, "num_states");
  q.num_actions = field<int>(document, "num_actions");
  q.values = field<std::vector<double>>(document, "values");
  if (q.values.size() != static_cast<std::size_t>(q.num_states) *
                             static_cast<std::size_t>(q.num_actions)) {
    throw ValidationError("q-table values length does not match dimensions");
  }
  return q;
}

void save_qtable(const QTable& q, const std::string& path) {
  write_text_file(path, qtable_to_json(q));
}

QTable load_qtable(const std::string& path) {
  return qtable_from_json(read_text_file(path));
}

std::string model_to_json(const EmpiricalModel& model) {
  json document;
  document["num_states"] = model.num_states();
  document["num_actions"] = model.num_actions();
  std::vector<std::int64_t> visits;
  std::vector<std::int64_t> transitions;
  std::vector<double> reward_sums;
  visits.reserve(static_cast<std::size_t>(model.pair_count()));
  for (int s = 0; s < model.num_states(); ++s) {
    for (int a = 0; a < model.num_actions(); ++a) {
      visits.push_back(model.visits(s, a));
      reward_sums.push_back(model.reward_sum(s, a));
      for (int next = 0; next < model.num_states(); ++next) {
        transitions.push_back(model.transition_count(s, a, next));
      }
    }
  }
  document["visit_counts"] = visits;
  document["transition_counts"] = transitions;
  document["reward_sums"] = reward_sums;
  document["total_steps"] = model.total_steps();
  return document.dump(2) + "\n";
}

EmpiricalModel model_from_json(const std::string& text) {
  const json document = parse(text);
  const int num_states = field<int>(document, "num_states");
  const int num_actions = field<int>(document, "num_actions");
  auto model = EmpiricalModel::restore(
      num_states, num_actions,
      field<std::vector<std::int64_t>>(document, "visit_counts"),
      field<std::vector<std::int64_t>>(document, "transition_counts"),
      field<std::vector<double>>(document, "reward_sums"));
  if (document.contains("total_steps") &&
      field<std::int64_t>(document, "total_steps") != model.total_steps()) {
    throw ValidationError("model snapshot total_steps disagrees with counts");
  }
  return model;
}

void save_model(const EmpiricalModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

EmpiricalModel load_model(const std::string& path) {
  return model_from_json(read_text_file(path));
}

namespace {

json tail_to_json(const TailValue& tail, bool valid) {
  json document;
  document["valid"] = valid;
  if (valid) {
    document["log_value"] = tail.log_value;
    document["value"] = tail.value;
  }
  return document;
}

}  // namespace

std::string bound_report_to_json(const BoundReport& report) {
  json document;
  document["inputs"] = {
      {"epsilon", report.inputs.epsilon}, {"delta", report.inputs.delta},
      {"gamma", report.inputs.gamma},     {"alpha", report.inputs.alpha},
      {"d_min", report.inputs.d_min},     {"num_pairs", report.inputs.num_pairs},
  };
  document["m"] = report.m;
  document["threshold_e1"] = report.threshold_e1;
  document["threshold_e2"] = report.threshold_e2;
  document["threshold_e3"] = report.threshold_e3;
  document["k_star"] = report.k_star;
  document["eps_valid"] = report.eps_valid;
  document["eps_max"] = report.eps_max;
  document["eps_prime"] = report.eps_prime;
  document["p_tail_at_k_star"] = tail_to_json(report.p_tail, report.p_tail_valid);
  document["r_tail_at_k_star"] = tail_to_json(report.r_tail, report.r_tail_valid);
  document["w_tail_at_k_star"] = tail_to_json(report.w_tail, report.w_tail_valid);
  return document.dump(2) + "\n";
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw Error("cannot write file: " + path);
}

void CsvWriter::comment(const std::string& text) {
  out_ << "# " << text << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
}

}  // namespace mbq
