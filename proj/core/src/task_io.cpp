#include "rejection/task_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rejection {

namespace {

using nlohmann::json;

json task_to_json(const FiniteTask& task) {
  json j;
  j["n_inputs"] = task.n_inputs();
  j["n_labels"] = task.n_labels();
  j["marginal"] = task.marginal().values();
  json posterior = json::array();
  json logits = json::array();
  for (int x = 0; x < task.n_inputs(); ++x) {
    posterior.push_back(
        task.bayes_posterior()[static_cast<std::size_t>(x)].values());
    const auto row = task.logits().row(static_cast<std::size_t>(x));
    logits.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["bayes_posterior"] = std::move(posterior);
  j["logits"] = std::move(logits);
  return j;
}

FiniteTask task_from_json(const json& j) {
  const int n = j.at("n_inputs").get<int>();
  const int l = j.at("n_labels").get<int>();
  FiniteDomain domain(n, l);

  ProbVector marginal(j.at("marginal").get<std::vector<double>>());

  std::vector<ProbVector> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (const auto& row : j.at("bayes_posterior")) {
    rows.emplace_back(row.get<std::vector<double>>());
  }

  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(l));
  for (const auto& row : j.at("logits")) {
    const auto values = row.get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(l)) {
      throw std::invalid_argument("task file: ragged logits");
    }
    flat.insert(flat.end(), values.begin(), values.end());
  }

  return FiniteTask(domain, std::move(marginal),
                    PosteriorField(std::move(rows)),
                    Logits(std::move(flat), n, l));
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_all(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::invalid_argument("cannot write file: " + path);
  }
  out << text;
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument(std::string("malformed JSON in ") + what);
  }
  return j;
}

// Thresholds may sit at +-inf (e.g. kappa at tau = 0); JSON has no literal
// for those, so non-finite values round-trip as strings.
json encode_extended(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode_extended(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("rejection record: bad extended real: " + s);
  }
  return j.get<double>();
}

}  // namespace

std::string task_to_string(const FiniteTask& task) {
  return task_to_json(task).dump(2) + "\n";
}

FiniteTask task_from_string(const std::string& text) {
  return task_from_json(parse(text, "task"));
}

void write_task_file(const std::string& path, const FiniteTask& task) {
  write_all(path, task_to_string(task));
}

FiniteTask read_task_file(const std::string& path) {
  return task_from_string(read_all(path));
}

std::string rejection_records_to_string(
    const std::vector<RejectionRecord>& records) {
  json all = json::array();
  for (const RejectionRecord& r : records) {
    json j;
    j["kind"] = r.kind;
    j["lambda"] = r.lambda;
    j["tau"] = encode_extended(r.tau);
    j["kappa"] = encode_extended(r.kappa);
    j["Z"] = encode_extended(r.normalizer);
    j["mask"] = std::vector<int>(r.mask.begin(), r.mask.end());
    all.push_back(std::move(j));
  }
  return all.dump(2) + "\n";
}

std::vector<RejectionRecord> rejection_records_from_string(
    const std::string& text) {
  const json all = parse(text, "rejection records");
  std::vector<RejectionRecord> records;
  for (const auto& j : all) {
    RejectionRecord r;
    r.kind = j.at("kind").get<std::string>();
    r.lambda = j.at("lambda").get<double>();
    r.tau = decode_extended(j.at("tau"));
    r.kappa = decode_extended(j.at("kappa"));
    r.normalizer = decode_extended(j.at("Z"));
    for (int bit : j.at("mask").get<std::vector<int>>()) {
      if (bit != 0 && bit != 1) {
        throw std::invalid_argument("rejection record: mask bits must be 0/1");
      }
      r.mask.push_back(static_cast<std::uint8_t>(bit));
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_rejection_records(const std::string& path,
                             const std::vector<RejectionRecord>& records) {
  write_all(path, rejection_records_to_string(records));
}

std::vector<RejectionRecord> read_rejection_records(const std::string& path) {
  return rejection_records_from_string(read_all(path));
}

}  // namespace rejection
