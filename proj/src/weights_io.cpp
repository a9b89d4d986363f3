#include "mfspec/weights_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mfspec/error.hpp"

namespace mfspec {

WeightSystem parse_weights(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("weight file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("base") || !doc.contains("weights")) {
    throw Error(ErrorCode::ParseError, "weight file needs keys 'base' and 'weights'");
  }
  if (!doc["base"].is_number_integer()) {
    throw Error(ErrorCode::ParseError, "'base' must be an integer");
  }
  if (!doc["weights"].is_array()) {
    throw Error(ErrorCode::ParseError, "'weights' must be an array");
  }
  const int base = doc["base"].get<int>();
  std::vector<std::string> decimals;
  for (const auto& w : doc["weights"]) {
    if (w.is_string()) {
      decimals.push_back(w.get<std::string>());
    } else if (w.is_number()) {
      // Re-serialize with the parser's own text so numbers and strings share
      // one decimal-to-binary path.
      decimals.push_back(w.dump());
    } else {
      throw Error(ErrorCode::ParseError, "weights must be numbers or decimal strings");
    }
  }
  return WeightSystem::from_decimal(decimals, base);
}

std::string format_weights(const WeightSystem& ws) {
  nlohmann::ordered_json doc;
  doc["base"] = ws.base();
  doc["weights"] = std::vector<double>(ws.weights().begin(), ws.weights().end());
  return doc.dump(2) + "\n";
}

WeightSystem read_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open weight file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_weights(buf.str());
}

void write_weight_file(const std::string& path, const WeightSystem& ws) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << format_weights(ws);
}

}  // namespace mfspec
