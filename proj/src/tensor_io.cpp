#include "tmu/tensor_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "tmu/error.hpp"

namespace tmu {

using ojson = nlohmann::ordered_json;

std::string tensors_to_json(const std::vector<TensorValue>& ts) {
  ojson arr = ojson::array();
  for (const TensorValue& t : ts) {
    ojson j;
    j["name"] = t.name();
    j["variance"] = t.variance_string();
    j["shape"] = std::vector<int>(t.rank(), kDim);
    j["x"] = t.x();
    j["y"] = t.y() ? ojson(*t.y()) : ojson(nullptr);
    j["components"] = t.components();
    ojson syms = ojson::array();
    for (const auto& s : t.symmetries()) syms.push_back({{"a", s.a}, {"b", s.b}, {"anti", s.anti}});
    j["symmetries"] = syms;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<TensorValue> tensors_from_json(const std::string& text) {
  std::vector<TensorValue> out;
  try {
    const auto arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      std::vector<Variance> var;
      for (char c : j.at("variance").get<std::string>()) {
        if (c != '^' && c != '_') throw ConfigurationError("bad variance character in tensor JSON");
        var.push_back(c == '^' ? Variance::kUpper : Variance::kLower);
      }
      std::optional<Point4> y;
      if (!j.at("y").is_null()) y = j.at("y").get<Point4>();
      std::vector<TensorValue::Symmetry> syms;
      for (const auto& s : j.at("symmetries")) {
        syms.push_back({s.at("a").get<int>(), s.at("b").get<int>(), s.at("anti").get<bool>()});
      }
      out.emplace_back(j.at("name").get<std::string>(), std::move(var),
                       j.at("components").get<std::vector<double>>(), j.at("x").get<Point4>(), y,
                       std::move(syms));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed tensor JSON: ") + e.what());
  }
  return out;
}

std::string tensors_to_csv(const std::vector<TensorValue>& ts) {
  std::ostringstream os;
  os << "name,variance,index,value\n";
  char buf[40];
  for (const TensorValue& t : ts) {
    const auto& c = t.components();
    for (std::size_t k = 0; k < c.size(); ++k) {
      std::string idx;
      std::size_t rem = k;
      for (int r = t.rank() - 1; r >= 0; --r) {
        idx.insert(idx.begin(), static_cast<char>('0' + rem % kDim));
        rem /= kDim;
      }
      std::snprintf(buf, sizeof buf, "%.17g", c[k]);
      os << t.name() << ',' << t.variance_string() << ',' << (idx.empty() ? "-" : idx) << ',' << buf << '\n';
    }
  }
  return os.str();
}

}  // namespace tmu
