#ifndef PARAMRED_TOOLS_JSON_VALUE_HPP
#define PARAMRED_TOOLS_JSON_VALUE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "paramred/csv.hpp"

namespace paramred::tools {

// Report emitter. nlohmann/json is used for *parsing* configs, but reports
// are written through this tree so that every double is formatted as fixed
// 17-significant-digit scientific notation and keys keep insertion order --
// reruns must produce byte-identical files.
class JsonValue {
 public:
  static JsonValue object() { return JsonValue(Kind::kObject); }
  static JsonValue array() { return JsonValue(Kind::kArray); }
  static JsonValue number(double v) {
    JsonValue j(Kind::kNumber);
    j.scalar_ = format_number(v);
    return j;
  }
  static JsonValue integer(std::int64_t v) {
    JsonValue j(Kind::kNumber);
    j.scalar_ = std::to_string(v);
    return j;
  }
  static JsonValue boolean(bool v) {
    JsonValue j(Kind::kBool);
    j.scalar_ = v ? "true" : "false";
    return j;
  }
  static JsonValue string(const std::string& s) {
    JsonValue j(Kind::kString);
    j.scalar_ = s;
    return j;
  }
  static JsonValue number_array(const Eigen::VectorXd& v) {
    JsonValue j = array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push(number(v[i]));
    return j;
  }

  JsonValue& set(const std::string& key, JsonValue v) {
    members_.emplace_back(key, std::move(v));
    return *this;
  }
  JsonValue& push(JsonValue v) {
    elements_.push_back(std::move(v));
    return *this;
  }

  std::string dump(int indent = 0) const {
    std::string out;
    emit(out, indent);
    out += '\n';
    return out;
  }

 private:
  enum class Kind { kObject, kArray, kNumber, kBool, kString };

  explicit JsonValue(Kind kind) : kind_(kind) {}

  static void escape_into(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
    out += '"';
  }

  void emit(std::string& out, int depth) const {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (kind_) {
      case Kind::kNumber:
      case Kind::kBool:
        out += scalar_;
        break;
      case Kind::kString:
        escape_into(out, scalar_);
        break;
      case Kind::kObject: {
        if (members_.empty()) {
          out += "{}";
          break;
        }
        out += "{\n";
        for (std::size_t i = 0; i < members_.size(); ++i) {
          out += pad_in;
          escape_into(out, members_[i].first);
          out += ": ";
          members_[i].second.emit(out, depth + 1);
          if (i + 1 < members_.size()) out += ',';
          out += '\n';
        }
        out += pad + "}";
        break;
      }
      case Kind::kArray: {
        if (elements_.empty()) {
          out += "[]";
          break;
        }
        out += "[\n";
        for (std::size_t i = 0; i < elements_.size(); ++i) {
          out += pad_in;
          elements_[i].emit(out, depth + 1);
          if (i + 1 < elements_.size()) out += ',';
          out += '\n';
        }
        out += pad + "]";
        break;
      }
    }
  }

  Kind kind_;
  std::string scalar_;
  std::vector<std::pair<std::string, JsonValue>> members_;
  std::vector<JsonValue> elements_;
};

}  // namespace paramred::tools

#endif  // PARAMRED_TOOLS_JSON_VALUE_HPP
