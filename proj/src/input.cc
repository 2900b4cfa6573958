#include "lfuzz/input.h"

#include <sstream>

namespace lfuzz {

size_t InputVector::SlotCount() const {
  size_t n = 0;
  for (const auto& c : calls) n += c.args.size();
  return n;
}

void ValidateInput(const TargetProgram& prog, const InputVector& input) {
  for (size_t i = 0; i < input.calls.size(); ++i) {
    const Call& call = input.calls[i];
    if (call.function >= prog.functions.size()) {
      throw InputError("call " + std::to_string(i) + ": invalid function index " +
                       std::to_string(call.function));
    }
    const FunctionDef& fn = prog.functions[call.function];
    if (call.args.size() != fn.params.size()) {
      throw InputError("call " + std::to_string(i) + ": " + fn.name + " expects " +
                       std::to_string(fn.params.size()) + " arguments, got " +
                       std::to_string(call.args.size()));
    }
    for (size_t a = 0; a < call.args.size(); ++a) {
      if (!fn.params[a].width.contains(call.args[a])) {
        throw InputError("call " + std::to_string(i) + ": argument '" +
                         fn.params[a].name + "' out of range for i" +
                         std::to_string(fn.params[a].width.bits));
      }
    }
  }
}

nlohmann::json InputToJson(const TargetProgram& prog, const InputVector& input) {
  auto out = nlohmann::json::array();
  for (const auto& call : input.calls) {
    out.push_back({{"fn", prog.functions.at(call.function).name},
                   {"args", call.args}});
  }
  return out;
}

InputVector InputFromJson(const TargetProgram& prog, const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("input must be a JSON array of calls");
  InputVector input;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("fn") || !item["fn"].is_string()) {
      throw InputError("each call needs a string \"fn\" field");
    }
    auto fn = prog.FindFunction(item["fn"].get<std::string>());
    if (!fn) throw InputError("unknown function '" + item["fn"].get<std::string>() + "'");
    Call call{*fn, {}};
    if (item.contains("args")) {
      if (!item["args"].is_array()) throw InputError("\"args\" must be an array");
      for (const auto& a : item["args"]) {
        if (!a.is_number_integer()) throw InputError("arguments must be integers");
        if (a.is_number_unsigned() && a.get<uint64_t>() > static_cast<uint64_t>(INT64_MAX)) {
          throw InputError("argument out of range");
        }
        call.args.push_back(a.get<int64_t>());
      }
    }
    input.calls.push_back(std::move(call));
  }
  ValidateInput(prog, input);
  return input;
}

std::string FormatInput(const TargetProgram& prog, const InputVector& input) {
  std::ostringstream out;
  for (size_t i = 0; i < input.calls.size(); ++i) {
    if (i) out << "; ";
    const Call& call = input.calls[i];
    const FunctionDef& fn = prog.functions.at(call.function);
    out << fn.name << "(";
    for (size_t a = 0; a < call.args.size(); ++a) {
      if (a) out << ", ";
      if (a < fn.params.size()) out << fn.params[a].name << "=";
      out << call.args[a];
    }
    out << ")";
  }
  return out.str();
}

}  // namespace lfuzz
