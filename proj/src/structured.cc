// Copyright 2026 The igedet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "igedet/structured.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>

#include "igedet/errors.h"

namespace igedet::provider {

using nlohmann::json;

namespace {

// Thrown inside validators; converted to ParseError with the raw text.
struct Invalid {
  std::string what;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string as_text(const json& v, const std::string& where) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      const std::string s = as_text(e, where);
      if (s.empty()) continue;
      if (!out.empty()) out += ", ";
      out += s;
    }
    return out;
  }
  throw Invalid{where + ": expected text"};
}

std::vector<std::string> as_list(const json& v, const std::string& where) {
  std::vector<std::string> out;
  if (v.is_null()) return out;
  if (v.is_array()) {
    for (const auto& e : v) {
      std::string s = as_text(e, where);
      if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
  }
  std::string s = as_text(v, where);
  if (!s.empty()) out.push_back(std::move(s));
  return out;
}

const json* find(const json& obj, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) return nullptr;
  for (const char* k : keys) {
    if (auto it = obj.find(k); it != obj.end()) return &*it;
  }
  return nullptr;
}

const json& require_object(const json& v, const std::string& where) {
  if (!v.is_object()) throw Invalid{where + ": expected object"};
  return v;
}

bool as_bool(const json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = lower(trim(v.get<std::string>()));
    if (s == "true" || s == "yes") return true;
    if (s == "false" || s == "no") return false;
  }
  throw Invalid{where + ": expected boolean"};
}

// The candidate list, accepting either {"candidates": [...]} or a bare array.
const json& candidate_array(const json& v) {
  if (v.is_array()) return v;
  const json* arr = find(v, {"candidates", "elements", "items"});
  if (!arr || !arr->is_array()) {
    throw Invalid{"candidates: expected array"};
  }
  return *arr;
}

std::string candidate_name(const json& entry, const std::string& where) {
  std::string name;
  if (entry.is_string()) {
    name = entry.get<std::string>();
  } else if (const json* n = find(entry, {"name", "candidate", "label"})) {
    name = as_text(*n, where + ".name");
  }
  name = trim(name);
  if (name.empty()) throw Invalid{where + ".name: expected non-empty text"};
  return name;
}

// Pairs given either as a list of {dimension_key, value_key} objects or as an
// object {dimension: value}.
json pair_list(const json& v, const char* value_key, const std::string& where) {
  json out = json::array();
  if (v.is_object()) {
    for (const auto& [k, val] : v.items()) {
      out.push_back({{"dimension", k}, {value_key, as_text(val, where)}});
    }
    return out;
  }
  if (!v.is_array()) throw Invalid{where + ": expected list"};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& e = v[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (e.is_string()) {
      out.push_back({{"dimension", ""}, {value_key, e.get<std::string>()}});
      continue;
    }
    require_object(e, w);
    const json* dim = find(e, {"dimension", "dimension_name", "name"});
    const json* val = find(e, {value_key});
    out.push_back({{"dimension", dim ? as_text(*dim, w) : ""},
                   {value_key, val ? as_text(*val, w) : ""}});
  }
  return out;
}

json v_global_context(const json& v) {
  require_object(v, "global_context");
  json out = json::object();
  for (const char* k : {"app_name", "content_theme", "gameplay"}) {
    const json* f = find(v, {k});
    out[k] = f ? as_text(*f, k) : "";
  }
  for (const char* k :
       {"genres", "device_support", "interaction_mechanisms", "language"}) {
    const json* f = find(v, {k});
    out[k] = f ? as_list(*f, k) : std::vector<std::string>{};
  }
  return out;
}

json v_local_context(const json& v) {
  const json* s = find(v, {"scene_summary", "summary"});
  if (!s) throw Invalid{"scene_summary: missing"};
  const std::string text = trim(as_text(*s, "scene_summary"));
  if (text.empty()) throw Invalid{"scene_summary: empty"};
  return {{"scene_summary", text}};
}

json v_candidates(const json& v) {
  const json& arr = candidate_array(v);
  json out = json::array();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(
        {{"name", candidate_name(arr[i], "candidates[" + std::to_string(i) + "]")}});
  }
  return {{"candidates", out}};
}

json v_dimensions(const json& v) {
  const json& arr = candidate_array(v);
  json out = json::array();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = "candidates[" + std::to_string(i) + "]";
    const json* dims = find(arr[i], {"dimensions"});
    out.push_back({{"name", candidate_name(arr[i], w)},
                   {"dimensions",
                    dims ? as_list(*dims, w + ".dimensions")
                         : std::vector<std::string>{}}});
  }
  return {{"candidates", out}};
}

json v_questions(const json& v) {
  const json& arr = candidate_array(v);
  json out = json::array();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = "candidates[" + std::to_string(i) + "]";
    const json* qs = find(arr[i], {"questions"});
    out.push_back({{"name", candidate_name(arr[i], w)},
                   {"questions", qs ? pair_list(*qs, "question", w + ".questions")
                                    : json::array()}});
  }
  return {{"candidates", out}};
}

json v_answers(const json& v) {
  const json& arr = candidate_array(v);
  json out = json::array();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = "candidates[" + std::to_string(i) + "]";
    const json* as = find(arr[i], {"answers"});
    out.push_back({{"name", candidate_name(arr[i], w)},
                   {"answers", as ? pair_list(*as, "answer", w + ".answers")
                                  : json::array()}});
  }
  return {{"candidates", out}};
}

// {"verdict": one of `allowed`, "reason": text}
json v_verdict(const json& v, const std::vector<std::string>& allowed) {
  require_object(v, "verdict");
  const json* verdict = find(v, {"verdict", "answer", "decision"});
  if (!verdict) throw Invalid{"verdict: missing"};
  const std::string s = lower(trim(as_text(*verdict, "verdict")));
  if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
    throw Invalid{"verdict: unexpected value '" + s + "'"};
  }
  const json* reason = find(v, {"reason", "rationale", "explanation"});
  return {{"verdict", s}, {"reason", reason ? as_text(*reason, "reason") : ""}};
}

json v_verification(const json& v) {
  return v_verdict(v, {"match", "mismatch"});
}

json v_miss_reflection(const json& v) {
  return v_verdict(v, {"hallucination", "missed"});
}

json v_advisor(const json& v) {
  require_object(v, "advisor");
  const json* c = find(v, {"confident"});
  if (!c) throw Invalid{"confident: missing"};
  const json* concerns = find(v, {"concerns"});
  return {{"confident", as_bool(*c, "confident")},
          {"concerns", concerns ? as_text(*concerns, "concerns") : ""}};
}

json v_interactability(const json& v) {
  require_object(v, "interactability");
  const json* i = find(v, {"interactable"});
  if (!i) throw Invalid{"interactable: missing"};
  const json* r = find(v, {"rationale", "reasoning", "reason"});
  return {{"interactable", as_bool(*i, "interactable")},
          {"rationale", r ? as_text(*r, "rationale") : ""}};
}

using Validator = std::function<json(const json&)>;

const std::map<std::string, Validator, std::less<>>& validators() {
  static const std::map<std::string, Validator, std::less<>> v = {
      {std::string(schema::kGlobalContext), v_global_context},
      {std::string(schema::kLocalContext), v_local_context},
      {std::string(schema::kCandidates), v_candidates},
      {std::string(schema::kDimensions), v_dimensions},
      {std::string(schema::kQuestions), v_questions},
      {std::string(schema::kAnswers), v_answers},
      {std::string(schema::kVerification), v_verification},
      {std::string(schema::kMissReflection), v_miss_reflection},
      {std::string(schema::kAdvisor), v_advisor},
      {std::string(schema::kInteractability), v_interactability},
  };
  return v;
}

// Body of the first ``` fenced block, or the whole text without fences.
std::string_view strip_fences(std::string_view raw) {
  const auto open = raw.find("```");
  if (open == std::string_view::npos) return raw;
  auto body_start = raw.find('\n', open);
  if (body_start == std::string_view::npos) return raw.substr(open + 3);
  ++body_start;
  const auto close = raw.find("```", body_start);
  if (close == std::string_view::npos) return raw.substr(body_start);
  return raw.substr(body_start, close - body_start);
}

// End (exclusive) of the bracketed value starting at `start`, honoring JSON
// strings; npos when unbalanced.
std::size_t matching_end(std::string_view s, std::size_t start) {
  std::vector<char> stack;
  bool in_string = false, escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      stack.push_back(c == '{' ? '}' : ']');
    } else if (c == '}' || c == ']') {
      if (stack.empty() || stack.back() != c) return std::string_view::npos;
      stack.pop_back();
      if (stack.empty()) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> first_json(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{' && text[i] != '[') continue;
    const std::size_t end = matching_end(text, i);
    if (end == std::string_view::npos) continue;
    json v = json::parse(text.substr(i, end - i), nullptr, false);
    if (!v.is_discarded()) return v;
  }
  return std::nullopt;
}

}  // namespace

bool is_registered_schema(std::string_view schema_id) {
  return validators().find(schema_id) != validators().end();
}

std::vector<std::string> registered_schemas() {
  std::vector<std::string> out;
  for (const auto& [k, _] : validators()) out.push_back(k);
  return out;
}

json extract_json(std::string_view raw) {
  if (auto v = first_json(strip_fences(raw))) return *v;
  if (auto v = first_json(raw)) return *v;
  throw ParseError("no JSON object or array found", std::string(raw));
}

json validate_structured(const json& value, std::string_view schema_id,
                         std::string_view raw) {
  auto it = validators().find(schema_id);
  if (it == validators().end()) {
    throw TemplateError("unknown schema '" + std::string(schema_id) + "'");
  }
  try {
    return it->second(value);
  } catch (const Invalid& e) {
    throw ParseError(std::string(schema_id) + ": " + e.what,
                     raw.empty() ? value.dump() : std::string(raw));
  } catch (const json::exception& e) {
    throw ParseError(std::string(schema_id) + ": " + e.what(),
                     raw.empty() ? value.dump() : std::string(raw));
  }
}

json parse_structured(std::string_view raw, std::string_view schema_id) {
  return validate_structured(extract_json(raw), schema_id, raw);
}

}  // namespace igedet::provider
