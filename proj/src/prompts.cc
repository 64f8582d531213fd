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
#include "igedet/prompts.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "igedet/errors.h"
#include "igedet/structured.h"

namespace igedet::provider {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::set<std::string> split_list(std::string_view s) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    std::string item = trim(s.substr(pos, comma - pos));
    if (!item.empty()) out.insert(std::move(item));
    pos = comma + 1;
  }
  return out;
}

// Calls f(name, begin, end) for each {{name}} occurrence.
template <typename F>
void scan_placeholders(std::string_view body, F f) {
  std::size_t pos = 0;
  while (true) {
    const auto open = body.find("{{", pos);
    if (open == std::string_view::npos) return;
    const auto close = body.find("}}", open + 2);
    if (close == std::string_view::npos) return;
    f(trim(body.substr(open + 2, close - open - 2)), open, close + 2);
    pos = close + 2;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text,
                                     std::string_view origin) {
  const std::string where(origin);
  PromptTemplate t;
  std::size_t pos = 0;
  bool saw_separator = false;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    if (line == "---") {
      saw_separator = true;
      break;
    }
    if (trim(line).empty()) continue;
    if (line.substr(0, 1) != "#") {
      throw TemplateError(where + ": header line without '#': " +
                          std::string(line));
    }
    const std::string_view kv = line.substr(1);
    const auto colon = kv.find(':');
    if (colon == std::string_view::npos) continue;  // free-form comment
    const std::string key = trim(kv.substr(0, colon));
    const std::string value = trim(kv.substr(colon + 1));
    if (key == "id") {
      t.id = value;
    } else if (key == "version") {
      try {
        t.version = std::stoi(value);
      } catch (const std::exception&) {
        throw TemplateError(where + ": bad version '" + value + "'");
      }
    } else if (key == "stage") {
      t.stage = value;
    } else if (key == "inputs") {
      t.inputs = split_list(value);
    } else if (key == "images") {
      try {
        t.images = static_cast<std::size_t>(std::stoul(value));
      } catch (const std::exception&) {
        throw TemplateError(where + ": bad image count '" + value + "'");
      }
    } else if (key == "schema") {
      t.schema_id = value;
    } else if (key == "output") {
      t.output = value;
    }
  }
  if (!saw_separator) throw TemplateError(where + ": missing '---' separator");
  if (t.id.empty()) throw TemplateError(where + ": missing id");
  if (t.schema_id.empty()) throw TemplateError(where + ": missing schema");
  t.body = std::string(text.substr(std::min(pos, text.size())));
  while (!t.body.empty() && (t.body.back() == '\n' || t.body.back() == '\r')) {
    t.body.pop_back();
  }
  return t;
}

std::set<std::string> PromptTemplate::placeholders() const {
  std::set<std::string> out;
  scan_placeholders(body, [&](std::string name, std::size_t, std::size_t) {
    out.insert(std::move(name));
  });
  return out;
}

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& slots,
    const std::vector<std::string>& demos) const {
  for (const auto& in : inputs) {
    if (in == kDemonstrationsSlot) continue;
    if (!slots.contains(in)) {
      throw TemplateError(id + ": slot '" + in + "' not filled");
    }
  }
  std::string out;
  std::size_t last = 0;
  scan_placeholders(body, [&](const std::string& name, std::size_t b,
                              std::size_t e) {
    out.append(body, last, b - last);
    if (name == kDemonstrationsSlot) {
      for (std::size_t i = 0; i < demos.size(); ++i) {
        if (i) out += "\n\n";
        out += "Example " + std::to_string(i + 1) + ":\n" + demos[i];
      }
    } else if (auto it = slots.find(name); it != slots.end()) {
      out += it->second;
    } else {
      throw TemplateError(id + ": slot '" + name + "' not filled");
    }
    last = e;
  });
  out.append(body, last, std::string::npos);
  return out;
}

PromptRegistry PromptRegistry::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw MissingFile(dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  PromptRegistry reg;
  for (const auto& f : files) {
    reg.add(PromptTemplate::parse(read_file(f), f.string()));
  }
  reg.validate();
  return reg;
}

void PromptRegistry::add(PromptTemplate t) {
  if (templates_.contains(t.id)) {
    throw TemplateError("duplicate template id '" + t.id + "'");
  }
  std::string id = t.id;
  templates_.emplace(std::move(id), std::move(t));
}

void PromptRegistry::validate() const {
  for (const auto& id : known_template_ids()) {
    if (!templates_.contains(id)) {
      throw TemplateError("template '" + id + "' missing from registry");
    }
  }
  for (const auto& [id, t] : templates_) {
    if (!is_registered_schema(t.schema_id)) {
      throw TemplateError(id + ": unknown schema '" + t.schema_id + "'");
    }
    if (t.placeholders() != t.inputs) {
      std::string msg = id + ": placeholders do not match declared inputs;";
      for (const auto& p : t.placeholders()) {
        if (!t.inputs.contains(p)) msg += " undeclared {{" + p + "}}";
      }
      for (const auto& in : t.inputs) {
        if (!t.placeholders().contains(in)) msg += " unused input '" + in + "'";
      }
      throw TemplateError(msg);
    }
  }
}

bool PromptRegistry::contains(std::string_view id) const {
  return templates_.find(id) != templates_.end();
}

const PromptTemplate& PromptRegistry::get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw TemplateError("unknown template '" + std::string(id) + "'");
  }
  return it->second;
}

std::vector<std::string> PromptRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

DemonstrationPool DemonstrationPool::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    std::vector<std::string> demos;
    for (const auto& d : doc) demos.push_back(d.at("text").get<std::string>());
    return DemonstrationPool(std::move(demos));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> DemonstrationPool::select(Rng& rng,
                                                   std::size_t count) const {
  std::vector<std::size_t> idx(demos_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates.
  const std::size_t n = std::min(count, idx.size());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(demos_[idx[i]]);
  }
  return out;
}

}  // namespace igedet::provider
