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
//
// Versioned prompt templates.
//
// A template file is a header of "# key: value" lines, a "---" separator,
// and the body. Recognized keys:
//
//   id        template id, e.g. PII.3
//   version   integer, part of every replay key
//   stage     pipeline stage the template serves (informational)
//   inputs    comma-separated placeholder names; must equal the set of
//             {{name}} placeholders in the body
//   images    number of images a request must attach
//   schema    structured-output schema id the answer is parsed with
//   output    free-text description of the expected answer
//
// The placeholder {{demonstrations}} is reserved: it is filled from the
// request's demonstration list rather than from a slot.
#ifndef IGEDET_PROMPTS_H_
#define IGEDET_PROMPTS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "igedet/random.h"

namespace igedet::provider {

inline constexpr std::string_view kDemonstrationsSlot = "demonstrations";

// Every id the pipeline asks for; the registry refuses to start without all
// of them.
inline const std::vector<std::string>& known_template_ids() {
  static const std::vector<std::string> ids = {
      "PI.1",  "PI.2",  "PII.1", "PII.2", "PII.3",
      "PII.4", "PII.5", "PII.6", "PII.7", "PIII"};
  return ids;
}

struct PromptTemplate {
  std::string id;
  int version = 1;
  std::string stage;
  std::set<std::string> inputs;
  std::size_t images = 0;
  std::string schema_id;
  std::string output;
  std::string body;

  static PromptTemplate parse(std::string_view text, std::string_view origin);

  // Placeholder names appearing in the body.
  std::set<std::string> placeholders() const;

  // Throws TemplateError when a declared input is missing from `slots`.
  std::string render(const std::map<std::string, std::string>& slots,
                     const std::vector<std::string>& demos = {}) const;
};

class PromptRegistry {
 public:
  PromptRegistry() = default;

  // Loads every *.txt in `dir` and validates the registry.
  static PromptRegistry load_dir(const std::filesystem::path& dir);

  void add(PromptTemplate t);

  // Checks that all known ids exist, placeholders match the declared inputs
  // and each schema id is registered.
  void validate() const;

  bool contains(std::string_view id) const;
  const PromptTemplate& get(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// Chain-of-thought demonstrations for the interactability prompt, loaded from
// a JSON array of {"id", "text"} objects.
class DemonstrationPool {
 public:
  DemonstrationPool() = default;
  explicit DemonstrationPool(std::vector<std::string> demos)
      : demos_(std::move(demos)) {}

  static DemonstrationPool load(const std::filesystem::path& path);

  // `count` distinct demonstrations drawn with the generator, in draw order.
  std::vector<std::string> select(Rng& rng, std::size_t count = 3) const;

  std::size_t size() const { return demos_.size(); }

 private:
  std::vector<std::string> demos_;
};

}  // namespace igedet::provider

#endif  // IGEDET_PROMPTS_H_
