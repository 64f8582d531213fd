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
// Tolerant extraction of structured answers from model text.
#ifndef IGEDET_STRUCTURED_H_
#define IGEDET_STRUCTURED_H_

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace igedet::provider {

// Schema ids used by the prompt templates.
namespace schema {
inline constexpr std::string_view kGlobalContext = "global_context";
inline constexpr std::string_view kLocalContext = "local_context";
inline constexpr std::string_view kCandidates = "candidates";
inline constexpr std::string_view kDimensions = "dimensions";
inline constexpr std::string_view kQuestions = "questions";
inline constexpr std::string_view kAnswers = "answers";
inline constexpr std::string_view kVerification = "verification";
inline constexpr std::string_view kMissReflection = "miss_reflection";
inline constexpr std::string_view kAdvisor = "advisor";
inline constexpr std::string_view kInteractability = "interactability";
}  // namespace schema

bool is_registered_schema(std::string_view schema_id);
std::vector<std::string> registered_schemas();

// Strips markdown code fences and returns the first parseable JSON object or
// array in the text. Throws ParseError carrying the raw text.
nlohmann::json extract_json(std::string_view raw);

// extract_json followed by validation against `schema_id`. The result is
// normalized: optional fields are filled with empty values, scalars given
// where lists are expected are wrapped, and so on. Throws ParseError.
nlohmann::json parse_structured(std::string_view raw,
                                std::string_view schema_id);

// Validation step on its own, for already-extracted JSON.
nlohmann::json validate_structured(const nlohmann::json& value,
                                   std::string_view schema_id,
                                   std::string_view raw = {});

}  // namespace igedet::provider

#endif  // IGEDET_STRUCTURED_H_
