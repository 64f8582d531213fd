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
#ifndef IGEDET_ERRORS_H_
#define IGEDET_ERRORS_H_

#include <stdexcept>
#include <string>

namespace igedet {

// Broad classes used by the command-line front-end to pick an exit code.
enum class ErrorClass { kUsage, kData, kProvider };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

#define IGEDET_DEFINE_ERROR(Name, Class)                          \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what)                        \
        : Error(ErrorClass::Class, std::string(#Name ": ") + what) {} \
  };

// Configuration / usage.
IGEDET_DEFINE_ERROR(UsageError, kUsage)
IGEDET_DEFINE_ERROR(TemplateError, kUsage)
IGEDET_DEFINE_ERROR(DomainError, kUsage)

// Data ingestion and evaluation inputs.
IGEDET_DEFINE_ERROR(MissingFile, kData)
IGEDET_DEFINE_ERROR(SchemaError, kData)
IGEDET_DEFINE_ERROR(BoundsError, kData)
IGEDET_DEFINE_ERROR(MissingCounterparts, kData)
IGEDET_DEFINE_ERROR(EmptyFold, kData)
IGEDET_DEFINE_ERROR(InconsistentFlags, kData)
IGEDET_DEFINE_ERROR(FoldMismatch, kData)
IGEDET_DEFINE_ERROR(CropError, kData)

// Model providers.
IGEDET_DEFINE_ERROR(TransportError, kProvider)
IGEDET_DEFINE_ERROR(RateLimited, kProvider)
IGEDET_DEFINE_ERROR(ReplayMiss, kProvider)
IGEDET_DEFINE_ERROR(ProtocolError, kProvider)
IGEDET_DEFINE_ERROR(DimensionMismatch, kProvider)
IGEDET_DEFINE_ERROR(ZeroVector, kProvider)

#undef IGEDET_DEFINE_ERROR

// Structured-output failure. Keeps the raw model text so callers can log it
// or feed it back into a re-ask.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(ErrorClass::kProvider, "ParseError: " + what),
        raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace igedet

#endif  // IGEDET_ERRORS_H_
