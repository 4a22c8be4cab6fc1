/* Copyright 2026 The pqdvqc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <stdexcept>
#include <string>

namespace pqdvqc {

// Mirrors pqdvqc_status in pqdvqc.h; values must stay in sync.
enum class ErrorCode {
  kArgument = 1,
  kConfig = 2,
  kCapacity = 3,
  kIo = 4,
  kParse = 5,
  kTraining = 6,
  kLoad = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define PQDVQC_DEFINE_ERROR(Name, Code)               \
  class Name : public Error {                         \
   public:                                            \
    explicit Name(const std::string& what)            \
        : Error(ErrorCode::Code, what) {}             \
  };

PQDVQC_DEFINE_ERROR(ArgumentError, kArgument)
PQDVQC_DEFINE_ERROR(ConfigError, kConfig)
PQDVQC_DEFINE_ERROR(CapacityError, kCapacity)
PQDVQC_DEFINE_ERROR(IoError, kIo)
PQDVQC_DEFINE_ERROR(ParseError, kParse)
PQDVQC_DEFINE_ERROR(TrainingError, kTraining)
PQDVQC_DEFINE_ERROR(LoadError, kLoad)

#undef PQDVQC_DEFINE_ERROR

}  // namespace pqdvqc
