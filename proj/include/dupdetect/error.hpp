// Copyright 2026 The dupdetect authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dupdetect {

// Error classes map 1:1 onto CLI exit codes (see tools/dupdetect.cpp).
enum class ErrorClass {
  argument,  // bad flag or parameter value
  io,        // missing file, unreadable/unwritable path
  format,    // malformed or truncated file content
  config,    // inconsistent configuration (dim mismatch, missing credential)
  domain,    // math domain violation (zero-norm vector)
  data,      // dataset does not support the requested operation
};

inline const char* to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::argument: return "argument";
    case ErrorClass::io: return "io";
    case ErrorClass::format: return "format";
    case ErrorClass::config: return "config";
    case ErrorClass::domain: return "domain";
    case ErrorClass::data: return "data";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorClass klass, const std::string& msg)
      : std::runtime_error(msg), klass_(klass) {}
  ErrorClass klass() const { return klass_; }

 private:
  ErrorClass klass_;
};

inline Error argument_error(const std::string& msg) { return Error(ErrorClass::argument, msg); }
inline Error io_error(const std::string& msg) { return Error(ErrorClass::io, msg); }
inline Error format_error(const std::string& msg) { return Error(ErrorClass::format, msg); }
inline Error config_error(const std::string& msg) { return Error(ErrorClass::config, msg); }
inline Error domain_error(const std::string& msg) { return Error(ErrorClass::domain, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorClass::data, msg); }

}  // namespace dupdetect
