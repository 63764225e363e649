// Copyright 2026 The iid Authors
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

namespace iid {

// Base of every exception the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments violate a structural precondition (shape mismatch, wrong channel
// count, non-finite or negative pixel data, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A scalar parameter is outside its legal range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Input is structurally fine but too degenerate to process (all-black image,
// fewer than two usable pixels, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// A file could not be read, parsed, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace iid
