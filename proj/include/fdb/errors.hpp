// Copyright (c) 2026 fdbench contributors.
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

namespace fdb {

// Error taxonomy shared by every module. The CLI maps these onto exit
// codes: validation-type failures -> 1, backend failures -> 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error { using Error::Error; };
struct DecodeError : Error { using Error::Error; };
struct InvalidParam : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct BackendError : Error { using Error::Error; };
struct BackendTimeout : BackendError { using BackendError::BackendError; };

}  // namespace fdb
