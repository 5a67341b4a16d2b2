// include/earshot/error.h

// Copyright 2026  The earshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef EARSHOT_ERROR_H_
#define EARSHOT_ERROR_H_

#include <stdexcept>
#include <string>

namespace earshot {

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, violated preconditions, schema violations. The CLI maps
// these to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Missing, unreadable, unwritable, or malformed files. Also exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace earshot

#endif  // EARSHOT_ERROR_H_
