// include/earshot/parallel.h

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

#ifndef EARSHOT_PARALLEL_H_
#define EARSHOT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace earshot {

// Runs fn(i) for i in [0, n) on up to `threads` workers pulling from a
// shared counter. Blocks until all items finish; if any item throws, the
// exception of the lowest failing index is rethrown.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace earshot

#endif  // EARSHOT_PARALLEL_H_
