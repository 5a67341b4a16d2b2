// include/earshot/cli.h

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

#ifndef EARSHOT_CLI_H_
#define EARSHOT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "earshot/corpus.h"
#include "earshot/features.h"

namespace earshot {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

// Runs the command line `args` (args[0] is the program name). Never throws.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Computes features for every utterance in the corpus. Work is split per
// source recording; results land in manifest order regardless of threads.
void AttachFeatures(Corpus& corpus, const FeatureConfig& config, int threads);

// Feature table, one row per utterance in manifest order.
std::string FeaturesCsv(const Corpus& corpus);

}  // namespace earshot

#endif  // EARSHOT_CLI_H_
