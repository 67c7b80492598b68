// Copyright 2026 The privconsensus Authors
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


#ifndef PRIVCONSENSUS_TOOLS_CLI_H_
#define PRIVCONSENSUS_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace privconsensus {

// Exit codes: 0 success, 1 failed run or trace mismatch, 2 bad usage or
// invalid config.
int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_TOOLS_CLI_H_
