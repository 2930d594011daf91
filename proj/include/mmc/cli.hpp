// Copyright 2025 the mmc authors
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

#ifndef MMC_CLI_HPP
#define MMC_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace mmc {

// Exit codes: 0 pass/success, 1 violation found, 2 usage or validation
// error, 3 capacity error. The machine-readable report lands on `out`
// (or the --out file); diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mmc

#endif
