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

#ifndef MMC_TESTS_FIXTURES_HPP
#define MMC_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "mmc/da.hpp"
#include "mmc/io.hpp"
#include "mmc/market.hpp"

namespace fixtures {

std::string path(const std::string& name);
mmc::Market load(const std::string& name);

// the single-college market whose college wants to recall rejections,
// and its substitutable twin
mmc::Market recall();
mmc::Market recall_virtual();
mmc::Market two_college_stipend();
mmc::Market lad_drop();
mmc::Market obs_subs_fail();
mmc::Market obs_lad_fail();
mmc::Market obs_subs_fail_market();
mmc::Market recall_plus_unit();
mmc::Market unit_two_college();

// the six recall-market contracts; xp/yp/zp are the stipend variants
mmc::Contract x();
mmc::Contract xp();
mmc::Contract y();
mmc::Contract yp();
mmc::Contract z();
mmc::Contract zp();

// each student ranks the stipend contract first
mmc::PreferenceProfile recall_prefs_top(const mmc::Market& market);
mmc::PreferenceProfile empty_prefs(const mmc::Market& market);

// every market in the corpus, for fixture-wide property tests
std::vector<std::pair<std::string, mmc::Market>> all_markets();

} // namespace fixtures

#endif
