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

#include "fixtures.hpp"

namespace fixtures {

using namespace mmc;

std::string path(const std::string& name) {
    return std::string(MMC_FIXTURE_DIR) + "/" + name;
}

Market load(const std::string& name) {
    return load_market(path(name));
}

Market recall() { return load("recall.json"); }
Market recall_virtual() { return load("recall_virtual.json"); }
Market two_college_stipend() { return load("two_college_stipend.json"); }
Market lad_drop() { return load("lad_drop.json"); }
Market obs_subs_fail() { return load("obs_subs_fail.json"); }
Market obs_lad_fail() { return load("obs_lad_fail.json"); }
Market obs_subs_fail_market() { return load("obs_subs_fail_market.json"); }
Market recall_plus_unit() { return load("recall_plus_unit.json"); }
Market unit_two_college() { return load("unit_two_college.json"); }

Contract x() { return Contract{"c1", "s1", "0"}; }
Contract xp() { return Contract{"c1", "s1", "1"}; }
Contract y() { return Contract{"c1", "s2", "0"}; }
Contract yp() { return Contract{"c1", "s2", "1"}; }
Contract z() { return Contract{"c1", "s3", "0"}; }
Contract zp() { return Contract{"c1", "s3", "1"}; }

PreferenceProfile recall_prefs_top(const Market& market) {
    return make_profile(market, {{"s1", {xp(), x()}},
                                 {"s2", {yp(), y()}},
                                 {"s3", {zp(), z()}}});
}

PreferenceProfile empty_prefs(const Market& market) {
    return make_profile(market, {});
}

std::vector<std::pair<std::string, Market>> all_markets() {
    std::vector<std::pair<std::string, Market>> out;
    for (const char* name :
         {"recall.json", "recall_virtual.json", "two_college_stipend.json", "lad_drop.json",
          "obs_subs_fail.json", "obs_lad_fail.json", "obs_subs_fail_market.json",
          "recall_plus_unit.json", "unit_two_college.json"})
        out.emplace_back(name, load(name));
    return out;
}

} // namespace fixtures
