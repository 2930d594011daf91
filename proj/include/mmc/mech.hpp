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

#ifndef MMC_MECH_HPP
#define MMC_MECH_HPP

#include <optional>
#include <string>
#include <vector>

#include "mmc/da.hpp"
#include "mmc/market.hpp"

namespace mmc {

// A coalition misreport after which every member holds a contract they
// strictly prefer, under their true preference, to their truthful one.
struct ManipulationWitness {
    std::vector<std::string> coalition;
    PreferenceProfile truthful_profile;
    PreferenceProfile manipulated_profile; // differs only inside the coalition
    std::vector<Contract> truthful_outcome;
    std::vector<Contract> manipulated_outcome;
};

struct StrategyProofnessReport {
    bool pass = false;
    std::size_t max_coalition = 1;
    std::uint64_t cases_checked = 0;
    bool exhaustive = true;
    std::optional<ManipulationWitness> witness;
};

// Deferred acceptance under the market's profile, scanned over every
// student, every profile of the others, every true preference and every
// misreport - all drawn from the monotone domain.
StrategyProofnessReport check_strategy_proofness(const Market& market,
                                                 const ScanOptions& options = {});

// Extends the scan to coalitions up to max_coalition with joint
// misreports; passes when in every case some member fails to gain
// strictly.
StrategyProofnessReport check_group_strategy_proofness(const Market& market,
                                                       std::size_t max_coalition,
                                                       const ScanOptions& options = {});

// True when every coalition member strictly gains; the replay check for
// ManipulationWitness.
bool replay_manipulation(const Market& market, const ManipulationWitness& witness);

} // namespace mmc

#endif
