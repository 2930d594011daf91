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

#ifndef MMC_DA_HPP
#define MMC_DA_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmc/market.hpp"
#include "mmc/options.hpp"

namespace mmc {

// One canonical preference per market student, sorted by student id.
struct PreferenceProfile {
    std::vector<StudentPreference> prefs;

    const StudentPreference& of(const std::string& student) const;
    friend bool operator==(const PreferenceProfile&, const PreferenceProfile&) = default;
};

// Builds a complete profile; students absent from the map get an empty
// acceptable list.
PreferenceProfile make_profile(const Market& market,
                               const std::map<std::string, std::vector<Contract>>& lists);

// Throws ValidationError with the collected violations when any
// preference is invalid for the market.
void validate_profile(const Market& market, const PreferenceProfile& profile);

struct DARound {
    std::vector<Contract> proposals; // new proposals this round
    std::map<std::string, std::vector<Contract>> held;     // per college, after choosing
    std::map<std::string, std::vector<Contract>> rejected; // per college, newly rejected
};

struct DATrace {
    std::vector<DARound> rounds;
    std::vector<Contract> outcome;

    // All proposals made to the college, in arrival order (round by
    // round, canonical within a round).
    std::vector<Contract> arrival_order(const std::string& college) const;
};

// Student-proposing deferred acceptance with simultaneous rounds: every
// unheld student proposes their best acceptable unrejected contract,
// each college chooses from held + new proposals, unchosen contracts are
// rejected for good. Stops on the first round without a rejection.
DATrace run_da(const Market& market, const PreferenceProfile& profile);

struct BlockWitness {
    std::string college;
    std::vector<Contract> coalition; // Z with Z = Ch(Y + Z), Z != Y_c
};

struct IrViolation {
    std::string kind; // "college" | "student"
    std::string college;
    std::optional<Contract> contract;  // unacceptable held contract
    std::vector<Contract> held;        // Y_c
    std::vector<Contract> chosen;      // Ch(Y_c) != Y_c
};

struct StabilityVerdict {
    enum class Kind { stable, ir_violation, blocked };
    Kind kind = Kind::stable;
    std::optional<IrViolation> ir;
    std::optional<BlockWitness> block;

    bool stable() const { return kind == Kind::stable; }
};

// Individual rationality plus an exhaustive block search over per-college
// coalitions of weakly preferred contracts; deterministic first witness.
StabilityVerdict stability_verdict(std::span<const Contract> allocation, const Market& market,
                                   const PreferenceProfile& profile);

// All stable allocations, scanning every allocation inside the universe.
std::vector<std::vector<Contract>> enumerate_stable(const Market& market,
                                                    const PreferenceProfile& profile,
                                                    const Caps& caps = {});

struct DAStabilityReport {
    bool pass = false;
    std::size_t profiles_checked = 0;
    bool exhaustive = true;
    std::optional<PreferenceProfile> witness_profile;
    std::optional<std::vector<Contract>> witness_outcome;
    std::optional<StabilityVerdict> witness_verdict;
};

// Runs deferred acceptance on every monotone preference profile (or a
// seeded sample) and checks stability of each outcome.
DAStabilityReport check_da_stability(const Market& market, const ScanOptions& options = {});

struct RuralHospitalsReport {
    bool pass = false;
    std::size_t stable_count = 0;
    std::vector<std::string> notes;
    // two stable allocations with different matched students or counts
    std::optional<std::pair<std::vector<Contract>, std::vector<Contract>>> witness;
};

// Checks that the matched-student set and per-college counts agree
// across all stable allocations of the given profile. The substitutes +
// aggregate-demand preconditions are audited and reported in notes.
RuralHospitalsReport check_rural_hospitals(const Market& market,
                                           const PreferenceProfile& profile,
                                           const Caps& caps = {});

// Each student's enumerated preference list plus odometer helpers; the
// shared basis of every whole-profile scan.
struct ProfileSpace {
    std::vector<std::vector<StudentPreference>> per_student; // aligned with market.students()
    std::uint64_t total = 1;

    PreferenceProfile at(std::span<const std::size_t> indices) const;
};
ProfileSpace profile_space(const Market& market);

} // namespace mmc

#endif
