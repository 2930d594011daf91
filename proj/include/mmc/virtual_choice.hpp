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

#ifndef MMC_VIRTUAL_CHOICE_HPP
#define MMC_VIRTUAL_CHOICE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmc/audit.hpp"
#include "mmc/da.hpp"
#include "mmc/market.hpp"

namespace mmc {

// The virtual choice function of cf: for each offer Y, take the upward
// closure U(Y), its maximal observable subset Yv, and return the worst
// contracts in Y of the students chosen from Yv. Under observable
// substitutability Yv is unique; when dead ends differ but every one of
// them selects the same students (the demand-invariant case) the
// construction is still well defined and proceeds. Otherwise
// AmbiguityError. The output is monotone in contract terms by
// construction.
TabulatedChoice virtual_choice(const ChoiceFunction& cf, const TermOrder& order,
                               const Caps& caps = {});

struct DivergenceWitness {
    PreferenceProfile profile;
    std::vector<Contract> outcome_a;
    std::vector<Contract> outcome_b;
};

struct EquivalenceReport {
    bool equivalent = false;
    std::size_t profiles_checked = 0;
    bool exhaustive = true;
    std::optional<DivergenceWitness> witness;
};

// Deferred-acceptance equivalence of two choice profiles over a shared
// skeleton: equal outcomes on every monotone preference profile checked.
EquivalenceReport check_da_equivalence(const Market& a, const Market& b,
                                       const ScanOptions& options = {});

struct MembershipReport {
    bool member = false;
    // per-college sequence audits of the original profile
    std::vector<AuditReport> observable_substitutes;
    std::vector<AuditReport> observable_lad;
    // audits of the constructed virtual profile (only when member)
    std::vector<AuditReport> virtual_substitutes;
    std::vector<AuditReport> virtual_lad;
    std::vector<AuditReport> virtual_monotone;
    // verify mode only
    std::optional<EquivalenceReport> equivalence;
    std::optional<DAStabilityReport> da_stability;
};

// Membership in the domain of profiles admitting a stable and
// group-strategy-proof mechanism: every college passes both sequence
// audits. On membership the virtual profile is constructed and audited;
// verify mode additionally discharges equivalence and stability of
// deferred acceptance over the whole profile space.
MembershipReport classify_profile(const Market& market, bool verify = false,
                                  const ScanOptions& options = {});

// The market with every college's choice function replaced by its
// virtual choice function.
Market virtualize(const Market& market, const Caps& caps = {});

} // namespace mmc

#endif
