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

#ifndef MMC_AUDIT_HPP
#define MMC_AUDIT_HPP

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmc/choice.hpp"
#include "mmc/core.hpp"
#include "mmc/options.hpp"

namespace mmc {

// Witnesses carry the concrete sets instantiating a violated quantifier;
// replaying one against the choice function reproduces the violation.

struct IrcWitness {
    std::vector<Contract> base;        // Y
    Contract added;                    // x, rejected from Y + x
    std::vector<Contract> choice_base; // Ch(Y)
    std::vector<Contract> choice_with; // Ch(Y + x) != Ch(Y)
};

struct SubstitutesWitness {
    std::vector<Contract> base;         // Y
    Contract retained;                  // x in Ch(Y + x + z)
    Contract removed;                   // z
    std::vector<Contract> choice_large; // Ch(Y + x + z)
    std::vector<Contract> choice_small; // Ch(Y + x), missing x
};

struct LadWitness {
    std::vector<Contract> subset;   // Z
    std::vector<Contract> superset; // Y
    std::size_t chosen_subset;
    std::size_t chosen_superset; // < chosen_subset
};

// Violation at the last step of an observable sequence generated from
// monotone preferences: either rejections fail to nest or the number of
// chosen contracts drops.
struct SequenceWitness {
    std::string axiom; // "observable_substitutes" | "observable_lad"
    std::vector<Contract> sequence;
    std::vector<Contract> rejected_before; // R of the prefix without the last element
    std::vector<Contract> rejected_after;
    std::size_t chosen_before = 0;
    std::size_t chosen_after = 0;
};

struct MonotoneChoiceWitness {
    std::vector<Contract> offered;
    std::vector<Contract> chosen; // not a subset of floor
    std::vector<Contract> floor;  // offered^min
};

struct DemandInvarianceWitness {
    std::vector<Contract> subset;   // Z, extended only at chosen students
    std::vector<Contract> superset; // Y
    std::vector<std::string> students_subset;   // Ch(Z) students
    std::vector<std::string> students_superset; // Ch(Y) students, different
};

using AuditWitness = std::variant<IrcWitness, SubstitutesWitness, LadWitness,
                                  SequenceWitness, MonotoneChoiceWitness,
                                  DemandInvarianceWitness>;

struct AuditReport {
    std::string axiom;
    std::string college;
    bool pass = false;
    std::optional<AuditWitness> witness;
    std::vector<std::string> notes;
};

// True when the witness still violates its axiom under cf.
bool replay_witness(const ChoiceFunction& cf, const AuditWitness& witness,
                    const TermOrder& order);

// Set axioms, discharged over every subset of the domain.
AuditReport check_irc(const ChoiceFunction& cf, const TermOrder& order, const Caps& caps = {});
AuditReport check_substitutes(const ChoiceFunction& cf, const TermOrder& order,
                              const Caps& caps = {});
AuditReport check_lad(const ChoiceFunction& cf, const TermOrder& order, const Caps& caps = {});
AuditReport check_monotone_choice(const ChoiceFunction& cf, const TermOrder& order,
                                  const Caps& caps = {});
AuditReport check_demand_invariance(const ChoiceFunction& cf, const TermOrder& order,
                                    const Caps& caps = {});

// Both sequence invariants: every prefix chooses nobody who proposes
// next, and better terms of the same student always arrive first.
// Sequences with duplicates are never observable.
bool is_observable_sequence(const ChoiceFunction& cf, std::span<const Contract> sequence,
                            const TermOrder& order);

// Sequence axioms, discharged over every observable sequence generated
// from monotone preferences (enumerated as a graph over reachable sets).
AuditReport check_observable_substitutes(const ChoiceFunction& cf, const TermOrder& order,
                                         const Caps& caps = {});
AuditReport check_observable_lad(const ChoiceFunction& cf, const TermOrder& order,
                                 const Caps& caps = {});

// Every set reachable by an observable sequence inside `within` that
// admits no further addition. Distinct dead ends mean the maximal
// observable subset is ambiguous.
std::vector<std::vector<Contract>> observable_deadends(const ChoiceFunction& cf,
                                                       std::span<const Contract> within,
                                                       const TermOrder& order);

struct AmbiguityError : Error {
    AmbiguityError(std::string msg, std::vector<Contract> a, std::vector<Contract> b)
        : Error(std::move(msg)), first(std::move(a)), second(std::move(b)) {}
    std::vector<Contract> first;
    std::vector<Contract> second;
};

enum class ObsCheck {
    greedy_only, // trust observable substitutability, skip the cross-check
    enumerate,   // also enumerate dead ends and flag ambiguity
};

// Greedy maximal observable subset of Y. Unique whenever contracts are
// observable substitutes; in enumerate mode any second distinct dead end
// raises AmbiguityError instead of silently picking one.
std::vector<Contract> maximal_observable_subset(const ChoiceFunction& cf,
                                                std::span<const Contract> Y,
                                                const TermOrder& order,
                                                ObsCheck check = ObsCheck::enumerate);

} // namespace mmc

#endif
