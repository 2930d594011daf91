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

#include "mmc/da.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <random>

#include "mmc/audit.hpp"

namespace mmc {

const StudentPreference& PreferenceProfile::of(const std::string& student) const {
    for (const auto& p : prefs)
        if (p.student == student)
            return p;
    throw ValidationError("profile: no preference for student '" + student + "'");
}

PreferenceProfile make_profile(const Market& market,
                               const std::map<std::string, std::vector<Contract>>& lists) {
    PreferenceProfile profile;
    for (const auto& s : market.students()) {
        auto it = lists.find(s);
        profile.prefs.push_back(
            StudentPreference{s, it == lists.end() ? std::vector<Contract>{} : it->second});
    }
    for (const auto& [s, _] : lists)
        if (std::find(market.students().begin(), market.students().end(), s) ==
            market.students().end())
            throw ValidationError("profile: unknown student '" + s + "'");
    return profile;
}

void validate_profile(const Market& market, const PreferenceProfile& profile) {
    std::vector<std::string> problems;
    std::vector<std::string> seen;
    for (const auto& pref : profile.prefs) {
        seen.push_back(pref.student);
        auto check = validate_preference(pref, market);
        for (const auto& v : check.violations)
            problems.push_back(pref.student + ": " + v);
    }
    std::sort(seen.begin(), seen.end());
    if (seen != market.students())
        problems.push_back("profile does not list every market student exactly once");
    if (!problems.empty()) {
        std::string msg = "invalid preference profile";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

std::vector<Contract> DATrace::arrival_order(const std::string& college) const {
    std::vector<Contract> out;
    for (const auto& round : rounds)
        for (const auto& c : round.proposals)
            if (c.college == college)
                out.push_back(c);
    return out;
}

DATrace run_da(const Market& market, const PreferenceProfile& profile) {
    validate_profile(market, profile);
    using Mask = std::uint64_t;
    const auto& universe = market.universe();
    const auto& students = market.students();

    // per student, acceptable universe indices in preference order
    std::vector<std::vector<std::size_t>> wish(students.size());
    for (std::size_t s = 0; s < students.size(); ++s)
        for (const auto& c : profile.of(students[s]).acceptable)
            wish[s].push_back(market.universe_index(c));

    // per college, global index list of its domain (canonical order)
    std::vector<std::vector<std::size_t>> college_domain(market.colleges().size());
    for (std::size_t k = 0; k < market.colleges().size(); ++k)
        for (const auto& c : market.college_contracts(market.colleges()[k]))
            college_domain[k].push_back(market.universe_index(c));

    std::vector<std::size_t> student_of(universe.size());
    for (std::size_t i = 0; i < universe.size(); ++i)
        student_of[i] = static_cast<std::size_t>(
            std::lower_bound(students.begin(), students.end(), universe[i].student) -
            students.begin());

    Mask held = 0, rejected = 0;
    DATrace trace;
    for (;;) {
        DARound round;
        Mask held_students = 0;
        for (std::size_t i = 0; i < universe.size(); ++i)
            if (held & (Mask{1} << i))
                held_students |= Mask{1} << student_of[i];
        Mask proposals = 0;
        for (std::size_t s = 0; s < students.size(); ++s) {
            if (held_students & (Mask{1} << s))
                continue;
            for (std::size_t i : wish[s]) {
                if (!(rejected & (Mask{1} << i))) {
                    proposals |= Mask{1} << i;
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < universe.size(); ++i)
            if (proposals & (Mask{1} << i))
                round.proposals.push_back(universe[i]);

        bool any_rejection = false;
        Mask new_held = 0;
        for (std::size_t k = 0; k < market.colleges().size(); ++k) {
            const auto& college = market.colleges()[k];
            const auto& cf = market.choice_of(college);
            LocalSet offered = 0;
            for (std::size_t local = 0; local < college_domain[k].size(); ++local) {
                Mask bit = Mask{1} << college_domain[k][local];
                if ((held | proposals) & bit)
                    offered |= LocalSet{1} << local;
            }
            LocalSet chosen = cf.choose_mask(offered);
            std::vector<Contract> held_now, rejected_now;
            for (std::size_t local = 0; local < college_domain[k].size(); ++local) {
                std::size_t i = college_domain[k][local];
                if (chosen & (LocalSet{1} << local)) {
                    new_held |= Mask{1} << i;
                    held_now.push_back(universe[i]);
                } else if (offered & (LocalSet{1} << local)) {
                    rejected |= Mask{1} << i;
                    rejected_now.push_back(universe[i]);
                    any_rejection = true;
                }
            }
            round.held[college] = std::move(held_now);
            round.rejected[college] = std::move(rejected_now);
        }
        held = new_held;
        trace.rounds.push_back(std::move(round));
        if (!any_rejection)
            break;
    }
    for (std::size_t i = 0; i < universe.size(); ++i)
        if (held & (Mask{1} << i))
            trace.outcome.push_back(universe[i]);
    return trace;
}

namespace {

// contract of the student inside the allocation, if any
const Contract* assigned(std::span<const Contract> allocation, const std::string& student) {
    for (const auto& c : allocation)
        if (c.student == student)
            return &c;
    return nullptr;
}

} // namespace

StabilityVerdict stability_verdict(std::span<const Contract> allocation, const Market& market,
                                   const PreferenceProfile& profile) {
    validate_profile(market, profile);
    for (const auto& c : allocation)
        if (!market.has_contract(c))
            throw ValidationError("allocation: contract " + c.id() + " is not in the universe");
    for (std::size_t i = 0; i < allocation.size(); ++i)
        for (std::size_t j = i + 1; j < allocation.size(); ++j)
            if (allocation[i].student == allocation[j].student)
                throw ValidationError("allocation: two contracts of student '" +
                                      allocation[i].student + "'");

    StabilityVerdict verdict;
    // individual rationality: colleges keep exactly what they hold
    for (const auto& college : market.colleges()) {
        const auto& cf = market.choice_of(college);
        std::vector<Contract> held;
        for (const auto& c : allocation)
            if (c.college == college)
                held.push_back(c);
        auto chosen = cf.choose(held);
        if (chosen != canonical_sorted(held, market.order())) {
            verdict.kind = StabilityVerdict::Kind::ir_violation;
            verdict.ir = IrViolation{"college", college, std::nullopt,
                                     canonical_sorted(held, market.order()), chosen};
            return verdict;
        }
    }
    // ... and every student accepts their contract
    for (const auto& c : canonical_sorted(std::vector<Contract>(allocation.begin(),
                                                                allocation.end()),
                                          market.order())) {
        if (!profile.of(c.student).accepts(c)) {
            verdict.kind = StabilityVerdict::Kind::ir_violation;
            verdict.ir = IrViolation{"student", c.college, c, {}, {}};
            return verdict;
        }
    }

    // block search: per college, coalitions of weakly preferred contracts
    for (const auto& college : market.colleges()) {
        const auto& cf = market.choice_of(college);
        auto domain = market.college_contracts(college);
        std::vector<Contract> held;
        for (const auto& c : allocation)
            if (c.college == college)
                held.push_back(c);
        LocalSet held_mask = cf.mask_of(held);

        // candidate contracts per student: weakly preferred to the
        // student's current assignment (acceptable, when unassigned)
        std::vector<std::vector<int>> per_student;
        std::vector<std::string> coalition_students;
        for (const auto& student : market.students()) {
            std::vector<int> mine;
            const Contract* current = assigned(allocation, student);
            const auto& pref = profile.of(student);
            for (std::size_t i = 0; i < domain.size(); ++i) {
                if (domain[i].student != student)
                    continue;
                if (current != nullptr && domain[i] == *current)
                    mine.push_back(static_cast<int>(i));
                else if (prefers(pref, &domain[i], current))
                    mine.push_back(static_cast<int>(i));
            }
            if (!mine.empty()) {
                coalition_students.push_back(student);
                per_student.push_back(std::move(mine));
            }
        }
        // odometer over one-or-none choices per student, lexicographic
        std::vector<int> pick(per_student.size(), -1);
        for (;;) {
            LocalSet coalition = 0;
            for (std::size_t s = 0; s < per_student.size(); ++s)
                if (pick[s] >= 0)
                    coalition |= LocalSet{1} << per_student[s][static_cast<std::size_t>(pick[s])];
            if (coalition != held_mask &&
                cf.choose_mask(held_mask | coalition) == coalition) {
                verdict.kind = StabilityVerdict::Kind::blocked;
                verdict.block = BlockWitness{college, cf.contracts_of(coalition)};
                return verdict;
            }
            std::size_t s = 0;
            while (s < pick.size()) {
                if (++pick[s] < static_cast<int>(per_student[s].size()))
                    break;
                pick[s] = -1;
                ++s;
            }
            if (s == pick.size())
                break;
        }
    }
    return verdict;
}

std::vector<std::vector<Contract>> enumerate_stable(const Market& market,
                                                    const PreferenceProfile& profile,
                                                    const Caps& caps) {
    if (market.universe().size() > caps.effective_set_cap())
        throw CapacityError("enumerate_stable: universe has " +
                            std::to_string(market.universe().size()) + " contracts, cap is " +
                            std::to_string(caps.effective_set_cap()));
    validate_profile(market, profile);
    std::vector<std::vector<Contract>> per_student;
    for (const auto& s : market.students())
        per_student.push_back(market.student_contracts(s));

    std::vector<std::vector<Contract>> stable;
    std::vector<int> pick(per_student.size(), -1);
    for (;;) {
        std::vector<Contract> allocation;
        for (std::size_t s = 0; s < per_student.size(); ++s)
            if (pick[s] >= 0)
                allocation.push_back(per_student[s][static_cast<std::size_t>(pick[s])]);
        allocation = canonical_sorted(std::move(allocation), market.order());
        if (stability_verdict(allocation, market, profile).stable())
            stable.push_back(allocation);
        std::size_t s = 0;
        while (s < pick.size()) {
            if (++pick[s] < static_cast<int>(per_student[s].size()))
                break;
            pick[s] = -1;
            ++s;
        }
        if (s == pick.size())
            break;
    }
    return stable;
}

ProfileSpace profile_space(const Market& market) {
    ProfileSpace space;
    for (const auto& s : market.students()) {
        space.per_student.push_back(enumerate_monotone_preferences(s, market));
        std::uint64_t n = space.per_student.back().size();
        // saturate so cap checks stay meaningful on absurd inputs
        if (n != 0 && space.total > std::numeric_limits<std::uint64_t>::max() / n)
            space.total = std::numeric_limits<std::uint64_t>::max();
        else
            space.total *= n;
    }
    return space;
}

PreferenceProfile ProfileSpace::at(std::span<const std::size_t> indices) const {
    PreferenceProfile profile;
    for (std::size_t s = 0; s < per_student.size(); ++s)
        profile.prefs.push_back(per_student[s][indices[s]]);
    return profile;
}

DAStabilityReport check_da_stability(const Market& market, const ScanOptions& options) {
    DAStabilityReport report;
    report.pass = true;
    ProfileSpace space = profile_space(market);

    auto inspect = [&](std::span<const std::size_t> indices) {
        PreferenceProfile profile = space.at(indices);
        DATrace trace = run_da(market, profile);
        ++report.profiles_checked;
        auto verdict = stability_verdict(trace.outcome, market, profile);
        if (!verdict.stable()) {
            report.pass = false;
            report.witness_profile = std::move(profile);
            report.witness_outcome = trace.outcome;
            report.witness_verdict = std::move(verdict);
            return false;
        }
        return true;
    };

    if (options.sample) {
        report.exhaustive = false;
        std::mt19937_64 rng(options.sample->seed);
        std::vector<std::size_t> indices(space.per_student.size());
        for (std::size_t n = 0; n < options.sample->count; ++n) {
            for (std::size_t s = 0; s < indices.size(); ++s)
                indices[s] = static_cast<std::size_t>(rng() % space.per_student[s].size());
            if (!inspect(indices))
                return report;
        }
        return report;
    }

    if (space.total > options.caps.profile_cap && !options.caps.allow_large)
        throw CapacityError("check_da_stability: " + std::to_string(space.total) +
                            " profiles exceed the cap; use sampling or allow_large");
    std::vector<std::size_t> indices(space.per_student.size(), 0);
    for (;;) {
        if (!inspect(indices))
            return report;
        std::size_t s = 0;
        while (s < indices.size()) {
            if (++indices[s] < space.per_student[s].size())
                break;
            indices[s] = 0;
            ++s;
        }
        if (s == indices.size())
            break;
        if (indices.empty())
            break;
    }
    return report;
}

RuralHospitalsReport check_rural_hospitals(const Market& market,
                                           const PreferenceProfile& profile, const Caps& caps) {
    RuralHospitalsReport report;
    for (const auto& college : market.colleges()) {
        auto subs = check_substitutes(market.choice_of(college), market.order(), caps);
        auto lad = check_lad(market.choice_of(college), market.order(), caps);
        if (!subs.pass)
            report.notes.push_back("precondition: contracts are not substitutes for '" +
                                   college + "'");
        if (!lad.pass)
            report.notes.push_back("precondition: aggregate demand is not monotone for '" +
                                   college + "'");
    }
    auto stable = enumerate_stable(market, profile, caps);
    report.stable_count = stable.size();
    report.pass = true;
    if (stable.empty())
        return report;

    auto matched_students = [](const std::vector<Contract>& allocation) {
        std::vector<std::string> out;
        for (const auto& c : allocation)
            out.push_back(c.student);
        std::sort(out.begin(), out.end());
        return out;
    };
    auto college_counts = [&market](const std::vector<Contract>& allocation) {
        std::map<std::string, std::size_t> out;
        for (const auto& college : market.colleges())
            out[college] = 0;
        for (const auto& c : allocation)
            ++out[c.college];
        return out;
    };
    auto students0 = matched_students(stable.front());
    auto counts0 = college_counts(stable.front());
    for (std::size_t i = 1; i < stable.size(); ++i) {
        if (matched_students(stable[i]) != students0 || college_counts(stable[i]) != counts0) {
            report.pass = false;
            report.witness = std::make_pair(stable.front(), stable[i]);
            return report;
        }
    }
    return report;
}

} // namespace mmc
