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

#include "mmc/virtual_choice.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>

namespace mmc {

TabulatedChoice virtual_choice(const ChoiceFunction& cf, const TermOrder& order,
                               const Caps& caps) {
    if (cf.size() > caps.effective_tabulate_cap())
        throw CapacityError("virtual_choice: college '" + cf.college() + "' has " +
                            std::to_string(cf.size()) + " contracts, cap is " +
                            std::to_string(caps.effective_tabulate_cap()));
    const std::size_t n = cf.size();
    std::vector<LocalSet> table(std::size_t{1} << n);
    // chosen students are a function of the upward closure; memoize it
    std::map<LocalSet, LocalSet> chosen_students_of_closure;

    for (std::size_t y = 0; y < table.size(); ++y) {
        LocalSet offer = static_cast<LocalSet>(y);
        LocalSet closure = upper_mask(cf, offer, order);
        auto memo = chosen_students_of_closure.find(closure);
        LocalSet chosen_students;
        if (memo != chosen_students_of_closure.end()) {
            chosen_students = memo->second;
        } else {
            auto deadends = observable_deadends(cf, cf.contracts_of(closure), order);
            bool first = true;
            for (const auto& deadend : deadends) {
                LocalSet students = 0;
                LocalSet chosen = cf.choose_mask(cf.mask_of(deadend));
                while (chosen) {
                    std::size_t i = static_cast<std::size_t>(std::countr_zero(chosen));
                    students |= cf.student_mask(i);
                    chosen &= chosen - 1;
                }
                if (first) {
                    chosen_students = students;
                    first = false;
                } else if (students != chosen_students) {
                    // distinct maximal observable subsets that disagree on
                    // whom they select: the construction is ill defined
                    throw AmbiguityError("virtual_choice: college '" + cf.college() +
                                             "' has ambiguous maximal observable subsets",
                                         deadends.front(), deadend);
                }
            }
            if (first)
                chosen_students = 0;
            chosen_students_of_closure.emplace(closure, chosen_students);
        }
        table[y] = worst_mask(cf, offer, order) & chosen_students;
    }
    return TabulatedChoice(cf.college(), cf.domain(), std::move(table), order, "virtual");
}

Market virtualize(const Market& market, const Caps& caps) {
    std::vector<ChoiceFunction> profile;
    for (const auto& college : market.colleges())
        profile.push_back(
            virtual_choice(market.choice_of(college), market.order(), caps)
                .to_choice(market.order()));
    return Market(market.order(), market.colleges(), market.students(), market.universe(),
                  std::move(profile));
}

EquivalenceReport check_da_equivalence(const Market& a, const Market& b,
                                       const ScanOptions& options) {
    if (!Market::same_skeleton(a, b))
        throw ValidationError("check_da_equivalence: the markets differ in participants, "
                              "terms or universe");
    EquivalenceReport report;
    report.equivalent = true;
    ProfileSpace space = profile_space(a);

    auto inspect = [&](std::span<const std::size_t> indices) {
        PreferenceProfile profile = space.at(indices);
        auto outcome_a = run_da(a, profile).outcome;
        auto outcome_b = run_da(b, profile).outcome;
        ++report.profiles_checked;
        if (outcome_a != outcome_b) {
            report.equivalent = false;
            report.witness =
                DivergenceWitness{std::move(profile), std::move(outcome_a), std::move(outcome_b)};
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
        throw CapacityError("check_da_equivalence: " + std::to_string(space.total) +
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
    }
    return report;
}

MembershipReport classify_profile(const Market& market, bool verify,
                                  const ScanOptions& options) {
    MembershipReport report;
    report.member = true;
    for (const auto& college : market.colleges()) {
        const auto& cf = market.choice_of(college);
        report.observable_substitutes.push_back(
            check_observable_substitutes(cf, market.order(), options.caps));
        report.observable_lad.push_back(check_observable_lad(cf, market.order(), options.caps));
        if (!report.observable_substitutes.back().pass || !report.observable_lad.back().pass)
            report.member = false;
    }
    if (!report.member)
        return report;
    // construct the virtual profile and audit the promised axioms on it
    std::vector<ChoiceFunction> virtual_profile;
    for (const auto& college : market.colleges()) {
        auto virt = virtual_choice(market.choice_of(college), market.order(), options.caps)
                        .to_choice(market.order());
        report.virtual_substitutes.push_back(
            check_substitutes(virt, market.order(), options.caps));
        report.virtual_lad.push_back(check_lad(virt, market.order(), options.caps));
        report.virtual_monotone.push_back(
            check_monotone_choice(virt, market.order(), options.caps));
        virtual_profile.push_back(std::move(virt));
    }
    for (const auto& r : report.virtual_substitutes)
        report.member = report.member && r.pass;
    for (const auto& r : report.virtual_lad)
        report.member = report.member && r.pass;
    if (verify) {
        Market virtual_market(market.order(), market.colleges(), market.students(),
                              market.universe(), std::move(virtual_profile));
        report.equivalence = check_da_equivalence(market, virtual_market, options);
        report.da_stability = check_da_stability(market, options);
        report.member = report.member && report.equivalence->equivalent &&
                        report.da_stability->pass;
    }
    return report;
}

} // namespace mmc
