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

#include "mmc/mech.hpp"

#include <algorithm>
#include <random>

namespace mmc {

namespace {

const Contract* assigned(std::span<const Contract> allocation, const std::string& student) {
    for (const auto& c : allocation)
        if (c.student == student)
            return &c;
    return nullptr;
}

// every coalition member strictly prefers, under their true preference,
// the manipulated assignment to the truthful one
bool all_gain(const std::vector<std::string>& coalition, const PreferenceProfile& truth,
              std::span<const Contract> truthful, std::span<const Contract> manipulated) {
    for (const auto& student : coalition) {
        const auto& pref = truth.of(student);
        if (!prefers(pref, assigned(manipulated, student), assigned(truthful, student)))
            return false;
    }
    return true;
}

std::vector<std::vector<std::size_t>> coalitions_up_to(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current;
    auto grow = [&](auto&& self, std::size_t from) -> void {
        if (!current.empty() && current.size() <= k)
            out.push_back(current);
        if (current.size() == k)
            return;
        for (std::size_t i = from; i < n; ++i) {
            current.push_back(i);
            self(self, i + 1);
            current.pop_back();
        }
    };
    grow(grow, 0);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) {
                  return a.size() != b.size() ? a.size() < b.size() : a < b;
              });
    return out;
}

} // namespace

StrategyProofnessReport check_group_strategy_proofness(const Market& market,
                                                       std::size_t max_coalition,
                                                       const ScanOptions& options) {
    if (max_coalition < 1 || max_coalition > market.students().size())
        throw ValidationError("group strategy-proofness: coalition bound must be between 1 and "
                              "the number of students");
    StrategyProofnessReport report;
    report.pass = true;
    report.max_coalition = max_coalition;
    ProfileSpace space = profile_space(market);
    const auto& students = market.students();

    auto coalitions = coalitions_up_to(students.size(), max_coalition);

    // total case count, for the cap
    std::uint64_t total = 0;
    for (const auto& coalition : coalitions) {
        std::uint64_t cases = 1;
        for (std::size_t s = 0; s < students.size(); ++s) {
            std::uint64_t m = space.per_student[s].size();
            bool inside = std::find(coalition.begin(), coalition.end(), s) != coalition.end();
            cases *= inside ? m * m : m;
        }
        total += cases;
    }
    if (!options.sample && total > options.caps.profile_cap && !options.caps.allow_large)
        throw CapacityError("group strategy-proofness: " + std::to_string(total) +
                            " cases exceed the cap; use sampling or allow_large");

    auto inspect = [&](const std::vector<std::size_t>& coalition,
                       std::span<const std::size_t> truth_idx,
                       std::span<const std::size_t> lie_idx,
                       const std::vector<Contract>& truthful_outcome,
                       const PreferenceProfile& truth) {
        PreferenceProfile lie = truth;
        for (std::size_t j = 0; j < coalition.size(); ++j)
            lie.prefs[coalition[j]] = space.per_student[coalition[j]][lie_idx[j]];
        auto manipulated = run_da(market, lie).outcome;
        ++report.cases_checked;
        std::vector<std::string> names;
        for (std::size_t s : coalition)
            names.push_back(students[s]);
        if (all_gain(names, truth, truthful_outcome, manipulated)) {
            report.pass = false;
            report.witness = ManipulationWitness{std::move(names), truth, std::move(lie),
                                                 truthful_outcome, std::move(manipulated)};
            return false;
        }
        (void)truth_idx;
        return true;
    };

    if (options.sample) {
        report.exhaustive = false;
        std::mt19937_64 rng(options.sample->seed);
        for (const auto& coalition : coalitions) {
            for (std::size_t n = 0; n < options.sample->count; ++n) {
                std::vector<std::size_t> truth_idx(students.size());
                for (std::size_t s = 0; s < students.size(); ++s)
                    truth_idx[s] = static_cast<std::size_t>(rng() % space.per_student[s].size());
                std::vector<std::size_t> lie_idx(coalition.size());
                for (std::size_t j = 0; j < coalition.size(); ++j)
                    lie_idx[j] = static_cast<std::size_t>(
                        rng() % space.per_student[coalition[j]].size());
                PreferenceProfile truth = space.at(truth_idx);
                auto truthful_outcome = run_da(market, truth).outcome;
                if (!inspect(coalition, truth_idx, lie_idx, truthful_outcome, truth))
                    return report;
            }
        }
        return report;
    }

    for (const auto& coalition : coalitions) {
        // odometer over full truthful profiles
        std::vector<std::size_t> truth_idx(students.size(), 0);
        for (;;) {
            PreferenceProfile truth = space.at(truth_idx);
            auto truthful_outcome = run_da(market, truth).outcome;
            // odometer over coalition misreports
            std::vector<std::size_t> lie_idx(coalition.size(), 0);
            for (;;) {
                bool same = true;
                for (std::size_t j = 0; j < coalition.size(); ++j)
                    same = same && lie_idx[j] == truth_idx[coalition[j]];
                if (!same &&
                    !inspect(coalition, truth_idx, lie_idx, truthful_outcome, truth))
                    return report;
                std::size_t j = 0;
                while (j < lie_idx.size()) {
                    if (++lie_idx[j] < space.per_student[coalition[j]].size())
                        break;
                    lie_idx[j] = 0;
                    ++j;
                }
                if (j == lie_idx.size())
                    break;
            }
            std::size_t s = 0;
            while (s < truth_idx.size()) {
                if (++truth_idx[s] < space.per_student[s].size())
                    break;
                truth_idx[s] = 0;
                ++s;
            }
            if (s == truth_idx.size())
                break;
        }
    }
    return report;
}

StrategyProofnessReport check_strategy_proofness(const Market& market,
                                                 const ScanOptions& options) {
    auto report = check_group_strategy_proofness(market, 1, options);
    return report;
}

bool replay_manipulation(const Market& market, const ManipulationWitness& witness) {
    auto truthful = run_da(market, witness.truthful_profile).outcome;
    auto manipulated = run_da(market, witness.manipulated_profile).outcome;
    if (truthful != witness.truthful_outcome || manipulated != witness.manipulated_outcome)
        return false;
    return all_gain(witness.coalition, witness.truthful_profile, truthful, manipulated);
}

} // namespace mmc
