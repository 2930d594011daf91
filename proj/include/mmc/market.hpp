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

#ifndef MMC_MARKET_HPP
#define MMC_MARKET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmc/choice.hpp"
#include "mmc/core.hpp"

namespace mmc {

// The static game form: colleges, students, ordered terms, the contract
// universe, and one choice function per college. Immutable once built.
class Market {
  public:
    Market(TermOrder order, std::vector<std::string> colleges,
           std::vector<std::string> students, std::vector<Contract> universe,
           std::vector<ChoiceFunction> profile);

    const TermOrder& order() const { return order_; }
    const std::vector<std::string>& colleges() const { return colleges_; }
    const std::vector<std::string>& students() const { return students_; }
    const std::vector<Contract>& universe() const { return universe_; }

    const ChoiceFunction& choice_of(const std::string& college) const;
    const std::vector<ChoiceFunction>& profile() const { return profile_; }

    bool has_contract(const Contract& c) const;
    std::size_t universe_index(const Contract& c) const;
    std::vector<Contract> student_contracts(const std::string& student) const;
    std::vector<Contract> college_contracts(const std::string& college) const;

    // colleges() and students() are sorted; the universe is canonically
    // sorted, so masks over universe indices are reproducible.
    std::uint64_t universe_mask() const;

    // Same skeleton = same order, participants and universe; choice
    // profiles may differ.
    static bool same_skeleton(const Market& a, const Market& b);

  private:
    TermOrder order_;
    std::vector<std::string> colleges_;
    std::vector<std::string> students_;
    std::vector<Contract> universe_;
    std::vector<ChoiceFunction> profile_;
    std::map<std::string, std::size_t> college_index_;
};

struct PreferenceCheck {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Reports every invariant violation of a canonical preference against
// the market universe: membership, duplicates, within-college
// monotonicity, upward closure.
PreferenceCheck validate_preference(const StudentPreference& pref, const Market& market);

// Every valid canonical preference of the student over their universe
// contracts, in a deterministic order: a list is emitted before all of
// its extensions, and extensions follow the canonical college order.
std::vector<StudentPreference> enumerate_monotone_preferences(const std::string& student,
                                                              const Market& market);

} // namespace mmc

#endif
