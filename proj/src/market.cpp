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

#include "mmc/market.hpp"

#include <algorithm>
#include <set>

namespace mmc {

Market::Market(TermOrder order, std::vector<std::string> colleges,
               std::vector<std::string> students, std::vector<Contract> universe,
               std::vector<ChoiceFunction> profile)
    : order_(std::move(order)), colleges_(std::move(colleges)), students_(std::move(students)),
      universe_(std::move(universe)), profile_(std::move(profile)) {
    std::sort(colleges_.begin(), colleges_.end());
    std::sort(students_.begin(), students_.end());
    if (std::adjacent_find(colleges_.begin(), colleges_.end()) != colleges_.end())
        throw ValidationError("market: duplicate college id");
    if (std::adjacent_find(students_.begin(), students_.end()) != students_.end())
        throw ValidationError("market: duplicate student id");

    universe_ = canonical_sorted(std::move(universe_), order_);
    if (universe_.size() > 63)
        throw ValidationError("market: more than 63 contracts in the universe");
    for (std::size_t i = 0; i < universe_.size(); ++i) {
        const auto& c = universe_[i];
        if (i && universe_[i] == universe_[i - 1])
            throw ValidationError("market: duplicate contract " + c.id());
        if (!std::binary_search(colleges_.begin(), colleges_.end(), c.college))
            throw ValidationError("market: contract " + c.id() + " names undeclared college '" +
                                  c.college + "'");
        if (!std::binary_search(students_.begin(), students_.end(), c.student))
            throw ValidationError("market: contract " + c.id() + " names undeclared student '" +
                                  c.student + "'");
        if (!order_.contains(c.term))
            throw ValidationError("market: contract " + c.id() + " names undeclared term '" +
                                  c.term + "'");
    }

    if (profile_.size() != colleges_.size())
        throw ValidationError("market: expected one choice function per college");
    std::sort(profile_.begin(), profile_.end(),
              [](const ChoiceFunction& a, const ChoiceFunction& b) {
                  return a.college() < b.college();
              });
    for (std::size_t i = 0; i < profile_.size(); ++i) {
        if (profile_[i].college() != colleges_[i])
            throw ValidationError("market: no choice function for college '" + colleges_[i] +
                                  "'");
        college_index_[colleges_[i]] = i;
        auto expected = college_contracts(colleges_[i]);
        if (profile_[i].domain() != expected)
            throw ValidationError("market: choice domain of '" + colleges_[i] +
                                  "' does not match the universe contracts of that college");
    }
}

const ChoiceFunction& Market::choice_of(const std::string& college) const {
    auto it = college_index_.find(college);
    if (it == college_index_.end())
        throw ValidationError("market: unknown college '" + college + "'");
    return profile_[it->second];
}

bool Market::has_contract(const Contract& c) const {
    return contains_contract(universe_, c);
}

std::size_t Market::universe_index(const Contract& c) const {
    for (std::size_t i = 0; i < universe_.size(); ++i)
        if (universe_[i] == c)
            return i;
    throw ValidationError("market: contract " + c.id() + " is not in the universe");
}

std::vector<Contract> Market::student_contracts(const std::string& student) const {
    std::vector<Contract> out;
    for (const auto& c : universe_)
        if (c.student == student)
            out.push_back(c);
    return out;
}

std::vector<Contract> Market::college_contracts(const std::string& college) const {
    std::vector<Contract> out;
    for (const auto& c : universe_)
        if (c.college == college)
            out.push_back(c);
    return out;
}

std::uint64_t Market::universe_mask() const {
    return universe_.empty() ? 0 : (std::uint64_t{1} << universe_.size()) - 1;
}

bool Market::same_skeleton(const Market& a, const Market& b) {
    return a.order_.labels() == b.order_.labels() && a.colleges_ == b.colleges_ &&
           a.students_ == b.students_ && a.universe_ == b.universe_;
}

PreferenceCheck validate_preference(const StudentPreference& pref, const Market& market) {
    PreferenceCheck check;
    const auto& order = market.order();
    for (const auto& c : pref.acceptable) {
        if (c.student != pref.student)
            check.violations.push_back("ownership: " + c.id() + " does not involve student '" +
                                       pref.student + "'");
        if (!market.has_contract(c))
            check.violations.push_back("universe: " + c.id() + " is not a market contract");
    }
    for (std::size_t i = 0; i < pref.acceptable.size(); ++i)
        for (std::size_t j = i + 1; j < pref.acceptable.size(); ++j)
            if (pref.acceptable[i] == pref.acceptable[j])
                check.violations.push_back("duplicate: " + pref.acceptable[i].id());
    // within a college, better terms must come first
    for (std::size_t i = 0; i < pref.acceptable.size(); ++i)
        for (std::size_t j = i + 1; j < pref.acceptable.size(); ++j) {
            const auto& a = pref.acceptable[i];
            const auto& b = pref.acceptable[j];
            if (a.college == b.college && a.student == b.student && order.contains(a.term) &&
                order.contains(b.term) && order.better(b.term, a.term))
                check.violations.push_back("monotonicity: " + a.id() + " before " + b.id());
        }
    // listing a contract forces every better same-college contract in
    for (const auto& a : pref.acceptable) {
        for (const auto& u : market.student_contracts(pref.student)) {
            if (u.college == a.college && order.contains(a.term) &&
                order.better(u.term, a.term) && !pref.accepts(u))
                check.violations.push_back("upward closure: " + u.id() + " missing");
        }
    }
    std::sort(check.violations.begin(), check.violations.end());
    check.violations.erase(std::unique(check.violations.begin(), check.violations.end()),
                           check.violations.end());
    return check;
}

namespace {

void extend_preferences(const std::vector<std::vector<Contract>>& chains,
                        std::vector<std::size_t>& taken, std::vector<Contract>& current,
                        const std::string& student, std::vector<StudentPreference>& out) {
    out.push_back(StudentPreference{student, current});
    for (std::size_t k = 0; k < chains.size(); ++k) {
        if (taken[k] == chains[k].size())
            continue;
        current.push_back(chains[k][taken[k]]);
        ++taken[k];
        extend_preferences(chains, taken, current, student, out);
        --taken[k];
        current.pop_back();
    }
}

} // namespace

std::vector<StudentPreference> enumerate_monotone_preferences(const std::string& student,
                                                              const Market& market) {
    // one chain per college, best term first; every monotone list is an
    // interleaving of chain prefixes
    std::vector<std::vector<Contract>> chains;
    auto contracts = market.student_contracts(student); // canonical: college then term index
    for (const auto& c : contracts) {
        if (chains.empty() || chains.back().back().college != c.college)
            chains.emplace_back();
        chains.back().push_back(c);
    }
    std::vector<StudentPreference> out;
    std::vector<std::size_t> taken(chains.size(), 0);
    std::vector<Contract> current;
    extend_preferences(chains, taken, current, student, out);
    return out;
}

} // namespace mmc
