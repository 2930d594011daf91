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

#include "mmc/core.hpp"

#include <algorithm>
#include <set>

namespace mmc {

TermOrder::TermOrder(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty())
        throw ValidationError("term order: no terms");
    std::set<std::string> seen;
    for (const auto& label : labels_)
        if (!seen.insert(label).second)
            throw ValidationError("term order: duplicate term '" + label + "'");
}

bool TermOrder::contains(const std::string& term) const {
    return std::find(labels_.begin(), labels_.end(), term) != labels_.end();
}

std::size_t TermOrder::index_of(const std::string& term) const {
    auto it = std::find(labels_.begin(), labels_.end(), term);
    if (it == labels_.end())
        throw ValidationError("unknown term '" + term + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

bool TermOrder::better(const std::string& a, const std::string& b) const {
    return index_of(a) < index_of(b);
}

bool TermOrder::at_least(const std::string& a, const std::string& b) const {
    return index_of(a) <= index_of(b);
}

bool contract_less(const Contract& a, const Contract& b, const TermOrder& order) {
    if (a.college != b.college)
        return a.college < b.college;
    if (a.student != b.student)
        return a.student < b.student;
    return order.index_of(a.term) < order.index_of(b.term);
}

std::vector<Contract> canonical_sorted(std::vector<Contract> contracts, const TermOrder& order) {
    std::sort(contracts.begin(), contracts.end(),
              [&order](const Contract& a, const Contract& b) { return contract_less(a, b, order); });
    return contracts;
}

bool contains_contract(std::span<const Contract> set, const Contract& c) {
    return std::find(set.begin(), set.end(), c) != set.end();
}

namespace {

void require_one_college(std::span<const Contract> contracts, const char* what) {
    for (std::size_t i = 1; i < contracts.size(); ++i)
        if (contracts[i].college != contracts[0].college)
            throw ValidationError(std::string(what) + ": contracts of more than one college ('" +
                                  contracts[0].college + "' and '" + contracts[i].college + "')");
}

} // namespace

std::vector<Contract> worst_contracts(std::span<const Contract> within_college,
                                      const TermOrder& order) {
    require_one_college(within_college, "worst_contracts");
    std::vector<Contract> out;
    for (const auto& y : within_college) {
        bool is_worst = true;
        for (const auto& other : within_college)
            if (other.student == y.student && order.better(y.term, other.term))
                is_worst = false;
        if (is_worst)
            out.push_back(y);
    }
    return canonical_sorted(std::move(out), order);
}

std::vector<Contract> upper_closure(std::span<const Contract> Y,
                                    std::span<const Contract> college_domain,
                                    const TermOrder& order) {
    require_one_college(Y, "upper_closure");
    std::vector<Contract> out;
    for (const auto& x : college_domain) {
        for (const auto& y : Y) {
            if (x.student == y.student && x.college == y.college &&
                order.at_least(x.term, y.term)) {
                out.push_back(x);
                break;
            }
        }
    }
    return canonical_sorted(std::move(out), order);
}

std::size_t StudentPreference::rank_of(const Contract& c) const {
    for (std::size_t i = 0; i < acceptable.size(); ++i)
        if (acceptable[i] == c)
            return i;
    return acceptable.size();
}

bool prefers(const StudentPreference& pref, const Contract* a, const Contract* b) {
    // rank: listed contracts by position, outside option next, unlisted last
    auto rank = [&pref](const Contract* c) -> std::size_t {
        if (c == nullptr)
            return pref.acceptable.size(); // outside option
        std::size_t r = pref.rank_of(*c);
        return r < pref.acceptable.size() ? r : pref.acceptable.size() + 1;
    };
    return rank(a) < rank(b);
}

} // namespace mmc
