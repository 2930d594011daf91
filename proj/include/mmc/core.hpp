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

#ifndef MMC_CORE_HPP
#define MMC_CORE_HPP

#include <span>
#include <string>
#include <vector>

#include "mmc/error.hpp"

namespace mmc {

// Contract terms, totally ordered. The first label is the best one for
// students; labels() is strictly decreasing in that order.
class TermOrder {
  public:
    explicit TermOrder(std::vector<std::string> labels);

    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    bool contains(const std::string& term) const;
    std::size_t index_of(const std::string& term) const; // 0 = best

    // a strictly better than b for students
    bool better(const std::string& a, const std::string& b) const;
    // a better than or equal to b
    bool at_least(const std::string& a, const std::string& b) const;

  private:
    std::vector<std::string> labels_;
};

// A contract is identified by the triple (college, student, term).
struct Contract {
    std::string college;
    std::string student;
    std::string term;

    std::string id() const { return college + ":" + student + ":" + term; }
    friend bool operator==(const Contract&, const Contract&) = default;
};

// Canonical ordering: (college, student, term index). All enumeration
// orders in the library derive from this.
bool contract_less(const Contract& a, const Contract& b, const TermOrder& order);
std::vector<Contract> canonical_sorted(std::vector<Contract> contracts, const TermOrder& order);
bool contains_contract(std::span<const Contract> set, const Contract& c);

// Per-student worst contracts of a one-college set: keeps y when no other
// contract of the same student has a strictly worse term.
std::vector<Contract> worst_contracts(std::span<const Contract> within_college,
                                      const TermOrder& order);

// Contracts of the college's domain that are at least as good, for their
// student, as that student's worst contract in Y.
std::vector<Contract> upper_closure(std::span<const Contract> Y,
                                    std::span<const Contract> college_domain,
                                    const TermOrder& order);

// A student's strict monotone preference, canonicalized as the ordered
// list of acceptable contracts (most preferred first). Contracts below
// the outside option are omitted; monotonicity forces the list to be
// closed upward within each college.
struct StudentPreference {
    std::string student;
    std::vector<Contract> acceptable;

    friend bool operator==(const StudentPreference&, const StudentPreference&) = default;
    bool accepts(const Contract& c) const { return contains_contract(acceptable, c); }
    // Position in the list; acceptable contracts rank above the outside
    // option, everything else below it.
    std::size_t rank_of(const Contract& c) const;
};

// Strict comparison under a canonical preference. std::nullopt encodes
// the outside option. A contract involving the student that is not
// listed ranks below the outside option.
bool prefers(const StudentPreference& pref, const Contract* a, const Contract* b);

} // namespace mmc

#endif
