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

#ifndef MMC_CHOICE_HPP
#define MMC_CHOICE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "mmc/core.hpp"
#include "mmc/options.hpp"

namespace mmc {

// Subset of a choice function's domain, bit i = domain()[i].
using LocalSet = std::uint32_t;

// A college's selection rule over subsets of its contract domain.
// Selections always satisfy Ch(Y) subseteq Y and one contract per
// student; IRC is auditable, not assumed.
class ChoiceFunction {
  public:
    using Rule = std::function<LocalSet(LocalSet)>;

    // domain need not be sorted; it is canonicalized here. The rule must
    // be built against the canonicalized index order (see factories).
    ChoiceFunction(std::string college, std::vector<Contract> domain,
                   const TermOrder& order, Rule rule, std::string family);

    const std::string& college() const { return college_; }
    const std::string& family() const { return family_; }
    const std::vector<Contract>& domain() const { return domain_; }
    std::size_t size() const { return domain_.size(); }
    LocalSet full_mask() const;

    int index_of(const Contract& c) const; // -1 when absent
    LocalSet mask_of(std::span<const Contract> contracts) const;
    std::vector<Contract> contracts_of(LocalSet set) const;

    // Same-student domain contracts of index i (including i itself).
    LocalSet student_mask(std::size_t i) const { return student_mask_[i]; }
    const std::string& student_of(std::size_t i) const { return domain_[i].student; }

    LocalSet choose_mask(LocalSet offered) const;
    std::vector<Contract> choose(std::span<const Contract> offered) const;

  private:
    friend class TabulatedChoice;
    std::string college_;
    std::string family_;
    std::vector<Contract> domain_;
    std::vector<LocalSet> student_mask_;
    Rule rule_;
    bool checked_rule_ = true; // false once the whole table is validated
};

// Canonical sort + duplicate/college checks shared by the factories.
std::vector<Contract> choice_domain(std::vector<Contract> domain, const TermOrder& order);

// Per-student worst contracts of `set` as a mask (the allocation Y^min).
LocalSet worst_mask(const ChoiceFunction& cf, LocalSet set, const TermOrder& order);
// Domain contracts at least as good as the student's worst in `set` (U(Y)).
LocalSet upper_mask(const ChoiceFunction& cf, LocalSet set, const TermOrder& order);

// Explicit table over every subset of the domain; the universal
// representation for fixtures, audits and serialization.
class TabulatedChoice {
  public:
    TabulatedChoice(std::string college, std::vector<Contract> domain,
                    std::vector<LocalSet> table, const TermOrder& order,
                    std::string family = "table");

    const std::string& college() const { return college_; }
    const std::string& family() const { return family_; }
    const std::vector<Contract>& domain() const { return domain_; }
    const std::vector<LocalSet>& table() const { return table_; }

    ChoiceFunction to_choice(const TermOrder& order) const;

    friend bool operator==(const TabulatedChoice& a, const TabulatedChoice& b) {
        return a.college_ == b.college_ && a.domain_ == b.domain_ && a.table_ == b.table_;
    }

  private:
    std::string college_;
    std::string family_;
    std::vector<Contract> domain_;
    std::vector<LocalSet> table_;
};

TabulatedChoice tabulate(const ChoiceFunction& cf, const TermOrder& order,
                         const Caps& caps = {});

// Unit demand: the highest-priority contract present, if any.
ChoiceFunction make_unit_demand(std::vector<Contract> priority, const TermOrder& order);
ChoiceFunction make_unit_demand(std::vector<Contract> priority,
                                std::vector<Contract> domain, const TermOrder& order);

// Stipend admission that fills seats by merit and hands out the smallest
// feasible stipend. quotas[t] = seats available at stipend level t or
// lower; quotas must be weakly increasing in stipend.
ChoiceFunction make_merit_over_need(std::vector<std::string> merit,
                                    std::map<std::string, int> quotas,
                                    std::vector<Contract> domain, const TermOrder& order);

// Bid-for-your-career: the q1 merit-top cadets present get their
// shortest-service contract, the next q2 their longest-service one.
// The term order ranks shorter service higher.
ChoiceFunction make_bfyc(std::vector<std::string> merit, int q1, int q2,
                         std::vector<Contract> domain, const TermOrder& order);

using Rational = boost::rational<long long>;

// Quasi-linear firm valuation: base value per student set minus the sum
// of chosen salaries. Salaries must be strictly increasing along the
// term order; genericity (no ties between comparable selections) is
// validated at construction.
struct QuasiLinearValuation {
    // keyed by the sorted list of student ids; missing keys value 0
    std::map<std::vector<std::string>, Rational> values;
    std::map<std::string, Rational> salaries; // per term label
};

ChoiceFunction make_quasilinear(const QuasiLinearValuation& valuation,
                                std::vector<Contract> domain, const TermOrder& order);

// Choice induced by a strict ranking over contract sets: picks the first
// ranked set fully contained in the offer, or nothing.
ChoiceFunction make_ranked_sets(std::vector<std::vector<Contract>> ranking,
                                std::vector<Contract> domain, const TermOrder& order);

} // namespace mmc

#endif
