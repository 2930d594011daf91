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

#include "mmc/choice.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

namespace mmc {

namespace {

std::string set_to_string(const std::vector<Contract>& contracts) {
    std::string out = "{";
    for (std::size_t i = 0; i < contracts.size(); ++i) {
        if (i)
            out += ",";
        out += contracts[i].id();
    }
    return out + "}";
}

} // namespace

std::vector<Contract> choice_domain(std::vector<Contract> domain, const TermOrder& order) {
    domain = canonical_sorted(std::move(domain), order);
    for (std::size_t i = 1; i < domain.size(); ++i) {
        if (domain[i] == domain[i - 1])
            throw ValidationError("choice domain: duplicate contract " + domain[i].id());
        if (domain[i].college != domain[0].college)
            throw ValidationError("choice domain: contracts of more than one college");
    }
    for (const auto& c : domain)
        order.index_of(c.term); // term must exist
    if (domain.size() > 31)
        throw ValidationError("choice domain: more than 31 contracts per college");
    return domain;
}

ChoiceFunction::ChoiceFunction(std::string college, std::vector<Contract> domain,
                               const TermOrder& order, Rule rule, std::string family)
    : college_(std::move(college)), family_(std::move(family)), domain_(std::move(domain)),
      rule_(std::move(rule)) {
    domain_ = choice_domain(std::move(domain_), order);
    for (const auto& c : domain_)
        if (c.college != college_)
            throw ValidationError("choice domain: contract " + c.id() + " is not at college '" +
                                  college_ + "'");
    student_mask_.assign(domain_.size(), 0);
    for (std::size_t i = 0; i < domain_.size(); ++i)
        for (std::size_t j = 0; j < domain_.size(); ++j)
            if (domain_[j].student == domain_[i].student)
                student_mask_[i] |= LocalSet{1} << j;
}

LocalSet ChoiceFunction::full_mask() const {
    return domain_.empty() ? 0 : (LocalSet{1} << domain_.size()) - 1;
}

int ChoiceFunction::index_of(const Contract& c) const {
    for (std::size_t i = 0; i < domain_.size(); ++i)
        if (domain_[i] == c)
            return static_cast<int>(i);
    return -1;
}

LocalSet ChoiceFunction::mask_of(std::span<const Contract> contracts) const {
    LocalSet set = 0;
    for (const auto& c : contracts) {
        int i = index_of(c);
        if (i < 0)
            throw ValidationError("contract " + c.id() + " is outside the domain of college '" +
                                  college_ + "'");
        set |= LocalSet{1} << i;
    }
    return set;
}

std::vector<Contract> ChoiceFunction::contracts_of(LocalSet set) const {
    std::vector<Contract> out;
    for (std::size_t i = 0; i < domain_.size(); ++i)
        if (set & (LocalSet{1} << i))
            out.push_back(domain_[i]);
    return out;
}

LocalSet ChoiceFunction::choose_mask(LocalSet offered) const {
    if (offered & ~full_mask())
        throw ValidationError("offer outside the domain of college '" + college_ + "'");
    LocalSet chosen = rule_(offered);
    if (checked_rule_) {
        if (chosen & ~offered)
            throw ValidationError("choice rule of '" + college_ +
                                  "' selected a contract it was not offered");
        LocalSet rest = chosen;
        while (rest) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
            if ((chosen & student_mask_[i]) != (LocalSet{1} << i))
                throw ValidationError("choice rule of '" + college_ +
                                      "' selected two contracts of student '" +
                                      domain_[i].student + "'");
            rest &= rest - 1;
        }
    }
    return chosen;
}

std::vector<Contract> ChoiceFunction::choose(std::span<const Contract> offered) const {
    return contracts_of(choose_mask(mask_of(offered)));
}

LocalSet worst_mask(const ChoiceFunction& cf, LocalSet set, const TermOrder& order) {
    LocalSet out = 0;
    const auto& dom = cf.domain();
    for (std::size_t i = 0; i < dom.size(); ++i) {
        if (!(set & (LocalSet{1} << i)))
            continue;
        bool is_worst = true;
        LocalSet others = set & cf.student_mask(i) & ~(LocalSet{1} << i);
        while (others) {
            std::size_t j = static_cast<std::size_t>(std::countr_zero(others));
            if (order.better(dom[i].term, dom[j].term))
                is_worst = false;
            others &= others - 1;
        }
        if (is_worst)
            out |= LocalSet{1} << i;
    }
    return out;
}

LocalSet upper_mask(const ChoiceFunction& cf, LocalSet set, const TermOrder& order) {
    LocalSet floor = worst_mask(cf, set, order);
    LocalSet out = 0;
    const auto& dom = cf.domain();
    for (std::size_t i = 0; i < dom.size(); ++i) {
        LocalSet own = floor & cf.student_mask(i);
        while (own) {
            std::size_t j = static_cast<std::size_t>(std::countr_zero(own));
            if (order.at_least(dom[i].term, dom[j].term)) {
                out |= LocalSet{1} << i;
                break;
            }
            own &= own - 1;
        }
    }
    return out;
}

TabulatedChoice::TabulatedChoice(std::string college, std::vector<Contract> domain,
                                 std::vector<LocalSet> table, const TermOrder& order,
                                 std::string family)
    : college_(std::move(college)), family_(std::move(family)), domain_(std::move(domain)),
      table_(std::move(table)) {
    domain_ = choice_domain(std::move(domain_), order);
    const std::size_t n = domain_.size();
    if (table_.size() != (std::size_t{1} << n))
        throw ValidationError("choice table of '" + college_ + "' is not total: expected " +
                              std::to_string(std::size_t{1} << n) + " rows, got " +
                              std::to_string(table_.size()));
    std::vector<LocalSet> student_mask(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (domain_[j].student == domain_[i].student)
                student_mask[i] |= LocalSet{1} << j;
    for (std::size_t y = 0; y < table_.size(); ++y) {
        LocalSet chosen = table_[y];
        if (chosen & ~static_cast<LocalSet>(y))
            throw ValidationError("choice table of '" + college_ +
                                  "' selects outside the offered set in row " + std::to_string(y));
        LocalSet rest = chosen;
        while (rest) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
            if ((chosen & student_mask[i]) != (LocalSet{1} << i))
                throw ValidationError("choice table of '" + college_ +
                                      "' selects two contracts of student '" +
                                      domain_[i].student + "' in row " + std::to_string(y));
            rest &= rest - 1;
        }
    }
}

ChoiceFunction TabulatedChoice::to_choice(const TermOrder& order) const {
    auto table = table_;
    ChoiceFunction cf(college_, domain_, order,
                      [table = std::move(table)](LocalSet y) { return table[y]; }, family_);
    cf.checked_rule_ = false; // the whole table was validated above
    return cf;
}

TabulatedChoice tabulate(const ChoiceFunction& cf, const TermOrder& order, const Caps& caps) {
    if (cf.size() > caps.effective_tabulate_cap())
        throw CapacityError("tabulate: college '" + cf.college() + "' has " +
                            std::to_string(cf.size()) + " contracts, cap is " +
                            std::to_string(caps.effective_tabulate_cap()));
    std::vector<LocalSet> table(std::size_t{1} << cf.size());
    for (std::size_t y = 0; y < table.size(); ++y)
        table[y] = cf.choose_mask(static_cast<LocalSet>(y));
    return TabulatedChoice(cf.college(), cf.domain(), std::move(table), order, cf.family());
}

ChoiceFunction make_unit_demand(std::vector<Contract> priority, const TermOrder& order) {
    auto domain = priority;
    return make_unit_demand(std::move(priority), std::move(domain), order);
}

ChoiceFunction make_unit_demand(std::vector<Contract> priority, std::vector<Contract> domain,
                                const TermOrder& order) {
    if (priority.empty() && domain.empty())
        throw ValidationError("unit demand: empty priority and domain");
    std::set<std::string> seen;
    for (const auto& c : priority)
        if (!seen.insert(c.id()).second)
            throw ValidationError("unit demand: duplicate contract " + c.id() + " in priority");
    std::string college = priority.empty() ? domain.front().college : priority.front().college;
    domain = choice_domain(std::move(domain), order);
    std::vector<int> ranked; // domain indices, best first
    for (const auto& c : priority) {
        auto it = std::find(domain.begin(), domain.end(), c);
        if (it == domain.end())
            throw ValidationError("unit demand: priority contract " + c.id() +
                                  " is outside the domain");
        ranked.push_back(static_cast<int>(it - domain.begin()));
    }
    auto rule = [ranked](LocalSet y) -> LocalSet {
        for (int i : ranked)
            if (y & (LocalSet{1} << i))
                return LocalSet{1} << i;
        return 0;
    };
    return ChoiceFunction(college, std::move(domain), order, std::move(rule), "unit_demand");
}

ChoiceFunction make_merit_over_need(std::vector<std::string> merit,
                                    std::map<std::string, int> quotas,
                                    std::vector<Contract> domain, const TermOrder& order) {
    if (domain.empty())
        throw ValidationError("merit_over_need: empty domain");
    domain = choice_domain(std::move(domain), order);
    std::string college = domain.front().college;

    // quotas are cumulative seat counts by stipend level; the term order
    // lists the highest stipend first, so reverse it for levels.
    std::vector<std::string> levels(order.labels().rbegin(), order.labels().rend());
    std::vector<int> quota_by_level;
    int prev = 0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        auto it = quotas.find(levels[l]);
        int q = it == quotas.end() ? prev : it->second;
        if (q < 0)
            throw ValidationError("merit_over_need: negative quota for term '" + levels[l] + "'");
        if (q < prev)
            throw ValidationError("merit_over_need: quota for term '" + levels[l] +
                                  "' is below the quota of a lower stipend");
        quota_by_level.push_back(q);
        prev = q;
    }

    std::vector<int> merit_rank_of(domain.size(), -1);
    for (std::size_t i = 0; i < domain.size(); ++i) {
        auto it = std::find(merit.begin(), merit.end(), domain[i].student);
        if (it != merit.end())
            merit_rank_of[i] = static_cast<int>(it - merit.begin());
    }
    std::vector<int> level_of(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i)
        level_of[i] = static_cast<int>(levels.size() - 1 - order.index_of(domain[i].term));

    auto dom = domain;
    auto rule = [dom, merit_rank_of, level_of, quota_by_level](LocalSet y) -> LocalSet {
        LocalSet remaining = y;
        LocalSet chosen = 0;
        std::vector<int> used(quota_by_level.size(), 0);
        auto feasible = [&](int level) {
            for (std::size_t l = static_cast<std::size_t>(level); l < quota_by_level.size(); ++l) {
                int at_or_below = 1; // the candidate itself
                for (std::size_t j = 0; j < dom.size(); ++j)
                    if ((chosen & (LocalSet{1} << j)) &&
                        level_of[j] <= static_cast<int>(l))
                        ++at_or_below;
                if (at_or_below > quota_by_level[l])
                    return false;
            }
            return true;
        };
        while (remaining) {
            // merit-top student with a contract left
            int best = -1;
            for (std::size_t i = 0; i < dom.size(); ++i) {
                if (!(remaining & (LocalSet{1} << i)))
                    continue;
                if (merit_rank_of[i] < 0)
                    throw ValidationError("merit_over_need: student '" + dom[i].student +
                                          "' is not on the merit list");
                if (best < 0 || merit_rank_of[i] < merit_rank_of[best])
                    best = static_cast<int>(i);
            }
            if (best < 0)
                break;
            // their smallest feasible stipend
            int pick = -1;
            for (int level = 0; level < static_cast<int>(quota_by_level.size()); ++level) {
                for (std::size_t i = 0; i < dom.size(); ++i)
                    if ((remaining & (LocalSet{1} << i)) &&
                        dom[i].student == dom[best].student && level_of[i] == level &&
                        feasible(level)) {
                        pick = static_cast<int>(i);
                        break;
                    }
                if (pick >= 0)
                    break;
            }
            if (pick >= 0)
                chosen |= LocalSet{1} << pick;
            for (std::size_t i = 0; i < dom.size(); ++i)
                if (dom[i].student == dom[best].student)
                    remaining &= ~(LocalSet{1} << i);
        }
        return chosen;
    };
    return ChoiceFunction(college, std::move(domain), order, std::move(rule), "merit_over_need");
}

ChoiceFunction make_bfyc(std::vector<std::string> merit, int q1, int q2,
                         std::vector<Contract> domain, const TermOrder& order) {
    if (q1 < 0 || q2 < 0)
        throw ValidationError("bfyc: negative capacity");
    if (domain.empty())
        throw ValidationError("bfyc: empty domain");
    domain = choice_domain(std::move(domain), order);
    std::string college = domain.front().college;
    std::vector<int> merit_rank_of(domain.size(), -1);
    for (std::size_t i = 0; i < domain.size(); ++i) {
        auto it = std::find(merit.begin(), merit.end(), domain[i].student);
        if (it != merit.end())
            merit_rank_of[i] = static_cast<int>(it - merit.begin());
    }
    std::vector<std::size_t> term_index(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i)
        term_index[i] = order.index_of(domain[i].term);

    auto dom = domain;
    auto rule = [dom, merit_rank_of, term_index, q1, q2](LocalSet y) -> LocalSet {
        // students present, by merit
        std::vector<std::pair<int, std::string>> present;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (!(y & (LocalSet{1} << i)))
                continue;
            if (merit_rank_of[i] < 0)
                throw ValidationError("bfyc: cadet '" + dom[i].student +
                                      "' is not on the merit list");
            std::pair<int, std::string> entry{merit_rank_of[i], dom[i].student};
            if (std::find(present.begin(), present.end(), entry) == present.end())
                present.push_back(entry);
        }
        std::sort(present.begin(), present.end());
        LocalSet chosen = 0;
        for (std::size_t rank = 0; rank < present.size(); ++rank) {
            if (rank >= static_cast<std::size_t>(q1 + q2))
                break;
            bool shortest = rank < static_cast<std::size_t>(q1);
            int pick = -1;
            for (std::size_t i = 0; i < dom.size(); ++i) {
                if (!(y & (LocalSet{1} << i)) || dom[i].student != present[rank].second)
                    continue;
                if (pick < 0 ||
                    (shortest ? term_index[i] < term_index[pick]
                              : term_index[i] > term_index[pick]))
                    pick = static_cast<int>(i);
            }
            chosen |= LocalSet{1} << pick;
        }
        return chosen;
    };
    return ChoiceFunction(college, std::move(domain), order, std::move(rule), "bfyc");
}

namespace {

Rational valuation_of(const QuasiLinearValuation& v, std::vector<std::string> students) {
    std::sort(students.begin(), students.end());
    auto it = v.values.find(students);
    return it == v.values.end() ? Rational(0) : it->second;
}

} // namespace

ChoiceFunction make_quasilinear(const QuasiLinearValuation& valuation,
                                std::vector<Contract> domain, const TermOrder& order) {
    if (domain.empty())
        throw ValidationError("quasilinear: empty domain");
    if (domain.size() > 16)
        throw CapacityError("quasilinear: genericity validation needs at most 16 contracts");
    domain = choice_domain(std::move(domain), order);
    std::string college = domain.front().college;

    for (const auto& [term, salary] : valuation.salaries)
        if (salary <= 0)
            throw ValidationError("quasilinear: salary of term '" + term + "' is not positive");
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        auto hi = valuation.salaries.find(order.labels()[i]);
        auto lo = valuation.salaries.find(order.labels()[i + 1]);
        if (hi == valuation.salaries.end() || lo == valuation.salaries.end())
            throw ValidationError("quasilinear: missing salary for a term");
        if (!(hi->second > lo->second))
            throw ValidationError("quasilinear: salaries are not strictly increasing along the "
                                  "term order");
    }

    std::vector<Rational> salary_of(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i)
        salary_of[i] = valuation.salaries.at(domain[i].term);

    auto dom = domain;
    auto net = [dom, salary_of, valuation](LocalSet a) {
        Rational total(0);
        std::vector<std::string> students;
        for (std::size_t i = 0; i < dom.size(); ++i)
            if (a & (LocalSet{1} << i)) {
                total -= salary_of[i];
                students.push_back(dom[i].student);
            }
        return total + valuation_of(valuation, std::move(students));
    };

    // genericity: no two comparable selections (distinct allocations whose
    // union still has one contract per student) may tie
    {
        std::vector<LocalSet> student_mask(dom.size(), 0);
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (std::size_t j = 0; j < dom.size(); ++j)
                if (dom[j].student == dom[i].student)
                    student_mask[i] |= LocalSet{1} << j;
        auto is_allocation = [&](LocalSet a) {
            for (std::size_t i = 0; i < dom.size(); ++i)
                if ((a & (LocalSet{1} << i)) &&
                    (a & student_mask[i]) != (LocalSet{1} << i))
                    return false;
            return true;
        };
        std::vector<LocalSet> allocations;
        LocalSet full = dom.empty() ? 0 : (LocalSet{1} << dom.size()) - 1;
        for (LocalSet a = 0; a <= full; ++a)
            if (is_allocation(a))
                allocations.push_back(a);
        for (std::size_t i = 0; i < allocations.size(); ++i)
            for (std::size_t j = i + 1; j < allocations.size(); ++j) {
                if (!is_allocation(allocations[i] | allocations[j]))
                    continue;
                if (net(allocations[i]) == net(allocations[j]))
                    throw ValidationError(
                        "quasilinear: tie between selections " +
                        set_to_string([&] {
                            std::vector<Contract> cs;
                            for (std::size_t k = 0; k < dom.size(); ++k)
                                if (allocations[i] & (LocalSet{1} << k))
                                    cs.push_back(dom[k]);
                            return cs;
                        }()) +
                        " and " + set_to_string([&] {
                            std::vector<Contract> cs;
                            for (std::size_t k = 0; k < dom.size(); ++k)
                                if (allocations[j] & (LocalSet{1} << k))
                                    cs.push_back(dom[k]);
                            return cs;
                        }()) +
                        "; the valuation is not generic");
            }
    }

    std::vector<LocalSet> student_mask(dom.size(), 0);
    for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = 0; j < dom.size(); ++j)
            if (dom[j].student == dom[i].student)
                student_mask[i] |= LocalSet{1} << j;
    std::vector<std::size_t> term_index(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i)
        term_index[i] = order.index_of(dom[i].term);

    auto rule = [dom, net, student_mask, term_index](LocalSet y) -> LocalSet {
        // floor = worst contract per student within y
        LocalSet floor = 0;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (!(y & (LocalSet{1} << i)))
                continue;
            bool worst = true;
            LocalSet others = y & student_mask[i] & ~(LocalSet{1} << i);
            while (others) {
                std::size_t j = static_cast<std::size_t>(std::countr_zero(others));
                if (term_index[i] < term_index[j])
                    worst = false;
                others &= others - 1;
            }
            if (worst)
                floor |= LocalSet{1} << i;
        }
        LocalSet best = 0;
        Rational best_value = net(0);
        for (LocalSet a = floor;; a = (a - 1) & floor) {
            Rational value = net(a);
            if (value > best_value) {
                best_value = value;
                best = a;
            }
            if (a == 0)
                break;
        }
        return best;
    };
    return ChoiceFunction(college, std::move(domain), order, std::move(rule), "quasilinear");
}

ChoiceFunction make_ranked_sets(std::vector<std::vector<Contract>> ranking,
                                std::vector<Contract> domain, const TermOrder& order) {
    if (domain.empty())
        throw ValidationError("ranked_sets: empty domain");
    domain = choice_domain(std::move(domain), order);
    std::string college = domain.front().college;

    std::vector<LocalSet> ranked_masks;
    std::set<LocalSet> seen;
    for (const auto& entry : ranking) {
        LocalSet mask = 0;
        std::set<std::string> students;
        for (const auto& c : entry) {
            auto it = std::find(domain.begin(), domain.end(), c);
            if (it == domain.end())
                throw ValidationError("ranked_sets: contract " + c.id() +
                                      " is outside the domain");
            if (!students.insert(c.student).second)
                throw ValidationError("ranked_sets: ranked set " + set_to_string(entry) +
                                      " has two contracts of student '" + c.student + "'");
            mask |= LocalSet{1} << (it - domain.begin());
        }
        if (!seen.insert(mask).second)
            throw ValidationError("ranked_sets: duplicate ranked set");
        ranked_masks.push_back(mask);
    }
    auto rule = [ranked_masks](LocalSet y) -> LocalSet {
        for (LocalSet mask : ranked_masks)
            if ((mask & y) == mask)
                return mask;
        return 0;
    };
    return ChoiceFunction(college, std::move(domain), order, std::move(rule), "ranked_sets");
}

} // namespace mmc
