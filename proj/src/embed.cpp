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

#include "mmc/embed.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <queue>
#include <set>

namespace mmc {

namespace {

std::vector<LocalSet> all_allocations(const ChoiceFunction& cf) {
    std::vector<LocalSet> out;
    LocalSet full = cf.full_mask();
    for (LocalSet a = 0;; ++a) {
        bool ok = true;
        LocalSet rest = a;
        while (rest) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
            if ((a & cf.student_mask(i)) != (LocalSet{1} << i)) {
                ok = false;
                break;
            }
            rest &= rest - 1;
        }
        if (ok)
            out.push_back(a);
        if (a == full)
            break;
    }
    return out;
}

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

AllocationOrder rationalize_allocation_order(const ChoiceFunction& cf, const TermOrder& order,
                                             const Caps& caps) {
    if (cf.size() > caps.effective_set_cap())
        throw CapacityError("rationalize: college '" + cf.college() + "' has " +
                            std::to_string(cf.size()) + " contracts, cap is " +
                            std::to_string(caps.effective_set_cap()));
    auto allocations = all_allocations(cf);
    const std::size_t n = allocations.size();
    std::vector<std::size_t> position_of(std::size_t{1} << cf.size(),
                                         std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < n; ++i)
        position_of[allocations[i]] = i;

    // edge u -> v: allocation u ranks above v
    std::vector<std::set<std::size_t>> above(n);
    std::vector<std::size_t> indegree(n, 0);
    auto add_edge = [&](std::size_t u, std::size_t v) {
        if (u != v && above[u].insert(v).second)
            ++indegree[v];
    };

    // revealed preference: what the college picks from A beats every
    // other allocation inside A
    for (std::size_t ai = 0; ai < n; ++ai) {
        LocalSet a = allocations[ai];
        LocalSet chosen = cf.choose_mask(a);
        std::size_t cpos = position_of[chosen];
        for (LocalSet b = a;; b = (b - 1) & a) {
            if (b != chosen)
                add_edge(cpos, position_of[b]);
            if (b == 0)
                break;
        }
    }
    // term monotonicity: of two allocations of the same students that
    // compare pointwise, the one with the lower terms ranks above
    const auto& dom = cf.domain();
    for (std::size_t pi = 0; pi < n; ++pi) {
        for (std::size_t qi = 0; qi < n; ++qi) {
            if (pi == qi)
                continue;
            LocalSet p = allocations[pi], q = allocations[qi];
            // same student sets, p at least as good for every student
            bool comparable = std::popcount(p) == std::popcount(q);
            LocalSet rest = p;
            while (comparable && rest) {
                std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
                LocalSet own = q & cf.student_mask(i);
                if (!own) {
                    comparable = false;
                    break;
                }
                std::size_t j = static_cast<std::size_t>(std::countr_zero(own));
                if (!order.at_least(dom[i].term, dom[j].term))
                    comparable = false;
                rest &= rest - 1;
            }
            if (comparable)
                add_edge(qi, pi); // q is the cheaper variant
        }
    }

    // deterministic topological extension, smallest encoding first
    std::priority_queue<std::pair<LocalSet, std::size_t>,
                        std::vector<std::pair<LocalSet, std::size_t>>, std::greater<>>
        ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0)
            ready.emplace(allocations[i], i);
    std::vector<std::size_t> topo;
    while (!ready.empty()) {
        auto [mask, i] = ready.top();
        ready.pop();
        topo.push_back(i);
        for (std::size_t v : above[i])
            if (--indegree[v] == 0)
                ready.emplace(allocations[v], v);
    }
    if (topo.size() != n)
        throw RationalizationError("rationalize: cycle in the revealed-preference digraph of "
                                   "college '" + cf.college() + "'");

    AllocationOrder result;
    result.college = cf.college();
    std::vector<std::size_t> rank(n);
    for (std::size_t p = 0; p < n; ++p) {
        result.ranked.push_back(cf.contracts_of(allocations[topo[p]]));
        rank[topo[p]] = p;
    }
    // verification pass: the order-maximum inside every allocation must
    // be exactly what the college chooses
    for (std::size_t ai = 0; ai < n; ++ai) {
        LocalSet a = allocations[ai];
        LocalSet best = 0;
        std::size_t best_rank = std::numeric_limits<std::size_t>::max();
        for (LocalSet b = a;; b = (b - 1) & a) {
            if (rank[position_of[b]] < best_rank) {
                best_rank = rank[position_of[b]];
                best = b;
            }
            if (b == 0)
                break;
        }
        if (best != cf.choose_mask(a))
            throw RationalizationError("rationalize: order fails to rationalize the choice from " +
                                       set_to_string(cf.contracts_of(a)) + " at college '" +
                                       cf.college() + "'");
    }
    return result;
}

std::pair<KelsoCrawfordEconomy, Isomorphism> build_kc_economy(const Market& market,
                                                              const PreferenceProfile& profile,
                                                              const Caps& caps) {
    validate_profile(market, profile);
    const auto& order = market.order();
    const int top_salary = static_cast<int>(order.size());

    KelsoCrawfordEconomy economy;
    economy.firms = market.colleges();
    economy.workers = market.students();
    for (int p = 1; p <= top_salary; ++p)
        economy.salaries.push_back(p);

    Isomorphism iso;
    // within a college-student pair, universe contracts take the top
    // salaries down the term order; leftover terms take the rest
    for (const auto& college : market.colleges()) {
        for (const auto& student : market.students()) {
            std::vector<std::string> in_universe, extension;
            for (const auto& term : order.labels()) {
                if (market.has_contract(Contract{college, student, term}))
                    in_universe.push_back(term);
                else
                    extension.push_back(term);
            }
            int salary = top_salary;
            for (const auto& term : in_universe)
                iso.map[{college, student, term}] = Isomorphism::Image{college, student, salary--};
            for (const auto& term : extension)
                iso.map[{college, student, term}] = Isomorphism::Image{college, student, salary--};
        }
    }

    // firm side: rank-as-utility over the rationalized allocation order
    for (const auto& college : market.colleges()) {
        auto allocation_order = rationalize_allocation_order(market.choice_of(college),
                                                             order, caps);
        const std::size_t n = allocation_order.ranked.size();
        auto& utility = economy.firm_utility[college];
        for (std::size_t p = 0; p < n; ++p) {
            KelsoCrawfordEconomy::PairSet pairs;
            for (const auto& c : allocation_order.ranked[p]) {
                const auto& image = iso.map.at({c.college, c.student, c.term});
                pairs.emplace_back(image.worker, image.salary);
            }
            std::sort(pairs.begin(), pairs.end());
            utility[pairs] = static_cast<long long>(n - p);
        }
    }

    // worker side: list rank above the outside option, everything else
    // below it, descending salary within a pair so utility rises with pay
    for (const auto& student : market.students()) {
        const auto& pref = profile.of(student);
        auto& utility = economy.worker_utility[student];
        economy.worker_outside[student] = 0;
        const long long k = static_cast<long long>(pref.acceptable.size());
        for (std::size_t i = 0; i < pref.acceptable.size(); ++i) {
            const auto& c = pref.acceptable[i];
            const auto& image = iso.map.at({c.college, c.student, c.term});
            utility[{image.firm, image.salary}] = k - static_cast<long long>(i);
        }
        long long below = -1;
        for (const auto& college : market.colleges()) {
            std::vector<std::pair<int, std::string>> unlisted; // (salary, term)
            for (const auto& term : order.labels()) {
                if (!pref.accepts(Contract{college, student, term})) {
                    const auto& image = iso.map.at({college, student, term});
                    unlisted.emplace_back(image.salary, term);
                }
            }
            std::sort(unlisted.rbegin(), unlisted.rend());
            for (const auto& [salary, term] : unlisted)
                utility[{college, salary}] = below--;
        }
    }
    return {std::move(economy), std::move(iso)};
}

IsomorphismReport verify_isomorphism(const Market& market, const PreferenceProfile& profile,
                                     const KelsoCrawfordEconomy& economy,
                                     const Isomorphism& iso) {
    IsomorphismReport report;
    const auto& order = market.order();

    // 1: a total bijection whose firm and worker parts depend only on
    // the college and the student
    report.blocks_consistent = true;
    std::set<std::tuple<std::string, std::string, int>> images;
    for (const auto& college : market.colleges()) {
        for (const auto& student : market.students()) {
            for (const auto& term : order.labels()) {
                auto it = iso.map.find({college, student, term});
                if (it == iso.map.end()) {
                    report.blocks_consistent = false;
                    report.failures.push_back("no image for triple " + college + ":" + student +
                                              ":" + term);
                    continue;
                }
                const auto& image = it->second;
                if (image.firm != college || image.worker != student)
                    report.blocks_consistent = false;
                if (std::find(economy.salaries.begin(), economy.salaries.end(), image.salary) ==
                    economy.salaries.end())
                    report.blocks_consistent = false;
                if (!images.insert({image.firm, image.worker, image.salary}).second) {
                    report.blocks_consistent = false;
                    report.failures.push_back("two triples share the image of " + college + ":" +
                                              student + ":" + term);
                }
            }
        }
    }

    auto worker_value = [&](const Contract& c) -> long long {
        const auto& image = iso.map.at({c.college, c.student, c.term});
        return economy.worker_utility.at(c.student).at({image.firm, image.salary});
    };

    // 2: preference and utility agree wherever the canonical preference
    // pins the comparison down
    report.preferences_agree = true;
    for (const auto& student : market.students()) {
        const auto& pref = profile.of(student);
        auto contracts = market.student_contracts(student);
        long long outside = economy.worker_outside.at(student);
        for (const auto& c : contracts) {
            bool acceptable = pref.accepts(c);
            if (acceptable != (worker_value(c) > outside)) {
                report.preferences_agree = false;
                report.failures.push_back("outside-option order disagrees at " + c.id());
            }
        }
        for (const auto& a : contracts) {
            for (const auto& b : contracts) {
                if (a == b)
                    continue;
                bool defined = false, a_better = false;
                if (pref.accepts(a) && pref.accepts(b)) {
                    defined = true;
                    a_better = pref.rank_of(a) < pref.rank_of(b);
                } else if (pref.accepts(a) != pref.accepts(b)) {
                    defined = true;
                    a_better = pref.accepts(a);
                } else if (a.college == b.college) {
                    defined = true;
                    a_better = order.better(a.term, b.term);
                }
                if (defined && a_better != (worker_value(a) > worker_value(b))) {
                    report.preferences_agree = false;
                    report.failures.push_back("preference order disagrees between " + a.id() +
                                              " and " + b.id());
                }
            }
        }
    }

    // 3: choices are the firm's argmax over worst contracts
    report.choices_agree = true;
    for (const auto& college : market.colleges()) {
        const auto& cf = market.choice_of(college);
        const auto& utility = economy.firm_utility.at(college);
        LocalSet full = cf.full_mask();
        for (LocalSet y = 0;; ++y) {
            LocalSet floor = worst_mask(cf, y, order);
            LocalSet best = 0;
            bool have = false, tie = false;
            long long best_value = 0;
            for (LocalSet a = floor;; a = (a - 1) & floor) {
                KelsoCrawfordEconomy::PairSet pairs;
                for (const auto& c : cf.contracts_of(a)) {
                    const auto& image = iso.map.at({c.college, c.student, c.term});
                    pairs.emplace_back(image.worker, image.salary);
                }
                std::sort(pairs.begin(), pairs.end());
                auto it = utility.find(pairs);
                if (it == utility.end()) {
                    report.choices_agree = false;
                    report.failures.push_back("firm utility undefined for a selection at '" +
                                              college + "'");
                } else if (!have || it->second > best_value) {
                    have = true;
                    best_value = it->second;
                    best = a;
                    tie = false;
                } else if (it->second == best_value) {
                    tie = true;
                }
                if (a == 0)
                    break;
            }
            if (tie || best != cf.choose_mask(y)) {
                report.choices_agree = false;
                report.failures.push_back("argmax disagrees with the choice from " +
                                          set_to_string(cf.contracts_of(y)) + " at '" + college +
                                          "'");
            }
            if (y == full)
                break;
        }
    }

    // 4: triples outside the universe sit below the outside option
    report.outside_dominates = true;
    for (const auto& college : market.colleges()) {
        for (const auto& student : market.students()) {
            for (const auto& term : order.labels()) {
                if (market.has_contract(Contract{college, student, term}))
                    continue;
                auto it = iso.map.find({college, student, term});
                if (it == iso.map.end())
                    continue; // already reported under condition 1
                const auto& image = it->second;
                auto wu = economy.worker_utility.find(student);
                long long value = 0;
                bool found = false;
                if (wu != economy.worker_utility.end()) {
                    auto vit = wu->second.find({image.firm, image.salary});
                    if (vit != wu->second.end()) {
                        value = vit->second;
                        found = true;
                    }
                }
                if (!found || value >= economy.worker_outside.at(student)) {
                    report.outside_dominates = false;
                    report.failures.push_back("triple " + college + ":" + student + ":" + term +
                                              " does not fall below the outside option");
                }
            }
        }
    }

    report.pass = report.blocks_consistent && report.preferences_agree &&
                  report.choices_agree && report.outside_dominates;
    return report;
}

} // namespace mmc
