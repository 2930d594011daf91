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

#ifndef MMC_EMBED_HPP
#define MMC_EMBED_HPP

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mmc/da.hpp"
#include "mmc/market.hpp"

namespace mmc {

// Strict total order over all allocations inside the college's domain,
// best first, such that for every allocation A the order-maximum among
// subsets of A is exactly cf(A). Built by topologically extending the
// revealed-preference digraph plus term-monotonicity edges, then
// re-verified allocation by allocation.
struct AllocationOrder {
    std::string college;
    std::vector<std::vector<Contract>> ranked; // best first
};

AllocationOrder rationalize_allocation_order(const ChoiceFunction& cf, const TermOrder& order,
                                             const Caps& caps = {});

// A job-matching economy with a finite salary grid: firm utilities over
// (worker, salary) pair sets, worker utilities over (firm, salary) pairs
// plus an outside option. Firm utility falls and worker utility rises in
// any salary. Firm utilities are ordinal ranks; they are not required to
// be quasi-linear in salaries.
struct KelsoCrawfordEconomy {
    std::vector<std::string> firms;
    std::vector<std::string> workers;
    std::vector<int> salaries; // 1..|T|

    using PairSet = std::vector<std::pair<std::string, int>>; // sorted (worker, salary)
    std::map<std::string, std::map<PairSet, long long>> firm_utility;
    std::map<std::string, std::map<std::pair<std::string, int>, long long>> worker_utility;
    std::map<std::string, long long> worker_outside;
};

// Bijection from college x student x term triples to firm x worker x
// salary triples; covers triples outside the contract universe too.
struct Isomorphism {
    struct Image {
        std::string firm;
        std::string worker;
        int salary = 0;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Image> map;
};

// Embeds the market (whose profile must rationalize, i.e. a virtual
// profile or equivalent) into a Kelso-Crawford economy: firms = colleges,
// workers = students, salaries 1..|T| assigned down the term order,
// rank-as-utility representations on both sides.
std::pair<KelsoCrawfordEconomy, Isomorphism> build_kc_economy(const Market& market,
                                                              const PreferenceProfile& profile,
                                                              const Caps& caps = {});

struct IsomorphismReport {
    bool pass = false;
    bool blocks_consistent = false;   // bijection respects college/student blocks
    bool preferences_agree = false;   // student preference vs worker utility
    bool choices_agree = false;       // college choice vs firm argmax over floors
    bool outside_dominates = false;   // non-universe triples below the outside option
    std::vector<std::string> failures;
};

// Exhaustively checks the four embedding conditions.
IsomorphismReport verify_isomorphism(const Market& market, const PreferenceProfile& profile,
                                     const KelsoCrawfordEconomy& economy,
                                     const Isomorphism& iso);

} // namespace mmc

#endif
