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

#ifndef MMC_OPTIONS_HPP
#define MMC_OPTIONS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>

namespace mmc {

// Enumeration caps. Every quantifier in this library is discharged by
// exhaustive enumeration; the caps bound instance sizes so a stray input
// cannot wedge the process. allow_large lifts them (structural limits on
// bitset widths still apply).
struct Caps {
    std::size_t set_cap = 12;       // per-college domain size for set axioms
    std::size_t seq_cap = 8;        // per-college domain size for sequence axioms
    std::uint64_t profile_cap = 1'000'000; // preference-profile product
    std::size_t tabulate_cap = 16;  // per-college domain size for full tables
    bool allow_large = false;

    std::size_t effective_set_cap() const { return allow_large ? 20 : set_cap; }
    std::size_t effective_seq_cap() const { return allow_large ? 20 : seq_cap; }
    std::size_t effective_tabulate_cap() const { return allow_large ? 20 : tabulate_cap; }
};

// Deterministic sampling of a profile space too large to enumerate.
struct SampleSpec {
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

struct ScanOptions {
    Caps caps;
    std::optional<SampleSpec> sample;
};

} // namespace mmc

#endif
