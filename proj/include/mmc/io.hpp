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

#ifndef MMC_IO_HPP
#define MMC_IO_HPP

#include <string>

#include <json.hpp>

#include "mmc/audit.hpp"
#include "mmc/da.hpp"
#include "mmc/embed.hpp"
#include "mmc/market.hpp"
#include "mmc/mech.hpp"
#include "mmc/virtual_choice.hpp"

namespace mmc {

using Json = nlohmann::json;

// Contract ids are "college:student:term"; the components may not
// themselves contain ':'.
Contract parse_contract_id(const std::string& id);

// Market files: terms (best first), colleges, students, contracts, and a
// per-college choice spec - a named family with parameters or a total
// explicit table. Serialization always emits tables (the canonical
// form), so parse -> serialize -> parse is the identity on its output.
Market parse_market(const Json& doc);
Market load_market(const std::string& path);
Json market_to_json(const Market& market, const Caps& caps = {});

// Preference files: per-student ordered acceptable contract-id lists;
// missing students read as empty.
PreferenceProfile parse_profile(const Json& doc, const Market& market);
PreferenceProfile load_profile(const std::string& path, const Market& market);
Json profile_to_json(const PreferenceProfile& profile);

Json contracts_to_json(std::span<const Contract> contracts);
std::vector<Contract> contracts_from_json(const Json& arr);

Json audit_report_to_json(const AuditReport& report);
AuditWitness audit_witness_from_json(const Json& doc);

Json stability_verdict_to_json(const StabilityVerdict& verdict);
Json da_trace_to_json(const DATrace& trace);
Json da_stability_report_to_json(const DAStabilityReport& report);
Json rural_hospitals_report_to_json(const RuralHospitalsReport& report);
Json equivalence_report_to_json(const EquivalenceReport& report);
Json membership_report_to_json(const MembershipReport& report);
Json sp_report_to_json(const StrategyProofnessReport& report);
Json economy_to_json(const KelsoCrawfordEconomy& economy);
Json isomorphism_to_json(const Isomorphism& iso);
Json isomorphism_report_to_json(const IsomorphismReport& report);

// FNV-1a over the file bytes, "fnv1a64:<hex>".
std::string file_digest(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace mmc

#endif
