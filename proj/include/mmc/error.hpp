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

#ifndef MMC_ERROR_HPP
#define MMC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mmc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input or violated precondition (CLI exit 2).
struct ValidationError : Error {
    using Error::Error;
};

// Instance exceeds a configured enumeration cap (CLI exit 3).
struct CapacityError : Error {
    using Error::Error;
};

// Revealed-preference digraph has a cycle, or the rationalizing order
// failed its argmax verification pass.
struct RationalizationError : Error {
    using Error::Error;
};

} // namespace mmc

#endif
