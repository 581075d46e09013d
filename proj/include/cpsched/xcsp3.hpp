// Copyright 2026 The cpsched Authors
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

#ifndef CPSCHED_XCSP3_HPP
#define CPSCHED_XCSP3_HPP

#include "cpsched/flat.hpp"

#include <string>
#include <string_view>

namespace cpsched::xcsp3 {

/// XCSP3-core document for the model: type COP when it has an objective,
/// CSP otherwise. Byte-stable.
std::string emit(const flat::Model &m);

/// Reads back the subset produced by emit. Throws MalformedDocument or
/// UnknownElement.
flat::Model parse(std::string_view doc);

/// Domain as a range list, e.g. "0..10 15 20..22".
std::string domain_text(const flat::Domain &d);

/// Intension in functional syntax, e.g. "le(add(x,2),y)".
std::string expr_text(const flat::Model &m, const flat::Expr &e);

} // namespace cpsched::xcsp3

#endif // CPSCHED_XCSP3_HPP
