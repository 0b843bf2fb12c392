/*
 * Copyright 2026 The idealwords Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IDEALWORDS_CLI_HPP_
#define IDEALWORDS_CLI_HPP_

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace iw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCompute = 3;

// Entry point of the `iw` tool. Reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Serializes a report with sorted keys and 17 significant digits per float.
std::string format_report(const nlohmann::json& report);

}  // namespace iw::cli

#endif  // IDEALWORDS_CLI_HPP_
