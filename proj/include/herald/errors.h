// Copyright 2026 The Herald Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HERALD_ERRORS_H
#define HERALD_ERRORS_H

#include <stdexcept>
#include <string>

namespace herald {

/// Failure of a numerical procedure on otherwise valid input.
///
/// `kind()` is one of the stable names below and is what the CLI reports.
class NumericalError : public std::runtime_error {
   public:
    NumericalError(std::string kind, const std::string &detail)
        : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {
    }
    const std::string &kind() const {
        return kind_;
    }

   private:
    std::string kind_;
};

namespace error_kind {
inline constexpr const char *kDegenerateMarginal = "degenerate marginal";
inline constexpr const char *kGainVarianceBreakdown = "gain-variance breakdown";
inline constexpr const char *kQuadratureNonConvergence = "quadrature non-convergence";
inline constexpr const char *kOperationalRegimeExceeded = "operational regime exceeded";
inline constexpr const char *kNoUnityGainSolution = "no unity-gain solution";
inline constexpr const char *kAcceptanceStarvation = "acceptance starvation";
inline constexpr const char *kTruncationTailOverflow = "truncation-tail overflow";
inline constexpr const char *kProbabilityUnderflow = "success probability underflow";
}  // namespace error_kind

}  // namespace herald

#endif
