// SPDX-License-Identifier: Apache-2.0
//
// ris-locate: localization with multiple single-RX-RF-chain RISs
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <vector>

#include <armadillo>

#include "rislocate/aoa.hpp"
#include "rislocate/geometry.hpp"

namespace rislocate
{

enum class EstimationMethod
{
    ls,
    ml
};

struct PositionEstimate
{
    Vec3 position;
    EstimationMethod method = EstimationMethod::ls;
    int iterations = 0; // accepted descent steps (0 for the closed form)
    double objective = 0.0;
    bool converged = true;
};

// A bearing ray in the global frame: points on it are anchor + s*direction.
struct Line
{
    Vec3 anchor;
    Vec3 direction; // unit norm
};

struct LineBundle
{
    std::vector<Line> lines;
};

// Global unit direction from a RIS toward the source implied by its local
// angle estimate: [sin(el)cos(az + orientation), sin(el)sin(az +
// orientation), cos(el)].
Vec3 direction_vector(const AoaEstimate &est, double orientation);

// One line per RIS, anchored at its reference position.
LineBundle make_line_bundle(const std::vector<AoaEstimate> &estimates,
                            const std::vector<RisDescriptor> &ris);

// Closed-form point minimizing the sum of squared distances to all lines:
// p = (sum_m B_m)^{-1} (sum_m B_m p_m) with B_m = I - v_m v_m^T. Requires at
// least two lines; throws std::runtime_error when all directions are
// parallel (singular normal matrix). The reported objective is the summed
// squared distance.
PositionEstimate ls_intersect(const LineBundle &bundle);

// Weighted angle-residual objective:
// sum_m [el_m - el_m(p), wrap(az_m - az_m(p))] G_m^{-1} [...]^T.
// Throws std::domain_error when p coincides with a RIS reference.
double ml_objective(const Vec3 &p, const std::vector<AoaEstimate> &estimates,
                    const std::vector<RisDescriptor> &ris);

// Damped Gauss-Newton descent on ml_objective starting from init. Steps are
// only accepted when the objective strictly decreases, so the result is
// never worse than the initializer. Stops when the step norm drops below
// tol or after max_iters candidate steps.
PositionEstimate ml_refine(const std::vector<AoaEstimate> &estimates,
                           const std::vector<RisDescriptor> &ris, const Vec3 &init,
                           int max_iters = 100, double tol = 1e-6);

} // namespace rislocate
