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

#include "rislocate/fusion.hpp"

#include <cmath>
#include <stdexcept>

#include "rislocate/fisher.hpp"

namespace rislocate
{

namespace
{

arma::mat22 inverse_2x2(const arma::mat &g, const char *what)
{
    if (g.n_rows != 2 || g.n_cols != 2)
        throw std::invalid_argument(std::string(what) + ": covariance must be 2x2");
    double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw std::runtime_error(std::string(what) + ": angle covariance is singular");
    arma::mat22 w;
    w(0, 0) = g(1, 1) / det;
    w(0, 1) = -g(0, 1) / det;
    w(1, 0) = -g(1, 0) / det;
    w(1, 1) = g(0, 0) / det;
    return w;
}

// Angle residual [el_hat - el(p); wrap(az_hat - az(p))].
arma::vec2 angle_residual(const Vec3 &p, const AoaEstimate &est, const RisDescriptor &ris)
{
    AoaPair at_p = local_aoa(ris, p);
    arma::vec2 e;
    e[0] = est.aoa.elevation - at_p.elevation;
    e[1] = wrap_pi(est.aoa.azimuth - at_p.azimuth);
    return e;
}

} // namespace

Vec3 direction_vector(const AoaEstimate &est, double orientation)
{
    return unit_direction(AoaPair(est.aoa.azimuth + orientation, est.aoa.elevation));
}

LineBundle make_line_bundle(const std::vector<AoaEstimate> &estimates,
                            const std::vector<RisDescriptor> &ris)
{
    if (estimates.size() != ris.size())
        throw std::invalid_argument("make_line_bundle: estimate and RIS counts differ");
    LineBundle bundle;
    bundle.lines.reserve(ris.size());
    for (std::size_t m = 0; m < ris.size(); ++m)
        bundle.lines.push_back(
            {ris[m].reference_position, direction_vector(estimates[m], ris[m].orientation)});
    return bundle;
}

PositionEstimate ls_intersect(const LineBundle &bundle)
{
    if (bundle.lines.size() < 2)
        throw std::invalid_argument("ls_intersect: at least two lines are required");

    arma::mat s(3, 3, arma::fill::zeros);
    arma::vec b(3, arma::fill::zeros);
    for (const Line &line : bundle.lines)
    {
        arma::vec v = {line.direction.x, line.direction.y, line.direction.z};
        arma::vec a = {line.anchor.x, line.anchor.y, line.anchor.z};
        arma::mat proj = arma::eye(3, 3) - v * v.t();
        s += proj;
        b += proj * a;
    }

    if (arma::rcond(s) < 1e-12)
        throw std::runtime_error("ls_intersect: all bearing lines are parallel, no unique point");
    arma::vec p = arma::solve(s, b);

    double obj = 0.0;
    for (const Line &line : bundle.lines)
    {
        Vec3 d = Vec3{p[0], p[1], p[2]} - line.anchor;
        double along = d.dot(line.direction);
        obj += d.dot(d) - along * along;
    }

    PositionEstimate est;
    est.position = {p[0], p[1], p[2]};
    est.method = EstimationMethod::ls;
    est.iterations = 0;
    est.objective = obj;
    est.converged = true;
    return est;
}

double ml_objective(const Vec3 &p, const std::vector<AoaEstimate> &estimates,
                    const std::vector<RisDescriptor> &ris)
{
    if (estimates.size() != ris.size() || estimates.empty())
        throw std::invalid_argument("ml_objective: estimate and RIS counts differ or are empty");
    double obj = 0.0;
    for (std::size_t m = 0; m < ris.size(); ++m)
    {
        arma::vec2 e = angle_residual(p, estimates[m], ris[m]);
        arma::mat22 w = inverse_2x2(estimates[m].covariance, "ml_objective");
        obj += arma::dot(e, w * e);
    }
    return obj;
}

PositionEstimate ml_refine(const std::vector<AoaEstimate> &estimates,
                           const std::vector<RisDescriptor> &ris, const Vec3 &init, int max_iters,
                           double tol)
{
    if (max_iters < 0)
        throw std::invalid_argument("ml_refine: max_iters must be >= 0");
    if (!(tol > 0.0))
        throw std::invalid_argument("ml_refine: tol must be positive");

    std::vector<arma::mat22> weights;
    weights.reserve(estimates.size());
    for (const AoaEstimate &est : estimates)
        weights.push_back(inverse_2x2(est.covariance, "ml_refine"));

    Vec3 p = init;
    double obj = ml_objective(p, estimates, ris);
    if (!std::isfinite(obj))
        throw std::invalid_argument("ml_refine: objective is not finite at the initializer");

    PositionEstimate out;
    out.method = EstimationMethod::ml;
    out.converged = false;

    double damping = 1e-3;
    int accepted = 0;
    for (int it = 0; it < max_iters; ++it)
    {
        arma::mat h(3, 3, arma::fill::zeros);
        arma::vec g(3, arma::fill::zeros);
        for (std::size_t m = 0; m < ris.size(); ++m)
        {
            arma::mat t = position_jacobian(p, ris[m]); // may signal a degenerate iterate
            arma::vec2 e = angle_residual(p, estimates[m], ris[m]);
            h += t * weights[m] * t.t();
            g += t * (weights[m] * e);
        }

        arma::vec d = h.diag();
        d.transform([](double x) { return std::max(x, 1e-12); });
        arma::vec step;
        bool ok = arma::solve(step, h + damping * arma::diagmat(d), g);
        if (!ok)
        {
            damping *= 10.0;
            continue;
        }
        if (arma::norm(step) < tol)
        {
            out.converged = true;
            break;
        }

        Vec3 cand = {p.x + step[0], p.y + step[1], p.z + step[2]};
        double cand_obj = std::numeric_limits<double>::infinity();
        try
        {
            cand_obj = ml_objective(cand, estimates, ris);
        }
        catch (const std::domain_error &)
        {
            // Candidate hit a degenerate point; treat as a rejected step.
        }

        if (cand_obj < obj)
        {
            p = cand;
            obj = cand_obj;
            ++accepted;
            damping = std::max(damping / 10.0, 1e-12);
        }
        else
        {
            damping *= 10.0;
            if (damping > 1e12)
                break;
        }
    }

    out.position = p;
    out.iterations = accepted;
    out.objective = obj;
    return out;
}

} // namespace rislocate
