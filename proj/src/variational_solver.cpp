#include "gmk/variational_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "gmk/density.hpp"
#include "gmk/measures.hpp"

namespace gmk::vs {
namespace {

constexpr double kSupportFloor = 1e-8;
constexpr int kTotalStepCap = 5000;

geom::SphereGrid grid_from_atoms(const DiscreteMeasure& mu) {
    geom::SphereGrid g;
    g.dim = mu.dim;
    g.dirs = mu.directions;
    const int m = mu.size();
    g.antipode.assign(m, -1);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const geom::Vec s = geom::add(mu.directions[i], mu.directions[j]);
            if (geom::norm(s) <= 1e-12) {
                g.antipode[i] = j;
                break;
            }
        }
    return g;
}

double hemisphere_moment(const DiscreteMeasure& mu, const geom::Vec& u) {
    double acc = 0.0;
    for (int i = 0; i < mu.size(); ++i)
        acc += mu.weights[i] * std::max(0.0, geom::dot(u, mu.directions[i]));
    return acc;
}

ConcentrationReport hemisphere_check(const DiscreteMeasure& mu) {
    const auto eval = [&](const geom::Vec& u) { return hemisphere_moment(mu, u); };
    geom::Vec best{1.0, 0.0, 0.0};
    double fbest = eval(best);
    if (mu.dim == 2) {
        const int m = 8192;
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * M_PI * j / m;
            const geom::Vec u{std::cos(th), std::sin(th), 0.0};
            const double f = eval(u);
            if (f < fbest) {
                fbest = f;
                best = u;
            }
        }
        double delta = 2.0 * M_PI / m;
        double th0 = std::atan2(best[1], best[0]);
        for (int k = 0; k < 40; ++k) {
            for (const double th : {th0 - delta, th0 + delta}) {
                const geom::Vec u{std::cos(th), std::sin(th), 0.0};
                const double f = eval(u);
                if (f < fbest) {
                    fbest = f;
                    th0 = th;
                }
            }
            delta *= 0.5;
        }
        best = {std::cos(th0), std::sin(th0), 0.0};
    } else {
        const geom::SphereGrid g = geom::fibonacci_grid(8192);
        for (const auto& u : g.dirs) {
            const double f = eval(u);
            if (f < fbest) {
                fbest = f;
                best = u;
            }
        }
        double delta = 0.05;
        for (int k = 0; k < 60; ++k) {
            const geom::Vec ref = std::abs(best[2]) < 0.9 ? geom::Vec{0.0, 0.0, 1.0}
                                                          : geom::Vec{1.0, 0.0, 0.0};
            const geom::Vec t1 = geom::normalized(geom::cross(best, ref));
            const geom::Vec t2 = geom::cross(best, t1);
            bool moved = false;
            for (const auto& t : {t1, t2}) {
                for (const double s : {delta, -delta}) {
                    const geom::Vec u = geom::normalized(geom::add(best, geom::scaled(t, s)));
                    const double f = eval(u);
                    if (f < fbest) {
                        fbest = f;
                        best = u;
                        moved = true;
                    }
                }
            }
            if (!moved) delta *= 0.5;
        }
    }
    ConcentrationReport out;
    out.value = fbest / mu.total();
    out.ok = out.value > 1e-10;
    if (!out.ok) out.witness = best;
    return out;
}

ConcentrationReport subsphere_check(const DiscreteMeasure& mu) {
    const int m = mu.size();
    Eigen::MatrixXd dirs(m, mu.dim);
    for (int i = 0; i < m; ++i)
        for (int d = 0; d < mu.dim; ++d) dirs(i, d) = mu.directions[i][d];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs, Eigen::ComputeFullV);
    const Eigen::VectorXd flat = svd.matrixV().col(mu.dim - 1);
    geom::Vec u{0.0, 0.0, 0.0};
    for (int d = 0; d < mu.dim; ++d) u[d] = flat(d);
    double maxdot = 0.0;
    for (int i = 0; i < m; ++i)
        maxdot = std::max(maxdot, std::abs(geom::dot(u, mu.directions[i])));
    ConcentrationReport out;
    out.value = maxdot;
    out.ok = maxdot > 1e-10;
    if (!out.ok) out.witness = u;
    return out;
}

/// State of one constrained-ascent evaluation.
struct Eval {
    double volume = 0.0;
    double phi = 0.0;
    std::vector<double> s1;    // dG/dz_i, zero for atoms whose facet vanished
    std::vector<double> gphi;  // dphi/dz_i = -mu_i z_i^{p-1}
    bool all_active = true;
};

double phi_of(const DiscreteMeasure& mu, const std::vector<double>& z, double p) {
    double acc = 0.0;
    for (int i = 0; i < mu.size(); ++i) acc += mu.weights[i] * std::pow(z[i], p);
    return -acc / p;
}

class Problem {
  public:
    Problem(const Params& prm, const DiscreteMeasure& mu, bool even_cone)
        : prm_(prm), mu_(mu), grid_(grid_from_atoms(mu)), even_(even_cone) {
        const int m = mu.size();
        if (even_) {
            rep_of_.assign(m, -1);
            for (int i = 0; i < m; ++i) {
                if (rep_of_[i] >= 0) continue;
                const int j = grid_.antipode[i];
                const int var = static_cast<int>(members_.size());
                rep_of_[i] = var;
                if (j >= 0) rep_of_[j] = var;
                members_.push_back(j >= 0 && j != i ? std::vector<int>{i, j}
                                                    : std::vector<int>{i});
            }
        } else {
            members_.resize(m);
            rep_of_.resize(m);
            for (int i = 0; i < m; ++i) {
                members_[i] = {i};
                rep_of_[i] = i;
            }
        }
    }

    int vars() const { return static_cast<int>(members_.size()); }

    std::vector<double> expand(const std::vector<double>& x) const {
        std::vector<double> z(mu_.size());
        for (int i = 0; i < mu_.size(); ++i) z[i] = x[rep_of_[i]];
        return z;
    }

    std::vector<double> reduce(const std::vector<double>& g) const {
        std::vector<double> out(vars(), 0.0);
        for (int i = 0; i < mu_.size(); ++i) out[rep_of_[i]] += g[i];
        return out;
    }

    geom::Polytope body_of(const std::vector<double>& x) const {
        geom::SupportVector sv;
        sv.grid = grid_;
        sv.values = expand(x);
        return geom::wulff_shape(sv);
    }

    double volume_of(const std::vector<double>& x) const {
        return measures::gauss_volume(prm_, body_of(x));
    }

    Eval evaluate(const std::vector<double>& x) const {
        const std::vector<double> z = expand(x);
        const geom::Polytope body = body_of(x);
        Eval out;
        out.volume = measures::gauss_volume(prm_, body);
        out.phi = phi_of(mu_, z, prm_.p);
        out.s1.assign(mu_.size(), 0.0);
        const auto atoms = measures::weighted_surface_measure(prm_, body, 1.0);
        for (std::size_t f = 0; f < body.facets.size(); ++f) {
            const int src = body.facets[f].source;
            if (src >= 0) out.s1[src] += atoms.weights[f];
        }
        for (int i = 0; i < mu_.size(); ++i)
            if (out.s1[i] == 0.0) out.all_active = false;
        out.gphi.resize(mu_.size());
        for (int i = 0; i < mu_.size(); ++i)
            out.gphi[i] = -mu_.weights[i] * std::pow(z[i], prm_.p - 1.0);
        return out;
    }

    /// Surface measure atoms of the body at x for the working exponent p,
    /// accumulated back onto the atom indices.
    std::vector<double> sp_atoms(const std::vector<double>& x) const {
        const geom::Polytope body = body_of(x);
        const auto atoms = measures::weighted_surface_measure(prm_, body, prm_.p);
        std::vector<double> out(mu_.size(), 0.0);
        for (std::size_t f = 0; f < body.facets.size(); ++f) {
            const int src = body.facets[f].source;
            if (src >= 0) out[src] += atoms.weights[f];
        }
        return out;
    }

    const geom::SphereGrid& grid() const { return grid_; }

  private:
    Params prm_;
    DiscreteMeasure mu_;
    geom::SphereGrid grid_;
    bool even_ = false;
    std::vector<std::vector<int>> members_;
    std::vector<int> rep_of_;
};

double ball_radius_for_volume(const Params& prm, double c) {
    double lo = 1e-9;
    double hi;
    if (const auto cut = density::support_cutoff(prm)) {
        hi = *cut * (1.0 - 1e-12);
    } else {
        hi = 1.0;
        int guard = 0;
        while (density::ball_mass(prm, hi) < c) {
            hi *= 2.0;
            if (++guard > 300) throw precondition_error("target volume unreachable");
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (density::ball_mass(prm, mid) < c ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Damped Newton on the stationarity system S_p(z) = lambda * mu (reduced
/// over tied variables) together with G(z) = c; finite-difference columns
/// for the measure block, analytic volume row. Returns false when the
/// iteration cannot reach a small residual from the given start.
bool newton_polish(const Problem& prob, const std::vector<double>& wn,
                   double c, std::vector<double>& x, double& lambda_hat,
                   int& eval_count) {
    const int nv = prob.vars();
    const std::vector<double> wr = prob.reduce(wn);

    const auto system = [&](const std::vector<double>& xx, double lh,
                            Eigen::VectorXd& F, std::vector<double>* spr_out) {
        const std::vector<double> spr = prob.reduce(prob.sp_atoms(xx));
        ++eval_count;
        for (int k = 0; k < nv; ++k) F(k) = spr[k] - lh * wr[k];
        F(nv) = prob.volume_of(xx) - c;
        ++eval_count;
        if (spr_out) *spr_out = spr;
    };

    Eigen::VectorXd F(nv + 1);
    system(x, lambda_hat, F, nullptr);
    double fnorm = F.norm();
    for (int iter = 0; iter < 40; ++iter) {
        if (fnorm <= 1e-12 * std::max(1.0, std::abs(lambda_hat))) return true;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nv + 1, nv + 1);
        const Eval ev = prob.evaluate(x);
        ++eval_count;
        const std::vector<double> s1r = prob.reduce(ev.s1);
        for (int j = 0; j < nv; ++j) {
            const double eps = 1e-6 * std::max(x[j], 1e-3);
            std::vector<double> xp = x;
            xp[j] += eps;
            const std::vector<double> spr = prob.reduce(prob.sp_atoms(xp));
            ++eval_count;
            std::vector<double> xm = x;
            xm[j] -= eps;
            const std::vector<double> smr = prob.reduce(prob.sp_atoms(xm));
            ++eval_count;
            for (int k = 0; k < nv; ++k) J(k, j) = (spr[k] - smr[k]) / (2.0 * eps);
            J(nv, j) = s1r[j];
        }
        for (int k = 0; k < nv; ++k) J(k, nv) = -wr[k];
        const Eigen::VectorXd delta = J.partialPivLu().solve(-F);
        if (!delta.allFinite()) return false;

        double t = 1.0;
        bool accepted = false;
        while (t >= 1e-10) {
            std::vector<double> xn(nv);
            bool positive = true;
            for (int j = 0; j < nv; ++j) {
                xn[j] = x[j] + t * delta(j);
                if (!(xn[j] > kSupportFloor)) positive = false;
            }
            const double lhn = lambda_hat + t * delta(nv);
            if (positive) {
                Eigen::VectorXd Fn(nv + 1);
                try {
                    system(xn, lhn, Fn, nullptr);
                } catch (const std::exception&) {
                    t *= 0.5;
                    continue;
                }
                if (Fn.norm() <= (1.0 - 1e-4 * t) * fnorm) {
                    x = std::move(xn);
                    lambda_hat = lhn;
                    F = Fn;
                    fnorm = F.norm();
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) return fnorm <= 1e-9 * std::max(1.0, std::abs(lambda_hat));
    }
    return fnorm <= 1e-9 * std::max(1.0, std::abs(lambda_hat));
}

/// Shared augmented-Lagrangian ascent with a Newton polish; `even_cone` ties
/// antipodal supports. The measure is normalized internally so the iteration
/// is invariant under scaling of mu.
NormalizedSolution run_solver(const Params& prm, const DiscreteMeasure& mu, double c,
                              double tol, bool even_cone) {
    const double mu_total = mu.total();
    DiscreteMeasure nm = mu;
    for (double& w : nm.weights) w /= mu_total;

    const Problem prob(prm, nm, even_cone);
    const int nv = prob.vars();

    const double r0 = ball_radius_for_volume(prm, c);
    std::vector<double> x(nv, r0);

    NormalizedSolution sol;
    sol.target_volume = c;
    sol.initial_objective = phi_of(mu, prob.expand(x), prm.p);

    Eval ev = prob.evaluate(x);
    int total_steps = 0;

    // Least-squares multiplier at the feasible start keeps the first ascent
    // steps shape-changing instead of scale-collapsing.
    double lam;
    {
        const std::vector<double> gp = prob.reduce(ev.gphi);
        const std::vector<double> gs = prob.reduce(ev.s1);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < nv; ++i) {
            num += gp[i] * gs[i];
            den += gs[i] * gs[i];
        }
        lam = den > 0.0 ? num / den : 0.0;
    }
    double rho = 50.0;
    double step = 0.05 * r0;
    double prev_viol = std::numeric_limits<double>::infinity();
    bool polished = false;
    double lambda_hat = 0.0;

    const auto aug = [&](double phi, double vol) {
        const double viol = vol - c;
        return -phi + lam * viol + 0.5 * rho * viol * viol;
    };

    for (int outer = 0; outer < 60 && !polished; ++outer) {
        for (int inner = 0; inner < 300; ++inner) {
            const double viol = ev.volume - c;
            const double kappa = lam + rho * viol;
            std::vector<double> grad_full(nm.size());
            for (int i = 0; i < nm.size(); ++i)
                grad_full[i] = -ev.gphi[i] + kappa * ev.s1[i];
            std::vector<double> grad = prob.reduce(grad_full);
            for (int i = 0; i < nv; ++i)
                if (x[i] <= kSupportFloor && grad[i] > 0.0) grad[i] = 0.0;
            double gnorm2 = 0.0, ref2 = 0.0;
            for (double g : grad) gnorm2 += g * g;
            for (double g : prob.reduce(ev.gphi)) ref2 += g * g;
            if (std::sqrt(gnorm2) <= std::max(1e-12, 1e-3 * std::sqrt(ref2))) break;

            const double a0 = aug(ev.phi, ev.volume);
            bool accepted = false;
            while (step >= 1e-14) {
                std::vector<double> xn(nv);
                double disp2 = 0.0;
                for (int i = 0; i < nv; ++i) {
                    double cand = x[i] - step * grad[i];
                    // multiplicative trust box: no support moves by more
                    // than ~35% in one step
                    cand = std::min(cand, 1.35 * x[i]);
                    cand = std::max(cand, x[i] / 1.35);
                    xn[i] = std::max(kSupportFloor, cand);
                    disp2 += (xn[i] - x[i]) * (xn[i] - x[i]);
                }
                if (disp2 == 0.0) break;
                bool usable = true;
                double voln = 0.0;
                try {
                    voln = prob.volume_of(xn);
                } catch (const std::exception&) {
                    usable = false;
                }
                if (usable) {
                    const double phin = phi_of(nm, prob.expand(xn), prm.p);
                    if (aug(phin, voln) <= a0 - 1e-4 * disp2 / step) {
                        x = std::move(xn);
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!accepted) break;
            step = std::min(step * 1.5, 10.0 * r0);
            ev = prob.evaluate(x);
            if (++total_steps > kTotalStepCap) {
                std::ostringstream msg;
                msg << "normalized solver exceeded " << kTotalStepCap
                    << " steps (|G-c| = " << std::abs(ev.volume - c) << ")";
                throw nonconvergence_error(msg.str());
            }
        }

        const double viol = ev.volume - c;
        if (std::abs(viol) <= 1e-3) {
            const std::vector<double> sp = prob.sp_atoms(x);
            double sp_total = 0.0;
            for (double w : sp) sp_total += w;
            double resid = 0.0;
            for (int i = 0; i < nm.size(); ++i)
                resid = std::max(resid, std::abs(sp[i] / sp_total - nm.weights[i]));
            if (resid <= 0.1) {
                std::vector<double> x_try = x;
                double lh = sp_total;
                int evals = 0;
                if (newton_polish(prob, nm.weights, c, x_try, lh, evals)) {
                    x = std::move(x_try);
                    lambda_hat = lh;
                    total_steps += evals;
                    polished = true;
                    break;
                }
                total_steps += evals;
            }
        }
        lam += rho * viol;
        if (std::abs(viol) > 0.25 * prev_viol) rho = std::min(rho * 3.0, 1e12);
        prev_viol = std::abs(viol);
    }

    if (!polished) {
        std::ostringstream msg;
        msg << "normalized solver did not reach the stationary system after "
            << total_steps << " steps (|G-c| = " << std::abs(ev.volume - c) << ")";
        throw nonconvergence_error(msg.str());
    }

    // Verify the full success contract at the polished point.
    ev = prob.evaluate(x);
    const std::vector<double> sp = prob.sp_atoms(x);
    double sp_total = 0.0;
    for (double w : sp) sp_total += w;
    double resid = 0.0;
    for (int i = 0; i < nm.size(); ++i)
        resid = std::max(resid, std::abs(sp[i] / sp_total - nm.weights[i]));
    const double viol = ev.volume - c;
    const std::vector<double> gp = prob.reduce(ev.gphi);
    const std::vector<double> gs = prob.reduce(ev.s1);
    double gg = 0.0, ss = 0.0, gs_dot = 0.0;
    for (int i = 0; i < nv; ++i) {
        gg += gp[i] * gp[i];
        ss += gs[i] * gs[i];
        gs_dot += gp[i] * gs[i];
    }
    const double tan2 = gg - (ss > 0.0 ? gs_dot * gs_dot / ss : 0.0);
    const double tangent = std::sqrt(std::max(0.0, tan2) / std::max(gg, 1e-300));
    if (!(std::abs(viol) <= 1e-7 && resid <= tol && tangent <= 1e-6)) {
        std::ostringstream msg;
        msg << "normalized solver stalled short of tolerance: |G-c| = "
            << std::abs(viol) << ", measure residual = " << resid
            << ", tangent residual = " << tangent;
        throw nonconvergence_error(msg.str());
    }

    sol.first_order_residual = resid;
    sol.tangent_residual = tangent;
    sol.achieved_volume = ev.volume;
    sol.multiplier = sp_total / mu_total;
    (void)lambda_hat;
    sol.all_facets_active = ev.all_active;

    geom::SupportVector sv;
    sv.grid = prob.grid();
    sv.values = prob.expand(x);
    sol.body = geom::wulff_shape(sv);
    sol.support = geom::canonicalize(sv).values;
    sol.objective = phi_of(mu, sv.values, prm.p);
    sol.iterations = total_steps;
    if (!sol.all_facets_active)
        sol.warnings.push_back("some atoms have no facet in the solution body");
    return sol;
}

}  // namespace

double DiscreteMeasure::total() const {
    double acc = 0.0;
    for (double w : weights) acc += w;
    return acc;
}

int DiscreteMeasure::antipode_of(int i) const {
    for (int j = 0; j < size(); ++j)
        if (geom::norm(geom::add(directions[i], directions[j])) <= 1e-12) return j;
    return -1;
}

void DiscreteMeasure::validate() const {
    if (dim != 2 && dim != 3)
        throw precondition_error("measure dimension must be 2 or 3");
    if (directions.empty() || directions.size() != weights.size())
        throw precondition_error("measure needs matching nonempty atom lists");
    for (const auto& v : directions) {
        if (std::abs(geom::norm(v) - 1.0) > 1e-9)
            throw precondition_error("atom directions must be unit vectors");
        if (dim == 2 && v[2] != 0.0)
            throw precondition_error("planar atoms must have zero third component");
    }
    for (double w : weights)
        if (!(w > 0.0)) throw precondition_error("atom weights must be positive");
    if (even) {
        for (int i = 0; i < size(); ++i) {
            const int j = antipode_of(i);
            if (j < 0 || std::abs(weights[i] - weights[j]) > 1e-12 * weights[i])
                throw precondition_error(
                    "even measures need antipodal atoms with equal weights");
        }
    }
}

ConcentrationReport check_not_concentrated(const DiscreteMeasure& mu,
                                           ConcentrationMode mode) {
    mu.validate();
    return mode == ConcentrationMode::Hemisphere ? hemisphere_check(mu)
                                                 : subsphere_check(mu);
}

NormalizedSolution solve_normalized(const Params& prm, const DiscreteMeasure& mu,
                                    double c, double tol) {
    prm.validate();
    mu.validate();
    if (mu.dim != prm.n) throw precondition_error("measure dimension must match params");
    if (!(prm.p > 0.0))
        throw precondition_error("the normalized solver requires p > 0");
    if (!(c > 0.0 && c < 1.0))
        throw precondition_error("target volume must lie in (0, 1)");
    if (c < 0.5 && !mu.even)
        throw precondition_error(
            "target volume below 1/2 requires an even measure");
    const auto conc = check_not_concentrated(mu, ConcentrationMode::Hemisphere);
    if (!conc.ok) {
        std::ostringstream msg;
        msg << "measure is concentrated on a closed hemisphere (pole "
            << (*conc.witness)[0] << ", " << (*conc.witness)[1] << ", "
            << (*conc.witness)[2] << ")";
        throw precondition_error(msg.str());
    }
    return run_solver(prm, mu, c, tol, false);
}

NormalizedSolution solve_normalized_even(const Params& prm, const DiscreteMeasure& mu,
                                         double c, double tol) {
    prm.validate();
    mu.validate();
    if (mu.dim != prm.n) throw precondition_error("measure dimension must match params");
    if (!mu.even) throw precondition_error("the even solver needs an even measure");
    if (!prm.p_negative_admissible()) {
        std::ostringstream msg;
        msg << "inadmissible (p, q) for the even problem: need q < 0 with "
            << "alpha/q - alpha < p < 0, or 0 <= q < alpha/(n+alpha) with p < 0; got p="
            << prm.p << ", q=" << prm.q;
        throw precondition_error(msg.str());
    }
    if (!(c > 0.0 && c < 1.0))
        throw precondition_error("target volume must lie in (0, 1)");
    const auto conc = check_not_concentrated(mu, ConcentrationMode::GreatSubsphere);
    if (!conc.ok) {
        std::ostringstream msg;
        msg << "measure is concentrated on a great subsphere (normal "
            << (*conc.witness)[0] << ", " << (*conc.witness)[1] << ", "
            << (*conc.witness)[2] << ")";
        throw precondition_error(msg.str());
    }
    return run_solver(prm, mu, c, tol, true);
}

double recover_multiplier(const Params& prm, const NormalizedSolution& sol,
                          const DiscreteMeasure& mu, double tol) {
    mu.validate();
    const auto atoms = measures::weighted_surface_measure(prm, sol.body, prm.p);
    std::vector<double> sp(mu.size(), 0.0);
    for (std::size_t f = 0; f < sol.body.facets.size(); ++f) {
        const int src = sol.body.facets[f].source;
        if (src >= 0 && src < mu.size()) sp[src] += atoms.weights[f];
    }
    double sp_total = 0.0;
    for (double w : sp) sp_total += w;
    const double lambda = sp_total / mu.total();
    for (int i = 0; i < mu.size(); ++i) {
        const double ratio = sp[i] / mu.weights[i];
        if (std::abs(ratio - lambda) > tol * std::abs(lambda)) {
            std::ostringstream msg;
            msg << "multiplier inconsistent at atom " << i << ": ratio " << ratio
                << " vs lambda " << lambda;
            throw nonconvergence_error(msg.str());
        }
    }
    return lambda;
}

}  // namespace gmk::vs
