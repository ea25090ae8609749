//! Fixed-association power control in log-transformed variables.
//!
//! With the association held fixed, the subtractive power problem
//!
//! ```text
//! max  sum_i ln(ln(1 + lambda_i)) - eta * sum_j p_j
//! s.t. SINR_{i,j(i)} >= lambda_i,   0 < p_j <= Pmax_j
//! ```
//!
//! becomes convex under the substitutions `rho_j = ln p_j`, `theta_i =
//! ln lambda_i`, `omega_i = theta_i - rho_j + beta_i`, and `s_ijq = theta_i -
//! rho_j + rho_q + gamma_iq`, where `beta_i = ln(sigma^2 / h_{i,j(i)})` and
//! `gamma_iq = ln(h_iq / h_{i,j(i)})`. The solver alternates a closed-form
//! primal step (from the stationarity conditions of the Lagrangian) with a
//! projected subgradient step on the multipliers. Interior multipliers are
//! kept interior by small floors; every clamp is counted in the trace.
//!
//! The returned power vector is the best feasible iterate measured by the
//! true objective, warm start included, so a solve can never return something
//! worse than the power it started from.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::association::Association;
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::netmodel::{PowerAllocation, Scenario};

/// Floor keeping the `a` multipliers strictly positive.
const A_FLOOR: f64 = 1e-12;
/// Cap keeping `zeta` and `chi` strictly negative.
const NEG_CAP: f64 = -1e-12;
/// Floor for the argument of the logarithm in the `rho` update.
const RHO_ARG_FLOOR: f64 = 1e-12;
/// The `theta` target is clamped into `(THETA_EPS, 1 - THETA_EPS)`.
const THETA_EPS: f64 = 1e-9;

/// Problem constants derived from the scenario and the fixed association.
#[derive(Debug, Clone)]
pub struct PowerConstants {
    /// Serving BS of each user, from the fixed association.
    serving: Vec<usize>,
    /// `beta_i = ln(sigma^2 / h_{i,j(i)})`.
    beta: Vec<f64>,
    /// `gamma_iq = ln(h_iq / h_{i,j(i)})`, row-major `n_users x n_bs`;
    /// the serving slot is unused.
    gamma: Vec<f64>,
    /// `ln Pmax_j` per BS.
    ln_pmax: Vec<f64>,
    /// Dinkelbach parameter.
    eta: f64,
    n_users: usize,
    n_bs: usize,
}

impl PowerConstants {
    pub fn new(scenario: &Scenario, assoc: &Association, eta: f64) -> Self {
        let (n_users, n_bs) = (scenario.n_users(), scenario.n_bs());
        let serving: Vec<usize> = (0..n_users).map(|i| assoc.serving_bs(i)).collect();
        let beta = (0..n_users)
            .map(|i| (scenario.noise_power_w / scenario.channel.gain(i, serving[i])).ln())
            .collect();
        let mut gamma = vec![0.0; n_users * n_bs];
        for i in 0..n_users {
            let h_serv = scenario.channel.gain(i, serving[i]);
            for q in 0..n_bs {
                if q != serving[i] {
                    gamma[i * n_bs + q] = (scenario.channel.gain(i, q) / h_serv).ln();
                }
            }
        }
        Self {
            serving,
            beta,
            gamma,
            ln_pmax: scenario.bss.iter().map(|b| b.max_power_w.ln()).collect(),
            eta,
            n_users,
            n_bs,
        }
    }

    #[inline]
    fn gamma(&self, i: usize, q: usize) -> f64 {
        self.gamma[i * self.n_bs + q]
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Transformed primal variables.
///
/// `s` is stored row-major `n_users x n_bs` with the serving slot unused.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPrimal {
    pub rho: Vec<f64>,
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
    pub s: Vec<f64>,
}

impl PowerPrimal {
    #[inline]
    pub fn s(&self, i: usize, q: usize, n_bs: usize) -> f64 {
        self.s[i * n_bs + q]
    }

    /// Powers implied by `rho`, clamped to the per-BS maxima so feasibility
    /// is exact despite `exp(ln x)` rounding.
    pub fn powers(&self, scenario: &Scenario) -> PowerAllocation {
        PowerAllocation::new(
            self.rho
                .iter()
                .zip(&scenario.bss)
                .map(|(r, bs)| r.exp().min(bs.max_power_w))
                .collect(),
        )
    }
}

/// Multipliers: `a` (SINR inequality), `b` (power cap), `zeta` / `chi`
/// (equality constraints), same layout conventions as [`PowerPrimal`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDual {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub zeta: Vec<f64>,
    pub chi: Vec<f64>,
}

impl PowerDual {
    /// Spec initialization: `a = 1`, `b = 0`, `zeta = -1`, `chi = -0.1`.
    pub fn initial(n_users: usize, n_bs: usize) -> Self {
        Self {
            a: vec![1.0; n_users],
            b: vec![0.0; n_bs],
            zeta: vec![-1.0; n_users],
            chi: vec![-0.1; n_users * n_bs],
        }
    }

    #[inline]
    pub fn chi(&self, i: usize, q: usize, n_bs: usize) -> f64 {
        self.chi[i * n_bs + q]
    }
}

/// Knobs for [`solve_power`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerOptions {
    /// Max residual of the transformed constraints at convergence.
    pub tol: f64,
    pub max_iter: usize,
    /// Subgradient step is `step0 / sqrt(t)`.
    pub step0: f64,
    /// Below this `eta` the power penalty vanishes and max power is optimal.
    pub eta_floor: f64,
    /// Residuals and the true objective are evaluated every this many
    /// iterations (and always on the last one).
    pub check_every: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iter: 5000, step0: 0.1, eta_floor: 1e-9, check_every: 5 }
    }
}

/// One evaluated row of the solver trace.
#[derive(Debug, Clone)]
pub struct PowerTraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub max_eq_residual: f64,
    pub max_ineq_violation: f64,
    /// Clamp events since the previous recorded row.
    pub clamp_count: usize,
}

/// Solver trace, exportable as CSV.
#[derive(Debug, Clone, Default)]
pub struct PowerTrace {
    pub rows: Vec<PowerTraceRow>,
}

impl PowerTrace {
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "iteration,objective,max_eq_residual,max_ineq_violation,clamp_count")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.iteration,
                sig12(r.objective),
                sig12(r.max_eq_residual),
                sig12(r.max_ineq_violation),
                r.clamp_count
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}

/// Outcome of a power solve.
#[derive(Debug, Clone)]
pub struct PowerOutcome {
    /// Best feasible power by true objective (warm start included).
    pub power: PowerAllocation,
    pub trace: PowerTrace,
    /// True when the residuals reached `opts.tol` within `opts.max_iter`.
    pub converged: bool,
    pub iterations: usize,
    pub total_clamps: usize,
}

/// The kernel `f(x) = e^x / ((1 + e^x) ln(1 + e^x))`, strictly decreasing
/// with range (0, 1). Stable over the whole f64 range.
pub fn f_eval(x: f64) -> f64 {
    if x >= 0.0 {
        // ln(1 + e^x) = x + ln(1 + e^-x)
        let em = (-x).exp();
        1.0 / ((1.0 + em) * (x + em.ln_1p()))
    } else {
        let u = x.exp();
        let l = u.ln_1p();
        if l == 0.0 {
            // e^x underflowed; the limit as x -> -inf is 1.
            1.0
        } else {
            u / ((1.0 + u) * l)
        }
    }
}

/// Inverse of [`f_eval`] by bisection with an expanding initial bracket.
///
/// Returns `x` with `|f(x) - y| <= 1e-10` for `y` in the open interval
/// (0, 1); anything outside is a domain error (callers clamp first).
pub fn f_inverse(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::FInverseDomain(y));
    }
    // f is decreasing: find lo with f(lo) >= y and hi with f(hi) <= y.
    let mut lo = -1.0;
    while f_eval(lo) < y {
        lo *= 2.0;
        if lo < -1e300 {
            break;
        }
    }
    let mut hi = 1.0;
    while f_eval(hi) > y {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = f_eval(mid);
        if (v - y).abs() <= 1e-10 {
            return Ok(mid);
        }
        if v > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Closed-form primal step from the stationarity conditions.
///
/// Returns the new primal plus the number of clamp events (floored `rho`
/// log-arguments and out-of-range `theta` targets).
pub fn primal_update(dual: &PowerDual, consts: &PowerConstants) -> (PowerPrimal, usize) {
    let (n_users, n_bs) = (consts.n_users, consts.n_bs);
    let mut clamps = 0usize;

    // rho_j = -ln eta + ln(-b_j - sum_{i in U_j} zeta_i
    //          - sum_{q != j}(sum_{i in U_j} chi_ijq - sum_{i in U_q} chi_iqj))
    let ln_eta = consts.eta.ln();
    let mut arg = vec![0.0; n_bs];
    for j in 0..n_bs {
        arg[j] = -dual.b[j];
    }
    for i in 0..n_users {
        let j = consts.serving[i];
        arg[j] -= dual.zeta[i];
        for q in 0..n_bs {
            if q != j {
                let chi = dual.chi(i, q, n_bs);
                arg[j] -= chi; // outgoing interference charge of BS j's user
                arg[q] += chi; // incoming charge against interferer q
            }
        }
    }
    let rho: Vec<f64> = arg
        .iter()
        .zip(&consts.ln_pmax)
        .map(|(&a, &cap)| {
            let a = if a <= RHO_ARG_FLOOR {
                clamps += 1;
                RHO_ARG_FLOOR
            } else {
                a
            };
            (-ln_eta + a.ln()).min(cap)
        })
        .collect();

    let mut theta = vec![0.0; n_users];
    let mut omega = vec![0.0; n_users];
    let mut s = vec![0.0; n_users * n_bs];
    for i in 0..n_users {
        let j = consts.serving[i];
        let mut target = -dual.zeta[i];
        for q in 0..n_bs {
            if q != j {
                target -= dual.chi(i, q, n_bs);
            }
        }
        if !(THETA_EPS..=1.0 - THETA_EPS).contains(&target) {
            target = target.clamp(THETA_EPS, 1.0 - THETA_EPS);
            clamps += 1;
        }
        theta[i] = f_inverse(target).expect("clamped target is inside (0, 1)");
        omega[i] = (-dual.zeta[i] / dual.a[i]).ln();
        for q in 0..n_bs {
            if q != j {
                s[i * n_bs + q] = (-dual.chi(i, q, n_bs) / dual.a[i]).ln();
            }
        }
    }

    (PowerPrimal { rho, theta, omega, s }, clamps)
}

/// Projected subgradient step on the multipliers.
///
/// `a` and `b` stay nonnegative by projection; `a` is floored and `zeta`,
/// `chi` capped to keep the next primal step defined.
pub fn dual_update(
    primal: &PowerPrimal,
    dual: &PowerDual,
    consts: &PowerConstants,
    step: f64,
) -> PowerDual {
    debug_assert!(step > 0.0);
    let (n_users, n_bs) = (consts.n_users, consts.n_bs);

    let mut a = Vec::with_capacity(n_users);
    let mut zeta = Vec::with_capacity(n_users);
    let mut chi = dual.chi.clone();
    for i in 0..n_users {
        let j = consts.serving[i];
        let rho_j = primal.rho[j];

        let mut load_margin = primal.omega[i].exp() - 1.0;
        for q in 0..n_bs {
            if q != j {
                load_margin += primal.s(i, q, n_bs).exp();
            }
        }
        a.push((dual.a[i] + step * load_margin).max(0.0).max(A_FLOOR));

        let zeta_grad = primal.omega[i] - primal.theta[i] + rho_j - consts.beta[i];
        zeta.push((dual.zeta[i] + step * zeta_grad).min(NEG_CAP));

        for q in 0..n_bs {
            if q != j {
                let grad =
                    primal.s(i, q, n_bs) - primal.theta[i] + rho_j - primal.rho[q] - consts.gamma(i, q);
                chi[i * n_bs + q] = (dual.chi(i, q, n_bs) + step * grad).min(NEG_CAP);
            }
        }
    }

    let b = dual
        .b
        .iter()
        .zip(&primal.rho)
        .zip(&consts.ln_pmax)
        .map(|((&b, &rho), &cap)| (b + step * (rho - cap)).max(0.0))
        .collect();

    PowerDual { a, b, zeta, chi }
}

/// Max violation of the transformed constraints at the current primal:
/// equality residuals in exponentiated form plus the SINR-load inequality.
pub fn residuals(primal: &PowerPrimal, consts: &PowerConstants) -> (f64, f64) {
    let (n_users, n_bs) = (consts.n_users, consts.n_bs);
    let mut max_eq: f64 = 0.0;
    let mut max_ineq: f64 = 0.0;
    for i in 0..n_users {
        let j = consts.serving[i];
        let e_omega = primal.omega[i].exp();
        max_eq = max_eq
            .max((e_omega - (primal.theta[i] - primal.rho[j] + consts.beta[i]).exp()).abs());
        let mut load = e_omega;
        for q in 0..n_bs {
            if q != j {
                let e_s = primal.s(i, q, n_bs).exp();
                let consistent =
                    (primal.theta[i] - primal.rho[j] + primal.rho[q] + consts.gamma(i, q)).exp();
                max_eq = max_eq.max((e_s - consistent).abs());
                load += e_s;
            }
        }
        max_ineq = max_ineq.max(load - 1.0);
    }
    (max_eq, max_ineq.max(0.0))
}

/// Subtractive power objective: `sum_i ln(c_{i,j(i)}) - eta * sum_j p_j`
/// under the loads induced by the fixed association.
pub fn power_objective(
    scenario: &Scenario,
    assoc: &Association,
    p: &PowerAllocation,
    eta: f64,
) -> Result<f64> {
    let mut utility = 0.0;
    for i in 0..scenario.n_users() {
        let j = assoc.serving_bs(i);
        let sinr = scenario.sinr(i, j, p);
        if sinr <= 0.0 {
            return Err(Error::ZeroSinr { user: i, bs: j });
        }
        let c = crate::netmodel::rate(assoc.load(j), sinr, scenario.bandwidth_hz)?;
        utility += c.ln();
    }
    Ok(utility - eta * p.total_watts())
}

/// Solves the fixed-association power-control subproblem.
///
/// `warm` is the incumbent power vector; the result never has a worse true
/// objective. With `eta` below `opts.eta_floor` the penalty term vanishes and
/// the objective is increasing in every power, so max power is returned
/// directly. Persistent clamping or slow convergence returns the best
/// feasible iterate with `converged = false` rather than failing.
pub fn solve_power(
    scenario: &Scenario,
    assoc: &Association,
    eta: f64,
    warm: &PowerAllocation,
    opts: &PowerOptions,
) -> Result<PowerOutcome> {
    let consts = PowerConstants::new(scenario, assoc, eta);

    if eta <= opts.eta_floor {
        let power = crate::baselines::max_power(scenario);
        let objective = power_objective(scenario, assoc, &power, eta)?;
        return Ok(PowerOutcome {
            power,
            trace: PowerTrace {
                rows: vec![PowerTraceRow {
                    iteration: 0,
                    objective,
                    max_eq_residual: 0.0,
                    max_ineq_violation: 0.0,
                    clamp_count: 0,
                }],
            },
            converged: true,
            iterations: 0,
            total_clamps: 0,
        });
    }

    // Feasible incumbent: every iterate competes against the warm start.
    let warm = PowerAllocation::new(
        warm.watts
            .iter()
            .zip(&scenario.bss)
            .map(|(p, bs)| p.max(1e-300).min(bs.max_power_w))
            .collect(),
    );
    let mut best_obj = power_objective(scenario, assoc, &warm, eta)?;
    let mut best_p = warm;

    let mut dual = PowerDual::initial(consts.n_users, consts.n_bs);
    let mut trace = PowerTrace::default();
    let mut converged = false;
    let mut iterations = 0;
    let mut total_clamps = 0usize;
    let mut clamps_since_row = 0usize;

    for t in 1..=opts.max_iter {
        iterations = t;
        let (primal, clamps) = primal_update(&dual, &consts);
        total_clamps += clamps;
        clamps_since_row += clamps;

        let check = t % opts.check_every == 0 || t == opts.max_iter || t == 1;
        if check {
            let p = primal.powers(scenario);
            let objective = power_objective(scenario, assoc, &p, eta)?;
            if objective > best_obj {
                best_obj = objective;
                best_p = p;
            }
            let (max_eq, max_ineq) = residuals(&primal, &consts);
            trace.rows.push(PowerTraceRow {
                iteration: t,
                objective,
                max_eq_residual: max_eq,
                max_ineq_violation: max_ineq,
                clamp_count: clamps_since_row,
            });
            clamps_since_row = 0;
            if max_eq.max(max_ineq) <= opts.tol {
                converged = true;
                break;
            }
        }

        let step = opts.step0 / (t as f64).sqrt();
        dual = dual_update(&primal, &dual, &consts, step);
    }

    Ok(PowerOutcome { power: best_p, trace, converged, iterations, total_clamps })
}
