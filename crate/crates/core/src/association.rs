//! Fixed-power user association by Lagrangian dual decomposition.
//!
//! With transmit powers held fixed, choosing one serving BS per user to
//! maximize the sum of log-utilities reduces to
//!
//! ```text
//! max  sum_ij x_ij m_ij - sum_j k_j ln k_j     (one BS per user, k_j = load)
//! ```
//!
//! where `m_ij = ln(W ln(1 + SINR_ij))`. The continuous relaxation is convex
//! and its dual decomposes: each user picks the BS maximizing `m_ij - mu_j`
//! given per-BS prices `mu`, each BS offers supply `e^{mu_j - nu - 1}`, and a
//! subgradient iteration balances supply against realized demand. The argmax
//! assignment is always integral, so the dual solution solves the original
//! combinatorial problem.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::netmodel::{PowerAllocation, Scenario};

/// Per-pair association utilities `m_ij = ln(W ln(1 + SINR_ij))`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityWeights {
    n_users: usize,
    n_bs: usize,
    m: Vec<f64>,
}

impl UtilityWeights {
    /// Builds weights from an explicit matrix (row-major, `n_users x n_bs`).
    pub fn from_matrix(n_users: usize, n_bs: usize, m: Vec<f64>) -> Result<Self> {
        if m.len() != n_users * n_bs {
            return Err(Error::InvalidConfig(format!(
                "weight matrix must hold {} entries, got {}",
                n_users * n_bs,
                m.len()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("weights must be finite".to_string()));
        }
        Ok(Self { n_users, n_bs, m })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.n_bs + j]
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_bs(&self) -> usize {
        self.n_bs
    }
}

/// Binary user-to-BS assignment plus the induced per-BS loads.
///
/// Stored as one serving BS index per user, which makes the one-BS-per-user
/// and load-consistency invariants structural.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Association {
    serving: Vec<usize>,
    load: Vec<usize>,
}

impl Association {
    pub fn from_serving(serving: Vec<usize>, n_bs: usize) -> Result<Self> {
        let mut load = vec![0usize; n_bs];
        for &j in &serving {
            if j >= n_bs {
                return Err(Error::InvalidConfig(format!("serving BS index {j} out of range")));
            }
            load[j] += 1;
        }
        Ok(Self { serving, load })
    }

    /// Serving BS of user `i`.
    #[inline]
    pub fn serving_bs(&self, i: usize) -> usize {
        self.serving[i]
    }

    /// Number of users on BS `j` (the `k_j` of the load vector).
    #[inline]
    pub fn load(&self, j: usize) -> usize {
        self.load[j]
    }

    /// Binary association indicator `x_ij`.
    #[inline]
    pub fn x(&self, i: usize, j: usize) -> bool {
        self.serving[i] == j
    }

    pub fn n_users(&self) -> usize {
        self.serving.len()
    }

    pub fn n_bs(&self) -> usize {
        self.load.len()
    }

    pub fn loads(&self) -> &[usize] {
        &self.load
    }

    /// Users served by BS `j`.
    pub fn users_of(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.serving.iter().enumerate().filter(move |(_, s)| **s == j).map(|(i, _)| i)
    }
}

/// Dual state of the association subproblem: per-BS prices and the scalar
/// multiplier of the total-load constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct AssocDualState {
    pub mu: Vec<f64>,
    pub nu: f64,
    pub iteration: usize,
}

/// Which closed form refreshes `nu` from the prices.
///
/// `Stationary` enforces `sum_j e^{mu_j - nu - 1} = N_u` exactly, i.e.
/// `nu = ln(sum_j e^{mu_j - 1}) - ln N_u`. `Literal` divides the log-sum by
/// the user count instead; it is kept as an option for comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NuMode {
    #[default]
    Stationary,
    Literal,
}

/// Knobs for [`solve_association`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssocOptions {
    /// Supply/demand mismatch tolerance (max over BSs).
    pub tol: f64,
    pub max_iter: usize,
    /// Subgradient step is `step0 / sqrt(t)`.
    pub step0: f64,
    pub nu_mode: NuMode,
}

impl Default for AssocOptions {
    fn default() -> Self {
        Self { tol: 1e-3, max_iter: 2000, step0: 1.0, nu_mode: NuMode::Stationary }
    }
}

/// One iteration row of the dual trace.
#[derive(Debug, Clone)]
pub struct AssocTraceRow {
    pub iteration: usize,
    pub mu: Vec<f64>,
    pub load: Vec<usize>,
    pub objective: f64,
    pub mismatch: f64,
}

/// Dual-iteration trace, exportable as CSV.
#[derive(Debug, Clone, Default)]
pub struct AssocTrace {
    pub rows: Vec<AssocTraceRow>,
}

impl AssocTrace {
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        let n_bs = self.rows.first().map_or(0, |r| r.mu.len());
        let mut header = vec!["iteration".to_string()];
        header.extend((0..n_bs).map(|j| format!("mu_{j}")));
        header.extend((0..n_bs).map(|j| format!("load_{j}")));
        header.push("objective".to_string());
        header.push("mismatch".to_string());
        writeln!(w, "{}", header.join(","))?;
        for r in &self.rows {
            let mut fields = vec![r.iteration.to_string()];
            fields.extend(r.mu.iter().map(|v| sig12(*v)));
            fields.extend(r.load.iter().map(|k| k.to_string()));
            fields.push(sig12(r.objective));
            fields.push(sig12(r.mismatch));
            writeln!(w, "{}", fields.join(","))?;
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

/// Result of a dual-decomposition association solve.
#[derive(Debug, Clone)]
pub struct AssocOutcome {
    /// Best-objective integral assignment seen across all iterations.
    pub assoc: Association,
    pub dual: AssocDualState,
    pub trace: AssocTrace,
    /// False when the mismatch tolerance was not reached within `max_iter`.
    pub converged: bool,
}

/// Computes `m_ij = ln(W ln(1 + SINR_ij))` for every pair.
///
/// Errors when any SINR is exactly zero, naming the offending pair: the
/// double logarithm is undefined there. Any strictly positive power vector
/// keeps all SINRs positive.
pub fn utility_weights(scenario: &Scenario, p: &PowerAllocation) -> Result<UtilityWeights> {
    let (n_users, n_bs) = (scenario.n_users(), scenario.n_bs());
    let mut m = Vec::with_capacity(n_users * n_bs);
    for i in 0..n_users {
        for j in 0..n_bs {
            let sinr = scenario.sinr(i, j, p);
            if sinr <= 0.0 {
                return Err(Error::ZeroSinr { user: i, bs: j });
            }
            m.push((scenario.bandwidth_hz * sinr.ln_1p()).ln());
        }
    }
    UtilityWeights::from_matrix(n_users, n_bs, m)
}

/// Price-adjusted argmax assignment: user `i` picks the BS maximizing
/// `m_ij - mu_j`, ties broken towards the lowest BS index.
pub fn assign_users(m: &UtilityWeights, mu: &[f64]) -> Association {
    let serving = (0..m.n_users())
        .map(|i| {
            let mut best = 0;
            let mut best_v = m.get(i, 0) - mu[0];
            for j in 1..m.n_bs() {
                let v = m.get(i, j) - mu[j];
                if v > best_v {
                    best = j;
                    best_v = v;
                }
            }
            best
        })
        .collect();
    Association::from_serving(serving, m.n_bs()).expect("argmax indices are in range")
}

/// Refreshes the total-load multiplier from the prices.
pub fn update_nu(mu: &[f64], n_users: usize, mode: NuMode) -> f64 {
    // log-sum-exp of (mu_j - 1) with max-shift for stability
    let hi = mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - 1.0;
    let lse = hi + mu.iter().map(|&m| (m - 1.0 - hi).exp()).sum::<f64>().ln();
    match mode {
        NuMode::Stationary => lse - (n_users as f64).ln(),
        NuMode::Literal => lse / n_users as f64,
    }
}

/// Per-BS supply `e^{mu_j - nu - 1}` at the current prices.
fn supplies(state: &AssocDualState) -> Vec<f64> {
    state.mu.iter().map(|&m| (m - state.nu - 1.0).exp()).collect()
}

/// One subgradient step on the prices followed by a `nu` refresh.
///
/// `mu_j` falls when supply exceeds the realized demand `k_j` and rises when
/// demand exceeds supply.
pub fn update_mu(
    state: &AssocDualState,
    assoc: &Association,
    step: f64,
    mode: NuMode,
) -> AssocDualState {
    debug_assert!(step > 0.0);
    let supply = supplies(state);
    let mu: Vec<f64> = state
        .mu
        .iter()
        .zip(supply.iter())
        .zip(assoc.loads())
        .map(|((&m, &s), &k)| m - step * (s - k as f64))
        .collect();
    let nu = update_nu(&mu, assoc.n_users(), mode);
    AssocDualState { mu, nu, iteration: state.iteration + 1 }
}

/// Association objective `sum_ij x_ij m_ij - sum_j k_j ln k_j`, with
/// `0 ln 0 := 0` for unloaded BSs.
pub fn association_objective(assoc: &Association, m: &UtilityWeights) -> f64 {
    let picked: f64 = (0..assoc.n_users()).map(|i| m.get(i, assoc.serving_bs(i))).sum();
    let load_penalty: f64 = assoc
        .loads()
        .iter()
        .map(|&k| if k == 0 { 0.0 } else { (k as f64) * (k as f64).ln() })
        .sum();
    picked - load_penalty
}

/// Solves the fixed-power association problem.
///
/// Iterates assignment and price updates until the supply/demand mismatch
/// `max_j |e^{mu_j - nu - 1} - k_j|` drops below `opts.tol`, returning the
/// best-objective integral assignment observed along the way together with
/// the final dual state and the full trace. Non-convergence within
/// `opts.max_iter` returns the best-seen assignment with `converged = false`.
pub fn solve_association(m: &UtilityWeights, opts: &AssocOptions) -> AssocOutcome {
    let n_bs = m.n_bs();
    let mu = vec![0.0; n_bs];
    let nu = update_nu(&mu, m.n_users(), opts.nu_mode);
    let mut state = AssocDualState { mu, nu, iteration: 0 };

    let mut trace = AssocTrace::default();
    let mut best: Option<(f64, Association)> = None;
    let mut converged = false;

    for t in 1..=opts.max_iter {
        let assoc = assign_users(m, &state.mu);
        let objective = association_objective(&assoc, m);
        let mismatch = supplies(&state)
            .iter()
            .zip(assoc.loads())
            .map(|(s, &k)| (s - k as f64).abs())
            .fold(0.0, f64::max);
        trace.rows.push(AssocTraceRow {
            iteration: t,
            mu: state.mu.clone(),
            load: assoc.loads().to_vec(),
            objective,
            mismatch,
        });
        if best.as_ref().map_or(true, |(b, _)| objective > *b) {
            best = Some((objective, assoc.clone()));
        }
        if mismatch <= opts.tol {
            converged = true;
            break;
        }
        let step = opts.step0 / (t as f64).sqrt();
        state = update_mu(&state, &assoc, step, opts.nu_mode);
    }

    let (_, assoc) = best.expect("at least one iteration ran");
    AssocOutcome { assoc, dual: state, trace, converged }
}
