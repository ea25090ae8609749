//! Reference association/power policies and brute-force oracles.
//!
//! The policies (max-SINR association, max transmit power) are the comparison
//! baselines; the exhaustive searches are test references with hard size
//! guards, not product features.

use crate::association::{association_objective, Association, UtilityWeights};
use crate::error::{Error, Result};
use crate::iuapc::uee;
use crate::netmodel::{PowerAllocation, Scenario};

/// Per-BS power levels for the exhaustive UEE search.
///
/// Levels are logarithmically spaced over `[P_max/1000, P_max]` with the
/// exact maximum as the last entry, since rate depends on power through a
/// logarithm.
#[derive(Debug, Clone)]
pub struct PowerGrid {
    levels_per_bs: usize,
    grid: Vec<Vec<f64>>,
}

impl PowerGrid {
    pub fn new(scenario: &Scenario, levels_per_bs: usize) -> Result<Self> {
        if levels_per_bs < 2 {
            return Err(Error::InvalidConfig("power grid needs at least 2 levels".to_string()));
        }
        let span = 1000f64;
        let grid = scenario
            .bss
            .iter()
            .map(|bs| {
                (0..levels_per_bs)
                    .map(|i| {
                        let frac = i as f64 / (levels_per_bs - 1) as f64;
                        bs.max_power_w * span.powf(frac - 1.0)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { levels_per_bs, grid })
    }

    pub fn levels_per_bs(&self) -> usize {
        self.levels_per_bs
    }

    pub fn levels(&self, j: usize) -> &[f64] {
        &self.grid[j]
    }

    fn point_count(&self) -> u128 {
        self.grid.iter().fold(1u128, |acc, l| acc.saturating_mul(l.len() as u128))
    }
}

/// Max-SINR association: each user picks the BS with the strongest received
/// SINR evaluated on large-scale fading only, ties to the lowest index.
pub fn max_sinr_association(scenario: &Scenario, p: &PowerAllocation) -> Association {
    let serving = (0..scenario.n_users())
        .map(|i| {
            let mut best = 0;
            let mut best_v = scenario.sinr_largescale(i, 0, p);
            for j in 1..scenario.n_bs() {
                let v = scenario.sinr_largescale(i, j, p);
                if v > best_v {
                    best = j;
                    best_v = v;
                }
            }
            best
        })
        .collect();
    Association::from_serving(serving, scenario.n_bs()).expect("indices in range")
}

/// Every BS at its maximum power.
pub fn max_power(scenario: &Scenario) -> PowerAllocation {
    PowerAllocation::new(scenario.bss.iter().map(|b| b.max_power_w).collect())
}

const MAX_ASSIGNMENTS: u128 = 10_000_000;
const MAX_UEE_STATES: u128 = 100_000_000;

/// Exhaustive maximizer of the association objective over all `N_B^{N_u}`
/// assignments. Guarded against oversized instances.
pub fn brute_force_association(m: &UtilityWeights) -> Result<Association> {
    let states = (m.n_bs() as u128).checked_pow(m.n_users() as u32).unwrap_or(u128::MAX);
    if states > MAX_ASSIGNMENTS {
        return Err(Error::OracleTooLarge(format!(
            "{}^{} assignments exceed the {MAX_ASSIGNMENTS} guard",
            m.n_bs(),
            m.n_users()
        )));
    }
    let mut best: Option<(f64, Association)> = None;
    let mut serving = vec![0usize; m.n_users()];
    loop {
        let assoc = Association::from_serving(serving.clone(), m.n_bs())?;
        let obj = association_objective(&assoc, m);
        if best.as_ref().map_or(true, |(b, _)| obj > *b) {
            best = Some((obj, assoc));
        }
        // next assignment in base-N_B counting order
        let mut pos = 0;
        loop {
            if pos == serving.len() {
                let (_, assoc) = best.expect("at least one assignment evaluated");
                return Ok(assoc);
            }
            serving[pos] += 1;
            if serving[pos] < m.n_bs() {
                break;
            }
            serving[pos] = 0;
            pos += 1;
        }
    }
}

/// Exhaustive UEE maximization over a power grid.
///
/// For every grid point the association is chosen optimally (the denominator
/// does not depend on it), then the UEE is evaluated; the best grid point in
/// lexicographic order wins ties. This is the reference the end-to-end solver
/// is compared against.
pub fn brute_force_uee(
    scenario: &Scenario,
    grid: &PowerGrid,
) -> Result<(Association, PowerAllocation, f64)> {
    let assignments = (scenario.n_bs() as u128).checked_pow(scenario.n_users() as u32).unwrap_or(u128::MAX);
    let states = assignments.saturating_mul(grid.point_count());
    if states > MAX_UEE_STATES {
        return Err(Error::OracleTooLarge(format!(
            "{states} association x power states exceed the {MAX_UEE_STATES} guard"
        )));
    }

    let n_bs = scenario.n_bs();
    let mut index = vec![0usize; n_bs];
    let mut best: Option<(f64, Association, PowerAllocation)> = None;
    loop {
        let p = PowerAllocation::new((0..n_bs).map(|j| grid.levels(j)[index[j]]).collect());
        let m = crate::association::utility_weights(scenario, &p)?;
        let assoc = brute_force_association(&m)?;
        let eta = uee(scenario, &assoc, &p)?;
        if best.as_ref().map_or(true, |(b, _, _)| eta > *b) {
            best = Some((eta, assoc, p));
        }
        // next grid point, last BS fastest
        let mut pos = n_bs;
        loop {
            if pos == 0 {
                let (eta, assoc, p) = best.expect("at least one grid point evaluated");
                return Ok((assoc, p, eta));
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < grid.levels_per_bs() {
                break;
            }
            index[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{generate_scenario, NetworkConfig};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::netmodel::{BaseStation, BsKind, ChannelMatrix, Point, User};

    fn two_bs_scenario(gains: Vec<f64>, p_macro: f64, p_small: f64) -> Scenario {
        let n_users = gains.len() / 2;
        Scenario {
            bss: vec![
                BaseStation {
                    id: 0,
                    kind: BsKind::Macro,
                    position: Point { x: 0.0, y: 0.0 },
                    max_power_w: p_macro,
                    power_density_dbm_per_hz: 0.0,
                },
                BaseStation {
                    id: 1,
                    kind: BsKind::Small,
                    position: Point { x: 200.0, y: 0.0 },
                    max_power_w: p_small,
                    power_density_dbm_per_hz: 0.0,
                },
            ],
            users: (0..n_users)
                .map(|id| User { id, position: Point { x: 100.0, y: id as f64 } })
                .collect(),
            channel: ChannelMatrix::new(n_users, 2, gains.clone(), gains).unwrap(),
            bandwidth_hz: 1e7,
            noise_power_w: 1e-9,
            circuit_power_w: 1.0,
            seed: 0,
        }
    }

    #[test]
    fn single_bs_captures_all_users() {
        let cfg = NetworkConfig { n_users: 5, n_small: 0, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 2).unwrap();
        let assoc = max_sinr_association(&s, &max_power(&s));
        assert_eq!(assoc.loads(), &[5]);
    }

    #[test]
    fn equal_gains_favor_higher_power() {
        // One user with identical gains towards a 20 W macro and a 0.2 W small
        // BS: received power decides, so the macro wins.
        let s = two_bs_scenario(vec![1e-9, 1e-9], 20.0, 0.2);
        let assoc = max_sinr_association(&s, &max_power(&s));
        assert_eq!(assoc.serving_bs(0), 0);
    }

    #[test]
    fn max_power_matches_density_conversion() {
        let cfg = NetworkConfig::default();
        let s = generate_scenario(&cfg, 4).unwrap();
        let p = max_power(&s);
        assert_relative_eq!(p.watts[0], 19.952_623_149_688_8, epsilon = 1e-9);
        for j in 1..s.n_bs() {
            assert_relative_eq!(p.watts[j], 0.199_526_231_496_888, epsilon = 1e-12);
        }
        assert!(p.is_feasible(&s));
    }

    #[test]
    fn brute_force_association_trivial_cases() {
        let m = UtilityWeights::from_matrix(3, 1, vec![0.1, 0.2, 0.3]).unwrap();
        let assoc = brute_force_association(&m).unwrap();
        assert_eq!(assoc.loads(), &[3]);

        let m = UtilityWeights::from_matrix(2, 2, vec![5.0, 0.0, 0.0, 5.0]).unwrap();
        let assoc = brute_force_association(&m).unwrap();
        assert_eq!(assoc.serving_bs(0), 0);
        assert_eq!(assoc.serving_bs(1), 1);
    }

    #[test]
    fn brute_force_association_size_guard() {
        let n_users = 30;
        let m = UtilityWeights::from_matrix(n_users, 3, vec![0.0; n_users * 3]).unwrap();
        assert!(matches!(brute_force_association(&m), Err(Error::OracleTooLarge(_))));
    }

    #[test]
    fn brute_force_uee_matches_dense_1d_sweep() {
        let cfg = NetworkConfig { n_users: 1, n_small: 0, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 8).unwrap();
        let grid = PowerGrid::new(&s, 100).unwrap();
        let (_, p, eta) = brute_force_uee(&s, &grid).unwrap();
        // Same computation done directly over the same levels.
        let assoc = Association::from_serving(vec![0], 1).unwrap();
        let mut best = f64::NEG_INFINITY;
        let mut best_p = 0.0;
        for &level in grid.levels(0) {
            let v = uee(&s, &assoc, &PowerAllocation::new(vec![level])).unwrap();
            if v > best {
                best = v;
                best_p = level;
            }
        }
        assert_relative_eq!(eta, best, epsilon = 1e-12);
        assert_relative_eq!(p.watts[0], best_p, epsilon = 1e-15);
    }

    #[test]
    fn refining_the_grid_never_hurts() {
        let cfg = NetworkConfig { n_users: 3, n_small: 1, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 12).unwrap();
        // 10-level exponents are a superset of the 4-level ones (3 | 9).
        let coarse = PowerGrid::new(&s, 4).unwrap();
        let fine = PowerGrid::new(&s, 10).unwrap();
        for j in 0..s.n_bs() {
            for v in coarse.levels(j) {
                assert!(fine.levels(j).iter().any(|w| w == v), "coarse level {v} missing");
            }
        }
        let (_, _, eta_coarse) = brute_force_uee(&s, &coarse).unwrap();
        let (_, _, eta_fine) = brute_force_uee(&s, &fine).unwrap();
        assert!(eta_fine >= eta_coarse);
    }

    #[test]
    fn grid_levels_are_increasing_and_capped() {
        let cfg = NetworkConfig::default();
        let s = generate_scenario(&cfg, 3).unwrap();
        let grid = PowerGrid::new(&s, 12).unwrap();
        for j in 0..s.n_bs() {
            let levels = grid.levels(j);
            assert_eq!(levels.len(), 12);
            assert!(levels.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*levels.last().unwrap(), s.bss[j].max_power_w);
            assert!(levels[0] > 0.0);
        }
        assert!(PowerGrid::new(&s, 1).is_err());
    }

    #[test]
    fn max_sinr_is_invariant_to_monotone_transforms() {
        // Applying the same strictly increasing map to every SINR value
        // cannot move any per-user argmax.
        let cfg = NetworkConfig { n_users: 10, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 21).unwrap();
        let p = max_power(&s);
        let assoc = max_sinr_association(&s, &p);
        let transforms: [fn(f64) -> f64; 3] = [|x| x.ln(), |x| x / (1.0 + x), |x| 3.0 * x + 1.0];
        for g in transforms {
            for i in 0..s.n_users() {
                let mut best = 0;
                let mut best_v = g(s.sinr_largescale(i, 0, &p));
                for j in 1..s.n_bs() {
                    let v = g(s.sinr_largescale(i, j, &p));
                    if v > best_v {
                        best = j;
                        best_v = v;
                    }
                }
                assert_eq!(assoc.serving_bs(i), best);
            }
        }
    }

    #[test]
    fn oracle_uee_size_guard() {
        let cfg = NetworkConfig { n_users: 12, n_small: 3, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 2).unwrap();
        let grid = PowerGrid::new(&s, 12).unwrap();
        assert!(matches!(brute_force_uee(&s, &grid), Err(Error::OracleTooLarge(_))));
    }
}
