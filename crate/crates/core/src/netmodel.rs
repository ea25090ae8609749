//! Network scenarios: topology, channel gains, SINR, rates, unit conversions.
//!
//! A [`Scenario`] is one solvable problem instance: base stations, users, a
//! channel-gain matrix, bandwidth, noise power, and circuit power. Scenarios
//! are generated deterministically from a [`NetworkConfig`] and a seed, and
//! serialize to JSON with exact float round-trip so fixtures can be committed.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2-D position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Base-station tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsKind {
    Macro,
    Small,
}

/// A base station with its position and power budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    pub kind: BsKind,
    pub position: Point,
    /// Maximum transmit power in Watts.
    pub max_power_w: f64,
    /// The configured power spectral density this budget was derived from.
    pub power_density_dbm_per_hz: f64,
}

/// A user terminal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: usize,
    pub position: Point,
}

/// Linear power gains between every user and every base station.
///
/// `gains` is the full channel (pathloss + shadowing + optional fast fading);
/// `largescale` excludes fast fading. With fast fading disabled the two are
/// identical, but the split keeps max-SINR association well-defined either way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMatrix {
    n_users: usize,
    n_bs: usize,
    gains: Vec<f64>,
    largescale: Vec<f64>,
}

impl ChannelMatrix {
    pub fn new(n_users: usize, n_bs: usize, gains: Vec<f64>, largescale: Vec<f64>) -> Result<Self> {
        if gains.len() != n_users * n_bs || largescale.len() != n_users * n_bs {
            return Err(Error::InvalidConfig(format!(
                "channel matrix must hold {} entries, got {} / {}",
                n_users * n_bs,
                gains.len(),
                largescale.len()
            )));
        }
        if gains.iter().chain(largescale.iter()).any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidConfig(
                "channel gains must be strictly positive and finite".to_string(),
            ));
        }
        Ok(Self { n_users, n_bs, gains, largescale })
    }

    /// Full channel gain between user `i` and BS `j`.
    #[inline]
    pub fn gain(&self, i: usize, j: usize) -> f64 {
        self.gains[i * self.n_bs + j]
    }

    /// Pathloss + shadowing gain only.
    #[inline]
    pub fn largescale_gain(&self, i: usize, j: usize) -> f64 {
        self.largescale[i * self.n_bs + j]
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_bs(&self) -> usize {
        self.n_bs
    }
}

/// Per-BS transmit powers in Watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub watts: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(watts: Vec<f64>) -> Self {
        Self { watts }
    }

    pub fn total_watts(&self) -> f64 {
        self.watts.iter().sum()
    }

    /// Checks 0 < p_j <= P_j^max for every BS.
    pub fn is_feasible(&self, scenario: &Scenario) -> bool {
        self.watts.len() == scenario.n_bs()
            && self
                .watts
                .iter()
                .zip(&scenario.bss)
                .all(|(p, bs)| *p > 0.0 && *p <= bs.max_power_w)
    }
}

/// One solvable problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub bss: Vec<BaseStation>,
    pub users: Vec<User>,
    pub channel: ChannelMatrix,
    /// System bandwidth W in Hz, reused by every BS.
    pub bandwidth_hz: f64,
    /// Noise power sigma^2 in Watts over the full band.
    pub noise_power_w: f64,
    /// Constant circuit power P_c in Watts, added to the UEE denominator.
    pub circuit_power_w: f64,
    /// Seed this scenario was generated from (0 for hand-built instances).
    pub seed: u64,
}

impl Scenario {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_bs(&self) -> usize {
        self.bss.len()
    }

    /// Received SINR of user `i` towards BS `j` under powers `p` (Eq.-level
    /// definition: desired power over interference from all other BSs plus
    /// noise). Noise is strictly positive, so this never divides by zero.
    pub fn sinr(&self, i: usize, j: usize, p: &PowerAllocation) -> f64 {
        sinr_from_gains(|q| self.channel.gain(i, q), j, &p.watts, self.noise_power_w)
    }

    /// SINR computed from large-scale gains only (pathloss + shadowing).
    pub fn sinr_largescale(&self, i: usize, j: usize, p: &PowerAllocation) -> f64 {
        sinr_from_gains(|q| self.channel.largescale_gain(i, q), j, &p.watts, self.noise_power_w)
    }

    /// Stable fingerprint over every field that defines the instance.
    ///
    /// Used by the experiment harness to prove that all algorithms within one
    /// drop consumed the identical scenario.
    pub fn checksum(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.seed);
        h.write_u64(self.users.len() as u64);
        h.write_u64(self.bss.len() as u64);
        h.write_f64(self.bandwidth_hz);
        h.write_f64(self.noise_power_w);
        h.write_f64(self.circuit_power_w);
        for bs in &self.bss {
            h.write_u64(bs.id as u64);
            h.write_u64(matches!(bs.kind, BsKind::Macro) as u64);
            h.write_f64(bs.position.x);
            h.write_f64(bs.position.y);
            h.write_f64(bs.max_power_w);
        }
        for u in &self.users {
            h.write_f64(u.position.x);
            h.write_f64(u.position.y);
        }
        for i in 0..self.n_users() {
            for j in 0..self.n_bs() {
                h.write_f64(self.channel.gain(i, j));
                h.write_f64(self.channel.largescale_gain(i, j));
            }
        }
        h.finish()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[inline]
fn sinr_from_gains(gain: impl Fn(usize) -> f64, j: usize, p: &[f64], noise: f64) -> f64 {
    let mut interference = 0.0;
    for (q, pq) in p.iter().enumerate() {
        if q != j {
            interference += gain(q) * pq;
        }
    }
    gain(j) * p[j] / (interference + noise)
}

/// FNV-1a, 64-bit. Stable across platforms and builds.
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn write_f64(&mut self, v: f64) {
        self.write_u64(v.to_bits());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Pathloss in dB at distance `d_km` kilometers: `128.1 + 37.6 log10(d)`.
pub fn pathloss_db(d_km: f64) -> Result<f64> {
    if !(d_km > 0.0) {
        return Err(Error::NonPositiveDistance(d_km));
    }
    Ok(128.1 + 37.6 * d_km.log10())
}

/// Converts a power spectral density in dBm/Hz over `bandwidth_hz` to Watts.
pub fn power_from_density(dbm_per_hz: f64, bandwidth_hz: f64) -> f64 {
    debug_assert!(bandwidth_hz > 0.0);
    10f64.powf(dbm_per_hz / 10.0) / 1000.0 * bandwidth_hz
}

/// Per-user rate in nats/second: `(W / k_j) ln(1 + SINR)`.
///
/// `load` is the number of users sharing BS `j`'s bandwidth; the rate is
/// undefined for an unloaded BS.
pub fn rate(load: usize, sinr: f64, bandwidth_hz: f64) -> Result<f64> {
    if load == 0 {
        return Err(Error::ZeroLoad);
    }
    Ok(bandwidth_hz / load as f64 * sinr.ln_1p())
}

/// Parameters controlling scenario generation.
///
/// Defaults reproduce the standard two-tier setup: 10 MHz bandwidth, a 500 m
/// cell with 1 macro BS at the origin, 3 small BSs, 30 users, -27 / -47
/// dBm/Hz power densities, 1 W circuit power. Noise defaults to a -174
/// dBm/Hz density over the configured bandwidth; placement is uniform in the
/// cell disc with a 40 m guard around macro BSs for small-BS sites and a
/// 10 m minimum user-to-BS distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub bandwidth_hz: f64,
    pub cell_radius_m: f64,
    pub n_macro: usize,
    pub n_small: usize,
    pub n_users: usize,
    pub macro_power_dbm_per_hz: f64,
    pub small_power_dbm_per_hz: f64,
    pub circuit_power_w: f64,
    pub noise_density_dbm_per_hz: f64,
    pub shadowing_std_db: f64,
    /// Multiplies the full gains by unit-mean Rayleigh fading when set.
    pub fast_fading: bool,
    pub min_user_bs_distance_m: f64,
    pub sbs_guard_radius_m: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 1e7,
            cell_radius_m: 500.0,
            n_macro: 1,
            n_small: 3,
            n_users: 30,
            macro_power_dbm_per_hz: -27.0,
            small_power_dbm_per_hz: -47.0,
            circuit_power_w: 1.0,
            noise_density_dbm_per_hz: -174.0,
            shadowing_std_db: 8.0,
            fast_fading: false,
            min_user_bs_distance_m: 10.0,
            sbs_guard_radius_m: 40.0,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_macro + self.n_small == 0 {
            return Err(Error::InvalidConfig("need at least one base station".to_string()));
        }
        if self.n_users == 0 {
            return Err(Error::InvalidConfig("need at least one user".to_string()));
        }
        if !(self.cell_radius_m > 0.0) {
            return Err(Error::InvalidConfig("cell radius must be positive".to_string()));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::InvalidConfig("bandwidth must be positive".to_string()));
        }
        if !(self.shadowing_std_db >= 0.0) {
            return Err(Error::InvalidConfig("shadowing std must be nonnegative".to_string()));
        }
        if self.min_user_bs_distance_m >= self.cell_radius_m {
            return Err(Error::InvalidConfig(
                "minimum user-BS distance must be below the cell radius".to_string(),
            ));
        }
        Ok(())
    }

    /// Noise power in Watts over the configured bandwidth.
    pub fn noise_power_w(&self) -> f64 {
        power_from_density(self.noise_density_dbm_per_hz, self.bandwidth_hz)
    }
}

/// Generates a scenario deterministically from `(config, seed)`.
///
/// The first macro BS sits at the origin; further macro BSs drop uniformly in
/// the cell disc. Small BSs drop uniformly outside the guard radius around
/// every macro BS; users drop uniformly at least `min_user_bs_distance_m`
/// from every BS. Gains are pathloss times log-normal shadowing, with an
/// optional Rayleigh factor on the full matrix only.
pub fn generate_scenario(config: &NetworkConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n_bs = config.n_macro + config.n_small;
    let mut bss = Vec::with_capacity(n_bs);
    for m in 0..config.n_macro {
        let position = if m == 0 {
            Point { x: 0.0, y: 0.0 }
        } else {
            uniform_in_disc(&mut rng, config.cell_radius_m)
        };
        bss.push(BaseStation {
            id: m,
            kind: BsKind::Macro,
            position,
            max_power_w: power_from_density(config.macro_power_dbm_per_hz, config.bandwidth_hz),
            power_density_dbm_per_hz: config.macro_power_dbm_per_hz,
        });
    }
    for s in 0..config.n_small {
        let position = sample_position(&mut rng, config.cell_radius_m, |p| {
            bss.iter()
                .filter(|b| b.kind == BsKind::Macro)
                .all(|b| b.position.distance(p) >= config.sbs_guard_radius_m)
        });
        bss.push(BaseStation {
            id: config.n_macro + s,
            kind: BsKind::Small,
            position,
            max_power_w: power_from_density(config.small_power_dbm_per_hz, config.bandwidth_hz),
            power_density_dbm_per_hz: config.small_power_dbm_per_hz,
        });
    }

    let mut users = Vec::with_capacity(config.n_users);
    for id in 0..config.n_users {
        let position = sample_position(&mut rng, config.cell_radius_m, |p| {
            bss.iter().all(|b| b.position.distance(p) >= config.min_user_bs_distance_m)
        });
        users.push(User { id, position });
    }

    let shadow = Normal::new(0.0, config.shadowing_std_db)
        .map_err(|e| Error::InvalidConfig(format!("shadowing distribution: {e}")))?;
    let n = config.n_users * n_bs;
    let mut largescale = Vec::with_capacity(n);
    for user in &users {
        for bs in &bss {
            let d_km = user.position.distance(&bs.position) / 1000.0;
            let pl_db = pathloss_db(d_km)?;
            let gain_db = -pl_db + shadow.sample(&mut rng);
            largescale.push(10f64.powf(gain_db / 10.0));
        }
    }
    let gains = if config.fast_fading {
        // |CN(0,1)|^2 is Exp(1); unit mean keeps the large-scale level.
        largescale
            .iter()
            .map(|g| {
                let fade: f64 = Exp1.sample(&mut rng);
                g * fade.max(1e-12)
            })
            .collect()
    } else {
        largescale.clone()
    };

    Ok(Scenario {
        channel: ChannelMatrix::new(config.n_users, n_bs, gains, largescale)?,
        bss,
        users,
        bandwidth_hz: config.bandwidth_hz,
        noise_power_w: config.noise_power_w(),
        circuit_power_w: config.circuit_power_w,
        seed,
    })
}

fn uniform_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> Point {
    let r = radius * rng.gen::<f64>().sqrt();
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    Point { x: r * phi.cos(), y: r * phi.sin() }
}

fn sample_position(rng: &mut ChaCha8Rng, radius: f64, accept: impl Fn(&Point) -> bool) -> Point {
    loop {
        let p = uniform_in_disc(rng, radius);
        if accept(&p) {
            return p;
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn single_link_scenario(h: f64, noise: f64, pmax: f64) -> Scenario {
        Scenario {
            bss: vec![BaseStation {
                id: 0,
                kind: BsKind::Macro,
                position: Point { x: 0.0, y: 0.0 },
                max_power_w: pmax,
                power_density_dbm_per_hz: 0.0,
            }],
            users: vec![User { id: 0, position: Point { x: 100.0, y: 0.0 } }],
            channel: ChannelMatrix::new(1, 1, vec![h], vec![h]).unwrap(),
            bandwidth_hz: 1.0,
            noise_power_w: noise,
            circuit_power_w: 1.0,
            seed: 0,
        }
    }

    #[test]
    fn pathloss_reference_points() {
        assert_relative_eq!(pathloss_db(1.0).unwrap(), 128.1, epsilon = 1e-12);
        assert_relative_eq!(pathloss_db(0.1).unwrap(), 90.5, epsilon = 1e-12);
        // 128.1 + 37.6 log10(0.5), evaluated independently beforehand.
        assert_relative_eq!(pathloss_db(0.5).unwrap(), 116.781_272_163_034_31, epsilon = 1e-9);
    }

    #[test]
    fn pathloss_rejects_nonpositive_distance() {
        assert!(matches!(pathloss_db(0.0), Err(Error::NonPositiveDistance(_))));
        assert!(matches!(pathloss_db(-1.0), Err(Error::NonPositiveDistance(_))));
    }

    #[test]
    fn density_to_watts() {
        // -27 dBm/Hz over 10 MHz = 43 dBm, -47 dBm/Hz = 23 dBm.
        assert_relative_eq!(power_from_density(-27.0, 1e7), 19.952_623_149_688_8, epsilon = 1e-9);
        assert_relative_eq!(power_from_density(-47.0, 1e7), 0.199_526_231_496_888, epsilon = 1e-12);
        assert_relative_eq!(power_from_density(0.0, 1000.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sinr_without_interference() {
        let s = single_link_scenario(1.0, 1.0, 10.0);
        let p = PowerAllocation::new(vec![1.0]);
        assert_relative_eq!(s.sinr(0, 0, &p), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sinr_symmetric_two_bs() {
        let mut s = single_link_scenario(1.0, 1.0, 10.0);
        s.bss.push(BaseStation {
            id: 1,
            kind: BsKind::Small,
            position: Point { x: 50.0, y: 0.0 },
            max_power_w: 10.0,
            power_density_dbm_per_hz: 0.0,
        });
        s.channel = ChannelMatrix::new(1, 2, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let p = PowerAllocation::new(vec![1.0, 1.0]);
        assert_relative_eq!(s.sinr(0, 0, &p), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn sinr_matches_naive_summation() {
        // Independent re-evaluation of the SINR definition on a random 4-BS instance.
        let cfg = NetworkConfig { n_users: 5, n_small: 3, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 7).unwrap();
        let p = PowerAllocation::new(s.bss.iter().map(|b| 0.5 * b.max_power_w).collect());
        for i in 0..s.n_users() {
            for j in 0..s.n_bs() {
                let mut denom = s.noise_power_w;
                for q in 0..s.n_bs() {
                    if q != j {
                        denom += s.channel.gain(i, q) * p.watts[q];
                    }
                }
                let expect = s.channel.gain(i, j) * p.watts[j] / denom;
                assert_relative_eq!(s.sinr(i, j, &p), expect, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn rate_reference_points() {
        let e = std::f64::consts::E;
        assert_relative_eq!(rate(1, e - 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(rate(2, e - 1.0, 1.0).unwrap(), 0.5, epsilon = 1e-12);
        // (1e7 / 3) ln(8.389), evaluated independently beforehand.
        assert_relative_eq!(rate(3, 7.389, 1e7).unwrap(), 7_089_737.746_213_86, max_relative = 1e-12);
        assert!(matches!(rate(0, 1.0, 1.0), Err(Error::ZeroLoad)));
    }

    #[test]
    fn scenario_generation_is_deterministic() {
        let cfg = NetworkConfig::default();
        let a = generate_scenario(&cfg, 42).unwrap();
        let b = generate_scenario(&cfg, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.checksum(), b.checksum());
        let c = generate_scenario(&cfg, 43).unwrap();
        assert_ne!(a.checksum(), c.checksum());
    }

    #[test]
    fn scenario_dimensions_and_positivity() {
        let cfg = NetworkConfig { n_users: 30, n_small: 3, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 5).unwrap();
        assert_eq!(s.n_users(), 30);
        assert_eq!(s.n_bs(), 4);
        for i in 0..30 {
            for j in 0..4 {
                assert!(s.channel.gain(i, j) > 0.0 && s.channel.gain(i, j).is_finite());
            }
        }
        // Every user respects the minimum distance to every BS.
        for u in &s.users {
            for b in &s.bss {
                assert!(u.position.distance(&b.position) >= cfg.min_user_bs_distance_m);
            }
            assert!(u.position.distance(&s.bss[0].position) <= cfg.cell_radius_m);
        }
        // Small BSs respect the macro guard.
        for b in &s.bss[1..] {
            assert!(b.position.distance(&s.bss[0].position) >= cfg.sbs_guard_radius_m);
        }
        // Tier power ordering under the default densities.
        assert!(s.bss[0].max_power_w > s.bss[1].max_power_w);
    }

    #[test]
    fn shadowing_statistics_match_configuration() {
        // Recover the shadowing samples from gain and geometry, then check
        // their first two moments across 100 seeds.
        let cfg = NetworkConfig { n_users: 20, ..NetworkConfig::default() };
        let mut samples = Vec::new();
        for seed in 1..=100 {
            let s = generate_scenario(&cfg, seed).unwrap();
            for (i, u) in s.users.iter().enumerate() {
                for (j, b) in s.bss.iter().enumerate() {
                    let d_km = u.position.distance(&b.position) / 1000.0;
                    let pl = pathloss_db(d_km).unwrap();
                    let shadow_db = 10.0 * s.channel.gain(i, j).log10() + pl;
                    samples.push(shadow_db);
                }
            }
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 1.0, "shadowing mean {mean} dB drifted");
        assert!((var.sqrt() - 8.0).abs() < 1.0, "shadowing std {} dB drifted", var.sqrt());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let cfg = NetworkConfig { n_users: 4, n_small: 2, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 9).unwrap();
        let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
        for i in 0..s.n_users() {
            for j in 0..s.n_bs() {
                assert_eq!(s.channel.gain(i, j).to_bits(), back.channel.gain(i, j).to_bits());
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = NetworkConfig { n_users: 0, ..NetworkConfig::default() };
        assert!(matches!(generate_scenario(&cfg, 1), Err(Error::InvalidConfig(_))));
        let cfg = NetworkConfig { n_macro: 0, n_small: 0, ..NetworkConfig::default() };
        assert!(matches!(generate_scenario(&cfg, 1), Err(Error::InvalidConfig(_))));
        let cfg = NetworkConfig { cell_radius_m: -5.0, ..NetworkConfig::default() };
        assert!(matches!(generate_scenario(&cfg, 1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn fast_fading_only_touches_full_gains() {
        let cfg = NetworkConfig { n_users: 6, fast_fading: true, ..NetworkConfig::default() };
        let s = generate_scenario(&cfg, 3).unwrap();
        let base = generate_scenario(&NetworkConfig { fast_fading: false, ..cfg.clone() }, 3).unwrap();
        for i in 0..s.n_users() {
            for j in 0..s.n_bs() {
                assert_eq!(
                    s.channel.largescale_gain(i, j).to_bits(),
                    base.channel.largescale_gain(i, j).to_bits()
                );
                assert!(s.channel.gain(i, j) > 0.0);
            }
        }
    }
}
