//! Joint user association and downlink power control for utility-energy
//! efficiency (UEE) maximization in a two-tier cellular network.
//!
//! The network consists of one or more macro base stations and a set of
//! low-power small-cell base stations sharing the same spectrum. The library
//! jointly picks, for every user, a serving base station and, for every base
//! station, a transmit power, so that the sum of logarithmic user utilities
//! per Watt of consumed power is maximized.
//!
//! The solver stack, bottom to top:
//!
//! * [`netmodel`] — scenario generation (pathloss, log-normal shadowing),
//!   SINR and rate evaluation, unit conversions.
//! * [`association`] — the fixed-power user-association subproblem, solved to
//!   global optimality by Lagrangian dual decomposition with per-BS prices.
//! * [`powerctl`] — the fixed-association power-control subproblem in
//!   log-transformed variables, solved by a primal/dual iteration.
//! * [`iuapc`] — the outer Dinkelbach loop on the utility-per-Watt ratio,
//!   alternating the two subsolvers until the subtractive objective vanishes.
//! * [`baselines`] — max-SINR association, max-power allocation, and
//!   brute-force oracles used for verification.
//! * [`experiment`] — Monte-Carlo experiment harness with CSV outputs.

pub mod association;
pub mod baselines;
pub mod error;
pub mod experiment;
pub mod iuapc;
pub mod netmodel;
pub mod powerctl;

mod fmt;


pub use error::{Error, Result};


pub use netmodel::{BaseStation, BsKind, ChannelMatrix, NetworkConfig, PowerAllocation, Scenario, User};

