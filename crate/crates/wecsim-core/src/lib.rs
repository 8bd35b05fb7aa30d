//! Core models for an isolated wind-energy conversion system.
//!
//! The system under study is a small stand-alone grid fed by a wind turbine
//! driving a squirrel-cage induction generator, with a synchronous
//! compensator holding bus voltage and a controllable resistive dump load
//! absorbing surplus power to regulate frequency. This crate provides:
//!
//! - [`machine`] — Park (dq) induction machine dynamics plus a steady-state
//!   phasor oracle for validating settled operating points,
//! - [`turbine`] — rotor aerodynamics via a Cp(λ) power-coefficient curve and
//!   an Ornstein–Uhlenbeck stochastic wind synthesizer,
//! - [`grid`] — lumped-inertia bus frequency dynamics (swing equation),
//!   scheduled consumer loads, and the 8-bit binary dump load,
//! - [`control`] — the two frequency regulators: a filtered
//!   frequency/phase measurement plus PD law, and an adaptive first-order
//!   Sugeno neuro-fuzzy controller,
//! - [`sim`] — a fixed-step RK4 engine composing all of the above into
//!   reproducible scenario runs.
//!
//! The crate is `no_std`-compatible (requires `alloc`); all floating-point
//! transcendentals go through `libm`. File formats, configuration parsing,
//! and the command-line front end live in the companion `wecsim` crate.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
// Validation guards are written as `!(x > 0.0)` on purpose: unlike
// `x <= 0.0`, the negated form is also true for NaN, so a single comparison
// rejects both out-of-range and non-finite inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod control;
pub mod grid;
pub mod machine;
pub mod sim;
pub mod turbine;

use core::fmt;

/// Errors produced by model construction, validation, and integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// A parameter violated its documented range or invariant.
    InvalidParam {
        /// Name of the offending parameter.
        name: &'static str,
        /// The constraint that was violated.
        constraint: &'static str,
    },
    /// A state component became non-finite during integration.
    NonFinite {
        /// Name of the offending state component.
        component: &'static str,
        /// Simulation time (s) at the start of the failing step.
        t: f64,
    },
    /// The per-axis inductance matrix is not invertible
    /// (`L_s·L_r − L_m² ≤ 0`).
    SingularInductance,
    /// A function argument fell outside its mathematical domain.
    Domain {
        /// Description of the violated domain requirement.
        what: &'static str,
    },
    /// A summary window contained no samples.
    EmptyWindow,
    /// A serialized controller description failed to parse.
    Parse {
        /// 1-based line number of the offending line.
        line: usize,
        /// What was expected at that line.
        what: &'static str,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParam { name, constraint } => {
                write!(f, "invalid parameter `{name}`: must satisfy {constraint}")
            }
            Error::NonFinite { component, t } => {
                write!(f, "non-finite state component `{component}` at t = {t} s")
            }
            Error::SingularInductance => {
                write!(f, "inductance matrix is singular (L_s*L_r - L_m^2 <= 0)")
            }
            Error::Domain { what } => write!(f, "domain error: {what}"),
            Error::EmptyWindow => write!(f, "summary window contains no samples"),
            Error::Parse { line, what } => write!(f, "parse error at line {line}: expected {what}"),
        }
    }
}

/// Convenience alias for results carrying [`Error`].
pub type Result<T> = core::result::Result<T, Error>;
