//! Frequency regulators for the isolated bus.
//!
//! Both regulators act on the same two error signals, produced by a
//! measurement front end standing in for a PLL: a first-order low-pass
//! frequency estimate `f_meas` and the wrapped phase error `theta_err`
//! between the accumulated bus phase and the reference ramp `2π·f_ref·t`.
//! (The simulator knows the bus phase exactly, so no three-phase waveform
//! synthesis is needed to emulate the PLL's outputs.)
//!
//! - The PD law commands dump power
//!   `u = k_p·theta_err + k_d·2π·(f_meas − f_ref)`: proportional on phase,
//!   derivative action through the frequency error (the derivative of the
//!   phase error).
//! - The adaptive neuro-fuzzy controller ([`anfis`]) starts from the same PD
//!   surface and refines its rule consequents online.

pub mod anfis;

pub use anfis::AnfisNet;

use crate::grid::BusState;
use crate::{Error, Result};
use core::f64::consts::PI;

/// Wraps an angle to `(−π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    theta - 2.0 * PI * libm::ceil((theta - PI) / (2.0 * PI))
}

/// State of the PLL-surrogate measurement front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementState {
    /// Low-pass-filtered frequency estimate (Hz).
    pub f_meas: f64,
    /// Phase error vs. the reference ramp, wrapped to `(−π, π]` (rad).
    pub theta_err: f64,
}

impl MeasurementState {
    /// Measurement state locked to the reference: `f_meas = f_ref`, zero
    /// phase error.
    pub fn locked(f_ref: f64) -> Self {
        MeasurementState {
            f_meas: f_ref,
            theta_err: 0.0,
        }
    }
}

/// PD regulator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdParams {
    /// Gain on phase error (W/rad).
    pub k_p: f64,
    /// Gain on frequency error expressed in rad/s (W/(rad/s)).
    pub k_d: f64,
    /// Measurement filter time constant (s).
    pub tau_meas: f64,
}

impl Default for PdParams {
    /// Gains tuned on the 3-second load-step study (grid search minimizing
    /// the maximum frequency excursion): closed-loop natural frequency
    /// ≈ 7 rad/s at damping ≈ 0.7 on the default grid inertia.
    fn default() -> Self {
        PdParams {
            k_p: 2e5,
            k_d: 4e4,
            tau_meas: 0.02,
        }
    }
}

impl PdParams {
    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.k_p >= 0.0) || !self.k_p.is_finite() {
            return Err(Error::InvalidParam {
                name: "k_p",
                constraint: ">= 0 and finite",
            });
        }
        if !(self.k_d >= 0.0) || !self.k_d.is_finite() {
            return Err(Error::InvalidParam {
                name: "k_d",
                constraint: ">= 0 and finite",
            });
        }
        if !(self.tau_meas > 0.0) || !self.tau_meas.is_finite() {
            return Err(Error::InvalidParam {
                name: "tau_meas",
                constraint: "> 0 and finite",
            });
        }
        Ok(())
    }
}

/// Advances the measurement front end by one control period `dt` at time `t`.
///
/// `f_meas ← f_meas + (dt/τ)·(ω_e/2π − f_meas)` (first-order lag) and
/// `theta_err ← wrap(theta_e − 2π·f_ref·t)` (exact wrapped phase error).
pub fn measure_frequency_phase(
    state: &MeasurementState,
    bus: &BusState,
    f_ref: f64,
    t: f64,
    dt: f64,
    tau_meas: f64,
) -> MeasurementState {
    let f_inst = bus.omega_e / (2.0 * PI);
    MeasurementState {
        f_meas: state.f_meas + (dt / tau_meas) * (f_inst - state.f_meas),
        theta_err: wrap_phase(bus.theta_e - 2.0 * PI * f_ref * t),
    }
}

/// PD control law: dump-power demand (W)
/// `u = k_p·theta_err + k_d·2π·(f_meas − f_ref)`.
///
/// Positive phase/frequency surplus commands more dump power. The output is
/// unclamped; quantization to the dump range happens downstream.
pub fn pd_control_step(meas: &MeasurementState, f_ref: f64, params: &PdParams) -> f64 {
    params.k_p * meas.theta_err + params.k_d * 2.0 * PI * (meas.f_meas - f_ref)
}
