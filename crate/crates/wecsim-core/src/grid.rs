//! The isolated bus: lumped-inertia frequency dynamics, scheduled consumer
//! loads, and the 8-bit binary-weighted dump load.
//!
//! Bus voltage magnitude is held by an ideal synchronous compensator (AVR),
//! so `v_pu` stays at 1.0 in scenarios. Frequency obeys a per-unit swing
//! equation on the compensator's lumped inertia:
//!
//! ```text
//! d(ω_pu)/dt = (p_gen - p_load - p_dump) / (s_base * 2*h_sc * ω_pu)
//! ```
//!
//! The dump load is a ladder of eight binary-weighted resistive branches
//! switched by GTOs; switching is averaged into a 256-level power sink
//! `P = (n/255)·p_max·v_pu²` commanded by an 8-bit integer.

use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Electrical state of the isolated bus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusState {
    /// Voltage magnitude (per unit); 1.0 under the ideal compensator AVR.
    pub v_pu: f64,
    /// Electrical angular frequency (rad/s).
    pub omega_e: f64,
    /// Accumulated electrical phase (rad), stored unwrapped; wrapped only at
    /// measurement points.
    pub theta_e: f64,
}

impl BusState {
    /// Bus state at nominal voltage and the given reference frequency (Hz).
    pub fn nominal(f_ref: f64) -> Self {
        BusState {
            v_pu: 1.0,
            omega_e: 2.0 * PI * f_ref,
            theta_e: 0.0,
        }
    }

    /// Frequency in Hz, `omega_e / 2π`.
    pub fn frequency_hz(&self) -> f64 {
        self.omega_e / (2.0 * PI)
    }
}

/// Constant parameters of the lumped grid model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    /// Inertia constant of the synchronous compensator plus connected
    /// rotating mass (s, on `s_base`).
    pub h_sc: f64,
    /// Power base (VA).
    pub s_base: f64,
    /// Reference frequency (Hz).
    pub f_ref: f64,
    /// Nominal line-to-line RMS voltage (V).
    pub v_nominal: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            h_sc: 2.0,
            s_base: 300e3,
            f_ref: 50.0,
            v_nominal: 400.0,
        }
    }
}

impl GridParams {
    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        fn pos(v: f64, name: &'static str) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParam {
                    name,
                    constraint: "> 0 and finite",
                })
            }
        }
        pos(self.h_sc, "h_sc")?;
        pos(self.s_base, "s_base")?;
        pos(self.f_ref, "f_ref")?;
        pos(self.v_nominal, "v_nominal")
    }

    /// Kinetic energy (J) stored in the lumped inertia at `omega_pu`:
    /// `E = h_sc * s_base * ω_pu²` (so that `dE/dt` equals the net
    /// accelerating power exactly under the swing equation).
    pub fn kinetic_energy(&self, omega_pu: f64) -> f64 {
        self.h_sc * self.s_base * omega_pu * omega_pu
    }
}

/// Whether a load event adds or removes its power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadEventKind {
    /// The consumer connects at the event time.
    Connect,
    /// The consumer disconnects at the event time.
    Disconnect,
}

/// A timed connection or disconnection of a secondary consumer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadEvent {
    /// Event time (s).
    pub time: f64,
    /// Consumer power (W).
    pub power: f64,
    /// Connect or disconnect.
    pub kind: LoadEventKind,
}

/// The consumer load schedule: a constant main load plus timed secondary
/// events. A consumer contributes on `connect_time <= t < disconnect_time`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadSchedule {
    /// Always-connected main load (W).
    pub main_power: f64,
    /// Secondary events in strictly increasing time order.
    pub events: Vec<LoadEvent>,
}

impl LoadSchedule {
    /// Checks invariants: non-negative powers, strictly increasing event
    /// times, all events within `[0, duration]`.
    pub fn validate(&self, duration: f64) -> Result<()> {
        if !(self.main_power >= 0.0) || !self.main_power.is_finite() {
            return Err(Error::InvalidParam {
                name: "main_power",
                constraint: ">= 0 and finite",
            });
        }
        let mut prev = f64::NEG_INFINITY;
        for e in &self.events {
            if !(e.power >= 0.0) || !e.power.is_finite() {
                return Err(Error::InvalidParam {
                    name: "event power",
                    constraint: ">= 0 and finite",
                });
            }
            if !(e.time > prev) {
                return Err(Error::InvalidParam {
                    name: "event time",
                    constraint: "strictly increasing",
                });
            }
            if !(0.0..=duration).contains(&e.time) {
                return Err(Error::InvalidParam {
                    name: "event time",
                    constraint: "within [0, duration]",
                });
            }
            prev = e.time;
        }
        Ok(())
    }

    /// Snaps every event time onto the integration grid
    /// (`t -> round(t/dt)*dt`) so load steps land exactly on step
    /// boundaries.
    pub fn normalize_to_grid(&mut self, dt: f64) {
        for e in &mut self.events {
            e.time = libm::round(e.time / dt) * dt;
        }
    }
}

/// Total scheduled consumer power (W) at time `t`: the main load plus every
/// secondary consumer whose connect time `<= t` and disconnect time `> t`.
pub fn scheduled_load_power(t: f64, schedule: &LoadSchedule) -> f64 {
    let mut p = schedule.main_power;
    for e in &schedule.events {
        if e.time <= t {
            match e.kind {
                LoadEventKind::Connect => p += e.power,
                LoadEventKind::Disconnect => p -= e.power,
            }
        }
    }
    p
}

/// Parameters of the binary-weighted dump load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumpLoadParams {
    /// Total dump capacity at nominal voltage (W).
    pub p_max: f64,
    /// Command width in bits; fixed at 8 (256 levels).
    pub n_bits: u8,
}

impl Default for DumpLoadParams {
    fn default() -> Self {
        DumpLoadParams {
            p_max: 80e3,
            n_bits: 8,
        }
    }
}

impl DumpLoadParams {
    /// Checks the parameter invariants (`p_max > 0`, `n_bits == 8`).
    pub fn validate(&self) -> Result<()> {
        if !(self.p_max > 0.0) || !self.p_max.is_finite() {
            return Err(Error::InvalidParam {
                name: "p_max",
                constraint: "> 0 and finite",
            });
        }
        if self.n_bits != 8 {
            return Err(Error::InvalidParam {
                name: "n_bits",
                constraint: "= 8",
            });
        }
        Ok(())
    }
}

/// Quantizes a power demand (W) onto the 8-bit dump command:
/// `n = round(clamp(u, 0, p_max)/p_max * 255)`, rounding half away from
/// zero. Monotone non-decreasing in `u_demand`.
pub fn dump_quantize(u_demand: f64, params: &DumpLoadParams) -> u8 {
    let clamped = u_demand.clamp(0.0, params.p_max);
    libm::round(clamped / params.p_max * 255.0) as u8
}

/// Average power absorbed by the dump load (W) for a given 8-bit command at
/// bus voltage `v_pu`: `P = (command/255)·p_max·v_pu²` (resistive branches,
/// idealized switch conduction).
///
/// Taking the command as `u8` makes the 0..255 range invariant structural.
pub fn dump_power(command: u8, v_pu: f64, params: &DumpLoadParams) -> f64 {
    command as f64 / 255.0 * params.p_max * v_pu * v_pu
}

/// Swing-equation derivatives `(dω_e/dt in rad/s², dθ_e/dt in rad/s)` for
/// the given power balance:
///
/// `dω_pu/dt = (p_gen - p_load - p_dump)/(s_base · 2·h_sc · ω_pu)` with
/// `ω_pu = omega_e/(2π·f_ref)`, converted back to rad/s²; `dθ_e/dt = ω_e`.
pub fn grid_frequency_derivative(
    bus: &BusState,
    p_gen: f64,
    p_load: f64,
    p_dump: f64,
    params: &GridParams,
) -> (f64, f64) {
    let omega_nom = 2.0 * PI * params.f_ref;
    let omega_pu = bus.omega_e / omega_nom;
    let domega_pu = (p_gen - p_load - p_dump) / (params.s_base * 2.0 * params.h_sc * omega_pu);
    (domega_pu * omega_nom, bus.omega_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::BTreeSet;

    fn sc1_schedule() -> LoadSchedule {
        LoadSchedule {
            main_power: 50e3,
            events: alloc::vec![
                LoadEvent {
                    time: 1.0,
                    power: 40e3,
                    kind: LoadEventKind::Connect,
                },
                LoadEvent {
                    time: 2.0,
                    power: 40e3,
                    kind: LoadEventKind::Disconnect,
                },
            ],
        }
    }

    #[test]
    fn dump_quantize_clamps() {
        let d = DumpLoadParams::default();
        assert_eq!(dump_quantize(-10.0, &d), 0);
        assert_eq!(dump_quantize(0.0, &d), 0);
        assert_eq!(dump_quantize(d.p_max, &d), 255);
        assert_eq!(dump_quantize(1e9, &d), 255);
    }

    #[test]
    fn dump_quantize_rounds_half_away_from_zero() {
        // u = p_max/2 -> 127.5 exactly -> rounds to 128.
        let d = DumpLoadParams::default();
        assert_eq!(dump_quantize(d.p_max / 2.0, &d), 128);
    }

    #[test]
    fn dump_quantize_monotone_and_surjective() {
        let d = DumpLoadParams::default();
        let mut prev = 0u8;
        let mut seen = BTreeSet::new();
        for k in 0..=100_000 {
            let u = k as f64 / 100_000.0 * d.p_max;
            let n = dump_quantize(u, &d);
            assert!(n >= prev);
            prev = n;
            seen.insert(n);
        }
        assert_eq!(seen.len(), 256);
    }

    #[test]
    fn dump_round_trip_within_one_lsb() {
        let d = DumpLoadParams::default();
        let lsb = d.p_max / 255.0;
        for k in 0..=10_000 {
            let u = (k as f64 / 10_000.0) * 1.2 * d.p_max - 0.1 * d.p_max;
            let p = dump_power(dump_quantize(u, &d), 1.0, &d);
            assert!((p - u.clamp(0.0, d.p_max)).abs() <= lsb * 0.5 + 1e-9);
        }
    }

    #[test]
    fn dump_power_examples() {
        let d = DumpLoadParams::default();
        assert_eq!(dump_power(0, 1.0, &d), 0.0);
        assert_eq!(dump_power(255, 1.0, &d), d.p_max);
        // (64/255)·80 kW = 20.078 kW.
        assert_relative_eq!(
            dump_power(64, 1.0, &d),
            20078.431372549019,
            max_relative = 1e-12
        );
        // Resistive: scales with v².
        assert_relative_eq!(
            dump_power(128, 0.9, &d),
            dump_power(128, 1.0, &d) * 0.81,
            max_relative = 1e-12
        );
    }

    #[test]
    fn load_schedule_windows() {
        let s = sc1_schedule();
        assert_eq!(scheduled_load_power(0.5, &s), 50e3);
        assert_eq!(scheduled_load_power(1.0, &s), 90e3); // connect inclusive
        assert_eq!(scheduled_load_power(1.5, &s), 90e3);
        assert_eq!(scheduled_load_power(2.0, &s), 50e3); // disconnect exclusive
        assert_eq!(scheduled_load_power(2.5, &s), 50e3);
    }

    #[test]
    fn load_schedule_validation() {
        let s = sc1_schedule();
        assert!(s.validate(3.0).is_ok());
        assert!(s.validate(1.5).is_err()); // event beyond duration

        let mut bad = sc1_schedule();
        bad.events[1].time = 1.0; // not strictly increasing
        assert!(bad.validate(3.0).is_err());

        let mut neg = sc1_schedule();
        neg.main_power = -1.0;
        assert!(neg.validate(3.0).is_err());
    }

    #[test]
    fn load_schedule_grid_normalization() {
        let mut s = sc1_schedule();
        s.events[0].time = 0.9999999;
        s.normalize_to_grid(5e-5);
        assert_eq!(s.events[0].time, 20000.0 * 5e-5);
    }

    #[test]
    fn swing_equation_balance_and_sign() {
        let g = GridParams::default();
        let bus = BusState::nominal(g.f_ref);
        let (dw, dth) = grid_frequency_derivative(&bus, 70e3, 50e3, 20e3, &g);
        assert_eq!(dw, 0.0);
        assert_eq!(dth, bus.omega_e);

        // Deficit with the dump off decelerates the bus.
        let (dw, _) = grid_frequency_derivative(&bus, 40e3, 50e3, 0.0, &g);
        assert!(dw < 0.0);
    }

    #[test]
    fn swing_equation_hand_value() {
        // surplus = 0.1·s_base, h_sc = 1, ω_pu = 1 -> dω_pu/dt = 0.05 s⁻¹.
        let g = GridParams {
            h_sc: 1.0,
            ..GridParams::default()
        };
        let bus = BusState::nominal(g.f_ref);
        let (dw, _) = grid_frequency_derivative(&bus, 0.1 * g.s_base + 10e3, 10e3, 0.0, &g);
        let domega_pu = dw / (2.0 * PI * g.f_ref);
        assert_relative_eq!(domega_pu, 0.05, max_relative = 1e-12);
    }

    #[test]
    fn kinetic_energy_rate_matches_net_power() {
        // dE/dt = 2·h·S·ω_pu·dω_pu/dt = p_net exactly under the swing law.
        let g = GridParams::default();
        let bus = BusState {
            v_pu: 1.0,
            omega_e: 2.0 * PI * 50.4,
            theta_e: 3.0,
        };
        let p_net = 17.3e3;
        let (dw, _) = grid_frequency_derivative(&bus, p_net, 0.0, 0.0, &g);
        let omega_nom = 2.0 * PI * g.f_ref;
        let omega_pu = bus.omega_e / omega_nom;
        let de_dt = 2.0 * g.h_sc * g.s_base * omega_pu * (dw / omega_nom);
        assert_relative_eq!(de_dt, p_net, max_relative = 1e-12);
    }

    #[test]
    fn param_validation() {
        assert!(GridParams::default().validate().is_ok());
        assert!(GridParams {
            h_sc: 0.0,
            ..GridParams::default()
        }
        .validate()
        .is_err());
        assert!(DumpLoadParams::default().validate().is_ok());
        assert!(DumpLoadParams {
            p_max: -5.0,
            ..DumpLoadParams::default()
        }
        .validate()
        .is_err());
        assert!(DumpLoadParams {
            n_bits: 7,
            ..DumpLoadParams::default()
        }
        .validate()
        .is_err());
    }
}
