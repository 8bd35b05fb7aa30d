//! Park (dq) model of a squirrel-cage induction machine in the synchronous
//! reference frame, plus an independent steady-state phasor oracle.
//!
//! State variables are the four winding currents `i_qs, i_ds, i_qr, i_dr`
//! together with the rotor mechanical speed `omega_m` and angle `theta_m`.
//! Flux linkages follow from the currents,
//!
//! ```text
//! lambda_qs = L_s*i_qs + L_m*i_qr      lambda_qr = L_r*i_qr + L_m*i_qs
//! lambda_ds = L_s*i_ds + L_m*i_dr      lambda_dr = L_r*i_dr + L_m*i_ds
//! ```
//!
//! with total inductances `L_s = L_ls + L_m` and `L_r = L_lr + L_m`. In a
//! reference frame rotating at the electrical speed `omega`, the winding
//! voltage equations read
//!
//! ```text
//! u_qs = R_s*i_qs + d(lambda_qs)/dt + omega*lambda_ds
//! u_ds = R_s*i_ds + d(lambda_ds)/dt - omega*lambda_qs
//! u_qr = R_r*i_qr + d(lambda_qr)/dt + (omega - omega_r)*lambda_dr
//! u_dr = R_r*i_dr + d(lambda_dr)/dt - (omega - omega_r)*lambda_qr
//! ```
//!
//! where `omega_r = p*omega_m` is the electrical rotor speed. Solving each
//! axis pair for the current derivatives amounts to inverting the constant
//! 2x2 inductance matrix `[[L_s, L_m], [L_m, L_r]]`.
//!
//! Electromagnetic torque is `T_e = (3/2)*p*(lambda_ds*i_qs - lambda_qs*i_ds)`
//! (motor convention: positive `T_e` accelerates the rotor). The mechanical
//! equation is implemented literally as `d(omega_m)/dt = (T_e - T_m)/(2*J)`;
//! the factor 2 suggests `J` may be read as an inertia *constant* rather than
//! a plain moment of inertia — halving `j_inertia` recovers the conventional
//! `1/J` form. A driving (turbine) torque is passed as negative `t_mech`, so
//! sustained negative `t_mech` pushes the rotor above synchronous speed.

use crate::{Error, Result};
use num_complex::Complex64;

/// Constant parameters of the induction machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineParams {
    /// Stator resistance (ohm).
    pub r_s: f64,
    /// Stator leakage inductance (H).
    pub l_ls: f64,
    /// Rotor resistance referred to the stator (ohm).
    pub r_r: f64,
    /// Rotor leakage inductance referred to the stator (H).
    pub l_lr: f64,
    /// Magnetizing inductance (H).
    pub l_m: f64,
    /// Combined rotor and load inertia constant (kg·m² interpretation; the
    /// mechanical equation divides by `2*j_inertia`, see module docs).
    pub j_inertia: f64,
    /// Number of pole pairs, `p >= 1`.
    pub pole_pairs: u32,
    /// Rated apparent power (VA).
    pub rated_power: f64,
    /// Rated line-to-line RMS voltage (V).
    pub rated_voltage: f64,
    /// Rated frequency (Hz).
    pub rated_frequency: f64,
}

impl Default for MachineParams {
    /// A 150 kVA, 400 V, 50 Hz, 4-pole (1500 rpm) squirrel-cage machine.
    fn default() -> Self {
        MachineParams {
            r_s: 0.016,
            l_ls: 0.12e-3,
            r_r: 0.014,
            l_lr: 0.12e-3,
            l_m: 4.5e-3,
            j_inertia: 5.0,
            pole_pairs: 2,
            rated_power: 150e3,
            rated_voltage: 400.0,
            rated_frequency: 50.0,
        }
    }
}

impl MachineParams {
    /// Checks all parameter invariants.
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
        pos(self.r_s, "r_s")?;
        pos(self.l_ls, "l_ls")?;
        pos(self.r_r, "r_r")?;
        pos(self.l_lr, "l_lr")?;
        pos(self.l_m, "l_m")?;
        pos(self.j_inertia, "j_inertia")?;
        pos(self.rated_power, "rated_power")?;
        pos(self.rated_voltage, "rated_voltage")?;
        pos(self.rated_frequency, "rated_frequency")?;
        if self.pole_pairs < 1 {
            return Err(Error::InvalidParam {
                name: "pole_pairs",
                constraint: ">= 1",
            });
        }
        if self.inductance_determinant() <= 0.0 {
            return Err(Error::SingularInductance);
        }
        Ok(())
    }

    /// Total stator and rotor inductances `(L_s, L_r) = (L_ls + L_m, L_lr + L_m)`.
    pub fn total_inductances(&self) -> (f64, f64) {
        (self.l_ls + self.l_m, self.l_lr + self.l_m)
    }

    /// Determinant of the per-axis inductance matrix, `L_s*L_r - L_m^2`.
    pub fn inductance_determinant(&self) -> f64 {
        let (l_s, l_r) = self.total_inductances();
        l_s * l_r - self.l_m * self.l_m
    }

    /// Synchronous mechanical speed (rad/s) at electrical frequency `f` (Hz).
    pub fn synchronous_speed_mech(&self, f: f64) -> f64 {
        2.0 * core::f64::consts::PI * f / self.pole_pairs as f64
    }
}

/// Total stator and rotor inductances `(L_s, L_r)`.
///
/// Free-function form of [`MachineParams::total_inductances`].
pub fn total_inductances(params: &MachineParams) -> (f64, f64) {
    params.total_inductances()
}

/// Dynamic state of the machine.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MachineState {
    /// q-axis stator current (A).
    pub i_qs: f64,
    /// d-axis stator current (A).
    pub i_ds: f64,
    /// q-axis rotor current referred to the stator (A).
    pub i_qr: f64,
    /// d-axis rotor current referred to the stator (A).
    pub i_dr: f64,
    /// Rotor mechanical angular velocity (rad/s).
    pub omega_m: f64,
    /// Rotor mechanical angle (rad), stored unwrapped.
    pub theta_m: f64,
}

impl MachineState {
    /// Electrical rotor angular velocity `omega_r = p*omega_m` (rad/s).
    pub fn omega_r(&self, params: &MachineParams) -> f64 {
        self.omega_m * params.pole_pairs as f64
    }

    /// Electrical rotor angle `theta_r = p*theta_m` (rad).
    pub fn theta_r(&self, params: &MachineParams) -> f64 {
        self.theta_m * params.pole_pairs as f64
    }

    /// True when every component is a finite real number.
    pub fn is_finite(&self) -> bool {
        self.i_qs.is_finite()
            && self.i_ds.is_finite()
            && self.i_qr.is_finite()
            && self.i_dr.is_finite()
            && self.omega_m.is_finite()
            && self.theta_m.is_finite()
    }
}

/// Winding voltages in the dq frame.
///
/// Rotor terms exist so the rotor equations stay testable with nonzero
/// excitation; squirrel-cage operation always uses `u_qr = u_dr = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DqVoltage {
    /// q-axis stator voltage (V).
    pub u_qs: f64,
    /// d-axis stator voltage (V).
    pub u_ds: f64,
    /// q-axis rotor voltage (V).
    pub u_qr: f64,
    /// d-axis rotor voltage (V).
    pub u_dr: f64,
}

impl DqVoltage {
    /// Stator-only excitation with a short-circuited (squirrel-cage) rotor.
    pub fn stator(u_qs: f64, u_ds: f64) -> Self {
        DqVoltage {
            u_qs,
            u_ds,
            u_qr: 0.0,
            u_dr: 0.0,
        }
    }
}

/// Time derivative of [`MachineState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MachineDerivatives {
    /// d(i_qs)/dt (A/s).
    pub di_qs: f64,
    /// d(i_ds)/dt (A/s).
    pub di_ds: f64,
    /// d(i_qr)/dt (A/s).
    pub di_qr: f64,
    /// d(i_dr)/dt (A/s).
    pub di_dr: f64,
    /// d(omega_m)/dt (rad/s²).
    pub domega_m: f64,
    /// d(theta_m)/dt (rad/s).
    pub dtheta_m: f64,
}

/// Electromagnetic torque `T_e = (3/2)*p*(lambda_ds*i_qs - lambda_qs*i_ds)`
/// in N·m (motor convention: positive accelerates the rotor).
pub fn electromagnetic_torque(state: &MachineState, params: &MachineParams) -> f64 {
    let (l_s, _) = params.total_inductances();
    let lambda_qs = l_s * state.i_qs + params.l_m * state.i_qr;
    let lambda_ds = l_s * state.i_ds + params.l_m * state.i_dr;
    1.5 * params.pole_pairs as f64 * (lambda_ds * state.i_qs - lambda_qs * state.i_ds)
}

/// Magnetic energy stored in the windings (J):
/// `(3/4)*(L_s*(i_qs²+i_ds²) + L_r*(i_qr²+i_dr²) + 2*L_m*(i_qs*i_qr + i_ds*i_dr))`.
///
/// Used by the frame-power audit: stator input power splits exactly into
/// copper losses, the rate of change of this energy, and `T_e*omega_m`.
pub fn magnetic_energy(state: &MachineState, params: &MachineParams) -> f64 {
    let (l_s, l_r) = params.total_inductances();
    0.75 * (l_s * (state.i_qs * state.i_qs + state.i_ds * state.i_ds)
        + l_r * (state.i_qr * state.i_qr + state.i_dr * state.i_dr)
        + 2.0 * params.l_m * (state.i_qs * state.i_qr + state.i_ds * state.i_dr))
}

/// State derivatives of the machine in a frame rotating at `omega_frame`
/// (electrical rad/s) under shaft torque `t_mech` (N·m, positive opposing
/// rotation; a turbine driving the shaft contributes negative `t_mech`).
///
/// Solves the per-axis 2x2 linear system for the current derivatives and
/// applies `d(omega_m)/dt = (T_e - T_m)/(2*J)`, `d(theta_m)/dt = omega_m`.
///
/// # Errors
///
/// [`Error::SingularInductance`] when `L_s*L_r - L_m² <= 0`; unreachable for
/// validated parameters.
pub fn machine_derivatives(
    state: &MachineState,
    voltage: &DqVoltage,
    omega_frame: f64,
    t_mech: f64,
    params: &MachineParams,
) -> Result<MachineDerivatives> {
    let (l_s, l_r) = params.total_inductances();
    let l_m = params.l_m;
    let det = l_s * l_r - l_m * l_m;
    if det <= 0.0 {
        return Err(Error::SingularInductance);
    }

    let lambda_qs = l_s * state.i_qs + l_m * state.i_qr;
    let lambda_ds = l_s * state.i_ds + l_m * state.i_dr;
    let lambda_qr = l_r * state.i_qr + l_m * state.i_qs;
    let lambda_dr = l_r * state.i_dr + l_m * state.i_ds;

    let omega_slip = omega_frame - state.omega_r(params);

    // Flux-linkage derivatives straight from the voltage equations.
    let dl_qs = voltage.u_qs - params.r_s * state.i_qs - omega_frame * lambda_ds;
    let dl_ds = voltage.u_ds - params.r_s * state.i_ds + omega_frame * lambda_qs;
    let dl_qr = voltage.u_qr - params.r_r * state.i_qr - omega_slip * lambda_dr;
    let dl_dr = voltage.u_dr - params.r_r * state.i_dr + omega_slip * lambda_qr;

    // Invert [[L_s, L_m], [L_m, L_r]] per axis.
    let di_qs = (l_r * dl_qs - l_m * dl_qr) / det;
    let di_qr = (l_s * dl_qr - l_m * dl_qs) / det;
    let di_ds = (l_r * dl_ds - l_m * dl_dr) / det;
    let di_dr = (l_s * dl_dr - l_m * dl_ds) / det;

    let t_e = electromagnetic_torque(state, params);
    let domega_m = (t_e - t_mech) / (2.0 * params.j_inertia);

    Ok(MachineDerivatives {
        di_qs,
        di_ds,
        di_qr,
        di_dr,
        domega_m,
        dtheta_m: state.omega_m,
    })
}

/// Instantaneous stator active and reactive power `(P, Q)`:
/// `P = (3/2)*(u_qs*i_qs + u_ds*i_ds)`, `Q = (3/2)*(u_qs*i_ds - u_ds*i_qs)`.
///
/// Positive `P` is power absorbed by the machine (motoring); the grid model
/// uses `p_gen = -P` as generated power.
pub fn stator_power(state: &MachineState, voltage: &DqVoltage) -> (f64, f64) {
    let p = 1.5 * (voltage.u_qs * state.i_qs + voltage.u_ds * state.i_ds);
    let q = 1.5 * (voltage.u_qs * state.i_ds - voltage.u_ds * state.i_qs);
    (p, q)
}

/// Solves the steady-state phasor equations at the given slip.
///
/// Input `v_amplitude` is the per-phase stator voltage amplitude in whatever
/// convention the caller uses (RMS or peak); the returned stator and rotor
/// current phasors share that convention. `omega_e` is the electrical supply
/// frequency (rad/s).
fn solve_phasor(
    params: &MachineParams,
    slip: f64,
    v_amplitude: f64,
    omega_e: f64,
) -> (Complex64, Complex64) {
    let (l_s, l_r) = params.total_inductances();
    let x_s = omega_e * l_s;
    let x_r = omega_e * l_r;
    let x_m = omega_e * params.l_m;
    let j = Complex64::new(0.0, 1.0);
    if slip == 0.0 {
        // Open rotor branch: magnetizing current only.
        let i_s = Complex64::new(v_amplitude, 0.0) / Complex64::new(params.r_s, x_s);
        return (i_s, Complex64::new(0.0, 0.0));
    }
    let z_r = Complex64::new(params.r_r / slip, x_r);
    let z_tot = Complex64::new(params.r_s, x_s) + Complex64::new(x_m * x_m, 0.0) / z_r;
    let i_s = Complex64::new(v_amplitude, 0.0) / z_tot;
    let i_r = -j * x_m * i_s / z_r;
    (i_s, i_r)
}

/// Independent steady-state oracle: classical per-phase T-equivalent circuit.
///
/// Feeds `v_phase_rms` volts per phase at `f` Hz into
/// `R_s + jX_s` in series with `jX_m ∥ (R_r/slip + jX_r)` and returns
/// `(air-gap torque N·m, stator current A RMS, stator active power W)`.
/// Torque follows the motor convention (negative when generating at negative
/// slip); active power is positive when absorbed by the machine.
///
/// At `slip = 0` the rotor branch is open: zero rotor current, zero torque.
pub fn steady_state_phasor_oracle(
    params: &MachineParams,
    slip: f64,
    v_phase_rms: f64,
    f: f64,
) -> (f64, f64, f64) {
    let omega_e = 2.0 * core::f64::consts::PI * f;
    let (i_s, i_r) = solve_phasor(params, slip, v_phase_rms, omega_e);
    let torque = if slip == 0.0 {
        0.0
    } else {
        let p_airgap = 3.0 * i_r.norm_sqr() * params.r_r / slip;
        p_airgap / (omega_e / params.pole_pairs as f64)
    };
    let p_active = 3.0 * (Complex64::new(v_phase_rms, 0.0) * i_s.conj()).re;
    (torque, i_s.norm(), p_active)
}

/// Steady-state dq currents `(i_qs, i_ds, i_qr, i_dr)` for the dynamic model
/// at the given slip, with stator excitation `u_qs = v_peak`, `u_ds = 0` at
/// electrical frequency `omega_e` (rad/s).
///
/// This is the phasor solution mapped into the voltage-aligned synchronous
/// frame (`i_qs = Re I_s`, `i_ds = -Im I_s` with peak-valued phasors); used
/// to initialize scenario runs near equilibrium and to cross-check the
/// dynamic model against [`steady_state_phasor_oracle`].
pub fn steady_state_dq_currents(
    params: &MachineParams,
    slip: f64,
    v_peak: f64,
    omega_e: f64,
) -> (f64, f64, f64, f64) {
    let (i_s, i_r) = solve_phasor(params, slip, v_peak, omega_e);
    (i_s.re, -i_s.im, i_r.re, -i_r.im)
}
