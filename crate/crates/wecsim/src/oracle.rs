//! Self-check oracle suites: independently derived references that the
//! dynamic models must reproduce.
//!
//! - `phasor-equivalence` — the settled dq model against the classical
//!   per-phase equivalent-circuit solution, across generating and motoring
//!   slips;
//! - `gradient-check` — analytic consequent sensitivities of the fuzzy
//!   controller against central finite differences;
//! - `energy-audit` — run-wide power-balance residual of the full scenario;
//! - `convergence` — Richardson order estimate of the integrator on a
//!   smooth run (ratio ≈ 2⁴ for a fourth-order method).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use wecsim_core::control::{AnfisNet, PdParams};
use wecsim_core::machine::{
    electromagnetic_torque, machine_derivatives, stator_power, steady_state_phasor_oracle,
    DqVoltage, MachineParams, MachineState,
};
use wecsim_core::sim::{init_state, rk4_step, run_scenario, Scenario, SystemState};

/// Outcome of one oracle suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    /// Suite name as printed by the CLI.
    pub name: &'static str,
    /// Whether the suite stayed within tolerance.
    pub passed: bool,
    /// Human-readable measurement vs. tolerance.
    pub detail: String,
}

/// Runs every suite in order.
pub fn run_all() -> Vec<SuiteReport> {
    vec![
        phasor_equivalence_suite(),
        gradient_suite(),
        energy_suite(),
        convergence_suite(),
    ]
}

/// Integrates the four machine currents at a clamped rotor speed until they
/// settle, from zero initial currents.
fn settle_currents_at_slip(params: &MachineParams, slip: f64, v_peak: f64) -> MachineState {
    let omega_e = 2.0 * PI * params.rated_frequency;
    let omega_m = omega_e * (1.0 - slip) / params.pole_pairs as f64;
    let voltage = DqVoltage::stator(v_peak, 0.0);
    let dt = 5e-5;
    let mut state = MachineState {
        i_qs: 0.0,
        i_ds: 0.0,
        i_qr: 0.0,
        i_dr: 0.0,
        omega_m,
        theta_m: 0.0,
    };
    // 1 s is hundreds of electrical time constants; the torque output is
    // checked for settledness by the caller via the oracle comparison.
    for _ in 0..20_000 {
        let f = |s: &MachineState| {
            let d = machine_derivatives(s, &voltage, omega_e, 0.0, params)
                .expect("validated parameters");
            [d.di_qs, d.di_ds, d.di_qr, d.di_dr]
        };
        let advance = |s: &MachineState, k: &[f64; 4], h: f64| MachineState {
            i_qs: s.i_qs + h * k[0],
            i_ds: s.i_ds + h * k[1],
            i_qr: s.i_qr + h * k[2],
            i_dr: s.i_dr + h * k[3],
            omega_m,
            theta_m: 0.0,
        };
        let k1 = f(&state);
        let k2 = f(&advance(&state, &k1, 0.5 * dt));
        let k3 = f(&advance(&state, &k2, 0.5 * dt));
        let k4 = f(&advance(&state, &k3, dt));
        state = MachineState {
            i_qs: state.i_qs + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            i_ds: state.i_ds + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            i_qr: state.i_qr + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
            i_dr: state.i_dr + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
            omega_m,
            theta_m: 0.0,
        };
    }
    state
}

/// Settled dq-model torque, stator current, and active power must match the
/// per-phase equivalent circuit within 1% at slips ±1%, ±2%, ±5%.
pub fn phasor_equivalence_suite() -> SuiteReport {
    let params = MachineParams::default();
    let v_phase_rms = params.rated_voltage / 3f64.sqrt();
    let v_peak = v_phase_rms * 2f64.sqrt();
    let voltage = DqVoltage::stator(v_peak, 0.0);
    let mut worst: f64 = 0.0;
    let mut detail_parts = Vec::new();
    for slip in [-0.05, -0.02, -0.01, 0.01, 0.02, 0.05] {
        let (t_ref, i_ref, p_ref) =
            steady_state_phasor_oracle(&params, slip, v_phase_rms, params.rated_frequency);
        let settled = settle_currents_at_slip(&params, slip, v_peak);
        let t_dq = electromagnetic_torque(&settled, &params);
        let i_dq = (settled.i_qs * settled.i_qs + settled.i_ds * settled.i_ds).sqrt() / 2f64.sqrt();
        let (p_dq, _) = stator_power(&settled, &voltage);
        let errs = [
            (t_dq - t_ref).abs() / t_ref.abs(),
            (i_dq - i_ref).abs() / i_ref.abs(),
            (p_dq - p_ref).abs() / p_ref.abs(),
        ];
        let e = errs.iter().cloned().fold(0.0, f64::max);
        worst = worst.max(e);
        detail_parts.push(format!("s={slip:+.2}: {:.2e}", e));
    }
    SuiteReport {
        name: "phasor-equivalence",
        passed: worst < 0.01,
        detail: format!(
            "max relative error {worst:.2e} (tolerance 1e-2) [{}]",
            detail_parts.join(", ")
        ),
    }
}

/// Analytic consequent-parameter sensitivities must match central finite
/// differences (step 1e-6 · parameter scale) to 1e-5 relative error in
/// vector norm, over 100 random nets and inputs.
pub fn gradient_suite() -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mfs = rng.gen_range(3..=5usize);
        let pd = PdParams {
            k_p: rng.gen_range(0.5..5.0),
            k_d: rng.gen_range(0.1..1.0),
            tau_meas: 0.02,
        };
        let mut net = AnfisNet::init_from_pd(&pd, mfs, (-1.0, 1.0), (-PI, PI), 0.0)
            .expect("valid construction");
        for r in net.rules_mut() {
            r.a_f = rng.gen_range(-50.0..50.0);
            r.a_theta = rng.gen_range(-50.0..50.0);
            r.b = rng.gen_range(-100.0..100.0);
        }
        let e_f: f64 = rng.gen_range(-1.0..1.0);
        let e_t: f64 = rng.gen_range(-PI..PI);

        let analytic = net.consequent_gradient(e_f, e_t);
        let mut diff_sq = 0.0;
        let mut norm_sq = 0.0;
        #[allow(clippy::needless_range_loop)] // indices address net internals, not just `analytic`
        for idx in 0..net.rule_count() {
            #[allow(clippy::needless_range_loop)]
            for comp in 0..3 {
                let read = |n: &AnfisNet| match comp {
                    0 => n.rules()[idx].a_f,
                    1 => n.rules()[idx].a_theta,
                    _ => n.rules()[idx].b,
                };
                let write = |n: &mut AnfisNet, v: f64| match comp {
                    0 => n.rules_mut()[idx].a_f = v,
                    1 => n.rules_mut()[idx].a_theta = v,
                    _ => n.rules_mut()[idx].b = v,
                };
                let p0 = read(&net);
                let h = 1e-6 * p0.abs().max(1.0);
                let mut plus = net.clone();
                write(&mut plus, p0 + h);
                let mut minus = net.clone();
                write(&mut minus, p0 - h);
                let fd = (plus.evaluate(e_f, e_t) - minus.evaluate(e_f, e_t)) / (2.0 * h);
                let a = analytic[idx][comp];
                diff_sq += (fd - a) * (fd - a);
                norm_sq += a * a;
            }
        }
        let rel = (diff_sq / norm_sq.max(1e-300)).sqrt();
        worst = worst.max(rel);
    }
    SuiteReport {
        name: "gradient-check",
        passed: worst < 1e-5,
        detail: format!("max vector-norm relative error {worst:.2e} (tolerance 1e-5)"),
    }
}

/// The SC1 run-wide power-balance residual must stay below 0.1% of
/// `s_base · duration` at the default 50 µs step.
pub fn energy_suite() -> SuiteReport {
    match run_scenario(&Scenario::sc1()) {
        Ok(rec) => {
            let pct = rec.summary.energy_residual_pct;
            SuiteReport {
                name: "energy-audit",
                passed: pct < 0.1,
                detail: format!("residual {pct:.2e}% of s_base·duration (tolerance 0.1%)"),
            }
        }
        Err(e) => SuiteReport {
            name: "energy-audit",
            passed: false,
            detail: format!("run failed: {e}"),
        },
    }
}

/// Integrates the plant with frozen controls (constant wind, fixed dump
/// command) at step `dt` up to `t_end`, returning the end state. Starting
/// from zero currents excites the fast electrical transient, keeping the
/// discretization error well above the floating-point noise floor.
fn integrate_frozen(base: &Scenario, dt: f64, t_end: f64) -> SystemState {
    let mut sc = base.clone();
    sc.dt = dt;
    let mut st = init_state(&sc).expect("valid scenario");
    st.machine.i_qs = 0.0;
    st.machine.i_ds = 0.0;
    st.machine.i_qr = 0.0;
    st.machine.i_dr = 0.0;
    st.dump_command = 100;
    let n = (t_end / dt).round() as usize;
    for k in 0..n {
        st.t = k as f64 * dt;
        st = rk4_step(&st, &sc, sc.wind.mean_speed).expect("finite states");
    }
    st
}

fn state_difference(a: &SystemState, r: &SystemState) -> f64 {
    let pairs = [
        (a.machine.i_qs, r.machine.i_qs),
        (a.machine.i_ds, r.machine.i_ds),
        (a.machine.i_qr, r.machine.i_qr),
        (a.machine.i_dr, r.machine.i_dr),
        (a.machine.omega_m, r.machine.omega_m),
        (a.machine.theta_m, r.machine.theta_m),
        (a.bus.omega_e, r.bus.omega_e),
        (a.bus.theta_e, r.bus.theta_e),
        (a.net_energy, r.net_energy),
    ];
    let mut sum = 0.0;
    for (x, xr) in pairs {
        let d = (x - xr) / xr.abs().max(1.0);
        sum += d * d;
    }
    (sum / pairs.len() as f64).sqrt()
}

/// Richardson order check on a smooth run (turbulence off, controls
/// frozen): halving the step from 200 µs to 100 µs must shrink the
/// end-state error by ≈2⁴, within [12, 20].
pub fn convergence_suite() -> SuiteReport {
    let mut base = Scenario::sc1();
    base.wind.turbulence_intensity = 0.0;
    base.loads.events.clear();
    base.duration = 0.5;
    let t_end = 0.1;
    let reference = integrate_frozen(&base, 2.5e-5, t_end);
    let coarse = integrate_frozen(&base, 2e-4, t_end);
    let fine = integrate_frozen(&base, 1e-4, t_end);
    let err_coarse = state_difference(&coarse, &reference);
    let err_fine = state_difference(&fine, &reference);
    let ratio = err_coarse / err_fine;
    SuiteReport {
        name: "convergence",
        passed: (12.0..=20.0).contains(&ratio),
        detail: format!(
            "Richardson ratio {ratio:.2} (expected within [12, 20]; errors {err_coarse:.3e} / {err_fine:.3e})"
        ),
    }
}
