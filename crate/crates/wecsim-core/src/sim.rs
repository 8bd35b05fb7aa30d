//! Fixed-step RK4 simulation engine: composes machine, turbine, grid, and
//! controller into one state vector and executes reproducible scenarios.
//!
//! Each control period `dt` proceeds as
//! measure → control (PD, or ANFIS evaluate + adapt) → quantize dump →
//! integrate. The controller output and dump command are held constant
//! across the RK4 substeps (zero-order hold), as are the wind sample and the
//! scheduled load; the continuous states (four machine currents, rotor
//! speed/angle, bus frequency/phase, and the net-energy integral used by the
//! power audit) advance together through one classical fourth-order
//! Runge–Kutta step.
//!
//! The synchronous reference frame is locked to the bus voltage phasor
//! (`u_qs = v_pu·V_peak`, `u_ds = 0`), which couples the machine equations
//! to the lumped grid without synthesizing three-phase waveforms.

use crate::control::{
    measure_frequency_phase, pd_control_step, AnfisNet, MeasurementState, PdParams,
};
use crate::grid::{
    dump_power, dump_quantize, grid_frequency_derivative, scheduled_load_power, BusState,
    DumpLoadParams, GridParams, LoadEvent, LoadEventKind, LoadSchedule,
};
use crate::machine::{
    machine_derivatives, stator_power, steady_state_dq_currents, DqVoltage, MachineParams,
    MachineState,
};
use crate::turbine::{generate_wind_series, turbine_torque, TurbineParams, WindModel};
use crate::{Error, Result};
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Initial rotor slip for scenario runs: slightly above synchronous speed,
/// so the machine starts in generating mode near its settled operating point.
pub const INIT_SLIP: f64 = -0.01;

/// Which frequency regulator a scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    /// Measurement filter + PD law.
    Pd,
    /// Adaptive first-order Sugeno neuro-fuzzy controller.
    Anfis,
}

/// Construction parameters for the scenario's ANFIS controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnfisConfig {
    /// Membership functions per input (rules = mfs²).
    pub mfs: usize,
    /// Online learning rate η (0 disables adaptation).
    pub learn_rate: f64,
    /// Covered frequency-error box (Hz).
    pub ef_range: (f64, f64),
    /// Covered phase-error box (rad).
    pub etheta_range: (f64, f64),
}

impl Default for AnfisConfig {
    fn default() -> Self {
        AnfisConfig {
            mfs: 5,
            learn_rate: 2e-4,
            ef_range: (-1.0, 1.0),
            etheta_range: (-PI, PI),
        }
    }
}

/// A declarative experiment: models, schedules, controller selection,
/// integration grid, and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Scenario name (used in reports and file naming).
    pub name: String,
    /// Run length (s).
    pub duration: f64,
    /// Integration and control step (s).
    pub dt: f64,
    /// Regulator selection.
    pub controller: ControllerKind,
    /// Induction machine parameters.
    pub machine: MachineParams,
    /// Turbine and drivetrain parameters.
    pub turbine: TurbineParams,
    /// Stochastic wind model (carries the scenario seed).
    pub wind: WindModel,
    /// Lumped grid parameters.
    pub grid: GridParams,
    /// Consumer load schedule.
    pub loads: LoadSchedule,
    /// Dump load parameters.
    pub dump: DumpLoadParams,
    /// PD gains and measurement filter time constant (the ANFIS controller
    /// uses these as its initialization and adaptation reference).
    pub pd: PdParams,
    /// ANFIS construction parameters.
    pub anfis: AnfisConfig,
    /// Record one sample every this many steps.
    pub sample_every: usize,
    /// Initial transient excluded from summary metrics (s).
    pub settle_time: f64,
}

impl Scenario {
    /// The first load-step study case: 50 kW main consumer, a 40 kW
    /// secondary consumer connected on [1 s, 2 s), 3-second run, 8 m/s mean
    /// wind with 10% turbulence, PD regulator.
    pub fn sc1() -> Self {
        Scenario {
            name: String::from("sc1"),
            duration: 3.0,
            dt: 5e-5,
            controller: ControllerKind::Pd,
            machine: MachineParams::default(),
            turbine: TurbineParams::default(),
            wind: WindModel::default(),
            grid: GridParams::default(),
            loads: LoadSchedule {
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
            },
            dump: DumpLoadParams::default(),
            pd: PdParams::default(),
            anfis: AnfisConfig::default(),
            sample_every: 200,
            settle_time: 0.3,
        }
    }

    /// The second study case: identical conditions, neuro-fuzzy regulator.
    pub fn sc2() -> Self {
        Scenario {
            name: String::from("sc2"),
            controller: ControllerKind::Anfis,
            ..Scenario::sc1()
        }
    }

    /// Number of integration steps, `round(duration/dt)`.
    pub fn n_steps(&self) -> usize {
        libm::round(self.duration / self.dt) as usize
    }

    /// Returns a validated copy with load-event times snapped onto the
    /// integration grid (so steps land exactly on step boundaries).
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParam`] naming the first violated invariant.
    pub fn prepared(&self) -> Result<Scenario> {
        let mut sc = self.clone();
        if !(sc.duration > 0.0) || !sc.duration.is_finite() {
            return Err(Error::InvalidParam {
                name: "duration",
                constraint: "> 0 and finite",
            });
        }
        if !(sc.dt > 0.0) || !sc.dt.is_finite() || sc.dt >= sc.duration {
            return Err(Error::InvalidParam {
                name: "dt",
                constraint: "> 0 and < duration",
            });
        }
        if sc.sample_every < 1 {
            return Err(Error::InvalidParam {
                name: "sample_every",
                constraint: ">= 1",
            });
        }
        if !(0.0..sc.duration).contains(&sc.settle_time) {
            return Err(Error::InvalidParam {
                name: "settle_time",
                constraint: "in [0, duration)",
            });
        }
        sc.machine.validate()?;
        sc.grid.validate()?;
        sc.dump.validate()?;
        sc.wind.validate()?;
        sc.pd.validate()?;
        sc.loads.normalize_to_grid(sc.dt);
        sc.loads.validate(sc.duration)?;
        // Surface controller construction errors before the run starts.
        if sc.controller == ControllerKind::Anfis {
            AnfisNet::init_from_pd(
                &sc.pd,
                sc.anfis.mfs,
                sc.anfis.ef_range,
                sc.anfis.etheta_range,
                sc.anfis.learn_rate,
            )?;
        }
        Ok(sc)
    }
}

/// Aggregate state advanced by the simulation loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    /// Machine currents, rotor speed and angle.
    pub machine: MachineState,
    /// Bus voltage/frequency/phase.
    pub bus: BusState,
    /// Measurement front-end state.
    pub meas: MeasurementState,
    /// Neuro-fuzzy controller state (present when selected).
    pub anfis: Option<AnfisNet>,
    /// Dump command currently applied (zero-order hold).
    pub dump_command: u8,
    /// Simulation time (s).
    pub t: f64,
    /// Running time-integral of `p_gen − p_load − p_dump` (J), integrated
    /// alongside the physical states for the run-wide energy audit.
    pub net_energy: f64,
}

/// Peak per-phase stator voltage (V) at the given bus voltage.
fn stator_voltage_peak(grid: &GridParams, v_pu: f64) -> f64 {
    v_pu * grid.v_nominal * libm::sqrt(2.0 / 3.0)
}

/// Builds the initial system state: machine at [`INIT_SLIP`], bus at the
/// reference frequency and nominal voltage, measurement locked, controllers
/// zeroed (ANFIS freshly initialized from the PD gains).
pub fn init_state(scenario: &Scenario) -> Result<SystemState> {
    let omega_e = 2.0 * PI * scenario.grid.f_ref;
    let v_peak = stator_voltage_peak(&scenario.grid, 1.0);
    let (i_qs, i_ds, i_qr, i_dr) =
        steady_state_dq_currents(&scenario.machine, INIT_SLIP, v_peak, omega_e);
    let anfis = match scenario.controller {
        ControllerKind::Pd => None,
        ControllerKind::Anfis => Some(AnfisNet::init_from_pd(
            &scenario.pd,
            scenario.anfis.mfs,
            scenario.anfis.ef_range,
            scenario.anfis.etheta_range,
            scenario.anfis.learn_rate,
        )?),
    };
    Ok(SystemState {
        machine: MachineState {
            i_qs,
            i_ds,
            i_qr,
            i_dr,
            omega_m: omega_e * (1.0 - INIT_SLIP) / scenario.machine.pole_pairs as f64,
            theta_m: 0.0,
        },
        bus: BusState::nominal(scenario.grid.f_ref),
        meas: MeasurementState::locked(scenario.grid.f_ref),
        anfis,
        dump_command: 0,
        t: 0.0,
        net_energy: 0.0,
    })
}

const N_STATES: usize = 9;
const STATE_NAMES: [&str; N_STATES] = [
    "i_qs",
    "i_ds",
    "i_qr",
    "i_dr",
    "omega_m",
    "theta_m",
    "omega_e",
    "theta_e",
    "net_energy",
];

struct Frozen<'a> {
    scenario: &'a Scenario,
    wind: f64,
    p_load: f64,
    p_dump: f64,
    u_qs: f64,
    v_pu: f64,
}

fn derivatives(y: &[f64; N_STATES], fz: &Frozen<'_>) -> Result<[f64; N_STATES]> {
    let machine = MachineState {
        i_qs: y[0],
        i_ds: y[1],
        i_qr: y[2],
        i_dr: y[3],
        omega_m: y[4],
        theta_m: y[5],
    };
    let bus = BusState {
        v_pu: fz.v_pu,
        omega_e: y[6],
        theta_e: y[7],
    };
    let voltage = DqVoltage::stator(fz.u_qs, 0.0);
    let t_mech = turbine_torque(fz.wind, machine.omega_m, &fz.scenario.turbine);
    let d = machine_derivatives(
        &machine,
        &voltage,
        bus.omega_e,
        t_mech,
        &fz.scenario.machine,
    )?;
    let (p_active, _) = stator_power(&machine, &voltage);
    let p_gen = -p_active;
    let (domega_e, dtheta_e) =
        grid_frequency_derivative(&bus, p_gen, fz.p_load, fz.p_dump, &fz.scenario.grid);
    Ok([
        d.di_qs,
        d.di_ds,
        d.di_qr,
        d.di_dr,
        d.domega_m,
        d.dtheta_m,
        domega_e,
        dtheta_e,
        p_gen - fz.p_load - fz.p_dump,
    ])
}

/// Advances the system by one RK4 step of length `scenario.dt`, holding the
/// dump command, scheduled load, wind sample, and bus voltage magnitude
/// constant across the substeps. The measurement filter and controllers are
/// *not* advanced here — the scenario loop updates them discretely once per
/// step before integrating.
///
/// # Errors
///
/// [`Error::NonFinite`] naming the first non-finite state component and the
/// step's start time; [`Error::SingularInductance`] for invalid machine
/// parameters.
pub fn rk4_step(state: &SystemState, scenario: &Scenario, wind_now: f64) -> Result<SystemState> {
    let dt = scenario.dt;
    let fz = Frozen {
        scenario,
        wind: wind_now,
        p_load: scheduled_load_power(state.t, &scenario.loads),
        p_dump: dump_power(state.dump_command, state.bus.v_pu, &scenario.dump),
        u_qs: stator_voltage_peak(&scenario.grid, state.bus.v_pu),
        v_pu: state.bus.v_pu,
    };

    let y0 = [
        state.machine.i_qs,
        state.machine.i_ds,
        state.machine.i_qr,
        state.machine.i_dr,
        state.machine.omega_m,
        state.machine.theta_m,
        state.bus.omega_e,
        state.bus.theta_e,
        state.net_energy,
    ];

    let k1 = derivatives(&y0, &fz)?;
    let mut y = y0;
    for i in 0..N_STATES {
        y[i] = y0[i] + 0.5 * dt * k1[i];
    }
    let k2 = derivatives(&y, &fz)?;
    for i in 0..N_STATES {
        y[i] = y0[i] + 0.5 * dt * k2[i];
    }
    let k3 = derivatives(&y, &fz)?;
    for i in 0..N_STATES {
        y[i] = y0[i] + dt * k3[i];
    }
    let k4 = derivatives(&y, &fz)?;
    let mut y1 = y0;
    for i in 0..N_STATES {
        y1[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if !y1[i].is_finite() {
            return Err(Error::NonFinite {
                component: STATE_NAMES[i],
                t: state.t,
            });
        }
    }

    Ok(SystemState {
        machine: MachineState {
            i_qs: y1[0],
            i_ds: y1[1],
            i_qr: y1[2],
            i_dr: y1[3],
            omega_m: y1[4],
            theta_m: y1[5],
        },
        bus: BusState {
            v_pu: state.bus.v_pu,
            omega_e: y1[6],
            theta_e: y1[7],
        },
        meas: state.meas,
        anfis: state.anfis.clone(),
        dump_command: state.dump_command,
        t: state.t + dt,
        net_energy: y1[8],
    })
}

/// Summary metrics of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunSummary {
    /// Maximum |f − f_ref| (Hz) over the post-settle window.
    pub f_max_dev_hz: f64,
    /// RMS of |f − f_ref| (Hz) over the post-settle window.
    pub f_rms_dev_hz: f64,
    /// Mean rotor speed (pu) over the post-settle window.
    pub speed_mean_pu: f64,
    /// Run-wide power-balance residual as a percentage of
    /// `s_base · duration`.
    pub energy_residual_pct: f64,
}

/// Sampled time series plus summary metrics for one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Sample times (s).
    pub t: Vec<f64>,
    /// Bus frequency (Hz).
    pub f_hz: Vec<f64>,
    /// Rotor speed (pu of synchronous speed at machine rated frequency).
    pub speed_pu: Vec<f64>,
    /// Aerodynamic turbine power (kW).
    pub p_turbine_kw: Vec<f64>,
    /// Generated electrical power delivered to the bus (kW).
    pub p_gen_kw: Vec<f64>,
    /// Scheduled consumer power (kW).
    pub p_load_kw: Vec<f64>,
    /// Dump load power (kW).
    pub p_dump_kw: Vec<f64>,
    /// Applied 8-bit dump command.
    pub dump_cmd: Vec<u8>,
    /// Wind speed (m/s).
    pub wind_mps: Vec<f64>,
    /// Integrator-accumulated ∫(p_gen − p_load − p_dump) dt over the run (J).
    pub net_energy_j: f64,
    /// Change in lumped kinetic energy over the run (J).
    pub kinetic_delta_j: f64,
    /// Power base the residual is normalized on (VA).
    pub s_base: f64,
    /// Run length (s).
    pub duration: f64,
    /// Post-settle summary metrics.
    pub summary: RunSummary,
}

impl RunRecord {
    /// Number of samples.
    pub fn len(&self) -> usize {
        self.t.len()
    }

    /// True when the record holds no samples.
    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Executes a scenario: validates and normalizes it, pre-generates the wind
/// series from the seed, then loops measure → control → quantize →
/// integrate, sampling every `sample_every` steps (plus the final state).
/// Identical scenarios and seeds produce identical records.
///
/// # Errors
///
/// Validation errors from [`Scenario::prepared`]; [`Error::NonFinite`] if
/// the state diverges.
pub fn run_scenario(scenario: &Scenario) -> Result<RunRecord> {
    let sc = scenario.prepared()?;
    let n = sc.n_steps();
    let f_ref = sc.grid.f_ref;
    let wind = generate_wind_series(&sc.wind, sc.dt, n + 1)?;
    let mut st = init_state(&sc)?;
    let omega_nom = 2.0 * PI * f_ref;
    let omega_pu_start = st.bus.omega_e / omega_nom;
    let sync_mech = sc
        .machine
        .synchronous_speed_mech(sc.machine.rated_frequency);

    let cap = n / sc.sample_every + 2;
    let mut rec = RunRecord {
        t: Vec::with_capacity(cap),
        f_hz: Vec::with_capacity(cap),
        speed_pu: Vec::with_capacity(cap),
        p_turbine_kw: Vec::with_capacity(cap),
        p_gen_kw: Vec::with_capacity(cap),
        p_load_kw: Vec::with_capacity(cap),
        p_dump_kw: Vec::with_capacity(cap),
        dump_cmd: Vec::with_capacity(cap),
        wind_mps: Vec::with_capacity(cap),
        net_energy_j: 0.0,
        kinetic_delta_j: 0.0,
        s_base: sc.grid.s_base,
        duration: sc.duration,
        summary: RunSummary::default(),
    };

    // The loop is organized around the step index: times, sampling, and the
    // wind lookup all derive from `k` so grid-aligned events stay exact.
    #[allow(clippy::needless_range_loop)]
    for k in 0..=n {
        let t = k as f64 * sc.dt;
        st.t = t;
        st.meas = measure_frequency_phase(&st.meas, &st.bus, f_ref, t, sc.dt, sc.pd.tau_meas);
        let u = match sc.controller {
            ControllerKind::Pd => pd_control_step(&st.meas, f_ref, &sc.pd),
            ControllerKind::Anfis => {
                let e_f = st.meas.f_meas - f_ref;
                let e_theta = st.meas.theta_err;
                let net = st.anfis.as_mut().expect("anfis state present");
                let u = net.evaluate(e_f, e_theta);
                net.adapt(e_f, e_theta, u, sc.dt);
                u
            }
        };
        st.dump_command = dump_quantize(u, &sc.dump);

        if k % sc.sample_every == 0 || k == n {
            let v_peak = stator_voltage_peak(&sc.grid, st.bus.v_pu);
            let voltage = DqVoltage::stator(v_peak, 0.0);
            let (p_active, _) = stator_power(&st.machine, &voltage);
            let t_turb = turbine_torque(wind[k], st.machine.omega_m, &sc.turbine);
            rec.t.push(t);
            rec.f_hz.push(st.bus.frequency_hz());
            rec.speed_pu.push(st.machine.omega_m / sync_mech);
            rec.p_turbine_kw.push(-t_turb * st.machine.omega_m / 1e3);
            rec.p_gen_kw.push(-p_active / 1e3);
            rec.p_load_kw.push(scheduled_load_power(t, &sc.loads) / 1e3);
            rec.p_dump_kw
                .push(dump_power(st.dump_command, st.bus.v_pu, &sc.dump) / 1e3);
            rec.dump_cmd.push(st.dump_command);
            rec.wind_mps.push(wind[k]);
        }

        if k == n {
            break;
        }
        st = rk4_step(&st, &sc, wind[k])?;
    }

    let omega_pu_end = st.bus.omega_e / omega_nom;
    rec.net_energy_j = st.net_energy;
    rec.kinetic_delta_j =
        sc.grid.kinetic_energy(omega_pu_end) - sc.grid.kinetic_energy(omega_pu_start);
    rec.summary = summarize_run(&rec, f_ref, sc.settle_time)?;
    Ok(rec)
}

/// Computes summary metrics over samples with `t >= settle_time`: max and
/// RMS of |f − f_ref|, mean rotor speed, and the run-wide energy residual
/// as a percentage of `s_base · duration`.
///
/// # Errors
///
/// [`Error::EmptyWindow`] when no sample lies in the window.
pub fn summarize_run(record: &RunRecord, f_ref: f64, settle_time: f64) -> Result<RunSummary> {
    let mut count = 0usize;
    let mut max_dev = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut speed_sum = 0.0f64;
    for i in 0..record.len() {
        if record.t[i] < settle_time {
            continue;
        }
        let dev = record.f_hz[i] - f_ref;
        let dev_abs = libm::fabs(dev);
        if dev_abs > max_dev {
            max_dev = dev_abs;
        }
        sum_sq += dev * dev;
        speed_sum += record.speed_pu[i];
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyWindow);
    }
    let energy_residual_pct = libm::fabs(record.net_energy_j - record.kinetic_delta_j)
        / (record.s_base * record.duration)
        * 100.0;
    Ok(RunSummary {
        f_max_dev_hz: max_dev,
        f_rms_dev_hz: libm::sqrt(sum_sq / count as f64),
        speed_mean_pu: speed_sum / count as f64,
        energy_residual_pct,
    })
}
