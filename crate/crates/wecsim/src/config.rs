//! Plain-text `key = value` configuration: parsing, presets, and the
//! resolved-config echo used for sidecar files and `--print-preset`.
//!
//! The format is deliberately minimal: one `namespace.key = value` pair per
//! line, `#` starts a comment, blank lines are ignored. Unknown keys are
//! rejected, every value is range-checked as it is parsed, and error
//! messages carry the offending line number, key, and constraint.

use crate::CliError;
use wecsim_core::grid::{LoadEvent, LoadEventKind};
use wecsim_core::sim::{ControllerKind, Scenario};
use wecsim_core::turbine::TurbineParams;

/// Returns a compiled-in preset by name (`sc1` or `sc2`, case-insensitive).
pub fn preset(name: &str) -> Option<Scenario> {
    match name.to_ascii_lowercase().as_str() {
        "sc1" => Some(Scenario::sc1()),
        "sc2" => Some(Scenario::sc2()),
        _ => None,
    }
}

fn err(line: usize, message: String) -> CliError {
    CliError::Validation {
        line: Some(line),
        message,
    }
}

fn parse_f64(value: &str, key: &str, line: usize) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            err(
                line,
                format!("{key}: expected a finite number, got {value:?}"),
            )
        })
}

fn parse_int<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T, CliError> {
    value
        .parse::<T>()
        .map_err(|_| err(line, format!("{key}: expected an integer, got {value:?}")))
}

fn parse_range(value: &str, key: &str, line: usize) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(err(
            line,
            format!("{key}: expected \"lo,hi\", got {value:?}"),
        ));
    }
    let lo = parse_f64(parts[0], key, line)?;
    let hi = parse_f64(parts[1], key, line)?;
    if lo >= hi {
        return Err(err(
            line,
            format!("{key}: lower bound must be below upper, got {value:?}"),
        ));
    }
    Ok((lo, hi))
}

fn check(cond: bool, key: &str, line: usize, constraint: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(err(line, format!("{key}: must be {constraint}")))
    }
}

/// Secondary-consumer schedule in config terms: one connect/disconnect pair.
struct LoadRaw {
    main_kw: f64,
    secondary_kw: f64,
    t_connect: f64,
    t_disconnect: f64,
}

/// Applies a config document on top of `scenario`, mutating it in place.
/// Later lines override earlier ones; keys not mentioned keep the base
/// (preset) values.
///
/// # Errors
///
/// [`CliError::Validation`] with line number for syntax errors, unknown
/// keys, and range violations.
pub fn apply_config(scenario: &mut Scenario, text: &str) -> Result<(), CliError> {
    let mut sc = scenario.clone();

    // Turbine parameters are rebuilt through the validating constructor at
    // the end (the curve optimum cache depends on the coefficients).
    let mut tb = (
        sc.turbine.rated_power,
        sc.turbine.rated_wind,
        sc.turbine.rotor_radius,
        sc.turbine.air_density,
        sc.turbine.gear_ratio,
        sc.turbine.cp,
    );
    let mut tb_touched = false;

    let mut loads = LoadRaw {
        main_kw: sc.loads.main_power / 1e3,
        secondary_kw: sc.loads.events.first().map_or(40.0, |e| e.power / 1e3),
        t_connect: sc.loads.events.first().map_or(1.0, |e| e.time),
        t_disconnect: sc.loads.events.get(1).map_or(2.0, |e| e.time),
    };
    let mut loads_touched = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(err(
                line,
                format!("expected `key = value`, got {stripped:?}"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(line, format!("{key}: missing value")));
        }

        match key {
            "sim.name" => sc.name = value.to_string(),
            "sim.duration" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                sc.duration = v;
            }
            "sim.dt" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                sc.dt = v;
            }
            "sim.sample_every" => {
                let v: usize = parse_int(value, key, line)?;
                check(v >= 1, key, line, ">= 1")?;
                sc.sample_every = v;
            }
            "sim.settle_time" => {
                let v = parse_f64(value, key, line)?;
                check(v >= 0.0, key, line, ">= 0")?;
                sc.settle_time = v;
            }
            "sim.controller" => {
                sc.controller = match value.to_ascii_lowercase().as_str() {
                    "pd" => ControllerKind::Pd,
                    "anfis" => ControllerKind::Anfis,
                    _ => {
                        return Err(err(
                            line,
                            format!("{key}: expected `pd` or `anfis`, got {value:?}"),
                        ))
                    }
                };
            }

            "machine.r_s"
            | "machine.r_r"
            | "machine.l_m"
            | "machine.j_inertia"
            | "machine.rated_power"
            | "machine.rated_voltage"
            | "machine.rated_frequency" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                match key {
                    "machine.r_s" => sc.machine.r_s = v,
                    "machine.r_r" => sc.machine.r_r = v,
                    "machine.l_m" => sc.machine.l_m = v,
                    "machine.j_inertia" => sc.machine.j_inertia = v,
                    "machine.rated_power" => sc.machine.rated_power = v,
                    "machine.rated_voltage" => sc.machine.rated_voltage = v,
                    _ => sc.machine.rated_frequency = v,
                }
            }
            "machine.l_ls" | "machine.l_lr" => {
                let v = parse_f64(value, key, line)?;
                check(v >= 0.0, key, line, ">= 0")?;
                if key == "machine.l_ls" {
                    sc.machine.l_ls = v;
                } else {
                    sc.machine.l_lr = v;
                }
            }
            "machine.pole_pairs" => {
                let v: u32 = parse_int(value, key, line)?;
                check(v >= 1, key, line, ">= 1")?;
                sc.machine.pole_pairs = v;
            }

            "turbine.rated_power"
            | "turbine.rated_wind"
            | "turbine.rotor_radius"
            | "turbine.air_density"
            | "turbine.gear_ratio" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                tb_touched = true;
                match key {
                    "turbine.rated_power" => tb.0 = v,
                    "turbine.rated_wind" => tb.1 = v,
                    "turbine.rotor_radius" => tb.2 = v,
                    "turbine.air_density" => tb.3 = v,
                    _ => tb.4 = v,
                }
            }
            "turbine.c1" | "turbine.c2" | "turbine.c3" | "turbine.c4" | "turbine.c5"
            | "turbine.c6" => {
                let v = parse_f64(value, key, line)?;
                tb_touched = true;
                match key {
                    "turbine.c1" => tb.5.c1 = v,
                    "turbine.c2" => tb.5.c2 = v,
                    "turbine.c3" => tb.5.c3 = v,
                    "turbine.c4" => tb.5.c4 = v,
                    "turbine.c5" => tb.5.c5 = v,
                    _ => tb.5.c6 = v,
                }
            }

            "wind.mean_speed" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                sc.wind.mean_speed = v;
            }
            "wind.turbulence_intensity" => {
                let v = parse_f64(value, key, line)?;
                check((0.0..0.5).contains(&v), key, line, "in [0, 0.5)")?;
                sc.wind.turbulence_intensity = v;
            }
            "wind.correlation_time" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                sc.wind.correlation_time = v;
            }
            "wind.seed" => sc.wind.seed = parse_int(value, key, line)?,

            "grid.h_sc" | "grid.s_base" | "grid.f_ref" | "grid.v_nominal" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                match key {
                    "grid.h_sc" => sc.grid.h_sc = v,
                    "grid.s_base" => sc.grid.s_base = v,
                    "grid.f_ref" => sc.grid.f_ref = v,
                    _ => sc.grid.v_nominal = v,
                }
            }

            "dump.p_max" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                sc.dump.p_max = v;
            }

            "load.main_kw" => {
                let v = parse_f64(value, key, line)?;
                check(v >= 0.0, key, line, ">= 0")?;
                loads.main_kw = v;
                loads_touched = true;
            }
            "load.secondary_kw" => {
                let v = parse_f64(value, key, line)?;
                check(v >= 0.0, key, line, ">= 0")?;
                loads.secondary_kw = v;
                loads_touched = true;
            }
            "load.t_connect" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                loads.t_connect = v;
                loads_touched = true;
            }
            "load.t_disconnect" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                loads.t_disconnect = v;
                loads_touched = true;
            }

            "pd.kp" => {
                let v = parse_f64(value, key, line)?;
                check(v >= 0.0, key, line, ">= 0")?;
                sc.pd.k_p = v;
            }
            "pd.kd" => {
                let v = parse_f64(value, key, line)?;
                check(v >= 0.0, key, line, ">= 0")?;
                sc.pd.k_d = v;
            }
            "pll.tau" => {
                let v = parse_f64(value, key, line)?;
                check(v > 0.0, key, line, "> 0")?;
                sc.pd.tau_meas = v;
            }

            "anfis.mfs" => {
                let v: usize = parse_int(value, key, line)?;
                check(v >= 2, key, line, ">= 2")?;
                sc.anfis.mfs = v;
            }
            "anfis.learn_rate" => {
                let v = parse_f64(value, key, line)?;
                check(v >= 0.0, key, line, ">= 0")?;
                sc.anfis.learn_rate = v;
            }
            "anfis.ef_range" => sc.anfis.ef_range = parse_range(value, key, line)?,
            "anfis.etheta_range" => sc.anfis.etheta_range = parse_range(value, key, line)?,

            _ => return Err(err(line, format!("unknown key {key:?}"))),
        }
    }

    if tb_touched {
        sc.turbine = TurbineParams::new(tb.0, tb.1, tb.2, tb.3, tb.4, tb.5).map_err(|e| {
            CliError::Validation {
                line: None,
                message: format!("turbine.*: {e}"),
            }
        })?;
    }
    if loads_touched {
        if loads.secondary_kw > 0.0 && loads.t_disconnect <= loads.t_connect {
            return Err(CliError::Validation {
                line: None,
                message: "load.t_disconnect: must be greater than load.t_connect".to_string(),
            });
        }
        sc.loads.main_power = loads.main_kw * 1e3;
        sc.loads.events = if loads.secondary_kw > 0.0 {
            vec![
                LoadEvent {
                    time: loads.t_connect,
                    power: loads.secondary_kw * 1e3,
                    kind: LoadEventKind::Connect,
                },
                LoadEvent {
                    time: loads.t_disconnect,
                    power: loads.secondary_kw * 1e3,
                    kind: LoadEventKind::Disconnect,
                },
            ]
        } else {
            Vec::new()
        };
    }

    *scenario = sc;
    Ok(())
}

/// Parses a config document on top of the SC1 defaults and validates the
/// result. An empty document yields the full SC1 preset.
///
/// # Errors
///
/// [`CliError::Validation`] for syntax errors, unknown keys, range
/// violations, or cross-parameter invariant failures.
pub fn parse_config(text: &str) -> Result<Scenario, CliError> {
    let mut sc = Scenario::sc1();
    apply_config(&mut sc, text)?;
    sc.prepared().map_err(CliError::from_core)
}

/// Renders a scenario as a complete, re-parseable config document listing
/// every key with its effective value. Used for `--print-preset` and the
/// sidecar echo written next to CSV exports.
pub fn resolved_text(sc: &Scenario) -> String {
    let controller = match sc.controller {
        ControllerKind::Pd => "pd",
        ControllerKind::Anfis => "anfis",
    };
    let (sec_kw, t_con, t_dis) = match sc.loads.events.as_slice() {
        [con, dis, ..] => (con.power / 1e3, con.time, dis.time),
        _ => (0.0, 1.0, 2.0),
    };
    let mut s = String::new();
    s.push_str("# wecsim resolved configuration (re-parseable)\n");
    s.push_str(&format!("sim.name = {}\n", sc.name));
    s.push_str(&format!("sim.duration = {}\n", sc.duration));
    s.push_str(&format!("sim.dt = {}\n", sc.dt));
    s.push_str(&format!("sim.sample_every = {}\n", sc.sample_every));
    s.push_str(&format!("sim.settle_time = {}\n", sc.settle_time));
    s.push_str(&format!("sim.controller = {controller}\n"));
    s.push('\n');
    s.push_str("# induction machine (halve j_inertia for the conventional 1/J swing form)\n");
    s.push_str(&format!("machine.r_s = {}\n", sc.machine.r_s));
    s.push_str(&format!("machine.r_r = {}\n", sc.machine.r_r));
    s.push_str(&format!("machine.l_ls = {}\n", sc.machine.l_ls));
    s.push_str(&format!("machine.l_lr = {}\n", sc.machine.l_lr));
    s.push_str(&format!("machine.l_m = {}\n", sc.machine.l_m));
    s.push_str(&format!("machine.j_inertia = {}\n", sc.machine.j_inertia));
    s.push_str(&format!("machine.pole_pairs = {}\n", sc.machine.pole_pairs));
    s.push_str(&format!(
        "machine.rated_power = {}\n",
        sc.machine.rated_power
    ));
    s.push_str(&format!(
        "machine.rated_voltage = {}\n",
        sc.machine.rated_voltage
    ));
    s.push_str(&format!(
        "machine.rated_frequency = {}\n",
        sc.machine.rated_frequency
    ));
    s.push('\n');
    s.push_str("# turbine and drivetrain\n");
    s.push_str(&format!(
        "turbine.rated_power = {}\n",
        sc.turbine.rated_power
    ));
    s.push_str(&format!("turbine.rated_wind = {}\n", sc.turbine.rated_wind));
    s.push_str(&format!(
        "turbine.rotor_radius = {}\n",
        sc.turbine.rotor_radius
    ));
    s.push_str(&format!(
        "turbine.air_density = {}\n",
        sc.turbine.air_density
    ));
    s.push_str(&format!("turbine.gear_ratio = {}\n", sc.turbine.gear_ratio));
    s.push_str(&format!("turbine.c1 = {}\n", sc.turbine.cp.c1));
    s.push_str(&format!("turbine.c2 = {}\n", sc.turbine.cp.c2));
    s.push_str(&format!("turbine.c3 = {}\n", sc.turbine.cp.c3));
    s.push_str(&format!("turbine.c4 = {}\n", sc.turbine.cp.c4));
    s.push_str(&format!("turbine.c5 = {}\n", sc.turbine.cp.c5));
    s.push_str(&format!("turbine.c6 = {}\n", sc.turbine.cp.c6));
    s.push('\n');
    s.push_str("# stochastic wind\n");
    s.push_str(&format!("wind.mean_speed = {}\n", sc.wind.mean_speed));
    s.push_str(&format!(
        "wind.turbulence_intensity = {}\n",
        sc.wind.turbulence_intensity
    ));
    s.push_str(&format!(
        "wind.correlation_time = {}\n",
        sc.wind.correlation_time
    ));
    s.push_str(&format!("wind.seed = {}\n", sc.wind.seed));
    s.push('\n');
    s.push_str("# isolated grid (synchronous compensator inertia, assumed capacity)\n");
    s.push_str(&format!("grid.h_sc = {}\n", sc.grid.h_sc));
    s.push_str(&format!("grid.s_base = {}\n", sc.grid.s_base));
    s.push_str(&format!("grid.f_ref = {}\n", sc.grid.f_ref));
    s.push_str(&format!("grid.v_nominal = {}\n", sc.grid.v_nominal));
    s.push('\n');
    s.push_str("# dump load (8-bit ladder, capacity is an assumption; watts)\n");
    s.push_str(&format!("dump.p_max = {}\n", sc.dump.p_max));
    s.push('\n');
    s.push_str("# consumers (kilowatts)\n");
    s.push_str(&format!("load.main_kw = {}\n", sc.loads.main_power / 1e3));
    s.push_str(&format!("load.secondary_kw = {sec_kw}\n"));
    s.push_str(&format!("load.t_connect = {t_con}\n"));
    s.push_str(&format!("load.t_disconnect = {t_dis}\n"));
    s.push('\n');
    s.push_str("# PD regulator and measurement filter\n");
    s.push_str(&format!("pd.kp = {}\n", sc.pd.k_p));
    s.push_str(&format!("pd.kd = {}\n", sc.pd.k_d));
    s.push_str(&format!("pll.tau = {}\n", sc.pd.tau_meas));
    s.push('\n');
    s.push_str("# adaptive neuro-fuzzy regulator\n");
    s.push_str(&format!("anfis.mfs = {}\n", sc.anfis.mfs));
    s.push_str(&format!("anfis.learn_rate = {}\n", sc.anfis.learn_rate));
    s.push_str(&format!(
        "anfis.ef_range = {},{}\n",
        sc.anfis.ef_range.0, sc.anfis.ef_range.1
    ));
    s.push_str(&format!(
        "anfis.etheta_range = {},{}\n",
        sc.anfis.etheta_range.0, sc.anfis.etheta_range.1
    ));
    s
}
