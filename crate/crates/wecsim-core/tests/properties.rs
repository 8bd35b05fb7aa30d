//! Property-based invariants across random parameter and state space.
//!
//! Each property states a structural fact of the models — linearity,
//! convexity, conservation, clamping — that must hold everywhere, not just
//! at hand-picked operating points.

use proptest::prelude::*;
use std::f64::consts::PI;

use wecsim_core::control::{pd_control_step, wrap_phase, AnfisNet, MeasurementState, PdParams};
use wecsim_core::grid::{
    dump_power, dump_quantize, grid_frequency_derivative, BusState, DumpLoadParams, GridParams,
};
use wecsim_core::machine::{
    electromagnetic_torque, machine_derivatives, stator_power, DqVoltage, MachineParams,
    MachineState,
};
use wecsim_core::turbine::{
    generate_wind_series, power_coefficient, turbine_torque, CpCoefficients, TurbineParams,
    WindModel, BETZ_LIMIT,
};

fn state(i_qs: f64, i_ds: f64, i_qr: f64, i_dr: f64, omega_m: f64) -> MachineState {
    MachineState {
        i_qs,
        i_ds,
        i_qr,
        i_dr,
        omega_m,
        theta_m: 0.0,
    }
}

proptest! {
    /// The PD law is linear in the measurement errors.
    #[test]
    fn pd_law_is_linear(
        e_f in -2.0..2.0f64,
        e_th in -3.0..3.0f64,
        a in -5.0..5.0f64,
    ) {
        let pd = PdParams::default();
        let f_ref = 50.0;
        let m = |ef: f64, et: f64| MeasurementState { f_meas: f_ref + ef, theta_err: et };
        let u1 = pd_control_step(&m(e_f, e_th), f_ref, &pd);
        let u2 = pd_control_step(&m(a * e_f, a * e_th), f_ref, &pd);
        prop_assert!((u2 - a * u1).abs() <= 1e-9 * u1.abs().max(1.0));
        // Superposition across the two inputs.
        let uf = pd_control_step(&m(e_f, 0.0), f_ref, &pd);
        let ut = pd_control_step(&m(0.0, e_th), f_ref, &pd);
        prop_assert!((u1 - (uf + ut)).abs() <= 1e-9 * u1.abs().max(1.0));
    }

    /// Quantization is monotone and its reconstruction stays within half an
    /// LSB of the clamped request (at nominal voltage).
    #[test]
    fn dump_quantization_monotone_and_tight(
        u1 in -40e3..120e3f64,
        u2 in -40e3..120e3f64,
    ) {
        let d = DumpLoadParams::default();
        let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
        prop_assert!(dump_quantize(lo, &d) <= dump_quantize(hi, &d));

        let lsb = d.p_max / 255.0;
        let requested = u1.clamp(0.0, d.p_max);
        let realized = dump_power(dump_quantize(u1, &d), 1.0, &d);
        prop_assert!((realized - requested).abs() <= 0.5 * lsb + 1e-9);
    }

    /// Dump power scales with the square of bus voltage (resistive bank).
    #[test]
    fn dump_power_scales_with_voltage_squared(
        cmd in 0u8..=255u8,
        v_pu in 0.2..1.5f64,
    ) {
        let d = DumpLoadParams::default();
        let p_nom = dump_power(cmd, 1.0, &d);
        let p = dump_power(cmd, v_pu, &d);
        prop_assert!((p - p_nom * v_pu * v_pu).abs() <= 1e-9 * p_nom.max(1.0));
    }

    /// No tip-speed ratio extracts more than the Betz limit.
    #[test]
    fn cp_below_betz_limit(lambda in 0.05..40.0f64) {
        let c = CpCoefficients::default();
        let cp = power_coefficient(&c, lambda).unwrap();
        prop_assert!((0.0..BETZ_LIMIT).contains(&cp), "cp({lambda}) = {cp}");
    }

    /// At a fixed tip-speed ratio, aerodynamic torque scales as wind³/ω:
    /// doubling wind and shaft speed together quadruples torque.
    #[test]
    fn turbine_torque_cubic_wind_scaling(
        wind in 3.0..12.0f64,
        omega in 100.0..250.0f64,
        scale in 1.2..2.5f64,
    ) {
        let t = TurbineParams::default();
        let t1 = turbine_torque(wind, omega, &t);
        let t2 = turbine_torque(scale * wind, scale * omega, &t);
        prop_assert!(
            (t2 - scale * scale * t1).abs() <= 1e-9 * t1.abs().max(1.0),
            "t1 = {t1}, t2 = {t2}"
        );
    }

    /// Synthesized wind stays inside the hard clamp band.
    #[test]
    fn wind_series_respects_clamp(
        seed in any::<u64>(),
        ti in 0.0..0.45f64,
        mean in 2.0..18.0f64,
    ) {
        let model = WindModel {
            mean_speed: mean,
            turbulence_intensity: ti,
            correlation_time: 2.0,
            seed,
        };
        let series = generate_wind_series(&model, 5e-3, 500).unwrap();
        for v in series {
            prop_assert!(v >= 0.5 * mean - 1e-12 && v <= 1.5 * mean + 1e-12);
        }
    }

    /// The electrical equations are affine in the applied voltage: the
    /// current derivatives obey superposition around the zero-voltage
    /// response.
    #[test]
    fn machine_derivatives_affine_in_voltage(
        i_qs in -400.0..400.0f64,
        i_ds in -400.0..400.0f64,
        i_qr in -400.0..400.0f64,
        i_dr in -400.0..400.0f64,
        omega_m in 0.0..400.0f64,
        u_q1 in -500.0..500.0f64,
        u_d1 in -500.0..500.0f64,
        u_q2 in -500.0..500.0f64,
        u_d2 in -500.0..500.0f64,
    ) {
        let p = MachineParams::default();
        let s = state(i_qs, i_ds, i_qr, i_dr, omega_m);
        let omega_e = 2.0 * PI * 50.0;
        let d = |uq: f64, ud: f64| {
            machine_derivatives(&s, &DqVoltage::stator(uq, ud), omega_e, 0.0, &p).unwrap()
        };
        let d0 = d(0.0, 0.0);
        let d1 = d(u_q1, u_d1);
        let d2 = d(u_q2, u_d2);
        let d12 = d(u_q1 + u_q2, u_d1 + u_d2);
        for (got, want) in [
            (d12.di_qs, d1.di_qs + d2.di_qs - d0.di_qs),
            (d12.di_ds, d1.di_ds + d2.di_ds - d0.di_ds),
            (d12.di_qr, d1.di_qr + d2.di_qr - d0.di_qr),
            (d12.di_dr, d1.di_dr + d2.di_dr - d0.di_dr),
        ] {
            prop_assert!((got - want).abs() <= 1e-6 * want.abs().max(1.0));
        }
        // Mechanical acceleration is voltage-independent.
        prop_assert!((d12.domega_m - d1.domega_m).abs() <= 1e-12 * d1.domega_m.abs().max(1.0));
    }

    /// Pointwise power audit: stator input = resistive losses + magnetic
    /// energy rate + electromechanical conversion, at every state.
    #[test]
    fn machine_power_audit_pointwise(
        i_qs in -400.0..400.0f64,
        i_ds in -400.0..400.0f64,
        i_qr in -400.0..400.0f64,
        i_dr in -400.0..400.0f64,
        omega_m in 50.0..400.0f64,
        u_qs in -500.0..500.0f64,
        u_ds in -500.0..500.0f64,
        t_mech in -2000.0..2000.0f64,
    ) {
        let p = MachineParams::default();
        let s = state(i_qs, i_ds, i_qr, i_dr, omega_m);
        let v = DqVoltage::stator(u_qs, u_ds);
        let omega_e = 2.0 * PI * 50.0;
        let d = machine_derivatives(&s, &v, omega_e, t_mech, &p).unwrap();
        let (p_active, _) = stator_power(&s, &v);
        let (l_s, l_r) = p.total_inductances();
        let losses = 1.5 * (p.r_s * (i_qs * i_qs + i_ds * i_ds) + p.r_r * (i_qr * i_qr + i_dr * i_dr));
        let dw_mag = 1.5
            * (l_s * (i_qs * d.di_qs + i_ds * d.di_ds)
                + l_r * (i_qr * d.di_qr + i_dr * d.di_dr)
                + p.l_m
                    * (d.di_qs * i_qr + i_qs * d.di_qr + d.di_ds * i_dr + i_ds * d.di_dr));
        let p_mech = electromagnetic_torque(&s, &p) * omega_m;
        let residual = p_active - losses - dw_mag - p_mech;
        let scale = p_active.abs() + losses + dw_mag.abs() + p_mech.abs() + 1.0;
        prop_assert!(residual.abs() <= 1e-9 * scale, "residual = {residual}, scale = {scale}");
    }

    /// The swing equation conserves the kinetic-energy bookkeeping exactly:
    /// d(E_kin)/dt equals net accelerating power.
    #[test]
    fn swing_energy_rate_is_net_power(
        omega_pu in 0.9..1.1f64,
        p_gen in 0.0..150e3f64,
        p_load in 0.0..120e3f64,
        p_dump in 0.0..80e3f64,
    ) {
        let g = GridParams::default();
        let omega_nom = 2.0 * PI * g.f_ref;
        let bus = BusState { v_pu: 1.0, omega_e: omega_pu * omega_nom, theta_e: 0.0 };
        let (domega_e, _) = grid_frequency_derivative(&bus, p_gen, p_load, p_dump, &g);
        // dE/dt = d(h·S·ω_pu²)/dt = 2·h·S·ω_pu·(dω_e/ω_nom)
        let de_dt = 2.0 * g.h_sc * g.s_base * omega_pu * domega_e / omega_nom;
        let p_net = p_gen - p_load - p_dump;
        prop_assert!((de_dt - p_net).abs() <= 1e-9 * p_net.abs().max(1.0));
    }

    /// Phase wrapping lands in (−π, π] and only removes whole turns.
    #[test]
    fn wrap_phase_range_and_turns(theta in -1e6..1e6f64) {
        let w = wrap_phase(theta);
        prop_assert!(w > -PI && w <= PI, "wrap({theta}) = {w}");
        let turns = (theta - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() <= 1e-6, "turns = {turns}");
    }

    /// The fuzzy output is a convex combination of its rule outputs
    /// whenever at least one rule fires.
    #[test]
    fn anfis_output_is_convex_combination(
        e_f in -1.0..1.0f64,
        e_th in -3.1..3.1f64,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut net = AnfisNet::init_from_pd(
            &PdParams::default(), 5, (-1.0, 1.0), (-PI, PI), 0.0,
        ).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for r in net.rules_mut() {
            r.a_f = rng.gen_range(-1e3..1e3);
            r.a_theta = rng.gen_range(-1e3..1e3);
            r.b = rng.gen_range(-1e4..1e4);
        }
        let u = net.evaluate(e_f, e_th);
        let outputs: Vec<f64> = net.rules().iter().map(|r| r.output(e_f, e_th)).collect();
        let lo = outputs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = outputs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pad = 1e-9 * (hi - lo).abs().max(1.0);
        prop_assert!(u >= lo - pad && u <= hi + pad, "u = {u} not in [{lo}, {hi}]");
    }

    /// One adaptation step never moves a coefficient further than its
    /// fixed per-step cap, no matter how large the errors are.
    #[test]
    fn anfis_adaptation_is_step_bounded(
        e_f in -1e3..1e3f64,
        e_th in -1e3..1e3f64,
        eta in 0.0..10.0f64,
    ) {
        let mut net = AnfisNet::init_from_pd(
            &PdParams::default(), 5, (-1.0, 1.0), (-PI, PI), eta,
        ).unwrap();
        let (kp_ref, kd_ref) = net.reference_gains();
        let scale_f = (kd_ref * 2.0 * PI).abs().max(1.0);
        let scale_t = kp_ref.abs().max(1.0);
        let caps = [0.01 * scale_f, 0.01 * scale_t, 0.01 * scale_f.max(scale_t)];
        let before: Vec<_> = net.rules().to_vec();
        let u = net.evaluate(e_f, e_th);
        net.adapt(e_f, e_th, u, 5e-5);
        // Allow one rounding ulp of the coefficient magnitude on top of the
        // cap: `x += cap` rounds in the coefficient's scale.
        for (b, a) in before.iter().zip(net.rules()) {
            let ulp = |x: f64| 1e-12 * x.abs().max(1.0);
            prop_assert!((a.a_f - b.a_f).abs() <= caps[0] + ulp(b.a_f));
            prop_assert!((a.a_theta - b.a_theta).abs() <= caps[1] + ulp(b.a_theta));
            prop_assert!((a.b - b.b).abs() <= caps[2] + ulp(b.b));
        }
    }
}
