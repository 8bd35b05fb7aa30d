//! Adaptive first-order Sugeno neuro-fuzzy frequency regulator.
//!
//! Two inputs — frequency error `e_f` (Hz) and wrapped phase error `e_θ`
//! (rad) — pass through Gaussian membership functions arranged on an m×m
//! grid (m per input, m² rules). Each rule carries a linear consequent
//! `y_r = a_f·e_f + a_θ·e_θ + b_r` in watts of dump-power demand, and the
//! network output is the firing-strength-weighted average
//! `u = Σ w_r·y_r / Σ w_r`.
//!
//! The network is initialized from a PD law: every rule's consequent is set
//! to the PD coefficients (`a_f = k_d·2π`, `a_θ = k_p`, `b = 0`), so the
//! initial control surface *is* the PD surface (a weighted average of
//! identical linear functions). Online adaptation then refines consequents
//! only (premises stay frozen) by a normalized-LMS rule against the PD-form
//! regulation-error surrogate
//!
//! ```text
//! ε = plant_sign·(k_p·e_θ + k_d·2π·e_f)
//! (a_f, a_θ, b)_r += η·ε·w̄_r·(e_f, e_θ, 1)/(1 + e_f² + e_θ²)
//! ```
//!
//! with each per-step coefficient change clamped to 1% of that
//! coefficient's characteristic scale (fixed at initialization from the
//! reference gains) — an anti-windup guard that keeps parameters finite over
//! arbitrarily long runs.

use crate::control::PdParams;
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// One fuzzy rule: a Gaussian membership function per input plus a linear
/// consequent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rule {
    /// Center of the frequency-error membership function (Hz).
    pub center_f: f64,
    /// Width (σ) of the frequency-error membership function (Hz).
    pub width_f: f64,
    /// Center of the phase-error membership function (rad).
    pub center_theta: f64,
    /// Width (σ) of the phase-error membership function (rad).
    pub width_theta: f64,
    /// Consequent coefficient on `e_f` (W/Hz).
    pub a_f: f64,
    /// Consequent coefficient on `e_θ` (W/rad).
    pub a_theta: f64,
    /// Consequent offset (W).
    pub b: f64,
}

impl Rule {
    /// Unnormalized firing strength: the product of the two Gaussian
    /// memberships at the given inputs.
    pub fn membership(&self, e_f: f64, e_theta: f64) -> f64 {
        let zf = (e_f - self.center_f) / self.width_f;
        let zt = (e_theta - self.center_theta) / self.width_theta;
        libm::exp(-0.5 * (zf * zf + zt * zt))
    }

    /// First-order consequent: `a_f·e_f + a_θ·e_θ + b` (W).
    pub fn output(&self, e_f: f64, e_theta: f64) -> f64 {
        self.a_f * e_f + self.a_theta * e_theta + self.b
    }
}

/// First-order Sugeno network with online consequent adaptation.
#[derive(Debug, Clone, PartialEq)]
pub struct AnfisNet {
    rules: Vec<Rule>,
    ef_range: (f64, f64),
    etheta_range: (f64, f64),
    learn_rate: f64,
    kp_ref: f64,
    kd_ref: f64,
    plant_sign: f64,
    step_clamp: [f64; 3],
}

impl AnfisNet {
    /// Builds a network whose initial control surface reproduces the given
    /// PD law exactly.
    ///
    /// Gaussian centers sit on a uniform m×m grid over
    /// `ef_range × etheta_range`; widths equal the grid spacing divided by
    /// √2. Every consequent starts at `(a_f, a_θ, b) = (k_d·2π, k_p, 0)`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParam`] for `m < 2`, degenerate ranges, or a negative
    /// or non-finite learning rate.
    pub fn init_from_pd(
        pd: &PdParams,
        m: usize,
        ef_range: (f64, f64),
        etheta_range: (f64, f64),
        learn_rate: f64,
    ) -> Result<Self> {
        pd.validate()?;
        if m < 2 {
            return Err(Error::InvalidParam {
                name: "mfs",
                constraint: ">= 2",
            });
        }
        for (range, name) in [(ef_range, "ef_range"), (etheta_range, "etheta_range")] {
            if !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
                return Err(Error::InvalidParam {
                    name,
                    constraint: "finite with lo < hi",
                });
            }
        }
        if !(learn_rate >= 0.0) || !learn_rate.is_finite() {
            return Err(Error::InvalidParam {
                name: "learn_rate",
                constraint: ">= 0 and finite",
            });
        }

        let a_f = pd.k_d * 2.0 * PI;
        let a_theta = pd.k_p;
        let spacing_f = (ef_range.1 - ef_range.0) / (m - 1) as f64;
        let spacing_t = (etheta_range.1 - etheta_range.0) / (m - 1) as f64;
        let width_f = spacing_f / libm::sqrt(2.0);
        let width_theta = spacing_t / libm::sqrt(2.0);

        let mut rules = Vec::with_capacity(m * m);
        for i in 0..m {
            for k in 0..m {
                rules.push(Rule {
                    center_f: ef_range.0 + i as f64 * spacing_f,
                    width_f,
                    center_theta: etheta_range.0 + k as f64 * spacing_t,
                    width_theta,
                    a_f,
                    a_theta,
                    b: 0.0,
                });
            }
        }

        Self::from_rules(
            rules,
            ef_range,
            etheta_range,
            learn_rate,
            pd.k_p,
            pd.k_d,
            1.0,
        )
    }

    /// Builds a network from explicit rules (also the deserialization path).
    ///
    /// `kp_ref`/`kd_ref` are the PD reference gains used by the adaptation
    /// error surrogate; `plant_sign` must be ±1 (+1: more dump power lowers
    /// frequency).
    pub fn from_rules(
        rules: Vec<Rule>,
        ef_range: (f64, f64),
        etheta_range: (f64, f64),
        learn_rate: f64,
        kp_ref: f64,
        kd_ref: f64,
        plant_sign: f64,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::InvalidParam {
                name: "rules",
                constraint: "at least one rule",
            });
        }
        for r in &rules {
            if !(r.width_f > 0.0) || !(r.width_theta > 0.0) {
                return Err(Error::InvalidParam {
                    name: "rule width",
                    constraint: "> 0",
                });
            }
        }
        if plant_sign != 1.0 && plant_sign != -1.0 {
            return Err(Error::InvalidParam {
                name: "plant_sign",
                constraint: "+1 or -1",
            });
        }
        if !(learn_rate >= 0.0) || !learn_rate.is_finite() {
            return Err(Error::InvalidParam {
                name: "learn_rate",
                constraint: ">= 0 and finite",
            });
        }
        // Per-step change caps: 1% of each coefficient's characteristic
        // scale, fixed at construction so long runs stay bounded.
        let scale_f = libm::fabs(kd_ref * 2.0 * PI).max(1.0);
        let scale_t = libm::fabs(kp_ref).max(1.0);
        let step_clamp = [0.01 * scale_f, 0.01 * scale_t, 0.01 * scale_f.max(scale_t)];
        Ok(AnfisNet {
            rules,
            ef_range,
            etheta_range,
            learn_rate,
            kp_ref,
            kd_ref,
            plant_sign,
            step_clamp,
        })
    }

    /// The rule base.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Mutable access to the rule base (testing and tooling).
    pub fn rules_mut(&mut self) -> &mut [Rule] {
        &mut self.rules
    }

    /// Number of rules (m² for a grid-initialized net).
    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Learning rate η.
    pub fn learn_rate(&self) -> f64 {
        self.learn_rate
    }

    /// Sets the learning rate (η ≥ 0 required; η = 0 freezes the net).
    pub fn set_learn_rate(&mut self, eta: f64) -> Result<()> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParam {
                name: "learn_rate",
                constraint: ">= 0 and finite",
            });
        }
        self.learn_rate = eta;
        Ok(())
    }

    /// PD reference gains `(k_p, k_d)` of the adaptation surrogate.
    pub fn reference_gains(&self) -> (f64, f64) {
        (self.kp_ref, self.kd_ref)
    }

    /// Covered input box `(ef_range, etheta_range)`.
    pub fn input_ranges(&self) -> ((f64, f64), (f64, f64)) {
        (self.ef_range, self.etheta_range)
    }

    /// Clamps inputs into the covered box when raw firing underflows to
    /// zero (inputs far outside membership coverage).
    fn effective_inputs(&self, e_f: f64, e_theta: f64) -> (f64, f64) {
        let sum: f64 = self.rules.iter().map(|r| r.membership(e_f, e_theta)).sum();
        if sum > 0.0 {
            (e_f, e_theta)
        } else {
            (
                e_f.clamp(self.ef_range.0, self.ef_range.1),
                e_theta.clamp(self.etheta_range.0, self.etheta_range.1),
            )
        }
    }

    /// Unnormalized rule firing strengths at the (effective) inputs.
    pub fn firing_strengths(&self, e_f: f64, e_theta: f64) -> Vec<f64> {
        let (ef, et) = self.effective_inputs(e_f, e_theta);
        self.rules.iter().map(|r| r.membership(ef, et)).collect()
    }

    /// Per-rule consequent values `y_r` at the (effective) inputs.
    pub fn rule_outputs(&self, e_f: f64, e_theta: f64) -> Vec<f64> {
        let (ef, et) = self.effective_inputs(e_f, e_theta);
        self.rules.iter().map(|r| r.output(ef, et)).collect()
    }

    /// Dump-power demand (W): the normalized firing-strength-weighted
    /// average of the rule consequents,
    /// `u = Σ w_r·(a_f·e_f + a_θ·e_θ + b_r) / Σ w_r`.
    ///
    /// Inputs far outside membership coverage are clamped to the covered box
    /// before evaluation. Returns 0 if no rule fires even after clamping
    /// (possible only for hand-built rule bases that do not cover their box).
    pub fn evaluate(&self, e_f: f64, e_theta: f64) -> f64 {
        let (ef, et) = self.effective_inputs(e_f, e_theta);
        let mut num = 0.0;
        let mut den = 0.0;
        for r in &self.rules {
            let w = r.membership(ef, et);
            num += w * r.output(ef, et);
            den += w;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Analytic sensitivities of the output to each rule's consequent
    /// parameters: `∂u/∂(a_f, a_θ, b)_r = w̄_r·(e_f, e_θ, 1)` with
    /// normalized firing strengths and effective (possibly clamped) inputs.
    pub fn consequent_gradient(&self, e_f: f64, e_theta: f64) -> Vec<[f64; 3]> {
        let (ef, et) = self.effective_inputs(e_f, e_theta);
        let strengths: Vec<f64> = self.rules.iter().map(|r| r.membership(ef, et)).collect();
        let sum: f64 = strengths.iter().sum();
        strengths
            .iter()
            .map(|&w| {
                let wb = if sum > 0.0 { w / sum } else { 0.0 };
                [wb * ef, wb * et, wb]
            })
            .collect()
    }

    /// One online adaptation step (consequents only; premises frozen).
    ///
    /// `ε = plant_sign·(kp_ref·e_θ + kd_ref·2π·e_f)` and each rule updates
    /// `(a_f, a_θ, b)_r += η·ε·w̄_r·(e_f, e_θ, 1)/(1 + e_f² + e_θ²)`, with
    /// every component change clamped to its per-step cap.
    ///
    /// `u_applied` and `dt` are part of the controller-step interface but
    /// unused by this law: the surrogate error depends only on the
    /// measured regulation errors, and the normalization term makes the
    /// update step-size-free.
    pub fn adapt(&mut self, e_f: f64, e_theta: f64, _u_applied: f64, _dt: f64) {
        if self.learn_rate == 0.0 {
            return;
        }
        let (ef, et) = self.effective_inputs(e_f, e_theta);
        let eps = self.plant_sign * (self.kp_ref * et + self.kd_ref * 2.0 * PI * ef);
        if eps == 0.0 {
            return;
        }
        let strengths: Vec<f64> = self.rules.iter().map(|r| r.membership(ef, et)).collect();
        let sum: f64 = strengths.iter().sum();
        if sum <= 0.0 {
            return;
        }
        let gain = self.learn_rate * eps / ((1.0 + ef * ef + et * et) * sum);
        let clamp = self.step_clamp;
        for (r, w) in self.rules.iter_mut().zip(strengths) {
            let base = gain * w;
            r.a_f += (base * ef).clamp(-clamp[0], clamp[0]);
            r.a_theta += (base * et).clamp(-clamp[1], clamp[1]);
            r.b += base.clamp(-clamp[2], clamp[2]);
        }
    }

    /// Serializes the network to a plain-text parameter block: header lines
    /// followed by one `rule` line per rule (centers, widths, consequents).
    /// Floating-point values round-trip exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# adaptive Sugeno frequency regulator\n");
        out.push_str(&format!("learn_rate {}\n", self.learn_rate));
        out.push_str(&format!("kp_ref {}\n", self.kp_ref));
        out.push_str(&format!("kd_ref {}\n", self.kd_ref));
        out.push_str(&format!("plant_sign {}\n", self.plant_sign));
        out.push_str(&format!(
            "ef_range {} {}\n",
            self.ef_range.0, self.ef_range.1
        ));
        out.push_str(&format!(
            "etheta_range {} {}\n",
            self.etheta_range.0, self.etheta_range.1
        ));
        for r in &self.rules {
            out.push_str(&format!(
                "rule {} {} {} {} {} {} {}\n",
                r.center_f, r.width_f, r.center_theta, r.width_theta, r.a_f, r.a_theta, r.b
            ));
        }
        out
    }

    /// Parses a network serialized by [`AnfisNet::to_text`].
    ///
    /// `#` comments and blank lines are ignored. Header keys must precede
    /// the rule lines.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut learn_rate = None;
        let mut kp_ref = None;
        let mut kd_ref = None;
        let mut plant_sign = None;
        let mut ef_range = None;
        let mut etheta_range = None;
        let mut rules = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or("");
            let nums: Vec<f64> = {
                let mut v = Vec::new();
                for p in parts {
                    match p.parse::<f64>() {
                        Ok(x) => v.push(x),
                        Err(_) => {
                            return Err(Error::Parse {
                                line: line_no,
                                what: "a floating-point number",
                            })
                        }
                    }
                }
                v
            };
            match (key, nums.len()) {
                ("learn_rate", 1) => learn_rate = Some(nums[0]),
                ("kp_ref", 1) => kp_ref = Some(nums[0]),
                ("kd_ref", 1) => kd_ref = Some(nums[0]),
                ("plant_sign", 1) => plant_sign = Some(nums[0]),
                ("ef_range", 2) => ef_range = Some((nums[0], nums[1])),
                ("etheta_range", 2) => etheta_range = Some((nums[0], nums[1])),
                ("rule", 7) => rules.push(Rule {
                    center_f: nums[0],
                    width_f: nums[1],
                    center_theta: nums[2],
                    width_theta: nums[3],
                    a_f: nums[4],
                    a_theta: nums[5],
                    b: nums[6],
                }),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        what: "a header key or `rule` with the right field count",
                    })
                }
            }
        }

        let (
            Some(learn_rate),
            Some(kp_ref),
            Some(kd_ref),
            Some(plant_sign),
            Some(ef_range),
            Some(etheta_range),
        ) = (
            learn_rate,
            kp_ref,
            kd_ref,
            plant_sign,
            ef_range,
            etheta_range,
        )
        else {
            return Err(Error::Parse {
                line: 0,
                what: "complete header (learn_rate, kp_ref, kd_ref, plant_sign, ef_range, etheta_range)",
            });
        };
        Self::from_rules(
            rules,
            ef_range,
            etheta_range,
            learn_rate,
            kp_ref,
            kd_ref,
            plant_sign,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::pd_control_step;
    use crate::control::MeasurementState;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn default_net(eta: f64) -> AnfisNet {
        AnfisNet::init_from_pd(
            &PdParams::default(),
            5,
            (-1.0, 1.0),
            (-core::f64::consts::PI, core::f64::consts::PI),
            eta,
        )
        .unwrap()
    }

    #[test]
    fn rule_count_is_m_squared() {
        for m in [2, 3, 5, 7] {
            let net =
                AnfisNet::init_from_pd(&PdParams::default(), m, (-1.0, 1.0), (-1.0, 1.0), 0.0)
                    .unwrap();
            assert_eq!(net.rule_count(), m * m);
        }
    }

    #[test]
    fn init_rejects_bad_arguments() {
        let pd = PdParams::default();
        assert!(AnfisNet::init_from_pd(&pd, 1, (-1.0, 1.0), (-1.0, 1.0), 0.0).is_err());
        assert!(AnfisNet::init_from_pd(&pd, 5, (1.0, -1.0), (-1.0, 1.0), 0.0).is_err());
        assert!(AnfisNet::init_from_pd(&pd, 5, (-1.0, 1.0), (-1.0, 1.0), -1e-3).is_err());
    }

    #[test]
    fn initial_net_reproduces_pd_surface() {
        // A weighted average of identical linear functions is that linear
        // function: the match is exact to rounding, far inside the 0.1%
        // acceptance band.
        let pd = PdParams::default();
        let net = default_net(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let e_f: f64 = rng.gen_range(-1.0..1.0);
            let e_t: f64 = rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
            let meas = MeasurementState {
                f_meas: 50.0 + e_f,
                theta_err: e_t,
            };
            let u_pd = pd_control_step(&meas, 50.0, &pd);
            let u_net = net.evaluate(e_f, e_t);
            assert_relative_eq!(u_net, u_pd, max_relative = 1e-9, epsilon = 1e-6);
        }
    }

    #[test]
    fn symmetric_net_is_zero_at_origin() {
        let net = default_net(0.0);
        assert_abs_diff_eq!(net.evaluate(0.0, 0.0), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_consequents_give_constant_output() {
        let mut net = default_net(0.0);
        for r in net.rules_mut() {
            r.a_f = 0.0;
            r.a_theta = 0.0;
            r.b = 777.0;
        }
        for (e_f, e_t) in [(0.0, 0.0), (0.5, -1.0), (-0.9, 3.0), (10.0, -10.0)] {
            assert_relative_eq!(net.evaluate(e_f, e_t), 777.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn dominant_rule_controls_output() {
        // Shrink the membership widths so the corner rule fires with ≥ 0.99
        // of the total strength, then check the output lands within 1% of
        // that rule's consequent value.
        let mut net = default_net(0.0);
        for r in net.rules_mut() {
            r.width_f /= 4.0;
            r.width_theta /= 4.0;
            r.a_f = 0.0;
            r.a_theta = 0.0;
            r.b = 0.0;
        }
        net.rules_mut()[0].b = 12345.0;
        let (c_f, c_t) = (net.rules()[0].center_f, net.rules()[0].center_theta);
        let strengths = net.firing_strengths(c_f, c_t);
        let total: f64 = strengths.iter().sum();
        assert!(strengths[0] / total >= 0.99);
        assert_relative_eq!(net.evaluate(c_f, c_t), 12345.0, max_relative = 0.01);
    }

    #[test]
    fn output_is_convex_combination_of_rule_outputs() {
        let mut net = default_net(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for r in net.rules_mut() {
            r.a_f = rng.gen_range(-1e4..1e4);
            r.a_theta = rng.gen_range(-1e5..1e5);
            r.b = rng.gen_range(-1e3..1e3);
        }
        for _ in 0..200 {
            let e_f: f64 = rng.gen_range(-1.5..1.5);
            let e_t: f64 = rng.gen_range(-4.0..4.0);
            let u = net.evaluate(e_f, e_t);
            let outs = net.rule_outputs(e_f, e_t);
            let lo = outs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = outs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(
                u >= lo - 1e-9 && u <= hi + 1e-9,
                "u={u} not in [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn normalization_is_scale_invariant() {
        let net = default_net(0.0);
        let (e_f, e_t) = (0.37, -1.1);
        let w = net.firing_strengths(e_f, e_t);
        let y = net.rule_outputs(e_f, e_t);
        let direct = net.evaluate(e_f, e_t);
        for scale in [1e-6, 1.0, 7.3, 1e6] {
            let num: f64 = w.iter().zip(&y).map(|(wi, yi)| scale * wi * yi).sum();
            let den: f64 = w.iter().map(|wi| scale * wi).sum();
            assert_relative_eq!(num / den, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn degenerate_inputs_clamp_to_box() {
        let net = default_net(0.0);
        let far = net.evaluate(1e9, -1e9);
        let corner = net.evaluate(1.0, -core::f64::consts::PI);
        assert!(far.is_finite());
        assert_relative_eq!(far, corner, max_relative = 1e-12);
    }

    #[test]
    fn adapt_is_identity_at_zero_error() {
        let mut net = default_net(1e-3);
        let before = net.clone();
        net.adapt(0.0, 0.0, 123.0, 5e-5);
        assert_eq!(net, before);
    }

    #[test]
    fn adapt_noop_with_zero_learning_rate() {
        let mut net = default_net(0.0);
        let before = net.clone();
        net.adapt(0.5, 0.7, 1e4, 5e-5);
        assert_eq!(net, before);
    }

    #[test]
    fn single_rule_update_direction() {
        let rule = Rule {
            center_f: 0.0,
            width_f: 1.0,
            center_theta: 0.0,
            width_theta: 1.0,
            a_f: 0.0,
            a_theta: 0.0,
            b: 0.0,
        };
        let mut net = AnfisNet::from_rules(
            alloc::vec![rule],
            (-1.0, 1.0),
            (-1.0, 1.0),
            1e-3,
            2e5,
            4e4,
            1.0,
        )
        .unwrap();
        // ε > 0 for positive errors; update direction = sign(ε)·(e_f, e_θ, 1).
        net.adapt(0.3, 0.2, 0.0, 5e-5);
        let r = net.rules()[0];
        assert!(r.a_f > 0.0 && r.a_theta > 0.0 && r.b > 0.0);

        // Negative errors flip ε and the (e_f, e_θ) factors: a-coefficients
        // move positive again, offset moves negative.
        let mut net2 = net.clone();
        for r in net2.rules_mut() {
            *r = rule;
        }
        net2.adapt(-0.3, -0.2, 0.0, 5e-5);
        let r2 = net2.rules()[0];
        assert!(r2.a_f > 0.0 && r2.a_theta > 0.0 && r2.b < 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut net = default_net(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in net.rules_mut() {
            r.a_f = rng.gen_range(-1e4..1e4);
            r.a_theta = rng.gen_range(-1e5..1e5);
            r.b = rng.gen_range(-1e3..1e3);
        }
        for _ in 0..10 {
            let e_f: f64 = rng.gen_range(-1.2..1.2);
            let e_t: f64 = rng.gen_range(-3.5..3.5);
            let grad = net.consequent_gradient(e_f, e_t);
            let idx = rng.gen_range(0..net.rule_count());
            #[allow(clippy::needless_range_loop)]
            for comp in 0..3 {
                let scale: f64 = match comp {
                    0 => 1e4,
                    1 => 1e5,
                    _ => 1e3,
                };
                // The output is linear in every consequent parameter, so
                // central differences carry no truncation error; a large
                // step keeps cancellation noise far below the tolerance.
                let h = 0.01 * scale;
                let mut plus = net.clone();
                let mut minus = net.clone();
                match comp {
                    0 => {
                        plus.rules_mut()[idx].a_f += h;
                        minus.rules_mut()[idx].a_f -= h;
                    }
                    1 => {
                        plus.rules_mut()[idx].a_theta += h;
                        minus.rules_mut()[idx].a_theta -= h;
                    }
                    _ => {
                        plus.rules_mut()[idx].b += h;
                        minus.rules_mut()[idx].b -= h;
                    }
                }
                let fd = (plus.evaluate(e_f, e_t) - minus.evaluate(e_f, e_t)) / (2.0 * h);
                let analytic = grad[idx][comp];
                let denom = analytic.abs().max(1e-6);
                assert!(
                    (fd - analytic).abs() / denom < 1e-5,
                    "rule {idx} comp {comp}: fd={fd} analytic={analytic}"
                );
            }
        }
    }

    #[test]
    fn adaptation_stays_bounded_over_a_million_steps() {
        let mut net = default_net(1e-2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1_000_000 {
            let e_f: f64 = rng.gen_range(-1.0..1.0);
            let e_t: f64 = rng.gen_range(-3.0..3.0);
            net.adapt(e_f, e_t, 0.0, 5e-5);
        }
        for r in net.rules() {
            assert!(r.a_f.is_finite() && r.a_theta.is_finite() && r.b.is_finite());
            // The per-step clamp caps total drift at 1e6 steps × 1% scale.
            assert!(r.a_f.abs() <= 1e4 * 2e5);
            assert!(r.a_theta.abs() <= 1e4 * 2e5);
            assert!(r.b.abs() <= 1e4 * 2e5);
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let mut net = default_net(2e-4);
        // Perturb so the round trip exercises non-trivial values.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for r in net.rules_mut() {
            r.a_f += rng.gen_range(-1.0..1.0);
            r.a_theta += rng.gen_range(-1.0..1.0);
            r.b += rng.gen_range(-1.0..1.0);
        }
        let text = net.to_text();
        let back = AnfisNet::from_text(&text).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn from_text_rejects_malformed_input() {
        assert!(AnfisNet::from_text("").is_err());
        assert!(AnfisNet::from_text("learn_rate x\n").is_err());
        let mut text = default_net(0.0).to_text();
        text.push_str("rule 1 2 3\n"); // wrong arity
        assert!(AnfisNet::from_text(&text).is_err());
    }
}
