//! The second-order ODE s·f·f″ = s·f′² − k·(f + s·f′²)^{3/2} − f·f′ whose
//! solutions generate constant-Levi-curvature Reinhardt profiles in ℂ² via
//! F(r_1, r_2) = f(r_2²) − r_1², together with the exact linear family
//! f(s) = R² − s at k = 1/R.
//!
//! The origin s = 0 is a singular point of the equation; integrations start
//! at s0 > 0 and no series expansion at zero is attempted.

use std::io::Write;

use crate::error::{Error, Result};

/// One sample of the profile ODE state.
#[derive(Debug, Clone, Copy)]
pub struct OdeState {
    /// Squared-radius variable, s ≥ 0.
    pub s: f64,
    pub f: f64,
    /// f′(s).
    pub fp: f64,
    /// Target curvature constant k > 0.
    pub k: f64,
}

/// Right-hand side f″ = (s·f′² − k·(f + s·f′²)^{3/2} − f·f′) / (s·f).
pub fn ode_rhs(state: &OdeState) -> Result<f64> {
    let OdeState { s, f, fp, k } = *state;
    let denom = s * f;
    if denom == 0.0 {
        return Err(Error::OdeSingular { s, f });
    }
    let arg = f + s * fp * fp;
    if arg < 0.0 {
        return Err(Error::Domain(format!(
            "f + s·f′² = {arg:.3e} is negative: outside the equation's domain"
        )));
    }
    Ok((s * fp * fp - k * arg.powf(1.5) - f * fp) / denom)
}

/// Adaptive step control for [`integrate_profile`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; picked from the interval length when absent.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: None,
            max_steps: 1_000_000,
        }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Terminus {
    /// Reached s_max with f still positive.
    ReachedSMax,
    /// f crossed zero; the crossing abscissa located by step bisection.
    Crossed { s_star: f64 },
    /// A singular or out-of-domain right-hand side stopped the run; the last
    /// valid state is the final element of the sample list.
    DomainStop { reason: String },
}

/// Result of one adaptive integration.
#[derive(Debug, Clone)]
pub struct OdeRun {
    pub states: Vec<OdeState>,
    pub terminus: Terminus,
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs_pair(s: f64, y: [f64; 2], k: f64) -> Result<[f64; 2]> {
    let state = OdeState {
        s,
        f: y[0],
        fp: y[1],
        k,
    };
    Ok([y[1], ode_rhs(&state)?])
}

/// One embedded Dormand–Prince step: returns (y5, error_estimate).
fn dp_step(s: f64, y: [f64; 2], h: f64, k: f64) -> Result<([f64; 2], [f64; 2])> {
    let mut stages = [[0.0f64; 2]; 7];
    stages[0] = rhs_pair(s, y, k)?;
    for i in 0..6 {
        let mut yi = y;
        for (j, stage) in stages.iter().enumerate().take(i + 1) {
            yi[0] += h * A[i][j] * stage[0];
            yi[1] += h * A[i][j] * stage[1];
        }
        stages[i + 1] = rhs_pair(s + C[i] * h, yi, k)?;
    }
    let mut y5 = y;
    let mut y4 = y;
    for (j, stage) in stages.iter().enumerate() {
        y5[0] += h * B5[j] * stage[0];
        y5[1] += h * B5[j] * stage[1];
        y4[0] += h * B4[j] * stage[0];
        y4[1] += h * B4[j] * stage[1];
    }
    Ok((y5, [y5[0] - y4[0], y5[1] - y4[1]]))
}

fn error_norm(err: &[f64; 2], y: &[f64; 2], y_new: &[f64; 2], control: &StepControl) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let scale = control.atol + control.rtol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / scale).powi(2);
    }
    (acc / 2.0).sqrt()
}

/// Integrates the profile equation from (s0, f0, f0′) until s_max, the f = 0
/// crossing, or a domain stop. The crossing is located by bisecting the step
/// length of a single embedded step to 1e-10.
pub fn integrate_profile(
    k: f64,
    s0: f64,
    f0: f64,
    fp0: f64,
    s_max: f64,
    control: &StepControl,
) -> Result<OdeRun> {
    if k <= 0.0 {
        return Err(Error::Domain("curvature constant k must be positive".into()));
    }
    if s0 <= 0.0 {
        return Err(Error::Domain("s0 must be positive (s = 0 is singular)".into()));
    }
    if f0 <= 0.0 {
        return Err(Error::Domain("f0 must be positive inside the profile".into()));
    }
    if s_max <= s0 {
        return Err(Error::Domain("s_max must exceed s0".into()));
    }
    if f0 + s0 * fp0 * fp0 < 0.0 {
        return Err(Error::Domain("initial data violates f + s·f′² ≥ 0".into()));
    }

    let mut s = s0;
    let mut y = [f0, fp0];
    let mut h = control.h_init.unwrap_or((s_max - s0) / 100.0);
    let h_min = 1e-14 * (1.0 + s_max.abs());
    let mut states = vec![OdeState {
        s,
        f: y[0],
        fp: y[1],
        k,
    }];

    let mut terminus = Terminus::ReachedSMax;
    let mut steps = 0usize;
    'outer: while s < s_max {
        if steps >= control.max_steps {
            terminus = Terminus::DomainStop {
                reason: "step budget exhausted".into(),
            };
            break;
        }
        steps += 1;
        h = h.min(s_max - s);
        let attempt = dp_step(s, y, h, k);
        let (y_new, err) = match attempt {
            Ok(v) => v,
            Err(_) if h > h_min => {
                // A stage left the domain: very likely f heading through 0.
                h *= 0.25;
                continue;
            }
            Err(e) => {
                terminus = Terminus::DomainStop {
                    reason: e.to_string(),
                };
                break;
            }
        };
        let err_norm = error_norm(&err, &y, &y_new, control);
        let finite = y_new.iter().all(|v| v.is_finite()) && err_norm.is_finite();
        if !finite || err_norm > 1.0 {
            if h <= h_min {
                terminus = Terminus::DomainStop {
                    reason: "step size collapsed near a singular point".into(),
                };
                break;
            }
            let factor = if finite {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.25
            };
            h = (h * factor).max(h_min);
            continue;
        }
        if y_new[0] <= 0.0 {
            // Bisect the step length to land on f = 0 within 1e-10.
            let mut lo = 0.0f64;
            let mut hi = h;
            let state_at = |hh: f64| -> Option<[f64; 2]> {
                if hh == 0.0 {
                    return Some(y);
                }
                dp_step(s, y, hh, k).ok().map(|(v, _)| v)
            };
            for _ in 0..200 {
                if hi - lo <= 1e-10 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                match state_at(mid) {
                    Some(v) if v[0] > 0.0 => lo = mid,
                    _ => hi = mid,
                }
            }
            let h_star = 0.5 * (lo + hi);
            if let Some(v) = state_at(h_star) {
                s += h_star;
                y = v;
                states.push(OdeState {
                    s,
                    f: y[0],
                    fp: y[1],
                    k,
                });
            }
            terminus = Terminus::Crossed { s_star: s };
            break 'outer;
        }
        // Domain guards on the accepted state.
        if y_new[0] + (s + h) * y_new[1] * y_new[1] < -1e-12 {
            terminus = Terminus::DomainStop {
                reason: "f + s·f′² left the admissible region".into(),
            };
            break;
        }
        if y_new[1].abs() > 1e12 {
            terminus = Terminus::DomainStop {
                reason: "f′ blow-up: singular profile closure".into(),
            };
            break;
        }
        s += h;
        y = y_new;
        states.push(OdeState {
            s,
            f: y[0],
            fp: y[1],
            k,
        });
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(OdeRun { states, terminus })
}

/// Max defect of the linear family f(s) = R² − s in the equation over
/// sampled s ∈ (0, R²); equals R²·|1 − kR| identically in s.
pub fn sphere_residual(k: f64, radius: f64, sample_count: usize) -> f64 {
    let r2 = radius * radius;
    let mut worst = 0.0f64;
    for i in 1..=sample_count {
        let s = r2 * i as f64 / (sample_count + 1) as f64;
        let f = r2 - s;
        let fp = -1.0f64;
        let arg = f + s * fp * fp;
        // Defect of f″ = 0 in the cleared form s·f·f″ − (s·f′² − k(…)^{3/2} − f·f′).
        let cleared = 0.0 - (s * fp * fp - k * arg.powf(1.5) - f * fp);
        worst = worst.max(cleared.abs());
    }
    worst
}

/// Writes the (s, f, f′) samples as CSV.
pub fn write_ode_csv<W: Write>(run: &OdeRun, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "s,f,fp")?;
    for state in &run.states {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            state.s, state.f, state.fp
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_vanishes_on_the_sphere_branch() {
        // f = R² − s with k = 1/R satisfies the equation identically.
        for radius in [0.5, 1.0, 2.0] {
            let k = 1.0 / radius;
            for i in 1..100 {
                let s = radius * radius * i as f64 / 100.0;
                let state = OdeState {
                    s,
                    f: radius * radius - s,
                    fp: -1.0,
                    k,
                };
                if state.f == 0.0 {
                    continue;
                }
                assert!(ode_rhs(&state).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rhs_special_values() {
        // k = 1, R = 1, s = 0.5 sits on the sphere branch: f″ = 0.
        let state = OdeState {
            s: 0.5,
            f: 0.5,
            fp: -1.0,
            k: 1.0,
        };
        assert!(ode_rhs(&state).unwrap().abs() < 1e-14);

        // f + s·f′² = 0 exactly: the 3/2 power contributes nothing.
        let s = 0.5;
        let fp = -1.0;
        let state = OdeState { s, f: -s * fp * fp, fp, k: 1.0 };
        let expected = (s * fp * fp - state.f * fp) / (s * state.f);
        assert_eq!(ode_rhs(&state).unwrap(), expected);
    }

    #[test]
    fn rhs_singularity_and_domain_errors() {
        let state = OdeState {
            s: 0.0,
            f: 1.0,
            fp: 0.0,
            k: 1.0,
        };
        assert!(matches!(ode_rhs(&state), Err(Error::OdeSingular { .. })));
        let state = OdeState {
            s: 1.0,
            f: -2.0,
            fp: 0.5,
            k: 1.0,
        };
        assert!(matches!(ode_rhs(&state), Err(Error::Domain(_))));
    }

    #[test]
    fn sphere_residual_values() {
        assert!(sphere_residual(1.0, 1.0, 100) <= 1e-12);
        assert!(sphere_residual(2.0, 0.5, 100) <= 1e-12);
        assert!((sphere_residual(1.0, 2.0, 100) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn integration_tracks_the_sphere_branch() {
        let control = StepControl::default();
        let run = integrate_profile(1.0, 0.1, 0.9, -1.0, 2.0, &control).unwrap();
        match run.terminus {
            Terminus::Crossed { s_star } => assert!((s_star - 1.0).abs() <= 1e-6),
            ref other => panic!("expected crossing, got {other:?}"),
        }
        for state in &run.states {
            assert!((state.f - (1.0 - state.s)).abs() <= 1e-6);
            assert!(state.f + state.s * state.fp * state.fp >= -1e-12);
        }

        // R = 2 at k = 1/2: crossing at s = 4.
        let run = integrate_profile(0.5, 0.1, 3.9, -1.0, 8.0, &control).unwrap();
        match run.terminus {
            Terminus::Crossed { s_star } => assert!((s_star - 4.0).abs() <= 1e-6),
            ref other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    fn perturbed_start_leaves_the_linear_branch() {
        let control = StepControl::default();
        let run = integrate_profile(1.0, 0.1, 0.9, -0.9, 2.0, &control).unwrap();
        let max_dev = run
            .states
            .iter()
            .map(|st| (st.f - (1.0 - st.s)).abs())
            .fold(0.0, f64::max);
        assert!(max_dev > 1e-3, "deviation only {max_dev}");
    }

    #[test]
    fn tolerance_halving_moves_the_crossing_within_budget() {
        let coarse = StepControl {
            rtol: 1e-8,
            atol: 1e-11,
            ..Default::default()
        };
        let fine = StepControl {
            rtol: 5e-9,
            atol: 5e-12,
            ..Default::default()
        };
        // Two different crossing branches: k = 1 landing at s* = 1 and
        // k = 1/2 landing at s* = 4.
        for (k, f0, s_max) in [(1.0, 0.9, 3.0), (0.5, 3.9, 8.0)] {
            let run_a = integrate_profile(k, 0.1, f0, -1.0, s_max, &coarse).unwrap();
            let run_b = integrate_profile(k, 0.1, f0, -1.0, s_max, &fine).unwrap();
            let (Terminus::Crossed { s_star: sa }, Terminus::Crossed { s_star: sb }) =
                (&run_a.terminus, &run_b.terminus)
            else {
                panic!("both runs should cross");
            };
            assert!((sa - sb).abs() <= 1e-8, "crossing moved by {}", (sa - sb).abs());
        }
    }

    #[test]
    fn invalid_initial_data_rejected() {
        let control = StepControl::default();
        assert!(integrate_profile(1.0, 0.1, -0.5, -1.0, 2.0, &control).is_err());
        assert!(integrate_profile(1.0, 0.0, 0.9, -1.0, 2.0, &control).is_err());
        assert!(integrate_profile(-1.0, 0.1, 0.9, -1.0, 2.0, &control).is_err());
        assert!(integrate_profile(1.0, 0.5, 0.9, -1.0, 0.2, &control).is_err());
    }

    #[test]
    fn csv_shape() {
        let run = integrate_profile(1.0, 0.1, 0.9, -1.0, 2.0, &StepControl::default()).unwrap();
        let mut buf = Vec::new();
        write_ode_csv(&run, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,f,fp\n"));
        assert_eq!(text.lines().count(), 1 + run.states.len());
    }
}
