//! Flag definitions and the small parsers for points and tolerance overrides.

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use num_complex::Complex64;
use reinhardt::Tolerances;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "reinhardt",
    version,
    about = "Curvature invariants, characteristic flows and rigidity verdicts for Reinhardt boundaries"
)]
pub struct Args {
    /// Command: curvature | scan | flow | verify | critical | ode
    #[arg(long)]
    pub command: String,

    /// Path to the profile JSON document (not needed for `ode`).
    #[arg(long)]
    pub profile: Option<String>,

    /// RNG seed for sampling and multi-start searches.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Sample count (scan, verify) or multi-start budget (critical).
    #[arg(long)]
    pub samples: Option<usize>,

    /// Output file path; defaults to `<command>.<format>`.
    #[arg(long)]
    pub out: Option<String>,

    /// Output format: json | csv | svg (command-dependent).
    #[arg(long)]
    pub format: Option<String>,

    /// Tolerance override `key=value`; repeatable.
    #[arg(long = "tol")]
    pub tol: Vec<String>,

    /// Evaluation point: "r=r1,...;theta=t1,..." or "z=re1,im1,re2,im2,...".
    #[arg(long)]
    pub point: Option<String>,

    /// Curvature constant of the profile ODE.
    #[arg(long)]
    pub k: Option<f64>,

    /// Initial abscissa of the profile ODE (s = 0 is singular).
    #[arg(long, default_value_t = 0.1)]
    pub s0: f64,

    /// Initial f of the profile ODE; defaults to the sphere branch value.
    #[arg(long)]
    pub f0: Option<f64>,

    /// Initial f' of the profile ODE.
    #[arg(long, default_value_t = -1.0)]
    pub fp0: f64,

    /// Integration endpoint of the profile ODE.
    #[arg(long)]
    pub s_max: Option<f64>,

    /// Evaluate the linear-family defect at this radius instead of integrating.
    #[arg(long)]
    pub sphere_residual: Option<f64>,

    /// Flow duration.
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,

    /// Flow step size.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,

    /// Flow integrator: rk4 | implicit_midpoint | closed_form.
    #[arg(long, default_value = "rk4")]
    pub method: String,
}

impl Args {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut tols = Tolerances::default();
        for entry in &self.tol {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| anyhow!("--tol expects key=value, got `{entry}`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .with_context(|| format!("--tol {entry}: value is not a number"))?;
            tols.set(key.trim(), value)
                .map_err(|e| anyhow!("{e}"))?;
        }
        Ok(tols)
    }
}

/// Parses the `--point` grammar into an ambient point of the right dimension.
pub fn parse_point(spec: &str, dim: usize) -> Result<Vec<Complex64>> {
    let mut radii: Option<Vec<f64>> = None;
    let mut thetas: Option<Vec<f64>> = None;
    let mut z: Option<Vec<f64>> = None;
    for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("point component `{part}` is not key=values"))?;
        let numbers: Vec<f64> = value
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("point component `{part}` holds a non-number"))?;
        match key.trim() {
            "r" => radii = Some(numbers),
            "theta" => thetas = Some(numbers),
            "z" => z = Some(numbers),
            other => bail!("unknown point component `{other}`"),
        }
    }
    if let Some(values) = z {
        if radii.is_some() || thetas.is_some() {
            bail!("give either z=... or r=...;theta=..., not both");
        }
        if values.len() != 2 * dim {
            bail!(
                "z expects {} numbers (re,im per coordinate), got {}",
                2 * dim,
                values.len()
            );
        }
        return Ok(values
            .chunks(2)
            .map(|pair| Complex64::new(pair[0], pair[1]))
            .collect());
    }
    let radii = radii.ok_or_else(|| anyhow!("point needs r=... or z=..."))?;
    if radii.len() != dim {
        bail!("r expects {dim} radii, got {}", radii.len());
    }
    if radii.iter().any(|&r| r < 0.0) {
        bail!("radii must be nonnegative");
    }
    let thetas = thetas.unwrap_or_else(|| vec![0.0; dim]);
    if thetas.len() != dim {
        bail!("theta expects {dim} angles, got {}", thetas.len());
    }
    Ok(radii
        .iter()
        .zip(&thetas)
        .map(|(&r, &th)| Complex64::from_polar(r.sqrt(), th))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_from_radii_and_phases() {
        let z = parse_point("r=1,0;theta=0,0", 2).unwrap();
        assert!((z[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(z[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn point_from_real_imag_pairs() {
        let z = parse_point("z=0.5,-0.5,0,2", 2).unwrap();
        assert_eq!(z[0], Complex64::new(0.5, -0.5));
        assert_eq!(z[1], Complex64::new(0.0, 2.0));
    }

    #[test]
    fn bad_points_are_rejected() {
        assert!(parse_point("r=1", 2).is_err());
        assert!(parse_point("w=1,2", 2).is_err());
        assert!(parse_point("r=-1,0", 2).is_err());
        assert!(parse_point("z=1,2,3", 2).is_err());
    }
}
