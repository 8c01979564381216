//! Dormand-Prince 5(4) with adaptive steps along straight segments in the complex time plane.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::algebra::{Assignment, Compiled};
use crate::error::{Error, Result};
use crate::systems::PlaneSystem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
    pub min_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: 1e-3,
            max_steps: 1_000_000,
            min_step: 1e-14,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        if !(self.min_step > 0.0 && self.min_step < self.initial_step) {
            return Err(Error::Invalid("need 0 < min step < initial step".into()));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSegment {
    pub start: Complex64,
    pub end: Complex64,
}

impl PathSegment {
    pub fn new(start: Complex64, end: Complex64) -> Self {
        PathSegment { start, end }
    }

    pub fn real(a: f64, b: f64) -> Self {
        PathSegment::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    /// Splits the segment into `n` equal pieces.
    pub fn split(&self, n: usize) -> Vec<PathSegment> {
        let n = n.max(1);
        (0..n)
            .map(|i| {
                let a = self.start + (self.end - self.start) * (i as f64 / n as f64);
                let b = self.start + (self.end - self.start) * ((i + 1) as f64 / n as f64);
                PathSegment::new(a, b)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: Complex64,
    pub state: [Complex64; 2],
    pub local_error: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Index into `samples` of the end of each completed segment.
    pub checkpoints: Vec<usize>,
    /// Set when integration stopped early (step underflow, step budget).
    pub diagnostic: Option<String>,
    pub rejected: usize,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.diagnostic.is_none()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has the initial sample")
    }

    /// CSV with columns `t_re, t_im, x1_re, x1_im, x2_re, x2_im, local_error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_re,t_im,x1_re,x1_im,x2_re,x2_im,local_error\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}",
                s.t.re, s.t.im, s.state[0].re, s.state[0].im, s.state[1].re, s.state[1].im, s.local_error
            );
        }
        out
    }
}

/// A system compiled for repeated numeric evaluation in `(x1, x2, t)`.
#[derive(Clone, Debug)]
pub struct NumericField {
    compiled: Compiled,
}

impl NumericField {
    pub fn new(sys: &PlaneSystem, asg: &Assignment) -> Result<NumericField> {
        let sys = sys.constrained()?;
        let vars = [sys.vars[0], sys.vars[1], sys.time];
        let compiled = Compiled::new(&[&sys.rhs[0], &sys.rhs[1]], &vars, asg)?;
        Ok(NumericField { compiled })
    }

    pub fn eval(&self, t: Complex64, y: &[Complex64; 2]) -> Result<[Complex64; 2]> {
        let mut out = [Complex64::default(); 2];
        self.compiled.eval(&[y[0], y[1], t], &mut out)?;
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Pole(format!("non-finite field value at t = {t}")));
        }
        Ok(out)
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One step of length `h` along direction `dir`; returns the new state and the scaled error.
fn dopri_step(
    f: &NumericField,
    t: Complex64,
    y: &[Complex64; 2],
    h: f64,
    dir: Complex64,
    cfg: &IntegratorConfig,
) -> Result<([Complex64; 2], f64)> {
    let mut k = [[Complex64::default(); 2]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..2 {
                ys[i] += kj[i] * (h * A[s][j]);
            }
        }
        let d = f.eval(t + dir * (h * C[s]), &ys)?;
        k[s] = [d[0] * dir, d[1] * dir];
    }
    // The last stage is evaluated at the fifth-order solution.
    let mut ynew = *y;
    for i in 0..2 {
        for (j, kj) in k.iter().enumerate().take(6) {
            ynew[i] += kj[i] * (h * A[6][j]);
        }
    }
    let mut err = 0.0f64;
    for i in 0..2 {
        let mut e = Complex64::default();
        for (j, kj) in k.iter().enumerate() {
            e += kj[i] * (h * E[j]);
        }
        let sc = cfg.atol + cfg.rtol * y[i].norm().max(ynew[i].norm());
        err += (e.norm() / sc).powi(2);
    }
    Ok((ynew, (err / 2.0).sqrt()))
}

/// Integrates `sys` from `init` along the concatenated segments.
///
/// Step underflow is not an error: the partial trajectory is returned with a diagnostic.
pub fn integrate(
    sys: &PlaneSystem,
    asg: &Assignment,
    init: [Complex64; 2],
    path: &[PathSegment],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let field = NumericField::new(sys, asg)?;
    integrate_field(&field, init, path, cfg)
}

pub fn integrate_field(
    field: &NumericField,
    init: [Complex64; 2],
    path: &[PathSegment],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let t_init = path.first().map(|s| s.start).unwrap_or_default();
    let mut traj = Trajectory {
        samples: vec![Sample {
            t: t_init,
            state: init,
            local_error: 0.0,
        }],
        ..Trajectory::default()
    };
    let mut y = init;
    let mut h = cfg.initial_step;
    let mut steps = 0usize;
    for seg in path {
        let len = (seg.end - seg.start).norm();
        if len == 0.0 {
            traj.checkpoints.push(traj.samples.len() - 1);
            continue;
        }
        let dir = (seg.end - seg.start) / len;
        let mut s = 0.0f64;
        while s < len {
            if steps >= cfg.max_steps {
                traj.diagnostic = Some(format!("step budget exhausted at t = {}", seg.start + dir * s));
                return Ok(traj);
            }
            let last = len - s <= h;
            let hh = if last { len - s } else { h };
            let t = seg.start + dir * s;
            let outcome = dopri_step(field, t, &y, hh, dir, cfg);
            let (accepted, err) = match outcome {
                Ok((ynew, err)) if err <= 1.0 && ynew.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                    y = ynew;
                    s = if last { len } else { s + hh };
                    traj.samples.push(Sample {
                        t: if last { seg.end } else { seg.start + dir * s },
                        state: y,
                        local_error: err,
                    });
                    (true, err)
                }
                Ok((_, err)) if err.is_finite() => (false, err),
                _ => (false, f64::INFINITY),
            };
            steps += 1;
            let fac = if err == 0.0 {
                5.0
            } else if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                0.25
            };
            if accepted {
                if !last {
                    h = hh * fac;
                }
            } else {
                traj.rejected += 1;
                h = hh * fac.min(0.9);
                if h < cfg.min_step {
                    traj.diagnostic = Some(format!("step underflow at t = {t}"));
                    return Ok(traj);
                }
            }
        }
        traj.checkpoints.push(traj.samples.len() - 1);
    }
    Ok(traj)
}

/// Movable pole location extrapolated from the last two samples, assuming the first
/// component behaves like `c (t - t0)^-n` there.
pub fn pole_estimate(field: &NumericField, traj: &Trajectory) -> Option<Complex64> {
    let n = traj.samples.len();
    if n < 2 {
        return None;
    }
    let ratio = |s: &Sample| -> Option<Complex64> {
        let d = field.eval(s.t, &s.state).ok()?;
        Some(s.state[0] / d[0])
    };
    let (a, b) = (&traj.samples[n - 2], &traj.samples[n - 1]);
    let (ga, gb) = (ratio(a)?, ratio(b)?);
    // g = x/x' = -(t - t0)/n
    let slope = (gb - ga) / (b.t - a.t);
    let order = -1.0 / slope;
    Some(b.t + order * gb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse, Symbol};

    fn linear() -> PlaneSystem {
        let x = Symbol::coordinate("x");
        let y = Symbol::coordinate("y");
        PlaneSystem::new("osc", [x, y], Symbol::time(), [parse("y").unwrap(), parse("-x").unwrap()])
    }

    #[test]
    fn harmonic_oscillator() {
        let one = Complex64::new(1.0, 0.0);
        let tr = integrate(
            &linear(),
            &Assignment::new(),
            [one, Complex64::default()],
            &[PathSegment::real(0.0, 1.0)],
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(tr.completed());
        let s = tr.last();
        assert!((s.state[0] - Complex64::new(1f64.cos(), 0.0)).norm() < 1e-9);
        assert!((s.state[1] + Complex64::new(1f64.sin(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn imaginary_direction() {
        // x'' = -x along t = i s gives cosh.
        let tr = integrate(
            &linear(),
            &Assignment::new(),
            [Complex64::new(1.0, 0.0), Complex64::default()],
            &[PathSegment::new(Complex64::default(), Complex64::new(0.0, 1.0))],
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!((tr.last().state[0] - Complex64::new(1f64.cosh(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn bad_config() {
        let cfg = IntegratorConfig {
            rtol: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = IntegratorConfig {
            min_step: 1.0,
            ..IntegratorConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn csv_header() {
        let tr = Trajectory {
            samples: vec![Sample {
                t: Complex64::default(),
                state: [Complex64::default(); 2],
                local_error: 0.0,
            }],
            ..Trajectory::default()
        };
        let csv = tr.to_csv();
        assert!(csv.starts_with("t_re,t_im,x1_re,x1_im,x2_re,x2_im,local_error\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
