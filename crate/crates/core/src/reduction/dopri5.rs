//! Dormand–Prince 5(4) with the Hairer dense output, for complex 2-vectors.

use crate::clifford::Spinor;
use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub rtol: f64,
    pub atol: f64,
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub h: f64,
    pub cont: [Spinor; 5],
}

impl Segment {
    pub fn eval(&self, t: f64) -> Spinor {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.cont;
        c[0] + (c[1] + (c[2] + (c[3] + c[4] * th1) * th) * th1) * th
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

fn combo(y: &Spinor, h: f64, k: &[Spinor], a: &[f64]) -> Spinor {
    let mut out = *y;
    for (ki, ai) in k.iter().zip(a) {
        if *ai != 0.0 {
            out += *ki * (h * ai);
        }
    }
    out
}

fn comps(v: &Spinor) -> [f64; 4] {
    [v.0[0].re, v.0[0].im, v.0[1].re, v.0[1].im]
}

pub struct Solution {
    pub nodes: Vec<f64>,
    pub values: Vec<Spinor>,
    pub segments: Vec<Segment>,
    pub stats: Stats,
}

const MAX_STEPS: usize = 1_000_000;

/// Integrates y' = f(t, y) from t0 to t1 (either direction).
pub fn solve(
    f: &dyn Fn(f64, &Spinor) -> Result<Spinor>,
    t0: f64,
    t1: f64,
    y0: Spinor,
    rtol: f64,
    atol: f64,
) -> Result<Solution> {
    let mut stats = Stats { rtol, atol, ..Stats::default() };
    let mut nodes = vec![t0];
    let mut values = vec![y0];
    let mut segments = Vec::new();
    if t1 == t0 {
        return Ok(Solution { nodes, values, segments, stats });
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let err_norm = |e: &Spinor, y: &Spinor, yn: &Spinor| -> f64 {
        let (ec, yc, nc) = (comps(e), comps(y), comps(yn));
        let s: f64 = (0..4)
            .map(|i| {
                let sc = atol + rtol * yc[i].abs().max(nc[i].abs());
                (ec[i] / sc).powi(2)
            })
            .sum();
        (s / 4.0).sqrt()
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    stats.evaluations += 1;

    // initial step following Hairer's heuristic
    let d0 = err_norm(&y, &Spinor::zero(), &Spinor::zero()).max(1e-300);
    let d1 = err_norm(&k1, &Spinor::zero(), &Spinor::zero()).max(1e-300);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span);
    let y1 = y + k1 * (dir * h);
    let k1b = f(t + dir * h, &y1)?;
    stats.evaluations += 1;
    let d2 = err_norm(&(k1b - k1), &y, &y) / h;
    let h1 = if d1.max(d2) <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    h = (100.0 * h).min(h1).min(span) * dir;

    let mut last_rejected = false;
    loop {
        if (t1 - t) * dir <= 0.0 {
            break;
        }
        if stats.steps + stats.rejected > MAX_STEPS {
            return Err(Error::StepUnderflow(t));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow(t));
        }
        let k2 = f(t + C[1] * h, &combo(&y, h, &[k1], &A2))?;
        let k3 = f(t + C[2] * h, &combo(&y, h, &[k1, k2], &A3))?;
        let k4 = f(t + C[3] * h, &combo(&y, h, &[k1, k2, k3], &A4))?;
        let k5 = f(t + C[4] * h, &combo(&y, h, &[k1, k2, k3, k4], &A5))?;
        let k6 = f(t + C[5] * h, &combo(&y, h, &[k1, k2, k3, k4, k5], &A6))?;
        let ynew = combo(&y, h, &[k1, k2, k3, k4, k5, k6], &B);
        let k7 = f(t + h, &ynew)?;
        stats.evaluations += 6;
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut e = Spinor::zero();
        for (k, c) in ks.iter().zip(&E) {
            e += *k * (h * c);
        }
        let err = err_norm(&e, &y, &ynew);
        if !err.is_finite() {
            return Err(Error::StepUnderflow(t));
        }
        if err <= 1.0 {
            let ydiff = ynew - y;
            let bspl = k1 * h - ydiff;
            let mut c4 = Spinor::zero();
            for (k, d) in ks.iter().zip(&D) {
                c4 += *k * (h * d);
            }
            let cont = [y, ydiff, bspl, ydiff - k7 * h - bspl, c4];
            segments.push(Segment { t0: t, h, cont });
            t += h;
            if (t1 - t) * dir < 1e-15 * span {
                t = t1;
            }
            y = ynew;
            k1 = k7;
            nodes.push(t);
            values.push(y);
            stats.steps += 1;
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    Ok(Solution { nodes, values, segments, stats })
}
