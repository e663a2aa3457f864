//! Reduced two-component ODE systems D·iψ̃′ + B(t)ψ̃ = 0, their integration and
//! reconstruction of the full spinor.
//!
//! For most sets D is invertible and ψ̃′ = iD⁻¹Bψ̃. For sets 5 and 7 the
//! derivative coefficient is the nilpotent N = γ̂⁰ − γ̂²; the system is then a
//! rank-one differential-algebraic system. Writing N = n rᵀ with n = (1, 1),
//! r = (1, −1), the left null vector ℓ = (1, −1) gives the constraint
//! ℓᵀBψ̃ = 0, so ψ̃ = w·v(t) with rᵀv = 1 and w′ = i qᵀBv w (qᵀn = 1).
//! In first-order form, ψ̃′ = (μI + v′rᵀ)ψ̃ on the constraint.

pub mod dopri5;

use std::fmt::Write as _;
use std::sync::Arc;

use crate::clifford::{GammaRep, Mat2C, Spinor, C64, I};
use crate::error::{Error, Result};
use crate::separation::{separable_ansatz, CompleteSet, PotentialField, Provenance, SetId, SpinorField};

pub use dopri5::{Segment, Stats};

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedKind {
    /// D invertible, ψ̃′ = iD⁻¹Bψ̃.
    Regular,
    /// D nilpotent of rank one, solutions confined to ℓᵀBψ̃ = 0.
    Constrained,
}

#[derive(Debug, Clone)]
pub struct ReducedODE {
    pub set: CompleteSet,
    pub potential: PotentialField,
    pub lambda: [f64; 2],
    pub m: f64,
    pub rep: GammaRep,
    pub variable: &'static str,
    pub interval: (f64, f64),
    pub kind: ReducedKind,
    /// Singular points inside `interval`, plus t = 0 where the system has
    /// 1/t coefficients.
    pub singular_points: Vec<f64>,
}

const R_VEC: [f64; 2] = [1.0, -1.0];
const L_VEC: [f64; 2] = [1.0, -1.0];
const Q_VEC: [f64; 2] = [0.5, 0.5];

fn has_inverse_t(id: SetId) -> bool {
    matches!(id, SetId::S3 | SetId::S4a | SetId::S4b | SetId::S7)
}

pub fn reduce(
    set: &CompleteSet,
    potential: &PotentialField,
    l1: f64,
    l2: f64,
    m: f64,
    rep: &GammaRep,
) -> Result<ReducedODE> {
    if potential.set.id != set.id {
        return Err(Error::InadmissiblePotential(format!(
            "potential belongs to set {}, not set {}",
            potential.set.id, set.id
        )));
    }
    let r = set.default_region()[set.reduced];
    let margin = 0.1 * (r[1] - r[0]);
    let mut lo = r[0] - margin;
    if has_inverse_t(set.id) && r[0] > 0.0 {
        lo = lo.max(0.5 * r[0]);
    }
    let kind = match set.id {
        SetId::S5 | SetId::S7 => ReducedKind::Constrained,
        _ => ReducedKind::Regular,
    };
    let mut ode = ReducedODE {
        set: set.clone(),
        potential: potential.clone(),
        lambda: [l1, l2],
        m,
        rep: *rep,
        variable: set.reduced_name(),
        interval: (lo, r[1] + margin),
        kind,
        singular_points: Vec::new(),
    };
    if kind == ReducedKind::Regular {
        let probe = 0.5 * (ode.interval.0 + ode.interval.1);
        let det = ode.derivative_matrix(probe).det().norm();
        assert!(det > 1e-12, "derivative coefficient of set {} must be invertible", set.id);
    } else {
        assert!(ode.derivative_matrix(0.0).det().norm() < 1e-15);
    }
    ode.singular_points = ode.singular_points_in(ode.interval.0, ode.interval.1);
    Ok(ode)
}

impl ReducedODE {
    fn ell(&self, t: f64) -> (f64, f64) {
        let a = self.potential.components_at(t);
        let (k1, k2) = (self.set.ignorable[0], self.set.ignorable[1]);
        (self.lambda[0] - a[k1], self.lambda[1] - a[k2])
    }

    /// Matrix D multiplying iψ̃′.
    pub fn derivative_matrix(&self, t: f64) -> Mat2C {
        let g = &self.rep.g;
        let eps = self.set.chart.eps;
        let _ = t;
        match self.set.id {
            SetId::S1 => g[2],
            SetId::S2 => g[0],
            SetId::S3 => g[1],
            SetId::S4a => g[0] * eps,
            SetId::S4b => g[2] * eps,
            SetId::S5 | SetId::S7 => self.rep.null_minus(),
            SetId::S6 => g[1] * (-2.0 * self.set.chart.a),
        }
    }

    /// Coefficient B(t) of the undifferentiated term.
    pub fn coupling(&self, t: f64) -> Mat2C {
        let g = &self.rep.g;
        let s = self.rep.sf();
        let eps = self.set.chart.eps;
        let a = self.potential.components_at(t);
        let (l1, l2) = self.ell(t);
        let mass = Mat2C::scalar(self.m.into());
        let n = self.rep.null_minus();
        let p = self.rep.null_plus();
        match self.set.id {
            SetId::S1 => g[0] * (self.lambda[0] - a[0]) + g[1] * (self.lambda[1] - a[1]) - g[2] * a[2] - mass,
            SetId::S2 => -(g[0] * a[0]) + g[1] * (self.lambda[0] - a[1]) + g[2] * (self.lambda[1] - a[2]) - mass,
            SetId::S3 => {
                let inner = Mat2C::scalar((self.lambda[1] - a[2]).into()) + g[0] * (s / 2.0);
                g[0] * (self.lambda[0] - a[0]) - g[1] * a[1] + (g[2] * inner) * (1.0 / t) - mass
            }
            SetId::S4a => -(g[0] * (eps * a[0])) + g[1] * l1 + g[2] * (eps * l2 / t) - mass,
            SetId::S4b => -(g[2] * (eps * a[0])) + g[1] * l1 + g[0] * (eps * l2 / t) - mass,
            SetId::S5 => -(n * a[0]) + p * l2 + g[1] * l1 - mass,
            SetId::S6 => {
                let ap = self.set.chart.a;
                g[1] * (2.0 * ap * a[0]) + n * (l2 / (2.0 * ap)) + (p + n * (t / (2.0 * ap * ap))) * l1 - mass
            }
            SetId::S7 => n * (C64::new(0.0, 0.5 / t) - a[0]) + p * l1 + g[1] * (l2 / t) - mass,
        }
    }

    /// dB/dt, needed for the constrained sets.
    pub fn coupling_derivative(&self, t: f64) -> Mat2C {
        let g = &self.rep.g;
        let da = self.potential.derivatives_at(t);
        let n = self.rep.null_minus();
        let p = self.rep.null_plus();
        match self.set.id {
            SetId::S5 => -(n * da[0]) - p * da[2] - g[1] * da[1],
            SetId::S7 => {
                let (_, l2) = self.ell(t);
                n * (C64::new(0.0, -0.5 / (t * t)) - da[0]) - p * da[1] + g[1] * (-l2 / (t * t) - da[2] / t)
            }
            _ => crate::fd::derivative(|s| self.coupling(s), t, 1e-5),
        }
    }

    fn beta(b: &Mat2C) -> [C64; 2] {
        [0, 1].map(|j| b.m[0][j] * L_VEC[0] + b.m[1][j] * L_VEC[1])
    }

    /// δ(t) = r₁β₂ − r₂β₁; the constrained system is singular where it vanishes.
    pub fn constraint_determinant(&self, t: f64) -> C64 {
        let beta = Self::beta(&self.coupling(t));
        beta[1] * R_VEC[0] - beta[0] * R_VEC[1]
    }

    /// Unit solution v(t) of the constraint with rᵀv = 1.
    pub fn constraint_vector(&self, t: f64) -> Result<Spinor> {
        let beta = Self::beta(&self.coupling(t));
        let delta = beta[1] * R_VEC[0] - beta[0] * R_VEC[1];
        if delta.norm() < 1e-12 {
            return Err(Error::SingularInterval(t));
        }
        Ok(Spinor::new(beta[1] / delta, -beta[0] / delta))
    }

    /// M(t) with ψ̃′ = M ψ̃.
    pub fn matrix(&self, t: f64) -> Result<Mat2C> {
        match self.kind {
            ReducedKind::Regular => {
                let d = self.derivative_matrix(t);
                let inv = d.inverse().ok_or(Error::SingularInterval(t))?;
                Ok((inv * self.coupling(t)) * I)
            }
            ReducedKind::Constrained => {
                let b = self.coupling(t);
                let db = self.coupling_derivative(t);
                let beta = Self::beta(&b);
                let dbeta = Self::beta(&db);
                let delta = beta[1] * R_VEC[0] - beta[0] * R_VEC[1];
                if delta.norm() < 1e-12 {
                    return Err(Error::SingularInterval(t));
                }
                let ddelta = dbeta[1] * R_VEC[0] - dbeta[0] * R_VEC[1];
                let v = Spinor::new(beta[1] / delta, -beta[0] / delta);
                let dv = Spinor::new(
                    dbeta[1] / delta - beta[1] * ddelta / (delta * delta),
                    -dbeta[0] / delta + beta[0] * ddelta / (delta * delta),
                );
                let bv = b * v;
                let mu = I * (bv.0[0] * Q_VEC[0] + bv.0[1] * Q_VEC[1]);
                let mut m = Mat2C::scalar(mu);
                for i in 0..2 {
                    for j in 0..2 {
                        m.m[i][j] += dv.0[i] * R_VEC[j];
                    }
                }
                Ok(m)
            }
        }
    }

    /// Residual |D·iψ̃′ + Bψ̃| of the original first-order system.
    pub fn system_residual(&self, t: f64, psi: &Spinor, dpsi: &Spinor) -> f64 {
        (self.derivative_matrix(t) * (*dpsi * I) + self.coupling(t) * *psi).norm()
    }

    /// Projects an initial value onto the constraint (identity for regular sets).
    pub fn project_initial(&self, t0: f64, init: &Spinor) -> Result<Spinor> {
        match self.kind {
            ReducedKind::Regular => Ok(*init),
            ReducedKind::Constrained => {
                let w = init.0[0] * R_VEC[0] + init.0[1] * R_VEC[1];
                if w.norm() == 0.0 {
                    return Err(Error::Domain("initial spinor has no component along the constraint".into()));
                }
                Ok(self.constraint_vector(t0)? * w)
            }
        }
    }

    /// Points of [lo, hi] where the system is singular.
    pub fn singular_points_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let mut out = Vec::new();
        if has_inverse_t(self.set.id) && lo <= 0.0 && hi >= 0.0 {
            out.push(0.0);
        }
        if self.kind == ReducedKind::Constrained {
            let n = 2000;
            let f = |t: f64| self.constraint_determinant(t).re;
            let mut prev_t = lo;
            let mut prev = f(lo);
            if prev == 0.0 {
                out.push(lo);
            }
            for i in 1..=n {
                let t = lo + (hi - lo) * i as f64 / n as f64;
                if has_inverse_t(self.set.id) && t.abs() < 1e-12 {
                    prev_t = t;
                    prev = f64::NAN;
                    continue;
                }
                let v = f(t);
                if v == 0.0 {
                    out.push(t);
                } else if prev.is_finite() && prev * v < 0.0 {
                    let (mut a, mut b) = (prev_t, t);
                    for _ in 0..80 {
                        let mid = 0.5 * (a + b);
                        if f(a) * f(mid) <= 0.0 {
                            b = mid;
                        } else {
                            a = mid;
                        }
                    }
                    out.push(0.5 * (a + b));
                }
                prev_t = t;
                prev = v;
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    pub fn provenance(&self) -> Provenance {
        Provenance { set: self.set.id, lambda: self.lambda, m: Some(self.m), s: self.rep.s }
    }
}

/// Integrated reduced solution with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub nodes: Vec<f64>,
    pub values: Vec<Spinor>,
    pub segments: Vec<Segment>,
    pub stats: Stats,
    pub provenance: Option<Provenance>,
}

impl Trajectory {
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.nodes[0], *self.nodes.last().unwrap());
        (a.min(b), a.max(b))
    }

    pub fn eval(&self, t: f64) -> Result<Spinor> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
        if t < lo - slack || t > hi + slack {
            return Err(Error::OutsideRange { t, lo, hi });
        }
        if self.segments.is_empty() {
            return Ok(self.values[0]);
        }
        let forward = self.segments[0].h > 0.0;
        // segments are ordered along the direction of integration
        let idx = self.segments.partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        Ok(seg.eval(t))
    }

    /// CSV with columns t, Re ψ̃₁, Im ψ̃₁, Re ψ̃₂, Im ψ̃₂ at the step nodes.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,re_psi1,im_psi1,re_psi2,im_psi2\n");
        for (t, v) in self.nodes.iter().zip(&self.values) {
            let _ =
                writeln!(s, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", t, v.0[0].re, v.0[0].im, v.0[1].re, v.0[1].im);
        }
        s
    }
}

pub fn integrate(
    ode: &ReducedODE,
    t_start: f64,
    t_end: f64,
    init: &Spinor,
    rtol: f64,
    atol: f64,
) -> Result<Trajectory> {
    if let Some(t) = ode.singular_points_in(t_start, t_end).first() {
        return Err(Error::SingularInterval(*t));
    }
    if init.norm() == 0.0 {
        return Err(Error::Domain("initial spinor must be nonzero".into()));
    }
    let y0 = ode.project_initial(t_start, init)?;
    let rhs = |t: f64, y: &Spinor| -> Result<Spinor> { Ok(ode.matrix(t)? * *y) };
    let sol = dopri5::solve(&rhs, t_start, t_end, y0, rtol, atol)?;
    Ok(Trajectory {
        nodes: sol.nodes,
        values: sol.values,
        segments: sol.segments,
        stats: sol.stats,
        provenance: Some(ode.provenance()),
    })
}

/// Largest difference at the nodes between a run at (rtol, atol) and a rerun
/// with both tolerances divided by `factor`.
pub fn self_convergence(
    ode: &ReducedODE,
    t_start: f64,
    t_end: f64,
    init: &Spinor,
    rtol: f64,
    atol: f64,
    factor: f64,
) -> Result<f64> {
    let coarse = integrate(ode, t_start, t_end, init, rtol, atol)?;
    let fine = integrate(ode, t_start, t_end, init, rtol / factor, atol / factor)?;
    let mut worst: f64 = 0.0;
    for (t, v) in coarse.nodes.iter().zip(&coarse.values) {
        worst = worst.max((fine.eval(*t)? - *v).norm());
    }
    Ok(worst)
}

/// Cartesian solution φ_C built from a reduced trajectory.
pub fn reconstruct(set: &CompleteSet, trajectory: &Trajectory, l1: f64, l2: f64, rep: &GammaRep) -> SpinorField {
    let traj = Arc::new(trajectory.clone());
    let tilde = Arc::new(move |t: f64| traj.eval(t));
    let field = separable_ansatz(set, l1, l2, rep, tilde).cartesian_field;
    match trajectory.provenance.and_then(|p| p.m) {
        Some(m) => field.with_mass(m),
        None => field,
    }
}
