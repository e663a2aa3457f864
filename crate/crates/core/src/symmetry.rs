//! First-order symmetry operators X = ξ^μ𝒫_μ + φ + φ_αγ^α built from Killing
//! fields, and numerical checks of their determining equations.
//!
//! All operators act on Cartesian-frame spinors φ_C(x). Chart-form views are
//! provided for comparison with the straightened operators of each set.

use std::sync::Arc;

use crate::clifford::{levi_civita_symbol, GammaRep, Mat2C, Spinor, C64, ETA, I};
use crate::error::{Error, Result};
use crate::fd;
use crate::geometry::{spinor_connection, Chart};
use crate::linalg::{Mat3, Vec3};
use crate::sampling;
use crate::separation::{CompleteSet, PotentialField, V3};

pub const DETERMINING_TOL: f64 = 1e-6;
pub const COMMUTATOR_TOL: f64 = 1e-4;

/// ξ^ν(x) = 2A^{αν}x_α + B^ν with A antisymmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingField {
    pub a: Mat3,
    pub b: Vec3,
}

pub fn make_killing(a: Mat3, b: Vec3) -> Result<KillingField> {
    let mut sym: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            sym = sym.max((a[i][j] + a[j][i]).abs() / 2.0);
        }
    }
    if sym > 1e-14 {
        return Err(Error::NotAntisymmetric(sym));
    }
    Ok(KillingField { a, b })
}

impl KillingField {
    pub(crate) fn new_unchecked(a: Mat3, b: Vec3) -> Self {
        KillingField { a, b }
    }

    pub fn translation(i: usize) -> Self {
        let mut b = [0.0; 3];
        b[i] = 1.0;
        KillingField { a: [[0.0; 3]; 3], b }
    }

    fn from_pairs(pairs: &[(usize, usize, f64)], b: Vec3) -> Self {
        let mut a = [[0.0; 3]; 3];
        for &(i, j, v) in pairs {
            a[i][j] += v;
            a[j][i] -= v;
        }
        KillingField { a, b }
    }

    /// Rotation in the (x¹, x²) plane: ξ = (0, −x², x¹).
    pub fn rotation_21() -> Self {
        Self::from_pairs(&[(2, 1, 0.5)], [0.0; 3])
    }

    /// Boost in the (x⁰, x²) plane: ξ = (x², 0, x⁰).
    pub fn boost_02() -> Self {
        Self::from_pairs(&[(0, 2, 0.5)], [0.0; 3])
    }

    /// l21 + l01 + a(p0 − p2): ξ = (x¹ + a, x⁰ − x², x¹ − a).
    pub fn parabolic(a: f64) -> Self {
        Self::from_pairs(&[(2, 1, 0.5), (0, 1, 0.5)], [a, 0.0, -a])
    }

    pub fn eval(&self, x: &Vec3) -> Vec3 {
        [0, 1, 2].map(|nu| self.b[nu] + (0..3).map(|al| 2.0 * self.a[al][nu] * ETA[al] * x[al]).sum::<f64>())
    }

    /// ∂_μ ξ^ν indexed [μ][ν].
    pub fn gradient(&self) -> Mat3 {
        let mut g = [[0.0; 3]; 3];
        for mu in 0..3 {
            for nu in 0..3 {
                g[mu][nu] = 2.0 * self.a[mu][nu] * ETA[mu];
            }
        }
        g
    }

    /// Cartesian φ_α = −(s/4) ξ^{μ;σ} ε_{μσα} with ξ^{μ;σ} = 2A^{σμ}.
    pub fn matrix_part(&self, s: i32) -> Vec3 {
        let mut out = [0.0; 3];
        for (al, o) in out.iter_mut().enumerate() {
            for mu in 0..3 {
                for sg in 0..3 {
                    *o += 2.0 * self.a[sg][mu] * levi_civita_symbol(mu, sg, al);
                }
            }
            *o *= -(s as f64) / 4.0;
        }
        out
    }

    fn params(&self) -> [f64; 6] {
        [self.a[0][1], self.a[0][2], self.a[1][2], self.b[0], self.b[1], self.b[2]]
    }

    /// Coefficients (c₁, c₂) with self ≈ c₁k₁ + c₂k₂ and the residual norm.
    pub fn decompose(&self, k1: &KillingField, k2: &KillingField) -> ([f64; 2], f64) {
        let (v, p, q) = (self.params(), k1.params(), k2.params());
        let dot = |x: &[f64; 6], y: &[f64; 6]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let (pp, pq, qq) = (dot(&p, &p), dot(&p, &q), dot(&q, &q));
        let (vp, vq) = (dot(&v, &p), dot(&v, &q));
        let det = pp * qq - pq * pq;
        let c = if det.abs() < 1e-300 { [0.0, 0.0] } else { [(vp * qq - vq * pq) / det, (vq * pp - vp * pq) / det] };
        let r: f64 = (0..6).map(|i| (v[i] - c[0] * p[i] - c[1] * q[i]).powi(2)).sum::<f64>().sqrt();
        (c, r)
    }
}

/// How φ was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiExpr {
    /// φ = Σ c_ν A_ν with A_ν the chart components of the potential.
    Components(Vec3),
    /// F_{μν}ξ^ν vanishes, φ = 0.
    Zero,
    /// Line integral of F_{μν}ξ^ν from a base point.
    LineIntegral(Vec3),
}

type ScalarFn = dyn Fn(&Vec3) -> Result<f64> + Send + Sync;

#[derive(Clone)]
pub struct Phi {
    pub expr: PhiExpr,
    f: Arc<ScalarFn>,
}

impl Phi {
    /// φ = Σ c_ν A_ν(u) in the chart of the potential's set.
    pub fn from_components(potential: &PotentialField, coeffs: Vec3) -> Phi {
        let pot = potential.clone();
        let f = Arc::new(move |x: &Vec3| -> Result<f64> {
            let u = pot.set.chart.to_chart(x)?;
            let a = pot.chart_components(&u);
            Ok((0..3).map(|i| coeffs[i] * a[i]).sum())
        });
        Phi { expr: PhiExpr::Components(coeffs), f }
    }

    pub fn eval(&self, x: &Vec3) -> Result<f64> {
        (self.f)(x)
    }
}

impl std::fmt::Debug for Phi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Phi({:?})", self.expr)
    }
}

fn force(potential: &PotentialField, xi: &KillingField, x: &Vec3, h: f64) -> Result<Vec3> {
    let f = potential.field_strength(x, h)?;
    let v = xi.eval(x);
    Ok([0, 1, 2].map(|mu| (0..3).map(|nu| f[mu][nu] * v[nu]).sum()))
}

/// Solves φ_{,μ} = F_{μν} ξ^ν.
pub fn solve_phi(killing: &KillingField, potential: &PotentialField) -> Result<Phi> {
    let set = &potential.set;
    let (c, resid) = killing.decompose(&set.killing[0], &set.killing[1]);
    if resid < 1e-12 {
        let mut coeffs = [0.0; 3];
        coeffs[set.ignorable[0]] += c[0];
        coeffs[set.ignorable[1]] += c[1];
        return Ok(Phi::from_components(potential, coeffs));
    }
    let points = sample_points(set, 20);
    let mut wmax: f64 = 0.0;
    for x in &points {
        wmax = wmax.max(force(potential, killing, x, 1e-4)?.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    if wmax < 1e-8 {
        return Ok(Phi { expr: PhiExpr::Zero, f: Arc::new(|_| Ok(0.0)) });
    }
    let h = 1e-3;
    for x in &points {
        for mu in 0..3 {
            for nu in 0..mu {
                let dmu = fd::try_partial(|p| force(potential, killing, p, 1e-4).map(V3), x, mu, h)?.0;
                let dnu = fd::try_partial(|p| force(potential, killing, p, 1e-4).map(V3), x, nu, h)?.0;
                let curl = dmu[nu] - dnu[mu];
                if curl.abs() > 1e-5 {
                    return Err(Error::InadmissiblePotential(format!(
                        "F·ξ is not a gradient for set {} (curl {curl:e} at {x:?})",
                        set.id
                    )));
                }
            }
        }
    }
    let region = set.default_region();
    let base = set.chart.to_cartesian(&[0, 1, 2].map(|k| 0.5 * (region[k][0] + region[k][1])));
    let (pot, xi) = (potential.clone(), *killing);
    let f = Arc::new(move |x: &Vec3| -> Result<f64> {
        let n = 64;
        let d = [0, 1, 2].map(|k| x[k] - base[k]);
        let mut sum = 0.0;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let p = [0, 1, 2].map(|k| base[k] + t * d[k]);
            let fw = force(&pot, &xi, &p, 1e-4)?;
            sum += w * (0..3).map(|k| fw[k] * d[k]).sum::<f64>();
        }
        Ok(sum / (3.0 * n as f64))
    });
    Ok(Phi { expr: PhiExpr::LineIntegral(base), f })
}

/// Operators acting on Cartesian spinor fields by central differences.
pub trait SpinorOperator: Send + Sync {
    fn apply(&self, psi: &dyn Fn(&Vec3) -> Result<Spinor>, x: &Vec3, h: f64) -> Result<Spinor>;
}

fn gradient_of(psi: &dyn Fn(&Vec3) -> Result<Spinor>, x: &Vec3, h: f64) -> Result<[Spinor; 3]> {
    Ok([fd::try_partial(psi, x, 0, h)?, fd::try_partial(psi, x, 1, h)?, fd::try_partial(psi, x, 2, h)?])
}

/// Cartesian Dirac operator H = γ̂^a(i∂_a − A_(C)a) − m.
#[derive(Debug, Clone)]
pub struct DiracOperator {
    pub rep: GammaRep,
    pub m: f64,
    pub potential: PotentialField,
}

impl SpinorOperator for DiracOperator {
    fn apply(&self, psi: &dyn Fn(&Vec3) -> Result<Spinor>, x: &Vec3, h: f64) -> Result<Spinor> {
        let d = gradient_of(psi, x, h)?;
        let p = psi(x)?;
        let a = self.potential.cartesian(x)?;
        let mut out = p * (-self.m);
        for k in 0..3 {
            out += self.rep.g[k] * (d[k] * I - p * a[k]);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryOperator {
    pub killing: KillingField,
    pub phi: Phi,
    /// Cartesian components φ_α of the matrix part.
    pub phi_vec: Vec3,
    pub rep: GammaRep,
    pub potential: PotentialField,
    pub chart: Chart,
    pub ignorable: Option<usize>,
    pub phi_defect: Vec3,
}

impl SymmetryOperator {
    pub fn new(killing: KillingField, potential: &PotentialField, rep: &GammaRep) -> Result<Self> {
        let phi = solve_phi(&killing, potential)?;
        let set = &potential.set;
        let ignorable = set.killing.iter().position(|k| *k == killing).map(|i| set.ignorable[i]);
        Ok(SymmetryOperator {
            phi_vec: killing.matrix_part(rep.s),
            killing,
            phi,
            rep: *rep,
            potential: potential.clone(),
            chart: set.chart,
            ignorable,
            phi_defect: [0.0; 3],
        })
    }

    /// Adds d·x to φ, used to check that defects are detected.
    pub fn with_phi_defect(mut self, d: Vec3) -> Self {
        self.phi_defect = d;
        self
    }

    pub fn with_phi(mut self, phi: Phi) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_phi_vec(mut self, v: Vec3) -> Self {
        self.phi_vec = v;
        self
    }

    pub fn phi_at(&self, x: &Vec3) -> Result<f64> {
        Ok(self.phi.eval(x)? + (0..3).map(|k| self.phi_defect[k] * x[k]).sum::<f64>())
    }

    /// Σ = φ_α γ̂^α.
    pub fn sigma(&self) -> Mat2C {
        let mut m = Mat2C::zero();
        for a in 0..3 {
            m += self.rep.g[a] * self.phi_vec[a];
        }
        m
    }

    /// Derivative coefficients X^ν = ξ^ν I.
    pub fn derivative_coefficients(&self, x: &Vec3) -> [Mat2C; 3] {
        self.killing.eval(x).map(|v| Mat2C::scalar(v.into()))
    }

    /// Chart components φ_μ = J[a][μ] φ_a of the matrix part.
    pub fn chart_phi_vec(&self, u: &Vec3) -> Vec3 {
        let j = self.chart.jacobian(u);
        [0, 1, 2].map(|mu| (0..3).map(|a| j[a][mu] * self.phi_vec[a]).sum())
    }

    /// Matrix part of the straightened operator X = i∂_k + (iΓ_k + φ_μγ^μ)
    /// in the chart of its set.
    pub fn chart_matrix_part(&self, u: &Vec3) -> Result<Mat2C> {
        let k = self
            .ignorable
            .ok_or_else(|| Error::Domain("operator is not one of the straightened generators of its set".into()))?;
        let conn = spinor_connection(&self.chart, u, &self.rep)?;
        let gs = self.chart.gammas_at(&self.rep, u);
        let pv = self.chart_phi_vec(u);
        let mut m = conn[k] * I;
        for mu in 0..3 {
            m += gs[mu] * pv[mu];
        }
        Ok(m)
    }
}

impl SpinorOperator for SymmetryOperator {
    fn apply(&self, psi: &dyn Fn(&Vec3) -> Result<Spinor>, x: &Vec3, h: f64) -> Result<Spinor> {
        let d = gradient_of(psi, x, h)?;
        let p = psi(x)?;
        let a = self.potential.cartesian(x)?;
        let xi = self.killing.eval(x);
        let mut out = self.sigma() * p + p * self.phi_at(x)?;
        for k in 0..3 {
            out += (d[k] * I - p * a[k]) * xi[k];
        }
        Ok(out)
    }
}

/// Both operators of a complete set for an admissible potential.
pub fn build_operator_pair(
    set: &CompleteSet,
    potential: &PotentialField,
    rep: &GammaRep,
) -> Result<(SymmetryOperator, SymmetryOperator)> {
    if potential.set.id != set.id || potential.set.chart != set.chart {
        return Err(Error::InadmissiblePotential(format!(
            "potential belongs to set {}, not set {}",
            potential.set.id, set.id
        )));
    }
    Ok((SymmetryOperator::new(set.killing[0], potential, rep)?, SymmetryOperator::new(set.killing[1], potential, rep)?))
}

/// Cartesian sample points: Halton points of the set's chart region.
pub fn sample_points(set: &CompleteSet, n: usize) -> Vec<Vec3> {
    sampling::halton_box(&set.default_region(), n).iter().map(|u| set.chart.to_cartesian(u)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingReport {
    /// max |Ψ^{μν}| with Ψ^{μν} = 2X^{μν} − (2/3)Sp(X)g^{μν}.
    pub psi_mu_nu: f64,
    /// Residual of [γ^μ,X^ν] + [γ^ν,X^μ] = Ψ^νγ^μ + Ψ^μγ^ν.
    pub symbol_equation: f64,
    /// max |Ψ̄^ν|, the scalar part of Ψ^ν.
    pub psi_bar_nu: f64,
    /// |Ψ̄₀| = |ξ^μ_{;μ}|/3.
    pub psi_bar_0: f64,
    /// max |Ψ_{0μ}| = |2φ_μ + (s/2)ξ^{α;σ}e_{μασ}|.
    pub psi_0_mu: f64,
    /// |Sp(X)|.
    pub trace: f64,
    /// φ_α against −(s/4)ξ^{μ;σ}e_{μσα}.
    pub phi_formula: f64,
    /// φ_{,μ} against F_{μν}ξ^ν.
    pub gradient: f64,
    /// ξ_{ν;μ} + ξ_{μ;ν}.
    pub killing: f64,
    /// ξ^μ_{;μ}.
    pub divergence: f64,
    pub tol: f64,
    pub points: usize,
}

impl DeterminingReport {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("psi_mu_nu", self.psi_mu_nu),
            ("symbol_equation", self.symbol_equation),
            ("psi_bar_nu", self.psi_bar_nu),
            ("psi_bar_0", self.psi_bar_0),
            ("psi_0_mu", self.psi_0_mu),
            ("trace", self.trace),
            ("phi_formula", self.phi_formula),
            ("gradient", self.gradient),
            ("killing", self.killing),
            ("divergence", self.divergence),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.entries().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.entries().into_iter().filter(|(_, v)| v.is_nan() || *v > self.tol).map(|(k, _)| k).collect()
    }

    pub fn pass(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Evaluates each determining sub-equation at the given Cartesian points.
pub fn check_determining(
    op: &SymmetryOperator,
    potential: &PotentialField,
    points: &[Vec3],
) -> Result<DeterminingReport> {
    check_determining_with(op, potential, points, fd::H_FIRST, DETERMINING_TOL)
}

pub fn check_determining_with(
    op: &SymmetryOperator,
    potential: &PotentialField,
    points: &[Vec3],
    h: f64,
    tol: f64,
) -> Result<DeterminingReport> {
    let s = op.rep.sf();
    let g = &op.rep.g;
    let mut r = DeterminingReport {
        psi_mu_nu: 0.0,
        symbol_equation: 0.0,
        psi_bar_nu: 0.0,
        psi_bar_0: 0.0,
        psi_0_mu: 0.0,
        trace: 0.0,
        phi_formula: 0.0,
        gradient: 0.0,
        killing: 0.0,
        divergence: 0.0,
        tol,
        points: points.len(),
    };
    for x in points {
        // ∂_a ξ^b by central differences
        let mut dxi = [[0.0; 3]; 3];
        for a in 0..3 {
            dxi[a] = fd::partial(|p| V3(op.killing.eval(p)), x, a, h).0;
        }
        let mut killing: f64 = 0.0;
        let mut div = 0.0;
        for mu in 0..3 {
            div += dxi[mu][mu];
            for nu in 0..3 {
                killing = killing.max((ETA[nu] * dxi[mu][nu] + ETA[mu] * dxi[nu][mu]).abs());
            }
        }
        r.killing = r.killing.max(killing);
        r.divergence = r.divergence.max(div.abs());
        r.psi_bar_0 = r.psi_bar_0.max(div.abs() / 3.0);

        // ξ^{μ;σ} = η^{σσ} ∂_σ ξ^μ
        let raised = |mu: usize, sg: usize| ETA[sg] * dxi[sg][mu];
        for al in 0..3 {
            let mut contraction = 0.0;
            for mu in 0..3 {
                for sg in 0..3 {
                    contraction += raised(mu, sg) * levi_civita_symbol(mu, sg, al);
                }
            }
            r.phi_formula = r.phi_formula.max((op.phi_vec[al] + s / 4.0 * contraction).abs());
            r.psi_0_mu = r.psi_0_mu.max((2.0 * op.phi_vec[al] + s / 2.0 * contraction).abs());
        }

        // Symbol part: expand X^ν in {I, γ̂^α}, Ψ^{να} = 2X^{να} − (2/3)Sp g^{να}.
        let coeffs = op.derivative_coefficients(x);
        let mut xv = [[C64::new(0.0, 0.0); 3]; 3];
        for nu in 0..3 {
            let e = crate::clifford::expand_in_basis(&coeffs[nu], g)?;
            xv[nu] = e.vector;
        }
        let sp: C64 = (0..3).map(|mu| xv[mu][mu]).sum();
        r.trace = r.trace.max(sp.norm());
        let mut psi = [[C64::new(0.0, 0.0); 3]; 3];
        for nu in 0..3 {
            for al in 0..3 {
                // X^{να} with the second index raised by η
                let upper = xv[nu][al] * ETA[al];
                let gterm = if nu == al { ETA[al] } else { 0.0 };
                psi[nu][al] = upper * 2.0 - sp * (2.0 / 3.0 * gterm);
                r.psi_mu_nu = r.psi_mu_nu.max(psi[nu][al].norm());
            }
        }
        let psi_mat = |nu: usize| {
            let mut m = Mat2C::zero();
            for al in 0..3 {
                // Ψ^ν = Ψ^ν_{·α}γ^α, lowering α back with η
                m += g[al] * (psi[nu][al] * ETA[al]);
            }
            m
        };
        for mu in 0..3 {
            for nu in 0..3 {
                let lhs = g[mu].commutator(&coeffs[nu]) + g[nu].commutator(&coeffs[mu]);
                let rhs = psi_mat(nu) * g[mu] + psi_mat(mu) * g[nu];
                r.symbol_equation = r.symbol_equation.max((lhs - rhs).max_abs());
            }
        }
        for nu in 0..3 {
            r.psi_bar_nu = r.psi_bar_nu.max((psi_mat(nu).trace() / 2.0).norm());
        }

        // φ_{,μ} = F_{μν} ξ^ν
        let w = force(potential, &op.killing, x, h)?;
        for k in 0..3 {
            let dphi = fd::try_partial(|p| op.phi_at(p), x, k, h)?;
            r.gradient = r.gradient.max((dphi - w[k]).abs());
        }
    }
    Ok(r)
}

/// max over the points of |([A, B]ψ)(x)| by nested central differences.
pub fn operator_commutator(
    a: &dyn SpinorOperator,
    b: &dyn SpinorOperator,
    psi: &dyn Fn(&Vec3) -> Result<Spinor>,
    points: &[Vec3],
    h: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in points {
        let ab = a.apply(&|y: &Vec3| b.apply(psi, y, h), x, h)?;
        let ba = b.apply(&|y: &Vec3| a.apply(psi, y, h), x, h)?;
        worst = worst.max((ab - ba).norm());
    }
    Ok(worst)
}

/// max |([X, H]ψ)(x)| with H the Cartesian Dirac operator. The mass term
/// commutes with X, so any m gives the same value.
pub fn commutator_residual(
    op: &SymmetryOperator,
    potential: &PotentialField,
    psi: &dyn Fn(&Vec3) -> Result<Spinor>,
    points: &[Vec3],
    h: f64,
) -> Result<f64> {
    let hop = DiracOperator { rep: op.rep, m: 1.0, potential: potential.clone() };
    operator_commutator(op, &hop, psi, points, h)
}
