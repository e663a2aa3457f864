//! Complex 2×2 matrices, the (2+1) gamma matrices and Levi-Civita tensors.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Chart;
use crate::linalg::{self, Mat3};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Minkowski metric diag(1, -1, -1).
pub const ETA: [f64; 3] = [1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub m: [[C64; 2]; 2],
}

impl Mat2C {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2C { m: [[a, b], [c, d]] }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn sigma1() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma2() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma3() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn scalar(c: C64) -> Self {
        Self::new(c, ZERO, ZERO, c)
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return None;
        }
        let m = &self.m;
        Some(Self::new(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d))
    }

    pub fn scale(&self, c: C64) -> Self {
        let m = &self.m;
        Self::new(m[0][0] * c, m[0][1] * c, m[1][0] * c, m[1][1] * c)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, o: &Self) -> Self {
        *self * *o - *o * *self
    }

    pub fn anticommutator(&self, o: &Self) -> Self {
        *self * *o + *o * *self
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let m = &self.m;
        Spinor([m[0][0] * v.0[0] + m[0][1] * v.0[1], m[1][0] * v.0[0] + m[1][1] * v.0[1]])
    }

    /// exp(z M) in closed form, valid whenever M² is a multiple of the identity.
    /// Returns `None` if M² is not scalar.
    pub fn exp_scaled(&self, z: C64) -> Option<Self> {
        let sq = *self * *self;
        let k = sq.m[0][0];
        if (sq - Mat2C::scalar(k)).max_abs() > 1e-12 * (1.0 + k.norm()) {
            return None;
        }
        if k.norm() < 1e-300 {
            return Some(Mat2C::identity() + self.scale(z));
        }
        let r = k.sqrt();
        let w = z * r;
        Some(Mat2C::scalar(w.cosh()) + self.scale(w.sinh() / r))
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        let mut r = self;
        r += o;
        r
    }
}

impl AddAssign for Mat2C {
    fn add_assign(&mut self, o: Mat2C) {
        for i in 0..2 {
            for j in 0..2 {
                self.m[i][j] += o.m[i][j];
            }
        }
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        self + (-o)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.scale(-ONE)
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        let a = &self.m;
        let b = &o.m;
        let mut r = Mat2C::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        r
    }
}

impl Mul<C64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, c: C64) -> Mat2C {
        self.scale(c)
    }
}

impl Mul<f64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, c: f64) -> Mat2C {
        self.scale(C64::new(c, 0.0))
    }
}

impl Mul<Spinor> for Mat2C {
    type Output = Spinor;
    fn mul(self, v: Spinor) -> Spinor {
        self.apply(&v)
    }
}

impl fmt::Display for Mat2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Two-component complex spinor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor(pub [C64; 2]);

impl Spinor {
    pub fn new(a: C64, b: C64) -> Self {
        Spinor([a, b])
    }

    pub fn zero() -> Self {
        Spinor([ZERO, ZERO])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        Spinor([self.0[0] * c, self.0[1] * c])
    }

    pub fn dot(&self, o: &Spinor) -> C64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, o: Spinor) -> Spinor {
        Spinor([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, o: Spinor) {
        self.0[0] += o.0[0];
        self.0[1] += o.0[1];
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, o: Spinor) -> Spinor {
        Spinor([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor([-self.0[0], -self.0[1]])
    }
}

impl Mul<C64> for Spinor {
    type Output = Spinor;
    fn mul(self, c: C64) -> Spinor {
        self.scale(c)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, c: f64) -> Spinor {
        self.scale(C64::new(c, 0.0))
    }
}

/// Frame gamma matrices for sign parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRep {
    pub s: i32,
    pub g: [Mat2C; 3],
    pub id: Mat2C,
}

impl GammaRep {
    pub fn sf(&self) -> f64 {
        self.s as f64
    }

    /// γ̂⁰ − γ̂², nilpotent.
    pub fn null_minus(&self) -> Mat2C {
        self.g[0] - self.g[2]
    }

    /// γ̂⁰ + γ̂², nilpotent.
    pub fn null_plus(&self) -> Mat2C {
        self.g[0] + self.g[2]
    }

    /// Debug representation with γ̂² = σ₂, which breaks the η²² = −1 relation.
    pub fn corrupted(s: i32) -> Result<Self> {
        let mut rep = make_gamma_rep(s)?;
        rep.g[2] = Mat2C::sigma2();
        Ok(rep)
    }

    /// Largest entrywise deviation of {γ̂^a, γ̂^b} from 2η^{ab}I.
    pub fn clifford_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let target = if a == b { 2.0 * ETA[a] } else { 0.0 };
                let r = self.g[a].anticommutator(&self.g[b]) - Mat2C::scalar(target.into());
                worst = worst.max(r.max_abs());
            }
        }
        worst
    }
}

/// γ̂⁰ = σ₃, γ̂¹ = i s σ₁, γ̂² = i σ₂.
pub fn make_gamma_rep(s: i32) -> Result<GammaRep> {
    if s != 1 && s != -1 {
        return Err(Error::Domain(format!("sign parameter s must be +1 or -1, got {s}")));
    }
    let sc = C64::new(0.0, s as f64);
    Ok(GammaRep { s, g: [Mat2C::sigma3(), Mat2C::sigma1() * sc, Mat2C::sigma2() * I], id: Mat2C::identity() })
}

/// ε_{ijk} with ε_{012} = 1.
pub fn levi_civita_symbol(i: usize, j: usize, k: usize) -> f64 {
    if i == j || j == k || i == k {
        return 0.0;
    }
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        _ => -1.0,
    }
}

pub type Tensor3 = [[[f64; 3]; 3]; 3];

/// Chart Levi-Civita tensor e_{μνα} = det(e^a_μ) ε_{μνα} with its raised form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeviCivita {
    pub det: f64,
    pub lower: Tensor3,
    pub upper: Tensor3,
}

impl LeviCivita {
    pub fn from_triad(triad: &Mat3, metric_inv: &Mat3) -> Option<Self> {
        let det = linalg::det3(triad);
        if det.abs() < 1e-300 {
            return None;
        }
        let mut lower = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    lower[i][j][k] = det * levi_civita_symbol(i, j, k);
                }
            }
        }
        let upper = raise3(&lower, metric_inv);
        Some(LeviCivita { det, lower, upper })
    }

    /// e^{αβγ} e_{αβγ}, equal to 6 in Lorentzian signature with det η = 1.
    pub fn full_contraction(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    s += self.upper[i][j][k] * self.lower[i][j][k];
                }
            }
        }
        s
    }

    /// e^{αβγ} e_{μβγ} as a 3×3 array indexed [α][μ].
    pub fn partial_contraction(&self) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for a in 0..3 {
            for mu in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        r[a][mu] += self.upper[a][b][c] * self.lower[mu][b][c];
                    }
                }
            }
        }
        r
    }
}

fn raise3(t: &Tensor3, gi: &Mat3) -> Tensor3 {
    let mut r = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            s += gi[a][i] * gi[b][j] * gi[c][k] * t[i][j][k];
                        }
                    }
                }
                r[a][b][c] = s;
            }
        }
    }
    r
}

pub fn levi_civita_tensor(chart: &Chart, u: &[f64; 3]) -> Result<LeviCivita> {
    chart.check(u)?;
    let triad = chart.triad(u);
    let gi = chart.metric_inv(u);
    LeviCivita::from_triad(&triad, &gi).ok_or(Error::SingularFrame(*u))
}

/// Coefficients of M = c I + c_μ γ^μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub scalar: C64,
    pub vector: [C64; 3],
}

impl Expansion {
    pub fn reconstruct(&self, gammas: &[Mat2C; 3]) -> Mat2C {
        let mut m = Mat2C::scalar(self.scalar);
        for (c, g) in self.vector.iter().zip(gammas) {
            m += g.scale(*c);
        }
        m
    }
}

/// Metric read off the gammas, g^{μν} = tr(γ^μ γ^ν)/2, with the largest
/// deviation of the anticommutators from 2g^{μν}I.
pub fn gamma_metric(gammas: &[Mat2C; 3]) -> (Mat3, f64) {
    let mut g = [[0.0; 3]; 3];
    let mut resid: f64 = 0.0;
    for mu in 0..3 {
        for nu in 0..3 {
            let ac = gammas[mu].anticommutator(&gammas[nu]);
            let v = ac.trace() / 4.0;
            g[mu][nu] = v.re;
            resid = resid.max((ac - Mat2C::scalar((2.0 * v.re).into())).max_abs());
        }
    }
    (g, resid)
}

/// Expands M in {I, γ^μ}. c = tr(M)/2 and c_μ = ½ g_{μν} tr(M γ^ν).
pub fn expand_in_basis(m: &Mat2C, gammas: &[Mat2C; 3]) -> Result<Expansion> {
    let (g_up, resid) = gamma_metric(gammas);
    let scale = gammas.iter().map(|g| g.max_abs()).fold(1.0, f64::max);
    if resid > 1e-10 * scale * scale {
        return Err(Error::Inconsistent(resid));
    }
    let g_low = linalg::inv3(&g_up).ok_or(Error::Inconsistent(resid))?;
    let mut vector = [ZERO; 3];
    let traces: Vec<C64> = gammas.iter().map(|g| (*m * *g).trace()).collect();
    for mu in 0..3 {
        for nu in 0..3 {
            vector[mu] += traces[nu] * (0.5 * g_low[mu][nu]);
        }
    }
    Ok(Expansion { scalar: m.trace() / 2.0, vector })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_one_for_positive_s() {
        let rep = make_gamma_rep(1).unwrap();
        assert_eq!(rep.g[1], Mat2C::new(ZERO, I, I, ZERO));
    }

    #[test]
    fn g0_squares_to_identity() {
        for s in [1, -1] {
            let rep = make_gamma_rep(s).unwrap();
            assert!((rep.g[0] * rep.g[0] - Mat2C::identity()).max_abs() == 0.0);
        }
    }

    #[test]
    fn g1_g2_anticommute_for_negative_s() {
        let rep = make_gamma_rep(-1).unwrap();
        assert!(rep.g[1].anticommutator(&rep.g[2]).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_sign() {
        assert!(matches!(make_gamma_rep(0), Err(Error::Domain(_))));
        assert!(make_gamma_rep(2).is_err());
    }

    #[test]
    fn clifford_and_traceless() {
        for s in [1, -1] {
            let rep = make_gamma_rep(s).unwrap();
            assert!(rep.clifford_residual() <= 1e-14);
            for g in &rep.g {
                assert_eq!(g.trace(), ZERO);
            }
        }
    }

    #[test]
    fn corrupted_rep_fails_clifford() {
        let rep = GammaRep::corrupted(1).unwrap();
        assert!((rep.clifford_residual() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn frame_commutators() {
        for s in [1, -1] {
            let rep = make_gamma_rep(s).unwrap();
            let is = C64::new(0.0, s as f64);
            let g = &rep.g;
            assert!((g[0].commutator(&g[1]) - g[2] * (is * 2.0)).max_abs() < 1e-14);
            assert!((g[1].commutator(&g[2]) + g[0] * (is * 2.0)).max_abs() < 1e-14);
            assert!((g[2].commutator(&g[0]) - g[1] * (is * 2.0)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn null_combinations_are_nilpotent() {
        for s in [1, -1] {
            let rep = make_gamma_rep(s).unwrap();
            let n = rep.null_minus();
            let p = rep.null_plus();
            assert_eq!((n * n).max_abs(), 0.0);
            assert_eq!((p * p).max_abs(), 0.0);
            assert!((n.anticommutator(&p) - Mat2C::scalar(4.0.into())).max_abs() < 1e-15);
        }
    }

    #[test]
    fn symbol_antisymmetry() {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let e = levi_civita_symbol(i, j, k);
                    assert_eq!(e, -levi_civita_symbol(j, i, k));
                    assert_eq!(e, -levi_civita_symbol(i, k, j));
                }
            }
        }
        assert_eq!(levi_civita_symbol(0, 1, 2), 1.0);
    }

    #[test]
    fn expand_identity_and_g0() {
        let rep = make_gamma_rep(1).unwrap();
        let e = expand_in_basis(&Mat2C::identity(), &rep.g).unwrap();
        assert_eq!(e.scalar, ONE);
        assert!(e.vector.iter().all(|c| c.norm() < 1e-15));
        let e = expand_in_basis(&rep.g[0], &rep.g).unwrap();
        assert!(e.scalar.norm() < 1e-15);
        assert!((e.vector[0] - ONE).norm() < 1e-15);
        assert!(e.vector[1].norm() < 1e-15 && e.vector[2].norm() < 1e-15);
    }

    #[test]
    fn expand_rejects_degenerate_gammas() {
        let rep = make_gamma_rep(1).unwrap();
        let projector = Mat2C::new(ONE, ZERO, ZERO, ZERO);
        let bad = [rep.g[0], projector, rep.g[2]];
        assert!(matches!(expand_in_basis(&Mat2C::identity(), &bad), Err(Error::Inconsistent(_))));
        let repeated = [rep.g[0], rep.g[0], rep.g[2]];
        assert!(matches!(expand_in_basis(&Mat2C::identity(), &repeated), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn exp_of_sigma3_is_diagonal_phase() {
        let z = C64::new(0.0, -0.7);
        let e = Mat2C::sigma3().exp_scaled(z).unwrap();
        assert!((e.m[0][0] - z.exp()).norm() < 1e-15);
        assert!((e.m[1][1] - (-z).exp()).norm() < 1e-15);
        assert!(e.m[0][1].norm() < 1e-15);
    }
}
