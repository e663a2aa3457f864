//! Charts on flat (2+1) Minkowski spacetime.
//!
//! Every chart stores a closed-form Jacobian J[a][μ] = ∂x^a/∂u^μ, its inverse
//! K[μ][a] = ∂u^μ/∂x^a, the metric, and the Christoffel symbols. The polar
//! chart carries the diagonal triad diag(1, 1, r); every other chart uses the
//! triad induced by the Cartesian frame, e^a_μ = J[a][μ], for which the spinor
//! connection vanishes.

use std::f64::consts::PI;

use crate::clifford::{GammaRep, Mat2C, Spinor, Tensor3, C64, ETA, I};
use crate::error::{Error, Result};
use crate::fd;
use crate::linalg::{self, Mat3, Vec3};

pub const DEFAULT_DELTA: f64 = 1e-6;
pub const MIN_PARABOLIC_A: f64 = 1e-3;

pub type Riemann = [[[[f64; 3]; 3]; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKind {
    Cartesian,
    Polar,
    /// |x⁰| > |x²|
    RindlerT,
    /// |x⁰| < |x²|
    RindlerX,
    NullPlane,
    NullParabolic,
    NullProjective,
}

impl ChartKind {
    pub const ALL: [ChartKind; 7] = [
        ChartKind::Cartesian,
        ChartKind::Polar,
        ChartKind::RindlerT,
        ChartKind::RindlerX,
        ChartKind::NullPlane,
        ChartKind::NullParabolic,
        ChartKind::NullProjective,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ChartKind::Cartesian => "cartesian",
            ChartKind::Polar => "polar",
            ChartKind::RindlerT => "rindler_t",
            ChartKind::RindlerX => "rindler_x",
            ChartKind::NullPlane => "null_plane",
            ChartKind::NullParabolic => "null_parabolic",
            ChartKind::NullProjective => "null_projective",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub kind: ChartKind,
    /// Parameter of the parabolic chart, unused elsewhere.
    pub a: f64,
    /// Branch sign of the Rindler charts, +1 elsewhere.
    pub eps: f64,
    /// Distance kept from r = 0 and u₀ = 0.
    pub delta: f64,
}

impl Chart {
    fn plain(kind: ChartKind) -> Self {
        Chart { kind, a: 0.0, eps: 1.0, delta: DEFAULT_DELTA }
    }

    pub fn cartesian() -> Self {
        Self::plain(ChartKind::Cartesian)
    }

    pub fn polar() -> Self {
        Self::plain(ChartKind::Polar)
    }

    pub fn rindler_t(eps: f64) -> Self {
        Chart { eps: eps.signum(), ..Self::plain(ChartKind::RindlerT) }
    }

    pub fn rindler_x(eps: f64) -> Self {
        Chart { eps: eps.signum(), ..Self::plain(ChartKind::RindlerX) }
    }

    pub fn null_plane() -> Self {
        Self::plain(ChartKind::NullPlane)
    }

    pub fn null_parabolic(a: f64) -> Result<Self> {
        if !a.is_finite() || a.abs() < MIN_PARABOLIC_A {
            return Err(Error::Domain(format!("null_parabolic requires |a| >= {MIN_PARABOLIC_A}, got {a}")));
        }
        Ok(Chart { a, ..Self::plain(ChartKind::NullParabolic) })
    }

    pub fn null_projective() -> Self {
        Self::plain(ChartKind::NullProjective)
    }

    pub fn from_id(id: &str, a: f64) -> Result<Self> {
        match id {
            "cartesian" => Ok(Self::cartesian()),
            "polar" => Ok(Self::polar()),
            "rindler_t" => Ok(Self::rindler_t(1.0)),
            "rindler_x" => Ok(Self::rindler_x(1.0)),
            "null_plane" => Ok(Self::null_plane()),
            "null_parabolic" => Self::null_parabolic(a),
            "null_projective" => Ok(Self::null_projective()),
            _ => Err(Error::Domain(format!("unknown chart id '{id}'"))),
        }
    }

    pub fn id(&self) -> &'static str {
        self.kind.id()
    }

    pub fn contains(&self, u: &Vec3) -> bool {
        if !u.iter().all(|c| c.is_finite()) {
            return false;
        }
        match self.kind {
            ChartKind::Polar => u[1] > self.delta && u[2] > -PI && u[2] <= PI,
            ChartKind::RindlerT | ChartKind::RindlerX => u[0] >= self.delta,
            ChartKind::NullProjective => u[0].abs() >= self.delta,
            _ => true,
        }
    }

    pub fn check(&self, u: &Vec3) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {u:?} outside the {} chart domain", self.id())))
        }
    }

    /// Chart coordinates u(x) of a Cartesian point.
    pub fn to_chart(&self, x: &Vec3) -> Result<Vec3> {
        let [x0, x1, x2] = *x;
        let out = |s: &str| Error::Domain(format!("Cartesian point {x:?} outside the {} chart: {s}", self.id()));
        let u = match self.kind {
            ChartKind::Cartesian => *x,
            ChartKind::Polar => [x0, x1.hypot(x2), x2.atan2(x1)],
            ChartKind::RindlerT => {
                if x0.abs() <= x2.abs() || (x0 + x2).signum() != self.eps {
                    return Err(out("needs |x0| > |x2| on the chart branch"));
                }
                [(x0 * x0 - x2 * x2).sqrt(), x1, (x2 / x0).atanh()]
            }
            ChartKind::RindlerX => {
                if x2.abs() <= x0.abs() || (x0 + x2).signum() != self.eps {
                    return Err(out("needs |x2| > |x0| on the chart branch"));
                }
                [(x2 * x2 - x0 * x0).sqrt(), x1, (x0 / x2).atanh()]
            }
            ChartKind::NullPlane => [x0 - x2, x1, x0 + x2],
            ChartKind::NullParabolic => {
                let a = self.a;
                let v = x0 - x2;
                [v * v / 2.0 - 2.0 * a * x1, x0 + x2 + (v / a) * (v * v / (6.0 * a) - x1), v / (2.0 * a)]
            }
            ChartKind::NullProjective => {
                let v = x0 - x2;
                if v.abs() < self.delta {
                    return Err(out("x0 - x2 vanishes"));
                }
                [v, x0 + x2 - x1 * x1 / v, x1 / v]
            }
        };
        self.check(&u)?;
        Ok(u)
    }

    /// Cartesian point x(u).
    pub fn to_cartesian(&self, u: &Vec3) -> Vec3 {
        let [u0, u1, u2] = *u;
        let e = self.eps;
        match self.kind {
            ChartKind::Cartesian => *u,
            ChartKind::Polar => [u0, u1 * u2.cos(), u1 * u2.sin()],
            ChartKind::RindlerT => [e * u0 * u2.cosh(), u1, e * u0 * u2.sinh()],
            ChartKind::RindlerX => [e * u0 * u2.sinh(), u1, e * u0 * u2.cosh()],
            ChartKind::NullPlane => [(u0 + u2) / 2.0, u1, (u2 - u0) / 2.0],
            ChartKind::NullParabolic => {
                let a = self.a;
                let common = u1 / 2.0 - u0 * u2 / (2.0 * a) + a * u2.powi(3) / 3.0;
                [common + a * u2, a * u2 * u2 - u0 / (2.0 * a), common - a * u2]
            }
            ChartKind::NullProjective => {
                let q = u0 * u2 * u2;
                [(u0 + u1 + q) / 2.0, u0 * u2, (u1 + q - u0) / 2.0]
            }
        }
    }

    /// J[a][μ] = ∂x^a/∂u^μ.
    pub fn jacobian(&self, u: &Vec3) -> Mat3 {
        let [u0, _u1, u2] = *u;
        let e = self.eps;
        match self.kind {
            ChartKind::Cartesian => linalg::identity3(),
            ChartKind::Polar => {
                let (s, c) = u2.sin_cos();
                [[1.0, 0.0, 0.0], [0.0, c, -u[1] * s], [0.0, s, u[1] * c]]
            }
            ChartKind::RindlerT => {
                let (ch, sh) = (u2.cosh(), u2.sinh());
                [[e * ch, 0.0, e * u0 * sh], [0.0, 1.0, 0.0], [e * sh, 0.0, e * u0 * ch]]
            }
            ChartKind::RindlerX => {
                let (ch, sh) = (u2.cosh(), u2.sinh());
                [[e * sh, 0.0, e * u0 * ch], [0.0, 1.0, 0.0], [e * ch, 0.0, e * u0 * sh]]
            }
            ChartKind::NullPlane => [[0.5, 0.0, 0.5], [0.0, 1.0, 0.0], [-0.5, 0.0, 0.5]],
            ChartKind::NullParabolic => {
                let a = self.a;
                let c = -u0 / (2.0 * a) + a * u2 * u2;
                [[-u2 / (2.0 * a), 0.5, c + a], [-1.0 / (2.0 * a), 0.0, 2.0 * a * u2], [-u2 / (2.0 * a), 0.5, c - a]]
            }
            ChartKind::NullProjective => {
                [[(1.0 + u2 * u2) / 2.0, 0.5, u0 * u2], [u2, 0.0, u0], [(u2 * u2 - 1.0) / 2.0, 0.5, u0 * u2]]
            }
        }
    }

    /// K[μ][a] = ∂u^μ/∂x^a, the inverse of the Jacobian.
    pub fn inverse_jacobian(&self, u: &Vec3) -> Mat3 {
        let [u0, _u1, u2] = *u;
        let e = self.eps;
        match self.kind {
            ChartKind::Cartesian => linalg::identity3(),
            ChartKind::Polar => {
                let r = u[1];
                let (s, c) = u2.sin_cos();
                [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s / r, c / r]]
            }
            ChartKind::RindlerT => {
                let (ch, sh) = (u2.cosh(), u2.sinh());
                [[e * ch, 0.0, -e * sh], [0.0, 1.0, 0.0], [-e * sh / u0, 0.0, e * ch / u0]]
            }
            ChartKind::RindlerX => {
                let (ch, sh) = (u2.cosh(), u2.sinh());
                [[-e * sh, 0.0, e * ch], [0.0, 1.0, 0.0], [e * ch / u0, 0.0, -e * sh / u0]]
            }
            ChartKind::NullPlane => [[1.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]],
            ChartKind::NullParabolic => {
                let a = self.a;
                let w = u0 / (2.0 * a * a);
                [
                    [2.0 * a * u2, -2.0 * a, -2.0 * a * u2],
                    [1.0 + u2 * u2 + w, -2.0 * u2, 1.0 - u2 * u2 - w],
                    [1.0 / (2.0 * a), 0.0, -1.0 / (2.0 * a)],
                ]
            }
            ChartKind::NullProjective => {
                [[1.0, 0.0, -1.0], [1.0 + u2 * u2, -2.0 * u2, 1.0 - u2 * u2], [-u2 / u0, 1.0 / u0, u2 / u0]]
            }
        }
    }

    /// Closed-form g_{μν}(u).
    pub fn metric(&self, u: &Vec3) -> Mat3 {
        let u0 = u[0];
        match self.kind {
            ChartKind::Cartesian => linalg::diag3(ETA),
            ChartKind::Polar => linalg::diag3([1.0, -1.0, -u[1] * u[1]]),
            ChartKind::RindlerT => linalg::diag3([1.0, -1.0, -u0 * u0]),
            ChartKind::RindlerX => linalg::diag3([-1.0, -1.0, u0 * u0]),
            ChartKind::NullPlane => [[0.0, 0.0, 0.5], [0.0, -1.0, 0.0], [0.5, 0.0, 0.0]],
            ChartKind::NullParabolic => {
                let a = self.a;
                [[-1.0 / (4.0 * a * a), 0.0, 0.0], [0.0, 0.0, a], [0.0, a, -2.0 * u0]]
            }
            ChartKind::NullProjective => [[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, -u0 * u0]],
        }
    }

    /// Closed-form g^{μν}(u).
    pub fn metric_inv(&self, u: &Vec3) -> Mat3 {
        let u0 = u[0];
        match self.kind {
            ChartKind::Cartesian => linalg::diag3(ETA),
            ChartKind::Polar => linalg::diag3([1.0, -1.0, -1.0 / (u[1] * u[1])]),
            ChartKind::RindlerT => linalg::diag3([1.0, -1.0, -1.0 / (u0 * u0)]),
            ChartKind::RindlerX => linalg::diag3([-1.0, -1.0, 1.0 / (u0 * u0)]),
            ChartKind::NullPlane => [[0.0, 0.0, 2.0], [0.0, -1.0, 0.0], [2.0, 0.0, 0.0]],
            ChartKind::NullParabolic => {
                let a = self.a;
                [[-4.0 * a * a, 0.0, 0.0], [0.0, 2.0 * u0 / (a * a), 1.0 / a], [0.0, 1.0 / a, 0.0]]
            }
            ChartKind::NullProjective => [[0.0, 2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, -1.0 / (u0 * u0)]],
        }
    }

    /// Triad e^a_μ, indexed [a][μ].
    pub fn triad(&self, u: &Vec3) -> Mat3 {
        match self.kind {
            ChartKind::Polar => linalg::diag3([1.0, 1.0, u[1]]),
            _ => self.jacobian(u),
        }
    }

    /// Inverse triad e^μ_a, indexed [μ][a].
    pub fn triad_inv(&self, u: &Vec3) -> Mat3 {
        match self.kind {
            ChartKind::Polar => linalg::diag3([1.0, 1.0, 1.0 / u[1]]),
            _ => self.inverse_jacobian(u),
        }
    }

    /// Local Lorentz rotation Ŝ relating the chart frame to the Cartesian
    /// frame, φ_C = Ŝ ψ. Only the polar triad differs from the Cartesian one.
    pub fn frame_rotation(&self, rep: &GammaRep, u: &Vec3) -> Mat2C {
        match self.kind {
            ChartKind::Polar => {
                let z = C64::new(0.0, -rep.sf() * u[2] / 2.0);
                Mat2C::new(z.exp(), 0.0.into(), 0.0.into(), (-z).exp())
            }
            _ => Mat2C::identity(),
        }
    }

    /// Closed-form Γ^μ_{να}, indexed [μ][ν][α].
    pub fn christoffel(&self, u: &Vec3) -> Tensor3 {
        let mut g = [[[0.0; 3]; 3]; 3];
        let u0 = u[0];
        match self.kind {
            ChartKind::Cartesian | ChartKind::NullPlane => {}
            ChartKind::Polar => {
                let r = u[1];
                g[1][2][2] = -r;
                g[2][1][2] = 1.0 / r;
                g[2][2][1] = 1.0 / r;
            }
            ChartKind::RindlerT | ChartKind::RindlerX => {
                g[0][2][2] = u0;
                g[2][0][2] = 1.0 / u0;
                g[2][2][0] = 1.0 / u0;
            }
            ChartKind::NullParabolic => {
                let a = self.a;
                g[0][2][2] = -4.0 * a * a;
                g[1][0][2] = -1.0 / a;
                g[1][2][0] = -1.0 / a;
            }
            ChartKind::NullProjective => {
                g[1][2][2] = 2.0 * u0;
                g[2][0][2] = 1.0 / u0;
                g[2][2][0] = 1.0 / u0;
            }
        }
        g
    }

    /// Christoffel symbols from central differences of the metric.
    pub fn christoffel_fd(&self, u: &Vec3, h: f64) -> Tensor3 {
        let dg: [Mat3; 3] = [0, 1, 2].map(|k| {
            let plus = self.metric(&fd::shifted(u, k, h));
            let minus = self.metric(&fd::shifted(u, k, -h));
            let mut d = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    d[i][j] = (plus[i][j] - minus[i][j]) / (2.0 * h);
                }
            }
            d
        });
        let gi = self.metric_inv(u);
        let mut out = [[[0.0; 3]; 3]; 3];
        for mu in 0..3 {
            for nu in 0..3 {
                for al in 0..3 {
                    let mut s = 0.0;
                    for b in 0..3 {
                        s += gi[mu][b] * (dg[nu][b][al] + dg[al][b][nu] - dg[b][nu][al]);
                    }
                    out[mu][nu][al] = 0.5 * s;
                }
            }
        }
        out
    }

    fn margin_check(&self, u: &Vec3, m: f64) -> Result<()> {
        for k in 0..3 {
            for d in [-m, m] {
                if !self.contains(&fd::shifted(u, k, d)) {
                    return Err(Error::Domain(format!(
                        "step {m} too large: stencil around {u:?} leaves the {} chart",
                        self.id()
                    )));
                }
            }
        }
        Ok(())
    }

    /// R^σ_{αμν} = ∂_μΓ^σ_{να} − ∂_νΓ^σ_{μα} + Γ^σ_{μλ}Γ^λ_{να} − Γ^σ_{νλ}Γ^λ_{μα},
    /// with the derivatives of the closed-form Christoffels taken by central
    /// differences.
    pub fn riemann_fd(&self, u: &Vec3, h: f64) -> Result<Riemann> {
        self.margin_check(u, 2.0 * h)?;
        let gam = self.christoffel(u);
        let dgam: [Tensor3; 3] = [0, 1, 2].map(|k| {
            let p = self.christoffel(&fd::shifted(u, k, h));
            let m = self.christoffel(&fd::shifted(u, k, -h));
            let mut d = [[[0.0; 3]; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        d[i][j][l] = (p[i][j][l] - m[i][j][l]) / (2.0 * h);
                    }
                }
            }
            d
        });
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for s in 0..3 {
            for a in 0..3 {
                for mu in 0..3 {
                    for nu in 0..3 {
                        let mut v = dgam[mu][s][nu][a] - dgam[nu][s][mu][a];
                        for l in 0..3 {
                            v += gam[s][mu][l] * gam[l][nu][a] - gam[s][nu][l] * gam[l][mu][a];
                        }
                        r[s][a][mu][nu] = v;
                    }
                }
            }
        }
        Ok(r)
    }

    /// Largest |g_{αβ;μ}| with the metric derivative taken by central differences.
    pub fn metric_compatibility(&self, u: &Vec3, h: f64) -> f64 {
        let g = self.metric(u);
        let gam = self.christoffel(u);
        let mut worst: f64 = 0.0;
        for mu in 0..3 {
            let p = self.metric(&fd::shifted(u, mu, h));
            let m = self.metric(&fd::shifted(u, mu, -h));
            for a in 0..3 {
                for b in 0..3 {
                    let mut v = (p[a][b] - m[a][b]) / (2.0 * h);
                    for l in 0..3 {
                        v -= gam[l][mu][a] * g[l][b] + gam[l][mu][b] * g[a][l];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    /// Curved gamma matrices γ^μ(u) = e^μ_a γ̂^a without a domain check.
    pub fn gammas_at(&self, rep: &GammaRep, u: &Vec3) -> [Mat2C; 3] {
        let e = self.triad_inv(u);
        [0, 1, 2].map(|mu| {
            let mut m = Mat2C::zero();
            for a in 0..3 {
                m += rep.g[a] * e[mu][a];
            }
            m
        })
    }

    /// γ^α_{;ν} = ∂_ν γ^α + Γ^α_{νβ} γ^β, indexed [ν][α]. `fourth_order`
    /// selects the five-point stencil.
    pub fn gamma_covariant_derivative(&self, rep: &GammaRep, u: &Vec3, h: f64, fourth_order: bool) -> [[Mat2C; 3]; 3] {
        let gam = self.christoffel(u);
        let gs = self.gammas_at(rep, u);
        [0, 1, 2].map(|nu| {
            [0, 1, 2].map(|al| {
                let f = |p: &Vec3| self.gammas_at(rep, p)[al];
                let mut d = if fourth_order { fd::partial4(f, u, nu, h) } else { fd::partial(f, u, nu, h) };
                for b in 0..3 {
                    d += gs[b] * gam[al][nu][b];
                }
                d
            })
        })
    }

    fn lowered_gammas(&self, rep: &GammaRep, u: &Vec3) -> [Mat2C; 3] {
        let gs = self.gammas_at(rep, u);
        let g = self.metric(u);
        [0, 1, 2].map(|a| {
            let mut m = Mat2C::zero();
            for b in 0..3 {
                m += gs[b] * g[a][b];
            }
            m
        })
    }

    /// Γ_ν = −¼ γ^α_{;ν} γ_α, using fourth-order differences with step `h`.
    pub fn spinor_connection_with_step(&self, rep: &GammaRep, u: &Vec3, h: f64) -> Result<[Mat2C; 3]> {
        self.check(u)?;
        let cov = self.gamma_covariant_derivative(rep, u, h, true);
        let low = self.lowered_gammas(rep, u);
        let mut out = [Mat2C::zero(); 3];
        for nu in 0..3 {
            let mut m = Mat2C::zero();
            for a in 0..3 {
                m += cov[nu][a] * low[a];
            }
            out[nu] = m * (-0.25);
        }
        Ok(out)
    }

    /// Largest entry of γ^μ_{;α} + [Γ_α, γ^μ], derivative by a plain central
    /// difference with step `h`.
    pub fn connection_compatibility(&self, rep: &GammaRep, u: &Vec3, h: f64) -> Result<f64> {
        let conn = spinor_connection(self, u, rep)?;
        let cov = self.gamma_covariant_derivative(rep, u, h, false);
        let gs = self.gammas_at(rep, u);
        let mut worst: f64 = 0.0;
        for al in 0..3 {
            for mu in 0..3 {
                worst = worst.max((cov[al][mu] + conn[al].commutator(&gs[mu])).max_abs());
            }
        }
        Ok(worst)
    }

    /// A box inside the domain, used for sampling in checks.
    pub fn safe_box(&self) -> [[f64; 2]; 3] {
        match self.kind {
            ChartKind::Polar => [[-1.0, 1.0], [0.8, 3.0], [-3.0, 3.0]],
            ChartKind::RindlerT | ChartKind::RindlerX => [[0.8, 3.0], [-1.0, 1.0], [-1.0, 1.0]],
            ChartKind::NullProjective => [[0.8, 2.5], [-1.0, 1.0], [-1.0, 1.0]],
            _ => [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
        }
    }
}

/// Curved gamma matrices γ^μ(u) = e^μ_a(u) γ̂^a.
pub fn curved_gamma(rep: &GammaRep, chart: &Chart, u: &Vec3) -> Result<[Mat2C; 3]> {
    chart.check(u)?;
    Ok(chart.gammas_at(rep, u))
}

pub fn christoffel(chart: &Chart, u: &Vec3) -> Result<Tensor3> {
    chart.check(u)?;
    Ok(chart.christoffel(u))
}

pub fn riemann_fd(chart: &Chart, u: &Vec3, h: f64) -> Result<Riemann> {
    chart.check(u)?;
    chart.riemann_fd(u, h)
}

pub fn max_abs_riemann(r: &Riemann) -> f64 {
    r.iter().flatten().flatten().flatten().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Spinor connection with the default step 1e-3 of the fourth-order stencil.
pub fn spinor_connection(chart: &Chart, u: &Vec3, rep: &GammaRep) -> Result<[Mat2C; 3]> {
    chart.spinor_connection_with_step(rep, u, 1e-3)
}

/// (𝒫_ν ψ)(u) = i(∂_ν ψ + Γ_ν ψ) − A_ν ψ with central differences.
/// `potential` returns the chart components A_ν(u).
pub fn momentum_apply(
    chart: &Chart,
    rep: &GammaRep,
    potential: &dyn Fn(&Vec3) -> Vec3,
    psi: &dyn Fn(&Vec3) -> Spinor,
    u: &Vec3,
    h: f64,
) -> Result<[Spinor; 3]> {
    chart.check(u)?;
    chart.margin_check(u, h)?;
    let conn = spinor_connection(chart, u, rep)?;
    let a = potential(u);
    let p = psi(u);
    Ok([0, 1, 2].map(|nu| {
        let d = fd::partial(|x| psi(x), u, nu, h);
        (d + conn[nu] * p) * I - p * a[nu]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::make_gamma_rep;

    fn charts() -> Vec<Chart> {
        vec![
            Chart::cartesian(),
            Chart::polar(),
            Chart::rindler_t(1.0),
            Chart::rindler_t(-1.0),
            Chart::rindler_x(1.0),
            Chart::rindler_x(-1.0),
            Chart::null_plane(),
            Chart::null_parabolic(0.7).unwrap(),
            Chart::null_projective(),
        ]
    }

    #[test]
    fn polar_christoffel_values() {
        let g = christoffel(&Chart::polar(), &[0.0, 1.5, 0.2]).unwrap();
        assert_eq!(g[1][2][2], -1.5);
        assert_eq!(g[2][1][2], 1.0 / 1.5);
    }

    #[test]
    fn cartesian_christoffel_zero() {
        let g = christoffel(&Chart::cartesian(), &[0.3, 0.1, 0.2]).unwrap();
        assert!(g.iter().flatten().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn parabolic_christoffel_values() {
        let c = Chart::null_parabolic(0.7).unwrap();
        let g = christoffel(&c, &[0.4, 0.0, 0.1]).unwrap();
        assert!((g[0][2][2] + 1.96).abs() < 1e-15);
        assert!((g[1][2][0] + 1.0 / 0.7).abs() < 1e-15);
    }

    #[test]
    fn christoffel_matches_metric_derivatives() {
        for c in charts() {
            let u = [0.9, 0.8, 0.3];
            let a = c.christoffel(&u);
            let b = c.christoffel_fd(&u, 1e-4);
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert!((a[i][j][k] - b[i][j][k]).abs() < 1e-6, "{}", c.id());
                        assert_eq!(a[i][j][k], a[i][k][j]);
                    }
                }
            }
        }
    }

    #[test]
    fn flatness_examples() {
        let r = riemann_fd(&Chart::polar(), &[0.0, 2.0, 0.3], 1e-3).unwrap();
        assert!(max_abs_riemann(&r) < 1e-5);
        let r = riemann_fd(&Chart::rindler_t(1.0), &[1.2, 0.0, 0.1], 1e-3).unwrap();
        assert!(max_abs_riemann(&r) < 1e-5);
        let r = riemann_fd(&Chart::null_projective(), &[0.8, 0.2, 0.3], 1e-3).unwrap();
        assert!(max_abs_riemann(&r) < 1e-5);
    }

    #[test]
    fn riemann_rejects_large_step() {
        let err = riemann_fd(&Chart::polar(), &[0.0, 0.01, 0.0], 0.1);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn jacobian_inverse_pairs() {
        for c in charts() {
            let u = [1.1, -0.4, 0.6];
            let p = linalg::matmul(&c.jacobian(&u), &c.inverse_jacobian(&u));
            assert!(linalg::max_abs_diff(&p, &linalg::identity3()) < 1e-13, "{}", c.id());
            let q = linalg::matmul(&c.metric(&u), &c.metric_inv(&u));
            assert!(linalg::max_abs_diff(&q, &linalg::identity3()) < 1e-13, "{}", c.id());
        }
    }

    #[test]
    fn cartesian_gammas_are_frame_gammas() {
        let rep = make_gamma_rep(1).unwrap();
        let g = curved_gamma(&rep, &Chart::cartesian(), &[0.2, 0.3, 0.4]).unwrap();
        assert_eq!(g, rep.g);
    }

    #[test]
    fn polar_gamma_two_scales_with_radius() {
        for s in [1, -1] {
            let rep = make_gamma_rep(s).unwrap();
            let g = curved_gamma(&rep, &Chart::polar(), &[0.0, 2.0, 0.7]).unwrap();
            assert!((g[2] - rep.g[2] * 0.5).max_abs() < 1e-15);
        }
    }

    #[test]
    fn polar_domain_error() {
        let rep = make_gamma_rep(1).unwrap();
        assert!(matches!(curved_gamma(&rep, &Chart::polar(), &[0.0, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(curved_gamma(&rep, &Chart::polar(), &[0.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn polar_connection() {
        for s in [1, -1] {
            let rep = make_gamma_rep(s).unwrap();
            let c = spinor_connection(&Chart::polar(), &[0.0, 1.7, 0.4], &rep).unwrap();
            assert!(c[0].max_abs() < 1e-10 && c[1].max_abs() < 1e-10);
            let expect = Mat2C::sigma3() * C64::new(0.0, -0.5 * s as f64);
            assert!((c[2] - expect).max_abs() < 1e-10);
        }
    }

    #[test]
    fn flat_frames_have_no_connection() {
        let rep = make_gamma_rep(1).unwrap();
        for c in [Chart::cartesian(), Chart::null_plane()] {
            let conn = spinor_connection(&c, &[0.3, 0.2, 0.1], &rep).unwrap();
            assert!(conn.iter().all(|m| m.max_abs() < 1e-12));
        }
    }

    #[test]
    fn parabolic_rejects_small_a() {
        assert!(Chart::null_parabolic(0.0).is_err());
        assert!(Chart::null_parabolic(1e-4).is_err());
        assert!(Chart::null_parabolic(-0.5).is_ok());
    }

    #[test]
    fn momentum_of_constant_spinor_vanishes() {
        let rep = make_gamma_rep(1).unwrap();
        let c = Chart::cartesian();
        let psi = |_: &Vec3| Spinor::new(C64::new(1.0, 2.0), C64::new(-0.5, 0.0));
        let zero = |_: &Vec3| [0.0; 3];
        let p = momentum_apply(&c, &rep, &zero, &psi, &[0.1, 0.2, 0.3], 1e-4).unwrap();
        assert!(p.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn momentum_of_plane_wave() {
        let rep = make_gamma_rep(-1).unwrap();
        let c = Chart::cartesian();
        let lam = 1.3;
        let psi = |x: &Vec3| {
            Spinor::new(C64::new(0.0, -lam * x[0]).exp(), C64::new(0.5, 0.0) * C64::new(0.0, -lam * x[0]).exp())
        };
        let zero = |_: &Vec3| [0.0; 3];
        let x = [0.4, 0.1, -0.2];
        let p = momentum_apply(&c, &rep, &zero, &psi, &x, 1e-4).unwrap();
        assert!((p[0] - psi(&x) * lam).norm() < 1e-7);
    }

    #[test]
    fn to_chart_rejects_wrong_rindler_branch() {
        assert!(Chart::rindler_t(1.0).to_chart(&[-2.0, 0.0, 0.5]).is_err());
        assert!(Chart::rindler_t(-1.0).to_chart(&[-2.0, 0.0, 0.5]).is_ok());
        assert!(Chart::rindler_x(1.0).to_chart(&[0.5, 0.0, 2.0]).is_ok());
        assert!(Chart::rindler_x(1.0).to_chart(&[2.0, 0.0, 0.5]).is_err());
    }
}
