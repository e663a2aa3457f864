//! The seven complete sets of commuting symmetry operators as data: charts,
//! admissible potentials, spin factors and the separable ansatz.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::clifford::{GammaRep, Mat2C, Spinor, C64};
use crate::error::{Error, Result};
use crate::geometry::Chart;
use crate::linalg::{Mat3, Vec3};
use crate::sampling;
use crate::symmetry::KillingField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetId {
    S1,
    S2,
    S3,
    S4a,
    S4b,
    S5,
    S6,
    S7,
}

impl SetId {
    pub const ALL: [SetId; 8] =
        [SetId::S1, SetId::S2, SetId::S3, SetId::S4a, SetId::S4b, SetId::S5, SetId::S6, SetId::S7];

    pub fn label(&self) -> &'static str {
        match self {
            SetId::S1 => "1",
            SetId::S2 => "2",
            SetId::S3 => "3",
            SetId::S4a => "4a",
            SetId::S4b => "4b",
            SetId::S5 => "5",
            SetId::S6 => "6",
            SetId::S7 => "7",
        }
    }

    /// Number of the set in the classification (4a and 4b are both set 4).
    pub fn number(&self) -> u8 {
        match self {
            SetId::S1 => 1,
            SetId::S2 => 2,
            SetId::S3 => 3,
            SetId::S4a | SetId::S4b => 4,
            SetId::S5 => 5,
            SetId::S6 => 6,
            SetId::S7 => 7,
        }
    }

    pub fn parse(s: &str) -> Result<SetId> {
        match s.trim() {
            "1" => Ok(SetId::S1),
            "2" => Ok(SetId::S2),
            "3" => Ok(SetId::S3),
            "4" | "4a" => Ok(SetId::S4a),
            "4b" => Ok(SetId::S4b),
            "5" => Ok(SetId::S5),
            "6" => Ok(SetId::S6),
            "7" => Ok(SetId::S7),
            other => Err(Error::Config(format!("unknown set id '{other}' (expected 1..7, 4a or 4b)"))),
        }
    }

    /// Whether the reduced variable stays away from zero, so that inverse
    /// powers in the potential profiles are harmless.
    pub fn allows_inverse_powers(&self) -> bool {
        matches!(self, SetId::S3 | SetId::S4a | SetId::S4b | SetId::S7)
    }
}

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompleteSet {
    pub id: SetId,
    pub chart: Chart,
    pub a: Option<f64>,
    pub generators: [&'static str; 2],
    /// Chart indices straightened by the two Killing fields.
    pub ignorable: [usize; 2],
    pub reduced: usize,
    pub killing: [KillingField; 2],
}

pub const DEFAULT_A: f64 = 1.0;

pub fn get_set(id: SetId, a: Option<f64>) -> Result<CompleteSet> {
    let t = |i| KillingField::translation(i);
    let half_null = KillingField::new_unchecked([[0.0; 3]; 3], [0.5, 0.0, 0.5]);
    let set = |chart, generators, ignorable: [usize; 2], reduced, killing| CompleteSet {
        id,
        chart,
        a: None,
        generators,
        ignorable,
        reduced,
        killing,
    };
    Ok(match id {
        SetId::S1 => set(Chart::cartesian(), ["p0", "p1"], [0, 1], 2, [t(0), t(1)]),
        SetId::S2 => set(Chart::cartesian(), ["p1", "p2"], [1, 2], 0, [t(1), t(2)]),
        SetId::S3 => set(Chart::polar(), ["p0", "l21"], [0, 2], 1, [t(0), KillingField::rotation_21()]),
        SetId::S4a => set(Chart::rindler_t(1.0), ["p1", "l02"], [1, 2], 0, [t(1), KillingField::boost_02()]),
        SetId::S4b => set(Chart::rindler_x(1.0), ["p1", "l02"], [1, 2], 0, [t(1), KillingField::boost_02()]),
        SetId::S5 => set(Chart::null_plane(), ["p1", "(p0+p2)/2"], [1, 2], 0, [t(1), half_null]),
        SetId::S6 => {
            let a = a.ok_or_else(|| Error::Config("set 6 requires the parameter a (a != 0)".into()))?;
            let chart = Chart::null_parabolic(a)?;
            let mut s =
                set(chart, ["(p0+p2)/2", "l21+l01+a(p0-p2)"], [1, 2], 0, [half_null, KillingField::parabolic(a)]);
            s.a = Some(a);
            s
        }
        SetId::S7 => set(
            Chart::null_projective(),
            ["(p0+p2)/2", "l21+l01"],
            [1, 2],
            0,
            [half_null, KillingField::parabolic(0.0)],
        ),
    })
}

/// All chart variants of a classified set; set 4 has two domains.
pub fn set_variants(number: u8, a: Option<f64>) -> Result<Vec<CompleteSet>> {
    let ids: &[SetId] = match number {
        1 => &[SetId::S1],
        2 => &[SetId::S2],
        3 => &[SetId::S3],
        4 => &[SetId::S4a, SetId::S4b],
        5 => &[SetId::S5],
        6 => &[SetId::S6],
        7 => &[SetId::S7],
        n => return Err(Error::Config(format!("set number must be 1..7, got {n}"))),
    };
    ids.iter().map(|id| get_set(*id, a)).collect()
}

impl CompleteSet {
    pub fn reduced_name(&self) -> &'static str {
        match (self.id, self.reduced) {
            (SetId::S3, _) => "r",
            (_, 0) => "u0",
            (SetId::S1, 2) => "x2",
            _ => "u",
        }
    }

    /// Box in chart coordinates used for grids and sampling.
    pub fn default_region(&self) -> [[f64; 2]; 3] {
        match self.id {
            SetId::S1 | SetId::S2 => [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
            SetId::S3 => [[-1.0, 1.0], [1.0, 3.0], [-1.5, 1.5]],
            SetId::S4a | SetId::S4b => [[1.0, 3.0], [-1.0, 1.0], [-0.8, 0.8]],
            SetId::S5 | SetId::S6 | SetId::S7 => [[0.5, 2.0], [-1.0, 1.0], [-1.0, 1.0]],
        }
    }

    /// Straightening check: the largest deviation of the chart components of
    /// each Killing field from the unit vector of its ignorable coordinate.
    pub fn straightening_error(&self, u: &Vec3) -> f64 {
        let x = self.chart.to_cartesian(u);
        let k = self.chart.inverse_jacobian(u);
        let mut worst: f64 = 0.0;
        for (field, &idx) in self.killing.iter().zip(&self.ignorable) {
            let xi = field.eval(&x);
            for mu in 0..3 {
                let comp: f64 = (0..3).map(|a| k[mu][a] * xi[a]).sum();
                let target = if mu == idx { 1.0 } else { 0.0 };
                worst = worst.max((comp - target).abs());
            }
        }
        worst
    }
}

/// Sum of c·t^p terms with integer powers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    pub terms: Vec<(i32, f64)>,
}

impl Profile {
    pub fn new(terms: Vec<(i32, f64)>) -> Self {
        Profile { terms }
    }

    pub fn zero() -> Self {
        Profile::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == 0.0)
    }

    pub fn has_inverse_powers(&self) -> bool {
        self.terms.iter().any(|(p, c)| *p < 0 && *c != 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|(p, c)| c * t.powi(*p)).sum()
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.terms.iter().filter(|(p, _)| *p != 0).map(|(p, c)| c * (*p as f64) * t.powi(p - 1)).sum()
    }

    /// Parses "p:c, p:c"; an empty string is the zero profile.
    pub fn parse(s: &str) -> Result<Profile> {
        let mut terms = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (p, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("profile term '{item}' is not power:coeff")))?;
            let p: i32 = p.trim().parse().map_err(|_| Error::Config(format!("bad power in '{item}'")))?;
            let c: f64 = c.trim().parse().map_err(|_| Error::Config(format!("bad coefficient in '{item}'")))?;
            terms.push((p, c));
        }
        Ok(Profile { terms })
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{p}:{c}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Electromagnetic potential admissible for one complete set: chart components
/// depend only on the reduced variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub set: CompleteSet,
    pub profiles: [Profile; 3],
}

pub fn make_potential(set: &CompleteSet, profiles: [Profile; 3]) -> Result<PotentialField> {
    if !set.id.allows_inverse_powers() && profiles.iter().any(Profile::has_inverse_powers) {
        return Err(Error::InadmissiblePotential(format!(
            "inverse powers of {} are singular inside the domain of set {}",
            set.reduced_name(),
            set.id
        )));
    }
    let pot = PotentialField { set: set.clone(), profiles };
    for u in sampling::halton_box(&set.default_region(), 50) {
        let x = set.chart.to_cartesian(&u);
        let a = pot.cartesian(&x)?;
        let b = pot.cartesian_formula(&x)?;
        let scale = 1.0 + a.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..3 {
            if (a[i] - b[i]).abs() > 1e-10 * scale {
                return Err(Error::InadmissiblePotential(format!(
                    "Cartesian components disagree at x = {x:?}: {a:?} vs {b:?}"
                )));
            }
        }
    }
    Ok(pot)
}

impl PotentialField {
    pub fn zero(set: &CompleteSet) -> PotentialField {
        PotentialField { set: set.clone(), profiles: [Profile::zero(), Profile::zero(), Profile::zero()] }
    }

    pub fn is_zero(&self) -> bool {
        self.profiles.iter().all(Profile::is_zero)
    }

    /// A_ν as functions of the reduced variable.
    pub fn components_at(&self, t: f64) -> Vec3 {
        [0, 1, 2].map(|i| self.profiles[i].eval(t))
    }

    pub fn derivatives_at(&self, t: f64) -> Vec3 {
        [0, 1, 2].map(|i| self.profiles[i].deriv(t))
    }

    /// Chart components A_ν(u).
    pub fn chart_components(&self, u: &Vec3) -> Vec3 {
        self.components_at(u[self.set.reduced])
    }

    /// Cartesian components by tensor transformation, A_(C)a = K[ν][a] A_ν.
    pub fn cartesian(&self, x: &Vec3) -> Result<Vec3> {
        let u = self.set.chart.to_chart(x)?;
        let k = self.set.chart.inverse_jacobian(&u);
        let a = self.chart_components(&u);
        Ok([0, 1, 2].map(|c| (0..3).map(|nu| k[nu][c] * a[nu]).sum()))
    }

    /// Cartesian components from explicit formulas in x for each set.
    pub fn cartesian_formula(&self, x: &Vec3) -> Result<Vec3> {
        let [x0, x1, x2] = *x;
        let u = self.set.chart.to_chart(x)?;
        let [a0, a1, a2] = self.chart_components(&u);
        Ok(match self.set.id {
            SetId::S1 | SetId::S2 => [a0, a1, a2],
            SetId::S3 => {
                let r = x1.hypot(x2);
                [a0, x1 / r * a1 - x2 / (r * r) * a2, x2 / r * a1 + x1 / (r * r) * a2]
            }
            SetId::S4a => {
                let u0 = (x0 * x0 - x2 * x2).sqrt();
                [x0 / u0 * a0 - x2 / (u0 * u0) * a2, a1, -x2 / u0 * a0 + x0 / (u0 * u0) * a2]
            }
            SetId::S4b => {
                let u0 = (x2 * x2 - x0 * x0).sqrt();
                [-x0 / u0 * a0 + x2 / (u0 * u0) * a2, a1, x2 / u0 * a0 - x0 / (u0 * u0) * a2]
            }
            SetId::S5 => [a0 + a2, a1, -a0 + a2],
            SetId::S6 => {
                let a = self.set.chart.a;
                let v = x0 - x2;
                let w = v * v / (2.0 * a * a) - x1 / a;
                [
                    v * a0 + (1.0 + w) * a1 + a2 / (2.0 * a),
                    -2.0 * a * a0 - v / a * a1,
                    -v * a0 + (1.0 - w) * a1 - a2 / (2.0 * a),
                ]
            }
            SetId::S7 => {
                let v = x0 - x2;
                let q = x1 * x1 / (v * v);
                [
                    a0 + (1.0 + q) * a1 - x1 / (v * v) * a2,
                    -2.0 * x1 / v * a1 + a2 / v,
                    -a0 + (1.0 - q) * a1 + x1 / (v * v) * a2,
                ]
            }
        })
    }

    /// F_{μν} = ∂_μ A_ν − ∂_ν A_μ in Cartesian coordinates by central differences.
    pub fn field_strength(&self, x: &Vec3, h: f64) -> Result<Mat3> {
        let d: [Vec3; 3] = [
            crate::fd::try_partial(|p| self.cartesian(p).map(V3), x, 0, h)?.0,
            crate::fd::try_partial(|p| self.cartesian(p).map(V3), x, 1, h)?.0,
            crate::fd::try_partial(|p| self.cartesian(p).map(V3), x, 2, h)?.0,
        ];
        let mut f = [[0.0; 3]; 3];
        for mu in 0..3 {
            for nu in 0..3 {
                f[mu][nu] = d[mu][nu] - d[nu][mu];
            }
        }
        Ok(f)
    }
}

/// Vec3 wrapper with the arithmetic needed for finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V3(pub Vec3);

impl std::ops::Add for V3 {
    type Output = V3;
    fn add(self, o: V3) -> V3 {
        V3([0, 1, 2].map(|i| self.0[i] + o.0[i]))
    }
}

impl std::ops::Sub for V3 {
    type Output = V3;
    fn sub(self, o: V3) -> V3 {
        V3([0, 1, 2].map(|i| self.0[i] - o.0[i]))
    }
}

impl std::ops::Mul<f64> for V3 {
    type Output = V3;
    fn mul(self, c: f64) -> V3 {
        V3(self.0.map(|v| v * c))
    }
}

/// Random admissible profiles: up to three terms per component with powers
/// in 0..=2, plus 1/t terms where the set allows them.
pub fn random_profiles<R: Rng>(set: &CompleteSet, rng: &mut R) -> [Profile; 3] {
    let lo = if set.id.allows_inverse_powers() { -1 } else { 0 };
    [0, 1, 2].map(|_| {
        let n = rng.gen_range(1..=3);
        Profile::new((0..n).map(|_| (rng.gen_range(lo..=2), rng.gen_range(-0.5..0.5))).collect())
    })
}

pub fn random_potential<R: Rng>(set: &CompleteSet, rng: &mut R) -> Result<PotentialField> {
    make_potential(set, random_profiles(set, rng))
}

/// Matrix phase exp(−i c M u₂) carried by the ansatz of sets 4, 6 and 7.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixPhase {
    pub generator: Mat2C,
    pub coeff: f64,
}

impl MatrixPhase {
    pub fn at(&self, u2: f64) -> Mat2C {
        self.generator
            .exp_scaled(C64::new(0.0, -self.coeff * u2))
            .expect("phase generators square to a multiple of the identity")
    }
}

pub fn matrix_phase(set: &CompleteSet, rep: &GammaRep) -> Option<MatrixPhase> {
    let coeff = rep.sf() / 2.0;
    match set.id {
        SetId::S4a | SetId::S4b => Some(MatrixPhase { generator: rep.g[1], coeff }),
        SetId::S6 | SetId::S7 => Some(MatrixPhase { generator: rep.null_minus(), coeff }),
        _ => None,
    }
}

/// Ŝ with φ_C = Ŝ ψ.
pub fn spin_factor(set: &CompleteSet, u: &Vec3, rep: &GammaRep) -> Mat2C {
    set.chart.frame_rotation(rep, u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub set: SetId,
    pub lambda: [f64; 2],
    pub m: Option<f64>,
    pub s: i32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    Cartesian,
    Chart(Chart),
}

type FieldFn = dyn Fn(&Vec3) -> Result<Spinor> + Send + Sync;

/// Complex two-component field, evaluated in Cartesian or chart coordinates.
#[derive(Clone)]
pub struct SpinorField {
    pub provenance: Provenance,
    pub frame: Frame,
    f: Arc<FieldFn>,
}

impl SpinorField {
    pub fn new(provenance: Provenance, frame: Frame, f: Arc<FieldFn>) -> Self {
        SpinorField { provenance, frame, f }
    }

    pub fn eval(&self, p: &Vec3) -> Result<Spinor> {
        (self.f)(p)
    }

    pub fn with_mass(mut self, m: f64) -> Self {
        self.provenance.m = Some(m);
        self
    }

    pub fn function(&self) -> Arc<FieldFn> {
        self.f.clone()
    }
}

impl fmt::Debug for SpinorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinorField").field("provenance", &self.provenance).field("frame", &self.frame).finish()
    }
}

pub struct Ansatz {
    pub chart_field: SpinorField,
    pub cartesian_field: SpinorField,
}

pub type ReducedFn = dyn Fn(f64) -> Result<Spinor> + Send + Sync;

/// ψ(u) = f(t) e^{−iλ₁u_{k₁} − iλ₂u_{k₂}} P(u₂) ψ̃(t), t the reduced variable,
/// with f = 1/√u₀ for set 4 and P the matrix phase, and φ_C = Ŝ ψ.
pub fn separable_ansatz(set: &CompleteSet, l1: f64, l2: f64, rep: &GammaRep, psi_tilde: Arc<ReducedFn>) -> Ansatz {
    let provenance = Provenance { set: set.id, lambda: [l1, l2], m: None, s: rep.s };
    let phase = matrix_phase(set, rep);
    let chart = set.chart;
    let (k1, k2, r) = (set.ignorable[0], set.ignorable[1], set.reduced);
    let prefactor = matches!(set.id, SetId::S4a | SetId::S4b);
    let chart_fn = Arc::new(move |u: &Vec3| -> Result<Spinor> {
        chart.check(u)?;
        let t = u[r];
        let mut v = psi_tilde(t)?;
        if let Some(p) = phase {
            v = p.at(u[2]) * v;
        }
        let mut scalar = C64::new(0.0, -(l1 * u[k1] + l2 * u[k2])).exp();
        if prefactor {
            scalar /= t.sqrt();
        }
        Ok(v * scalar)
    });
    let rep_c = *rep;
    let cf = chart_fn.clone();
    let cart_fn = Arc::new(move |x: &Vec3| -> Result<Spinor> {
        let u = chart.to_chart(x)?;
        Ok(chart.frame_rotation(&rep_c, &u) * cf(&u)?)
    });
    Ansatz {
        chart_field: SpinorField::new(provenance, Frame::Chart(chart), chart_fn),
        cartesian_field: SpinorField::new(provenance, Frame::Cartesian, cart_fn),
    }
}
