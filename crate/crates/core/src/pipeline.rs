//! Command implementations shared by the CLI, the FFI layer and the tests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::clifford::{expand_in_basis, levi_civita_tensor, make_gamma_rep, GammaRep, Mat2C, C64};
use crate::config::RunConfig;
use crate::error::Result;
use crate::geometry::{self, Chart};
use crate::linalg::{self, Vec3};
use crate::reconciliation::reconcile;
use crate::reduction::{integrate, reconstruct, reduce, ReducedODE, Trajectory};
use crate::sampling::{halton_box, rng, TestSpinor};
use crate::separation::{get_set, make_potential, random_potential, SetId, SpinorField};
use crate::symmetry::{
    build_operator_pair, check_determining, commutator_residual, operator_commutator, sample_points, COMMUTATOR_TOL,
};
use crate::verification::{dirac_residual, eigen_residual, Grid, ResidualReport};

use rand::Rng;

pub const CLIFFORD_TOL: f64 = 1e-12;
pub const ROUNDTRIP_TOL: f64 = 1e-10;
pub const TRIAD_TOL: f64 = 1e-12;
pub const PULLBACK_TOL: f64 = 1e-10;
pub const FLATNESS_TOL: f64 = 1e-5;
pub const CONNECTION_TOL: f64 = 1e-8;
pub const EIGEN_TOL: f64 = 1e-6;
/// Step of the plain central difference in the connection compatibility check.
pub const COMPAT_H: f64 = 1e-5;

/// One named residual against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    /// The value must exceed `tol` instead (defect detection).
    pub at_least: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tol: f64) -> Check {
        Check { name: name.into(), value, tol, at_least: false }
    }

    pub fn pass(&self) -> bool {
        if self.at_least {
            self.value > self.tol
        } else {
            self.value <= self.tol
        }
    }
}

/// Outcome of a check command.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn push(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.checks.push(Check::new(name, value, tol));
    }

    pub fn push_at_least(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.checks.push(Check { at_least: true, ..Check::new(name, value, tol) });
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let bound = if c.at_least { ">" } else { "<=" };
            let verdict = if c.pass() { "ok" } else { "FAIL" };
            let _ = writeln!(s, "{}: {:.3e} ({bound} {:e}) {verdict}", c.name, c.value, c.tol);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "pass: {}", self.pass());
        s
    }
}

/// Every chart, including both Rindler branches.
pub fn all_charts(a: f64) -> Result<Vec<Chart>> {
    Ok(vec![
        Chart::cartesian(),
        Chart::polar(),
        Chart::rindler_t(1.0),
        Chart::rindler_t(-1.0),
        Chart::rindler_x(1.0),
        Chart::rindler_x(-1.0),
        Chart::null_plane(),
        Chart::null_parabolic(a)?,
        Chart::null_projective(),
    ])
}

fn chart_label(c: &Chart) -> String {
    match c.id() {
        "rindler_t" | "rindler_x" => format!("{}{}", c.id(), if c.eps > 0.0 { "+" } else { "-" }),
        id => id.to_string(),
    }
}

/// Anticommutators, traces, commutator identity in every chart, and the
/// basis-expansion roundtrip, for one representation.
pub fn algebra_suite(rep: &GammaRep, seed: u64, report: &mut CheckReport) -> Result<()> {
    let tag = format!("s={:+}", rep.s);
    report.push(format!("{tag} anticommutators"), rep.clifford_residual(), CLIFFORD_TOL);
    let tr = rep.g.iter().map(|g| g.trace().norm()).fold(0.0, f64::max);
    report.push(format!("{tag} traces"), tr, CLIFFORD_TOL);
    let is = C64::new(0.0, rep.sf());
    for chart in all_charts(0.7)? {
        let mut worst: f64 = 0.0;
        let mut contraction: f64 = 0.0;
        for u in halton_box(&chart.safe_box(), 20) {
            let gam = chart.gammas_at(rep, &u);
            let g_low = chart.metric(&u);
            let lower: [Mat2C; 3] = [0, 1, 2].map(|s| {
                let mut m = Mat2C::zero();
                for l in 0..3 {
                    m += gam[l] * g_low[s][l];
                }
                m
            });
            let lc = levi_civita_tensor(&chart, &u)?;
            for mu in 0..3 {
                for nu in 0..3 {
                    let mut rhs = Mat2C::zero();
                    for s in 0..3 {
                        rhs += lower[s] * (-2.0 * lc.upper[mu][nu][s]);
                    }
                    worst = worst.max((gam[mu].commutator(&gam[nu]) - rhs * is).max_abs());
                }
            }
            contraction = contraction.max((lc.full_contraction() - 6.0).abs());
        }
        report.push(format!("{tag} {} commutator identity", chart_label(&chart)), worst, CLIFFORD_TOL);
        report.push(format!("{tag} {} levi-civita contraction", chart_label(&chart)), contraction, CLIFFORD_TOL);
    }
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut c = || C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let m = Mat2C::new(c(), c(), c(), c());
        let e = expand_in_basis(&m, &rep.g)?;
        worst = worst.max((e.reconstruct(&rep.g) - m).max_abs());
    }
    report.push(format!("{tag} expansion roundtrip"), worst, 1e-13);
    Ok(())
}

pub fn run_algebra_check(cfg: &RunConfig, corrupt_gamma: bool) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    for s in cfg.s.values() {
        let rep = if corrupt_gamma { GammaRep::corrupted(s)? } else { make_gamma_rep(s)? };
        if corrupt_gamma {
            report.notes.push(format!("s={s:+}: g2 replaced by sigma2"));
            report.push(format!("s={:+} anticommutators", s), rep.clifford_residual(), CLIFFORD_TOL);
            continue;
        }
        algebra_suite(&rep, cfg.seed, &mut report)?;
    }
    Ok(report)
}

/// Roundtrip, triad, pullback, flatness and spinor-connection checks for one chart.
pub fn chart_suite(chart: &Chart, rep: &GammaRep, n: usize, report: &mut CheckReport) -> Result<()> {
    let label = chart_label(chart);
    let eta = linalg::diag3(crate::clifford::ETA);
    let (mut rt, mut triad, mut pull, mut flat, mut conn, mut chr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for u in halton_box(&chart.safe_box(), n) {
        let x = chart.to_cartesian(&u);
        rt = rt.max(linalg::vec_max_abs_diff(&chart.to_chart(&x)?, &u));
        let g = chart.metric(&u);
        let e = chart.triad(&u);
        triad = triad.max(linalg::max_abs_diff(&linalg::matmul(&linalg::transpose(&e), &linalg::matmul(&eta, &e)), &g));
        let j = chart.jacobian(&u);
        pull = pull.max(linalg::max_abs_diff(&linalg::matmul(&linalg::transpose(&j), &linalg::matmul(&eta, &j)), &g));
        flat = flat.max(geometry::max_abs_riemann(&geometry::riemann_fd(chart, &u, 1e-3)?));
        conn = conn.max(chart.connection_compatibility(rep, &u, COMPAT_H)?);
        let exact = chart.christoffel(&u);
        let numeric = chart.christoffel_fd(&u, 1e-4);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    chr = chr.max((exact[a][b][c] - numeric[a][b][c]).abs());
                }
            }
        }
    }
    report.push(format!("{label} roundtrip"), rt, ROUNDTRIP_TOL);
    report.push(format!("{label} triad metric"), triad, TRIAD_TOL);
    report.push(format!("{label} pullback"), pull, PULLBACK_TOL);
    report.push(format!("{label} flatness"), flat, FLATNESS_TOL);
    report.push(format!("{label} spinor connection"), conn, CONNECTION_TOL);
    report.push(format!("{label} christoffel closed form vs FD"), chr, 1e-6);
    Ok(())
}

/// Closed-form Christoffel values compared with known exact values.
pub fn christoffel_values(report: &mut CheckReport) -> Result<()> {
    let r = 1.7;
    let polar = geometry::christoffel(&Chart::polar(), &[0.2, r, 0.4])?;
    report.notes.push(format!("polar: Gamma^r_(phi phi) = {} at r = {r}", polar[1][2][2]));
    report.push("polar Gamma^r_(phi phi) + r", (polar[1][2][2] + r).abs(), 0.0);
    let a = 0.7;
    let u = [0.9, -0.3, 0.25];
    let par = geometry::christoffel(&Chart::null_parabolic(a)?, &u)?;
    report.push("set 6 Gamma^0_22 + 4a^2", (par[0][2][2] + 4.0 * a * a).abs(), 0.0);
    report.push("set 6 Gamma^1_20 + 1/a", (par[1][2][0] + 1.0 / a).abs(), 0.0);
    let proj = geometry::christoffel(&Chart::null_projective(), &u)?;
    report.push("set 7 Gamma^1_22 - 2u0", (proj[1][2][2] - 2.0 * u[0]).abs(), 0.0);
    report.push("set 7 Gamma^2_20 - 1/u0", (proj[2][2][0] - 1.0 / u[0]).abs(), 0.0);
    Ok(())
}

pub fn run_geometry_check(cfg: &RunConfig) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let rep = make_gamma_rep(cfg.s.primary())?;
    let a = cfg.a.unwrap_or(crate::separation::DEFAULT_A);
    for chart in all_charts(a)? {
        chart_suite(&chart, &rep, 20, &mut report)?;
    }
    christoffel_values(&mut report)?;
    for e in reconcile()?.entries {
        if e.key.starts_with("set5") || e.key.starts_with("set6") || e.key.starts_with("set7") {
            report.notes.push(format!("{}: '{}' -> '{}' ({})", e.location, e.stated, e.corrected, e.verdict()));
        }
    }
    Ok(report)
}

/// Determining equations, commutators with H and between the pair, and
/// defect detection, for one set and `count` seeded random potentials.
pub fn symmetry_suite(
    id: SetId,
    a: Option<f64>,
    rep: &GammaRep,
    seed: u64,
    count: usize,
    report: &mut CheckReport,
) -> Result<()> {
    let set = get_set(id, if id == SetId::S6 { Some(a.unwrap_or(crate::separation::DEFAULT_A)) } else { None })?;
    let mut r = rng(seed ^ (id as u64).wrapping_mul(0x9e37_79b9));
    let points = sample_points(&set, 8);
    let (mut det, mut comm, mut pair, mut defect) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for _ in 0..count {
        let pot = random_potential(&set, &mut r)?;
        let (x1, x2) = build_operator_pair(&set, &pot, rep)?;
        let psi = TestSpinor::random(&mut r, points[0]);
        let f = |x: &Vec3| Ok(psi.eval(x));
        for op in [&x1, &x2] {
            det = det.max(check_determining(op, &pot, &points)?.max_residual());
            comm = comm.max(commutator_residual(op, &pot, &f, &points[..3], 1e-3)?);
        }
        pair = pair.max(operator_commutator(&x1, &x2, &f, &points[..3], 1e-3)?);
        let bad = x2.clone().with_phi_defect([1e-2, 0.0, 0.0]);
        defect = defect.min(check_determining(&bad, &pot, &points)?.max_residual());
    }
    let tag = format!("set {} s={:+}", id, rep.s);
    report.push(format!("{tag} determining"), det, crate::symmetry::DETERMINING_TOL);
    report.push(format!("{tag} [X,H]"), comm, COMMUTATOR_TOL);
    report.push(format!("{tag} [X1,X2]"), pair, COMMUTATOR_TOL);
    // the smallest residual of a perturbed operator must still fail
    report.push_at_least(format!("{tag} injected defect"), defect, crate::symmetry::DETERMINING_TOL);
    Ok(())
}

pub fn run_symmetry_check(cfg: &RunConfig) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    for s in cfg.s.values() {
        let rep = make_gamma_rep(s)?;
        for id in SetId::ALL {
            symmetry_suite(id, cfg.a, &rep, cfg.seed, cfg.potentials, &mut report)?;
        }
    }
    Ok(report)
}

/// Everything produced by a `separate` run.
#[derive(Debug, Clone)]
pub struct SeparationRun {
    pub ode: ReducedODE,
    pub trajectory: Trajectory,
    pub field: SpinorField,
    pub grid: Grid,
    pub residual: ResidualReport,
    pub eigen: [f64; 2],
    pub notes: Vec<String>,
}

impl SeparationRun {
    pub fn pass(&self) -> bool {
        self.residual.pass() && self.eigen.iter().all(|e| *e <= EIGEN_TOL)
    }

    pub fn report_text(&self, cfg: &RunConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set: {}", cfg.set);
        let _ = writeln!(s, "chart: {}", self.ode.set.chart.id());
        let _ = writeln!(s, "reduced_variable: {}", self.ode.variable);
        let _ = writeln!(s, "interval: [{}, {}]", cfg.t_start, cfg.t_end);
        let _ = writeln!(s, "kind: {:?}", self.ode.kind);
        let st = &self.trajectory.stats;
        let _ = writeln!(s, "steps: {}", st.steps);
        let _ = writeln!(s, "rejected: {}", st.rejected);
        let _ = writeln!(s, "rtol: {:e}", st.rtol);
        let _ = writeln!(s, "atol: {:e}", st.atol);
        s.push_str(&self.residual.to_text().replace("pass: ", "residual_pass: "));
        let _ = writeln!(s, "eigen_residual_1: {:.6e}", self.eigen[0]);
        let _ = writeln!(s, "eigen_residual_2: {:.6e}", self.eigen[1]);
        let _ = writeln!(s, "eigen_tol: {:e}", EIGEN_TOL);
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "pass: {}", self.pass());
        s
    }

    /// Field samples at the grid points.
    pub fn field_csv(&self) -> Result<String> {
        let mut s = String::from("x0,x1,x2,re_phi1,im_phi1,re_phi2,im_phi2\n");
        for x in &self.grid.points {
            let v = self.field.eval(x)?;
            let _ = writeln!(
                s,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                x[0], x[1], x[2], v.0[0].re, v.0[0].im, v.0[1].re, v.0[1].im
            );
        }
        Ok(s)
    }
}

/// Characteristic exponents of the free set 1 system and k² = −μ².
pub fn free_dispersion(ode: &ReducedODE) -> Result<f64> {
    let m = ode.matrix(0.0)?;
    // M is traceless, so μ² = −det M
    Ok((m.det()).re)
}

pub fn separate(cfg: &RunConfig) -> Result<SeparationRun> {
    cfg.validate()?;
    let set = cfg.complete_set()?;
    let rep = make_gamma_rep(cfg.s.primary())?;
    let pot = make_potential(&set, cfg.profiles.clone())?;
    let ode = reduce(&set, &pot, cfg.lambda1, cfg.lambda2, cfg.m, &rep)?;
    let trajectory = integrate(&ode, cfg.t_start, cfg.t_end, &cfg.init, cfg.rtol, cfg.atol)?;
    let field = reconstruct(&set, &trajectory, cfg.lambda1, cfg.lambda2, &rep);
    let grid = Grid::chart_box(&set.chart, &cfg.region, cfg.grid_n)?;
    let residual = dirac_residual(&field, &pot, &grid, cfg.h)?.with_tol(cfg.tol);
    let (x1, x2) = build_operator_pair(&set, &pot, &rep)?;
    let eigen = [
        eigen_residual(&field, &x1, cfg.lambda1, &grid, cfg.h)?,
        eigen_residual(&field, &x2, cfg.lambda2, &grid, cfg.h)?,
    ];
    let mut notes = Vec::new();
    if set.id == SetId::S1 && pot.is_zero() {
        let k2 = free_dispersion(&ode)?;
        let expect = cfg.lambda1 * cfg.lambda1 - cfg.lambda2 * cfg.lambda2 - cfg.m * cfg.m;
        notes.push(format!("dispersion: k^2 = {k2:.12} (lambda1^2 - lambda2^2 - m^2 = {expect})"));
    }
    if set.id == SetId::S4a {
        notes.push("set 4 has a second domain; select it with set = 4b".into());
    }
    Ok(SeparationRun { ode, trajectory, field, grid, residual, eigen, notes })
}

/// Runs `separate` and writes trajectory.csv, field.csv, residuals.csv,
/// report.txt and config.txt into `dir`.
pub fn run_separate(cfg: &RunConfig, dir: &Path) -> Result<SeparationRun> {
    let run = separate(cfg)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("trajectory.csv"), run.trajectory.to_csv())?;
    fs::write(dir.join("field.csv"), run.field_csv()?)?;
    fs::write(dir.join("residuals.csv"), run.residual.to_csv())?;
    fs::write(dir.join("report.txt"), run.report_text(cfg))?;
    fs::write(dir.join("config.txt"), cfg.to_text())?;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_default_passes() {
        let cfg = RunConfig::defaults(SetId::S1, None).unwrap();
        let r = run_algebra_check(&cfg, false).unwrap();
        assert!(r.pass(), "{}", r.to_text());
        assert!(r.checks.iter().all(|c| c.value < 1e-14
            || c.name.contains("roundtrip")
            || c.name.contains("identity")
            || c.name.contains("contraction")));
    }

    #[test]
    fn corrupted_gamma_fails() {
        let cfg = RunConfig::defaults(SetId::S1, None).unwrap();
        let r = run_algebra_check(&cfg, true).unwrap();
        assert!(!r.pass());
        assert_eq!(r.failures().len(), 2);
    }

    #[test]
    fn free_dispersion_k2() {
        let cfg = RunConfig::defaults(SetId::S1, None).unwrap();
        let set = cfg.complete_set().unwrap();
        let rep = make_gamma_rep(1).unwrap();
        let ode = reduce(&set, &crate::separation::PotentialField::zero(&set), 2.0, 0.0, 1.0, &rep).unwrap();
        assert!((free_dispersion(&ode).unwrap() - 3.0).abs() < 1e-10);
    }
}
