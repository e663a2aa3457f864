//! Finite-difference certification of reconstructed solutions.

use std::fmt::Write as _;

use crate::clifford::{GammaRep, Spinor, I};
use crate::error::{Error, Result};
use crate::fd;
use crate::geometry::{self, Chart};
use crate::linalg::Vec3;
use crate::separation::{PotentialField, SpinorField};
use crate::symmetry::{DiracOperator, SpinorOperator, SymmetryOperator};

pub const DEFAULT_H: f64 = 1e-4;
pub const DEFAULT_TOL: f64 = 1e-5;
pub const DEFAULT_GRID_N: usize = 11;

/// Evaluation points in Cartesian coordinates (and the chart coordinates they
/// came from, if any).
#[derive(Debug, Clone)]
pub struct Grid {
    pub description: String,
    pub points: Vec<Vec3>,
    pub chart_points: Vec<Vec3>,
}

impl Grid {
    /// Uniform n×n×n box in chart coordinates, mapped to Cartesian points.
    pub fn chart_box(chart: &Chart, region: &[[f64; 2]; 3], n: usize) -> Result<Grid> {
        if n == 0 {
            return Err(Error::Config("grid size must be positive".into()));
        }
        let coord = |k: usize, i: usize| {
            if n == 1 {
                0.5 * (region[k][0] + region[k][1])
            } else {
                region[k][0] + (region[k][1] - region[k][0]) * i as f64 / (n - 1) as f64
            }
        };
        let mut chart_points = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let u = [coord(0, i), coord(1, j), coord(2, k)];
                    chart.check(&u)?;
                    chart_points.push(u);
                }
            }
        }
        let points = chart_points.iter().map(|u| chart.to_cartesian(u)).collect();
        let description = format!(
            "{n}x{n}x{n} {} box [{}, {}] x [{}, {}] x [{}, {}]",
            chart.id(),
            region[0][0],
            region[0][1],
            region[1][0],
            region[1][1],
            region[2][0],
            region[2][1]
        );
        Ok(Grid { description, points, chart_points })
    }

    pub fn from_points(description: &str, points: Vec<Vec3>) -> Grid {
        Grid { description: description.to_string(), chart_points: points.clone(), points }
    }
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub grid: String,
    pub points: Vec<Vec3>,
    /// |Hφ| at each point.
    pub residuals: Vec<f64>,
    /// |φ| at each point.
    pub magnitudes: Vec<f64>,
    pub relative_max: f64,
    pub relative_rms: f64,
    pub h: f64,
    pub tol: f64,
}

impl ResidualReport {
    fn build(grid: &Grid, residuals: Vec<f64>, magnitudes: Vec<f64>, h: f64, tol: f64) -> ResidualReport {
        let max_r = residuals.iter().cloned().fold(0.0, f64::max);
        let max_f = magnitudes.iter().cloned().fold(0.0, f64::max);
        let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len().max(1) as f64).sqrt();
        let (relative_max, relative_rms) =
            if max_f > 0.0 { (max_r / max_f, rms / max_f) } else { (f64::INFINITY, f64::INFINITY) };
        ResidualReport {
            grid: grid.description.clone(),
            points: grid.points.clone(),
            residuals,
            magnitudes,
            relative_max,
            relative_rms,
            h,
            tol,
        }
    }

    pub fn pass(&self) -> bool {
        self.relative_max <= self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// key: value lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "grid: {}", self.grid);
        let _ = writeln!(s, "points: {}", self.points.len());
        let _ = writeln!(s, "h: {:e}", self.h);
        let _ = writeln!(s, "relative_max: {:.6e}", self.relative_max);
        let _ = writeln!(s, "relative_rms: {:.6e}", self.relative_rms);
        let _ = writeln!(s, "tol: {:e}", self.tol);
        let _ = writeln!(s, "pass: {}", self.pass());
        s
    }

    /// Per-point CSV: x0, x1, x2, |Hφ|, |φ|.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x0,x1,x2,residual,magnitude\n");
        for ((x, r), f) in self.points.iter().zip(&self.residuals).zip(&self.magnitudes) {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", x[0], x[1], x[2], r, f);
        }
        s
    }
}

fn field_mass(field: &SpinorField) -> Result<f64> {
    field.provenance.m.ok_or_else(|| Error::Domain("field carries no mass; attach one with with_mass".into()))
}

fn rep_of(field: &SpinorField) -> Result<GammaRep> {
    crate::clifford::make_gamma_rep(field.provenance.s)
}

/// Relative residual of the Cartesian Dirac equation γ̂^a(i∂_a − A_(C)a)φ − mφ.
pub fn dirac_residual(field: &SpinorField, potential: &PotentialField, grid: &Grid, h: f64) -> Result<ResidualReport> {
    let op = DiracOperator { rep: rep_of(field)?, m: field_mass(field)?, potential: potential.clone() };
    let f = field.function();
    let psi = |x: &Vec3| f(x);
    let mut res = Vec::with_capacity(grid.points.len());
    let mut mag = Vec::with_capacity(grid.points.len());
    for x in &grid.points {
        res.push(op.apply(&psi, x, h)?.norm());
        mag.push(field.eval(x)?.norm());
    }
    Ok(ResidualReport::build(grid, res, mag, h, DEFAULT_TOL))
}

/// Relative residual of γ^μ(i(∂_μ + Γ_μ) − A_μ)ψ − mψ for a field given in
/// chart coordinates and the chart frame; grid points are the chart points.
pub fn chart_dirac_residual(
    field: &SpinorField,
    chart: &Chart,
    potential: &PotentialField,
    grid: &Grid,
    h: f64,
) -> Result<ResidualReport> {
    let rep = rep_of(field)?;
    let m = field_mass(field)?;
    let f = field.function();
    let psi = |u: &Vec3| f(u);
    let mut res = Vec::with_capacity(grid.chart_points.len());
    let mut mag = Vec::with_capacity(grid.chart_points.len());
    for u in &grid.chart_points {
        let gam = geometry::curved_gamma(&rep, chart, u)?;
        let conn = geometry::spinor_connection(chart, u, &rep)?;
        let a = potential.chart_components(u);
        let p = psi(u)?;
        let mut out = p * (-m);
        for mu in 0..3 {
            let d = fd::try_partial(psi, u, mu, h)?;
            out += gam[mu] * ((d + conn[mu] * p) * I - p * a[mu]);
        }
        res.push(out.norm());
        mag.push(p.norm());
    }
    Ok(ResidualReport::build(grid, res, mag, h, DEFAULT_TOL))
}

/// max |Xφ − λφ| / max |φ| over the grid.
pub fn eigen_residual(field: &SpinorField, op: &SymmetryOperator, lambda: f64, grid: &Grid, h: f64) -> Result<f64> {
    let f = field.function();
    let psi = |x: &Vec3| f(x);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in &grid.points {
        let v: Spinor = psi(x)?;
        let xv = op.apply(&psi, x, h)?;
        worst = worst.max((xv - v * lambda).norm());
        scale = scale.max(v.norm());
    }
    if scale == 0.0 {
        return Err(Error::Domain("field vanishes on the grid".into()));
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{make_gamma_rep, C64};
    use crate::separation::{get_set, Frame, Provenance, SetId};
    use std::sync::Arc;

    fn plane_wave(m: f64, lambda1: f64) -> SpinorField {
        // e^{−iEt + ikx²} u with (γ̂⁰E − γ̂²k − m)u = 0 for E = λ₁
        let k = (lambda1 * lambda1 - m * m).sqrt();
        let rep = make_gamma_rep(1).unwrap();
        let mat = rep.g[0] * lambda1 - rep.g[2] * k - crate::clifford::Mat2C::scalar(m.into());
        // null vector of a singular 2×2 matrix
        let u = Spinor::new(-mat.m[0][1], mat.m[0][0]);
        let prov = Provenance { set: SetId::S1, lambda: [lambda1, 0.0], m: Some(m), s: 1 };
        SpinorField::new(
            prov,
            Frame::Cartesian,
            Arc::new(move |x: &Vec3| Ok(u * C64::new(0.0, -lambda1 * x[0] + k * x[2]).exp())),
        )
    }

    #[test]
    fn free_plane_wave_residual() {
        let set = get_set(SetId::S1, None).unwrap();
        let grid = Grid::chart_box(&set.chart, &set.default_region(), 5).unwrap();
        let rep = dirac_residual(&plane_wave(1.0, 2.0), &PotentialField::zero(&set), &grid, 1e-4).unwrap();
        assert!(rep.relative_max < 1e-7, "{}", rep.relative_max);
        assert!(rep.pass());
        assert!(rep.to_text().contains("pass: true"));
        assert_eq!(rep.to_csv().lines().count(), 126);
    }

    #[test]
    fn missing_mass_is_an_error() {
        let set = get_set(SetId::S1, None).unwrap();
        let grid = Grid::chart_box(&set.chart, &set.default_region(), 2).unwrap();
        let mut f = plane_wave(1.0, 2.0);
        f.provenance.m = None;
        assert!(dirac_residual(&f, &PotentialField::zero(&set), &grid, 1e-4).is_err());
    }

    #[test]
    fn grid_outside_chart() {
        let c = Chart::polar();
        assert!(Grid::chart_box(&c, &[[0.0, 1.0], [-1.0, 1.0], [0.0, 1.0]], 3).is_err());
    }
}
