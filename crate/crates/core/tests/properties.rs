#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use dirac21::clifford::{expand_in_basis, make_gamma_rep, Mat2C, C64, ETA};
use dirac21::geometry::Chart;
use dirac21::linalg::{inv3, Mat3, Vec3};
use dirac21::pipeline::all_charts;
use dirac21::separation::{get_set, spin_factor, Profile, SetId};
use dirac21::symmetry::make_killing;

fn charts() -> Vec<Chart> {
    all_charts(0.7).unwrap()
}

/// Point of the chart's safe box at fractional position `f`.
fn point_in(chart: &Chart, f: [f64; 3]) -> Vec3 {
    let b = chart.safe_box();
    [0, 1, 2].map(|k| b[k][0] + f[k] * (b[k][1] - b[k][0]))
}

fn c64() -> impl Strategy<Value = C64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn unit3() -> impl Strategy<Value = [f64; 3]> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b, c)| [a, b, c])
}

fn sign() -> impl Strategy<Value = i32> {
    prop_oneof![Just(1), Just(-1)]
}

proptest! {
    #[test]
    fn expansion_roundtrip(a in c64(), b in c64(), c in c64(), d in c64(), s in sign()) {
        let rep = make_gamma_rep(s).unwrap();
        let m = Mat2C::new(a, b, c, d);
        let e = expand_in_basis(&m, &rep.g).unwrap();
        prop_assert!((e.reconstruct(&rep.g) - m).max_abs() <= 1e-13 * (1.0 + m.max_abs()));
        prop_assert!((e.scalar - m.trace() * 0.5).norm() < 1e-14 * (1.0 + m.max_abs()));
    }

    #[test]
    fn curved_gammas_follow_chart_metric(idx in 0usize..9, f in unit3(), s in sign()) {
        let chart = charts()[idx];
        let u = point_in(&chart, f);
        let rep = make_gamma_rep(s).unwrap();
        let g = chart.gammas_at(&rep, &u);
        let ginv = inv3(&chart.metric(&u)).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let lhs = g[a].anticommutator(&g[b]);
                let rhs = Mat2C::scalar(C64::from(2.0 * ginv[a][b]));
                prop_assert!((lhs - rhs).max_abs() < 1e-12 * (1.0 + ginv[a][b].abs()));
            }
        }
    }

    #[test]
    fn chart_roundtrip(idx in 0usize..9, f in unit3()) {
        let chart = charts()[idx];
        let u = point_in(&chart, f);
        let back = chart.to_chart(&chart.to_cartesian(&u)).unwrap();
        for k in 0..3 {
            prop_assert!((back[k] - u[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn profile_text_roundtrip(terms in prop::collection::vec((-2i32..4, -10.0..10.0f64), 0..5)) {
        let p = Profile::new(terms);
        let q = Profile::parse(&p.to_string()).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn killing_fields_satisfy_killing_equation(w in prop::array::uniform3(-2.0..2.0f64), b in prop::array::uniform3(-2.0..2.0f64), x in prop::array::uniform3(-3.0..3.0f64)) {
        let a: Mat3 = [[0.0, w[0], w[1]], [-w[0], 0.0, w[2]], [-w[1], -w[2], 0.0]];
        let k = make_killing(a, b).unwrap();
        let h = 1e-3;
        let lower = |p: &Vec3| { let v = k.eval(p); [0, 1, 2].map(|i| ETA[i] * v[i]) };
        for mu in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[mu] += h;
            xm[mu] -= h;
            let (vp, vm) = (lower(&xp), lower(&xm));
            for nu in 0..3 {
                let d_mu_nu = (vp[nu] - vm[nu]) / (2.0 * h);
                let mut yp = x;
                let mut ym = x;
                yp[nu] += h;
                ym[nu] -= h;
                let d_nu_mu = (lower(&yp)[mu] - lower(&ym)[mu]) / (2.0 * h);
                prop_assert!((d_mu_nu + d_nu_mu).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetric_part_is_rejected(w in 0.01..2.0f64) {
        let a: Mat3 = [[0.0, w, 0.0], [w, 0.0, 0.0], [0.0, 0.0, 0.0]];
        prop_assert!(make_killing(a, [0.0; 3]).is_err());
    }

    #[test]
    fn spin_factor_is_unimodular(idx in 0usize..8, f in unit3(), s in sign()) {
        let id = SetId::ALL[idx];
        let set = get_set(id, (id == SetId::S6).then_some(0.7)).unwrap();
        let r = set.default_region();
        let u = [0, 1, 2].map(|k| r[k][0] + f[k] * (r[k][1] - r[k][0]));
        let rep = make_gamma_rep(s).unwrap();
        let sf = spin_factor(&set, &u, &rep);
        prop_assert!((sf.det() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
