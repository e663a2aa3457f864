//! Quasi-random sample points and seeded random test spinors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{Spinor, C64};
use crate::linalg::Vec3;

/// Radical inverse of `i` in the given base.
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `n` Halton points (bases 2, 3, 5) inside an axis-aligned box, skipping the
/// origin of the sequence.
pub fn halton_box(region: &[[f64; 2]; 3], n: usize) -> Vec<Vec3> {
    (1..=n as u64)
        .map(|i| {
            let q = [halton(i, 2), halton(i, 3), halton(i, 5)];
            [0, 1, 2].map(|k| region[k][0] + q[k] * (region[k][1] - region[k][0]))
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian envelope times a complex polynomial of degree two in x − center.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSpinor {
    pub center: Vec3,
    pub width: f64,
    pub coeffs: [[C64; 10]; 2],
}

fn monomials(d: &Vec3) -> [f64; 10] {
    let [a, b, c] = *d;
    [1.0, a, b, c, a * a, b * b, c * c, a * b, a * c, b * c]
}

impl TestSpinor {
    pub fn random<R: Rng>(rng: &mut R, center: Vec3) -> Self {
        let mut coeffs = [[C64::new(0.0, 0.0); 10]; 2];
        for row in coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        TestSpinor { center, width: rng.gen_range(0.6..1.2), coeffs }
    }

    pub fn eval(&self, x: &Vec3) -> Spinor {
        let d = [0, 1, 2].map(|i| x[i] - self.center[i]);
        let env = (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * self.width * self.width)).exp();
        let m = monomials(&d);
        let mut out = Spinor::zero();
        for k in 0..2 {
            out.0[k] = self.coeffs[k].iter().zip(&m).map(|(c, v)| c * v).sum::<C64>() * env;
        }
        out
    }
}
