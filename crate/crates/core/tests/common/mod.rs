#![allow(dead_code)]

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spbvp::tridiag::TridiagonalMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pow2(k: i32) -> f64 {
    (k as f64).exp2()
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor != 0.0 {
                for c in col..n {
                    a[r][c] -= factor * a[col][c];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

pub fn to_dense(m: &TridiagonalMatrix) -> Vec<Vec<f64>> {
    let n = m.size();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        let (lo, d, up) = m.row(i);
        if i > 0 {
            row[i - 1] = lo;
        }
        row[i] = d;
        if i + 1 < n {
            row[i + 1] = up;
        }
    }
    a
}

/// Extended-precision arithmetic at 256 bits.
pub struct Hp {
    cc: Consts,
}

pub const HP_BITS: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

impl Hp {
    pub fn new() -> Self {
        Self {
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn from(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, HP_BITS)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, HP_BITS, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, HP_BITS, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, HP_BITS, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, HP_BITS, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(HP_BITS, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(HP_BITS, RM, &mut self.cc)
    }

    pub fn sinh(&mut self, a: &BigFloat) -> BigFloat {
        a.sinh(HP_BITS, RM, &mut self.cc)
    }

    pub fn tanh(&mut self, a: &BigFloat) -> BigFloat {
        a.tanh(HP_BITS, RM, &mut self.cc)
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        a.format(Radix::Dec, RM, &mut self.cc)
            .expect("decimal formatting")
            .parse()
            .expect("formatted value parses")
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}
