use std::ops::Mul;

use num_complex::Complex64;

use crate::word::GroupWord;

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Mat2::new(o, z, z, o)
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Inverse, assuming determinant one.
    pub fn inv_sl2(&self) -> Self {
        let m = self.0;
        Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0])
    }

    pub fn powi(&self, e: i32) -> Self {
        let base = if e < 0 { self.inv_sl2() } else { *self };
        let mut out = Mat2::identity();
        for _ in 0..e.unsigned_abs() {
            out = out * base;
        }
        out
    }

    /// Max-entry distance.
    pub fn dist(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = self.0;
        let b = o.0;
        let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }
}

/// Image of a word under `a ↦ gens[0]`, `b ↦ gens[1]`, for SL₂ matrices.
pub fn eval_word(w: &GroupWord, gens: &[Mat2; 2]) -> Mat2 {
    w.syllables()
        .iter()
        .fold(Mat2::identity(), |acc, &(g, e)| acc * gens[g as usize].powi(e))
}
