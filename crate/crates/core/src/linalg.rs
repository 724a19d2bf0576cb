//! Small dense linear algebra used as independent numerical oracles:
//! a cyclic Jacobi eigensolver for symmetric matrices and a Gauss-Jordan
//! inverse with partial pivoting. Dimensions here are tiny (2n <= ~32),
//! so simplicity and verifiability beat performance.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.add_to(i, j, a * rhs.get(k, j));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Largest absolute deviation from the identity.
    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.get(i, j) - target).abs());
            }
        }
        worst
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn gauss_jordan_inverse(&self) -> Result<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let mut pivot = col;
            for row in (col + 1)..n {
                if a.get(row, col).abs() > a.get(pivot, col).abs() {
                    pivot = row;
                }
            }
            let p = a.get(pivot, col);
            if p.abs() < 1e-300 {
                return Err(Error::SingularTensor(format!(
                    "Gauss-Jordan pivot {p} in column {col}"
                )));
            }
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let scale = 1.0 / a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) * scale);
                inv.set(col, j, inv.get(col, j) * scale);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col);
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.add_to(row, j, -factor * a.get(col, j));
                    inv.add_to(row, j, -factor * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations
    /// (threshold 1e-14 on the off-diagonal sum, at most 100 sweeps).
    /// Returns the spectrum sorted ascending.
    pub fn jacobi_eigenvalues(&self) -> Result<Vec<f64>> {
        const THRESHOLD: f64 = 1e-14;
        const MAX_SWEEPS: usize = 100;
        let n = self.n;
        if n == 1 {
            return Ok(vec![self.get(0, 0)]);
        }
        let mut a = self.clone();
        let scale: f64 = (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j).abs()).fold(0.0, f64::max))
            .fold(1.0, f64::max);
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .map(|p| ((p + 1)..n).map(|q| a.get(p, q).abs()).sum::<f64>())
                .sum();
            if off < THRESHOLD * scale {
                let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
                eig.sort_by(|x, y| x.total_cmp(y));
                return Ok(eig);
            }
            for p in 0..(n - 1) {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= THRESHOLD * scale * 1e-2 {
                        continue;
                    }
                    // Rotation angle from Numerical Recipes 11.1.
                    let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        let sign = if theta < 0.0 { -1.0 } else { 1.0 };
                        sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    let h = t * apq;
                    a.add_to(p, p, -h);
                    a.add_to(q, q, h);
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    for j in 0..n {
                        if j == p || j == q {
                            continue;
                        }
                        let g = a.get(j, p);
                        let hh = a.get(j, q);
                        let new_p = g - s * (hh + g * tau);
                        let new_q = hh + s * (g - hh * tau);
                        a.set(j, p, new_p);
                        a.set(p, j, new_p);
                        a.set(j, q, new_q);
                        a.set(q, j, new_q);
                    }
                }
            }
        }
        Err(Error::InternalInconsistency(
            "Jacobi eigensolver did not converge in 100 sweeps".into(),
        ))
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        CMat::from_fn(n, |i, j| {
            (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        })
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.get(i, j) - target).norm());
            }
        }
        worst
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a Hermitian
    /// matrix; its spectrum is the Hermitian spectrum with every
    /// eigenvalue doubled.
    pub fn real_embedding(&self) -> Mat {
        let n = self.n;
        Mat::from_fn(2 * n, |i, j| {
            let a = self.get(i % n, j % n);
            match (i < n, j < n) {
                (true, true) | (false, false) => a.re,
                (true, false) => -a.im,
                (false, true) => a.im,
            }
        })
    }

    /// Eigenvalues of a Hermitian matrix via the real embedding and the
    /// Jacobi solver; the doubled spectrum is collapsed by pairing sorted
    /// neighbors.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let doubled = self.real_embedding().jacobi_eigenvalues()?;
        let mut out = Vec::with_capacity(self.n);
        for pair in doubled.chunks_exact(2) {
            out.push(0.5 * (pair[0] + pair[1]));
        }
        Ok(out)
    }
}
