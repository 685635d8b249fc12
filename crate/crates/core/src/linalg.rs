//! Small dense solvers: LU with partial pivoting, a 1-norm condition
//! estimate, and the ridge-retry policy used for the bordered
//! kriging/RBF systems.

use crate::error::{InpaintError, Result};

/// Systems whose estimated 1-norm condition exceeds this get a ridge.
pub const RIDGE_TRIGGER: f64 = 1e12;
/// Ridge magnitude relative to the mean diagonal of the kernel block.
pub const RIDGE_SCALE: f64 = 1e-8;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    a: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, a: vec![0.0; n * n] }
    }

    pub fn from_rows(n: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), n * n);
        Matrix { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `P A = L U` with unit-diagonal `L` stored below the diagonal of `lu`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails on an exactly zero or non-finite pivot.
    pub fn factor(m: &Matrix) -> Option<Self> {
        let n = m.n;
        let mut lu = m.a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pv > 0.0) || !pv.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..(k + 1) * n];
            for row in tail.chunks_mut(n) {
                let f = row[k] / pivot;
                row[k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        row[j] -= f * row_k[j];
                    }
                }
            }
        }
        Some(Lu { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solve `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.lu[k * n + i] * z[k]).sum();
            z[i] = (z[i] - s) / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.lu[k * n + i] * z[k]).sum();
            z[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Hager's estimate of `||A^-1||_1`.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().map(|v| v.abs()).sum();
            let xi: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        est
    }

    pub fn condition_estimate(&self, norm1: f64) -> f64 {
        let c = norm1 * self.inverse_norm1_estimate();
        if c.is_finite() {
            c
        } else {
            f64::INFINITY
        }
    }
}

/// Outcome of [`factor_with_ridge`].
#[derive(Clone, Debug)]
pub struct Conditioned {
    pub lu: Lu,
    pub condition: f64,
    pub ridge: f64,
}

/// Factor a bordered system whose leading `kernel_dim x kernel_dim` block
/// holds kernel (variogram / RBF) values. When the condition estimate
/// exceeds [`RIDGE_TRIGGER`], a ridge of `RIDGE_SCALE * s` is added to that
/// block's diagonal and the factorization retried once, where `s` is the
/// mean absolute diagonal of the block, or its mean absolute entry when the
/// diagonal is identically zero (variograms and thin-plate kernels vanish
/// at the origin). Fails when the retry is still numerically singular.
pub fn factor_with_ridge(m: &Matrix, kernel_dim: usize, what: &'static str) -> Result<Conditioned> {
    let norm = m.norm1();
    if let Some(lu) = Lu::factor(m) {
        let condition = lu.condition_estimate(norm);
        if condition <= RIDGE_TRIGGER {
            return Ok(Conditioned {
                lu,
                condition,
                ridge: 0.0,
            });
        }
    }
    let diag: f64 = (0..kernel_dim).map(|i| m.get(i, i).abs()).sum::<f64>() / kernel_dim.max(1) as f64;
    let scale = if diag > 0.0 {
        diag
    } else {
        let mut s = 0.0;
        for i in 0..kernel_dim {
            for j in 0..kernel_dim {
                s += m.get(i, j).abs();
            }
        }
        s / (kernel_dim * kernel_dim).max(1) as f64
    };
    let ridge = RIDGE_SCALE * if scale > 0.0 { scale } else { 1.0 };
    let mut r = m.clone();
    for i in 0..kernel_dim {
        r.set(i, i, r.get(i, i) + ridge);
    }
    let lu = Lu::factor(&r).ok_or(InpaintError::Singular(what))?;
    let condition = lu.condition_estimate(r.norm1());
    if condition * f64::EPSILON >= 1.0 {
        return Err(InpaintError::Singular(what));
    }
    Ok(Conditioned {
        lu,
        condition,
        ridge,
    })
}

/// Reject repeated sample coordinates, which make bordered systems singular.
pub(crate) fn check_distinct(points: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for (x, y) in points {
        if !seen.insert((x.to_bits(), y.to_bits())) {
            return Err(InpaintError::DuplicateCoordinate(x, y));
        }
    }
    Ok(())
}
