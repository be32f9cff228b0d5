//! Dense complex matrices, power iteration, and a Hermitian eigensolver.
//!
//! The operator-norm estimates in this crate are largest singular values of
//! dense complex matrices of modest size (N <= 64 in cross-check mode), so a
//! deterministic power iteration on `B* B` plus a cyclic Jacobi eigensolver
//! for the full-spectrum cross-check keep the dependency surface flat.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        CMat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        })
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value of `b` by power iteration on `b* b`, started from
/// the all-ones vector so runs are reproducible. Relative tolerance on the
/// squared singular value; returns 0 for the zero matrix.
pub fn largest_singular_value(b: &CMat, rtol: f64) -> Result<f64> {
    if b.rows == 0 || b.cols == 0 {
        return Ok(0.0);
    }
    let bh = b.adjoint();
    let mut x = vec![C64::new(1.0, 0.0); b.cols];
    let nx = norm(&x);
    for z in &mut x {
        *z /= nx;
    }
    let mut lambda = 0.0f64;
    for _ in 0..200_000 {
        let y = b.matvec(&x);
        let lambda_new = y.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if lambda_new == 0.0 {
            return Ok(0.0);
        }
        let z = bh.matvec(&y);
        let nz = norm(&z);
        if nz == 0.0 {
            return Ok(lambda_new.sqrt());
        }
        for v in &mut x {
            *v = C64::new(0.0, 0.0);
        }
        for (xi, zi) in x.iter_mut().zip(z.iter()) {
            *xi = zi / nz;
        }
        if (lambda_new - lambda).abs() <= rtol * lambda_new {
            return Ok(lambda_new.sqrt());
        }
        lambda = lambda_new;
    }
    Err(Error::Convergence(
        "power iteration did not settle within 200000 steps".into(),
    ))
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi sweeps, ascending.
/// Input is validated to be Hermitian to roundoff.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    if a.rows != a.cols {
        return Err(Error::InvalidParameter(
            "eigensolver needs a square matrix".into(),
        ));
    }
    let n = a.rows;
    let scale = a.max_abs().max(1.0);
    for i in 0..n {
        for j in 0..n {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > 1e-10 * scale {
                return Err(Error::InvalidParameter(
                    "eigensolver input is not Hermitian".into(),
                ));
            }
        }
    }
    let mut m = a.clone();
    let fro = m.frobenius().max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * fro {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m[(p, q)].norm();
                if g <= 1e-300 {
                    continue;
                }
                let phase = m[(p, q)] / g;
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);
                // Columns p, q of m <- m * J.
                for k in 0..n {
                    let kp = m[(k, p)];
                    let kq = m[(k, q)];
                    m[(k, p)] = c * kp - s.conj() * kq;
                    m[(k, q)] = s * kp + c * kq;
                }
                // Rows p, q of m <- J^H * m.
                for k in 0..n {
                    let pk = m[(p, k)];
                    let qk = m[(q, k)];
                    m[(p, k)] = c * pk - s * qk;
                    m[(q, k)] = s.conj() * pk + c * qk;
                }
                // Clean roundoff on the eliminated pair.
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eigs)
}

/// Pairwise (fixed-association) summation, bit-stable regardless of how the
/// summands were produced.
pub fn tree_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        n => tree_sum(&xs[..n / 2]) + tree_sum(&xs[n / 2..]),
    }
}
