//! Dense LU factorization with partial pivoting.
//!
//! Boards are small (a few dozen unknowns at most), so a dense row-major
//! matrix is all the solver needs.

use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.n + col]
    }

    pub fn add(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.n + col] += value;
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.n + col] = value;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|r| (0..self.n).map(|c| self.get(r, c) * x[c]).sum()).collect()
    }
}

/// Raised when elimination meets a pivot that is numerically zero.
/// `column` is the unknown whose pivot vanished (in original ordering).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularPivot {
    pub column: usize,
}

/// Solves `a * x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>, SingularPivot> {
    let n = a.dim();
    assert_eq!(b.len(), n, "rhs length must match matrix dimension");
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut m = a.data.clone();
    let mut rhs = b.to_vec();
    let scale = m.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tiny = scale * T::epsilon() * T::lit(n as f64);
    if scale == T::zero() {
        return Err(SingularPivot { column: 0 });
    }

    for k in 0..n {
        let (pivot_row, pivot_abs) =
            (k..n)
                .map(|r| (r, m[r * n + k].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= tiny {
            return Err(SingularPivot { column: k });
        }
        if pivot_row != k {
            for c in 0..n {
                m.swap(k * n + c, pivot_row * n + c);
            }
            rhs.swap(k, pivot_row);
        }
        let pivot = m[k * n + k];
        for r in (k + 1)..n {
            let factor = m[r * n + k] / pivot;
            if factor == T::zero() {
                continue;
            }
            m[r * n + k] = T::zero();
            for c in (k + 1)..n {
                let delta = factor * m[k * n + c];
                m[r * n + c] -= delta;
            }
            let delta = factor * rhs[k];
            rhs[r] -= delta;
        }
    }

    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for c in (k + 1)..n {
            acc -= m[k * n + c] * x[c];
        }
        x[k] = acc / m[k * n + k];
    }
    Ok(x)
}
