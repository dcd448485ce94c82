use std::ops::{Add, Div, Mul, Sub};

/// Symmetric tridiagonal matrix with real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[j]` couples rows `j` and `j+1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut y = x[j] * self.diag[j];
                if j > 0 {
                    y = y + x[j - 1] * self.off[j - 1];
                }
                if j + 1 < n {
                    y = y + x[j + 1] * self.off[j];
                }
                y
            })
            .collect()
    }

    /// `a * self + diag(b)`.
    pub fn combine(&self, a: f64, b: &[f64]) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().zip(b).map(|(d, e)| a * d + e).collect(),
            off: self.off.iter().map(|o| a * o).collect(),
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        thomas(&self.off, &self.diag, &self.off, rhs)
    }
}

/// Thomas algorithm for `lower[j-1] x[j-1] + diag[j] x[j] + upper[j] x[j+1] = rhs[j]`.
///
/// No pivoting: callers pass diagonally dominant or definite systems.
pub fn thomas<T, M>(lower: &[M], diag: &[M], upper: &[M], rhs: &[T]) -> Vec<T>
where
    M: Copy + Sub<Output = M> + Mul<Output = M> + Div<Output = M>,
    T: Copy + Sub<Output = T> + Mul<M, Output = T> + Div<M, Output = T>,
{
    let n = diag.len();
    let mut c = Vec::with_capacity(n);
    let mut d: Vec<T> = Vec::with_capacity(n);
    let mut denom = diag[0];
    if n > 1 {
        c.push(upper[0] / denom);
    }
    d.push(rhs[0] / denom);
    for j in 1..n {
        denom = diag[j] - lower[j - 1] * c[j - 1];
        if j + 1 < n {
            c.push(upper[j] / denom);
        }
        d.push((rhs[j] - d[j - 1] * lower[j - 1]) / denom);
    }
    let mut x = d;
    for j in (0..n - 1).rev() {
        x[j] = x[j] - x[j + 1] * c[j];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn real_solve_inverts_apply() {
        let t = SymTridiag {
            diag: vec![4.0, 5.0, 6.0, 7.0, 3.0],
            off: vec![-1.0, -2.0, 0.5, -1.5],
        };
        let x = vec![1.0, -2.0, 0.25, 3.0, -1.0];
        let b = t.apply(&x);
        let y = t.solve(&b);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_solve_inverts_apply() {
        let i = Complex64::new(0.0, 1.0);
        let diag: Vec<Complex64> = [2.0, 3.0, 1.0, 4.0].iter().map(|&d| d + i * 0.3).collect();
        let off: Vec<Complex64> = [-1.0, 0.5, -0.7].iter().map(|&o| o * i).collect();
        let x: Vec<Complex64> = (0..4)
            .map(|k| Complex64::new(k as f64, 1.0 - k as f64))
            .collect();
        let b: Vec<Complex64> = (0..4)
            .map(|j| {
                let mut y = diag[j] * x[j];
                if j > 0 {
                    y += off[j - 1] * x[j - 1];
                }
                if j < 3 {
                    y += off[j] * x[j + 1];
                }
                y
            })
            .collect();
        let y = thomas(&off, &diag, &off, &b);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
