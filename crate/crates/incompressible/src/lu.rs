//! Small dense LU factorization with partial pivoting.
//!
//! The projection solver factors one modest matrix (order = number of normal
//! nodes) per distinct tangential wavenumber magnitude and reuses each factor
//! for every right-hand side, so a plain O(n^3) factor with O(n^2) solves is
//! the right tool; no external linear-algebra backend is needed.

use ndarray::Array2;

/// LU factors of a square matrix `P·A = L·U`, stored packed in one buffer.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    /// Row-major packed L (unit diagonal, below) and U (diagonal and above).
    lu: Vec<f64>,
    /// Row swap chosen at each elimination step: step k swapped rows k and piv[k].
    piv: Vec<usize>,
}

impl LuFactors {
    /// Factor `a` with partial pivoting. Returns `None` if a pivot is exactly
    /// zero or not finite (singular or invalid matrix).
    pub fn factor(a: &Array2<f64>) -> Option<LuFactors> {
        let n = a.nrows();
        if a.ncols() != n || n == 0 {
            return None;
        }
        let mut lu: Vec<f64> = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                lu.push(a[[r, c]]);
            }
        }
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for r in (k + 1)..n {
                let v = lu[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[k] = p;
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
            }
            let pivot = lu[k * n + k];
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            let inv = 1.0 / pivot;
            for r in (k + 1)..n {
                let m = lu[r * n + k] * inv;
                lu[r * n + k] = m;
                if m != 0.0 {
                    for c in (k + 1)..n {
                        lu[r * n + c] -= m * lu[k * n + c];
                    }
                }
            }
        }
        Some(LuFactors { n, lu, piv })
    }

    /// Matrix order.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Solve `A·x = b` in place (`b` becomes `x`).
    ///
    /// # Panics
    /// Panics if `b.len()` differs from the matrix order.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length must match matrix order");
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
        }
        // Forward substitution with unit-diagonal L.
        for r in 1..n {
            let mut acc = b[r];
            let row = &self.lu[r * n..r * n + r];
            for (c, &m) in row.iter().enumerate() {
                acc -= m * b[c];
            }
            b[r] = acc;
        }
        // Back substitution with U.
        for r in (0..n).rev() {
            let mut acc = b[r];
            let row = &self.lu[r * n..(r + 1) * n];
            for c in (r + 1)..n {
                acc -= row[c] * b[c];
            }
            b[r] = acc / row[r];
        }
    }
}
