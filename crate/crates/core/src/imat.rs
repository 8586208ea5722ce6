use serde::{Deserialize, Serialize};
use std::fmt;

/// Small dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IMatrix {
    pub fn zeros(n: usize) -> Self {
        IMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "matrix must be square");
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IMatrix) -> IMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut r = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    r.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        r
    }

    pub fn scale(&self, s: i64) -> IMatrix {
        IMatrix { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn neg(&self) -> IMatrix {
        self.scale(-1)
    }

    pub fn sub(&self, other: &IMatrix) -> IMatrix {
        IMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.n];
        self.mul_vec_into(x, &mut out);
        out
    }

    #[inline]
    pub fn mul_vec_into(&self, x: &[i64], out: &mut [i64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        (sign * a[n * n - 1]) as i64
    }

    /// Adjugate, so that `m * adj(m) = det(m) * I`. Cofactor expansion; fine for n <= 8.
    pub fn adjugate(&self) -> IMatrix {
        let n = self.n;
        if n == 1 {
            return IMatrix::identity(1);
        }
        let mut adj = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut minor = Self::zeros(n - 1);
                for (ri, r) in (0..n).filter(|&r| r != i).enumerate() {
                    for (ci, c) in (0..n).filter(|&c| c != j).enumerate() {
                        minor.set(ri, ci, self.get(r, c));
                    }
                }
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj.set(j, i, s * minor.det());
            }
        }
        adj
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }
}

impl fmt::Debug for IMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}
