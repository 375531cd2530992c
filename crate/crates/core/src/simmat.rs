//! Dense symmetric matrices of small dimension with a cyclic Jacobi
//! eigendecomposition, used for the diffusion matrix square root and its PSD
//! certification. Deterministic: no pivoting randomness, fixed sweep order.

#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    /// Row-major dense storage.
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// `A x` for a vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Elementwise scaling `c * A`.
    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// Cyclic Jacobi: returns (eigenvalues, eigenvectors as columns).
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.dim;
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect();
        let mut v = vec![vec![0.0; n]; n];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let scale: f64 = (0..n).map(|i| a[i][i].abs()).fold(1.0, f64::max);
        let off = |a: &Vec<Vec<f64>>| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    s += a[i][j] * a[i][j];
                }
            }
            (2.0 * s).sqrt()
        };
        for _sweep in 0..100 {
            if off(&a) <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // A <- A J  (columns p, q)
                    for row in a.iter_mut() {
                        let akp = row[p];
                        let akq = row[q];
                        row[p] = c * akp - s * akq;
                        row[q] = s * akp + c * akq;
                    }
                    // A <- J^T A  (rows p, q)
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    // V <- V J
                    for row in v.iter_mut() {
                        let vp = row[p];
                        let vq = row[q];
                        row[p] = c * vp - s * vq;
                        row[q] = s * vp + c * vq;
                    }
                }
            }
        }
        let eigvals: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        (eigvals, v)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Symmetric square root with negative eigenvalues clamped to zero
    /// (tiny negatives are rounding of a PSD matrix).
    pub fn sqrt_psd(&self) -> SymMatrix {
        let n = self.dim;
        let (vals, vecs) = self.eigen();
        let roots: Vec<f64> = vals.iter().map(|l| l.max(0.0).sqrt()).collect();
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (k, r) in roots.iter().enumerate() {
                    s += vecs[i][k] * r * vecs[j][k];
                }
                out.set(i, j, s);
            }
        }
        out
    }
}
