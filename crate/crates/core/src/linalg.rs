//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Eigen-decomposition of a real symmetric matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: DVector<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    pub fn new(matrix: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(matrix.clone());
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            // gauge: largest component positive
            let imax = col.iamax();
            if col[imax] < 0.0 {
                col.neg_mut();
            }
            vectors.set_column(dst, &col);
        }
        Eigen { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i H t)` for the decomposed `H`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let v = to_complex(&self.vectors);
        let mut left = v.clone();
        for (k, mut col) in left.column_iter_mut().enumerate() {
            col *= C64::from_polar(1.0, -self.values[k] * t);
        }
        left * v.transpose()
    }
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// `max |A - A^T| / max |A|`, zero for the zero matrix.
pub fn hermiticity_defect(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).amax() / scale
}

/// Frobenius norm of `U^dagger U - I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}
