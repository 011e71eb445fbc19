//! Symmetric and Hermitian eigendecomposition backed by faer.
//!
//! nalgebra's `SymmetricEigen` returns accurate eigenvalues but, for matrices
//! with close eigenvalue pairs, eigenvectors that reconstruct the input only
//! to ~1e−3. Everything that needs eigenvectors goes through here instead.

use faer::{Mat, Side};
use nalgebra::{Complex, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

pub(crate) trait Hermitian: nalgebra::ComplexField<RealField = f64> + Copy {
    type Faer: faer::traits::ComplexField<Real = f64> + Copy;
    fn to_faer(self) -> Self::Faer;
    fn from_faer(x: Self::Faer) -> Self;
}

impl Hermitian for f64 {
    type Faer = f64;
    fn to_faer(self) -> f64 {
        self
    }
    fn from_faer(x: f64) -> f64 {
        x
    }
}

impl Hermitian for Complex<f64> {
    type Faer = faer::c64;
    fn to_faer(self) -> faer::c64 {
        faer::c64::new(self.re, self.im)
    }
    fn from_faer(x: faer::c64) -> Self {
        Complex::new(x.re, x.im)
    }
}

/// Eigenvalues ascending, eigenvectors as columns.
pub(crate) fn eigh<T: Hermitian>(m: DMatrix<T>) -> Result<SymmetricEigen<T, Dyn>> {
    let n = m.nrows();
    let a = Mat::<T::Faer>::from_fn(n, n, |i, j| m[(i, j)].to_faer());
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Convergence { residual: f64::NAN })?;
    let s = evd.S();
    let u = evd.U();
    Ok(SymmetricEigen {
        eigenvalues: DVector::from_fn(n, |i, _| T::from_faer(s.column_vector()[i]).real()),
        eigenvectors: DMatrix::from_fn(n, n, |i, j| T::from_faer(u[(i, j)])),
    })
}
