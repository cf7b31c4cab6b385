//! Linear observation model `y = H·x + n` and its augmented counterpart.
//!
//! The symbols in `x` are independent and zero-mean, so `Cxx` and the
//! pseudo-covariance `Cxx_pseudo` are diagonal. The noise is proper: its
//! pseudo-covariance is identically zero.

use num_complex::Complex;
use num_traits::Zero;

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::linalg::{augmented, blkdiag, CVector, Cholesky, Matrix};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct LinearModel<T> {
    h: Matrix<T>,
    cxx: Matrix<T>,
    cxx_pseudo: Matrix<T>,
    cnn: Matrix<T>,
    cnn_pseudo: Matrix<T>,
}

fn is_diagonal<T: Real>(m: &Matrix<T>) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)].is_zero()))
}

impl<T: Real> LinearModel<T> {
    /// General constructor.
    ///
    /// `cxx` must be diagonal with a real positive diagonal, `cxx_pseudo`
    /// diagonal with `|p_i| ≤ c_i` and `cnn` Hermitian positive definite.
    pub fn new(h: Matrix<T>, cxx: Matrix<T>, cxx_pseudo: Matrix<T>, cnn: Matrix<T>) -> Result<Self> {
        let (m, n) = h.shape();
        if n == 0 || m < n {
            return Err(Error::dims(
                "build_model",
                "m x n observation matrix with m >= n >= 1",
                format!("{m}x{n}"),
            ));
        }
        if cxx.shape() != (n, n) || cxx_pseudo.shape() != (n, n) {
            return Err(Error::dims(
                "build_model",
                format!("{n}x{n} parameter covariances"),
                format!("{:?} and {:?}", cxx.shape(), cxx_pseudo.shape()),
            ));
        }
        if cnn.shape() != (m, m) {
            return Err(Error::dims(
                "build_model",
                format!("{m}x{m} noise covariance"),
                format!("{:?}", cnn.shape()),
            ));
        }
        if !h.is_finite() {
            return Err(Error::BadModel("observation matrix has non-finite entries".into()));
        }
        if !is_diagonal(&cxx) || !is_diagonal(&cxx_pseudo) {
            return Err(Error::BadModel(
                "parameter covariance and pseudo-covariance must be diagonal (independent symbols)".into(),
            ));
        }
        for i in 0..n {
            let v = cxx[(i, i)];
            if !(v.re > T::zero()) || v.im.abs() > T::tol(1e-12) * v.re {
                return Err(Error::BadModel(format!(
                    "variance of component {i} is not real positive"
                )));
            }
            if cxx_pseudo[(i, i)].norm() > v.re * (T::one() + T::tol(1e-12)) {
                return Err(Error::BadModel(format!(
                    "pseudo-variance of component {i} exceeds its variance"
                )));
            }
        }
        Cholesky::new(&cnn)?;
        Ok(LinearModel {
            h,
            cxx,
            cxx_pseudo,
            cnn,
            cnn_pseudo: Matrix::zeros(m, m),
        })
    }

    pub fn h(&self) -> &Matrix<T> {
        &self.h
    }

    pub fn cxx(&self) -> &Matrix<T> {
        &self.cxx
    }

    pub fn cxx_pseudo(&self) -> &Matrix<T> {
        &self.cxx_pseudo
    }

    pub fn cnn(&self) -> &Matrix<T> {
        &self.cnn
    }

    /// Always zero; the noise is proper.
    pub fn cnn_pseudo(&self) -> &Matrix<T> {
        &self.cnn_pseudo
    }

    /// Number of observations.
    pub fn m(&self) -> usize {
        self.h.rows()
    }

    /// Number of parameters.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// `H·Cxx·Hᴴ + Cnn`.
    pub fn cyy(&self) -> Matrix<T> {
        &(&(&self.h * &self.cxx) * &self.h.hermitian()) + &self.cnn
    }

    /// `H·Cxx_pseudo·Hᵀ` (the noise adds no pseudo-covariance).
    pub fn cyy_pseudo(&self) -> Matrix<T> {
        &(&self.h * &self.cxx_pseudo) * &self.h.transpose()
    }

    pub fn component(&self, i: usize) -> Result<ComponentView<T>> {
        self.check_index(i)?;
        Ok(ComponentView {
            index: i,
            h_i: self.h.column(i),
            h_bar: self.h.remove_column(i),
            cxbar: self.cxx.remove_row_column(i),
        })
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        Ok(())
    }
}

/// Linear model for i.i.d. symbols drawn from `c`: `Cxx = σx²·I`,
/// `Cxx_pseudo = ρ·I`.
pub fn build_model<T: Real>(h: Matrix<T>, c: &Constellation<T>, cnn: Matrix<T>) -> Result<LinearModel<T>> {
    let n = h.cols();
    let cxx = Matrix::scaled_identity(n, Complex::new(c.variance(), T::zero()));
    let pseudo = Matrix::scaled_identity(n, c.pseudo_variance());
    LinearModel::new(h, cxx, pseudo, cnn)
}

/// Column-deletion view `y = h_i x_i + H̄_i x̄_i + n` of component `i`.
#[derive(Clone, Debug)]
pub struct ComponentView<T> {
    pub index: usize,
    pub h_i: CVector<T>,
    /// `H` without column `i` (`m x (n-1)`, empty when `n = 1`).
    pub h_bar: Matrix<T>,
    /// Covariance of `x̄_i`.
    pub cxbar: Matrix<T>,
}

#[derive(Clone, Debug)]
pub struct AugmentedModel<T> {
    base: LinearModel<T>,
    h_aug: Matrix<T>,
    cxx_aug: Matrix<T>,
    cnn_aug: Matrix<T>,
    cyy_aug: Matrix<T>,
    cxy_aug: Matrix<T>,
}

/// Augmented view of component `i`.
#[derive(Clone, Debug)]
pub struct AugmentedComponentView<T> {
    pub index: usize,
    /// `blkdiag(h_i, h_i*)`, `2m x 2`.
    pub h_i_aug: Matrix<T>,
    /// `blkdiag(H̄_i, H̄_i*)`, `2m x 2(n-1)`.
    pub h_bar_aug: Matrix<T>,
    /// Augmented covariance of `x̄_i`.
    pub cxbar_aug: Matrix<T>,
    /// `[[σ², ρ], [ρ*, σ²]]` of `x_i`.
    pub cxixi_aug: Matrix<T>,
}

/// Builds the augmented model: `H_aug = blkdiag(H, H*)`, the augmented
/// covariances, `Cyy_aug = H_aug·Cxx_aug·H_augᴴ + Cnn_aug` and
/// `Cxy_aug = Cxx_aug·H_augᴴ`.
pub fn augment<T: Real>(model: &LinearModel<T>) -> Result<AugmentedModel<T>> {
    let h_aug = blkdiag(&model.h, &model.h.conj());
    let cxx_aug = augmented(&model.cxx, &model.cxx_pseudo)?;
    let cnn_aug = augmented(&model.cnn, &model.cnn_pseudo)?;
    let cxy_aug = &cxx_aug * &h_aug.hermitian();
    let cyy_aug = &(&h_aug * &cxy_aug) + &cnn_aug;
    Cholesky::new(&cyy_aug)?;
    Ok(AugmentedModel {
        base: model.clone(),
        h_aug,
        cxx_aug,
        cnn_aug,
        cyy_aug,
        cxy_aug,
    })
}

impl<T: Real> AugmentedModel<T> {
    pub fn base(&self) -> &LinearModel<T> {
        &self.base
    }

    pub fn h_aug(&self) -> &Matrix<T> {
        &self.h_aug
    }

    pub fn cxx_aug(&self) -> &Matrix<T> {
        &self.cxx_aug
    }

    pub fn cnn_aug(&self) -> &Matrix<T> {
        &self.cnn_aug
    }

    pub fn cyy_aug(&self) -> &Matrix<T> {
        &self.cyy_aug
    }

    pub fn cxy_aug(&self) -> &Matrix<T> {
        &self.cxy_aug
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn component(&self, i: usize) -> Result<AugmentedComponentView<T>> {
        let v = self.base.component(i)?;
        let h_i = Matrix::column_vector(&v.h_i);
        let pseudo_bar = self.base.cxx_pseudo.remove_row_column(i);
        let var = self.base.cxx[(i, i)];
        let pv = self.base.cxx_pseudo[(i, i)];
        Ok(AugmentedComponentView {
            index: i,
            h_i_aug: blkdiag(&h_i, &h_i.conj()),
            h_bar_aug: blkdiag(&v.h_bar, &v.h_bar.conj()),
            cxbar_aug: augmented(&v.cxbar, &pseudo_bar)?,
            cxixi_aug: Matrix::from_rows(&[&[var, pv], &[pv.conj(), var.conj()]]),
        })
    }
}

/// Free-function spelling of [`LinearModel::component`].
pub fn component_view<T: Real>(model: &LinearModel<T>, i: usize) -> Result<ComponentView<T>> {
    model.component(i)
}
