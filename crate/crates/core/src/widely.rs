//! WLMMSE and CWCU WLMMSE estimators in augmented form.
//!
//! The augmented estimator `E_aug = [[E, F], [F*, E*]]` maps `(y, y*)` to
//! `(x̂, x̂*)`. Component `i` uses rows `i` and `i + n`, collected in the
//! `2 x 2m` matrix `E_i`. Conditioned on `x_i` the augmented estimate
//! `(x̂_i, x̂_i*)` has mean `α_i·(x_i, x_i*)` with the `2 x 2` matrix
//! `α_i = E_i·H_i_aug`, and covariance
//!
//! ```text
//! E_i (H̄_i_aug C_x̄x̄_aug H̄_i_augᴴ + Cnn_aug) E_iᴴ
//! ```
//!
//! The CWCU WLMMSE rows are `α_WL,i⁻¹·E_WL,i`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{inv2, solve_hpd, CVector, Matrix};
use crate::model::AugmentedModel;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WidelyKind {
    Wlmmse,
    CwcuWlmmse,
}

impl WidelyKind {
    pub fn name(self) -> &'static str {
        match self {
            WidelyKind::Wlmmse => "WLMMSE",
            WidelyKind::CwcuWlmmse => "CWCU-WLMMSE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct WidelyEstimatorBank<T> {
    pub kind: WidelyKind,
    /// `2n x 2m` augmented estimator matrix.
    pub e_aug: Matrix<T>,
    /// `α_i`, one `2 x 2` matrix per component.
    pub alpha: Vec<Matrix<T>>,
    /// Augmented conditional covariance, one Hermitian `2 x 2` per component.
    pub cond_cov: Vec<Matrix<T>>,
}

impl<T: Real> WidelyEstimatorBank<T> {
    pub fn n(&self) -> usize {
        self.e_aug.rows() / 2
    }

    pub fn m(&self) -> usize {
        self.e_aug.cols() / 2
    }

    /// `E_i`: rows `i` and `i + n` of the augmented estimator.
    pub fn component_rows(&self, i: usize) -> Result<Matrix<T>> {
        component_rows(&self.e_aug, i)
    }

    /// Applies the estimator to `y` and returns the `n` non-conjugate
    /// components of the augmented estimate.
    pub fn estimate(&self, y: &[Complex<T>]) -> Result<CVector<T>> {
        let m = self.m();
        if y.len() != m {
            return Err(Error::dims(
                "estimate",
                format!("{m} observations"),
                y.len().to_string(),
            ));
        }
        let n = self.n();
        let y_aug: CVector<T> = y.iter().copied().chain(y.iter().map(|z| z.conj())).collect();
        let x_aug = self.e_aug.mul_vec(&y_aug);
        debug_assert!(
            (0..n).all(|i| { (x_aug[i].conj() - x_aug[i + n]).norm() <= T::tol(1e-9) * x_aug[i].norm().max(T::one()) })
        );
        Ok(x_aug[..n].to_vec())
    }
}

fn component_rows<T: Real>(e_aug: &Matrix<T>, i: usize) -> Result<Matrix<T>> {
    let n = e_aug.rows() / 2;
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    Ok(e_aug.select_rows(&[i, i + n]))
}

/// `(α_i, C_i)` for the `2 x 2m` component rows `e_i`:
/// `α_i = e_i·H_i_aug` and
/// `C_i = e_i (H̄_i_aug C_x̄x̄_aug H̄_i_augᴴ + Cnn_aug) e_iᴴ`, Hermitian-symmetrized.
pub fn widely_conditional_stats<T: Real>(
    e_i: &Matrix<T>,
    am: &AugmentedModel<T>,
    i: usize,
) -> Result<(Matrix<T>, Matrix<T>)> {
    if e_i.shape() != (2, 2 * am.m()) {
        return Err(Error::dims(
            "widely_conditional_stats",
            format!("2x{} component rows", 2 * am.m()),
            format!("{:?}", e_i.shape()),
        ));
    }
    let v = am.component(i)?;
    let alpha = e_i * &v.h_i_aug;
    let g = e_i * &v.h_bar_aug;
    let ipi = &(&g * &v.cxbar_aug) * &g.hermitian();
    let noise = &(e_i * am.cnn_aug()) * &e_i.hermitian();
    Ok((alpha, (&ipi + &noise).hermitian_part()))
}

/// Per-component Bayesian MSE `E|x̂_i − x_i|²` of an augmented estimator.
pub fn bmse<T: Real>(e_aug: &Matrix<T>, am: &AugmentedModel<T>) -> Vec<T> {
    let n = am.n();
    let bias = &(e_aug * am.h_aug()) - &Matrix::identity(2 * n);
    let total = &(&(&bias * am.cxx_aug()) * &bias.hermitian()) + &(&(e_aug * am.cnn_aug()) * &e_aug.hermitian());
    (0..n).map(|i| total[(i, i)].re.max(T::zero())).collect()
}

/// `E_WL = Cxy_aug·Cyy_aug⁻¹`.
pub fn wlmmse<T: Real>(am: &AugmentedModel<T>) -> Result<WidelyEstimatorBank<T>> {
    // Cyy⁻¹·Cyx, then transpose back: E = (Cyy⁻¹ Cxyᴴ)ᴴ
    let e_aug = solve_hpd(am.cyy_aug(), &am.cxy_aug().hermitian())?.hermitian();
    let n = am.n();
    let mut alpha = Vec::with_capacity(n);
    let mut cond_cov = Vec::with_capacity(n);
    for i in 0..n {
        let (a, cov) = widely_conditional_stats(&component_rows(&e_aug, i)?, am, i)?;
        alpha.push(a);
        cond_cov.push(cov);
    }
    Ok(WidelyEstimatorBank {
        kind: WidelyKind::Wlmmse,
        e_aug,
        alpha,
        cond_cov,
    })
}

/// CWCU WLMMSE from its own WLMMSE solve.
pub fn cwcu_wlmmse<T: Real>(am: &AugmentedModel<T>) -> Result<WidelyEstimatorBank<T>> {
    cwcu_from_wlmmse(&wlmmse(am)?, am)
}

fn degenerate(i: usize, e: Error) -> Error {
    match e {
        Error::Singular { det } => Error::DegenerateComponent {
            index: i,
            reason: format!("conditional scaling matrix is singular (|det| = {det:e})"),
        },
        other => other,
    }
}

/// CWCU WLMMSE rows `α_WL,i⁻¹·E_WL,i` and covariances
/// `α_WL,i⁻¹·C_WL,i·α_WL,i⁻ᴴ`, derived from an existing WLMMSE bank.
pub fn cwcu_from_wlmmse<T: Real>(
    wl: &WidelyEstimatorBank<T>,
    am: &AugmentedModel<T>,
) -> Result<WidelyEstimatorBank<T>> {
    if wl.kind != WidelyKind::Wlmmse {
        return Err(Error::BadModel("CWCU rows must be derived from a WLMMSE bank".into()));
    }
    let n = wl.n();
    let mut e_aug = wl.e_aug.clone();
    let mut alpha = Vec::with_capacity(n);
    let mut cond_cov = Vec::with_capacity(n);
    for i in 0..n {
        let inv = inv2(&wl.alpha[i]).map_err(|e| degenerate(i, e))?;
        let rows = &inv * &wl.component_rows(i)?;
        for j in 0..e_aug.cols() {
            e_aug[(i, j)] = rows[(0, j)];
            e_aug[(i + n, j)] = rows[(1, j)];
        }
        let v = am.component(i)?;
        alpha.push(&rows * &v.h_i_aug);
        cond_cov.push((&(&inv * &wl.cond_cov[i]) * &inv.hermitian()).hermitian_part());
    }
    Ok(WidelyEstimatorBank {
        kind: WidelyKind::CwcuWlmmse,
        e_aug,
        alpha,
        cond_cov,
    })
}

/// CWCU WLMMSE rows from the closed form
/// `C_xixi (C_xiy Cyy⁻¹ C_yxi)⁻¹ C_xiy Cyy⁻¹`, with `C_yxi = H_i_aug C_xixi`.
///
/// Independent of [`cwcu_wlmmse`]; kept as a cross-check of the `α⁻¹` route.
pub fn cwcu_wlmmse_direct<T: Real>(am: &AugmentedModel<T>) -> Result<Matrix<T>> {
    let n = am.n();
    let m = am.m();
    let mut e_aug = Matrix::zeros(2 * n, 2 * m);
    for i in 0..n {
        let v = am.component(i)?;
        let c_yxi = &v.h_i_aug * &v.cxixi_aug;
        // Cyy⁻¹ C_yxi; its Hermitian is C_xiy Cyy⁻¹
        let w = solve_hpd(am.cyy_aug(), &c_yxi)?;
        let c_xiy_cyy_inv = w.hermitian();
        let inner = &c_xiy_cyy_inv * &c_yxi;
        let inner_inv = inv2(&inner).map_err(|e| degenerate(i, e))?;
        let rows = &(&v.cxixi_aug * &inner_inv) * &c_xiy_cyy_inv;
        for j in 0..2 * m {
            e_aug[(i, j)] = rows[(0, j)];
            e_aug[(i + n, j)] = rows[(1, j)];
        }
    }
    Ok(e_aug)
}

/// Augmented estimate of a single component, `E_i·(y, y*)`.
pub fn component_estimate<T: Real>(
    bank: &WidelyEstimatorBank<T>,
    y: &[Complex<T>],
    i: usize,
) -> Result<[Complex<T>; 2]> {
    let rows = bank.component_rows(i)?;
    let m = bank.m();
    if y.len() != m {
        return Err(Error::dims(
            "component_estimate",
            format!("{m} observations"),
            y.len().to_string(),
        ));
    }
    let mut out = [Complex::zero(); 2];
    for (r, o) in out.iter_mut().enumerate() {
        let row = rows.row(r);
        *o = y.iter().enumerate().fold(Complex::zero(), |acc, (j, &yj)| {
            acc + row[j] * yj + row[j + m] * yj.conj()
        });
    }
    Ok(out)
}
