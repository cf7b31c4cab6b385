//! LMMSE and CWCU LMMSE estimators.
//!
//! Row `i` of an estimator matrix `E` produces `x̂_i = e_iᴴ y`. Given `x_i`,
//! the estimate has mean `α_i x_i` with `α_i = e_iᴴ h_i`, and a variance that
//! does not depend on `x_i`:
//!
//! ```text
//! var(x̂_i | x_i) = e_iᴴ (H̄_i C_x̄x̄ H̄_iᴴ + Cnn) e_i
//! ```
//!
//! The CWCU LMMSE estimator rescales every LMMSE row by `1/α_L,i`, which makes
//! each component conditionally unbiased (`α = 1`).

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{solve_hpd, CVector, Matrix};
use crate::model::LinearModel;
use crate::scalar::Real;

/// Below this LMMSE scaling a component is treated as unobservable.
pub const ALPHA_EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinearKind {
    Lmmse,
    CwcuLmmse,
}

impl LinearKind {
    pub fn name(self) -> &'static str {
        match self {
            LinearKind::Lmmse => "LMMSE",
            LinearKind::CwcuLmmse => "CWCU-LMMSE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearEstimatorBank<T> {
    pub kind: LinearKind,
    /// `n x m` estimator matrix.
    pub e: Matrix<T>,
    /// Real conditional scaling `α_i` per component.
    pub alpha: Vec<T>,
    /// Conditional variance per component.
    pub cond_var: Vec<T>,
}

impl<T: Real> LinearEstimatorBank<T> {
    pub fn n(&self) -> usize {
        self.e.rows()
    }

    pub fn estimate(&self, y: &[Complex<T>]) -> Result<CVector<T>> {
        if y.len() != self.e.cols() {
            return Err(Error::dims(
                "estimate",
                format!("{} observations", self.e.cols()),
                y.len().to_string(),
            ));
        }
        Ok(self.e.mul_vec(y))
    }
}

/// `(e_iᴴ h_i, e_iᴴ (H̄_i C_x̄x̄ H̄_iᴴ + Cnn) e_i)` for row `i` of `e`.
///
/// The quadratic form is evaluated as `g·C_x̄x̄·gᴴ + e_iᴴ Cnn e_i` with
/// `g = e_iᴴ H̄_i`, which keeps the cost at `O(m·n + m²)` per component.
pub fn conditional_stats<T: Real>(e: &Matrix<T>, model: &LinearModel<T>, i: usize) -> Result<(Complex<T>, T)> {
    if e.shape() != (model.n(), model.m()) {
        return Err(Error::dims(
            "conditional_stats",
            format!("{}x{} estimator", model.n(), model.m()),
            format!("{:?}", e.shape()),
        ));
    }
    let view = model.component(i)?;
    let row = Matrix::from_row_major(1, e.cols(), e.row(i).to_vec())?;
    let alpha = row
        .row(0)
        .iter()
        .zip(&view.h_i)
        .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b);
    let g = &row * &view.h_bar;
    let ipi = &(&g * &view.cxbar) * &g.hermitian();
    let noise = &(&row * model.cnn()) * &row.hermitian();
    let var = ipi[(0, 0)] + noise[(0, 0)];
    debug_assert!(var.im.abs() <= T::tol(1e-9) * var.re.abs().max(T::one()));
    Ok((alpha, var.re.max(T::zero())))
}

/// Per-component Bayesian MSE `[(EH − I) Cxx (EH − I)ᴴ + E Cnn Eᴴ]_ii`.
pub fn bmse<T: Real>(e: &Matrix<T>, model: &LinearModel<T>) -> Vec<T> {
    let bias = &(e * model.h()) - &Matrix::identity(model.n());
    let total = &(&(&bias * model.cxx()) * &bias.hermitian()) + &(&(e * model.cnn()) * &e.hermitian());
    total.diagonal().iter().map(|z| z.re.max(T::zero())).collect()
}

fn fill_stats<T: Real>(kind: LinearKind, e: Matrix<T>, model: &LinearModel<T>) -> Result<LinearEstimatorBank<T>> {
    let n = model.n();
    let mut alpha = Vec::with_capacity(n);
    let mut cond_var = Vec::with_capacity(n);
    for i in 0..n {
        let (a, v) = conditional_stats(&e, model, i)?;
        if a.im.abs() > T::tol(1e-10) * a.re.abs().max(T::one()) {
            return Err(Error::DegenerateComponent {
                index: i,
                reason: format!("conditional scaling {a} is not real"),
            });
        }
        alpha.push(a.re);
        cond_var.push(v);
    }
    Ok(LinearEstimatorBank {
        kind,
        e,
        alpha,
        cond_var,
    })
}

/// `E_L = Cxx Hᴴ (H Cxx Hᴴ + Cnn)⁻¹`.
pub fn lmmse<T: Real>(model: &LinearModel<T>) -> Result<LinearEstimatorBank<T>> {
    // Cyy⁻¹ H Cxx, then E = (·)ᴴ since Cyy and Cxx are Hermitian
    let x = solve_hpd(&model.cyy(), &(model.h() * model.cxx()))?;
    fill_stats(LinearKind::Lmmse, x.hermitian(), model)
}

/// `E_CL = D·E_L` with `D = diag(1/α_L,i)`.
pub fn cwcu_lmmse<T: Real>(model: &LinearModel<T>) -> Result<LinearEstimatorBank<T>> {
    cwcu_from_lmmse(&lmmse(model)?, model)
}

/// CWCU rows derived from an already computed LMMSE bank.
pub fn cwcu_from_lmmse<T: Real>(
    lmmse: &LinearEstimatorBank<T>,
    model: &LinearModel<T>,
) -> Result<LinearEstimatorBank<T>> {
    let eps = T::tol(ALPHA_EPS);
    let mut e = lmmse.e.clone();
    for (i, &a) in lmmse.alpha.iter().enumerate() {
        if !(a > eps) {
            return Err(Error::DegenerateComponent {
                index: i,
                reason: format!("LMMSE scaling {a} is not above {eps}"),
            });
        }
        let d = a.recip();
        for j in 0..e.cols() {
            e[(i, j)] = e[(i, j)].scale(d);
        }
    }
    fill_stats(LinearKind::CwcuLmmse, e, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::Constellation;
    use crate::model::build_model;
    use crate::scalar::c;

    type M = Matrix<f64>;

    fn scalar_model() -> LinearModel<f64> {
        build_model(M::from_rows(&[&[c(1.0, 0.0)]]), &Constellation::qpsk(), M::identity(1)).unwrap()
    }

    #[test]
    fn scalar_lmmse() {
        let b = lmmse(&scalar_model()).unwrap();
        assert!((b.e[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((b.alpha[0] - 0.5).abs() < 1e-15);
        assert!((b.cond_var[0] - 0.25).abs() < 1e-15);
        assert!((bmse(&b.e, &scalar_model())[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scalar_cwcu_lmmse() {
        let b = cwcu_lmmse(&scalar_model()).unwrap();
        assert!((b.e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((b.alpha[0] - 1.0).abs() < 1e-15);
        assert!((b.cond_var[0] - 1.0).abs() < 1e-15);
        assert!((bmse(&b.e, &scalar_model())[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_estimator() {
        let model = scalar_model();
        let z = M::zeros(1, 1);
        assert_eq!(conditional_stats(&z, &model, 0).unwrap(), (c(0.0, 0.0), 0.0));
        assert!((bmse(&z, &model)[0] - 1.0).abs() < 1e-15);
        assert!(matches!(
            conditional_stats(&z, &model, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn noiseless_identity_limit() {
        let eps = 1e-9;
        let model = build_model(M::identity(3), &Constellation::qpsk(), M::identity(3).scale_real(eps)).unwrap();
        let b = lmmse(&model).unwrap();
        assert!(b.e.max_abs_diff(&M::identity(3)) < 1e-8);
        assert!(b.alpha.iter().all(|a| (a - 1.0).abs() < 1e-8));
    }

    #[test]
    fn diagonal_model_cwcu_is_identity() {
        let s2 = 0.3;
        let model = build_model(M::identity(2), &Constellation::qpsk(), M::identity(2).scale_real(s2)).unwrap();
        let l = lmmse(&model).unwrap();
        let cl = cwcu_lmmse(&model).unwrap();
        assert!(l.e.max_abs_diff(&M::identity(2).scale_real(1.0 / (1.0 + s2))) < 1e-14);
        assert!(cl.e.max_abs_diff(&M::identity(2)) < 1e-14);
        assert!(cl.alpha.iter().all(|a| (a - 1.0).abs() < 1e-14));
    }

    #[test]
    fn toy_model_matches_normal_equations() {
        let h = M::from_rows(&[&[c(1.0, 0.0), c(0.5, 0.0)], &[c(0.5, 0.0), c(1.0, 0.0)]]);
        let model = build_model(h.clone(), &Constellation::qpsk(), M::identity(2).scale_real(0.1)).unwrap();
        let b = lmmse(&model).unwrap();
        assert!(b.alpha.iter().all(|&a| a > 0.0 && a < 1.0));
        // normal equations E·Cyy = Cxx·Hᴴ, solved here with Cramer's rule
        let cyy = model.cyy();
        let rhs = h.hermitian();
        let det = cyy[(0, 0)] * cyy[(1, 1)] - cyy[(0, 1)] * cyy[(1, 0)];
        let inv = M::from_rows(&[
            &[cyy[(1, 1)] / det, -cyy[(0, 1)] / det],
            &[-cyy[(1, 0)] / det, cyy[(0, 0)] / det],
        ]);
        let oracle = &rhs * &inv;
        assert!(b.e.max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn degenerate_component_flagged() {
        let h = M::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]]);
        let model = build_model(h, &Constellation::qpsk(), M::identity(2)).unwrap();
        assert!(matches!(
            cwcu_lmmse(&model),
            Err(Error::DegenerateComponent { index: 1, .. })
        ));
    }

    #[test]
    fn estimate_checks_length() {
        let b = lmmse(&scalar_model()).unwrap();
        assert!(b.estimate(&[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        assert_eq!(b.estimate(&[c(2.0, 0.0)]).unwrap(), vec![c(1.0, 0.0)]);
    }
}
