//! Soft demapping: per-bit log-likelihood ratios from estimated symbols.
//!
//! For equiprobable symbols,
//!
//! ```text
//! Λ_k(x̂) = log Σ_{q: b_k = 1} p(x̂ | s_q) − log Σ_{q: b_k = 0} p(x̂ | s_q)
//! ```
//!
//! where `p(x̂ | s_q)` is a Gaussian approximation of the conditional law of
//! the estimate. Two engines are provided:
//!
//! * proper: `p = exp(−|x̂ − μ_q|² / v) / (π v)`;
//! * augmented: `p = exp(−½ dᴴ C⁻¹ d) / (π √det C)` with
//!   `d = (x̂, x̂*) − μ_q` and `C` the `2 x 2` augmented covariance.
//!
//! The proper engine is the augmented one restricted to `C = v·I₂`. Sums are
//! evaluated in the log domain (max-shifted), so constant density factors
//! cancel exactly between numerator and denominator.

use std::io::Write;

use num_complex::Complex;

use crate::constellation::{BitSets, Constellation};
use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::linalg::Matrix;
use crate::linear::LinearEstimatorBank;
use crate::scalar::Real;
use crate::widely::WidelyEstimatorBank;

/// Magnitude at which [`LlrVector::clamped`] saturates.
pub const LLR_CLAMP: f64 = 50.0;

/// Scalar-variance conditional law: `x̂ | s_q ~ CN(μ_q, v)`.
#[derive(Clone, Debug)]
pub struct ProperLaw<T> {
    means: Vec<Complex<T>>,
    variance: T,
    log_norm: T,
}

impl<T: Real> ProperLaw<T> {
    pub fn new(means: Vec<Complex<T>>, variance: T) -> Result<Self> {
        if !(variance > T::zero()) || !variance.is_finite() {
            return Err(Error::BadModel(format!(
                "conditional variance {variance} is not positive"
            )));
        }
        Ok(ProperLaw {
            means,
            variance,
            log_norm: -(T::PI() * variance).ln(),
        })
    }

    /// Proper approximation of an augmented law: keeps the first mean
    /// component and the top-left variance, drops the pseudo-variance.
    pub fn from_augmented_rounded(law: &AugmentedLaw<T>) -> Result<Self> {
        Self::new(law.means.iter().map(|m| m[0]).collect(), law.cov[(0, 0)].re)
    }

    pub fn means(&self) -> &[Complex<T>] {
        &self.means
    }

    pub fn variance(&self) -> T {
        self.variance
    }

    pub fn log_density(&self, x: Complex<T>, q: usize) -> T {
        self.log_norm - (x - self.means[q]).norm_sqr() / self.variance
    }
}

/// Augmented conditional law: `(x̂, x̂*) | s_q` with mean `μ_q` and `2 x 2`
/// covariance `C`.
#[derive(Clone, Debug)]
pub struct AugmentedLaw<T> {
    means: Vec<[Complex<T>; 2]>,
    cov: Matrix<T>,
    // lower Cholesky factor of cov
    l00: T,
    l10: Complex<T>,
    l11: T,
    log_norm: T,
}

impl<T: Real> AugmentedLaw<T> {
    pub fn new(means: Vec<[Complex<T>; 2]>, cov: Matrix<T>) -> Result<Self> {
        if cov.shape() != (2, 2) {
            return Err(Error::dims(
                "augmented law",
                "2x2 covariance",
                format!("{:?}", cov.shape()),
            ));
        }
        let chol = crate::linalg::Cholesky::new(&cov)?;
        let l = chol.factor();
        let log_norm = -T::PI().ln() - T::lit(0.5) * chol.log_det();
        Ok(AugmentedLaw {
            means,
            l00: l[(0, 0)].re,
            l10: l[(1, 0)],
            l11: l[(1, 1)].re,
            cov,
            log_norm,
        })
    }

    pub fn means(&self) -> &[[Complex<T>; 2]] {
        &self.means
    }

    pub fn cov(&self) -> &Matrix<T> {
        &self.cov
    }

    /// `−½ dᴴ C⁻¹ d`, through the Cholesky factor.
    pub fn exponent(&self, x: [Complex<T>; 2], q: usize) -> T {
        let d0 = x[0] - self.means[q][0];
        let d1 = x[1] - self.means[q][1];
        let z0 = d0 / self.l00;
        let z1 = (d1 - self.l10 * z0) / self.l11;
        -T::lit(0.5) * (z0.norm_sqr() + z1.norm_sqr())
    }

    pub fn log_density(&self, x: [Complex<T>; 2], q: usize) -> T {
        self.log_norm + self.exponent(x, q)
    }
}

#[derive(Clone, Debug)]
pub enum ConditionalLaw<T> {
    Proper(ProperLaw<T>),
    Augmented(AugmentedLaw<T>),
}

impl<T: Real> ConditionalLaw<T> {
    /// LLRs of an estimate `x̂`; the augmented engine evaluates `(x̂, x̂*)`.
    pub fn llr(&self, xhat: Complex<T>, bits: &BitSets) -> LlrVector<T> {
        match self {
            ConditionalLaw::Proper(law) => llr_proper(xhat, law, bits),
            ConditionalLaw::Augmented(law) => llr_general([xhat, xhat.conj()], law, bits),
        }
    }

    pub fn symbols(&self) -> usize {
        match self {
            ConditionalLaw::Proper(l) => l.means.len(),
            ConditionalLaw::Augmented(l) => l.means.len(),
        }
    }
}

/// Per-bit LLRs of one estimated symbol, in label-bit order (pre-clamp), plus
/// the per-symbol log-densities they were computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector<T> {
    pub values: Vec<T>,
    pub log_densities: Vec<T>,
}

impl<T: Real> LlrVector<T> {
    pub fn clamped(&self) -> Vec<T> {
        let lim = T::lit(LLR_CLAMP);
        self.values.iter().map(|v| v.max(-lim).min(lim)).collect()
    }

    /// Bit decisions from the LLR signs (`Λ > 0` decides 1).
    pub fn hard_bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.values.iter().map(|&v| v > T::zero())
    }

    /// Most likely symbol index (ties to the lowest index).
    pub fn argmax_symbol(&self) -> usize {
        let mut best = 0;
        for (q, &v) in self.log_densities.iter().enumerate() {
            if v > self.log_densities[best] {
                best = q;
            }
        }
        best
    }
}

fn log_sum_exp<T: Real>(values: impl Iterator<Item = T> + Clone) -> T {
    let max = values.clone().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<T>().ln()
}

fn llr_from_log_densities<T: Real>(log_densities: Vec<T>, bits: &BitSets) -> LlrVector<T> {
    let values = bits
        .ones
        .iter()
        .zip(&bits.zeros)
        .map(|(ones, zeros)| {
            log_sum_exp(ones.iter().map(|&q| log_densities[q])) - log_sum_exp(zeros.iter().map(|&q| log_densities[q]))
        })
        .collect();
    LlrVector { values, log_densities }
}

/// LLRs with the proper complex Gaussian density.
pub fn llr_proper<T: Real>(xhat: Complex<T>, law: &ProperLaw<T>, bits: &BitSets) -> LlrVector<T> {
    let ld = (0..law.means.len()).map(|q| law.log_density(xhat, q)).collect();
    llr_from_log_densities(ld, bits)
}

/// LLRs with the general (augmented) complex Gaussian density.
pub fn llr_general<T: Real>(xhat_aug: [Complex<T>; 2], law: &AugmentedLaw<T>, bits: &BitSets) -> LlrVector<T> {
    let ld = (0..law.means.len()).map(|q| law.log_density(xhat_aug, q)).collect();
    llr_from_log_densities(ld, bits)
}

/// Law of `x̂_i` for a linear estimator: means `α_i s_q`, variance `cond_var_i`.
pub fn build_law_linear<T: Real>(
    bank: &LinearEstimatorBank<T>,
    c: &Constellation<T>,
    i: usize,
) -> Result<ConditionalLaw<T>> {
    if i >= bank.n() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: bank.n(),
        });
    }
    let a = bank.alpha[i];
    let means = c.symbols().iter().map(|s| s.scale(a)).collect();
    ProperLaw::new(means, bank.cond_var[i])
        .map(ConditionalLaw::Proper)
        .map_err(|_| Error::DegenerateComponent {
            index: i,
            reason: format!("conditional variance {} is not positive", bank.cond_var[i]),
        })
}

/// Augmented law of `x̂_i` for a widely linear estimator: means
/// `α_i·(s_q, s_q*)`, covariance `cond_cov_i`.
pub fn build_law_widely<T: Real>(
    bank: &WidelyEstimatorBank<T>,
    c: &Constellation<T>,
    i: usize,
) -> Result<ConditionalLaw<T>> {
    augmented_law(bank, c, i).map(ConditionalLaw::Augmented)
}

pub fn augmented_law<T: Real>(
    bank: &WidelyEstimatorBank<T>,
    c: &Constellation<T>,
    i: usize,
) -> Result<AugmentedLaw<T>> {
    if i >= bank.n() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: bank.n(),
        });
    }
    let a = &bank.alpha[i];
    let means = c
        .symbols()
        .iter()
        .map(|&s| {
            let sc = s.conj();
            [a[(0, 0)] * s + a[(0, 1)] * sc, a[(1, 0)] * s + a[(1, 1)] * sc]
        })
        .collect();
    AugmentedLaw::new(means, bank.cond_cov[i].clone())
}

/// LLRs of every component of an estimate vector.
pub fn component_llrs<T: Real>(
    estimates: &[Complex<T>],
    laws: &[ConditionalLaw<T>],
    bits: &BitSets,
) -> Result<Vec<LlrVector<T>>> {
    if estimates.len() != laws.len() {
        return Err(Error::dims(
            "component_llrs",
            format!("{} estimates", laws.len()),
            estimates.len().to_string(),
        ));
    }
    Ok(estimates.iter().zip(laws).map(|(&x, law)| law.llr(x, bits)).collect())
}

/// Largest `|Λ_A − Λ_B|` over the bits of each component, for two
/// estimator/law pairs evaluated on the same observation.
pub fn llr_equality_report<T: Real>(
    a: (&[Complex<T>], &[ConditionalLaw<T>]),
    b: (&[Complex<T>], &[ConditionalLaw<T>]),
    bits: &BitSets,
) -> Result<Vec<T>> {
    let la = component_llrs(a.0, a.1, bits)?;
    let lb = component_llrs(b.0, b.1, bits)?;
    if la.len() != lb.len() {
        return Err(Error::dims(
            "llr_equality_report",
            format!("{} components", la.len()),
            lb.len().to_string(),
        ));
    }
    Ok(la
        .iter()
        .zip(&lb)
        .map(|(x, y)| max_abs_diff(&x.values, &y.values))
        .collect())
}

pub fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), T::max)
}

/// One line of the LLR diagnostic dump.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrDumpRow {
    pub trial: usize,
    pub component: usize,
    pub bit: usize,
    pub llr_a: f64,
    pub llr_b: f64,
}

pub const LLR_DUMP_HEADER: &str = "trial,component,bit,llr_A,llr_B,abs_diff";

/// Writes the dump as CSV with 17 significant digits.
pub fn write_llr_dump<W: Write>(mut w: W, rows: &[LlrDumpRow]) -> std::io::Result<()> {
    writeln!(w, "{LLR_DUMP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.trial,
            r.component,
            r.bit,
            fmt17(r.llr_a),
            fmt17(r.llr_b),
            fmt17((r.llr_a - r.llr_b).abs())
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = Matrix<f64>;

    fn qpsk_law(var: f64, alpha: f64) -> (Constellation<f64>, ProperLaw<f64>) {
        let con = Constellation::qpsk();
        let means = con.symbols().iter().map(|s| s * alpha).collect();
        let law = ProperLaw::new(means, var).unwrap();
        (con, law)
    }

    #[test]
    fn llr_signs_follow_label() {
        let (con, law) = qpsk_law(0.1, 1.0);
        let q = con.index_of_label(0b11).unwrap();
        let l = llr_proper(con.symbols()[q], &law, &con.bit_sets());
        assert!(l.values.iter().all(|&v| v > 0.0));
        let q = con.index_of_label(0b00).unwrap();
        let l = llr_proper(con.symbols()[q], &law, &con.bit_sets());
        assert!(l.values.iter().all(|&v| v < 0.0));
    }

    #[test]
    fn origin_is_ambiguous() {
        let (con, law) = qpsk_law(0.5, 1.0);
        let l = llr_proper(c(0.0, 0.0), &law, &con.bit_sets());
        assert!(l.values.iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn matches_direct_enumeration() {
        let (con, law) = qpsk_law(0.7, 0.8);
        let bits = con.bit_sets();
        for k in 0..20 {
            let t = k as f64;
            let x = c((0.3 * t).sin(), (0.7 * t).cos() * 0.9);
            let l = llr_proper(x, &law, &bits);
            for b in 0..2 {
                let dens = |q: usize| {
                    let mu = con.symbols()[q] * 0.8;
                    (-(x - mu).norm_sqr() / 0.7).exp() / (std::f64::consts::PI * 0.7)
                };
                let num: f64 = bits.ones[b].iter().map(|&q| dens(q)).sum();
                let den: f64 = bits.zeros[b].iter().map(|&q| dens(q)).sum();
                assert!((l.values[b] - (num / den).ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn augmented_engine_matches_proper_on_proper_law() {
        let (con, law) = qpsk_law(0.35, 0.9);
        let aug = AugmentedLaw::new(
            law.means().iter().map(|m| [*m, m.conj()]).collect(),
            M::identity(2).scale_real(0.35),
        )
        .unwrap();
        let bits = con.bit_sets();
        for k in 0..100 {
            let t = k as f64 * 0.13;
            let x = c(1.5 * (2.0 * t).sin(), 1.2 * (3.0 * t).cos());
            let a = llr_proper(x, &law, &bits);
            let b = llr_general([x, x.conj()], &aug, &bits);
            assert!(max_abs_diff(&a.values, &b.values) < 1e-9);
            for q in 0..4 {
                assert!((a.log_densities[q] - b.log_densities[q]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn improper_law_outer_point_sign_pattern() {
        let con = Constellation::qam8_rect();
        let cov = M::from_rows(&[&[c(0.01, 0.0), c(0.004, 0.0)], &[c(0.004, 0.0), c(0.01, 0.0)]]);
        let law = AugmentedLaw::new(con.symbols().iter().map(|&s| [s, s.conj()]).collect(), cov).unwrap();
        let bits = con.bit_sets();
        for (q, &s) in con.symbols().iter().enumerate() {
            let l = llr_general([s, s.conj()], &law, &bits);
            for k in 0..3 {
                assert_eq!(l.values[k] > 0.0, con.bit(q, k));
            }
        }
    }

    #[test]
    fn equidistant_point_has_zero_llr() {
        let con = Constellation::qpsk();
        let cov = M::identity(2).scale_real(0.2);
        let law = AugmentedLaw::new(con.symbols().iter().map(|&s| [s, s.conj()]).collect(), cov).unwrap();
        // labels 00 and 10 differ in the in-phase bit and share the upper half plane
        let a = con.symbols()[con.index_of_label(0b00).unwrap()];
        let b = con.symbols()[con.index_of_label(0b10).unwrap()];
        let mid = (a + b) * 0.5;
        let l = llr_general([mid, mid.conj()], &law, &con.bit_sets());
        assert!(l.values[0].abs() < 1e-12);
    }

    #[test]
    fn two_symbol_monotonicity() {
        let con = Constellation::new("bpsk", vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![1, 0]).unwrap();
        let law = ProperLaw::new(con.symbols().to_vec(), 0.4).unwrap();
        let bits = con.bit_sets();
        let mut last = f64::NEG_INFINITY;
        for k in 0..=40 {
            let x = c(-2.0 + 0.1 * k as f64, 0.3);
            let v = llr_proper(x, &law, &bits).values[0];
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn clamp_and_rejections() {
        let l = LlrVector {
            values: vec![120.0, -3.0, -75.0],
            log_densities: vec![],
        };
        assert_eq!(l.clamped(), vec![50.0, -3.0, -50.0]);
        assert!(ProperLaw::new(vec![c(0.0, 0.0)], 0.0).is_err());
        let bad = M::from_rows(&[&[c(1.0, 0.0), c(2.0, 0.0)], &[c(2.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(AugmentedLaw::new(vec![], bad), Err(Error::NotHpd { .. })));
    }

    #[test]
    fn dump_format() {
        let rows = vec![LlrDumpRow {
            trial: 0,
            component: 1,
            bit: 2,
            llr_a: 1.5,
            llr_b: 1.25,
        }];
        let mut out = Vec::new();
        write_llr_dump(&mut out, &rows).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(
            s,
            "trial,component,bit,llr_A,llr_B,abs_diff\n0,1,2,1.5000000000000000e0,1.2500000000000000e0,2.5000000000000000e-1\n"
        );
    }
}
