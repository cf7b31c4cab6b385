//! Random linear models and the LLR-equality harness over them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{complex_normal, derive_seed, STREAM_MODEL};
use crate::constellation::BitSets;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::linear::{cwcu_from_lmmse, lmmse};
use crate::llr::{build_law_linear, build_law_widely, max_abs_diff, ConditionalLaw, LlrDumpRow};
use crate::model::{augment, build_model};
use crate::widely::{cwcu_from_wlmmse, wlmmse};
use crate::{CMatrix, Constellation, LinearModel};

/// Model with `H_ij ~ CN(0, 1)` and `Cnn = s·(A·Aᴴ/m + 0.1·I)`, `A_ij ~ CN(0, 1)`,
/// `s` log-uniform in `[10^-1.5, 10^0.5]`. Symbols are i.i.d. from `c`.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, c: &Constellation) -> Result<LinearModel> {
    let h = CMatrix::from_fn(m, n, |_, _| complex_normal(rng, 1.0));
    let a = CMatrix::from_fn(m, m, |_, _| complex_normal(rng, 1.0));
    let s = 10f64.powf(rng.random_range(-1.5..0.5));
    let gram = (&a * &a.hermitian()).scale_real(1.0 / m as f64);
    let cnn = (&gram + &CMatrix::scaled_identity(m, Complex64::new(0.1, 0.0)))
        .scale_real(s)
        .hermitian_part();
    build_model(h, c, cnn)
}

/// Draws `y = H·x + n` with `x` uniform over `c` and `n ~ CN(0, Cnn)`;
/// returns the symbol indices and `y`.
pub fn draw_observation<R: Rng + ?Sized>(
    rng: &mut R,
    model: &LinearModel,
    noise: &Cholesky<f64>,
    c: &Constellation,
) -> (Vec<usize>, Vec<Complex64>) {
    let d: Vec<usize> = (0..model.n()).map(|_| rng.random_range(0..c.len())).collect();
    let x: Vec<Complex64> = d.iter().map(|&q| c.symbols()[q]).collect();
    let z: Vec<Complex64> = (0..model.m()).map(|_| complex_normal(rng, 1.0)).collect();
    let v = noise.factor().mul_vec(&z);
    let y = model.h().mul_vec(&x).into_iter().zip(v).map(|(a, b)| a + b).collect();
    (d, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorPair {
    /// LMMSE vs CWCU LMMSE, proper engine.
    Linear,
    /// WLMMSE vs CWCU WLMMSE, augmented engine.
    Widely,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlrCheckSpec {
    pub models: usize,
    pub observations: usize,
    pub seed: u64,
    pub max_m: usize,
    pub max_n: usize,
    pub constellations: Vec<String>,
    /// Collect per-bit rows of this pair for a CSV dump.
    pub dump: Option<EstimatorPair>,
}

impl Default for LlrCheckSpec {
    fn default() -> Self {
        LlrCheckSpec {
            models: 200,
            observations: 100,
            seed: 0,
            max_m: 8,
            max_n: 6,
            constellations: vec!["qpsk".into(), "16qam".into(), "8qam-rect".into()],
            dump: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub max: f64,
    pub mean: f64,
    /// Model index attaining `max`.
    pub worst_model: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlrCheckReport {
    pub models: usize,
    pub observations_per_model: usize,
    pub linear: PairSummary,
    pub widely: PairSummary,
    #[serde(skip)]
    pub dump: Vec<LlrDumpRow>,
}

impl LlrCheckReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.linear.max.max(self.widely.max)
    }
}

struct ModelOutcome {
    linear: (f64, f64),
    widely: (f64, f64),
    dump: Vec<LlrDumpRow>,
}

fn laws(build: impl Fn(usize) -> Result<ConditionalLaw<f64>>, n: usize) -> Result<Vec<ConditionalLaw<f64>>> {
    (0..n).map(build).collect()
}

fn check_model(spec: &LlrCheckSpec, j: usize, cons: &[(Constellation, BitSets)]) -> Result<ModelOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, STREAM_MODEL, j as u64));
    let (c, bits) = &cons[j % cons.len()];
    let m = rng.random_range(1..=spec.max_m);
    let n = rng.random_range(1..=m.min(spec.max_n));
    let model = random_model(&mut rng, m, n, c)?;
    let am = augment(&model)?;
    let l = lmmse(&model)?;
    let cl = cwcu_from_lmmse(&l, &model)?;
    let wl = wlmmse(&am)?;
    let cwl = cwcu_from_wlmmse(&wl, &am)?;
    let law_l = laws(|i| build_law_linear(&l, c, i), n)?;
    let law_cl = laws(|i| build_law_linear(&cl, c, i), n)?;
    let law_wl = laws(|i| build_law_widely(&wl, c, i), n)?;
    let law_cwl = laws(|i| build_law_widely(&cwl, c, i), n)?;
    let noise = Cholesky::new(model.cnn())?;

    let mut out = ModelOutcome {
        linear: (0.0, 0.0),
        widely: (0.0, 0.0),
        dump: Vec::new(),
    };
    let mut sums = (0.0, 0.0);
    for obs in 0..spec.observations {
        let (_, y) = draw_observation(&mut rng, &model, &noise, c);
        let pairs = [
            (
                EstimatorPair::Linear,
                l.estimate(&y)?,
                cl.estimate(&y)?,
                &law_l,
                &law_cl,
            ),
            (
                EstimatorPair::Widely,
                wl.estimate(&y)?,
                cwl.estimate(&y)?,
                &law_wl,
                &law_cwl,
            ),
        ];
        for (kind, ea, eb, la, lb) in pairs {
            let mut worst = 0.0f64;
            for i in 0..n {
                let a = la[i].llr(ea[i], bits);
                let b = lb[i].llr(eb[i], bits);
                worst = worst.max(max_abs_diff(&a.values, &b.values));
                if spec.dump == Some(kind) {
                    for (bit, (&x, &z)) in a.values.iter().zip(&b.values).enumerate() {
                        out.dump.push(LlrDumpRow {
                            trial: j * spec.observations + obs,
                            component: i,
                            bit,
                            llr_a: x,
                            llr_b: z,
                        });
                    }
                }
            }
            match kind {
                EstimatorPair::Linear => {
                    out.linear.0 = out.linear.0.max(worst);
                    sums.0 += worst;
                }
                EstimatorPair::Widely => {
                    out.widely.0 = out.widely.0.max(worst);
                    sums.1 += worst;
                }
            }
        }
    }
    let obs = spec.observations.max(1) as f64;
    out.linear.1 = sums.0 / obs;
    out.widely.1 = sums.1 / obs;
    Ok(out)
}

fn summarize(values: impl Iterator<Item = (f64, f64)>) -> PairSummary {
    let mut s = PairSummary {
        max: 0.0,
        mean: 0.0,
        worst_model: 0,
    };
    let mut count = 0usize;
    for (j, (max, mean)) in values.enumerate() {
        if max > s.max {
            s.max = max;
            s.worst_model = j;
        }
        s.mean += mean;
        count += 1;
    }
    s.mean /= count.max(1) as f64;
    s
}

/// Builds `spec.models` random models (constellations cycled in the listed
/// order) and compares paired pre-clamp LLRs on `spec.observations` draws
/// each. Runs on the current rayon pool; the result does not depend on it.
pub fn llr_check(spec: &LlrCheckSpec) -> Result<LlrCheckReport> {
    if spec.constellations.is_empty() || spec.max_m == 0 || spec.max_n == 0 {
        return Err(Error::BadSpec(
            "llr-check needs constellations and max_m, max_n >= 1".into(),
        ));
    }
    let cons = spec
        .constellations
        .iter()
        .map(|name| {
            Constellation::by_name(name).map(|c| {
                let b = c.bit_sets();
                (c, b)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let outcomes = (0..spec.models)
        .into_par_iter()
        .map(|j| check_model(spec, j, &cons))
        .collect::<Result<Vec<_>>>()?;
    Ok(LlrCheckReport {
        models: spec.models,
        observations_per_model: spec.observations,
        linear: summarize(outcomes.iter().map(|o| o.linear)),
        widely: summarize(outcomes.iter().map(|o| o.widely)),
        dump: outcomes.into_iter().flat_map(|o| o.dump).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_check_is_deterministic_and_tight() {
        let spec = LlrCheckSpec {
            models: 12,
            observations: 10,
            seed: 5,
            dump: Some(EstimatorPair::Widely),
            ..Default::default()
        };
        let a = llr_check(&spec).unwrap();
        let b = llr_check(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.max_discrepancy() < 1e-9, "{a:?}");
        assert!(!a.dump.is_empty());
    }

    #[test]
    fn random_noise_is_hpd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_model(&mut rng, 5, 3, &Constellation::qam16()).unwrap();
        assert!(Cholesky::new(m.cnn()).is_ok());
    }
}
