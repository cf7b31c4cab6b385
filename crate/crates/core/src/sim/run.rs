//! Seeded Monte Carlo driver over the four estimator banks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{gen_channel, gen_generator};
use super::config::SimConfig;
use super::histogram::{EstimateHistogram, HistogramAcc};
use super::rng::{complex_normal, derive_seed, trial_seed, STREAM_CHANNEL, STREAM_GENERATOR};
use crate::constellation::BitSets;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::linear::{self, cwcu_from_lmmse, lmmse};
use crate::llr::{augmented_law, build_law_linear, ConditionalLaw, LlrVector, ProperLaw, LLR_CLAMP};
use crate::model::{augment, build_model};
use crate::widely::{self, cwcu_from_wlmmse, wlmmse};
use crate::{CMatrix, Constellation, LinearEstimatorBank, LinearModel, WidelyEstimatorBank};

/// Estimator slots, in report order. The last one reuses the CWCU WLMMSE
/// estimates with the proper-density shortcut (pseudo-covariance dropped).
pub const ESTIMATORS: [&str; 5] = ["LMMSE", "CWCU-LMMSE", "WLMMSE", "CWCU-WLMMSE", "CWCU-WLMMSE-proper"];
const L: usize = 0;
const CL: usize = 1;
const WL: usize = 2;
const CWL: usize = 3;
const CWLP: usize = 4;

/// Slot of an estimator name in [`ESTIMATORS`].
pub fn estimator_slot(name: &str) -> Option<usize> {
    ESTIMATORS.iter().position(|&e| e == name)
}

/// LLR comparisons tracked per trial: `(a, b)` estimator slots.
pub const PAIRS: [(usize, usize); 3] = [(L, CL), (WL, CWL), (CWLP, CWL)];

/// Trials folded sequentially into one partial aggregate. Fixed so that float
/// sums do not depend on the thread count.
const CHUNK: usize = 64;

pub const NOISE_CONVENTION: &str =
    "Cnn = sigma2*I, sigma2 = (||G||_F^2 * symbol_variance / (n * bits_per_symbol)) / 10^(EbN0_dB/10)";

/// `σ²` for a given Eb/N0: average transmit energy per bit through `G`
/// divided by the linear Eb/N0.
pub fn noise_variance(g: &CMatrix, c: &Constellation, ebn0_db: f64) -> f64 {
    let n = g.cols() as f64;
    let k = c.bits_per_symbol() as f64;
    let fro2 = g.frobenius_norm().powi(2);
    fro2 * c.variance() / (n * k) / 10f64.powf(ebn0_db / 10.0)
}

/// `|C₀₁| / min(C₀₀, C₁₁)` of a 2x2 augmented covariance.
pub fn propriety_ratio(cov: &CMatrix) -> f64 {
    cov[(0, 1)].norm() / cov[(0, 0)].re.min(cov[(1, 1)].re)
}

/// All four estimator banks plus per-component LLR laws for one effective
/// observation matrix and noise level.
#[derive(Clone, Debug)]
pub struct BankSet {
    pub model: LinearModel,
    pub lmmse: LinearEstimatorBank,
    pub cwcu_lmmse: LinearEstimatorBank,
    pub wlmmse: WidelyEstimatorBank,
    pub cwcu_wlmmse: WidelyEstimatorBank,
    laws: [Vec<ConditionalLaw<f64>>; 5],
}

impl BankSet {
    pub fn build(h_eff: CMatrix, c: &Constellation, sigma2: f64) -> Result<Self> {
        let m = h_eff.rows();
        let cnn = CMatrix::scaled_identity(m, Complex64::new(sigma2, 0.0));
        let model = build_model(h_eff, c, cnn)?;
        let am = augment(&model)?;
        let l = lmmse(&model)?;
        let cl = cwcu_from_lmmse(&l, &model)?;
        let wl = wlmmse(&am)?;
        let cwl = cwcu_from_wlmmse(&wl, &am)?;
        let n = model.n();
        let mut laws: [Vec<ConditionalLaw<f64>>; 5] = Default::default();
        for i in 0..n {
            laws[L].push(build_law_linear(&l, c, i)?);
            laws[CL].push(build_law_linear(&cl, c, i)?);
            laws[WL].push(ConditionalLaw::Augmented(augmented_law(&wl, c, i)?));
            let general = augmented_law(&cwl, c, i)?;
            laws[CWLP].push(ConditionalLaw::Proper(ProperLaw::from_augmented_rounded(&general)?));
            laws[CWL].push(ConditionalLaw::Augmented(general));
        }
        Ok(BankSet {
            model,
            lmmse: l,
            cwcu_lmmse: cl,
            wlmmse: wl,
            cwcu_wlmmse: cwl,
            laws,
        })
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn laws(&self, slot: usize) -> &[ConditionalLaw<f64>] {
        &self.laws[slot]
    }

    /// Per-component propriety ratios of the CWCU WLMMSE and WLMMSE estimates.
    pub fn propriety_ratios(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.cwcu_wlmmse.cond_cov.iter().map(propriety_ratio).collect(),
            self.wlmmse.cond_cov.iter().map(propriety_ratio).collect(),
        )
    }

    /// Analytic per-component BMSE in estimator-slot order.
    pub fn bmse_theory(&self, am: &crate::AugmentedModel) -> [Vec<f64>; 5] {
        let cwl = widely::bmse(&self.cwcu_wlmmse.e_aug, am);
        [
            linear::bmse(&self.lmmse.e, &self.model),
            linear::bmse(&self.cwcu_lmmse.e, &self.model),
            widely::bmse(&self.wlmmse.e_aug, am),
            cwl.clone(),
            cwl,
        ]
    }

    /// One noisy transmission of the symbol indices `d` through all banks.
    pub fn run_trial<R: Rng + ?Sized>(
        &self,
        c: &Constellation,
        bits: &BitSets,
        d: &[usize],
        rng: &mut R,
    ) -> Result<TrialReport> {
        let h = self.model.h();
        let sigma2 = self.model.cnn()[(0, 0)].re;
        let x: Vec<Complex64> = d.iter().map(|&q| c.symbols()[q]).collect();
        let mut y = h.mul_vec(&x);
        for v in y.iter_mut() {
            *v += complex_normal(rng, sigma2);
        }
        let cwl_est = self.cwcu_wlmmse.estimate(&y)?;
        let est: [Vec<Complex64>; 5] = [
            self.lmmse.estimate(&y)?,
            self.cwcu_lmmse.estimate(&y)?,
            self.wlmmse.estimate(&y)?,
            cwl_est.clone(),
            cwl_est,
        ];
        let k = c.bits_per_symbol();
        let n = d.len();
        let mut tallies: [EstimatorTally; 5] = std::array::from_fn(|_| EstimatorTally::new(n));
        let mut llrs: [Vec<LlrVector<f64>>; 5] = Default::default();
        for slot in 0..5 {
            let t = &mut tallies[slot];
            for i in 0..n {
                let lv = self.laws[slot][i].llr(est[slot][i], bits);
                let wrong = lv
                    .hard_bits()
                    .enumerate()
                    .filter(|&(b, hb)| hb != c.bit(d[i], b))
                    .count();
                t.bit_errors += wrong as u64;
                t.symbol_errors += u64::from(wrong > 0);
                t.sq_err[i] = (est[slot][i] - x[i]).norm_sqr();
                llrs[slot].push(lv);
            }
            debug_assert!(t.bit_errors <= (n * k) as u64);
        }
        let mut llr_discrepancy = [0.0; 3];
        let mut hard_mismatch = [0u64; 3];
        for (p, &(a, b)) in PAIRS.iter().enumerate() {
            for (la, lb) in llrs[a].iter().zip(&llrs[b]) {
                llr_discrepancy[p] = f64::max(llr_discrepancy[p], paired_discrepancy(&la.values, &lb.values));
                hard_mismatch[p] += u64::from(la.argmax_symbol() != lb.argmax_symbol());
            }
        }
        let [_, _, wl, cwl, _] = est;
        Ok(TrialReport {
            tallies,
            llr_discrepancy,
            hard_mismatch,
            estimates_wl: wl,
            estimates_cwl: cwl,
        })
    }
}

/// `max |a_b − b_b|` over bits, ignoring bits where both LLRs saturate the
/// clamp with the same sign.
pub fn paired_discrepancy(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let saturated = x.abs() >= LLR_CLAMP && y.abs() >= LLR_CLAMP && x.signum() == y.signum();
            if saturated {
                0.0
            } else {
                (x - y).abs()
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorTally {
    pub bit_errors: u64,
    pub symbol_errors: u64,
    /// Squared error per component.
    pub sq_err: Vec<f64>,
}

impl EstimatorTally {
    fn new(n: usize) -> Self {
        EstimatorTally {
            bit_errors: 0,
            symbol_errors: 0,
            sq_err: vec![0.0; n],
        }
    }

    fn merge(&mut self, other: &EstimatorTally) {
        self.bit_errors += other.bit_errors;
        self.symbol_errors += other.symbol_errors;
        for (a, b) in self.sq_err.iter_mut().zip(&other.sq_err) {
            *a += b;
        }
    }
}

/// Outcome of one symbol vector.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    /// Indexed by estimator slot (see [`ESTIMATORS`]).
    pub tallies: [EstimatorTally; 5],
    /// Indexed by [`PAIRS`].
    pub llr_discrepancy: [f64; 3],
    /// Components whose most likely symbol differs, indexed by [`PAIRS`].
    pub hard_mismatch: [u64; 3],
    pub estimates_wl: Vec<Complex64>,
    pub estimates_cwl: Vec<Complex64>,
}

#[derive(Clone, Debug)]
struct PointAcc {
    trials: u64,
    tallies: [EstimatorTally; 5],
    llr_sum: [f64; 3],
    llr_max: [f64; 3],
    hard_mismatch: [u64; 3],
    hist: Option<[HistogramAcc; 2]>,
}

impl PointAcc {
    fn new(n: usize, symbols: usize, config: &SimConfig) -> Self {
        PointAcc {
            trials: 0,
            tallies: std::array::from_fn(|_| EstimatorTally::new(n)),
            llr_sum: [0.0; 3],
            llr_max: [0.0; 3],
            hard_mismatch: [0; 3],
            hist: config
                .histogram
                .as_ref()
                .map(|h| std::array::from_fn(|_| HistogramAcc::new(symbols, h.bins, h.range))),
        }
    }

    fn push(&mut self, d: &[usize], t: &TrialReport) {
        self.trials += 1;
        for (a, b) in self.tallies.iter_mut().zip(&t.tallies) {
            a.merge(b);
        }
        for p in 0..3 {
            self.llr_sum[p] += t.llr_discrepancy[p];
            self.llr_max[p] = self.llr_max[p].max(t.llr_discrepancy[p]);
            self.hard_mismatch[p] += t.hard_mismatch[p];
        }
        if let Some([wl, cwl]) = self.hist.as_mut() {
            for (i, &q) in d.iter().enumerate() {
                wl.record(q, t.estimates_wl[i]);
                cwl.record(q, t.estimates_cwl[i]);
            }
        }
    }

    fn merge(&mut self, o: &PointAcc) {
        self.trials += o.trials;
        for (a, b) in self.tallies.iter_mut().zip(&o.tallies) {
            a.merge(b);
        }
        for p in 0..3 {
            self.llr_sum[p] += o.llr_sum[p];
            self.llr_max[p] = self.llr_max[p].max(o.llr_max[p]);
            self.hard_mismatch[p] += o.hard_mismatch[p];
        }
        if let (Some([a0, a1]), Some([b0, b1])) = (self.hist.as_mut(), o.hist.as_ref()) {
            a0.merge(b0);
            a1.merge(b1);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimator: String,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub symbols: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    /// Monte Carlo BMSE per component (empty when no trials ran).
    pub bmse_monte_carlo: Vec<f64>,
    pub bmse_monte_carlo_mean: f64,
    /// Analytic BMSE per component, averaged over channel realizations.
    pub bmse_theory: Vec<f64>,
    pub bmse_theory_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDiscrepancy {
    pub estimator_a: String,
    pub estimator_b: String,
    /// Mean over trials of the per-trial max `|Λ_a − Λ_b|`.
    pub mean: f64,
    pub max: f64,
    pub hard_decision_mismatches: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProprietyStats {
    pub estimator: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Fraction of (realization, component) pairs with ratio below 1e-3.
    pub fraction_below_1e_3: f64,
    /// Largest ratio within each channel realization.
    pub max_per_realization: Vec<f64>,
}

impl ProprietyStats {
    fn new(estimator: &str, per_realization: &[Vec<f64>]) -> Self {
        let all: Vec<f64> = per_realization.iter().flatten().copied().collect();
        let count = all.len().max(1) as f64;
        ProprietyStats {
            estimator: estimator.into(),
            min: all.iter().copied().fold(f64::INFINITY, f64::min),
            max: all.iter().copied().fold(0.0, f64::max),
            mean: all.iter().sum::<f64>() / count,
            fraction_below_1e_3: all.iter().filter(|&&r| r < 1e-3).count() as f64 / count,
            max_per_realization: per_realization
                .iter()
                .map(|r| r.iter().copied().fold(0.0, f64::max))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub ebn0_db: f64,
    pub sigma2: f64,
    pub trials: u64,
    pub estimators: Vec<EstimatorReport>,
    pub llr_discrepancy: Vec<PairDiscrepancy>,
    pub propriety: Vec<ProprietyStats>,
    /// BER(LMMSE) = BER(CWCU LMMSE) and BER(WLMMSE) = BER(CWCU WLMMSE).
    pub paired_ber_identical: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub histograms: Vec<EstimateHistogram>,
}

impl PointReport {
    pub fn estimator(&self, name: &str) -> Option<&EstimatorReport> {
        self.estimators.iter().find(|e| e.estimator == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SimConfig,
    pub constellation: String,
    pub m: usize,
    pub n: usize,
    pub bits_per_symbol: usize,
    pub noise_convention: String,
    pub llr_clamp: f64,
    pub points: Vec<PointReport>,
}

/// Generator, constellation and channel realizations shared by all SNR points.
#[derive(Clone, Debug)]
pub struct Link {
    pub constellation: Constellation,
    pub bits: BitSets,
    pub g: CMatrix,
    pub channels: Vec<CMatrix>,
}

impl Link {
    pub fn build(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let constellation = config.load_constellation()?;
        let g = gen_generator(&config.generator, derive_seed(config.seed, STREAM_GENERATOR, 0))?;
        let channels = (0..config.channel_realizations)
            .map(|r| {
                gen_channel(
                    &config.channel,
                    g.rows(),
                    derive_seed(config.seed, STREAM_CHANNEL, r as u64),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Link {
            bits: constellation.bit_sets(),
            constellation,
            g,
            channels,
        })
    }

    pub fn effective(&self, r: usize) -> CMatrix {
        &self.channels[r] * &self.g
    }
}

fn with_context(e: Error, ebn0_db: f64, r: usize) -> Error {
    match e {
        Error::DegenerateComponent { index, reason } => Error::DegenerateComponent {
            index,
            reason: format!("{reason} (Eb/N0 {ebn0_db} dB, channel realization {r})"),
        },
        other => other,
    }
}

/// Runs the configured experiment on `jobs` worker threads (0 = all cores).
/// The report is bit-identical for any `jobs`.
pub fn run_trials(config: &SimConfig, jobs: usize) -> Result<RunReport> {
    pool(jobs)?.install(|| run_inner(config))
}

pub type Pool = rayon::ThreadPool;

/// Worker pool with `jobs` threads (0 = one per core).
pub fn pool(jobs: usize) -> Result<Pool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::BadSpec(format!("cannot start worker pool: {e}")))
}

/// Validates the config and builds every estimator bank without running
/// trials.
pub fn dry_run(config: &SimConfig) -> Result<RunReport> {
    let mut c = config.clone();
    c.trials = 0;
    run_trials(&c, 1).map(|mut r| {
        r.config.trials = config.trials;
        r
    })
}

/// Runs the experiment with histogram collection enabled and returns the
/// per-symbol histograms of every SNR point.
pub fn histogram_estimates(config: &SimConfig, bins: usize, jobs: usize) -> Result<Vec<EstimateHistogram>> {
    let mut c = config.clone();
    let range = c.histogram.as_ref().map_or(2.0, |h| h.range);
    c.histogram = Some(super::config::HistogramSpec { bins, range });
    let report = run_trials(&c, jobs)?;
    Ok(report.points.into_iter().flat_map(|p| p.histograms).collect())
}

fn run_inner(config: &SimConfig) -> Result<RunReport> {
    let link = Link::build(config)?;
    let c = &link.constellation;
    let (m, n) = link.g.shape();
    let k = c.bits_per_symbol();
    let r_count = link.channels.len();
    let effective: Vec<CMatrix> = (0..r_count).map(|r| link.effective(r)).collect();
    let mut points = Vec::with_capacity(config.ebn0_db.len());
    for (s, &ebn0_db) in config.ebn0_db.iter().enumerate() {
        let sigma2 = noise_variance(&link.g, c, ebn0_db);
        let banks: Vec<(BankSet, [Vec<f64>; 5])> = effective
            .par_iter()
            .enumerate()
            .map(|(r, h)| {
                let b = BankSet::build(h.clone(), c, sigma2).map_err(|e| with_context(e, ebn0_db, r))?;
                let am = augment(&b.model)?;
                let theory = b.bmse_theory(&am);
                Ok((b, theory))
            })
            .collect::<Result<_>>()?;

        let chunks = config.trials.div_ceil(CHUNK);
        let partials: Vec<PointAcc> = (0..chunks)
            .into_par_iter()
            .map(|ch| {
                let mut acc = PointAcc::new(n, c.len(), config);
                for t in ch * CHUNK..((ch + 1) * CHUNK).min(config.trials) {
                    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, s, t));
                    let d: Vec<usize> = (0..n).map(|_| rng.random_range(0..c.len())).collect();
                    let r = t % r_count;
                    let report = banks[r]
                        .0
                        .run_trial(c, &link.bits, &d, &mut rng)
                        .map_err(|e| with_context(e, ebn0_db, r))?;
                    acc.push(&d, &report);
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut acc = PointAcc::new(n, c.len(), config);
        for p in &partials {
            acc.merge(p);
        }
        points.push(point_report(&acc, &banks, ebn0_db, sigma2, n, k, c));
    }
    Ok(RunReport {
        config: config.clone(),
        constellation: c.name().to_string(),
        m,
        n,
        bits_per_symbol: k,
        noise_convention: NOISE_CONVENTION.to_string(),
        llr_clamp: LLR_CLAMP,
        points,
    })
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn point_report(
    acc: &PointAcc,
    banks: &[(BankSet, [Vec<f64>; 5])],
    ebn0_db: f64,
    sigma2: f64,
    n: usize,
    k: usize,
    c: &Constellation,
) -> PointReport {
    let trials = acc.trials;
    let symbols = trials * n as u64;
    let bits = symbols * k as u64;
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let estimators = ESTIMATORS
        .iter()
        .enumerate()
        .map(|(slot, name)| {
            let t = &acc.tallies[slot];
            let mc: Vec<f64> = if trials == 0 {
                Vec::new()
            } else {
                t.sq_err.iter().map(|s| s / trials as f64).collect()
            };
            let mut theory = vec![0.0; n];
            for (_, th) in banks {
                for (a, b) in theory.iter_mut().zip(&th[slot]) {
                    *a += b / banks.len() as f64;
                }
            }
            EstimatorReport {
                estimator: name.to_string(),
                bits,
                bit_errors: t.bit_errors,
                ber: ratio(t.bit_errors, bits),
                symbols,
                symbol_errors: t.symbol_errors,
                ser: ratio(t.symbol_errors, symbols),
                bmse_monte_carlo_mean: mean(&mc),
                bmse_monte_carlo: mc,
                bmse_theory_mean: mean(&theory),
                bmse_theory: theory,
            }
        })
        .collect();
    let llr_discrepancy = PAIRS
        .iter()
        .enumerate()
        .map(|(p, &(a, b))| PairDiscrepancy {
            estimator_a: ESTIMATORS[a].into(),
            estimator_b: ESTIMATORS[b].into(),
            mean: if trials == 0 {
                0.0
            } else {
                acc.llr_sum[p] / trials as f64
            },
            max: acc.llr_max[p],
            hard_decision_mismatches: acc.hard_mismatch[p],
        })
        .collect();
    let (cwl, wl): (Vec<Vec<f64>>, Vec<Vec<f64>>) = banks.iter().map(|(b, _)| b.propriety_ratios()).unzip();
    let histograms = match &acc.hist {
        Some([h_wl, h_cwl]) => vec![
            h_cwl.finish(ESTIMATORS[CWL], ebn0_db, c.symbols(), c.labels()),
            h_wl.finish(ESTIMATORS[WL], ebn0_db, c.symbols(), c.labels()),
        ],
        None => Vec::new(),
    };
    PointReport {
        ebn0_db,
        sigma2,
        trials,
        paired_ber_identical: acc.tallies[L].bit_errors == acc.tallies[CL].bit_errors
            && acc.tallies[WL].bit_errors == acc.tallies[CWL].bit_errors,
        estimators,
        llr_discrepancy,
        propriety: vec![
            ProprietyStats::new(ESTIMATORS[CWL], &cwl),
            ProprietyStats::new(ESTIMATORS[WL], &wl),
        ],
        histograms,
    }
}

/// Predicted conditional mean of a widely linear estimate: `α₀₀ s + α₀₁ s*`.
pub fn widely_mapped_point(alpha: &Matrix<f64>, s: Complex64) -> Complex64 {
    alpha[(0, 0)] * s + alpha[(0, 1)] * s.conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::channel::{ChannelSpec, GeneratorSpec};

    fn cfg(trials: usize) -> SimConfig {
        SimConfig {
            constellation: "8qam-rect".into(),
            constellation_file: None,
            channel: ChannelSpec::AwgnIdentity,
            generator: GeneratorSpec::RandomSemiUnitary { m: 8, n: 6 },
            ebn0_db: vec![0.0, 10.0],
            trials,
            channel_realizations: 1,
            seed: 11,
            histogram: None,
            output_dir: None,
        }
    }

    #[test]
    fn propriety_ratio_examples() {
        assert_eq!(propriety_ratio(&CMatrix::identity(2)), 0.0);
        let a = CMatrix::from_rows(&[
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0005, 0.0)],
            &[Complex64::new(0.0005, 0.0), Complex64::new(1.0, 0.0)],
        ]);
        assert!((propriety_ratio(&a) - 5e-4).abs() < 1e-18);
        assert!(propriety_ratio(&a) < 1e-3);
    }

    #[test]
    fn noise_convention() {
        let g = CMatrix::identity(4);
        let c = Constellation::qpsk();
        assert!((noise_variance(&g, &c, 0.0) - 0.5).abs() < 1e-15);
        assert!((noise_variance(&g, &c, 10.0) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn job_count_does_not_change_report() {
        let c = cfg(300);
        let a = run_trials(&c, 1).unwrap();
        let b = run_trials(&c, 4).unwrap();
        assert_eq!(a, b);
        for p in &a.points {
            assert!(p.paired_ber_identical);
            assert_eq!(p.trials, 300);
        }
    }

    #[test]
    fn noiseless_limit_has_no_errors() {
        let mut c = cfg(50);
        c.generator = GeneratorSpec::Identity { m: 4, n: 4 };
        c.ebn0_db = vec![120.0];
        let r = run_trials(&c, 1).unwrap();
        for e in &r.points[0].estimators {
            assert_eq!(e.bit_errors, 0, "{}", e.estimator);
        }
    }

    #[test]
    fn dry_run_builds_banks_only() {
        let r = dry_run(&cfg(1000)).unwrap();
        assert_eq!(r.config.trials, 1000);
        for p in &r.points {
            assert_eq!(p.trials, 0);
            assert!(p
                .estimators
                .iter()
                .all(|e| e.bit_errors == 0 && e.bmse_theory.len() == 6));
        }
    }

    #[test]
    fn empty_run_histograms_are_zero() {
        let h = histogram_estimates(&cfg(0), 8, 1).unwrap();
        assert_eq!(h.len(), 4);
        assert!(h.iter().all(|e| e.symbols.iter().all(|s| s.count == 0)));
    }

    #[test]
    fn saturated_llrs_are_not_discrepancies() {
        assert_eq!(paired_discrepancy(&[80.0, -1.0], &[60.0, -1.0]), 0.0);
        assert_eq!(paired_discrepancy(&[80.0], &[-60.0]), 140.0);
    }
}
