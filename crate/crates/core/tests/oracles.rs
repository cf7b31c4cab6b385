//! Monte Carlo oracles for the conditional statistics the estimator banks
//! compute in closed form.

use cwcu_core::linalg::Cholesky;
use cwcu_core::linear::{cwcu_from_lmmse, lmmse};
use cwcu_core::model::augment;
use cwcu_core::sim::random_model;
use cwcu_core::sim::rng::complex_normal;
use cwcu_core::widely::{component_estimate, cwcu_from_wlmmse, wlmmse};
use cwcu_core::{Constellation, LinearModel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 100_000;

/// Draws `y` with component `i` pinned to symbol `q` and the rest uniform.
fn draw_conditioned(
    rng: &mut ChaCha8Rng,
    model: &LinearModel,
    noise: &Cholesky<f64>,
    c: &Constellation,
    i: usize,
    q: usize,
) -> Vec<Complex64> {
    let x: Vec<Complex64> = (0..model.n())
        .map(|j| c.symbols()[if j == i { q } else { rng.random_range(0..c.len()) }])
        .collect();
    let z: Vec<Complex64> = (0..model.m()).map(|_| complex_normal(rng, 1.0)).collect();
    let v = noise.factor().mul_vec(&z);
    model.h().mul_vec(&x).into_iter().zip(v).map(|(a, b)| a + b).collect()
}

/// Sample mean and its standard error.
fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn assert_close(label: &str, sample: &[f64], expected: f64, k: f64) {
    let (m, se) = mean_se(sample);
    assert!(
        (m - expected).abs() <= k * se,
        "{label}: sample {m} vs {expected} (se {se})"
    );
}

fn fixture(seed: u64, m: usize, n: usize, c: &Constellation) -> (LinearModel, Cholesky<f64>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = random_model(&mut rng, m, n, c).unwrap();
    let noise = Cholesky::new(model.cnn()).unwrap();
    (model, noise, rng)
}

#[test]
fn linear_conditional_mean_and_variance_match_simulation() {
    let c = Constellation::qam16();
    let (model, noise, mut rng) = fixture(21, 5, 3, &c);
    let l = lmmse(&model).unwrap();
    let cl = cwcu_from_lmmse(&l, &model).unwrap();
    for i in 0..3 {
        let q = 5 + i;
        let s = c.symbols()[q];
        let (mut re, mut im, mut dev, mut re_c, mut im_c) = (vec![], vec![], vec![], vec![], vec![]);
        for _ in 0..DRAWS {
            let y = draw_conditioned(&mut rng, &model, &noise, &c, i, q);
            let xl = l.estimate(&y).unwrap()[i];
            let xc = cl.estimate(&y).unwrap()[i];
            re.push(xl.re);
            im.push(xl.im);
            dev.push((xl - s * l.alpha[i]).norm_sqr());
            re_c.push(xc.re);
            im_c.push(xc.im);
        }
        let mu = s * l.alpha[i];
        assert_close("LMMSE mean re", &re, mu.re, 4.0);
        assert_close("LMMSE mean im", &im, mu.im, 4.0);
        assert_close("LMMSE conditional variance", &dev, l.cond_var[i], 5.0);
        assert_close("CWCU LMMSE mean re", &re_c, s.re, 4.0);
        assert_close("CWCU LMMSE mean im", &im_c, s.im, 4.0);
    }
}

#[test]
fn widely_conditional_covariance_matches_simulation() {
    let c = Constellation::qam8_rect();
    let (model, noise, mut rng) = fixture(33, 5, 3, &c);
    let am = augment(&model).unwrap();
    let wl = wlmmse(&am).unwrap();
    let cwl = cwcu_from_wlmmse(&wl, &am).unwrap();
    for (bank, unbiased) in [(&wl, false), (&cwl, true)] {
        for i in 0..3 {
            let q = 2 * i + 1;
            let s = c.symbols()[q];
            let a = &bank.alpha[i];
            let mu = a[(0, 0)] * s + a[(0, 1)] * s.conj();
            if unbiased {
                assert!((mu - s).norm() < 1e-10);
            }
            let cov = &bank.cond_cov[i];
            let (mut re, mut im, mut var, mut pre, mut pim) = (vec![], vec![], vec![], vec![], vec![]);
            for _ in 0..DRAWS {
                let y = draw_conditioned(&mut rng, &model, &noise, &c, i, q);
                let x = component_estimate(bank, &y, i).unwrap();
                assert!((x[1] - x[0].conj()).norm() < 1e-9);
                let d = x[0] - mu;
                re.push(x[0].re);
                im.push(x[0].im);
                var.push(d.norm_sqr());
                pre.push((d * d).re);
                pim.push((d * d).im);
            }
            assert_close("mean re", &re, mu.re, 4.0);
            assert_close("mean im", &im, mu.im, 4.0);
            assert_close("variance", &var, cov[(0, 0)].re, 5.0);
            assert_close("pseudo-variance re", &pre, cov[(0, 1)].re, 5.0);
            assert_close("pseudo-variance im", &pim, cov[(0, 1)].im, 5.0);
        }
    }
}

#[test]
fn scalar_improper_model_hand_values() {
    // x with variance 1 and pseudo-variance 2/3 seen in unit-variance noise:
    // E_WL = [[7, 3], [3, 7]]/16, CWCU covariance = I.
    let c = Constellation::qam8_rect();
    let rho = c.pseudo_variance();
    assert!(rho.im.abs() < 1e-15);
    let h = cwcu_core::CMatrix::identity(1);
    let cxx = cwcu_core::CMatrix::identity(1);
    let pseudo = cwcu_core::CMatrix::scaled_identity(1, Complex64::new(2.0 / 3.0, 0.0));
    let model = LinearModel::new(h, cxx, pseudo, cwcu_core::CMatrix::identity(1)).unwrap();
    let am = augment(&model).unwrap();
    let wl = wlmmse(&am).unwrap();
    let want = [[7.0 / 16.0, 3.0 / 16.0], [3.0 / 16.0, 7.0 / 16.0]];
    let want_cov = [[58.0 / 256.0, 42.0 / 256.0], [42.0 / 256.0, 58.0 / 256.0]];
    for r in 0..2 {
        for k in 0..2 {
            assert!((wl.e_aug[(r, k)] - Complex64::new(want[r][k], 0.0)).norm() < 1e-14);
            assert!((wl.alpha[0][(r, k)] - Complex64::new(want[r][k], 0.0)).norm() < 1e-14);
            assert!((wl.cond_cov[0][(r, k)] - Complex64::new(want_cov[r][k], 0.0)).norm() < 1e-14);
        }
    }
    let cwl = cwcu_from_wlmmse(&wl, &am).unwrap();
    assert!(cwl.cond_cov[0].max_abs_diff(&cwcu_core::CMatrix::identity(2)) < 1e-13);
}
