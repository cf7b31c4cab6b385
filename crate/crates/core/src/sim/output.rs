//! CSV tables of a [`RunReport`]. Floats use 17 significant digits so the
//! files round-trip exactly and are byte-identical across runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::run::RunReport;
use crate::error::Result;
use crate::io::{fmt17, write_text};

pub const BER_HEADER: &str = "ebn0_db,estimator,bits,bit_errors,ber,symbols,symbol_errors,ser";
pub const BMSE_HEADER: &str = "ebn0_db,estimator,component,bmse_monte_carlo,bmse_theory";
pub const HISTOGRAM_HEADER: &str = "ebn0_db,estimator,symbol_index,label,re_center,im_center,relative_frequency";

pub fn ber_csv(report: &RunReport) -> String {
    let mut s = format!("{BER_HEADER}\n");
    for p in &report.points {
        for e in &p.estimators {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                fmt17(p.ebn0_db),
                e.estimator,
                e.bits,
                e.bit_errors,
                fmt17(e.ber),
                e.symbols,
                e.symbol_errors,
                fmt17(e.ser)
            )
            .unwrap();
        }
    }
    s
}

/// One row per component plus a `mean` row per estimator. Monte Carlo cells
/// are empty when no trials ran.
pub fn bmse_csv(report: &RunReport) -> String {
    let mut s = format!("{BMSE_HEADER}\n");
    for p in &report.points {
        for e in &p.estimators {
            let mc = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
            for (i, th) in e.bmse_theory.iter().enumerate() {
                let m = e.bmse_monte_carlo.get(i).copied();
                writeln!(s, "{},{},{i},{},{}", fmt17(p.ebn0_db), e.estimator, mc(m), fmt17(*th)).unwrap();
            }
            let m = (!e.bmse_monte_carlo.is_empty()).then_some(e.bmse_monte_carlo_mean);
            writeln!(
                s,
                "{},{},mean,{},{}",
                fmt17(p.ebn0_db),
                e.estimator,
                mc(m),
                fmt17(e.bmse_theory_mean)
            )
            .unwrap();
        }
    }
    s
}

/// Non-empty histogram cells only.
pub fn histogram_csv(report: &RunReport) -> String {
    let mut s = format!("{HISTOGRAM_HEADER}\n");
    for h in report.points.iter().flat_map(|p| &p.histograms) {
        for sym in &h.symbols {
            for (cell, &f) in sym.relative_frequency.iter().enumerate() {
                if f == 0.0 {
                    continue;
                }
                let (r, i) = (cell / h.bins, cell % h.bins);
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    fmt17(h.ebn0_db),
                    h.estimator,
                    sym.symbol_index,
                    sym.label,
                    fmt17(h.bin_center(r)),
                    fmt17(h.bin_center(i)),
                    fmt17(f)
                )
                .unwrap();
            }
        }
    }
    s
}

/// Writes `ber.csv`, `bmse.csv` and, when histograms were collected,
/// `histogram.csv` into `dir`. Returns the written paths.
pub fn write_tables(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = vec![
        (dir.join("ber.csv"), ber_csv(report)),
        (dir.join("bmse.csv"), bmse_csv(report)),
    ];
    if report.points.iter().any(|p| !p.histograms.is_empty()) {
        out.push((dir.join("histogram.csv"), histogram_csv(report)));
    }
    for (path, text) in &out {
        write_text(path, text)?;
    }
    Ok(out.into_iter().map(|(p, _)| p).collect())
}
