use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::io::{fmt17, load, Snapshot};
use crate::spectral::RealField;

use super::run::{read_diagnostics, read_snapshot_index, snapshot_path};

/// Relative surface errors of a candidate run against a reference run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    pub linf: Vec<f64>,
    pub l2: Vec<f64>,
    /// `relative_dH` of each run at the common times.
    pub relative_dh_reference: Vec<f64>,
    pub relative_dh_candidate: Vec<f64>,
    /// `(x, eta_reference, eta_candidate)` along `y = 0` at the last common time.
    pub cross_section: Vec<(f64, f64, f64)>,
}

impl ComparisonReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,linf,l2,relative_dH_reference,relative_dH_candidate")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt17(self.times[i]),
                fmt17(self.linf[i]),
                fmt17(self.l2[i]),
                fmt17(self.relative_dh_reference[i]),
                fmt17(self.relative_dh_candidate[i])
            )?;
        }
        Ok(())
    }

    pub fn write_cross_section_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,reference,candidate")?;
        for (x, a, b) in &self.cross_section {
            writeln!(w, "{},{},{}", fmt17(*x), fmt17(*a), fmt17(*b))?;
        }
        Ok(())
    }
}

/// `(|f - c|_inf / |f|_inf, |f - c|_2 / |f|_2)`, the L2 norms by the periodic
/// trapezoidal rule. Zero when both fields vanish.
pub fn relative_errors(reference: &RealField, candidate: &RealField) -> Result<(f64, f64)> {
    let diff = reference.zip_map(candidate, |a, b| a - b)?;
    let ratio = |d: f64, n: f64| {
        if d == 0.0 {
            0.0
        } else {
            d / n
        }
    };
    Ok((
        ratio(diff.max_abs(), reference.max_abs()),
        ratio(diff.l2_norm(), reference.l2_norm()),
    ))
}

fn load_eta(dir: &Path, index: usize) -> Result<RealField> {
    match load(snapshot_path(dir, "eta", index))? {
        Snapshot::Real(f) => Ok(f),
        Snapshot::Complex(_) => Err(Error::Format("eta snapshot is complex".into())),
    }
}

fn relative_dh_at(dir: &Path, times: &[f64]) -> Result<Vec<f64>> {
    let rows = read_diagnostics(dir)?;
    times
        .iter()
        .map(|&t| {
            rows.iter()
                .find(|r| (r.t - t).abs() <= 1e-9 * t.abs().max(1.0))
                .map(|r| *r.values.last().unwrap_or(&f64::NAN))
                .ok_or_else(|| Error::Format(format!("no diagnostics row at t = {t}")))
        })
        .collect()
}

/// Compare the surfaces of two run directories at their common snapshot times.
pub fn compare_runs(reference: &Path, candidate: &Path) -> Result<ComparisonReport> {
    let a = read_snapshot_index(reference)?;
    let b = read_snapshot_index(candidate)?;
    let mut pairs = Vec::new();
    for &(ia, ta) in &a {
        if let Some(&(ib, _)) = b.iter().find(|(_, tb)| (ta - tb).abs() <= 1e-9 * ta.abs().max(1.0)) {
            pairs.push((ia, ib, ta));
        }
    }
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("runs share no snapshot times".into()));
    }
    let mut rep = ComparisonReport::default();
    let mut last = None;
    for &(ia, ib, t) in &pairs {
        let fa = load_eta(reference, ia)?;
        let fb = load_eta(candidate, ib)?;
        fa.grid().check_same(fb.grid())?;
        let (linf, l2) = relative_errors(&fa, &fb)?;
        rep.times.push(t);
        rep.linf.push(linf);
        rep.l2.push(l2);
        last = Some((fa, fb));
    }
    rep.relative_dh_reference = relative_dh_at(reference, &rep.times)?;
    rep.relative_dh_candidate = relative_dh_at(candidate, &rep.times)?;
    if let Some((fa, fb)) = last {
        rep.cross_section = fa
            .cross_section_x(0)
            .into_iter()
            .zip(fb.cross_section_x(0))
            .map(|((x, a), (_, b))| (x, a, b))
            .collect();
    }
    Ok(rep)
}
