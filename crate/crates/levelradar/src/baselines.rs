//! Reference estimators the tracker is measured against.
//!
//! [`peak_pick_track`] is the naive per-slot approach: take the brightest
//! unmasked bin of each spectrum independently. It is exact on a clean
//! scene and wrong the moment anything outshines the surface.
//!
//! [`smoothed_peak_track`] is the envelope-smoothing variant: pool the
//! `top_n` brightest bins from each spectrum in a trailing window of
//! `window` slots and report the magnitude-weighted mean of the pooled
//! `(angle, delay)` coordinates. Smoothing suppresses per-slot jitter but
//! blends the surface with an interferer whenever both make the pool, so a
//! crossing drags the estimate instead of flipping it.
//!
//! Both run causally, one estimate per slot, making them directly
//! comparable to the tracker's online output.

use crate::beamforming::{static_peak, Spectrum};
use crate::error::{Error, Result};

/// Settings for the envelope-smoothing baseline.
#[derive(Clone, Copy, Debug)]
pub struct BaselineParams {
    /// Brightest bins pooled from each spectrum in the window.
    pub top_n: usize,
    /// Trailing window length in slots; earlier slots use the available
    /// prefix.
    pub window: usize,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams { top_n: 5, window: 3 }
    }
}

impl BaselineParams {
    /// Both settings must be at least 1.
    pub fn validate(&self) -> Result<()> {
        if self.top_n < 1 || self.window < 1 {
            return Err(Error::InvalidParameter(format!(
                "baseline needs top_n >= 1 and window >= 1, got top_n={} window={}",
                self.top_n, self.window
            )));
        }
        Ok(())
    }
}

/// Per-slot independent argmax: the brightest unmasked bin of each spectrum.
pub fn peak_pick_track(spectra: &[Spectrum]) -> Result<Vec<(usize, usize)>> {
    spectra
        .iter()
        .map(|s| static_peak(s).map(|(bin, _)| bin))
        .collect()
}

/// The `top_n` brightest unmasked bins of one spectrum, brightest first;
/// ties order toward the smaller delay index, then the smaller angle index.
fn top_bins(spectrum: &Spectrum, top_n: usize) -> Vec<(usize, usize, f64)> {
    let n = spectrum.n();
    let mut bins = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if !spectrum.is_masked(i, j) {
                bins.push((i, j, spectrum.value(i, j)));
            }
        }
    }
    bins.sort_unstable_by(|a, b| b.2.total_cmp(&a.2).then_with(|| (a.1, a.0).cmp(&(b.1, b.0))));
    bins.truncate(top_n);
    bins
}

/// Envelope-smoothed per-slot estimates in physical coordinates.
///
/// For each slot, the `top_n` brightest unmasked bins of every spectrum in
/// the trailing `window` are pooled and the magnitude-weighted mean of
/// their `(angle, delay)` bin centers is returned. A pool whose magnitudes
/// are all zero degrades to the unweighted mean. Errors if some spectrum
/// has no unmasked bin.
pub fn smoothed_peak_track(
    spectra: &[Spectrum],
    params: &BaselineParams,
) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    let tops: Vec<Vec<(usize, usize, f64)>> = spectra
        .iter()
        .map(|s| {
            let bins = top_bins(s, params.top_n);
            if bins.is_empty() {
                Err(Error::AllBinsMasked)
            } else {
                Ok(bins)
            }
        })
        .collect::<Result<_>>()?;

    let mut estimates = Vec::with_capacity(spectra.len());
    for slot in 0..spectra.len() {
        let start = (slot + 1).saturating_sub(params.window);
        let mut weight = 0.0;
        let mut aoa = 0.0;
        let mut tof = 0.0;
        let mut count = 0usize;
        let mut aoa_flat = 0.0;
        let mut tof_flat = 0.0;
        for t in start..=slot {
            for &(i, j, v) in &tops[t] {
                let (theta, tau) = (spectra[t].aoa_bins[i], spectra[t].tof_bins[j]);
                weight += v;
                aoa += v * theta;
                tof += v * tau;
                count += 1;
                aoa_flat += theta;
                tof_flat += tau;
            }
        }
        if weight > 0.0 {
            estimates.push((aoa / weight, tof / weight));
        } else {
            estimates.push((aoa_flat / count as f64, tof_flat / count as f64));
        }
    }
    Ok(estimates)
}
