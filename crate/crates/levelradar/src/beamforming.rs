//! Delay-and-steer beamforming over a joint angle-of-arrival / time-of-flight
//! grid.
//!
//! A [`SteeringGrid`] precomputes, for every grid bin `(i, j)`, the expected
//! array response of a unit reflector at angle `aoa_bins[i]` and two-way delay
//! `tof_bins[j]`. The spectrum of a frame is the magnitude of the inner
//! product between each conjugated steering vector and the received sample
//! vector, i.e. one `(N^2 x MK)` complex matrix applied to a length-`MK`
//! vector. A reflector sitting exactly on a bin sums `M * K` unit phasors
//! coherently there, so the peak magnitude reaches `M * K` times its gain.
//!
//! The module also covers the surrounding plumbing: background subtraction
//! for static clutter, a strict time-of-flight floor mask that excludes
//! line-of-sight bins from peak selection, argmax peak picking with a
//! deterministic tie-break, and sub-bin parabolic peak refinement.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{MountGeometry, SPEED_OF_LIGHT};
use crate::radar::{Frame, RadarConfig};

/// Default angle coverage: 60 to 120 degrees around broadside, radians.
pub fn default_aoa_range() -> (f64, f64) {
    (60.0_f64.to_radians(), 120.0_f64.to_radians())
}

/// Default delay coverage: the two-way delays between brim and bottom of the
/// container, padded by 10% of the span on both sides.
pub fn default_tof_range(geometry: &MountGeometry) -> (f64, f64) {
    let near = geometry.level_to_tof(geometry.max_level);
    let far = geometry.level_to_tof(0.0);
    let pad = 0.10 * (far - near);
    (near - pad, far + pad)
}

/// Precomputed steering vectors over an `N x N` angle/delay grid.
///
/// The steering entry for bin `(i, j)`, antenna `m`, frequency `f_k` is
/// `exp(-j 2 pi f_k tof_j) * exp(-j 2 pi f_k m d cos(aoa_i) / c)`, matching
/// the synthesis model with unit gain. Entries are stored split into real
/// and imaginary planes so the spectrum kernel vectorizes.
pub struct SteeringGrid {
    /// Angle bin centers, radians, ascending, length `N`.
    pub aoa_bins: Vec<f64>,
    /// Delay bin centers, seconds, ascending, length `N`.
    pub tof_bins: Vec<f64>,
    num_antennas: usize,
    num_freq_points: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl SteeringGrid {
    /// Grid side length `N`.
    pub fn n(&self) -> usize {
        self.aoa_bins.len()
    }

    /// Antennas expected in frames matched against this grid.
    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// Frequency points expected in frames matched against this grid.
    pub fn num_freq_points(&self) -> usize {
        self.num_freq_points
    }

    /// Steering entry for bin `(i, j)` at antenna `m`, frequency index `k`.
    pub fn entry(&self, i: usize, j: usize, m: usize, k: usize) -> Complex64 {
        let mk = self.num_antennas * self.num_freq_points;
        let idx = (i * self.n() + j) * mk + m * self.num_freq_points + k;
        Complex64::new(self.re[idx], self.im[idx])
    }

    fn row(&self, bin: usize) -> (&[f64], &[f64]) {
        let mk = self.num_antennas * self.num_freq_points;
        (&self.re[bin * mk..(bin + 1) * mk], &self.im[bin * mk..(bin + 1) * mk])
    }
}

/// Uniform grid of `n` points from `lo` to `hi`, endpoints included.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    let mut bins: Vec<f64> = (0..n).map(|t| lo + t as f64 * step).collect();
    bins[n - 1] = hi;
    bins
}

/// Builds the steering grid for `config` over the given angle and delay
/// coverage, `n` bins per axis.
pub fn build_grid(
    config: &RadarConfig,
    n: usize,
    aoa_range: (f64, f64),
    tof_range: (f64, f64),
) -> Result<SteeringGrid> {
    config.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 bins per axis, got {n}"
        )));
    }
    if !(aoa_range.0 < aoa_range.1) || !(tof_range.0 < tof_range.1) {
        return Err(Error::InvalidParameter(format!(
            "grid ranges must be increasing, got aoa {aoa_range:?}, tof {tof_range:?}"
        )));
    }
    if !(aoa_range.0 > 0.0 && aoa_range.1 < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "angle coverage must lie strictly inside (0, pi), got {aoa_range:?}"
        )));
    }
    if tof_range.0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delay coverage must start above zero, got {tof_range:?}"
        )));
    }

    let aoa_bins = linspace(aoa_range.0, aoa_range.1, n);
    let tof_bins = linspace(tof_range.0, tof_range.1, n);
    let freqs = config.freq_points();
    let mk = config.samples_per_frame();
    let mut re = vec![0.0; n * n * mk];
    let mut im = vec![0.0; n * n * mk];

    for (i, &aoa) in aoa_bins.iter().enumerate() {
        let lateral = aoa.cos() * config.element_spacing / SPEED_OF_LIGHT;
        for (j, &tof) in tof_bins.iter().enumerate() {
            let base = (i * n + j) * mk;
            for m in 0..config.num_antennas {
                let delay = tof + m as f64 * lateral;
                let offset = base + m * config.num_freq_points;
                for (k, &f) in freqs.iter().enumerate() {
                    let (s, c) = (-TAU * f * delay).sin_cos();
                    re[offset + k] = c;
                    im[offset + k] = s;
                }
            }
        }
    }

    Ok(SteeringGrid {
        aoa_bins,
        tof_bins,
        num_antennas: config.num_antennas,
        num_freq_points: config.num_freq_points,
        re,
        im,
    })
}

/// Magnitude spectrum of one frame over the grid, plus the peak-selection
/// mask. Values are row-major with the angle index outermost.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Slot of the frame this spectrum was computed from.
    pub slot: i64,
    /// `|steering^H frame|` per bin, row-major `i * N + j`, length `N^2`.
    pub values: Vec<f64>,
    /// Bins excluded from peak selection and tracking.
    pub mask: Vec<bool>,
    /// Whether values were divided by the maximum over unmasked bins.
    pub normalized: bool,
    /// Angle bin centers copied from the grid, radians.
    pub aoa_bins: Vec<f64>,
    /// Delay bin centers copied from the grid, seconds.
    pub tof_bins: Vec<f64>,
}

impl Spectrum {
    /// Grid side length `N`.
    pub fn n(&self) -> usize {
        self.aoa_bins.len()
    }

    #[inline]
    pub(crate) fn idx(&self, i: usize, j: usize) -> usize {
        i * self.aoa_bins.len() + j
    }

    /// Magnitude at bin `(i, j)`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.idx(i, j)]
    }

    /// Whether bin `(i, j)` is excluded from peak selection.
    #[inline]
    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.mask[self.idx(i, j)]
    }
}

/// Conjugated inner product `sum(conj(a) * b)` over split re/im planes,
/// followed by the magnitude. Four independent accumulators keep the
/// reduction order fixed while letting the loop vectorize.
fn conj_dot_mag(ar: &[f64], ai: &[f64], br: &[f64], bi: &[f64]) -> f64 {
    const LANES: usize = 4;
    let mut acc_re = [0.0f64; LANES];
    let mut acc_im = [0.0f64; LANES];

    let chunks = ar.len() / LANES * LANES;
    let (ar_c, ar_r) = ar.split_at(chunks);
    let (ai_c, ai_r) = ai.split_at(chunks);
    let (br_c, br_r) = br.split_at(chunks);
    let (bi_c, bi_r) = bi.split_at(chunks);

    for (((xr, xi), yr), yi) in ar_c
        .chunks_exact(LANES)
        .zip(ai_c.chunks_exact(LANES))
        .zip(br_c.chunks_exact(LANES))
        .zip(bi_c.chunks_exact(LANES))
    {
        for l in 0..LANES {
            acc_re[l] += xr[l] * yr[l] + xi[l] * yi[l];
            acc_im[l] += xr[l] * yi[l] - xi[l] * yr[l];
        }
    }

    let mut re = (acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]);
    let mut im = (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3]);
    for l in 0..ar_r.len() {
        re += ar_r[l] * br_r[l] + ai_r[l] * bi_r[l];
        im += ar_r[l] * bi_r[l] - ai_r[l] * br_r[l];
    }
    re.hypot(im)
}

/// Computes the magnitude spectrum of `frame` over `grid`.
///
/// With `normalize`, values are divided by the maximum over unmasked bins
/// (the mask starts all clear here, so that is the global maximum); an
/// all-zero frame is left untouched apart from the flag.
pub fn compute_spectrum(grid: &SteeringGrid, frame: &Frame, normalize: bool) -> Result<Spectrum> {
    let mk = grid.num_antennas * grid.num_freq_points;
    if frame.num_antennas != grid.num_antennas
        || frame.num_freq_points != grid.num_freq_points
        || frame.samples.len() != mk
    {
        return Err(Error::DimensionMismatch {
            expected: mk,
            got: frame.samples.len(),
        });
    }

    let mut fr = vec![0.0; mk];
    let mut fi = vec![0.0; mk];
    for (idx, s) in frame.samples.iter().enumerate() {
        fr[idx] = s.re;
        fi[idx] = s.im;
    }

    let n = grid.n();
    let mut values = vec![0.0; n * n];
    for (bin, value) in values.iter_mut().enumerate() {
        let (sr, si) = grid.row(bin);
        *value = conj_dot_mag(sr, si, &fr, &fi);
    }

    let mut spectrum = Spectrum {
        slot: frame.slot,
        values,
        mask: vec![false; n * n],
        normalized: false,
        aoa_bins: grid.aoa_bins.clone(),
        tof_bins: grid.tof_bins.clone(),
    };
    if normalize {
        normalize_spectrum(&mut spectrum);
    }
    Ok(spectrum)
}

/// Divides all values by the maximum over unmasked bins and sets the
/// `normalized` flag. An all-zero (or fully masked) spectrum only gets the
/// flag, avoiding a division by zero.
pub fn normalize_spectrum(spectrum: &mut Spectrum) {
    let max = spectrum
        .values
        .iter()
        .zip(&spectrum.mask)
        .filter(|(_, &masked)| !masked)
        .map(|(&v, _)| v)
        .fold(0.0f64, f64::max);
    if max > 0.0 {
        for v in &mut spectrum.values {
            *v /= max;
        }
    }
    spectrum.normalized = true;
}

/// Element-wise difference `frame - background`, the differential cancelation
/// of static clutter captured before the scene became active.
pub fn subtract_background(frame: &Frame, background: &Frame) -> Result<Frame> {
    if frame.num_antennas != background.num_antennas
        || frame.num_freq_points != background.num_freq_points
        || frame.samples.len() != background.samples.len()
    {
        return Err(Error::DimensionMismatch {
            expected: frame.samples.len(),
            got: background.samples.len(),
        });
    }
    let samples = frame
        .samples
        .iter()
        .zip(&background.samples)
        .map(|(a, b)| a - b)
        .collect();
    Ok(Frame {
        slot: frame.slot,
        num_antennas: frame.num_antennas,
        num_freq_points: frame.num_freq_points,
        samples,
    })
}

/// Masks every bin whose delay is strictly below `tof_floor`, excluding
/// line-of-sight leakage and other too-close returns from peak selection.
/// Existing mask entries stay set; values are untouched.
pub fn apply_los_mask(spectrum: &mut Spectrum, tof_floor: f64) {
    let n = spectrum.n();
    for j in 0..n {
        if spectrum.tof_bins[j] < tof_floor {
            for i in 0..n {
                let idx = spectrum.idx(i, j);
                spectrum.mask[idx] = true;
            }
        }
    }
}

/// Argmax over unmasked bins. Ties break toward the smallest delay index,
/// then the smallest angle index. Returns the bin and its magnitude.
pub fn static_peak(spectrum: &Spectrum) -> Result<((usize, usize), f64)> {
    let n = spectrum.n();
    let mut best: Option<((usize, usize), f64)> = None;
    for i in 0..n {
        for j in 0..n {
            if spectrum.is_masked(i, j) {
                continue;
            }
            let v = spectrum.value(i, j);
            let replace = match best {
                None => true,
                Some(((bi, bj), bv)) => {
                    v > bv || (v == bv && (j < bj || (j == bj && i < bi)))
                }
            };
            if replace {
                best = Some(((i, j), v));
            }
        }
    }
    best.ok_or(Error::AllBinsMasked)
}

/// Vertex offset, in bins, of the parabola through three equally spaced
/// magnitudes. Zero when the curvature vanishes.
fn parabolic_offset(prev: f64, center: f64, next: f64) -> f64 {
    let denom = prev - 2.0 * center + next;
    let scale = prev.abs().max(center.abs()).max(next.abs());
    if denom.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return 0.0;
    }
    ((prev - next) / (2.0 * denom)).clamp(-1.0, 1.0)
}

/// Sub-bin peak refinement: fits an independent parabola through the three
/// magnitudes along each axis and returns the interpolated `(aoa, tof)`.
/// The result stays within one bin of the center; a bin on the grid border
/// (or a masked bin) falls back to its center coordinates.
pub fn refine_peak(spectrum: &Spectrum, bin: (usize, usize)) -> (f64, f64) {
    let (i, j) = bin;
    let n = spectrum.n();
    let center = (spectrum.aoa_bins[i], spectrum.tof_bins[j]);
    if i == 0 || j == 0 || i + 1 >= n || j + 1 >= n || spectrum.is_masked(i, j) {
        return center;
    }

    let di = parabolic_offset(
        spectrum.value(i - 1, j),
        spectrum.value(i, j),
        spectrum.value(i + 1, j),
    );
    let dj = parabolic_offset(
        spectrum.value(i, j - 1),
        spectrum.value(i, j),
        spectrum.value(i, j + 1),
    );

    let aoa_step = (spectrum.aoa_bins[i + 1] - spectrum.aoa_bins[i - 1]) / 2.0;
    let tof_step = (spectrum.tof_bins[j + 1] - spectrum.tof_bins[j - 1]) / 2.0;
    (center.0 + di * aoa_step, center.1 + dj * tof_step)
}
