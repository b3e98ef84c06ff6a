//! Trellis tracking of the liquid surface across a spectrum sequence.
//!
//! A per-slot peak picker confuses the surface with anything momentarily
//! brighter, such as a gripper sweeping through the beam. The tracker instead
//! scores whole trajectories: an edge from bin `(i, j)` at slot `t` to bin
//! `(i', j')` at slot `t + 1` costs
//!
//! ```text
//! -P_t(i, j) - P_{t+1}(i', j') + omega * (omega_theta * |i - i'| + omega_tau * |j - j'|)
//! ```
//!
//! so bright bins attract the path while angle and delay displacement repel
//! it. Transitions are restricted to a Chebyshev window of radius `q` bins,
//! the physical bound on how far the surface can move in one slot. The
//! minimum-cost path is found online: [`step`] folds each new spectrum into
//! an `N x N` cumulative cost table (a Viterbi recursion costing at most
//! `N^2 (2q+1)^2` edge evaluations), and the running estimate is the argmin
//! of that table. [`brute_force_best_path`] enumerates every windowed
//! trajectory on small instances and must agree with the recursion exactly;
//! it exists to keep the fast path honest.
//!
//! Cost accumulation is left-to-right along the path in both the recursion
//! and the enumerator, so agreement is bitwise, not just approximate. Ties
//! break toward the smallest delay index, then the smallest angle index,
//! applied backward from the final slot.

use std::collections::VecDeque;

use crate::beamforming::{refine_peak, static_peak, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::MountGeometry;

/// Weights and search-window settings for the trellis.
#[derive(Clone, Copy, Debug)]
pub struct TrackerParams {
    /// Global displacement penalty weight.
    pub omega: f64,
    /// Weight on angle-bin displacement.
    pub omega_theta: f64,
    /// Weight on delay-bin displacement.
    pub omega_tau: f64,
    /// Chebyshev window radius in bins; one slot may move at most `q` bins
    /// along each axis.
    pub q: usize,
    /// Start free instead of anchored: the initial cost table becomes the
    /// negated warm-up spectrum rather than zero at its peak bin alone.
    pub free_start: bool,
    /// Backpointer tables retained for [`backtrack`]; older slots are
    /// evicted and the decoded path flagged as truncated.
    pub history_depth: usize,
}

impl Default for TrackerParams {
    fn default() -> Self {
        TrackerParams {
            omega: 1.0,
            omega_theta: 0.1,
            omega_tau: 0.1,
            q: 5,
            free_start: false,
            history_depth: 256,
        }
    }
}

impl TrackerParams {
    /// Checks weight signs and window bounds.
    pub fn validate(&self) -> Result<()> {
        if !(self.omega >= 0.0 && self.omega_theta >= 0.0 && self.omega_tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "penalty weights must be non-negative, got omega={} omega_theta={} omega_tau={}",
                self.omega, self.omega_theta, self.omega_tau
            )));
        }
        if self.q < 1 {
            return Err(Error::InvalidParameter("window radius q must be at least 1".into()));
        }
        if self.history_depth < 1 {
            return Err(Error::InvalidParameter("history_depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// The running surface estimate: argmin bin of the cost table plus its
/// refined coordinates and cumulative cost.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    /// Grid bin `(i, j)` of the estimate.
    pub bin: (usize, usize),
    /// Sub-bin refined angle, radians.
    pub aoa: f64,
    /// Sub-bin refined two-way delay, seconds.
    pub tof: f64,
    /// Cumulative path cost at the estimate bin.
    pub cost: f64,
}

/// Decoded trajectory from [`backtrack`], oldest slot first.
#[derive(Clone, Debug)]
pub struct TrackedPath {
    /// One bin per retained slot, ending at the current estimate.
    pub bins: Vec<(usize, usize)>,
    /// Whether older slots were evicted from the backpointer history.
    pub truncated: bool,
}

/// Cumulative-cost table, backpointer history, and the current estimate.
pub struct TrackerState {
    /// Slots folded in so far; 0 right after initialization.
    pub slot: usize,
    /// Cumulative minimal path cost per bin, row-major, masked bins at
    /// infinity.
    pub costs: Vec<f64>,
    /// Grid side length.
    pub n: usize,
    /// Current estimate, kept in sync by [`init_tracker`] and [`step`].
    pub current: Estimate,
    /// Edge evaluations performed by the latest [`step`].
    pub last_step_evals: u64,
    /// Edge evaluations performed by all steps so far.
    pub total_evals: u64,
    backpointers: VecDeque<Vec<u32>>,
    evicted: bool,
}

impl TrackerState {
    /// Backpointer tables currently retained.
    pub fn history_len(&self) -> usize {
        self.backpointers.len()
    }
}

/// Cost of moving from bin `from` of spectrum `p_t` to bin `to` of spectrum
/// `p_next`. Infinite when either endpoint is masked or the displacement
/// exceeds the `q` window.
pub fn transition_cost(
    params: &TrackerParams,
    p_t: &Spectrum,
    p_next: &Spectrum,
    from: (usize, usize),
    to: (usize, usize),
) -> f64 {
    if p_t.is_masked(from.0, from.1) || p_next.is_masked(to.0, to.1) {
        return f64::INFINITY;
    }
    let d_theta = from.0.abs_diff(to.0);
    let d_tau = from.1.abs_diff(to.1);
    if d_theta > params.q || d_tau > params.q {
        return f64::INFINITY;
    }
    -p_t.value(from.0, from.1) - p_next.value(to.0, to.1)
        + params.omega * (params.omega_theta * d_theta as f64 + params.omega_tau * d_tau as f64)
}

/// Element-wise mean of the warm-up spectra; masks are combined with OR.
fn mean_spectrum(warmup: &[Spectrum]) -> Result<Spectrum> {
    let first = &warmup[0];
    let len = first.values.len();
    let mut mean = first.clone();
    for s in &warmup[1..] {
        if s.values.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: s.values.len(),
            });
        }
        for (acc, &v) in mean.values.iter_mut().zip(&s.values) {
            *acc += v;
        }
        for (acc, &m) in mean.mask.iter_mut().zip(&s.mask) {
            *acc |= m;
        }
    }
    let scale = 1.0 / warmup.len() as f64;
    for v in &mut mean.values {
        *v *= scale;
    }
    Ok(mean)
}

/// Scan for the minimum cost; ties break toward the smallest delay index,
/// then the smallest angle index. `None` when everything is infinite.
fn argmin_bin(costs: &[f64], n: usize) -> Option<((usize, usize), f64)> {
    let mut best: Option<((usize, usize), f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let c = costs[i * n + j];
            if !c.is_finite() {
                continue;
            }
            let replace = match best {
                None => true,
                Some(((bi, bj), bc)) => c < bc || (c == bc && (j < bj || (j == bj && i < bi))),
            };
            if replace {
                best = Some(((i, j), c));
            }
        }
    }
    best
}

/// Initializes the trellis from one or more static warm-up spectra.
///
/// The anchored default puts zero cost on the peak bin of the element-wise
/// mean warm-up spectrum and infinity elsewhere. With
/// [`TrackerParams::free_start`] the table instead starts at the negated
/// mean spectrum, leaving the first slot's bin choice to the path search.
pub fn init_tracker(params: &TrackerParams, warmup: &[Spectrum]) -> Result<TrackerState> {
    params.validate()?;
    if warmup.is_empty() {
        return Err(Error::InvalidParameter(
            "tracker needs at least one warm-up spectrum".into(),
        ));
    }
    let mean = mean_spectrum(warmup)?;
    let n = mean.n();
    let (anchor, _) = static_peak(&mean)?;

    let mut costs = vec![f64::INFINITY; n * n];
    if params.free_start {
        for idx in 0..n * n {
            if !mean.mask[idx] {
                costs[idx] = -mean.values[idx];
            }
        }
    } else {
        costs[anchor.0 * n + anchor.1] = 0.0;
    }

    let ((bi, bj), cost) = argmin_bin(&costs, n).ok_or(Error::AllBinsMasked)?;
    let (aoa, tof) = refine_peak(&mean, (bi, bj));
    Ok(TrackerState {
        slot: 0,
        costs,
        n,
        current: Estimate { bin: (bi, bj), aoa, tof, cost },
        last_step_evals: 0,
        total_evals: 0,
        backpointers: VecDeque::new(),
        evicted: false,
    })
}

/// Folds the next slot into the trellis.
///
/// `p_t` is the spectrum the cost table currently refers to (the warm-up
/// mean is a stand-in at slot 0) and `p_next` is the new slot. Each
/// destination bin takes the cheapest predecessor inside the Chebyshev
/// window, predecessor ties breaking toward the smallest delay index, then
/// the smallest angle index. The estimate becomes the argmin of the updated
/// table with the same tie-break, refined to sub-bin coordinates on
/// `p_next`.
pub fn step(
    state: &mut TrackerState,
    params: &TrackerParams,
    p_t: &Spectrum,
    p_next: &Spectrum,
) -> Result<()> {
    params.validate()?;
    let n = state.n;
    if p_t.n() != n || p_next.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if p_t.n() != n { p_t.n() } else { p_next.n() },
        });
    }

    let q = params.q;
    let mut next = vec![f64::INFINITY; n * n];
    let mut bp = vec![u32::MAX; n * n];
    let mut evals = 0u64;

    for i2 in 0..n {
        let ilo = i2.saturating_sub(q);
        let ihi = (i2 + q).min(n - 1);
        for j2 in 0..n {
            let jlo = j2.saturating_sub(q);
            let jhi = (j2 + q).min(n - 1);
            let mut best = f64::INFINITY;
            let mut arg = u32::MAX;
            for j1 in jlo..=jhi {
                for i1 in ilo..=ihi {
                    let c = state.costs[i1 * n + j1]
                        + transition_cost(params, p_t, p_next, (i1, j1), (i2, j2));
                    evals += 1;
                    if c < best {
                        best = c;
                        arg = (i1 * n + j1) as u32;
                    }
                }
            }
            next[i2 * n + j2] = best;
            bp[i2 * n + j2] = arg;
        }
    }

    let ((bi, bj), cost) = argmin_bin(&next, n).ok_or(Error::NoFinitePath)?;

    state.costs = next;
    if state.backpointers.len() == params.history_depth {
        state.backpointers.pop_front();
        state.evicted = true;
    }
    state.backpointers.push_back(bp);
    state.slot += 1;
    state.last_step_evals = evals;
    state.total_evals += evals;
    let (aoa, tof) = refine_peak(p_next, (bi, bj));
    state.current = Estimate { bin: (bi, bj), aoa, tof, cost };
    Ok(())
}

/// Liquid level implied by the current estimate's refined delay, clamped to
/// the container's fill interval.
pub fn estimate_level(state: &TrackerState, geometry: &MountGeometry) -> f64 {
    geometry.level_from_tof(state.current.tof)
}

/// Decodes the minimal-cost trajectory ending at the current estimate by
/// walking the retained backpointer tables, oldest slot first. Slots evicted
/// from the ring buffer are reported through the `truncated` flag.
pub fn backtrack(state: &TrackerState) -> TrackedPath {
    let n = state.n;
    let mut bins = Vec::with_capacity(state.backpointers.len() + 1);
    let mut bin = state.current.bin;
    bins.push(bin);
    let mut truncated = state.evicted;
    for table in state.backpointers.iter().rev() {
        let p = table[bin.0 * n + bin.1];
        if p == u32::MAX {
            truncated = true;
            break;
        }
        bin = (p as usize / n, p as usize % n);
        bins.push(bin);
    }
    bins.reverse();
    TrackedPath { bins, truncated }
}

/// Exact number of edge evaluations one [`step`] performs on an `n x n`
/// grid with window radius `q`: the square of the summed per-axis window
/// lengths, at most `n^2 (2q+1)^2`.
pub fn expected_transition_evals(n: usize, q: usize) -> u64 {
    let s: u64 = (0..n)
        .map(|i| ((i + q).min(n - 1) - i.saturating_sub(q) + 1) as u64)
        .sum();
    s * s
}

/// Exhaustively enumerates every window-constrained path through `spectra`
/// from the fixed `initial` bin and returns the cheapest with its cost.
///
/// Cost accumulates left-to-right exactly as the online recursion does, and
/// ties resolve toward the path whose `(delay, angle)` index pairs are
/// smallest read backward from the final slot, so on any instance small
/// enough to enumerate the result matches [`step`] plus [`backtrack`]
/// bitwise. Instances are rejected when `N^2 (2q+1)^(2(T-1))` exceeds 1e7.
pub fn brute_force_best_path(
    params: &TrackerParams,
    spectra: &[Spectrum],
    initial: (usize, usize),
) -> Result<(Vec<(usize, usize)>, f64)> {
    params.validate()?;
    if spectra.is_empty() {
        return Err(Error::InvalidParameter("no spectra to search".into()));
    }
    let n = spectra[0].n();
    if spectra.iter().any(|s| s.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: spectra.iter().map(Spectrum::n).find(|&m| m != n).unwrap(),
        });
    }
    if initial.0 >= n || initial.1 >= n {
        return Err(Error::InvalidParameter(format!(
            "initial bin {initial:?} outside a {n}x{n} grid"
        )));
    }
    let t = spectra.len();
    let work = (n * n) as f64 * ((2 * params.q + 1) as f64).powi(2 * (t as i32 - 1));
    const LIMIT: f64 = 1e7;
    if work > LIMIT {
        return Err(Error::SearchTooLarge { work, limit: LIMIT });
    }

    // Backward-lexicographic comparison on (delay, angle) bin pairs; used
    // only on exact cost ties.
    fn keys_smaller(a: &[(usize, usize)], b: &[(usize, usize)]) -> bool {
        for (&(ai, aj), &(bi, bj)) in a.iter().rev().zip(b.iter().rev()) {
            if (aj, ai) != (bj, bi) {
                return (aj, ai) < (bj, bi);
            }
        }
        false
    }

    struct Search<'a> {
        params: &'a TrackerParams,
        spectra: &'a [Spectrum],
        n: usize,
        path: Vec<(usize, usize)>,
        best: Option<(Vec<(usize, usize)>, f64)>,
    }

    impl Search<'_> {
        fn descend(&mut self, slot: usize, cost: f64) {
            if cost.is_infinite() {
                return;
            }
            if slot + 1 == self.spectra.len() {
                let better = match &self.best {
                    None => true,
                    Some((bp, bc)) => {
                        cost < *bc || (cost == *bc && keys_smaller(&self.path, bp))
                    }
                };
                if better {
                    self.best = Some((self.path.clone(), cost));
                }
                return;
            }
            let (ci, cj) = self.path[slot];
            let q = self.params.q;
            for i in ci.saturating_sub(q)..=(ci + q).min(self.n - 1) {
                for j in cj.saturating_sub(q)..=(cj + q).min(self.n - 1) {
                    let edge = transition_cost(
                        self.params,
                        &self.spectra[slot],
                        &self.spectra[slot + 1],
                        (ci, cj),
                        (i, j),
                    );
                    self.path.push((i, j));
                    self.descend(slot + 1, cost + edge);
                    self.path.pop();
                }
            }
        }
    }

    let mut search = Search {
        params,
        spectra,
        n,
        path: vec![initial],
        best: None,
    };
    search.descend(0, 0.0);
    search.best.ok_or(Error::NoFinitePath)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{
        apply_los_mask, build_grid, compute_spectrum, default_aoa_range, default_tof_range,
        normalize_spectrum,
    };
    use crate::geometry::SPEED_OF_LIGHT;
    use crate::radar::{synthesize_frame, PathLabel, PropagationPath, RadarConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Hand-built spectrum over an n x n grid with synthetic bin centers.
    fn toy_spectrum(n: usize, values: Vec<f64>, slot: i64) -> Spectrum {
        assert_eq!(values.len(), n * n);
        Spectrum {
            slot,
            values,
            mask: vec![false; n * n],
            normalized: true,
            aoa_bins: (0..n).map(|i| 1.0 + 0.01 * i as f64).collect(),
            tof_bins: (0..n).map(|j| 1.0e-9 + 1.0e-11 * j as f64).collect(),
        }
    }

    /// Uniform-value spectrum with a single bright bin.
    fn peaky_spectrum(n: usize, peak: (usize, usize), slot: i64) -> Spectrum {
        let mut values = vec![0.1; n * n];
        values[peak.0 * n + peak.1] = 1.0;
        toy_spectrum(n, values, slot)
    }

    /// Random spectra with values in (0, 1), same grid, no mask.
    fn random_spectra(n: usize, t: usize, rng: &mut ChaCha8Rng) -> Vec<Spectrum> {
        (0..t)
            .map(|slot| {
                let values = (0..n * n).map(|_| rng.random::<f64>()).collect();
                toy_spectrum(n, values, slot as i64)
            })
            .collect()
    }

    fn run_dp(
        params: &TrackerParams,
        spectra: &[Spectrum],
    ) -> (TrackerState, Vec<(usize, usize)>) {
        let mut state = init_tracker(params, &spectra[..1]).unwrap();
        for t in 1..spectra.len() {
            step(&mut state, params, &spectra[t - 1], &spectra[t]).unwrap();
        }
        let path = backtrack(&state);
        assert!(!path.truncated);
        (state, path.bins)
    }

    #[test]
    fn hand_computed_edge_costs() {
        let params = TrackerParams::default();
        let n = 4;

        let mut a = toy_spectrum(n, vec![0.0; n * n], 0);
        let mut b = toy_spectrum(n, vec![0.0; n * n], 1);
        a.values[1 * n + 1] = 0.9;
        b.values[2 * n + 1] = 0.8;
        let c = transition_cost(&params, &a, &b, (1, 1), (2, 1));
        assert!((c - (-1.6)).abs() < 1e-15);

        let zero = transition_cost(&params, &a, &b, (0, 0), (0, 0));
        assert_eq!(zero, 0.0);

        let mut full = toy_spectrum(n, vec![1.0; n * n], 0);
        full.mask[0] = false;
        let q2 = TrackerParams { q: 2, ..TrackerParams::default() };
        let c = transition_cost(&q2, &full, &full, (0, 0), (2, 2));
        assert!((c - (-2.0 + 0.2 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn masked_and_out_of_window_edges_are_infinite() {
        let params = TrackerParams { q: 1, ..TrackerParams::default() };
        let mut s = toy_spectrum(3, vec![1.0; 9], 0);
        s.mask[4] = true;
        assert_eq!(transition_cost(&params, &s, &s, (1, 1), (0, 0)), f64::INFINITY);
        assert_eq!(transition_cost(&params, &s, &s, (0, 0), (1, 1)), f64::INFINITY);
        assert_eq!(transition_cost(&params, &s, &s, (0, 0), (2, 0)), f64::INFINITY);
        assert_eq!(transition_cost(&params, &s, &s, (0, 0), (0, 2)), f64::INFINITY);
        assert!(transition_cost(&params, &s, &s, (0, 0), (1, 1)).is_infinite());
    }

    #[test]
    fn init_anchors_on_the_warmup_mean_peak() {
        let params = TrackerParams::default();
        let warmup: Vec<Spectrum> = (0..5).map(|t| peaky_spectrum(4, (2, 1), t)).collect();
        let one = init_tracker(&params, &warmup[..1]).unwrap();
        let five = init_tracker(&params, &warmup).unwrap();
        assert_eq!(one.current.bin, (2, 1));
        assert_eq!(five.current.bin, (2, 1));
        assert_eq!(one.current.cost, 0.0);
        let finite = five.costs.iter().filter(|c| c.is_finite()).count();
        assert_eq!(finite, 1);
    }

    #[test]
    fn free_start_negates_the_mean_spectrum() {
        let params = TrackerParams { free_start: true, ..TrackerParams::default() };
        let s = peaky_spectrum(3, (1, 2), 0);
        let state = init_tracker(&params, std::slice::from_ref(&s)).unwrap();
        assert_eq!(state.current.bin, (1, 2));
        assert_eq!(state.current.cost, -1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(state.costs[i * 3 + j], -s.value(i, j));
            }
        }
    }

    #[test]
    fn init_rejects_empty_or_fully_masked_warmup() {
        let params = TrackerParams::default();
        assert!(init_tracker(&params, &[]).is_err());
        let mut s = peaky_spectrum(3, (0, 0), 0);
        for m in &mut s.mask {
            *m = true;
        }
        assert!(matches!(init_tracker(&params, &[s]), Err(Error::AllBinsMasked)));
    }

    #[test]
    fn stationary_peak_accumulates_double_counted_magnitude() {
        // Two edges on an unmoving unit peak cost -2.0 each: the interior
        // slot is counted by both of its edges.
        let params = TrackerParams::default();
        let spectra: Vec<Spectrum> = (0..3).map(|t| peaky_spectrum(5, (2, 3), t)).collect();
        let (state, path) = run_dp(&params, &spectra);
        assert_eq!(state.current.bin, (2, 3));
        assert_eq!(state.current.cost, -4.0);
        assert_eq!(path, vec![(2, 3); 3]);
    }

    #[test]
    fn follows_a_moving_peak_one_bin_per_slot() {
        let params = TrackerParams { q: 1, ..TrackerParams::default() };
        let spectra: Vec<Spectrum> =
            (0..3).map(|t| peaky_spectrum(3, (0, t as usize), t)).collect();
        let (state, path) = run_dp(&params, &spectra);
        assert_eq!(path, vec![(0, 0), (0, 1), (0, 2)]);

        let (bf_path, bf_cost) = brute_force_best_path(&params, &spectra, (0, 0)).unwrap();
        assert_eq!(path, bf_path);
        assert_eq!(state.current.cost, bf_cost);
    }

    #[test]
    fn backtrack_after_one_step_is_initial_then_current() {
        let params = TrackerParams::default();
        let a = peaky_spectrum(4, (1, 1), 0);
        let b = peaky_spectrum(4, (1, 2), 1);
        let mut state = init_tracker(&params, std::slice::from_ref(&a)).unwrap();
        step(&mut state, &params, &a, &b).unwrap();
        let path = backtrack(&state);
        assert_eq!(path.bins, vec![(1, 1), (1, 2)]);
        assert!(!path.truncated);
    }

    #[test]
    fn single_edge_matches_a_direct_scan() {
        // With the window covering the whole grid, the best path after one
        // step is the best single edge out of the initial bin.
        let n = 5;
        let params = TrackerParams { q: n, ..TrackerParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spectra = random_spectra(n, 2, &mut rng);
        let init = static_peak(&spectra[0]).unwrap().0;

        let mut best = f64::INFINITY;
        let mut arg = (0, 0);
        for j in 0..n {
            for i in 0..n {
                let c = 0.0 + transition_cost(&params, &spectra[0], &spectra[1], init, (i, j));
                if c < best {
                    best = c;
                    arg = (i, j);
                }
            }
        }

        let (bf_path, bf_cost) = brute_force_best_path(&params, &spectra, init).unwrap();
        assert_eq!(bf_path, vec![init, arg]);
        assert_eq!(bf_cost, best);

        let (state, dp_path) = run_dp(&params, &spectra);
        assert_eq!(dp_path, bf_path);
        assert_eq!(state.current.cost, bf_cost);
    }

    #[test]
    fn dp_matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for case in 0..40 {
            let n = rng.random_range(3..=6);
            let t = rng.random_range(2..=4);
            let q = rng.random_range(1..=2);
            let params = TrackerParams { q, ..TrackerParams::default() };
            let spectra = random_spectra(n, t, &mut rng);
            let init = static_peak(&spectra[0]).unwrap().0;

            let (bf_path, bf_cost) = brute_force_best_path(&params, &spectra, init).unwrap();
            let (state, dp_path) = run_dp(&params, &spectra);
            assert_eq!(dp_path, bf_path, "case {case}: path mismatch");
            assert_eq!(
                state.current.cost.to_bits(),
                bf_cost.to_bits(),
                "case {case}: cost mismatch {} vs {}",
                state.current.cost,
                bf_cost
            );
        }
    }

    #[test]
    fn free_start_matches_per_bin_brute_force() {
        // A free start lets the path begin anywhere at the cost of the
        // negated first spectrum; the best such path is the minimum over
        // brute-force searches from every initial bin.
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let n = 4;
        let params = TrackerParams { q: 1, free_start: true, ..TrackerParams::default() };
        let spectra = random_spectra(n, 3, &mut rng);

        let mut best: Option<(Vec<(usize, usize)>, f64)> = None;
        for i in 0..n {
            for j in 0..n {
                let (path, edges) = brute_force_best_path(&params, &spectra, (i, j)).unwrap();
                let total = -spectra[0].value(i, j) + edges;
                if best.as_ref().is_none_or(|(_, bc)| total < *bc) {
                    best = Some((path, total));
                }
            }
        }
        let (bf_path, bf_cost) = best.unwrap();

        let mut state = init_tracker(&params, &spectra[..1]).unwrap();
        for t in 1..spectra.len() {
            step(&mut state, &params, &spectra[t - 1], &spectra[t]).unwrap();
        }
        assert_eq!(backtrack(&state).bins, bf_path);
        assert!((state.current.cost - bf_cost).abs() < 1e-9);
    }

    #[test]
    fn all_equal_spectra_keep_the_path_at_the_anchor() {
        let params = TrackerParams { q: 2, ..TrackerParams::default() };
        let spectra: Vec<Spectrum> =
            (0..4).map(|t| toy_spectrum(5, vec![0.5; 25], t)).collect();
        let (bf_path, _) = brute_force_best_path(&params, &spectra, (2, 2)).unwrap();
        assert_eq!(bf_path, vec![(2, 2); 4]);
    }

    #[test]
    fn estimate_ties_break_toward_smaller_delay_then_angle() {
        let params = TrackerParams { q: 3, ..TrackerParams::default() };
        let n = 4;
        // Two equal anchor peaks force equal-cost paths; delay index wins.
        let mut first = toy_spectrum(n, vec![0.0; n * n], 0);
        first.values[1 * n + 3] = 1.0;
        first.values[3 * n + 1] = 1.0;
        let state = init_tracker(
            &params,
            std::slice::from_ref(&{
                let mut m = first.clone();
                normalize_spectrum(&mut m);
                m
            }),
        )
        .unwrap();
        assert_eq!(state.current.bin, (3, 1));
    }

    #[test]
    fn monotone_accumulation_holds_with_equality_at_the_chosen_predecessor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 5;
        let params = TrackerParams { q: 2, ..TrackerParams::default() };
        let spectra = random_spectra(n, 2, &mut rng);
        let mut state = init_tracker(&params, &spectra[..1]).unwrap();
        let before = state.costs.clone();
        step(&mut state, &params, &spectra[0], &spectra[1]).unwrap();
        for i2 in 0..n {
            for j2 in 0..n {
                let d = state.costs[i2 * n + j2];
                let mut window_min = f64::INFINITY;
                for i1 in 0..n {
                    for j1 in 0..n {
                        let c = before[i1 * n + j1]
                            + transition_cost(&params, &spectra[0], &spectra[1], (i1, j1), (i2, j2));
                        window_min = window_min.min(c);
                        assert!(d <= c);
                    }
                }
                assert_eq!(d, window_min);
            }
        }
    }

    #[test]
    fn decoded_path_displacement_is_bounded_by_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &q in &[1usize, 2, 3] {
            let params = TrackerParams { q, ..TrackerParams::default() };
            let spectra = random_spectra(6, 5, &mut rng);
            let (_, path) = run_dp(&params, &spectra);
            for w in path.windows(2) {
                assert!(w[0].0.abs_diff(w[1].0) <= q);
                assert!(w[0].1.abs_diff(w[1].1) <= q);
            }
        }
    }

    #[test]
    fn scaling_spectra_and_omega_together_preserves_the_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let params = TrackerParams { q: 2, ..TrackerParams::default() };
        let spectra = random_spectra(5, 4, &mut rng);
        let (_, base_path) = run_dp(&params, &spectra);

        for &s in &[0.25f64, 2.0, 16.0] {
            let scaled_params = TrackerParams { omega: params.omega * s, ..params };
            let scaled: Vec<Spectrum> = spectra
                .iter()
                .map(|sp| {
                    let mut c = sp.clone();
                    for v in &mut c.values {
                        *v *= s;
                    }
                    c
                })
                .collect();
            let (_, path) = run_dp(&scaled_params, &scaled);
            assert_eq!(path, base_path, "scale {s}");
        }
    }

    #[test]
    fn eval_counter_matches_the_window_formula() {
        for &(n, q) in &[(4usize, 1usize), (6, 2), (8, 3), (16, 5)] {
            let params = TrackerParams { q, ..TrackerParams::default() };
            let spectra: Vec<Spectrum> =
                (0..2).map(|t| peaky_spectrum(n, (n / 2, n / 2), t)).collect();
            let mut state = init_tracker(&params, &spectra[..1]).unwrap();
            step(&mut state, &params, &spectra[0], &spectra[1]).unwrap();
            let expected = expected_transition_evals(n, q);
            assert_eq!(state.last_step_evals, expected);
            assert!(expected <= (n * n) as u64 * ((2 * q + 1) as u64).pow(2));
            step(&mut state, &params, &spectra[1], &spectra[1]).unwrap();
            assert_eq!(state.total_evals, 2 * expected);
        }
    }

    #[test]
    fn history_eviction_truncates_the_decoded_path() {
        let params = TrackerParams { q: 1, history_depth: 3, ..TrackerParams::default() };
        let spectra: Vec<Spectrum> = (0..7).map(|t| peaky_spectrum(4, (2, 2), t)).collect();
        let mut state = init_tracker(&params, &spectra[..1]).unwrap();
        for t in 1..spectra.len() {
            step(&mut state, &params, &spectra[t - 1], &spectra[t]).unwrap();
        }
        assert_eq!(state.history_len(), 3);
        let path = backtrack(&state);
        assert!(path.truncated);
        assert_eq!(path.bins.len(), 4);
        assert_eq!(path.bins, vec![(2, 2); 4]);
    }

    #[test]
    fn fully_masked_next_slot_is_an_error() {
        let params = TrackerParams::default();
        let a = peaky_spectrum(3, (1, 1), 0);
        let mut b = peaky_spectrum(3, (1, 1), 1);
        for m in &mut b.mask {
            *m = true;
        }
        let mut state = init_tracker(&params, std::slice::from_ref(&a)).unwrap();
        let before = state.costs.clone();
        assert!(matches!(
            step(&mut state, &params, &a, &b),
            Err(Error::NoFinitePath)
        ));
        assert_eq!(state.slot, 0);
        assert_eq!(state.costs, before);
    }

    #[test]
    fn oversized_instances_are_rejected_with_the_work_estimate() {
        let params = TrackerParams { q: 2, ..TrackerParams::default() };
        let spectra: Vec<Spectrum> =
            (0..8).map(|t| peaky_spectrum(8, (4, 4), t)).collect();
        match brute_force_best_path(&params, &spectra, (4, 4)) {
            Err(Error::SearchTooLarge { work, limit }) => {
                assert_eq!(limit, 1e7);
                assert!(work > limit);
            }
            other => panic!("expected SearchTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_params() {
        let ok = TrackerParams::default();
        assert!(ok.validate().is_ok());
        assert!(TrackerParams { q: 0, ..ok }.validate().is_err());
        assert!(TrackerParams { omega: -1.0, ..ok }.validate().is_err());
        assert!(TrackerParams { omega_theta: -0.1, ..ok }.validate().is_err());
        assert!(TrackerParams { history_depth: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn tracker_holds_the_surface_through_a_brighter_crossing() {
        // A 1.5x interferer sweeps the whole delay axis while sitting far
        // off-angle, the worst case for a per-slot peak picker: it jumps to
        // the brighter return wherever it is. The trellis cannot reach the
        // interferer (3 delay bins per slot against a window of 2, and an
        // unreachable angle row) and stays on the surface.
        let config = RadarConfig {
            carrier_frequency: 61.8e9,
            bandwidth: 3.6e9,
            num_antennas: 4,
            num_freq_points: 64,
            element_spacing: SPEED_OF_LIGHT / (2.0 * 61.8e9),
            noise_std: 0.0,
        };
        let geometry = MountGeometry::default();
        let grid = build_grid(&config, 32, default_aoa_range(), default_tof_range(&geometry)).unwrap();
        let surface_bin = 20usize;
        let surface_aoa = grid.aoa_bins[16];
        let surface_tof = grid.tof_bins[surface_bin];

        let slots = 11usize;
        let mut spectra = Vec::new();
        for t in 0..slots {
            let mut paths = vec![PropagationPath::new(
                PathLabel::LiquidSurface,
                surface_aoa,
                surface_tof,
                1.0,
            )];
            if t >= 1 {
                let j = 2 + 3 * (t - 1);
                paths.push(PropagationPath::new(
                    PathLabel::Gripper,
                    grid.aoa_bins[2],
                    grid.tof_bins[j],
                    1.5,
                ));
            }
            let frame = synthesize_frame(&config, &paths, t as i64, t as u64).unwrap();
            let mut s = compute_spectrum(&grid, &frame, false).unwrap();
            apply_los_mask(&mut s, grid.tof_bins[0]);
            normalize_spectrum(&mut s);
            spectra.push(s);
        }

        let params = TrackerParams { q: 2, ..TrackerParams::default() };
        let mut state = init_tracker(&params, &spectra[..1]).unwrap();
        let mut tracked = vec![state.current.bin];
        for t in 1..slots {
            step(&mut state, &params, &spectra[t - 1], &spectra[t]).unwrap();
            tracked.push(state.current.bin);
        }

        let picked: Vec<(usize, usize)> = spectra
            .iter()
            .map(|s| static_peak(s).unwrap().0)
            .collect();

        let tracked_err: usize = tracked
            .iter()
            .map(|&(_, j)| j.abs_diff(surface_bin))
            .max()
            .unwrap();
        let picked_err: usize = picked
            .iter()
            .map(|&(_, j)| j.abs_diff(surface_bin))
            .max()
            .unwrap();
        assert!(tracked_err <= 2, "tracker drifted {tracked_err} bins");
        assert!(picked_err >= 8, "peak picking should chase the interferer");
    }
}
