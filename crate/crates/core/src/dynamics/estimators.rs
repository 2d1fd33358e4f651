//! Monte Carlo estimators for the stability analysis: loop-tail
//! probabilities, one-step autocorrelation sums, decay-rate bounds,
//! trajectory autocorrelations and the fidelity floor.

use serde::Serialize;

use crate::decoder::{self, Frame};
use crate::dynamics::chain::{ChainState, RateCache, SyndromeModel};
use crate::dynamics::observable::Observable;
use crate::dynamics::rates::RateFunction;
use crate::error::{Error, Result};
use crate::homology::{self, circular_window, SpinConfig};
use crate::lattice::{DualPlane, LatticeGeometry};

pub const MIN_BATCHES: usize = 16;

/// A point estimate with its batch-means standard error and provenance.
#[derive(Clone, Debug, Serialize)]
pub struct EstimatorResult {
    pub estimator: String,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub d: usize,
    pub l: usize,
    pub beta: f64,
    pub seed: u64,
}

/// Run context threaded into every result row.
#[derive(Clone, Copy, Debug)]
pub struct RunContext {
    pub d: usize,
    pub l: usize,
    pub beta: f64,
    pub seed: u64,
}

impl RunContext {
    pub fn for_geom(geom: &LatticeGeometry, beta: f64, seed: u64) -> Self {
        RunContext { d: geom.dim(), l: geom.linear_size(), beta, seed }
    }

    fn result(&self, estimator: &str, values: &[f64]) -> Result<EstimatorResult> {
        let (value, stderr) = batch_means(values)?;
        Ok(EstimatorResult {
            estimator: estimator.to_string(),
            value,
            stderr,
            n: values.len(),
            d: self.d,
            l: self.l,
            beta: self.beta,
            seed: self.seed,
        })
    }
}

/// Mean and standard error over at least [`MIN_BATCHES`] contiguous batches.
pub fn batch_means(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptySamples);
    }
    if values.len() < MIN_BATCHES {
        return Err(Error::TooFewSamples(MIN_BATCHES));
    }
    let b = MIN_BATCHES;
    let base = values.len() / b;
    let extra = values.len() % b;
    let mut means = Vec::with_capacity(b);
    let mut start = 0;
    for i in 0..b {
        let len = base + usize::from(i < extra);
        let batch = &values[start..start + len];
        means.push(batch.iter().sum::<f64>() / batch.len() as f64);
        start += len;
    }
    let grand = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (b - 1) as f64;
    Ok((grand, (var / b as f64).sqrt()))
}

/// Fraction of samples whose syndrome contains a loop of length at least
/// `l_threshold`. Monotone nonincreasing in the threshold.
pub fn estimate_loop_tail(
    geom: &LatticeGeometry,
    samples: &[SpinConfig],
    l_threshold: usize,
    ctx: RunContext,
) -> Result<EstimatorResult> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut values = Vec::with_capacity(samples.len());
    for s in samples {
        let k = homology::boundary(geom, s)?;
        let loops = homology::decompose_loops(geom, &k)?;
        let hit = loops.iter().any(|lp| lp.len() >= l_threshold);
        values.push(if hit { 1.0 } else { 0.0 });
    }
    ctx.result(&format!("loop_tail_ge_{l_threshold}"), &values)
}

fn plaquette_occupancy(geom: &LatticeGeometry, j: usize) -> [u64; 4] {
    let l = geom.linear_size();
    let pos = geom.plaq_position(j);
    let (a, b) = geom.plaq_axes(j);
    let mut occ = [0u64; 4];
    for (axis, o) in occ.iter_mut().enumerate().take(geom.dim()) {
        *o |= 1u64 << pos[axis];
        if axis == a || axis == b {
            *o |= 1u64 << ((pos[axis] + 1) % l);
        }
    }
    occ
}

/// One-step autocorrelation sum of the dressed observable:
/// the Gibbs average of `sum_j (1 - T(S) T(flip_j S))`, equal to twice the
/// expected number of plaquettes whose flip changes the measurement.
///
/// Fast path: when both the current and the flipped syndrome are certified
/// to stay in the short confined regime, the term vanishes identically by
/// single-flip stability and is skipped. Flips that could leave the regime
/// are re-measured in full. On a fixed subsample the fast path is validated
/// against the full slow evaluation exactly.
pub fn estimate_one_step_sum(
    geom: &LatticeGeometry,
    samples: &[SpinConfig],
    plane: &DualPlane,
    frame: &Frame,
    c: f64,
    ctx: RunContext,
) -> Result<EstimatorResult> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut values = Vec::with_capacity(samples.len());
    for (idx, s) in samples.iter().enumerate() {
        let mut work = s.clone();
        let fast = one_step_sample(geom, &mut work, plane, frame, c, false)?;
        if idx % 128 == 0 {
            let slow = one_step_sample(geom, &mut work, plane, frame, c, true)?;
            if (fast - slow).abs() > 1e-9 {
                return Err(Error::InvariantViolation(format!(
                    "one-step fast path {fast} disagrees with full evaluation {slow}"
                )));
            }
        }
        values.push(fast);
    }
    ctx.result("one_step_sum", &values)
}

fn one_step_sample(
    geom: &LatticeGeometry,
    s: &mut SpinConfig,
    plane: &DualPlane,
    frame: &Frame,
    c: f64,
    force_full: bool,
) -> Result<f64> {
    let l = geom.linear_size();
    let syndrome = homology::boundary(geom, s)?;
    let loops = homology::decompose_loops(geom, &syndrome)?;
    let all_short = loops.iter().all(|lp| lp.is_short_confined(geom, c));
    let raw = decoder::bare_observable(geom, s, plane);
    let t_s = decoder::measure_dressed_from_loops(geom, raw, &loops, plane, frame, c)?.dressed;

    let mut link_loop: std::collections::HashMap<u32, usize> =
        std::collections::HashMap::new();
    for (i, lp) in loops.iter().enumerate() {
        for &link in lp.links() {
            link_loop.insert(link, i);
        }
    }

    let mut sum = 0.0;
    let mut touched = [usize::MAX; 4];
    for j in 0..geom.n_plaquettes() {
        let mut full = force_full || !all_short;
        if !full {
            let mut n_touched = 0;
            for &link in geom.plaq_links(j) {
                if let Some(&i) = link_loop.get(&link) {
                    if !touched[..n_touched].contains(&i) {
                        touched[n_touched] = i;
                        n_touched += 1;
                    }
                }
            }
            let mut len_bound = 4usize;
            let mut occ = plaquette_occupancy(geom, j);
            for &i in &touched[..n_touched] {
                len_bound += loops[i].len();
                for (a, o) in occ.iter_mut().enumerate() {
                    *o |= loops[i].occupancy()[a];
                }
            }
            let len_ok = len_bound as f64 <= c * l as f64 + 1e-9;
            let win_ok =
                (0..geom.dim()).all(|a| circular_window(occ[a], l) + 2 <= l);
            // certified: the flipped syndrome stays short and confined, so
            // the dressed value cannot move
            full = !(len_ok && win_ok);
        }
        if full {
            s.toggle(j);
            let t_j =
                decoder::measure_dressed(geom, s, plane, frame, c)?.dressed;
            s.toggle(j);
            sum += f64::from(1 - i16::from(t_s) * i16::from(t_j));
        }
    }
    Ok(sum)
}

/// Decay-rate ceiling assembled from the one-step sum and the bath ceiling.
pub fn decay_rate_bound(one_step_sum: f64, h_max: f64) -> Result<f64> {
    if one_step_sum < 0.0 {
        return Err(Error::NegativeInput(one_step_sum));
    }
    if h_max < 0.0 {
        return Err(Error::NegativeInput(h_max));
    }
    Ok(4.0 * h_max * one_step_sum)
}

/// Average fidelity floor from the two logical autocorrelations.
pub fn fidelity_lower_bound(ax: f64, az: f64) -> Result<f64> {
    for v in [ax, az] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::OutOfUnitRange(v));
        }
    }
    Ok(0.5 * (ax + az))
}

/// Equilibrium autocorrelation of a dichotomic observable along Markov
/// trajectories.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    /// sweep counts at which the observable was recorded
    pub times: Vec<u64>,
    /// chain-averaged product T(0)*T(t)
    pub product_mean: Vec<f64>,
    pub product_stderr: Vec<f64>,
    /// identity-projected, normalized form: (E[T0 Tt] - m^2) / (1 - m^2)
    pub connected: Vec<f64>,
    pub connected_stderr: Vec<f64>,
    /// pooled estimate of the equilibrium mean of the observable
    pub observable_mean: f64,
    pub n_chains: usize,
}

/// Run `chains` independent equilibrated trajectories and average the
/// product of the observable at time zero and along the time grid (in
/// sweeps, strictly increasing, starting at 0).
///
/// The connected form subtracts the squared equilibrium mean and normalizes
/// by the variance, matching an observable that has been projected
/// orthogonal to the identity and normalized; at `t = 0` it is exactly 1.
pub fn autocorr_trajectory(
    geom: &LatticeGeometry,
    observable: &Observable,
    rates: &RateFunction,
    burn_in: usize,
    times: &[u64],
    chains: usize,
    seed: u64,
) -> Result<Trajectory> {
    if times.is_empty() || times[0] != 0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvariantViolation(
            "time grid must start at 0 and increase".into(),
        ));
    }
    if chains < 2 {
        return Err(Error::TooFewSamples(2));
    }
    let model = observable.model();
    let cache = RateCache::build(geom, model, rates)?;
    let mut products = vec![Vec::with_capacity(chains); times.len()];
    let mut value_sum = 0.0f64;
    let mut value_count = 0usize;

    for chain_id in 0..chains {
        let mut chain = ChainState::new(geom, model, seed, chain_id as u64);
        for _ in 0..burn_in {
            chain.sweep(geom, &cache);
        }
        let t0 = observable.measure(geom, chain.spins())? as f64;
        let mut now = 0u64;
        for (ti, &t) in times.iter().enumerate() {
            while now < t {
                chain.sweep(geom, &cache);
                now += 1;
            }
            let tv = observable.measure(geom, chain.spins())? as f64;
            products[ti].push(t0 * tv);
            value_sum += tv;
            value_count += 1;
        }
    }

    let m = value_sum / value_count as f64;
    let denom = 1.0 - m * m;
    let mut product_mean = Vec::with_capacity(times.len());
    let mut product_stderr = Vec::with_capacity(times.len());
    let mut connected = Vec::with_capacity(times.len());
    let mut connected_stderr = Vec::with_capacity(times.len());
    for series in &products {
        let mean = series.iter().sum::<f64>() / series.len() as f64;
        let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            / (series.len() - 1).max(1) as f64;
        let se = (var / series.len() as f64).sqrt();
        product_mean.push(mean);
        product_stderr.push(se);
        if denom > 1e-9 {
            connected.push((mean - m * m) / denom);
            connected_stderr.push(se / denom);
        } else {
            // observable is frozen; the raw product already is the
            // normalized autocorrelation
            connected.push(mean);
            connected_stderr.push(se);
        }
    }
    Ok(Trajectory {
        times: times.to_vec(),
        product_mean,
        product_stderr,
        connected,
        connected_stderr,
        observable_mean: m,
        n_chains: chains,
    })
}

/// Convenience wrapper: sample, then estimate the one-step sum and its
/// decay-rate ceiling in one go.
pub fn one_step_experiment(
    geom: &LatticeGeometry,
    rates: &RateFunction,
    plane: &DualPlane,
    c: f64,
    burn_in: usize,
    thinning: usize,
    n: usize,
    seed: u64,
) -> Result<(EstimatorResult, f64)> {
    let run = crate::dynamics::chain::sample_gibbs(
        geom,
        SyndromeModel::LinkExcitations,
        rates,
        burn_in,
        thinning,
        n,
        seed,
    )?;
    let ctx = RunContext::for_geom(geom, rates.beta(), seed);
    let frame = Frame::standard(geom.dim());
    let est = estimate_one_step_sum(geom, &run.samples, plane, &frame, c, ctx)?;
    let h_max = rates.h_max(&SyndromeModel::LinkExcitations.gap_set(geom))?;
    let bound = decay_rate_bound(est.value, h_max)?;
    Ok((est, bound))
}
