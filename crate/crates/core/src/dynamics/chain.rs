//! Single-spin-flip Markov chains with incrementally maintained syndromes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::dynamics::rates::RateFunction;
use crate::error::{Error, Result};
use crate::homology::SpinConfig;
use crate::lattice::LatticeGeometry;

/// Which excitations a flip toggles: links (the gauge model the dressed X
/// observable lives in) or cubes (the dual model that carries Z-plane
/// observables; its excitations are point-like).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SyndromeModel {
    LinkExcitations,
    CubeExcitations,
}

impl SyndromeModel {
    pub fn syndrome_cells(&self, geom: &LatticeGeometry) -> usize {
        match self {
            SyndromeModel::LinkExcitations => geom.n_links(),
            SyndromeModel::CubeExcitations => geom.n_cubes(),
        }
    }

    #[inline]
    pub fn cells_of<'g>(&self, geom: &'g LatticeGeometry, plaquette: usize) -> &'g [u32] {
        match self {
            SyndromeModel::LinkExcitations => geom.plaq_links(plaquette),
            SyndromeModel::CubeExcitations => geom.plaq_cubes(plaquette),
        }
    }

    /// Energy gaps a single flip can produce, in units of one excitation.
    pub fn gap_set(&self, geom: &LatticeGeometry) -> Vec<f64> {
        let c = self.cells_of(geom, 0).len() as i64;
        (-c..=c).step_by(2).map(|g| g as f64).collect()
    }
}

/// Number of excited cells of a configuration (energy in units of the
/// per-excitation cost).
pub fn energy(geom: &LatticeGeometry, s: &SpinConfig) -> Result<u64> {
    Ok(crate::homology::boundary(geom, s)?.count_ones() as u64)
}

fn syndrome_of(geom: &LatticeGeometry, model: SyndromeModel, s: &SpinConfig) -> Bits {
    let mut syn = Bits::new(model.syndrome_cells(geom));
    for p in s.ones() {
        for &cell in model.cells_of(geom, p) {
            syn.toggle(cell as usize);
        }
    }
    syn
}

/// One Markov chain: spins, cached syndrome, energy and a private RNG
/// stream. The cached syndrome always equals the one recomputed from the
/// spins; `cache_consistent` checks that.
pub struct ChainState {
    model: SyndromeModel,
    spins: SpinConfig,
    syndrome: Bits,
    energy: i64,
    rng: ChaCha8Rng,
    pub attempted: u64,
    pub accepted: u64,
    pub sweeps: u64,
}

impl ChainState {
    pub fn new(geom: &LatticeGeometry, model: SyndromeModel, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ChainState {
            model,
            spins: SpinConfig::empty(geom),
            syndrome: Bits::new(model.syndrome_cells(geom)),
            energy: 0,
            rng,
            attempted: 0,
            accepted: 0,
            sweeps: 0,
        }
    }

    pub fn from_config(
        geom: &LatticeGeometry,
        model: SyndromeModel,
        spins: SpinConfig,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        if spins.len() != geom.n_plaquettes() {
            return Err(Error::SizeMismatch {
                expected: geom.n_plaquettes(),
                got: spins.len(),
            });
        }
        let syndrome = syndrome_of(geom, model, &spins);
        let energy = syndrome.count_ones() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(ChainState {
            model,
            spins,
            syndrome,
            energy,
            rng,
            attempted: 0,
            accepted: 0,
            sweeps: 0,
        })
    }

    pub fn spins(&self) -> &SpinConfig {
        &self.spins
    }

    pub fn model(&self) -> SyndromeModel {
        self.model
    }

    pub fn energy(&self) -> u64 {
        self.energy as u64
    }

    /// Energy change of flipping plaquette `j`: +1 per excitation created,
    /// -1 per excitation removed.
    #[inline]
    pub fn local_delta(&self, geom: &LatticeGeometry, j: usize) -> i64 {
        let mut delta = 0i64;
        for &cell in self.model.cells_of(geom, j) {
            delta += if self.syndrome.get(cell as usize) { -1 } else { 1 };
        }
        delta
    }

    #[inline]
    fn apply_flip(&mut self, geom: &LatticeGeometry, j: usize, delta: i64) {
        self.spins.toggle(j);
        for &cell in self.model.cells_of(geom, j) {
            self.syndrome.toggle(cell as usize);
        }
        self.energy += delta;
        self.accepted += 1;
    }

    /// One attempted flip of a uniformly chosen plaquette, accepted with the
    /// rate of its energy gap. Satisfies detailed balance with respect to
    /// the Gibbs weight exactly.
    pub fn step(&mut self, geom: &LatticeGeometry, rates: &RateCache) {
        let j = self.rng.gen_range(0..geom.n_plaquettes());
        let delta = self.local_delta(geom, j);
        let p = rates.rate(delta);
        if self.rng.gen::<f64>() < p {
            self.apply_flip(geom, j, delta);
        }
        self.attempted += 1;
    }

    /// One attempted flip per plaquette on average.
    pub fn sweep(&mut self, geom: &LatticeGeometry, rates: &RateCache) {
        for _ in 0..geom.n_plaquettes() {
            self.step(geom, rates);
        }
        self.sweeps += 1;
    }

    pub fn cache_consistent(&self, geom: &LatticeGeometry) -> bool {
        let syn = syndrome_of(geom, self.model, &self.spins);
        syn == self.syndrome && self.energy == syn.count_ones() as i64
    }
}

/// Acceptance probabilities precomputed over the model's gap set.
pub struct RateCache {
    offset: i64,
    by_gap: Vec<f64>,
}

impl RateCache {
    pub fn build(
        geom: &LatticeGeometry,
        model: SyndromeModel,
        rates: &RateFunction,
    ) -> Result<Self> {
        let c = model.cells_of(geom, 0).len() as i64;
        rates.check_detailed_balance(&model.gap_set(geom))?;
        let by_gap = (-c..=c)
            .map(|g| rates.rate(g as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(RateCache { offset: c, by_gap })
    }

    #[inline]
    pub fn rate(&self, delta: i64) -> f64 {
        self.by_gap[(delta + self.offset) as usize]
    }
}

/// Output of a sampling run: thinned configurations, the post-burn-in
/// energy trace (one entry per sweep), and a two-half stationarity
/// diagnostic on that trace.
pub struct GibbsRun {
    pub samples: Vec<SpinConfig>,
    pub energy_trace: Vec<u64>,
    pub stationary: bool,
}

/// Deterministic Gibbs sampler: identical arguments give bit-identical
/// samples.
pub fn sample_gibbs(
    geom: &LatticeGeometry,
    model: SyndromeModel,
    rates: &RateFunction,
    burn_in: usize,
    thinning: usize,
    n: usize,
    seed: u64,
) -> Result<GibbsRun> {
    if thinning == 0 || burn_in == 0 {
        return Err(Error::NegativeInput(0.0));
    }
    let cache = RateCache::build(geom, model, rates)?;
    let mut chain = ChainState::new(geom, model, seed, 0);
    for _ in 0..burn_in {
        chain.sweep(geom, &cache);
    }
    let mut samples = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n * thinning);
    for i in 0..n {
        for _ in 0..thinning {
            chain.sweep(geom, &cache);
            trace.push(chain.energy());
        }
        samples.push(chain.spins().clone());
        if i % 64 == 0 && !chain.cache_consistent(geom) {
            return Err(Error::InvariantViolation(
                "cached syndrome drifted from the spin configuration".into(),
            ));
        }
    }
    let stationary = two_half_stationary(&trace);
    Ok(GibbsRun { samples, energy_trace: trace, stationary })
}

/// Compare the means of the two halves of a trace against their combined
/// batch error.
fn two_half_stationary(trace: &[u64]) -> bool {
    if trace.len() < 32 {
        return true;
    }
    let half = trace.len() / 2;
    let (a, b) = trace.split_at(half);
    let mean = |xs: &[u64]| xs.iter().sum::<u64>() as f64 / xs.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let se = |xs: &[u64], m: f64| {
        let var =
            xs.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / xs.len() as f64;
        (var / xs.len() as f64).sqrt()
    };
    let tol = 6.0 * (se(a, ma).powi(2) + se(b, mb).powi(2)).sqrt() + 1e-9;
    (ma - mb).abs() <= tol.max(0.05 * ma.max(mb).max(1.0))
}
