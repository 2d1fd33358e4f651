//! Classical side of the quantum-to-classical reduction, plus the standard
//! torus model the cross-check runs on.
//!
//! For an observable that is a product of sigma-x factors and commutes with
//! every stabilizer, the full thermal generator acts exactly like a
//! classical single-flip Markov chain on the x-basis configurations of the
//! star-only Hamiltonian. Both sides of that identity are computed
//! independently here: the quantum side through the eigenbasis generator,
//! the classical side by exhaustive enumeration with the dynamics module's
//! rate tables.

use serde::Serialize;

use crate::davies::oracle::Oracle;
use crate::davies::pauli::{PauliString, PauliTerm};
use crate::davies::system::{BathSpectrum, SmallSystem};
use crate::dynamics::RateFunction;
use crate::error::{Error, Result};
use crate::lattice::LatticeGeometry;

/// A star-only gauge model over n classical spins: the x-basis image of
/// `H = -sum_s X_s`.
#[derive(Clone, Debug)]
pub struct ClassicalGaugeModel {
    n: usize,
    stars: Vec<u32>,
}

impl ClassicalGaugeModel {
    pub fn new(n: usize, stars: Vec<u32>) -> Result<Self> {
        if n > 26 {
            return Err(Error::EnumerationCap(n, 26));
        }
        Ok(ClassicalGaugeModel { n, stars })
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn stars(&self) -> &[u32] {
        &self.stars
    }

    /// `E = -sum_s prod_{j in s} x_j`; configuration bit 1 is x-value -1.
    pub fn energy(&self, config: u32) -> f64 {
        let mut e = 0.0;
        for &s in &self.stars {
            e -= if (s & config).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        }
        e
    }

    /// All energy gaps single flips can produce.
    pub fn gap_set(&self) -> Vec<f64> {
        let mut gaps: Vec<i64> = Vec::new();
        for config in 0u32..(1 << self.n) {
            for j in 0..self.n {
                let d = (self.energy(config ^ (1 << j)) - self.energy(config)) as i64;
                if !gaps.contains(&d) {
                    gaps.push(d);
                }
            }
        }
        gaps.sort_unstable();
        gaps.into_iter().map(|g| g as f64).collect()
    }

    /// Jump rates induced by a bath spectrum: a flip with gap `dE` runs at
    /// `h(-dE)`.
    pub fn rates_from_bath(&self, bath: &BathSpectrum, beta: f64) -> Result<RateFunction> {
        let entries = self
            .gap_set()
            .into_iter()
            .map(|g| Ok((g, bath.value(-g, beta)?)))
            .collect::<Result<Vec<_>>>()?;
        RateFunction::custom(beta, entries)
    }

    pub fn gibbs_mean(&self, beta: f64, observable: &PauliString) -> Result<f64> {
        self.check_observable(observable)?;
        let mut z = 0.0;
        let mut acc = 0.0;
        let e0 = self.ground_energy();
        for config in 0u32..(1 << self.n) {
            let w = (-beta * (self.energy(config) - e0)).exp();
            z += w;
            acc += w * f64::from(observable.x_basis_value(config));
        }
        Ok(acc / z)
    }

    /// `-<f, L f>` for the dichotomic observable under single-flip dynamics
    /// with the given rates, by exhaustive enumeration.
    pub fn dirichlet_form(
        &self,
        beta: f64,
        observable: &PauliString,
        rates: &RateFunction,
    ) -> Result<f64> {
        self.check_observable(observable)?;
        let e0 = self.ground_energy();
        let mut z = 0.0;
        let mut acc = 0.0;
        for config in 0u32..(1 << self.n) {
            let e = self.energy(config);
            let w = (-beta * (e - e0)).exp();
            z += w;
            let f_here = f64::from(observable.x_basis_value(config));
            for j in 0..self.n {
                let flipped = config ^ (1 << j);
                let rate = rates.rate(self.energy(flipped) - e)?;
                let f_there = f64::from(observable.x_basis_value(flipped));
                acc += w * rate * (1.0 - f_here * f_there);
            }
        }
        Ok(acc / z)
    }

    /// Dirichlet form over the identity-projected norm.
    pub fn decay_rate(
        &self,
        beta: f64,
        observable: &PauliString,
        rates: &RateFunction,
    ) -> Result<f64> {
        let mean = self.gibbs_mean(beta, observable)?;
        let norm2 = 1.0 - mean * mean;
        if norm2 <= 1e-12 {
            return Err(Error::ZeroNormObservable);
        }
        Ok(self.dirichlet_form(beta, observable, rates)? / norm2)
    }

    fn ground_energy(&self) -> f64 {
        -(self.stars.len() as f64)
    }

    fn check_observable(&self, observable: &PauliString) -> Result<()> {
        if observable.z != 0 || observable.n != self.n {
            return Err(Error::CommutationPrecondition);
        }
        Ok(())
    }
}

/// Both sides of the reduction identity, plus the projected rates.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub beta: f64,
    pub quantum_form: f64,
    pub primed_form: f64,
    pub classical_form: f64,
    pub quantum_rate: f64,
    pub classical_rate: f64,
    pub bound: f64,
}

impl ReductionReport {
    pub fn residual(&self) -> f64 {
        (self.quantum_form - self.classical_form).abs()
    }

    pub fn residual_primed(&self) -> f64 {
        (self.primed_form - self.classical_form).abs()
    }
}

/// Evaluate the reduction identity for `observable`.
///
/// `full` carries the complete Hamiltonian with both coupling types,
/// `primed` the star-only Hamiltonian with z couplings; the classical side
/// is enumerated with rates drawn from the shared bath. The observable must
/// commute with every term of the full Hamiltonian.
pub fn verify_classical_reduction(
    full: &Oracle,
    primed: &Oracle,
    classical: &ClassicalGaugeModel,
    beta: f64,
    observable: &PauliString,
) -> Result<ReductionReport> {
    for t in full.system().terms() {
        if !observable.commutes_with(&t.op) {
            return Err(Error::CommutationPrecondition);
        }
    }
    let x = observable.dense();
    let quantum_form = full.dirichlet_form(beta, &x)?;
    let primed_form = primed.dirichlet_form(beta, &x)?;
    let rates = classical.rates_from_bath(full.system().bath(), beta)?;
    let classical_form = classical.dirichlet_form(beta, observable, &rates)?;
    let quantum_rate = full.decay_rate(beta, &x)?;
    let classical_rate = classical.decay_rate(beta, observable, &rates)?;
    let bound = full.upper_bound_rate(beta, &x)?;
    Ok(ReductionReport {
        beta,
        quantum_form,
        primed_form,
        classical_form,
        quantum_rate,
        classical_rate,
        bound,
    })
}

/// The toric stabilizer model on an `l x l` torus with spins on links: star
/// operators on the four links of each node, plaquette operators on the
/// four links of each face, and the winding logical pair.
pub struct KitaevTorus {
    pub full: SmallSystem,
    pub primed: SmallSystem,
    pub classical: ClassicalGaugeModel,
    pub stars: Vec<PauliString>,
    pub plaquettes: Vec<PauliString>,
    /// x-product over a column of parallel links: the bare loop observable
    pub logical_x: PauliString,
    /// z-product over a winding path of links
    pub logical_z: PauliString,
}

pub fn kitaev_torus(l: usize, bath: BathSpectrum) -> Result<KitaevTorus> {
    let geom = LatticeGeometry::build(2, l)?;
    let n = geom.n_links();
    if n > 32 {
        return Err(Error::SpinCap(n, 32));
    }

    let star_sites = |v: usize| -> Vec<usize> {
        geom.node_links(v).iter().map(|&x| x as usize).collect()
    };
    let stars: Vec<PauliString> = (0..geom.n_nodes())
        .map(|v| PauliString::x_on(n, &star_sites(v)))
        .collect();
    let plaquettes: Vec<PauliString> = (0..geom.n_plaquettes())
        .map(|p| {
            let sites: Vec<usize> =
                geom.plaq_links(p).iter().map(|&x| x as usize).collect();
            PauliString::z_on(n, &sites)
        })
        .collect();

    // column of links along axis 0 at first coordinate 0
    let x_sites: Vec<usize> = (0..n)
        .filter(|&li| geom.link_axis(li) == 0 && geom.link_position(li)[0] == 0)
        .collect();
    let logical_x = PauliString::x_on(n, &x_sites);
    // winding path of axis-0 links at second coordinate 0
    let z_sites: Vec<usize> = (0..n)
        .filter(|&li| geom.link_axis(li) == 0 && geom.link_position(li)[1] == 0)
        .collect();
    let logical_z = PauliString::z_on(n, &z_sites);

    let mut full_terms: Vec<PauliTerm> =
        stars.iter().map(|&s| PauliTerm::new(s, -1.0)).collect();
    full_terms.extend(plaquettes.iter().map(|&p| PauliTerm::new(p, -1.0)));
    let full = SmallSystem::with_default_couplings(n, full_terms, bath.clone())?;

    let primed_terms: Vec<PauliTerm> =
        stars.iter().map(|&s| PauliTerm::new(s, -1.0)).collect();
    let z_couplings: Vec<PauliString> =
        (0..n).map(|j| PauliString::single_z(n, j)).collect();
    let primed = SmallSystem::new(n, primed_terms, z_couplings, bath)?;

    let star_masks: Vec<u32> = (0..geom.n_nodes())
        .map(|v| {
            geom.node_links(v)
                .iter()
                .fold(0u32, |m, &li| m | (1 << li))
        })
        .collect();
    let classical = ClassicalGaugeModel::new(n, star_masks)?;

    Ok(KitaevTorus {
        full,
        primed,
        classical,
        stars,
        plaquettes,
        logical_x,
        logical_z,
    })
}
