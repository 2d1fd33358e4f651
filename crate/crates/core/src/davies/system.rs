//! System descriptions for the exact thermal generator.

use nalgebra::DMatrix;

use crate::davies::pauli::{commutant_is_trivial, PauliString, PauliTerm};
use crate::error::{Error, Result};

pub const SPIN_CAP: usize = 10;

/// Bath spectral function table.
///
/// Only the spectral density enters the generator; the bath itself is never
/// simulated. Every variant satisfies `h(-w) = exp(-beta*w) * h(w)`.
#[derive(Clone, Debug)]
pub enum BathSpectrum {
    /// `h(w) = 1` for `w >= 0` and `exp(beta*w)` below; the minimal
    /// consistent choice.
    FlatOhmic,
    /// Explicit `(omega, value)` entries; looked up within 1e-6.
    Table(Vec<(f64, f64)>),
}

impl BathSpectrum {
    pub fn value(&self, omega: f64, beta: f64) -> Result<f64> {
        match self {
            BathSpectrum::FlatOhmic => {
                if omega >= 0.0 {
                    Ok(1.0)
                } else {
                    Ok((beta * omega).exp())
                }
            }
            BathSpectrum::Table(entries) => entries
                .iter()
                .find(|(w, _)| (w - omega).abs() < 1e-6)
                .map(|&(_, v)| v)
                .ok_or(Error::MissingBathEntry(omega)),
        }
    }

    /// `sup h(omega)` over the non-negative frequencies of the system.
    pub fn ceiling(&self, omegas: &[f64], beta: f64) -> Result<f64> {
        let mut best = 0.0f64;
        for &w in omegas {
            if w >= -1e-12 {
                best = best.max(self.value(w.max(0.0), beta)?);
            }
        }
        Ok(best)
    }

    pub fn check_kms(&self, omegas: &[f64], beta: f64) -> Result<()> {
        for &w in omegas {
            if w <= 1e-12 {
                continue;
            }
            let lhs = self.value(-w, beta)?;
            let rhs = (-beta * w).exp() * self.value(w, beta)?;
            if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1e-12) {
                return Err(Error::DetailedBalance(w));
            }
        }
        Ok(())
    }
}

/// A spin system small enough for exact treatment: a Pauli-term
/// Hamiltonian, a list of coupling operators and a bath spectrum.
#[derive(Clone, Debug)]
pub struct SmallSystem {
    n: usize,
    terms: Vec<PauliTerm>,
    couplings: Vec<PauliString>,
    bath: BathSpectrum,
}

impl SmallSystem {
    pub fn new(
        n: usize,
        terms: Vec<PauliTerm>,
        couplings: Vec<PauliString>,
        bath: BathSpectrum,
    ) -> Result<Self> {
        if n > SPIN_CAP {
            return Err(Error::SpinCap(n, SPIN_CAP));
        }
        for t in &terms {
            if t.op.n != n || !t.op.is_hermitian() {
                return Err(Error::NonHermitianTerm(t.op.to_text()));
            }
        }
        for c in &couplings {
            if c.n != n || !c.is_hermitian() {
                return Err(Error::NonHermitianTerm(c.to_text()));
            }
        }
        Ok(SmallSystem { n, terms, couplings, bath })
    }

    /// The default coupling set: one sigma-x and one sigma-z per site.
    pub fn with_default_couplings(
        n: usize,
        terms: Vec<PauliTerm>,
        bath: BathSpectrum,
    ) -> Result<Self> {
        let mut couplings = Vec::with_capacity(2 * n);
        for j in 0..n {
            couplings.push(PauliString::single_x(n, j));
            couplings.push(PauliString::single_z(n, j));
        }
        SmallSystem::new(n, terms, couplings, bath)
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn couplings(&self) -> &[PauliString] {
        &self.couplings
    }

    pub fn bath(&self) -> &BathSpectrum {
        &self.bath
    }

    pub fn hamiltonian_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            h += t.op.dense() * t.coeff;
        }
        h
    }

    /// No non-identity Pauli commutes with every coupling and every
    /// Hamiltonian term; with the couplings acting site by site this is the
    /// ergodicity condition for the reduced dynamics.
    pub fn check_ergodicity(&self) -> Result<()> {
        let mut gens: Vec<PauliString> = self.couplings.clone();
        gens.extend(self.terms.iter().map(|t| t.op));
        if commutant_is_trivial(self.n, &gens) {
            Ok(())
        } else {
            Err(Error::NonErgodic)
        }
    }
}
