//! The exact weak-coupling thermal generator on the eigenbasis of small
//! Hamiltonians.
//!
//! The generator is never materialized as a superoperator matrix; it is
//! applied to operators directly, which keeps the cost at a handful of
//! dimension-sized matrix products per coupling and Bohr frequency.

use nalgebra::{Complex, DMatrix};

use crate::davies::system::SmallSystem;
use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// Frequency-resolved parts of a coupling operator, in the computational
/// basis. Summing all components recovers the coupling; the component at
/// `-w` is the adjoint of the one at `w`.
#[derive(Clone, Debug)]
pub struct BohrDecomposition {
    pub omegas: Vec<f64>,
    pub components: Vec<DMatrix<f64>>,
}

impl BohrDecomposition {
    pub fn total(&self) -> DMatrix<f64> {
        let dim = self.components[0].nrows();
        self.components
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc, c| acc + c)
    }

    pub fn component_at(&self, omega: f64) -> Option<&DMatrix<f64>> {
        self.omegas
            .iter()
            .position(|&w| (w - omega).abs() < 1e-9)
            .map(|i| &self.components[i])
    }
}

const FREQ_MERGE_TOL: f64 = 1e-9;

/// Exact generator for one [`SmallSystem`].
pub struct Oracle {
    sys: SmallSystem,
    dim: usize,
    energies: Vec<f64>,
    /// eigenvector columns
    basis: DMatrix<f64>,
    /// couplings transformed into the eigenbasis
    couplings_eig: Vec<DMatrix<f64>>,
    /// merged Bohr frequencies, ascending, always including 0
    freqs: Vec<f64>,
}

impl Oracle {
    pub fn new(sys: SmallSystem) -> Result<Self> {
        let dim = sys.dim();
        let h = sys.hamiltonian_dense();
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut basis = DMatrix::zeros(dim, dim);
        for (new_col, &old_col) in order.iter().enumerate() {
            basis.set_column(new_col, &eig.eigenvectors.column(old_col));
        }

        // merged Bohr frequency set; stabilizer spectra are integer so the
        // merge tolerance only has to absorb round-off
        let mut gaps: Vec<f64> = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                gaps.push(energies[j] - energies[i]);
            }
        }
        gaps.sort_by(f64::total_cmp);
        let mut freqs: Vec<f64> = Vec::new();
        let mut cluster: Vec<f64> = Vec::new();
        for g in gaps {
            match cluster.last() {
                Some(&last) if (g - last).abs() <= FREQ_MERGE_TOL => cluster.push(g),
                _ => {
                    if !cluster.is_empty() {
                        freqs.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                    }
                    cluster = vec![g];
                }
            }
        }
        if !cluster.is_empty() {
            freqs.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
        }

        let couplings_eig = sys
            .couplings()
            .iter()
            .map(|c| basis.transpose() * c.dense() * &basis)
            .collect();

        sys.bath().check_kms(&freqs, 1.0)?;
        Ok(Oracle { sys, dim, energies, basis, couplings_eig, freqs })
    }

    pub fn system(&self) -> &SmallSystem {
        &self.sys
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn bohr_frequencies(&self) -> &[f64] {
        &self.freqs
    }

    pub fn bath_ceiling(&self, beta: f64) -> Result<f64> {
        self.sys.bath().ceiling(&self.freqs, beta)
    }

    fn gibbs(&self, beta: f64) -> Vec<f64> {
        let e0 = self.energies[0];
        let mut w: Vec<f64> = self
            .energies
            .iter()
            .map(|&e| (-beta * (e - e0)).exp())
            .collect();
        let z: f64 = w.iter().sum();
        for v in &mut w {
            *v /= z;
        }
        w
    }

    fn to_eigen(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.basis.transpose() * x * &self.basis
    }

    fn from_eigen(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.basis * x * self.basis.transpose()
    }

    /// Component of an eigenbasis operator at Bohr frequency `omega`:
    /// matrix elements lowering the energy by exactly `omega`.
    fn masked(&self, a: &DMatrix<f64>, omega: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            if (self.energies[j] - self.energies[i] - omega).abs() <= 10.0 * FREQ_MERGE_TOL {
                a[(i, j)]
            } else {
                0.0
            }
        })
    }

    /// Frequency decomposition of coupling `alpha` in the computational
    /// basis.
    pub fn bohr_decompose(&self, alpha: usize) -> Result<BohrDecomposition> {
        let a = self
            .couplings_eig
            .get(alpha)
            .ok_or_else(|| Error::InvalidCell(format!("coupling {alpha}")))?;
        let mut omegas = Vec::new();
        let mut components = Vec::new();
        for &w in &self.freqs {
            let m = self.masked(a, w);
            if m.norm() > 1e-13 {
                omegas.push(w);
                components.push(self.from_eigen(&m));
            }
        }
        Ok(BohrDecomposition { omegas, components })
    }

    /// Dissipative part of the generator applied to a real operator, in the
    /// computational basis.
    pub fn apply_dissipator(&self, beta: f64, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let xe = self.to_eigen(x);
        let de = self.apply_dissipator_eigen(beta, &xe)?;
        Ok(self.from_eigen(&de))
    }

    fn apply_dissipator_eigen(&self, beta: f64, xe: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for a_full in &self.couplings_eig {
            for &w in &self.freqs {
                let a = self.masked(a_full, w);
                if a.norm() <= 1e-13 {
                    continue;
                }
                let h = self.sys.bath().value(w, beta)?;
                let at = a.transpose();
                let xa = xe * &a;
                let ax = &a * xe;
                // S'(w) [X, S(w)] + [S'(w), X] S(w)
                out += (&at * (&xa - &ax) + (&at * xe - xe * &at) * &a) * (0.5 * h);
            }
        }
        Ok(out)
    }

    /// Full generator `i[H, X] + D(X)` on a complex operator.
    pub fn apply_generator(&self, beta: f64, x: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let basis_c = self.basis.map(|v| C64::new(v, 0.0));
        let xe = basis_c.adjoint() * x * &basis_c;
        // Hamiltonian part is diagonal in the eigenbasis
        let mut out = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            C64::new(0.0, self.energies[i] - self.energies[j]) * xe[(i, j)]
        });
        for a_full in &self.couplings_eig {
            for &w in &self.freqs {
                let a = self.masked(a_full, w);
                if a.norm() <= 1e-13 {
                    continue;
                }
                let h = C64::new(0.5 * self.sys.bath().value(w, beta)?, 0.0);
                let a_c = a.map(|v| C64::new(v, 0.0));
                let at = a_c.adjoint();
                let xa = &xe * &a_c;
                let ax = &a_c * &xe;
                out += (&at * (&xa - &ax) + (&at * &xe - &xe * &at) * &a_c) * h;
            }
        }
        Ok(&basis_c * out * basis_c.adjoint())
    }

    /// Thermal inner product `Tr(rho X' Y)` of real operators.
    pub fn liouville_inner(&self, beta: f64, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        let xe = self.to_eigen(x);
        let ye = self.to_eigen(y);
        self.inner_eigen(beta, &xe, &ye)
    }

    fn inner_eigen(&self, beta: f64, xe: &DMatrix<f64>, ye: &DMatrix<f64>) -> f64 {
        let rho = self.gibbs(beta);
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += rho[i] * xe[(j, i)] * ye[(j, i)];
            }
        }
        acc
    }

    pub fn gibbs_expectation(&self, beta: f64, x: &DMatrix<f64>) -> f64 {
        let xe = self.to_eigen(x);
        let rho = self.gibbs(beta);
        (0..self.dim).map(|i| rho[i] * xe[(i, i)]).sum()
    }

    /// Dirichlet form `-<X, D(X)>` of the dissipator; non-negative.
    pub fn dirichlet_form(&self, beta: f64, x: &DMatrix<f64>) -> Result<f64> {
        let xe = self.to_eigen(x);
        let de = self.apply_dissipator_eigen(beta, &xe)?;
        Ok(-self.inner_eigen(beta, &xe, &de))
    }

    /// Decay rate of a Hermitian observable: the Dirichlet form divided by
    /// the thermal norm after projecting out the identity component. The
    /// Hamiltonian part of the generator is skew in the thermal product and
    /// contributes nothing for Hermitian observables.
    pub fn decay_rate(&self, beta: f64, x: &DMatrix<f64>) -> Result<f64> {
        let mean = self.gibbs_expectation(beta, x);
        let norm2 = self.liouville_inner(beta, x, x) - mean * mean;
        if norm2 <= 1e-12 {
            return Err(Error::ZeroNormObservable);
        }
        Ok(self.dirichlet_form(beta, x)? / norm2)
    }

    /// Decay-rate ceiling `2 h_max sum_a <[S_a, X], [S_a, X]>`.
    ///
    /// Requires the observable to be an eigenvector of the Hamiltonian
    /// adjoint action; for a Hermitian observable that forces commutation
    /// with the Hamiltonian, which is what is checked.
    pub fn upper_bound_rate(&self, beta: f64, x: &DMatrix<f64>) -> Result<f64> {
        let h = self.sys.hamiltonian_dense();
        let comm = &h * x - x * &h;
        let scale = x.norm().max(1.0) * h.norm().max(1.0);
        if comm.norm() > 1e-8 * scale {
            return Err(Error::NotEigenvector);
        }
        let h_max = self.bath_ceiling(beta)?;
        let mut total = 0.0;
        for c in self.sys.couplings() {
            let s = c.dense();
            let k = &s * x - x * &s;
            total += self.liouville_inner(beta, &k, &k);
        }
        Ok(2.0 * h_max * total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::davies::pauli::{PauliString, PauliTerm};
    use crate::davies::system::BathSpectrum;

    fn single_spin() -> Oracle {
        let term = PauliTerm::new(PauliString::single_z(1, 0), 1.0);
        let sys =
            SmallSystem::with_default_couplings(1, vec![term], BathSpectrum::FlatOhmic)
                .unwrap();
        Oracle::new(sys).unwrap()
    }

    #[test]
    fn two_level_bohr_components() {
        let oracle = single_spin();
        assert_eq!(oracle.energies(), &[-1.0, 1.0]);
        // coupling 0 is sigma-x: raising and lowering at +-2
        let bohr = oracle.bohr_decompose(0).unwrap();
        assert_eq!(bohr.omegas.len(), 2);
        assert!((bohr.omegas[0] + 2.0).abs() < 1e-12);
        assert!((bohr.omegas[1] - 2.0).abs() < 1e-12);
        // completeness and the adjoint pairing
        let x = PauliString::single_x(1, 0).dense();
        assert!((bohr.total() - &x).norm() < 1e-12);
        let up = bohr.component_at(2.0).unwrap();
        let down = bohr.component_at(-2.0).unwrap();
        assert!((up.transpose() - down).norm() < 1e-12);
        // eigenoperator relation [H, S(w)] = -w S(w)
        let h = oracle.system().hamiltonian_dense();
        for (w, s) in bohr.omegas.iter().zip(&bohr.components) {
            let lhs = &h * s - s * &h;
            assert!((lhs + s * *w).norm() < 1e-9);
        }
    }

    #[test]
    fn generator_annihilates_identity_and_fixes_gibbs() {
        let term = PauliTerm::new(PauliString::z_on(2, &[0, 1]), -1.0);
        let sys =
            SmallSystem::with_default_couplings(2, vec![term], BathSpectrum::FlatOhmic)
                .unwrap();
        let oracle = Oracle::new(sys).unwrap();
        let beta = 0.9;
        let dim = oracle.dim();
        let id = DMatrix::<f64>::identity(dim, dim);
        assert!(oracle.apply_dissipator(beta, &id).unwrap().norm() < 1e-12);
        let id_c = id.map(|v| C64::new(v, 0.0));
        assert!(oracle.apply_generator(beta, &id_c).unwrap().norm() < 1e-12);

        // stationarity of the thermal state on random symmetric operators
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..4 {
            let mut x = DMatrix::<f64>::zeros(dim, dim);
            for i in 0..dim {
                for j in i..dim {
                    let v = rng.gen_range(-1.0..1.0);
                    x[(i, j)] = v;
                    x[(j, i)] = v;
                }
            }
            let lx = oracle.apply_dissipator(beta, &x).unwrap();
            assert!(oracle.gibbs_expectation(beta, &lx).abs() < 1e-10);
            // reversibility: <Y, D X> = <D Y, X>
            let mut y = DMatrix::<f64>::zeros(dim, dim);
            for i in 0..dim {
                for j in i..dim {
                    let v = rng.gen_range(-1.0..1.0);
                    y[(i, j)] = v;
                    y[(j, i)] = v;
                }
            }
            let ly = oracle.apply_dissipator(beta, &y).unwrap();
            let lhs = oracle.liouville_inner(beta, &y, &lx);
            let rhs = oracle.liouville_inner(beta, &ly, &x);
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn two_level_relaxation_rate_matches_closed_form() {
        // independent oracle: the two-state master equation with rates
        // h(2) downhill and h(-2) uphill relaxes sigma-z at their sum
        let oracle = single_spin();
        for beta in [0.3, 1.0, 2.5] {
            let z = PauliString::single_z(1, 0).dense();
            let rate = oracle.decay_rate(beta, &z).unwrap();
            let down = 1.0;
            let up = (-2.0 * beta as f64).exp();
            let expected = down + up;
            assert!(
                (rate - expected).abs() < 1e-10,
                "beta={beta}: {rate} vs {expected}"
            );
        }
    }

    #[test]
    fn commutator_part_is_skew_in_the_thermal_product() {
        let term = PauliTerm::new(PauliString::z_on(2, &[0, 1]), -1.0);
        let sys =
            SmallSystem::with_default_couplings(2, vec![term], BathSpectrum::FlatOhmic)
                .unwrap();
        let oracle = Oracle::new(sys).unwrap();
        let h = oracle.system().hamiltonian_dense();
        let rate = oracle.decay_rate(0.8, &h);
        // H is conserved by the commutator part; the dissipative rate it
        // picks up is finite and non-negative
        let r = rate.unwrap();
        assert!(r >= -1e-10);
    }

    #[test]
    fn upper_bound_dominates_two_level_rate() {
        let oracle = single_spin();
        let beta = 1.1;
        let z = PauliString::single_z(1, 0).dense();
        let bound = oracle.upper_bound_rate(beta, &z).unwrap();
        // [sigma_x, sigma_z] has squared thermal norm 4; the z coupling
        // commutes
        let h_max = oracle.bath_ceiling(beta).unwrap();
        assert!((bound - 8.0 * h_max).abs() < 1e-10);
        let mean = oracle.gibbs_expectation(beta, &z);
        let form = oracle.dirichlet_form(beta, &z).unwrap();
        assert!(form / (1.0 - mean * mean) <= bound + 1e-10);

        // non-commuting observables are rejected
        let x = PauliString::single_x(1, 0).dense();
        assert!(matches!(
            oracle.upper_bound_rate(beta, &x),
            Err(Error::NotEigenvector)
        ));
    }

    #[test]
    fn dissipator_is_positive_and_kernel_is_identity() {
        // materialize the form on the symmetric and antisymmetric real
        // blocks in a thermally orthonormalized basis; test-only cost
        let term = PauliTerm::new(PauliString::z_on(2, &[0, 1]), -1.0);
        let sys =
            SmallSystem::with_default_couplings(2, vec![term], BathSpectrum::FlatOhmic)
                .unwrap();
        let oracle = Oracle::new(sys).unwrap();
        oracle.system().check_ergodicity().unwrap();
        let beta = 0.7;
        let dim = oracle.dim();

        let mut basis_ops: Vec<DMatrix<f64>> = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let mut m = DMatrix::zeros(dim, dim);
                m[(i, j)] = 1.0;
                m[(j, i)] = 1.0;
                basis_ops.push(m);
            }
        }
        for i in 0..dim {
            for j in i + 1..dim {
                let mut m = DMatrix::zeros(dim, dim);
                m[(i, j)] = 1.0;
                m[(j, i)] = -1.0;
                basis_ops.push(m);
            }
        }
        let nb = basis_ops.len();
        let mut gram = DMatrix::<f64>::zeros(nb, nb);
        let mut form = DMatrix::<f64>::zeros(nb, nb);
        let images: Vec<_> = basis_ops
            .iter()
            .map(|b| oracle.apply_dissipator(beta, b).unwrap())
            .collect();
        for a in 0..nb {
            for b in 0..nb {
                gram[(a, b)] = oracle.liouville_inner(beta, &basis_ops[a], &basis_ops[b]);
                form[(a, b)] = -oracle.liouville_inner(beta, &basis_ops[a], &images[b]);
            }
        }
        let chol = gram.cholesky().expect("thermal Gram matrix is positive");
        let li = chol.l().try_inverse().unwrap();
        let reduced = &li * form * li.transpose();
        let sym = (&reduced + reduced.transpose()) * 0.5;
        let eigs = sym.symmetric_eigen().eigenvalues;
        let mut zero_modes = 0;
        for &e in eigs.iter() {
            assert!(e > -1e-9, "negative mode {e}");
            if e.abs() < 1e-9 {
                zero_modes += 1;
            }
        }
        assert_eq!(zero_modes, 1, "kernel must be spanned by the identity alone");
    }

    #[test]
    fn semigroup_relaxes_toward_the_thermal_average() {
        let term = PauliTerm::new(PauliString::single_z(1, 0), 1.0);
        let sys =
            SmallSystem::with_default_couplings(1, vec![term], BathSpectrum::FlatOhmic)
                .unwrap();
        let oracle = Oracle::new(sys).unwrap();
        let beta = 0.6;
        let x0 = PauliString::single_z(1, 0).dense().map(|v| C64::new(v, 0.0))
            + PauliString::single_x(1, 0).dense().map(|v| C64::new(v, 0.3));
        let target = oracle.gibbs_expectation(
            beta,
            &PauliString::single_z(1, 0).dense(),
        );
        // RK4 on dX/dt = L(X)
        let mut x = x0;
        let dt = 0.02;
        for _ in 0..800 {
            let k1 = oracle.apply_generator(beta, &x).unwrap();
            let k2 = oracle
                .apply_generator(beta, &(&x + &k1 * C64::new(dt / 2.0, 0.0)))
                .unwrap();
            let k3 = oracle
                .apply_generator(beta, &(&x + &k2 * C64::new(dt / 2.0, 0.0)))
                .unwrap();
            let k4 = oracle
                .apply_generator(beta, &(&x + &k3 * C64::new(dt, 0.0)))
                .unwrap();
            x += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                * C64::new(dt / 6.0, 0.0);
        }
        let id = DMatrix::<C64>::identity(2, 2);
        let diff = &x - id * C64::new(target, 0.0);
        assert!(diff.norm() < 1e-4, "residual {}", diff.norm());
    }
}
