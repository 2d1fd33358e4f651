//! Detailed-balance jump-rate families.
//!
//! Every family satisfies `r(dE) = exp(-beta*dE) * r(-dE)`, the classical
//! image of the thermal-bath condition: uphill moves are suppressed by the
//! Boltzmann factor of the energy they absorb.

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RateFamily {
    Glauber,
    Metropolis,
    Custom,
}

impl std::str::FromStr for RateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "glauber" => Ok(RateFamily::Glauber),
            "metropolis" => Ok(RateFamily::Metropolis),
            other => Err(Error::ParseConfig(format!("unknown rate family {other:?}"))),
        }
    }
}

/// Jump rates as a function of the energy gap of a proposed flip.
#[derive(Clone, Debug)]
pub struct RateFunction {
    family: RateFamily,
    beta: f64,
    /// custom per-gap table, sorted by gap
    table: Vec<(f64, f64)>,
}

impl RateFunction {
    /// `r(dE) = 1 / (1 + exp(beta*dE))`; the default family.
    pub fn glauber(beta: f64) -> Self {
        RateFunction { family: RateFamily::Glauber, beta, table: Vec::new() }
    }

    /// `r(dE) = min(1, exp(-beta*dE))`.
    pub fn metropolis(beta: f64) -> Self {
        RateFunction { family: RateFamily::Metropolis, beta, table: Vec::new() }
    }

    pub fn family(beta: f64, family: RateFamily) -> Result<Self> {
        match family {
            RateFamily::Glauber => Ok(Self::glauber(beta)),
            RateFamily::Metropolis => Ok(Self::metropolis(beta)),
            RateFamily::Custom => Err(Error::ParseConfig(
                "custom rates need an explicit table".into(),
            )),
        }
    }

    /// Explicit per-gap table. Validated against detailed balance at `beta`
    /// and against the (0, 1] range shared by the built-in families.
    pub fn custom(beta: f64, mut entries: Vec<(f64, f64)>) -> Result<Self> {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(gap, rate) in &entries {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::RateRange(1.0));
            }
            let mirrored = entries
                .iter()
                .find(|(g, _)| (g + gap).abs() < 1e-9)
                .ok_or(Error::DetailedBalance(gap))?
                .1;
            let lhs = rate * (beta * gap).exp();
            if (lhs - mirrored).abs() > 1e-9 * mirrored.abs().max(1.0) {
                return Err(Error::DetailedBalance(gap));
            }
        }
        Ok(RateFunction { family: RateFamily::Custom, beta, table: entries })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kind(&self) -> RateFamily {
        self.family
    }

    /// Rate of a move with energy gap `delta`.
    pub fn rate(&self, delta: f64) -> Result<f64> {
        match self.family {
            RateFamily::Glauber => Ok(1.0 / (1.0 + (self.beta * delta).exp())),
            RateFamily::Metropolis => Ok((-self.beta * delta).exp().min(1.0)),
            RateFamily::Custom => self
                .table
                .iter()
                .find(|(g, _)| (g - delta).abs() < 1e-9)
                .map(|&(_, r)| r)
                .ok_or(Error::MissingBathEntry(delta)),
        }
    }

    /// Largest downhill rate over the model's gap set; the classical image
    /// of the bath spectral ceiling `sup h(omega)` over non-negative
    /// frequencies.
    pub fn h_max(&self, gaps: &[f64]) -> Result<f64> {
        let mut best = 0.0f64;
        for &g in gaps {
            let omega = g.abs();
            best = best.max(self.rate(-omega)?);
        }
        Ok(best)
    }

    /// Exact detailed-balance identity over a gap set.
    pub fn check_detailed_balance(&self, gaps: &[f64]) -> Result<()> {
        for &g in gaps {
            let lhs = self.rate(g)? * (self.beta * g).exp();
            let rhs = self.rate(-g)?;
            if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1.0) {
                return Err(Error::DetailedBalance(g));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glauber_values() {
        let r = RateFunction::glauber(0.0);
        for g in [-4.0, -2.0, 0.0, 2.0, 4.0] {
            assert!((r.rate(g).unwrap() - 0.5).abs() < 1e-15);
        }
        let r = RateFunction::glauber(1.5);
        let gaps = [-4.0, -2.0, 0.0, 2.0, 4.0];
        r.check_detailed_balance(&gaps).unwrap();
        assert!(r.rate(4.0).unwrap() < r.rate(-4.0).unwrap());
    }

    #[test]
    fn metropolis_detailed_balance() {
        let r = RateFunction::metropolis(0.7);
        r.check_detailed_balance(&[-4.0, -2.0, 0.0, 2.0, 4.0]).unwrap();
        assert_eq!(r.rate(-3.0).unwrap(), 1.0);
    }

    #[test]
    fn custom_table_is_validated() {
        let beta = 1.0;
        let entries = vec![
            (-2.0, 1.0),
            (0.0, 0.5),
            (2.0, (-2.0f64 * beta).exp()),
        ];
        let r = RateFunction::custom(beta, entries).unwrap();
        assert!((r.rate(2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!(matches!(r.rate(4.0), Err(Error::MissingBathEntry(_))));

        let bad = vec![(-2.0, 1.0), (2.0, 0.5)];
        assert!(RateFunction::custom(beta, bad).is_err());

        let missing = vec![(-2.0, 1.0)];
        assert!(RateFunction::custom(beta, missing).is_err());
    }

    #[test]
    fn h_max_over_gap_set() {
        let r = RateFunction::glauber(2.0);
        let h = r.h_max(&[-4.0, -2.0, 0.0, 2.0, 4.0]).unwrap();
        assert!((h - 1.0 / (1.0 + (-8.0f64).exp())).abs() < 1e-15);
    }
}
