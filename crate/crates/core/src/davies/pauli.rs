//! Pauli strings over up to 32 spins, stored as X/Z bit masks.
//!
//! A string is the operator `X^x Z^z` (Z factors applied first). Strings
//! without an X/Z overlap on any site are Hermitian and real in the
//! computational basis, which covers every operator this oracle handles.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PauliString {
    pub n: usize,
    pub x: u32,
    pub z: u32,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: 0, z: 0 }
    }

    pub fn x_on(n: usize, sites: &[usize]) -> Self {
        let mut x = 0;
        for &s in sites {
            x |= 1 << s;
        }
        PauliString { n, x, z: 0 }
    }

    pub fn z_on(n: usize, sites: &[usize]) -> Self {
        let mut z = 0;
        for &s in sites {
            z |= 1 << s;
        }
        PauliString { n, x: 0, z }
    }

    pub fn single_x(n: usize, site: usize) -> Self {
        PauliString { n, x: 1 << site, z: 0 }
    }

    pub fn single_z(n: usize, site: usize) -> Self {
        PauliString { n, x: 0, z: 1 << site }
    }

    /// Parse strings like `"XIZX"`; site 0 is the leftmost character.
    pub fn from_text(text: &str) -> Result<Self> {
        let n = text.len();
        if n == 0 || n > 32 {
            return Err(Error::ParsePauli(format!("bad length {n}")));
        }
        let mut x = 0u32;
        let mut z = 0u32;
        for (i, ch) in text.chars().enumerate() {
            match ch.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << i,
                'Z' => z |= 1 << i,
                'Y' => {
                    return Err(Error::ParsePauli(
                        "Y factors are not supported; use X/Z products".into(),
                    ))
                }
                other => return Err(Error::ParsePauli(format!("bad character {other:?}"))),
            }
        }
        Ok(PauliString { n, x, z })
    }

    pub fn to_text(&self) -> String {
        (0..self.n)
            .map(|i| match (self.x >> i & 1, self.z >> i & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => '?',
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        (self.x & self.z).count_ones() % 2 == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let sym = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        sym % 2 == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Dense matrix in the computational basis. Real for every string
    /// without an on-site X/Z overlap.
    pub fn dense(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let row = col ^ self.x as usize;
            let sign = if (self.z as usize & col).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m[(row, col)] = sign;
        }
        m
    }

    /// Value of a diagonal (Z-free) string on a computational configuration
    /// in the X basis, i.e. the product of the +-1 X eigenvalues over its
    /// support. Configuration bit 1 means eigenvalue -1.
    pub fn x_basis_value(&self, config: u32) -> i8 {
        debug_assert_eq!(self.z, 0, "only X products are diagonal in the X basis");
        if (self.x & config).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PauliTerm {
    pub op: PauliString,
    pub coeff: f64,
}

impl PauliTerm {
    pub fn new(op: PauliString, coeff: f64) -> Self {
        PauliTerm { op, coeff }
    }
}

/// Trivial-commutant test over GF(2).
///
/// A Pauli string commutes with every generator iff its (x, z) masks are
/// symplectically orthogonal to all of them, so the commutant of the
/// generated algebra is scalar exactly when the associated GF(2) system has
/// full rank 2n.
pub fn commutant_is_trivial(n: usize, generators: &[PauliString]) -> bool {
    // row for generator g constrains unknown (px, pz): px.g_z + pz.g_x = 0
    let mut rows: Vec<u64> = generators
        .iter()
        .map(|g| (g.z as u64) | ((g.x as u64) << n))
        .collect();
    let mut rank = 0usize;
    for bit in 0..2 * n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let lead = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 != 0 {
                *row ^= lead;
            }
        }
        rank += 1;
    }
    rank == 2 * n
}
