//! Observables tracked by the dynamics experiments.

use crate::decoder::{self, Frame};
use crate::dynamics::chain::SyndromeModel;
use crate::error::Result;
use crate::homology::SpinConfig;
use crate::lattice::{DualPlane, LatticeGeometry};

/// A dichotomic observable of the spin configuration together with the
/// excitation model whose dynamics it belongs to.
#[derive(Clone, Debug)]
pub enum Observable {
    /// Raw support parity corrected by short-loop surface crossings.
    DressedX { plane: DualPlane, frame: Frame, c: f64 },
    /// Raw support parity only.
    BareX { plane: DualPlane },
    /// Plane parity evolving under the point-excitation (cube) model. No
    /// loop dressing exists for it; it is carried along as the unstable
    /// partner of the dressed X observable.
    ZPlane { support: SpinConfig },
}

impl Observable {
    pub fn dressed_x(geom: &LatticeGeometry, plane: DualPlane, c: f64) -> Self {
        Observable::DressedX { plane, frame: Frame::standard(geom.dim()), c }
    }

    pub fn bare_x(plane: DualPlane) -> Self {
        Observable::BareX { plane }
    }

    pub fn z_plane(support: SpinConfig) -> Self {
        Observable::ZPlane { support }
    }

    pub fn model(&self) -> SyndromeModel {
        match self {
            Observable::DressedX { .. } | Observable::BareX { .. } => {
                SyndromeModel::LinkExcitations
            }
            Observable::ZPlane { .. } => SyndromeModel::CubeExcitations,
        }
    }

    pub fn measure(&self, geom: &LatticeGeometry, s: &SpinConfig) -> Result<i8> {
        match self {
            Observable::DressedX { plane, frame, c } => {
                Ok(decoder::measure_dressed(geom, s, plane, frame, *c)?.dressed)
            }
            Observable::BareX { plane } => Ok(decoder::bare_observable(geom, s, plane)),
            Observable::ZPlane { support } => {
                let mut parity = 0usize;
                for p in support.ones() {
                    if s.get(p) {
                        parity ^= 1;
                    }
                }
                Ok(if parity == 0 { 1 } else { -1 })
            }
        }
    }
}
