//! Z2 boundary calculus on the torus: spin configurations as 2-chains,
//! excited-link syndromes, loop decomposition, winding labels and homology
//! classes.
//!
//! Conventions: a spin configuration is one bit per plaquette relative to the
//! all-down reference, a syndrome is one bit per link, and XOR is the chain
//! addition. A link is excited when an odd number of its incident plaquettes
//! are flipped.

use crate::bits::Bits;
use crate::decoder::{self, Frame};
use crate::error::{Error, Result};
use crate::lattice::{CellId, LatticeGeometry};

/// One bit per plaquette; the classical state / 2-chain over Z2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpinConfig {
    pub(crate) bits: Bits,
}

/// One bit per link; syndromes produced by [`boundary`] are always cycles.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkConfig {
    pub(crate) bits: Bits,
}

macro_rules! config_common {
    ($ty:ident, $count:ident, $kind:literal) => {
        impl $ty {
            pub fn empty(geom: &LatticeGeometry) -> Self {
                $ty { bits: Bits::new(geom.$count()) }
            }

            pub fn from_cells(geom: &LatticeGeometry, cells: &[u32]) -> Self {
                let mut bits = Bits::new(geom.$count());
                for &c in cells {
                    bits.toggle(c as usize);
                }
                $ty { bits }
            }

            #[inline]
            pub fn get(&self, i: usize) -> bool {
                self.bits.get(i)
            }

            #[inline]
            pub fn toggle(&mut self, i: usize) {
                self.bits.toggle(i);
            }

            pub fn len(&self) -> usize {
                self.bits.len()
            }

            pub fn is_empty(&self) -> bool {
                self.bits.is_empty()
            }

            pub fn count_ones(&self) -> usize {
                self.bits.count_ones()
            }

            pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
                self.bits.ones()
            }

            /// `d<d>L<L>:<kind>:<hex>` with the canonical cell order fixing
            /// the bit order.
            pub fn serialize(&self, geom: &LatticeGeometry) -> String {
                format!(
                    "d{}L{}:{}:{}",
                    geom.dim(),
                    geom.linear_size(),
                    $kind,
                    self.bits.to_hex()
                )
            }

            pub fn deserialize(geom: &LatticeGeometry, s: &str) -> Result<Self> {
                let mut parts = s.split(':');
                let head = parts.next().unwrap_or("");
                let kind = parts.next().ok_or_else(|| {
                    Error::ParseConfig("missing cell-kind field".into())
                })?;
                let hex = parts
                    .next()
                    .ok_or_else(|| Error::ParseConfig("missing payload".into()))?;
                if parts.next().is_some() {
                    return Err(Error::ParseConfig("trailing fields".into()));
                }
                let expect_head = format!("d{}L{}", geom.dim(), geom.linear_size());
                if head != expect_head {
                    return Err(Error::ParseConfig(format!(
                        "header {head:?} does not match geometry {expect_head:?}"
                    )));
                }
                if kind != $kind {
                    return Err(Error::ParseConfig(format!(
                        "cell-kind {kind:?}, expected {:?}",
                        $kind
                    )));
                }
                Ok($ty { bits: Bits::from_hex(hex, geom.$count())? })
            }
        }
    };
}

config_common!(SpinConfig, n_plaquettes, "plaq");
config_common!(LinkConfig, n_links, "link");

fn check_len(len: usize, expected: usize) -> Result<()> {
    if len != expected {
        Err(Error::SizeMismatch { expected, got: len })
    } else {
        Ok(())
    }
}

/// Syndrome of a spin configuration: link set iff an odd number of incident
/// plaquettes are flipped.
pub fn boundary(geom: &LatticeGeometry, s: &SpinConfig) -> Result<LinkConfig> {
    check_len(s.len(), geom.n_plaquettes())?;
    let mut k = Bits::new(geom.n_links());
    for p in s.ones() {
        for &l in geom.plaq_links(p) {
            k.toggle(l as usize);
        }
    }
    Ok(LinkConfig { bits: k })
}

/// Bitwise sum mod 2. `boundary` is a homomorphism with respect to it.
pub fn xor(a: &SpinConfig, b: &SpinConfig) -> Result<SpinConfig> {
    check_len(a.len(), b.len())?;
    let mut out = a.clone();
    out.bits.xor_assign(&b.bits);
    Ok(out)
}

/// Flip the six face plaquettes of an elementary cube. Leaves the syndrome
/// unchanged: every link of the cube lies in exactly two of its faces.
pub fn flip_cube(geom: &LatticeGeometry, s: &SpinConfig, cube: &CellId) -> Result<SpinConfig> {
    check_len(s.len(), geom.n_plaquettes())?;
    if cube.k != 3 {
        return Err(Error::InvalidCell(format!("expected a cube, got k={}", cube.k)));
    }
    let idx = geom.cell_index(cube)?;
    let mut out = s.clone();
    for &p in geom.cube_plaqs(idx) {
        out.bits.toggle(p as usize);
    }
    Ok(out)
}

/// In-place cube flip by cube index; the hot-path variant.
pub fn flip_cube_index(geom: &LatticeGeometry, s: &mut SpinConfig, cube: usize) {
    for &p in geom.cube_plaqs(cube) {
        s.bits.toggle(p as usize);
    }
}

/// One connected closed component of a syndrome, stored as a closed walk
/// visiting each link exactly once.
#[derive(Clone, Debug)]
pub struct Loop {
    links: Vec<u32>,
    /// per-axis bitmask of node positions touched by the loop
    occupancy: [u64; 4],
}

impl Loop {
    pub fn links(&self) -> &[u32] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Size of the minimal circular window covering the loop along `axis`.
    pub fn window(&self, axis: usize, l: usize) -> usize {
        circular_window(self.occupancy[axis], l)
    }

    pub fn max_window(&self, geom: &LatticeGeometry) -> usize {
        (0..geom.dim())
            .map(|a| self.window(a, geom.linear_size()))
            .max()
            .unwrap_or(0)
    }

    /// Operational shortness used by the measurement pipeline: the length
    /// bound `len <= c*L` plus a confinement guard `window <= L-2` on every
    /// axis, which keeps the closing surface (and pairs of such surfaces)
    /// from wrapping the torus.
    pub fn is_short_confined(&self, geom: &LatticeGeometry, c: f64) -> bool {
        let l = geom.linear_size();
        if self.links.len() as f64 > c * l as f64 + 1e-9 {
            return false;
        }
        (0..geom.dim()).all(|a| self.window(a, l) + 2 <= l)
    }

    pub(crate) fn occupancy(&self) -> &[u64; 4] {
        &self.occupancy
    }
}

/// Minimal number of consecutive positions (circularly) covering `mask`.
pub(crate) fn circular_window(mask: u64, l: usize) -> usize {
    if mask == 0 {
        return 0;
    }
    let full = if l == 64 { !0u64 } else { (1u64 << l) - 1 };
    if mask == full {
        return l;
    }
    // longest circular run of unoccupied positions
    let mut best_gap = 0usize;
    let mut run = 0usize;
    for i in 0..2 * l {
        if mask >> (i % l) & 1 == 0 {
            run += 1;
            best_gap = best_gap.max(run.min(l));
        } else {
            run = 0;
        }
    }
    l - best_gap
}

/// Length threshold from the stability analysis: a loop is short when its
/// length is at most `c * L`. The fraction must satisfy `0 < c < 1/2`.
pub fn is_short(lp: &Loop, linear_size: usize, c: f64) -> Result<bool> {
    if !(c > 0.0 && c < 0.5) {
        return Err(Error::InvalidFraction(c));
    }
    Ok(lp.len() as f64 <= c * linear_size as f64 + 1e-9)
}

/// Split a cycle into its connected closed components.
///
/// Components are discovered through shared nodes and each is returned as a
/// closed walk (every node has even degree, so an Euler circuit exists).
/// Ties at self-crossings are broken by link index, which the canonical
/// frame ordering fixes.
pub fn decompose_loops(geom: &LatticeGeometry, k: &LinkConfig) -> Result<Vec<Loop>> {
    check_len(k.len(), geom.n_links())?;
    let links: Vec<u32> = k.ones().map(|l| l as u32).collect();
    decompose_sparse(geom, &links)
}

pub(crate) fn decompose_sparse(geom: &LatticeGeometry, links: &[u32]) -> Result<Vec<Loop>> {
    if links.is_empty() {
        return Ok(Vec::new());
    }
    use std::collections::HashMap;
    let mut adj: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    for &l in links {
        let [a, b] = geom.link_nodes(l as usize);
        adj.entry(a).or_default().push((l, b));
        adj.entry(b).or_default().push((l, a));
    }
    for (node, edges) in &mut adj {
        if edges.len() % 2 != 0 {
            return Err(Error::NotACycle(*node as usize));
        }
        edges.sort_unstable();
    }

    let mut used: std::collections::HashSet<u32> = std::collections::HashSet::new();
    let mut loops = Vec::new();
    let mut order = links.to_vec();
    order.sort_unstable();
    for &seed in &order {
        if used.contains(&seed) {
            continue;
        }
        let start = geom.link_nodes(seed as usize)[0];
        let circuit = euler_circuit(&adj, &mut used, start);
        let mut occupancy = [0u64; 4];
        for &l in &circuit {
            for node in geom.link_nodes(l as usize) {
                let pos = geom.node_position(node as usize);
                for (a, occ) in occupancy.iter_mut().enumerate().take(geom.dim()) {
                    *occ |= 1u64 << pos[a];
                }
            }
        }
        loops.push(Loop { links: circuit, occupancy });
    }
    Ok(loops)
}

/// Hierholzer circuit over the unused links reachable from `start`.
fn euler_circuit(
    adj: &std::collections::HashMap<u32, Vec<(u32, u32)>>,
    used: &mut std::collections::HashSet<u32>,
    start: u32,
) -> Vec<u32> {
    let mut stack: Vec<(u32, Option<u32>)> = vec![(start, None)];
    let mut circuit = Vec::new();
    while let Some(&(node, via)) = stack.last() {
        let next = adj[&node]
            .iter()
            .find(|(l, _)| !used.contains(l))
            .copied();
        match next {
            Some((l, other)) => {
                used.insert(l);
                stack.push((other, Some(l)));
            }
            None => {
                stack.pop();
                if let Some(l) = via {
                    circuit.push(l);
                }
            }
        }
    }
    circuit.reverse();
    circuit
}

/// Winding-parity label: one bit per canonical dual line (3D) or dual plane
/// (4D). Defined for closed configurations only; invariant under cube flips
/// and additive under XOR.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct HomologyLabel {
    bits: u8,
    n: usize,
}

impl HomologyLabel {
    pub fn zero(n: usize) -> Self {
        HomologyLabel { bits: 0, n }
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits >> i & 1 != 0
    }

    pub fn n_bits(&self) -> usize {
        self.n
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones() as usize
    }
}

impl std::fmt::Display for HomologyLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.bits >> i & 1)?;
        }
        Ok(())
    }
}

/// Winding parities of a closed configuration against the canonical
/// observable supports (3 dual lines in 3D, 6 dual planes in 4D, ordered by
/// axes).
pub fn winding_label(geom: &LatticeGeometry, s: &SpinConfig) -> Result<HomologyLabel> {
    check_len(s.len(), geom.n_plaquettes())?;
    if !boundary(geom, s)?.is_empty() {
        return Err(Error::NotClosed);
    }
    let planes = geom.canonical_planes()?;
    let mut bits = 0u8;
    for (i, plane) in planes.iter().enumerate() {
        let parity = plane
            .plaquettes()
            .iter()
            .filter(|&&p| s.get(p as usize))
            .count()
            % 2;
        bits |= (parity as u8) << i;
    }
    Ok(HomologyLabel { bits, n: planes.len() })
}

/// The homologically nontrivial plane of plaquettes spanning `pair` at fixed
/// complementary coordinates (4D). Closed, and detected by the dual plane
/// with the same spanning pair.
pub fn winding_plane_4d(
    geom: &LatticeGeometry,
    pair: (usize, usize),
    offset: (usize, usize),
) -> Result<SpinConfig> {
    if geom.dim() != 4 {
        return Err(Error::UnsupportedDimension(geom.dim()));
    }
    let (a, b) = if pair.0 < pair.1 { pair } else { (pair.1, pair.0) };
    if b >= 4 || a == b {
        return Err(Error::InvalidPlaneAxes);
    }
    let free: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
    if offset.0 >= geom.linear_size() || offset.1 >= geom.linear_size() {
        return Err(Error::OffsetOutOfRange);
    }
    let mut s = SpinConfig::empty(geom);
    for u in 0..geom.linear_size() {
        for v in 0..geom.linear_size() {
            let mut pos = [0usize; 4];
            pos[a] = u;
            pos[b] = v;
            pos[free[0]] = offset.0;
            pos[free[1]] = offset.1;
            let idx = geom.cell_index(&CellId::plaquette(pos, a, b))?;
            s.toggle(idx);
        }
    }
    Ok(s)
}

/// The plane of plaquettes perpendicular to `normal_axis` at height
/// `offset` (3D). Closed, and detected by the dual line along
/// `normal_axis`.
pub fn winding_plane_3d(
    geom: &LatticeGeometry,
    normal_axis: usize,
    offset: usize,
) -> Result<SpinConfig> {
    if geom.dim() != 3 {
        return Err(Error::UnsupportedDimension(geom.dim()));
    }
    if normal_axis >= 3 {
        return Err(Error::InvalidPlaneAxes);
    }
    if offset >= geom.linear_size() {
        return Err(Error::OffsetOutOfRange);
    }
    let perp: Vec<usize> = (0..3).filter(|&x| x != normal_axis).collect();
    let (a, b) = (perp[0], perp[1]);
    let mut s = SpinConfig::empty(geom);
    for u in 0..geom.linear_size() {
        for v in 0..geom.linear_size() {
            let mut pos = [0usize; 4];
            pos[a] = u;
            pos[b] = v;
            pos[normal_axis] = offset;
            let idx = geom.cell_index(&CellId::plaquette(pos, a, b))?;
            s.toggle(idx);
        }
    }
    Ok(s)
}

/// A representative configuration whose boundary is `k`, built by closing
/// each loop with a surface confined to the loop's bounding box.
///
/// Any two outputs for the same syndrome are homologically equivalent as
/// long as every loop passes the confinement test.
pub fn shortest_config(geom: &LatticeGeometry, k: &LinkConfig, c: f64) -> Result<SpinConfig> {
    if c <= 0.0 {
        return Err(Error::InvalidFraction(c));
    }
    let loops = decompose_loops(geom, k)?;
    let frame = Frame::standard(geom.dim());
    let mut s = SpinConfig::empty(geom);
    for lp in &loops {
        if !lp.is_short_confined(geom, c) {
            return Err(Error::LongLoopPresent);
        }
        let surface = decoder::close_loop(geom, lp, &frame)?;
        s.bits.xor_assign(&surface.bits);
    }
    Ok(s)
}

/// Winding label of `s` relative to the canonical representative of its
/// syndrome. For a fixed syndrome, equal labels are exactly homological
/// equivalence; the label is invariant under single spin flips while the
/// syndrome stays in the short-loop regime.
pub fn homology_class(geom: &LatticeGeometry, s: &SpinConfig, c: f64) -> Result<HomologyLabel> {
    let k = boundary(geom, s)?;
    let rep = shortest_config(geom, &k, c)?;
    winding_label(geom, &xor(s, &rep)?)
}
