//! Hypercubic toroidal cell complexes in dimensions 2, 3 and 4.
//!
//! A k-cell is addressed by a base position in `[0, L)^d` and a sorted set of
//! k coordinate axes it spans. Cells are indexed canonically: lexicographic
//! over (axes-subset rank, base position), with coordinate 0 fastest. All
//! incidence tables are precomputed flat arrays so the dynamics inner loop
//! never touches modular arithmetic.

use crate::bits::Bits;
use crate::error::{Error, Result};

pub const MAX_L: usize = 64;

/// Identifier of a k-cell: spanning axes plus base position (wrapping mod L).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CellId {
    pub k: usize,
    pub axes: [usize; 3],
    pub position: [usize; 4],
}

impl CellId {
    pub fn node(position: [usize; 4]) -> Self {
        CellId { k: 0, axes: [0; 3], position }
    }

    pub fn link(position: [usize; 4], axis: usize) -> Self {
        CellId { k: 1, axes: [axis, 0, 0], position }
    }

    pub fn plaquette(position: [usize; 4], a: usize, b: usize) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        CellId { k: 2, axes: [a, b, 0], position }
    }

    pub fn cube(position: [usize; 4], mut axes: [usize; 3]) -> Self {
        axes.sort_unstable();
        CellId { k: 3, axes, position }
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes[..self.k]
    }
}

/// All sorted k-subsets of `0..d` in lexicographic order.
fn axis_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..d {
            cur.push(a);
            rec(a + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

/// Immutable toroidal cell complex with precomputed incidence tables.
///
/// Shareable by any number of concurrent readers; nothing here mutates after
/// construction.
pub struct LatticeGeometry {
    d: usize,
    l: usize,
    counts: [usize; 4],
    subsets: [Vec<Vec<usize>>; 4],
    /// rank of a sorted axes subset within its (d, k) family
    subset_rank: [std::collections::HashMap<Vec<usize>, usize>; 4],
    plaq_links: Vec<u32>,  // stride 4
    link_plaqs: Vec<u32>,  // stride 2(d-1)
    cube_plaqs: Vec<u32>,  // stride 6
    plaq_cubes: Vec<u32>,  // stride 2(d-2)
    link_nodes: Vec<u32>,  // stride 2
    node_links: Vec<u32>,  // stride 2d
}

impl LatticeGeometry {
    /// Deterministic construction; identical `(d, L)` yields identical tables.
    pub fn build(d: usize, l: usize) -> Result<Self> {
        if !(2..=4).contains(&d) {
            return Err(Error::InvalidDimension(d));
        }
        if l < 2 {
            return Err(Error::SizeTooSmall(l));
        }
        if l > MAX_L {
            return Err(Error::SizeTooLarge(l, MAX_L));
        }
        let volume = l.pow(d as u32);
        let subsets: [Vec<Vec<usize>>; 4] = std::array::from_fn(|k| {
            if k <= d {
                axis_subsets(d, k)
            } else {
                Vec::new()
            }
        });
        let subset_rank: [std::collections::HashMap<Vec<usize>, usize>; 4] =
            std::array::from_fn(|k| {
                subsets[k]
                    .iter()
                    .enumerate()
                    .map(|(r, s)| (s.clone(), r))
                    .collect()
            });
        let counts: [usize; 4] = std::array::from_fn(|k| subsets[k].len() * volume);

        let mut geom = LatticeGeometry {
            d,
            l,
            counts,
            subsets,
            subset_rank,
            plaq_links: Vec::new(),
            link_plaqs: Vec::new(),
            cube_plaqs: Vec::new(),
            plaq_cubes: Vec::new(),
            link_nodes: Vec::new(),
            node_links: Vec::new(),
        };
        geom.fill_tables();
        Ok(geom)
    }

    fn fill_tables(&mut self) {
        let d = self.d;
        let l = self.l;

        // plaquette -> 4 boundary links
        let mut plaq_links = Vec::with_capacity(self.counts[2] * 4);
        for p in 0..self.counts[2] {
            let (axes, pos) = self.decode_owned(2, p);
            let (a, b) = (axes[0], axes[1]);
            plaq_links.extend_from_slice(&[
                self.encode(1, &[a], pos),
                self.encode(1, &[b], pos),
                self.encode(1, &[a], self.shift(pos, b, 1)),
                self.encode(1, &[b], self.shift(pos, a, 1)),
            ]);
        }
        self.plaq_links = plaq_links;

        // link -> 2(d-1) coboundary plaquettes
        let mut link_plaqs = Vec::with_capacity(self.counts[1] * 2 * (d - 1));
        for li in 0..self.counts[1] {
            let (axes, pos) = self.decode_owned(1, li);
            let a = axes[0];
            for b in 0..d {
                if b == a {
                    continue;
                }
                let mut pl = [a, b];
                pl.sort_unstable();
                link_plaqs.push(self.encode(2, &pl, pos));
                link_plaqs.push(self.encode(2, &pl, self.shift(pos, b, l - 1)));
            }
        }
        self.link_plaqs = link_plaqs;

        // cube -> 6 boundary plaquettes, plaquette -> 2(d-2) cobounding cubes
        if d >= 3 {
            let mut cube_plaqs = Vec::with_capacity(self.counts[3] * 6);
            for c in 0..self.counts[3] {
                let (axes, pos) = self.decode_owned(3, c);
                for i in 0..3 {
                    let third = axes[i];
                    let pair: Vec<usize> = axes[..3]
                        .iter()
                        .copied()
                        .filter(|&x| x != third)
                        .collect();
                    cube_plaqs.push(self.encode(2, &pair, pos));
                    cube_plaqs.push(self.encode(2, &pair, self.shift(pos, third, 1)));
                }
            }
            self.cube_plaqs = cube_plaqs;

            let mut plaq_cubes = Vec::with_capacity(self.counts[2] * 2 * (d - 2));
            for p in 0..self.counts[2] {
                let (axes, pos) = self.decode_owned(2, p);
                for c in 0..d {
                    if axes[..2].contains(&c) {
                        continue;
                    }
                    let mut tri = [axes[0], axes[1], c];
                    tri.sort_unstable();
                    plaq_cubes.push(self.encode(3, &tri, pos));
                    plaq_cubes.push(self.encode(3, &tri, self.shift(pos, c, l - 1)));
                }
            }
            self.plaq_cubes = plaq_cubes;
        }

        // link <-> node incidence
        let mut link_nodes = Vec::with_capacity(self.counts[1] * 2);
        for li in 0..self.counts[1] {
            let (axes, pos) = self.decode_owned(1, li);
            link_nodes.push(self.encode(0, &[], pos));
            link_nodes.push(self.encode(0, &[], self.shift(pos, axes[0], 1)));
        }
        self.link_nodes = link_nodes;

        let mut node_links = Vec::with_capacity(self.counts[0] * 2 * d);
        for v in 0..self.counts[0] {
            let (_, pos) = self.decode_owned(0, v);
            for a in 0..d {
                node_links.push(self.encode(1, &[a], pos));
                node_links.push(self.encode(1, &[a], self.shift(pos, a, l - 1)));
            }
        }
        self.node_links = node_links;
    }

    fn decode_owned(&self, k: usize, index: usize) -> ([usize; 3], [usize; 4]) {
        let (axes, pos) = self.decode(k, index);
        let mut ax = [0usize; 3];
        ax[..axes.len()].copy_from_slice(axes);
        (ax, pos)
    }

    #[inline]
    fn shift(&self, mut pos: [usize; 4], axis: usize, by: usize) -> [usize; 4] {
        pos[axis] = (pos[axis] + by) % self.l;
        pos
    }

    #[inline]
    fn pos_index(&self, pos: [usize; 4]) -> usize {
        let mut idx = 0;
        for i in (0..self.d).rev() {
            idx = idx * self.l + pos[i];
        }
        idx
    }

    fn encode(&self, k: usize, axes: &[usize], pos: [usize; 4]) -> u32 {
        let rank = self.subset_rank[k][axes];
        (rank * self.l.pow(self.d as u32) + self.pos_index(pos)) as u32
    }

    fn decode(&self, k: usize, index: usize) -> (&[usize], [usize; 4]) {
        let volume = self.l.pow(self.d as u32);
        let rank = index / volume;
        let mut rem = index % volume;
        let mut pos = [0usize; 4];
        for item in pos.iter_mut().take(self.d) {
            *item = rem % self.l;
            rem /= self.l;
        }
        (&self.subsets[k][rank], pos)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn linear_size(&self) -> usize {
        self.l
    }

    pub fn n_cells(&self, k: usize) -> usize {
        if k < 4 {
            self.counts[k]
        } else {
            0
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.counts[0]
    }

    pub fn n_links(&self) -> usize {
        self.counts[1]
    }

    pub fn n_plaquettes(&self) -> usize {
        self.counts[2]
    }

    pub fn n_cubes(&self) -> usize {
        self.counts[3]
    }

    #[inline]
    pub fn plaq_links(&self, p: usize) -> &[u32] {
        &self.plaq_links[p * 4..p * 4 + 4]
    }

    #[inline]
    pub fn link_plaqs(&self, l: usize) -> &[u32] {
        let s = 2 * (self.d - 1);
        &self.link_plaqs[l * s..(l + 1) * s]
    }

    #[inline]
    pub fn cube_plaqs(&self, c: usize) -> &[u32] {
        &self.cube_plaqs[c * 6..c * 6 + 6]
    }

    #[inline]
    pub fn plaq_cubes(&self, p: usize) -> &[u32] {
        let s = 2 * (self.d - 2);
        &self.plaq_cubes[p * s..(p + 1) * s]
    }

    #[inline]
    pub fn link_nodes(&self, l: usize) -> [u32; 2] {
        [self.link_nodes[l * 2], self.link_nodes[l * 2 + 1]]
    }

    #[inline]
    pub fn node_links(&self, v: usize) -> &[u32] {
        let s = 2 * self.d;
        &self.node_links[v * s..(v + 1) * s]
    }

    pub fn cell_id(&self, k: usize, index: usize) -> Result<CellId> {
        if k > 3 || k > self.d || index >= self.counts[k] {
            return Err(Error::InvalidCell(format!("k={k} index={index}")));
        }
        let (axes, position) = self.decode(k, index);
        let mut ax = [0usize; 3];
        ax[..k].copy_from_slice(axes);
        Ok(CellId { k, axes: ax, position })
    }

    pub fn cell_index(&self, cell: &CellId) -> Result<usize> {
        if cell.k > 3 || cell.k > self.d {
            return Err(Error::InvalidCell(format!("k={}", cell.k)));
        }
        let axes = cell.axes();
        let mut seen = [false; 4];
        for &a in axes {
            if a >= self.d || seen[a] {
                return Err(Error::InvalidCell(format!("axes {axes:?}")));
            }
            seen[a] = true;
        }
        if !self.subset_rank[cell.k].contains_key(axes) {
            return Err(Error::InvalidCell(format!("axes {axes:?} not sorted")));
        }
        let mut pos = cell.position;
        for item in pos.iter_mut().take(self.d) {
            *item %= self.l;
        }
        for item in pos.iter().skip(self.d) {
            if *item != 0 {
                return Err(Error::InvalidCell("position beyond dimension".into()));
            }
        }
        Ok(self.encode(cell.k, axes, pos) as usize)
    }

    /// Node position of a cell's base corner.
    pub fn link_axis(&self, l: usize) -> usize {
        self.decode(1, l).0[0]
    }

    pub fn link_position(&self, l: usize) -> [usize; 4] {
        self.decode(1, l).1
    }

    pub fn plaq_axes(&self, p: usize) -> (usize, usize) {
        let axes = self.decode(2, p).0;
        (axes[0], axes[1])
    }

    pub fn plaq_position(&self, p: usize) -> [usize; 4] {
        self.decode(2, p).1
    }

    pub fn node_position(&self, v: usize) -> [usize; 4] {
        self.decode(0, v).1
    }

    /// Boundary (k-1) or coboundary (k+1) cells of `cell`.
    pub fn incident_cells(&self, cell: &CellId, k: usize) -> Result<Vec<CellId>> {
        let idx = self.cell_index(cell)?;
        if k > self.d.min(3) {
            return Err(Error::InvalidCell(format!("target k={k}")));
        }
        let indices: Vec<usize> = match (cell.k, k) {
            (1, 0) => self.link_nodes(idx).iter().map(|&x| x as usize).collect(),
            (0, 1) => self.node_links(idx).iter().map(|&x| x as usize).collect(),
            (2, 1) => self.plaq_links(idx).iter().map(|&x| x as usize).collect(),
            (1, 2) => self.link_plaqs(idx).iter().map(|&x| x as usize).collect(),
            (3, 2) => self.cube_plaqs(idx).iter().map(|&x| x as usize).collect(),
            (2, 3) => self.plaq_cubes(idx).iter().map(|&x| x as usize).collect(),
            (from, to) => return Err(Error::DimensionGap { from, to }),
        };
        indices.into_iter().map(|i| self.cell_id(k, i)).collect()
    }

    /// The (4-k)-cell dual to `cell` on the 4-torus.
    ///
    /// Incidence-preserving bijection: `a` bounds `b` iff `dual(b)` bounds
    /// `dual(a)`.
    pub fn dual_cell(&self, cell: &CellId) -> Result<CellId> {
        if self.d != 4 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        self.cell_index(cell)?; // validate
        let co_axes: Vec<usize> =
            (0..4).filter(|a| !cell.axes().contains(a)).collect();
        let mut pos = cell.position;
        for &a in &co_axes {
            pos[a] = (pos[a] + self.l - 1) % self.l;
        }
        let mut ax = [0usize; 3];
        ax[..co_axes.len()].copy_from_slice(&co_axes);
        Ok(CellId { k: 4 - cell.k, axes: ax, position: pos })
    }
}

/// Support of a bare topological observable.
///
/// The plaquettes all span the same axes pair and sit at a fixed position
/// along those axes, tiling the remaining directions: a plane of the dual
/// lattice. In 3D the remaining direction is a single axis and the set is a
/// straight line of L parallel plaquettes; in 4D it is an L x L sheet.
/// Every elementary cube shares 0 or 2 plaquettes with the set, so the spin
/// product over it is invariant under cube flips.
#[derive(Clone, Debug)]
pub struct DualPlane {
    /// axes spanned by the member plaquettes
    pub axes: (usize, usize),
    /// fixed coordinates along `axes`
    pub offset: (usize, usize),
    plaquettes: Vec<u32>,
    membership: Bits,
}

impl DualPlane {
    pub(crate) fn from_parts(
        geom: &LatticeGeometry,
        axes: (usize, usize),
        offset: (usize, usize),
        plaquettes: Vec<u32>,
    ) -> Self {
        geom.finish_plane(axes, offset, plaquettes)
    }

    pub fn plaquettes(&self) -> &[u32] {
        &self.plaquettes
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        self.membership.get(p)
    }

    /// Parity of the intersection with a sparse plaquette set.
    pub fn crossing_parity(&self, plaquettes: &[u32]) -> bool {
        plaquettes
            .iter()
            .filter(|&&p| self.membership.get(p as usize))
            .count()
            % 2
            == 1
    }
}

impl LatticeGeometry {
    /// 4D observable support: plaquettes spanning `pair` with those two
    /// coordinates pinned to `offset`.
    pub fn dual_plane(&self, pair: (usize, usize), offset: (usize, usize)) -> Result<DualPlane> {
        if self.d != 4 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        let (a, b) = pair;
        if a >= self.d || b >= self.d || a == b {
            return Err(Error::InvalidPlaneAxes);
        }
        if offset.0 >= self.l || offset.1 >= self.l {
            return Err(Error::OffsetOutOfRange);
        }
        let (a, b, offset) = if a < b {
            (a, b, offset)
        } else {
            (b, a, (offset.1, offset.0))
        };
        let free: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
        let mut plaquettes = Vec::with_capacity(self.l * self.l);
        for u in 0..self.l {
            for v in 0..self.l {
                let mut pos = [0usize; 4];
                pos[a] = offset.0;
                pos[b] = offset.1;
                pos[free[0]] = u;
                pos[free[1]] = v;
                plaquettes.push(self.encode(2, &[a, b], pos));
            }
        }
        Ok(self.finish_plane((a, b), offset, plaquettes))
    }

    /// 3D observable support: the straight line of parallel plaquettes
    /// winding along `line_axis`, with the two perpendicular coordinates
    /// pinned to `offset` (ordered by axis).
    pub fn dual_line(&self, line_axis: usize, offset: (usize, usize)) -> Result<DualPlane> {
        if self.d != 3 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        if line_axis >= 3 {
            return Err(Error::InvalidPlaneAxes);
        }
        if offset.0 >= self.l || offset.1 >= self.l {
            return Err(Error::OffsetOutOfRange);
        }
        let perp: Vec<usize> = (0..3).filter(|&x| x != line_axis).collect();
        let (a, b) = (perp[0], perp[1]);
        let mut plaquettes = Vec::with_capacity(self.l);
        for t in 0..self.l {
            let mut pos = [0usize; 4];
            pos[a] = offset.0;
            pos[b] = offset.1;
            pos[line_axis] = t;
            plaquettes.push(self.encode(2, &[a, b], pos));
        }
        Ok(self.finish_plane((a, b), offset, plaquettes))
    }

    fn finish_plane(
        &self,
        axes: (usize, usize),
        offset: (usize, usize),
        plaquettes: Vec<u32>,
    ) -> DualPlane {
        let mut membership = Bits::new(self.n_plaquettes());
        for &p in &plaquettes {
            membership.set(p as usize, true);
        }
        DualPlane { axes, offset, plaquettes, membership }
    }

    /// Canonical observable supports at offset 0: the three dual lines in 3D
    /// or the six dual planes in 4D, ordered by axes pair.
    pub fn canonical_planes(&self) -> Result<Vec<DualPlane>> {
        match self.d {
            3 => (0..3).map(|a| self.dual_line(a, (0, 0))).collect(),
            4 => {
                let mut out = Vec::with_capacity(6);
                for a in 0..4 {
                    for b in a + 1..4 {
                        out.push(self.dual_plane((a, b), (0, 0))?);
                    }
                }
                Ok(out)
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LatticeGeometry::build(1, 4).is_err());
        assert!(LatticeGeometry::build(5, 4).is_err());
        assert!(LatticeGeometry::build(3, 1).is_err());
    }

    #[test]
    fn cell_counts_match_binomial_formula() {
        for d in 2..=4 {
            for l in 2..=if d == 4 { 4 } else { 6 } {
                let geom = LatticeGeometry::build(d, l).unwrap();
                for k in 0..=d.min(3) {
                    assert_eq!(
                        geom.n_cells(k),
                        binom(d, k) * l.pow(d as u32),
                        "d={d} l={l} k={k}"
                    );
                }
            }
        }
        let geom = LatticeGeometry::build(3, 4).unwrap();
        assert_eq!(geom.n_links(), 192);
        assert_eq!(geom.n_plaquettes(), 192);
        assert_eq!(geom.n_cubes(), 64);
        let geom = LatticeGeometry::build(4, 2).unwrap();
        assert_eq!(geom.n_links(), 64);
        assert_eq!(geom.n_plaquettes(), 96);
        assert_eq!(geom.n_cubes(), 64);
    }

    #[test]
    fn incidence_degrees() {
        for (d, l) in [(2, 3), (3, 2), (3, 4), (4, 2), (4, 3)] {
            let geom = LatticeGeometry::build(d, l).unwrap();
            for p in 0..geom.n_plaquettes() {
                let links = geom.plaq_links(p);
                let mut sorted = links.to_vec();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), 4, "plaquette boundary must be 4 distinct links");
            }
            for li in 0..geom.n_links() {
                let plaqs = geom.link_plaqs(li);
                let mut sorted = plaqs.to_vec();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), 2 * (d - 1), "d={d} l={l}");
            }
            if d >= 3 {
                for c in 0..geom.n_cubes() {
                    let mut sorted = geom.cube_plaqs(c).to_vec();
                    sorted.sort_unstable();
                    sorted.dedup();
                    assert_eq!(sorted.len(), 6);
                }
            }
        }
    }

    #[test]
    fn incidence_symmetry() {
        for (d, l) in [(2, 2), (3, 3), (4, 2)] {
            let geom = LatticeGeometry::build(d, l).unwrap();
            for p in 0..geom.n_plaquettes() {
                for &li in geom.plaq_links(p) {
                    assert!(geom.link_plaqs(li as usize).contains(&(p as u32)));
                }
            }
            for li in 0..geom.n_links() {
                for &p in geom.link_plaqs(li) {
                    assert!(geom.plaq_links(p as usize).contains(&(li as u32)));
                }
            }
            if d >= 3 {
                for c in 0..geom.n_cubes() {
                    for &p in geom.cube_plaqs(c) {
                        assert!(geom.plaq_cubes(p as usize).contains(&(c as u32)));
                    }
                }
            }
        }
    }

    #[test]
    fn incident_cells_api() {
        let geom = LatticeGeometry::build(4, 3).unwrap();
        let link = geom.cell_id(1, 17).unwrap();
        let plaqs = geom.incident_cells(&link, 2).unwrap();
        assert_eq!(plaqs.len(), 6);
        let cube = geom.cell_id(3, 5).unwrap();
        assert_eq!(geom.incident_cells(&cube, 2).unwrap().len(), 6);
        let plq = geom.cell_id(2, 0).unwrap();
        assert_eq!(geom.incident_cells(&plq, 1).unwrap().len(), 4);
        assert!(geom.incident_cells(&plq, 0).is_err());

        let geom3 = LatticeGeometry::build(3, 3).unwrap();
        let link = geom3.cell_id(1, 0).unwrap();
        assert_eq!(geom3.incident_cells(&link, 2).unwrap().len(), 4);
    }

    #[test]
    fn cell_id_round_trip() {
        for (d, l) in [(2, 2), (3, 3), (4, 2)] {
            let geom = LatticeGeometry::build(d, l).unwrap();
            for k in 0..=d.min(3) {
                for i in (0..geom.n_cells(k)).step_by(7) {
                    let cell = geom.cell_id(k, i).unwrap();
                    assert_eq!(geom.cell_index(&cell).unwrap(), i);
                }
            }
        }
    }

    #[test]
    fn four_d_self_duality_preserves_incidence() {
        let geom = LatticeGeometry::build(4, 3).unwrap();
        // bijectivity on plaquettes
        let mut seen = std::collections::HashSet::new();
        for p in 0..geom.n_plaquettes() {
            let cell = geom.cell_id(2, p).unwrap();
            let dual = geom.dual_cell(&cell).unwrap();
            assert_eq!(dual.k, 2);
            seen.insert(geom.cell_index(&dual).unwrap());
        }
        assert_eq!(seen.len(), geom.n_plaquettes());
        // link-in-plaquette maps to dual-plaquette-in-dual-cube
        for p in (0..geom.n_plaquettes()).step_by(5) {
            let plq = geom.cell_id(2, p).unwrap();
            let dual_plq = geom.dual_cell(&plq).unwrap();
            for link in geom.incident_cells(&plq, 1).unwrap() {
                let dual_cube = geom.dual_cell(&link).unwrap();
                assert_eq!(dual_cube.k, 3);
                let faces = geom.incident_cells(&dual_cube, 2).unwrap();
                assert!(faces.iter().any(|f| *f == dual_plq));
            }
        }
    }

    #[test]
    fn dual_plane_shapes() {
        let geom = LatticeGeometry::build(4, 3).unwrap();
        let plane = geom.dual_plane((0, 1), (1, 2)).unwrap();
        assert_eq!(plane.plaquettes().len(), 9);
        // every cube shares 0 or 2 plaquettes with the plane
        for c in 0..geom.n_cubes() {
            let shared = geom
                .cube_plaqs(c)
                .iter()
                .filter(|&&p| plane.contains(p as usize))
                .count();
            assert!(shared == 0 || shared == 2, "cube {c} shares {shared}");
        }
        assert!(geom.dual_plane((0, 0), (0, 0)).is_err());
        assert!(geom.dual_plane((0, 1), (3, 0)).is_err());

        let geom3 = LatticeGeometry::build(3, 4).unwrap();
        let line = geom3.dual_line(0, (2, 3)).unwrap();
        assert_eq!(line.plaquettes().len(), 4);
        for c in 0..geom3.n_cubes() {
            let shared = geom3
                .cube_plaqs(c)
                .iter()
                .filter(|&&p| line.contains(p as usize))
                .count();
            assert!(shared == 0 || shared == 2);
        }
        assert_eq!(geom3.canonical_planes().unwrap().len(), 3);
        assert_eq!(geom.canonical_planes().unwrap().len(), 6);
    }
}
