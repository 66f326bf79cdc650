//! Interface classification: FD where possible, SAT elsewhere, and the coupling
//! segments along every SAT line.
//!
//! FD candidates are contacts between blocks of equal level in both dimensions that
//! are not on a forced-SAT line. Candidates are demoted until a fixed point:
//! - an FD-connected group that is not a full rectangle (or has a non-FD contact
//!   inside it) loses all its FD contacts;
//! - along a SAT line, each segment must have one side without interior breaks
//!   (the continuous side `w`) and pieces of equal tangential level on the other;
//!   otherwise FD contacts on the perpendicular lines through the breaks are demoted.

use super::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JunctionPolicy {
    /// FD between equally refined blocks unless demoted.
    #[default]
    FdWherePossible,
    /// Every internal contact is SAT.
    SatOnly,
}

/// Which side of a line a patch face lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The patch is below the line (its upper face, last normal index).
    Below,
    /// The patch is above the line (its lower face, normal index 0).
    Above,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentFace {
    pub patch: usize,
    pub side: Side,
    /// Tangential start in units, in [0, L).
    pub start: i64,
    pub len: i64,
    pub is_loop: bool,
}

/// Coupling unit on a SAT line: one continuous face `w` and the pieces across from it.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub normal_dim: usize,
    /// Line position in units; 0 for the periodic wrap line.
    pub coord: i64,
    pub wraps: bool,
    pub w: SegmentFace,
    /// Faces across from `w`, ordered along the line starting at `w.start`.
    pub pieces: Vec<SegmentFace>,
    /// Offsets (units from `w.start`) where one piece ends and the next begins.
    pub splits: Vec<i64>,
}

impl Segment {
    pub fn tangential_dim(&self) -> usize {
        1 - self.normal_dim
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Outcome of one pass over the current FD assignment.
enum Pass<T> {
    Ok(T),
    /// Contact indices to demote.
    Demote(Vec<usize>),
}

impl Mesh {
    /// Assigns an interface kind to every contact and emits junction descriptors.
    pub fn classify_interfaces(&self, policy: JunctionPolicy) -> Result<Mesh, MeshError> {
        if let Some(&(a, d)) = self.find_unbalanced().first() {
            let other = self
                .find_contacts()
                .into_iter()
                .find(|c| {
                    (c.lower == a || c.upper == a) && {
                        let (la, lb) =
                            (self.blocks[c.lower].level[d], self.blocks[c.upper].level[d]);
                        la.abs_diff(lb) > 1
                    }
                })
                .map(|c| if c.lower == a { c.upper } else { c.lower })
                .unwrap_or(a);
            return Err(MeshError::Unbalanced(
                self.blocks[a].id,
                self.blocks[other].id,
            ));
        }
        let mut m = self.clone();
        m.invalidate();
        let mut contacts = m.find_contacts();
        for c in contacts.iter_mut() {
            c.fd = policy == JunctionPolicy::FdWherePossible
                && m.blocks[c.lower].level == m.blocks[c.upper].level
                && !m.is_forced(c);
        }
        loop {
            let patches = match m.build_patches(&contacts) {
                Pass::Ok(p) => p,
                Pass::Demote(list) => {
                    m.demote(&mut contacts, &list)?;
                    continue;
                }
            };
            match m.build_segments(&contacts, &patches)? {
                Pass::Ok(segments) => {
                    m.contacts = contacts;
                    m.patches = patches;
                    m.segments = segments;
                    break;
                }
                Pass::Demote(list) => m.demote(&mut contacts, &list)?,
            }
        }
        m.policy = Some(policy);
        m.emit_descriptors();
        Ok(m)
    }

    fn demote(&self, contacts: &mut [Contact], list: &[usize]) -> Result<(), MeshError> {
        let mut changed = false;
        for &i in list {
            changed |= std::mem::replace(&mut contacts[i].fd, false);
        }
        if changed {
            Ok(())
        } else {
            Err(MeshError::Unsupported(
                "no FD interface can be demoted to resolve a junction".into(),
            ))
        }
    }

    fn is_forced(&self, c: &Contact) -> bool {
        self.forced_sat
            .iter()
            .any(|f| f.normal_dim == c.dim && f.at == c.coord && f.from < c.to && c.from < f.to)
    }

    fn build_patches(&self, contacts: &[Contact]) -> Pass<Vec<Patch>> {
        let nb = self.blocks.len();
        let len = [self.length_units(0), self.length_units(1)];
        let mut uf = UnionFind((0..nb).collect());
        let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); nb];
        for c in contacts.iter().filter(|c| c.fd) {
            uf.union(c.lower, c.upper);
            let s = self.blocks[c.lower].size_units()[c.dim];
            adj[c.lower].push((c.upper, c.dim, s));
            adj[c.upper].push((c.lower, c.dim, -s));
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for b in 0..nb {
            groups.entry(uf.find(b)).or_default().push(b);
        }
        let mut patches = Vec::new();
        let mut bad = Vec::new();
        for (root, members) in groups {
            match self.group_to_patch(root, &members, &adj, contacts, len) {
                Some(mut p) => {
                    p.id = patches.len();
                    patches.push(p);
                }
                None => bad.extend(members),
            }
        }
        if bad.is_empty() {
            Pass::Ok(patches)
        } else {
            let bad: BTreeSet<usize> = bad.into_iter().collect();
            Pass::Demote(
                contacts
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.fd && bad.contains(&c.lower))
                    .map(|(i, _)| i)
                    .collect(),
            )
        }
    }

    fn group_to_patch(
        &self,
        root: usize,
        members: &[usize],
        adj: &[Vec<(usize, usize, i64)>],
        contacts: &[Contact],
        len: [i64; 2],
    ) -> Option<Patch> {
        let level = self.blocks[root].level;
        let size = self.blocks[root].size_units();
        let mut pos: HashMap<usize, [i64; 2]> = HashMap::new();
        let mut loops = [false; 2];
        pos.insert(root, self.blocks[root].cell);
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            let pa = pos[&a];
            for &(b, d, step) in &adj[a] {
                let mut pb = pa;
                pb[d] += step;
                match pos.get(&b) {
                    Some(&old) => {
                        for k in 0..2 {
                            let diff = pb[k] - old[k];
                            if diff != 0 {
                                debug_assert_eq!(diff.rem_euclid(len[k]), 0);
                                loops[k] = true;
                            }
                        }
                    }
                    None => {
                        pos.insert(b, pb);
                        queue.push_back(b);
                    }
                }
            }
        }
        let mut lo = [0i64; 2];
        let mut min = [0i64; 2];
        let mut nblocks = [0usize; 2];
        for d in 0..2 {
            if loops[d] {
                nblocks[d] = (len[d] / size[d]) as usize;
            } else {
                min[d] = members.iter().map(|b| pos[b][d]).min().unwrap();
                let max = members.iter().map(|b| pos[b][d]).max().unwrap();
                lo[d] = min[d].rem_euclid(len[d]);
                nblocks[d] = ((max - min[d]) / size[d] + 1) as usize;
            }
        }
        if nblocks[0] * nblocks[1] != members.len() {
            return None;
        }
        let mut grid = vec![usize::MAX; members.len()];
        for &b in members {
            let p = pos[&b];
            let mut ij = [0usize; 2];
            for d in 0..2 {
                let off = if loops[d] {
                    p[d].rem_euclid(len[d])
                } else {
                    p[d] - min[d]
                };
                ij[d] = (off / size[d]) as usize;
                if ij[d] >= nblocks[d] {
                    return None;
                }
            }
            let slot = &mut grid[ij[1] * nblocks[0] + ij[0]];
            if *slot != usize::MAX {
                return None;
            }
            *slot = b;
        }
        if members.iter().any(|&b| self.blocks[b].level != level) {
            return None;
        }
        // every neighbouring pair inside the rectangle must be joined by FD
        let fd_pair = |a: usize, b: usize, d: usize| {
            contacts
                .iter()
                .any(|c| c.fd && c.lower == a && c.upper == b && c.dim == d)
        };
        for j in 0..nblocks[1] {
            for i in 0..nblocks[0] {
                let a = grid[j * nblocks[0] + i];
                for d in 0..2 {
                    let (ni, nj) = if d == 0 { (i + 1, j) } else { (i, j + 1) };
                    let (ni, nj) = match (d, loops[d]) {
                        (0, true) => (ni % nblocks[0], nj),
                        (1, true) => (ni, nj % nblocks[1]),
                        _ => (ni, nj),
                    };
                    if ni >= nblocks[0] || nj >= nblocks[1] {
                        continue;
                    }
                    let b = grid[nj * nblocks[0] + ni];
                    if !fd_pair(a, b, d) {
                        return None;
                    }
                }
            }
        }
        Some(Patch {
            id: 0,
            blocks: grid,
            nblocks,
            level,
            lo,
            loops,
        })
    }

    fn build_segments(
        &self,
        contacts: &[Contact],
        patches: &[Patch],
    ) -> Result<Pass<Vec<Segment>>, MeshError> {
        let len = [self.length_units(0), self.length_units(1)];
        // (normal dim, coordinate) -> faces on each side
        let mut lines: BTreeMap<(usize, i64), (Vec<SegmentFace>, Vec<SegmentFace>)> =
            BTreeMap::new();
        for p in patches {
            let size = p.size_units();
            for d in 0..2 {
                if p.loops[d] {
                    continue;
                }
                let t = 1 - d;
                let face = |side| SegmentFace {
                    patch: p.id,
                    side,
                    start: if p.loops[t] { 0 } else { p.lo[t] },
                    len: if p.loops[t] { len[t] } else { size[t] },
                    is_loop: p.loops[t],
                };
                let (lc, hc) = (p.lo[d], p.lo[d] + size[d]);
                let hc = if self.periodic[d] {
                    hc.rem_euclid(len[d])
                } else {
                    hc
                };
                if self.periodic[d] || hc != len[d] {
                    lines.entry((d, hc)).or_default().0.push(face(Side::Below));
                }
                if self.periodic[d] || lc != 0 {
                    lines.entry((d, lc)).or_default().1.push(face(Side::Above));
                }
            }
        }
        let mut segments = Vec::new();
        let mut demote = Vec::new();
        for ((d, coord), (below, above)) in lines {
            let t = 1 - d;
            let line = LineSweep {
                lt: len[t],
                periodic: self.periodic[t],
                below,
                above,
            };
            for raw in line.segments()? {
                match self.resolve_segment(d, coord, &line, raw, patches, contacts) {
                    Ok(seg) => segments.push(seg),
                    Err(list) => demote.extend(list),
                }
            }
        }
        if demote.is_empty() {
            Ok(Pass::Ok(segments))
        } else {
            demote.sort_unstable();
            demote.dedup();
            Ok(Pass::Demote(demote))
        }
    }

    /// Picks the continuous side of a segment, or returns the FD contacts to demote.
    fn resolve_segment(
        &self,
        d: usize,
        coord: i64,
        line: &LineSweep,
        raw: RawSegment,
        patches: &[Patch],
        contacts: &[Contact],
    ) -> Result<Segment, Vec<usize>> {
        let t = 1 - d;
        let wraps = self.periodic[d] && coord == 0;
        let below: Vec<&SegmentFace> = raw.below.iter().map(|&i| &line.below[i]).collect();
        let above: Vec<&SegmentFace> = raw.above.iter().map(|&i| &line.above[i]).collect();
        // FD contacts of `patch` on the perpendicular line through tangential position `at`
        let perpendicular = |patch: usize, at: i64| -> Vec<usize> {
            let at = if self.periodic[t] {
                at.rem_euclid(line.lt)
            } else {
                at
            };
            let members = &patches[patch].blocks;
            contacts
                .iter()
                .enumerate()
                .filter(|(_, c)| c.fd && c.dim == t && c.coord == at && members.contains(&c.lower))
                .map(|(i, _)| i)
                .collect()
        };
        let (w, pieces) = match (below.len(), above.len()) {
            (1, 1) if above[0].is_loop && !below[0].is_loop => (above[0], below),
            (1, _) => (below[0], above),
            (_, 1) => (above[0], below),
            _ => {
                let mut list = Vec::new();
                for f in &below[1..] {
                    for g in &above {
                        list.extend(perpendicular(g.patch, f.start));
                    }
                }
                for f in &above[1..] {
                    for g in &below {
                        list.extend(perpendicular(g.patch, f.start));
                    }
                }
                return Err(list);
            }
        };
        let tlevel = |f: &SegmentFace| patches[f.patch].level[t];
        if pieces.iter().any(|p| tlevel(p) != tlevel(pieces[0])) {
            return Err(pieces[1..]
                .iter()
                .flat_map(|p| perpendicular(w.patch, p.start))
                .collect());
        }
        if raw.cyclic && !w.is_loop {
            // an open face cannot carry a closed line of pieces
            return Err(Vec::new());
        }
        let off = |p: &SegmentFace| {
            let o = p.start - w.start;
            if self.periodic[t] {
                o.rem_euclid(line.lt)
            } else {
                o
            }
        };
        let mut pieces: Vec<SegmentFace> = pieces.into_iter().cloned().collect();
        pieces.sort_by_key(|p| off(p));
        let splits: Vec<i64> = if w.is_loop {
            if pieces.len() == 1 && pieces[0].is_loop {
                Vec::new()
            } else {
                pieces.iter().map(|p| off(p)).collect()
            }
        } else {
            pieces[1..].iter().map(|p| off(p)).collect()
        };
        Ok(Segment {
            normal_dim: d,
            coord,
            wraps,
            w: w.clone(),
            pieces,
            splits,
        })
    }

    fn emit_descriptors(&mut self) {
        let len = [self.length_units(0), self.length_units(1)];
        let mut interfaces = Vec::new();
        for c in &self.contacts {
            let (a, b) = (&self.blocks[c.lower], &self.blocks[c.upper]);
            let t = 1 - c.dim;
            let ratio = if a.level[t] == b.level[t] { 1 } else { 2 };
            let kind = if c.fd {
                InterfaceKind::Fd
            } else if ratio == 1 {
                InterfaceKind::SatConforming
            } else {
                InterfaceKind::SatNonconforming
            };
            interfaces.push(InterfaceDescriptor {
                side_a: (
                    a.id,
                    Face {
                        dim: c.dim,
                        high: true,
                    },
                ),
                side_b: Some((
                    b.id,
                    Face {
                        dim: c.dim,
                        high: false,
                    },
                )),
                kind,
                tangential_ratio: ratio,
                periodic: c.periodic,
            });
        }
        for b in &self.blocks {
            let hi = b.upper_units();
            for d in 0..2 {
                if self.periodic[d] {
                    continue;
                }
                for (high, at_edge) in [(false, b.cell[d] == 0), (true, hi[d] == len[d])] {
                    if at_edge {
                        interfaces.push(InterfaceDescriptor {
                            side_a: (b.id, Face { dim: d, high }),
                            side_b: None,
                            kind: InterfaceKind::OuterPhysical,
                            tangential_ratio: 1,
                            periodic: false,
                        });
                    }
                }
            }
        }
        let mut junctions = Vec::new();
        for s in &self.segments {
            let t = s.tangential_dim();
            let wp = &self.patches[s.w.patch];
            let piece_level = self.patches[s.pieces[0].patch].level[t];
            for &off in &s.splits {
                let at = s.w.start + off;
                let touching = |p: &Patch, side: Side| -> Vec<usize> {
                    let row = match side {
                        Side::Below => p.nblocks[s.normal_dim] - 1,
                        Side::Above => 0,
                    };
                    (0..p.nblocks[t])
                        .map(|k| {
                            if t == 0 {
                                p.block_at(k, row)
                            } else {
                                p.block_at(row, k)
                            }
                        })
                        .filter(|&bi| {
                            let b = &self.blocks[bi];
                            let (s0, s1) = (b.cell[t], b.upper_units()[t]);
                            let a = if self.periodic[t] {
                                at.rem_euclid(len[t])
                            } else {
                                at
                            };
                            (s0 <= a && a <= s1) || (self.periodic[t] && a + len[t] == s1)
                        })
                        .map(|bi| self.blocks[bi].id)
                        .collect()
                };
                let fd_side = touching(wp, s.w.side);
                let k = s.splits.iter().position(|&x| x == off).unwrap();
                let (before, after) = if s.w.is_loop {
                    let n = s.pieces.len();
                    ((k + n - 1) % n, k)
                } else {
                    (k, k + 1)
                };
                let pick = |piece: &SegmentFace, at_end: bool| -> usize {
                    let p = &self.patches[piece.patch];
                    let ids = touching(p, piece.side);
                    let want = if at_end { ids.last() } else { ids.first() };
                    *want.expect("piece touches its own split")
                };
                let sat_side = [pick(&s.pieces[before], true), pick(&s.pieces[after], false)];
                let mut location = [0.0; 2];
                location[s.normal_dim] = self.to_phys(s.normal_dim, s.coord);
                location[t] = self.to_phys(t, at.rem_euclid(len[t]));
                junctions.push(JunctionDescriptor {
                    location,
                    normal_dim: s.normal_dim,
                    fd_side,
                    sat_side,
                    refined: piece_level != wp.level[t],
                });
            }
        }
        self.interfaces = interfaces;
        self.junctions = junctions;
    }
}

/// Faces of one line and the segments they form.
struct LineSweep {
    lt: i64,
    periodic: bool,
    below: Vec<SegmentFace>,
    above: Vec<SegmentFace>,
}

struct RawSegment {
    below: Vec<usize>,
    above: Vec<usize>,
    cyclic: bool,
}

impl LineSweep {
    fn wrap(&self, x: i64) -> i64 {
        if self.periodic {
            x.rem_euclid(self.lt)
        } else {
            x
        }
    }

    fn breaks(faces: &[SegmentFace], lt: i64, periodic: bool) -> BTreeSet<i64> {
        let w = |x: i64| if periodic { x.rem_euclid(lt) } else { x };
        faces
            .iter()
            .filter(|f| !f.is_loop)
            .flat_map(|f| [w(f.start), w(f.start + f.len)])
            .collect()
    }

    /// Index of the face covering the open interval around doubled midpoint `mid2`.
    fn cover(&self, faces: &[SegmentFace], mid2: i64) -> Option<usize> {
        faces.iter().position(|f| {
            if f.is_loop {
                return true;
            }
            let o = mid2 - 2 * f.start;
            let o = if self.periodic {
                o.rem_euclid(2 * self.lt)
            } else {
                o
            };
            o > 0 && o < 2 * f.len
        })
    }

    fn segments(&self) -> Result<Vec<RawSegment>, MeshError> {
        let bb = Self::breaks(&self.below, self.lt, self.periodic);
        let ba = Self::breaks(&self.above, self.lt, self.periodic);
        let points: Vec<i64> = bb.union(&ba).cloned().collect();
        if points.is_empty() {
            if self.below.len() == 1 && self.above.len() == 1 {
                return Ok(vec![RawSegment {
                    below: vec![0],
                    above: vec![0],
                    cyclic: true,
                }]);
            }
            return Err(MeshError::Unsupported(
                "loop faces overlap on one line".into(),
            ));
        }
        // elementary intervals
        let mut iv: Vec<(i64, i64)> = points.windows(2).map(|w| (w[0], w[1])).collect();
        if self.periodic {
            iv.push((*points.last().unwrap(), points[0] + self.lt));
        }
        let cov: Vec<(Option<usize>, Option<usize>)> = iv
            .iter()
            .map(|&(s, e)| {
                (
                    self.cover(&self.below, s + e),
                    self.cover(&self.above, s + e),
                )
            })
            .collect();
        for (k, c) in cov.iter().enumerate() {
            if c.0.is_some() != c.1.is_some() {
                return Err(MeshError::Unsupported(format!(
                    "line has faces on one side only near {}",
                    iv[k].0
                )));
            }
        }
        let contact = |k: usize| cov[k].0.is_some();
        let n = iv.len();
        let is_cut = |k: usize| -> bool {
            // cut at the start of interval k
            let p = self.wrap(iv[k].0);
            let prev = if k == 0 {
                if self.periodic {
                    Some(n - 1)
                } else {
                    None
                }
            } else {
                Some(k - 1)
            };
            match prev {
                None => true,
                Some(j) => !contact(j) || !contact(k) || (bb.contains(&p) && ba.contains(&p)),
            }
        };
        let cuts: Vec<usize> = (0..n).filter(|&k| is_cut(k)).collect();
        let mut out = Vec::new();
        let collect = |ks: &[usize], cyclic: bool| -> Option<RawSegment> {
            if ks.is_empty() || !contact(ks[0]) {
                return None;
            }
            let mut below: Vec<usize> = Vec::new();
            let mut above: Vec<usize> = Vec::new();
            for &k in ks {
                let (b, a) = (cov[k].0.unwrap(), cov[k].1.unwrap());
                if below.last() != Some(&b) {
                    below.push(b);
                }
                if above.last() != Some(&a) {
                    above.push(a);
                }
            }
            if cyclic {
                if below.len() > 1 && below.first() == below.last() {
                    below.pop();
                }
                if above.len() > 1 && above.first() == above.last() {
                    above.pop();
                }
            }
            Some(RawSegment {
                below,
                above,
                cyclic,
            })
        };
        if cuts.is_empty() {
            // fully cyclic contact without a common break
            if let Some(s) = collect(&(0..n).collect::<Vec<_>>(), true) {
                out.push(s);
            }
            return Ok(out);
        }
        for (ci, &c0) in cuts.iter().enumerate() {
            let c1 = if ci + 1 < cuts.len() {
                cuts[ci + 1]
            } else if self.periodic {
                cuts[0] + n
            } else {
                n
            };
            let ks: Vec<usize> = (c0..c1).map(|k| k % n).collect();
            if let Some(s) = collect(&ks, false) {
                out.push(s);
            }
        }
        Ok(out)
    }
}
