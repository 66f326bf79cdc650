//! Plain-text mesh format.
//!
//! ```text
//! domain x0 y0 x1 y1
//! base nx ny
//! points nx ny
//! periodic 0 1
//! policy fd|sat|none
//! blocks <count>
//! id level_x level_y x0 y0 ex ey
//! forced <count>
//! normal_dim at from to          (integer units, 2^20 per level-0 block)
//! interfaces <count>
//! a:face b:face kind             (b is "-" on the physical boundary)
//! ```
//! Lines starting with `#` are ignored. On reading, the mesh is reclassified and the
//! interface list must match.

use super::*;
use std::fmt::Write as _;

impl Mesh {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = &self.domain;
        let _ = writeln!(s, "domain {} {} {} {}", d.lo[0], d.lo[1], d.hi[0], d.hi[1]);
        let _ = writeln!(s, "base {} {}", self.base_blocks[0], self.base_blocks[1]);
        let _ = writeln!(
            s,
            "points {} {}",
            self.points_per_dim[0], self.points_per_dim[1]
        );
        let _ = writeln!(
            s,
            "periodic {} {}",
            self.periodic[0] as u8, self.periodic[1] as u8
        );
        let policy = match self.policy {
            Some(JunctionPolicy::FdWherePossible) => "fd",
            Some(JunctionPolicy::SatOnly) => "sat",
            None => "none",
        };
        let _ = writeln!(s, "policy {policy}");
        let _ = writeln!(s, "blocks {}", self.blocks.len());
        for b in &self.blocks {
            let _ = writeln!(
                s,
                "{} {} {} {} {} {} {}",
                b.id, b.level[0], b.level[1], b.origin[0], b.origin[1], b.extent[0], b.extent[1]
            );
        }
        let _ = writeln!(s, "forced {}", self.forced_sat.len());
        for f in &self.forced_sat {
            let _ = writeln!(s, "{} {} {} {}", f.normal_dim, f.at, f.from, f.to);
        }
        let _ = writeln!(s, "interfaces {}", self.interfaces.len());
        for i in &self.interfaces {
            let _ = writeln!(
                s,
                "{} {} {}",
                side_label(Some(i.side_a)),
                side_label(i.side_b),
                i.kind.label()
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh, MeshError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |key: &str| -> Result<(usize, Vec<String>), MeshError> {
            let (n, l) = lines.next().ok_or(MeshError::Parse {
                line: 0,
                msg: format!("missing {key}"),
            })?;
            let mut w = l.split_whitespace().map(str::to_string);
            if !key.is_empty() && w.next().as_deref() != Some(key) {
                return Err(perr(n, format!("expected {key}")));
            }
            Ok((n, w.collect()))
        };

        let (n, w) = next("domain")?;
        let v: Vec<f64> = nums(n, &w, 4)?;
        let domain = Box2::new([v[0], v[1]], [v[2], v[3]]);
        let (n, w) = next("base")?;
        let base: Vec<usize> = nums(n, &w, 2)?;
        let (n, w) = next("points")?;
        let pts: Vec<usize> = nums(n, &w, 2)?;
        let (n, w) = next("periodic")?;
        let per: Vec<u8> = nums(n, &w, 2)?;
        let (n, w) = next("policy")?;
        let policy = match w.first().map(String::as_str) {
            Some("fd") => Some(JunctionPolicy::FdWherePossible),
            Some("sat") => Some(JunctionPolicy::SatOnly),
            Some("none") => None,
            _ => return Err(perr(n, "bad policy".into())),
        };

        let (n, w) = next("blocks")?;
        let count: usize = nums(n, &w, 1)?[0];
        if base.contains(&0) {
            return Err(perr(n, "base block count must be positive".into()));
        }
        let ext = domain.extent();
        let be = [ext[0] / base[0] as f64, ext[1] / base[1] as f64];
        let mut specs = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, w) = next("")?;
            if w.len() != 7 {
                return Err(perr(n, "block line needs 7 fields".into()));
            }
            let id: usize = w[0].parse().map_err(|_| perr(n, "bad id".into()))?;
            let lx: u32 = w[1].parse().map_err(|_| perr(n, "bad level".into()))?;
            let ly: u32 = w[2].parse().map_err(|_| perr(n, "bad level".into()))?;
            let o: Vec<f64> = nums(n, &w[3..5], 2)?;
            let cell = [
                ((o[0] - domain.lo[0]) / be[0] * UNIT as f64).round() as i64,
                ((o[1] - domain.lo[1]) / be[1] * UNIT as f64).round() as i64,
            ];
            specs.push((id, [lx, ly], cell));
        }
        let mut mesh = Mesh::from_blocks(
            domain,
            [base[0], base[1]],
            [pts[0], pts[1]],
            [per[0] != 0, per[1] != 0],
            &specs,
        )?;

        let (n, w) = next("forced")?;
        let count: usize = nums(n, &w, 1)?[0];
        for _ in 0..count {
            let (n, w) = next("")?;
            let v: Vec<i64> = nums(n, &w, 4)?;
            if !(0..2).contains(&v[0]) {
                return Err(perr(n, "bad normal dimension".into()));
            }
            mesh.forced_sat.push(ForcedSat {
                normal_dim: v[0] as usize,
                at: v[1],
                from: v[2],
                to: v[3],
            });
        }

        let (n, w) = next("interfaces")?;
        let count: usize = nums(n, &w, 1)?[0];
        let mut listed = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, w) = next("")?;
            if w.len() != 3 {
                return Err(perr(n, "interface line needs 3 fields".into()));
            }
            let a = parse_side(n, &w[0])?
                .ok_or_else(|| perr(n, "first side cannot be physical".into()))?;
            let b = parse_side(n, &w[1])?;
            let k = InterfaceKind::parse(&w[2])
                .ok_or_else(|| perr(n, format!("unknown kind {}", w[2])))?;
            listed.push((a, b, k));
        }

        let Some(policy) = policy else {
            if !listed.is_empty() {
                return Err(perr(0, "interfaces listed for an unclassified mesh".into()));
            }
            return Ok(mesh);
        };
        let mesh = mesh.classify_interfaces(policy)?;
        let mut got: Vec<_> = mesh
            .interfaces
            .iter()
            .map(|i| (i.side_a, i.side_b, i.kind))
            .collect();
        let key =
            |x: &((usize, Face), Option<(usize, Face)>, InterfaceKind)| (x.0, x.1, x.2.label());
        got.sort_by_key(key);
        listed.sort_by_key(key);
        if got != listed {
            return Err(perr(
                0,
                "interface list does not match the block layout".into(),
            ));
        }
        Ok(mesh)
    }
}

fn perr(line: usize, msg: String) -> MeshError {
    MeshError::Parse { line, msg }
}

fn nums<T: std::str::FromStr>(line: usize, w: &[String], n: usize) -> Result<Vec<T>, MeshError> {
    if w.len() != n {
        return Err(perr(line, format!("expected {n} values")));
    }
    w.iter()
        .map(|s| {
            s.parse()
                .map_err(|_| perr(line, format!("bad number {s:?}")))
        })
        .collect()
}

fn side_label(s: Option<(usize, Face)>) -> String {
    match s {
        Some((id, f)) => format!("{id}:{}", f.label()),
        None => "-".into(),
    }
}

fn parse_side(line: usize, s: &str) -> Result<Option<(usize, Face)>, MeshError> {
    if s == "-" {
        return Ok(None);
    }
    let (id, f) = s
        .split_once(':')
        .ok_or_else(|| perr(line, format!("bad side {s:?}")))?;
    let id = id
        .parse()
        .map_err(|_| perr(line, format!("bad block id {id:?}")))?;
    let f = Face::parse(f).ok_or_else(|| perr(line, format!("bad face {f:?}")))?;
    Ok(Some((id, f)))
}
