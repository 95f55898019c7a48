use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EquivError;
use crate::pathalg::{ArrowId, Letter, Quiver, VertexId, Word};
use crate::surfacemap::BraneTiling;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Order of a permutation (lcm of cycle lengths).
pub(crate) fn perm_order(p: &[usize]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut ord = 1u64;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0u64;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        ord = ord / gcd(ord, len) * len;
    }
    ord
}

fn is_bijection(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Vertex and arrow permutations commuting with source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverAutomorphism {
    vertex_perm: Vec<usize>,
    arrow_perm: Vec<usize>,
    order: u32,
}

impl QuiverAutomorphism {
    pub fn new(q: &Quiver, vertex_perm: Vec<usize>, arrow_perm: Vec<usize>) -> Result<Self, EquivError> {
        let bad = |m: String| EquivError::InvalidAutomorphism(m);
        if vertex_perm.len() != q.vertex_count() || arrow_perm.len() != q.arrow_count() {
            return Err(bad("permutation sizes do not match the quiver".into()));
        }
        if !is_bijection(&vertex_perm) || !is_bijection(&arrow_perm) {
            return Err(bad("not a bijection".into()));
        }
        for a in q.arrow_ids() {
            let (x, y) = (q.arrow(a), q.arrow(ArrowId(arrow_perm[a.0 as usize] as u32)));
            if vertex_perm[x.src.0 as usize] != y.src.0 as usize || vertex_perm[x.tgt.0 as usize] != y.tgt.0 as usize {
                return Err(bad(format!("{} ↦ {} does not respect source/target", x.name, y.name)));
            }
            if x.localized != y.localized {
                return Err(bad(format!("{} ↦ {} changes localization", x.name, y.name)));
            }
        }
        let order = perm_order(&vertex_perm).max(1);
        let order = order / gcd(order, perm_order(&arrow_perm)) * perm_order(&arrow_perm);
        Ok(QuiverAutomorphism { vertex_perm, arrow_perm, order: order as u32 })
    }

    pub fn identity(q: &Quiver) -> Self {
        QuiverAutomorphism {
            vertex_perm: (0..q.vertex_count()).collect(),
            arrow_perm: (0..q.arrow_count()).collect(),
            order: 1,
        }
    }

    /// Reads `vertex_perm` (labels) and/or `arrow_perm` (names).
    pub fn from_file(q: &Quiver, f: &AutomorphismFile) -> Result<Self, EquivError> {
        let bad = |m: String| EquivError::InvalidAutomorphism(m);
        let arrows = f.arrow_perm.as_ref().ok_or_else(|| bad("quiver automorphism needs \"arrow_perm\"".into()))?;
        let mut ap = vec![usize::MAX; q.arrow_count()];
        for (x, y) in arrows {
            ap[q.arrow_id(x)?.0 as usize] = q.arrow_id(y)?.0 as usize;
        }
        if ap.contains(&usize::MAX) {
            return Err(bad("arrow_perm does not cover every arrow".into()));
        }
        let mut vp = vec![usize::MAX; q.vertex_count()];
        if let Some(vm) = &f.vertex_perm {
            for (x, y) in vm {
                let vx = q.vertex_by_label(*x).ok_or_else(|| bad(format!("unknown vertex {x}")))?;
                let vy = q.vertex_by_label(*y).ok_or_else(|| bad(format!("unknown vertex {y}")))?;
                vp[vx.0 as usize] = vy.0 as usize;
            }
        }
        for a in q.arrow_ids() {
            let (x, y) = (q.arrow(a), q.arrow(ArrowId(ap[a.0 as usize] as u32)));
            for (u, v) in [(x.src, y.src), (x.tgt, y.tgt)] {
                if vp[u.0 as usize] == usize::MAX {
                    vp[u.0 as usize] = v.0 as usize;
                }
            }
        }
        for (i, slot) in vp.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = i;
            }
        }
        let phi = Self::new(q, vp, ap)?;
        if let Some(n) = f.order {
            if n != phi.order {
                return Err(bad(format!("declared order {n}, actual order {}", phi.order)));
            }
        }
        Ok(phi)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn vertex(&self, v: VertexId) -> VertexId {
        VertexId(self.vertex_perm[v.0 as usize] as u32)
    }

    pub fn arrow(&self, a: ArrowId) -> ArrowId {
        ArrowId(self.arrow_perm[a.0 as usize] as u32)
    }

    pub fn vertex_pow(&self, v: VertexId, k: i64) -> VertexId {
        let n = self.order as i64;
        let mut x = v;
        for _ in 0..k.rem_euclid(n) {
            x = self.vertex(x);
        }
        x
    }

    pub fn arrow_pow(&self, a: ArrowId, k: i64) -> ArrowId {
        let n = self.order as i64;
        let mut x = a;
        for _ in 0..k.rem_euclid(n) {
            x = self.arrow(x);
        }
        x
    }

    /// Image of a word under `φ^k`.
    pub fn word_pow(&self, q: &Quiver, w: &Word, k: i64) -> Word {
        let letters: Vec<Letter> =
            w.letters().iter().map(|l| Letter { arrow: self.arrow_pow(l.arrow, k), inverse: l.inverse }).collect();
        q.word_at(&letters, self.vertex_pow(w.src(), k)).expect("automorphisms preserve composability")
    }

    pub fn to_file(&self, q: &Quiver) -> AutomorphismFile {
        AutomorphismFile {
            order: Some(self.order),
            vertex_perm: Some(q.vertices().map(|v| (q.label(v), q.label(self.vertex(v)))).collect()),
            arrow_perm: Some(
                q.arrow_ids().map(|a| (q.arrow(a).name.clone(), q.arrow(self.arrow(a)).name.clone())).collect(),
            ),
            half_edge_perm: None,
        }
    }
}

/// Automorphism on disk.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct AutomorphismFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_perm: Option<BTreeMap<u32, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrow_perm: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_edge_perm: Option<BTreeMap<i64, i64>>,
}

/// Half-edge permutation commuting with both map permutations and keeping colours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingAutomorphism {
    perm: Vec<usize>,
    order: u32,
}

impl TilingAutomorphism {
    pub fn new(t: &BraneTiling, perm: Vec<usize>) -> Result<Self, EquivError> {
        let bad = |m: String| EquivError::InvalidAutomorphism(m);
        let m = &t.map;
        if perm.len() != m.half_edge_count() || !is_bijection(&perm) {
            return Err(bad("not a permutation of the half-edges".into()));
        }
        for h in 0..perm.len() {
            if perm[m.alpha(h)] != m.alpha(perm[h]) {
                return Err(bad(format!("does not commute with the involution at {}", m.id(h))));
            }
            if perm[m.sigma(h)] != m.sigma(perm[h]) {
                return Err(bad(format!("does not commute with the rotation at {}", m.id(h))));
            }
            if t.color_of_half_edge(h) != t.color_of_half_edge(perm[h]) {
                return Err(bad(format!("swaps colours at {}", m.id(h))));
            }
        }
        let order = perm_order(&perm) as u32;
        Ok(TilingAutomorphism { perm, order })
    }

    pub fn identity(t: &BraneTiling) -> Self {
        TilingAutomorphism { perm: (0..t.map.half_edge_count()).collect(), order: 1 }
    }

    pub fn from_file(t: &BraneTiling, f: &AutomorphismFile) -> Result<Self, EquivError> {
        let bad = |m: String| EquivError::InvalidAutomorphism(m);
        let hp = f.half_edge_perm.as_ref().ok_or_else(|| bad("tiling automorphism needs \"half_edge_perm\"".into()))?;
        let mut perm = vec![usize::MAX; t.map.half_edge_count()];
        for (x, y) in hp {
            let i = t.map.index_of(*x).ok_or_else(|| bad(format!("unknown half-edge {x}")))?;
            let j = t.map.index_of(*y).ok_or_else(|| bad(format!("unknown half-edge {y}")))?;
            perm[i] = j;
        }
        let phi = Self::new(t, perm)?;
        if let Some(n) = f.order {
            if n != phi.order {
                return Err(bad(format!("declared order {n}, actual order {}", phi.order)));
            }
        }
        Ok(phi)
    }

    pub fn to_file(&self, t: &BraneTiling) -> AutomorphismFile {
        AutomorphismFile {
            order: Some(self.order),
            half_edge_perm: Some((0..self.perm.len()).map(|h| (t.map.id(h), t.map.id(self.perm[h]))).collect()),
            ..Default::default()
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn apply(&self, h: usize) -> usize {
        self.perm[h]
    }

    pub fn pow(&self, h: usize, k: i64) -> usize {
        let mut x = h;
        for _ in 0..k.rem_euclid(self.order as i64) {
            x = self.perm[x];
        }
        x
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Builds from raw parts after the caller has extended the map.
    pub(crate) fn extended(t: &BraneTiling, perm: Vec<usize>, order: u32) -> Result<Self, EquivError> {
        let phi = Self::new(t, perm)?;
        if phi.order != order {
            return Err(EquivError::InvalidAutomorphism(format!(
                "extension has order {}, expected {order}",
                phi.order
            )));
        }
        Ok(phi)
    }

    /// Induced automorphism of the dual quiver (faces and edges, in their index order).
    pub fn on_dual(&self, t: &BraneTiling, q: &Quiver) -> Result<QuiverAutomorphism, EquivError> {
        let faces = t.map.face_index();
        let edges = t.map.edge_index();
        let mut vp = vec![0; t.map.faces().len()];
        let mut ap = vec![0; t.map.edge_count()];
        for h in 0..self.perm.len() {
            vp[faces[h]] = faces[self.perm[h]];
            ap[edges[h]] = edges[self.perm[h]];
        }
        let phi = QuiverAutomorphism::new(q, vp, ap)?;
        Ok(QuiverAutomorphism { order: self.order, ..phi })
    }
}

/// Orbit size of every vertex, keyed by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub sizes: BTreeMap<u32, usize>,
    pub order: u32,
    pub all_full: bool,
}

pub fn orbit_sizes(q: &Quiver, phi: &QuiverAutomorphism) -> OrbitReport {
    let mut sizes = BTreeMap::new();
    for v in q.vertices() {
        let mut k = 1;
        let mut x = phi.vertex(v);
        while x != v {
            x = phi.vertex(x);
            k += 1;
        }
        sizes.insert(q.label(v), k);
    }
    let all_full = sizes.values().all(|&s| s == phi.order() as usize);
    OrbitReport { sizes, order: phi.order(), all_full }
}
