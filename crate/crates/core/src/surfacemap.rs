//! Brane tilings as oriented combinatorial maps, and their dual quivers.
//!
//! A map is a set of half-edges with a fixed-point-free involution `α`
//! (the other end of the edge) and a rotation `σ` listing the half-edges
//! around each vertex counter-clockwise. Faces are the cycles of `σ∘α`;
//! the face of `h` is the one entered at the corner between `σ⁻¹(h)` and `h`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::pathalg::{coeff, Letter, PathError, Potential, Quiver, VertexId, Word};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("not a valid orientable map: {0}")]
    NonOrientableOrInvalid(String),
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
    #[error("unknown tiling vertex {0}")]
    UnknownVertex(usize),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    #[serde(rename = "b", alias = "black")]
    Black,
    #[serde(rename = "w", alias = "white")]
    White,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// Oriented map on half-edges `0..n`; `ids` keeps the caller's labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialMap {
    ids: Vec<i64>,
    alpha: Vec<usize>,
    sigma: Vec<usize>,
    /// One representative half-edge per vertex, in vertex order.
    reps: Vec<usize>,
    vertex_of: Vec<usize>,
}

/// One cycle of the face permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingFace {
    pub boundary: Vec<usize>,
}

impl CombinatorialMap {
    /// `pairs` over external ids; `rotation` lists each vertex's ccw cycle.
    pub fn new(ids: &[i64], pairs: &[[i64; 2]], rotation: &[Vec<i64>]) -> Result<Self, MapError> {
        let bad = |m: String| MapError::NonOrientableOrInvalid(m);
        let mut index = BTreeMap::new();
        for (i, &h) in ids.iter().enumerate() {
            if index.insert(h, i).is_some() {
                return Err(bad(format!("duplicate half-edge {h}")));
            }
        }
        let look = |h: i64| index.get(&h).copied().ok_or_else(|| bad(format!("unknown half-edge {h}")));
        let n = ids.len();
        let mut alpha = vec![usize::MAX; n];
        for &[x, y] in pairs {
            let (i, j) = (look(x)?, look(y)?);
            if i == j {
                return Err(bad(format!("involution fixes half-edge {x}")));
            }
            if alpha[i] != usize::MAX || alpha[j] != usize::MAX {
                return Err(bad(format!("half-edge paired twice in ({x}, {y})")));
            }
            alpha[i] = j;
            alpha[j] = i;
        }
        if let Some(i) = alpha.iter().position(|&a| a == usize::MAX) {
            return Err(bad(format!("half-edge {} is unpaired", ids[i])));
        }
        let mut sigma = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for cyc in rotation {
            if cyc.is_empty() {
                return Err(bad("empty rotation cycle".into()));
            }
            let idx: Vec<usize> = cyc.iter().map(|&h| look(h)).collect::<Result<_, _>>()?;
            for k in 0..idx.len() {
                if sigma[idx[k]] != usize::MAX {
                    return Err(bad(format!("half-edge {} in two rotation cycles", ids[idx[k]])));
                }
                sigma[idx[k]] = idx[(k + 1) % idx.len()];
            }
            reps.push(idx[0]);
        }
        if let Some(i) = sigma.iter().position(|&s| s == usize::MAX) {
            return Err(bad(format!("half-edge {} is at no vertex", ids[i])));
        }
        let mut m = CombinatorialMap { ids: ids.to_vec(), alpha, sigma, reps, vertex_of: Vec::new() };
        m.reindex();
        Ok(m)
    }

    fn reindex(&mut self) {
        self.vertex_of = vec![usize::MAX; self.sigma.len()];
        for (v, &r) in self.reps.iter().enumerate() {
            let mut h = r;
            loop {
                self.vertex_of[h] = v;
                h = self.sigma[h];
                if h == r {
                    break;
                }
            }
        }
    }

    pub fn half_edge_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn edge_count(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.reps.len()
    }

    pub fn alpha(&self, h: usize) -> usize {
        self.alpha[h]
    }

    pub fn sigma(&self, h: usize) -> usize {
        self.sigma[h]
    }

    pub fn sigma_inv(&self, h: usize) -> usize {
        let mut x = h;
        loop {
            let nx = self.sigma[x];
            if nx == h {
                return x;
            }
            x = nx;
        }
    }

    /// Face permutation `σ∘α`.
    pub fn face_next(&self, h: usize) -> usize {
        self.sigma[self.alpha[h]]
    }

    pub fn id(&self, h: usize) -> i64 {
        self.ids[h]
    }

    pub fn index_of(&self, id: i64) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    /// Half-edges at `v` in counter-clockwise order from its representative.
    pub fn vertex_cycle(&self, v: usize) -> Vec<usize> {
        cycle_from(self.reps[v], |h| self.sigma[h])
    }

    /// Faces ordered by their smallest half-edge.
    pub fn faces(&self) -> Vec<TilingFace> {
        let mut seen = vec![false; self.alpha.len()];
        let mut out = Vec::new();
        for h in 0..self.alpha.len() {
            if seen[h] {
                continue;
            }
            let boundary = cycle_from(h, |x| self.face_next(x));
            for &x in &boundary {
                seen[x] = true;
            }
            out.push(TilingFace { boundary });
        }
        out
    }

    /// Face index (in [`CombinatorialMap::faces`] order) of every half-edge.
    pub fn face_index(&self) -> Vec<usize> {
        let mut out = vec![0; self.alpha.len()];
        for (k, f) in self.faces().iter().enumerate() {
            for &h in &f.boundary {
                out[h] = k;
            }
        }
        out
    }

    /// Edge index of every half-edge; edges are numbered by their smaller half-edge.
    pub fn edge_index(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.alpha.len()];
        let mut k = 0;
        for h in 0..self.alpha.len() {
            if out[h] == usize::MAX {
                out[h] = k;
                out[self.alpha[h]] = k;
                k += 1;
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.alpha.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(h) = stack.pop() {
            for x in [self.alpha[h], self.sigma[h]] {
                if !seen[x] {
                    seen[x] = true;
                    count += 1;
                    stack.push(x);
                }
            }
        }
        count == n
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.faces().len() as i64
    }

    fn fresh_id(&self) -> i64 {
        self.ids.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Adds an edge across the corners before `hu` and `hv` (same face).
    ///
    /// Returns the new half-edges at the vertices of `hu` and `hv`.
    pub fn insert_edge(&mut self, hu: usize, hv: usize) -> (usize, usize) {
        let (nu, nv) = (self.alpha.len(), self.alpha.len() + 1);
        let (pu, pv) = (self.sigma_inv(hu), self.sigma_inv(hv));
        let id = self.fresh_id();
        self.ids.extend([id, id + 1]);
        self.alpha.extend([nv, nu]);
        self.sigma.extend([hu, hv]);
        // when both corners sit at one vertex the second lookup must see the first insertion
        self.sigma[pu] = nu;
        let pv = if pv == pu { nu } else { pv };
        self.sigma[pv] = nv;
        let (vu, vv) = (self.vertex_of[hu], self.vertex_of[hv]);
        self.vertex_of.extend([vu, vv]);
        (nu, nv)
    }

    /// New vertex joined by one edge to each listed corner.
    ///
    /// `corners` must be listed in face order; returns the vertex index and,
    /// per corner, the new half-edge at the centre and at the corner.
    pub fn insert_star(&mut self, corners: &[usize]) -> (usize, Vec<(usize, usize)>) {
        let m = corners.len();
        let base = self.alpha.len();
        let id = self.fresh_id();
        let mut spokes = Vec::with_capacity(m);
        for (i, &h) in corners.iter().enumerate() {
            let centre = base + 2 * i;
            let outer = centre + 1;
            self.ids.extend([id + 2 * i as i64, id + 2 * i as i64 + 1]);
            self.alpha.extend([outer, centre]);
            self.sigma.extend([usize::MAX, h]);
            let p = self.sigma_inv(h);
            self.sigma[p] = outer;
            self.vertex_of.extend([usize::MAX, self.vertex_of[h]]);
            spokes.push((centre, outer));
        }
        // face order is clockwise seen from the centre, rotation is counter-clockwise
        for i in 0..m {
            self.sigma[spokes[i].0] = spokes[(i + m - 1) % m].0;
        }
        let v = self.reps.len();
        self.reps.push(spokes[0].0);
        for &(c, _) in &spokes {
            self.vertex_of[c] = v;
        }
        (v, spokes)
    }

    /// Serializable description using external ids.
    pub fn pairs(&self) -> Vec<[i64; 2]> {
        (0..self.alpha.len()).filter(|&h| h < self.alpha[h]).map(|h| [self.ids[h], self.ids[self.alpha[h]]]).collect()
    }

    pub fn rotation(&self) -> Vec<Vec<i64>> {
        (0..self.reps.len()).map(|v| self.vertex_cycle(v).iter().map(|&h| self.ids[h]).collect()).collect()
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    /// Dual map: same edges, faces become vertices.
    pub fn dual(&self) -> CombinatorialMap {
        let sigma: Vec<usize> = (0..self.alpha.len()).map(|h| self.face_next(h)).collect();
        let reps = self.faces().iter().map(|f| f.boundary[0]).collect();
        let mut m =
            CombinatorialMap { ids: self.ids.clone(), alpha: self.alpha.clone(), sigma, reps, vertex_of: Vec::new() };
        m.reindex();
        m
    }
}

fn cycle_from(start: usize, next: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut out = vec![start];
    let mut h = next(start);
    while h != start {
        out.push(h);
        h = next(h);
    }
    out
}

/// `g` with `V − E + F = 2 − 2g`.
pub fn genus(map: &CombinatorialMap) -> Result<u32, MapError> {
    let chi = map.euler_characteristic();
    if chi > 2 || (2 - chi) % 2 != 0 {
        return Err(MapError::NonOrientableOrInvalid(format!("Euler characteristic {chi}")));
    }
    Ok(((2 - chi) / 2) as u32)
}

/// Bipartite map with optional arrow names per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraneTiling {
    pub map: CombinatorialMap,
    pub colors: Vec<Color>,
    /// Arrow name per edge index, when supplied.
    pub edge_names: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ColoringSpec {
    List(Vec<Color>),
    Map(BTreeMap<usize, Color>),
}

/// Tiling on disk.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TilingFile {
    pub half_edges: Vec<i64>,
    pub involution: Vec<[i64; 2]>,
    pub rotation: Vec<Vec<i64>>,
    pub coloring: ColoringSpec,
    /// Arrow name keyed by either half-edge of the edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<i64, String>>,
}

impl TilingFile {
    pub fn colors(&self) -> Result<Vec<Color>, MapError> {
        match &self.coloring {
            ColoringSpec::List(v) => Ok(v.clone()),
            ColoringSpec::Map(m) => (0..self.rotation.len())
                .map(|i| m.get(&i).copied().ok_or_else(|| MapError::InvalidTiling(format!("vertex {i} has no colour"))))
                .collect(),
        }
    }
}

impl BraneTiling {
    pub fn new(map: CombinatorialMap, colors: Vec<Color>) -> Result<Self, MapError> {
        if colors.len() != map.vertex_count() {
            return Err(MapError::InvalidTiling(format!(
                "{} colours for {} vertices",
                colors.len(),
                map.vertex_count()
            )));
        }
        Ok(BraneTiling { map, colors, edge_names: None })
    }

    /// Parses and checks the structural invariants; bipartiteness is checked by [`validate_tiling`].
    pub fn from_file(file: &TilingFile) -> Result<Self, MapError> {
        let map = CombinatorialMap::new(&file.half_edges, &file.involution, &file.rotation)?;
        let mut t = BraneTiling::new(map, file.colors()?)?;
        if let Some(labels) = &file.labels {
            let edges = t.map.edge_index();
            let mut names: Vec<Option<String>> = vec![None; t.map.edge_count()];
            for (id, name) in labels {
                let h = t
                    .map
                    .index_of(*id)
                    .ok_or_else(|| MapError::InvalidTiling(format!("label on unknown half-edge {id}")))?;
                let slot = &mut names[edges[h]];
                if slot.as_ref().is_some_and(|n| n != name) {
                    return Err(MapError::InvalidTiling(format!("edge of half-edge {id} labelled twice")));
                }
                *slot = Some(name.clone());
            }
            let mut used = BTreeSet::new();
            let names: Vec<String> =
                names.into_iter().enumerate().map(|(k, n)| n.unwrap_or_else(|| format!("x{k}"))).collect();
            for n in &names {
                if !used.insert(n.clone()) {
                    return Err(MapError::InvalidTiling(format!("duplicate label {n}")));
                }
            }
            t.edge_names = Some(names);
        }
        Ok(t)
    }

    pub fn parse(text: &str) -> Result<Self, MapError> {
        let file: TilingFile = serde_json::from_str(text).map_err(|e| MapError::InvalidTiling(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> TilingFile {
        let labels = self.edge_names.as_ref().map(|names| {
            let edges = self.map.edge_index();
            (0..self.map.half_edge_count())
                .filter(|&h| h < self.map.alpha(h))
                .map(|h| (self.map.id(h), names[edges[h]].clone()))
                .collect()
        });
        TilingFile {
            half_edges: self.map.ids().to_vec(),
            involution: self.map.pairs(),
            rotation: self.map.rotation(),
            coloring: ColoringSpec::List(self.colors.clone()),
            labels,
        }
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn color_of_half_edge(&self, h: usize) -> Color {
        self.colors[self.map.vertex_of(h)]
    }

    /// Arrow name of each edge index.
    pub fn arrow_names(&self) -> Vec<String> {
        match &self.edge_names {
            Some(n) => n.clone(),
            None => (0..self.map.edge_count()).map(|k| format!("x{k}")).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.map.vertex_count()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
    pub genus: Option<u32>,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub white_vertices: usize,
    pub black_vertices: usize,
}

/// Lists every violated invariant of a parsed tiling.
pub fn validate_tiling(t: &BraneTiling) -> ValidationReport {
    let m = &t.map;
    let mut violations = Vec::new();
    for h in 0..m.half_edge_count() {
        let o = m.alpha(h);
        if h < o && t.color_of_half_edge(h) == t.color_of_half_edge(o) {
            violations.push(format!(
                "bipartiteness: edge ({}, {}) joins two {:?} vertices",
                m.id(h),
                m.id(o),
                t.color_of_half_edge(h)
            ));
        }
    }
    if !m.is_connected() {
        violations.push("connectivity: map is not connected".into());
    }
    let g = if m.is_connected() { genus(m).ok() } else { None };
    if m.is_connected() && g.is_none() {
        violations.push(format!("euler: characteristic {} is not 2 - 2g", m.euler_characteristic()));
    }
    let white = t.colors.iter().filter(|&&c| c == Color::White).count();
    ValidationReport {
        valid: violations.is_empty(),
        violations,
        genus: g,
        vertices: m.vertex_count(),
        edges: m.edge_count(),
        faces: m.faces().len(),
        white_vertices: white,
        black_vertices: t.colors.len() - white,
    }
}

/// Like [`validate_tiling`] but also reports malformed permutations in raw input.
pub fn validate_tiling_file(file: &TilingFile) -> ValidationReport {
    match BraneTiling::from_file(file) {
        Ok(t) => validate_tiling(&t),
        Err(e) => ValidationReport {
            valid: false,
            violations: vec![format!("involution/rotation: {e}")],
            genus: None,
            vertices: file.rotation.len(),
            edges: file.involution.len(),
            faces: 0,
            white_vertices: 0,
            black_vertices: 0,
        },
    }
}

/// Quiver whose vertices are faces (labelled `1..`) and whose arrows are edges.
///
/// The arrow of an edge runs from the face of its black half-edge to the face
/// of its white half-edge; this goes clockwise around white vertices.
pub fn dual_graph(t: &BraneTiling) -> Result<Quiver, MapError> {
    let rep = validate_tiling(t);
    if !rep.valid {
        return Err(MapError::InvalidTiling(rep.violations.join("; ")));
    }
    let m = &t.map;
    let faces = m.face_index();
    let nf = m.faces().len() as u32;
    let mut q = Quiver::with_vertices(1..=nf);
    let names = t.arrow_names();
    let edges = m.edge_index();
    let mut white_end = vec![usize::MAX; m.edge_count()];
    for h in 0..m.half_edge_count() {
        if t.color_of_half_edge(h) == Color::White {
            white_end[edges[h]] = h;
        }
    }
    for (k, &hw) in white_end.iter().enumerate() {
        let hb = m.alpha(hw);
        q.add_arrow(&names[k], VertexId(faces[hb] as u32), VertexId(faces[hw] as u32), false)?;
    }
    Ok(q)
}

/// Dual quiver and potential: `+c_v` per white vertex, `−c_u` per black vertex.
pub fn dual_quiver(t: &BraneTiling) -> Result<(Quiver, Potential), MapError> {
    let q = dual_graph(t)?;
    let mut w = Potential::zero();
    for v in 0..t.vertex_count() {
        let c = cycle_word(t, &q, v)?;
        let sign = if t.color(v) == Color::White { 1 } else { -1 };
        w.add_cycle(&c, coeff(sign))?;
    }
    Ok((q, w))
}

fn cycle_word(t: &BraneTiling, q: &Quiver, v: usize) -> Result<Word, MapError> {
    let edges = t.map.edge_index();
    let hs = t.map.vertex_cycle(v);
    let mut letters: Vec<Letter> = hs.iter().map(|&h| Letter::fwd(crate::pathalg::ArrowId(edges[h] as u32))).collect();
    if t.color(v) == Color::Black {
        // written order follows σ⁻¹ around black vertices
        letters[1..].reverse();
    }
    Ok(q.word(&letters)?)
}

/// Closed word around tiling vertex `v`, in the dual quiver of `t`.
pub fn minimal_cycle(t: &BraneTiling, v: usize) -> Result<Word, MapError> {
    if v >= t.vertex_count() {
        return Err(MapError::UnknownVertex(v));
    }
    let q = dual_graph(t)?;
    cycle_word(t, &q, v)
}

/// Every vertex is the endpoint of exactly one edge of `edges` (edge indices).
pub fn is_dimer(t: &BraneTiling, edges: &BTreeSet<usize>) -> bool {
    let idx = t.map.edge_index();
    let mut hits = vec![0usize; t.vertex_count()];
    for h in 0..t.map.half_edge_count() {
        if edges.contains(&idx[h]) {
            hits[t.map.vertex_of(h)] += 1;
        }
    }
    hits.iter().all(|&c| c == 1)
}

/// Arrow sets meeting every potential term exactly once.
pub fn meets_each_term_once(w: &Potential, arrows: &BTreeSet<crate::pathalg::ArrowId>) -> bool {
    w.iter().all(|(cw, _)| cw.letters().iter().filter(|l| arrows.contains(&l.arrow)).count() == 1)
}

/// Vertex and arrow bijection carrying one quiver with potential onto another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    pub vertices: Vec<(u32, u32)>,
    pub arrows: Vec<(String, String)>,
}

/// Searches for a relabeling taking `(q1, w1)` to `(q2, w2)` term by term.
///
/// Every arrow must occur in the potential; the returned map is checked
/// against sources, targets and coefficients before it is returned.
pub fn find_relabeling(q1: &Quiver, w1: &Potential, q2: &Quiver, w2: &Potential) -> Option<Relabeling> {
    if q1.arrow_count() != q2.arrow_count() || q1.vertex_count() != q2.vertex_count() || w1.len() != w2.len() {
        return None;
    }
    let t1: Vec<_> = w1.iter().map(|(c, k)| (c.letters().to_vec(), k.clone())).collect();
    let t2: Vec<_> = w2.iter().map(|(c, k)| (c.letters().to_vec(), k.clone())).collect();
    let mut amap: Vec<Option<u32>> = vec![None; q1.arrow_count()];
    let mut used_arrow = vec![false; q2.arrow_count()];
    let mut used_term = vec![false; t2.len()];
    fn go(
        i: usize,
        t1: &[(Vec<Letter>, crate::pathalg::Coeff)],
        t2: &[(Vec<Letter>, crate::pathalg::Coeff)],
        amap: &mut Vec<Option<u32>>,
        used_arrow: &mut Vec<bool>,
        used_term: &mut Vec<bool>,
    ) -> bool {
        if i == t1.len() {
            return true;
        }
        let (w, c) = &t1[i];
        for j in 0..t2.len() {
            if used_term[j] || t2[j].1 != *c || t2[j].0.len() != w.len() {
                continue;
            }
            for rot in 0..w.len() {
                let mut fresh = Vec::new();
                let mut ok = true;
                for (k, l) in w.iter().enumerate() {
                    let m = t2[j].0[(k + rot) % w.len()];
                    if l.inverse != m.inverse {
                        ok = false;
                        break;
                    }
                    match amap[l.arrow.0 as usize] {
                        Some(x) if x != m.arrow.0 => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            if used_arrow[m.arrow.0 as usize] {
                                ok = false;
                                break;
                            }
                            amap[l.arrow.0 as usize] = Some(m.arrow.0);
                            used_arrow[m.arrow.0 as usize] = true;
                            fresh.push(l.arrow.0 as usize);
                        }
                    }
                }
                if ok {
                    used_term[j] = true;
                    if go(i + 1, t1, t2, amap, used_arrow, used_term) {
                        return true;
                    }
                    used_term[j] = false;
                }
                for a in fresh {
                    used_arrow[amap[a].unwrap() as usize] = false;
                    amap[a] = None;
                }
            }
        }
        false
    }
    if !go(0, &t1, &t2, &mut amap, &mut used_arrow, &mut used_term) {
        return None;
    }
    let mut vmap: Vec<Option<VertexId>> = vec![None; q1.vertex_count()];
    let mut arrows = Vec::new();
    for a in q1.arrow_ids() {
        let b = crate::pathalg::ArrowId(amap[a.0 as usize]?);
        let (x, y) = (q1.arrow(a), q2.arrow(b));
        for (u, v) in [(x.src, y.src), (x.tgt, y.tgt)] {
            match vmap[u.0 as usize] {
                Some(old) if old != v => return None,
                _ => vmap[u.0 as usize] = Some(v),
            }
        }
        arrows.push((x.name.clone(), y.name.clone()));
    }
    let vertices: Vec<(u32, u32)> =
        q1.vertices().map(|v| vmap[v.0 as usize].map(|t| (q1.label(v), q2.label(t)))).collect::<Option<_>>()?;
    let targets: BTreeSet<u32> = vertices.iter().map(|p| p.1).collect();
    (targets.len() == vertices.len()).then_some(Relabeling { vertices, arrows })
}

/// Random connected bipartite map with the given number of edges.
pub fn random_tiling<R: rand::Rng>(rng: &mut R, edges: usize, max_vertices_per_colour: usize) -> Option<BraneTiling> {
    use rand::seq::SliceRandom;
    let nb = rng.gen_range(1..=max_vertices_per_colour.min(edges));
    let nw = rng.gen_range(1..=max_vertices_per_colour.min(edges));
    // every vertex gets at least one half-edge
    let assign = |rng: &mut R, nv: usize| -> Vec<usize> {
        let mut v: Vec<usize> = (0..nv).collect();
        while v.len() < edges {
            v.push(rng.gen_range(0..nv));
        }
        v.shuffle(rng);
        v
    };
    let bv = assign(rng, nb);
    let wv = assign(rng, nw);
    let ids: Vec<i64> = (0..2 * edges as i64).collect();
    let pairs: Vec<[i64; 2]> = (0..edges as i64).map(|i| [i, edges as i64 + i]).collect();
    let mut rotation = Vec::new();
    let mut colors = Vec::new();
    for (nv, owner, offset, col) in [(nb, &bv, 0, Color::Black), (nw, &wv, edges, Color::White)] {
        for v in 0..nv {
            let mut hs: Vec<i64> = (0..edges).filter(|&k| owner[k] == v).map(|k| (k + offset) as i64).collect();
            hs.shuffle(rng);
            rotation.push(hs);
            colors.push(col);
        }
    }
    let map = CombinatorialMap::new(&ids, &pairs, &rotation).ok()?;
    if !map.is_connected() {
        return None;
    }
    BraneTiling::new(map, colors).ok()
}
