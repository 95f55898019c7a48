use std::collections::{BTreeSet, VecDeque};

use super::automorphism::TilingAutomorphism;
use super::refine::{face_period, name_new_edges};
use super::EquivError;
use crate::surfacemap::{BraneTiling, Color};

/// Tiling extended so that it carries a perfect matching.
#[derive(Clone, Debug)]
pub struct DimerOutcome {
    pub tiling: BraneTiling,
    pub phi: TilingAutomorphism,
    /// Edge indices of the matching.
    pub dimer: BTreeSet<usize>,
    pub added_vertices: usize,
    pub added_edges: usize,
}

fn require_full_face_orbits(t: &BraneTiling, phi: &TilingAutomorphism) -> Result<(), EquivError> {
    let face_of = t.map.face_index();
    for f in t.map.faces() {
        let d = face_period(phi, &face_of, f.boundary[0]);
        if d != phi.order() {
            return Err(EquivError::OrbitSizeViolation(format!(
                "a face has orbit length {d} under an automorphism of order {}; refine first",
                phi.order()
            )));
        }
    }
    Ok(())
}

/// Endpoints (black, white) of every edge.
fn edge_ends(t: &BraneTiling) -> Vec<(usize, usize)> {
    let idx = t.map.edge_index();
    let mut ends = vec![(usize::MAX, usize::MAX); t.map.edge_count()];
    for h in 0..t.map.half_edge_count() {
        let v = t.map.vertex_of(h);
        match t.color(v) {
            Color::Black => ends[idx[h]].0 = v,
            Color::White => ends[idx[h]].1 = v,
        }
    }
    ends
}

struct Matching {
    of_black: Vec<Option<usize>>,
    of_white: Vec<Option<(usize, usize)>>,
}

/// Maximum matching by repeated augmenting search over existing edges.
fn max_matching(t: &BraneTiling) -> Matching {
    let nv = t.vertex_count();
    let ends = edge_ends(t);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (e, &(b, w)) in ends.iter().enumerate() {
        adj[b].push((w, e));
    }
    let mut m = Matching { of_black: vec![None; nv], of_white: vec![None; nv] };
    fn augment(b: usize, adj: &[Vec<(usize, usize)>], seen: &mut [bool], m: &mut Matching) -> bool {
        for &(w, e) in &adj[b] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            let free = match m.of_white[w] {
                None => true,
                Some((b2, _)) => augment(b2, adj, seen, m),
            };
            if free {
                m.of_white[w] = Some((b, e));
                m.of_black[b] = Some(e);
                return true;
            }
        }
        false
    }
    for b in 0..nv {
        if t.color(b) == Color::Black && m.of_black[b].is_none() {
            let mut seen = vec![false; nv];
            augment(b, &adj, &mut seen, &mut m);
        }
    }
    m
}

/// First missing black–white pair on a cheapest alternating path, where a
/// missing pair costs one and may join any two vertices sharing a face.
fn first_missing_pair(t: &BraneTiling, m: &Matching) -> Option<(usize, usize, usize)> {
    let nv = t.vertex_count();
    let ends = edge_ends(t);
    let mut adjacent = vec![BTreeSet::new(); nv];
    for &(b, w) in &ends {
        adjacent[b].insert(w);
    }
    // (black, white, face) pairs sharing a face, first face wins
    let mut shared: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (fi, f) in t.map.faces().iter().enumerate() {
        let vs: BTreeSet<usize> = f.boundary.iter().map(|&h| t.map.vertex_of(h)).collect();
        for &b in vs.iter().filter(|&&v| t.color(v) == Color::Black) {
            for &w in vs.iter().filter(|&&v| t.color(v) == Color::White) {
                if !shared[b].iter().any(|&(x, _)| x == w) {
                    shared[b].push((w, fi));
                }
            }
        }
    }
    let inf = usize::MAX;
    let mut dist = vec![inf; nv];
    // predecessor of a black vertex: (previous black, white, missing pair face)
    let mut pred: Vec<Option<(usize, usize, Option<usize>)>> = vec![None; nv];
    let mut dq = VecDeque::new();
    for b in 0..nv {
        if t.color(b) == Color::Black && m.of_black[b].is_none() {
            dist[b] = 0;
            dq.push_back(b);
        }
    }
    let mut best: Option<(usize, usize, usize, Option<usize>)> = None; // (cost, black, white, face)
    let mut settled = vec![false; nv];
    while let Some(b) = dq.pop_front() {
        if settled[b] {
            continue;
        }
        settled[b] = true;
        if best.is_some_and(|x| x.0 <= dist[b]) {
            break;
        }
        for &(w, fi) in &shared[b] {
            let (c, face) = if adjacent[b].contains(&w) { (0, None) } else { (1, Some(fi)) };
            let d = dist[b] + c;
            match m.of_white[w] {
                None => {
                    if best.is_none_or(|x| d < x.0) {
                        best = Some((d, b, w, face));
                    }
                }
                Some((b2, _)) => {
                    if d < dist[b2] {
                        dist[b2] = d;
                        pred[b2] = Some((b, w, face));
                        if c == 0 {
                            dq.push_front(b2);
                        } else {
                            dq.push_back(b2);
                        }
                    }
                }
            }
        }
    }
    // walk back to the source; the last missing pair seen is the first on the path
    let (_, mut b, w, face) = best?;
    let mut first = face.map(|f| (b, w, f));
    while let Some((pb, pw, pf)) = pred[b] {
        if let Some(f) = pf {
            first = Some((pb, pw, f));
        }
        b = pb;
    }
    first
}

/// Adds `count` orbits of pendant vertices of colour `c`.
fn add_pendant_orbits(
    t: &mut BraneTiling,
    perm: &mut Vec<usize>,
    n: u32,
    c: Color,
    count: usize,
) -> Result<(), EquivError> {
    for _ in 0..count {
        let faces = t.map.faces();
        let h = faces[0]
            .boundary
            .iter()
            .copied()
            .find(|&h| t.color_of_half_edge(h) == c.opposite())
            .ok_or_else(|| EquivError::OrbitSizeViolation("face without a corner of the needed colour".into()))?;
        let old_edges = t.map.edge_count();
        let mut spokes = Vec::new();
        let mut x = h;
        for _ in 0..n {
            let (_, sp) = t.map.insert_star(&[x]);
            t.colors.push(c);
            spokes.push(sp[0]);
            x = perm[x];
        }
        name_new_edges(t, old_edges);
        perm.resize(t.map.half_edge_count(), usize::MAX);
        for k in 0..n as usize {
            let nk = (k + 1) % n as usize;
            perm[spokes[k].0] = spokes[nk].0;
            perm[spokes[k].1] = spokes[nk].1;
        }
    }
    Ok(())
}

/// Extends `t` by whole `φ`-orbits of vertices and edges until it has a perfect matching.
///
/// Requires every face orbit to have full length (see [`super::refine_tiling`]).
pub fn equivariant_dimer(t: &BraneTiling, phi: &TilingAutomorphism) -> Result<DimerOutcome, EquivError> {
    let n = phi.order();
    let blacks = t.colors.iter().filter(|&&c| c == Color::Black).count() as i64;
    let whites = t.colors.len() as i64 - blacks;
    let delta = blacks - whites;
    // additions come in orbits of size n, so the imbalance mod n never changes
    if delta % n as i64 != 0 {
        return Err(EquivError::Unbalanceable(delta));
    }
    require_full_face_orbits(t, phi)?;
    let mut t = t.clone();
    let mut perm = phi.perm().to_vec();
    let (v0, e0) = (t.vertex_count(), t.map.edge_count());
    let deficient = if delta > 0 { Color::White } else { Color::Black };
    add_pendant_orbits(&mut t, &mut perm, n, deficient, (delta.unsigned_abs() / n as u64) as usize)?;
    let cap = 4 * (t.vertex_count() + t.map.edge_count()) + 16;
    let mut rounds = 0;
    let matching = loop {
        let m = max_matching(&t);
        let unmatched = (0..t.vertex_count()).any(|b| t.color(b) == Color::Black && m.of_black[b].is_none());
        if !unmatched {
            break m;
        }
        rounds += 1;
        if rounds > cap {
            return Err(EquivError::NoChoiceFound("edge insertion did not reach a perfect matching".into()));
        }
        let (b, w, fi) = first_missing_pair(&t, &m)
            .ok_or_else(|| EquivError::NoChoiceFound("no alternating path through shared faces".into()))?;
        let face = &t.map.faces()[fi];
        let hb = *face.boundary.iter().find(|&&h| t.map.vertex_of(h) == b).expect("b lies on the face");
        let hw = *face.boundary.iter().find(|&&h| t.map.vertex_of(h) == w).expect("w lies on the face");
        let old_edges = t.map.edge_count();
        let mut news = Vec::new();
        let (mut xb, mut xw) = (hb, hw);
        for _ in 0..n {
            news.push(t.map.insert_edge(xb, xw));
            xb = perm[xb];
            xw = perm[xw];
        }
        name_new_edges(&mut t, old_edges);
        perm.resize(t.map.half_edge_count(), usize::MAX);
        for k in 0..n as usize {
            let nk = (k + 1) % n as usize;
            perm[news[k].0] = news[nk].0;
            perm[news[k].1] = news[nk].1;
        }
    };
    let dimer: BTreeSet<usize> = matching.of_black.iter().flatten().copied().collect();
    let phi = TilingAutomorphism::extended(&t, perm, n)?;
    Ok(DimerOutcome {
        added_vertices: t.vertex_count() - v0,
        added_edges: t.map.edge_count() - e0,
        tiling: t,
        phi,
        dimer,
    })
}

/// Every perfect matching (as edge sets), in lexicographic order of chosen
/// edges per black vertex, stopping after `limit`.
pub fn all_dimers(t: &BraneTiling, limit: usize) -> Vec<BTreeSet<usize>> {
    let ends = edge_ends(t);
    let blacks: Vec<usize> = (0..t.vertex_count()).filter(|&v| t.color(v) == Color::Black).collect();
    if blacks.len() * 2 != t.vertex_count() {
        return Vec::new();
    }
    let mut by_black: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t.vertex_count()];
    for (e, &(b, w)) in ends.iter().enumerate() {
        by_black[b].push((e, w));
    }
    let mut out = Vec::new();
    let mut used = vec![false; t.vertex_count()];
    let mut chosen = Vec::new();
    fn go(
        i: usize,
        blacks: &[usize],
        by_black: &[Vec<(usize, usize)>],
        used: &mut [bool],
        chosen: &mut Vec<usize>,
        out: &mut Vec<BTreeSet<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == blacks.len() {
            out.push(chosen.iter().copied().collect());
            return;
        }
        for &(e, w) in &by_black[blacks[i]] {
            if !used[w] {
                used[w] = true;
                chosen.push(e);
                go(i + 1, blacks, by_black, used, chosen, out, limit);
                chosen.pop();
                used[w] = false;
            }
        }
    }
    go(0, &blacks, &by_black, &mut used, &mut chosen, &mut out, limit);
    out
}
