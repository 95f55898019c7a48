use super::automorphism::TilingAutomorphism;
use super::EquivError;
use crate::surfacemap::{BraneTiling, Color};

/// Appends default names for edges created after `old_edges`, avoiding clashes.
pub(crate) fn name_new_edges(t: &mut BraneTiling, old_edges: usize) {
    if let Some(names) = &mut t.edge_names {
        let mut k = old_edges;
        while names.len() < t.map.edge_count() {
            let mut name = format!("x{k}");
            while names.contains(&name) {
                k += 1;
                name = format!("x{k}");
            }
            names.push(name);
            k += 1;
        }
    }
}

/// Smallest `d ≥ 1` with `φ^d` fixing the face through `h`.
pub(crate) fn face_period(phi: &TilingAutomorphism, face_of: &[usize], h: usize) -> u32 {
    let mut d = 1;
    let mut x = phi.apply(h);
    while face_of[x] != face_of[h] {
        x = phi.apply(x);
        d += 1;
    }
    d
}

/// Adds a white vertex inside every face whose orbit is shorter than the order of `φ`.
///
/// The new vertex is joined to each image of one black corner under the face
/// stabilizer, so afterwards every face orbit has full length.
pub fn refine_tiling(
    t: &BraneTiling,
    phi: &TilingAutomorphism,
) -> Result<(BraneTiling, TilingAutomorphism), EquivError> {
    let n = phi.order();
    let mut out = t.clone();
    let mut perm: Vec<usize> = phi.perm().to_vec();
    let faces = t.map.faces();
    let face_of = t.map.face_index();
    let mut done = vec![false; faces.len()];
    for (fi, face) in faces.iter().enumerate() {
        if done[fi] {
            continue;
        }
        let h = face.boundary[0];
        let d = face_period(phi, &face_of, h);
        for j in 0..d {
            done[face_of[phi.pow(h, j as i64)]] = true;
        }
        if d == n {
            continue;
        }
        // black corner of least vertex, then least half-edge
        let h0 = face
            .boundary
            .iter()
            .copied()
            .filter(|&x| t.color_of_half_edge(x) == Color::Black)
            .min_by_key(|&x| (t.map.vertex_of(x), x))
            .ok_or_else(|| EquivError::OrbitSizeViolation(format!("face {fi} has no black corner")))?;
        let m = (n / d) as usize;
        let pos = |x: usize| face.boundary.iter().position(|&y| y == x).expect("corner lies on the face");
        let mut corners: Vec<usize> = (0..m).map(|i| phi.pow(h0, (d as usize * i) as i64)).collect();
        let start = pos(h0);
        corners.sort_by_key(|&x| (pos(x) + face.boundary.len() - start) % face.boundary.len());
        corners.dedup();
        if corners.len() != m {
            return Err(EquivError::OrbitSizeViolation(format!(
                "stabilizer of face {fi} does not act freely on its corners"
            )));
        }
        // spokes[j][i]: spoke into the i-th corner of φ^j(face)
        let old_edges = out.map.edge_count();
        let mut spokes: Vec<Vec<(usize, usize)>> = Vec::with_capacity(d as usize);
        for j in 0..d {
            let cs: Vec<usize> = corners.iter().map(|&c| phi.pow(c, j as i64)).collect();
            let (_, sp) = out.map.insert_star(&cs);
            out.colors.push(Color::White);
            spokes.push(sp);
        }
        name_new_edges(&mut out, old_edges);
        perm.resize(out.map.half_edge_count(), usize::MAX);
        let wrap: Vec<usize> = corners
            .iter()
            .map(|&c| {
                let img = phi.pow(c, d as i64);
                corners.iter().position(|&y| y == img).expect("stabilizer permutes the corners")
            })
            .collect();
        for j in 0..d as usize {
            for i in 0..m {
                let (jn, in_) = if j + 1 < d as usize { (j + 1, i) } else { (0, wrap[i]) };
                perm[spokes[j][i].0] = spokes[jn][in_].0;
                perm[spokes[j][i].1] = spokes[jn][in_].1;
            }
        }
    }
    let phi2 = TilingAutomorphism::extended(&out, perm, n)?;
    Ok((out, phi2))
}
