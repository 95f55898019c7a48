//! Random quivers with potential for property checks.

use rand::Rng;

use super::{Coeff, Letter, Potential, Quiver, VertexId};

#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    pub max_vertices: u32,
    pub max_arrows: usize,
    pub max_term_len: usize,
    pub max_terms: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape { max_vertices: 4, max_arrows: 8, max_term_len: 6, max_terms: 6 }
    }
}

/// Random quiver (at least one loop, so cycles exist) and a random potential on it.
pub fn random_qpot<R: Rng>(rng: &mut R, shape: RandomShape) -> (Quiver, Potential) {
    let nv = rng.gen_range(1..=shape.max_vertices);
    let mut q = Quiver::with_vertices(1..=nv);
    let na = rng.gen_range(1..=shape.max_arrows);
    for k in 0..na {
        let s = rng.gen_range(1..=nv);
        let t = if k == 0 { s } else { rng.gen_range(1..=nv) };
        q.add_arrow_between(&format!("x{k}"), s, t, false).expect("fresh name");
    }
    let mut w = Potential::zero();
    let nterms = rng.gen_range(0..=shape.max_terms);
    for _ in 0..nterms {
        if let Some(letters) = random_cycle(rng, &q, shape.max_term_len) {
            let c: i64 = loop {
                let c = rng.gen_range(-3..=3);
                if c != 0 {
                    break c;
                }
            };
            let word = q.word(&letters).expect("walk is composable");
            w.add_cycle(&word, Coeff::from_integer(c.into())).expect("closed walk");
        }
    }
    (q, w)
}

/// Random closed walk of length `1..=max_len`, written right to left.
pub fn random_cycle<R: Rng>(rng: &mut R, q: &Quiver, max_len: usize) -> Option<Vec<Letter>> {
    for _ in 0..64 {
        let start = VertexId(rng.gen_range(0..q.vertex_count() as u32));
        let len = rng.gen_range(1..=max_len);
        let mut at = start;
        let mut walk = Vec::with_capacity(len);
        for _ in 0..len {
            let out: Vec<_> = q.arrow_ids().filter(|&a| q.arrow(a).src == at).collect();
            if out.is_empty() {
                break;
            }
            let a = out[rng.gen_range(0..out.len())];
            walk.push(Letter::fwd(a));
            at = q.arrow(a).tgt;
        }
        if walk.len() == len && at == start {
            walk.reverse();
            return Some(walk);
        }
    }
    None
}
