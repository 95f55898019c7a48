use std::collections::HashMap;

use num_traits::{One, Zero};

use super::{Coeff, Element, Letter, Quiver, Word};

/// Outcome of [`ideal_reduce`]. `Unknown` is not a refutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Zero { rounds: usize },
    Unknown { residual: Element, rounds: usize },
}

impl Reduction {
    pub fn is_zero(&self) -> bool {
        matches!(self, Reduction::Zero { .. })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ReduceOptions {
    /// Maximum multiplier length `|u| + |v|` in translates `u·R·v`.
    pub step_bound: usize,
    /// Stop widening once this many translates have been generated.
    pub max_translates: usize,
}

impl ReduceOptions {
    pub fn new(step_bound: usize) -> Self {
        ReduceOptions { step_bound, max_translates: 20_000 }
    }
}

/// Bounded ideal-membership evidence.
///
/// Round `k` adds the translates `u·R·v` with `|u| + |v| = k` to a row-echelon
/// basis keyed by leading word (longest, then lexicographically last), and
/// rewrites `x` by replacing leading words with the rest of their row.
pub fn ideal_reduce(q: &Quiver, x: &Element, relations: &[Element], step_bound: usize) -> Reduction {
    ideal_reduce_with(q, x, relations, ReduceOptions::new(step_bound))
}

pub fn ideal_reduce_with(q: &Quiver, x: &Element, relations: &[Element], opts: ReduceOptions) -> Reduction {
    let mut basis = Echelon::default();
    let mut by_len: Vec<Vec<Word>> = vec![q.vertices().map(Word::constant).collect()];
    let mut generated = 0usize;
    let mut residual = x.clone();
    for round in 0..=opts.step_bound {
        while by_len.len() <= round {
            let next = extend_left(q, by_len.last().unwrap());
            by_len.push(next);
        }
        let mut saturated = false;
        'outer: for i in 0..=round {
            for u in &by_len[i] {
                for v in &by_len[round - i] {
                    for r in relations {
                        let row = r.mul_word_left(u).mul_word_right(v);
                        generated += 1;
                        if !row.is_zero() {
                            basis.insert(row);
                        }
                        if generated >= opts.max_translates {
                            saturated = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        residual = basis.reduce(&residual);
        if residual.is_zero() {
            return Reduction::Zero { rounds: round };
        }
        if saturated {
            return Reduction::Unknown { residual, rounds: round };
        }
    }
    Reduction::Unknown { residual, rounds: opts.step_bound }
}

fn extend_left(q: &Quiver, words: &[Word]) -> Vec<Word> {
    let mut letters = Vec::new();
    for a in q.arrow_ids() {
        letters.push(Letter::fwd(a));
        if q.arrow(a).localized {
            letters.push(Letter::fwd(a).inv());
        }
    }
    let mut out = Vec::new();
    for w in words {
        for &l in &letters {
            if q.letter_src(l) != w.tgt() {
                continue;
            }
            if w.letters().first().is_some_and(|&f| f == l.inv()) {
                continue;
            }
            let lw = q.word(&[l]).expect("single letter");
            out.push(lw.concat(w).expect("composable by construction"));
        }
    }
    out
}

#[derive(Default)]
struct Echelon {
    rows: HashMap<Word, Element>,
}

impl Echelon {
    fn reduce(&self, x: &Element) -> Element {
        let mut cur = x.clone();
        loop {
            let hit = cur.iter().rev().find(|(w, _)| self.rows.contains_key(*w)).map(|(w, c)| (w.clone(), c.clone()));
            let Some((w, c)) = hit else { return cur };
            cur = cur.sub(&self.rows[&w].scale(&c));
        }
    }

    fn insert(&mut self, row: Element) {
        let r = self.reduce(&row);
        let Some((lead, c)) = r.leading().map(|(w, c)| (w.clone(), c.clone())) else {
            return;
        };
        debug_assert!(!c.is_zero());
        let normed = r.scale(&(Coeff::one() / c));
        self.rows.insert(lead, normed);
    }
}
