use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::word::free_reduce_letters;
use super::{ArrowId, Coeff, Element, Letter, PathError, Quiver, Word};

/// Cyclically reduced closed word stored in its lexicographically least rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    /// Reduces freely and cyclically, then rotates to the least rotation.
    pub fn canonical(letters: &[Letter]) -> CyclicWord {
        let mut w = free_reduce_letters(letters);
        while w.len() >= 2 {
            let (f, l) = (w[0], w[w.len() - 1]);
            if f.arrow == l.arrow && f.inverse != l.inverse {
                w.remove(w.len() - 1);
                w.remove(0);
            } else {
                break;
            }
        }
        let best = least_rotation(&w);
        w.rotate_left(best);
        CyclicWord { letters: w }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The canonical rotation read as a closed path.
    pub fn as_word(&self, q: &Quiver) -> Word {
        let v = q.letter_src(*self.letters.last().expect("cyclic words are non-empty"));
        q.word_at(&self.letters, v).expect("cyclic words are composable")
    }

    /// All rotations, starting with the canonical one.
    pub fn rotations(&self) -> impl Iterator<Item = Vec<Letter>> + '_ {
        (0..self.letters.len()).map(move |k| {
            let mut r = self.letters.clone();
            r.rotate_left(k);
            r
        })
    }
}

/// Index of the lexicographically least rotation (quadratic; words are short).
pub fn least_rotation<T: Ord>(w: &[T]) -> usize {
    let n = w.len();
    let mut best = 0;
    for k in 1..n {
        let cand = (0..n).map(|i| &w[(k + i) % n]);
        let cur = (0..n).map(|i| &w[(best + i) % n]);
        if cand.lt(cur) {
            best = k;
        }
    }
    best
}

/// Linear combination of cyclic words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Potential {
    terms: BTreeMap<CyclicWord, Coeff>,
}

impl Potential {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Adds `c` times the cycle class of `w`.
    pub fn add_cycle(&mut self, w: &Word, c: Coeff) -> Result<(), PathError> {
        if !w.is_closed() {
            return Err(PathError::NotClosed(format!("{:?}", w.letters())));
        }
        let cw = CyclicWord::canonical(w.letters());
        if cw.is_empty() {
            return Err(PathError::EmptyCycle);
        }
        self.add_cyclic(cw, c);
        Ok(())
    }

    pub fn add_cyclic(&mut self, cw: CyclicWord, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(cw.clone()).or_insert_with(Coeff::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&cw);
        }
    }

    /// Parses terms like `[(1, "abfjie"), (-1, "agic")]`.
    pub fn from_strs(q: &Quiver, terms: &[(i64, &str)]) -> Result<Potential, PathError> {
        let mut p = Potential::zero();
        for &(c, s) in terms {
            p.add_cycle(&q.parse_word(s)?, Coeff::from_integer(c.into()))?;
        }
        Ok(p)
    }

    pub fn iter(&self) -> std::collections::btree_map::Iter<'_, CyclicWord, Coeff> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, cw: &CyclicWord) -> Coeff {
        self.terms.get(cw).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add(&self, other: &Potential) -> Potential {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_cyclic(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Potential {
        let mut out = Potential::zero();
        for (w, v) in &self.terms {
            out.add_cyclic(w.clone(), v * c);
        }
        out
    }

    pub fn without(&self, cw: &CyclicWord) -> Potential {
        let mut out = self.clone();
        out.terms.remove(cw);
        out
    }

    pub fn fmt(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c < &Coeff::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                s.push_str(&mag.to_string());
            }
            s.push_str(&q.fmt_letters(w.letters()));
        }
        s
    }
}

/// Rotate each occurrence of `a` to the front, delete it, and sum.
///
/// Refuses when `a⁻¹` occurs in `w`.
pub fn cyclic_derivative(q: &Quiver, w: &Potential, a: ArrowId) -> Result<Element, PathError> {
    if a.0 as usize >= q.arrow_count() {
        return Err(PathError::UnknownArrow(format!("#{}", a.0)));
    }
    let arrow = q.arrow(a);
    let mut out = Element::zero();
    for (cw, c) in w.iter() {
        let letters = cw.letters();
        if letters.iter().any(|l| l.arrow == a && l.inverse) {
            return Err(PathError::MixedInverse(arrow.name.clone()));
        }
        for k in 0..letters.len() {
            if letters[k] != Letter::fwd(a) {
                continue;
            }
            let mut rest: Vec<Letter> = letters[k + 1..].to_vec();
            rest.extend_from_slice(&letters[..k]);
            let word = q.word_at(&rest, arrow.tgt)?;
            out.add_term(word, c.clone());
        }
    }
    Ok(out)
}

/// `∂W/∂a` for every arrow, in arrow order.
pub fn jacobi_relations(q: &Quiver, w: &Potential) -> Result<Vec<(ArrowId, Element)>, PathError> {
    q.arrow_ids().map(|a| Ok((a, cyclic_derivative(q, w, a)?))).collect()
}

/// `Σ_a (a·∂W/∂a − ∂W/∂a·a)`; vanishes identically.
pub fn commutator_sum(q: &Quiver, w: &Potential) -> Result<Element, PathError> {
    let mut total = Element::zero();
    for a in q.arrow_ids() {
        let d = cyclic_derivative(q, w, a)?;
        let aw = Element::from_word(q.word(&[Letter::fwd(a)])?);
        total.add_assign(&aw.mul(&d));
        total.add_assign(&d.mul(&aw).neg());
    }
    Ok(total)
}

pub fn coeff(n: i64) -> Coeff {
    Coeff::from_integer(n.into())
}

pub fn parse_coeff(s: &str) -> Result<Coeff, PathError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = num.parse().map_err(|_| PathError::Parse(format!("bad coefficient '{s}'")))?;
    let d: num_bigint::BigInt = den.parse().map_err(|_| PathError::Parse(format!("bad coefficient '{s}'")))?;
    if d.is_zero() {
        return Err(PathError::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(Coeff::new(n, d))
}
