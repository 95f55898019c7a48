use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Coeff, Word};

/// Finite ℚ-linear combination of normalized words; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<Word, Coeff>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_term(Coeff::one(), w)
    }

    pub fn from_term(c: Coeff, w: Word) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn add_term(&mut self, w: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w.normalized()) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing word order.
    pub fn iter(&self) -> std::collections::btree_map::Iter<'_, Word, Coeff> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Largest word (longest, then lexicographically last).
    pub fn leading(&self) -> Option<(&Word, &Coeff)> {
        self.terms.last_key_value()
    }

    pub fn scale(&self, c: &Coeff) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect() }
    }

    pub fn neg(&self) -> Element {
        Element { terms: self.terms.iter().map(|(w, v)| (w.clone(), -v.clone())).collect() }
    }

    pub fn add_assign(&mut self, other: &Element) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign(&other.neg());
        out
    }

    /// Path-algebra product; non-composable pairs contribute 0.
    pub fn mul(&self, other: &Element) -> Element {
        let mut out = Element::zero();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                if let Some(w) = u.concat(v) {
                    out.add_term(w, cu * cv);
                }
            }
        }
        out
    }

    pub fn mul_word_left(&self, u: &Word) -> Element {
        Element::from_word(u.clone()).mul(self)
    }

    pub fn mul_word_right(&self, v: &Word) -> Element {
        self.mul(&Element::from_word(v.clone()))
    }

    /// Terms whose words run from `src` to `tgt`.
    pub fn restrict(&self, src: super::VertexId, tgt: super::VertexId) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.src() == src && w.tgt() == tgt)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }
}

impl FromIterator<(Word, Coeff)> for Element {
    fn from_iter<T: IntoIterator<Item = (Word, Coeff)>>(iter: T) -> Self {
        let mut e = Element::zero();
        for (w, c) in iter {
            e.add_term(w, c);
        }
        e
    }
}
