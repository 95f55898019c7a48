use std::cmp::Ordering;

use super::{ArrowId, VertexId};

/// One arrow or the formal inverse of a localized arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub arrow: ArrowId,
    pub inverse: bool,
}

impl Letter {
    pub fn fwd(arrow: ArrowId) -> Self {
        Letter { arrow, inverse: false }
    }

    pub fn inv(self) -> Self {
        Letter { arrow: self.arrow, inverse: !self.inverse }
    }

    fn cancels(self, other: Letter) -> bool {
        self.arrow == other.arrow && self.inverse != other.inverse
    }
}

/// A path in written order: the rightmost letter is traversed first.
///
/// Ordering is by length, then lexicographically by letters; the maximum is
/// the leading word used by reductions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    src: VertexId,
    tgt: VertexId,
    letters: Vec<Letter>,
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.src.cmp(&other.src))
            .then_with(|| self.tgt.cmp(&other.tgt))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free reduction of a letter sequence with a stack.
pub fn free_reduce_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last().is_some_and(|&top| top.cancels(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl Word {
    /// Caller guarantees composability.
    pub(crate) fn from_raw(src: VertexId, tgt: VertexId, letters: Vec<Letter>) -> Self {
        Word { src, tgt, letters }
    }

    pub fn constant(v: VertexId) -> Self {
        Word { src: v, tgt: v, letters: Vec::new() }
    }

    pub fn src(&self) -> VertexId {
        self.src
    }

    pub fn tgt(&self) -> VertexId {
        self.tgt
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

    pub fn is_constant(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.src == self.tgt
    }

    pub fn is_normal(&self) -> bool {
        self.letters.windows(2).all(|p| !p[0].cancels(p[1]))
    }

    pub fn normalized(mut self) -> Self {
        self.letters = free_reduce_letters(&self.letters);
        self
    }

    /// `self · other`, i.e. `other` first; `None` when the ends do not meet.
    pub fn concat(&self, other: &Word) -> Option<Word> {
        if self.src != other.tgt {
            return None;
        }
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last().is_some_and(|&top| top.cancels(l)) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Some(Word { src: other.src, tgt: self.tgt, letters })
    }

    /// Formal inverse; meaningful when every letter is localized.
    pub fn inverse(&self) -> Word {
        Word { src: self.tgt, tgt: self.src, letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    /// Number of occurrences of `arrow` with sign: +1 per letter, −1 per inverse.
    pub fn exponent_sum(&self, arrow: ArrowId) -> i64 {
        self.letters.iter().filter(|l| l.arrow == arrow).map(|l| if l.inverse { -1 } else { 1 }).sum()
    }

    pub fn contains_inverse_of(&self, arrow: ArrowId) -> bool {
        self.letters.iter().any(|l| l.arrow == arrow && l.inverse)
    }
}
