use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Letter, PathError, Word};

/// Index of a vertex inside a [`Quiver`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Index of an arrow inside a [`Quiver`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: VertexId,
    pub tgt: VertexId,
    /// Formally invertible arrow.
    pub localized: bool,
}

/// Finite quiver with named arrows and integer-labelled vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Quiver {
    vertex_labels: Vec<u32>,
    arrows: Vec<Arrow>,
    by_name: HashMap<String, ArrowId>,
}

impl Quiver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(labels: impl IntoIterator<Item = u32>) -> Self {
        let mut q = Self::new();
        for l in labels {
            q.add_vertex(l);
        }
        q
    }

    /// Adds a vertex, or returns the existing one with the same label.
    pub fn add_vertex(&mut self, label: u32) -> VertexId {
        if let Some(v) = self.vertex_by_label(label) {
            return v;
        }
        self.vertex_labels.push(label);
        VertexId(self.vertex_labels.len() as u32 - 1)
    }

    pub fn add_arrow(
        &mut self,
        name: &str,
        src: VertexId,
        tgt: VertexId,
        localized: bool,
    ) -> Result<ArrowId, PathError> {
        if self.by_name.contains_key(name) {
            return Err(PathError::DuplicateArrow(name.to_string()));
        }
        for v in [src, tgt] {
            if v.0 as usize >= self.vertex_labels.len() {
                return Err(PathError::UnknownVertex(v.0));
            }
        }
        let id = ArrowId(self.arrows.len() as u32);
        self.arrows.push(Arrow { name: name.to_string(), src, tgt, localized });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Convenience for tests and fixtures: vertices by label.
    pub fn add_arrow_between(&mut self, name: &str, src: u32, tgt: u32, localized: bool) -> Result<ArrowId, PathError> {
        let s = self.vertex_by_label(src).ok_or(PathError::UnknownVertex(src))?;
        let t = self.vertex_by_label(tgt).ok_or(PathError::UnknownVertex(tgt))?;
        self.add_arrow(name, s, t, localized)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_labels.len() as u32).map(VertexId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len() as u32).map(ArrowId)
    }

    pub fn arrow(&self, id: ArrowId) -> &Arrow {
        &self.arrows[id.0 as usize]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_id(&self, name: &str) -> Result<ArrowId, PathError> {
        self.by_name.get(name).copied().ok_or_else(|| PathError::UnknownArrow(name.to_string()))
    }

    pub fn label(&self, v: VertexId) -> u32 {
        self.vertex_labels[v.0 as usize]
    }

    pub fn vertex_by_label(&self, label: u32) -> Option<VertexId> {
        self.vertex_labels.iter().position(|&l| l == label).map(|i| VertexId(i as u32))
    }

    pub fn set_localized(&mut self, id: ArrowId, localized: bool) {
        self.arrows[id.0 as usize].localized = localized;
    }

    /// Copy with every arrow marked invertible.
    pub fn localized_everywhere(&self) -> Quiver {
        let mut q = self.clone();
        for a in &mut q.arrows {
            a.localized = true;
        }
        q
    }

    pub fn has_localized_arrows(&self) -> bool {
        self.arrows.iter().any(|a| a.localized)
    }

    pub fn letter_src(&self, l: Letter) -> VertexId {
        let a = self.arrow(l.arrow);
        if l.inverse {
            a.tgt
        } else {
            a.src
        }
    }

    pub fn letter_tgt(&self, l: Letter) -> VertexId {
        let a = self.arrow(l.arrow);
        if l.inverse {
            a.src
        } else {
            a.tgt
        }
    }

    /// Builds a normalized word from letters in written order (leftmost applied last).
    pub fn word(&self, letters: &[Letter]) -> Result<Word, PathError> {
        let Some(last) = letters.last() else {
            return Err(PathError::Parse("empty word needs a vertex".into()));
        };
        self.word_at(letters, self.letter_src(*last))
    }

    /// Like [`Quiver::word`], but an empty letter list yields the constant path at `vertex`.
    pub fn word_at(&self, letters: &[Letter], vertex: VertexId) -> Result<Word, PathError> {
        for l in letters {
            if l.arrow.0 as usize >= self.arrows.len() {
                return Err(PathError::UnknownArrow(format!("#{}", l.arrow.0)));
            }
            if l.inverse && !self.arrow(l.arrow).localized {
                return Err(PathError::InverseOfNonLocalized(self.arrow(l.arrow).name.clone()));
            }
        }
        for pair in letters.windows(2) {
            if self.letter_src(pair[0]) != self.letter_tgt(pair[1]) {
                return Err(PathError::NonComposable(format!(
                    "{} after {}",
                    self.fmt_letter(pair[0]),
                    self.fmt_letter(pair[1])
                )));
            }
        }
        if let Some(last) = letters.last() {
            if self.letter_src(*last) != vertex {
                return Err(PathError::NonComposable(format!("word does not start at vertex {}", self.label(vertex))));
            }
        }
        let tgt = letters.first().map(|l| self.letter_tgt(*l)).unwrap_or(vertex);
        Ok(Word::from_raw(vertex, tgt, letters.to_vec()))
    }

    pub fn constant(&self, v: VertexId) -> Word {
        Word::constant(v)
    }

    /// Parses `"abreabre"`, `"r^-1 a r"` or `"x1 x2^-1"`.
    ///
    /// Without whitespace the longest arrow-name prefix is taken greedily.
    /// `^k` repeats a letter, `^-k` repeats its inverse.
    pub fn parse_letters(&self, s: &str) -> Result<Vec<Letter>, PathError> {
        let mut out = Vec::new();
        let tokens: Vec<&str> =
            if s.split_whitespace().count() > 1 { s.split_whitespace().collect() } else { vec![s.trim()] };
        for tok in tokens {
            let mut rest = tok;
            while !rest.is_empty() {
                let name = self
                    .by_name
                    .keys()
                    .filter(|n| rest.starts_with(n.as_str()))
                    .max_by_key(|n| n.len())
                    .ok_or_else(|| PathError::Parse(format!("no arrow name at '{rest}'")))?;
                let id = self.by_name[name];
                rest = &rest[name.len()..];
                let mut exp: i64 = 1;
                if let Some(r) = rest.strip_prefix('^') {
                    let end = r
                        .char_indices()
                        .find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && c == '-')))
                        .map(|(i, _)| i)
                        .unwrap_or(r.len());
                    exp = r[..end].parse().map_err(|_| PathError::Parse(format!("bad exponent in '{tok}'")))?;
                    rest = &r[end..];
                }
                if exp == 0 {
                    return Err(PathError::Parse(format!("zero exponent in '{tok}'")));
                }
                for _ in 0..exp.unsigned_abs() {
                    out.push(Letter { arrow: id, inverse: exp < 0 });
                }
            }
        }
        Ok(out)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word, PathError> {
        let letters = self.parse_letters(s)?;
        self.word(&letters).map(|w| w.normalized())
    }

    pub fn fmt_letter(&self, l: Letter) -> String {
        let name = &self.arrow(l.arrow).name;
        if l.inverse {
            format!("{name}^-1")
        } else {
            name.clone()
        }
    }

    fn spaced(&self) -> bool {
        self.arrows.iter().any(|a| a.name.chars().count() != 1)
    }

    pub fn fmt_letters(&self, letters: &[Letter]) -> String {
        let sep = if self.spaced() { " " } else { "" };
        let mut s = String::new();
        for (i, l) in letters.iter().enumerate() {
            if i > 0 {
                s.push_str(sep);
            }
            s.push_str(&self.fmt_letter(*l));
            if l.inverse && sep.is_empty() && i + 1 < letters.len() {
                // keep "a^-1b" readable
                s.push(' ');
            }
        }
        s
    }

    pub fn fmt_word(&self, w: &Word) -> String {
        if w.is_constant() {
            format!("e{}", self.label(w.src()))
        } else {
            self.fmt_letters(w.letters())
        }
    }

    pub fn fmt_element(&self, x: &super::Element) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        // largest words first reads more naturally
        for (i, (w, c)) in x.iter().rev().enumerate() {
            let neg = c < &super::Coeff::from_integer(0.into());
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mag != super::Coeff::from_integer(1.into()) {
                let _ = write!(s, "{mag}");
            }
            s.push_str(&self.fmt_word(w));
        }
        s
    }
}
