use serde::{Deserialize, Serialize};

use super::{parse_coeff, Coeff, Element, Letter, PathError, Potential, Quiver, Word};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ArrowSpec {
    pub id: String,
    pub src: u32,
    pub tgt: u32,
    #[serde(default)]
    pub localized: bool,
}

/// Integer or `"p/q"` string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffSpec {
    Int(i64),
    Text(String),
}

impl CoeffSpec {
    pub fn value(&self) -> Result<Coeff, PathError> {
        match self {
            CoeffSpec::Int(n) => Ok(Coeff::from_integer((*n).into())),
            CoeffSpec::Text(s) => parse_coeff(s),
        }
    }

    pub fn from_coeff(c: &Coeff) -> CoeffSpec {
        if c.is_integer() {
            if let Ok(n) = i64::try_from(c.numer().clone()) {
                return CoeffSpec::Int(n);
            }
        }
        CoeffSpec::Text(c.to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermSpec {
    pub coeff: CoeffSpec,
    /// `[arrow, exponent]` pairs in written order.
    pub word: Vec<(String, i64)>,
    /// Needed only for constant paths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<u32>,
}

/// Quiver with potential on disk.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QpotFile {
    pub vertices: Vec<u32>,
    pub arrows: Vec<ArrowSpec>,
    #[serde(default)]
    pub potential: Vec<TermSpec>,
}

/// Linear combination of paths on disk.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ElementFile {
    pub terms: Vec<TermSpec>,
}

pub fn quiver_from_specs(vertices: &[u32], arrows: &[ArrowSpec]) -> Result<Quiver, PathError> {
    let mut q = Quiver::new();
    for &v in vertices {
        if q.vertex_by_label(v).is_some() {
            return Err(PathError::Parse(format!("duplicate vertex {v}")));
        }
        q.add_vertex(v);
    }
    for a in arrows {
        q.add_arrow_between(&a.id, a.src, a.tgt, a.localized)?;
    }
    Ok(q)
}

pub fn letters_from_spec(q: &Quiver, word: &[(String, i64)]) -> Result<Vec<Letter>, PathError> {
    let mut out = Vec::new();
    for (name, exp) in word {
        let id = q.arrow_id(name)?;
        if *exp == 0 {
            return Err(PathError::Parse(format!("zero exponent on {name}")));
        }
        for _ in 0..exp.unsigned_abs() {
            out.push(Letter { arrow: id, inverse: *exp < 0 });
        }
    }
    Ok(out)
}

pub fn letters_to_spec(q: &Quiver, letters: &[Letter]) -> Vec<(String, i64)> {
    let mut out: Vec<(String, i64)> = Vec::new();
    for l in letters {
        let name = q.arrow(l.arrow).name.clone();
        let e = if l.inverse { -1 } else { 1 };
        match out.last_mut() {
            Some((n, x)) if *n == name && x.signum() == e => *x += e,
            _ => out.push((name, e)),
        }
    }
    out
}

fn word_from_term(q: &Quiver, t: &TermSpec) -> Result<Word, PathError> {
    let letters = letters_from_spec(q, &t.word)?;
    let w = if letters.is_empty() {
        let label = t.vertex.ok_or_else(|| PathError::Parse("constant path needs \"vertex\"".into()))?;
        let v = q.vertex_by_label(label).ok_or(PathError::UnknownVertex(label))?;
        Word::constant(v)
    } else {
        q.word(&letters)?
    };
    Ok(w.normalized())
}

pub fn parse_qpot(text: &str) -> Result<(Quiver, Potential), PathError> {
    let file: QpotFile = serde_json::from_str(text).map_err(|e| PathError::Parse(e.to_string()))?;
    qpot_from_file(&file)
}

pub fn qpot_from_file(file: &QpotFile) -> Result<(Quiver, Potential), PathError> {
    let q = quiver_from_specs(&file.vertices, &file.arrows)?;
    let mut w = Potential::zero();
    for t in &file.potential {
        let word = word_from_term(&q, t)?;
        w.add_cycle(&word, t.coeff.value()?)?;
    }
    Ok((q, w))
}

pub fn qpot_to_file(q: &Quiver, w: &Potential) -> QpotFile {
    QpotFile {
        vertices: q.vertices().map(|v| q.label(v)).collect(),
        arrows: q
            .arrows()
            .iter()
            .map(|a| ArrowSpec { id: a.name.clone(), src: q.label(a.src), tgt: q.label(a.tgt), localized: a.localized })
            .collect(),
        potential: w
            .iter()
            .map(|(cw, c)| TermSpec {
                coeff: CoeffSpec::from_coeff(c),
                word: letters_to_spec(q, cw.letters()),
                vertex: None,
            })
            .collect(),
    }
}

pub fn parse_element(q: &Quiver, text: &str) -> Result<Element, PathError> {
    let file: ElementFile = serde_json::from_str(text).map_err(|e| PathError::Parse(e.to_string()))?;
    let mut x = Element::zero();
    for t in &file.terms {
        x.add_term(word_from_term(q, t)?, t.coeff.value()?);
    }
    Ok(x)
}

pub fn element_to_file(q: &Quiver, x: &Element) -> ElementFile {
    ElementFile {
        terms: x
            .iter()
            .map(|(w, c)| TermSpec {
                coeff: CoeffSpec::from_coeff(c),
                word: letters_to_spec(q, w.letters()),
                vertex: w.is_constant().then(|| q.label(w.src())),
            })
            .collect(),
    }
}
