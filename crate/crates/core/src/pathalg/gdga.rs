use super::{cyclic_derivative, ArrowId, Element, Letter, PathError, Potential, Quiver, VertexId, Word};

/// Doubled quiver with vertex loops, degrees and differential on generators.
#[derive(Clone, Debug)]
pub struct GinzburgDga {
    pub quiver: Quiver,
    /// Degree of each arrow of `quiver`.
    pub degrees: Vec<i32>,
    /// Image of each arrow of `quiver`.
    pub differential: Vec<Element>,
    original_arrows: usize,
}

/// Result of [`check_d_squared`].
#[derive(Clone, Debug)]
pub struct DSquaredReport {
    pub holds: bool,
    /// First generator with `d(d(g)) ≠ 0`, and that value.
    pub witness: Option<(String, Element)>,
    /// Generators whose image is not homogeneous of degree `deg + 1`.
    pub degree_violations: Vec<String>,
}

impl GinzburgDga {
    pub fn star(&self, a: ArrowId) -> ArrowId {
        ArrowId(self.original_arrows as u32 + a.0)
    }

    pub fn vertex_loop(&self, v: VertexId) -> ArrowId {
        ArrowId(2 * self.original_arrows as u32 + v.0)
    }

    pub fn original_arrow_count(&self) -> usize {
        self.original_arrows
    }

    pub fn word_degree(&self, w: &Word) -> i32 {
        w.letters().iter().map(|l| self.degrees[l.arrow.0 as usize]).sum()
    }

    /// Extends the differential by the graded Leibniz rule.
    pub fn apply(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in x.iter() {
            let letters = w.letters();
            let mut sign_deg = 0i32;
            for i in 0..letters.len() {
                let d_i = &self.differential[letters[i].arrow.0 as usize];
                if !d_i.is_zero() {
                    let left = self.sub_word(w, 0, i);
                    let right = self.sub_word(w, i + 1, letters.len());
                    let term = Element::from_word(left).mul(d_i).mul(&Element::from_word(right));
                    let s = if sign_deg % 2 == 0 { c.clone() } else { -c.clone() };
                    out.add_assign(&term.scale(&s));
                }
                sign_deg += self.degrees[letters[i].arrow.0 as usize];
            }
        }
        out
    }

    fn sub_word(&self, w: &Word, from: usize, to: usize) -> Word {
        let letters = &w.letters()[from..to];
        // empty pieces sit at the vertex where the cut happens
        let v = if to < w.len() { self.quiver.letter_tgt(w.letters()[to]) } else { w.src() };
        self.quiver.word_at(letters, v).expect("subword of a path")
    }
}

/// Builds the dga: arrows `a`, then `a*` (degree −1), then loops `t_i` (degree −2).
pub fn ginzburg_dga(q: &Quiver, w: &Potential) -> Result<GinzburgDga, PathError> {
    if q.has_localized_arrows() {
        return Err(PathError::LocalizedQuiverUnsupported);
    }
    let m = q.arrow_count();
    let mut dq = Quiver::with_vertices(q.vertices().map(|v| q.label(v)));
    for a in q.arrows() {
        dq.add_arrow(&a.name, a.src, a.tgt, false)?;
    }
    for a in q.arrows() {
        dq.add_arrow(&format!("{}*", a.name), a.tgt, a.src, false)?;
    }
    for v in q.vertices() {
        dq.add_arrow(&format!("t{}", q.label(v)), v, v, false)?;
    }
    let mut degrees = vec![0; m];
    degrees.extend(std::iter::repeat_n(-1, m));
    degrees.extend(std::iter::repeat_n(-2, q.vertex_count()));

    let mut differential = vec![Element::zero(); m];
    for a in q.arrow_ids() {
        differential.push(cyclic_derivative(q, w, a)?);
    }
    for v in q.vertices() {
        let mut dt = Element::zero();
        for a in q.arrow_ids() {
            let fa = Element::from_word(dq.word(&[Letter::fwd(a)])?);
            let sa = Element::from_word(dq.word(&[Letter::fwd(ArrowId(m as u32 + a.0))])?);
            dt.add_assign(&fa.mul(&sa));
            dt.add_assign(&sa.mul(&fa).neg());
        }
        differential.push(dt.restrict(v, v));
    }
    Ok(GinzburgDga { quiver: dq, degrees, differential, original_arrows: m })
}

/// Checks `d∘d = 0` on every generator and that `d` raises degree by one.
pub fn check_d_squared(dga: &GinzburgDga) -> DSquaredReport {
    let mut witness = None;
    let mut degree_violations = Vec::new();
    for g in dga.quiver.arrow_ids() {
        let name = dga.quiver.arrow(g).name.clone();
        let dg = &dga.differential[g.0 as usize];
        let want = dga.degrees[g.0 as usize] + 1;
        if dg.words().any(|w| dga.word_degree(w) != want) {
            degree_violations.push(name.clone());
        }
        let ddg = dga.apply(dg);
        if !ddg.is_zero() && witness.is_none() {
            witness = Some((name, ddg));
        }
    }
    DSquaredReport { holds: witness.is_none() && degree_violations.is_empty(), witness, degree_violations }
}
