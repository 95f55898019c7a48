//! The map from the orbit quiver into matrices over `π₁ ⋊ ℤ`, and the check
//! that it kills every derivative relation of a transported potential.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::group::{self, GWord, PhiAction, SemidirectElement, SurfacePresentation};
use super::PresentationError;
use crate::equivariant::{word_degree, xi_embed, SemidirectQuiver};
use crate::pathalg::{cyclic_derivative, ArrowId, Coeff, Letter, Potential, Quiver, VertexId, Word};

/// `E_{row,col}` with group part `(loop, k)`; `loop` is a closed word at the
/// basepoint in the original quiver with every arrow inverted formally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixUnitElement {
    pub row: VertexId,
    pub col: VertexId,
    pub loop_word: Word,
    pub k: i64,
    pub coeff: Coeff,
}

/// Everything `Ψ` depends on besides the word: basepoint, tree, tree paths and
/// face boundaries of the original quiver.
#[derive(Clone, Debug)]
pub struct PsiContext {
    pub ctx: SemidirectQuiver,
    /// Original quiver with every arrow localized.
    pub ambient: Quiver,
    pub basepoint: VertexId,
    pub tree: Vec<ArrowId>,
    /// Tree path from the basepoint to each vertex.
    paths: Vec<Word>,
    /// `t_{φ(bp)}`.
    gamma: Word,
    /// Arrows set to 1: the tree, then arrows forced trivial by a one-letter face.
    trivial: BTreeSet<ArrowId>,
    /// Contracted face boundaries, cyclically reduced and nonempty.
    faces: Vec<GWord>,
    face_rotations: Vec<GWord>,
}

fn arrow_letter(l: Letter) -> i32 {
    let x = l.arrow.0 as i32 + 1;
    if l.inverse {
        -x
    } else {
        x
    }
}

fn letter_of(x: i32) -> Letter {
    Letter { arrow: ArrowId(x.unsigned_abs() - 1), inverse: x < 0 }
}

impl PsiContext {
    /// `basepoint` defaults to the lowest vertex touching an iso arrow, `tree`
    /// to a breadth-first tree of degree-0 arrows taken in id order.
    pub fn new(
        ctx: &SemidirectQuiver,
        faces: &Potential,
        basepoint: Option<VertexId>,
        tree: Option<&[ArrowId]>,
    ) -> Result<Self, PresentationError> {
        let q = &ctx.original;
        let ambient = q.localized_everywhere();
        let basepoint = match basepoint {
            Some(v) if (v.0 as usize) < q.vertex_count() => v,
            Some(v) => return Err(PresentationError::NotInTreeClosure(format!("no vertex #{}", v.0))),
            None => ctx
                .quiver
                .vertices()
                .find(|&v| {
                    ctx.iso_arrows().any(|r| {
                        let a = ctx.quiver.arrow(r);
                        a.src == v || a.tgt == v
                    })
                })
                .unwrap_or(VertexId(0)),
        };
        let degree_zero = |a: ArrowId| -> Result<bool, PresentationError> {
            let img = xi_embed(ctx, &q.word(&[Letter::fwd(a)])?)?;
            Ok(word_degree(ctx, &img) == 0)
        };
        let tree: Vec<ArrowId> = match tree {
            Some(t) => {
                for &a in t {
                    if !degree_zero(a)? {
                        return Err(PresentationError::BadTree(format!("{} does not have degree 0", q.arrow(a).name)));
                    }
                }
                t.to_vec()
            }
            None => {
                let mut seen = vec![false; q.vertex_count()];
                seen[basepoint.0 as usize] = true;
                let mut queue = VecDeque::from([basepoint]);
                let mut picked = Vec::new();
                while let Some(v) = queue.pop_front() {
                    for a in q.arrow_ids() {
                        let arr = q.arrow(a);
                        let other = if arr.src == v {
                            arr.tgt
                        } else if arr.tgt == v {
                            arr.src
                        } else {
                            continue;
                        };
                        if !seen[other.0 as usize] && degree_zero(a)? {
                            seen[other.0 as usize] = true;
                            picked.push(a);
                            queue.push_back(other);
                        }
                    }
                }
                picked
            }
        };
        let paths = tree_paths(&ambient, basepoint, &tree)?;
        let gamma = paths[ctx.phi.vertex(basepoint).0 as usize].clone();

        let mut trivial: BTreeSet<ArrowId> = tree.iter().copied().collect();
        let contract = |w: &[Letter], trivial: &BTreeSet<ArrowId>| -> GWord {
            group::cyclic_reduce(
                &w.iter().filter(|l| !trivial.contains(&l.arrow)).map(|&l| arrow_letter(l)).collect::<Vec<_>>(),
            )
        };
        loop {
            let forced: Vec<ArrowId> = faces
                .iter()
                .map(|(cw, _)| contract(cw.letters(), &trivial))
                .filter(|w| w.len() == 1)
                .map(|w| letter_of(w[0]).arrow)
                .filter(|a| !trivial.contains(a))
                .collect();
            if forced.is_empty() {
                break;
            }
            trivial.extend(forced);
        }
        let mut face_words: Vec<GWord> = Vec::new();
        for (cw, _) in faces.iter() {
            let w = contract(cw.letters(), &trivial);
            if !w.is_empty() && !face_words.contains(&w) {
                face_words.push(w);
            }
        }
        let mut face_rotations = Vec::new();
        for f in &face_words {
            for base in [f.clone(), group::inverse(f)] {
                for s in 0..base.len() {
                    let rot: GWord = base[s..].iter().chain(&base[..s]).copied().collect();
                    if !face_rotations.contains(&rot) {
                        face_rotations.push(rot);
                    }
                }
            }
        }
        Ok(PsiContext {
            ctx: ctx.clone(),
            ambient,
            basepoint,
            tree,
            paths,
            gamma,
            trivial,
            faces: face_words,
            face_rotations,
        })
    }

    /// Tree path `t_v`.
    pub fn tree_path(&self, v: VertexId) -> &Word {
        &self.paths[v.0 as usize]
    }

    pub fn correction(&self) -> &Word {
        &self.gamma
    }

    /// Arrows sent to 1 by contraction.
    pub fn trivial_arrows(&self) -> &BTreeSet<ArrowId> {
        &self.trivial
    }

    /// Contracted face boundaries in the free group on the remaining arrows.
    pub fn face_words(&self) -> &[GWord] {
        &self.faces
    }

    fn cat(&self, parts: &[&Word]) -> Word {
        let mut it = parts.iter().rev();
        let first = (*it.next().expect("nonempty")).clone();
        it.fold(first, |acc, w| w.concat(&acc).expect("composable by construction"))
    }

    /// `φ̂(β) = γ⁻¹ φ(β) γ` on loops at the basepoint, and its powers.
    pub fn phi_hat(&self, beta: &Word, k: i64) -> Word {
        let mut w = beta.clone();
        let inv_gamma = self.gamma.inverse();
        if k >= 0 {
            for _ in 0..k {
                let img = self.ctx.phi.word_pow(&self.ambient, &w, 1);
                w = self.cat(&[&inv_gamma, &img, &self.gamma]);
            }
        } else {
            for _ in 0..-k {
                let inner = self.cat(&[&self.gamma, &w, &inv_gamma]);
                w = self.ctx.phi.word_pow(&self.ambient, &inner, -1);
            }
        }
        w
    }

    /// Contracted group word of a loop.
    pub fn contract(&self, w: &Word) -> GWord {
        group::free_reduce(
            &w.letters()
                .iter()
                .filter(|l| !self.trivial.contains(&l.arrow))
                .map(|&l| arrow_letter(l))
                .collect::<Vec<_>>(),
        )
    }

    pub fn fmt_group(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let letters: Vec<Letter> = w.iter().map(|&x| letter_of(x)).collect();
        self.ambient.fmt_letters(&letters)
    }

    fn unit(&self, row: VertexId, col: VertexId, loop_word: Word, k: i64) -> MatrixUnitElement {
        MatrixUnitElement { row, col, loop_word, k, coeff: Coeff::one() }
    }

    /// `E(β,m)·E(α,k) = E(φ̂^k(β)·α, m+k)`; `None` when the matrix units do not meet.
    pub fn multiply(&self, x: &MatrixUnitElement, y: &MatrixUnitElement) -> Option<MatrixUnitElement> {
        if x.col != y.row {
            return None;
        }
        let moved = self.phi_hat(&x.loop_word, y.k);
        Some(MatrixUnitElement {
            row: x.row,
            col: y.col,
            loop_word: moved.concat(&y.loop_word).expect("loops at the basepoint"),
            k: x.k + y.k,
            coeff: &x.coeff * &y.coeff,
        })
    }

    fn letter_image(&self, l: Letter) -> Result<MatrixUnitElement, PresentationError> {
        let qp = &self.ctx.quiver;
        let arr = qp.arrow(l.arrow);
        let fwd = if self.ctx.is_iso(l.arrow) {
            let (o, s) = self.ctx.position(arr.src);
            let chain = &self.ctx.orbit_chains()[o];
            let (from, to) = (chain[s], chain[s + 1]);
            let back = self.ctx.phi.word_pow(&self.ambient, &self.paths[to.0 as usize].inverse(), -1);
            let corr = self.ctx.phi.word_pow(&self.ambient, &self.gamma, -1);
            let lp = self.cat(&[&corr, &back, &self.paths[from.0 as usize]]);
            self.unit(to, from, lp, -1)
        } else {
            let a = self.ctx.original_of(l.arrow).expect("non-iso arrows are generators");
            let orig = self.ambient.word(&[Letter::fwd(a)])?;
            let lp = self.cat(&[&self.paths[arr.tgt.0 as usize].inverse(), &orig, &self.paths[arr.src.0 as usize]]);
            self.unit(arr.tgt, arr.src, lp, 0)
        };
        if !l.inverse {
            return Ok(fwd);
        }
        let lp = self.phi_hat(&fwd.loop_word, -fwd.k).inverse();
        Ok(self.unit(fwd.col, fwd.row, lp, -fwd.k))
    }

    /// `Ψ(w)`; a constant path maps to `E_{i,i}(1, 0)`.
    pub fn psi_eval(&self, w: &Word) -> Result<MatrixUnitElement, PresentationError> {
        let bp = Word::constant(self.basepoint);
        let mut acc = self.unit(w.tgt(), w.tgt(), bp, 0);
        for &l in w.letters() {
            let img = self.letter_image(l)?;
            acc = self
                .multiply(&acc, &img)
                .ok_or_else(|| PresentationError::NotInTreeClosure("letters do not compose".into()))?;
        }
        Ok(acc)
    }

    /// Trivial in the contracted face presentation via at most two face conjugates.
    pub fn face_certificate(&self, u: &[i32]) -> Option<String> {
        let u = group::cyclic_reduce(u);
        if u.is_empty() {
            return Some("free".into());
        }
        let is_face = |w: &[i32]| {
            let c = group::cyclic_reduce(w);
            self.face_rotations.iter().find(|f| f.len() == c.len() && group::is_rotation(f, &c)).cloned()
        };
        if let Some(f) = is_face(&u) {
            return Some(format!("conjugate of {}", self.fmt_group(&f)));
        }
        for rho in &self.face_rotations {
            for i in 0..=u.len() {
                let mut v = u[..i].to_vec();
                v.extend_from_slice(rho);
                v.extend_from_slice(&u[i..]);
                let v = group::cyclic_reduce(&v);
                if v.is_empty() {
                    return Some(format!("conjugate of {}", self.fmt_group(&group::inverse(rho))));
                }
                if let Some(f) = is_face(&v) {
                    return Some(format!(
                        "conjugates of {} and {}",
                        self.fmt_group(&f),
                        self.fmt_group(&group::inverse(rho))
                    ));
                }
            }
        }
        None
    }
}

fn tree_paths(q: &Quiver, bp: VertexId, tree: &[ArrowId]) -> Result<Vec<Word>, PresentationError> {
    let mut paths: Vec<Option<Word>> = vec![None; q.vertex_count()];
    paths[bp.0 as usize] = Some(Word::constant(bp));
    let mut changed = true;
    let mut used = 0;
    while changed {
        changed = false;
        for &a in tree {
            let arr = q.arrow(a);
            let (s, t) = (arr.src.0 as usize, arr.tgt.0 as usize);
            let step = match (&paths[s], &paths[t]) {
                (Some(p), None) => Some((t, q.word(&[Letter::fwd(a)])?.concat(p))),
                (None, Some(p)) => Some((s, q.word(&[Letter::fwd(a).inv()])?.concat(p))),
                (Some(_), Some(_)) => None,
                (None, None) => None,
            };
            if let Some((v, w)) = step {
                paths[v] = Some(w.expect("tree path ends where the arrow starts"));
                changed = true;
                used += 1;
            }
        }
    }
    if used != tree.len() {
        return Err(PresentationError::BadTree("tree arrows form a cycle or leave the component".into()));
    }
    paths
        .into_iter()
        .enumerate()
        .map(|(v, p)| {
            p.ok_or_else(|| {
                PresentationError::NotInTreeClosure(format!("vertex {} is not reached", q.label(VertexId(v as u32))))
            })
        })
        .collect()
}

/// Surface-group data for the Dehn backend.
#[derive(Clone, Debug)]
pub struct DehnBackend {
    pub pres: SurfacePresentation,
    pub phi: PhiAction,
    /// Image of every original arrow.
    pub arrow_words: Vec<GWord>,
}

#[derive(Clone, Debug)]
pub enum Backend {
    Certificate,
    Dehn(Option<DehnBackend>),
}

/// JSON config for presentations and the Dehn backend.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationConfig {
    pub genus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_star: Option<BTreeMap<String, String>>,
    pub order: u32,
    /// Original arrow name → surface word.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrow_words: Option<BTreeMap<String, String>>,
    /// Tree arrows by name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<Vec<String>>,
    /// Vertex label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<u32>,
}

impl PresentationConfig {
    pub fn tree_ids(&self, q: &Quiver) -> Result<Option<Vec<ArrowId>>, PresentationError> {
        self.tree
            .as_ref()
            .map(|t| t.iter().map(|n| q.arrow_id(n).map_err(PresentationError::from)).collect())
            .transpose()
    }

    pub fn basepoint_id(&self, q: &Quiver) -> Result<Option<VertexId>, PresentationError> {
        self.basepoint
            .map(|l| q.vertex_by_label(l).ok_or_else(|| PresentationError::NotInTreeClosure(format!("no vertex {l}"))))
            .transpose()
    }

    /// `Ok(None)` when `phi_star` or `arrow_words` is absent.
    pub fn dehn_backend(&self, q: &Quiver, faces: &Potential) -> Result<Option<DehnBackend>, PresentationError> {
        let (Some(phi_star), Some(words)) = (&self.phi_star, &self.arrow_words) else {
            return Ok(None);
        };
        let pres = SurfacePresentation::new(self.genus)?;
        let phi = PhiAction::from_strings(&pres, phi_star, self.order)?;
        let mut arrow_words = vec![None; q.arrow_count()];
        for (name, w) in words {
            arrow_words[q.arrow_id(name)?.0 as usize] = Some(pres.parse(w)?);
        }
        let arrow_words = arrow_words
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| {
                    PresentationError::BadArrowWords(format!("no word for {}", q.arrow(ArrowId(i as u32)).name))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let backend = DehnBackend { pres, phi, arrow_words };
        for (cw, _) in faces.iter() {
            let img = backend.map_letters(cw.letters());
            if !backend.pres.is_trivial(&img) {
                return Err(PresentationError::BadArrowWords(format!(
                    "face {} maps to {}",
                    q.fmt_letters(cw.letters()),
                    backend.pres.fmt(&backend.pres.dehn_reduce(&img))
                )));
            }
        }
        Ok(Some(backend))
    }
}

impl DehnBackend {
    pub fn map_letters(&self, letters: &[Letter]) -> GWord {
        let mut out = Vec::new();
        for l in letters {
            let w = &self.arrow_words[l.arrow.0 as usize];
            if l.inverse {
                out.extend(group::inverse(w));
            } else {
                out.extend_from_slice(w);
            }
        }
        group::free_reduce(&out)
    }

    pub fn element(&self, x: &MatrixUnitElement) -> SemidirectElement {
        SemidirectElement::new(self.map_letters(x.loop_word.letters()), x.k).normalize(&self.pres)
    }
}

/// Outcome for one generating arrow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiArrowCheck {
    pub arrow: String,
    pub pass: bool,
    /// Integer part of every term image.
    pub degrees: Vec<i64>,
    /// One line per pair of terms identified in the group.
    pub certificates: Vec<String>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiReport {
    pub mode: String,
    pub basepoint: u32,
    pub tree: Vec<String>,
    pub arrows: Vec<PsiArrowCheck>,
    /// Dehn mode: generators whose loop image disagrees between `φ̂` and `φ_*`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub phi_mismatches: Vec<String>,
    pub pass: bool,
}

/// Checks that every derivative of `w_prime` along a generator maps to zero.
pub fn verify_psi_relations(
    pc: &PsiContext,
    w_prime: &Potential,
    backend: &Backend,
) -> Result<PsiReport, PresentationError> {
    let dehn = match backend {
        Backend::Certificate => None,
        Backend::Dehn(None) => return Err(PresentationError::MissingPhiAction),
        Backend::Dehn(Some(d)) => Some(d),
    };
    let qp = &pc.ctx.quiver;
    let mut arrows = Vec::new();
    for g in qp.arrow_ids().filter(|&g| !pc.ctx.is_iso(g)) {
        let deriv = cyclic_derivative(qp, w_prime, g)?;
        let mut images = Vec::new();
        for (w, c) in deriv.iter() {
            images.push((w.clone(), c.clone(), pc.psi_eval(w)?));
        }
        let degrees: Vec<i64> = images.iter().map(|(_, _, x)| x.k).collect();
        let mut check = PsiArrowCheck {
            arrow: qp.arrow(g).name.clone(),
            pass: true,
            degrees: degrees.clone(),
            certificates: Vec::new(),
            witness: None,
        };
        if let Some(i) = (1..images.len()).find(|&i| degrees[i] != degrees[0]) {
            check.pass = false;
            check.witness = Some(format!(
                "degree {} of {} differs from degree {} of {}",
                -degrees[i],
                qp.fmt_word(&images[i].0),
                -degrees[0],
                qp.fmt_word(&images[0].0)
            ));
            arrows.push(check);
            continue;
        }
        // Group equal images and require each class to have zero total coefficient.
        let mut classes: Vec<(usize, Coeff)> = Vec::new();
        for (i, (_, c, x)) in images.iter().enumerate() {
            let mut placed = false;
            for (rep, total) in classes.iter_mut() {
                let y = &images[*rep].2;
                if x.row != y.row || x.col != y.col {
                    continue;
                }
                let proof = match dehn {
                    None => {
                        let u = group::concat(&pc.contract(&x.loop_word), &group::inverse(&pc.contract(&y.loop_word)));
                        pc.face_certificate(&u)
                    }
                    Some(d) => d.pres.equal(&d.element(x).word, &d.element(y).word).then(|| "Dehn".to_string()),
                };
                if let Some(p) = proof {
                    check.certificates.push(format!(
                        "{} ~ {}: {p}",
                        qp.fmt_word(&images[i].0),
                        qp.fmt_word(&images[*rep].0)
                    ));
                    *total += c;
                    placed = true;
                    break;
                }
            }
            if !placed {
                classes.push((i, c.clone()));
            }
        }
        if let Some((rep, total)) = classes.iter().find(|(_, t)| !t.is_zero()) {
            check.pass = false;
            let x = &images[*rep].2;
            check.witness = Some(format!(
                "{} (group part {}) keeps coefficient {total}",
                qp.fmt_word(&images[*rep].0),
                match dehn {
                    None => pc.fmt_group(&pc.contract(&x.loop_word)),
                    Some(d) => d.pres.fmt(&d.element(x).word),
                }
            ));
        }
        arrows.push(check);
    }
    let phi_mismatches = match dehn {
        None => Vec::new(),
        Some(d) => phi_mismatches(pc, d),
    };
    let pass = arrows.iter().all(|a| a.pass) && phi_mismatches.is_empty();
    Ok(PsiReport {
        mode: if dehn.is_some() { "dehn" } else { "certificate" }.into(),
        basepoint: pc.ctx.original.label(pc.basepoint),
        tree: pc.tree.iter().map(|&a| pc.ctx.original.arrow(a).name.clone()).collect(),
        arrows,
        phi_mismatches,
        pass,
    })
}

/// Compares `φ_*` with `φ̂` on the loop `t_j⁻¹ a t_i` of every arrow.
fn phi_mismatches(pc: &PsiContext, d: &DehnBackend) -> Vec<String> {
    let q = &pc.ambient;
    let mut out = Vec::new();
    for a in q.arrow_ids() {
        let arr = q.arrow(a);
        let lp = pc.cat(&[
            &pc.paths[arr.tgt.0 as usize].inverse(),
            &q.word(&[Letter::fwd(a)]).expect("arrow"),
            &pc.paths[arr.src.0 as usize],
        ]);
        let via_quiver = d.map_letters(pc.phi_hat(&lp, 1).letters());
        let via_phi = d.phi.apply(&d.map_letters(lp.letters()));
        if !d.pres.equal(&via_quiver, &via_phi) {
            out.push(arr.name.clone());
        }
    }
    out
}
