use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::automorphism::{orbit_sizes, QuiverAutomorphism, TilingAutomorphism};
use super::EquivError;
use crate::pathalg::{coeff, cyclic_derivative, ArrowId, Coeff, Element, Letter, Potential, Quiver, VertexId, Word};
use crate::surfacemap::{dual_quiver, BraneTiling};

/// One generator per arrow orbit and the first vertex of each iso chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitChoice {
    pub generators: Vec<ArrowId>,
    /// One vertex per vertex orbit; its chain runs `b → φ(b) → … → φ^{n−1}(b)`.
    pub iso_bases: Vec<VertexId>,
    /// Optional iso-arrow names per base, `n − 1` each.
    pub iso_names: Option<Vec<Vec<String>>>,
}

/// Orbit choice on disk, by arrow name and vertex label.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChoiceFile {
    pub generators: Vec<String>,
    pub iso_bases: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso_names: Option<Vec<Vec<String>>>,
}

impl OrbitChoice {
    pub fn from_file(q: &Quiver, f: &ChoiceFile) -> Result<Self, EquivError> {
        let generators = f.generators.iter().map(|n| q.arrow_id(n)).collect::<Result<Vec<_>, _>>()?;
        let iso_bases = f
            .iso_bases
            .iter()
            .map(|&l| q.vertex_by_label(l).ok_or_else(|| EquivError::BadChoice(format!("unknown vertex {l}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OrbitChoice { generators, iso_bases, iso_names: f.iso_names.clone() })
    }

    pub fn to_file(&self, q: &Quiver) -> ChoiceFile {
        ChoiceFile {
            generators: self.generators.iter().map(|&a| q.arrow(a).name.clone()).collect(),
            iso_bases: self.iso_bases.iter().map(|&v| q.label(v)).collect(),
            iso_names: self.iso_names.clone(),
        }
    }

    /// Least vertex of each orbit as base; per arrow orbit the member leaving
    /// that base if there is one, else the lowest id.
    pub fn canonical(q: &Quiver, phi: &QuiverAutomorphism) -> Self {
        let bases: Vec<VertexId> = vertex_orbits(q, phi).iter().map(|o| o[0]).collect();
        let generators = arrow_orbits(q, phi)
            .iter()
            .map(|o| *o.iter().find(|&&a| bases.contains(&q.arrow(a).src)).unwrap_or(&o[0]))
            .collect();
        OrbitChoice { generators, iso_bases: bases, iso_names: None }
    }
}

/// Orbits as chains `v, φ(v), …` starting at their least vertex, ordered by that vertex.
fn vertex_orbits(q: &Quiver, phi: &QuiverAutomorphism) -> Vec<Vec<VertexId>> {
    let mut seen = vec![false; q.vertex_count()];
    let mut out = Vec::new();
    for v in q.vertices() {
        if seen[v.0 as usize] {
            continue;
        }
        let mut chain = vec![v];
        seen[v.0 as usize] = true;
        let mut x = phi.vertex(v);
        while x != v {
            seen[x.0 as usize] = true;
            chain.push(x);
            x = phi.vertex(x);
        }
        out.push(chain);
    }
    out
}

fn arrow_orbits(q: &Quiver, phi: &QuiverAutomorphism) -> Vec<Vec<ArrowId>> {
    let mut seen = vec![false; q.arrow_count()];
    let mut out = Vec::new();
    for a in q.arrow_ids() {
        if seen[a.0 as usize] {
            continue;
        }
        let mut orbit = vec![a];
        seen[a.0 as usize] = true;
        let mut x = phi.arrow(a);
        while x != a {
            seen[x.0 as usize] = true;
            orbit.push(x);
            x = phi.arrow(x);
        }
        out.push(orbit);
    }
    out
}

/// The orbit quiver together with everything needed to map paths into it.
#[derive(Clone, Debug)]
pub struct SemidirectQuiver {
    pub original: Quiver,
    pub phi: QuiverAutomorphism,
    pub choice: OrbitChoice,
    /// Generators (same names) followed by localized iso arrows.
    pub quiver: Quiver,
    /// For each original arrow: its generator as an arrow of `quiver`.
    generator_of: Vec<ArrowId>,
    /// Original arrow behind each generator arrow of `quiver`.
    original_of: BTreeMap<ArrowId, ArrowId>,
    /// (orbit, position in chain) of every vertex.
    position: Vec<(usize, usize)>,
    chains: Vec<Vec<VertexId>>,
    /// `iso[o][t]`: arrow `chains[o][t] → chains[o][t+1]`.
    iso: Vec<Vec<ArrowId>>,
    is_iso: Vec<bool>,
}

pub fn build_orbit_quiver(
    q: &Quiver,
    phi: &QuiverAutomorphism,
    choice: &OrbitChoice,
) -> Result<SemidirectQuiver, EquivError> {
    let n = phi.order() as usize;
    let report = orbit_sizes(q, phi);
    if !report.all_full {
        return Err(EquivError::OrbitSizeViolation(format!("vertex orbit sizes {:?} under order {n}", report.sizes)));
    }
    let orbits = vertex_orbits(q, phi);
    let bad = EquivError::BadChoice;
    if choice.iso_bases.len() != orbits.len() {
        return Err(bad(format!("{} iso bases for {} vertex orbits", choice.iso_bases.len(), orbits.len())));
    }
    let mut chains = Vec::with_capacity(orbits.len());
    let mut position = vec![(usize::MAX, 0); q.vertex_count()];
    for (o, orbit) in orbits.iter().enumerate() {
        let base = *choice
            .iso_bases
            .iter()
            .find(|b| orbit.contains(b))
            .ok_or_else(|| bad(format!("no iso base in the orbit of vertex {}", q.label(orbit[0]))))?;
        let chain: Vec<VertexId> = (0..n).map(|t| phi.vertex_pow(base, t as i64)).collect();
        for (t, &v) in chain.iter().enumerate() {
            position[v.0 as usize] = (o, t);
        }
        chains.push(chain);
    }
    let a_orbits = arrow_orbits(q, phi);
    let mut generator_of_orig = vec![ArrowId(u32::MAX); q.arrow_count()];
    for &g in &choice.generators {
        if g.0 as usize >= q.arrow_count() {
            return Err(bad(format!("unknown generator id {}", g.0)));
        }
        let orbit = a_orbits.iter().find(|o| o.contains(&g)).expect("every arrow lies in an orbit");
        for &a in orbit {
            if generator_of_orig[a.0 as usize].0 != u32::MAX {
                return Err(bad(format!("two generators in the orbit of {}", q.arrow(a).name)));
            }
            generator_of_orig[a.0 as usize] = g;
        }
    }
    if let Some(a) = generator_of_orig.iter().position(|g| g.0 == u32::MAX) {
        return Err(bad(format!("no generator for the orbit of {}", q.arrow(ArrowId(a as u32)).name)));
    }

    let mut qp = Quiver::with_vertices(q.vertices().map(|v| q.label(v)));
    let mut original_of = BTreeMap::new();
    let mut new_id = BTreeMap::new();
    let mut sorted = choice.generators.clone();
    sorted.sort();
    for g in sorted {
        let a = q.arrow(g);
        let id = qp.add_arrow(&a.name, a.src, a.tgt, a.localized)?;
        original_of.insert(id, g);
        new_id.insert(g, id);
    }
    let generator_of = generator_of_orig.iter().map(|g| new_id[g]).collect();
    let total_iso = (n - 1) * chains.len();
    let mut iso = Vec::with_capacity(chains.len());
    for (o, chain) in chains.iter().enumerate() {
        let mut row = Vec::new();
        for t in 0..n - 1 {
            let name = match &choice.iso_names {
                Some(names) => names
                    .get(o)
                    .and_then(|r| r.get(t))
                    .cloned()
                    .ok_or_else(|| bad(format!("missing iso name {t} for orbit {o}")))?,
                None if total_iso == 1 => "r".to_string(),
                None => format!("r{}_{}", q.label(chain[0]), t),
            };
            let name = if q.arrow_id(&name).is_ok() && choice.iso_names.is_none() { format!("{name}'") } else { name };
            row.push(qp.add_arrow(&name, chain[t], chain[t + 1], true)?);
        }
        iso.push(row);
    }
    let mut is_iso = vec![false; qp.arrow_count()];
    for a in iso.iter().flatten() {
        is_iso[a.0 as usize] = true;
    }
    Ok(SemidirectQuiver {
        original: q.clone(),
        phi: phi.clone(),
        choice: choice.clone(),
        quiver: qp,
        generator_of,
        original_of,
        position,
        chains,
        iso,
        is_iso,
    })
}

impl SemidirectQuiver {
    pub fn order(&self) -> u32 {
        self.phi.order()
    }

    /// Vertex orbits in chain order, starting at their iso base.
    pub fn orbit_chains(&self) -> &[Vec<VertexId>] {
        &self.chains
    }

    /// Iso arrows of orbit `o`, in chain order.
    pub fn orbit_iso_arrows(&self, o: usize) -> &[ArrowId] {
        &self.iso[o]
    }

    /// Orbit index and chain position of `v`.
    pub fn position(&self, v: VertexId) -> (usize, usize) {
        self.position[v.0 as usize]
    }

    pub fn iso_arrows(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.iso.iter().flatten().copied()
    }

    pub fn is_iso(&self, a: ArrowId) -> bool {
        self.is_iso[a.0 as usize]
    }

    /// Generator of `a`'s orbit, as an arrow of the orbit quiver.
    pub fn generator_of(&self, a: ArrowId) -> ArrowId {
        self.generator_of[a.0 as usize]
    }

    /// Original arrow behind a generator of the orbit quiver.
    pub fn original_of(&self, g: ArrowId) -> Option<ArrowId> {
        self.original_of.get(&g).copied()
    }

    /// The unique reduced iso word from `x` to `y`.
    pub fn iso_path(&self, x: VertexId, y: VertexId) -> Result<Word, EquivError> {
        let (ox, px) = self.position[x.0 as usize];
        let (oy, py) = self.position[y.0 as usize];
        if ox != oy {
            return Err(EquivError::MalformedWord(format!(
                "vertices {} and {} lie in different orbits",
                self.quiver.label(x),
                self.quiver.label(y)
            )));
        }
        let row = &self.iso[ox];
        let letters: Vec<Letter> = if py >= px {
            (px..py).rev().map(|t| Letter::fwd(row[t])).collect()
        } else {
            (py..px).map(|t| Letter::fwd(row[t]).inv()).collect()
        };
        Ok(self.quiver.word_at(&letters, x)?)
    }

    fn xi_letters(&self, l: Letter) -> Result<Vec<Letter>, EquivError> {
        let a = self.original.arrow(l.arrow);
        let g = self.generator_of(l.arrow);
        let ga = self.quiver.arrow(g);
        let q = self.iso_path(a.src, ga.src)?;
        let p = self.iso_path(ga.tgt, a.tgt)?;
        let mut out: Vec<Letter> = p.letters().to_vec();
        out.push(Letter::fwd(g));
        out.extend_from_slice(q.letters());
        if l.inverse {
            out.reverse();
            for x in &mut out {
                *x = x.inv();
            }
        }
        Ok(out)
    }
}

/// Image of a path of the original quiver in the orbit quiver, normalized.
pub fn xi_embed(ctx: &SemidirectQuiver, p: &Word) -> Result<Word, EquivError> {
    let mut letters = Vec::new();
    for &l in p.letters() {
        letters.extend(ctx.xi_letters(l)?);
    }
    let w = ctx.quiver.word_at(&letters, p.src()).map_err(|e| EquivError::NonComposable(e.to_string()))?;
    Ok(w.normalized())
}

/// Signed count of iso letters.
pub fn word_degree(ctx: &SemidirectQuiver, w: &Word) -> i64 {
    w.letters().iter().filter(|l| ctx.is_iso(l.arrow)).map(|l| if l.inverse { -1 } else { 1 }).sum()
}

/// Splits `w = q·ξ(p)` with `q` an iso word and `p` a path in the original quiver.
pub fn factor_word(ctx: &SemidirectQuiver, w: &Word) -> Result<(Word, Word), EquivError> {
    let bad = |m: String| EquivError::MalformedWord(m);
    if w.letters().iter().any(|l| l.arrow.0 as usize >= ctx.quiver.arrow_count()) {
        return Err(bad("letter outside the orbit quiver".into()));
    }
    let mut x = w.src();
    let mut path = Vec::new();
    for &l in w.letters().iter().rev() {
        if ctx.is_iso(l.arrow) {
            continue;
        }
        let g = ctx.original_of(l.arrow).ok_or_else(|| bad("unknown generator".into()))?;
        let n = ctx.order() as i64;
        let member = (0..n).map(|k| ctx.phi.arrow_pow(g, k)).find(|&a| {
            let arr = ctx.original.arrow(a);
            if l.inverse {
                arr.tgt == x
            } else {
                arr.src == x
            }
        });
        let a = member.ok_or_else(|| {
            bad(format!("no arrow in the orbit of {} at vertex {}", ctx.original.arrow(g).name, ctx.original.label(x)))
        })?;
        let arr = ctx.original.arrow(a);
        x = if l.inverse { arr.src } else { arr.tgt };
        path.push(Letter { arrow: a, inverse: l.inverse });
    }
    path.reverse();
    let p = ctx.original.word_at(&path, w.src()).map_err(|e| bad(e.to_string()))?;
    let q = ctx.iso_path(p.tgt(), w.tgt())?;
    let back = q.concat(&xi_embed(ctx, &p)?).map(Word::normalized);
    if back.as_ref() != Some(&w.clone().normalized()) {
        return Err(bad(format!("{} is not an iso word times an image", ctx.quiver.fmt_word(w))));
    }
    Ok((q, p))
}

/// Transported potential and its iso-degree profile.
#[derive(Clone, Debug)]
pub struct TransportReport {
    pub potential: Potential,
    /// Degree of every term.
    pub degrees: BTreeSet<i64>,
    /// The common degree when there is exactly one.
    pub homogeneous_degree: Option<i64>,
}

impl TransportReport {
    pub fn is_homogeneous_of_order(&self, n: u32) -> bool {
        self.homogeneous_degree == Some(n as i64)
    }
}

pub fn transport_potential(ctx: &SemidirectQuiver, w: &Potential) -> Result<TransportReport, EquivError> {
    let mut out = Potential::zero();
    for (cw, c) in w.iter() {
        let img = xi_embed(ctx, &cw.as_word(&ctx.original))?;
        out.add_cycle(&img, c.clone())?;
    }
    let mut degrees = BTreeSet::new();
    for (cw, _) in out.iter() {
        for r in ctx.iso_arrows() {
            let has = |inv: bool| cw.letters().iter().any(|l| l.arrow == r && l.inverse == inv);
            if has(true) && has(false) {
                return Err(EquivError::MixedInverseViolation(ctx.quiver.arrow(r).name.clone()));
            }
        }
        degrees.insert(word_degree(ctx, &cw.as_word(&ctx.quiver)));
    }
    let homogeneous_degree = if degrees.len() == 1 { degrees.first().copied() } else { None };
    Ok(TransportReport { potential: out, degrees, homogeneous_degree })
}

/// Outcome of comparing `a·∂W′/∂a` with `n·Σ κ·ξ(c)` over the terms `κ·c` through `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub arrow: String,
    pub pass: bool,
    pub lhs: String,
    pub rhs: String,
    /// `lhs − rhs` when nonzero.
    pub witness: Option<String>,
}

/// Checks the transport identity for a generating arrow `a` of the original quiver.
pub fn verify_transport_identity(
    ctx: &SemidirectQuiver,
    w: &Potential,
    w_prime: &Potential,
    a: ArrowId,
) -> Result<IdentityCheck, EquivError> {
    let g = ctx.generator_of(a);
    if ctx.original_of(g) != Some(a) {
        return Err(EquivError::BadChoice(format!("{} is not a generator", ctx.original.arrow(a).name)));
    }
    let g_word = ctx.quiver.word(&[Letter::fwd(g)])?;
    let lhs = cyclic_derivative(&ctx.quiver, w_prime, g)?.mul_word_left(&g_word);
    let n: Coeff = coeff(ctx.order() as i64);
    let mut rhs = Element::zero();
    for (cw, c) in w.iter() {
        let ls = cw.letters();
        for i in 0..ls.len() {
            if ls[i].arrow != a || ls[i].inverse {
                continue;
            }
            let rot: Vec<Letter> = ls[i..].iter().chain(&ls[..i]).copied().collect();
            let img = xi_embed(ctx, &ctx.original.word(&rot)?)?;
            rhs.add_term(img, c * &n);
        }
    }
    let diff = lhs.sub(&rhs);
    let fmt = |x: &Element| ctx.quiver.fmt_element(x);
    Ok(IdentityCheck {
        arrow: ctx.original.arrow(a).name.clone(),
        pass: diff.is_zero(),
        lhs: fmt(&lhs),
        rhs: fmt(&rhs),
        witness: (!diff.is_zero()).then(|| fmt(&diff)),
    })
}

/// A choice meeting the dimer grading, with its evidence.
#[derive(Clone, Debug)]
pub struct ChoiceCertificate {
    pub quiver: Quiver,
    pub potential: Potential,
    pub phi: QuiverAutomorphism,
    pub choice: OrbitChoice,
    pub context: SemidirectQuiver,
    pub transported: TransportReport,
    /// `deg ξ(a)` per arrow name.
    pub degrees: BTreeMap<String, i64>,
    /// Dimer as arrow names.
    pub dimer: Vec<String>,
    /// Choices examined, including the accepted one.
    pub tried: usize,
}

/// Searches orbit choices whose generators share a source per vertex orbit,
/// giving `deg ξ = n` on dimer arrows and `0` elsewhere.
///
/// Candidates are enumerated orbit by orbit (first orbit slowest), each as
/// (source position, base position) along the orbit chain; the first hit wins.
pub fn choose_homogeneous_xi(
    t: &BraneTiling,
    phi: &TilingAutomorphism,
    dimer: &BTreeSet<usize>,
) -> Result<ChoiceCertificate, EquivError> {
    let (q, w) = dual_quiver(t)?;
    let qphi = phi.on_dual(t, &q)?;
    let report = orbit_sizes(&q, &qphi);
    if !report.all_full {
        return Err(EquivError::OrbitSizeViolation(format!("vertex orbit sizes {:?}", report.sizes)));
    }
    let dimer_arrows: BTreeSet<ArrowId> = dimer.iter().map(|&e| ArrowId(e as u32)).collect();
    let n = qphi.order() as usize;
    let orbits = vertex_orbits(&q, &qphi);
    let a_orbits = arrow_orbits(&q, &qphi);
    let per = n * n;
    let total = per.checked_pow(orbits.len() as u32).unwrap_or(usize::MAX);
    let mut tried = 0;
    for code in 0..total {
        tried += 1;
        let mut rest = code;
        let mut picks = vec![(0, 0); orbits.len()];
        for o in (0..orbits.len()).rev() {
            picks[o] = ((rest % per) / n, rest % n);
            rest /= per;
        }
        let sources: Vec<VertexId> = orbits.iter().zip(&picks).map(|(o, p)| o[p.0]).collect();
        let bases: Vec<VertexId> = orbits.iter().zip(&picks).map(|(o, p)| o[p.1]).collect();
        let generators: Vec<ArrowId> = a_orbits
            .iter()
            .map(|o| *o.iter().find(|&&a| sources.contains(&q.arrow(a).src)).expect("orbits are free"))
            .collect();
        let choice = OrbitChoice { generators, iso_bases: bases, iso_names: None };
        let ctx = build_orbit_quiver(&q, &qphi, &choice)?;
        let mut degrees = BTreeMap::new();
        let mut ok = true;
        for a in q.arrow_ids() {
            let d = word_degree(&ctx, &xi_embed(&ctx, &q.word(&[Letter::fwd(a)])?)?);
            // with n = 1 there are no iso arrows and every degree is 0
            let want = if dimer_arrows.contains(&a) && n > 1 { n as i64 } else { 0 };
            ok &= d == want;
            degrees.insert(q.arrow(a).name.clone(), d);
        }
        if !ok {
            continue;
        }
        let Ok(transported) = transport_potential(&ctx, &w) else { continue };
        return Ok(ChoiceCertificate {
            dimer: dimer_arrows.iter().map(|&a| q.arrow(a).name.clone()).collect(),
            quiver: q,
            potential: w,
            phi: qphi,
            choice,
            context: ctx,
            transported,
            degrees,
            tried,
        });
    }
    Err(EquivError::NoChoiceFound(format!("{tried} choices examined, none grades the dimer")))
}

/// Tries every perfect matching of `t` (up to `limit`) in canonical order.
pub fn choose_with_any_dimer(
    t: &BraneTiling,
    phi: &TilingAutomorphism,
    limit: usize,
) -> Result<ChoiceCertificate, EquivError> {
    let dimers = super::all_dimers(t, limit);
    for d in &dimers {
        match choose_homogeneous_xi(t, phi, d) {
            Err(EquivError::NoChoiceFound(_)) => {}
            other => return other,
        }
    }
    Err(EquivError::NoChoiceFound(format!("{} dimers examined, none admits a graded choice", dimers.len())))
}
