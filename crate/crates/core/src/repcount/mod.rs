//! Exact counting of matrix representations over prime fields.

mod matrix;
mod poly;

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use matrix::{inv_mod, is_prime, Mat};
pub use poly::TracePolynomial;

use crate::equivariant::SemidirectQuiver;
use crate::pathalg::{
    cyclic_derivative, ideal_reduce, jacobi_relations, ArrowId, Coeff, Element, Letter, PathError, Potential, Quiver,
};

/// Largest configuration space enumerated point by point.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000_000;
const CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RepError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("state space of {points} points exceeds the exhaustive limit {limit}")]
    StateSpaceTooLarge { points: u128, limit: u128 },
    #[error("coefficient {0} has no inverse modulo the characteristic")]
    CoeffNotInvertible(String),
    #[error("matrix for localized arrow {0} is singular")]
    NotInvertible(String),
    #[error("inverse letter of {0} is not supported here")]
    UnsupportedInverse(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error(transparent)]
    Path(#[from] PathError),
}

pub(crate) fn coeff_mod(c: &Coeff, p: u64) -> Result<u64, RepError> {
    // the denominator of a reduced ratio is positive
    let pb = num_bigint::BigInt::from(p);
    let num = ((c.numer() % &pb + &pb) % &pb).to_u64().expect("reduced");
    let den = (c.denom() % &pb).to_u64().expect("reduced");
    let inv = inv_mod(den, p).ok_or_else(|| RepError::CoeffNotInvertible(c.to_string()))?;
    Ok(num * inv % p)
}

/// One `d×d` matrix per arrow over `F_p`, constant dimension vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixRep {
    pub d: usize,
    pub p: u64,
    pub mats: Vec<Mat>,
    inverses: Vec<Option<Mat>>,
}

impl MatrixRep {
    pub fn new(q: &Quiver, d: usize, p: u64, mats: Vec<Mat>) -> Result<Self, RepError> {
        if !is_prime(p) {
            return Err(RepError::NotPrime(p));
        }
        if mats.len() != q.arrow_count() || mats.iter().any(|m| m.d != d || m.a.len() != d * d) {
            return Err(RepError::ShapeMismatch(format!("need {} matrices of size {d}", q.arrow_count())));
        }
        let mut inverses = Vec::with_capacity(mats.len());
        for (a, m) in q.arrows().iter().zip(&mats) {
            let inv = m.inverse(p);
            if a.localized && inv.is_none() {
                return Err(RepError::NotInvertible(a.name.clone()));
            }
            inverses.push(if a.localized { inv } else { None });
        }
        Ok(MatrixRep { d, p, mats, inverses })
    }

    /// Dimension-one representation from scalars.
    pub fn scalars(q: &Quiver, p: u64, values: &[u64]) -> Result<Self, RepError> {
        Self::new(q, 1, p, values.iter().map(|&v| Mat { d: 1, a: vec![v % p] }).collect())
    }

    fn letter(&self, l: Letter) -> Result<&Mat, RepError> {
        if l.inverse {
            self.inverses[l.arrow.0 as usize]
                .as_ref()
                .ok_or_else(|| RepError::UnsupportedInverse(format!("#{}", l.arrow.0)))
        } else {
            Ok(&self.mats[l.arrow.0 as usize])
        }
    }

    /// Product of letter matrices in written order.
    pub fn word(&self, letters: &[Letter]) -> Result<Mat, RepError> {
        let mut out = Mat::identity(self.d);
        for &l in letters {
            out = out.mul(self.letter(l)?, self.p);
        }
        Ok(out)
    }

    /// Sum of the words of `x`; meaningful when they share endpoints.
    pub fn element(&self, x: &Element) -> Result<Mat, RepError> {
        let mut out = Mat::zero(self.d);
        for (w, c) in x.iter() {
            out.add_scaled(&self.word(w.letters())?, coeff_mod(c, self.p)?, self.p);
        }
        Ok(out)
    }

    /// `x` as a block matrix, block `(target, source)` per word.
    pub fn element_blocks(&self, q: &Quiver, x: &Element) -> Result<Mat, RepError> {
        let d = self.d;
        let n = q.vertex_count() * d;
        let mut out = Mat::zero(n);
        for (w, c) in x.iter() {
            let m = self.word(w.letters())?;
            let c = coeff_mod(c, self.p)?;
            let (r0, c0) = (w.tgt().0 as usize * d, w.src().0 as usize * d);
            for i in 0..d {
                for j in 0..d {
                    let e = &mut out.a[(r0 + i) * n + c0 + j];
                    *e = (*e + c * m.get(i, j)) % self.p;
                }
            }
        }
        Ok(out)
    }
}

/// The orbit quiver with generators inverted and iso arrows left free.
pub fn localized_generator_quiver(ctx: &SemidirectQuiver) -> Quiver {
    let mut q = ctx.quiver.clone();
    for a in q.arrow_ids().collect::<Vec<_>>() {
        q.set_localized(a, !ctx.is_iso(a));
    }
    q
}

/// `Σ κ · Tr(word)` over the terms of `w`.
pub fn trace_potential(rep: &MatrixRep, w: &Potential) -> Result<u64, RepError> {
    let mut s = 0;
    for (cw, c) in w.iter() {
        let t = rep.word(cw.letters())?.trace(rep.p);
        s = (s + coeff_mod(c, rep.p)? * t) % rep.p;
    }
    Ok(s)
}

/// Every cyclic derivative evaluates to the zero matrix.
pub fn crit_check(rep: &MatrixRep, q: &Quiver, w: &Potential) -> Result<bool, RepError> {
    let rels = jacobi_relations(q, w)?;
    relations_vanish(rep, &rels)
}

fn relations_vanish(rep: &MatrixRep, rels: &[(ArrowId, Element)]) -> Result<bool, RepError> {
    for (_, r) in rels {
        if !rep.element(r)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First-order part of `Tr W` along `E_{ij}` at arrow `a`, by dual numbers.
pub fn trace_partial(rep: &MatrixRep, w: &Potential, a: ArrowId, i: usize, j: usize) -> Result<u64, RepError> {
    let (d, p) = (rep.d, rep.p);
    let mut e = Mat::zero(d);
    e.a[i * d + j] = 1;
    let mut total = 0;
    for (cw, c) in w.iter() {
        let (mut m0, mut m1) = (Mat::identity(d), Mat::zero(d));
        for &l in cw.letters() {
            let x0 = rep.letter(l)?;
            let x1 = if l.arrow != a {
                Mat::zero(d)
            } else if l.inverse {
                // d(A⁻¹) = −A⁻¹·dA·A⁻¹
                let t = x0.mul(&e, p).mul(x0, p);
                let mut neg = Mat::zero(d);
                neg.add_scaled(&t, p - 1, p);
                neg
            } else {
                e.clone()
            };
            let mut n1 = m0.mul(&x1, p);
            n1.add_scaled(&m1.mul(x0, p), 1, p);
            m0 = m0.mul(x0, p);
            m1 = n1;
        }
        total = (total + coeff_mod(c, p)? * m1.trace(p)) % p;
    }
    Ok(total)
}

/// All first-order partials of `Tr W` vanish; also reports whether each partial
/// equals the transposed entry of the matching cyclic derivative.
pub fn gradient_check(rep: &MatrixRep, q: &Quiver, w: &Potential) -> Result<(bool, bool), RepError> {
    let mut vanishes = true;
    let mut matches = true;
    for a in q.arrow_ids() {
        let der = rep.element(&cyclic_derivative(q, w, a)?)?;
        for i in 0..rep.d {
            for j in 0..rep.d {
                let g = trace_partial(rep, w, a, i, j)?;
                vanishes &= g == 0;
                matches &= g == der.get(j, i);
            }
        }
    }
    Ok((vanishes, matches))
}

/// `x^N = 0` for `N` the matrix size.
pub fn is_nilpotent(m: &Mat, p: u64) -> bool {
    let mut x = m.clone();
    let mut k = 1;
    while k < m.d {
        x = x.mul(&x, p);
        k *= 2;
    }
    x.is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sample { samples: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub mode: Mode,
    /// Run the three criticality checks on every point and count disagreements.
    pub verify: bool,
    pub limit: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { mode: Mode::Exhaustive, verify: false, limit: EXHAUSTIVE_LIMIT }
    }
}

/// Points, and points with `Tr W` equal to 0 and to 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub total: u64,
    pub zero: u64,
    pub one: u64,
}

impl Cell {
    fn add(&mut self, v: u64) {
        self.total += 1;
        self.zero += (v == 0) as u64;
        self.one += (v == 1) as u64;
    }

    fn merge(&mut self, o: &Cell) {
        self.total += o.total;
        self.zero += o.zero;
        self.one += o.one;
    }

    /// `|f⁻¹(0)| − |f⁻¹(1)|`.
    pub fn weight(&self) -> i64 {
        self.zero as i64 - self.one as i64
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    all: Cell,
    crit: Cell,
    nilp: Cell,
    inv: Cell,
    crit_nilp: Cell,
    crit_inv: Cell,
    histogram: BTreeMap<u64, u64>,
    disagreements: u64,
    gradient_mismatches: u64,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        for (a, b) in [
            (&mut self.all, &o.all),
            (&mut self.crit, &o.crit),
            (&mut self.nilp, &o.nilp),
            (&mut self.inv, &o.inv),
            (&mut self.crit_nilp, &o.crit_nilp),
            (&mut self.crit_inv, &o.crit_inv),
        ] {
            a.merge(b);
        }
        for (k, v) in &o.histogram {
            *self.histogram.entry(*k).or_insert(0) += v;
        }
        self.disagreements += o.disagreements;
        self.gradient_mismatches += o.gradient_mismatches;
    }
}

struct Engine<'a> {
    q: &'a Quiver,
    w: &'a Potential,
    p: u64,
    rels: Vec<(ArrowId, Element)>,
    poly: Option<TracePolynomial>,
    omega: Option<&'a Element>,
    verify: bool,
}

impl Engine<'_> {
    fn visit(&self, rep: &MatrixRep, t: &mut Tally) -> Result<(), RepError> {
        let v = trace_potential(rep, self.w)?;
        let crit = relations_vanish(rep, &self.rels)?;
        if self.verify {
            let (grad, matches) = gradient_check(rep, self.q, self.w)?;
            let sym = self.poly.as_ref().map_or(crit, |poly| poly.is_critical(rep));
            let value_ok = self.poly.as_ref().is_none_or(|poly| poly.value(rep) == v);
            if grad != crit || sym != crit || !value_ok {
                t.disagreements += 1;
            }
            t.gradient_mismatches += (!matches) as u64;
        }
        t.all.add(v);
        *t.histogram.entry(v).or_insert(0) += 1;
        if crit {
            t.crit.add(v);
        }
        if let Some(om) = self.omega {
            let m = rep.element_blocks(self.q, om)?;
            if is_nilpotent(&m, self.p) {
                t.nilp.add(v);
                if crit {
                    t.crit_nilp.add(v);
                }
            } else if m.det(self.p) != 0 {
                t.inv.add(v);
                if crit {
                    t.crit_inv.add(v);
                }
            }
        }
        Ok(())
    }
}

/// Matrices (with inverses for localized arrows) available to each arrow.
fn domains(q: &Quiver, d: usize, p: u64) -> Result<Vec<Vec<Mat>>, RepError> {
    let per = (p as u128).pow((d * d) as u32);
    if per > 1 << 22 {
        return Err(RepError::StateSpaceTooLarge { points: per, limit: 1 << 22 });
    }
    let all: Vec<Mat> = (0..per as u64).map(|k| Mat::from_index(d, p, k)).collect();
    let inv: Vec<Mat> = all.iter().filter(|m| m.det(p) != 0).cloned().collect();
    Ok(q.arrows().iter().map(|a| if a.localized { inv.clone() } else { all.clone() }).collect())
}

fn random_mat<R: Rng>(rng: &mut R, d: usize, p: u64, invertible: bool) -> Mat {
    loop {
        let m = Mat { d, a: (0..d * d).map(|_| rng.gen_range(0..p)).collect() };
        if !invertible || m.det(p) != 0 {
            return m;
        }
    }
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("TESSELLA_THREADS").ok().and_then(|s| s.parse::<usize>().ok());
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

fn run(
    q: &Quiver,
    w: &Potential,
    d: usize,
    p: u64,
    omega: Option<&Element>,
    opts: &CountOptions,
) -> Result<Tally, RepError> {
    if !is_prime(p) {
        return Err(RepError::NotPrime(p));
    }
    if d == 0 {
        return Err(RepError::ShapeMismatch("dimension must be positive".into()));
    }
    let poly = if opts.verify { TracePolynomial::new(q, w, d, p).ok() } else { None };
    let engine = Engine { q, w, p, rels: jacobi_relations(q, w)?, poly, omega, verify: opts.verify };
    match &opts.mode {
        Mode::Exhaustive => {
            let doms = domains(q, d, p)?;
            let points: u128 = doms.iter().map(|x| x.len() as u128).product();
            if points > opts.limit {
                return Err(RepError::StateSpaceTooLarge { points, limit: opts.limit });
            }
            let points = points as u64;
            let chunks = points.div_ceil(CHUNK);
            let parts: Vec<Result<Tally, RepError>> = with_pool(|| {
                (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let mut t = Tally::default();
                        for k in c * CHUNK..((c + 1) * CHUNK).min(points) {
                            let mut rest = k;
                            let mut mats = vec![Mat::zero(d); doms.len()];
                            for (slot, dom) in mats.iter_mut().zip(&doms).rev() {
                                *slot = dom[(rest % dom.len() as u64) as usize].clone();
                                rest /= dom.len() as u64;
                            }
                            engine.visit(&MatrixRep::new(q, d, p, mats)?, &mut t)?;
                        }
                        Ok(t)
                    })
                    .collect()
            });
            merge(parts)
        }
        Mode::Sample { samples, seed } => {
            let chunks = samples.div_ceil(CHUNK);
            let parts: Vec<Result<Tally, RepError>> = with_pool(|| {
                (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                        rng.set_stream(c);
                        let mut t = Tally::default();
                        for _ in c * CHUNK..((c + 1) * CHUNK).min(*samples) {
                            let mats = q.arrows().iter().map(|a| random_mat(&mut rng, d, p, a.localized)).collect();
                            engine.visit(&MatrixRep::new(q, d, p, mats)?, &mut t)?;
                        }
                        Ok(t)
                    })
                    .collect()
            });
            merge(parts)
        }
    }
}

fn merge(parts: Vec<Result<Tally, RepError>>) -> Result<Tally, RepError> {
    let mut t = Tally::default();
    for part in parts {
        t.merge(&part?);
    }
    Ok(t)
}

/// Counts of representations and of values of `Tr W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub q: u64,
    pub d: usize,
    pub mode: Mode,
    /// Points visited; the whole space in exhaustive mode.
    pub total: u64,
    pub zero: u64,
    pub one: u64,
    pub crit: u64,
    pub crit_zero: u64,
    pub crit_one: u64,
    /// Number of points per value of `Tr W`.
    pub histogram: BTreeMap<u64, u64>,
    /// Points where the three criticality checks disagree; `None` unless verified.
    pub disagreements: Option<u64>,
    /// Points where a trace partial differs from the transposed cyclic derivative entry.
    pub gradient_mismatches: Option<u64>,
    /// Normalizations left symbolic: `𝕃^(−dim/2)` and `[GL_d]^(−#vertices)`.
    pub prefactor: String,
}

fn prefactor(q: &Quiver, d: usize) -> String {
    format!("L^(-{}/2) * [GL_{d}]^(-{})", d * d * q.arrow_count(), q.vertex_count())
}

pub fn enumerate_reps(
    q: &Quiver,
    w: &Potential,
    d: usize,
    p: u64,
    opts: &CountOptions,
) -> Result<CountReport, RepError> {
    let t = run(q, w, d, p, None, opts)?;
    Ok(CountReport {
        q: p,
        d,
        mode: opts.mode.clone(),
        total: t.all.total,
        zero: t.all.zero,
        one: t.all.one,
        crit: t.crit.total,
        crit_zero: t.crit.zero,
        crit_one: t.crit.one,
        histogram: t.histogram,
        disagreements: opts.verify.then_some(t.disagreements),
        gradient_mismatches: opts.verify.then_some(t.gradient_mismatches),
        prefactor: prefactor(q, d),
    })
}

/// Representation counts split by how a central element acts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrataReport {
    pub q: u64,
    pub d: usize,
    pub total: u64,
    pub nilpotent: u64,
    pub invertible: u64,
    /// Neither nilpotent nor invertible.
    pub mixed: u64,
    pub crit_total: u64,
    pub crit_nilpotent: u64,
    pub crit_invertible: u64,
    /// Arrows whose commutator with the element was not certified to vanish.
    pub centrality_warnings: Vec<String>,
}

/// Arrows `a` for which `[ω, a]` is not shown to lie in the Jacobi ideal within `step_bound`.
pub fn centrality_warnings(
    q: &Quiver,
    w: &Potential,
    omega: &Element,
    step_bound: usize,
) -> Result<Vec<String>, RepError> {
    let rels: Vec<Element> = jacobi_relations(q, w)?.into_iter().map(|(_, r)| r).collect();
    let mut out = Vec::new();
    for a in q.arrow_ids() {
        let x = Element::from_word(q.word(&[Letter::fwd(a)])?);
        let comm = omega.mul(&x).sub(&x.mul(omega));
        if !comm.is_zero() && !ideal_reduce(q, &comm, &rels, step_bound).is_zero() {
            out.push(q.arrow(a).name.clone());
        }
    }
    Ok(out)
}

pub fn stratify_by_omega(
    q: &Quiver,
    w: &Potential,
    omega: &Element,
    d: usize,
    p: u64,
    opts: &CountOptions,
) -> Result<StrataReport, RepError> {
    let t = run(q, w, d, p, Some(omega), opts)?;
    Ok(StrataReport {
        q: p,
        d,
        total: t.all.total,
        nilpotent: t.nilp.total,
        invertible: t.inv.total,
        mixed: t.all.total - t.nilp.total - t.inv.total,
        crit_total: t.crit.total,
        crit_nilpotent: t.crit_nilp.total,
        crit_invertible: t.crit_inv.total,
        centrality_warnings: centrality_warnings(q, w, omega, 1)?,
    })
}

/// Both sides of the degree-one coefficient identity, for a point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeSides {
    /// Weight `|f⁻¹(0)| − |f⁻¹(1)|` of all points.
    pub total_weight: i64,
    pub nilpotent_weight: i64,
    pub invertible_weight: i64,
    /// `q · nilpotent_weight`, to set against `total_weight`.
    pub scaled_nilpotent: i64,
    /// `(q − 1) · nilpotent_weight`, to set against `invertible_weight`.
    pub scaled_nilpotent_minus_one: i64,
}

impl ProbeSides {
    fn from_cells(q: u64, all: &Cell, nilp: &Cell, inv: &Cell) -> Self {
        let n = nilp.weight();
        ProbeSides {
            total_weight: all.weight(),
            nilpotent_weight: n,
            invertible_weight: inv.weight(),
            scaled_nilpotent: q as i64 * n,
            scaled_nilpotent_minus_one: (q as i64 - 1) * n,
        }
    }
}

/// Report only; nothing here is asserted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub q: u64,
    pub ambient: ProbeSides,
    pub critical: ProbeSides,
    pub note: String,
}

/// Dimension-one weighted counts for the power-structure comparison.
pub fn conjecture_probe_d1(q: &Quiver, w: &Potential, omega: &Element, p: u64) -> Result<ProbeReport, RepError> {
    if p == 2 {
        return Err(RepError::Refused("characteristic 2 kills the coefficient 2 in the transported potential".into()));
    }
    let t = run(q, w, 1, p, Some(omega), &CountOptions::default())?;
    Ok(ProbeReport {
        q: p,
        ambient: ProbeSides::from_cells(p, &t.all, &t.nilp, &t.inv),
        critical: ProbeSides::from_cells(p, &t.crit, &t.crit_nilp, &t.crit_inv),
        note: "weights |f^-1(0)| - |f^-1(1)| are a heuristic point-count specialization; no identity is asserted"
            .into(),
    })
}

#[cfg(test)]
mod tests;
