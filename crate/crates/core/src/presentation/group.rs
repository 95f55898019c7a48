//! Words in free groups, surface groups and their semidirect products with ℤ.

use std::collections::BTreeMap;

use serde::Serialize;

use super::PresentationError;

/// Letters `±k` for generator `k ≥ 1`.
pub type GWord = Vec<i32>;

pub fn free_reduce(w: &[i32]) -> GWord {
    let mut out: GWord = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse(w: &[i32]) -> GWord {
    w.iter().rev().map(|x| -x).collect()
}

pub fn concat(u: &[i32], v: &[i32]) -> GWord {
    let mut w = u.to_vec();
    w.extend_from_slice(v);
    free_reduce(&w)
}

/// Freely and cyclically reduced.
pub fn cyclic_reduce(w: &[i32]) -> GWord {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.remove(0);
        w.pop();
    }
    w
}

pub fn is_rotation(u: &[i32], v: &[i32]) -> bool {
    u.len() == v.len() && (u.is_empty() || (0..u.len()).any(|s| u[s..].iter().chain(&u[..s]).eq(v.iter())))
}

/// Standard presentation `⟨x_1, y_1, …, x_g, y_g | Π [x_i, y_i]⟩`; `x_i = 2i−1`, `y_i = 2i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePresentation {
    genus: u32,
    rotations: Vec<GWord>,
}

impl SurfacePresentation {
    pub fn new(genus: u32) -> Result<Self, PresentationError> {
        if genus <= 1 {
            return Err(PresentationError::GenusTooSmall(genus));
        }
        let r = Self::relator_of(genus);
        let mut rotations = Vec::with_capacity(r.len() * 2);
        for base in [r.clone(), inverse(&r)] {
            for s in 0..base.len() {
                rotations.push(base[s..].iter().chain(&base[..s]).copied().collect());
            }
        }
        Ok(SurfacePresentation { genus, rotations })
    }

    fn relator_of(g: u32) -> GWord {
        (1..=g as i32).flat_map(|i| [2 * i - 1, 2 * i, -(2 * i - 1), -(2 * i)]).collect()
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus as usize
    }

    pub fn relator(&self) -> GWord {
        Self::relator_of(self.genus)
    }

    /// Every cyclic rotation of the relator and of its inverse.
    pub fn relator_rotations(&self) -> &[GWord] {
        &self.rotations
    }

    pub fn name(&self, x: i32) -> String {
        let k = x.unsigned_abs();
        let base = if k % 2 == 1 { format!("x{}", k.div_ceil(2)) } else { format!("y{}", k / 2) };
        if x < 0 {
            format!("{base}^-1")
        } else {
            base
        }
    }

    pub fn fmt(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&x| self.name(x)).collect::<Vec<_>>().join(" ")
    }

    /// Whitespace-separated tokens `x1`, `y2^-1`, `x1^3`; `1` is the empty word.
    pub fn parse(&self, s: &str) -> Result<GWord, PresentationError> {
        let bad = |t: &str| PresentationError::Parse(format!("bad surface-group token {t:?}"));
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<i32>().map_err(|_| bad(tok))?),
                None => (tok, 1),
            };
            let (kind, idx) = base.split_at(1);
            let i: i32 = idx.parse().map_err(|_| bad(tok))?;
            if i < 1 || i > self.genus as i32 {
                return Err(bad(tok));
            }
            let g = match kind {
                "x" => 2 * i - 1,
                "y" => 2 * i,
                _ => return Err(bad(tok)),
            };
            let letter = if exp < 0 { -g } else { g };
            out.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(free_reduce(&out))
    }

    /// Dehn's algorithm: replace any piece of more than half a relator
    /// rotation by the inverse of its complement, leftmost-longest first.
    pub fn dehn_reduce(&self, w: &[i32]) -> GWord {
        let half = 2 * self.genus as usize;
        let mut w = free_reduce(w);
        loop {
            let mut best: Option<(usize, usize, usize)> = None; // (start, length, rotation)
            for i in 0..w.len() {
                for (k, rho) in self.rotations.iter().enumerate() {
                    let len = w[i..].iter().zip(rho).take_while(|(a, b)| a == b).count();
                    if len > half && best.is_none_or(|(_, l, _)| len > l) {
                        best = Some((i, len, k));
                    }
                }
                if best.is_some() {
                    break;
                }
            }
            let Some((i, len, k)) = best else { return w };
            let rho = &self.rotations[k];
            let mut next = w[..i].to_vec();
            next.extend(inverse(&rho[len..]));
            next.extend_from_slice(&w[i + len..]);
            w = free_reduce(&next);
        }
    }

    pub fn is_trivial(&self, w: &[i32]) -> bool {
        self.dehn_reduce(w).is_empty()
    }

    pub fn equal(&self, u: &[i32], v: &[i32]) -> bool {
        self.is_trivial(&concat(u, &inverse(v)))
    }
}

/// Images of the surface generators under an automorphism of finite order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiAction {
    images: Vec<GWord>,
    order: u32,
}

impl PhiAction {
    pub fn new(pres: &SurfacePresentation, images: Vec<GWord>, order: u32) -> Result<Self, PresentationError> {
        let bad = PresentationError::InvalidPhiAction;
        if images.len() != pres.generator_count() || order == 0 {
            return Err(bad(format!("need {} images and a positive order", pres.generator_count())));
        }
        let phi = PhiAction { images, order };
        if !pres.is_trivial(&phi.apply(&pres.relator())) {
            return Err(bad("the relator does not map to the identity".into()));
        }
        let gens: Vec<i32> = (1..=pres.generator_count() as i32).collect();
        let fixes_all = |k: u32| gens.iter().all(|&x| pres.equal(&phi.apply_n(&[x], k), &[x]));
        if !fixes_all(order) {
            return Err(bad(format!("the {order}-th power is not the identity")));
        }
        if let Some(k) = (1..order).find(|&k| fixes_all(k)) {
            return Err(bad(format!("already the identity at power {k}")));
        }
        Ok(phi)
    }

    pub fn identity(pres: &SurfacePresentation) -> Self {
        PhiAction { images: (1..=pres.generator_count() as i32).map(|x| vec![x]).collect(), order: 1 }
    }

    /// From `generator name → word`.
    pub fn from_strings(
        pres: &SurfacePresentation,
        map: &BTreeMap<String, String>,
        order: u32,
    ) -> Result<Self, PresentationError> {
        let mut images = vec![None; pres.generator_count()];
        for (k, v) in map {
            let g = pres.parse(k)?;
            if g.len() != 1 || g[0] < 0 {
                return Err(PresentationError::Parse(format!("{k:?} is not a generator")));
            }
            images[g[0] as usize - 1] = Some(pres.parse(v)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| {
                    PresentationError::InvalidPhiAction(format!("no image for {}", pres.name(i as i32 + 1)))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(pres, images, order)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn apply(&self, w: &[i32]) -> GWord {
        let mut out = Vec::new();
        for &x in w {
            let img = &self.images[x.unsigned_abs() as usize - 1];
            if x > 0 {
                out.extend_from_slice(img);
            } else {
                out.extend(inverse(img));
            }
        }
        free_reduce(&out)
    }

    fn apply_n(&self, w: &[i32], k: u32) -> GWord {
        (0..k).fold(w.to_vec(), |acc, _| self.apply(&acc))
    }

    /// `φ^k` for any integer `k`, using `φ^n = id`.
    pub fn pow(&self, w: &[i32], k: i64) -> GWord {
        self.apply_n(w, k.rem_euclid(self.order as i64) as u32)
    }
}

/// `(w, k)` in `π₁ ⋊ ℤ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemidirectElement {
    pub word: GWord,
    pub k: i64,
}

impl SemidirectElement {
    pub fn new(word: GWord, k: i64) -> Self {
        SemidirectElement { word, k }
    }

    pub fn identity() -> Self {
        SemidirectElement { word: Vec::new(), k: 0 }
    }

    /// Word part Dehn-reduced.
    pub fn normalize(&self, pres: &SurfacePresentation) -> Self {
        SemidirectElement { word: pres.dehn_reduce(&self.word), k: self.k }
    }

    /// `(β, m)·(α, k) = (φ^k(β)·α, m + k)`.
    pub fn multiply(&self, other: &Self, pres: &SurfacePresentation, phi: &PhiAction) -> Self {
        let w = concat(&phi.pow(&self.word, other.k), &other.word);
        SemidirectElement { word: pres.dehn_reduce(&w), k: self.k + other.k }
    }

    pub fn inverse(&self, pres: &SurfacePresentation, phi: &PhiAction) -> Self {
        let w = inverse(&phi.pow(&self.word, -self.k));
        SemidirectElement { word: pres.dehn_reduce(&w), k: -self.k }
    }

    pub fn equals(&self, other: &Self, pres: &SurfacePresentation) -> bool {
        self.k == other.k && pres.equal(&self.word, &other.word)
    }
}
