//! Trace of a potential as a commutative polynomial in matrix entries.

use std::collections::HashMap;

use super::{coeff_mod, MatrixRep, RepError};
use crate::pathalg::{Potential, Quiver};

type Monomial = Vec<u32>;

/// `Tr W` expanded over the entries `x_{a,i,j}` with its formal gradient.
#[derive(Clone, Debug)]
pub struct TracePolynomial {
    d: usize,
    p: u64,
    terms: Vec<(Monomial, u64)>,
    /// Nonzero partial derivatives, by variable.
    gradient: Vec<(u32, Vec<(Monomial, u64)>)>,
}

impl TracePolynomial {
    /// Fails on potentials with inverse letters.
    pub fn new(q: &Quiver, w: &Potential, d: usize, p: u64) -> Result<Self, RepError> {
        let var = |a: u32, i: usize, j: usize| a * (d * d) as u32 + (i * d + j) as u32;
        let mut poly: HashMap<Monomial, u64> = HashMap::new();
        for (cw, c) in w.iter() {
            let c = coeff_mod(c, p)?;
            if c == 0 {
                continue;
            }
            let ls = cw.letters();
            if let Some(l) = ls.iter().find(|l| l.inverse) {
                return Err(RepError::UnsupportedInverse(q.arrow(l.arrow).name.clone()));
            }
            let k = ls.len();
            // index sequences i_0..i_{k-1}, closing back to i_0
            let count = d.pow(k as u32);
            for code in 0..count {
                let mut idx = vec![0usize; k];
                let mut x = code;
                for slot in idx.iter_mut() {
                    *slot = x % d;
                    x /= d;
                }
                let mut mono: Monomial = (0..k).map(|t| var(ls[t].arrow.0, idx[t], idx[(t + 1) % k])).collect();
                mono.sort_unstable();
                let e = poly.entry(mono).or_insert(0);
                *e = (*e + c) % p;
            }
        }
        let mut terms: Vec<(Monomial, u64)> = poly.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort();
        let nvars = (q.arrow_count() * d * d) as u32;
        let mut gradient = Vec::new();
        for v in 0..nvars {
            let mut g: HashMap<Monomial, u64> = HashMap::new();
            for (m, c) in &terms {
                let mult = m.iter().filter(|&&x| x == v).count() as u64;
                if mult == 0 {
                    continue;
                }
                let mut rest = m.clone();
                let pos = rest.iter().position(|&x| x == v).expect("variable occurs");
                rest.remove(pos);
                let e = g.entry(rest).or_insert(0);
                *e = (*e + c * (mult % p)) % p;
            }
            let mut g: Vec<(Monomial, u64)> = g.into_iter().filter(|(_, c)| *c != 0).collect();
            if !g.is_empty() {
                g.sort();
                gradient.push((v, g));
            }
        }
        Ok(TracePolynomial { d, p, terms, gradient })
    }

    fn eval_terms(&self, terms: &[(Monomial, u64)], rep: &MatrixRep) -> u64 {
        let dd = self.d * self.d;
        let p = self.p;
        terms.iter().fold(0, |acc, (m, c)| {
            let v = m.iter().fold(*c, |x, &var| x * rep.mats[var as usize / dd].a[var as usize % dd] % p);
            (acc + v) % p
        })
    }

    pub fn value(&self, rep: &MatrixRep) -> u64 {
        self.eval_terms(&self.terms, rep)
    }

    /// Every formal partial derivative vanishes at `rep`.
    pub fn is_critical(&self, rep: &MatrixRep) -> bool {
        self.gradient.iter().all(|(_, g)| self.eval_terms(g, rep) == 0)
    }
}
