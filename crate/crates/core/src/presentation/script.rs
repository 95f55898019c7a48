//! A small checker for hand derivations between relations of a transported
//! potential, read as identities in the free group on the arrows.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::group;
use super::PresentationError;
use crate::pathalg::{cyclic_derivative, ArrowId, Letter, Potential, Quiver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// How a step's identity is obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// The two terms of the derivative along `arrow`.
    Relation { arrow: String },
    /// Multiply both sides of step `from` by `word`, on the left (`L`) or right (`R`).
    Multiply { from: String, word: String, side: Side },
    /// Strip the common prefix and suffix of both sides of `from`.
    Cancel { from: String },
    /// Replace one occurrence of one side of `using` by its other side in `from`.
    Rewrite { from: String, using: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub label: String,
    #[serde(flatten)]
    pub justification: Move,
    /// `"lhs = rhs"`; `1` denotes the empty word.
    pub claim: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationScript {
    /// Arrows set to the identity before anything else.
    #[serde(default)]
    pub contract: Vec<String>,
    #[serde(default)]
    pub steps: Vec<ScriptStep>,
    /// Labels of steps whose identities are translated and matched.
    #[serde(default)]
    pub targets: Vec<String>,
    /// Names of the generators of the target presentation.
    #[serde(default)]
    pub target_generators: Vec<String>,
    /// Arrow name → word in the target generators.
    #[serde(default)]
    pub substitution: BTreeMap<String, String>,
    /// Relators of the target presentation.
    #[serde(default)]
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepResult {
    pub index: usize,
    pub label: String,
    pub ok: bool,
    /// The identity the move produces.
    pub derived: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScriptReport {
    pub pass: bool,
    pub steps: Vec<StepResult>,
    pub first_failure: Option<usize>,
    /// Expected relators matched by some target identity.
    pub established: Vec<String>,
    pub missing: Vec<String>,
}

impl ScriptReport {
    pub fn complete(&self) -> bool {
        self.pass && self.missing.is_empty()
    }
}

type Identity = (Vec<Letter>, Vec<Letter>);

struct Checker<'a> {
    q: &'a Quiver,
    w: &'a Potential,
    contracted: Vec<ArrowId>,
}

impl Checker<'_> {
    fn reduce(&self, w: &[Letter]) -> Vec<Letter> {
        let kept: Vec<Letter> = w.iter().filter(|l| !self.contracted.contains(&l.arrow)).copied().collect();
        group::free_reduce(&encode(&kept)).into_iter().map(decode).collect()
    }

    fn parse_side(&self, s: &str) -> Result<Vec<Letter>, String> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Vec::new());
        }
        Ok(self.reduce(&self.q.parse_letters(s).map_err(|e| e.to_string())?))
    }

    fn parse_identity(&self, s: &str) -> Result<Identity, String> {
        let (l, r) = s.split_once('=').ok_or_else(|| format!("claim {s:?} has no '='"))?;
        Ok((self.parse_side(l)?, self.parse_side(r)?))
    }

    fn fmt_side(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            "1".into()
        } else {
            self.q.fmt_letters(w)
        }
    }

    fn fmt(&self, id: &Identity) -> String {
        format!("{} = {}", self.fmt_side(&id.0), self.fmt_side(&id.1))
    }

    fn relation(&self, arrow: &str) -> Result<Identity, String> {
        let a = self.q.arrow_id(arrow).map_err(|e| e.to_string())?;
        let d = cyclic_derivative(self.q, self.w, a).map_err(|e| e.to_string())?;
        let terms: Vec<_> = d.iter().collect();
        if terms.len() != 2 || !(terms[0].1 + terms[1].1).is_zero() {
            return Err(format!("derivative along {arrow} is not a difference of two paths"));
        }
        let (pos, neg) = if terms[0].1.is_positive() { (0, 1) } else { (1, 0) };
        Ok((self.reduce(terms[pos].0.letters()), self.reduce(terms[neg].0.letters())))
    }

    fn rewrites(&self, from: &Identity, using: &Identity) -> Vec<Identity> {
        let mut out = Vec::new();
        for (pat, rep) in [(&using.0, &using.1), (&using.1, &using.0)] {
            if pat.is_empty() {
                continue;
            }
            for side in 0..2 {
                let target = if side == 0 { &from.0 } else { &from.1 };
                for i in 0..target.len() {
                    if target[i..].starts_with(pat) {
                        let mut w = target[..i].to_vec();
                        w.extend_from_slice(rep);
                        w.extend_from_slice(&target[i + pat.len()..]);
                        let w = self.reduce(&w);
                        out.push(if side == 0 { (w, from.1.clone()) } else { (from.0.clone(), w) });
                    }
                }
            }
        }
        out
    }

    fn apply(&self, step: &ScriptStep, known: &BTreeMap<String, Identity>) -> Result<Identity, String> {
        let claim = self.parse_identity(&step.claim)?;
        let get = |l: &str| known.get(l).cloned().ok_or_else(|| format!("no verified step labelled {l:?}"));
        let same = |x: &Identity| *x == claim || (x.1.clone(), x.0.clone()) == claim;
        let candidates: Vec<Identity> = match &step.justification {
            Move::Relation { arrow } => vec![self.relation(arrow)?],
            Move::Multiply { from, word, side } => {
                let (l, r) = get(from)?;
                let u = self.parse_side(word)?;
                let mul = |x: &[Letter]| match side {
                    Side::L => self.reduce(&[u.as_slice(), x].concat()),
                    Side::R => self.reduce(&[x, u.as_slice()].concat()),
                };
                vec![(mul(&l), mul(&r))]
            }
            Move::Cancel { from } => {
                let (mut l, mut r) = get(from)?;
                while !l.is_empty() && !r.is_empty() && l[0] == r[0] {
                    l.remove(0);
                    r.remove(0);
                }
                while !l.is_empty() && !r.is_empty() && l.last() == r.last() {
                    l.pop();
                    r.pop();
                }
                vec![(l, r)]
            }
            Move::Rewrite { from, using } => self.rewrites(&get(from)?, &get(using)?),
        };
        match candidates.iter().find(|x| same(x)) {
            Some(_) => Ok(claim),
            None => Err(match candidates.first() {
                Some(x) if candidates.len() == 1 => format!("move yields {}", self.fmt(x)),
                Some(_) => format!("none of {} rewrites yields the claim", candidates.len()),
                None => "the rewrite pattern does not occur".into(),
            }),
        }
    }
}

fn encode(w: &[Letter]) -> Vec<i32> {
    w.iter().map(|l| if l.inverse { -(l.arrow.0 as i32 + 1) } else { l.arrow.0 as i32 + 1 }).collect()
}

fn decode(x: i32) -> Letter {
    Letter { arrow: ArrowId(x.unsigned_abs() - 1), inverse: x < 0 }
}

/// Checks every step in order, stopping at the first that fails, then
/// translates the target identities and matches them against `expected`
/// up to cyclic rotation and inversion.
pub fn check_derivation_script(
    q: &Quiver,
    w: &Potential,
    script: &DerivationScript,
) -> Result<ScriptReport, PresentationError> {
    let contracted = script.contract.iter().map(|n| q.arrow_id(n)).collect::<Result<Vec<_>, _>>()?;
    let ck = Checker { q, w, contracted };

    let mut known: BTreeMap<String, Identity> = BTreeMap::new();
    let mut steps = Vec::new();
    let mut first_failure = None;
    for (index, step) in script.steps.iter().enumerate() {
        let res = if known.contains_key(&step.label) {
            Err(format!("label {:?} reused", step.label))
        } else {
            ck.apply(step, &known)
        };
        match res {
            Ok(id) => {
                steps.push(StepResult {
                    index,
                    label: step.label.clone(),
                    ok: true,
                    derived: Some(ck.fmt(&id)),
                    error: None,
                });
                known.insert(step.label.clone(), id);
            }
            Err(e) => {
                steps.push(StepResult { index, label: step.label.clone(), ok: false, derived: None, error: Some(e) });
                first_failure = Some(index);
                break;
            }
        }
    }

    let mut target_q = Quiver::with_vertices([0]);
    for g in &script.target_generators {
        target_q.add_arrow_between(g, 0, 0, true)?;
    }
    let parse_target = |s: &str| -> Result<Vec<i32>, PresentationError> {
        if s.trim() == "1" {
            return Ok(Vec::new());
        }
        Ok(group::free_reduce(&encode(&target_q.parse_letters(s)?)))
    };
    let mut subst: BTreeMap<ArrowId, Vec<i32>> = BTreeMap::new();
    for (arrow, img) in &script.substitution {
        subst.insert(q.arrow_id(arrow)?, parse_target(img)?);
    }
    let expected: Vec<(String, Vec<i32>)> = script
        .expected
        .iter()
        .map(|s| Ok((s.clone(), group::cyclic_reduce(&parse_target(s)?))))
        .collect::<Result<_, PresentationError>>()?;
    let mut matched = vec![false; expected.len()];
    for label in &script.targets {
        let Some((l, r)) = known.get(label) else { continue };
        let relator: Vec<Letter> = l.iter().copied().chain(r.iter().rev().map(|x| x.inv())).collect();
        let mut img = Vec::new();
        let mut ok = true;
        for x in &relator {
            match subst.get(&x.arrow) {
                Some(wd) if x.inverse => img.extend(group::inverse(wd)),
                Some(wd) => img.extend_from_slice(wd),
                None => ok = false,
            }
        }
        if !ok {
            continue;
        }
        let img = group::cyclic_reduce(&img);
        for (k, (_, e)) in expected.iter().enumerate() {
            if group::is_rotation(e, &img) || group::is_rotation(e, &group::cyclic_reduce(&group::inverse(&img))) {
                matched[k] = true;
            }
        }
    }
    let (established, missing): (Vec<_>, Vec<_>) = expected.iter().zip(&matched).partition(|(_, m)| **m);
    Ok(ScriptReport {
        pass: first_failure.is_none(),
        steps,
        first_failure,
        established: established.into_iter().map(|((s, _), _)| s.clone()).collect(),
        missing: missing.into_iter().map(|((s, _), _)| s.clone()).collect(),
    })
}
