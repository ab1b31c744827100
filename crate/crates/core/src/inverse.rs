//! Preimage prefixes and inverse machines.

use std::collections::HashMap;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::image::Analysis;
use crate::minimize::{minimize, minimize_core};
use crate::sync::{core, is_synchronizing};
use crate::transducer::{Edge, StateId, Transducer};
use crate::words::{common_prefix_len, Letter, Word};

/// `L_q(v)`: the greatest common prefix of all inputs at `q` whose output lies
/// in the cone `U_v`.
///
/// The input tree is explored with the output written so far; branches whose
/// output can no longer reach `U_v` (checked against the state images) are
/// cut, and inputs whose output already extends `v` are collected.
pub fn l_map(t: &Transducer, analysis: &Analysis, q: StateId, v: &[Letter], bounds: &Bounds) -> Result<Word> {
    if !analysis.image(q).meets_cone(v) {
        return Err(Error::EmptyPreimage(format!(
            "no output of state `{}` starts with {}",
            t.label(q),
            Word::from(v).display_with(t.n())
        )));
    }
    let mut best: Option<Word> = None;
    let mut stack: Vec<(Word, StateId, Word)> = vec![(Word::new(), q, Word::new())];
    while let Some((w, p, o)) = stack.pop() {
        if o.len() >= v.len() {
            if o.starts_with(v) {
                best = Some(match best {
                    None => w,
                    Some(b) => {
                        let k = common_prefix_len(&b, &w);
                        Word::from(&b[..k])
                    }
                });
                if best.as_ref().is_some_and(|b| b.is_empty()) {
                    break;
                }
            }
            continue;
        }
        if !v.starts_with(&o) || !analysis.image(p).meets_cone(&v[o.len()..]) {
            continue;
        }
        if w.len() >= bounds.preimage_depth {
            return Err(Error::DepthExceeded(format!(
                "preimage of {} at state `{}` not resolved within depth {}",
                Word::from(v).display_with(t.n()),
                t.label(q),
                bounds.preimage_depth
            )));
        }
        for a in t.letters(p).rev() {
            let e = t.edge(p, a)?;
            stack.push((w.with(a), e.target, o.concat(&e.output)));
        }
    }
    best.ok_or_else(|| Error::Internal("preimage exploration found nothing".into()))
}

/// States `(w, q)` of an inverse machine and their rows.
type Closure = (Vec<(Word, StateId)>, Vec<Vec<Edge>>);

/// Forward closure of the inverse states `(w, q)` from `start`.
fn closure(
    t: &Transducer,
    analysis: &Analysis,
    start: (Word, StateId),
    bounds: &Bounds,
) -> Result<Closure> {
    let mut index: HashMap<(Word, StateId), usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut rows = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (w, q) = states[i].clone();
        let space = t.output_space(q);
        let mut row = Vec::new();
        for a in space.children_letters(&w) {
            let wa = w.with(a);
            let phi = l_map(t, analysis, q, &wa, bounds)?;
            let (out, s) = t.evaluate(q, &phi)?;
            if !out.is_prefix_of(&wa) {
                return Err(Error::Internal(format!(
                    "output {} of the preimage prefix does not extend to {}",
                    out.display_with(t.n()),
                    wa.display_with(t.n())
                )));
            }
            let key = (wa.strip_prefix(&out)?, s);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    if states.len() >= bounds.inverse_states {
                        return Err(Error::ResourceLimit(format!(
                            "inverse construction exceeded {} states",
                            bounds.inverse_states
                        )));
                    }
                    index.insert(key.clone(), states.len());
                    states.push(key);
                    states.len() - 1
                }
            };
            row.push(Edge::new(id, phi));
        }
        rows.push(row);
        i += 1;
    }
    Ok((states, rows))
}

fn closure_labels(t: &Transducer, states: &[(Word, StateId)]) -> Vec<String> {
    states
        .iter()
        .map(|(w, q)| {
            let word: String = w
                .iter()
                .map(|&a| if (a as usize) < t.n() { a.to_string() } else { format!("d{}", a as usize - t.n()) })
                .collect::<Vec<_>>()
                .join(".");
            format!("({}/{})", if word.is_empty() { "e" } else { &word }, t.label(*q))
        })
        .collect()
}

/// The minimal machine for `h_{q0}⁻¹`, built from the inverse state `(ε, q0)`.
pub fn invert_initial(t: &Transducer, bounds: &Bounds) -> Result<Transducer> {
    let q0 = t
        .initial()
        .ok_or_else(|| Error::InvalidInput("invert_initial needs an initial state".into()))?;
    let analysis = Analysis::new(t, bounds)?;
    if !analysis.is_homeomorphism(q0) {
        return Err(Error::NotInvertible(format!(
            "initial state `{}` is not a homeomorphism state",
            t.label(q0)
        )));
    }
    let (states, rows) = closure(t, &analysis, (Word::new(), q0), bounds)?;
    let labels = closure_labels(t, &states);
    let inverse = Transducer::new(t.n(), t.roots(), Some(0), labels, rows)?;
    minimize(&inverse, bounds)
}

/// Inverse of a core machine, rooted at state `q`: the inverse of `h_q` is
/// built on the cone of `im(q)` of least address, and its core is minimized.
pub fn invert_core_at(t: &Transducer, analysis: &Analysis, q: StateId, bounds: &Bounds) -> Result<Transducer> {
    let nu = analysis
        .image(q)
        .cones()
        .next()
        .cloned()
        .ok_or_else(|| Error::EmptyPreimage(format!("state `{}` has empty image", t.label(q))))?;
    let phi = l_map(t, analysis, q, &nu, bounds)?;
    let (out, s) = t.evaluate(q, &phi)?;
    let start = (nu.strip_prefix(&out)?, s);
    let (states, rows) = closure(t, analysis, start, bounds)?;
    let labels = closure_labels(t, &states);
    let machine = Transducer::new(t.n(), 0, None, labels, rows)?;
    if !is_synchronizing(&machine) {
        return Err(Error::NotSynchronizing("the inverse is not synchronizing".into()));
    }
    minimize_core(&core(&machine)?, bounds)
}

/// Outcome of the bi-synchronization test for an initial machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BiSync {
    Yes,
    NotSynchronizing,
    InverseNotSynchronizing,
    NotInvertible(String),
}

impl BiSync {
    pub fn holds(&self) -> bool {
        *self == BiSync::Yes
    }
}

pub fn is_bisynchronizing(t: &Transducer, bounds: &Bounds) -> Result<BiSync> {
    if !is_synchronizing(t) {
        return Ok(BiSync::NotSynchronizing);
    }
    let m = minimize(t, bounds)?;
    match invert_initial(&m, bounds) {
        Ok(inv) if is_synchronizing(&inv) => Ok(BiSync::Yes),
        Ok(_) => Ok(BiSync::InverseNotSynchronizing),
        Err(Error::NotInvertible(why)) => Ok(BiSync::NotInvertible(why)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example_g, example_t, identity, pi_r};
    use crate::transducer::product;

    fn b() -> Bounds {
        Bounds::default()
    }

    #[test]
    fn l_map_examples() {
        let id = identity(3);
        let a = Analysis::new(&id, &b()).unwrap();
        assert_eq!(l_map(&id, &a, 0, &[2, 1], &b()).unwrap(), Word::from([2, 1]));
        let p = pi_r(4);
        let a = Analysis::new(&p, &b()).unwrap();
        assert_eq!(l_map(&p, &a, 0, &[2, 3], &b()).unwrap(), Word::from([1, 0]));
        let g = example_g();
        let a = Analysis::new(&g, &b()).unwrap();
        // Inputs 0 and 1 from `a` both write 0.
        assert_eq!(l_map(&g, &a, 0, &[0], &b()).unwrap(), Word::new());
        assert_eq!(l_map(&g, &a, 0, &[1, 2], &b()).unwrap(), Word::from([3]));
        assert!(matches!(l_map(&g, &a, 0, &[2], &b()), Err(Error::EmptyPreimage(_))));
    }

    #[test]
    fn inverse_of_t_composes_to_identity() {
        let t = example_t(3).unwrap().rooted_at(0).unwrap();
        let m = minimize(&t, &b()).unwrap();
        let inv = invert_initial(&m, &b()).unwrap();
        let id = identity(3).rooted_at(0).unwrap();
        assert_eq!(minimize(&product(&m, &inv).unwrap(), &b()).unwrap(), id);
        assert_eq!(minimize(&product(&inv, &m).unwrap(), &b()).unwrap(), id);
        assert_eq!(is_bisynchronizing(&m, &b()).unwrap(), BiSync::Yes);
    }

    #[test]
    fn involutions_invert_to_themselves() {
        let p = pi_r(3).rooted_at(0).unwrap();
        assert_eq!(invert_initial(&p, &b()).unwrap(), p);
        let g = example_g();
        let a = Analysis::new(&g, &b()).unwrap();
        for q in 0..2 {
            assert_eq!(invert_core_at(&g, &a, q, &b()).unwrap(), minimize_core(&g, &b()).unwrap());
        }
    }

    #[test]
    fn non_homeomorphism_state_is_not_invertible() {
        let g = example_g().rooted_at(0).unwrap();
        assert!(matches!(invert_initial(&g, &b()), Err(Error::NotInvertible(_))));
        assert!(matches!(is_bisynchronizing(&g, &b()).unwrap(), BiSync::NotInvertible(_)));
    }
}
