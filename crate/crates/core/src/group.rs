//! Elements of `O_n` and their arithmetic.
//!
//! Products compose left to right: `group_product(g, h)` feeds input through
//! `g` first and then through `h`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::constructions::identity;
use crate::error::{Error, Result};
use crate::image::{Analysis, Orientation};
use crate::inverse::invert_core_at;
use crate::minimize::minimize_core;
use crate::signature::{signature_with, SignatureReport};
use crate::sync::{core, is_synchronizing};
use crate::transducer::{product, Transducer};
use crate::words::{rotation_class_of, RotationClass};

/// A validated element of `O_n`: a minimal, core, bi-synchronizing machine
/// whose states are injective with clopen image, kept in canonical form
/// together with its inverse.
#[derive(Clone)]
pub struct GroupElement {
    machine: Transducer,
    inverse: Transducer,
    analysis: Analysis,
    signature: SignatureReport,
    orientation: Orientation,
}

fn not_in_group(e: Error) -> Error {
    match e {
        Error::NotInGroup(_) | Error::ResourceLimit(_) | Error::InvalidInput(_) => e,
        other => Error::NotInGroup(other.to_string()),
    }
}

impl GroupElement {
    /// Validates `t` as an element of `O_n`. A designated initial state of a
    /// machine without roots is ignored.
    pub fn new(t: &Transducer, bounds: &Bounds) -> Result<GroupElement> {
        if t.roots() > 0 {
            return Err(Error::NotInGroup("machines with dotted roots are not core elements".into()));
        }
        let t = t.without_initial()?;
        t.check_infinite_output().map_err(not_in_group)?;
        if !is_synchronizing(&t) {
            return Err(Error::NotInGroup("not synchronizing".into()));
        }
        if core(&t)?.num_states() != t.num_states() {
            return Err(Error::NotInGroup("not a core: some states are not forced by long words".into()));
        }
        let machine = minimize_core(&t, bounds).map_err(not_in_group)?;
        let analysis = Analysis::new(&machine, bounds).map_err(not_in_group)?;
        if let Some(q) = machine.states().find(|&q| !analysis.is_injective(q)) {
            return Err(Error::NotInGroup(format!("state `{}` is not injective", machine.label(q))));
        }
        let inverse = invert_core_at(&machine, &analysis, 0, bounds).map_err(|e| match e {
            Error::NotSynchronizing(_) => Error::NotInGroup("not bi-synchronizing: the inverse is not synchronizing".into()),
            other => not_in_group(other),
        })?;
        Self::assemble(machine, analysis, inverse)
    }

    fn assemble(machine: Transducer, analysis: Analysis, inverse: Transducer) -> Result<GroupElement> {
        let signature = signature_with(&machine, &analysis).map_err(not_in_group)?;
        let orientation = analysis.orientation(&machine)?;
        Ok(GroupElement { machine, inverse, analysis, signature, orientation })
    }

    /// Builds an element from canonical machines already known to be mutually
    /// inverse elements; images and injectivity are still checked.
    fn from_pair(machine: Transducer, inverse: Transducer, bounds: &Bounds) -> Result<GroupElement> {
        let analysis = Analysis::new(&machine, bounds).map_err(not_in_group)?;
        if let Some(q) = machine.states().find(|&q| !analysis.is_injective(q)) {
            return Err(Error::Internal(format!("product state `{}` is not injective", machine.label(q))));
        }
        Self::assemble(machine, analysis, inverse)
    }

    pub fn identity(n: usize) -> GroupElement {
        let id = identity(n);
        GroupElement::new(&id, &Bounds::default()).expect("the identity is an element")
    }

    pub fn machine(&self) -> &Transducer {
        &self.machine
    }

    pub fn inverse_machine(&self) -> &Transducer {
        &self.inverse
    }

    pub fn analysis(&self) -> &Analysis {
        &self.analysis
    }

    pub fn signature(&self) -> &SignatureReport {
        &self.signature
    }

    pub fn rsig(&self) -> u64 {
        self.signature.rsig
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn n(&self) -> usize {
        self.machine.n()
    }

    pub fn num_states(&self) -> usize {
        self.machine.num_states()
    }

    pub fn is_identity(&self) -> bool {
        self.machine == identity(self.n())
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.machine == other.machine
    }
}

impl Eq for GroupElement {}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({} states)\n{}", self.num_states(), self.machine)
    }
}

fn core_product(a: &Transducer, b: &Transducer, bounds: &Bounds) -> Result<Transducer> {
    let p = product(a, b)?;
    minimize_core(&core(&p)?, bounds)
}

pub fn group_product(g: &GroupElement, h: &GroupElement, bounds: &Bounds) -> Result<GroupElement> {
    if g.n() != h.n() {
        return Err(Error::AlphabetMismatch(format!("n={} vs n={}", g.n(), h.n())));
    }
    let machine = core_product(&g.machine, &h.machine, bounds)?;
    let inverse = core_product(&h.inverse, &g.inverse, bounds)?;
    GroupElement::from_pair(machine, inverse, bounds)
}

pub fn invert_core(g: &GroupElement, bounds: &Bounds) -> Result<GroupElement> {
    GroupElement::from_pair(g.inverse.clone(), g.machine.clone(), bounds)
}

pub fn is_identity(g: &GroupElement) -> bool {
    g.is_identity()
}

/// Equality of elements: canonical forms first, then `g h⁻¹ = 1`.
pub fn equal(g: &GroupElement, h: &GroupElement, bounds: &Bounds) -> Result<bool> {
    if g.n() != h.n() {
        return Ok(false);
    }
    if g.machine == h.machine {
        return Ok(true);
    }
    Ok(group_product(g, &invert_core(h, bounds)?, bounds)?.is_identity())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(usize),
    /// No identity power found; `growth` lists the state counts of
    /// `g, g^2, ...` as far as they were computed.
    ExceedsBound { growth: Vec<usize> },
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "Finite({k})"),
            Order::ExceedsBound { growth } => {
                let g: Vec<String> = growth.iter().map(|k| k.to_string()).collect();
                write!(f, "ExceedsBound(states {})", g.join(","))
            }
        }
    }
}

/// Least `k ≤ bound` with `g^k = 1`. Stops early when a power has more than
/// `bounds.order_states` states.
pub fn order(g: &GroupElement, bound: usize, bounds: &Bounds) -> Result<Order> {
    let mut growth = vec![g.num_states()];
    if g.is_identity() {
        return Ok(Order::Finite(1));
    }
    let mut power = g.machine.clone();
    for k in 2..=bound {
        power = core_product(&power, &g.machine, bounds)?;
        growth.push(power.num_states());
        if power == identity(g.n()) {
            return Ok(Order::Finite(k));
        }
        if power.num_states() > bounds.order_states {
            break;
        }
    }
    Ok(Order::ExceedsBound { growth })
}

/// The action on rotation classes: the unique state `q_w` looping on the
/// representative `w`, and the class of `λ(w, q_w)`.
pub fn rotation_action(g: &GroupElement, c: &RotationClass) -> Result<RotationClass> {
    let t = &g.machine;
    let w = c.representative();
    w.check_alphabet(t.alphabet())?;
    let loops: Vec<_> = t.states().filter(|&q| t.run(q, w).ok() == Some(q)).collect();
    let q = match loops.as_slice() {
        [q] => *q,
        [] => return Err(Error::Internal(format!("no state loops on {w}"))),
        _ => return Err(Error::Internal(format!("{} states loop on {w}", loops.len()))),
    };
    let (out, _) = t.evaluate(q, w)?;
    rotation_class_of(&out).map_err(|_| Error::Internal(format!("empty output on the loop {w}")))
}

/// Representative lengths along the orbit `c, c ḡ, c ḡ², ...` (`steps + 1` entries).
pub fn orbit_lengths(g: &GroupElement, c: &RotationClass, steps: usize) -> Result<Vec<usize>> {
    let mut out = vec![c.len()];
    let mut current = c.clone();
    for _ in 0..steps {
        current = rotation_action(g, &current)?;
        out.push(current.len());
    }
    Ok(out)
}

/// A generator name with an integer exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syllable {
    pub name: String,
    pub power: i32,
}

pub type GroupWord = Vec<Syllable>;

/// Parses words such as `U^-1 T T^2 U`.
pub fn parse_group_word(text: &str) -> Result<GroupWord> {
    text.split_whitespace()
        .map(|tok| {
            let (name, power) = match tok.split_once('^') {
                Some((name, p)) => (
                    name,
                    p.parse::<i32>().map_err(|_| Error::InvalidInput(format!("bad exponent in `{tok}`")))?,
                ),
                None => (tok, 1),
            };
            if name.is_empty() {
                return Err(Error::InvalidInput(format!("missing generator name in `{tok}`")));
            }
            Ok(Syllable { name: name.to_string(), power })
        })
        .collect()
}

pub fn inverse_word(w: &[Syllable]) -> GroupWord {
    w.iter().rev().map(|s| Syllable { name: s.name.clone(), power: -s.power }).collect()
}

/// `[a, b] = a⁻¹ b⁻¹ a b`.
pub fn commutator(a: &[Syllable], b: &[Syllable]) -> GroupWord {
    let mut w = inverse_word(a);
    w.extend(inverse_word(b));
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w
}

/// Left-to-right product of the word.
pub fn evaluate_group_word(
    generators: &BTreeMap<String, GroupElement>,
    word: &[Syllable],
    bounds: &Bounds,
) -> Result<GroupElement> {
    let n = generators
        .values()
        .next()
        .map(|g| g.n())
        .ok_or_else(|| Error::InvalidInput("no generators given".into()))?;
    if generators.values().any(|g| g.n() != n) {
        return Err(Error::AlphabetMismatch("generators over different alphabets".into()));
    }
    let mut acc = GroupElement::identity(n);
    for s in word {
        let g = generators
            .get(&s.name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator `{}`", s.name)))?;
        let factor = if s.power < 0 { invert_core(g, bounds)? } else { g.clone() };
        for _ in 0..s.power.unsigned_abs() {
            acc = group_product(&acc, &factor, bounds)?;
        }
    }
    Ok(acc)
}

pub fn verify_relation(
    generators: &BTreeMap<String, GroupElement>,
    word: &[Syllable],
    bounds: &Bounds,
) -> Result<bool> {
    Ok(evaluate_group_word(generators, word, bounds)?.is_identity())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroFixing {
    FixesBoth,
    Swaps,
}

/// How the classes `[0]` and `[n-1]` move under the rotation action.
pub fn zero_fixing_check(g: &GroupElement) -> Result<ZeroFixing> {
    if g.orientation() == Orientation::Neither {
        return Err(Error::InvalidInput("element neither preserves nor reverses the order".into()));
    }
    let top = (g.n() - 1) as u8;
    let zero = rotation_class_of(&[0])?;
    let last = rotation_class_of(&[top])?;
    let a = rotation_action(g, &zero)?;
    let b = rotation_action(g, &last)?;
    if a == zero && b == last {
        Ok(ZeroFixing::FixesBoth)
    } else if a == last && b == zero {
        Ok(ZeroFixing::Swaps)
    } else {
        Err(Error::Internal(format!("[0] goes to {a} and [{top}] goes to {b}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example_g, example_t, pi_r};

    fn b() -> Bounds {
        Bounds::default()
    }

    fn el(t: &Transducer) -> GroupElement {
        GroupElement::new(t, &b()).unwrap()
    }

    #[test]
    fn g_is_an_involution() {
        let g = el(&example_g());
        assert!(group_product(&g, &g, &b()).unwrap().is_identity());
        assert_eq!(invert_core(&g, &b()).unwrap(), g);
        assert_eq!(order(&g, 8, &b()).unwrap(), Order::Finite(2));
        assert!(!equal(&g, &GroupElement::identity(4), &b()).unwrap());
    }

    #[test]
    fn pi_r_has_order_two() {
        let p = el(&pi_r(5));
        assert_eq!(order(&p, 8, &b()).unwrap(), Order::Finite(2));
        assert_eq!(order(&GroupElement::identity(3), 8, &b()).unwrap(), Order::Finite(1));
        assert_eq!(zero_fixing_check(&p).unwrap(), ZeroFixing::Swaps);
    }

    #[test]
    fn t_times_inverse() {
        let t = el(&example_t(3).unwrap());
        let ti = invert_core(&t, &b()).unwrap();
        assert!(group_product(&t, &ti, &b()).unwrap().is_identity());
        assert!(group_product(&ti, &t, &b()).unwrap().is_identity());
    }

    #[test]
    fn rotation_actions() {
        let t = el(&example_t(3).unwrap());
        let c = rotation_class_of(&[1, 2]).unwrap();
        assert_eq!(rotation_action(&t, &c).unwrap(), rotation_class_of(&[1, 2, 2]).unwrap());
        assert_eq!(orbit_lengths(&t, &c, 4).unwrap(), vec![2, 3, 4, 5, 6]);
        let g = el(&example_g());
        let one = rotation_class_of(&[1]).unwrap();
        let two = rotation_class_of(&[2]).unwrap();
        assert_eq!(rotation_action(&g, &one).unwrap(), two);
        assert_eq!(rotation_action(&g, &two).unwrap(), one);
        assert_eq!(orbit_lengths(&g, &one, 4).unwrap(), vec![1; 5]);
        assert_eq!(zero_fixing_check(&g).unwrap(), ZeroFixing::FixesBoth);
        assert_eq!(zero_fixing_check(&t).unwrap(), ZeroFixing::FixesBoth);
    }

    #[test]
    fn word_parsing() {
        let w = parse_group_word("U^-1 T T^2").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w[0], Syllable { name: "U".into(), power: -1 });
        assert!(parse_group_word("^2").is_err());
        let c = commutator(&w[..1], &w[1..2]);
        assert_eq!(c.iter().map(|s| s.power).collect::<Vec<_>>(), vec![1, -1, -1, 1]);
    }
}
