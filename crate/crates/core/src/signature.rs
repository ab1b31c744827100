//! Signatures, reduced signatures, membership in `O_{n,r}` / `TO_{n,r}` and
//! the arithmetic of the units of `Z_{n-1}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::image::{Analysis, Orientation};
use crate::sync::minimal_sync_level;
use crate::transducer::Transducer;
use crate::words::{gcd, lcm, Word};

/// Largest `n^k` for which the per-word list is materialized.
const PER_WORD_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub sync_level: usize,
    /// `m` of the state forced by each word of length `sync_level`, words in
    /// lexicographic order; omitted when there are too many words.
    pub per_word_m: Option<Vec<usize>>,
    pub sig: u128,
    pub rsig: u64,
}

/// `sig mod (n-1)` as a residue in `1..=n-1`.
pub fn reduce(sig: u128, n: usize) -> u64 {
    if n == 2 {
        return 1;
    }
    let m = (n - 1) as u128;
    match (sig % m) as u64 {
        0 => (n - 1) as u64,
        r => r,
    }
}

/// Signature of a synchronizing machine whose states are injective with
/// clopen image.
pub fn signature_with(t: &Transducer, analysis: &Analysis) -> Result<SignatureReport> {
    if t.roots() > 0 {
        return Err(Error::InvalidInput("signatures are defined for machines without roots".into()));
    }
    if let Some(q) = t.states().find(|&q| !analysis.is_injective(q)) {
        return Err(Error::NotInGroup(format!("state `{}` is not injective", t.label(q))));
    }
    let k = minimal_sync_level(t)?;
    let n = t.n();
    let mut counts = vec![0u128; t.num_states()];
    counts[0] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; t.num_states()];
        for q in t.states() {
            if counts[q] > 0 {
                for e in t.row(q) {
                    next[e.target] += counts[q];
                }
            }
        }
        counts = next;
    }
    let sig = t.states().map(|q| counts[q] * analysis.m(q) as u128).sum();
    let per_word_m = n
        .checked_pow(k as u32)
        .filter(|&total| total <= PER_WORD_LIMIT)
        .map(|_| {
            Word::all_of_length(t.alphabet(), k)
                .map(|w| analysis.m(t.run(0, &w).expect("letters in range")))
                .collect()
        });
    Ok(SignatureReport { sync_level: k, per_word_m, sig, rsig: reduce(sig, n) })
}

pub fn signature(t: &Transducer, bounds: &Bounds) -> Result<SignatureReport> {
    signature_with(t, &Analysis::new(t, bounds)?)
}

/// `rsig(T⁻¹)` read off `T` directly: for a cone `U_ν ⊆ im(q)` and `j` large
/// enough that every output of length-`j` inputs at `q` has length at least
/// `|ν|`, count the inputs of length `j` whose output extends `ν`.
pub fn rsig_inverse_direct_with(t: &Transducer, analysis: &Analysis) -> Result<u64> {
    let n = t.n();
    if n == 2 {
        return Ok(1);
    }
    let q = 0;
    let nu = analysis
        .image(q)
        .cones()
        .next()
        .cloned()
        .ok_or_else(|| Error::EmptyPreimage("state has empty image".into()))?;
    // Least j with every length-j output at q at least |ν| long.
    let mut minlen = vec![0usize; t.num_states()];
    let mut j = 0;
    let cap = (nu.len() + 1) * (t.num_states() + 1);
    while minlen[q] < nu.len() {
        minlen = t
            .states()
            .map(|p| t.row(p).iter().map(|e| e.output.len() + minlen[e.target]).min().unwrap())
            .collect();
        j += 1;
        if j > cap {
            return Err(Error::Degenerate("outputs do not grow".into()));
        }
    }
    // Count modulo n-1 over (state, matched length of ν); `done` absorbs.
    let m = (n - 1) as u64;
    let len = nu.len();
    let mut counts = vec![vec![0u64; len]; t.num_states()];
    let mut done = 0u64;
    if len == 0 {
        done = 1;
    } else {
        counts[q][0] = 1;
    }
    for _ in 0..j {
        let mut next = vec![vec![0u64; len]; t.num_states()];
        let mut next_done = done * n as u64 % m;
        for p in t.states() {
            for (matched, &c) in counts[p].iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for e in t.row(p) {
                    let rest = &nu[matched..];
                    let k = e.output.len().min(rest.len());
                    if e.output[..k] != rest[..k] {
                        continue;
                    }
                    if matched + k == len {
                        next_done = (next_done + c) % m;
                    } else {
                        next[e.target][matched + k] = (next[e.target][matched + k] + c) % m;
                    }
                }
            }
        }
        counts = next;
        done = next_done;
    }
    Ok(if done == 0 { m } else { done })
}

pub fn rsig_inverse_direct(t: &Transducer, bounds: &Bounds) -> Result<u64> {
    rsig_inverse_direct_with(t, &Analysis::new(t, bounds)?)
}

/// A yes/no answer with the reason behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub reason: String,
}

impl Verdict {
    fn yes(reason: impl Into<String>) -> Self {
        Verdict { holds: true, reason: reason.into() }
    }

    fn no(reason: impl Into<String>) -> Self {
        Verdict { holds: false, reason: reason.into() }
    }
}

fn check_r(n: usize, r: usize) -> Result<()> {
    if r == 0 || r > (n - 1).max(1) {
        return Err(Error::InvalidInput(format!("r must lie in 1..={} for n={n}", (n - 1).max(1))));
    }
    Ok(())
}

/// `r (sig - 1) ≡ 0 mod n-1`, given a validated element.
pub fn congruence_holds(n: usize, rsig: u64, r: usize) -> bool {
    n == 2 || (r as u64 * (rsig + (n as u64 - 1) - 1)).is_multiple_of(n as u64 - 1)
}

pub fn member_onr_element(g: &GroupElement, r: usize) -> Result<Verdict> {
    let n = g.n();
    check_r(n, r)?;
    let rsig = g.rsig();
    Ok(if congruence_holds(n, rsig, r) {
        Verdict::yes(format!("r(rsig-1) = {r}({rsig}-1) is divisible by {}", n - 1))
    } else {
        Verdict::no(format!("r(rsig-1) = {r}({rsig}-1) is not divisible by {}", n - 1))
    })
}

pub fn member_onr(t: &Transducer, r: usize, bounds: &Bounds) -> Result<Verdict> {
    check_r(t.n(), r)?;
    match GroupElement::new(t, bounds) {
        Ok(g) => member_onr_element(&g, r),
        Err(e) => Ok(Verdict::no(e.to_string())),
    }
}

pub fn member_tonr_element(g: &GroupElement, r: usize) -> Result<Verdict> {
    let v = member_onr_element(g, r)?;
    if !v.holds {
        return Ok(v);
    }
    Ok(match g.orientation() {
        Orientation::Neither => Verdict::no("neither preserves nor reverses the lexicographic order"),
        o => Verdict::yes(format!("{}; orientation {o}", v.reason)),
    })
}

pub fn member_tonr(t: &Transducer, r: usize, bounds: &Bounds) -> Result<Verdict> {
    check_r(t.n(), r)?;
    match GroupElement::new(t, bounds) {
        Ok(g) => member_tonr_element(&g, r),
        Err(e) => Ok(Verdict::no(e.to_string())),
    }
}

/// Partition of `{1..n-1}`: `r ~ s` iff for every `j` in `sigs`,
/// `r(j-1) ≡ 0` exactly when `s(j-1) ≡ 0` modulo `n-1`.
pub fn signature_class_partition(n: usize, sigs: &[u64]) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n must be at least 2, got {n}")));
    }
    let m = (n - 1) as u64;
    let sigs: BTreeSet<u64> = sigs.iter().copied().collect();
    for &j in &sigs {
        if j == 0 || j > m.max(1) || gcd(j as usize, m as usize) != 1 {
            return Err(Error::InvalidInput(format!("{j} is not a unit residue modulo {m}")));
        }
    }
    let key = |r: usize| -> Vec<bool> {
        sigs.iter().map(|&j| m == 1 || (r as u64 * (j - 1)).is_multiple_of(m)).collect()
    };
    let mut classes: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
    for r in 1..=m.max(1) as usize {
        let k = key(r);
        match classes.iter_mut().find(|(kk, _)| *kk == k) {
            Some((_, members)) => members.push(r),
            None => classes.push((k, vec![r])),
        }
    }
    Ok(classes.into_iter().map(|(_, v)| v).collect())
}

/// The group of units of `Z_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitsGroup {
    pub modulus: u64,
    pub elements: Vec<u64>,
}

impl UnitsGroup {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("modulus must be at least 2, got {m}")));
        }
        let elements = (1..m).filter(|&a| gcd(a as usize, m as usize) == 1).collect();
        Ok(UnitsGroup { modulus: m, elements })
    }

    /// `{a : a i ≡ i mod m}`.
    pub fn subgroup_fixing(&self, i: u64) -> BTreeSet<u64> {
        let m = self.modulus;
        self.elements.iter().copied().filter(|&a| (a * i) % m == i % m).collect()
    }

    /// Subgroup generated by `gens`.
    pub fn generate(&self, gens: impl IntoIterator<Item = u64>) -> BTreeSet<u64> {
        let m = self.modulus;
        let gens: Vec<u64> = gens.into_iter().map(|g| g % m).collect();
        let mut out: BTreeSet<u64> = BTreeSet::from([1 % m]);
        let mut frontier: Vec<u64> = out.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = x * g % m;
                if out.insert(y) {
                    frontier.push(y);
                }
            }
        }
        out
    }
}

pub fn units_lattice(m: u64) -> Result<UnitsGroup> {
    UnitsGroup::new(m)
}

/// Whether the fixers of `i` and `j` generate the fixer of
/// `lcm(gcd(i, m), gcd(j, m))`.
pub fn verify_lcm_claim(m: u64, i: u64, j: u64) -> Result<bool> {
    let u = UnitsGroup::new(m)?;
    let a = u.subgroup_fixing(i);
    let b = u.subgroup_fixing(j);
    let generated = u.generate(a.into_iter().chain(b));
    let target = lcm(gcd(i as usize, m as usize), gcd(j as usize, m as usize)) as u64;
    Ok(generated == u.subgroup_fixing(target))
}

/// Whether the divisors of `n` generate the units of `Z_{n-1}`.
pub fn divisors_generate_units(n: u64) -> Result<bool> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    let u = UnitsGroup::new(n - 1)?;
    let divisors = (1..=n).filter(|d| n.is_multiple_of(*d));
    let generated = u.generate(divisors);
    Ok(generated.into_iter().collect::<Vec<_>>() == u.elements)
}

/// Checks on one element: membership for `i` and a multiple-congruence pass
/// to `j`, and membership for `j` matching membership for `gcd(j, n-1)`.
pub fn membership_monotonicity_check(g: &GroupElement, i: usize, j: usize) -> Result<bool> {
    let n = g.n();
    if n == 2 {
        return Ok(true);
    }
    let m = n - 1;
    let member = |r: usize| congruence_holds(n, g.rsig(), r);
    let reachable = (0..m).any(|k| (k * i) % m == j % m);
    let forward = !(member(i) && reachable) || member(j);
    let via_gcd = member(j) == member(gcd(j, m));
    Ok(forward && via_gcd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example_g, identity, pi_r};

    #[test]
    fn signature_of_g() {
        let s = signature(&example_g(), &Bounds::default()).unwrap();
        assert_eq!(s.sync_level, 1);
        assert_eq!(s.per_word_m, Some(vec![2, 2, 2, 2]));
        assert_eq!((s.sig, s.rsig), (8, 2));
        let s = signature(&identity(5), &Bounds::default()).unwrap();
        assert_eq!((s.sync_level, s.sig, s.rsig), (0, 1, 1));
        assert_eq!(signature(&pi_r(5), &Bounds::default()).unwrap().rsig, 1);
    }

    #[test]
    fn direct_inverse_signature() {
        assert_eq!(rsig_inverse_direct(&example_g(), &Bounds::default()).unwrap(), 2);
        assert_eq!(rsig_inverse_direct(&identity(4), &Bounds::default()).unwrap(), 1);
    }

    #[test]
    fn class_partitions() {
        assert_eq!(signature_class_partition(7, &[1, 5]).unwrap(), vec![vec![1, 2, 4, 5], vec![3, 6]]);
        assert_eq!(signature_class_partition(4, &[1]).unwrap(), vec![vec![1, 2, 3]]);
        assert_eq!(signature_class_partition(4, &[1, 2]).unwrap(), vec![vec![1, 2], vec![3]]);
        assert!(signature_class_partition(7, &[2]).is_err());
    }

    #[test]
    fn units() {
        let u = units_lattice(6).unwrap();
        assert_eq!(u.subgroup_fixing(3), BTreeSet::from([1, 5]));
        assert_eq!(u.subgroup_fixing(1), BTreeSet::from([1]));
        assert!(verify_lcm_claim(12, 2, 3).unwrap());
        assert!(divisors_generate_units(4).unwrap());
        // 1, 2, 4 only reach {1, 2, 4} modulo 7.
        assert!(!divisors_generate_units(8).unwrap());
    }

    #[test]
    fn reduce_residues() {
        assert_eq!(reduce(8, 4), 2);
        assert_eq!(reduce(3, 4), 3);
        assert_eq!(reduce(5, 2), 1);
    }
}
