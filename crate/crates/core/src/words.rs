//! Finite words, eventually periodic infinite words, rotation classes and
//! clopen subsets of Cantor space.
//!
//! Letters of `X_n` are `0..n`. Machines over a disjoint union of `r` Cantor
//! spaces additionally use dotted root letters; these are encoded inside a
//! [`Word`] as `n + a` for the root `a`, and may only appear as the first
//! letter of a word.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = u8;

/// The alphabet `X_n = {0, ..., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=u8::MAX as usize / 2).contains(&n) {
            return Err(Error::InvalidInput(format!("alphabet size {n} out of range")));
        }
        Ok(Alphabet(n))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> + Clone {
        0..self.0 as Letter
    }

    pub fn max_letter(self) -> Letter {
        (self.0 - 1) as Letter
    }
}

/// A finite word. Ordering is lexicographic with prefixes first.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(a: Letter) -> Self {
        Word(vec![a])
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Letter> {
        self.0
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn pop(&mut self) -> Option<Letter> {
        self.0.pop()
    }

    pub fn extend_from(&mut self, other: &[Letter]) {
        self.0.extend_from_slice(other);
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn with(&self, a: Letter) -> Word {
        let mut w = self.clone();
        w.push(a);
        w
    }

    pub fn is_prefix_of(&self, other: &[Letter]) -> bool {
        other.starts_with(&self.0)
    }

    /// `self` and `other` are comparable in the prefix order.
    pub fn comparable(&self, other: &[Letter]) -> bool {
        self.is_prefix_of(other) || other.starts_with(&[]) && self.0.starts_with(other)
    }

    /// `self - prefix`: the suffix left after removing `prefix`.
    pub fn strip_prefix(&self, prefix: &[Letter]) -> Result<Word> {
        self.0
            .strip_prefix(prefix)
            .map(|s| Word(s.to_vec()))
            .ok_or_else(|| {
                Error::Internal(format!(
                    "word subtraction: {} is not a prefix of {}",
                    Word(prefix.to_vec()),
                    self
                ))
            })
    }

    pub fn suffix(&self, from: usize) -> Word {
        Word(self.0[from..].to_vec())
    }

    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        match self.0.iter().find(|&&a| a as usize >= alphabet.size()) {
            Some(a) => Err(Error::InvalidInput(format!(
                "letter {a} out of range for alphabet of size {}",
                alphabet.size()
            ))),
            None => Ok(()),
        }
    }

    /// All words of length `len` over `X_n` in lexicographic order.
    pub fn all_of_length(alphabet: Alphabet, len: usize) -> impl Iterator<Item = Word> {
        let n = alphabet.size();
        let total = n.checked_pow(len as u32).expect("word enumeration overflow");
        (0..total).map(move |mut idx| {
            let mut v = vec![0; len];
            for slot in v.iter_mut().rev() {
                *slot = (idx % n) as Letter;
                idx /= n;
            }
            Word(v)
        })
    }

    /// Renders the word using `n` to recognise dotted root letters.
    pub fn display_with(&self, n: usize) -> String {
        if self.0.is_empty() {
            return "e".to_string();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&a| {
                if a as usize >= n {
                    format!(".{}", a as usize - n)
                } else {
                    a.to_string()
                }
            })
            .collect();
        parts.join(",")
    }

    /// Parses `e`, `0,3,1` or `.2,0,1`; dotted letters become `n + root`.
    pub fn parse_with(text: &str, n: usize, r: usize) -> Result<Word> {
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(Word::new());
        }
        let mut out = Vec::new();
        for (i, part) in text.split(',').enumerate() {
            let part = part.trim();
            if let Some(root) = part.strip_prefix('.') {
                let root: usize = root
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad dotted letter `{part}`")))?;
                if i != 0 {
                    return Err(Error::InvalidInput(format!(
                        "dotted letter `{part}` may only start a word"
                    )));
                }
                if root >= r {
                    return Err(Error::InvalidInput(format!(
                        "dotted letter `{part}` out of range for r={r}"
                    )));
                }
                out.push((n + root) as Letter);
            } else {
                let a: usize = part
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad letter `{part}`")))?;
                if a >= n {
                    return Err(Error::InvalidInput(format!(
                        "letter {a} out of range for alphabet of size {n}"
                    )));
                }
                out.push(a as Letter);
            }
        }
        Ok(Word(out))
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl<const N: usize> From<[Letter; N]> for Word {
    fn from(v: [Letter; N]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Longest common prefix of two slices.
pub fn common_prefix_len(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Greatest common prefix of a non-empty family of words.
pub fn greatest_common_prefix<'a, I>(words: I) -> Option<Word>
where
    I: IntoIterator<Item = &'a Word>,
{
    let mut iter = words.into_iter();
    let first = iter.next()?;
    let mut len = first.len();
    for w in iter {
        len = len.min(common_prefix_len(&first[..len], w));
    }
    Some(Word::from(&first[..len]))
}

/// An element `a w` of `X_{n,r}^+`: a dotted root followed by a word over `X_n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DottedWord {
    pub root: usize,
    pub tail: Word,
}

impl DottedWord {
    pub fn new(root: usize, tail: impl Into<Word>) -> Self {
        DottedWord { root, tail: tail.into() }
    }

    /// The encoded form used inside machines over `X_n`.
    pub fn encode(&self, n: usize) -> Word {
        let mut w = Word::letter((n + self.root) as Letter);
        w.extend_from(&self.tail);
        w
    }

    pub fn decode(word: &[Letter], n: usize) -> Result<Self> {
        match word.split_first() {
            Some((&first, tail)) if first as usize >= n && tail.iter().all(|&a| (a as usize) < n) => {
                Ok(DottedWord { root: first as usize - n, tail: Word::from(tail) })
            }
            _ => Err(Error::InvalidInput(format!(
                "{} is not a dotted word",
                Word::from(word).display_with(n)
            ))),
        }
    }

    pub fn is_prefix_of(&self, other: &DottedWord) -> bool {
        self.root == other.root && self.tail.is_prefix_of(&other.tail)
    }
}

impl fmt::Display for DottedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tail.is_empty() {
            write!(f, ".{}", self.root)
        } else {
            write!(f, ".{},{}", self.root, self.tail)
        }
    }
}

/// The eventually periodic infinite word `preperiod · period^ω`, kept in
/// canonical form: primitive period, shortest preperiod.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvPeriodicWord {
    preperiod: Word,
    period: Word,
}

impl EvPeriodicWord {
    pub fn new(preperiod: impl Into<Word>, period: impl Into<Word>) -> Result<Self> {
        let preperiod = preperiod.into();
        let period = period.into();
        if period.is_empty() {
            return Err(Error::InvalidInput("period of an infinite word must be nonempty".into()));
        }
        Ok(Self::canonical(preperiod, period))
    }

    fn canonical(preperiod: Word, period: Word) -> Self {
        let mut period = primitive_root(&period);
        let mut pre = preperiod.into_vec();
        while let (Some(&last), Some(&plast)) = (pre.last(), period.last()) {
            if last != plast {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        EvPeriodicWord { preperiod: Word(pre), period: Word(period) }
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        (0..len).map(|i| self.letter_at(i)).collect()
    }

    /// `w · self`.
    pub fn prepend(&self, w: &[Letter]) -> Self {
        Self::canonical(Word::from(w).concat(&self.preperiod), self.period.clone())
    }

    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let horizon = self.preperiod.len().max(other.preperiod.len())
            + lcm(self.period.len(), other.period.len());
        for i in 0..horizon {
            match self.letter_at(i).cmp(&other.letter_at(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn display_with(&self, n: usize) -> String {
        let pre = if self.preperiod.is_empty() { String::new() } else { self.preperiod.display_with(n) };
        format!("{}|{}", pre, self.period.display_with(n))
    }

    /// Parses `u|v`, e.g. `0|1,2` for `0 (12)^ω`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let (u, v) = text
            .split_once('|')
            .ok_or_else(|| Error::InvalidInput(format!("`{text}` is not of the form u|v")))?;
        let u = Word::parse_with(u, n, 0)?;
        let v = Word::parse_with(v, n, 0)?;
        Self::new(u, v)
    }
}

impl fmt::Display for EvPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = if self.preperiod.is_empty() { String::new() } else { self.preperiod.to_string() };
        write!(f, "{}|{}", pre, self.period)
    }
}

/// Lexicographic comparison of two eventually periodic words.
pub fn lex_compare_evp(x: &EvPeriodicWord, y: &EvPeriodicWord) -> Ordering {
    x.lex_cmp(y)
}

fn primitive_root(w: &[Letter]) -> Vec<Letter> {
    let len = w.len();
    (1..=len)
        .find(|&p| len.is_multiple_of(p) && (p..len).all(|i| w[i] == w[i - p]))
        .map(|p| w[..p].to_vec())
        .unwrap_or_else(|| w.to_vec())
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Class of a nonempty word under cyclic rotation, represented by its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RotationClass {
    representative: Word,
}

impl RotationClass {
    pub fn of(w: &[Letter]) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidInput("rotation class of the empty word".into()));
        }
        let best = (0..w.len())
            .map(|s| {
                let mut v = w[s..].to_vec();
                v.extend_from_slice(&w[..s]);
                v
            })
            .min()
            .expect("nonempty");
        Ok(RotationClass { representative: Word(best) })
    }

    pub fn representative(&self) -> &Word {
        &self.representative
    }

    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn rotation_class_of(w: &[Letter]) -> Result<RotationClass> {
    RotationClass::of(w)
}

impl fmt::Display for RotationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.representative)
    }
}

/// The ambient space a clopen set lives in: `C_n` when `roots == 0`, else `C_{n,r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub n: usize,
    pub roots: usize,
}

impl Space {
    pub fn cantor(n: usize) -> Self {
        Space { n, roots: 0 }
    }

    pub fn rooted(n: usize, r: usize) -> Self {
        Space { n, roots: r }
    }

    pub fn is_rooted(self) -> bool {
        self.roots > 0
    }

    /// Letters that may follow `w` in this space.
    pub fn children_letters(self, w: &[Letter]) -> std::ops::Range<Letter> {
        if self.roots > 0 && w.is_empty() {
            self.n as Letter..(self.n + self.roots) as Letter
        } else {
            0..self.n as Letter
        }
    }

    pub fn arity(self, w: &[Letter]) -> usize {
        let r = self.children_letters(w);
        (r.end - r.start) as usize
    }

    /// Smallest point of the cone at `w`.
    pub fn cone_min(self, w: &[Letter]) -> EvPeriodicWord {
        let mut pre = Word::from(w);
        if self.roots > 0 && w.is_empty() {
            pre.push(self.n as Letter);
        }
        EvPeriodicWord::canonical(pre, Word::letter(0))
    }

    /// Largest point of the cone at `w`.
    pub fn cone_max(self, w: &[Letter]) -> EvPeriodicWord {
        let mut pre = Word::from(w);
        if self.roots > 0 && w.is_empty() {
            pre.push((self.n + self.roots - 1) as Letter);
        }
        EvPeriodicWord::canonical(pre, Word::letter((self.n - 1) as Letter))
    }

    pub fn check_word(self, w: &[Letter]) -> Result<()> {
        for (i, &a) in w.iter().enumerate() {
            let ok = if i == 0 && self.roots > 0 {
                (self.n..self.n + self.roots).contains(&(a as usize))
            } else {
                (a as usize) < self.n
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "word {} does not address a cone of this space",
                    Word::from(w).display_with(self.n)
                )));
            }
        }
        Ok(())
    }
}

/// A clopen subset of `C_n` (or `C_{n,r}`) stored as its canonical antichain
/// of cone addresses: pairwise prefix-incomparable, with no complete sibling
/// family present. The canonical antichain is also the smallest cone cover.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClopenSet {
    space: Space,
    cones: BTreeSet<Word>,
}

impl ClopenSet {
    pub fn empty(space: Space) -> Self {
        ClopenSet { space, cones: BTreeSet::new() }
    }

    pub fn whole(space: Space) -> Self {
        ClopenSet { space, cones: std::iter::once(Word::new()).collect() }
    }

    pub fn cone(space: Space, w: impl Into<Word>) -> Result<Self> {
        Self::from_cones(space, std::iter::once(w.into()))
    }

    /// Canonical form of the union of the given cones.
    pub fn from_cones<I: IntoIterator<Item = Word>>(space: Space, cones: I) -> Result<Self> {
        let cones: Vec<Word> = cones.into_iter().collect();
        for c in &cones {
            space.check_word(c)?;
        }
        Ok(Self::canonicalize(space, cones))
    }

    pub(crate) fn from_cones_unchecked<I: IntoIterator<Item = Word>>(space: Space, cones: I) -> Self {
        Self::canonicalize(space, cones)
    }

    fn canonicalize(space: Space, cones: impl IntoIterator<Item = Word>) -> Self {
        let mut sorted: Vec<Word> = cones.into_iter().collect();
        sorted.sort_unstable();
        // In sorted order every extension of w follows w directly, and the
        // members of a complete sibling family end up adjacent on the stack.
        let mut stack: Vec<Word> = Vec::with_capacity(sorted.len());
        for w in sorted {
            if stack.last().is_some_and(|l| l.is_prefix_of(&w)) {
                continue;
            }
            stack.push(w);
            while let Some(parent) = Self::complete_family_on_top(space, &stack) {
                let arity = space.arity(&parent);
                stack.truncate(stack.len() - arity);
                stack.push(parent);
            }
        }
        ClopenSet { space, cones: stack.into_iter().collect() }
    }

    /// The parent of the top of the stack when all its children sit on top.
    fn complete_family_on_top(space: Space, stack: &[Word]) -> Option<Word> {
        let top = stack.last()?;
        let parent = top.parent()?;
        let letters = space.children_letters(&parent);
        let arity = (letters.end - letters.start) as usize;
        if stack.len() < arity {
            return None;
        }
        let family = &stack[stack.len() - arity..];
        let complete = family.iter().zip(letters).all(|(w, a)| {
            w.len() == parent.len() + 1 && w[w.len() - 1] == a && w.starts_with(&parent)
        });
        complete.then_some(parent)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn cones(&self) -> impl ExactSizeIterator<Item = &Word> {
        self.cones.iter()
    }

    /// Size of the canonical antichain, i.e. the smallest number of cones
    /// covering the set.
    pub fn antichain_size(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cones.len() == 1 && self.cones.iter().next().is_some_and(|w| w.is_empty())
    }

    pub fn max_depth(&self) -> usize {
        self.cones.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", self.space, other.space)));
        }
        Ok(())
    }

    /// Membership of the cone at `w` (every point extending `w` lies in the set).
    pub fn contains_cone(&self, w: &[Letter]) -> bool {
        (0..=w.len()).any(|k| self.cones.contains(&Word::from(&w[..k])))
    }

    /// Whether some point of the set starts with `w`.
    pub fn meets_cone(&self, w: &[Letter]) -> bool {
        self.contains_cone(w) || self.cones.range(Word::from(w)..).next().is_some_and(|c| c.starts_with(w))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self::canonicalize(self.space, self.cones.iter().chain(&other.cones).cloned()))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = BTreeSet::new();
        for a in &self.cones {
            for b in &other.cones {
                if a.is_prefix_of(b) {
                    out.insert(b.clone());
                } else if b.is_prefix_of(a) {
                    out.insert(a.clone());
                }
            }
        }
        Ok(Self::canonicalize(self.space, out))
    }

    pub fn complement(&self) -> Self {
        let mut out = BTreeSet::new();
        self.complement_below(&Word::new(), &mut out);
        Self::canonicalize(self.space, out)
    }

    fn complement_below(&self, node: &Word, out: &mut BTreeSet<Word>) {
        if self.cones.contains(node) {
            return;
        }
        let has_extension = self.cones.range(node.clone()..).next().is_some_and(|c| c.starts_with(node));
        if !has_extension {
            out.insert(node.clone());
            return;
        }
        for a in self.space.children_letters(node) {
            self.complement_below(&node.with(a), out);
        }
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.intersection(&other.complement())
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        self.check_space(other)?;
        Ok(self
            .cones
            .iter()
            .all(|a| other.cones.iter().all(|b| !a.is_prefix_of(b) && !b.is_prefix_of(a))))
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check_space(other)?;
        Ok(self.cones.iter().all(|a| other.contains_cone(a)))
    }

    /// The set `prefix · self`, viewed inside `space`.
    pub fn prefixed(&self, prefix: &[Letter], space: Space) -> Self {
        Self::canonicalize(space, self.cones.iter().map(|c| Word::from(prefix).concat(c)))
    }

    /// Least point of the set (lexicographically).
    pub fn min_point(&self) -> Option<EvPeriodicWord> {
        self.cones.iter().next().map(|w| self.space.cone_min(w))
    }

    /// Greatest point of the set (lexicographically).
    pub fn max_point(&self) -> Option<EvPeriodicWord> {
        self.cones.iter().next_back().map(|w| self.space.cone_max(w))
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self.cones.iter().map(|w| w.display_with(self.space.n)).collect();
        format!("{{{}}}", parts.join("; "))
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClopenSet{}", self.display())
    }
}

/// Canonical antichain with the same union as `cones`.
pub fn canonicalize_clopen(n: usize, cones: impl IntoIterator<Item = Word>) -> Result<ClopenSet> {
    Alphabet::new(n)?;
    ClopenSet::from_cones(Space::cantor(n), cones)
}
