//! Built-in machines and constructions of new elements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::minimize::minimize;
use crate::sync::is_synchronizing;
use crate::transducer::{Edge, StateId, Transducer};
use crate::words::{common_prefix_len, Alphabet, ClopenSet, DottedWord, Letter, Space, Word};

fn machine(n: usize, labels: &[&str], rows: Vec<Vec<(usize, Vec<Letter>)>>) -> Result<Transducer> {
    let edges = rows
        .into_iter()
        .map(|row| row.into_iter().map(|(t, w)| Edge::new(t, w)).collect())
        .collect();
    Transducer::new(n, 0, None, labels.iter().map(|s| s.to_string()).collect(), edges)
}

/// The one-state identity over `X_n`.
pub fn identity(n: usize) -> Transducer {
    let row = (0..n as Letter).map(|a| Edge::new(0, [a])).collect();
    Transducer::new(n, 0, None, vec!["q".into()], vec![row]).expect("n >= 2")
}

/// The one-state machine `i ↦ n-1-i`.
pub fn pi_r(n: usize) -> Transducer {
    let row = (0..n as Letter).map(|a| Edge::new(0, [(n - 1) as Letter - a])).collect();
    Transducer::new(n, 0, None, vec!["q".into()], vec![row]).expect("n >= 2")
}

/// The two-state element of `TO_4` with states `a` and `b`.
pub fn example_g() -> Transducer {
    const A: StateId = 0;
    const B: StateId = 1;
    machine(
        4,
        &["a", "b"],
        vec![
            vec![(A, vec![0]), (B, vec![0]), (A, vec![1]), (B, vec![1])],
            vec![(A, vec![2]), (B, vec![2]), (A, vec![3]), (B, vec![3])],
        ],
    )
    .expect("valid table")
}

fn check_n(n: usize) -> Result<Letter> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("this example needs n >= 3, got {n}")));
    }
    Ok((n - 1) as Letter)
}

/// The element `T` of `TO_{n,1}` of infinite order, states `a`, `b`, `c`.
pub fn example_t(n: usize) -> Result<Transducer> {
    let top = check_n(n)?;
    let (a, b, c) = (0, 1, 2);
    let mut rows = vec![Vec::new(), Vec::new(), Vec::new()];
    for x in 0..=top {
        let (ra, rb, rc) = if x == 0 {
            ((c, vec![]), (b, vec![0]), (b, vec![0]))
        } else if x == top {
            ((b, vec![top, top]), (b, vec![top]), (b, vec![top, 0]))
        } else {
            ((a, vec![top, x]), (a, vec![x]), (a, vec![x]))
        };
        rows[a].push(ra);
        rows[b].push(rb);
        rows[c].push(rc);
    }
    machine(n, &["a", "b", "c"], rows)
}

/// The element `U` of `TO_{n,1}` of infinite order, states `p`, `q`, `s`, `t`.
pub fn example_u(n: usize) -> Result<Transducer> {
    let top = check_n(n)?;
    let (p, q, s, t) = (0, 1, 2, 3);
    let mut rows = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for x in 0..=top {
        let row = if x == 0 {
            [(q, vec![0]), (t, vec![]), (s, vec![0]), (s, vec![0])]
        } else if x == top {
            [(s, vec![top]), (s, vec![top, top]), (s, vec![top]), (s, vec![top, 0])]
        } else {
            [(p, vec![x]), (p, vec![top, x]), (p, vec![x]), (p, vec![x])]
        };
        for (i, e) in row.into_iter().enumerate() {
            rows[i].push(e);
        }
    }
    machine(n, &["p", "q", "s", "t"], rows)
}

/// The subtransducer of `T` on the letters `0` and `n-1`, recoded over `X_2`.
pub fn example_a(n: usize) -> Result<Transducer> {
    check_n(n)?;
    machine(
        2,
        &["a", "b", "c"],
        vec![
            vec![(2, vec![]), (1, vec![1, 1])],
            vec![(1, vec![0]), (1, vec![1])],
            vec![(1, vec![0]), (1, vec![1, 0])],
        ],
    )
}

/// The subtransducer of `U` on the letters `0` and `n-1`, recoded over `X_2`.
pub fn example_b(n: usize) -> Result<Transducer> {
    check_n(n)?;
    machine(
        2,
        &["p", "q", "s", "t"],
        vec![
            vec![(1, vec![0]), (2, vec![1])],
            vec![(3, vec![]), (2, vec![1, 1])],
            vec![(2, vec![0]), (2, vec![1])],
            vec![(2, vec![0]), (2, vec![1, 0])],
        ],
    )
}

/// Initial machine over `C_{n,r}` writing each root unchanged and then
/// copying the input.
pub fn identity_initial(n: usize, r: usize) -> Result<Transducer> {
    rooted_wrapper(n, r, |a| a, identity(n))
}

/// Initial machine `ȧ ξ ↦ (r-1-a)˙ π_R(ξ)` over `C_{n,r}`.
pub fn pi_r_initial(n: usize, r: usize) -> Result<Transducer> {
    rooted_wrapper(n, r, |a| r - 1 - a, pi_r(n))
}

fn rooted_wrapper(n: usize, r: usize, root_map: impl Fn(usize) -> usize, body: Transducer) -> Result<Transducer> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let roots: Vec<Word> = (0..r).map(|a| DottedWord::new(a, Word::new()).encode(n)).collect();
    let range: Vec<(Word, StateId)> = (0..r).map(|a| (DottedWord::new(root_map(a), Word::new()).encode(n), 0)).collect();
    assemble_rooted(n, r, &roots, &range, &body)
}

/// Machine over `C_{n,r}` mapping `u_i ξ ↦ v_i h_{p_i}(ξ)`, where `domain` holds
/// the encoded `u_i` and `range` the pairs `(v_i, p_i)` with `p_i` a state of
/// `body`. The domain must be a complete antichain; the result is not
/// minimized.
pub(crate) fn assemble_rooted(
    n: usize,
    r: usize,
    domain: &[Word],
    range: &[(Word, StateId)],
    body: &Transducer,
) -> Result<Transducer> {
    if domain.len() != range.len() {
        return Err(Error::InvalidInput("domain and range differ in size".into()));
    }
    let mut nodes: BTreeMap<Word, usize> = BTreeMap::new();
    nodes.insert(Word::new(), 0);
    for u in domain {
        for k in 1..u.len() {
            let next = nodes.len();
            nodes.entry(Word::from(&u[..k])).or_insert(next);
        }
    }
    let leaves: BTreeMap<&Word, usize> = domain.iter().enumerate().map(|(i, u)| (u, i)).collect();
    let space = Space::rooted(n, r);
    let offset = nodes.len();
    let mut edges = vec![Vec::new(); offset];
    let mut labels = vec![String::new(); offset];
    for (w, &id) in &nodes {
        labels[id] = format!("u{id}");
        for a in space.children_letters(w) {
            let child = w.with(a);
            let edge = if let Some(&i) = leaves.get(&child) {
                let (v, p) = &range[i];
                Edge::new(offset + p, v.clone())
            } else if let Some(&c) = nodes.get(&child) {
                Edge::new(c, Word::new())
            } else {
                return Err(Error::InvalidInput(format!(
                    "domain is not a complete antichain: {} is not covered",
                    child.display_with(n)
                )));
            };
            edges[id].push(edge);
        }
    }
    for q in body.states() {
        labels.push(body.label(q).to_string());
        edges.push(body.row(q).iter().map(|e| Edge::new(offset + e.target, e.output.clone())).collect());
    }
    Transducer::build_with_fresh_labels(n, r, Some(0), labels, edges)
}

/// `⊕_d T` over `X_n` for a synchronous, synchronizing machine `t` over `X_d`
/// whose states all permute `X_d`.
///
/// State `q(i)` copies `T` on the letters `di..di+d-1`; on a letter `dj+b` of
/// another block it writes `di+b` and moves to `q_b(j)`, where `q_b` is the
/// state that `b` fixes.
pub fn oplus(d: usize, t: &Transducer, n: usize) -> Result<Transducer> {
    if d < 2 || d >= n || !n.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!("d={d} must be a proper divisor of n={n} with d >= 2")));
    }
    if t.n() != d || t.roots() > 0 {
        return Err(Error::AlphabetMismatch(format!("T must act on X_{d} without roots")));
    }
    let t = t.without_initial()?;
    if !t.is_synchronous() {
        return Err(Error::InvalidInput("T is not synchronous".into()));
    }
    if !is_synchronizing(&t) {
        return Err(Error::InvalidInput("T is not synchronizing".into()));
    }
    for q in t.states() {
        let mut outs: Vec<Letter> = t.row(q).iter().map(|e| e.output[0]).collect();
        outs.sort_unstable();
        if outs != (0..d as Letter).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!("state `{}` does not permute X_{d}", t.label(q))));
        }
    }
    // The state forced by b^k is the unique state fixed by b.
    let fixed: Vec<StateId> = (0..d as Letter)
        .map(|b| {
            let mut q = 0;
            for _ in 0..t.num_states() {
                q = t.target(q, b);
            }
            q
        })
        .collect();
    let m = n / d;
    let size = t.num_states();
    let id = |q: StateId, i: usize| i * size + q;
    let mut edges = Vec::with_capacity(m * size);
    let mut labels = Vec::with_capacity(m * size);
    for i in 0..m {
        for q in t.states() {
            labels.push(format!("{}({i})", t.label(q)));
            let mut row = Vec::with_capacity(n);
            for j in 0..m {
                for (b, &fixed_b) in fixed.iter().enumerate() {
                    let e = if i == j {
                        let inner = t.edge(q, b as Letter)?;
                        Edge::new(id(inner.target, i), [(d * i) as Letter + inner.output[0]])
                    } else {
                        Edge::new(id(fixed_b, j), [(d * i + b) as Letter])
                    };
                    row.push(e);
                }
            }
            edges.push(row);
        }
    }
    Transducer::build_with_fresh_labels(n, 0, None, labels, edges)
}

/// The one-state machine over `X_d` swapping `0` and `1` and fixing the rest.
pub fn swap01(d: usize) -> Result<Transducer> {
    let row = (0..d as Letter).map(|a| Edge::new(0, [if a < 2 { 1 - a } else { a }])).collect();
    Transducer::new(d, 0, None, vec!["q".into()], vec![row])
}

/// The one-state machine over `X_d` sending `a` to `a+1 mod d`.
pub fn cycle(d: usize) -> Result<Transducer> {
    let row = (0..d).map(|a| Edge::new(0, [((a + 1) % d) as Letter])).collect();
    Transducer::new(d, 0, None, vec!["q".into()], vec![row])
}

/// An element of `G_{n,r}` given by a bijection between two complete antichains
/// of `C_{n,r}`: `domain[i]` is sent to `range[bijection[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixExchange {
    pub n: usize,
    pub r: usize,
    pub domain: Vec<DottedWord>,
    pub range: Vec<DottedWord>,
    pub bijection: Vec<usize>,
}

fn check_complete_antichain(n: usize, r: usize, words: &[DottedWord]) -> Result<Vec<Word>> {
    let mut encoded: Vec<Word> = words
        .iter()
        .map(|w| {
            if w.root >= r {
                return Err(Error::InvalidInput(format!("root {} out of range for r={r}", w.root)));
            }
            w.tail.check_alphabet(Alphabet::new(n)?)?;
            Ok(w.encode(n))
        })
        .collect::<Result<_>>()?;
    let original = encoded.clone();
    encoded.sort();
    for pair in encoded.windows(2) {
        if pair[0].is_prefix_of(&pair[1]) {
            return Err(Error::InvalidInput(format!(
                "{} and {} are comparable",
                pair[0].display_with(n),
                pair[1].display_with(n)
            )));
        }
    }
    let space = Space::rooted(n, r);
    if !ClopenSet::from_cones(space, encoded)?.is_whole() {
        return Err(Error::InvalidInput("antichain does not cover C_{n,r}".into()));
    }
    Ok(original)
}

impl PrefixExchange {
    pub fn new(
        n: usize,
        r: usize,
        domain: Vec<DottedWord>,
        range: Vec<DottedWord>,
        bijection: Vec<usize>,
    ) -> Result<Self> {
        let pe = PrefixExchange { n, r, domain, range, bijection };
        pe.validate()?;
        Ok(pe)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::InvalidInput("r must be positive".into()));
        }
        check_complete_antichain(self.n, self.r, &self.domain)?;
        check_complete_antichain(self.n, self.r, &self.range)?;
        let len = self.domain.len();
        if self.range.len() != len || self.bijection.len() != len {
            return Err(Error::InvalidInput("domain, range and bijection differ in size".into()));
        }
        let mut seen = vec![false; len];
        for &b in &self.bijection {
            if b >= len || std::mem::replace(&mut seen[b], true) {
                return Err(Error::InvalidInput("the index map is not a bijection".into()));
            }
        }
        Ok(())
    }

    /// Whether the map, read on lexicographically sorted antichains, is a
    /// cyclic shift `i ↦ i+j mod ℓ` (the elements of `T_{n,r}`).
    pub fn is_cyclic(&self) -> bool {
        let rank = |words: &[DottedWord]| -> Vec<usize> {
            let mut idx: Vec<usize> = (0..words.len()).collect();
            idx.sort_by_key(|&i| words[i].encode(self.n));
            let mut rank = vec![0; words.len()];
            for (pos, &i) in idx.iter().enumerate() {
                rank[i] = pos;
            }
            rank
        };
        let dr = rank(&self.domain);
        let rr = rank(&self.range);
        let len = self.domain.len();
        let mut shifted: Vec<usize> = vec![0; len];
        for i in 0..len {
            shifted[dr[i]] = rr[self.bijection[i]];
        }
        let j = shifted[0];
        shifted.iter().enumerate().all(|(i, &s)| s == (i + j) % len)
    }
}

/// The minimal initial machine inducing a prefix exchange.
pub fn from_prefix_exchange(pe: &PrefixExchange, bounds: &Bounds) -> Result<Transducer> {
    pe.validate()?;
    let domain: Vec<Word> = pe.domain.iter().map(|w| w.encode(pe.n)).collect();
    let range: Vec<(Word, StateId)> = pe.bijection.iter().map(|&b| (pe.range[b].encode(pe.n), 0)).collect();
    let t = assemble_rooted(pe.n, pe.r, &domain, &range, &identity(pe.n))?;
    minimize(&t, bounds)
}

/// Complete antichain of `C_{n,r}` of the given size, obtained by repeatedly
/// expanding the last cone of the roots. Needs `size ≡ r mod n-1`.
pub(crate) fn expanded_roots(n: usize, r: usize, size: usize) -> Result<Vec<Word>> {
    if size < r || !(size - r).is_multiple_of(n - 1) {
        return Err(Error::InvalidInput(format!("no complete antichain of size {size} in C_{{{n},{r}}}")));
    }
    let mut words: Vec<Word> = (0..r).map(|a| DottedWord::new(a, Word::new()).encode(n)).collect();
    for _ in 0..(size - r) / (n - 1) {
        let last = words.pop().expect("nonempty");
        words.extend((0..n as Letter).map(|a| last.with(a)));
    }
    debug_assert!(words.windows(2).all(|p| p[0] < p[1] && common_prefix_len(&p[0], &p[1]) < p[0].len()));
    Ok(words)
}
