//! The transducer data model: states, transitions, outputs, evaluation and
//! products.
//!
//! One type covers both kinds of machine. A machine over `X_n` has `roots ==
//! 0`, and may or may not have a designated initial state. A machine over
//! `C_{n,r}` has `roots == r > 0` and an initial state that reads the dotted
//! letters `n..n+r`; every other state reads `0..n`. States reached from the
//! initial state before any output has been written are *pending*: their
//! first nonempty output starts with a dotted letter.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::words::{Alphabet, EvPeriodicWord, Letter, Space, Word};

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub target: StateId,
    pub output: Word,
}

impl Edge {
    pub fn new(target: StateId, output: impl Into<Word>) -> Self {
        Edge { target, output: output.into() }
    }
}

#[derive(Clone)]
pub struct Transducer {
    n: usize,
    roots: usize,
    initial: Option<StateId>,
    labels: Vec<String>,
    edges: Vec<Vec<Edge>>,
    pending: Vec<bool>,
}

/// Structural equality: labels are ignored.
impl PartialEq for Transducer {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.roots == other.roots
            && self.initial == other.initial
            && self.edges == other.edges
    }
}

impl Eq for Transducer {}

impl Transducer {
    pub fn new(
        n: usize,
        roots: usize,
        initial: Option<StateId>,
        labels: Vec<String>,
        edges: Vec<Vec<Edge>>,
    ) -> Result<Self> {
        Alphabet::new(n)?;
        if n + roots > Letter::MAX as usize {
            return Err(Error::InvalidInput(format!("n + r = {} is too large", n + roots)));
        }
        if edges.is_empty() {
            return Err(Error::InvalidInput("a transducer needs at least one state".into()));
        }
        if labels.len() != edges.len() {
            return Err(Error::InvalidInput("one label per state is required".into()));
        }
        let mut seen = HashMap::new();
        for (q, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains(|c: char| c.is_whitespace() || c == ',' || c == '#') {
                return Err(Error::InvalidInput(format!("bad state label `{l}`")));
            }
            if let Some(p) = seen.insert(l.as_str(), q) {
                return Err(Error::InvalidInput(format!("states {p} and {q} share label `{l}`")));
            }
        }
        if roots > 0 && initial.is_none() {
            return Err(Error::InvalidInput("a machine with dotted roots needs an initial state".into()));
        }
        let size = edges.len();
        if let Some(q0) = initial {
            if q0 >= size {
                return Err(Error::InvalidInput(format!("initial state {q0} out of range")));
            }
        }
        let root_reader = |q: StateId| roots > 0 && initial == Some(q);
        for (q, row) in edges.iter().enumerate() {
            let expected = if root_reader(q) { roots } else { n };
            if row.len() != expected {
                return Err(Error::InvalidInput(format!(
                    "state `{}` has {} transitions, expected {expected}",
                    labels[q],
                    row.len()
                )));
            }
            for e in row {
                if e.target >= size {
                    return Err(Error::InvalidInput(format!("transition target {} out of range", e.target)));
                }
                if root_reader(e.target) {
                    return Err(Error::InvalidInput(format!(
                        "state `{}` transitions into the root-reading initial state",
                        labels[q]
                    )));
                }
            }
        }
        let mut pending = vec![false; size];
        if let (true, Some(q0)) = (roots > 0, initial) {
            pending[q0] = true;
            let mut queue = VecDeque::from([q0]);
            while let Some(q) = queue.pop_front() {
                for e in &edges[q] {
                    if e.output.is_empty() && !pending[e.target] {
                        pending[e.target] = true;
                        queue.push_back(e.target);
                    }
                }
            }
        }
        for (q, row) in edges.iter().enumerate() {
            for e in row {
                let out = &e.output;
                let ok = if pending[q] {
                    match out.split_first() {
                        None => true,
                        Some((&a, rest)) => {
                            (n..n + roots).contains(&(a as usize)) && rest.iter().all(|&b| (b as usize) < n)
                        }
                    }
                } else {
                    out.iter().all(|&b| (b as usize) < n)
                };
                if !ok {
                    return Err(Error::InvalidInput(format!(
                        "output {} of state `{}` is not valid here",
                        out.display_with(n),
                        labels[q]
                    )));
                }
                if pending[e.target] && !(pending[q] && out.is_empty()) {
                    return Err(Error::InvalidInput(format!(
                        "state `{}` is reached both before and after a root is written",
                        labels[e.target]
                    )));
                }
            }
        }
        Ok(Transducer { n, roots, initial, labels, edges, pending })
    }

    /// A machine over `X_n` with default labels `q0, q1, ...`.
    pub fn from_edges(n: usize, initial: Option<StateId>, edges: Vec<Vec<Edge>>) -> Result<Self> {
        let labels = (0..edges.len()).map(|q| format!("q{q}")).collect();
        Transducer::new(n, 0, initial, labels, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.n).expect("validated")
    }

    pub fn roots(&self) -> usize {
        self.roots
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn states(&self) -> Range<StateId> {
        0..self.edges.len()
    }

    pub fn label(&self, q: StateId) -> &str {
        &self.labels[q]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn state_by_label(&self, label: &str) -> Option<StateId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn state(&self, label: &str) -> Result<StateId> {
        self.state_by_label(label)
            .ok_or_else(|| Error::InvalidInput(format!("no state named `{label}`")))
    }

    pub fn reads_roots(&self, q: StateId) -> bool {
        self.roots > 0 && self.initial == Some(q)
    }

    pub fn is_pending(&self, q: StateId) -> bool {
        self.pending[q]
    }

    /// Letters readable at `q`.
    pub fn letters(&self, q: StateId) -> Range<Letter> {
        if self.reads_roots(q) {
            self.n as Letter..(self.n + self.roots) as Letter
        } else {
            0..self.n as Letter
        }
    }

    pub fn input_space(&self, q: StateId) -> Space {
        if self.reads_roots(q) {
            Space::rooted(self.n, self.roots)
        } else {
            Space::cantor(self.n)
        }
    }

    pub fn output_space(&self, q: StateId) -> Space {
        if self.pending[q] {
            Space::rooted(self.n, self.roots)
        } else {
            Space::cantor(self.n)
        }
    }

    pub fn row(&self, q: StateId) -> &[Edge] {
        &self.edges[q]
    }

    pub fn rows(&self) -> &[Vec<Edge>] {
        &self.edges
    }

    /// The transition on letter `a` at `q`, with `a` checked against `q`'s letters.
    pub fn edge(&self, q: StateId, a: Letter) -> Result<&Edge> {
        let range = self.letters(q);
        if !range.contains(&a) {
            return Err(Error::InvalidInput(format!(
                "letter {} cannot be read at state `{}`",
                Word::letter(a).display_with(self.n),
                self.labels[q]
            )));
        }
        Ok(&self.edges[q][(a - range.start) as usize])
    }

    pub fn target(&self, q: StateId, a: Letter) -> StateId {
        self.edges[q][(a - self.letters(q).start) as usize].target
    }

    pub fn output(&self, q: StateId, a: Letter) -> &Word {
        &self.edges[q][(a - self.letters(q).start) as usize].output
    }

    /// `(λ(w, q), π(w, q))`.
    pub fn evaluate(&self, q: StateId, w: &[Letter]) -> Result<(Word, StateId)> {
        if q >= self.num_states() {
            return Err(Error::InvalidInput(format!("state {q} out of range")));
        }
        let mut out = Word::new();
        let mut state = q;
        for &a in w {
            let e = self.edge(state, a)?;
            out.extend_from(&e.output);
            state = e.target;
        }
        Ok((out, state))
    }

    /// `π(w, q)`.
    pub fn run(&self, q: StateId, w: &[Letter]) -> Result<StateId> {
        let mut state = q;
        for &a in w {
            state = self.edge(state, a)?.target;
        }
        Ok(state)
    }

    /// The image of an eventually periodic word under `h_q`.
    pub fn evaluate_periodic(&self, q: StateId, x: &EvPeriodicWord) -> Result<EvPeriodicWord> {
        let (mut out, mut state) = self.evaluate(q, x.preperiod())?;
        let mut seen: HashMap<StateId, usize> = HashMap::new();
        loop {
            if let Some(&start) = seen.get(&state) {
                let period = out.suffix(start);
                if period.is_empty() {
                    return Err(Error::Degenerate(format!(
                        "reading {} from state `{}` produces finite output",
                        x,
                        self.labels[q]
                    )));
                }
                return EvPeriodicWord::new(Word::from(&out[..start]), period);
            }
            seen.insert(state, out.len());
            let (o, s) = self.evaluate(state, x.period())?;
            out.extend_from(&o);
            state = s;
        }
    }

    /// States reachable from `starts`, in breadth-first order with letters increasing.
    pub fn reachable_from(&self, starts: &[StateId]) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for &s in starts {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for e in &self.edges[q] {
                if !seen[e.target] {
                    seen[e.target] = true;
                    queue.push_back(e.target);
                }
            }
        }
        order
    }

    /// Keeps the states listed in `order`, renumbered by position. The kept set
    /// must be closed under transitions.
    pub fn restrict(&self, order: &[StateId], initial: Option<StateId>) -> Result<Transducer> {
        let mut index = vec![usize::MAX; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            index[q] = i;
        }
        let mut edges = Vec::with_capacity(order.len());
        for &q in order {
            let mut row = Vec::with_capacity(self.edges[q].len());
            for e in &self.edges[q] {
                let t = index[e.target];
                if t == usize::MAX {
                    return Err(Error::Internal(format!(
                        "restriction is not closed: `{}` leaves the kept states",
                        self.labels[q]
                    )));
                }
                row.push(Edge::new(t, e.output.clone()));
            }
            edges.push(row);
        }
        let labels = order.iter().map(|&q| self.labels[q].clone()).collect();
        let initial = match initial {
            Some(q) if index[q] == usize::MAX => {
                return Err(Error::Internal("initial state not kept".into()));
            }
            Some(q) => Some(index[q]),
            None => None,
        };
        let roots = if initial.is_some() { self.roots } else { 0 };
        Transducer::new(self.n, roots, initial, labels, edges)
    }

    /// Drops states not reachable from the initial state (all states are kept
    /// for machines without one). Order is breadth-first from the initial state.
    pub fn accessible(&self) -> Result<Transducer> {
        match self.initial {
            Some(q0) => self.restrict(&self.reachable_from(&[q0]), Some(q0)),
            None => Ok(self.clone()),
        }
    }

    /// The same machine observed from state `q` (machines over `X_n` only).
    pub fn rooted_at(&self, q: StateId) -> Result<Transducer> {
        if self.roots > 0 {
            return Err(Error::InvalidInput("cannot re-root a machine with dotted roots".into()));
        }
        if q >= self.num_states() {
            return Err(Error::InvalidInput(format!("state {q} out of range")));
        }
        let mut t = self.clone();
        t.initial = Some(q);
        Ok(t)
    }

    /// The same machine with no designated initial state.
    pub fn without_initial(&self) -> Result<Transducer> {
        if self.roots > 0 {
            return Err(Error::InvalidInput("machines with dotted roots keep their initial state".into()));
        }
        let mut t = self.clone();
        t.initial = None;
        Ok(t)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Transducer> {
        if labels.len() != self.num_states() {
            return Err(Error::InvalidInput("one label per state is required".into()));
        }
        self.labels = labels;
        Transducer::new(self.n, self.roots, self.initial, self.labels, self.edges)
    }

    /// Every output has length one.
    pub fn is_synchronous(&self) -> bool {
        self.edges.iter().flatten().all(|e| e.output.len() == 1)
    }

    /// Fails when some cycle of transitions writes nothing, so that an
    /// infinite input could produce a finite output.
    pub fn check_infinite_output(&self) -> Result<()> {
        // Colour-marking DFS over the graph of empty-output edges.
        let size = self.num_states();
        let mut colour = vec![0u8; size];
        for s in 0..size {
            if colour[s] != 0 {
                continue;
            }
            let mut stack = vec![(s, 0usize)];
            colour[s] = 1;
            while let Some(&mut (q, ref mut i)) = stack.last_mut() {
                let row = &self.edges[q];
                if *i < row.len() {
                    let e = &row[*i];
                    *i += 1;
                    if !e.output.is_empty() {
                        continue;
                    }
                    match colour[e.target] {
                        0 => {
                            colour[e.target] = 1;
                            stack.push((e.target, 0));
                        }
                        1 => {
                            return Err(Error::Degenerate(format!(
                                "state `{}` lies on a cycle with empty output",
                                self.labels[e.target]
                            )))
                        }
                        _ => {}
                    }
                } else {
                    colour[q] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// A copy with labels made unique by suffixing duplicates.
    pub(crate) fn build_with_fresh_labels(
        n: usize,
        roots: usize,
        initial: Option<StateId>,
        labels: Vec<String>,
        edges: Vec<Vec<Edge>>,
    ) -> Result<Transducer> {
        let mut used: HashMap<String, usize> = HashMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let count = used.entry(l.clone()).or_insert(0);
            *count += 1;
            if *count == 1 {
                out.push(l);
            } else {
                let mut k = *count;
                loop {
                    let candidate = format!("{l}_{k}");
                    if !used.contains_key(&candidate) {
                        used.insert(candidate.clone(), 1);
                        out.push(candidate);
                        break;
                    }
                    k += 1;
                }
            }
        }
        Transducer::new(n, roots, initial, out, edges)
    }
}

impl fmt::Debug for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::to_text(self))
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::to_text(self))
    }
}

/// The product `A * B`: input is read by `A`, whose output is fed to `B`.
///
/// Without initial states the state set is `Q_A × Q_B` with state `(q, p)` at
/// index `q·|Q_B| + p`. With initial states only pairs reachable from
/// `(q0_A, q0_B)` are built, in breadth-first order.
pub fn product(a: &Transducer, b: &Transducer) -> Result<Transducer> {
    if a.n != b.n || a.roots != b.roots {
        return Err(Error::AlphabetMismatch(format!(
            "product of machines over (n={}, r={}) and (n={}, r={})",
            a.n, a.roots, b.n, b.roots
        )));
    }
    match (a.initial, b.initial) {
        (None, None) => {
            let nb = b.num_states();
            let mut edges = Vec::with_capacity(a.num_states() * nb);
            let mut labels = Vec::with_capacity(a.num_states() * nb);
            for q in a.states() {
                for p in b.states() {
                    let mut row = Vec::with_capacity(a.n);
                    for e in &a.edges[q] {
                        let (out, t) = b.evaluate(p, &e.output)?;
                        row.push(Edge::new(e.target * nb + t, out));
                    }
                    edges.push(row);
                    labels.push(format!("({};{})", a.labels[q], b.labels[p]));
                }
            }
            Transducer::new(a.n, 0, None, labels, edges)
        }
        (Some(qa), Some(qb)) => product_from(a, qa, b, qb),
        _ => Err(Error::InvalidInput(
            "product needs both machines with initial states or both without".into(),
        )),
    }
}

/// The product `A_{q} * B_{p}` restricted to pairs reachable from `(q, p)`,
/// with `(q, p)` as initial state.
pub fn product_from(a: &Transducer, qa: StateId, b: &Transducer, qb: StateId) -> Result<Transducer> {
    if a.n != b.n {
        return Err(Error::AlphabetMismatch(format!("n={} vs n={}", a.n, b.n)));
    }
    let roots = if a.reads_roots(qa) { a.roots } else { 0 };
    if a.pending[qa] != b.reads_roots(qb) || (roots > 0 && a.roots != b.roots) {
        return Err(Error::AlphabetMismatch("root structure of the two machines differs".into()));
    }
    let mut index: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
    let mut order = vec![(qa, qb)];
    index.insert((qa, qb), 0);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (q, p) = order[i];
        let mut row = Vec::with_capacity(a.edges[q].len());
        for e in &a.edges[q] {
            let (out, t) = b.evaluate(p, &e.output)?;
            let key = (e.target, t);
            let id = *index.entry(key).or_insert_with(|| {
                order.push(key);
                order.len() - 1
            });
            row.push(Edge::new(id, out));
        }
        edges.push(row);
        i += 1;
    }
    let labels = order
        .iter()
        .map(|&(q, p)| format!("({};{})", a.labels[q], b.labels[p]))
        .collect();
    Transducer::new(a.n, roots, Some(0), labels, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example_g, identity, pi_r};

    #[test]
    fn evaluate_example_g() {
        let g = example_g();
        let a = g.state("a").unwrap();
        let b = g.state("b").unwrap();
        assert_eq!(g.evaluate(a, &[1, 3]).unwrap(), (Word::from([0, 3]), b));
        assert_eq!(g.evaluate(a, &[2]).unwrap(), (Word::from([1]), a));
        assert_eq!(g.evaluate(a, &[3]).unwrap(), (Word::from([1]), b));
        assert!(g.evaluate(a, &[4]).is_err());
        assert_eq!(g.evaluate(a, &[]).unwrap(), (Word::new(), a));
    }

    #[test]
    fn evaluate_periodic_examples() {
        let g = example_g();
        let a = g.state("a").unwrap();
        let x = EvPeriodicWord::new([], [2]).unwrap();
        assert_eq!(g.evaluate_periodic(a, &x).unwrap(), EvPeriodicWord::new([], [1]).unwrap());
        let p = pi_r(4);
        let x = EvPeriodicWord::new([0], [1]).unwrap();
        assert_eq!(p.evaluate_periodic(0, &x).unwrap(), EvPeriodicWord::new([3], [2]).unwrap());
        let id = identity(3);
        let x = EvPeriodicWord::new([], [0, 1, 2]).unwrap();
        assert_eq!(id.evaluate_periodic(0, &x).unwrap(), x);
    }

    #[test]
    fn empty_output_cycle_is_degenerate() {
        let t = Transducer::from_edges(2, None, vec![vec![Edge::new(0, []), Edge::new(0, [1])]]).unwrap();
        assert!(t.check_infinite_output().is_err());
        let x = EvPeriodicWord::new([], [0]).unwrap();
        assert!(matches!(t.evaluate_periodic(0, &x), Err(Error::Degenerate(_))));
    }

    #[test]
    fn product_table_is_composition() {
        let g = example_g();
        let gg = product(&g, &g).unwrap();
        assert_eq!(gg.num_states(), 4);
        for w in Word::all_of_length(g.alphabet(), 4) {
            let (o1, s1) = g.evaluate(0, &w).unwrap();
            let (o2, s2) = g.evaluate(0, &o1).unwrap();
            assert_eq!(gg.evaluate(0, &w).unwrap(), (o2, s1 * 2 + s2));
        }
    }

    #[test]
    fn rejects_missing_transition_and_bad_outputs() {
        assert!(Transducer::from_edges(2, None, vec![vec![Edge::new(0, [0])]]).is_err());
        assert!(Transducer::from_edges(2, None, vec![vec![Edge::new(0, [2]), Edge::new(0, [1])]]).is_err());
        assert!(Transducer::from_edges(2, None, vec![vec![Edge::new(1, [0]), Edge::new(0, [1])]]).is_err());
    }

    #[test]
    fn rooted_machine_pending_states() {
        // .0 -> e -> p ; p reads 0 -> .0,0 ; 1 -> .0,1 into identity s.
        let edges = vec![
            vec![Edge::new(1, [])],
            vec![Edge::new(2, [2, 0]), Edge::new(2, [2, 1])],
            vec![Edge::new(2, [0]), Edge::new(2, [1])],
        ];
        let labels = vec!["r".into(), "p".into(), "s".into()];
        let t = Transducer::new(2, 1, Some(0), labels, edges).unwrap();
        assert!(t.is_pending(0) && t.is_pending(1) && !t.is_pending(2));
        assert_eq!(t.evaluate(0, &[2, 1, 0]).unwrap().0, Word::from([2, 1, 0]));
    }
}
