//! Synchronization: the collapsing procedure, synchronization level and core.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::transducer::{StateId, Transducer};
use crate::words::Letter;

/// The underlying automaton of a machine: transitions only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    n: usize,
    delta: Vec<Vec<usize>>,
    /// Machine state behind each automaton state.
    origin: Vec<StateId>,
}

impl Automaton {
    /// The automaton on the states that read `X_n` after output has started:
    /// all states of a machine without roots, and the non-pending states
    /// reachable from the initial state otherwise.
    pub fn of(t: &Transducer) -> Automaton {
        let states: Vec<StateId> = if t.roots() > 0 {
            let q0 = t.initial().expect("rooted machines have an initial state");
            let mut s: Vec<StateId> = t.reachable_from(&[q0]).into_iter().filter(|&q| !t.is_pending(q)).collect();
            s.sort_unstable();
            s
        } else {
            t.states().collect()
        };
        let mut index = vec![usize::MAX; t.num_states()];
        for (i, &q) in states.iter().enumerate() {
            index[q] = i;
        }
        let delta = states
            .iter()
            .map(|&q| t.row(q).iter().map(|e| index[e.target]).collect())
            .collect();
        Automaton { n: t.n(), delta, origin: states }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn origin(&self, i: usize) -> StateId {
        self.origin[i]
    }

    pub fn step(&self, q: usize, a: Letter) -> usize {
        self.delta[q][a as usize]
    }

    /// One collapsing step: states with identical transition rows are merged.
    pub fn collapse(&self) -> Automaton {
        let mut classes: HashMap<&Vec<usize>, usize> = HashMap::new();
        let mut class = Vec::with_capacity(self.num_states());
        let mut reps = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            let next = classes.len();
            let c = *classes.entry(row).or_insert(next);
            if c == next {
                reps.push(q);
            }
            class.push(c);
        }
        let delta = reps.iter().map(|&q| self.delta[q].iter().map(|&t| class[t]).collect()).collect();
        let origin = reps.iter().map(|&q| self.origin[q]).collect();
        Automaton { n: self.n, delta, origin }
    }

    /// Collapses until nothing changes; returns the sequence of state counts.
    pub fn collapse_sequence(&self) -> Vec<usize> {
        let mut counts = vec![self.num_states()];
        let mut a = self.clone();
        loop {
            let b = a.collapse();
            if b.num_states() == a.num_states() {
                return counts;
            }
            counts.push(b.num_states());
            a = b;
        }
    }

    pub fn is_synchronizing(&self) -> bool {
        self.collapse_sequence().last() == Some(&1)
    }

    /// Least `k` such that every word of length `k` sends all states to one.
    ///
    /// Uses the pair graph: `f({p,q})` is the longest word keeping the pair
    /// apart, plus one. A cycle among distinct pairs means no such `k`.
    pub fn sync_level(&self) -> Option<usize> {
        let size = self.num_states();
        let pair = |p: usize, q: usize| if p < q { p * size + q } else { q * size + p };
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; size * size];
        let mut depth = vec![0usize; size * size];
        let mut best = 0;
        for p in 0..size {
            for q in p + 1..size {
                let start = pair(p, q);
                if state[start] == 2 {
                    best = best.max(depth[start]);
                    continue;
                }
                let mut stack: Vec<(usize, usize, Letter)> = vec![(p, q, 0)];
                state[start] = 1;
                while let Some(&mut (a, b, ref mut x)) = stack.last_mut() {
                    let id = pair(a, b);
                    if (*x as usize) < self.n {
                        let (na, nb) = (self.delta[a][*x as usize], self.delta[b][*x as usize]);
                        *x += 1;
                        if na == nb {
                            depth[id] = depth[id].max(1);
                            continue;
                        }
                        let nid = pair(na, nb);
                        match state[nid] {
                            0 => {
                                state[nid] = 1;
                                stack.push((na.min(nb), na.max(nb), 0));
                            }
                            1 => return None,
                            _ => depth[id] = depth[id].max(depth[nid] + 1),
                        }
                    } else {
                        state[id] = 2;
                        stack.pop();
                        if let Some(&(pa, pb, _)) = stack.last() {
                            let pid = pair(pa, pb);
                            depth[pid] = depth[pid].max(depth[id] + 1);
                        }
                    }
                }
                best = best.max(depth[start]);
            }
        }
        Some(best)
    }

    /// States reached by words of length exactly `k` from any state.
    pub fn layer(&self, k: usize) -> BTreeSet<usize> {
        let mut current: BTreeSet<usize> = (0..self.num_states()).collect();
        for _ in 0..k {
            current = current.iter().flat_map(|&q| self.delta[q].iter().copied()).collect();
        }
        current
    }
}

/// One collapsing step on the automaton of `t`.
pub fn collapse(t: &Transducer) -> Automaton {
    Automaton::of(t).collapse()
}

pub fn is_synchronizing(t: &Transducer) -> bool {
    Automaton::of(t).is_synchronizing()
}

pub fn minimal_sync_level(t: &Transducer) -> Result<usize> {
    Automaton::of(t).sync_level().ok_or_else(|| {
        Error::NotSynchronizing(format!("the {}-state automaton never collapses to one state", t.num_states()))
    })
}

/// The sub-machine on the states forced by words of the synchronizing length.
/// The result has no initial state.
pub fn core(t: &Transducer) -> Result<Transducer> {
    let aut = Automaton::of(t);
    let k = aut
        .sync_level()
        .ok_or_else(|| Error::NotSynchronizing("cannot take the core of a non-synchronizing machine".into()))?;
    let kept: Vec<StateId> = aut.layer(k).into_iter().map(|i| aut.origin(i)).collect();
    t.restrict(&kept, None)
}

/// Whether every state of a machine without roots is forced.
pub fn is_core(t: &Transducer) -> Result<bool> {
    Ok(core(t)?.num_states() == t.num_states())
}
