//! Incomplete response, ω-equivalence and minimization.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::transducer::{Edge, StateId, Transducer};
use crate::words::Word;

/// Greatest common prefix of `h_q(δ)` over all infinite inputs `δ`.
///
/// The computation keeps a frontier of pending pairs `(suffix, state)`, each
/// standing for the set `suffix · im(state)`. Empty suffixes are expanded by
/// one transition; once every suffix is nonempty the first letters are
/// compared, and a shared letter is moved into the answer.
pub fn greatest_common_prefix_of_state(t: &Transducer, q: StateId, bounds: &Bounds) -> Result<Word> {
    let mut frontier: BTreeSet<(Word, StateId)> = BTreeSet::from([(Word::new(), q)]);
    let mut prefix = Word::new();
    let mut seen: HashSet<BTreeSet<(Word, StateId)>> = HashSet::new();
    loop {
        let mut rounds = 0;
        while frontier.iter().any(|(s, _)| s.is_empty()) {
            rounds += 1;
            if rounds > t.num_states() + 1 {
                return Err(Error::Degenerate(format!(
                    "state `{}` reaches a cycle with empty output",
                    t.label(q)
                )));
            }
            let mut next = BTreeSet::new();
            for (s, p) in frontier {
                if s.is_empty() {
                    for e in t.row(p) {
                        next.insert((e.output.clone(), e.target));
                    }
                } else {
                    next.insert((s, p));
                }
            }
            frontier = next;
        }
        let first = frontier.iter().next().expect("frontier is never empty").0[0];
        if frontier.iter().any(|(s, _)| s[0] != first) {
            return Ok(prefix);
        }
        prefix.push(first);
        if prefix.len() > bounds.gcp_depth {
            return Err(Error::DepthExceeded(format!(
                "common output prefix of state `{}` is longer than {}",
                t.label(q),
                bounds.gcp_depth
            )));
        }
        frontier = frontier.into_iter().map(|(s, p)| (s.suffix(1), p)).collect();
        if !seen.insert(frontier.clone()) {
            return Err(Error::Degenerate(format!("state `{}` has a one-point image", t.label(q))));
        }
    }
}

pub fn greatest_common_prefixes(t: &Transducer, bounds: &Bounds) -> Result<Vec<Word>> {
    t.check_infinite_output()?;
    t.states().map(|q| greatest_common_prefix_of_state(t, q, bounds)).collect()
}

/// Rows with every state's common prefix moved onto its incoming edges:
/// `λ'(x, p) = G(p)⁻¹ · λ(x, p) · G(π(x, p))`.
fn stripped_rows(t: &Transducer, g: &[Word]) -> Result<Vec<Vec<Edge>>> {
    t.states()
        .map(|p| {
            t.row(p)
                .iter()
                .map(|e| {
                    let full = e.output.concat(&g[e.target]);
                    Ok(Edge::new(e.target, full.strip_prefix(&g[p])?))
                })
                .collect()
        })
        .collect()
}

/// An ω-equivalent machine in which no state has incomplete response.
///
/// Every non-initial state `p` is replaced by `G(p)⁻¹ h_p`. The initial state
/// keeps its full behaviour; if it is also the target of some transition a
/// fresh initial state is added for that purpose. Machines without an initial
/// state have every state stripped.
pub fn remove_incomplete_response(t: &Transducer, bounds: &Bounds) -> Result<Transducer> {
    let g = greatest_common_prefixes(t, bounds)?;
    let mut rows = stripped_rows(t, &g)?;
    let mut labels = t.labels().to_vec();
    let mut initial = t.initial();
    if let Some(q0) = t.initial() {
        if !g[q0].is_empty() {
            let full: Vec<Edge> = t
                .row(q0)
                .iter()
                .map(|e| Edge::new(e.target, e.output.concat(&g[e.target])))
                .collect();
            let is_target = t.rows().iter().flatten().any(|e| e.target == q0);
            if is_target {
                rows.push(full);
                labels.push(format!("{}'", t.label(q0)));
                initial = Some(rows.len() - 1);
            } else {
                rows[q0] = full;
            }
        }
    }
    let roots = t.roots();
    Transducer::build_with_fresh_labels(t.n(), roots, initial, labels, rows)
}

/// Coarsest partition of states with equal outputs letterwise and targets in
/// equal blocks. On a machine without incomplete response this is
/// ω-equivalence.
pub(crate) fn moore_classes(rows: &[Vec<Edge>], reads_roots: &[bool]) -> Vec<usize> {
    let size = rows.len();
    let mut ids: HashMap<(bool, Vec<&Word>), usize> = HashMap::new();
    let mut block: Vec<usize> = (0..size)
        .map(|q| {
            let key = (reads_roots[q], rows[q].iter().map(|e| &e.output).collect());
            let next = ids.len();
            *ids.entry(key).or_insert(next)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let refined: Vec<usize> = (0..size)
            .map(|q| {
                let key = (block[q], rows[q].iter().map(|e| block[e.target]).collect());
                let next = ids.len();
                *ids.entry(key).or_insert(next)
            })
            .collect();
        let new_count = ids.len();
        block = refined;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

fn quotient(t: &Transducer, classes: &[usize], initial: Option<StateId>) -> Result<Transducer> {
    let k = classes.iter().max().map_or(0, |m| m + 1);
    let mut rep = vec![usize::MAX; k];
    for q in t.states() {
        if rep[classes[q]] == usize::MAX {
            rep[classes[q]] = q;
        }
    }
    let edges = rep
        .iter()
        .map(|&q| t.row(q).iter().map(|e| Edge::new(classes[e.target], e.output.clone())).collect())
        .collect();
    let labels = rep.iter().map(|&q| t.label(q).to_string()).collect();
    Transducer::new(t.n(), t.roots(), initial.map(|q| classes[q]), labels, edges)
}

/// Whether `h_{q1} = h_{q2}`.
pub fn omega_equivalent(t: &Transducer, q1: StateId, q2: StateId, bounds: &Bounds) -> Result<bool> {
    let g = greatest_common_prefixes(t, bounds)?;
    if g[q1] != g[q2] {
        return Ok(false);
    }
    let rows = stripped_rows(t, &g)?;
    let roots: Vec<bool> = t.states().map(|q| t.reads_roots(q)).collect();
    let classes = moore_classes(&rows, &roots);
    Ok(classes[q1] == classes[q2])
}

/// The unique minimal machine ω-equivalent to the initial machine, with states
/// numbered breadth-first from the initial state.
pub fn minimize(t: &Transducer, bounds: &Bounds) -> Result<Transducer> {
    if t.initial().is_none() {
        return Err(Error::InvalidInput("minimize needs an initial state; use minimize_core".into()));
    }
    let accessible = t.accessible()?;
    let responsive = remove_incomplete_response(&accessible, bounds)?.accessible()?;
    let roots: Vec<bool> = responsive.states().map(|q| responsive.reads_roots(q)).collect();
    let classes = moore_classes(responsive.rows(), &roots);
    let merged = quotient(&responsive, &classes, responsive.initial())?;
    merged.accessible()
}

/// Minimization of `t` observed from state `q`.
pub fn minimize_rooted(t: &Transducer, q: StateId, bounds: &Bounds) -> Result<Transducer> {
    minimize(&t.rooted_at(q)?, bounds)
}

/// Strips incomplete response from every state, merges ω-equivalent states and
/// renumbers canonically. The result has no initial state.
pub fn minimize_core(t: &Transducer, bounds: &Bounds) -> Result<Transducer> {
    let t = t.without_initial()?;
    let g = greatest_common_prefixes(&t, bounds)?;
    let rows = stripped_rows(&t, &g)?;
    let stripped = Transducer::new(t.n(), 0, None, t.labels().to_vec(), rows)?;
    let classes = moore_classes(stripped.rows(), &vec![false; stripped.num_states()]);
    let merged = quotient(&stripped, &classes, None)?;
    Ok(canonical_core(&merged))
}

type Encoding = Vec<Vec<(usize, Word)>>;

fn encode_from(t: &Transducer, root: StateId) -> (Vec<StateId>, Encoding) {
    let mut order = t.reachable_from(&[root]);
    if order.len() < t.num_states() {
        let all: Vec<StateId> = t.states().collect();
        let mut inside = vec![false; t.num_states()];
        for &q in &order {
            inside[q] = true;
        }
        for q in t.reachable_from(&all) {
            if !inside[q] {
                order.push(q);
            }
        }
    }
    let mut index = vec![0; t.num_states()];
    for (i, &q) in order.iter().enumerate() {
        index[q] = i;
    }
    let encoding = order
        .iter()
        .map(|&q| t.row(q).iter().map(|e| (index[e.target], e.output.clone())).collect())
        .collect();
    (order, encoding)
}

/// Renumbering of a machine without initial state that is independent of the
/// input numbering (for strongly connected machines): the least breadth-first
/// encoding over all choices of starting state.
pub fn canonical_core(t: &Transducer) -> Transducer {
    let best = t
        .states()
        .map(|s| encode_from(t, s))
        .min_by(|a, b| a.1.cmp(&b.1))
        .expect("at least one state");
    t.restrict(&best.0, None).expect("renumbering keeps every state")
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
    fn gcp_of_shifted_identity() {
        // One state over n=2 writing 0->00, 1->01: every output starts with 0.
        let t = Transducer::from_edges(2, Some(0), vec![vec![Edge::new(0, [0, 0]), Edge::new(0, [0, 1])]])
            .unwrap();
        assert_eq!(greatest_common_prefix_of_state(&t, 0, &b()).unwrap(), Word::from([0]));
        let r = remove_incomplete_response(&t, &b()).unwrap();
        assert_eq!(r.num_states(), 2);
        let q0 = r.initial().unwrap();
        assert_eq!(r.output(q0, 0), &Word::from([0, 0, 0]));
        assert_eq!(r.output(q0, 1), &Word::from([0, 1, 0]));
        assert_eq!(r.output(0, 0), &Word::from([0, 0]));
        assert_eq!(r.output(0, 1), &Word::from([1, 0]));
    }

    #[test]
    fn identity_is_unchanged() {
        let id = identity(3).rooted_at(0).unwrap();
        assert_eq!(remove_incomplete_response(&id, &b()).unwrap(), id);
        assert_eq!(minimize(&id, &b()).unwrap(), id);
    }

    #[test]
    fn omega_equivalence_examples() {
        let g = example_g();
        assert!(!omega_equivalent(&g, 0, 1, &b()).unwrap());
        let dup = Transducer::from_edges(
            2,
            None,
            vec![vec![Edge::new(1, [0]), Edge::new(0, [1])], vec![Edge::new(0, [0]), Edge::new(1, [1])]],
        )
        .unwrap();
        assert!(omega_equivalent(&dup, 0, 1, &b()).unwrap());
        assert!(omega_equivalent(&identity(2), 0, 0, &b()).unwrap());
    }

    #[test]
    fn involutions_minimize_to_identity() {
        let p = pi_r(2);
        let pp = product(&p.rooted_at(0).unwrap(), &p.rooted_at(0).unwrap()).unwrap();
        assert_eq!(minimize(&pp, &b()).unwrap(), identity(2).rooted_at(0).unwrap());
        // h_a is not onto, so g*g at (a, a) writes a leading 0 before acting
        // as the identity; its core is the identity.
        let g = example_g();
        let gg = product(&g.rooted_at(0).unwrap(), &g.rooted_at(0).unwrap()).unwrap();
        let m = minimize(&gg, &b()).unwrap();
        assert_eq!(m.num_states(), 2);
        for w in Word::all_of_length(g.alphabet(), 3) {
            assert_eq!(m.evaluate(m.initial().unwrap(), &w).unwrap().0, Word::from([0]).concat(&w));
        }
        let core = crate::sync::core(&m).unwrap();
        assert_eq!(minimize_core(&core, &b()).unwrap(), identity(4));
    }

    #[test]
    fn example_t_is_minimal() {
        let t = example_t(3).unwrap();
        let a = t.state("a").unwrap();
        let m = minimize_rooted(&t, a, &b()).unwrap();
        assert_eq!(m.num_states(), 3);
        assert_eq!(minimize(&m, &b()).unwrap(), m);
    }

    #[test]
    fn canonical_core_ignores_numbering() {
        let g = example_g();
        let swapped = g.restrict(&[1, 0], None).unwrap();
        assert_eq!(minimize_core(&g, &b()).unwrap(), minimize_core(&swapped, &b()).unwrap());
    }
}
