//! Per-state images, injectivity, homeomorphism states and orientation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::transducer::{StateId, Transducer};
use crate::words::{ClopenSet, EvPeriodicWord};

/// Exact images of every state, as the stable point of
/// `A_{m+1}(q) = ⋃_x λ(x, q) · A_m(π(x, q))` started from the whole space.
pub fn images(t: &Transducer, bounds: &Bounds) -> Result<Vec<ClopenSet>> {
    t.check_infinite_output()?;
    let mut sources: Vec<Vec<StateId>> = vec![Vec::new(); t.num_states()];
    for q in t.states() {
        for e in t.row(q) {
            sources[e.target].push(q);
        }
    }
    let mut current: Vec<ClopenSet> = t.states().map(|q| ClopenSet::whole(t.output_space(q))).collect();
    // Only states with a successor whose approximant changed are recomputed.
    let mut dirty: Vec<bool> = vec![true; t.num_states()];
    for _ in 0..=bounds.image_iterations {
        let mut changed = Vec::new();
        for q in t.states().filter(|&q| dirty[q]) {
            let pieces = t
                .row(q)
                .iter()
                .flat_map(|e| current[e.target].cones().map(move |c| e.output.concat(c)));
            let next = ClopenSet::from_cones_unchecked(t.output_space(q), pieces);
            if next != current[q] {
                changed.push((q, next));
            }
        }
        if changed.is_empty() {
            return Ok(current);
        }
        dirty.iter_mut().for_each(|d| *d = false);
        for (q, next) in changed {
            for &s in &sources[q] {
                dirty[s] = true;
            }
            current[q] = next;
        }
    }
    Err(Error::NotClopen(format!(
        "state images did not stabilise within {} iterations",
        bounds.image_iterations
    )))
}

pub fn image(t: &Transducer, q: StateId, bounds: &Bounds) -> Result<ClopenSet> {
    check_state(t, q)?;
    Ok(images(t, bounds)?.swap_remove(q))
}

/// Size of the smallest cone cover of `im(q)`.
pub fn m_of_state(t: &Transducer, q: StateId, bounds: &Bounds) -> Result<usize> {
    Ok(image(t, q, bounds)?.antichain_size())
}

fn check_state(t: &Transducer, q: StateId) -> Result<()> {
    if q >= t.num_states() {
        return Err(Error::InvalidInput(format!("state {q} out of range")));
    }
    Ok(())
}

/// Whether the pieces `λ(x, q) · im(π(x, q))` are pairwise disjoint.
fn pieces_disjoint(t: &Transducer, q: StateId, imgs: &[ClopenSet]) -> bool {
    let space = t.output_space(q);
    let pieces: Vec<ClopenSet> = t.row(q).iter().map(|e| imgs[e.target].prefixed(&e.output, space)).collect();
    pieces
        .iter()
        .enumerate()
        .all(|(i, a)| pieces[i + 1..].iter().all(|b| a.is_disjoint(b).expect("same space")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Preserving,
    Reversing,
    Neither,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Preserving => "preserving",
            Orientation::Reversing => "reversing",
            Orientation::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateReport {
    pub state: String,
    pub image: Vec<String>,
    pub m: usize,
    pub injective: bool,
    pub homeomorphism: bool,
}

/// Images and injectivity of every state of one machine.
#[derive(Clone, Debug)]
pub struct Analysis {
    images: Vec<ClopenSet>,
    injective: Vec<bool>,
}

impl Analysis {
    pub fn new(t: &Transducer, bounds: &Bounds) -> Result<Analysis> {
        let images = images(t, bounds)?;
        let local: Vec<bool> = t.states().map(|q| pieces_disjoint(t, q, &images)).collect();
        // q is injective iff every state reachable from q is locally injective.
        let injective = t
            .states()
            .map(|q| t.reachable_from(&[q]).into_iter().all(|p| local[p]))
            .collect();
        Ok(Analysis { images, injective })
    }

    pub fn image(&self, q: StateId) -> &ClopenSet {
        &self.images[q]
    }

    pub fn images(&self) -> &[ClopenSet] {
        &self.images
    }

    pub fn m(&self, q: StateId) -> usize {
        self.images[q].antichain_size()
    }

    pub fn is_injective(&self, q: StateId) -> bool {
        self.injective[q]
    }

    pub fn all_injective(&self) -> bool {
        self.injective.iter().all(|&b| b)
    }

    pub fn is_homeomorphism(&self, q: StateId) -> bool {
        self.injective[q] && self.images[q].is_whole()
    }

    pub fn homeomorphism_states(&self) -> Vec<StateId> {
        (0..self.images.len()).filter(|&q| self.is_homeomorphism(q)).collect()
    }

    pub fn report(&self, t: &Transducer, q: StateId) -> StateReport {
        StateReport {
            state: t.label(q).to_string(),
            image: self.images[q].cones().map(|w| w.display_with(t.n())).collect(),
            m: self.m(q),
            injective: self.injective[q],
            homeomorphism: self.is_homeomorphism(q),
        }
    }

    /// Orientation from the boundary condition: for every state `p` and letters
    /// `x < y`, compare `h_p(x (n-1)^ω)` with `h_p(y 0^ω)`.
    pub fn orientation(&self, t: &Transducer) -> Result<Orientation> {
        if !self.all_injective() {
            return Ok(Orientation::Neither);
        }
        let top = (t.n() - 1) as u8;
        let mut preserving = true;
        let mut reversing = true;
        for p in t.states() {
            let letters: Vec<u8> = t.letters(p).collect();
            for (i, &x) in letters.iter().enumerate() {
                let left = t.evaluate_periodic(p, &EvPeriodicWord::new([x], [top])?)?;
                for &y in &letters[i + 1..] {
                    let right = t.evaluate_periodic(p, &EvPeriodicWord::new([y], [0])?)?;
                    match left.lex_cmp(&right) {
                        std::cmp::Ordering::Less => reversing = false,
                        std::cmp::Ordering::Greater => preserving = false,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
        }
        Ok(if preserving {
            Orientation::Preserving
        } else if reversing {
            Orientation::Reversing
        } else {
            Orientation::Neither
        })
    }
}

pub fn is_injective_state(t: &Transducer, q: StateId, bounds: &Bounds) -> Result<bool> {
    check_state(t, q)?;
    Ok(Analysis::new(t, bounds)?.is_injective(q))
}

pub fn is_homeomorphism_state(t: &Transducer, q: StateId, bounds: &Bounds) -> Result<bool> {
    check_state(t, q)?;
    Ok(Analysis::new(t, bounds)?.is_homeomorphism(q))
}

/// Orientation of the whole machine; `Neither` when some state is not
/// injective or an image is not clopen.
pub fn orientation(t: &Transducer, bounds: &Bounds) -> Result<Orientation> {
    match Analysis::new(t, bounds) {
        Ok(a) => a.orientation(t),
        Err(Error::NotClopen(_)) => Ok(Orientation::Neither),
        Err(e) => Err(e),
    }
}
