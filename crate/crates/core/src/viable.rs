//! Viable combinations of an element and initial machines realizing it.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::constructions::{assemble_rooted, expanded_roots, pi_r, pi_r_initial};
use crate::error::{Error, Result};
use crate::group::{group_product, GroupElement};
use crate::image::Orientation;
use crate::minimize::minimize;
use crate::par::Exec;
use crate::signature::member_onr_element;
use crate::transducer::{product, StateId, Transducer};
use crate::words::{Alphabet, ClopenSet, DottedWord, Letter, Space, Word};

/// Pieces `ρ_i · im(p_i)` that tile Cantor space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ViableCombination {
    pub prefixes: Vec<Word>,
    pub states: Vec<StateId>,
}

impl ViableCombination {
    pub fn new(prefixes: Vec<Word>, states: Vec<StateId>) -> Result<Self> {
        if prefixes.len() != states.len() || prefixes.is_empty() {
            return Err(Error::InvalidInput("need one state per prefix and at least one entry".into()));
        }
        Ok(ViableCombination { prefixes, states })
    }

    pub fn len(&self) -> usize {
        self.prefixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn display(&self, g: &GroupElement) -> String {
        let parts: Vec<String> = self
            .prefixes
            .iter()
            .zip(&self.states)
            .map(|(p, &q)| format!("{}:{}", p.display_with(g.n()), g.machine().label(q)))
            .collect();
        format!("({})", parts.join(" "))
    }

    fn pieces(&self, g: &GroupElement) -> Result<Vec<ClopenSet>> {
        let space = Space::cantor(g.n());
        self.prefixes
            .iter()
            .zip(&self.states)
            .map(|(p, &q)| {
                if q >= g.num_states() {
                    return Err(Error::InvalidInput(format!("state {q} out of range")));
                }
                space.check_word(p)?;
                Ok(g.analysis().image(q).prefixed(p, space))
            })
            .collect()
    }
}

/// Whether the pieces are pairwise disjoint and cover Cantor space.
pub fn is_viable(g: &GroupElement, v: &ViableCombination) -> Result<bool> {
    let pieces = v.pieces(g)?;
    let mut union = ClopenSet::empty(Space::cantor(g.n()));
    for p in &pieces {
        if !union.is_disjoint(p)? {
            return Ok(false);
        }
        union = union.union(p)?;
    }
    Ok(union.is_whole())
}

struct Piece {
    prefix: Word,
    state: StateId,
    bits: Vec<u64>,
}

struct Tiling {
    pieces: Vec<Piece>,
    /// Candidate pieces containing each cell.
    by_cell: Vec<Vec<usize>>,
    cells: usize,
}

const MAX_CELLS: usize = 1 << 22;

impl Tiling {
    fn new(g: &GroupElement, depth: usize) -> Result<Tiling> {
        let n = g.n();
        let space = Space::cantor(n);
        let image_depth = g.analysis().images().iter().map(|c| c.max_depth()).max().unwrap_or(0);
        let cell_depth = depth + image_depth;
        let cells = (0..cell_depth).try_fold(1usize, |acc, _| acc.checked_mul(n).filter(|&c| c <= MAX_CELLS));
        let cells = cells.ok_or_else(|| {
            Error::ResourceLimit(format!("viable search at depth {cell_depth} over {n} letters is too large"))
        })?;
        let words = cells.div_ceil(64);
        let mut pieces = Vec::new();
        for len in 0..=depth {
            for prefix in Word::all_of_length(Alphabet::new(n)?, len) {
                for q in g.machine().states() {
                    let set = g.analysis().image(q).prefixed(&prefix, space);
                    let mut bits = vec![0u64; words];
                    for cone in set.cones() {
                        let width = n.pow((cell_depth - cone.len()) as u32);
                        let start = cone.iter().fold(0usize, |acc, &a| acc * n + a as usize) * width;
                        for c in start..start + width {
                            bits[c / 64] |= 1 << (c % 64);
                        }
                    }
                    pieces.push(Piece { prefix: prefix.clone(), state: q, bits });
                }
            }
        }
        let mut by_cell = vec![Vec::new(); cells];
        for (i, p) in pieces.iter().enumerate() {
            for (c, list) in by_cell.iter_mut().enumerate() {
                if p.bits[c / 64] >> (c % 64) & 1 == 1 {
                    list.push(i);
                }
            }
        }
        Ok(Tiling { pieces, by_cell, cells })
    }

    fn first_uncovered(&self, covered: &[u64]) -> Option<usize> {
        covered
            .iter()
            .enumerate()
            .find(|(_, &w)| w != u64::MAX)
            .map(|(i, &w)| i * 64 + (!w).trailing_zeros() as usize)
            .filter(|&c| c < self.cells)
    }

    fn fits(&self, covered: &[u64], piece: usize) -> bool {
        covered.iter().zip(&self.pieces[piece].bits).all(|(a, b)| a & b == 0)
    }

    fn toggle(&self, covered: &mut [u64], piece: usize) {
        for (a, b) in covered.iter_mut().zip(&self.pieces[piece].bits) {
            *a ^= b;
        }
    }

    fn combination(&self, chosen: &[usize]) -> ViableCombination {
        ViableCombination {
            prefixes: chosen.iter().map(|&i| self.pieces[i].prefix.clone()).collect(),
            states: chosen.iter().map(|&i| self.pieces[i].state).collect(),
        }
    }

    /// Exact covers with at most `max` pieces, choosing at each step a piece
    /// through the least uncovered cell; pieces therefore come out sorted by
    /// their least point. `visit` returns `true` to stop the search.
    fn search(
        &self,
        covered: &mut Vec<u64>,
        chosen: &mut Vec<usize>,
        max: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let Some(cell) = self.first_uncovered(covered) else {
            return visit(chosen);
        };
        if chosen.len() == max {
            return false;
        }
        for &p in &self.by_cell[cell] {
            if !self.fits(covered, p) {
                continue;
            }
            self.toggle(covered, p);
            chosen.push(p);
            let stop = self.search(covered, chosen, max, visit);
            chosen.pop();
            self.toggle(covered, p);
            if stop {
                return true;
            }
        }
        false
    }

    fn start(&self) -> Vec<u64> {
        vec![0u64; self.cells.div_ceil(64)]
    }
}

/// All viable combinations with prefixes of length at most `depth` and at
/// most `size` entries, ordered by size and then by their pieces. The search
/// splits over the pieces through the least point.
pub fn viable_combinations(g: &GroupElement, depth: usize, size: usize, exec: Exec) -> Result<Vec<ViableCombination>> {
    if size == 0 {
        return Ok(Vec::new());
    }
    let tiling = Tiling::new(g, depth)?;
    let firsts = tiling.by_cell[0].clone();
    let found: Vec<Vec<Vec<usize>>> = exec.map(&firsts, |&p| {
        let mut covered = tiling.start();
        tiling.toggle(&mut covered, p);
        let mut chosen = vec![p];
        let mut out = Vec::new();
        tiling.search(&mut covered, &mut chosen, size, &mut |c| {
            out.push(c.to_vec());
            false
        });
        out
    });
    let mut all: Vec<ViableCombination> = found.into_iter().flatten().map(|c| tiling.combination(&c)).collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(all)
}

/// Replaces entry `i` by its `n` children `(ρ_i λ(l, p_i), π(l, p_i))`.
pub fn expand_viable(g: &GroupElement, v: &ViableCombination, i: usize) -> Result<ViableCombination> {
    if i >= v.len() {
        return Err(Error::InvalidInput(format!("index {i} out of range for {} entries", v.len())));
    }
    let t = g.machine();
    let (rho, p) = (&v.prefixes[i], v.states[i]);
    let mut prefixes = v.prefixes[..i].to_vec();
    let mut states = v.states[..i].to_vec();
    for l in 0..g.n() as Letter {
        let e = t.edge(p, l)?;
        prefixes.push(rho.concat(&e.output));
        states.push(e.target);
    }
    prefixes.extend_from_slice(&v.prefixes[i + 1..]);
    states.extend_from_slice(&v.states[i + 1..]);
    ViableCombination::new(prefixes, states)
}

/// Sorts the pieces by their least point and checks that each piece lies
/// entirely below the next.
pub fn reorder_lexicographic(g: &GroupElement, v: &ViableCombination) -> Result<ViableCombination> {
    if g.orientation() == Orientation::Neither {
        return Err(Error::InvalidInput("element neither preserves nor reverses the order".into()));
    }
    let pieces = v.pieces(g)?;
    let mut order: Vec<usize> = (0..v.len()).collect();
    let min = |i: usize| pieces[i].min_point().expect("pieces are nonempty");
    let max = |i: usize| pieces[i].max_point().expect("pieces are nonempty");
    order.sort_by(|&a, &b| min(a).lex_cmp(&min(b)));
    for w in order.windows(2) {
        if max(w[0]).lex_cmp(&min(w[1])) != Ordering::Less {
            return Err(Error::NotOrderable(format!(
                "pieces {} and {} interleave",
                v.prefixes[w[0]].display_with(g.n()),
                v.prefixes[w[1]].display_with(g.n())
            )));
        }
    }
    ViableCombination::new(
        order.iter().map(|&i| v.prefixes[i].clone()).collect(),
        order.iter().map(|&i| v.states[i]).collect(),
    )
}

/// A minimal initial machine over `C_{n,r}` whose core is `g`.
///
/// An orientation-reversing `g` is realized as `g π_R` followed by the
/// root-reversing `π_R` wrapper.
pub fn realize_in_tbnr(g: &GroupElement, r: usize, bounds: &Bounds) -> Result<Transducer> {
    let verdict = member_onr_element(g, r)?;
    if !verdict.holds {
        return Err(Error::NotInGroup(format!("not in O_{{{},{r}}}: {}", g.n(), verdict.reason)));
    }
    if g.orientation() == Orientation::Reversing {
        let flip = GroupElement::new(&pi_r(g.n()), bounds)?;
        let h = group_product(g, &flip, bounds)?;
        let a = realize_with(&h, r, bounds)?;
        return minimize(&product(&a, &pi_r_initial(g.n(), r)?)?, bounds);
    }
    realize_with(g, r, bounds)
}

fn realize_with(g: &GroupElement, r: usize, bounds: &Bounds) -> Result<Transducer> {
    let combo = find_combination(g, r, bounds)?;
    let n = g.n();
    let domain = expanded_roots(n, r, r * combo.len())?;
    let mut range = Vec::with_capacity(domain.len());
    for a in 0..r {
        let root = DottedWord::new(a, Word::new()).encode(n);
        for (rho, &p) in combo.prefixes.iter().zip(&combo.states) {
            range.push((root.concat(rho), p));
        }
    }
    minimize(&assemble_rooted(n, r, &domain, &range, g.machine())?, bounds)
}

/// The smallest combination of admissible size `j` (`r(j-1) ≡ 0 mod n-1`),
/// lexicographic when `g` preserves the order.
fn find_combination(g: &GroupElement, r: usize, bounds: &Bounds) -> Result<ViableCombination> {
    if let Some(&q) = g.analysis().homeomorphism_states().first() {
        return ViableCombination::new(vec![Word::new()], vec![q]);
    }
    let n = g.n();
    let lex = g.orientation() == Orientation::Preserving;
    let max = bounds.viable_size_for(n);
    let tiling = Tiling::new(g, bounds.viable_depth)?;
    for j in (2..=max).filter(|&j| n == 2 || (r * (j - 1)).is_multiple_of(n - 1)) {
        let mut found = None;
        tiling.search(&mut tiling.start(), &mut Vec::new(), j, &mut |c| {
            if c.len() != j {
                return false;
            }
            let v = tiling.combination(c);
            if lex && reorder_lexicographic(g, &v).is_err() {
                return false;
            }
            found = Some(v);
            true
        });
        if let Some(v) = found {
            return Ok(v);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no viable combination of admissible size for r={r} with prefixes up to length {} and at most {max} pieces",
        bounds.viable_depth
    )))
}
