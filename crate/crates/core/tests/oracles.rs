//! Brute-force cross-checks: every quantity here is recomputed by plain
//! enumeration and compared with the library.

use std::collections::BTreeSet;

use cantor_transducers::constructions::{example_g, example_t, example_u, identity, pi_r};
use cantor_transducers::group::{group_product, invert_core, rotation_action, GroupElement};
use cantor_transducers::image::{Analysis, Orientation};
use cantor_transducers::inverse::invert_initial;
use cantor_transducers::minimize::minimize;
use cantor_transducers::par::Exec;
use cantor_transducers::signature::{congruence_holds, signature, units_lattice};
use cantor_transducers::suite::{base_machines, pool};
use cantor_transducers::sync::minimal_sync_level;
use cantor_transducers::{product, Bounds, ClopenSet, Edge, EvPeriodicWord, Letter, RotationClass, Space, Transducer, Word};

fn words(n: usize, len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n as Letter).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

fn machines() -> Vec<(String, Transducer)> {
    (2..=5).flat_map(|n| base_machines(n).unwrap()).collect()
}

fn run(t: &Transducer, mut q: usize, w: &[Letter]) -> usize {
    for &a in w {
        q = t.row(q)[a as usize].target;
    }
    q
}

fn output(t: &Transducer, mut q: usize, w: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::new();
    for &a in w {
        let e = &t.row(q)[a as usize];
        out.extend_from_slice(e.output.as_slice());
        q = e.target;
    }
    out
}

/// Least `k` with every word of length `k` sending all states to one state.
fn brute_sync_level(t: &Transducer, cap: usize) -> Option<usize> {
    (0..=cap).find(|&k| {
        words(t.n(), k).iter().all(|w| {
            let targets: BTreeSet<usize> = t.states().map(|q| run(t, q, w)).collect();
            targets.len() == 1
        })
    })
}

/// Length-`d` prefixes of outputs of `h_q`, read off inputs long enough that
/// every output has length at least `d`.
fn brute_image_layer(t: &Transducer, q: usize, d: usize) -> BTreeSet<Vec<Letter>> {
    for len in 0..=24 {
        let outs: Vec<Vec<Letter>> = words(t.n(), len).iter().map(|w| output(t, q, w)).collect();
        if outs.iter().all(|o| o.len() >= d) {
            return outs.into_iter().map(|o| o[..d].to_vec()).collect();
        }
        if t.n().pow(len as u32 + 1) > 200_000 {
            break;
        }
    }
    panic!("outputs of state {q} stay shorter than {d}");
}

/// Number of maximal cones inside the set described by its depth-`d` layer.
fn brute_cone_count(n: usize, layer: &BTreeSet<Vec<Letter>>, d: usize) -> usize {
    fn full(n: usize, layer: &BTreeSet<Vec<Letter>>, d: usize, w: &mut Vec<Letter>) -> bool {
        if w.len() == d {
            return layer.contains(w);
        }
        (0..n as Letter).all(|a| {
            w.push(a);
            let r = full(n, layer, d, w);
            w.pop();
            r
        })
    }
    fn count(n: usize, layer: &BTreeSet<Vec<Letter>>, d: usize, w: &mut Vec<Letter>) -> usize {
        if full(n, layer, d, w) {
            return 1;
        }
        if w.len() == d {
            return 0;
        }
        (0..n as Letter)
            .map(|a| {
                w.push(a);
                let r = count(n, layer, d, w);
                w.pop();
                r
            })
            .sum()
    }
    count(n, layer, d, &mut Vec::new())
}

fn in_set(s: &ClopenSet, w: &[Letter]) -> bool {
    s.contains_cone(w)
}

#[test]
fn sync_level_by_enumeration() {
    for (name, t) in machines() {
        assert_eq!(minimal_sync_level(&t).ok(), brute_sync_level(&t, 6), "{name}");
    }
}

#[test]
fn images_and_m_by_enumeration() {
    let bounds = Bounds::default();
    for (name, t) in machines() {
        let analysis = Analysis::new(&t, &bounds).unwrap();
        for q in t.states() {
            let im = analysis.image(q);
            let d = im.max_depth() + 1;
            let layer = brute_image_layer(&t, q, d);
            for w in words(t.n(), d) {
                assert_eq!(in_set(im, &w), layer.contains(&w), "{name} state {q} word {w:?}");
            }
            assert_eq!(analysis.m(q), brute_cone_count(t.n(), &layer, d), "{name} state {q}");
        }
    }
}

#[test]
fn signature_by_enumeration() {
    let bounds = Bounds::default();
    for (name, t) in machines() {
        let analysis = Analysis::new(&t, &bounds).unwrap();
        let k = brute_sync_level(&t, 6).unwrap();
        let sig: u128 = words(t.n(), k).iter().map(|w| analysis.m(run(&t, 0, w)) as u128).sum();
        let report = signature(&t, &bounds).unwrap();
        assert_eq!(report.sig, sig, "{name}");
        let m = t.n() as u128 - 1;
        let residue = if t.n() == 2 { 1 } else if sig.is_multiple_of(m) { m } else { sig % m };
        assert_eq!(report.rsig as u128, residue, "{name}");
    }
}

#[test]
fn example_g_images() {
    let g = example_g();
    let analysis = Analysis::new(&g, &Bounds::default()).unwrap();
    let a = g.state("a").unwrap();
    let b = g.state("b").unwrap();
    assert_eq!(brute_image_layer(&g, a, 1), BTreeSet::from([vec![0], vec![1]]));
    assert_eq!(brute_image_layer(&g, b, 1), BTreeSet::from([vec![2], vec![3]]));
    assert_eq!(analysis.m(a), 2);
    assert_eq!(signature(&g, &Bounds::default()).unwrap().sig, 8);
}

#[test]
fn clopen_operations_by_membership() {
    let space = Space::cantor(3);
    let sets: Vec<ClopenSet> = [
        vec![vec![0], vec![2, 1]],
        vec![vec![1, 1], vec![2]],
        vec![vec![0, 0, 0], vec![1], vec![2, 2]],
        vec![],
        vec![vec![]],
    ]
    .into_iter()
    .map(|cones| ClopenSet::from_cones(space, cones.into_iter().map(Word::from)).unwrap())
    .collect();
    for a in &sets {
        for b in &sets {
            let union = a.union(b).unwrap();
            let inter = a.intersection(b).unwrap();
            let diff = a.difference(b).unwrap();
            let comp = a.complement();
            for w in words(3, 4) {
                let (x, y) = (in_set(a, &w), in_set(b, &w));
                assert_eq!(in_set(&union, &w), x || y);
                assert_eq!(in_set(&inter, &w), x && y);
                assert_eq!(in_set(&diff, &w), x && !y);
                assert_eq!(in_set(&comp, &w), !x);
            }
            let subset = words(3, 4).iter().all(|w| !in_set(a, w) || in_set(b, w));
            assert_eq!(a.is_subset(b).unwrap(), subset);
        }
    }
}

/// `u 0^ω`-style test points with short preperiods and periods.
fn points(n: usize) -> Vec<EvPeriodicWord> {
    let mut out = Vec::new();
    for pre in (0..=2).flat_map(|k| words(n, k)) {
        for period in (1..=2).flat_map(|k| words(n, k)) {
            out.push(EvPeriodicWord::new(pre.clone(), period).unwrap());
        }
    }
    out
}

#[test]
fn minimize_preserves_the_map() {
    let bounds = Bounds::default();
    for (name, t) in machines() {
        for q in t.states() {
            let rooted = t.rooted_at(q).unwrap();
            let m = minimize(&rooted, &bounds).unwrap();
            assert!(m.num_states() <= rooted.num_states(), "{name}");
            for x in points(t.n()) {
                assert_eq!(
                    m.evaluate_periodic(m.initial().unwrap(), &x).unwrap(),
                    t.evaluate_periodic(q, &x).unwrap(),
                    "{name} from {q} on {x}"
                );
            }
        }
    }
}

#[test]
fn products_compose_evaluation() {
    let ts: Vec<Transducer> = vec![example_t(3).unwrap(), example_u(3).unwrap(), pi_r(3), identity(3)];
    for a in &ts {
        for b in &ts {
            let (a0, b0) = (a.rooted_at(0).unwrap(), b.rooted_at(1.min(b.num_states() - 1)).unwrap());
            let p = product(&a0, &b0).unwrap();
            for w in (0..=4).flat_map(|k| words(3, k)) {
                let via = output(&b0, b0.initial().unwrap(), &output(&a0, a0.initial().unwrap(), &w));
                assert_eq!(output(&p, p.initial().unwrap(), &w), via);
            }
        }
    }
}

#[test]
fn inverses_undo_homeomorphism_states() {
    let bounds = Bounds::default();
    for (name, t) in machines() {
        let analysis = Analysis::new(&t, &bounds).unwrap();
        for q in analysis.homeomorphism_states() {
            let inv = invert_initial(&t.rooted_at(q).unwrap(), &bounds).unwrap();
            for x in points(t.n()) {
                let y = t.evaluate_periodic(q, &x).unwrap();
                assert_eq!(inv.evaluate_periodic(inv.initial().unwrap(), &y).unwrap(), x, "{name} at {q}");
            }
        }
    }
}

/// The class of the output on the loop reached after reading `w` many times.
fn brute_rotation(g: &GroupElement, c: &RotationClass) -> RotationClass {
    let t = g.machine();
    let w = c.representative().as_slice();
    let mut q = 0;
    for _ in 0..t.num_states() + 8 {
        q = run(t, q, w);
    }
    RotationClass::of(&output(t, q, w)).unwrap()
}

fn classes(n: usize, max_len: usize) -> Vec<RotationClass> {
    let set: BTreeSet<RotationClass> =
        (1..=max_len).flat_map(|k| words(n, k)).map(|w| RotationClass::of(&w).unwrap()).collect();
    set.into_iter().collect()
}

#[test]
fn rotation_action_by_iteration() {
    let bounds = Bounds::default();
    for n in 2..=4 {
        for el in pool(n, 1, &bounds, Exec::Sequential).unwrap() {
            for c in classes(n, 4) {
                assert_eq!(rotation_action(&el.element, &c).unwrap(), brute_rotation(&el.element, &c), "{}", el.name);
            }
        }
    }
}

#[test]
fn group_products_act_as_composites() {
    let bounds = Bounds::default();
    for n in [3, 4] {
        let p = pool(n, 1, &bounds, Exec::Sequential).unwrap();
        for a in &p {
            let inv = invert_core(&a.element, &bounds).unwrap();
            for c in classes(n, 3) {
                assert_eq!(brute_rotation(&inv, &brute_rotation(&a.element, &c)), c, "{} inverse", a.name);
            }
            for b in &p {
                let ab = group_product(&a.element, &b.element, &bounds).unwrap();
                for c in classes(n, 3) {
                    let composed = brute_rotation(&b.element, &brute_rotation(&a.element, &c));
                    assert_eq!(brute_rotation(&ab, &c), composed, "{} then {}", a.name, b.name);
                }
            }
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn units_and_fixers_by_enumeration() {
    for m in 2..=30u64 {
        let u = units_lattice(m).unwrap();
        let units: Vec<u64> = (1..=m).filter(|&x| gcd(x, m) == 1).map(|x| x % m).collect::<BTreeSet<_>>().into_iter().collect();
        for i in 0..m {
            let fixing: BTreeSet<u64> = units.iter().copied().filter(|&x| (x * i) % m == i % m).collect();
            assert_eq!(u.subgroup_fixing(i), fixing, "m={m} i={i}");
        }
    }
}

#[test]
fn congruence_by_arithmetic() {
    for n in 2..=12usize {
        for rsig in 1..n as u64 {
            for r in 1..n {
                let direct = n == 2 || (r as i64 * (rsig as i64 - 1)).rem_euclid(n as i64 - 1) == 0;
                assert_eq!(congruence_holds(n, rsig, r), direct, "n={n} rsig={rsig} r={r}");
            }
        }
    }
}

/// Orientation from the order of `h_p(x 0^ω)` over all inputs `x` of a fixed
/// length, at every state.
fn brute_orientation(t: &Transducer, len: usize) -> Orientation {
    let (mut up, mut down) = (true, true);
    let inputs = words(t.n(), len);
    for p in t.states() {
        let outs: Vec<EvPeriodicWord> = inputs
            .iter()
            .map(|x| t.evaluate_periodic(p, &EvPeriodicWord::new(x.clone(), [0]).unwrap()).unwrap())
            .collect();
        for pair in outs.windows(2) {
            match pair[0].lex_cmp(&pair[1]) {
                std::cmp::Ordering::Less => down = false,
                std::cmp::Ordering::Greater => up = false,
                std::cmp::Ordering::Equal => (up, down) = (false, false),
            }
        }
    }
    match (up, down) {
        (true, _) => Orientation::Preserving,
        (_, true) => Orientation::Reversing,
        _ => Orientation::Neither,
    }
}

#[test]
fn orientation_by_ordering_points() {
    let bounds = Bounds::default();
    for n in 2..=4 {
        for el in pool(n, 2, &bounds, Exec::Sequential).unwrap() {
            let depth = if n == 2 { 6 } else { 4 };
            assert_eq!(el.element.orientation(), brute_orientation(el.element.machine(), depth), "{}", el.name);
        }
    }
    // a machine whose letters 1 and 2 are swapped at one state only
    let mixed = Transducer::from_edges(
        3,
        None,
        vec![
            vec![Edge::new(0, [0]), Edge::new(1, [2]), Edge::new(0, [1])],
            vec![Edge::new(0, [0]), Edge::new(0, [1]), Edge::new(0, [2])],
        ],
    )
    .unwrap();
    assert_eq!(brute_orientation(&mixed, 3), Orientation::Neither);
    assert_eq!(Analysis::new(&mixed, &bounds).unwrap().orientation(&mixed).unwrap(), Orientation::Neither);
}
