use std::sync::OnceLock;

use cantor_transducers::format::{parse_transducer, to_text};
use cantor_transducers::group::{group_product, invert_core};
use cantor_transducers::par::Exec;
use cantor_transducers::suite::{pool, PoolElement};
use cantor_transducers::sync::Automaton;
use cantor_transducers::{product, Bounds, ClopenSet, Edge, EvPeriodicWord, Letter, RotationClass, Space, Transducer, Word};
use proptest::prelude::*;

fn word(n: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(0..n as Letter, 0..=max)
}

fn cones(n: usize) -> impl Strategy<Value = Vec<Vec<Letter>>> {
    prop::collection::vec(word(n, 3), 0..6)
}

fn machine(n: usize, initial: bool) -> impl Strategy<Value = Transducer> {
    (1usize..=4).prop_flat_map(move |states| {
        let edge = (0..states, word(n, 2)).prop_map(|(t, out)| Edge::new(t, out));
        let row = prop::collection::vec(edge, n..=n);
        prop::collection::vec(row, states..=states).prop_map(move |rows| {
            Transducer::from_edges(n, initial.then_some(0), rows).expect("well-formed rows")
        })
    })
}

fn member(s: &ClopenSet, w: &[Letter]) -> bool {
    s.contains_cone(w)
}

fn all_words(n: usize, len: usize) -> Vec<Vec<Letter>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|w| (0..n as Letter).map(move |a| [w.clone(), vec![a]].concat()))
            .collect()
    })
}

fn pool3() -> &'static [PoolElement] {
    static POOL: OnceLock<Vec<PoolElement>> = OnceLock::new();
    POOL.get_or_init(|| pool(3, 2, &Bounds::default(), Exec::Sequential).unwrap())
}

fn pool5() -> &'static [PoolElement] {
    static POOL: OnceLock<Vec<PoolElement>> = OnceLock::new();
    POOL.get_or_init(|| pool(5, 2, &Bounds::default(), Exec::Sequential).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_sets_are_antichains_with_the_same_points(n in 2usize..=4, raw in cones(4)) {
        let raw: Vec<Vec<Letter>> = raw.into_iter().map(|w| w.into_iter().map(|a| a % n as Letter).collect()).collect();
        let s = ClopenSet::from_cones(Space::cantor(n), raw.iter().cloned().map(Word::from)).unwrap();
        let cs: Vec<&Word> = s.cones().collect();
        for (i, a) in cs.iter().enumerate() {
            for b in &cs[i + 1..] {
                prop_assert!(!a.comparable(b));
            }
        }
        for w in all_words(n, 4) {
            let expected = raw.iter().any(|c| w.starts_with(c));
            prop_assert_eq!(member(&s, &w), expected);
        }
        let again = ClopenSet::from_cones(Space::cantor(n), s.cones().cloned()).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn set_algebra_laws(a in cones(3), b in cones(3)) {
        let space = Space::cantor(3);
        let a = ClopenSet::from_cones(space, a.into_iter().map(Word::from)).unwrap();
        let b = ClopenSet::from_cones(space, b.into_iter().map(Word::from)).unwrap();
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.union(&b).unwrap().complement(), a.complement().intersection(&b.complement()).unwrap());
        prop_assert_eq!(a.union(&b).unwrap(), b.union(&a).unwrap());
        prop_assert!(a.difference(&b).unwrap().is_disjoint(&b).unwrap());
        prop_assert!(a.intersection(&b).unwrap().is_subset(&a).unwrap());
    }

    #[test]
    fn periodic_words_are_canonical(pre in word(3, 4), period in word(3, 3).prop_filter("nonempty", |p| !p.is_empty())) {
        let x = EvPeriodicWord::new(pre.clone(), period.clone()).unwrap();
        let unrolled = EvPeriodicWord::new([pre.clone(), period.clone()].concat(), period.clone()).unwrap();
        let doubled = EvPeriodicWord::new(pre.clone(), [period.clone(), period.clone()].concat()).unwrap();
        prop_assert_eq!(&x, &unrolled);
        prop_assert_eq!(&x, &doubled);
        for i in 0..12 {
            let expected = if i < pre.len() { pre[i] } else { period[(i - pre.len()) % period.len()] };
            prop_assert_eq!(x.letter_at(i), expected);
        }
    }

    #[test]
    fn rotation_classes_ignore_rotation(w in word(4, 6).prop_filter("nonempty", |w| !w.is_empty()), k in 0usize..6) {
        let k = k % w.len();
        let rotated = [&w[k..], &w[..k]].concat();
        prop_assert_eq!(RotationClass::of(&w).unwrap(), RotationClass::of(&rotated).unwrap());
    }

    #[test]
    fn text_format_round_trips(t in (2usize..=4).prop_flat_map(|n| machine(n, false))) {
        let back = parse_transducer(&to_text(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn products_associate(a in machine(2, true), b in machine(2, true), c in machine(2, true), w in word(2, 6)) {
        let left = product(&product(&a, &b).unwrap(), &c).unwrap();
        let right = product(&a, &product(&b, &c).unwrap()).unwrap();
        let (lo, _) = left.evaluate(left.initial().unwrap(), &w).unwrap();
        let (ro, _) = right.evaluate(right.initial().unwrap(), &w).unwrap();
        prop_assert_eq!(lo, ro);
    }

    #[test]
    fn collapsing_never_grows(t in machine(3, false)) {
        let seq = Automaton::of(&t).collapse_sequence();
        prop_assert!(seq.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn inverses_cancel(i in 0usize..64) {
        let p = pool3();
        let g = &p[i % p.len()].element;
        let inv = invert_core(g, &Bounds::default()).unwrap();
        prop_assert!(group_product(g, &inv, &Bounds::default()).unwrap().is_identity());
        prop_assert!(group_product(&inv, g, &Bounds::default()).unwrap().is_identity());
    }

    #[test]
    fn reduced_signature_is_multiplicative(i in 0usize..64, j in 0usize..64) {
        let p = pool5();
        let (g, h) = (&p[i % p.len()].element, &p[j % p.len()].element);
        let gh = group_product(g, h, &Bounds::default()).unwrap();
        prop_assert_eq!(gh.rsig(), (g.rsig() * h.rsig() - 1) % 4 + 1);
    }

    #[test]
    fn orientation_composes(i in 0usize..64, j in 0usize..64) {
        use cantor_transducers::image::Orientation::*;
        let p = pool3();
        let (g, h) = (&p[i % p.len()].element, &p[j % p.len()].element);
        let gh = group_product(g, h, &Bounds::default()).unwrap();
        let expected = if g.orientation() == h.orientation() { Preserving } else { Reversing };
        prop_assert_eq!(gh.orientation(), expected);
    }
}
