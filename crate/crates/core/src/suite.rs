//! The element pool and the reproducibility checks run by `tx verify` and
//! the acceptance tests.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::bounds::Bounds;
use crate::constructions::{cycle, example_g, example_t, example_u, identity, oplus, pi_r, swap01};
use crate::error::{Error, Result};
use crate::group::{
    commutator, evaluate_group_word, group_product, invert_core, order, orbit_lengths, parse_group_word, GroupElement,
    Order,
};
use crate::image::{is_homeomorphism_state, Orientation};
use crate::inverse::invert_initial;
use crate::minimize::minimize_rooted;
use crate::par::Exec;
use crate::signature::{
    divisors_generate_units, member_onr_element, member_tonr_element, membership_monotonicity_check,
    rsig_inverse_direct_with, signature_class_partition, verify_lcm_claim,
};
use crate::sync::minimal_sync_level;
use crate::transducer::{product, Transducer};
use crate::viable::realize_in_tbnr;
use crate::words::{rotation_class_of, Alphabet, ClopenSet, Letter, Space, Word};

/// A named element of the pool.
#[derive(Clone, Debug)]
pub struct PoolElement {
    pub name: String,
    pub element: GroupElement,
}

/// Named generating machines at `n`: identity, `π_R`, `g` (n = 4), `T`, `U`
/// (n ≥ 3) and `⊕_d` of the swap and cycle over every proper divisor `d ≥ 2`.
pub fn base_machines(n: usize) -> Result<Vec<(String, Transducer)>> {
    let mut out = vec![(format!("id:{n}"), identity(n)), (format!("piR:{n}"), pi_r(n))];
    if n == 4 {
        out.push(("g4".into(), example_g()));
    }
    if n >= 3 {
        out.push((format!("T:{n}"), example_t(n)?));
        out.push((format!("U:{n}"), example_u(n)?));
    }
    for d in (2..n).filter(|d| n.is_multiple_of(*d)) {
        out.push((format!("oplus:{d}:swap:{n}"), oplus(d, &swap01(d)?, n)?));
        if d >= 3 {
            out.push((format!("oplus:{d}:cycle:{n}"), oplus(d, &cycle(d)?, n)?));
        }
    }
    Ok(out)
}

pub fn base_pool(n: usize, bounds: &Bounds) -> Result<Vec<PoolElement>> {
    base_machines(n)?
        .into_iter()
        .map(|(name, t)| Ok(PoolElement { name, element: GroupElement::new(&t, bounds)? }))
        .collect()
}

/// The base pool closed under products of at most `max_len` factors, with
/// duplicates removed (the first name found is kept).
pub fn pool(n: usize, max_len: usize, bounds: &Bounds, exec: Exec) -> Result<Vec<PoolElement>> {
    let base = base_pool(n, bounds)?;
    let mut all = base.clone();
    let mut frontier = base.clone();
    for _ in 1..max_len {
        let pairs: Vec<(usize, usize)> =
            (0..frontier.len()).flat_map(|i| (0..base.len()).map(move |j| (i, j))).collect();
        let products = exec.map(&pairs, |&(i, j)| {
            group_product(&frontier[i].element, &base[j].element, bounds).map(|e| PoolElement {
                name: format!("{}*{}", frontier[i].name, base[j].name),
                element: e,
            })
        });
        let mut next = Vec::new();
        for p in products {
            let p = p?;
            if !all.iter().any(|q| q.element == p.element) {
                all.push(p.clone());
                next.push(p);
            }
        }
        frontier = next;
    }
    Ok(all)
}

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub title: String,
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub elapsed_ms: u64,
    pub limit_ms: u64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} [{}] {} ({} checks, {} ms, limit {} ms)",
            self.id, self.title, self.checks, self.elapsed_ms, self.limit_ms
        );
        for f in &self.failures {
            s.push_str(&format!("\n    - {f}"));
        }
        s
    }
}

#[derive(Default)]
struct Checks {
    total: usize,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.total += 1;
        if !ok {
            self.failures.push(label.into());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, label: &str, got: T, want: T) {
        let ok = got == want;
        self.check(format!("{label}: got {got:?}, expected {want:?}"), ok);
    }
}

/// Identifiers and titles of the acceptance criteria, with time limits in ms.
pub const CRITERIA: [(usize, &str, u64); 10] = [
    (1, "g-suite (n=4)", 1_000),
    (2, "pi_R and identity sanity", 1_000),
    (3, "F-relations (n=3,4,5)", 30_000),
    (4, "infinite order witness for T (n=3)", 10_000),
    (5, "oplus_d suite", 10_000),
    (6, "rsig homomorphism over the pool (n=3,4)", 60_000),
    (7, "n=7 class partition", 1_000),
    (8, "units-lattice claim", 5_000),
    (9, "oracle equivalence of minimize/product/invert", 60_000),
    (10, "membership lattice properties", 10_000),
];

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(id: usize, bounds: &Bounds, exec: Exec) -> Result<CheckOutcome> {
    let &(_, title, limit_ms) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::InvalidInput(format!("no criterion {id}")))?;
    let start = Instant::now();
    let mut c = Checks::default();
    let result = match id {
        1 => g_suite(&mut c, bounds),
        2 => sanity(&mut c, bounds),
        3 => f_relations(&mut c, bounds),
        4 => infinite_order(&mut c, bounds),
        5 => oplus_suite(&mut c, bounds),
        6 => homomorphism(&mut c, bounds, exec),
        7 => partition(&mut c),
        8 => units(&mut c, exec),
        9 => oracles(&mut c, bounds, exec),
        _ => lattice(&mut c, bounds, exec),
    };
    if let Err(e) = result {
        c.failures.push(format!("error: {e}"));
    }
    let elapsed_ms = start.elapsed().as_millis() as u64;
    if elapsed_ms > limit_ms {
        c.failures.push(format!("took {elapsed_ms} ms, limit {limit_ms} ms"));
    }
    Ok(CheckOutcome {
        id,
        title: title.to_string(),
        pass: c.failures.is_empty(),
        checks: c.total,
        failures: c.failures,
        elapsed_ms,
        limit_ms,
    })
}

/// The named suites of `tx verify`.
pub fn suite_ids(name: &str) -> Result<Vec<usize>> {
    match name {
        "paper" => Ok((1..=10).collect()),
        "F-relations" => Ok(vec![3, 4]),
        other => Err(Error::InvalidInput(format!("unknown suite `{other}` (expected paper or F-relations)"))),
    }
}

/// Runs the criteria concurrently when `exec` allows it; results keep the
/// order of `ids`.
pub fn run_suite(ids: &[usize], bounds: &Bounds, exec: Exec) -> Result<Vec<CheckOutcome>> {
    exec.map(ids, |&id| run_criterion(id, bounds, exec)).into_iter().collect()
}

fn el(t: &Transducer, bounds: &Bounds) -> Result<GroupElement> {
    GroupElement::new(t, bounds)
}

fn cones(n: usize, words: &[&[Letter]]) -> Result<ClopenSet> {
    ClopenSet::from_cones(Space::cantor(n), words.iter().map(|w| Word::from(*w)))
}

fn g_suite(c: &mut Checks, bounds: &Bounds) -> Result<()> {
    let raw = example_g();
    c.eq("sync level", minimal_sync_level(&raw)?, 1);
    let g = el(&raw, bounds)?;
    let a = raw.state("a")?;
    let b = raw.state("b")?;
    let analysis = crate::image::Analysis::new(&raw, bounds)?;
    c.eq("m_a", analysis.m(a), 2);
    c.eq("m_b", analysis.m(b), 2);
    c.eq("im(a)", analysis.image(a).clone(), cones(4, &[&[0], &[1]])?);
    c.eq("im(b)", analysis.image(b).clone(), cones(4, &[&[2], &[3]])?);
    c.eq("sig", g.signature().sig, 8);
    c.eq("rsig", g.rsig(), 2);
    c.eq("per-word m", g.signature().per_word_m.clone(), Some(vec![2, 2, 2, 2]));
    for r in 1..=3 {
        c.eq(&format!("member_TO(4,{r})"), member_tonr_element(&g, r)?.holds, r == 3);
    }
    c.eq("order", order(&g, 8, bounds)?, Order::Finite(2));
    c.eq("orientation", g.orientation(), Orientation::Preserving);
    Ok(())
}

fn sanity(c: &mut Checks, bounds: &Bounds) -> Result<()> {
    for n in 2..=6 {
        let p = el(&pi_r(n), bounds)?;
        let id = el(&identity(n), bounds)?;
        c.eq(&format!("order(piR:{n})"), order(&p, 8, bounds)?, Order::Finite(2));
        c.eq(&format!("rsig(piR:{n})"), p.rsig(), 1);
        for r in 1..n {
            c.check(format!("piR:{n} in TO_{{{n},{r}}}"), member_tonr_element(&p, r)?.holds);
        }
        c.check(format!("id:{n} is the identity"), id.is_identity());
        c.check(format!("id:{n} * piR:{n} = piR:{n}"), group_product(&id, &p, bounds)? == p);
        c.check(format!("piR:{n} * id:{n} = piR:{n}"), group_product(&p, &id, bounds)? == p);
        c.eq(&format!("order(id:{n})"), order(&id, 8, bounds)?, Order::Finite(1));
    }
    Ok(())
}

fn f_relations(c: &mut Checks, bounds: &Bounds) -> Result<()> {
    for n in 3..=5 {
        let traw = example_t(n)?;
        let uraw = example_u(n)?;
        c.check(format!("T:{n} state a is a homeomorphism state"), is_homeomorphism_state(&traw, traw.state("a")?, bounds)?);
        c.check(format!("T:{n} state b is a homeomorphism state"), is_homeomorphism_state(&traw, traw.state("b")?, bounds)?);
        c.check(format!("U:{n} state p is a homeomorphism state"), is_homeomorphism_state(&uraw, uraw.state("p")?, bounds)?);
        let t = el(&traw, bounds)?;
        let u = el(&uraw, bounds)?;
        c.check(format!("T:{n} in TO_{{{n},1}}"), member_tonr_element(&t, 1)?.holds);
        c.check(format!("U:{n} in TO_{{{n},1}}"), member_tonr_element(&u, 1)?.holds);
        let gens = BTreeMap::from([("T".to_string(), t), ("U".to_string(), u)]);
        let x = parse_group_word("U^-1 T")?;
        for y in ["T U T^-1", "T^2 U T^-2"] {
            let w = commutator(&x, &parse_group_word(y)?);
            let e = evaluate_group_word(&gens, &w, bounds)?;
            c.check(format!("[U^-1 T, {y}] = 1 at n={n}"), e.is_identity());
        }
    }
    Ok(())
}

fn infinite_order(c: &mut Checks, bounds: &Bounds) -> Result<()> {
    let t = el(&example_t(3)?, bounds)?;
    let lengths = orbit_lengths(&t, &rotation_class_of(&[1, 2])?, 6)?;
    c.eq("orbit lengths", lengths.clone(), vec![2, 3, 4, 5, 6, 7, 8]);
    c.check("orbit lengths strictly increase", lengths.windows(2).all(|w| w[0] < w[1]));
    let o = order(&t, 16, bounds)?;
    c.check(format!("order(T:3, 16) exceeds the bound, got {o}"), matches!(o, Order::ExceedsBound { .. }));
    Ok(())
}

fn oplus_suite(c: &mut Checks, bounds: &Bounds) -> Result<()> {
    for (n, d) in [(4, 2), (6, 2), (6, 3)] {
        let inner = if d == 2 { swap01(d)? } else { cycle(d)? };
        let raw = oplus(d, &inner, n)?;
        let g = match el(&raw, bounds) {
            Ok(g) => g,
            Err(e) => {
                c.check(format!("oplus({d}) at n={n} is bi-synchronizing: {e}"), false);
                continue;
            }
        };
        c.check(format!("oplus({d}) at n={n} is bi-synchronizing"), crate::sync::is_synchronizing(g.inverse_machine()));
        c.eq(&format!("rsig(oplus({d})) at n={n}"), g.rsig(), d as u64);
        let analysis = crate::image::Analysis::new(&raw, bounds)?;
        let size = inner.num_states();
        for q in raw.states() {
            let i = q / size;
            let want: Vec<Word> = (0..d).map(|b| Word::letter((d * i + b) as Letter)).collect();
            let want = ClopenSet::from_cones(Space::cantor(n), want)?;
            c.eq(&format!("im({}) at n={n}", raw.label(q)), analysis.image(q).clone(), want);
        }
    }
    Ok(())
}

fn homomorphism(c: &mut Checks, bounds: &Bounds, exec: Exec) -> Result<()> {
    for n in [3, 4] {
        let pool = pool(n, 3, bounds, exec)?;
        let modulus = (n - 1) as u64;
        let reduce = |x: u64| ((x - 1) % modulus) + 1;
        for x in &pool {
            let inv = invert_core(&x.element, bounds)?;
            let direct = rsig_inverse_direct_with(x.element.machine(), x.element.analysis())?;
            c.eq(&format!("rsig_inverse_direct({})", x.name), direct, inv.rsig());
            let ms: Vec<u64> = x.element.machine().states().map(|q| reduce(x.element.analysis().m(q) as u64)).collect();
            c.check(format!("m_q mod n-1 constant on {}", x.name), ms.iter().all(|&m| m == x.element.rsig()));
        }
        let pairs: Vec<(usize, usize)> = (0..pool.len()).flat_map(|i| (0..pool.len()).map(move |j| (i, j))).collect();
        let results = exec.map(&pairs, |&(i, j)| {
            group_product(&pool[i].element, &pool[j].element, bounds).map(|p| p.rsig())
        });
        for (&(i, j), r) in pairs.iter().zip(results) {
            let want = reduce(pool[i].element.rsig() * pool[j].element.rsig());
            c.eq(&format!("rsig({} * {})", pool[i].name, pool[j].name), r?, want);
        }
    }
    Ok(())
}

fn partition(c: &mut Checks) -> Result<()> {
    c.eq("partition(7, {1,5})", signature_class_partition(7, &[1, 5])?, vec![vec![1, 2, 4, 5], vec![3, 6]]);
    Ok(())
}

fn units(c: &mut Checks, exec: Exec) -> Result<()> {
    let per_m = exec.map_range(49, |k| {
        let m = k as u64 + 2;
        let mut bad = Vec::new();
        for i in 1..=m {
            for j in 1..=m {
                match verify_lcm_claim(m, i, j) {
                    Ok(true) => {}
                    Ok(false) => bad.push(format!("lcm claim fails at m={m}, i={i}, j={j}")),
                    Err(e) => bad.push(format!("m={m}, i={i}, j={j}: {e}")),
                }
            }
        }
        (m * m, bad)
    });
    for (count, bad) in per_m {
        c.total += count as usize - bad.len();
        for b in bad {
            c.check(b, false);
        }
    }
    for n in [4, 10, 28] {
        c.check(format!("divisors of {n} generate the units mod {}", n - 1), divisors_generate_units(n)?);
    }
    Ok(())
}

/// Output of `t` from `q` on `w` followed by six zeros.
fn padded(t: &Transducer, q: usize, w: &[Letter]) -> Result<Word> {
    let mut input = Word::from(w);
    input.extend_from(&[0; 6]);
    Ok(t.evaluate(q, &input)?.0)
}

fn comparable(a: &[Letter], b: &[Letter]) -> bool {
    let k = a.len().min(b.len());
    a[..k] == b[..k]
}

fn words_up_to(n: usize, len: usize) -> Result<Vec<Word>> {
    let alphabet = Alphabet::new(n)?;
    Ok((0..=len).flat_map(|l| Word::all_of_length(alphabet, l)).collect())
}

fn oracles(c: &mut Checks, bounds: &Bounds, exec: Exec) -> Result<()> {
    for n in [2, 3, 4] {
        let base = base_pool(n, bounds)?;
        let words = words_up_to(n, 6)?;
        // minimize, from every state of every pool machine and pairwise product.
        let mut machines: Vec<(String, Transducer)> =
            base.iter().map(|p| (p.name.clone(), p.element.machine().clone())).collect();
        for a in &base {
            for b in &base {
                machines.push((format!("{}*{}", a.name, b.name), product(a.element.machine(), b.element.machine())?));
            }
        }
        let verdicts = exec.map(&machines, |(name, t)| -> Result<Vec<String>> {
            let mut bad = Vec::new();
            for q in t.states() {
                let m = minimize_rooted(t, q, bounds)?;
                let q0 = m.initial().expect("rooted");
                for w in &words {
                    if !comparable(&padded(t, q, w)?, &padded(&m, q0, w)?) {
                        bad.push(format!("minimize({name}) from state {q} differs on {w}"));
                        break;
                    }
                }
            }
            Ok(bad)
        });
        for v in verdicts {
            let bad = v?;
            c.total += 1;
            c.failures.extend(bad);
        }
        // product against composition of evaluations.
        let pairs: Vec<(usize, usize)> = (0..base.len()).flat_map(|i| (0..base.len()).map(move |j| (i, j))).collect();
        let verdicts = exec.map(&pairs, |&(i, j)| -> Result<Option<String>> {
            let (a, b) = (base[i].element.machine(), base[j].element.machine());
            let p = product(a, b)?;
            for q in a.states() {
                for s in b.states() {
                    for w in &words {
                        let (mid, _) = a.evaluate(q, w)?;
                        let (want, _) = b.evaluate(s, &mid)?;
                        if p.evaluate(q * b.num_states() + s, w)?.0 != want {
                            return Ok(Some(format!("product({}, {}) at ({q},{s}) differs on {w}", base[i].name, base[j].name)));
                        }
                    }
                }
            }
            Ok(None)
        });
        for v in verdicts {
            c.total += 1;
            if let Some(f) = v? {
                c.failures.push(f);
            }
        }
        // inverses of homeomorphism states and of realizations over C_{n,n-1}.
        let verdicts = exec.map(&base, |p| -> Result<Vec<String>> {
            let mut bad = Vec::new();
            let g = &p.element;
            let mut rooted: Vec<(String, Transducer)> = g
                .analysis()
                .homeomorphism_states()
                .into_iter()
                .map(|q| Ok((format!("{} at {}", p.name, g.machine().label(q)), minimize_rooted(g.machine(), q, bounds)?)))
                .collect::<Result<_>>()?;
            rooted.push((format!("realization of {}", p.name), realize_in_tbnr(g, n - 1, bounds)?));
            for (name, a) in rooted {
                let inv = invert_initial(&a, bounds)?;
                let q0 = a.initial().expect("rooted");
                let i0 = inv.initial().expect("rooted");
                let roots: Vec<Word> = if a.roots() == 0 {
                    vec![Word::new()]
                } else {
                    (0..a.roots()).map(|r| Word::letter((n + r) as Letter)).collect()
                };
                'words: for w in &words {
                    for root in &roots {
                        let mut input = root.concat(w);
                        input.extend_from(&[0; 6]);
                        let there = inv.evaluate(i0, &a.evaluate(q0, &input)?.0)?.0;
                        let back = a.evaluate(q0, &inv.evaluate(i0, &input)?.0)?.0;
                        let long = root.len() + w.len();
                        if !comparable(&there, &input) || !comparable(&back, &input) || there.len() < long || back.len() < long {
                            bad.push(format!("inverse of {name} fails on {}", input.display_with(n)));
                            break 'words;
                        }
                    }
                }
            }
            Ok(bad)
        });
        for v in verdicts {
            c.total += 1;
            c.failures.extend(v?);
        }
    }
    Ok(())
}

fn lattice(c: &mut Checks, bounds: &Bounds, exec: Exec) -> Result<()> {
    let mut everything = pool(3, 3, bounds, exec)?;
    everything.extend(pool(4, 3, bounds, exec)?);
    everything.extend(base_pool(7, bounds)?);
    everything.extend(base_pool(6, bounds)?);
    for x in &everything {
        let n = x.element.n();
        for i in 1..n {
            for j in 1..n {
                c.check(
                    format!("membership lattice for {} at i={i}, j={j}", x.name),
                    membership_monotonicity_check(&x.element, i, j)?,
                );
            }
        }
        c.check(format!("{} lies in O_{{n,n-1}}", x.name), member_onr_element(&x.element, n - 1)?.holds);
    }
    Ok(())
}
