//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use m0n::oracle::{expansion_eval, flag_certify, fuzz, string_eq_psi_integral};
use m0n::trees::for_each_stable_tree;
use m0n::{
    color_for_divisor, enumerate_stable_trees, evaluate, evaluate_ratio, meet_divisor, multinomial,
    tree_from_splits, BigInt, DecoratedTree, Error, Label, MarkedSet, Reason, Split, StableTree,
};
use m0n_cli::{evaluate_expression, parse, Evaluation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type HalvesCase = (&'static [Label], Label, Label, (u32, u32));

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn eval(n: u32, text: &str) -> Result<Evaluation, String> {
    let ground = MarkedSet::new(n).map_err(|e| e.to_string())?;
    let expr = parse(text, ground).map_err(|e| e.to_string())?;
    evaluate_expression(&expr).map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(took)
}

fn six_vertex() -> Outcome {
    let start = Instant::now();
    let ev = eval(
        15,
        "D{1,2}^2 D{3,4,5}^3 D{1,2,3,4,5,6,7,8}^4 D{11,12} D{13,14,15}^2",
    )?;
    let took = within(start, Duration::from_millis(10))?;
    let r = &ev.result;
    ensure!(r.value == BigInt::from(-36), "value {}", r.value);
    ensure!(r.sign == -1, "sign {}", r.sign);
    let mut factors: Vec<BigInt> = r
        .edge_factors
        .iter()
        .map(|(_, f)| f.clone())
        .chain(r.vertex_factors.iter().map(|(_, f)| f.clone()))
        .filter(|f| *f != BigInt::from(1))
        .collect();
    factors.sort();
    ensure!(
        factors == [2, 3, 6].map(BigInt::from),
        "factors {factors:?}"
    );
    Ok(format!("-36 = -1 * 3 * 2 * 6 in {took:?}"))
}

fn halves_at(
    ev: &Evaluation,
    edge: &[Label],
    at: Label,
    other: Label,
) -> Result<(u32, u32), String> {
    let d = ev.decorated.as_ref().ok_or("no stratum")?;
    let w = ev.result.weighting.as_ref().ok_or("no weighting")?;
    let t = d.tree();
    let split = Split::from_labels(t.ground(), edge).map_err(|e| e.to_string())?;
    let e = t.edge_of_split(&split).ok_or("edge missing")?;
    Ok((
        w.half(t.leaf_vertex(at), e),
        w.half(t.leaf_vertex(other), e),
    ))
}

fn psi_fixture() -> Outcome {
    let start = Instant::now();
    let ev = eval(
        15,
        "D{1,2}^2 D{3,4,5} D{1,2,3,4,5,6,7,8}^3 D{11,12} D{13,14,15}^2 psi4 psi7^2",
    )?;
    let took = within(start, Duration::from_millis(10))?;
    ensure!(
        ev.result.value == BigInt::from(3),
        "value {}",
        ev.result.value
    );
    ensure!(
        ev.result.reason == Reason::Ok,
        "reason {:?}",
        ev.result.reason
    );
    // Vertices named by a leaf they carry: u 1, v 3, w 6, x 9, y 11, z 13.
    let expected: [HalvesCase; 5] = [
        (&[1, 2, 3, 4, 5, 6, 7, 8], 9, 6, (2, 0)),
        (&[1, 2], 1, 6, (0, 1)),
        (&[3, 4, 5], 3, 6, (0, 0)),
        (&[13, 14, 15], 9, 13, (0, 1)),
        (&[11, 12], 9, 11, (0, 0)),
    ];
    for (edge, at, other, want) in expected {
        let got = halves_at(&ev, edge, at, other)?;
        ensure!(
            got == want,
            "edge {edge:?}: halves {got:?}, expected {want:?}"
        );
    }
    Ok(format!("+3 with the expected balanced weights in {took:?}"))
}

fn ratio_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut compared, mut unbalanced) = (0u32, 0u32);
    while compared < 10_000 {
        let n = rng.gen_range(3..=12);
        let t = fuzz::random_tree(MarkedSet::new(n).unwrap(), &mut rng);
        let with_psi = rng.gen_bool(0.5);
        let d = if rng.gen_bool(0.8) {
            fuzz::balanced_decoration(&t, with_psi, &mut rng)
        } else {
            fuzz::random_decoration(&t, with_psi, &mut rng)
        };
        let r = evaluate(&d).map_err(|e| e.to_string())?;
        match evaluate_ratio(&d) {
            Ok(v) => {
                ensure!(v == r.value, "{}: ratio {v} vs {}", t, r.value);
                compared += 1;
            }
            Err(Error::NoBalanceGiven) => {
                ensure!(r.reason == Reason::NoBalance, "{t}: ratio found no balance");
                unbalanced += 1;
            }
            Err(e) => return Err(format!("{t}: {e}")),
        }
    }
    Ok(format!(
        "{compared} balanced decorations agree, {unbalanced} unbalanced skipped"
    ))
}

fn expansion_matches(d: &DecoratedTree) -> Result<(), String> {
    let r = evaluate(d).map_err(|e| e.to_string())?;
    let x = expansion_eval(d).map_err(|e| e.to_string())?;
    ensure!(
        x.value == r.value,
        "{}: expansion {} vs {}",
        d.tree(),
        x.value,
        r.value
    );
    ensure!(
        x.surviving <= 1,
        "{}: {} surviving tuples",
        d.tree(),
        x.surviving
    );
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cases = 0u64;
    for n in 3..=6 {
        let mut failure = None;
        for_each_stable_tree(n, None, |t| {
            for with_psi in [false, true] {
                fuzz::for_each_decoration(&t, with_psi, |d| {
                    cases += 1;
                    if let Err(e) = expansion_matches(&d) {
                        failure.get_or_insert(e);
                    }
                    Ok(())
                })
                .unwrap();
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some(e) = failure {
            return Err(e);
        }
    }
    let exhaustive = cases;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 7..=8 {
        let ground = MarkedSet::new(n).unwrap();
        for _ in 0..10_000 {
            let t = fuzz::random_tree(ground, &mut rng);
            let with_psi = rng.gen_bool(0.5);
            let d = if rng.gen_bool(0.5) {
                fuzz::balanced_decoration(&t, with_psi, &mut rng)
            } else {
                fuzz::random_decoration(&t, with_psi, &mut rng)
            };
            expansion_matches(&d)?;
            cases += 1;
        }
    }
    let took = within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{cases} instances ({exhaustive} exhaustive for n <= 6), at most one survivor, in {took:?}"
    ))
}

fn each_composition(
    k: &mut Vec<u32>,
    parts: usize,
    left: u32,
    f: &mut dyn FnMut(&[u32]) -> Outcome,
) -> Outcome {
    if k.len() + 1 == parts {
        k.push(left);
        let r = f(k);
        k.pop();
        return r;
    }
    for here in 0..=left {
        k.push(here);
        let r = each_composition(k, parts, left - here, f);
        k.pop();
        r?;
    }
    Ok(String::new())
}

fn string_equation() -> Outcome {
    let start = Instant::now();
    let mut cases = 0u64;
    for n in 3..=8u32 {
        each_composition(&mut Vec::new(), n as usize, n - 3, &mut |k| {
            cases += 1;
            let a = string_eq_psi_integral(n, k).map_err(|e| e.to_string())?;
            let b = multinomial(n - 3, k).map_err(|e| e.to_string())?;
            ensure!(a == b, "n = {n} {k:?}: {a} vs {b}");
            Ok(String::new())
        })?;
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("{cases} exponent vectors for n <= 8 in {took:?}"))
}

fn flag_property() -> Outcome {
    let start = Instant::now();
    let mut pairs = Vec::new();
    for n in 4..=6 {
        let report = flag_certify(n, None, 0).map_err(|e| e.to_string())?;
        ensure!(
            report.is_flag(),
            "n = {n}: {:?}",
            report.discrepancies.first()
        );
        pairs.push(report.pairs_checked);
    }
    let sampled = flag_certify(7, Some(100_000), 3).map_err(|e| e.to_string())?;
    ensure!(
        sampled.is_flag(),
        "n = 7: {:?}",
        sampled.discrepancies.first()
    );
    ensure!(
        sampled.pairs_checked >= 100_000,
        "only {} pairs",
        sampled.pairs_checked
    );
    let took = within(start, Duration::from_secs(300))?;
    Ok(format!(
        "exhaustive n = 4..6 ({pairs:?} pairs), {} sampled at n = 7, in {took:?}",
        sampled.pairs_checked
    ))
}

fn small_cases() -> Outcome {
    let mut checked = 0;
    for t in enumerate_stable_trees(4, Some(1)).map_err(|e| e.to_string())? {
        let block: Vec<String> = t.edges()[0]
            .split
            .block()
            .iter()
            .map(|l| l.to_string())
            .collect();
        let ev = eval(4, &format!("D{{{}}}", block.join(",")))?;
        ensure!(
            ev.result.value == BigInt::from(1),
            "{t}: {}",
            ev.result.value
        );
        checked += 1;
    }
    let cases = [
        (5, "D{1,2}^2", -1),
        (5, "D{1,2} D{1,3}", 0),
        (6, "D{1,2,3}^3", 2),
        (6, "D{1,2}^3", 1),
    ];
    for (n, text, want) in cases {
        let ev = eval(n, text)?;
        ensure!(
            ev.result.value == BigInt::from(want),
            "{text}: {}",
            ev.result.value
        );
        checked += 1;
    }
    Ok(format!("{checked} values"))
}

fn double_factorial(m: u64) -> u64 {
    (1..=m).rev().step_by(2).product()
}

fn enumeration_counts() -> Outcome {
    let start = Instant::now();
    for n in 4..=7u32 {
        let divisors = enumerate_stable_trees(n, Some(1))
            .map_err(|e| e.to_string())?
            .len() as u64;
        let want = (1u64 << (n - 1)) - u64::from(n) - 1;
        ensure!(
            divisors == want,
            "n = {n}: {divisors} divisors, expected {want}"
        );
        let trivalent = enumerate_stable_trees(n, Some(n - 3))
            .map_err(|e| e.to_string())?
            .len() as u64;
        let want = double_factorial(2 * u64::from(n) - 5);
        ensure!(
            trivalent == want,
            "n = {n}: {trivalent} trivalent trees, expected {want}"
        );
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("n = 4..7 in {took:?}"))
}

fn coloring_pair(t: &StableTree, d: &Split) -> Result<bool, String> {
    match (meet_divisor(t, d), color_for_divisor(t, d)) {
        (Ok(Some(s)), Ok(c)) => {
            let separated = c.separate().map_err(|e| e.to_string())?;
            ensure!(
                separated == s,
                "{t} with {d}: coloring gives {separated}, insertion {s}"
            );
            Ok(true)
        }
        (Ok(None), Err(Error::EdgeConditionFails(_))) => Ok(false),
        (m, c) => Err(format!("{t} with {d}: {m:?} vs {:?}", c.err())),
    }
}

fn coloring_cross_check() -> Outcome {
    let start = Instant::now();
    let g9 = MarkedSet::new(9).unwrap();
    let splits = [
        "2,6,8|1,3,4,5,7,9",
        "1,2,4,6,8|3,5,7,9",
        "1,4|2,3,5,6,7,8,9",
        "3,9|1,2,4,5,6,7,8",
    ]
    .map(|s| Split::parse(g9, s).unwrap());
    let t = tree_from_splits(g9, splits).map_err(|e| e.to_string())?;
    let d = Split::parse(g9, "1,2,4,5,6,8|3,7,9").unwrap();
    let c = color_for_divisor(&t, &d).map_err(|e| e.to_string())?;
    ensure!(
        c.split_vertex == t.leaf_vertex(5),
        "split vertex {}",
        c.split_vertex
    );
    ensure!(coloring_pair(&t, &d)?, "fixture divisor does not meet");

    let (mut met, mut missed) = (0u64, 0u64);
    for n in 4..=7 {
        let divisors: Vec<Split> = enumerate_stable_trees(n, Some(1))
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|t| t.edges()[0].split)
            .collect();
        let mut failure = None;
        for_each_stable_tree(n, None, |t| {
            for d in &divisors {
                match coloring_pair(&t, d) {
                    Ok(true) => met += 1,
                    Ok(false) => missed += 1,
                    Err(e) => {
                        failure.get_or_insert(e);
                    }
                }
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some(e) = failure {
            return Err(e);
        }
    }
    let took = within(start, Duration::from_secs(120))?;
    Ok(format!(
        "{met} meeting pairs agree, {missed} incompatible, in {took:?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("six-vertex fixture", six_vertex),
        ("psi fixture", psi_fixture),
        ("ratio form consistency", ratio_consistency),
        ("expansion oracle equivalence", oracle_equivalence),
        ("string equation", string_equation),
        ("flag property", flag_property),
        ("small-case ground truths", small_cases),
        ("enumeration counts", enumeration_counts),
        ("coloring vs split insertion", coloring_cross_check),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
