//! Oracle check suites behind `m0n check`.

use std::fmt::Write;

use m0n::oracle::{expansion_eval, flag_certify, fuzz, string_eq_psi_integral};
use m0n::trees::for_each_stable_tree;
use m0n::{balance, evaluate, evaluate_ratio, multinomial, DecoratedTree, Error, MarkedSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Expansion,
    String,
    Flag,
    All,
}

pub const EXPANSION_MAX: u32 = 12;
pub const STRING_MAX: u32 = 12;
pub const FLAG_MAX: u32 = 7;
/// Up to this `n` the expansion suite visits every decoration of every tree.
const EXPANSION_EXHAUSTIVE: u32 = 6;
/// Random instances per `n` above the exhaustive range.
const EXPANSION_SAMPLES: usize = 2000;
const STRING_EXHAUSTIVE: u32 = 8;
const STRING_SAMPLES: usize = 500;
const FLAG_EXHAUSTIVE: u32 = 6;
pub const FLAG_SAMPLES: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub n: u32,
    pub cases: u64,
    pub exhaustive: bool,
    pub discrepancies: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub seed: u64,
    pub results: Vec<SuiteResult>,
}

impl CheckReport {
    pub fn discrepancy_count(&self) -> usize {
        self.results.iter().map(|r| r.discrepancies.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.discrepancy_count() == 0
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            writeln!(
                out,
                "{:<9} n = {:<2} {:>8} cases ({})  {} discrepancies",
                r.suite,
                r.n,
                r.cases,
                if r.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                },
                r.discrepancies.len()
            )
            .unwrap();
            for d in r.discrepancies.iter().take(10) {
                writeln!(out, "  {d}").unwrap();
            }
        }
        writeln!(
            out,
            "{} (seed {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.seed
        )
        .unwrap();
        out
    }

    pub fn json(&self) -> String {
        let results: Vec<_> = self
            .results
            .iter()
            .map(|r| {
                json!({
                    "suite": r.suite,
                    "n": r.n,
                    "cases": r.cases,
                    "exhaustive": r.exhaustive,
                    "discrepancies": r.discrepancies,
                })
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({
            "seed": self.seed,
            "passed": self.passed(),
            "results": results,
        }))
        .expect("json values serialize");
        s.push('\n');
        s
    }
}

fn check_decorated(d: &DecoratedTree, out: &mut Vec<String>) -> Result<(), Error> {
    let r = evaluate(d)?;
    let x = expansion_eval(d)?;
    let mut bad = Vec::new();
    if x.value != r.value {
        bad.push(format!("expansion {} vs evaluate {}", x.value, r.value));
    }
    if x.surviving > 1 {
        bad.push(format!("{} surviving decompositions", x.surviving));
    }
    if balance(d)?.is_some() {
        match evaluate_ratio(d) {
            Ok(v) if v == r.value => {}
            Ok(v) => bad.push(format!("ratio {v} vs evaluate {}", r.value)),
            Err(e) => bad.push(format!("ratio: {e}")),
        }
    }
    if !bad.is_empty() {
        out.push(format!(
            "{} k = {:?} psi = {:?}: {}",
            d.tree(),
            d.edge_weights(),
            d.psi_weights(),
            bad.join("; ")
        ));
    }
    Ok(())
}

fn expansion_suite(n: u32, rng: &mut ChaCha8Rng) -> Result<SuiteResult, Error> {
    let mut discrepancies = Vec::new();
    let mut cases = 0u64;
    let exhaustive = n <= EXPANSION_EXHAUSTIVE;
    if exhaustive {
        let mut failure = None;
        for_each_stable_tree(n, None, |t| {
            for with_psi in [false, true] {
                let r = fuzz::for_each_decoration(&t, with_psi, |d| {
                    cases += 1;
                    check_decorated(&d, &mut discrepancies)
                });
                if let Err(e) = r {
                    failure.get_or_insert(e);
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
    } else {
        let ground = MarkedSet::new(n)?;
        for _ in 0..EXPANSION_SAMPLES {
            let t = fuzz::random_tree(ground, rng);
            let with_psi = rng.gen_bool(0.5);
            let d = if rng.gen_bool(0.5) {
                fuzz::balanced_decoration(&t, with_psi, rng)
            } else {
                fuzz::random_decoration(&t, with_psi, rng)
            };
            cases += 1;
            check_decorated(&d, &mut discrepancies)?;
        }
    }
    Ok(SuiteResult {
        suite: "expansion",
        n,
        cases,
        exhaustive,
        discrepancies,
    })
}

fn string_suite(n: u32, rng: &mut ChaCha8Rng) -> Result<SuiteResult, Error> {
    let mut discrepancies = Vec::new();
    let mut cases = 0u64;
    let mut check = |k: &[u32]| -> Result<(), Error> {
        cases += 1;
        let a = string_eq_psi_integral(n, k)?;
        let b = multinomial(n - 3, k)?;
        if a != b {
            discrepancies.push(format!("{k:?}: string equation {a} vs multinomial {b}"));
        }
        Ok(())
    };
    let exhaustive = n <= STRING_EXHAUSTIVE;
    if exhaustive {
        let mut k = vec![0u32; n as usize];
        compositions(&mut k, 0, n - 3, &mut check)?;
    } else {
        for _ in 0..STRING_SAMPLES {
            let mut k = vec![0u32; n as usize];
            for _ in 0..n - 3 {
                k[rng.gen_range(0..n as usize)] += 1;
            }
            check(&k)?;
        }
    }
    Ok(SuiteResult {
        suite: "string",
        n,
        cases,
        exhaustive,
        discrepancies,
    })
}

fn compositions(
    k: &mut [u32],
    at: usize,
    left: u32,
    f: &mut dyn FnMut(&[u32]) -> Result<(), Error>,
) -> Result<(), Error> {
    if at + 1 == k.len() {
        k[at] = left;
        let r = f(k);
        k[at] = 0;
        return r;
    }
    for here in 0..=left {
        k[at] = here;
        compositions(k, at + 1, left - here, f)?;
    }
    k[at] = 0;
    Ok(())
}

fn flag_suite(n: u32, seed: u64) -> Result<SuiteResult, Error> {
    let exhaustive = n <= FLAG_EXHAUSTIVE;
    let report = flag_certify(n, (!exhaustive).then_some(FLAG_SAMPLES), seed)?;
    Ok(SuiteResult {
        suite: "flag",
        n,
        cases: report.pairs_checked,
        exhaustive,
        discrepancies: report
            .discrepancies
            .iter()
            .map(|(a, b)| format!("{a} and {b}"))
            .collect(),
    })
}

fn guard(n_max: u32, max: u32) -> Result<(), Error> {
    if n_max > max {
        Err(Error::TooLarge { n: n_max, max })
    } else {
        Ok(())
    }
}

/// Runs `suite` for every `n` up to `n_max`. `All` clamps each suite to its
/// own maximum; a single suite rejects an `n_max` beyond it.
pub fn run_check(suite: Suite, n_max: u32, seed: u64) -> Result<CheckReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    let (expansion, string, flag) = match suite {
        Suite::Expansion => {
            guard(n_max, EXPANSION_MAX)?;
            (Some(n_max), None, None)
        }
        Suite::String => {
            guard(n_max, STRING_MAX)?;
            (None, Some(n_max), None)
        }
        Suite::Flag => {
            guard(n_max, FLAG_MAX)?;
            if n_max < 4 {
                return Err(Error::TooSmall { n: n_max, min: 4 });
            }
            (None, None, Some(n_max))
        }
        Suite::All => (
            Some(n_max.min(EXPANSION_MAX)),
            Some(n_max.min(STRING_MAX)),
            Some(n_max.min(FLAG_MAX)),
        ),
    };
    if n_max < 3 {
        return Err(Error::InvalidGround(n_max));
    }
    if let Some(top) = expansion {
        for n in 3..=top {
            results.push(expansion_suite(n, &mut rng)?);
        }
    }
    if let Some(top) = string {
        for n in 3..=top {
            results.push(string_suite(n, &mut rng)?);
        }
    }
    if let Some(top) = flag {
        for n in 4..=top {
            results.push(flag_suite(n, seed)?);
        }
    }
    Ok(CheckReport { seed, results })
}
