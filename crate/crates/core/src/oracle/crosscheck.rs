//! Randomized cross-check of the relation theorems against the brute-force
//! oracles.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::generate::{random_abstraction, random_system, AbstractionMode, GeneratorConfig};
use super::property::{check_property_two, check_property_two_all_controllers, OracleQuery};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::format::to_pretty;
use crate::relations::{
    check_asr, check_frr, check_mcr, maximal_interface, mcr_extension, Relation, RelationKind,
};
use crate::system::FiniteTransitionSystem;

/// Enough for every total controller on 5 states with 3 inputs (7⁵).
pub const CONTROLLER_BUDGET: u128 = 20_000;

/// Environment variable fixing the worker thread count.
pub const THREADS_ENV: &str = "SYMCRET_THREADS";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureBundle {
    pub trial: usize,
    pub seed: u64,
    pub property: String,
    pub detail: String,
    pub instance: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub trials: usize,
    pub seed: u64,
    /// Fixed horizon, or `null` for `|X1|·|X2| + 1` per trial.
    pub horizon: Option<usize>,
    /// How often each implication had its premise satisfied.
    pub counters: BTreeMap<String, u64>,
    pub failures: Vec<FailureBundle>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn counter(&self, name: &str) -> u64 {
        self.counters.get(name).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Instance {
    s1: FiniteTransitionSystem,
    s2: FiniteTransitionSystem,
    r: Relation,
    s3: FiniteTransitionSystem,
    q: Relation,
}

fn instance_json(inst: &Instance) -> Value {
    let pairs = |r: &Relation| -> Vec<(String, String)> {
        r.pairs().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    };
    json!({
        "s1": inst.s1,
        "s2": inst.s2,
        "r": pairs(&inst.r),
        "s3": inst.s3,
        "q": pairs(&inst.q),
    })
}

fn generate(trial: usize, seed: u64) -> Instance {
    if trial == 0 {
        // the worked example, so the ASR-but-not-MCR branch is always hit
        let fig = fixtures::fig5();
        let id = Relation::identity(fig.s2.states());
        return Instance {
            s3: fig.s2_prime.clone(),
            q: id,
            s1: fig.s1,
            s2: fig.s2,
            r: fig.r,
        };
    }
    let cfg = GeneratorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s1 = random_system(&mut rng, "p", &cfg);
    let mode = AbstractionMode::ALL[rng.gen_range(0..AbstractionMode::ALL.len())];
    let (s2, r) = random_abstraction(&mut rng, &s1, "q", mode, &cfg);
    let mode3 = AbstractionMode::ALL[rng.gen_range(0..AbstractionMode::ALL.len())];
    let (s3, q) = random_abstraction(&mut rng, &s2, "r", mode3, &cfg);
    Instance { s1, s2, r, s3, q }
}

#[derive(Default)]
struct TrialOutcome {
    counters: BTreeMap<String, u64>,
    failures: Vec<(String, String)>,
}

impl TrialOutcome {
    fn count(&mut self, name: &str) {
        *self.counters.entry(name.to_owned()).or_default() += 1;
    }

    fn require(&mut self, ok: bool, property: &str, detail: impl Into<String>) {
        if !ok {
            self.failures.push((property.to_owned(), detail.into()));
        }
    }
}

fn run_trial(inst: &Instance, horizon: Option<usize>) -> Result<TrialOutcome> {
    let Instance { s1, s2, r, s3, q } = inst;
    let mut out = TrialOutcome::default();
    let query = OracleQuery {
        initial: None,
        horizon,
    };

    let asr = check_asr(s1, s2, r)?.holds;
    let mcr = check_mcr(s1, s2, r)?.holds;
    let frr = check_frr(s1, s2, r)?.holds;
    out.count("trials");
    if asr {
        out.count("asr");
    }

    // MCR ⇒ ASR
    if mcr {
        out.count("mcr");
        out.require(asr, "mcr_implies_asr", "MCR holds but ASR fails");
    }
    // FRR ⇒ MCR
    if frr {
        out.count("frr");
        out.require(mcr, "frr_implies_mcr", "FRR holds but MCR fails");
    }
    // partitions: ASR ⇔ MCR
    if r.is_single_valued() {
        out.count("partition");
        out.require(asr == mcr, "partition_asr_iff_mcr", format!("ASR = {asr}, MCR = {mcr}"));
    }

    // every abstract controller concretizes under MCR
    if mcr {
        let iface = maximal_interface(s1, s2, r, RelationKind::Mcr)?;
        match check_property_two_all_controllers(s1, s2, r, &iface, &query, CONTROLLER_BUDGET) {
            Ok(v) => {
                out.count("mcr_all_controllers");
                out.require(
                    v.holds,
                    "mcr_implies_property_two",
                    format!("controller {:?} violates", v.witness_controller),
                );
            }
            Err(Error::BudgetExceeded { .. }) => out.count("skipped_budget"),
            Err(e) => return Err(e),
        }
    }
    // some abstract controller fails when only ASR holds
    if asr && !mcr {
        let iface = maximal_interface(s1, s2, r, RelationKind::Asr)?;
        match check_property_two_all_controllers(s1, s2, r, &iface, &query, CONTROLLER_BUDGET) {
            Ok(v) => {
                out.count("asr_not_mcr_violation_found");
                out.require(!v.holds, "asr_without_mcr_has_violator", "every controller concretized");
            }
            Err(Error::BudgetExceeded { .. }) => out.count("skipped_budget"),
            Err(e) => return Err(e),
        }
    }

    // the verdict for one controller can only flip from true to false
    // as the horizon grows
    if asr {
        let iface = maximal_interface(s1, s2, r, RelationKind::Asr)?;
        let c2 = s2.full_controller();
        let long = query.horizon.unwrap_or_else(|| super::property::default_oracle_horizon(s1, s2));
        let short = (long / 2).max(1);
        let h_short = check_property_two(s1, s2, r, &iface, &c2, &OracleQuery::with_horizon(short))?.holds;
        let h_long = check_property_two(s1, s2, r, &iface, &c2, &OracleQuery::with_horizon(long))?.holds;
        out.count("monotonicity");
        out.require(!h_long || h_short, "horizon_monotone", format!("short {short}: {h_short}, long {long}: {h_long}"));
    }

    // extension
    if asr {
        match mcr_extension(s1, s2, r) {
            Ok(ext) => {
                out.count("extension");
                out.require(check_mcr(s1, &ext, r)?.holds, "extension_mcr", "S1 vs S2' not MCR");
                out.require(
                    check_mcr(s2, &ext, &Relation::identity(s2.states()))?.holds,
                    "extension_contains_original",
                    "S2 vs S2' not MCR",
                );
                out.require(
                    s2.transitions().all(|(x, u, succ)| succ.is_subset(ext.post(x, u))),
                    "extension_grows",
                    "a transition was removed",
                );
                if r.is_single_valued() {
                    out.require(ext == *s2, "partition_extension_is_identity", "F2' differs from F2");
                }
            }
            Err(e) => out.require(false, "extension", e.to_string()),
        }
    }

    // reflexivity and transitivity
    for (name, sys) in [("s1", s1), ("s2", s2)] {
        let id = Relation::identity(sys.states());
        out.require(check_mcr(sys, sys, &id)?.holds, "mcr_reflexive", name);
    }
    if mcr && check_mcr(s2, s3, q)?.holds {
        out.count("transitivity");
        let rq = r.compose(q)?;
        out.require(check_mcr(s1, s3, &rq)?.holds, "mcr_transitive", "R∘Q is not MCR");
    }
    Ok(out)
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|_| panic!("cannot build a pool of {n} threads")),
        _ => f(),
    }
}

/// Runs `trials` independent trials. Trial 0 is the worked example; the
/// rest are random with seeds derived from `seed`. `horizon = None` uses
/// `|X1|·|X2| + 1` for each trial.
pub fn crosscheck_theorems(trials: usize, seed: u64, horizon: Option<usize>) -> Result<CrosscheckReport> {
    let results: Vec<(usize, u64, Result<TrialOutcome>, Instance)> = with_pool(|| {
        (0..trials)
            .into_par_iter()
            .map(|trial| {
                let s = trial_seed(seed, trial);
                let inst = generate(trial, s);
                let outcome = run_trial(&inst, horizon);
                (trial, s, outcome, inst)
            })
            .collect()
    });

    let mut report = CrosscheckReport {
        trials,
        seed,
        horizon,
        ..CrosscheckReport::default()
    };
    for (trial, s, outcome, inst) in results {
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => TrialOutcome {
                failures: vec![("error".to_owned(), e.to_string())],
                ..TrialOutcome::default()
            },
        };
        for (k, v) in outcome.counters {
            *report.counters.entry(k).or_default() += v;
        }
        for (property, detail) in outcome.failures {
            report.failures.push(FailureBundle {
                trial,
                seed: s,
                property,
                detail,
                instance: instance_json(&inst),
            });
        }
    }
    Ok(report)
}
