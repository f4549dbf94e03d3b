//! Checks shared by the regular tests and the acceptance harness. Each
//! returns a short summary on success and the first failure otherwise.

use std::collections::{BTreeMap, BTreeSet};

use demeterlint_core::adapt::{attribute_waterfall, Adapter, Outcome, RemainingStatus};
use demeterlint_core::demeter::{base_friend_set, detect, violates};
use demeterlint_core::pipeline::{analyze, Analysis, AnalysisInput};
use demeterlint_core::report::{render, Format};

use super::gen::generate;
use super::{attribution, fixture_oracle, oracle_disagreement, oracle_json, run_fixture, FIXTURES};

pub type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The listing03 fixture under the generic preset: 21 base violations, the
/// survivor sequence stored in oracle.json, and the two `Connector.owner()` calls left over.
pub fn listing03_generic() -> Check {
    let expected: Vec<usize> = oracle_json()["listing03_generic_survivors"]
        .as_array()
        .expect("survivors")
        .iter()
        .map(|n| n.as_u64().expect("count") as usize)
        .collect();
    let a = run_fixture("listing03", Some("generic"));
    let w = attribute_waterfall(&a.verdicts, &a.config);
    let mut seq = vec![w.total];
    seq.extend(w.layers.iter().map(|l| l.remaining_after));
    ensure(seq == expected, || format!("survivors {seq:?}, expected {expected:?}"))?;

    // The same sequence from truncated configurations, independently of attribution.
    let mut truncated = vec![a.verdicts.len()];
    for l in &a.config.layers {
        let cfg = a.config.truncated(Some(l.index));
        let ad = Adapter::new(&a.table, &cfg, &a.executables);
        let left = a
            .verdicts
            .iter()
            .filter(|v| {
                let fs = ad.effective(&v.violation.executable, Some(l.index)).expect("executable");
                violates(&v.violation.site, &fs)
            })
            .count();
        truncated.push(left);
    }
    ensure(truncated == expected, || format!("truncated survivors {truncated:?}, expected {expected:?}"))?;

    let left: Vec<String> = a
        .verdicts
        .iter()
        .filter(|v| matches!(v.outcome, Outcome::Remaining { .. }))
        .map(|v| v.violation.site.member.display_name())
        .collect();
    ensure(left == ["Connector.owner()", "Connector.owner()"], || format!("remaining {left:?}"))?;
    Ok(format!("survivors {}", seq.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("→")))
}

/// Rules the listing's discussion credits with silencing it.
const SILENCERS: &[(&str, &[&str])] = &[
    ("listing01", &["D2"]),
    ("listing04", &["D5", "D6"]),
    ("listing05", &["D10", "D7", "D8", "D9"]),
    ("listing06", &["D12"]),
    ("listing14", &["D26"]),
    ("listing15", &["D28"]),
];

/// One fixture against oracle.json under the jhotdraw preset.
pub fn fixture_matches_oracle(name: &str) -> Result<(), String> {
    let o = fixture_oracle(name);
    let base = run_fixture(name, None);
    let accesses: usize = base.executables.iter().map(|e| e.body_accesses.len()).sum();
    ensure(accesses == o.accesses, || format!("{name}: {accesses} accesses, oracle {}", o.accesses))?;
    ensure(base.verdicts.len() == o.base, || format!("{name}: {} base violations, oracle {}", base.verdicts.len(), o.base))?;
    let a = run_fixture(name, Some("jhotdraw"));
    ensure(a.verdicts.len() == o.base, || format!("{name}: configuration changed the base count"))?;
    let (silenced, remaining) = attribution(&a);
    ensure(silenced == o.silenced, || format!("{name}: silenced {silenced:?}, oracle {:?}", o.silenced))?;
    ensure(remaining == o.remaining, || format!("{name}: remaining {remaining:?}, oracle {:?}", o.remaining))?;
    Ok(())
}

pub fn listings_silenced_by_their_rules() -> Check {
    for (name, rules) in SILENCERS {
        fixture_matches_oracle(name)?;
        let a = run_fixture(name, Some("jhotdraw"));
        let (silenced, remaining) = attribution(&a);
        ensure(remaining.is_empty(), || format!("{name}: {remaining:?} left"))?;
        for r in *rules {
            ensure(silenced.contains_key(*r), || format!("{name}: {r} silences nothing ({silenced:?})"))?;
        }
    }
    Ok(format!("{} listings", SILENCERS.len()))
}

fn json(input: &AnalysisInput) -> Result<String, String> {
    analyze(input).map(|a| render(&a.report, Format::Json)).map_err(|e| e.to_string())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool").install(f)
}

/// Every invariant on one generated program.
pub fn program_invariants(seed: u64) -> Result<(), String> {
    let g = generate(seed);
    let a: Analysis = analyze(&g.input).map_err(|e| format!("seed {seed}: {e}"))?;
    let ad = Adapter::new(&a.table, &a.config, &a.executables);
    let fail = |what: &str, detail: String| format!("seed {seed}: {what}: {detail}");

    // Closure idempotence and monotonicity over layer prefixes.
    let prefixes: Vec<Option<u32>> = std::iter::once(None).chain(a.config.layers.iter().map(|l| Some(l.index))).collect();
    for e in &a.executables {
        let mut prev: Option<(BTreeSet<_>, BTreeSet<String>)> = None;
        for k in &prefixes {
            let fs = ad.effective(&e.id, *k).expect("executable");
            let again = a.table.supertype_closure(&fs.closure);
            if again != fs.closure {
                return Err(fail("closure not idempotent", format!("{} through {k:?}", e.id)));
            }
            let bad: BTreeSet<String> =
                e.body_accesses.iter().filter(|s| violates(s, &fs)).map(|s| s.site_id.clone()).collect();
            if let Some((pc, pb)) = &prev {
                if !pc.is_subset(&fs.closure) {
                    return Err(fail("friend set shrank", format!("{} at {k:?}", e.id)));
                }
                if !bad.is_subset(pb) {
                    return Err(fail("violations grew", format!("{} at {k:?}", e.id)));
                }
            }
            prev = Some((fs.closure.clone(), bad));
        }
    }

    // Conservation: base violations are exactly the verdicts, each counted once.
    let base: BTreeSet<String> = a
        .executables
        .iter()
        .flat_map(|e| detect(e, &base_friend_set(e, &a.table)).into_iter().map(|v| v.site.site_id))
        .collect();
    let judged: BTreeSet<String> = a.verdicts.iter().map(|v| v.violation.site.site_id.clone()).collect();
    if base != judged || judged.len() != a.verdicts.len() {
        return Err(fail("verdicts differ from base violations", format!("{} vs {}", judged.len(), base.len())));
    }
    let t = &a.report.totals;
    let silenced: usize = t.silenced_per_layer.iter().map(|c| c.count).sum();
    if silenced + t.remaining != t.potential_violations || t.remaining_by_status.values().sum::<usize>() != t.remaining {
        return Err(fail("totals do not add up", format!("{t:?}")));
    }
    let w = attribute_waterfall(&a.verdicts, &a.config);
    for (l, tally) in a.config.layers.iter().zip(&w.layers) {
        let cfg = a.config.truncated(Some(l.index));
        let left = Adapter::new(&a.table, &cfg, &a.executables)
            .classify_all()
            .iter()
            .filter(|v| matches!(v.outcome, Outcome::Remaining { .. }))
            .count();
        if left != tally.remaining_after {
            return Err(fail("prefix survivors disagree", format!("layer {}: {left} vs {}", l.index, tally.remaining_after)));
        }
    }

    // Empty configuration: everything is a silent-less candidate.
    let mut bare = g.input.clone();
    bare.configs.clear();
    let b = analyze(&bare).map_err(|e| fail("bare analysis", e.to_string()))?;
    let bare_sites: BTreeSet<String> = b.verdicts.iter().map(|v| v.violation.site.site_id.clone()).collect();
    if bare_sites != base {
        return Err(fail("empty configuration changed the base set", String::new()));
    }
    if !b.verdicts.iter().all(|v| {
        v.outcome == Outcome::Remaining { status: RemainingStatus::CandidateTruePositive, status_rule: None, hint: None }
    }) {
        return Err(fail("empty configuration produced a non-candidate", String::new()));
    }

    // Determinism across runs and thread counts.
    let one = in_pool(1, || json(&g.input))?;
    let four = in_pool(4, || json(&g.input))?;
    let again = json(&g.input)?;
    if one != four || one != again {
        return Err(fail("report bytes differ", String::new()));
    }
    Ok(())
}

/// Oracle agreement on every fixture under every preset and on `programs`
/// generated programs.
pub fn oracle_agreement(programs: u64) -> Check {
    let mut sites = 0;
    for name in FIXTURES {
        for preset in [None, Some("generic"), Some("jhotdraw")] {
            let a = run_fixture(name, preset);
            if let Some(d) = oracle_disagreement(&a) {
                return Err(format!("{name} {preset:?}: {d}"));
            }
            sites += a.verdicts.len();
        }
    }
    for seed in 0..programs {
        let g = generate(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let a = analyze(&g.input).map_err(|e| format!("program {seed}: {e}"))?;
        if let Some(d) = oracle_disagreement(&a) {
            return Err(format!("program {seed}: {d}"));
        }
        sites += a.verdicts.len();
    }
    Ok(format!("{} fixtures x 3 presets + {programs} programs, {sites} verdicts", FIXTURES.len()))
}

/// Per-rule silenced counts keyed by rule id, for reconciliation output.
pub fn rule_counts(a: &Analysis) -> BTreeMap<String, usize> {
    attribution(a).0
}
