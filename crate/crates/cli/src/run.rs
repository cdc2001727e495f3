//! Command execution: build covers from validated instances, emit canonical
//! reports, aggregate batches. All timings go to stderr so report bytes
//! depend only on (input, seed, binary).

use crate::gen::{random_instance, Profile};
use crate::instance::{InstanceFile, Issue, Kind};
use crate::report::{self, json_u64, CapHit, Outcome};
use crate::{DEFAULT_CAP, EXIT_CAP, EXIT_INVALID, EXIT_OK, EXIT_VIOLATION};
use metator_core::lattice::{GammaLattice, QuadraticForm, Sublattice};
use metator_core::matrix::IntMat;
use metator_core::real::RealCover;
use metator_core::unramified::UnramifiedCover;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

fn emit(text: &str, out: Option<&Path>) -> i32 {
    match out {
        None => {
            print!("{text}");
            EXIT_OK
        }
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                EXIT_INVALID
            }
        },
    }
}

fn emit_issues(issues: &[Issue], out: Option<&Path>) -> i32 {
    let value = json!({
        "errors": Value::Array(issues.iter().map(Issue::to_value).collect()),
    });
    let code = emit(&report::render(&value), out);
    if code == EXIT_OK {
        EXIT_INVALID
    } else {
        code
    }
}

fn load(path: &Path, out: Option<&Path>) -> Result<InstanceFile, i32> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let issue = Issue {
                path: String::new(),
                rule: format!("cannot read {}: {e}", path.display()),
            };
            return Err(emit_issues(&[issue], out));
        }
    };
    InstanceFile::from_json(&text).map_err(|issues| emit_issues(&issues, out))
}

fn effective_cap(file: &InstanceFile, flag: Option<u64>) -> u64 {
    flag.or_else(|| file.caps.and_then(|c| c.center))
        .unwrap_or(DEFAULT_CAP)
}

enum Built {
    Unramified(Box<UnramifiedCover>, Option<Sublattice>),
    Real(Box<RealCover>),
}

fn build(file: &InstanceFile) -> Result<Built, Vec<Issue>> {
    let gamma = IntMat::from_rows(&file.gamma);
    let lat = GammaLattice::new(file.d, gamma)
        .map_err(|e| vec![Issue { path: "gamma".into(), rule: e.to_string() }])?;
    let qf = QuadraticForm::new(IntMat::from_rows(&file.q_upper))
        .map_err(|e| vec![Issue { path: "Q_upper".into(), rule: e.to_string() }])?;
    match file.kind {
        Kind::Real => {
            let cover = RealCover::new(lat, qf)
                .map_err(|e| vec![Issue { path: "gamma".into(), rule: e.to_string() }])?;
            Ok(Built::Real(Box::new(cover)))
        }
        Kind::NonarchUnramified => {
            let cover =
                UnramifiedCover::new(lat, qf, file.q.expect("validated"), file.n)
                    .map_err(|e| vec![Issue { path: "Q_upper".into(), rule: e.to_string() }])?;
            let v = match &file.v_basis {
                None => None,
                Some(cols) => {
                    let gens: Vec<Vec<BigInt>> = cols
                        .iter()
                        .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
                        .collect();
                    let v = Sublattice::from_generators(file.rank, &gens);
                    cover.pseudospherical(Some(&v)).map_err(|e| {
                        vec![Issue { path: "V_basis".into(), rule: e.to_string() }]
                    })?;
                    Some(v)
                }
            };
            Ok(Built::Unramified(Box::new(cover), v))
        }
    }
}

fn single_outcome(
    file: &InstanceFile,
    check: bool,
    cap: u64,
    seed: Value,
) -> Result<Result<Outcome, CapHit>, Vec<Issue>> {
    Ok(match build(file)? {
        Built::Unramified(cover, v) => {
            report::unramified_report(file, &cover, v.as_ref(), check, cap, seed)
        }
        Built::Real(cover) => report::real_report(file, &cover, check, cap, seed),
    })
}

fn run_single(path: &Path, check: bool, cap_flag: Option<u64>, out: Option<&Path>) -> i32 {
    let file = match load(path, out) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let cap = effective_cap(&file, cap_flag);
    let started = Instant::now();
    let outcome = match single_outcome(&file, check, cap, Value::Null) {
        Ok(o) => o,
        Err(issues) => return emit_issues(&issues, out),
    };
    eprintln!("timing_ms {}", started.elapsed().as_millis());
    match outcome {
        Err(hit) => {
            let code = emit(&report::render(&hit.to_value()), out);
            if code == EXIT_OK {
                EXIT_CAP
            } else {
                code
            }
        }
        Ok(Outcome { report, ok }) => {
            let code = emit(&report::render(&report), out);
            if code != EXIT_OK {
                code
            } else if ok {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
    }
}

pub fn run_invariants(path: &Path, cap_flag: Option<u64>, out: Option<&Path>) -> i32 {
    run_single(path, false, cap_flag, out)
}

pub fn run_check(path: &Path, cap_flag: Option<u64>, out: Option<&Path>) -> i32 {
    run_single(path, true, cap_flag, out)
}

pub fn run_gen(seed: u64, profile: Profile, out: Option<&Path>) -> i32 {
    let file = random_instance(seed, 0, profile);
    emit(&file.to_json(), out)
}

pub fn run_batch(
    seed: u64,
    count: u64,
    profile: Profile,
    cap_flag: Option<u64>,
    out: Option<&Path>,
) -> i32 {
    if count == 0 {
        let issue = Issue { path: "count".into(), rule: "count must be at least 1".into() };
        return emit_issues(&[issue], out);
    }
    let results: Vec<(Result<Outcome, CapHit>, u128)> = (0..count)
        .into_par_iter()
        .map(|index| {
            let file = random_instance(seed, index, profile);
            let cap = effective_cap(&file, cap_flag);
            let started = Instant::now();
            let outcome = single_outcome(&file, true, cap, Value::Null)
                .expect("generated instances validate");
            (outcome, started.elapsed().as_millis())
        })
        .collect();

    let max_ms = results.iter().map(|(_, ms)| *ms).max().unwrap_or(0);
    eprintln!("max_instance_timing_ms {max_ms}");

    for (result, _) in &results {
        if let Err(hit) = result {
            let code = emit(&report::render(&hit.to_value()), out);
            return if code == EXIT_OK { EXIT_CAP } else { code };
        }
    }

    let mut reports = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    let mut distribution: BTreeMap<String, u64> = BTreeMap::new();
    for (index, (result, _)) in results.iter().enumerate() {
        let outcome = result.as_ref().expect("cap hits already handled");
        let order = outcome.report["packet"]["order"].clone();
        let key = match &order {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => "?".to_string(),
        };
        *distribution.entry(key).or_insert(0) += 1;
        if !outcome.ok {
            failures.push(json!(index));
        }
        reports.push(outcome.report.clone());
    }

    let mut dist = Map::new();
    for (k, v) in distribution {
        dist.insert(k, json_u64(v));
    }
    let summary = json!({
        "count": json_u64(count),
        "pass_count": json_u64(count - failures.len() as u64),
        "fail_count": json_u64(failures.len() as u64),
        "failures": Value::Array(failures.clone()),
        "packet_order_distribution": Value::Object(dist),
        "profile": profile.as_str(),
        "seed": json_u64(seed),
        "reports": Value::Array(reports),
    });
    let code = emit(&report::render(&summary), out);
    if code != EXIT_OK {
        code
    } else if failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}
