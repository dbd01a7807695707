//! Seeded self-tests attached to reports via `--seed`.
//!
//! Every command supports a replay check (rebuild the report, compare
//! bytes). Commands that produce a truncated series additionally get a
//! prefix-stability check: the pipeline is re-run at a seed-chosen smaller
//! order and the common coefficient prefix must agree, so no coefficient
//! depends on how far the truncation looks ahead. The solver adds a scaling
//! check in its own command handler. All randomness comes from a small
//! splitmix64 generator so a seed replays bit-for-bit.

use funeq_core::Rat;
use serde::Serialize;
use serde_json::Value;

/// splitmix64: tiny, full-period, well-distributed; enough to pick test
/// points deterministically from a seed.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from 0..bound (bound >= 1).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// A small nonzero rational, suitable as a scaling factor.
    pub fn scalar(&mut self) -> Rat {
        let mut numer = self.below(17) as i64 - 8;
        if numer == 0 {
            numer = 5;
        }
        let denom = self.below(7) as i64 + 1;
        Rat::frac(numer, denom)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, detail: String, passed: bool) -> Check {
        Check {
            name: name.to_string(),
            detail,
            passed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfTest {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Rebuilds a report for the self-test: `rebuild(order)` must rerun the
/// whole pipeline at the given truncation order.
pub type Rebuild<'a> = dyn Fn(usize) -> funeq_core::Result<Value> + 'a;

/// Run the generic checks and fold in any command-specific ones.
///
/// Draw order (fixed so seeds replay): 1. prefix order, 2+. whatever the
/// command handler drew before calling in (already materialized in
/// `extra`).
pub fn run(
    seed: u64,
    base: &Value,
    order: usize,
    series_paths: &[&str],
    rebuild: Option<&Rebuild>,
    extra: Vec<Check>,
) -> SelfTest {
    let mut rng = SplitMix64(seed);
    let mut checks = Vec::new();

    if let Some(rebuild) = rebuild {
        checks.push(replay_check(base, order, rebuild));
        if !series_paths.is_empty() && order >= 2 {
            let sample = 1 + rng.below(order as u64 - 1) as usize;
            checks.push(prefix_check(base, sample, series_paths, rebuild));
        }
    }
    checks.extend(extra);

    let passed = checks.iter().all(|c| c.passed);
    SelfTest {
        seed,
        checks,
        passed,
    }
}

fn replay_check(base: &Value, order: usize, rebuild: &Rebuild) -> Check {
    match rebuild(order) {
        Ok(again) => {
            let lhs = serde_json::to_string(base).unwrap_or_default();
            let rhs = serde_json::to_string(&again).unwrap_or_default();
            Check::new(
                "replay-determinism",
                format!("report rebuilt at order {order} is byte-identical"),
                lhs == rhs,
            )
        }
        Err(e) => Check::new("replay-determinism", format!("rebuild failed: {e}"), false),
    }
}

fn prefix_check(base: &Value, sample: usize, series_paths: &[&str], rebuild: &Rebuild) -> Check {
    let name = "prefix-stability";
    let again = match rebuild(sample) {
        Ok(v) => v,
        Err(e) => {
            return Check::new(
                name,
                format!("rebuild at order {sample} failed: {e}"),
                false,
            )
        }
    };
    for path in series_paths {
        let full = coeffs_at(base, path);
        let short = coeffs_at(&again, path);
        let (full, short) = match (full, short) {
            (Some(f), Some(s)) => (f, s),
            _ => {
                return Check::new(
                    name,
                    format!("series field {path:?} missing from a report"),
                    false,
                )
            }
        };
        if short.len() > full.len() || short != &full[..short.len()] {
            return Check::new(
                name,
                format!("coefficients of {path:?} changed below order {sample}"),
                false,
            );
        }
    }
    Check::new(
        name,
        format!(
            "coefficients of {} agree with a rerun at order {sample}",
            series_paths.join(", ")
        ),
        true,
    )
}

fn coeffs_at<'v>(report: &'v Value, path: &str) -> Option<&'v [Value]> {
    report
        .get(path)?
        .get("coeffs")?
        .as_array()
        .map(|v| v.as_slice())
}
