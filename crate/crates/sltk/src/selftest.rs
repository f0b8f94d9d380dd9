//! Invariant checks replayed over every canned scenario.

use sltk_core::{Mode, StepReport};

use crate::config::Config;
use crate::error::Result;
use crate::scenarios::{self, Scenario};
use crate::trace::{emit, Format, TraceRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub scenario: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// First transition of `reports` that is not an edge of the mode graph,
/// including the hand-over between consecutive steps.
pub fn illegal_transition(reports: &[StepReport]) -> Option<(usize, Mode, Mode)> {
    let mut last: Option<Mode> = None;
    for (i, r) in reports.iter().enumerate() {
        if let (Some(prev), Some(&first)) = (last, r.modes.first()) {
            if prev != first {
                return Some((i, prev, first));
            }
        }
        for pair in r.modes.windows(2) {
            if !pair[0].can_transition_to(pair[1]) {
                return Some((i, pair[0], pair[1]));
            }
        }
        last = r.modes.last().copied();
    }
    None
}

/// First step that starts or ends in VALIDATING or RECOVERING.
pub fn transient_at_rest(reports: &[StepReport]) -> Option<usize> {
    reports.iter().position(|r| {
        let first = r.modes.first().is_none_or(|m| !m.is_resting());
        first || !r.final_mode().is_resting()
    })
}

/// Byte-exact jsonl trace of one replay.
pub fn trace_bytes(scenario: &Scenario, config: &Config) -> Result<Vec<u8>> {
    let records: Vec<TraceRecord> = scenarios::replay(&scenario.script, config)?
        .iter()
        .enumerate()
        .map(|(i, r)| TraceRecord::from_report(i, &r.report))
        .collect();
    emit(&records, Format::Jsonl)
}

fn check(scenario: &'static str, name: &'static str, failure: Option<String>) -> Check {
    Check {
        scenario,
        name,
        passed: failure.is_none(),
        detail: failure.unwrap_or_default(),
    }
}

pub fn run(config: &Config) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for sc in scenarios::all() {
        let replay = scenarios::replay(&sc.script, config)?;
        let reports: Vec<StepReport> = replay.iter().map(|r| r.report.clone()).collect();
        checks.push(check(
            sc.name,
            "transitions follow the mode graph",
            illegal_transition(&reports).map(|(i, a, b)| format!("frame {i}: {a} -> {b}")),
        ));
        checks.push(check(
            sc.name,
            "validating and recovering never rest",
            transient_at_rest(&reports).map(|i| format!("frame {i}: {:?}", reports[i].modes)),
        ));
        checks.push(check(
            sc.name,
            "one report per frame",
            (reports.len() != sc.script.frames)
                .then(|| format!("{} of {}", reports.len(), sc.script.frames)),
        ));
        let output_mismatch = reports
            .iter()
            .position(|r| r.output.is_some() != (r.final_mode() == Mode::Tracking));
        checks.push(check(
            sc.name,
            "coordinates exactly while tracking",
            output_mismatch.map(|i| format!("frame {i}: {:?}", reports[i].modes)),
        ));
        let first = trace_bytes(&sc, config)?;
        let second = trace_bytes(&sc, config)?;
        checks.push(check(
            sc.name,
            "replay is byte-identical",
            (first != second).then(|| "traces differ".to_owned()),
        ));
    }
    Ok(checks)
}
