//! CSV trace rows.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use pdadapt::trace::{Event, IterationRecord};
use serde::{Deserialize, Serialize};

pub const COLUMNS: [&str; 10] = [
    "iter",
    "time_seconds",
    "tau",
    "sigma",
    "vnorm_diff",
    "primal_res_1",
    "dual_res_1",
    "gap",
    "rate_estimate",
    "event",
];

/// One CSV row. `tau` and `sigma` are the steps in effect once the row's
/// events have been applied; for PURE-CD `tau` holds `s` and `sigma` is NaN.
/// `event` is empty or a `|`-separated list of tags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub time_seconds: f64,
    pub tau: f64,
    pub sigma: f64,
    pub vnorm_diff: f64,
    pub primal_res_1: f64,
    pub dual_res_1: f64,
    pub gap: Option<f64>,
    pub rate_estimate: Option<f64>,
    pub event: String,
}

pub fn event_tag(e: Event) -> Option<&'static str> {
    match e {
        Event::GoldsteinTauUp | Event::GoldsteinTauDown | Event::BalanceUp | Event::BalanceDown => {
            Some("goldstein-change")
        }
        Event::StepUp | Event::StepDown | Event::Revert => Some("rate-change"),
        Event::MonitorAccept => Some("monitor-promote"),
        Event::MonitorReject => Some("monitor-revert"),
        Event::EpochEnd => Some("epoch-end"),
        Event::RateEstimate | Event::MonitorInconclusive | Event::Converged => None,
    }
}

fn tags<'a>(events: impl IntoIterator<Item = &'a Event>) -> String {
    let mut out: Vec<&str> = Vec::new();
    for t in events.into_iter().filter_map(|e| event_tag(*e)) {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out.join("|")
}

impl TraceRow {
    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.event.split('|').filter(|t| !t.is_empty())
    }

    pub fn has_step_change(&self) -> bool {
        self.tags().any(|t| t == "goldstein-change" || t == "rate-change")
    }
}

/// Converts solver records to rows, keeping every `cadence`-th iteration,
/// rows that carry events, and the last record. Events of dropped rows move
/// to the next kept row. `steps_after[k]` gives the `(tau, sigma)` in effect
/// after record `k`.
pub fn rows_from_records(records: &[IterationRecord], steps_after: &[(f64, f64)], cadence: usize) -> Vec<TraceRow> {
    let cadence = cadence.max(1);
    let mut rows = Vec::new();
    let mut pending: Vec<Event> = Vec::new();
    for (k, r) in records.iter().enumerate() {
        pending.extend(&r.events);
        let last = k + 1 == records.len();
        let tagged = r.events.iter().any(|e| event_tag(*e).is_some());
        if !(r.iter % cadence == 0 || tagged || last) {
            continue;
        }
        let (tau, sigma) = steps_after[k];
        rows.push(TraceRow {
            iter: r.iter,
            time_seconds: r.time_seconds,
            tau,
            sigma,
            vnorm_diff: r.vnorm_diff,
            primal_res_1: r.primal_res_1,
            dual_res_1: r.dual_res_1,
            gap: r.gap,
            rate_estimate: r.rate_estimate,
            event: tags(&pending),
        });
        pending.clear();
    }
    rows
}

pub fn write_trace(w: impl Write, rows: &[TraceRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(COLUMNS)?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace_file(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let f = std::fs::File::create(path).with_context(|| format!("creating trace {}", path.display()))?;
    write_trace(std::io::BufWriter::new(f), rows)
}

pub fn read_trace(r: impl Read) -> Result<Vec<TraceRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    for col in COLUMNS {
        if !headers.iter().any(|h| h == col) {
            bail!("trace has no '{col}' column");
        }
    }
    let mut rows = Vec::new();
    for rec in rd.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

pub fn read_trace_file(path: &Path) -> Result<Vec<TraceRow>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening trace {}", path.display()))?;
    read_trace(f).with_context(|| format!("reading trace {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iter: usize, events: Vec<Event>) -> IterationRecord {
        IterationRecord {
            iter,
            time_seconds: 0.0,
            tau: 1.0,
            sigma: 1.0,
            vnorm_diff: 0.5,
            primal_res_1: 0.1,
            dual_res_1: 0.2,
            gap: (iter % 2 == 0).then_some(1.0 / iter as f64),
            rate_estimate: None,
            distance: None,
            events,
        }
    }

    #[test]
    fn round_trip_preserves_rows() {
        let recs: Vec<_> = (1..=5).map(|k| record(k, vec![])).collect();
        let steps = vec![(0.5, f64::NAN); 5];
        let rows = rows_from_records(&recs, &steps, 1);
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&COLUMNS.join(",")));
        let back = read_trace(&buf[..]).unwrap();
        assert_eq!(back.len(), 5);
        assert_eq!(back[1].gap, Some(0.5));
        assert_eq!(back[0].gap, None);
        assert!(back[0].sigma.is_nan());
    }

    #[test]
    fn cadence_keeps_event_rows_and_carries_untagged_events() {
        let recs = vec![
            record(1, vec![]),
            record(2, vec![]),
            record(3, vec![Event::GoldsteinTauUp, Event::BalanceDown]),
            record(4, vec![Event::MonitorInconclusive]),
            record(5, vec![]),
            record(6, vec![Event::EpochEnd, Event::MonitorAccept, Event::StepUp]),
            record(7, vec![]),
        ];
        let steps = vec![(1.0, 1.0); 7];
        let rows = rows_from_records(&recs, &steps, 4);
        let iters: Vec<usize> = rows.iter().map(|r| r.iter).collect();
        assert_eq!(iters, vec![3, 4, 6, 7]);
        assert_eq!(rows[0].event, "goldstein-change");
        assert_eq!(rows[1].event, "");
        assert_eq!(rows[2].event, "epoch-end|monitor-promote|rate-change");
        assert!(rows[2].has_step_change());
    }

    #[test]
    fn missing_column_is_rejected() {
        let text = "iter,time_seconds,tau,sigma,vnorm_diff,primal_res_1,dual_res_1,rate_estimate,event\n1,0,1,1,0,0,0,,\n";
        let err = read_trace(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("gap"));
    }
}
