//! Iterations and time needed by each trace to reach each decade of the gap.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use crate::trace::TraceRow;

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub labels: Vec<String>,
    /// Decades `10^k`, decreasing.
    pub thresholds: Vec<f64>,
    /// `reached[t][k]`: first `(iter, time)` of trace `t` with gap at most
    /// `thresholds[k]`.
    pub reached: Vec<Vec<Option<(usize, f64)>>>,
}

fn gaps(rows: &[TraceRow]) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
    rows.iter().filter_map(|r| r.gap.filter(|g| g.is_finite()).map(|g| (r.iter, r.time_seconds, g)))
}

pub fn compare_runs(traces: &[(String, Vec<TraceRow>)]) -> Result<Comparison> {
    if traces.len() < 2 {
        bail!("need at least two traces to compare, got {}", traces.len());
    }
    let mut first_max = f64::NEG_INFINITY;
    let mut overall_min = f64::INFINITY;
    for (label, rows) in traces {
        let mut it = gaps(rows).peekable();
        let Some(&(_, _, g0)) = it.peek() else {
            bail!("trace '{label}' has no gap values");
        };
        first_max = first_max.max(g0);
        overall_min = overall_min.min(it.map(|(_, _, g)| g).fold(f64::INFINITY, f64::min));
    }
    let mut thresholds = Vec::new();
    if overall_min > 0.0 {
        let hi = first_max.max(overall_min).log10().floor() as i32;
        let lo = overall_min.log10().ceil() as i32;
        thresholds.extend((lo..=hi).rev().map(|k| 10f64.powi(k)));
    } else {
        thresholds.push(0.0);
    }
    let reached = traces
        .iter()
        .map(|(_, rows)| {
            thresholds
                .iter()
                .map(|&t| gaps(rows).find(|&(_, _, g)| g <= t).map(|(k, time, _)| (k, time)))
                .collect()
        })
        .collect();
    Ok(Comparison { labels: traces.iter().map(|(l, _)| l.clone()).collect(), thresholds, reached })
}

impl Comparison {
    /// Iterations of trace `t` minus those of the first trace at threshold `k`.
    pub fn delta_iterations(&self, t: usize, k: usize) -> Option<i64> {
        match (self.reached[0][k], self.reached[t][k]) {
            (Some((a, _)), Some((b, _))) => Some(b as i64 - a as i64),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trace,threshold,iterations,time_seconds,delta_iterations\n");
        for (t, label) in self.labels.iter().enumerate() {
            for (k, th) in self.thresholds.iter().enumerate() {
                let (it, time) = match self.reached[t][k] {
                    Some((i, s)) => (i.to_string(), s.to_string()),
                    None => (String::new(), String::new()),
                };
                let delta = self.delta_iterations(t, k).map_or(String::new(), |d| d.to_string());
                let _ = writeln!(out, "{label},{th:e},{it},{time},{delta}");
            }
        }
        out
    }

    /// One row per threshold, one `iterations (seconds)` column per trace.
    pub fn to_text(&self) -> String {
        let mut cells: Vec<Vec<String>> = vec![std::iter::once("gap <=".to_string()).chain(self.labels.iter().cloned()).collect()];
        for (k, th) in self.thresholds.iter().enumerate() {
            let mut row = vec![format!("{th:.0e}")];
            for t in 0..self.labels.len() {
                row.push(match self.reached[t][k] {
                    Some((i, s)) => format!("{i} ({s:.3}s)"),
                    None => "-".to_string(),
                });
            }
            cells.push(row);
        }
        let widths: Vec<usize> =
            (0..cells[0].len()).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(gaps: &[f64]) -> Vec<TraceRow> {
        gaps.iter()
            .enumerate()
            .map(|(k, &g)| TraceRow {
                iter: k + 1,
                time_seconds: 0.1 * (k + 1) as f64,
                tau: 1.0,
                sigma: 1.0,
                vnorm_diff: 0.0,
                primal_res_1: 0.0,
                dual_res_1: 0.0,
                gap: Some(g),
                rate_estimate: None,
                event: String::new(),
            })
            .collect()
    }

    #[test]
    fn identical_traces_have_zero_differences() {
        let t = trace(&[5.0, 0.5, 0.04, 0.003]);
        let c = compare_runs(&[("a".into(), t.clone()), ("b".into(), t)]).unwrap();
        assert_eq!(c.thresholds, vec![1.0, 0.1, 0.01]);
        for k in 0..3 {
            assert_eq!(c.delta_iterations(1, k), Some(0));
        }
        assert!(c.to_csv().lines().skip(1).all(|l| l.ends_with(",0")));
    }

    #[test]
    fn faster_trace_reaches_decades_first() {
        let slow = trace(&[1.0, 0.5, 0.2, 0.09, 0.05, 0.009]);
        let fast = trace(&[1.0, 0.05, 0.001]);
        let c = compare_runs(&[("slow".into(), slow), ("fast".into(), fast)]).unwrap();
        assert_eq!(c.reached[0][1], Some((4, 0.4)));
        assert_eq!(c.reached[1][1], Some((2, 0.2)));
        assert_eq!(c.reached[0][3], None);
        assert_eq!(c.delta_iterations(1, 2), Some(-3));
        let text = c.to_text();
        assert!(text.lines().count() == 1 + c.thresholds.len());
        assert!(text.contains('-'));
    }

    #[test]
    fn traces_without_gaps_are_incompatible() {
        let mut none = trace(&[1.0]);
        none[0].gap = None;
        assert!(compare_runs(&[("a".into(), trace(&[1.0])), ("b".into(), none)]).is_err());
        assert!(compare_runs(&[("a".into(), trace(&[1.0]))]).is_err());
    }
}
