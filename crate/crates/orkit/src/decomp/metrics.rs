//! Speed and efficiency from event traces.

use super::pool::{Event, EventKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("trace contains no completed subproblems")]
    EmptyTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// Completed subproblem count.
    pub subproblems: usize,
    /// Trace span in seconds (simulated or wall).
    pub elapsed: f64,
    /// Subproblems solved per second.
    pub speed: f64,
    /// Percent of ideal parallel speedup relative to the baseline trace, if
    /// one was given.
    pub efficiency: Option<f64>,
}

/// Percent of ideal parallel speedup: per-worker speed relative to the
/// baseline's per-worker speed.
pub fn efficiency(speed: f64, workers: usize, baseline_speed: f64, baseline_workers: usize) -> f64 {
    100.0 * (speed / workers as f64) / (baseline_speed / baseline_workers as f64)
}

fn speed_of(events: &[Event]) -> Result<(usize, f64, f64), MetricsError> {
    let subproblems = events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Complete { .. }))
        .count();
    if subproblems == 0 {
        return Err(MetricsError::EmptyTrace);
    }
    let start = events.iter().map(|e| e.t).fold(f64::INFINITY, f64::min);
    let end = events.iter().map(|e| e.t).fold(f64::NEG_INFINITY, f64::max);
    let elapsed = end - start;
    let speed = if elapsed > 0.0 {
        subproblems as f64 / elapsed
    } else {
        f64::INFINITY
    };
    Ok((subproblems, elapsed, speed))
}

/// Metrics of a trace, optionally with efficiency against a baseline trace
/// recorded with a different worker count.
pub fn compute_metrics(
    events: &[Event],
    workers: usize,
    baseline: Option<(&[Event], usize)>,
) -> Result<Metrics, MetricsError> {
    let (subproblems, elapsed, speed) = speed_of(events)?;
    let efficiency = match baseline {
        None => None,
        Some((base_events, base_workers)) => {
            let (_, _, base_speed) = speed_of(base_events)?;
            Some(efficiency(speed, workers, base_speed, base_workers))
        }
    };
    Ok(Metrics {
        subproblems,
        elapsed,
        speed,
        efficiency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(t: f64) -> Event {
        Event {
            t,
            kind: EventKind::Complete {
                worker: 0,
                task: "t".into(),
            },
        }
    }

    fn dispatch(t: f64) -> Event {
        Event {
            t,
            kind: EventKind::Dispatch {
                worker: 0,
                task: "t".into(),
            },
        }
    }

    #[test]
    fn speed_counts_subproblems_per_second() {
        let mut events = vec![dispatch(0.0)];
        for k in 1..=100 {
            events.push(complete(k as f64 * 0.1));
        }
        let m = compute_metrics(&events, 2, None).unwrap();
        assert_eq!(m.subproblems, 100);
        assert!((m.speed - 10.0).abs() < 1e-9);
        assert_eq!(m.efficiency, None);
    }

    #[test]
    fn efficiency_against_baseline() {
        // Baseline 5 workers at speed 78; 10 workers at speed 154 come out
        // at (154/10)/(78/5) ~= 98.7% of ideal speedup.
        let e = efficiency(154.0, 10, 78.0, 5);
        assert!((e - 98.71794871794873).abs() < 1e-9);
    }

    #[test]
    fn empty_trace_is_an_error() {
        assert_eq!(
            compute_metrics(&[dispatch(0.0)], 1, None),
            Err(MetricsError::EmptyTrace)
        );
        assert_eq!(compute_metrics(&[], 1, None), Err(MetricsError::EmptyTrace));
    }

    #[test]
    fn perfectly_balanced_doubling_is_100_percent() {
        // n tasks of equal latency L on w workers take ceil(n/w) * L.
        let trace = |workers: usize| {
            let mut events = vec![dispatch(0.0)];
            let rounds = 16 / workers;
            for r in 0..rounds {
                for _ in 0..workers {
                    events.push(complete((r + 1) as f64));
                }
            }
            events
        };
        let base = trace(4);
        let wide = trace(8);
        let m = compute_metrics(&wide, 8, Some((&base, 4))).unwrap();
        assert!((m.efficiency.unwrap() - 100.0).abs() < 1e-9);
    }
}
