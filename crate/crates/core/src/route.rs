//! Prescribed speed traces: CSV drive cycles, parametric segment routes, and
//! resampling onto the engine's master grid.

use std::path::Path;

use thiserror::Error;

use crate::config::{units, Segment, SegmentKind, PACKAGED_PREFIX};
use crate::config::{RouteMode, TestcaseConfig};
use crate::error::{Error, Result};
use crate::resources;

#[derive(Debug, Error, PartialEq)]
pub enum CycleError {
    #[error("drive cycle {name}: {message}")]
    Format { name: String, message: String },
    #[error("drive cycle {name}: time must be strictly increasing (row {row}: {prev} then {time})")]
    Monotonicity {
        name: String,
        row: usize,
        prev: f64,
        time: f64,
    },
    #[error("drive cycle {name}: negative speed {speed} at row {row}")]
    NegativeSpeed { name: String, row: usize, speed: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSample {
    pub time_s: f64,
    pub speed_mps: f64,
}

/// Monotone time-stamped speed trace starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveCycle {
    name: String,
    samples: Vec<CycleSample>,
}

impl DriveCycle {
    pub fn new(name: impl Into<String>, samples: Vec<CycleSample>) -> Result<Self, CycleError> {
        let name = name.into();
        let Some(first) = samples.first() else {
            return Err(CycleError::Format {
                name,
                message: "no samples".into(),
            });
        };
        if first.time_s != 0.0 {
            return Err(CycleError::Format {
                name,
                message: format!("time must start at 0 (got {})", first.time_s),
            });
        }
        for (row, s) in samples.iter().enumerate() {
            if !s.time_s.is_finite() || !s.speed_mps.is_finite() {
                return Err(CycleError::Format {
                    name,
                    message: format!("non-finite value at row {row}"),
                });
            }
            if s.speed_mps < 0.0 {
                return Err(CycleError::NegativeSpeed {
                    name,
                    row,
                    speed: s.speed_mps,
                });
            }
            if row > 0 && s.time_s <= samples[row - 1].time_s {
                return Err(CycleError::Monotonicity {
                    name,
                    row,
                    prev: samples[row - 1].time_s,
                    time: s.time_s,
                });
            }
        }
        Ok(Self { name, samples })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[CycleSample] {
        &self.samples
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.time_s)
    }

    /// Trapezoidal integral of speed over time.
    pub fn distance_m(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| 0.5 * (w[0].speed_mps + w[1].speed_mps) * (w[1].time_s - w[0].time_s))
            .sum()
    }

    pub fn max_speed_mps(&self) -> f64 {
        self.samples.iter().map(|s| s.speed_mps).fold(0.0, f64::max)
    }

    /// Linear interpolation of speed; clamps outside the trace.
    pub fn speed_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].time_s {
            return s[0].speed_mps;
        }
        let idx = s.partition_point(|p| p.time_s <= t);
        if idx >= s.len() {
            return s[s.len() - 1].speed_mps;
        }
        let (a, b) = (s[idx - 1], s[idx]);
        if t == a.time_s {
            return a.speed_mps;
        }
        let f = (t - a.time_s) / (b.time_s - a.time_s);
        a.speed_mps + f * (b.speed_mps - a.speed_mps)
    }

    /// Resamples onto the uniform grid `k·dt`. The final sample always lands
    /// on the cycle end, so the last interval may be shorter than `dt`.
    pub fn resample(&self, dt_s: f64) -> Result<Self, CycleError> {
        if !(dt_s > 0.0 && dt_s.is_finite()) {
            return Err(CycleError::Format {
                name: self.name.clone(),
                message: format!("resample step must be > 0 (got {dt_s})"),
            });
        }
        let end = self.duration_s();
        let n = (end / dt_s + 1e-9).floor() as usize;
        let mut out = Vec::with_capacity(n + 2);
        for k in 0..=n {
            let t = k as f64 * dt_s;
            out.push(CycleSample {
                time_s: t,
                speed_mps: self.speed_at(t),
            });
        }
        let last = out.last().expect("at least t = 0").time_s;
        if (end - last).abs() > 1e-9 * end.max(1.0) {
            out.push(CycleSample {
                time_s: end,
                speed_mps: self.speed_at(end),
            });
        } else if let Some(tail) = out.last_mut() {
            // land exactly on the end sample
            tail.time_s = if n == 0 { 0.0 } else { end };
            tail.speed_mps = self.speed_at(end);
        }
        DriveCycle::new(self.name.clone(), out)
    }
}

/// Parses a `time_s,speed_kmh` CSV body.
pub fn parse_cycle_csv(name: &str, text: &str) -> Result<DriveCycle, CycleError> {
    let format_err = |message: String| CycleError::Format {
        name: name.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| format_err(e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "time_s" || &headers[1] != "speed_kmh" {
        return Err(format_err(format!(
            "header must be exactly `time_s,speed_kmh` (got `{}`)",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| format_err(format!("row {row}: {e}")))?;
        if record.len() != 2 {
            return Err(format_err(format!("row {row}: expected 2 fields")));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format_err(format!("row {row}: `{s}` is not a number")))
        };
        let time_s = parse(&record[0])?;
        let speed_kmh = parse(&record[1])?;
        samples.push(CycleSample {
            time_s,
            speed_mps: units::kmh_to_mps(speed_kmh),
        });
    }
    DriveCycle::new(name, samples)
}

/// Loads a drive-cycle CSV from disk.
pub fn load_cycle_csv(path: impl AsRef<Path>) -> Result<DriveCycle> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading drive cycle {}", path.display()), e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "cycle".into());
    Ok(parse_cycle_csv(&name, &text)?)
}

/// Builds a piecewise-linear speed trace from segments, sampled at `dt_s`.
pub fn build_parametric(segments: &[Segment], dt_s: f64) -> Result<DriveCycle> {
    if segments.is_empty() {
        return Err(Error::schema("route.segments", "must not be empty"));
    }
    let mut knots = vec![CycleSample {
        time_s: 0.0,
        speed_mps: 0.0,
    }];
    for (i, seg) in segments.iter().enumerate() {
        if !(seg.duration_s > 0.0 && seg.duration_s.is_finite()) {
            return Err(Error::schema(
                format!("route.segments[{i}].duration_s"),
                "must be > 0",
            ));
        }
        if let Some(v) = seg.target_speed_mps {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::schema(
                    format!("route.segments[{i}].target_speed_mps"),
                    "must be >= 0",
                ));
            }
        }
        let current = knots.last().expect("non-empty").speed_mps;
        let end_speed = match seg.kind {
            SegmentKind::Accel => seg.target_speed_mps.ok_or_else(|| {
                Error::schema(
                    format!("route.segments[{i}].target_speed_mps"),
                    "is required for accel segments",
                )
            })?,
            SegmentKind::Decel => seg.target_speed_mps.unwrap_or(0.0),
            SegmentKind::Cruise => current,
            SegmentKind::Idle => 0.0,
        };
        let t0 = knots.last().expect("non-empty").time_s;
        if seg.kind == SegmentKind::Idle && current > 0.0 {
            return Err(Error::schema(
                format!("route.segments[{i}].kind"),
                "idle must follow a stop (speed 0)",
            ));
        }
        knots.push(CycleSample {
            time_s: t0 + seg.duration_s,
            speed_mps: end_speed,
        });
    }
    let knots = DriveCycle::new("parametric", knots)?;
    Ok(knots.resample(dt_s)?)
}

/// Loads the speed trace a testcase asks for, resampled onto its master step.
pub fn load_route(testcase: &TestcaseConfig) -> Result<DriveCycle> {
    let dt = testcase.sim.dt_s;
    match testcase.route.mode {
        RouteMode::Parametric => build_parametric(
            testcase.route.segments.as_deref().unwrap_or_default(),
            dt,
        ),
        RouteMode::CycleCsv => {
            let reference = testcase
                .route
                .cycle_path
                .as_deref()
                .ok_or_else(|| Error::schema("route.cycle_path", "is required"))?;
            let cycle = match reference.strip_prefix(PACKAGED_PREFIX) {
                Some(name) => resources::cycle(name)?,
                None => load_cycle_csv(reference)?,
            };
            Ok(cycle.resample(dt)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(t: f64, v: f64) -> CycleSample {
        CycleSample {
            time_s: t,
            speed_mps: v,
        }
    }

    #[test]
    fn kmh_rows_become_mps() {
        let c = parse_cycle_csv("t", "time_s,speed_kmh\n0,0\n1,36\n").unwrap();
        assert_eq!(c.samples(), &[s(0.0, 0.0), s(1.0, 10.0)]);
        assert_eq!(c.distance_m(), 5.0);
    }

    #[test]
    fn non_monotone_time_rejected() {
        let err = parse_cycle_csv("t", "time_s,speed_kmh\n0,0\n2,10\n1,5\n").unwrap_err();
        assert!(matches!(err, CycleError::Monotonicity { row: 2, .. }), "{err}");
    }

    #[test]
    fn negative_speed_rejected() {
        let err = parse_cycle_csv("t", "time_s,speed_kmh\n0,0\n1,-3\n").unwrap_err();
        assert!(matches!(err, CycleError::NegativeSpeed { row: 1, .. }));
    }

    #[test]
    fn header_must_match_exactly() {
        assert!(matches!(
            parse_cycle_csv("t", "time,speed\n0,0\n"),
            Err(CycleError::Format { .. })
        ));
        assert!(matches!(
            parse_cycle_csv("t", "time_s,speed_kmh\n0,abc\n"),
            Err(CycleError::Format { .. })
        ));
    }

    #[test]
    fn resample_halves_linear_ramp() {
        let c = DriveCycle::new("r", vec![s(0.0, 0.0), s(1.0, 10.0)]).unwrap();
        let r = c.resample(0.5).unwrap();
        assert_eq!(r.samples(), &[s(0.0, 0.0), s(0.5, 5.0), s(1.0, 10.0)]);
    }

    #[test]
    fn resample_at_native_step_is_identity() {
        let c = DriveCycle::new("r", vec![s(0.0, 0.0), s(1.0, 10.0), s(2.0, 4.0), s(3.0, 0.0)])
            .unwrap();
        assert_eq!(c.resample(1.0).unwrap(), c);
    }

    #[test]
    fn resample_keeps_short_tail() {
        let c = DriveCycle::new("r", vec![s(0.0, 2.0), s(1.05, 2.0)]).unwrap();
        let r = c.resample(0.5).unwrap();
        let times: Vec<f64> = r.samples().iter().map(|p| p.time_s).collect();
        assert_eq!(times, vec![0.0, 0.5, 1.0, 1.05]);
        assert!((r.distance_m() - 2.1).abs() < 1e-12);
    }

    fn seg(kind: SegmentKind, duration_s: f64, target: Option<f64>) -> Segment {
        Segment {
            kind,
            duration_s,
            target_speed_mps: target,
        }
    }

    #[test]
    fn parametric_trapezoid_distance() {
        let c = build_parametric(
            &[
                seg(SegmentKind::Accel, 10.0, Some(15.0)),
                seg(SegmentKind::Cruise, 20.0, None),
                seg(SegmentKind::Decel, 15.0, Some(0.0)),
            ],
            0.1,
        )
        .unwrap();
        // 0.5·10·15 + 20·15 + 0.5·15·15
        assert!((c.distance_m() - 487.5).abs() < 1e-9, "{}", c.distance_m());
        assert_eq!(c.samples().len(), 451);
        assert!((c.duration_s() - 45.0).abs() < 1e-12);
    }

    #[test]
    fn idle_only_route_has_zero_distance() {
        let c = build_parametric(&[seg(SegmentKind::Idle, 60.0, None)], 0.1).unwrap();
        assert_eq!(c.distance_m(), 0.0);
        assert!(c.samples().iter().all(|p| p.speed_mps == 0.0));
    }

    #[test]
    fn empty_parametric_rejected() {
        assert!(matches!(build_parametric(&[], 0.1), Err(Error::Schema { .. })));
    }

    #[test]
    fn packaged_mixed_cycle_resamples_within_tolerance() {
        let c = resources::cycle("mixed_synthetic").unwrap();
        let r = c.resample(0.1).unwrap();
        let drift = (r.distance_m() - c.distance_m()).abs() / c.distance_m();
        assert!(drift < 1e-3, "drift {drift}");
        assert_eq!(r.samples().len(), 18001);
    }

    fn arb_segments() -> impl Strategy<Value = Vec<Segment>> {
        let one = (0u8..4, 0.5f64..60.0, 0.0f64..40.0).prop_map(|(k, d, v)| {
            let kind = match k {
                0 => SegmentKind::Accel,
                1 => SegmentKind::Cruise,
                2 => SegmentKind::Decel,
                _ => SegmentKind::Idle,
            };
            seg(kind, d, Some(v))
        });
        prop::collection::vec(one, 1..8).prop_map(|mut v| {
            // idle is only valid from standstill: force a stop before it
            let mut out = Vec::new();
            for s in v.drain(..) {
                if s.kind == SegmentKind::Idle {
                    out.push(seg(SegmentKind::Decel, 5.0, Some(0.0)));
                }
                out.push(s);
            }
            out
        })
    }

    proptest! {
        #[test]
        fn parametric_routes_satisfy_cycle_invariants(segs in arb_segments(), dt in 0.05f64..1.0) {
            let c = build_parametric(&segs, dt).unwrap();
            let p = c.samples();
            prop_assert_eq!(p[0].time_s, 0.0);
            prop_assert!(p.windows(2).all(|w| w[1].time_s > w[0].time_s));
            prop_assert!(p.iter().all(|x| x.speed_mps >= 0.0));
            let total: f64 = segs.iter().map(|s| s.duration_s).sum();
            prop_assert!((c.duration_s() - total).abs() < 1e-9 * total.max(1.0));
            // resampling at the same step changes nothing
            let again = c.resample(dt).unwrap();
            prop_assert!((again.distance_m() - c.distance_m()).abs() <= 1e-9 * c.distance_m().max(1.0));
        }
    }
}
