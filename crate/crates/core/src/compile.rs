// Copyright 2026 The qwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Compilation of coin programs to phase-modulator pulse schedules.
//!
//! An angle coin is realized as a pair of polarization phases,
//! `phi_H = theta` and `phi_V = pi - theta`, sandwiched between two
//! quarter-wave plates. A Sagnac loop routes H into the counter-clockwise
//! arm and V into the clockwise arm, which reaches the modulator later by a
//! fixed delay, so one modulator addresses both phases in separate time
//! bins. Each step the H component needs `round_trip_ns`, V slightly more,
//! which spreads the walker over `t + 1` bins.
//!
//! Voltages come from a piecewise-linear calibration through measured
//! `(phase, voltage)` anchors.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::state::{reachable, CoinOp, CoinProgram};

/// Time-matching tolerance when decoding a schedule.
pub const ALIGNMENT_TOL_NS: f64 = 0.05;

/// Sagnac arm a polarization component travels through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    /// Carries H and `phi_H`.
    CounterClockwise,
    /// Carries V and `phi_V`, delayed.
    Clockwise,
}

impl Arm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Arm::CounterClockwise => "ccw",
            Arm::Clockwise => "cw",
        }
    }

    pub fn parse(s: &str) -> Option<Arm> {
        match s {
            "ccw" => Some(Arm::CounterClockwise),
            "cw" => Some(Arm::Clockwise),
            _ => None,
        }
    }
}

/// Phase pair for one program cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCell {
    pub step: usize,
    pub position: i64,
    pub phi_h: f64,
    pub phi_v: f64,
}

impl PhaseCell {
    pub fn from_coin(step: usize, position: i64, coin: CoinOp) -> Self {
        PhaseCell {
            step,
            position,
            phi_h: coin.theta(),
            phi_v: PI - coin.theta(),
        }
    }

    /// Coin angle recovered from the H phase.
    pub fn theta(&self) -> f64 {
        self.phi_h
    }
}

/// Loop timing. All values in nanoseconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimingModel {
    /// Round trip of the H component through the loop.
    pub round_trip_ns: f64,
    /// Extra delay of the V component per step; one position bin.
    pub bin_delay_ns: f64,
    /// Extra delay of the clockwise Sagnac arm at the modulator.
    pub sagnac_delay_ns: f64,
    pub pulse_width_ns: f64,
    /// Laser repetition period; each launch seeds an independent walk.
    pub rep_period_ns: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        TimingModel {
            round_trip_ns: 72.9,
            bin_delay_ns: 2.3,
            sagnac_delay_ns: 39.1,
            pulse_width_ns: 1.0,
            rep_period_ns: 1000.0,
        }
    }
}

impl TimingModel {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.round_trip_ns,
            self.bin_delay_ns,
            self.sagnac_delay_ns,
            self.pulse_width_ns,
            self.rep_period_ns,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("timing values must be positive".into()));
        }
        if self.bin_delay_ns <= self.pulse_width_ns {
            return Err(Error::Domain(format!(
                "bin delay {} ns does not resolve {} ns pulses",
                self.bin_delay_ns, self.pulse_width_ns
            )));
        }
        Ok(())
    }
}

/// Piecewise-linear phase-to-voltage map through measured anchors.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    anchors: Vec<(f64, f64)>,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            anchors: vec![
                (FRAC_PI_4, 0.127),
                (FRAC_PI_2, 0.263),
                (3.0 * FRAC_PI_4, 0.392),
            ],
        }
    }
}

impl Calibration {
    /// At least two anchors, strictly increasing in both phase and voltage.
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::Domain(
                "calibration needs at least two anchors".into(),
            ));
        }
        let increasing = anchors
            .windows(2)
            .all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
        if !increasing
            || anchors
                .iter()
                .any(|(p, v)| !p.is_finite() || !v.is_finite())
        {
            return Err(Error::Domain(
                "calibration anchors must be strictly increasing in phase and voltage".into(),
            ));
        }
        Ok(Calibration { anchors })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// Voltage for a phase in `[0, pi]`; linear extrapolation past the
    /// outer anchors.
    pub fn voltage(&self, phi: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::Domain(format!("phase {phi} outside [0, pi]")));
        }
        let (p0, p1) = self.segment(|a| a.0, phi);
        Ok(p0.1 + (phi - p0.0) * (p1.1 - p0.1) / (p1.0 - p0.0))
    }

    /// Inverse of [`Calibration::voltage`], clamped to `[0, pi]`.
    pub fn phase(&self, volts: f64) -> f64 {
        let (p0, p1) = self.segment(|a| a.1, volts);
        let phi = p0.0 + (volts - p0.1) * (p1.0 - p0.0) / (p1.1 - p0.1);
        phi.clamp(0.0, PI)
    }

    /// Voltages at phases 0 and pi.
    pub fn voltage_range(&self) -> (f64, f64) {
        (
            self.voltage(0.0).expect("in domain"),
            self.voltage(PI).expect("in domain"),
        )
    }

    // Segment containing `value` along `key`, or the outermost segment.
    fn segment(&self, key: impl Fn(&(f64, f64)) -> f64, value: f64) -> ((f64, f64), (f64, f64)) {
        let n = self.anchors.len();
        let i = self.anchors[1..n - 1]
            .iter()
            .take_while(|a| key(a) < value)
            .count();
        (self.anchors[i], self.anchors[i + 1])
    }

    /// Calibration file: `phase_rad voltage_v` per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut anchors = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::parse(i + 1, "expected `phase_rad voltage_v`"));
            }
            let p = fields[0]
                .parse()
                .map_err(|_| Error::parse(i + 1, "bad phase"))?;
            let v = fields[1]
                .parse()
                .map_err(|_| Error::parse(i + 1, "bad voltage"))?;
            anchors.push((p, v));
        }
        Calibration::new(anchors)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, v) in &self.anchors {
            let _ = writeln!(out, "{p} {v}");
        }
        out
    }
}

/// One phase pair per stepped cell, ordered by step then position.
/// The final disentangling layer is not compiled.
pub fn coin_to_phases(p: &CoinProgram) -> Vec<PhaseCell> {
    p.cells()
        .map(|(t, x, coin)| PhaseCell::from_coin(t, x, coin))
        .collect()
}

/// Time the pulse for cell `(t, x)` reaches the modulator in `arm`.
pub fn arrival_time(
    step: usize,
    position: i64,
    arm: Arm,
    tm: &TimingModel,
    launch_offset_ns: f64,
) -> Result<f64> {
    if !reachable(step, position) {
        return Err(Error::Domain(format!(
            "position {position} is not reachable at step {step}"
        )));
    }
    let bin = ((step as i64 + position) / 2) as f64;
    let sagnac = match arm {
        Arm::CounterClockwise => 0.0,
        Arm::Clockwise => tm.sagnac_delay_ns,
    };
    Ok(launch_offset_ns + step as f64 * tm.round_trip_ns + bin * tm.bin_delay_ns + sagnac)
}

pub fn phase_to_voltage(phi: f64, cal: &Calibration) -> Result<f64> {
    cal.voltage(phi)
}

/// One electrical pulse at the modulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseEvent {
    pub time_ns: f64,
    pub voltage_v: f64,
    pub width_ns: f64,
    pub step: usize,
    pub position: i64,
    pub arm: Arm,
}

impl PulseEvent {
    fn tag(&self) -> (usize, i64, Arm) {
        (self.step, self.position, self.arm)
    }
}

pub const SCHEDULE_HEADER: &str = "time_ns,voltage_v,width_ns,step,position,arm";

/// Time-ordered, non-overlapping pulse events.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSchedule {
    events: Vec<PulseEvent>,
}

impl PulseSchedule {
    /// Sorts the events and rejects overlaps within `[time, time + width)`.
    pub fn new(mut events: Vec<PulseEvent>) -> Result<Self> {
        events.sort_by(|l, r| l.time_ns.total_cmp(&r.time_ns).then(l.tag().cmp(&r.tag())));
        check_collisions(&events)?;
        Ok(PulseSchedule { events })
    }

    pub fn events(&self) -> &[PulseEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Schedule file: CSV with a fixed header, 4-decimal times, widths and
    /// voltages, sorted by time.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(48 * (self.events.len() + 1));
        out.push_str(SCHEDULE_HEADER);
        out.push('\n');
        for e in &self.events {
            let _ = writeln!(
                out,
                "{:.4},{:.4},{:.4},{},{},{}",
                e.time_ns,
                e.voltage_v,
                e.width_ns,
                e.step,
                e.position,
                e.arm.as_str()
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == SCHEDULE_HEADER => {}
            _ => {
                return Err(Error::parse(
                    1,
                    format!("expected header `{SCHEDULE_HEADER}`"),
                ))
            }
        }
        let mut events = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 6 {
                return Err(Error::parse(i + 1, "expected 6 comma-separated fields"));
            }
            let num = |s: &str, what: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::parse(i + 1, format!("bad {what}")))
            };
            events.push(PulseEvent {
                time_ns: num(f[0], "time")?,
                voltage_v: num(f[1], "voltage")?,
                width_ns: num(f[2], "width")?,
                step: f[3].parse().map_err(|_| Error::parse(i + 1, "bad step"))?,
                position: f[4]
                    .parse()
                    .map_err(|_| Error::parse(i + 1, "bad position"))?,
                arm: Arm::parse(f[5]).ok_or_else(|| Error::parse(i + 1, "bad arm"))?,
            });
        }
        PulseSchedule::new(events)
    }
}

fn check_collisions(sorted: &[PulseEvent]) -> Result<()> {
    let mut reach: Option<(f64, &PulseEvent)> = None;
    for e in sorted {
        if let Some((end, prev)) = reach {
            if e.time_ns < end {
                return Err(Error::Collision {
                    first: prev.tag(),
                    second: e.tag(),
                });
            }
        }
        let end = e.time_ns + e.width_ns;
        if reach.is_none_or(|(r, _)| end > r) {
            reach = Some((end, e));
        }
    }
    Ok(())
}

/// Pulse schedule for a single launch.
pub fn compile_schedule(
    p: &CoinProgram,
    tm: &TimingModel,
    cal: &Calibration,
) -> Result<PulseSchedule> {
    compile_launches(p, tm, cal, 1)
}

/// Pulse schedule for `launches` successive laser pulses, one repetition
/// period apart.
pub fn compile_launches(
    p: &CoinProgram,
    tm: &TimingModel,
    cal: &Calibration,
    launches: usize,
) -> Result<PulseSchedule> {
    tm.validate()?;
    let phases = coin_to_phases(p);
    let mut events = Vec::with_capacity(2 * phases.len() * launches);
    for k in 0..launches {
        let offset = k as f64 * tm.rep_period_ns;
        for cell in &phases {
            for (arm, phi) in [
                (Arm::CounterClockwise, cell.phi_h),
                (Arm::Clockwise, cell.phi_v),
            ] {
                events.push(PulseEvent {
                    time_ns: arrival_time(cell.step, cell.position, arm, tm, offset)?,
                    voltage_v: cal.voltage(phi.clamp(0.0, PI))?,
                    width_ns: tm.pulse_width_ns,
                    step: cell.step,
                    position: cell.position,
                    arm,
                });
            }
        }
    }
    PulseSchedule::new(events)
}

/// Candidate `(step, position, arm)` bins matching an event time relative
/// to its launch.
fn decode_time(relative_ns: f64, tm: &TimingModel) -> Vec<(usize, i64, Arm)> {
    let mut found = Vec::new();
    for arm in [Arm::CounterClockwise, Arm::Clockwise] {
        let r = match arm {
            Arm::CounterClockwise => relative_ns,
            Arm::Clockwise => relative_ns - tm.sagnac_delay_ns,
        };
        let mut t = 0usize;
        while t as f64 * tm.round_trip_ns <= r + ALIGNMENT_TOL_NS {
            let rest = r - t as f64 * tm.round_trip_ns;
            let n = (rest / tm.bin_delay_ns).round();
            if (0.0..=t as f64).contains(&n)
                && (rest - n * tm.bin_delay_ns).abs() <= ALIGNMENT_TOL_NS
            {
                found.push((t, 2 * n as i64 - t as i64, arm));
            }
            t += 1;
        }
    }
    found
}

/// Recovers the phase pair of every cell from event times and voltages.
///
/// Bins are located from the time alone; the tag stored on each event only
/// disambiguates and must agree with a matching bin. Cells from successive
/// launches are returned in launch order.
pub fn decompile_schedule(
    ps: &PulseSchedule,
    tm: &TimingModel,
    cal: &Calibration,
) -> Result<Vec<PhaseCell>> {
    tm.validate()?;
    type Pair = (Option<f64>, Option<f64>);
    let mut cells: BTreeMap<(usize, usize, i64), Pair> = BTreeMap::new();
    for e in ps.events() {
        let launch = ((e.time_ns + ALIGNMENT_TOL_NS) / tm.rep_period_ns)
            .floor()
            .max(0.0);
        let relative = e.time_ns - launch * tm.rep_period_ns;
        let candidates = decode_time(relative, tm);
        let tag = e.tag();
        let (t, x, arm) = if candidates.contains(&tag) {
            tag
        } else {
            return Err(Error::Alignment { time_ns: e.time_ns });
        };
        let slot = cells.entry((launch as usize, t, x)).or_default();
        let target = match arm {
            Arm::CounterClockwise => &mut slot.0,
            Arm::Clockwise => &mut slot.1,
        };
        if target.replace(cal.phase(e.voltage_v)).is_some() {
            return Err(Error::Alignment { time_ns: e.time_ns });
        }
    }
    cells
        .into_iter()
        .map(|((_, t, x), pair)| match pair {
            (Some(phi_h), Some(phi_v)) => Ok(PhaseCell {
                step: t,
                position: x,
                phi_h,
                phi_v,
            }),
            (None, _) => Err(Error::OrphanEvent {
                step: t,
                position: x,
                arm: Arm::Clockwise,
            }),
            (_, None) => Err(Error::OrphanEvent {
                step: t,
                position: x,
                arm: Arm::CounterClockwise,
            }),
        })
        .collect()
}
