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

//! Plain-text file formats.
//!
//! Floats are written with Rust's shortest round-trip representation, so
//! every format here parses back to the same values and re-serializes to
//! the same bytes. Pulse schedules and calibrations live in
//! [`crate::compile`], noise configs in [`crate::noise`].
//!
//! Program file:
//!
//! ```text
//! qwalk-program 1
//! steps 2
//! convention a-right
//! initial 1 0 0 0
//! 0 0 0.7853981633974483
//! 1 -1 0.7853981633974483
//! 1 1 0.7853981633974483
//! F -2 1 0 0 -1
//! ...
//! ```
//!
//! `initial` holds `re(a) im(a) re(b) im(b)`. Cell lines are `t x theta`,
//! final-layer lines `F x m00 m01 m10 m11`. `convention a-left` marks a
//! program written for the mirrored shift (coin |0> moves left).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::PurityRecord;
use crate::noise::Counts;
use crate::state::{
    Coin, CoinLayer, CoinOp, CoinProgram, Distribution, DistributionSchedule, FinalLayer,
    GeneralCoinOp, WalkerState,
};

pub const PROGRAM_MAGIC: &str = "qwalk-program";
pub const PROGRAM_VERSION: u32 = 1;

/// Which way the coin-|0> component moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    ARight,
    ALeft,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::ARight => "a-right",
            Convention::ALeft => "a-left",
        }
    }
}

/// A program as stored on disk, in the file's own convention.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramFile {
    pub convention: Convention,
    pub program: CoinProgram,
}

impl ProgramFile {
    pub fn new(program: CoinProgram) -> Self {
        ProgramFile {
            convention: Convention::ARight,
            program,
        }
    }

    /// The program in this crate's shift convention.
    pub fn canonical(&self) -> CoinProgram {
        match self.convention {
            Convention::ARight => self.program.clone(),
            Convention::ALeft => self.program.mirror(),
        }
    }

    pub fn to_text(&self) -> String {
        let p = &self.program;
        let init = p.initial().get(0);
        let mut out = String::new();
        let _ = writeln!(out, "{PROGRAM_MAGIC} {PROGRAM_VERSION}");
        let _ = writeln!(out, "steps {}", p.steps());
        let _ = writeln!(out, "convention {}", self.convention.as_str());
        let _ = writeln!(
            out,
            "initial {} {} {} {}",
            init.a.re, init.a.im, init.b.re, init.b.im
        );
        for (t, x, c) in p.cells() {
            let _ = writeln!(out, "{t} {x} {}", c.theta());
        }
        if let Some(fl) = p.final_layer() {
            for (x, c) in fl {
                let m = c.matrix();
                let _ = writeln!(out, "F {x} {} {} {} {}", m[0][0], m[0][1], m[1][0], m[1][1]);
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let mut header = |key: &str| -> Result<(usize, Vec<String>)> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing `{key}` line")))?;
            let mut f = line.split_whitespace();
            if f.next() != Some(key) {
                return Err(Error::parse(n, format!("expected `{key}`")));
            }
            Ok((n, f.map(String::from).collect()))
        };

        let (n, v) = header(PROGRAM_MAGIC)?;
        if v != [PROGRAM_VERSION.to_string()] {
            return Err(Error::parse(n, "unsupported program version"));
        }
        let (n, v) = header("steps")?;
        let steps: usize = single(&v)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(n, "bad step count"))?;
        let (n, v) = header("convention")?;
        let convention = match single(&v) {
            Some("a-right") => Convention::ARight,
            Some("a-left") => Convention::ALeft,
            _ => return Err(Error::parse(n, "convention must be a-right or a-left")),
        };
        let (n, v) = header("initial")?;
        let init = floats(n, &v, 4)?;
        let initial = WalkerState::localized(
            Complex64::new(init[0], init[1]),
            Complex64::new(init[2], init[3]),
        )?;

        let mut layers = vec![CoinLayer::new(); steps];
        let mut final_layer: Option<FinalLayer> = None;
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.first() == Some(&"F") {
                if f.len() != 6 {
                    return Err(Error::parse(n, "expected `F x m00 m01 m10 m11`"));
                }
                let x: i64 = f[1].parse().map_err(|_| Error::parse(n, "bad position"))?;
                let m = floats(n, &f[2..], 4)?;
                let coin = GeneralCoinOp::new([[m[0], m[1]], [m[2], m[3]]])?;
                if final_layer
                    .get_or_insert_with(BTreeMap::new)
                    .insert(x, coin)
                    .is_some()
                {
                    return Err(Error::parse(n, "duplicate final-layer cell"));
                }
                continue;
            }
            if f.len() != 3 {
                return Err(Error::parse(n, "expected `t x theta`"));
            }
            let t: usize = f[0].parse().map_err(|_| Error::parse(n, "bad step"))?;
            let x: i64 = f[1].parse().map_err(|_| Error::parse(n, "bad position"))?;
            let theta: f64 = f[2].parse().map_err(|_| Error::parse(n, "bad angle"))?;
            let layer = layers
                .get_mut(t)
                .ok_or_else(|| Error::parse(n, format!("step {t} beyond `steps {steps}`")))?;
            if layer.insert(x, CoinOp::new(theta)?).is_some() {
                return Err(Error::parse(n, "duplicate cell"));
            }
        }
        Ok(ProgramFile {
            convention,
            program: CoinProgram::new(layers, initial, final_layer)?,
        })
    }
}

fn single(v: &[String]) -> Option<&str> {
    match v {
        [s] => Some(s.as_str()),
        _ => None,
    }
}

fn floats<S: AsRef<str>>(line: usize, fields: &[S], n: usize) -> Result<Vec<f64>> {
    if fields.len() != n {
        return Err(Error::parse(line, format!("expected {n} numbers")));
    }
    fields
        .iter()
        .map(|s| {
            s.as_ref()
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("bad number `{}`", s.as_ref())))
        })
        .collect()
}

/// Distribution file: `position probability [sigma]` per line.
pub fn distribution_to_text(d: &Distribution, sigma: Option<&BTreeMap<i64, f64>>) -> String {
    let mut out = String::new();
    for (x, p) in d.iter() {
        match sigma.and_then(|s| s.get(&x)) {
            Some(s) => {
                let _ = writeln!(out, "{x} {p} {s}");
            }
            None => {
                let _ = writeln!(out, "{x} {p}");
            }
        }
    }
    out
}

/// Parses a distribution file. The sigma map is present only if every line
/// carries a third column.
pub fn parse_distribution(text: &str) -> Result<(Distribution, Option<BTreeMap<i64, f64>>)> {
    let mut probs = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    let mut all_sigma = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&f.len()) {
            return Err(Error::parse(
                i + 1,
                "expected `position probability [sigma]`",
            ));
        }
        let x: i64 = f[0]
            .parse()
            .map_err(|_| Error::parse(i + 1, "bad position"))?;
        let p = floats(i + 1, &f[1..2], 1)?[0];
        if probs.insert(x, p).is_some() {
            return Err(Error::parse(i + 1, "duplicate position"));
        }
        match f.get(2) {
            Some(s) => {
                sigma.insert(x, floats(i + 1, &[s], 1)?[0]);
            }
            None => all_sigma = false,
        }
    }
    let sigma = (all_sigma && !sigma.is_empty()).then_some(sigma);
    Ok((Distribution::new(probs), sigma))
}

/// Target schedule file: `t x probability` per line. A missing row 0
/// defaults to the walker at the origin; every later row must appear, and
/// cells omitted inside a row have probability zero.
pub fn parse_targets(text: &str) -> Result<DistributionSchedule> {
    let mut rows: BTreeMap<usize, BTreeMap<i64, f64>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(i + 1, "expected `t x probability`"));
        }
        let t: usize = f[0].parse().map_err(|_| Error::parse(i + 1, "bad step"))?;
        let x: i64 = f[1]
            .parse()
            .map_err(|_| Error::parse(i + 1, "bad position"))?;
        let p = floats(i + 1, &f[2..3], 1)?[0];
        if rows.entry(t).or_default().insert(x, p).is_some() {
            return Err(Error::parse(i + 1, "duplicate cell"));
        }
    }
    rows.entry(0)
        .or_insert_with(|| [(0, 1.0)].into_iter().collect());
    let last = *rows.keys().last().expect("row 0 present");
    let mut out = Vec::with_capacity(last + 1);
    for t in 0..=last {
        let row = rows
            .remove(&t)
            .ok_or_else(|| Error::parse(0, format!("no targets for step {t}")))?;
        out.push(Distribution::new(row));
    }
    DistributionSchedule::new(out)
}

pub fn targets_to_text(sched: &DistributionSchedule) -> String {
    let mut out = String::new();
    for (t, row) in sched.rows().iter().enumerate() {
        for (x, p) in row.iter() {
            let _ = writeln!(out, "{t} {x} {p}");
        }
    }
    out
}

/// Count table: `position count frequency sigma` per line.
pub fn counts_to_text(counts: &Counts, sigma: &BTreeMap<i64, f64>) -> String {
    let total: u64 = counts.values().sum::<u64>().max(1);
    let mut out = String::new();
    for (x, c) in counts {
        let s = sigma.get(x).copied().unwrap_or(0.0);
        let _ = writeln!(out, "{x} {c} {} {s}", *c as f64 / total as f64);
    }
    out
}

/// Parses a count table back into counts and sigmas; the frequency column
/// is checked against the counts.
pub fn parse_counts(text: &str) -> Result<(Counts, BTreeMap<i64, f64>)> {
    let mut counts = Counts::new();
    let mut sigma = BTreeMap::new();
    let mut freqs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::parse(
                i + 1,
                "expected `position count frequency sigma`",
            ));
        }
        let x: i64 = f[0]
            .parse()
            .map_err(|_| Error::parse(i + 1, "bad position"))?;
        let c: u64 = f[1].parse().map_err(|_| Error::parse(i + 1, "bad count"))?;
        let v = floats(i + 1, &f[2..4], 2)?;
        if counts.insert(x, c).is_some() {
            return Err(Error::parse(i + 1, "duplicate position"));
        }
        sigma.insert(x, v[1]);
        freqs.push((i + 1, c, v[0]));
    }
    let total = counts.values().sum::<u64>().max(1) as f64;
    for (line, c, freq) in freqs {
        if (c as f64 / total - freq).abs() > 1e-12 {
            return Err(Error::parse(line, "frequency does not match the counts"));
        }
    }
    Ok((counts, sigma))
}

pub fn samples_to_text(samples: &[i64]) -> String {
    let mut out = String::with_capacity(4 * samples.len());
    for x in samples {
        let _ = writeln!(out, "{x}");
    }
    out
}

/// Measured positions, one per line.
pub fn parse_samples(text: &str) -> Result<Vec<i64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::parse(i + 1, "bad position"))
        })
        .collect()
}

/// One purity-report row with optional measurement errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityRow {
    pub record: PurityRecord,
    pub lhs_sigma: Option<f64>,
    pub rhs_sigma: Option<f64>,
}

/// Table of `|rho_{x,x+2}|^2` against `|rho_xx||rho_{x+2,x+2}|` per pair.
pub fn purity_report(title: &str, rows: &[PurityRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(
        out,
        "# {:>4}  {:>20}  {:>20}  pass",
        "x", "|rho_x,x+2|^2", "|rho_xx||rho_x+2|"
    );
    let cell = |v: f64, s: Option<f64>| match s {
        Some(s) => format!("{v:.6} +- {s:.6}"),
        None => format!("{v:.12}"),
    };
    for r in rows {
        let _ = writeln!(
            out,
            "  {:>4}  {:>20}  {:>20}  {}",
            r.record.x,
            cell(r.record.lhs, r.lhs_sigma),
            cell(r.record.rhs, r.rhs_sigma),
            if r.record.pass { "yes" } else { "no" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::uniform_program;

    #[test]
    fn program_round_trip() {
        let text = ProgramFile::new(uniform_program(4).unwrap()).to_text();
        let parsed = ProgramFile::parse(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed.program, uniform_program(4).unwrap());
    }

    #[test]
    fn program_parse_errors() {
        assert!(matches!(ProgramFile::parse(""), Err(Error::Parse { .. })));
        let text = "qwalk-program 1\nsteps 1\nconvention a-right\ninitial 1 0 0 0\n";
        assert!(matches!(
            ProgramFile::parse(text),
            Err(Error::IncompleteLayer {
                step: 0,
                position: 0
            })
        ));
        let text = format!("{text}0 0 0.5\n0 0 0.5\n");
        assert!(matches!(
            ProgramFile::parse(&text),
            Err(Error::Parse { line: 6, .. })
        ));
    }

    #[test]
    fn a_left_files_are_mirrored() {
        let p = uniform_program(3).unwrap().without_final_layer();
        let file = ProgramFile {
            convention: Convention::ALeft,
            program: p.clone(),
        };
        let parsed = ProgramFile::parse(&file.to_text()).unwrap();
        assert_eq!(parsed.convention, Convention::ALeft);
        assert_eq!(parsed.canonical(), p.mirror());
    }

    #[test]
    fn distribution_and_targets() {
        let d: Distribution = [(-1, 0.25), (1, 0.75)].into_iter().collect();
        let text = distribution_to_text(&d, None);
        let (back, sigma) = parse_distribution(&text).unwrap();
        assert_eq!(back, d);
        assert!(sigma.is_none());
        let s: BTreeMap<i64, f64> = [(-1, 0.01), (1, 0.02)].into_iter().collect();
        let text = distribution_to_text(&d, Some(&s));
        assert_eq!(parse_distribution(&text).unwrap().1, Some(s));

        let sched = parse_targets("1 -1 0.5\n1 1 0.5\n2 -2 0.25\n2 0 0.5\n2 2 0.25\n").unwrap();
        assert_eq!(sched.steps(), 2);
        assert_eq!(parse_targets(&targets_to_text(&sched)).unwrap(), sched);
        assert!(parse_targets("2 0 1\n").is_err());
    }
}
