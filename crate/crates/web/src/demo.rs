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

//! Text-producing operations behind the browser bindings.

use std::fmt::Write;

use qwalk::compile::{compile_schedule, Calibration, TimingModel};
use qwalk::measure::similarity;
use qwalk::noise::{bootstrap_errorbars, counts_to_distribution, emulate_counts_at, NoiseModel};
use qwalk::synth::Builtin;
use qwalk::walk::final_state;

/// Largest walk the page offers; keeps every call well under a frame budget.
pub const MAX_STEPS: usize = 40;
/// Largest emulated event count.
pub const MAX_EVENTS: u64 = 1_000_000;

const RESAMPLES: usize = 200;

fn builtin(target: &str, steps: usize) -> Result<Builtin, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!(
            "steps must be between 1 and {MAX_STEPS}, got {steps}"
        ));
    }
    Builtin::parse(target).ok_or_else(|| {
        let names: Vec<_> = Builtin::ALL.iter().map(|b| b.name()).collect();
        format!(
            "unknown walk `{target}`; expected one of {}",
            names.join(", ")
        )
    })
}

/// CSV `x,theory,simulated` for the designed walk after `steps` steps.
pub fn walk_table(target: &str, steps: usize) -> Result<String, String> {
    let b = builtin(target, steps)?;
    let theory = b.theory(steps).map_err(|e| e.to_string())?;
    let program = b.program(steps).map_err(|e| e.to_string())?;
    let simulated = final_state(&program)
        .map_err(|e| e.to_string())?
        .distribution();
    let mut out = String::from("x,theory,simulated\n");
    for (x, p) in theory.iter() {
        let _ = writeln!(out, "{x},{p},{}", simulated.get(x));
    }
    Ok(out)
}

/// Emulated experiment: `events` detections of a walk whose coin angles
/// carry Gaussian jitter of `jitter_rad`.
pub fn emulate_table(
    target: &str,
    steps: usize,
    events: u64,
    jitter_rad: f64,
    seed: u64,
) -> Result<String, String> {
    let b = builtin(target, steps)?;
    if events == 0 || events > MAX_EVENTS {
        return Err(format!(
            "events must be between 1 and {MAX_EVENTS}, got {events}"
        ));
    }
    let nm = NoiseModel {
        coin_angle_jitter_rad: jitter_rad,
        seed,
        ..NoiseModel::default()
    };
    nm.validate().map_err(|e| e.to_string())?;
    let theory = b.theory(steps).map_err(|e| e.to_string())?;
    let program = b.program(steps).map_err(|e| e.to_string())?;
    let counts = emulate_counts_at(&program, &nm, steps, events).map_err(|e| e.to_string())?;
    let measured = counts_to_distribution(&counts).map_err(|e| e.to_string())?;
    let boot =
        bootstrap_errorbars(&counts, RESAMPLES, seed, Some(&theory)).map_err(|e| e.to_string())?;
    let f = similarity(&measured, &theory).map_err(|e| e.to_string())?;

    let mut out = format!(
        "# similarity {f} {}\nx,theory,measured,sigma\n",
        boot.sigma_similarity
    );
    for (x, p) in theory.iter() {
        let sigma = boot.sigma.get(&x).copied().unwrap_or(0.0);
        let _ = writeln!(out, "{x},{p},{},{sigma}", measured.get(x));
    }
    Ok(out)
}

/// Pulse schedule with the default loop timing and calibration.
pub fn schedule_text(target: &str, steps: usize) -> Result<String, String> {
    let b = builtin(target, steps)?;
    let program = b.program(steps).map_err(|e| e.to_string())?;
    compile_schedule(&program, &TimingModel::default(), &Calibration::default())
        .map(|s| s.to_text())
        .map_err(|e| e.to_string())
}
