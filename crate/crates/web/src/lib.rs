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

//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! Each exported function returns plain text that the page parses. The
//! work is done by the functions in [`demo`], which are ordinary Rust and
//! are what the native tests exercise.

use wasm_bindgen::prelude::*;

pub mod demo;

/// Designs the built-in walk and simulates it; CSV `x,theory,simulated`.
#[wasm_bindgen]
pub fn walk_distribution(target: &str, steps: u32) -> Result<String, JsError> {
    demo::walk_table(target, steps as usize).map_err(|e| JsError::new(&e))
}

/// Emulated measurement with coin-angle jitter; CSV
/// `x,theory,measured,sigma` preceded by a `# similarity F sigma` line.
#[wasm_bindgen]
pub fn noisy_distribution(
    target: &str,
    steps: u32,
    events: u32,
    jitter_rad: f64,
    seed: u32,
) -> Result<String, JsError> {
    demo::emulate_table(
        target,
        steps as usize,
        events as u64,
        jitter_rad,
        seed as u64,
    )
    .map_err(|e| JsError::new(&e))
}

/// Modulator pulse schedule for the built-in walk, in the schedule file format.
#[wasm_bindgen]
pub fn pulse_schedule(target: &str, steps: u32) -> Result<String, JsError> {
    demo::schedule_text(target, steps as usize).map_err(|e| JsError::new(&e))
}
