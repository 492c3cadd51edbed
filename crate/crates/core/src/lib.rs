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

//! Programmable one-dimensional discrete-time quantum walks.
//!
//! * [`state`]: coin-walker states, coins, programs, target schedules.
//! * [`walk`]: forward evolution and the Hadamard walk.
//! * [`synth`]: coin programs realizing a target distribution schedule.
//! * [`compile`]: phase-modulator pulse schedules for an optical loop.
//! * [`measure`]: similarity, entropy, pair coherence, random bits.
//! * [`noise`]: finite statistics, coin jitter and dephasing.
//! * [`formats`] and [`cli`]: text file formats and the `qwalk` command.

pub mod cli;
pub mod compile;
pub mod error;
pub mod formats;
pub mod measure;
pub mod noise;
pub mod state;
pub mod synth;
pub mod walk;

pub use error::{Error, Result};
