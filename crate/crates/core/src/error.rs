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

use crate::compile::Arm;

/// Errors produced anywhere in the crate.
///
/// Every variant maps onto one of the process exit codes used by the
/// command-line front end, see [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("non-finite amplitude at position {position}")]
    NonFinite { position: i64 },

    #[error("position {position} is not reachable at step {step}")]
    OutsideSupport { step: usize, position: i64 },

    #[error("coin angle {theta} outside [0, pi]")]
    InvalidAngle { theta: f64 },

    #[error("coin matrix is not orthogonal (deviation {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("incomplete coin layer: no coin for step {step}, position {position}")]
    IncompleteLayer { step: usize, position: i64 },

    #[error("infeasible schedule at step {step}, position {position}: solved square {value:e}")]
    Infeasible {
        step: usize,
        position: i64,
        value: f64,
    },

    #[error("right-edge closure mismatch at step {step}: expected {expected}, got {got}")]
    ClosureMismatch {
        step: usize,
        expected: f64,
        got: f64,
    },

    #[error("zero-probability cell at step {step}, position {position} carries outgoing flux")]
    ZeroProbabilityCell { step: usize, position: i64 },

    #[error(
        "inconsistent plan at step {step}, position {position}: cos^2+sin^2-1 = {deviation:e}"
    )]
    InconsistentPlan {
        step: usize,
        position: i64,
        deviation: f64,
    },

    #[error("complex amplitude at position {position}; real amplitudes required")]
    UnsupportedState { position: i64 },

    #[error("degenerate cell at position {position}: zero norm")]
    DegenerateCell { position: i64 },

    #[error("coin not factored to |0> at position {position}; disentangle first")]
    MustDisentangle { position: i64 },

    #[error(
        "pulse collision: step {}, position {}, {} overlaps step {}, position {}, {}",
        first.0, first.1, first.2.as_str(), second.0, second.1, second.2.as_str()
    )]
    Collision {
        first: (usize, i64, Arm),
        second: (usize, i64, Arm),
    },

    #[error("orphan event: step {step}, position {position}, {} arm has no partner", arm.as_str())]
    OrphanEvent {
        step: usize,
        position: i64,
        arm: Arm,
    },

    #[error("event at {time_ns} ns does not align with any time bin")]
    Alignment { time_ns: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error: 2 parse, 3 infeasible schedule,
    /// 4 collision, 5 domain, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Infeasible { .. }
            | Error::ClosureMismatch { .. }
            | Error::ZeroProbabilityCell { .. }
            | Error::InconsistentPlan { .. } => 3,
            Error::Collision { .. } => 4,
            Error::Io(_) => 1,
            _ => 5,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
