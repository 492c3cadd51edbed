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

//! Pulse compilation against the timing model and calibration.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;

use qwalk::compile::{
    arrival_time, compile_launches, compile_schedule, decompile_schedule, Arm, Calibration,
    PulseSchedule, TimingModel,
};
use qwalk::state::{CoinOp, CoinProgram, WalkerState};
use qwalk::synth::Builtin;
use qwalk::Error;

fn random_program(angles: &[f64], steps: usize) -> CoinProgram {
    let init = WalkerState::localized(1.0.into(), 0.0.into()).unwrap();
    CoinProgram::from_fn(steps, init, |t, x| {
        CoinOp::new(angles[(t * (t + 1) / 2 + ((x + t as i64) / 2) as usize) % angles.len()])
            .unwrap()
    })
    .unwrap()
}

proptest! {
    #[test]
    fn decompile_inverts_compile(
        angles in prop::collection::vec(0.0..=PI, 1..40),
        steps in 1..=11usize,
        launches in 1..=3usize,
    ) {
        let p = random_program(&angles, steps);
        let tm = TimingModel::default();
        let cal = Calibration::default();
        let ps = compile_launches(&p, &tm, &cal, launches).unwrap();
        prop_assert_eq!(ps.len(), 2 * launches * p.cells().count());
        let cells = decompile_schedule(&ps, &tm, &cal).unwrap();
        prop_assert_eq!(cells.len(), launches * p.cells().count());
        for c in &cells {
            let want = p.cell(c.step, c.position).unwrap().theta();
            prop_assert!((c.theta() - want).abs() < 1e-9);
            prop_assert!((c.phi_h + c.phi_v - PI).abs() < 1e-9);
        }
    }

    #[test]
    fn calibration_inverts(phi in 0.0..=PI) {
        let cal = Calibration::default();
        prop_assert!((cal.phase(cal.voltage(phi).unwrap()) - phi).abs() < 1e-12);
    }
}

#[test]
fn default_anchors_and_extrapolation() {
    let cal = Calibration::default();
    assert_eq!(cal.voltage(FRAC_PI_4).unwrap(), 0.127);
    assert_eq!(cal.voltage(FRAC_PI_2).unwrap(), 0.263);
    assert_eq!(cal.voltage(3.0 * FRAC_PI_4).unwrap(), 0.392);
    let (lo, hi) = cal.voltage_range();
    // Outer segments continue linearly.
    assert!((lo - (0.127 - 0.136)).abs() < 1e-12);
    assert!((hi - (0.392 + 0.129)).abs() < 1e-12);
    assert!(cal.voltage(-0.1).is_err());
}

#[test]
fn bin_arithmetic() {
    let tm = TimingModel::default();
    for t in 0..8usize {
        for k in 0..=t {
            let x = 2 * k as i64 - t as i64;
            let ccw = arrival_time(t, x, Arm::CounterClockwise, &tm, 0.0).unwrap();
            let cw = arrival_time(t, x, Arm::Clockwise, &tm, 0.0).unwrap();
            assert!((ccw - (72.9 * t as f64 + 2.3 * k as f64)).abs() < 1e-9);
            assert!((cw - ccw - 39.1).abs() < 1e-12);
        }
    }
    assert!(arrival_time(2, 1, Arm::Clockwise, &tm, 0.0).is_err());
}

#[test]
fn hadamard_one_step_schedule() {
    let p = Builtin::Hadamard.program(1).unwrap();
    let text = compile_schedule(&p, &TimingModel::default(), &Calibration::default())
        .unwrap()
        .to_text();
    assert_eq!(
        text,
        "time_ns,voltage_v,width_ns,step,position,arm\n0.0000,0.1270,1.0000,0,0,ccw\n39.1000,0.3920,1.0000,0,0,cw\n"
    );
}

#[test]
fn file_precision_bounds_angle_error() {
    // Four decimals of voltage are about 6e-4 rad at the calibration slope.
    let tm = TimingModel::default();
    let cal = Calibration::default();
    for b in Builtin::ALL {
        let p = b.program(11).unwrap();
        let text = compile_schedule(&p, &tm, &cal).unwrap().to_text();
        let cells = decompile_schedule(&PulseSchedule::parse(&text).unwrap(), &tm, &cal).unwrap();
        for c in cells {
            let want = p.cell(c.step, c.position).unwrap().theta();
            assert!((c.theta() - want).abs() < 1e-3);
        }
    }
}

#[test]
fn collisions_are_errors() {
    let cal = Calibration::default();
    let crafted = TimingModel {
        bin_delay_ns: 1.5,
        sagnac_delay_ns: 0.75,
        ..TimingModel::default()
    };
    let err = compile_schedule(&Builtin::Gaussian.program(2).unwrap(), &crafted, &cal).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    // With the default loop, long programs run the clockwise arm into a
    // later counter-clockwise bin of the same round trip.
    let long = compile_schedule(
        &Builtin::Uniform.program(20).unwrap(),
        &TimingModel::default(),
        &cal,
    );
    assert!(matches!(long, Err(Error::Collision { .. })));
    // Pulses wider than a bin are rejected up front.
    let wide = TimingModel {
        pulse_width_ns: 3.0,
        ..TimingModel::default()
    };
    assert!(matches!(
        compile_schedule(&Builtin::Uniform.program(2).unwrap(), &wide, &cal),
        Err(Error::Domain(_))
    ));
}
