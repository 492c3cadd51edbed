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

//! Every text format parses back to the same value and bytes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;

use qwalk::compile::{compile_schedule, Calibration, PulseSchedule, TimingModel};
use qwalk::formats::{
    counts_to_text, distribution_to_text, parse_counts, parse_distribution, parse_samples,
    parse_targets, samples_to_text, targets_to_text, Convention, ProgramFile,
};
use qwalk::noise::{Counts, NoiseModel};
use qwalk::state::{CoinOp, CoinProgram, Distribution, WalkerState};
use qwalk::synth::{uniform_schedule, with_disentangling, Builtin};

fn program() -> impl Strategy<Value = CoinProgram> {
    (1..=8usize, 0.0..std::f64::consts::FRAC_PI_2, any::<bool>()).prop_flat_map(
        |(steps, mix, real)| {
            prop::collection::vec(0.0..=std::f64::consts::PI, steps * (steps + 1) / 2).prop_map(
                move |angles| {
                    let b0 = if real {
                        Complex64::new(mix.sin(), 0.0)
                    } else {
                        Complex64::new(0.0, mix.sin())
                    };
                    let init = WalkerState::localized(Complex64::new(mix.cos(), 0.0), b0).unwrap();
                    let p = CoinProgram::from_fn(steps, init, |t, x| {
                        CoinOp::new(angles[t * (t + 1) / 2 + ((x + t as i64) / 2) as usize])
                            .unwrap()
                    })
                    .unwrap();
                    if real {
                        with_disentangling(p.clone()).unwrap_or(p)
                    } else {
                        p
                    }
                },
            )
        },
    )
}

fn distribution() -> impl Strategy<Value = Distribution> {
    (1..=12usize).prop_flat_map(|t| {
        prop::collection::vec(0.001..1.0f64, t + 1).prop_map(move |w| {
            let total: f64 = w.iter().sum();
            w.iter()
                .enumerate()
                .map(|(k, p)| (2 * k as i64 - t as i64, p / total))
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn program_files(p in program(), mirrored in any::<bool>()) {
        let file = ProgramFile {
            convention: if mirrored { Convention::ALeft } else { Convention::ARight },
            program: p,
        };
        let text = file.to_text();
        let back = ProgramFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn distribution_files(d in distribution(), with_sigma in any::<bool>()) {
        let sigma: BTreeMap<i64, f64> = d.iter().map(|(x, p)| (x, p.sqrt() / 100.0)).collect();
        let text = distribution_to_text(&d, with_sigma.then_some(&sigma));
        let (back, s) = parse_distribution(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(s.is_some(), with_sigma);
        prop_assert_eq!(distribution_to_text(&back, s.as_ref()), text);
    }

    #[test]
    fn count_and_sample_files(c in prop::collection::btree_map(-20i64..20, 0u64..100_000, 1..20)) {
        let counts: Counts = c;
        let sigma: BTreeMap<i64, f64> = counts.keys().map(|&x| (x, (x as f64).abs() / 7.0)).collect();
        let text = counts_to_text(&counts, &sigma);
        let (back, s) = parse_counts(&text).unwrap();
        prop_assert_eq!(&back, &counts);
        prop_assert_eq!(counts_to_text(&back, &s), text);

        let samples: Vec<i64> = counts.keys().copied().collect();
        let text = samples_to_text(&samples);
        prop_assert_eq!(parse_samples(&text).unwrap(), samples);
    }

    #[test]
    fn noise_configs(survival in 0.0..=1.0f64, jitter in 0.0..0.1f64, gamma in 0.0..=1.0f64, seed in any::<u64>()) {
        let nm = NoiseModel {
            round_trip_survival: survival,
            coin_angle_jitter_rad: jitter,
            dephasing_gamma: gamma,
            seed,
            ..NoiseModel::default()
        };
        let text = nm.to_text();
        let back = NoiseModel::parse(&text).unwrap();
        prop_assert_eq!(&back, &nm);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn calibrations(v in prop::collection::vec(0.01..1.0f64, 2..6)) {
        let mut anchors = Vec::new();
        let (mut phi, mut volts) = (0.0, 0.0);
        for (i, dv) in v.iter().enumerate() {
            phi += 0.3 + 0.1 * i as f64;
            volts += dv;
            anchors.push((phi, volts));
        }
        let cal = Calibration::new(anchors).unwrap();
        let text = cal.to_text();
        let back = Calibration::parse(&text).unwrap();
        prop_assert_eq!(&back, &cal);
        prop_assert_eq!(back.to_text(), text);
    }
}

#[test]
fn target_schedules() {
    let sched = uniform_schedule(6);
    let text = targets_to_text(&sched);
    let back = parse_targets(&text).unwrap();
    assert_eq!(back, sched);
    assert_eq!(targets_to_text(&back), text);
}

#[test]
fn pulse_schedules() {
    for b in Builtin::ALL {
        let ps = compile_schedule(
            &b.program(9).unwrap(),
            &TimingModel::default(),
            &Calibration::default(),
        )
        .unwrap();
        let text = ps.to_text();
        let back = PulseSchedule::parse(&text).unwrap();
        assert_eq!(back.len(), ps.len());
        assert_eq!(back.to_text(), text);
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_distribution("0 0.5\nx 0.5\n").unwrap_err();
    assert!(matches!(err, qwalk::Error::Parse { line: 2, .. }));
    assert_eq!(err.exit_code(), 2);
    let err = NoiseModel::parse("round_trip_survival 0.4\ncolour blue\n").unwrap_err();
    assert!(matches!(err, qwalk::Error::Parse { line: 2, .. }));
    let err = parse_counts("0 3 0.5 0\n2 1 0.25 0\n").unwrap_err();
    assert!(matches!(err, qwalk::Error::Parse { line: 1, .. }));
    assert!(PulseSchedule::parse("time,voltage\n").is_err());
}
