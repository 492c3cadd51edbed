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

//! Forward evolution: coin layers, the conditional shift, whole programs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::state::{Coin, CoinAmps, CoinLayer, CoinOp, CoinProgram, Distribution, WalkerState};

/// Snapshot after one step of a program run.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub state: WalkerState,
    pub distribution: Distribution,
}

impl StepReport {
    fn new(state: WalkerState) -> Self {
        StepReport {
            step: state.step(),
            distribution: state.distribution(),
            state,
        }
    }
}

/// Applies `layer[x]` to the coin at every occupied position `x`.
pub fn apply_coin_layer<C: Coin>(s: &WalkerState, layer: &BTreeMap<i64, C>) -> Result<WalkerState> {
    let amps = s
        .amplitudes()
        .iter()
        .map(|(&x, &c)| match layer.get(&x) {
            Some(coin) => Ok((x, coin.apply(c))),
            None => Err(Error::IncompleteLayer {
                step: s.step(),
                position: x,
            }),
        })
        .collect::<Result<_>>()?;
    Ok(WalkerState::from_parts(s.step(), amps))
}

/// Conditional shift: `a(x)` moves to `x + 1`, `b(x)` to `x - 1`.
pub fn apply_shift(s: &WalkerState) -> WalkerState {
    let mut out: BTreeMap<i64, CoinAmps> = BTreeMap::new();
    for (&x, c) in s.amplitudes() {
        out.entry(x + 1).or_insert(CoinAmps::ZERO).a += c.a;
        out.entry(x - 1).or_insert(CoinAmps::ZERO).b += c.b;
    }
    WalkerState::from_parts(s.step() + 1, out)
}

/// Inverse of [`apply_shift`].
pub fn inverse_shift(s: &WalkerState) -> Result<WalkerState> {
    if s.step() == 0 {
        return Err(Error::Domain("cannot unshift a step-0 state".into()));
    }
    let mut out: BTreeMap<i64, CoinAmps> = BTreeMap::new();
    for (&x, c) in s.amplitudes() {
        out.entry(x - 1).or_insert(CoinAmps::ZERO).a += c.a;
        out.entry(x + 1).or_insert(CoinAmps::ZERO).b += c.b;
    }
    // Shifting back produces empty slots beyond the previous support.
    let prev = s.step() - 1;
    out.retain(|&x, _| crate::state::reachable(prev, x));
    Ok(WalkerState::from_parts(prev, out))
}

/// One walk step: coin layer, then shift.
pub fn step(s: &WalkerState, coins_at_t: &CoinLayer) -> Result<WalkerState> {
    Ok(apply_shift(&apply_coin_layer(s, coins_at_t)?))
}

/// Runs every stepped layer of `p`, then its final layer if present.
///
/// Returns `steps + 1` reports, the first one for the initial state. When
/// the program carries a final layer, the last report holds the state after
/// that layer (its step index is unchanged, the layer does not shift).
pub fn run_program(p: &CoinProgram) -> Result<Vec<StepReport>> {
    let mut reports = Vec::with_capacity(p.steps() + 1);
    let mut s = p.initial().clone();
    reports.push(StepReport::new(s.clone()));
    for layer in p.layers() {
        s = step(&s, layer)?;
        reports.push(StepReport::new(s.clone()));
    }
    if let Some(fl) = p.final_layer() {
        s = apply_coin_layer(&s, fl)?;
        *reports.last_mut().expect("at least one report") = StepReport::new(s);
    }
    Ok(reports)
}

/// State after the full program, including the final layer.
pub fn final_state(p: &CoinProgram) -> Result<WalkerState> {
    let mut s = p.initial().clone();
    for layer in p.layers() {
        s = step(&s, layer)?;
    }
    match p.final_layer() {
        Some(fl) => apply_coin_layer(&s, fl),
        None => Ok(s),
    }
}

/// Undoes a full program run: transposed final layer, then inverse shift
/// and transposed coins in reverse order.
pub fn run_reverse(p: &CoinProgram, end: &WalkerState) -> Result<WalkerState> {
    let mut s = end.clone();
    if let Some(fl) = p.final_layer() {
        let inv: BTreeMap<_, _> = fl.iter().map(|(&x, c)| (x, c.transpose())).collect();
        s = apply_coin_layer(&s, &inv)?;
    }
    for layer in p.layers().iter().rev() {
        s = inverse_shift(&s)?;
        // Angle coins are symmetric involutions, so each is its own inverse.
        s = apply_coin_layer(&s, layer)?;
    }
    Ok(s)
}

/// The homogeneous Hadamard walk: every cell has `theta = pi/4`.
pub fn hadamard_program(steps: usize, initial: WalkerState) -> Result<CoinProgram> {
    if steps == 0 {
        return Err(Error::Domain(
            "hadamard program needs at least one step".into(),
        ));
    }
    CoinProgram::from_fn(steps, initial, |_, _| CoinOp::HADAMARD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::GeneralCoinOp;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn h0() -> WalkerState {
        WalkerState::localized(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap()
    }

    fn layer0(theta: f64) -> CoinLayer {
        [(0, CoinOp::new(theta).unwrap())].into_iter().collect()
    }

    #[test]
    fn theta_zero_keeps_horizontal() {
        let s = apply_coin_layer(&h0(), &layer0(0.0)).unwrap();
        assert_eq!(s.get(0), CoinAmps::real(1.0, 0.0));
    }

    #[test]
    fn hadamard_column() {
        let s = apply_coin_layer(&h0(), &layer0(FRAC_PI_4)).unwrap();
        let c = s.get(0);
        assert!((c.a.re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((c.b.re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn disentangling_coin_factors_pair() {
        let (a, b) = (0.3_f64, -0.5_f64);
        let n = (a * a + b * b).sqrt();
        let mut amps = BTreeMap::new();
        amps.insert(0, CoinAmps::real(a / n, b / n));
        let s = WalkerState::new(0, amps).unwrap();
        let coin = GeneralCoinOp::new([[a / n, b / n], [b / n, -a / n]]).unwrap();
        let out = apply_coin_layer(&s, &[(0, coin)].into_iter().collect()).unwrap();
        assert!((out.get(0).a.re - 1.0).abs() < 1e-15);
        assert!(out.get(0).b.norm() < 1e-15);
    }

    #[test]
    fn missing_coin_is_an_error() {
        let err = apply_coin_layer(&h0(), &CoinLayer::new()).unwrap_err();
        assert!(matches!(
            err,
            Error::IncompleteLayer {
                step: 0,
                position: 0
            }
        ));
    }

    #[test]
    fn shift_moves_a_right_b_left() {
        let mut amps = BTreeMap::new();
        amps.insert(0, CoinAmps::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        let s = apply_shift(&WalkerState::new(0, amps).unwrap());
        assert_eq!(s.step(), 1);
        assert_eq!(s.get(1), CoinAmps::real(FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.get(-1), CoinAmps::real(0.0, FRAC_1_SQRT_2));

        let s = apply_shift(&h0());
        assert_eq!(s.get(1).a.re, 1.0);
    }

    #[test]
    fn step_hadamard_and_not() {
        let s = step(&h0(), &layer0(FRAC_PI_4)).unwrap();
        let d = s.distribution();
        assert!((d.get(-1) - 0.5).abs() < 1e-15 && (d.get(1) - 0.5).abs() < 1e-15);

        let s = step(&h0(), &layer0(FRAC_PI_2)).unwrap();
        assert!((s.get(-1).b.re - 1.0).abs() < 1e-15);
        assert!(s.distribution().get(1) < 1e-30);
    }

    #[test]
    fn hadamard_program_shape() {
        let p = hadamard_program(1, h0()).unwrap();
        assert_eq!(p.cells().count(), 1);
        assert_eq!(p.cell(0, 0), Some(CoinOp::HADAMARD));
        assert!(p.final_layer().is_none());
        assert!(hadamard_program(0, h0()).is_err());
    }

    #[test]
    fn run_program_reports() {
        let p = hadamard_program(4, h0()).unwrap();
        let reports = run_program(&p).unwrap();
        assert_eq!(reports.len(), 5);
        for (t, r) in reports.iter().enumerate() {
            assert_eq!(r.step, t);
            assert!((r.state.norm() - 1.0).abs() < 1e-12);
            assert_eq!(r.distribution, r.state.distribution());
        }
    }

    #[test]
    fn reverse_returns_initial() {
        let p = hadamard_program(9, h0()).unwrap();
        let end = final_state(&p).unwrap();
        let back = run_reverse(&p, &end).unwrap();
        assert!(back.max_amp_diff(&h0()) < 1e-10);
    }
}
