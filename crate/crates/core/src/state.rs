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

//! Value types for coin-walker states, coins, programs and distributions.
//!
//! Positions are integers; after `t` steps a walker started at the origin
//! occupies `x = -t, -t+2, ..., t`. Amplitudes are kept sparsely in ordered
//! maps keyed by position so that parity violations are detectable instead
//! of being absorbed into a dense array.
//!
//! The shift convention used throughout the crate moves the coin-|0>
//! component (amplitude `a`) to the right and the coin-|1> component
//! (amplitude `b`) to the left. [`WalkerState::mirror`] and
//! [`CoinProgram::mirror`] convert to the opposite convention.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for checks on user-supplied input.
pub const INPUT_TOL: f64 = 1e-9;
/// Tolerance for invariants that only depend on exact arithmetic.
pub const ENGINE_TOL: f64 = 1e-12;

/// Positions reachable after `step` steps, ascending.
pub fn support(step: usize) -> impl DoubleEndedIterator<Item = i64> + ExactSizeIterator + Clone {
    let t = step as i64;
    (0..step + 1).map(move |k| 2 * k as i64 - t)
}

/// Whether `position` is reachable after `step` steps.
pub fn reachable(step: usize, position: i64) -> bool {
    let t = step as i64;
    position.abs() <= t && (position + t).rem_euclid(2) == 0
}

/// Coin amplitude pair `(a, b)` at one position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinAmps {
    pub a: Complex64,
    pub b: Complex64,
}

impl CoinAmps {
    pub const ZERO: CoinAmps = CoinAmps {
        a: Complex64::new(0.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    pub fn new(a: Complex64, b: Complex64) -> Self {
        CoinAmps { a, b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        CoinAmps {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
        }
    }

    /// `|a|^2 + |b|^2`.
    pub fn probability(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.a.im.abs() <= tol && self.b.im.abs() <= tol
    }

    pub fn scale(&self, k: f64) -> Self {
        CoinAmps {
            a: self.a * k,
            b: self.b * k,
        }
    }
}

/// Probability per position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Distribution(BTreeMap<i64, f64>);

impl Distribution {
    pub fn new(probabilities: BTreeMap<i64, f64>) -> Self {
        Distribution(probabilities)
    }

    /// Probability at `position`, zero outside the stored support.
    pub fn get(&self, position: i64) -> f64 {
        self.0.get(&position).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.0.iter().map(|(&x, &p)| (x, p))
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn as_map(&self) -> &BTreeMap<i64, f64> {
        &self.0
    }

    pub fn mirror(&self) -> Self {
        self.iter().map(|(x, p)| (-x, p)).collect()
    }

    /// Checks nonnegativity and that the total is one within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (x, p) in self.iter() {
            if !p.is_finite() || p < -tol {
                return Err(Error::Domain(format!(
                    "probability {p} at position {x} is not a valid probability"
                )));
            }
        }
        let total = self.total();
        if (total - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm: total });
        }
        Ok(())
    }

    /// Largest absolute pointwise difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.positions()
            .chain(other.positions())
            .map(|x| (self.get(x) - other.get(x)).abs())
            .fold(0.0, f64::max)
    }
}

impl FromIterator<(i64, f64)> for Distribution {
    fn from_iter<I: IntoIterator<Item = (i64, f64)>>(iter: I) -> Self {
        Distribution(iter.into_iter().collect())
    }
}

/// Coin-walker wavefunction after some number of steps.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerState {
    step: usize,
    amps: BTreeMap<i64, CoinAmps>,
}

impl WalkerState {
    /// Walker at the origin with coin state `amp0 |0> + amp1 |1>`.
    pub fn localized(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let mut amps = BTreeMap::new();
        amps.insert(0, CoinAmps::new(amp0, amp1));
        WalkerState::new(0, amps)
    }

    /// Validated constructor: finite amplitudes on the reachable support,
    /// normalized within [`INPUT_TOL`].
    pub fn new(step: usize, amps: BTreeMap<i64, CoinAmps>) -> Result<Self> {
        for (&x, c) in &amps {
            if !reachable(step, x) {
                return Err(Error::OutsideSupport { step, position: x });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite { position: x });
            }
        }
        let state = WalkerState { step, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > INPUT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    /// Unchecked constructor for engine-internal evolution, which preserves
    /// the invariants by construction, and for deliberately unnormalized
    /// sub-states used in tomography.
    pub(crate) fn from_parts(step: usize, amps: BTreeMap<i64, CoinAmps>) -> Self {
        WalkerState { step, amps }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn amplitudes(&self) -> &BTreeMap<i64, CoinAmps> {
        &self.amps
    }

    /// Amplitudes at `position`, zero if unoccupied.
    pub fn get(&self, position: i64) -> CoinAmps {
        self.amps.get(&position).copied().unwrap_or(CoinAmps::ZERO)
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.amps.keys().copied()
    }

    /// `sum_x |a|^2 + |b|^2`.
    pub fn norm(&self) -> f64 {
        self.amps.values().map(CoinAmps::probability).sum()
    }

    pub fn distribution(&self) -> Distribution {
        self.amps
            .iter()
            .map(|(&x, c)| (x, c.probability()))
            .collect()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.amps.values().all(|c| c.is_real(tol))
    }

    /// Reflects positions `x -> -x`, leaving coin labels untouched.
    pub fn mirror(&self) -> Self {
        WalkerState {
            step: self.step,
            amps: self.amps.iter().map(|(&x, &c)| (-x, c)).collect(),
        }
    }

    /// Multiplies every amplitude by `k`. The result is generally not
    /// normalized; intended for fixtures and partial states.
    pub fn scaled(&self, k: f64) -> Self {
        WalkerState {
            step: self.step,
            amps: self.amps.iter().map(|(&x, c)| (x, c.scale(k))).collect(),
        }
    }

    /// Restriction to the listed positions (unnormalized).
    pub fn restrict(&self, positions: &[i64]) -> Self {
        WalkerState {
            step: self.step,
            amps: positions
                .iter()
                .filter_map(|x| self.amps.get(x).map(|c| (*x, *c)))
                .collect(),
        }
    }

    /// Largest amplitude-wise difference against another state.
    pub fn max_amp_diff(&self, other: &WalkerState) -> f64 {
        self.positions()
            .chain(other.positions())
            .map(|x| {
                let (p, q) = (self.get(x), other.get(x));
                (p.a - q.a).norm().max((p.b - q.b).norm())
            })
            .fold(0.0, f64::max)
    }
}

/// A real orthogonal 2x2 coin.
pub trait Coin {
    fn matrix(&self) -> [[f64; 2]; 2];

    fn apply(&self, c: CoinAmps) -> CoinAmps {
        let m = self.matrix();
        CoinAmps {
            a: c.a * m[0][0] + c.b * m[0][1],
            b: c.a * m[1][0] + c.b * m[1][1],
        }
    }
}

/// The angle-parametrized coin `[[cos, sin], [sin, -cos]]`, angle in `[0, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinOp {
    theta: f64,
}

impl CoinOp {
    pub const HADAMARD: CoinOp = CoinOp { theta: FRAC_PI_4 };
    pub const NOT: CoinOp = CoinOp { theta: FRAC_PI_2 };

    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(-INPUT_TOL..=PI + INPUT_TOL).contains(&theta) {
            return Err(Error::InvalidAngle { theta });
        }
        Ok(CoinOp {
            theta: theta.clamp(0.0, PI),
        })
    }

    /// Angle from a `(cos, sin)` pair. The pair is not required to be unit
    /// length; only its direction is used. `sin` slightly below zero from
    /// rounding is folded back onto `[0, pi]`.
    pub fn from_cos_sin(cos: f64, sin: f64) -> Self {
        CoinOp {
            theta: sin.max(0.0).atan2(cos),
        }
    }

    /// Clamps `theta` into `[0, pi]`.
    pub fn clamped(theta: f64) -> Self {
        CoinOp {
            theta: theta.clamp(0.0, PI),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cos(&self) -> f64 {
        self.theta.cos()
    }

    pub fn sin(&self) -> f64 {
        self.theta.sin()
    }
}

impl Coin for CoinOp {
    fn matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        [[c, s], [s, -c]]
    }
}

/// Any real orthogonal 2x2 matrix; used for the disentangling layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralCoinOp {
    m: [[f64; 2]; 2],
}

impl GeneralCoinOp {
    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let deviation = orthogonality_defect(&m);
        if !deviation.is_finite() || deviation > INPUT_TOL {
            return Err(Error::NotOrthogonal { deviation });
        }
        Ok(GeneralCoinOp { m })
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        GeneralCoinOp {
            m: [[m[0][0], m[1][0]], [m[0][1], m[1][1]]],
        }
    }
}

impl Coin for GeneralCoinOp {
    fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }
}

impl From<CoinOp> for GeneralCoinOp {
    fn from(c: CoinOp) -> Self {
        GeneralCoinOp { m: c.matrix() }
    }
}

/// Max entry of `|M^T M - I|`.
pub fn orthogonality_defect(m: &[[f64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let dot = m[0][i] * m[0][j] + m[1][i] * m[1][j];
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

pub fn determinant(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Coins for one step, keyed by position.
pub type CoinLayer = BTreeMap<i64, CoinOp>;
/// Coin-only layer applied after the last step.
pub type FinalLayer = BTreeMap<i64, GeneralCoinOp>;

/// A full assignment of coins to every `(step, position)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinProgram {
    layers: Vec<CoinLayer>,
    initial: WalkerState,
    final_layer: Option<FinalLayer>,
}

impl CoinProgram {
    /// Builds a program from per-step layers. Layer `t` must assign a coin
    /// to exactly the positions reachable at step `t`.
    pub fn new(
        layers: Vec<CoinLayer>,
        initial: WalkerState,
        final_layer: Option<FinalLayer>,
    ) -> Result<Self> {
        if initial.step() != 0 {
            return Err(Error::Domain(format!(
                "initial state must be at step 0, got {}",
                initial.step()
            )));
        }
        for (t, layer) in layers.iter().enumerate() {
            check_layer_cover(t, layer.keys().copied())?;
        }
        if let Some(fl) = &final_layer {
            check_layer_cover(layers.len(), fl.keys().copied())?;
        }
        Ok(CoinProgram {
            layers,
            initial,
            final_layer,
        })
    }

    /// Program whose coin at `(t, x)` is `coin(t, x)`.
    pub fn from_fn(
        steps: usize,
        initial: WalkerState,
        mut coin: impl FnMut(usize, i64) -> CoinOp,
    ) -> Result<Self> {
        let layers = (0..steps)
            .map(|t| support(t).map(|x| (x, coin(t, x))).collect())
            .collect();
        CoinProgram::new(layers, initial, None)
    }

    pub fn steps(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[CoinLayer] {
        &self.layers
    }

    pub fn layer(&self, step: usize) -> Option<&CoinLayer> {
        self.layers.get(step)
    }

    pub fn cell(&self, step: usize, position: i64) -> Option<CoinOp> {
        self.layers.get(step)?.get(&position).copied()
    }

    /// All stepped cells as `(t, x, coin)`, ordered by step then position.
    pub fn cells(&self) -> impl Iterator<Item = (usize, i64, CoinOp)> + '_ {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(t, l)| l.iter().map(move |(&x, &c)| (t, x, c)))
    }

    pub fn initial(&self) -> &WalkerState {
        &self.initial
    }

    pub fn final_layer(&self) -> Option<&FinalLayer> {
        self.final_layer.as_ref()
    }

    pub fn with_final_layer(self, layer: FinalLayer) -> Result<Self> {
        CoinProgram::new(self.layers, self.initial, Some(layer))
    }

    pub fn without_final_layer(mut self) -> Self {
        self.final_layer = None;
        self
    }

    /// Same program with every stepped coin replaced by `f(t, x, coin)`.
    pub fn map_cells(&self, mut f: impl FnMut(usize, i64, CoinOp) -> CoinOp) -> Self {
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(t, l)| l.iter().map(|(&x, &c)| (x, f(t, x, c))).collect())
            .collect();
        CoinProgram {
            layers,
            initial: self.initial.clone(),
            final_layer: self.final_layer.clone(),
        }
    }

    /// Reflects every cell `x -> -x`. Running the mirrored program with this
    /// crate's shift convention equals running the original with the
    /// opposite convention, reflected.
    pub fn mirror(&self) -> Self {
        CoinProgram {
            layers: self
                .layers
                .iter()
                .map(|l| l.iter().map(|(&x, &c)| (-x, c)).collect())
                .collect(),
            initial: self.initial.mirror(),
            final_layer: self
                .final_layer
                .as_ref()
                .map(|l| l.iter().map(|(&x, &c)| (-x, c)).collect()),
        }
    }
}

fn check_layer_cover(step: usize, positions: impl Iterator<Item = i64>) -> Result<()> {
    let mut expected = support(step);
    for x in positions {
        if !reachable(step, x) {
            return Err(Error::OutsideSupport { step, position: x });
        }
        // Both sides ascend; any gap means a missing coin.
        match expected.next() {
            Some(want) if want != x => {
                return Err(Error::IncompleteLayer {
                    step,
                    position: want,
                })
            }
            _ => {}
        }
    }
    if let Some(want) = expected.next() {
        return Err(Error::IncompleteLayer {
            step,
            position: want,
        });
    }
    Ok(())
}

/// Target probabilities `P(x, t)` for `t = 0..=steps`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionSchedule {
    rows: Vec<Distribution>,
}

impl DistributionSchedule {
    /// Row `t` must be nonnegative and sum to one within [`INPUT_TOL`].
    /// Explicit zeros off the reachable support are dropped; any mass there
    /// can never be realized and is reported as infeasible.
    pub fn new(mut rows: Vec<Distribution>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Domain("schedule has no rows".into()));
        }
        for (t, row) in rows.iter_mut().enumerate() {
            if let Some((x, p)) = row.iter().find(|&(x, p)| !reachable(t, x) && p != 0.0) {
                return Err(Error::Infeasible {
                    step: t,
                    position: x,
                    value: p,
                });
            }
            row.0.retain(|&x, _| reachable(t, x));
            row.validate(INPUT_TOL)?;
        }
        Ok(DistributionSchedule { rows })
    }

    pub fn from_fn(steps: usize, mut p: impl FnMut(usize, i64) -> f64) -> Result<Self> {
        let rows = (0..=steps)
            .map(|t| support(t).map(|x| (x, p(t, x))).collect())
            .collect();
        DistributionSchedule::new(rows)
    }

    /// Number of steps, i.e. rows minus one.
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, step: usize) -> &Distribution {
        &self.rows[step]
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }
}
