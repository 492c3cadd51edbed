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

//! Coin synthesis: from a target distribution schedule to a coin program.
//!
//! The pipeline has two stages. [`plan_amplitudes`] turns the per-step
//! probabilities into real amplitude pairs `(a, b)` per cell. The shift
//! sends `a(x, t)` to `x + 1` and `b(x, t)` to `x - 1`, and a coin only mixes
//! the two components of one cell, so each cell's probability must split
//! exactly into the `a` of its right child and the `b` of its left child.
//! Sweeping from the left edge forces every square uniquely.
//!
//! [`synthesize_coins`] then inverts the one-step recursion cell by cell:
//!
//! ```text
//! cos = (a a' - b b'') / (a^2 + b^2)
//! sin = (b a' + a b'') / (a^2 + b^2)
//! ```
//!
//! with `a' = a(x+1, t+1)` and `b'' = b(x-1, t+1)`. Given flux
//! conservation, `cos^2 + sin^2 = 1` holds identically.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{
    support, CoinLayer, CoinOp, CoinProgram, Distribution, DistributionSchedule, FinalLayer,
    GeneralCoinOp, WalkerState, INPUT_TOL,
};
use crate::walk;

/// Solved squares may dip below zero by rounding up to this much.
const NEGATIVE_SLACK: f64 = 1e-12;
/// Right-edge closure tolerance.
const CLOSURE_TOL: f64 = 1e-9;
/// Runtime guard on the synthesized `cos^2 + sin^2`.
const PYTHAGOREAN_GUARD: f64 = 1e-6;
/// Probability below which a cell counts as empty.
const EMPTY_CELL: f64 = 1e-30;
/// Outgoing flux that an empty cell may still carry from rounding.
const EMPTY_FLUX: f64 = 1e-12;
/// Unitarity tolerance for trusting a closed-form coin.
const CLOSED_FORM_TOL: f64 = 1e-9;

/// Real amplitude pair per `(step, position)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudePlan {
    rows: Vec<BTreeMap<i64, (f64, f64)>>,
}

impl AmplitudePlan {
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    /// `(a, b)` at a cell, zero outside the support.
    pub fn get(&self, step: usize, position: i64) -> (f64, f64) {
        self.rows
            .get(step)
            .and_then(|r| r.get(&position))
            .copied()
            .unwrap_or((0.0, 0.0))
    }

    pub fn row(&self, step: usize) -> &BTreeMap<i64, (f64, f64)> {
        &self.rows[step]
    }

    /// `a^2 + b^2` per position at `step`.
    pub fn distribution(&self, step: usize) -> Distribution {
        self.rows[step]
            .iter()
            .map(|(&x, &(a, b))| (x, a * a + b * b))
            .collect()
    }

    /// Largest per-cell flux imbalance `|a'^2 + b''^2 - (a^2 + b^2)|`.
    pub fn flux_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for t in 0..self.steps() {
            for (&x, &(a, b)) in &self.rows[t] {
                let ap = self.get(t + 1, x + 1).0;
                let bpp = self.get(t + 1, x - 1).1;
                worst = worst.max((ap * ap + bpp * bpp - a * a - b * b).abs());
            }
        }
        worst
    }
}

/// Amplitude plan for a walk starting in `|0>|0>`.
pub fn plan_amplitudes(sched: &DistributionSchedule) -> Result<AmplitudePlan> {
    plan_amplitudes_with_initial(sched, 1.0, 0.0)
}

/// Amplitude plan for a walk starting in `(a0 |0> + b0 |1>)|0>` with
/// nonnegative real `a0`, `b0`.
///
/// Every square is solved by a left-to-right sweep over step `t + 1`:
/// `b^2` at the left edge is the whole edge probability, then alternately
/// `a^2(x+1) = P(x, t) - b^2(x-1)` and `b^2(x+1) = P(x+1, t+1) - a^2(x+1)`,
/// where `P(x, t)` is the planned total of the previous row. Each cell's
/// left flux is clamped to its total and its right flux is the remainder,
/// so every cell conserves probability exactly; fluxes at rounding level
/// are moved to the other side. Amplitudes are the nonnegative roots.
pub fn plan_amplitudes_with_initial(
    sched: &DistributionSchedule,
    a0: f64,
    b0: f64,
) -> Result<AmplitudePlan> {
    if !(a0 >= 0.0 && b0 >= 0.0) {
        return Err(Error::Domain(
            "initial coin amplitudes must be real and nonnegative".into(),
        ));
    }
    let norm = a0 * a0 + b0 * b0;
    if (norm - 1.0).abs() > INPUT_TOL {
        return Err(Error::NotNormalized { norm });
    }

    let mut rows = Vec::with_capacity(sched.steps() + 1);
    rows.push([(0, (a0, b0))].into_iter().collect::<BTreeMap<_, _>>());
    // Cell totals the walk will actually carry. Each cell splits its own
    // total, so in- and out-flux agree to rounding at every cell.
    let mut current: BTreeMap<i64, f64> = [(0, a0 * a0 + b0 * b0)].into_iter().collect();

    for t in 0..sched.steps() {
        let next = sched.row(t + 1);
        let edge = t as i64 + 1;
        // Fluxes this small are rounding residue of the subtractions.
        let residue = 16.0 * (t as f64 + 2.0) * f64::EPSILON;
        let mut a_sq: BTreeMap<i64, f64> = BTreeMap::new();
        let mut b_sq: BTreeMap<i64, f64> = BTreeMap::new();
        a_sq.insert(-edge, 0.0);
        b_sq.insert(edge, 0.0);

        for x in support(t) {
            let n2 = current[&x];
            // The left flux of cell x completes position x - 1.
            let left = next.get(x - 1) - a_sq[&(x - 1)];
            if left < -NEGATIVE_SLACK || !left.is_finite() {
                return Err(Error::Infeasible {
                    step: t + 1,
                    position: x - 1,
                    value: left,
                });
            }
            if n2 - left < -NEGATIVE_SLACK {
                return Err(Error::Infeasible {
                    step: t + 1,
                    position: x + 1,
                    value: n2 - left,
                });
            }
            let (left, right) = split_cell(n2, left.clamp(0.0, n2), residue);
            b_sq.insert(x - 1, left);
            a_sq.insert(x + 1, right);
        }

        let got = a_sq[&edge];
        let expected = next.get(edge);
        if (got - expected).abs() > CLOSURE_TOL {
            return Err(Error::ClosureMismatch {
                step: t + 1,
                expected,
                got,
            });
        }

        current = support(t + 1).map(|y| (y, a_sq[&y] + b_sq[&y])).collect();
        rows.push(
            support(t + 1)
                .map(|y| (y, (a_sq[&y].sqrt(), b_sq[&y].sqrt())))
                .collect(),
        );
    }
    Ok(AmplitudePlan { rows })
}

/// Splits a cell total into `(left, right)` fluxes, sending residue-sized
/// parts to the other side so empty directions are exactly empty.
fn split_cell(total: f64, left: f64, residue: f64) -> (f64, f64) {
    if left <= residue {
        return (0.0, total);
    }
    let right = total - left;
    if right <= residue {
        (total, 0.0)
    } else {
        (left, right)
    }
}

/// Raw output of the inverse recursion at one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthCell {
    pub step: usize,
    pub position: i64,
    pub cos: f64,
    pub sin: f64,
}

impl SynthCell {
    pub fn pythagorean_defect(&self) -> f64 {
        (self.cos * self.cos + self.sin * self.sin - 1.0).abs()
    }
}

/// Inverts the one-step recursion at every cell of the plan.
///
/// Empty cells (zero probability, zero outgoing flux) get `theta = pi/4`;
/// the coin acts on a zero amplitude so any choice is unobservable.
pub fn synthesize_cells(plan: &AmplitudePlan) -> Result<Vec<SynthCell>> {
    let mut cells = Vec::new();
    for t in 0..plan.steps() {
        for x in support(t) {
            let (a, b) = plan.get(t, x);
            let ap = plan.get(t + 1, x + 1).0;
            let bpp = plan.get(t + 1, x - 1).1;
            let n2 = a * a + b * b;
            let (cos, sin) = if n2 <= EMPTY_CELL {
                if ap * ap + bpp * bpp > EMPTY_FLUX {
                    return Err(Error::ZeroProbabilityCell {
                        step: t,
                        position: x,
                    });
                }
                (FRAC_PI_4.cos(), FRAC_PI_4.sin())
            } else {
                ((a * ap - b * bpp) / n2, (b * ap + a * bpp) / n2)
            };
            let cell = SynthCell {
                step: t,
                position: x,
                cos,
                sin,
            };
            let deviation = cell.pythagorean_defect();
            if deviation > PYTHAGOREAN_GUARD {
                return Err(Error::InconsistentPlan {
                    step: t,
                    position: x,
                    deviation,
                });
            }
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Coin program whose forward run reproduces the plan's amplitudes.
pub fn synthesize_coins(plan: &AmplitudePlan) -> Result<CoinProgram> {
    let (a0, b0) = plan.get(0, 0);
    let initial = WalkerState::localized(Complex64::new(a0, 0.0), Complex64::new(b0, 0.0))?;
    let mut layers = vec![CoinLayer::new(); plan.steps()];
    for cell in synthesize_cells(plan)? {
        if cell.sin < -CLOSED_FORM_TOL {
            return Err(Error::Domain(format!(
                "cell ({}, {}) needs a coin angle outside [0, pi]",
                cell.step, cell.position
            )));
        }
        layers[cell.step].insert(cell.position, CoinOp::from_cos_sin(cell.cos, cell.sin));
    }
    CoinProgram::new(layers, initial, None)
}

/// Plan and synthesize in one go, starting from `|0>|0>`.
pub fn synthesize_schedule(sched: &DistributionSchedule) -> Result<CoinProgram> {
    synthesize_coins(&plan_amplitudes(sched)?)
}

/// Binomial rows `P(x, t) = C(t, (t+x)/2) / 2^t`.
pub fn binomial_schedule(steps: usize) -> DistributionSchedule {
    DistributionSchedule::from_fn(steps, binomial_probability)
        .expect("binomial rows are normalized")
}

pub fn binomial_probability(t: usize, x: i64) -> f64 {
    let k = ((t as i64 + x) / 2) as usize;
    // Pascal row in floating point; exact for the step counts in use.
    let mut c = 1.0_f64;
    for i in 0..k {
        c = c * (t - i) as f64 / (i + 1) as f64;
    }
    c / 2f64.powi(t as i32)
}

/// Uniform rows `P(x, t) = 1 / (t + 1)`.
pub fn uniform_schedule(steps: usize) -> DistributionSchedule {
    DistributionSchedule::from_fn(steps, |t, _| 1.0 / (t as f64 + 1.0))
        .expect("uniform rows are normalized")
}

/// Closed-form Gaussian coin `(cos, sin)` for `t >= 1`.
pub fn gaussian_closed_form(t: usize, x: i64) -> (f64, f64) {
    let r = x as f64 / t as f64;
    let (p, m) = ((1.0 + r).sqrt(), (1.0 - r).sqrt());
    (0.5 * (p - m), 0.5 * (p + m))
}

/// Closed-form uniform coin `(cos, sin)` for `t >= 1`, as commonly printed.
///
/// The sine has `|cos|^2 + |sin|^2 = 1 + x^2 / (t (t+2))`, so it is only a
/// valid coin at `x = 0`. The cosine is correct everywhere.
pub fn uniform_closed_form(t: usize, x: i64) -> (f64, f64) {
    let (t, x) = (t as f64, x as f64);
    let d = t * (t + 2.0);
    let p = 0.5 * ((t + x) * (t + x + 2.0) / d).sqrt();
    let m = 0.5 * ((t - x) * (t - x + 2.0) / d).sqrt();
    (p - m, p + m)
}

/// Unitary variant of [`uniform_closed_form`]: same cosine, with the sine
/// taken from `(t+x)(t-x+2)` and `(t-x)(t+x+2)`.
pub fn uniform_closed_form_unitary(t: usize, x: i64) -> (f64, f64) {
    let (tf, xf) = (t as f64, x as f64);
    let d = tf * (tf + 2.0);
    let sin = 0.5 * ((tf + xf) * (tf - xf + 2.0) / d).sqrt()
        + 0.5 * ((tf - xf) * (tf + xf + 2.0) / d).sqrt();
    (uniform_closed_form(t, x).0, sin)
}

/// Builds a program from a closed form, falling back to the synthesized
/// coin wherever the closed form is not unitary. Adds the disentangling
/// layer.
fn closed_form_program(
    steps: usize,
    sched: &DistributionSchedule,
    closed: impl Fn(usize, i64) -> (f64, f64),
) -> CoinProgram {
    let plan = plan_amplitudes(sched).expect("built-in schedules are feasible");
    let synthesized: BTreeMap<(usize, i64), SynthCell> = synthesize_cells(&plan)
        .expect("built-in plans are consistent")
        .into_iter()
        .map(|c| ((c.step, c.position), c))
        .collect();
    let initial = WalkerState::localized(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        .expect("basis state");
    let program = CoinProgram::from_fn(steps, initial, |t, x| {
        if t == 0 {
            return CoinOp::HADAMARD;
        }
        let (c, s) = closed(t, x);
        if (c * c + s * s - 1.0).abs() <= CLOSED_FORM_TOL {
            CoinOp::from_cos_sin(c, s)
        } else {
            let cell = synthesized[&(t, x)];
            CoinOp::from_cos_sin(cell.cos, cell.sin)
        }
    })
    .expect("complete by construction");
    with_disentangling(program).expect("built-in states are real with no empty cells")
}

/// Coherent Gaussian (binomial) walk with a final disentangling layer.
pub fn gaussian_program(steps: usize) -> Result<CoinProgram> {
    if steps == 0 {
        return Err(Error::Domain(
            "gaussian program needs at least one step".into(),
        ));
    }
    Ok(closed_form_program(
        steps,
        &binomial_schedule(steps),
        gaussian_closed_form,
    ))
}

/// Coherent uniform walk with a final disentangling layer.
pub fn uniform_program(steps: usize) -> Result<CoinProgram> {
    if steps == 0 {
        return Err(Error::Domain(
            "uniform program needs at least one step".into(),
        ));
    }
    Ok(closed_form_program(
        steps,
        &uniform_schedule(steps),
        uniform_closed_form,
    ))
}

/// Layer of coins `(1/N) [[a, b], [b, -a]]` rotating every local coin state
/// to `|0>` with amplitude `N = sqrt(a^2 + b^2)`.
pub fn disentangle_layer(s: &WalkerState) -> Result<FinalLayer> {
    s.amplitudes()
        .iter()
        .map(|(&x, c)| {
            if !c.is_real(INPUT_TOL) {
                return Err(Error::UnsupportedState { position: x });
            }
            let (a, b) = (c.a.re, c.b.re);
            let n = a.hypot(b);
            if n <= 1e-12 {
                return Err(Error::DegenerateCell { position: x });
            }
            Ok((x, GeneralCoinOp::new([[a / n, b / n], [b / n, -a / n]])?))
        })
        .collect()
}

/// Runs `p` and attaches the disentangling layer for its final state.
pub fn with_disentangling(p: CoinProgram) -> Result<CoinProgram> {
    let end = walk::final_state(&p.clone().without_final_layer())?;
    let layer = disentangle_layer(&end)?;
    p.with_final_layer(layer)
}

/// The three named walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Homogeneous Hadamard walk from the circular input `(|0> + i|1>)/sqrt2`.
    Hadamard,
    Gaussian,
    Uniform,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Hadamard, Builtin::Gaussian, Builtin::Uniform];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Hadamard => "hadamard",
            Builtin::Gaussian => "gaussian",
            Builtin::Uniform => "uniform",
        }
    }

    pub fn parse(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn program(&self, steps: usize) -> Result<CoinProgram> {
        match self {
            Builtin::Hadamard => walk::hadamard_program(steps, circular_input()),
            Builtin::Gaussian => gaussian_program(steps),
            Builtin::Uniform => uniform_program(steps),
        }
    }

    /// Ideal position distribution after `t` steps.
    pub fn theory(&self, t: usize) -> Result<Distribution> {
        Ok(match self {
            Builtin::Hadamard => {
                if t == 0 {
                    circular_input().distribution()
                } else {
                    walk::final_state(&self.program(t)?)?.distribution()
                }
            }
            Builtin::Gaussian => binomial_schedule(t).row(t).clone(),
            Builtin::Uniform => uniform_schedule(t).row(t).clone(),
        })
    }
}

/// `(|0> + i|1>) / sqrt2` at the origin.
pub fn circular_input() -> WalkerState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    WalkerState::localized(Complex64::new(h, 0.0), Complex64::new(0.0, h)).expect("normalized")
}
