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

//! Shared test helpers: a dense-array walk written from scratch, with no
//! dependence on the library's state types.

#![allow(dead_code)]

use num_complex::Complex64;

/// Coin amplitudes `(a, b)` on positions `-n..=n`, index `x + n`.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl Dense {
    pub fn origin(n: usize, a0: Complex64, b0: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut d = Dense {
            n,
            a: vec![zero; 2 * n + 1],
            b: vec![zero; 2 * n + 1],
        };
        d.a[n] = a0;
        d.b[n] = b0;
        d
    }

    pub fn idx(&self, x: i64) -> usize {
        (x + self.n as i64) as usize
    }

    /// One step: coin `[[cos, sin], [sin, -cos]]` at every position, then
    /// `a` moves right and `b` moves left.
    pub fn step(&self, theta: impl Fn(i64) -> f64) -> Self {
        self.step_directed(theta, true)
    }

    /// As [`Dense::step`]; with `a_right = false` the `a` component moves
    /// left and `b` right instead.
    pub fn step_directed(&self, theta: impl Fn(i64) -> f64, a_right: bool) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let len = self.a.len();
        let mut out = Dense {
            n: self.n,
            a: vec![zero; len],
            b: vec![zero; len],
        };
        for i in 0..len {
            let (a, b) = (self.a[i], self.b[i]);
            if a == zero && b == zero {
                continue;
            }
            let x = i as i64 - self.n as i64;
            let (s, c) = theta(x).sin_cos();
            let na = a * c + b * s;
            let nb = a * s - b * c;
            let (ia, ib) = if a_right {
                (i + 1, i - 1)
            } else {
                (i - 1, i + 1)
            };
            out.a[ia] += na;
            out.b[ib] += nb;
        }
        out
    }

    pub fn probability(&self, x: i64) -> f64 {
        if x.unsigned_abs() as usize > self.n {
            return 0.0;
        }
        let i = self.idx(x);
        self.a[i].norm_sqr() + self.b[i].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|c| c.norm_sqr()).sum()
    }
}

/// Runs `steps` steps with per-cell angles `theta(t, x)` on a grid wide
/// enough for every step.
pub fn dense_walk(
    steps: usize,
    a0: Complex64,
    b0: Complex64,
    theta: impl Fn(usize, i64) -> f64,
) -> Vec<Dense> {
    let mut rows = vec![Dense::origin(steps + 1, a0, b0)];
    for t in 0..steps {
        let next = rows[t].step(|x| theta(t, x));
        rows.push(next);
    }
    rows
}

/// `n choose k / 2^n` by exact integer arithmetic for `n <= 60`.
pub fn binomial(n: u64, k: u64) -> f64 {
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64 / 2f64.powi(n as i32)
}

pub fn circular() -> (Complex64, Complex64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (Complex64::new(h, 0.0), Complex64::new(0.0, h))
}
