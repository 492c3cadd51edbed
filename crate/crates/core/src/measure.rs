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

//! Analysis of walk outputs: similarity, Shannon entropy, neighbouring-pair
//! coherence and random-bit extraction.

use std::collections::BTreeMap;

use num_complex::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::state::{
    reachable, support, CoinLayer, CoinOp, Distribution, WalkerState, ENGINE_TOL, INPUT_TOL,
};
use crate::walk;

/// Bhattacharyya overlap `sum_x sqrt(p(x) q(x))` over the union support.
pub fn similarity(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.validate(INPUT_TOL)?;
    q.validate(INPUT_TOL)?;
    let f: f64 = p
        .iter()
        .map(|(x, px)| (px.max(0.0) * q.get(x).max(0.0)).sqrt())
        .sum();
    Ok(f.min(1.0))
}

/// `-sum p log2 p` in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &Distribution) -> f64 {
    p.iter()
        .filter(|&(_, q)| q > 0.0)
        .map(|(_, q)| -q * q.log2())
        .sum()
}

/// Walker amplitudes `c_x` of a state whose coin is factored to `|0>`.
pub fn walker_amplitudes(s: &WalkerState) -> Result<BTreeMap<i64, Complex64>> {
    s.amplitudes()
        .iter()
        .map(|(&x, c)| {
            if c.b.norm() > INPUT_TOL {
                Err(Error::MustDisentangle { position: x })
            } else {
                Ok((x, c.a))
            }
        })
        .collect()
}

/// Density matrix on the two-path basis `{|x>, |x+2>}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDensity {
    pub x: i64,
    pub rho: [[Complex64; 2]; 2],
}

impl PairDensity {
    /// `rho = |psi><psi|` with `psi = c_x |x> + c_{x+2} |x+2>`.
    pub fn pure(x: i64, cx: Complex64, cx2: Complex64) -> Self {
        PairDensity {
            x,
            rho: [
                [cx * cx.conj(), cx * cx2.conj()],
                [cx2 * cx.conj(), cx2 * cx2.conj()],
            ],
        }
    }

    /// Weighted mixture of pure pair states. Weights need not sum to one.
    pub fn mixture(x: i64, members: &[(f64, Complex64, Complex64)]) -> Self {
        let mut out = PairDensity {
            x,
            rho: [[Complex64::new(0.0, 0.0); 2]; 2],
        };
        for &(w, a, b) in members {
            out.accumulate(&PairDensity::pure(x, a, b), w);
        }
        out
    }

    fn accumulate(&mut self, other: &PairDensity, weight: f64) {
        for (row, orow) in self.rho.iter_mut().zip(&other.rho) {
            for (v, o) in row.iter_mut().zip(orow) {
                *v += o * weight;
            }
        }
    }

    /// `|rho_{x,x+2}|^2`.
    pub fn coherence(&self) -> f64 {
        self.rho[0][1].norm_sqr()
    }

    /// `|rho_{x,x}| |rho_{x+2,x+2}|`.
    pub fn population_product(&self) -> f64 {
        self.rho[0][0].norm() * self.rho[1][1].norm()
    }

    /// Multiplies the off-diagonal elements by `retention`.
    pub fn dephased(&self, retention: f64) -> Self {
        let mut rho = self.rho;
        rho[0][1] *= retention;
        rho[1][0] *= retention;
        PairDensity { x: self.x, rho }
    }

    /// Conjugate symmetry and positive semidefiniteness within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let r = &self.rho;
        let hermitian = (r[0][1] - r[1][0].conj()).norm() <= tol
            && r[0][0].im.abs() <= tol
            && r[1][1].im.abs() <= tol;
        let det = r[0][0].re * r[1][1].re - r[0][1].norm_sqr();
        hermitian && r[0][0].re >= -tol && r[1][1].re >= -tol && det >= -tol
    }

    pub fn max_abs_diff(&self, other: &PairDensity) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        worst
    }
}

fn check_pair(step: usize, x: i64) -> Result<()> {
    if !reachable(step, x) || !reachable(step, x + 2) {
        return Err(Error::Domain(format!(
            "pair ({x}, {}) is not inside the step-{step} support",
            x + 2
        )));
    }
    Ok(())
}

/// Pair density read directly from the walker amplitudes of a
/// disentangled state.
pub fn pair_density(s: &WalkerState, x: i64) -> Result<PairDensity> {
    check_pair(s.step(), x)?;
    let amps = walker_amplitudes(s)?;
    let at = |y| amps.get(&y).copied().unwrap_or_default();
    Ok(PairDensity::pure(x, at(x), at(x + 2)))
}

/// Pair density of a weighted ensemble of disentangled states.
pub fn pair_density_ensemble(members: &[(f64, WalkerState)], x: i64) -> Result<PairDensity> {
    let mut out = PairDensity {
        x,
        rho: [[Complex64::new(0.0, 0.0); 2]; 2],
    };
    for (w, s) in members {
        out.accumulate(&pair_density(s, x)?, *w);
    }
    Ok(out)
}

/// Outcome probabilities of the four polarization projections
/// `H`, `V`, `(H+V)/sqrt2`, `(H-iV)/sqrt2` on a polarization density.
pub fn tomography_probabilities(rho: &[[Complex64; 2]; 2]) -> [f64; 4] {
    let (hh, vv, hv) = (rho[0][0].re, rho[1][1].re, rho[0][1]);
    let half = 0.5 * (hh + vv);
    [hh, vv, half + hv.re, half + hv.im]
}

/// Linear inversion of [`tomography_probabilities`].
pub fn reconstruct_from_tomography(probs: [f64; 4]) -> [[Complex64; 2]; 2] {
    let [h, v, d, r] = probs;
    let half = 0.5 * (h + v);
    let hv = Complex64::new(d - half, r - half);
    [
        [Complex64::new(h, 0.0), hv],
        [hv.conj(), Complex64::new(v, 0.0)],
    ]
}

/// Merges the pulses at `x` and `x + 2` into one polarization qubit.
///
/// A NOT coin on `|H>|x+2>` turns it into `|V>|x+2>`; one shift then sends
/// `|H>|x>` right and `|V>|x+2>` left, both onto `x + 1`. Returns the
/// (unnormalized) merged polarization amplitudes `(H, V)`.
pub fn merge_pair(s: &WalkerState, x: i64) -> Result<(Complex64, Complex64)> {
    check_pair(s.step(), x)?;
    walker_amplitudes(s)?;
    let sub = s.restrict(&[x, x + 2]);
    let mut layer = CoinLayer::new();
    layer.insert(x, CoinOp::new(0.0).expect("identity-like coin"));
    layer.insert(x + 2, CoinOp::NOT);
    // θ = 0 is diag(1, -1); it only flips the sign of an absent |V> part.
    let merged = walk::step(&sub, &layer)?;
    let c = merged.get(x + 1);
    Ok((c.a, c.b))
}

/// Pair density obtained the way the optical setup measures it: merge the
/// two pulses, then polarization tomography in four bases.
pub fn pair_density_via_tomography(s: &WalkerState, x: i64) -> Result<PairDensity> {
    let (h, v) = merge_pair(s, x)?;
    let pol = PairDensity::pure(x, h, v);
    let probs = tomography_probabilities(&pol.rho);
    Ok(PairDensity {
        x,
        rho: reconstruct_from_tomography(probs),
    })
}

/// One row of a purity report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityRecord {
    pub x: i64,
    /// `|rho_{x,x+2}|^2`.
    pub lhs: f64,
    /// `|rho_{x,x}| |rho_{x+2,x+2}|`.
    pub rhs: f64,
    pub pass: bool,
}

impl PurityRecord {
    pub fn from_density(d: &PairDensity, tol: f64) -> Self {
        let (lhs, rhs) = (d.coherence(), d.population_product());
        PurityRecord {
            x: d.x,
            lhs,
            rhs,
            pass: lhs >= rhs - tol,
        }
    }
}

/// Purity check `|rho_{x,x+2}|^2 = |rho_xx| |rho_{x+2,x+2}|` for every
/// neighbouring pair of a disentangled state.
pub fn purity_criterion(s: &WalkerState) -> Result<Vec<PurityRecord>> {
    walker_amplitudes(s)?;
    let t = s.step();
    support(t)
        .take(t)
        .map(|x| pair_density(s, x).map(|d| PurityRecord::from_density(&d, INPUT_TOL)))
        .collect()
}

/// Same check over pre-computed pair densities with per-pair tolerances,
/// e.g. `max(1e-9, 3 sigma)` from finite counts.
pub fn purity_from_densities(densities: &[(PairDensity, f64)]) -> Vec<PurityRecord> {
    densities
        .iter()
        .map(|(d, tol)| PurityRecord::from_density(d, tol.max(INPUT_TOL)))
        .collect()
}

/// Whether every record has `lhs == rhs` within [`ENGINE_TOL`].
pub fn purity_is_exact(records: &[PurityRecord]) -> bool {
    records.iter().all(|r| (r.lhs - r.rhs).abs() <= ENGINE_TOL)
}

/// Output of [`extract_bits`].
#[derive(Clone, Debug, PartialEq)]
pub struct BitExtraction {
    /// Bits per accepted sample.
    pub width: u32,
    /// Concatenated fixed-width patterns, most significant bit first.
    pub bits: Vec<u8>,
    pub accepted: usize,
    pub rejected: usize,
}

impl BitExtraction {
    /// Accepted samples as integers in `0..2^width`.
    pub fn words(&self) -> Vec<u32> {
        if self.width == 0 {
            return vec![0; self.accepted];
        }
        self.bits
            .chunks(self.width as usize)
            .map(|c| c.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32))
            .collect()
    }

    pub fn patterns(&self) -> Vec<String> {
        self.bits
            .chunks(self.width.max(1) as usize)
            .map(|c| c.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect())
            .collect()
    }
}

/// Maps measured positions of a `t`-step walk to random bits.
///
/// Positions are indexed ascending from `-t`. With `t + 1` a power of two
/// each sample gives `log2(t + 1)` bits; otherwise samples with index at or
/// above the largest power of two are rejected.
pub fn extract_bits(samples: &[i64], t: usize) -> Result<BitExtraction> {
    let outcomes = t as u64 + 1;
    let width = 63 - outcomes.leading_zeros();
    let limit = 1u64 << width;
    let mut bits = Vec::with_capacity(samples.len() * width as usize);
    let mut rejected = 0;
    for &x in samples {
        if !reachable(t, x) {
            return Err(Error::Domain(format!(
                "sample {x} is not a position of a {t}-step walk"
            )));
        }
        let index = ((x + t as i64) / 2) as u64;
        if index >= limit {
            rejected += 1;
            continue;
        }
        bits.extend((0..width).rev().map(|k| ((index >> k) & 1) as u8));
    }
    Ok(BitExtraction {
        width,
        accepted: samples.len() - rejected,
        bits,
        rejected,
    })
}

/// Pearson chi-square test of equal frequencies. Returns `(statistic, p)`.
pub fn chi_square_uniformity(counts: &[u64]) -> Result<(f64, f64)> {
    let k = counts.len();
    let n: u64 = counts.iter().sum();
    if k < 2 || n == 0 {
        return Err(Error::Domain(
            "chi-square needs at least two bins and one count".into(),
        ));
    }
    let expected = n as f64 / k as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((k - 1) as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::CoinAmps;
    use crate::synth::uniform_program;
    use crate::walk::final_state;

    fn dist(pairs: &[(i64, f64)]) -> Distribution {
        pairs.iter().copied().collect()
    }

    #[test]
    fn similarity_examples() {
        let p = dist(&[(-1, 0.5), (1, 0.5)]);
        assert!((similarity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            similarity(&dist(&[(-1, 1.0)]), &dist(&[(1, 1.0)])).unwrap(),
            0.0
        );
        let f = similarity(&p, &dist(&[(-1, 1.0)])).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(similarity(&dist(&[(0, 0.5)]), &p).is_err());
    }

    #[test]
    fn entropy_examples() {
        let u: Distribution = (0..8).map(|i| (2 * i - 7, 0.125)).collect();
        assert_eq!(shannon_entropy(&u), 3.0);
        assert_eq!(shannon_entropy(&dist(&[(0, 1.0)])), 0.0);
        assert_eq!(shannon_entropy(&dist(&[(0, 1.0), (2, 0.0)])), 0.0);
    }

    #[test]
    fn pair_density_two_level() {
        let d = PairDensity::pure(
            0,
            Complex64::new(0.6f64.sqrt(), 0.0),
            Complex64::new(0.4f64.sqrt(), 0.0),
        );
        assert!((d.coherence() - 0.24).abs() < 1e-15);
        assert!((d.population_product() - 0.24).abs() < 1e-15);
        assert!(d.is_physical(1e-12));
    }

    #[test]
    fn dephased_mixture_has_no_coherence() {
        let a = Complex64::new(0.5f64.sqrt(), 0.0);
        let d = PairDensity::mixture(0, &[(0.5, a, a), (0.5, a, -a)]);
        assert!(d.coherence() < 1e-30);
        let r = PurityRecord::from_density(&d, 1e-9);
        assert!(!r.pass);
    }

    #[test]
    fn uniform_nine_step_pairs() {
        let s = final_state(&uniform_program(9).unwrap()).unwrap();
        let records = purity_criterion(&s).unwrap();
        assert_eq!(records.len(), 9);
        assert_eq!(records[0].x, -9);
        for r in &records {
            assert!((r.lhs - 0.01).abs() < 1e-12 && r.pass);
        }
        assert!(purity_is_exact(&records));
        let d = pair_density(&s, -3).unwrap();
        assert!((d.rho[0][0].re - 0.1).abs() < 1e-12 && (d.rho[1][1].re - 0.1).abs() < 1e-12);
        assert!(pair_density(&s, 9).is_err());
    }

    #[test]
    fn entangled_state_is_rejected() {
        let s = WalkerState::new(0, [(0, CoinAmps::real(0.6, 0.8))].into_iter().collect()).unwrap();
        assert!(matches!(
            purity_criterion(&s),
            Err(Error::MustDisentangle { position: 0 })
        ));
    }

    #[test]
    fn tomography_matches_direct() {
        let amps = [
            (
                -1,
                CoinAmps::new(Complex64::new(0.3, 0.4), Complex64::new(0.0, 0.0)),
            ),
            (
                1,
                CoinAmps::new(Complex64::new(-0.5, 0.1), Complex64::new(0.0, 0.0)),
            ),
        ];
        let mut s = WalkerState::from_parts(1, amps.into_iter().collect());
        let n = s.norm().sqrt();
        s = s.scaled(1.0 / n);
        let direct = pair_density(&s, -1).unwrap();
        let tomo = pair_density_via_tomography(&s, -1).unwrap();
        assert!(direct.max_abs_diff(&tomo) < 1e-12);
    }

    #[test]
    fn bits_for_seven_steps() {
        let b = extract_bits(&[-7, 7, 1], 7).unwrap();
        assert_eq!(b.patterns(), vec!["000", "111", "100"]);
        assert_eq!(b.rejected, 0);
        assert!(extract_bits(&[0], 7).is_err());
    }

    #[test]
    fn bits_reject_above_power_of_two() {
        // t = 5: six outcomes, indices 4 and 5 are rejected, 2 bits each.
        let b = extract_bits(&[-5, -3, -1, 1, 3, 5], 5).unwrap();
        assert_eq!(b.width, 2);
        assert_eq!(b.rejected, 2);
        assert_eq!(b.words(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn chi_square_on_flat_counts() {
        let (stat, p) = chi_square_uniformity(&[100; 8]).unwrap();
        assert_eq!(stat, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = chi_square_uniformity(&[200, 0, 0, 0]).unwrap();
        assert!(p < 1e-6);
    }
}
