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

//! Experiment emulation: loss budgets, finite-count sampling, coin-angle
//! jitter, dephasing and bootstrap error bars.
//!
//! Every random operation takes an explicit seed and owns its generator.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _, Normal};

use crate::error::{Error, Result};
use crate::measure::{shannon_entropy, similarity, PairDensity};
use crate::state::{CoinAmps, CoinOp, CoinProgram, Distribution, WalkerState};
use crate::walk;

/// Detected events per position.
pub type Counts = BTreeMap<i64, u64>;

/// Knobs of the emulated apparatus.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    /// Probability a photon survives one loop round trip.
    pub round_trip_survival: f64,
    /// Fraction of photons coupled out to the detector each round.
    pub outcoupling_fraction: f64,
    /// Standard deviation of the coin-angle error, radians.
    pub coin_angle_jitter_rad: f64,
    /// Off-diagonal retention per step, in `[0, 1]`.
    pub dephasing_gamma: f64,
    /// Amplitude-probability retention of every right move; 1 disables the
    /// path-asymmetric loss.
    pub right_move_retention: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            round_trip_survival: 0.43,
            outcoupling_fraction: 0.01,
            coin_angle_jitter_rad: 0.0,
            dephasing_gamma: 1.0,
            right_move_retention: 1.0,
            seed: DEFAULT_SEED,
        }
    }
}

pub const DEFAULT_SEED: u64 = 20210;

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("round_trip_survival", self.round_trip_survival)?;
        unit("outcoupling_fraction", self.outcoupling_fraction)?;
        unit("dephasing_gamma", self.dephasing_gamma)?;
        unit("right_move_retention", self.right_move_retention)?;
        if !(self.coin_angle_jitter_rad >= 0.0 && self.coin_angle_jitter_rad.is_finite()) {
            return Err(Error::Domain("coin_angle_jitter_rad must be >= 0".into()));
        }
        Ok(())
    }

    /// Events expected at step `t` out of `launched` photons:
    /// `launched * survival^t * outcoupling`.
    pub fn event_budget(&self, launched: f64, t: usize) -> f64 {
        launched * self.round_trip_survival.powi(t as i32) * self.outcoupling_fraction
    }

    /// Total off-diagonal retention after `steps` steps.
    pub fn coherence_retention(&self, steps: usize) -> f64 {
        self.dephasing_gamma.powi(steps as i32)
    }

    /// Pair density after `steps` steps of dephasing.
    pub fn dephase(&self, d: &PairDensity, steps: usize) -> PairDensity {
        d.dephased(self.coherence_retention(steps))
    }

    /// Config file of `key value` lines; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut nm = NoiseModel::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(key), Some(value), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::parse(i + 1, "expected `key value`"));
            };
            nm.set(key, value).map_err(|m| Error::parse(i + 1, m))?;
        }
        nm.validate()?;
        Ok(nm)
    }

    /// Sets one field by its config key.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| format!("bad value for {key}"))
        };
        match key {
            "round_trip_survival" => self.round_trip_survival = num()?,
            "outcoupling_fraction" => self.outcoupling_fraction = num()?,
            "coin_angle_jitter_rad" => self.coin_angle_jitter_rad = num()?,
            "dephasing_gamma" => self.dephasing_gamma = num()?,
            "right_move_retention" => self.right_move_retention = num()?,
            "seed" => self.seed = value.parse().map_err(|_| format!("bad value for {key}"))?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "round_trip_survival {}", self.round_trip_survival);
        let _ = writeln!(out, "outcoupling_fraction {}", self.outcoupling_fraction);
        let _ = writeln!(out, "coin_angle_jitter_rad {}", self.coin_angle_jitter_rad);
        let _ = writeln!(out, "dephasing_gamma {}", self.dephasing_gamma);
        let _ = writeln!(out, "right_move_retention {}", self.right_move_retention);
        let _ = writeln!(out, "seed {}", self.seed);
        out
    }
}

/// Position distribution at step `t` as the detector sees it.
///
/// With `right_move_retention = 1` this is the ideal distribution; flat
/// losses rescale the event total but not the shape. Otherwise every right
/// move damps the amplitude and the result is renormalized.
pub fn detected_distribution(p: &CoinProgram, nm: &NoiseModel, t: usize) -> Result<Distribution> {
    if t > p.steps() {
        return Err(Error::Domain(format!(
            "step {t} beyond program length {}",
            p.steps()
        )));
    }
    let damp = nm.right_move_retention.sqrt();
    let mut s = p.initial().clone();
    for layer in &p.layers()[..t] {
        s = walk::step(&s, layer)?;
        if damp != 1.0 {
            let amps = s
                .amplitudes()
                .iter()
                .map(|(&x, c)| (x, CoinAmps::new(c.a * damp, c.b)))
                .collect();
            s = WalkerState::from_parts(s.step(), amps);
        }
    }
    let d = s.distribution();
    let total = d.total();
    if total <= 0.0 {
        return Err(Error::Domain("no detectable probability left".into()));
    }
    Ok(d.iter().map(|(x, q)| (x, q / total)).collect())
}

/// Expected counts per position for `total_events` detections at step `t`.
pub fn expected_counts(
    p: &CoinProgram,
    nm: &NoiseModel,
    t: usize,
    total_events: u64,
) -> Result<BTreeMap<i64, f64>> {
    let d = detected_distribution(p, nm, t)?;
    Ok(d.iter()
        .map(|(x, q)| (x, q * total_events as f64))
        .collect())
}

/// Multinomial draw of `events` detections from `p`, seeded.
pub fn sample_counts(p: &Distribution, events: u64, seed: u64) -> Counts {
    sample_counts_with(p, events, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Multinomial draw via successive conditional binomials.
pub fn sample_counts_with<R: Rng + ?Sized>(p: &Distribution, events: u64, rng: &mut R) -> Counts {
    let mut counts = Counts::new();
    let mut left = events;
    let mut mass_left = 1.0_f64;
    let n = p.len();
    for (i, (x, q)) in p.iter().enumerate() {
        let q = q.max(0.0);
        let drawn = if i + 1 == n {
            left
        } else if left == 0 || q <= 0.0 {
            0
        } else {
            let frac = (q / mass_left).clamp(0.0, 1.0);
            Binomial::new(left, frac)
                .expect("probability in [0, 1]")
                .sample(rng)
        };
        counts.insert(x, drawn);
        left -= drawn;
        mass_left -= q;
    }
    counts
}

/// Normalized frequencies of a count table.
pub fn counts_to_distribution(counts: &Counts) -> Result<Distribution> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::Domain("count table is empty".into()));
    }
    Ok(counts
        .iter()
        .map(|(&x, &c)| (x, c as f64 / total as f64))
        .collect())
}

/// Bootstrap standard deviations of a measured distribution and of the
/// quantities derived from it.
#[derive(Clone, Debug, PartialEq)]
pub struct Bootstrap {
    pub sigma: BTreeMap<i64, f64>,
    /// Spread of the similarity against the reference (or the measured
    /// distribution itself when no reference is given).
    pub sigma_similarity: f64,
    pub sigma_entropy: f64,
    pub resamples: usize,
}

/// Multinomial bootstrap: `resamples` redraws of the same total from the
/// empirical frequencies.
pub fn bootstrap_errorbars(
    counts: &Counts,
    resamples: usize,
    seed: u64,
    reference: Option<&Distribution>,
) -> Result<Bootstrap> {
    if resamples < 100 {
        return Err(Error::Domain(
            "bootstrap needs at least 100 resamples".into(),
        ));
    }
    let total: u64 = counts.values().sum();
    let empirical = counts_to_distribution(counts)?;
    let reference = reference.unwrap_or(&empirical);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut moments: BTreeMap<i64, (f64, f64)> = counts.keys().map(|&x| (x, (0.0, 0.0))).collect();
    let mut f_moments = (0.0, 0.0);
    let mut r_moments = (0.0, 0.0);
    let add = |m: &mut (f64, f64), v: f64| {
        m.0 += v;
        m.1 += v * v;
    };
    for _ in 0..resamples {
        let redraw = sample_counts_with(&empirical, total, &mut rng);
        let d = counts_to_distribution(&redraw)?;
        for (x, m) in moments.iter_mut() {
            add(m, d.get(*x));
        }
        add(&mut f_moments, similarity(&d, reference)?);
        add(&mut r_moments, shannon_entropy(&d));
    }
    let sd = |m: (f64, f64)| {
        let n = resamples as f64;
        let mean = m.0 / n;
        ((m.1 / n - mean * mean).max(0.0) * n / (n - 1.0)).sqrt()
    };
    Ok(Bootstrap {
        sigma: moments.into_iter().map(|(x, m)| (x, sd(m))).collect(),
        sigma_similarity: sd(f_moments),
        sigma_entropy: sd(r_moments),
        resamples,
    })
}

/// Adds independent Gaussian errors of `coin_angle_jitter_rad` to every
/// stepped coin angle, clamped to `[0, pi]`.
pub fn perturb_program(p: &CoinProgram, nm: &NoiseModel) -> Result<CoinProgram> {
    nm.validate()?;
    if nm.coin_angle_jitter_rad == 0.0 {
        return Ok(p.clone());
    }
    let normal =
        Normal::new(0.0, nm.coin_angle_jitter_rad).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(nm.seed);
    Ok(p.map_cells(|_, _, c| CoinOp::clamped(c.theta() + normal.sample(&mut rng))))
}

/// One emulated measurement: jittered coins (seeded by `nm.seed`), then
/// `events` multinomial detections at the last step.
pub fn emulate_counts(p: &CoinProgram, nm: &NoiseModel, events: u64) -> Result<Counts> {
    emulate_counts_at(p, nm, p.steps(), events)
}

/// Like [`emulate_counts`], detecting after step `t` instead of the end.
pub fn emulate_counts_at(
    p: &CoinProgram,
    nm: &NoiseModel,
    t: usize,
    events: u64,
) -> Result<Counts> {
    let noisy = perturb_program(p, nm)?;
    let d = detected_distribution(&noisy, nm, t)?;
    Ok(sample_counts(&d, events, sampling_seed(nm.seed, t)))
}

fn sampling_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9).wrapping_add(1 + t as u64)
}

/// Finite-shot polarization tomography of one pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TomographyEstimate {
    /// Reconstruction from the first simulated run.
    pub density: PairDensity,
    pub sigma_coherence: f64,
    pub sigma_population_product: f64,
}

/// Emulates `shots` detections in each of the four projective settings of a
/// merged pair, repeated `runs` times for the spread.
///
/// The pair's total population is taken as known (it comes from the
/// position measurement), so each setting only estimates a click fraction.
pub fn emulate_tomography(
    d: &PairDensity,
    shots: u64,
    runs: usize,
    seed: u64,
) -> Result<TomographyEstimate> {
    if shots == 0 || runs < 2 {
        return Err(Error::Domain(
            "tomography needs shots > 0 and runs >= 2".into(),
        ));
    }
    let total = d.rho[0][0].re + d.rho[1][1].re;
    if total <= 0.0 {
        return Err(Error::Domain(format!("pair at {} is empty", d.x)));
    }
    let ideal = crate::measure::tomography_probabilities(&d.rho);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut probs = [0.0; 4];
        for (p, q) in probs.iter_mut().zip(ideal) {
            let frac = (q / total).clamp(0.0, 1.0);
            let clicks = Binomial::new(shots, frac)
                .expect("probability in [0, 1]")
                .sample(&mut rng);
            *p = clicks as f64 / shots as f64 * total;
        }
        estimates.push(PairDensity {
            x: d.x,
            rho: crate::measure::reconstruct_from_tomography(probs),
        });
    }
    let sd = |f: &dyn Fn(&PairDensity) -> f64| {
        let n = runs as f64;
        let mean = estimates.iter().map(f).sum::<f64>() / n;
        (estimates.iter().map(|e| (f(e) - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(TomographyEstimate {
        density: estimates[0],
        sigma_coherence: sd(&|e| e.coherence()),
        sigma_population_product: sd(&|e| e.population_product()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::uniform_program;

    fn uniform8() -> Distribution {
        (0..8).map(|i| (2 * i - 7, 0.125)).collect()
    }

    #[test]
    fn expected_counts_uniform() {
        let counts = expected_counts(
            &uniform_program(7).unwrap(),
            &NoiseModel::default(),
            7,
            8000,
        )
        .unwrap();
        assert_eq!(counts.len(), 8);
        for c in counts.values() {
            assert!((c - 1000.0).abs() < 1e-9);
        }
        let zero =
            expected_counts(&uniform_program(7).unwrap(), &NoiseModel::default(), 7, 0).unwrap();
        assert!(zero.values().all(|&c| c == 0.0));
    }

    #[test]
    fn point_mass_and_single_event() {
        let d: Distribution = [(3, 1.0)].into_iter().collect();
        assert_eq!(sample_counts(&d, 100, 1)[&3], 100);
        let c = sample_counts(&uniform8(), 1, 7);
        assert_eq!(c.values().filter(|&&n| n > 0).count(), 1);
        assert_eq!(c.values().sum::<u64>(), 1);
    }

    #[test]
    fn sampling_is_reproducible() {
        assert_eq!(
            sample_counts(&uniform8(), 1000, 42),
            sample_counts(&uniform8(), 1000, 42)
        );
        assert_ne!(
            sample_counts(&uniform8(), 1000, 42),
            sample_counts(&uniform8(), 1000, 43)
        );
    }

    #[test]
    fn large_sample_within_five_sigma() {
        let c = sample_counts(&uniform8(), 100_000, 5);
        let sigma = (100_000.0 * 0.125 * 0.875f64).sqrt();
        assert_eq!(c.values().sum::<u64>(), 100_000);
        for &n in c.values() {
            assert!((n as f64 - 12_500.0).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn bootstrap_degenerate_and_binomial() {
        let b = bootstrap_errorbars(&[(0, 1_000_000)].into_iter().collect(), 100, 1, None).unwrap();
        assert_eq!(b.sigma[&0], 0.0);
        assert_eq!(b.sigma_entropy, 0.0);

        let counts: Counts = (0..8).map(|i| (2 * i - 7, 1250)).collect();
        let b = bootstrap_errorbars(&counts, 1000, 3, None).unwrap();
        let expected = (0.125 * 0.875 / 10_000.0f64).sqrt();
        for s in b.sigma.values() {
            assert!((s / expected - 1.0).abs() < 0.2, "{s} vs {expected}");
        }
        assert!(bootstrap_errorbars(&counts, 10, 3, None).is_err());
    }

    #[test]
    fn jitter_zero_and_degenerate() {
        let p = uniform_program(5).unwrap();
        assert_eq!(perturb_program(&p, &NoiseModel::default()).unwrap(), p);
        let nm = NoiseModel {
            coin_angle_jitter_rad: std::f64::consts::PI,
            ..NoiseModel::default()
        };
        let q = perturb_program(&p, &nm).unwrap();
        assert!(q
            .cells()
            .all(|(_, _, c)| (0.0..=std::f64::consts::PI).contains(&c.theta())));
        assert!(walk::run_program(&q).is_ok());
    }

    #[test]
    fn budget_and_config() {
        let nm = NoiseModel::default();
        assert!((nm.event_budget(1e6, 2) - 1e6 * 0.43 * 0.43 * 0.01).abs() < 1e-6);
        assert_eq!(NoiseModel::parse(&nm.to_text()).unwrap(), nm);
        assert!(NoiseModel::parse("bogus 1\n").is_err());
        assert!(NoiseModel::parse("dephasing_gamma 2\n").is_err());
    }

    #[test]
    fn asymmetric_loss_shifts_weight_left() {
        let p = uniform_program(5).unwrap();
        let nm = NoiseModel {
            right_move_retention: 0.9,
            ..NoiseModel::default()
        };
        let d = detected_distribution(&p, &nm, 5).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!(d.get(-5) > d.get(5));
    }
}
