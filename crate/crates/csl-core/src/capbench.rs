//! Empirical distortion measurement for random subspace projection.
//!
//! Projects collections of subspaces through seeded JL projectors at a range
//! of target dimensions and records how canonical angles, their sines and
//! cosines, the affinity, and every applicable distance move. The headline
//! metric is relative distortion (the underlying bound is multiplicative);
//! absolute distortion is logged too because relative distortion is ill-posed
//! at zero angles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RngState;
use crate::projection::{JlFamily, JlProjector};
use crate::subspace::{
    canonical_angles, distance_from_angles, generalized_distance_from_angles, DistanceKind,
    Subspace,
};
use crate::synth::{random_subspace, subspace_pair_with_angles, AnglePrescription};

/// Failure-level grid used for failure-fraction accounting.
pub const EPS_GRID: [f64; 10] = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50];

/// Angles below this threshold are excluded from relative statistics.
const ZERO_ANGLE_TOL: f64 = 1e-12;

/// Configuration of one distortion experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapExperimentConfig {
    /// Ambient dimension N.
    pub ambient_dim: usize,
    /// Dimension of each subspace; the length is the number of subspaces L.
    pub dims: Vec<usize>,
    /// When set, builds one pair with these canonical angles (requires L = 2);
    /// otherwise subspaces are drawn at random.
    pub prescribed_angles: Option<Vec<f64>>,
    pub family: JlFamily,
    /// Target dimensions n to sweep.
    pub target_dims: Vec<usize>,
    /// Projector draws per target dimension.
    pub trials: usize,
    pub seed: u64,
}

impl CapExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 {
            return Err(Error::BadConfig {
                msg: "need at least two subspaces".into(),
            });
        }
        if self.trials == 0 {
            return Err(Error::BadConfig {
                msg: "trials must be >= 1".into(),
            });
        }
        if self.target_dims.is_empty() {
            return Err(Error::BadConfig {
                msg: "need at least one target dimension".into(),
            });
        }
        let d_max = *self.dims.iter().max().unwrap();
        for &n in &self.target_dims {
            if n < d_max || n >= self.ambient_dim {
                return Err(Error::BadConfig {
                    msg: format!("target dimension {n} must satisfy d <= n < N"),
                });
            }
        }
        if let Some(p) = &self.prescribed_angles {
            if self.dims.len() != 2 {
                return Err(Error::BadConfig {
                    msg: "prescribed angles require exactly two subspaces".into(),
                });
            }
            let d_min = *self.dims.iter().min().unwrap();
            if p.len() != d_min {
                return Err(Error::BadConfig {
                    msg: format!("expected {d_min} prescribed angles, got {}", p.len()),
                });
            }
        }
        Ok(())
    }
}

/// Angle and distance measurements for one (target dim, trial, subspace pair).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairRecord {
    pub target_dim: usize,
    pub trial: usize,
    pub pair: (usize, usize),
    pub original_angles: Vec<f64>,
    pub projected_angles: Vec<f64>,
    pub original_affinity: f64,
    pub projected_affinity: f64,
    /// (kind, original, projected) for every kind defined on this pair.
    pub distances: Vec<(DistanceKind, f64, f64)>,
}

impl PairRecord {
    /// Relative angle distortions |psi - theta| / theta; `None` marks angles
    /// excluded because theta = 0.
    pub fn relative_angle_distortions(&self) -> Vec<Option<f64>> {
        self.original_angles
            .iter()
            .zip(&self.projected_angles)
            .map(|(&t, &p)| {
                if t > ZERO_ANGLE_TOL {
                    Some((p - t).abs() / t)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Signed relative distortions (psi - theta) / theta.
    pub fn signed_relative_angle_distortions(&self) -> Vec<Option<f64>> {
        self.original_angles
            .iter()
            .zip(&self.projected_angles)
            .map(|(&t, &p)| {
                if t > ZERO_ANGLE_TOL {
                    Some((p - t) / t)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn absolute_angle_distortions(&self) -> Vec<f64> {
        self.original_angles
            .iter()
            .zip(&self.projected_angles)
            .map(|(&t, &p)| (p - t).abs())
            .collect()
    }

    pub fn relative_sine_distortions(&self) -> Vec<Option<f64>> {
        self.original_angles
            .iter()
            .zip(&self.projected_angles)
            .map(|(&t, &p)| {
                let s = t.sin();
                if s > ZERO_ANGLE_TOL {
                    Some((p.sin() - s).abs() / s)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn relative_cosine_distortions(&self) -> Vec<Option<f64>> {
        self.original_angles
            .iter()
            .zip(&self.projected_angles)
            .map(|(&t, &p)| {
                let c = t.cos();
                if c > ZERO_ANGLE_TOL {
                    Some((p.cos() - c).abs() / c)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn relative_affinity_distortion(&self) -> Option<f64> {
        if self.original_affinity > ZERO_ANGLE_TOL {
            Some((self.projected_affinity - self.original_affinity).abs() / self.original_affinity)
        } else {
            None
        }
    }

    /// Worst per-angle relative distortion; the failure statistic.
    pub fn max_relative_angle_distortion(&self) -> Option<f64> {
        self.relative_angle_distortions()
            .into_iter()
            .flatten()
            .fold(None, |acc: Option<f64>, x| {
                Some(acc.map_or(x, |a| a.max(x)))
            })
    }
}

/// Aggregates for one target dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NSummary {
    pub target_dim: usize,
    pub trials: usize,
    /// Trials skipped because a projected basis lost rank.
    pub collapsed_trials: usize,
    /// Number of (pair, trial) units contributing to failure fractions.
    pub units: usize,
    pub median_rel_angle: f64,
    pub p95_rel_angle: f64,
    pub median_abs_angle: f64,
    pub max_signed_rel_angle: f64,
    pub min_signed_rel_angle: f64,
    pub median_rel_sine: f64,
    pub median_rel_cosine: f64,
    pub median_rel_affinity: f64,
    /// Median relative distortion per distance kind.
    pub median_rel_distance: Vec<(DistanceKind, f64)>,
    /// (epsilon, fraction of units whose max relative angle distortion
    /// exceeds epsilon).
    pub failure_fractions: Vec<(f64, f64)>,
}

/// Full outcome of a distortion experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistortionReport {
    pub ambient_dim: usize,
    pub dims: Vec<usize>,
    pub family: JlFamily,
    pub trials: usize,
    pub seed: u64,
    /// One summary per target dimension, sorted by target dimension.
    pub summaries: Vec<NSummary>,
    /// Raw per-pair records in deterministic (n, trial, pair) order.
    pub records: Vec<PairRecord>,
}

fn median(sorted: &[f64]) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Runs the experiment: for every (target dim, trial) a fresh projector seed
/// derived from the base seed, every subspace projected, and every pair
/// measured. Trials run in parallel; records are merged in (n, trial) order
/// so the output is seed-stable regardless of scheduling.
pub fn run_cap_experiment(cfg: &CapExperimentConfig) -> Result<DistortionReport> {
    cfg.validate()?;
    let subspaces = build_subspaces(cfg)?;
    run_cap_experiment_on(cfg, &subspaces)
}

/// As [`run_cap_experiment`], but measures the given subspaces instead of
/// generating them from the config.
pub fn run_cap_experiment_on(
    cfg: &CapExperimentConfig,
    subspaces: &[Subspace<f64>],
) -> Result<DistortionReport> {
    cfg.validate()?;
    if subspaces.len() != cfg.dims.len()
        || subspaces.iter().zip(&cfg.dims).any(|(s, &d)| s.dim() != d)
        || subspaces.iter().any(|s| s.ambient_dim() != cfg.ambient_dim)
    {
        return Err(Error::BadConfig {
            msg: "subspaces do not match config dims".into(),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..subspaces.len())
        .flat_map(|i| ((i + 1)..subspaces.len()).map(move |j| (i, j)))
        .collect();

    // Baseline geometry, shared across trials.
    let mut baseline = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let angles = canonical_angles(&subspaces[i], &subspaces[j])?;
        baseline.push(angles.angles().to_vec());
    }

    let jobs: Vec<(usize, usize)> = cfg
        .target_dims
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();

    let outcomes: Vec<(usize, usize, Option<Vec<PairRecord>>)> = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let seed = RngState::derive(cfg.seed, &[n as u64, trial as u64]).seed();
            let projector = JlProjector::<f64>::new(cfg.family, cfg.ambient_dim, n, seed)
                .expect("validated dimensions");
            let mut images = Vec::with_capacity(subspaces.len());
            for s in subspaces {
                match projector.project_subspace(s) {
                    Ok(p) => images.push(p.image),
                    Err(Error::DimensionCollapsed) => return (n, trial, None),
                    Err(e) => panic!("unexpected projection failure: {e}"),
                }
            }
            let mut records = Vec::with_capacity(pairs.len());
            for (pair_idx, &(i, j)) in pairs.iter().enumerate() {
                let projected = canonical_angles(&images[i], &images[j])
                    .expect("equal ambient dimensions")
                    .angles()
                    .to_vec();
                let original = baseline[pair_idx].clone();
                let (d1, d2) = {
                    let (a, b) = (subspaces[i].dim(), subspaces[j].dim());
                    (a.min(b), a.max(b))
                };
                let kinds: &[DistanceKind] = if d1 == d2 {
                    &DistanceKind::ALL
                } else {
                    &DistanceKind::GENERALIZED
                };
                let distances = kinds
                    .iter()
                    .map(|&kind| {
                        let apply = |angles: &[f64]| {
                            if d1 == d2 {
                                distance_from_angles(angles, kind)
                            } else {
                                generalized_distance_from_angles(angles, d1, d2, kind)
                            }
                        };
                        (kind, apply(&original), apply(&projected))
                    })
                    .collect();
                let sum_cos2 =
                    |angles: &[f64]| angles.iter().map(|t| t.cos() * t.cos()).sum::<f64>().sqrt();
                records.push(PairRecord {
                    target_dim: n,
                    trial,
                    pair: (i, j),
                    original_affinity: sum_cos2(&original),
                    projected_affinity: sum_cos2(&projected),
                    original_angles: original,
                    projected_angles: projected,
                    distances,
                });
            }
            (n, trial, Some(records))
        })
        .collect();

    let mut records = Vec::new();
    let mut collapsed_per_n: Vec<(usize, usize)> =
        cfg.target_dims.iter().map(|&n| (n, 0)).collect();
    for (n, _trial, outcome) in outcomes {
        match outcome {
            Some(rs) => records.extend(rs),
            None => {
                let slot = collapsed_per_n.iter_mut().find(|(nn, _)| *nn == n).unwrap();
                slot.1 += 1;
            }
        }
    }

    let mut summaries: Vec<NSummary> = collapsed_per_n
        .iter()
        .map(|&(n, collapsed)| summarize(n, cfg.trials, collapsed, &records))
        .collect();
    summaries.sort_by_key(|s| s.target_dim);

    Ok(DistortionReport {
        ambient_dim: cfg.ambient_dim,
        dims: cfg.dims.clone(),
        family: cfg.family,
        trials: cfg.trials,
        seed: cfg.seed,
        summaries,
        records,
    })
}

fn build_subspaces(cfg: &CapExperimentConfig) -> Result<Vec<Subspace<f64>>> {
    match &cfg.prescribed_angles {
        Some(angles) => {
            let p = AnglePrescription::new(cfg.ambient_dim, angles.clone())?;
            let (a, b) =
                subspace_pair_with_angles(&p, RngState::derive(cfg.seed, &[0x5EED]).seed())?;
            Ok(vec![a, b])
        }
        None => cfg
            .dims
            .iter()
            .enumerate()
            .map(|(l, &d)| {
                random_subspace(
                    cfg.ambient_dim,
                    d,
                    RngState::derive(cfg.seed, &[0x5EED, l as u64]).seed(),
                )
            })
            .collect(),
    }
}

fn summarize(n: usize, trials: usize, collapsed: usize, records: &[PairRecord]) -> NSummary {
    let at_n: Vec<&PairRecord> = records.iter().filter(|r| r.target_dim == n).collect();

    let mut rel = Vec::new();
    let mut signed = Vec::new();
    let mut abs = Vec::new();
    let mut rel_sine = Vec::new();
    let mut rel_cos = Vec::new();
    let mut rel_aff = Vec::new();
    let mut per_kind: Vec<(DistanceKind, Vec<f64>)> = Vec::new();
    let mut failures = vec![0usize; EPS_GRID.len()];
    let mut units = 0usize;

    for r in &at_n {
        rel.extend(r.relative_angle_distortions().into_iter().flatten());
        signed.extend(r.signed_relative_angle_distortions().into_iter().flatten());
        abs.extend(r.absolute_angle_distortions());
        rel_sine.extend(r.relative_sine_distortions().into_iter().flatten());
        rel_cos.extend(r.relative_cosine_distortions().into_iter().flatten());
        rel_aff.extend(r.relative_affinity_distortion());
        for &(kind, orig, proj) in &r.distances {
            if orig <= ZERO_ANGLE_TOL {
                continue;
            }
            let slot = match per_kind.iter_mut().find(|(k, _)| *k == kind) {
                Some(s) => s,
                None => {
                    per_kind.push((kind, Vec::new()));
                    per_kind.last_mut().unwrap()
                }
            };
            slot.1.push((proj - orig).abs() / orig);
        }
        if let Some(worst) = r.max_relative_angle_distortion() {
            units += 1;
            for (slot, &eps) in failures.iter_mut().zip(EPS_GRID.iter()) {
                if worst > eps {
                    *slot += 1;
                }
            }
        }
    }

    let rel = sorted(rel);
    NSummary {
        target_dim: n,
        trials,
        collapsed_trials: collapsed,
        units,
        median_rel_angle: median(&rel),
        p95_rel_angle: quantile(&rel, 0.95),
        median_abs_angle: median(&sorted(abs)),
        max_signed_rel_angle: signed.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_signed_rel_angle: signed.iter().copied().fold(f64::INFINITY, f64::min),
        median_rel_sine: median(&sorted(rel_sine)),
        median_rel_cosine: median(&sorted(rel_cos)),
        median_rel_affinity: median(&sorted(rel_aff)),
        median_rel_distance: per_kind
            .into_iter()
            .map(|(kind, vals)| (kind, median(&sorted(vals))))
            .collect(),
        failure_fractions: failures
            .iter()
            .zip(EPS_GRID.iter())
            .map(|(&f, &eps)| {
                (
                    eps,
                    if units > 0 {
                        f as f64 / units as f64
                    } else {
                        f64::NAN
                    },
                )
            })
            .collect(),
    }
}

/// Least-squares fit of log(median) against log(n).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit, in log space.
    pub residual: f64,
}

/// Fits a power law to (target dim, median distortion) points.
pub fn fit_decay_slope(points: &[(usize, f64)]) -> Result<SlopeFit> {
    let mut distinct: Vec<usize> = points.iter().map(|&(n, _)| n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateInput {
            msg: format!(
                "need >= 3 distinct target dimensions, got {}",
                distinct.len()
            ),
        });
    }
    if points.iter().any(|&(_, m)| m <= 0.0 || m.is_nan()) {
        return Err(Error::DegenerateInput {
            msg: "all medians must be positive".into(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, m)| m.ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
    })
}

/// Empirical estimates of the dimension and failure-rate constants.
///
/// `c1` scales the smallest target dimension n* achieving the target median
/// distortion: c1 = n* eps^2 / max(d, ln L). `c2` is the decay rate of the
/// failure fraction against eps^2 n. Both come with the fitting windows used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsEstimate {
    pub c1: f64,
    /// True when no swept n achieved the target median, making c1 a bound.
    pub c1_is_lower_bound: bool,
    pub c1_target_eps: f64,
    /// Smallest target dimension with median distortion <= target eps.
    pub c1_n_star: Option<usize>,
    pub c2: f64,
    /// True when no interior failure fractions were observed and c2 comes
    /// from a rule-of-three bound on the censored cells.
    pub c2_is_lower_bound: bool,
    /// Number of (eps, n) cells with interior failure fractions used in the
    /// c2 regression.
    pub c2_cells_used: usize,
    /// Target dimensions the estimates were fitted over.
    pub fitted_target_dims: Vec<usize>,
}

/// Default target median distortion used by [`estimate_constants`].
pub const DEFAULT_C1_TARGET_EPS: f64 = 0.2;

pub fn estimate_constants(report: &DistortionReport) -> Result<ConstantsEstimate> {
    estimate_constants_at(report, DEFAULT_C1_TARGET_EPS)
}

pub fn estimate_constants_at(
    report: &DistortionReport,
    target_eps: f64,
) -> Result<ConstantsEstimate> {
    if report.summaries.len() < 3 {
        return Err(Error::InsufficientData {
            msg: format!(
                "need >= 3 target dimensions, got {}",
                report.summaries.len()
            ),
        });
    }
    if report.trials < 200 {
        return Err(Error::InsufficientData {
            msg: format!(
                "need >= 200 trials per target dimension, got {}",
                report.trials
            ),
        });
    }

    let d_max = *report.dims.iter().max().unwrap() as f64;
    let l_count = report.dims.len() as f64;
    let denom = d_max.max(l_count.ln());

    let n_star = report
        .summaries
        .iter()
        .filter(|s| s.median_rel_angle <= target_eps)
        .map(|s| s.target_dim)
        .min();
    let (c1, c1_is_lower_bound) = match n_star {
        Some(n) => (n as f64 * target_eps * target_eps / denom, false),
        None => {
            let n_max = report.summaries.iter().map(|s| s.target_dim).max().unwrap();
            (n_max as f64 * target_eps * target_eps / denom, true)
        }
    };

    // Failure-rate decay: ln(fraction) regressed on eps^2 n over interior cells.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut censored: Vec<(f64, usize)> = Vec::new(); // (eps^2 n, units) with zero failures
    for s in &report.summaries {
        for &(eps, frac) in &s.failure_fractions {
            let x = eps * eps * s.target_dim as f64;
            if frac.is_nan() {
                continue;
            }
            if frac > 0.0 && frac < 1.0 {
                xs.push(x);
                ys.push(frac.ln());
            } else if frac == 0.0 {
                censored.push((x, s.units));
            }
        }
    }

    let (c2, c2_is_lower_bound, c2_cells_used) = if xs.len() >= 2 {
        let n = xs.len() as f64;
        let mean_x = xs.iter().sum::<f64>() / n;
        let mean_y = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
        if sxx <= 0.0 {
            return Err(Error::InsufficientData {
                msg: "failure fractions observed at a single eps^2 n value".into(),
            });
        }
        let sxy: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mean_x) * (y - mean_y))
            .sum();
        (-(sxy / sxx), false, xs.len())
    } else if !censored.is_empty() {
        // Rule of three: zero failures in U units bounds the rate by 3/U.
        let bound = censored
            .iter()
            .filter(|&&(_, u)| u > 3)
            .map(|&(x, u)| (u as f64 / 3.0).ln() / x)
            .fold(f64::NEG_INFINITY, f64::max);
        if !bound.is_finite() {
            return Err(Error::InsufficientData {
                msg: "no usable failure cells".into(),
            });
        }
        (bound, true, 0)
    } else {
        return Err(Error::InsufficientData {
            msg: "no usable failure cells".into(),
        });
    };

    Ok(ConstantsEstimate {
        c1,
        c1_is_lower_bound,
        c1_target_eps: target_eps,
        c1_n_star: n_star,
        c2,
        c2_is_lower_bound,
        c2_cells_used,
        fitted_target_dims: report.summaries.iter().map(|s| s.target_dim).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted_report(rate: f64, trials: usize) -> DistortionReport {
        // Summaries with failure fractions exactly e^{-rate * eps^2 n}.
        let summaries = [64usize, 256, 1024]
            .iter()
            .map(|&n| NSummary {
                target_dim: n,
                trials,
                collapsed_trials: 0,
                units: trials,
                median_rel_angle: 4.0 / (n as f64).sqrt(),
                p95_rel_angle: 8.0 / (n as f64).sqrt(),
                median_abs_angle: 0.0,
                max_signed_rel_angle: 0.1,
                min_signed_rel_angle: -0.1,
                median_rel_sine: 0.0,
                median_rel_cosine: 0.0,
                median_rel_affinity: 0.0,
                median_rel_distance: Vec::new(),
                failure_fractions: EPS_GRID
                    .iter()
                    .map(|&eps| (eps, (-rate * eps * eps * n as f64).exp()))
                    .collect(),
            })
            .collect();
        DistortionReport {
            ambient_dim: 2048,
            dims: vec![4, 4],
            family: JlFamily::Gaussian,
            trials,
            seed: 0,
            summaries,
            records: Vec::new(),
        }
    }

    #[test]
    fn slope_of_exact_power_law_is_recovered() {
        let points: Vec<(usize, f64)> = [16usize, 64, 256, 1024]
            .iter()
            .map(|&n| (n, 3.0 / (n as f64).sqrt()))
            .collect();
        let fit = fit_decay_slope(&points).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-10, "slope {}", fit.slope);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn slope_of_constant_medians_is_zero() {
        let points = vec![(16usize, 0.25), (64, 0.25), (256, 0.25)];
        let fit = fit_decay_slope(&points).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn slope_fit_rejects_degenerate_input() {
        assert!(matches!(
            fit_decay_slope(&[(16, 0.5), (16, 0.4), (16, 0.3)]),
            Err(Error::DegenerateInput { .. })
        ));
        assert!(matches!(
            fit_decay_slope(&[(16, 0.5), (32, 0.0), (64, 0.1)]),
            Err(Error::DegenerateInput { .. })
        ));
    }

    #[test]
    fn planted_failure_rate_is_recovered() {
        let report = planted_report(0.1, 500);
        let est = estimate_constants(&report).unwrap();
        assert!(
            (0.09..=0.11).contains(&est.c2),
            "c2 {} should be close to the planted 0.1",
            est.c2
        );
        assert!(!est.c2_is_lower_bound);
        assert!(est.c1 > 0.0);
    }

    #[test]
    fn zero_failures_give_flagged_lower_bound() {
        let mut report = planted_report(0.1, 500);
        for s in &mut report.summaries {
            for f in &mut s.failure_fractions {
                f.1 = 0.0;
            }
        }
        let est = estimate_constants(&report).unwrap();
        assert!(est.c2_is_lower_bound);
        assert!(est.c2 > 0.0);
    }

    #[test]
    fn insufficient_data_is_rejected() {
        let mut report = planted_report(0.1, 500);
        report.summaries.truncate(2);
        assert!(matches!(
            estimate_constants(&report),
            Err(Error::InsufficientData { .. })
        ));
        let mut report = planted_report(0.1, 100);
        report.trials = 100;
        assert!(matches!(
            estimate_constants(&report),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn restriction_projector_gives_zero_distortion() {
        // Subspaces inside the first n coordinates are untouched by the
        // coordinate-restriction fixture, so every distortion is exactly 0.
        let cfg = CapExperimentConfig {
            ambient_dim: 32,
            dims: vec![2, 2],
            prescribed_angles: None,
            family: JlFamily::Restriction,
            target_dims: vec![16],
            trials: 3,
            seed: 4,
        };
        let a = Subspace::<f64>::coordinate(32, &[0, 1]).unwrap();
        let b = Subspace::<f64>::coordinate(32, &[1, 2]).unwrap();
        let report = run_cap_experiment_on(&cfg, &[a, b]).unwrap();
        for r in &report.records {
            for d in r.relative_angle_distortions().into_iter().flatten() {
                assert_eq!(d, 0.0);
            }
            for &(_, orig, proj) in &r.distances {
                assert_eq!(orig, proj);
            }
        }
        assert_eq!(report.summaries[0].median_rel_angle, 0.0);
    }

    #[test]
    fn collapsed_trials_are_counted_not_hidden() {
        // Under the coordinate-restriction fixture, a subspace living
        // entirely beyond the kept coordinates projects to zero and the
        // trial is recorded as collapsed.
        let cfg = CapExperimentConfig {
            ambient_dim: 32,
            dims: vec![2, 2],
            prescribed_angles: None,
            family: JlFamily::Restriction,
            target_dims: vec![8],
            trials: 4,
            seed: 1,
        };
        let a = Subspace::<f64>::coordinate(32, &[0, 1]).unwrap();
        let b = Subspace::<f64>::coordinate(32, &[20, 21]).unwrap();
        let report = run_cap_experiment_on(&cfg, &[a, b]).unwrap();
        assert_eq!(report.summaries[0].collapsed_trials, 4);
        assert!(report.records.is_empty());
        assert_eq!(report.summaries[0].units, 0);
    }

    #[test]
    fn near_full_dimension_keeps_distortion_small() {
        let cfg = CapExperimentConfig {
            ambient_dim: 64,
            dims: vec![2, 2],
            prescribed_angles: None,
            family: JlFamily::Gaussian,
            target_dims: vec![63],
            trials: 100,
            seed: 5,
        };
        let report = run_cap_experiment(&cfg).unwrap();
        assert!(report.summaries[0].median_rel_angle <= 0.1);
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = CapExperimentConfig {
            ambient_dim: 32,
            dims: vec![2, 2, 2],
            prescribed_angles: None,
            family: JlFamily::Rademacher,
            target_dims: vec![8, 16],
            trials: 5,
            seed: 6,
        };
        let a = run_cap_experiment(&cfg).unwrap();
        let b = run_cap_experiment(&cfg).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.projected_angles, rb.projected_angles);
            assert_eq!(ra.pair, rb.pair);
        }
    }

    #[test]
    fn sine_distortion_stays_within_envelope_at_small_angles() {
        // Prescribed angles at or below pi/4, where theta/sin(theta) <= 1.111
        // and |sin'| <= 1 bound the sine distortion by 1.5x the angle one.
        let cfg = CapExperimentConfig {
            ambient_dim: 128,
            dims: vec![3, 3],
            prescribed_angles: Some(vec![
                std::f64::consts::FRAC_PI_8,
                std::f64::consts::FRAC_PI_6,
                std::f64::consts::FRAC_PI_4,
            ]),
            family: JlFamily::Gaussian,
            target_dims: vec![64],
            trials: 50,
            seed: 7,
        };
        let report = run_cap_experiment(&cfg).unwrap();
        for r in &report.records {
            let rel = r.relative_angle_distortions();
            let rel_sine = r.relative_sine_distortions();
            for ((theta, a), s) in r.original_angles.iter().zip(rel).zip(rel_sine) {
                if *theta <= std::f64::consts::FRAC_PI_4 + 1e-12 {
                    if let (Some(a), Some(s)) = (a, s) {
                        assert!(s <= 1.5 * a + 1e-12, "sine {s} vs angle {a}");
                    }
                }
            }
        }
    }
}
