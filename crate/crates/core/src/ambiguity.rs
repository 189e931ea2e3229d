//! Ambiguous configurations: detection, path tracing, wall bisection,
//! perturbation experiments and the terminal-codirection checker.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geom::{Point, LENGTH_EPS};
use crate::length::LengthFunction;
use crate::realization::{realize, realize_full, RealizedTree};
use crate::solver::{solve, SolveResult};
use crate::topology::{enumerate_full_types, CombinatorialType};

/// Default tolerance on |F₁ − F₂| at a wall.
pub const WALL_TOLERANCE: f64 = 1e-10;
/// Angular tolerance for codirection.
pub const CODIRECTION_TOLERANCE: f64 = 1e-7;
/// Bisection stops once the bracket is this narrow.
const MIN_BRACKET: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Ambiguity {
    pub ambiguous: bool,
    /// Two minimal trees of distinct types when ambiguous.
    pub witness: Option<(RealizedTree, RealizedTree)>,
    /// Best length minus runner-up length when not ambiguous.
    pub gap: Option<f64>,
}

pub fn is_ambiguous(p: &Configuration, tol: f64) -> Result<Ambiguity> {
    Ok(ambiguity_of(&solve(p, tol)?))
}

pub fn ambiguity_of(r: &SolveResult) -> Ambiguity {
    if r.ambiguous {
        let m = r.minimal();
        Ambiguity { ambiguous: true, witness: Some((m[0].tree.clone(), m[1].tree.clone())), gap: None }
    } else {
        Ambiguity { ambiguous: false, witness: None, gap: r.runner_up_gap() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub winner: CombinatorialType,
    pub code: Vec<u8>,
    pub min_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub samples: Vec<PathSample>,
    /// Intervals `(t_i, t_{i+1})` of consecutive samples with different winners.
    pub events: Vec<(f64, f64)>,
}

/// Samples the straight path from `p0` to `p1` at `samples` evenly spaced
/// parameters (both ends included) and records the winning type.
pub fn trace_path(p0: &Configuration, p1: &Configuration, samples: usize) -> Result<PathTrace> {
    if p0.len() != p1.len() {
        return Err(Error::Precondition("endpoints have different sizes".into()));
    }
    if samples < 2 {
        return Err(Error::Precondition("need at least 2 samples".into()));
    }
    let ts: Vec<f64> = (0..samples).map(|i| i as f64 / (samples - 1) as f64).collect();
    let samples = ts
        .par_iter()
        .map(|&t| {
            let c = p0.lerp(p1, t).map_err(|_| Error::DegeneratePath { t })?;
            let r = solve(&c, LENGTH_EPS)?;
            let best = r.best();
            Ok(PathSample { t, winner: best.ty.clone(), code: best.code.clone(), min_length: best.length })
        })
        .collect::<Result<Vec<_>>>()?;
    let events = samples
        .windows(2)
        .filter(|w| w[0].code != w[1].code)
        .map(|w| (w[0].t, w[1].t))
        .collect();
    Ok(PathTrace { samples, events })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallHit {
    pub t_star: f64,
    pub config: Configuration,
    pub types: (CombinatorialType, CombinatorialType),
    pub lengths: (f64, f64),
    pub gap: f64,
    /// Realizations of both types at `config`, where they exist.
    pub trees: (Option<RealizedTree>, Option<RealizedTree>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallOptions {
    pub wall_tolerance: f64,
    pub max_iter: usize,
}

impl Default for WallOptions {
    fn default() -> Self {
        WallOptions { wall_tolerance: WALL_TOLERANCE, max_iter: 200 }
    }
}

enum Verdict {
    First,
    Second,
}

struct Probe {
    verdict: Verdict,
    first: Option<RealizedTree>,
    second: Option<RealizedTree>,
}

/// Locates a configuration on the straight path from `p0` to `p1` where two
/// types have equal length.
///
/// The types are `hint` when given, otherwise the winners at both ends. The
/// search bisects on which type is shorter; where only one of them realizes,
/// that one counts as shorter. At the hit both lengths are evaluated with the
/// Maxwell form of the most recent realization of each type.
pub fn find_wall(
    p0: &Configuration,
    p1: &Configuration,
    hint: Option<(CombinatorialType, CombinatorialType)>,
    opts: &WallOptions,
) -> Result<WallHit> {
    if p0.len() != p1.len() {
        return Err(Error::Precondition("endpoints have different sizes".into()));
    }
    let (ta, tb) = match hint {
        Some((a, b)) => {
            if a.topology_code() == b.topology_code() {
                return Err(Error::Precondition("hint names the same type twice".into()));
            }
            (a, b)
        }
        None => {
            let a = solve(p0, LENGTH_EPS)?.best().ty.clone();
            let b = solve(p1, LENGTH_EPS)?.best().ty.clone();
            if a.topology_code() == b.topology_code() {
                return Err(Error::NoWall);
            }
            (a, b)
        }
    };
    let at = |t: f64| p0.lerp(p1, t).map_err(|_| Error::DegeneratePath { t });
    let probe = |t: f64| -> Result<Probe> {
        let c = at(t)?;
        let first = realize(&ta, &c).ok();
        let second = realize(&tb, &c).ok();
        let verdict = match (&first, &second) {
            (Some(a), Some(b)) => {
                if a.length <= b.length {
                    Verdict::First
                } else {
                    Verdict::Second
                }
            }
            (Some(_), None) => Verdict::First,
            (None, Some(_)) => Verdict::Second,
            (None, None) => return Err(Error::BracketLost { lo: t, hi: t }),
        };
        Ok(Probe { verdict, first, second })
    };

    let start = probe(0.0)?;
    let end = probe(1.0)?;
    if !matches!(start.verdict, Verdict::First) || !matches!(end.verdict, Verdict::Second) {
        return Err(Error::NoWall);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut last_first = start.first.expect("first type wins at t = 0");
    let mut last_second = end.second.expect("second type wins at t = 1");
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo + hi);
        let pr = probe(mid).map_err(|e| match e {
            Error::BracketLost { .. } => Error::BracketLost { lo, hi },
            other => other,
        })?;
        if let Some(a) = &pr.first {
            last_first = a.clone();
        }
        if let Some(b) = &pr.second {
            last_second = b.clone();
        }
        if let (Some(a), Some(b)) = (&pr.first, &pr.second) {
            if (a.length - b.length).abs() < opts.wall_tolerance {
                lo = mid;
                hi = mid;
                break;
            }
        }
        match pr.verdict {
            Verdict::First => lo = mid,
            Verdict::Second => hi = mid,
        }
        if hi - lo < MIN_BRACKET {
            break;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let config = at(t_star)?;
    let fa = LengthFunction::from_realization(&last_first)?;
    let fb = LengthFunction::from_realization(&last_second)?;
    let lengths = (fa.evaluate(&config), fb.evaluate(&config));
    let gap = (lengths.0 - lengths.1).abs();
    if gap >= opts.wall_tolerance {
        return Err(Error::NoWall);
    }
    let trees = (realize(&ta, &config).ok(), realize(&tb, &config).ok());
    Ok(WallHit { t_star, config, types: (ta, tb), lengths, gap, trees })
}

/// g(t) = F_a(γ(t)) − F_b(γ(t)) from realizations; `None` where either type fails.
pub fn length_difference(
    p0: &Configuration,
    p1: &Configuration,
    ta: &CombinatorialType,
    tb: &CombinatorialType,
    t: f64,
) -> Result<Option<f64>> {
    let c = p0.lerp(p1, t).map_err(|_| Error::DegeneratePath { t })?;
    Ok(match (realize(ta, &c), realize(tb, &c)) {
        (Ok(a), Ok(b)) => Some(a.length - b.length),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub seed_offset: u64,
    pub ambiguous: bool,
    pub min_length: f64,
    pub runner_up_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub sigma: f64,
    pub seed: u64,
    pub rows: Vec<TrialRow>,
}

impl PerturbationReport {
    pub fn still_ambiguous(&self) -> usize {
        self.rows.iter().filter(|r| r.ambiguous).count()
    }

    pub fn fraction_still_ambiguous(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.still_ambiguous() as f64 / self.rows.len() as f64
        }
    }

    /// CSV with columns trial, seed_offset, ambiguous, min_length, runner_up_gap.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed_offset,ambiguous,min_length,runner_up_gap\n");
        for r in &self.rows {
            let gap = r.runner_up_gap.map(|g| format!("{g:.9}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:.9},{}\n",
                r.trial, r.seed_offset, r.ambiguous, r.min_length, gap
            ));
        }
        out
    }
}

/// Adds N(0, σ²) noise to every coordinate of an ambiguous configuration
/// `trials` times and re-solves. Trial `k` draws from a generator seeded with
/// `seed + k`, so results do not depend on scheduling.
pub fn perturbation_experiment(p: &Configuration, sigma: f64, trials: usize, seed: u64) -> Result<PerturbationReport> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Precondition(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if !is_ambiguous(p, LENGTH_EPS)?.ambiguous {
        return Err(Error::Precondition("configuration is not ambiguous".into()));
    }
    let normal = Normal::new(0.0, sigma).expect("sigma checked");
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed_offset = trial as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(seed_offset));
            let q = Configuration::new(
                p.points()
                    .iter()
                    .map(|x| Point::new(x.x + normal.sample(&mut rng), x.y + normal.sample(&mut rng)))
                    .collect(),
            )?;
            let r = solve(&q, LENGTH_EPS)?;
            Ok(TrialRow {
                trial,
                seed_offset,
                ambiguous: r.ambiguous,
                min_length: r.min_length(),
                runner_up_gap: r.runner_up_gap(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PerturbationReport { sigma, seed, rows })
}

/// Whether the realizations of two distinct full types at `p` leave every
/// terminal in the same direction.
pub fn codirection_check(p: &Configuration, t1: &CombinatorialType, t2: &CombinatorialType) -> Result<bool> {
    if !t1.is_full() || !t2.is_full() {
        return Err(Error::Precondition("codirection needs full types".into()));
    }
    if t1.topology_code() == t2.topology_code() {
        return Err(Error::Precondition("codirection needs two distinct types".into()));
    }
    let a = realize_full(t1, p)?;
    let b = realize_full(t2, p)?;
    Ok(codirected(&a, &b))
}

fn codirected(a: &RealizedTree, b: &RealizedTree) -> bool {
    (0..a.ty.n_terminals()).all(|i| {
        let da = a.terminal_directions(i)[0];
        let db = b.terminal_directions(i)[0];
        da.cross(db).abs().atan2(da.dot(db)) < CODIRECTION_TOLERANCE
    })
}

/// Uniform random configuration in the unit square.
pub fn random_configuration<R: Rng>(rng: &mut R, n: usize) -> Configuration {
    loop {
        let pts = (0..n).map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>())).collect();
        if let Ok(c) = Configuration::new(pts) {
            return c;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub config: Configuration,
    pub first: CombinatorialType,
    pub second: CombinatorialType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodirectionReport {
    pub n: usize,
    pub configurations: usize,
    pub pairs_checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Checks every jointly realizable pair of full types on `trials` random
/// configurations that have at least one such pair.
pub fn codirection_harness(n: usize, trials: usize, seed: u64) -> Result<CodirectionReport> {
    let types = enumerate_full_types(n)?;
    let per_trial = |trial: usize| -> Result<(usize, Vec<Counterexample>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        for _ in 0..10_000 {
            let p = random_configuration(&mut rng, n);
            let realized: Vec<RealizedTree> = types.iter().filter_map(|t| realize_full(t, &p).ok()).collect();
            if realized.len() < 2 {
                continue;
            }
            let mut pairs = 0;
            let mut found = Vec::new();
            for i in 0..realized.len() {
                for j in i + 1..realized.len() {
                    pairs += 1;
                    if codirected(&realized[i], &realized[j]) {
                        found.push(Counterexample {
                            config: p.clone(),
                            first: realized[i].ty.clone(),
                            second: realized[j].ty.clone(),
                        });
                    }
                }
            }
            return Ok((pairs, found));
        }
        Err(Error::Precondition(format!("no jointly realizable pair found for n = {n}")))
    };
    let results = (0..trials).into_par_iter().map(per_trial).collect::<Result<Vec<_>>>()?;
    let mut pairs_checked = 0;
    let mut counterexamples = Vec::new();
    for (pairs, found) in results {
        pairs_checked += pairs;
        counterexamples.extend(found);
    }
    Ok(CodirectionReport { n, configurations: trials, pairs_checked, counterexamples })
}
