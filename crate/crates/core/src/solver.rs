//! Exhaustive Steiner minimal tree solver and the relaxation oracle.
//!
//! [`solve`] enumerates every type on the configuration's terminals,
//! realizes each one exactly and ranks the results. Full components shared
//! between types are realized once. [`smith_relax`] is an independent
//! fixed-point relaxation used to cross-check the exact path.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geom::{angle_at, Point, GEOM_EPS, LENGTH_EPS, STEINER_ANGLE};
use crate::realization::{glue_components, realize_component, RealizedTree};
use crate::topology::{enumerate_types_with_cap, full_components, CombinatorialType, DEFAULT_TYPE_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tie_tolerance: f64,
    pub cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tie_tolerance: LENGTH_EPS, cap: DEFAULT_TYPE_CAP }
    }
}

/// One realizable type and its realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// The enumerated (unoriented) type.
    pub ty: CombinatorialType,
    /// Canonical code of `ty`; the tie-breaker in the ranking.
    pub code: Vec<u8>,
    pub tree: RealizedTree,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// All realizable types, sorted by (length, code).
    pub candidates: Vec<Candidate>,
    /// The first `n_minimal` candidates are within `tie_tolerance` of the best.
    pub n_minimal: usize,
    pub ambiguous: bool,
    pub tie_tolerance: f64,
}

impl SolveResult {
    pub fn minimal(&self) -> &[Candidate] {
        &self.candidates[..self.n_minimal]
    }

    pub fn best(&self) -> &Candidate {
        &self.candidates[0]
    }

    pub fn min_length(&self) -> f64 {
        self.candidates[0].length
    }

    /// Gap from the best length to the best candidate outside the minimal set.
    pub fn runner_up_gap(&self) -> Option<f64> {
        self.candidates.get(self.n_minimal).map(|c| c.length - self.min_length())
    }
}

/// Solves with the default type cap.
pub fn solve(p: &Configuration, tie_tolerance: f64) -> Result<SolveResult> {
    solve_with(p, &SolveOptions { tie_tolerance, ..SolveOptions::default() })
}

pub fn solve_with(p: &Configuration, opts: &SolveOptions) -> Result<SolveResult> {
    let n = p.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("need at least 2 terminals, got {n}")));
    }
    if opts.tie_tolerance.is_nan() || opts.tie_tolerance < 0.0 {
        return Err(Error::Precondition("tie tolerance must be non-negative".into()));
    }
    let types = enumerate_types_with_cap(n, opts.cap)?;
    let decomps: Vec<_> = types.iter().map(full_components).collect();

    // each distinct full component is realized once
    let mut keys: Vec<(Vec<usize>, Vec<u8>)> = decomps
        .iter()
        .flat_map(|d| d.components.iter().map(|c| (c.terminals.clone(), c.ty.canonical_code())))
        .collect();
    keys.sort();
    keys.dedup();
    let mut representative = HashMap::new();
    for d in &decomps {
        for c in &d.components {
            representative.entry((c.terminals.clone(), c.ty.canonical_code())).or_insert(c);
        }
    }
    let realized: HashMap<(Vec<usize>, Vec<u8>), Option<RealizedTree>> = keys
        .par_iter()
        .map(|k| (k.clone(), realize_component(representative[k], p).ok()))
        .collect();

    let mut candidates: Vec<Candidate> = types
        .par_iter()
        .zip(decomps.par_iter())
        .filter_map(|(t, d)| {
            let parts: Option<Vec<&RealizedTree>> = d
                .components
                .iter()
                .map(|c| realized[&(c.terminals.clone(), c.ty.canonical_code())].as_ref())
                .collect();
            let parts = parts?;
            let tree = if t.is_full() {
                parts[0].clone()
            } else {
                glue_components(t, d, &parts, p).ok()?
            };
            let length = tree.length;
            Some(Candidate { ty: t.clone(), code: t.canonical_code(), tree, length })
        })
        .collect();
    candidates.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.code.cmp(&b.code)));
    if candidates.is_empty() {
        // the minimum spanning tree type always realizes, so this means bad input
        return Err(Error::DegenerateInput("no type realizes".into()));
    }
    let best = candidates[0].length;
    let n_minimal = candidates.iter().take_while(|c| c.length <= best + opts.tie_tolerance).count();
    let ambiguous = n_minimal >= 2 && candidates[0].code != candidates[1].code;
    Ok(SolveResult { candidates, n_minimal, ambiguous, tie_tolerance: opts.tie_tolerance })
}

/// Types of all minimal trees.
pub fn minimal_types(p: &Configuration, tol: f64) -> Result<Vec<CombinatorialType>> {
    Ok(solve(p, tol)?.minimal().iter().map(|c| c.ty.clone()).collect())
}

/// Output of the relaxation: positions may have collapsed edges.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedTree {
    pub ty: CombinatorialType,
    pub positions: Vec<Point>,
    pub length: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Point minimizing the sum of distances to `a`, `b`, `c`.
///
/// A vertex with an angle of at least 2π/3 (or a doubled vertex) is its own
/// Fermat point; otherwise the first isogonic center, from its trilinear
/// coordinates csc(A + π/3) : csc(B + π/3) : csc(C + π/3).
pub fn fermat_point(a: Point, b: Point, c: Point) -> Point {
    if a.dist(b) <= GEOM_EPS || a.dist(c) <= GEOM_EPS {
        return a;
    }
    if b.dist(c) <= GEOM_EPS {
        return b;
    }
    let third = std::f64::consts::PI / 3.0;
    let ang_a = angle_at(a, b, c).expect("distinct");
    let ang_b = angle_at(b, a, c).expect("distinct");
    let ang_c = angle_at(c, a, b).expect("distinct");
    if ang_a >= STEINER_ANGLE {
        return a;
    }
    if ang_b >= STEINER_ANGLE {
        return b;
    }
    if ang_c >= STEINER_ANGLE {
        return c;
    }
    let wa = b.dist(c) / (ang_a + third).sin();
    let wb = a.dist(c) / (ang_b + third).sin();
    let wc = a.dist(b) / (ang_c + third).sin();
    let w = wa + wb + wc;
    (a * wa + b * wb + c * wc) * (1.0 / w)
}

/// Fixed-point relaxation: every Steiner point moves to the Fermat point of
/// its current neighbors until no point moves more than `tol`.
pub fn relax(t: &CombinatorialType, p: &Configuration, max_iter: usize, tol: f64) -> Result<RelaxedTree> {
    let n = t.n_terminals();
    if p.len() != n {
        return Err(Error::Precondition(format!("type has {n} terminals, configuration {}", p.len())));
    }
    let mut pos = vec![Point::ORIGIN; t.n_vertices()];
    pos[..n].copy_from_slice(p.points());
    for comp in &full_components(t).components {
        let centroid = comp.terminals.iter().fold(Point::ORIGIN, |acc, &i| acc + p.point(i))
            * (1.0 / comp.terminals.len() as f64);
        for &s in &comp.steiner {
            pos[s] = centroid;
        }
    }
    let mut damping = 1.0;
    let mut prev_move = f64::INFINITY;
    let mut rising = 0;
    let mut iterations = 0;
    let mut converged = t.n_steiner() == 0;
    while !converged && iterations < max_iter {
        iterations += 1;
        let mut max_move: f64 = 0.0;
        for v in n..t.n_vertices() {
            let ns = t.neighbors(v);
            let target = fermat_point(pos[ns[0]], pos[ns[1]], pos[ns[2]]);
            let next = pos[v] + (target - pos[v]) * damping;
            max_move = max_move.max(next.dist(pos[v]));
            pos[v] = next;
        }
        if max_move < tol {
            converged = true;
        } else if max_move > prev_move {
            rising += 1;
            if rising >= 3 {
                damping = 0.5;
            }
        } else {
            rising = 0;
        }
        prev_move = max_move;
    }
    let length = t.edges().iter().map(|&(a, b)| pos[a].dist(pos[b])).sum();
    Ok(RelaxedTree { ty: t.clone(), positions: pos, length, iterations, converged })
}

/// [`relax`] that reports `NoConvergence` when the iteration budget runs out.
pub fn smith_relax(t: &CombinatorialType, p: &Configuration, max_iter: usize, tol: f64) -> Result<RelaxedTree> {
    let r = relax(t, p, max_iter, tol)?;
    if r.converged {
        Ok(r)
    } else {
        Err(Error::NoConvergence { iterations: r.iterations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::realize_full;

    const S3: f64 = 1.732_050_807_568_877_2;

    fn cfg(xy: &[(f64, f64)]) -> Configuration {
        Configuration::from_xy(xy).unwrap()
    }

    #[test]
    fn equilateral_triangle() {
        let p = cfg(&[(0.0, 0.0), (1.0, 0.0), (0.5, S3 / 2.0)]);
        let r = solve(&p, 1e-9).unwrap();
        assert!(!r.ambiguous);
        assert_eq!(r.n_minimal, 1);
        assert!(r.best().ty.is_full());
        assert!((r.min_length() - S3).abs() < 1e-9);
        assert_eq!(r.candidates.len(), 1, "paths have a π/3 middle angle");
    }

    #[test]
    fn unit_square_is_ambiguous() {
        let p = cfg(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let r = solve(&p, 1e-9).unwrap();
        assert!(r.ambiguous);
        assert_eq!(r.n_minimal, 2);
        for c in r.minimal() {
            assert!(c.ty.is_full());
            assert!((c.length - (1.0 + S3)).abs() < 1e-9);
            c.tree.verify(&p).unwrap();
        }
        assert_ne!(r.minimal()[0].code, r.minimal()[1].code);
    }

    #[test]
    fn rectangle_prefers_the_long_spine() {
        let p = cfg(&[(0.0, 0.0), (1.1, 0.0), (1.1, 1.0), (0.0, 1.0)]);
        let r = solve(&p, 1e-9).unwrap();
        assert!(!r.ambiguous);
        assert!((r.min_length() - (1.1 + S3)).abs() < 1e-9);
        // oracle: the other spine has length 1 + 1.1·√3
        let gap = r.runner_up_gap().unwrap();
        assert!((gap - 0.1 * (S3 - 1.0)).abs() < 1e-8);
        assert_eq!(minimal_types(&p, 1e-9).unwrap().len(), 1);
    }

    #[test]
    fn two_points() {
        let p = cfg(&[(0.0, 0.0), (3.0, 4.0)]);
        let r = solve(&p, 1e-9).unwrap();
        assert_eq!(r.candidates.len(), 1);
        assert!((r.min_length() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn limits() {
        let pts: Vec<(f64, f64)> = (0..9).map(|i| (i as f64, (i * i) as f64 * 0.1)).collect();
        assert_eq!(solve(&cfg(&pts), 1e-9).unwrap_err(), Error::LimitExceeded { n: 9, cap: 8 });
        assert!(solve(&cfg(&[(0.0, 0.0)]), 1e-9).is_err());
    }

    #[test]
    fn fermat_point_cases() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        let c = Point::new(0.5, S3 / 2.0);
        assert!(fermat_point(a, b, c).dist(Point::new(0.5, S3 / 6.0)) < 1e-12);
        assert_eq!(fermat_point(a, b, Point::new(-1.0, 0.3)), a);
        assert_eq!(fermat_point(a, a, c), a);
        // stationarity: the three unit vectors towards the vertices cancel
        let (a, b, c) = (Point::new(0.1, 0.2), Point::new(2.0, -0.3), Point::new(0.9, 1.7));
        let f = fermat_point(a, b, c);
        let s = (a - f).unit().unwrap() + (b - f).unit().unwrap() + (c - f).unit().unwrap();
        assert!(s.norm() < 1e-12);
    }

    #[test]
    fn relaxation_examples() {
        let eq = cfg(&[(0.0, 0.0), (1.0, 0.0), (0.5, S3 / 2.0)]);
        let r = smith_relax(&CombinatorialType::tripod(), &eq, 10_000, 1e-10).unwrap();
        assert!(r.positions[3].dist(Point::new(0.5, S3 / 6.0)) < 1e-8);

        let obtuse = cfg(&[(0.0, 0.0), (1.0, 0.0), (-1.0, 0.3)]);
        let r = smith_relax(&CombinatorialType::tripod(), &obtuse, 10_000, 1e-10).unwrap();
        assert!(r.positions[3].dist(obtuse.point(0)) < 1e-9);
        assert!(realize_full(&CombinatorialType::tripod(), &obtuse).is_err());

        let p = cfg(&[(0.0, 0.0), (2.0, 0.1), (2.2, 1.3), (0.1, 1.1), (1.0, 2.5)]);
        let mut checked = 0;
        for t in crate::topology::enumerate_full_types(5).unwrap() {
            if let Ok(exact) = realize_full(&t, &p) {
                let r = smith_relax(&t, &p, 10_000, 1e-10).unwrap();
                assert!((r.length - exact.length).abs() < 1e-6);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}
