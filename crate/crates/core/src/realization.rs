//! Realization of combinatorial types on a configuration (Melzak construction).
//!
//! A full type is realized in two phases. The merge phase roots the tree at
//! a terminal and repeatedly replaces a cherry (a Steiner point whose two
//! children are already resolved) by the third point of the equilateral
//! triangle on its children's equivalent points. The side of that triangle is
//! what the cyclic order at the Steiner point encodes. The reconstruction
//! phase walks back from the root: each Steiner point is the intersection of
//! the segment from its parent towards its equivalent point with the 2π/3 arc
//! recorded for it. A type is not realizable when an intersection is missing,
//! falls on the boundary of its arc, or collapses an edge.
//!
//! Non-full types are realized per full component and glued at shared
//! terminals, where every angle must be at least 2π/3.

use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geom::{
    angle_at, intersect_segment_arc, segments_touch, third_equilateral_point, Arc, Point, Side,
    ANGLE_EPS, GEOM_EPS, LENGTH_EPS, STEINER_ANGLE,
};
use crate::topology::{full_components, CombinatorialType, FullComponent, FullComponentDecomposition};

/// A planar embedding of a type: vertex positions indexed like the type's vertices.
///
/// `ty` is oriented: its adjacency lists are the counterclockwise orders
/// actually realized.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedTree {
    pub ty: CombinatorialType,
    pub positions: Vec<Point>,
    pub length: f64,
}

impl RealizedTree {
    fn from_positions(ty: CombinatorialType, positions: Vec<Point>) -> Self {
        let length = ty.edges().iter().map(|&(a, b)| positions[a].dist(positions[b])).sum();
        RealizedTree { ty, positions, length }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.ty.edges()
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        self.positions[a].dist(self.positions[b])
    }

    /// Unit directions of the edges leaving terminal `i`, in the type's cyclic order.
    pub fn terminal_directions(&self, i: usize) -> Vec<Point> {
        let p = self.positions[i];
        self.ty
            .neighbors(i)
            .iter()
            .map(|&w| (self.positions[w] - p).unit().unwrap_or(Point::ORIGIN))
            .collect()
    }

    /// Checks every structural invariant of a realization of `config`.
    /// Returns a description of the first violation.
    pub fn verify(&self, config: &Configuration) -> std::result::Result<(), String> {
        let n = self.ty.n_terminals();
        if config.len() != n {
            return Err(format!("{n} terminals vs {} points", config.len()));
        }
        for i in 0..n {
            if self.positions[i] != config.point(i) {
                return Err(format!("terminal {i} moved"));
            }
        }
        let edges = self.edges();
        for &(a, b) in &edges {
            if self.edge_length(a, b) <= GEOM_EPS {
                return Err(format!("edge ({a}, {b}) collapsed"));
            }
        }
        let sum: f64 = edges.iter().map(|&(a, b)| self.edge_length(a, b)).sum();
        if (sum - self.length).abs() > LENGTH_EPS {
            return Err(format!("length {} vs edge sum {sum}", self.length));
        }
        for v in 0..self.ty.n_vertices() {
            let ns = self.ty.neighbors(v);
            let pv = self.positions[v];
            for i in 0..ns.len() {
                for j in i + 1..ns.len() {
                    let ang = angle_at(pv, self.positions[ns[i]], self.positions[ns[j]])
                        .map_err(|e| e.to_string())?;
                    if self.ty.is_terminal(v) {
                        if ang < STEINER_ANGLE - ANGLE_EPS {
                            return Err(format!("angle {ang} at terminal {v}"));
                        }
                    } else if (ang - STEINER_ANGLE).abs() > ANGLE_EPS {
                        return Err(format!("angle {ang} at Steiner point {v}"));
                    }
                }
            }
            if self.ty.is_oriented() && ns.len() == 3 && !is_ccw_order(pv, ns, &self.positions) {
                return Err(format!("cyclic order at {v} does not match the embedding"));
            }
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            for &(c, d) in &edges[i + 1..] {
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                let p = &self.positions;
                if segments_touch(p[a], p[b], p[c], p[d]) {
                    return Err(format!("edges ({a}, {b}) and ({c}, {d}) cross"));
                }
            }
        }
        Ok(())
    }
}

/// Whether `ns` (three neighbors of a vertex at `v`) appear counterclockwise.
fn is_ccw_order(v: Point, ns: &[usize], positions: &[Point]) -> bool {
    let base = (positions[ns[0]] - v).arg();
    let off = |w: usize| ((positions[w] - v).arg() - base).rem_euclid(TAU);
    off(ns[1]) < off(ns[2])
}

/// Counterclockwise order of the neighbors of the vertex at `v`, starting from `ns[0]`.
fn ccw_sorted(v: Point, ns: &[usize], positions: &[Point]) -> Vec<usize> {
    let base = (positions[ns[0]] - v).arg();
    let mut out = ns.to_vec();
    out.sort_by(|&a, &b| {
        let oa = ((positions[a] - v).arg() - base).rem_euclid(TAU);
        let ob = ((positions[b] - v).arg() - base).rem_euclid(TAU);
        oa.total_cmp(&ob)
    });
    // the first neighbor has offset 0 but might sort after a tiny negative wrap
    let k = out.iter().position(|&x| x == ns[0]).unwrap_or(0);
    out.rotate_left(k);
    out
}

/// Rooted view of a full type: parent and two ordered children per Steiner point.
struct Rooted {
    root: usize,
    top: usize,
    /// Steiner points in merge order (every child merged before its parent).
    order: Vec<usize>,
    children: HashMap<usize, [usize; 2]>,
}

fn root_full_type(t: &CombinatorialType, root: usize) -> Rooted {
    let top = t.neighbors(root)[0];
    let mut children = HashMap::new();
    let mut stack = vec![(top, root)];
    let mut pre = Vec::new();
    while let Some((v, parent)) = stack.pop() {
        if t.is_terminal(v) {
            continue;
        }
        let ns = t.neighbors(v);
        let p = ns.iter().position(|&x| x == parent).expect("parent adjacent");
        // children in counterclockwise order after the parent
        let kids = [ns[(p + 1) % 3], ns[(p + 2) % 3]];
        children.insert(v, kids);
        pre.push(v);
        for k in kids {
            stack.push((k, v));
        }
    }
    // merge cherries smallest first: repeatedly take the smallest Steiner
    // point whose children are resolved
    let mut resolved: Vec<bool> = (0..t.n_vertices()).map(|v| t.is_terminal(v)).collect();
    let mut order = Vec::with_capacity(pre.len());
    while order.len() < pre.len() {
        let next = pre
            .iter()
            .copied()
            .filter(|&v| !resolved[v] && children[&v].iter().all(|&c| resolved[c]))
            .min()
            .expect("a rooted tree always has a cherry");
        resolved[next] = true;
        order.push(next);
    }
    Rooted { root, top, order, children }
}

/// One attempt at the Melzak construction with fixed sides per Steiner point.
/// `sides[v]` is `Right` when the children (c₁, c₂) follow the parent
/// counterclockwise: the equivalent point lies across the chord from the
/// Steiner point, in the direction opposite its parent edge.
fn melzak(
    t: &CombinatorialType,
    config: &Configuration,
    rooted: &Rooted,
    sides: &HashMap<usize, Side>,
) -> Result<Vec<Point>> {
    let nv = t.n_vertices();
    let mut equiv = vec![Point::ORIGIN; nv];
    equiv[..t.n_terminals()].copy_from_slice(config.points());
    let mut arcs: HashMap<usize, Arc> = HashMap::new();
    for &v in &rooted.order {
        let [c1, c2] = rooted.children[&v];
        let (a, b) = (equiv[c1], equiv[c2]);
        let e = third_equilateral_point(a, b, sides[&v])
            .map_err(|_| Error::NotRealizable(format!("equivalent points of {c1}, {c2} coincide")))?;
        equiv[v] = e;
        let center = (a + b + e) * (1.0 / 3.0);
        let radius = a.dist(b) / 3f64.sqrt();
        // the arc between a and b that avoids e
        let (from, to) = match sides[&v] {
            Side::Left => (a, b),
            Side::Right => (b, a),
        };
        arcs.insert(
            v,
            Arc { center, radius, start_angle: (from - center).arg(), end_angle: (to - center).arg() },
        );
    }

    let mut pos = equiv.clone();
    let mut stack = vec![(rooted.top, rooted.root)];
    while let Some((v, parent)) = stack.pop() {
        if t.is_terminal(v) {
            if pos[v].dist(pos[parent]) <= GEOM_EPS {
                return Err(Error::NotRealizable(format!("edge ({parent}, {v}) collapses")));
            }
            continue;
        }
        let arc = arcs[&v];
        let from = pos[parent];
        let hit = intersect_segment_arc(from, equiv[v], &arc)
            .into_iter()
            .find(|h| h.dist(equiv[v]) > GEOM_EPS)
            .ok_or_else(|| Error::NotRealizable(format!("Steiner point {v} misses its arc")))?;
        if hit.dist(arc.start_point()) <= GEOM_EPS || hit.dist(arc.end_point()) <= GEOM_EPS {
            return Err(Error::NotRealizable(format!("Steiner point {v} on its arc boundary")));
        }
        if hit.dist(from) <= GEOM_EPS {
            return Err(Error::NotRealizable(format!("edge ({parent}, {v}) collapses")));
        }
        pos[v] = hit;
        for c in rooted.children[&v] {
            stack.push((c, v));
        }
    }
    Ok(pos)
}

fn oriented_from_sides(t: &CombinatorialType, rooted: &Rooted, sides: &HashMap<usize, Side>) -> CombinatorialType {
    let mut adj = t.adjacency().to_vec();
    let mut stack = vec![(rooted.top, rooted.root)];
    while let Some((v, parent)) = stack.pop() {
        if t.is_terminal(v) {
            continue;
        }
        let [c1, c2] = rooted.children[&v];
        adj[v] = match sides[&v] {
            Side::Right => vec![parent, c1, c2],
            Side::Left => vec![parent, c2, c1],
        };
        stack.push((c1, v));
        stack.push((c2, v));
    }
    t.with_orientation(adj).expect("reordering keeps the tree")
}

/// Realizes a full type, rooting the construction at terminal `root`.
pub fn realize_full_rooted(
    t: &CombinatorialType,
    config: &Configuration,
    root: usize,
) -> Result<RealizedTree> {
    let n = t.n_terminals();
    if !t.is_full() {
        return Err(Error::Precondition("realize_full needs a full type".into()));
    }
    if config.len() != n {
        return Err(Error::Precondition(format!("type has {n} terminals, configuration {}", config.len())));
    }
    if root >= n {
        return Err(Error::Precondition(format!("root {root} is not a terminal")));
    }
    if n == 2 {
        let ty = t.with_orientation(t.adjacency().to_vec())?;
        return Ok(RealizedTree::from_positions(ty, config.points().to_vec()));
    }
    let rooted = root_full_type(t, root);
    let steiner = rooted.order.clone();
    let attempts: Vec<HashMap<usize, Side>> = if t.is_oriented() {
        vec![steiner.iter().map(|&v| (v, Side::Right)).collect()]
    } else {
        (0..1u32 << steiner.len())
            .map(|mask| {
                steiner
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| (v, if mask & (1 << j) == 0 { Side::Left } else { Side::Right }))
                    .collect()
            })
            .collect()
    };
    let mut last_err = Error::NotRealizable("no side assignment realizes".into());
    for sides in attempts {
        match melzak(t, config, &rooted, &sides) {
            Ok(pos) => {
                let ty = if t.is_oriented() { t.clone() } else { oriented_from_sides(t, &rooted, &sides) };
                let tree = RealizedTree::from_positions(ty, pos);
                if let Some(msg) = crossing(&tree) {
                    last_err = Error::NotRealizable(msg);
                    continue;
                }
                return Ok(tree);
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Realizes a full type, or reports `NotRealizable` when the configuration is outside Ω(t).
pub fn realize_full(t: &CombinatorialType, config: &Configuration) -> Result<RealizedTree> {
    realize_full_rooted(t, config, 0)
}

fn crossing(tree: &RealizedTree) -> Option<String> {
    let edges = tree.edges();
    let p = &tree.positions;
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_touch(p[a], p[b], p[c], p[d]) {
                return Some(format!("edges ({a}, {b}) and ({c}, {d}) cross"));
            }
        }
    }
    None
}

/// Realizes one full component on its terminal subset.
pub fn realize_component(c: &FullComponent, config: &Configuration) -> Result<RealizedTree> {
    realize_full(&c.ty, &config.subset(&c.terminals))
}

/// Glues component realizations (local indices) into a realization of the parent type.
pub fn glue_components(
    t: &CombinatorialType,
    decomposition: &FullComponentDecomposition,
    parts: &[&RealizedTree],
    config: &Configuration,
) -> Result<RealizedTree> {
    let mut positions = vec![Point::ORIGIN; t.n_vertices()];
    let mut adj = t.adjacency().to_vec();
    for (c, part) in decomposition.components.iter().zip(parts) {
        for local in 0..c.ty.n_vertices() {
            let g = c.global(local);
            positions[g] = part.positions[local];
            if local >= c.terminals.len() {
                adj[g] = part.ty.neighbors(local).iter().map(|&w| c.global(w)).collect();
            }
        }
    }
    positions[..t.n_terminals()].copy_from_slice(config.points());
    for &term in decomposition.shared_terminals.keys() {
        let p = positions[term];
        let ns = t.neighbors(term);
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                let ang = angle_at(p, positions[ns[i]], positions[ns[j]])?;
                if ang < STEINER_ANGLE - ANGLE_EPS {
                    return Err(Error::NotRealizable(format!(
                        "angle {ang:.6} < 2π/3 at terminal {term}"
                    )));
                }
            }
        }
        adj[term] = ccw_sorted(p, ns, &positions);
    }
    let ty = t.with_orientation(adj)?;
    let tree = RealizedTree::from_positions(ty, positions);
    if let Some(msg) = crossing(&tree) {
        return Err(Error::NotRealizable(msg));
    }
    Ok(tree)
}

/// Realizes any type by realizing each full component and gluing.
pub fn realize(t: &CombinatorialType, config: &Configuration) -> Result<RealizedTree> {
    if config.len() != t.n_terminals() {
        return Err(Error::Precondition(format!(
            "type has {} terminals, configuration {}",
            t.n_terminals(),
            config.len()
        )));
    }
    if t.is_full() {
        return realize_full(t, config);
    }
    let d = full_components(t);
    let parts = d
        .components
        .iter()
        .map(|c| realize_component(c, config))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&RealizedTree> = parts.iter().collect();
    glue_components(t, &d, &refs, config)
}

/// Membership in Ω(t). Only `DegenerateInput`-class errors propagate.
pub fn is_realizable(t: &CombinatorialType, config: &Configuration) -> Result<bool> {
    match realize(t, config) {
        Ok(_) => Ok(true),
        Err(Error::NotRealizable(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::enumerate_full_types;

    const S3: f64 = 1.732_050_807_568_877_2;

    fn equilateral() -> Configuration {
        Configuration::from_xy(&[(0.0, 0.0), (1.0, 0.0), (0.5, S3 / 2.0)]).unwrap()
    }

    fn obtuse() -> Configuration {
        Configuration::from_xy(&[(0.0, 0.0), (1.0, 0.0), (-1.0, 0.3)]).unwrap()
    }

    fn square() -> Configuration {
        Configuration::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn tripod_on_equilateral_triangle() {
        let p = equilateral();
        let r = realize_full(&CombinatorialType::tripod(), &p).unwrap();
        assert!(r.positions[3].dist(Point::new(0.5, S3 / 6.0)) < 1e-12);
        assert!((r.length - S3).abs() < 1e-12);
        r.verify(&p).unwrap();
    }

    #[test]
    fn tripod_on_obtuse_triangle_fails() {
        let p = obtuse();
        assert!(angle_at(p.point(0), p.point(1), p.point(2)).unwrap() > STEINER_ANGLE);
        assert!(matches!(realize_full(&CombinatorialType::tripod(), &p), Err(Error::NotRealizable(_))));
        // the path through the obtuse vertex realizes instead
        let path = CombinatorialType::path(&[1, 0, 2]).unwrap();
        let r = realize(&path, &p).unwrap();
        r.verify(&p).unwrap();
        assert!(!is_realizable(&CombinatorialType::tripod(), &p).unwrap());
        assert!(is_realizable(&path, &p).unwrap());
    }

    #[test]
    fn square_has_two_spines() {
        let p = square();
        let mut lengths: Vec<f64> = enumerate_full_types(4)
            .unwrap()
            .iter()
            .filter_map(|t| realize_full(t, &p).ok())
            .inspect(|r| r.verify(&p).unwrap())
            .map(|r| r.length)
            .collect();
        lengths.sort_by(f64::total_cmp);
        assert_eq!(lengths.len(), 2);
        for l in lengths {
            assert!((l - (1.0 + S3)).abs() < 1e-12);
        }
    }

    #[test]
    fn paths() {
        let p = Configuration::from_xy(&[(0.0, 0.0), (1.0, 0.1), (2.0, 0.0)]).unwrap();
        let path = CombinatorialType::path(&[0, 1, 2]).unwrap();
        let r = realize(&path, &p).unwrap();
        let want = p.point(0).dist(p.point(1)) + p.point(1).dist(p.point(2));
        assert!((r.length - want).abs() < 1e-15);
        assert!(matches!(realize(&path, &equilateral()), Err(Error::NotRealizable(_))));
    }

    #[test]
    fn oriented_types_pick_one_mirror() {
        let p = equilateral();
        let r = realize_full(&CombinatorialType::tripod(), &p).unwrap();
        assert!(r.ty.is_oriented());
        // re-realizing the oriented type works, its mirror does not
        assert!(realize_full(&r.ty, &p).is_ok());
        assert!(matches!(realize_full(&r.ty.mirror(), &p), Err(Error::NotRealizable(_))));
    }

    #[test]
    fn rooting_does_not_change_the_realization() {
        let p = Configuration::from_xy(&[(0.0, 0.0), (2.0, 0.1), (2.2, 1.3), (0.1, 1.1), (1.0, 2.5)]).unwrap();
        let mut found = 0;
        for t in enumerate_full_types(5).unwrap() {
            let Ok(a) = realize_full_rooted(&t, &p, 0) else { continue };
            found += 1;
            for root in 1..5 {
                let b = realize_full_rooted(&t, &p, root).unwrap();
                for (x, y) in a.positions.iter().zip(&b.positions) {
                    assert!(x.dist(*y) < 1e-9);
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn precondition_errors() {
        let path = CombinatorialType::path(&[0, 1, 2]).unwrap();
        assert!(matches!(realize_full(&path, &equilateral()), Err(Error::Precondition(_))));
        assert!(matches!(realize(&CombinatorialType::tripod(), &square()), Err(Error::Precondition(_))));
    }
}
