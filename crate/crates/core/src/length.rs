//! Closed-form lengths of full types: `F(p) = |Σ cᵢ pᵢ|`.
//!
//! Summing `e^{-i arg(v_k - v_j)} (v_k - v_j)` over the edges of a realization
//! recovers its length. Regrouping by vertex, the unit vectors at each Steiner
//! point cancel, leaving one unit coefficient per terminal: the conjugate of
//! the direction in which the tree leaves that terminal. The coefficients
//! extracted from one realization stay valid on the whole connected region
//! of configurations where the type keeps realizing.

use num_complex::Complex64;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geom::GEOM_EPS;
use crate::realization::RealizedTree;
use crate::topology::{full_components, CombinatorialType};

/// Unit coefficients of a full type, one per terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellCoefficients {
    pub ty: CombinatorialType,
    pub c: Vec<Complex64>,
}

impl MaxwellCoefficients {
    pub fn sum(&self) -> Complex64 {
        self.c.iter().sum()
    }

    /// `Σ cᵢ pᵢ` for the given terminal positions.
    fn weighted_sum(&self, points: impl Iterator<Item = Complex64>) -> Complex64 {
        self.c.iter().zip(points).map(|(c, p)| c * p).sum()
    }
}

/// Extracts `cᵢ = e^{-i arg(pᵢ - sᵢ)}` from a realization of a full type.
pub fn maxwell_coefficients(rt: &RealizedTree) -> Result<MaxwellCoefficients> {
    if !rt.ty.is_full() {
        return Err(Error::Precondition("Maxwell coefficients need a full type".into()));
    }
    let c = (0..rt.ty.n_terminals())
        .map(|i| {
            let s = rt.ty.neighbors(i)[0];
            terminal_coefficient(rt, i, s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MaxwellCoefficients { ty: rt.ty.clone(), c })
}

fn terminal_coefficient(rt: &RealizedTree, terminal: usize, neighbor: usize) -> Result<Complex64> {
    let d = (rt.positions[terminal] - rt.positions[neighbor]).to_complex();
    let r = d.norm();
    if r < GEOM_EPS {
        return Err(Error::DegenerateInput(format!("terminal edge at {terminal} has zero length")));
    }
    Ok(d.conj() / r)
}

/// `|Σ cᵢ pᵢ|`, treating points as complex numbers.
pub fn maxwell_length(mc: &MaxwellCoefficients, p: &Configuration) -> f64 {
    mc.weighted_sum(p.points().iter().map(|q| q.to_complex())).norm()
}

/// Gradient of `|Σ cᵢ pᵢ|` in the 2n real coordinates, laid out x₀, y₀, x₁, y₁, …
pub fn length_gradient(mc: &MaxwellCoefficients, p: &Configuration) -> Result<Vec<f64>> {
    let s = mc.weighted_sum(p.points().iter().map(|q| q.to_complex()));
    let r = s.norm();
    if r < GEOM_EPS {
        return Err(Error::DegenerateInput("Maxwell sum vanishes".into()));
    }
    let u = s.conj() / r;
    Ok(mc.c.iter().flat_map(|&c| {
        let w = u * c;
        [w.re, -w.im]
    }).collect())
}

/// Length of any type as the sum of its full components' Maxwell moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthFunction {
    pub n_terminals: usize,
    /// Global terminal ids of each component with its coefficients (in that order).
    pub components: Vec<(Vec<usize>, MaxwellCoefficients)>,
}

impl LengthFunction {
    /// Coefficients of every full component of a realization.
    pub fn from_realization(rt: &RealizedTree) -> Result<LengthFunction> {
        let d = full_components(&rt.ty);
        let components = d
            .components
            .iter()
            .map(|comp| {
                let c = comp
                    .terminals
                    .iter()
                    .enumerate()
                    .map(|(local, &g)| {
                        let inside = comp.global(comp.ty.neighbors(local)[0]);
                        terminal_coefficient(rt, g, inside)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((comp.terminals.clone(), MaxwellCoefficients { ty: comp.ty.clone(), c }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LengthFunction { n_terminals: rt.ty.n_terminals(), components })
    }

    pub fn evaluate(&self, p: &Configuration) -> f64 {
        self.components
            .iter()
            .map(|(terms, mc)| mc.weighted_sum(terms.iter().map(|&i| p.point(i).to_complex())).norm())
            .sum()
    }

    pub fn gradient(&self, p: &Configuration) -> Result<Vec<f64>> {
        let mut g = vec![0.0; 2 * self.n_terminals];
        for (terms, mc) in &self.components {
            let part = length_gradient(mc, &p.subset(terms))?;
            for (k, &i) in terms.iter().enumerate() {
                g[2 * i] += part[2 * k];
                g[2 * i + 1] += part[2 * k + 1];
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::realization::{realize, realize_full};
    use std::f64::consts::PI;

    const S3: f64 = 1.732_050_807_568_877_2;

    fn equilateral() -> Configuration {
        Configuration::from_xy(&[(0.0, 0.0), (1.0, 0.0), (0.5, S3 / 2.0)]).unwrap()
    }

    #[test]
    fn tripod_coefficients() {
        let p = equilateral();
        let rt = realize_full(&CombinatorialType::tripod(), &p).unwrap();
        let mc = maxwell_coefficients(&rt).unwrap();
        assert!(mc.sum().norm() < 1e-12);
        for (i, c) in mc.c.iter().enumerate() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
            // oracle: direction from the Steiner point out to the terminal, conjugated
            let d = (p.point(i) - rt.positions[3]).unit().unwrap();
            assert!((c - Complex64::new(d.x, -d.y)).norm() < 1e-12);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let diff = (mc.c[i] / mc.c[j]).arg().abs();
                assert!((diff - 2.0 * PI / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tripod_length_examples() {
        let p = equilateral();
        let mc = maxwell_coefficients(&realize_full(&CombinatorialType::tripod(), &p).unwrap()).unwrap();
        assert!((maxwell_length(&mc, &p) - S3).abs() < 1e-9);
        let moved = p.map(|q| q + Point::new(5.0, -7.0)).unwrap();
        assert!((maxwell_length(&mc, &moved) - S3).abs() < 1e-9);
        let scaled = p.map(|q| q * 2.0).unwrap();
        assert!((maxwell_length(&mc, &scaled) - 2.0 * S3).abs() < 1e-9);
    }

    #[test]
    fn square_spine_length() {
        let p = Configuration::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        for t in crate::topology::enumerate_full_types(4).unwrap() {
            if let Ok(rt) = realize_full(&t, &p) {
                let mc = maxwell_coefficients(&rt).unwrap();
                let edge_sum: f64 = rt.edges().iter().map(|&(a, b)| rt.edge_length(a, b)).sum();
                assert!((maxwell_length(&mc, &p) - edge_sum).abs() < 1e-9);
                assert!((edge_sum - (1.0 + S3)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gradient_of_tripod() {
        let p = equilateral();
        let rt = realize_full(&CombinatorialType::tripod(), &p).unwrap();
        let mc = maxwell_coefficients(&rt).unwrap();
        let g = length_gradient(&mc, &p).unwrap();
        let h = 1e-6;
        let flat = p.to_flat();
        for k in 0..6 {
            // oracle: central differences of the realized (not Maxwell) length
            let mut plus = flat.clone();
            plus[k] += h;
            let mut minus = flat.clone();
            minus[k] -= h;
            let lp = realize_full(&CombinatorialType::tripod(), &Configuration::from_flat(&plus).unwrap()).unwrap().length;
            let lm = realize_full(&CombinatorialType::tripod(), &Configuration::from_flat(&minus).unwrap()).unwrap().length;
            assert!(((lp - lm) / (2.0 * h) - g[k]).abs() < 1e-5);
        }
        for i in 0..3 {
            let block = Point::new(g[2 * i], g[2 * i + 1]);
            assert!((block.norm() - 1.0).abs() < 1e-9);
            let away = (p.point(i) - rt.positions[3]).unit().unwrap();
            assert!(block.dist(away) < 1e-9);
        }
        let sx: f64 = (0..3).map(|i| g[2 * i]).sum();
        let sy: f64 = (0..3).map(|i| g[2 * i + 1]).sum();
        assert!(sx.abs() < 1e-9 && sy.abs() < 1e-9);
    }

    #[test]
    fn non_full_types_sum_components() {
        let p = Configuration::from_xy(&[(0.0, 0.0), (1.0, 0.1), (2.0, 0.0)]).unwrap();
        let rt = realize(&CombinatorialType::path(&[0, 1, 2]).unwrap(), &p).unwrap();
        let lf = LengthFunction::from_realization(&rt).unwrap();
        assert_eq!(lf.components.len(), 2);
        assert!((lf.evaluate(&p) - rt.length).abs() < 1e-12);
        let q = p.map(|x| x.rotate(0.3) * 1.5).unwrap();
        let want = 1.5 * rt.length;
        assert!((lf.evaluate(&q) - want).abs() < 1e-12);
        assert!(maxwell_coefficients(&rt).is_err());
    }

    #[test]
    fn rotation_multiplies_coefficients_by_a_phase() {
        let p = Configuration::from_xy(&[(0.0, 0.0), (2.0, 0.1), (2.2, 1.3), (0.1, 1.1)]).unwrap();
        let phi = 0.7;
        let q = p.map(|x| x.rotate(phi)).unwrap();
        for t in crate::topology::enumerate_full_types(4).unwrap() {
            let (Ok(a), Ok(b)) = (realize_full(&t, &p), realize_full(&t, &q)) else { continue };
            let ma = maxwell_coefficients(&a).unwrap();
            let mb = maxwell_coefficients(&b).unwrap();
            let phase = Complex64::from_polar(1.0, -phi);
            for (ca, cb) in ma.c.iter().zip(&mb.c) {
                assert!((ca * phase - cb).norm() < 1e-9);
            }
            assert!((maxwell_length(&ma, &p) - maxwell_length(&mb, &q)).abs() < 1e-9);
        }
    }
}
