use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{Point, GEOM_EPS};

/// A labeled configuration of pairwise distinct, finite planar points.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<Point>,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::DegenerateInput(format!("point {i} is not finite")));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].dist(points[j]) <= GEOM_EPS {
                    return Err(Error::DegenerateInput(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Configuration { points })
    }

    pub fn from_xy(xy: &[(f64, f64)]) -> Result<Self> {
        Self::new(xy.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    /// The points with the given indices, in that order.
    pub fn subset(&self, idx: &[usize]) -> Configuration {
        Configuration { points: idx.iter().map(|&i| self.points[i]).collect() }
    }

    /// Applies `f` to every point and revalidates.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<Configuration> {
        Configuration::new(self.points.iter().map(|&p| f(p)).collect())
    }

    /// Point (1 − t)·self + t·other; errors if the result leaves the configuration space.
    pub fn lerp(&self, other: &Configuration, t: f64) -> Result<Configuration> {
        if self.len() != other.len() {
            return Err(Error::Precondition(format!(
                "configurations have {} and {} points",
                self.len(),
                other.len()
            )));
        }
        Configuration::new(
            self.points.iter().zip(&other.points).map(|(&a, &b)| a.lerp(b, t)).collect(),
        )
    }

    /// Coordinates flattened as x₀, y₀, x₁, y₁, …
    pub fn to_flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| [p.x, p.y]).collect()
    }

    pub fn from_flat(xy: &[f64]) -> Result<Configuration> {
        if !xy.len().is_multiple_of(2) {
            return Err(Error::DegenerateInput("odd number of coordinates".into()));
        }
        Configuration::new(xy.chunks(2).map(|c| Point::new(c[0], c[1])).collect())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", p.x, p.y)?;
        }
        write!(f, "]")
    }
}
