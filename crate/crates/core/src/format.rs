//! JSON wire formats shared by the CLI and the HTTP service.
//!
//! Vertex ids are 1-based: terminals are `1..=n`, Steiner points `n+1..`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ambiguity::{PathTrace, WallHit};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::length::LengthFunction;
use crate::realization::RealizedTree;
use crate::solver::{Candidate, SolveResult};
use crate::topology::CombinatorialType;

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeJson {
    pub n: usize,
    pub steiner: usize,
    pub edges: Vec<[usize; 2]>,
    /// Neighbors of every vertex, counterclockwise when `oriented`.
    pub cyclic: BTreeMap<usize, Vec<usize>>,
    #[serde(default = "default_true")]
    pub oriented: bool,
}

impl From<&CombinatorialType> for TypeJson {
    fn from(t: &CombinatorialType) -> Self {
        TypeJson {
            n: t.n_terminals(),
            steiner: t.n_steiner(),
            edges: t.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
            cyclic: (0..t.n_vertices())
                .map(|v| (v + 1, t.neighbors(v).iter().map(|w| w + 1).collect()))
                .collect(),
            oriented: t.is_oriented(),
        }
    }
}

impl TryFrom<&TypeJson> for CombinatorialType {
    type Error = Error;

    fn try_from(j: &TypeJson) -> Result<Self> {
        let v = j.n + j.steiner;
        let zero = |id: usize| {
            if id == 0 || id > v {
                Err(Error::InvalidType(format!("vertex id {id} out of range 1..={v}")))
            } else {
                Ok(id - 1)
            }
        };
        let mut adj = vec![Vec::new(); v];
        for (&id, ns) in &j.cyclic {
            adj[zero(id)?] = ns.iter().map(|&w| zero(w)).collect::<Result<_>>()?;
        }
        let t = CombinatorialType::new(j.n, adj, j.oriented)?;
        let mut edges: Vec<(usize, usize)> = j
            .edges
            .iter()
            .map(|&[a, b]| Ok((zero(a)?.min(zero(b)?), zero(a)?.max(zero(b)?))))
            .collect::<Result<_>>()?;
        edges.sort_unstable();
        if edges != t.edges() {
            return Err(Error::InvalidType("edge list disagrees with the cyclic orders".into()));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    #[serde(rename = "type")]
    pub ty: TypeJson,
    pub positions: BTreeMap<usize, [f64; 2]>,
    pub length: f64,
}

impl From<&RealizedTree> for TreeJson {
    fn from(rt: &RealizedTree) -> Self {
        TreeJson {
            ty: TypeJson::from(&rt.ty),
            positions: rt.positions.iter().enumerate().map(|(i, &p)| (i + 1, p.into())).collect(),
            length: rt.length,
        }
    }
}

/// Coefficients of one full component: `[[re, im], …]` per terminal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxwellJson {
    pub terminals: Vec<usize>,
    pub c: Vec<[f64; 2]>,
}

fn maxwell_json(rt: &RealizedTree) -> Vec<MaxwellJson> {
    LengthFunction::from_realization(rt)
        .map(|lf| {
            lf.components
                .iter()
                .map(|(terms, mc)| MaxwellJson {
                    terminals: terms.iter().map(|t| t + 1).collect(),
                    c: mc.c.iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect()
        })
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub code: String,
    pub length: f64,
    pub tree: TreeJson,
    pub maxwell: Vec<MaxwellJson>,
    /// Unit directions of the edges leaving each terminal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<BTreeMap<usize, Vec<[f64; 2]>>>,
}

impl CandidateJson {
    pub fn new(c: &Candidate, with_directions: bool) -> Self {
        let directions = with_directions.then(|| {
            (0..c.ty.n_terminals())
                .map(|i| (i + 1, c.tree.terminal_directions(i).into_iter().map(Into::into).collect()))
                .collect()
        });
        CandidateJson {
            code: String::from_utf8_lossy(&c.code).into_owned(),
            length: c.length,
            tree: TreeJson::from(&c.tree),
            maxwell: maxwell_json(&c.tree),
            directions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResultJson {
    pub n: usize,
    pub min_length: f64,
    pub ambiguous: bool,
    pub tie_tolerance: f64,
    #[serde(default)]
    pub runner_up_gap: Option<f64>,
    pub minimal: Vec<CandidateJson>,
    pub candidates: Vec<CandidateJson>,
    pub total_candidates: usize,
}

impl SolveResultJson {
    /// `top_k` truncates the candidate list; `None` keeps all of them.
    pub fn new(r: &SolveResult, top_k: Option<usize>, with_directions: bool) -> Self {
        let k = top_k.unwrap_or(usize::MAX).min(r.candidates.len());
        SolveResultJson {
            n: r.best().ty.n_terminals(),
            min_length: r.min_length(),
            ambiguous: r.ambiguous,
            tie_tolerance: r.tie_tolerance,
            runner_up_gap: r.runner_up_gap(),
            minimal: r.minimal().iter().map(|c| CandidateJson::new(c, with_directions)).collect(),
            candidates: r.candidates[..k].iter().map(|c| CandidateJson::new(c, with_directions)).collect(),
            total_candidates: r.candidates.len(),
        }
    }
}

/// Input file: `{"points": [[x, y], …], "labels": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ConfigFile {
    pub fn from_configuration(p: &Configuration) -> Self {
        ConfigFile { points: p.points().iter().map(|&q| q.into()).collect(), labels: None }
    }

    /// Validates: at least two finite, pairwise distinct points and one label per point.
    pub fn to_configuration(&self) -> Result<Configuration> {
        if self.points.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "need at least 2 points, got {}",
                self.points.len()
            )));
        }
        if let Some(l) = &self.labels {
            if l.len() != self.points.len() {
                return Err(Error::DegenerateInput(format!(
                    "{} labels for {} points",
                    l.len(),
                    self.points.len()
                )));
            }
        }
        Configuration::new(self.points.iter().map(|&p| Point::from(p)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WallHitJson {
    pub t_star: f64,
    pub config: Vec<[f64; 2]>,
    pub types: [TypeJson; 2],
    pub codes: [String; 2],
    pub lengths: [f64; 2],
    pub gap: f64,
    pub trees: [Option<TreeJson>; 2],
}

impl From<&WallHit> for WallHitJson {
    fn from(h: &WallHit) -> Self {
        let code = |t: &CombinatorialType| String::from_utf8_lossy(&t.topology_code()).into_owned();
        WallHitJson {
            t_star: h.t_star,
            config: h.config.points().iter().map(|&p| p.into()).collect(),
            types: [TypeJson::from(&h.types.0), TypeJson::from(&h.types.1)],
            codes: [code(&h.types.0), code(&h.types.1)],
            lengths: [h.lengths.0, h.lengths.1],
            gap: h.gap,
            trees: [h.trees.0.as_ref().map(TreeJson::from), h.trees.1.as_ref().map(TreeJson::from)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PathSampleJson {
    pub t: f64,
    pub code: String,
    pub min_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathTraceJson {
    pub samples: Vec<PathSampleJson>,
    pub events: Vec<[f64; 2]>,
}

impl From<&PathTrace> for PathTraceJson {
    fn from(tr: &PathTrace) -> Self {
        PathTraceJson {
            samples: tr
                .samples
                .iter()
                .map(|s| PathSampleJson {
                    t: s.t,
                    code: String::from_utf8_lossy(&s.code).into_owned(),
                    min_length: s.min_length,
                })
                .collect(),
            events: tr.events.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

/// A type with its canonical code, as listed by enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEntryJson {
    pub code: String,
    #[serde(rename = "type")]
    pub ty: TypeJson,
}

impl From<&CombinatorialType> for TypeEntryJson {
    fn from(t: &CombinatorialType) -> Self {
        TypeEntryJson { code: t.code_string(), ty: TypeJson::from(t) }
    }
}
