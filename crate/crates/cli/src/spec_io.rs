//! JSON spec ingestion.
//!
//! Schema (complex scalars are `[re, im]`, matrices row-major nested arrays):
//!
//! ```json
//! {
//!   "mode": "abstract",
//!   "h_dim": 2,
//!   "t": [[[0.0,0.0], ...], ...],      // h^2 x h^2
//!   "n_max": 3,
//!   "tol": 1e-8
//! }
//! {
//!   "mode": "multicomponent",
//!   "n_sites": 3,
//!   "internal_dim": 2,
//!   "rule": {"kind": "constant", "matrix": [[[re,im],...],...]},
//!   "n_max": 3,
//!   "tol": 1e-8
//! }
//! ```
//!
//! Rule kinds: `constant`, `sign_split` (both take `matrix`, m^2 x m^2);
//! `per_pair` takes `blocks: [{"x":0,"y":1,"matrix":...}, ...]` for x < y;
//! `scalar_pair` takes `q1`, `q2` as N x N tables of `[re, im]`.

use fockforge_core::braid_rep::DeformationOperator;
use fockforge_core::multi_component::{build_t, CRule, MultiSpec, SiteModel};
use fockforge_core::tensor_core::{CMatrix, C64};
use fockforge_core::CoreError;
use serde::Deserialize;
use std::collections::BTreeMap;

/// Largest per-level dimension the desk-scale engine will attempt.
pub const MAX_LEVEL_DIM: usize = 8192;
/// Largest truncation depth (the direct positivity oracle enumerates S_n).
pub const MAX_N: usize = 8;

/// Loader failure, split by exit-code class.
#[derive(Debug)]
pub enum LoadError {
    /// Unreadable or malformed input, or an invariant violation (exit 2).
    Malformed(String),
    /// The request is structurally fine but too large (exit 3).
    Budget(String),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Malformed(m) => write!(f, "malformed spec: {m}"),
            LoadError::Budget(m) => write!(f, "dimension budget exceeded: {m}"),
        }
    }
}

pub type Mat = Vec<Vec<[f64; 2]>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub mode: String,
    pub h_dim: Option<usize>,
    pub t: Option<Mat>,
    pub n_sites: Option<usize>,
    pub internal_dim: Option<usize>,
    pub rule: Option<RuleFile>,
    pub n_max: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    pub kind: String,
    pub matrix: Option<Mat>,
    pub blocks: Option<Vec<PairBlock>>,
    pub q1: Option<Mat>,
    pub q2: Option<Mat>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairBlock {
    pub x: usize,
    pub y: usize,
    pub matrix: Mat,
}

/// A fully built verification subject.
pub struct LoadedSpec {
    pub d: DeformationOperator,
    pub multi: Option<MultiSpec>,
    pub n_max: usize,
    pub tol: f64,
    pub describe: String,
}

pub fn mat_to_cmatrix(m: &Mat, what: &str) -> Result<CMatrix, LoadError> {
    let rows = m.len();
    if rows == 0 {
        return Err(LoadError::Malformed(format!("{what}: empty matrix")));
    }
    let cols = m[0].len();
    let mut out = CMatrix::zeros(rows, cols);
    for (r, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(LoadError::Malformed(format!("{what}: ragged rows")));
        }
        for (c, z) in row.iter().enumerate() {
            out.set(r, c, C64::new(z[0], z[1]));
        }
    }
    Ok(out)
}

pub fn cmatrix_to_mat(m: &CMatrix) -> Mat {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| {
            let z = m.get(r, c);
            [z.re, z.im]
        }).collect())
        .collect()
}

fn core_err(e: CoreError) -> LoadError {
    LoadError::Malformed(format!("{e:?}"))
}

fn check_budget(h: usize, n_max: usize, sector: Option<(usize, usize)>) -> Result<(), LoadError> {
    if n_max > MAX_N {
        return Err(LoadError::Budget(format!("n_max {n_max} exceeds limit {MAX_N}")));
    }
    for n in 0..=n_max {
        let dim: usize = match sector {
            None => h.checked_pow(n as u32).unwrap_or(usize::MAX),
            Some((sites, m)) => {
                if n > sites {
                    0
                } else {
                    let falling: usize = (0..n).map(|k| sites - k).product();
                    falling.saturating_mul(m.checked_pow(n as u32).unwrap_or(usize::MAX))
                }
            }
        };
        if dim > MAX_LEVEL_DIM {
            return Err(LoadError::Budget(format!(
                "level {n} dimension {dim} exceeds limit {MAX_LEVEL_DIM}"
            )));
        }
    }
    Ok(())
}

pub fn parse_spec(text: &str) -> Result<LoadedSpec, LoadError> {
    let file: SpecFile =
        serde_json::from_str(text).map_err(|e| LoadError::Malformed(e.to_string()))?;
    let n_max = file.n_max.unwrap_or(3);
    let tol = file.tol.unwrap_or(1e-8);
    if !(tol > 0.0) {
        return Err(LoadError::Malformed("tol must be positive".into()));
    }
    match file.mode.as_str() {
        "abstract" => {
            let h = file
                .h_dim
                .ok_or_else(|| LoadError::Malformed("abstract mode requires h_dim".into()))?;
            let t = file
                .t
                .ok_or_else(|| LoadError::Malformed("abstract mode requires t".into()))?;
            check_budget(h, n_max, None)?;
            let t = mat_to_cmatrix(&t, "t")?;
            if t.rows() != h * h || t.cols() != h * h {
                return Err(LoadError::Malformed(format!(
                    "t must be {0}x{0} for h_dim {h}",
                    h * h
                )));
            }
            let d = DeformationOperator::new(h, t, tol).map_err(core_err)?;
            Ok(LoadedSpec {
                d,
                multi: None,
                n_max,
                tol,
                describe: format!("abstract h_dim={h}"),
            })
        }
        "multicomponent" => {
            let n_sites = file
                .n_sites
                .ok_or_else(|| LoadError::Malformed("multicomponent mode requires n_sites".into()))?;
            let m = file.internal_dim.ok_or_else(|| {
                LoadError::Malformed("multicomponent mode requires internal_dim".into())
            })?;
            let rule = file
                .rule
                .ok_or_else(|| LoadError::Malformed("multicomponent mode requires rule".into()))?;
            if n_max > n_sites {
                return Err(LoadError::Malformed(format!(
                    "n_max {n_max} exceeds the number of sites {n_sites}; the distinct-site sector is empty beyond that depth"
                )));
            }
            check_budget(n_sites * m, n_max, Some((n_sites, m)))?;
            let crule = parse_rule(&rule)?;
            let spec = MultiSpec {
                sites: SiteModel { n_sites, internal_dim: m },
                rule: crule,
            };
            let d = build_t(&spec, tol).map_err(core_err)?;
            Ok(LoadedSpec {
                d,
                multi: Some(spec),
                n_max,
                tol,
                describe: format!("multicomponent n_sites={n_sites} internal_dim={m} rule={}", rule.kind),
            })
        }
        other => Err(LoadError::Malformed(format!("unknown mode {other:?}"))),
    }
}

fn parse_rule(rule: &RuleFile) -> Result<CRule, LoadError> {
    fn need_matrix(r: &RuleFile) -> Result<&Mat, LoadError> {
        r.matrix
            .as_ref()
            .ok_or_else(|| LoadError::Malformed(format!("rule {:?} requires matrix", r.kind)))
    }
    match rule.kind.as_str() {
        "constant" => Ok(CRule::Constant(mat_to_cmatrix(need_matrix(rule)?, "rule matrix")?)),
        "sign_split" => Ok(CRule::SignSplit(mat_to_cmatrix(need_matrix(rule)?, "rule matrix")?)),
        "per_pair" => {
            let blocks = rule
                .blocks
                .as_ref()
                .ok_or_else(|| LoadError::Malformed("per_pair rule requires blocks".into()))?;
            let mut table = BTreeMap::new();
            for b in blocks {
                if b.x >= b.y {
                    return Err(LoadError::Malformed(format!(
                        "per_pair block ({}, {}) must have x < y",
                        b.x, b.y
                    )));
                }
                table.insert((b.x, b.y), mat_to_cmatrix(&b.matrix, "pair block")?);
            }
            Ok(CRule::PerPair(table))
        }
        "scalar_pair" => {
            let q1 = rule
                .q1
                .as_ref()
                .ok_or_else(|| LoadError::Malformed("scalar_pair rule requires q1".into()))?;
            let q2 = rule
                .q2
                .as_ref()
                .ok_or_else(|| LoadError::Malformed("scalar_pair rule requires q2".into()))?;
            let flat = |m: &Mat, what: &str| -> Result<Vec<C64>, LoadError> {
                let n = m.len();
                let mut out = Vec::with_capacity(n * n);
                for row in m {
                    if row.len() != n {
                        return Err(LoadError::Malformed(format!("{what} must be square")));
                    }
                    for z in row {
                        out.push(C64::new(z[0], z[1]));
                    }
                }
                Ok(out)
            };
            Ok(CRule::ScalarPair { q1: flat(q1, "q1")?, q2: flat(q2, "q2")? })
        }
        other => Err(LoadError::Malformed(format!("unknown rule kind {other:?}"))),
    }
}

/// Re-validate the budget and sector constraints after command-line
/// overrides of the depth or tolerance.
pub fn apply_overrides(
    loaded: &mut LoadedSpec,
    n_max: Option<usize>,
    tol: Option<f64>,
) -> Result<(), LoadError> {
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(LoadError::Malformed("tol must be positive".into()));
        }
        loaded.tol = t;
    }
    if let Some(n) = n_max {
        match loaded.multi.as_ref() {
            Some(ms) => {
                if n > ms.sites.n_sites {
                    return Err(LoadError::Malformed(format!(
                        "n_max {n} exceeds the number of sites {}; the distinct-site sector is empty beyond that depth",
                        ms.sites.n_sites
                    )));
                }
                check_budget(loaded.d.h_dim(), n, Some((ms.sites.n_sites, ms.sites.internal_dim)))?;
            }
            None => check_budget(loaded.d.h_dim(), n, None)?,
        }
        loaded.n_max = n;
    }
    Ok(())
}

pub fn load_spec_file(path: &str) -> Result<LoadedSpec, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Malformed(format!("cannot read {path}: {e}")))?;
    parse_spec(&text)
}
