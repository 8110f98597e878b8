//! Deterministic JSON artifact emission: matrices and level bases of a
//! loaded spec, byte-stable across runs.

use fockforge_core::fock_space::FockTruncation;
use fockforge_core::quant_ops::shuffled;
use serde::Serialize;

use crate::spec_io::{cmatrix_to_mat, LoadError, LoadedSpec, Mat};

#[derive(Serialize)]
struct MatrixArtifact {
    artifact: String,
    n: Option<usize>,
    rows: usize,
    cols: usize,
    /// Row-major, complex entries as [re, im].
    data: Mat,
}

#[derive(Serialize)]
struct BasisArtifact {
    artifact: String,
    n_max: usize,
    /// One list of index tuples per level 0..=n_max.
    levels: Vec<Vec<Vec<usize>>>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s
}

fn matrix_json(artifact: &str, n: Option<usize>, m: &fockforge_core::tensor_core::CMatrix) -> String {
    to_json(&MatrixArtifact {
        artifact: artifact.to_string(),
        n,
        rows: m.rows(),
        cols: m.cols(),
        data: cmatrix_to_mat(m),
    })
}

/// Known artifacts: `T`, `T_tilde`, `P_n`, `proj_n` (these two take `--n`),
/// and `fock_basis`.
pub fn emit_artifact(loaded: &LoadedSpec, what: &str, n: Option<usize>) -> Result<String, LoadError> {
    let need_n = |what: &str| -> Result<usize, LoadError> {
        let n = n.ok_or_else(|| LoadError::Malformed(format!("artifact {what} requires --n")))?;
        if n < 2 || n > loaded.n_max {
            return Err(LoadError::Malformed(format!(
                "artifact level {n} outside 2..={}",
                loaded.n_max
            )));
        }
        Ok(n)
    };
    match what {
        "T" => Ok(matrix_json("T", None, loaded.d.t())),
        "T_tilde" => Ok(matrix_json("T_tilde", None, &shuffled(&loaded.d).t_tilde)),
        "P_n" => {
            let n = need_n("P_n")?;
            let p = loaded
                .d
                .p_n_direct(n)
                .map_err(|e| LoadError::Malformed(format!("{e:?}")))?;
            Ok(matrix_json("P_n", Some(n), &p))
        }
        "proj_n" => {
            let n = need_n("proj_n")?;
            let trunc = FockTruncation::build(&loaded.d, n, 1e-9)
                .map_err(|e| LoadError::Malformed(format!("{e:?}")))?;
            Ok(matrix_json("proj_n", Some(n), &trunc.level(n).proj))
        }
        "fock_basis" => {
            let mut levels = Vec::with_capacity(loaded.n_max + 1);
            for lvl in 0..=loaded.n_max {
                let lb = loaded
                    .d
                    .level_basis(lvl)
                    .map_err(|e| LoadError::Malformed(format!("{e:?}")))?;
                levels.push(lb.tuples.clone());
            }
            Ok(to_json(&BasisArtifact {
                artifact: "fock_basis".to_string(),
                n_max: loaded.n_max,
                levels,
            }))
        }
        other => Err(LoadError::Malformed(format!("unknown artifact {other:?}"))),
    }
}
