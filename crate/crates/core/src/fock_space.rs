//! The n-particle spaces F_n(H), their orthogonal projections, the deformed
//! inner product, and executable checkers for the structural theorems about
//! kernels, range intersections and parallel sums.

use alloc::vec;
use alloc::vec::Vec;

use crate::braid_rep::DeformationOperator;
use crate::error::CoreError;
use crate::tensor_core::{
    eigh, kernel_basis, kernel_basis_abs, parallel_sum_projection, range_basis, CMatrix, Subspace, C64,
};

/// One level of the truncated deformed Fock space.
///
/// `subspace` is F_n inside the level basis; `gram_root` maps
/// deformed-orthonormal coordinates to level vectors, so that
/// gram_root^* P_n gram_root = 1.
pub struct FockLevel {
    pub n: usize,
    pub subspace: Subspace,
    pub gram_root: CMatrix,
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors spanning ker(P_n).
    pub kernel_frame: CMatrix,
    /// The factorial-sum positivity operator P_n on the level basis.
    pub p_script: CMatrix,
    /// Orthogonal projection onto F_n.
    pub proj: CMatrix,
    /// Relative gap between kept and dropped eigenvalues (1 when nothing is
    /// dropped); rank decisions are stable when this is well above tol.
    pub spectral_gap: f64,
}

impl FockLevel {
    pub fn dim(&self) -> usize {
        self.gram_root.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.gram_root.rows()
    }
}

/// Per-level data for n = 0..=n_max; level 0 is the vacuum line.
pub struct FockTruncation {
    pub levels: Vec<FockLevel>,
    pub n_max: usize,
}

/// Spectral construction of F_n = ker(P_n)^perp with the deformed Gram root.
pub fn fock_level(d: &DeformationOperator, n: usize, tol: f64) -> Result<FockLevel, CoreError> {
    let dim = d.level_dim(n)?;
    if n <= 1 {
        let id = CMatrix::identity(dim);
        return Ok(FockLevel {
            n,
            subspace: Subspace::new(id.clone(), tol)?,
            gram_root: id.clone(),
            eigenvalues: vec![1.0; dim],
            kernel_frame: CMatrix::zeros(dim, 0),
            p_script: id.clone(),
            proj: id,
            spectral_gap: 1.0,
        });
    }
    let p = d.p_n_direct(n)?;
    let (vals, vecs) = eigh(&p);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cut = tol * top;
    let mut kept_cols = Vec::new();
    let mut root_cols = Vec::new();
    let mut kept_vals = Vec::new();
    let mut ker_cols = Vec::new();
    let mut max_dropped: f64 = 0.0;
    let mut min_kept = f64::INFINITY;
    for (k, &lam) in vals.iter().enumerate() {
        if lam > cut {
            let v = vecs.column(k);
            let s = 1.0 / libm::sqrt(lam);
            root_cols.push(v.iter().map(|z| z * s).collect::<Vec<C64>>());
            kept_cols.push(v);
            kept_vals.push(lam);
            min_kept = min_kept.min(lam);
        } else {
            ker_cols.push(vecs.column(k));
            max_dropped = max_dropped.max(lam.abs());
        }
    }
    let frame = CMatrix::from_cols(dim, &kept_cols);
    let gram_root = CMatrix::from_cols(dim, &root_cols);
    let kernel_frame = CMatrix::from_cols(dim, &ker_cols);
    let proj = if kept_cols.is_empty() {
        CMatrix::zeros(dim, dim)
    } else {
        frame.mul(&frame.adjoint())
    };
    let spectral_gap = if ker_cols.is_empty() || top == 0.0 {
        1.0
    } else {
        (min_kept - max_dropped) / top
    };
    Ok(FockLevel {
        n,
        subspace: Subspace::new(frame, tol)?,
        gram_root,
        eigenvalues: kept_vals,
        kernel_frame,
        p_script: p,
        proj,
        spectral_gap,
    })
}

impl FockTruncation {
    pub fn build(d: &DeformationOperator, n_max: usize, tol: f64) -> Result<Self, CoreError> {
        let mut levels = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            levels.push(fock_level(d, n, tol)?);
        }
        Ok(FockTruncation { levels, n_max })
    }

    pub fn level(&self, n: usize) -> &FockLevel {
        &self.levels[n]
    }
}

fn projector_of_frame(frame: &CMatrix) -> CMatrix {
    if frame.cols() == 0 {
        CMatrix::zeros(frame.rows(), frame.rows())
    } else {
        frame.mul(&frame.adjoint())
    }
}

/// Distance between ker(P_n) and the span of the union of ker(1 + T_i).
pub fn check_kernel_sum_formula(
    d: &DeformationOperator,
    level: &FockLevel,
    tol: f64,
) -> Result<f64, CoreError> {
    let n = level.n;
    assert!(n >= 2);
    let p_ker = projector_of_frame(&level.kernel_frame);
    let dim = level.ambient_dim();
    let id = CMatrix::identity(dim);
    let mut frames = Vec::new();
    for i in 1..n {
        let a = id.add(&d.t_i(n, i)?);
        frames.push(kernel_basis(&a, tol).frame);
    }
    let refs: Vec<&CMatrix> = frames.iter().collect();
    let stacked = CMatrix::hstack(&refs);
    let p_span = if stacked.cols() == 0 {
        CMatrix::zeros(dim, dim)
    } else {
        projector_of_frame(&range_basis(&stacked, tol).frame)
    };
    Ok(p_ker.sub(&p_span).op_norm())
}

/// Distance between F_n and the intersection of the ranges of (1 + T_i).
pub fn check_range_intersection(
    d: &DeformationOperator,
    level: &FockLevel,
    tol: f64,
) -> Result<f64, CoreError> {
    let n = level.n;
    assert!(n >= 2);
    let dim = level.ambient_dim();
    let id = CMatrix::identity(dim);
    let mut inter: Option<CMatrix> = None;
    for i in 1..n {
        let a = id.add(&d.t_i(n, i)?);
        let p_ran = projector_of_frame(&range_basis(&a, tol).frame);
        inter = Some(match inter {
            None => p_ran,
            Some(acc) => parallel_sum_projection(&acc, &p_ran, tol)?,
        });
    }
    let p_inter = inter.expect("n >= 2");
    Ok(level.proj.sub(&p_inter).op_norm())
}

/// Residuals of the parallel-sum identity for the level projection, plus the
/// leading/trailing absorption identities proj_n = proj_n (proj_m tensor 1)
/// = proj_n (1 tensor proj_m) for 2 <= m <= n-1.
pub fn check_parallel_sum_prop(
    d: &DeformationOperator,
    trunc: &FockTruncation,
    n: usize,
    tol: f64,
) -> Result<f64, CoreError> {
    assert!(n >= 3 && n <= trunc.n_max);
    let p2 = &trunc.level(2).proj;
    let dim = trunc.level(n).ambient_dim();
    let mut q1 = CMatrix::identity(dim);
    let mut q2 = CMatrix::identity(dim);
    for i in 1..n {
        let lifted = d.promote_pair_op(p2, n, i)?;
        if i % 2 == 1 {
            q1 = q1.mul(&lifted);
        } else {
            q2 = q2.mul(&lifted);
        }
    }
    let meet = parallel_sum_projection(&q1, &q2, tol)?;
    let pn = &trunc.level(n).proj;
    let mut worst = pn.sub(&meet).op_norm();
    for m in 2..n {
        let pm = &trunc.level(m).proj;
        let lead = d.promote_block(pm, m, n, 1)?;
        let trail = d.promote_block(pm, m, n, n - m + 1)?;
        worst = worst.max(pn.sub(&pn.mul(&lead)).op_norm());
        worst = worst.max(pn.sub(&pn.mul(&trail)).op_norm());
    }
    Ok(worst)
}

/// Membership in F_n via the per-slot criterion: (1 - T_i) f must lie in
/// ran(1 - T_i^2) for every i. The verdict is cross-checked against direct
/// membership; disagreement is an error, not a silent answer.
pub fn check_membership_theorem(
    d: &DeformationOperator,
    level: &FockLevel,
    f: &[C64],
    tol: f64,
) -> Result<bool, CoreError> {
    let n = level.n;
    let dim = level.ambient_dim();
    assert_eq!(f.len(), dim);
    let fnorm = libm::sqrt(f.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if fnorm == 0.0 {
        return Ok(true);
    }
    let id = CMatrix::identity(dim);
    let mut criterion = true;
    for i in 1..n {
        let ti = d.t_i(n, i)?;
        let g = id.sub(&ti).mul_vec(f);
        let a = id.sub(&ti.mul(&ti));
        let p_ran = projector_of_frame(&range_basis(&a, tol).frame);
        let out = p_ran.mul_vec(&g);
        if diff_norm(&g, &out) > tol.max(1e-10) * fnorm * 100.0 {
            criterion = false;
            break;
        }
    }
    let pf = level.proj.mul_vec(f);
    let direct_res = diff_norm(f, &pf);
    let direct = direct_res <= tol.max(1e-10) * fnorm * 100.0;
    if criterion != direct {
        return Err(CoreError::AlgorithmMismatch {
            what: "membership criterion vs direct membership",
            residual: direct_res,
        });
    }
    Ok(criterion)
}

/// Distance between ker(1 + T) and (1 - T) ker(1 - T^2) on the second level.
pub fn check_kerr_t_lemma(d: &DeformationOperator, tol: f64) -> Result<f64, CoreError> {
    let t2 = d.t_i(2, 1)?;
    let dim = t2.rows();
    let id = CMatrix::identity(dim);
    let lhs = projector_of_frame(&kernel_basis(&id.add(&t2), tol).frame);
    // absolute cutoff: for unitary T the matrix 1 - T^2 can be numerically
    // zero, where a relative singular-value threshold degenerates
    let ker_sq = kernel_basis_abs(&id.sub(&t2.mul(&t2)), tol);
    let image = id.sub(&t2).mul(&ker_sq.frame);
    let rhs = projector_of_frame(&range_basis(&image, tol).frame);
    Ok(lhs.sub(&rhs).op_norm())
}

/// For unitary T: distance between F_n and the joint fixed space of the T_i.
pub fn check_unitary_fixed_space(
    d: &DeformationOperator,
    level: &FockLevel,
    tol: f64,
) -> Result<f64, CoreError> {
    let n = level.n;
    let dim = level.ambient_dim();
    let id = CMatrix::identity(dim);
    let mut blocks = Vec::new();
    for i in 1..n {
        blocks.push(id.sub(&d.t_i(n, i)?));
    }
    let refs: Vec<&CMatrix> = blocks.iter().collect();
    let stacked = CMatrix::vstack(&refs);
    let fixed = projector_of_frame(&kernel_basis(&stacked, tol).frame);
    Ok(level.proj.sub(&fixed).op_norm())
}

fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid_rep::tests_support::q_flip;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn free_levels_are_full() {
        let d = DeformationOperator::new(2, CMatrix::zeros(4, 4), 1e-8).unwrap();
        let trunc = FockTruncation::build(&d, 3, 1e-9).unwrap();
        for n in 0..=3 {
            assert_eq!(trunc.level(n).dim(), 2usize.pow(n as u32));
        }
    }

    #[test]
    fn gram_identity_holds() {
        let d = DeformationOperator::new(2, q_flip(2, c(0.5, 0.0)), 1e-8).unwrap();
        let trunc = FockTruncation::build(&d, 4, 1e-9).unwrap();
        for n in 0..=4 {
            let l = trunc.level(n);
            let g = l.gram_root.adjoint().mul(&l.p_script).mul(&l.gram_root);
            let res = g.sub(&CMatrix::identity(l.dim())).op_norm();
            assert!(res < 1e-8, "gram residual {res} at level {n}");
        }
    }

    #[test]
    fn symmetric_subspace_dimension_for_unitary_flip() {
        for k in 2..=3usize {
            let d = DeformationOperator::new(k, q_flip(k, c(1.0, 0.0)), 1e-8).unwrap();
            let l2 = fock_level(&d, 2, 1e-9).unwrap();
            assert_eq!(l2.dim(), k * (k + 1) / 2);
        }
    }

    #[test]
    fn unitary_projection_is_normalized_factorial_sum() {
        let d = DeformationOperator::new(2, q_flip(2, c(1.0, 0.0)), 1e-8).unwrap();
        let trunc = FockTruncation::build(&d, 4, 1e-9).unwrap();
        for n in 2..=4 {
            let l = trunc.level(n);
            let fact: f64 = (1..=n).product::<usize>() as f64;
            let res = l.proj.sub(&l.p_script.scale(c(1.0 / fact, 0.0))).op_norm();
            assert!(res < 1e-9, "residual {res} at level {n}");
            assert!(check_unitary_fixed_space(&d, l, 1e-9).unwrap() < 1e-8);
        }
    }

    #[test]
    fn kernel_sum_formula_holds_for_flip_fixtures() {
        for q in [0.5, 1.0] {
            let d = DeformationOperator::new(2, q_flip(2, c(q, 0.0)), 1e-8).unwrap();
            for n in 2..=4 {
                let l = fock_level(&d, n, 1e-9).unwrap();
                let res = check_kernel_sum_formula(&d, &l, 1e-9).unwrap();
                assert!(res < 1e-8, "kernel-sum residual {res} for q={q}, n={n}");
            }
        }
    }

    #[test]
    fn range_intersection_formula_holds() {
        for q in [0.5, 1.0] {
            let d = DeformationOperator::new(2, q_flip(2, c(q, 0.0)), 1e-8).unwrap();
            for n in 2..=3 {
                let l = fock_level(&d, n, 1e-9).unwrap();
                let res = check_range_intersection(&d, &l, 1e-9).unwrap();
                assert!(res < 1e-8, "range-intersection residual {res} for q={q}, n={n}");
            }
        }
    }

    #[test]
    fn parallel_sum_proposition_holds() {
        for q in [0.5, 1.0] {
            let d = DeformationOperator::new(2, q_flip(2, c(q, 0.0)), 1e-8).unwrap();
            let trunc = FockTruncation::build(&d, 4, 1e-9).unwrap();
            for n in 3..=4 {
                let res = check_parallel_sum_prop(&d, &trunc, n, 1e-9).unwrap();
                assert!(res < 1e-8, "parallel-sum residual {res} for q={q}, n={n}");
            }
        }
    }

    #[test]
    fn membership_criterion_matches_direct_membership() {
        let d = DeformationOperator::new(2, q_flip(2, c(1.0, 0.0)), 1e-8).unwrap();
        let l = fock_level(&d, 3, 1e-9).unwrap();
        // a vector from the frame is a member
        let f = l.subspace.frame.column(0);
        assert!(check_membership_theorem(&d, &l, &f, 1e-9).unwrap());
        // a kernel vector is not
        let g = l.kernel_frame.column(0);
        assert!(!check_membership_theorem(&d, &l, &g, 1e-9).unwrap());
    }

    #[test]
    fn kerr_t_lemma_for_flip() {
        for q in [0.5, 1.0] {
            let d = DeformationOperator::new(2, q_flip(2, c(q, 0.0)), 1e-8).unwrap();
            let res = check_kerr_t_lemma(&d, 1e-9).unwrap();
            assert!(res < 1e-8, "lemma residual {res} for q={q}");
        }
    }
}
