//! Ladder operators on the truncated deformed Fock space, the shuffled
//! companions of T, and executable verifiers for the commutation relations.
//!
//! All operators are stored blockwise between levels, in the deformed
//! orthonormal coordinates provided by the Gram roots, so that operator
//! adjoints are plain conjugate transposes of the blocks. Pairings are
//! bilinear: `<f, g> = sum_p f_p g_p`; the real structure J conjugates
//! entrywise and the exchange S(f tensor g) = J(g tensor f).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::braid_rep::{DeformationOperator, LevelBasis};
use crate::error::CoreError;
use crate::fock_space::FockTruncation;
use crate::tensor_core::{kernel_basis, CMatrix, C64};

// ---------------------------------------------------------------------------
// block operators
// ---------------------------------------------------------------------------

/// Operator on a truncated graded space, stored as a sparse collection of
/// inter-level blocks keyed by (target level, source level). Missing blocks
/// are zero.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    /// Coordinate dimension of each level, 0..=n_max.
    pub dims: Vec<usize>,
    pub blocks: BTreeMap<(usize, usize), CMatrix>,
}

impl BlockOperator {
    pub fn zero(dims: Vec<usize>) -> Self {
        BlockOperator { dims, blocks: BTreeMap::new() }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let mut op = BlockOperator::zero(dims);
        for n in 0..op.dims.len() {
            let d = op.dims[n];
            op.blocks.insert((n, n), CMatrix::identity(d));
        }
        op
    }

    pub fn n_max(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn insert(&mut self, target: usize, source: usize, m: CMatrix) {
        assert_eq!(m.rows(), self.dims[target], "block row dim");
        assert_eq!(m.cols(), self.dims[source], "block col dim");
        self.blocks.insert((target, source), m);
    }

    pub fn block(&self, target: usize, source: usize) -> Option<&CMatrix> {
        self.blocks.get(&(target, source))
    }

    /// self applied after rhs.
    pub fn compose(&self, rhs: &BlockOperator) -> BlockOperator {
        assert_eq!(self.dims, rhs.dims, "graded dims mismatch");
        let mut out = BlockOperator::zero(self.dims.clone());
        for (&(t, k), a) in &self.blocks {
            for (&(k2, s), b) in &rhs.blocks {
                if k2 != k {
                    continue;
                }
                let prod = a.mul(b);
                match out.blocks.get_mut(&(t, s)) {
                    Some(acc) => *acc = acc.add(&prod),
                    None => {
                        out.blocks.insert((t, s), prod);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &BlockOperator) -> BlockOperator {
        assert_eq!(self.dims, rhs.dims, "graded dims mismatch");
        let mut out = self.clone();
        for (&key, b) in &rhs.blocks {
            match out.blocks.get_mut(&key) {
                Some(acc) => *acc = acc.add(b),
                None => {
                    out.blocks.insert(key, b.clone());
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &BlockOperator) -> BlockOperator {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> BlockOperator {
        let mut out = BlockOperator::zero(self.dims.clone());
        for (&key, b) in &self.blocks {
            out.blocks.insert(key, b.scale(s));
        }
        out
    }

    pub fn adjoint(&self) -> BlockOperator {
        let mut out = BlockOperator::zero(self.dims.clone());
        for (&(t, s), b) in &self.blocks {
            out.blocks.insert((s, t), b.adjoint());
        }
        out
    }

    /// Largest block operator norm over blocks whose source and target level
    /// are both <= cap. On a truncation, identities that pass through the
    /// discarded levels above n_max only hold on blocks below the boundary,
    /// so residuals are measured with cap = n_max - 1 for those.
    pub fn max_block_norm(&self, cap: usize) -> f64 {
        let mut worst = 0.0f64;
        for (&(t, s), b) in &self.blocks {
            if t <= cap && s <= cap {
                worst = worst.max(b.op_norm());
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// shuffled companions and the exchange S
// ---------------------------------------------------------------------------

/// The two index-shuffles of T that appear on the normal-ordered side of the
/// commutation relations.
pub struct ShuffledOperators {
    /// `t_tilde[(k,l),(i,j)] = t[(i,k),(j,l)]`
    pub t_tilde: CMatrix,
    /// `t_hat[(k,l),(i,j)] = conj(t[(l,k),(j,i)])`; equals S T S.
    pub t_hat: CMatrix,
}

/// Entry reshuffles of an operator on W tensor W with dim W = m; returns
/// (shuffled companion, conjugate-swap companion).
pub fn shuffle_pair_matrix(c: &CMatrix, m: usize) -> (CMatrix, CMatrix) {
    assert_eq!(c.rows(), m * m);
    assert_eq!(c.cols(), m * m);
    let mut tilde = CMatrix::zeros(m * m, m * m);
    let mut hat = CMatrix::zeros(m * m, m * m);
    for k in 0..m {
        for l in 0..m {
            for i in 0..m {
                for j in 0..m {
                    tilde.set(k * m + l, i * m + j, c.get(i * m + k, j * m + l));
                    hat.set(k * m + l, i * m + j, c.get(l * m + k, j * m + i).conj());
                }
            }
        }
    }
    (tilde, hat)
}

pub fn shuffled(d: &DeformationOperator) -> ShuffledOperators {
    let (t_tilde, t_hat) = shuffle_pair_matrix(d.t(), d.h_dim());
    ShuffledOperators { t_tilde, t_hat }
}

/// The antilinear exchange S(f tensor g) = J(g tensor f) on coordinates of
/// H tensor H.
pub fn s_swap(f2: &[C64], h: usize) -> Vec<C64> {
    assert_eq!(f2.len(), h * h);
    let mut out = vec![C64::new(0.0, 0.0); h * h];
    for i in 0..h {
        for j in 0..h {
            out[j * h + i] = f2[i * h + j].conj();
        }
    }
    out
}

// ---------------------------------------------------------------------------
// operator context: cached level data
// ---------------------------------------------------------------------------

/// One verified residual of an operator identity.
#[derive(Clone, Debug)]
pub struct RelationEntry {
    /// Stable machine-readable name of the identity family.
    pub relation_id: String,
    /// Human-readable description of the smearing inputs.
    pub inputs: String,
    pub residual: f64,
    pub pass: bool,
}

/// Precomputed per-level matrices shared by every ladder-operator build on a
/// fixed truncation: `w[n] = P_n G_n` (the coordinate map is `w^*`),
/// `tg[n] = BB_T_n G_n` and `mg[n] = (1 tensor BB_T_{n-1} proj_{n-1}) BB_T_n G_n`.
pub struct OpContext<'a> {
    pub d: &'a DeformationOperator,
    pub trunc: &'a FockTruncation,
    dims: Vec<usize>,
    bases: Vec<LevelBasis>,
    w: Vec<CMatrix>,
    tg: Vec<CMatrix>,
    mg: Vec<Option<CMatrix>>,
}

impl<'a> OpContext<'a> {
    pub fn new(d: &'a DeformationOperator, trunc: &'a FockTruncation) -> Result<Self, CoreError> {
        let n_max = trunc.n_max;
        let mut dims = Vec::with_capacity(n_max + 1);
        let mut bases = Vec::with_capacity(n_max + 1);
        let mut w = Vec::with_capacity(n_max + 1);
        let mut tg = Vec::with_capacity(n_max + 1);
        let mut mg = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let level = trunc.level(n);
            dims.push(level.dim());
            bases.push(d.level_basis(n)?);
            w.push(level.p_script.mul(&level.gram_root));
            let bb = d.bb_t_n(n)?;
            let tgn = bb.mul(&level.gram_root);
            if n >= 2 {
                let prev = trunc.level(n - 1);
                let inner = d.bb_t_n(n - 1)?.mul(&prev.proj);
                let lifted = d.one_tensor(&inner, n)?;
                mg.push(Some(lifted.mul(&tgn)));
            } else {
                mg.push(None);
            }
            tg.push(tgn);
        }
        Ok(OpContext { d, trunc, dims, bases, w, tg, mg })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn h(&self) -> usize {
        self.d.h_dim()
    }

    // -- raw slot maps applied to dense matrices ---------------------------

    /// (f tensor .) : level n -> level n+1, applied to X.
    fn apply_l_plus(&self, f: &[C64], n: usize, x: &CMatrix) -> CMatrix {
        let src = &self.bases[n];
        let dst = &self.bases[n + 1];
        assert_eq!(x.rows(), src.dim());
        let k = x.cols();
        let mut out = CMatrix::zeros(dst.dim(), k);
        let mut tuple = Vec::with_capacity(n + 1);
        for (r, tup) in src.tuples.iter().enumerate() {
            for (p, &fp) in f.iter().enumerate() {
                if fp.re == 0.0 && fp.im == 0.0 {
                    continue;
                }
                tuple.clear();
                tuple.push(p);
                tuple.extend_from_slice(tup);
                if let Some(ri) = dst.index_of(&tuple) {
                    for c in 0..k {
                        out.set(ri, c, out.get(ri, c) + fp * x.get(r, c));
                    }
                }
            }
        }
        out
    }

    /// Remove the first slot against f: level n -> level n-1, applied to X.
    fn apply_l_minus(&self, f: &[C64], n: usize, x: &CMatrix) -> CMatrix {
        let src = &self.bases[n];
        let dst = &self.bases[n - 1];
        assert_eq!(x.rows(), src.dim());
        let k = x.cols();
        let mut out = CMatrix::zeros(dst.dim(), k);
        for (r, tup) in src.tuples.iter().enumerate() {
            let fp = f[tup[0]];
            if fp.re == 0.0 && fp.im == 0.0 {
                continue;
            }
            let ri = dst.index_of(&tup[1..]).expect("suffix admissible");
            for c in 0..k {
                out.set(ri, c, out.get(ri, c) + fp * x.get(r, c));
            }
        }
        out
    }

    /// Exchange the first slot through f2: e_(p,rest) -> sum_i f2[(i,p)] e_(i,rest).
    fn apply_l_pm(&self, f2: &[C64], n: usize, x: &CMatrix) -> CMatrix {
        let src = &self.bases[n];
        assert_eq!(x.rows(), src.dim());
        let h = self.h();
        let k = x.cols();
        let mut out = CMatrix::zeros(src.dim(), k);
        let mut tuple = Vec::with_capacity(n);
        for (r, tup) in src.tuples.iter().enumerate() {
            let p = tup[0];
            for i in 0..h {
                let coef = f2[i * h + p];
                if coef.re == 0.0 && coef.im == 0.0 {
                    continue;
                }
                tuple.clear();
                tuple.extend_from_slice(tup);
                tuple[0] = i;
                if let Some(ri) = src.index_of(&tuple) {
                    for c in 0..k {
                        out.set(ri, c, out.get(ri, c) + coef * x.get(r, c));
                    }
                }
            }
        }
        out
    }

    /// Prepend two slots from f2: level n -> level n+2.
    fn apply_l_pp(&self, f2: &[C64], n: usize, x: &CMatrix) -> CMatrix {
        let src = &self.bases[n];
        let dst = &self.bases[n + 2];
        assert_eq!(x.rows(), src.dim());
        let h = self.h();
        let k = x.cols();
        let nz: Vec<(usize, usize, C64)> = (0..h * h)
            .filter(|&ij| f2[ij].re != 0.0 || f2[ij].im != 0.0)
            .map(|ij| (ij / h, ij % h, f2[ij]))
            .collect();
        let mut out = CMatrix::zeros(dst.dim(), k);
        let mut tuple = Vec::with_capacity(n + 2);
        for (r, tup) in src.tuples.iter().enumerate() {
            for &(i, j, coef) in &nz {
                tuple.clear();
                tuple.push(i);
                tuple.push(j);
                tuple.extend_from_slice(tup);
                if let Some(ri) = dst.index_of(&tuple) {
                    for c in 0..k {
                        out.set(ri, c, out.get(ri, c) + coef * x.get(r, c));
                    }
                }
            }
        }
        out
    }

    /// Remove the two leading slots against f2: e_(p,q,rest) -> f2[(q,p)] e_rest.
    fn apply_l_mm(&self, f2: &[C64], n: usize, x: &CMatrix) -> CMatrix {
        let src = &self.bases[n];
        let dst = &self.bases[n - 2];
        assert_eq!(x.rows(), src.dim());
        let h = self.h();
        let k = x.cols();
        let mut out = CMatrix::zeros(dst.dim(), k);
        for (r, tup) in src.tuples.iter().enumerate() {
            let coef = f2[tup[1] * h + tup[0]];
            if coef.re == 0.0 && coef.im == 0.0 {
                continue;
            }
            let ri = dst.index_of(&tup[2..]).expect("suffix admissible");
            for c in 0..k {
                out.set(ri, c, out.get(ri, c) + coef * x.get(r, c));
            }
        }
        out
    }

    // -- operators ---------------------------------------------------------

    /// The unprojected map g -> f tensor g between plain level bases.
    pub fn left_creation(&self, f: &[C64]) -> BlockOperator {
        let ambient: Vec<usize> = self.bases.iter().map(|b| b.dim()).collect();
        let mut op = BlockOperator::zero(ambient);
        for n in 0..self.trunc.n_max {
            let id = CMatrix::identity(self.bases[n].dim());
            op.insert(n + 1, n, self.apply_l_plus(f, n, &id));
        }
        op
    }

    /// Creation operator: block (n+1, n) = G_{n+1}^* P_{n+1} (f tensor .) G_n.
    pub fn a_plus(&self, f: &[C64]) -> BlockOperator {
        assert_eq!(f.len(), self.h());
        let mut op = BlockOperator::zero(self.dims.clone());
        for n in 0..self.trunc.n_max {
            let lifted = self.apply_l_plus(f, n, &self.trunc.level(n).gram_root);
            op.insert(n + 1, n, self.w[n + 1].adjoint().mul(&lifted));
        }
        op
    }

    /// Annihilation operator a^-(f) = (a^+(Jf))^*; in deformed coordinates
    /// the adjoint is the blockwise conjugate transpose.
    pub fn a_minus(&self, f: &[C64]) -> BlockOperator {
        let jf: Vec<C64> = f.iter().map(|z| z.conj()).collect();
        self.a_plus(&jf).adjoint()
    }

    /// Annihilation via the explicit first-slot formula
    /// block (n-1, n) = G_{n-1}^* P_{n-1} l^-(f) BB_T_n G_n, together with the
    /// distance to the adjoint path. The two must agree; a large residual
    /// means the construction is broken.
    pub fn a_minus_two_path(&self, f: &[C64]) -> (BlockOperator, f64) {
        let adj = self.a_minus(f);
        let mut explicit = BlockOperator::zero(self.dims.clone());
        for n in 1..=self.trunc.n_max {
            let dropped = self.apply_l_minus(f, n, &self.tg[n]);
            explicit.insert(n - 1, n, self.w[n - 1].adjoint().mul(&dropped));
        }
        let res = adj.sub(&explicit).max_block_norm(self.trunc.n_max);
        (adj, res)
    }

    /// The three pair operators smeared with f2 (coordinates on H tensor H):
    /// (exchange a^{+-}, double creation a^{++}, double annihilation a^{--}).
    pub fn pair_operators(&self, f2: &[C64]) -> (BlockOperator, BlockOperator, BlockOperator) {
        let h = self.h();
        assert_eq!(f2.len(), h * h);
        let n_max = self.trunc.n_max;
        let mut apm = BlockOperator::zero(self.dims.clone());
        let mut app = BlockOperator::zero(self.dims.clone());
        let mut amm = BlockOperator::zero(self.dims.clone());
        for n in 1..=n_max {
            let x = self.apply_l_pm(f2, n, &self.tg[n]);
            apm.insert(n, n, self.w[n].adjoint().mul(&x));
        }
        for n in 0..=n_max.saturating_sub(2) {
            let x = self.apply_l_pp(f2, n, &self.trunc.level(n).gram_root);
            app.insert(n + 2, n, self.w[n + 2].adjoint().mul(&x));
        }
        for n in 2..=n_max {
            let x = self.apply_l_mm(f2, n, self.mg[n].as_ref().expect("n >= 2"));
            amm.insert(n - 2, n, self.w[n - 2].adjoint().mul(&x));
        }
        (apm, app, amm)
    }

    // -- relation verifiers ------------------------------------------------

    /// a^-(f) a^+(g) = a^{+-}(t_tilde (f tensor g)) + <f, g> 1, measured on
    /// blocks below the truncation boundary.
    pub fn verify_main_relation(&self, f: &[C64], g: &[C64], label: &str, tol: f64) -> RelationEntry {
        let h = self.h();
        let lhs = self.a_minus(f).compose(&self.a_plus(g));
        let mut fg = vec![C64::new(0.0, 0.0); h * h];
        for p in 0..h {
            for q in 0..h {
                fg[p * h + q] = f[p] * g[q];
            }
        }
        let shuf = shuffled(self.d).t_tilde.mul_vec(&fg);
        let (apm, _, _) = self.pair_operators(&shuf);
        let pairing: C64 = f.iter().zip(g).map(|(a, b)| a * b).sum();
        let rhs = apm.add(&BlockOperator::identity(self.dims.clone()).scale(pairing));
        let cap = self.trunc.n_max.saturating_sub(1);
        let residual = lhs.sub(&rhs).max_block_norm(cap);
        RelationEntry {
            relation_id: String::from("wick_reorder"),
            inputs: String::from(label),
            residual,
            pass: residual <= tol,
        }
    }

    /// The kernel/invariance dichotomies of the pair operators, plus their
    /// adjoint symmetries. Kernels are taken on the second level.
    pub fn verify_pair_relations(&self, tol: f64) -> Vec<RelationEntry> {
        let h = self.h();
        let lb2 = &self.bases[2];
        let embed = |v: &[C64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); h * h];
            for (r, tup) in lb2.tuples.iter().enumerate() {
                out[tup[0] * h + tup[1]] = v[r];
            }
            out
        };
        let t2 = self.d.t_i(2, 1).expect("level 2");
        let id2 = CMatrix::identity(t2.rows());
        let shuf = shuffled(self.d);
        let mut out = Vec::new();

        // a^{++} vanishes exactly on ker(1 + T) ...
        let ker_plus = kernel_basis(&id2.add(&t2), tol.max(1e-9));
        for c in 0..ker_plus.dim() {
            let f2 = embed(&ker_plus.frame.column(c));
            let (_, app, _) = self.pair_operators(&f2);
            let residual = app.max_block_norm(self.trunc.n_max);
            out.push(RelationEntry {
                relation_id: String::from("pair_create_vanishes_on_kernel"),
                inputs: format!("ker(1+T) basis vector {c}"),
                residual,
                pass: residual <= tol,
            });
            // mirrored statement for a^{--}: S f2 in ker(1 + T)
            let sf2 = s_swap(&f2, h);
            let (_, _, amm) = self.pair_operators(&sf2);
            let residual = amm.max_block_norm(self.trunc.n_max);
            out.push(RelationEntry {
                relation_id: String::from("pair_annih_vanishes_on_kernel"),
                inputs: format!("S-image of ker(1+T) basis vector {c}"),
                residual,
                pass: residual <= tol,
            });
        }
        // ... and is bounded away from zero on the orthogonal complement.
        let frame2 = &self.trunc.level(2).subspace.frame;
        for c in 0..frame2.cols() {
            let f2 = embed(&frame2.column(c));
            let (_, app, _) = self.pair_operators(&f2);
            let residual = app.max_block_norm(self.trunc.n_max);
            out.push(RelationEntry {
                relation_id: String::from("pair_create_nonzero_off_kernel"),
                inputs: format!("complement basis vector {c}"),
                residual,
                pass: residual >= 1e-3,
            });
        }
        // invariance under T on ker(1 - T^2), and the S-mirror under t_hat.
        let ker_sq = kernel_basis(&id2.sub(&t2.mul(&t2)), tol.max(1e-9));
        for c in 0..ker_sq.dim() {
            let f2 = embed(&ker_sq.frame.column(c));
            let tf2 = full_t_apply(self.d, &f2);
            let (_, app_a, _) = self.pair_operators(&f2);
            let (_, app_b, _) = self.pair_operators(&tf2);
            let residual = app_a.sub(&app_b).max_block_norm(self.trunc.n_max);
            out.push(RelationEntry {
                relation_id: String::from("pair_create_exchange_invariance"),
                inputs: format!("ker(1-T^2) basis vector {c}"),
                residual,
                pass: residual <= tol,
            });
            let sf2 = s_swap(&f2, h);
            let htf2 = shuf.t_hat.mul_vec(&sf2);
            let (_, _, amm_a) = self.pair_operators(&sf2);
            let (_, _, amm_b) = self.pair_operators(&htf2);
            let residual = amm_a.sub(&amm_b).max_block_norm(self.trunc.n_max);
            out.push(RelationEntry {
                relation_id: String::from("pair_annih_exchange_invariance"),
                inputs: format!("S-image of ker(1-T^2) basis vector {c}"),
                residual,
                pass: residual <= tol,
            });
        }
        // adjoint symmetries on a deterministic dense test vector
        let f2 = pseudo_vec(h * h, 0x5eed_u64);
        let sf2 = s_swap(&f2, h);
        let (apm_a, app_a, _) = self.pair_operators(&f2);
        let (apm_b, _, amm_b) = self.pair_operators(&sf2);
        let residual = apm_a.adjoint().sub(&apm_b).max_block_norm(self.trunc.n_max);
        out.push(RelationEntry {
            relation_id: String::from("pair_mixed_adjoint_symmetry"),
            inputs: String::from("deterministic dense f2"),
            residual,
            pass: residual <= tol,
        });
        let residual = app_a.adjoint().sub(&amm_b).max_block_norm(self.trunc.n_max);
        out.push(RelationEntry {
            relation_id: String::from("pair_create_annih_adjoint"),
            inputs: String::from("deterministic dense f2"),
            residual,
            pass: residual <= tol,
        });
        out
    }

    /// The basis-indexed relation families: the normal-ordering identity for
    /// every (i, j), and the two exchange identities for basis pairs inside
    /// ker(1 - T^2).
    pub fn verify_basis_relations(&self, tol: f64) -> Vec<RelationEntry> {
        let h = self.h();
        let shuf = shuffled(self.d);
        let t = self.d.t();
        let cap = self.trunc.n_max.saturating_sub(1);
        let full_cap = self.trunc.n_max;
        let ap: Vec<BlockOperator> = (0..h).map(|i| self.a_plus(&basis_vec(h, i))).collect();
        let am: Vec<BlockOperator> = (0..h).map(|i| self.a_minus(&basis_vec(h, i))).collect();
        let mut pm_cache: BTreeMap<(usize, usize), BlockOperator> = BTreeMap::new();
        let sector = self.d.sector();
        let mut out = Vec::new();
        for i in 0..h {
            for j in 0..h {
                // In the site-resolved model the reordering identity only
                // holds on the distinct-site sector; coincident indices carry
                // the hard-core constraint instead, so skip them.
                if let Some(s) = sector.as_ref() {
                    if s.site_of(i) == s.site_of(j) {
                        continue;
                    }
                }
                // a^-(e_i) a^+(e_j) = sum_kl t_tilde[(kl),(ij)] a^+(e_k) a^-(e_l) + delta_ij
                let lhs = am[i].compose(&ap[j]);
                let mut rhs = if i == j {
                    BlockOperator::identity(self.dims.clone())
                } else {
                    BlockOperator::zero(self.dims.clone())
                };
                for kl in 0..h * h {
                    let coef = shuf.t_tilde.get(kl, i * h + j);
                    if coef.re == 0.0 && coef.im == 0.0 {
                        continue;
                    }
                    let (k, l) = (kl / h, kl % h);
                    let term = pm_cache
                        .entry((k, l))
                        .or_insert_with(|| ap[k].compose(&am[l]))
                        .scale(coef);
                    rhs = rhs.add(&term);
                }
                let residual = lhs.sub(&rhs).max_block_norm(cap);
                out.push(RelationEntry {
                    relation_id: String::from("wick_reorder_basis"),
                    inputs: format!("i={i}, j={j}"),
                    residual,
                    pass: residual <= tol,
                });

                // exchange identities only for basis pairs in ker(1 - T^2)
                let e_ij = basis_vec(h * h, i * h + j);
                let te = t.mul_vec(&e_ij);
                let tte = t.mul_vec(&te);
                let ker_res: f64 = e_ij
                    .iter()
                    .zip(&tte)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>();
                if libm::sqrt(ker_res) > tol.max(1e-9) * 10.0 {
                    continue;
                }
                let lhs = ap[i].compose(&ap[j]);
                let mut rhs = BlockOperator::zero(self.dims.clone());
                for kl in 0..h * h {
                    let coef = t.get(kl, i * h + j);
                    if coef.re == 0.0 && coef.im == 0.0 {
                        continue;
                    }
                    let (k, l) = (kl / h, kl % h);
                    rhs = rhs.add(&ap[k].compose(&ap[l]).scale(coef));
                }
                let residual = lhs.sub(&rhs).max_block_norm(full_cap);
                out.push(RelationEntry {
                    relation_id: String::from("create_create_exchange_basis"),
                    inputs: format!("i={i}, j={j}"),
                    residual,
                    pass: residual <= tol,
                });

                let lhs = am[j].compose(&am[i]);
                let mut rhs = BlockOperator::zero(self.dims.clone());
                for kl in 0..h * h {
                    let coef = shuf.t_hat.get(kl, j * h + i);
                    if coef.re == 0.0 && coef.im == 0.0 {
                        continue;
                    }
                    let (k, l) = (kl / h, kl % h);
                    rhs = rhs.add(&am[k].compose(&am[l]).scale(coef));
                }
                let residual = lhs.sub(&rhs).max_block_norm(full_cap);
                out.push(RelationEntry {
                    relation_id: String::from("annih_annih_exchange_basis"),
                    inputs: format!("i={i}, j={j}"),
                    residual,
                    pass: residual <= tol,
                });
            }
        }
        out
    }
}

/// Apply the full T matrix to coordinates on H tensor H.
fn full_t_apply(d: &DeformationOperator, f2: &[C64]) -> Vec<C64> {
    d.t().mul_vec(f2)
}

fn basis_vec(len: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); len];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Deterministic dense test vector from a xorshift stream.
fn pseudo_vec(len: usize, mut state: u64) -> Vec<C64> {
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..len).map(|_| C64::new(next(), next())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid_rep::tests_support::q_flip;
    use crate::fock_space::FockTruncation;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn flip_setup(q: f64, h: usize, n_max: usize) -> (DeformationOperator, FockTruncation) {
        let d = DeformationOperator::new(h, q_flip(h, c(q, 0.0)), 1e-8).unwrap();
        let trunc = FockTruncation::build(&d, n_max, 1e-9).unwrap();
        (d, trunc)
    }

    #[test]
    fn free_creation_is_left_creation() {
        let (d, trunc) = flip_setup(0.0, 2, 3);
        let ctx = OpContext::new(&d, &trunc).unwrap();
        let f = vec![c(0.3, 0.1), c(-0.5, 0.7)];
        let a = ctx.a_plus(&f);
        let l = ctx.left_creation(&f);
        for n in 0..3 {
            let res = a.block(n + 1, n).unwrap().sub(l.block(n + 1, n).unwrap()).op_norm();
            assert!(res < 1e-12, "free block mismatch {res} at level {n}");
        }
    }

    #[test]
    fn annihilation_two_paths_agree() {
        for q in [0.0, 0.6, 1.0] {
            let (d, trunc) = flip_setup(q, 2, 4);
            let ctx = OpContext::new(&d, &trunc).unwrap();
            let f = vec![c(0.2, -0.4), c(0.9, 0.3)];
            let (_, res) = ctx.a_minus_two_path(&f);
            assert!(res < 1e-9, "two-path residual {res} for q={q}");
        }
    }

    #[test]
    fn annihilation_kills_the_vacuum() {
        let (d, trunc) = flip_setup(0.5, 2, 3);
        let ctx = OpContext::new(&d, &trunc).unwrap();
        let a = ctx.a_minus(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(a.blocks.keys().all(|&(_, s)| s >= 1));
        let (apm, _, amm) = ctx.pair_operators(&pseudo_vec(4, 7));
        assert!(apm.blocks.keys().all(|&(t, s)| t >= 1 && s >= 1));
        assert!(amm.blocks.keys().all(|&(_, s)| s >= 2));
    }

    #[test]
    fn creation_intertwines_with_projections() {
        // a^+(f) (coords of proj g) = coords of proj (f tensor g), with the
        // coordinate map w^* computed independently of the operator build.
        let (d, trunc) = flip_setup(0.7, 2, 3);
        let ctx = OpContext::new(&d, &trunc).unwrap();
        let f = vec![c(0.4, 0.2), c(-0.3, 0.6)];
        let a = ctx.a_plus(&f);
        let h = 2usize;
        for n in 1..3usize {
            let dim_n = h.pow(n as u32);
            let g = pseudo_vec(dim_n, 11 + n as u64);
            let coords = |x: &[C64], m: usize| -> Vec<C64> {
                let l = trunc.level(m);
                l.gram_root.adjoint().mul(&l.p_script).mul_vec(x)
            };
            let lhs = a.block(n + 1, n).unwrap().mul_vec(&coords(&g, n));
            let mut fg = vec![c(0.0, 0.0); dim_n * h];
            for p in 0..h {
                for (r, &gv) in g.iter().enumerate() {
                    fg[p * dim_n + r] = f[p] * gv;
                }
            }
            let rhs = coords(&fg, n + 1);
            let res: f64 = lhs
                .iter()
                .zip(&rhs)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-9, "intertwining residual {res} at level {n}");
        }
    }

    #[test]
    fn pair_operators_match_ladder_expansions() {
        let (d, trunc) = flip_setup(0.6, 2, 4);
        let ctx = OpContext::new(&d, &trunc).unwrap();
        let h = 2usize;
        let f2 = pseudo_vec(h * h, 99);
        let (apm, app, amm) = ctx.pair_operators(&f2);
        let ap: Vec<_> = (0..h).map(|i| ctx.a_plus(&basis_vec(h, i))).collect();
        let am: Vec<_> = (0..h).map(|i| ctx.a_minus(&basis_vec(h, i))).collect();
        let mut exp_pm = BlockOperator::zero(ctx.dims().to_vec());
        let mut exp_pp = BlockOperator::zero(ctx.dims().to_vec());
        let mut exp_mm = BlockOperator::zero(ctx.dims().to_vec());
        for i in 0..h {
            for j in 0..h {
                let coef = f2[i * h + j];
                exp_pm = exp_pm.add(&ap[i].compose(&am[j]).scale(coef));
                exp_pp = exp_pp.add(&ap[i].compose(&ap[j]).scale(coef));
                exp_mm = exp_mm.add(&am[i].compose(&am[j]).scale(coef));
            }
        }
        let cap = trunc.n_max;
        assert!(apm.sub(&exp_pm).max_block_norm(cap) < 1e-9);
        assert!(app.sub(&exp_pp).max_block_norm(cap) < 1e-9);
        assert!(amm.sub(&exp_mm).max_block_norm(cap) < 1e-9);
    }

    #[test]
    fn scalar_deformation_satisfies_q_commutation() {
        // flip fixture: a^-(f) a^+(g) = q a^+(g) a^-(f) + <f, g>
        let q = 0.5;
        let (d, trunc) = flip_setup(q, 2, 4);
        let ctx = OpContext::new(&d, &trunc).unwrap();
        let f = vec![c(0.6, -0.1), c(0.2, 0.8)];
        let g = vec![c(-0.4, 0.5), c(0.7, 0.1)];
        let entry = ctx.verify_main_relation(&f, &g, "fixed pair", 1e-9);
        assert!(entry.pass, "wick residual {}", entry.residual);
        // direct q-commutation check as an independent oracle
        let lhs = ctx.a_minus(&f).compose(&ctx.a_plus(&g));
        let pairing: C64 = f.iter().zip(&g).map(|(a, b)| a * b).sum();
        let rhs = ctx
            .a_plus(&g)
            .compose(&ctx.a_minus(&f))
            .scale(c(q, 0.0))
            .add(&BlockOperator::identity(ctx.dims().to_vec()).scale(pairing));
        let res = lhs.sub(&rhs).max_block_norm(trunc.n_max - 1);
        assert!(res < 1e-9, "q-commutation residual {res}");
    }

    #[test]
    fn basis_relations_hold_for_flip() {
        for q in [0.5, 1.0] {
            let (d, trunc) = flip_setup(q, 2, 3);
            let ctx = OpContext::new(&d, &trunc).unwrap();
            let entries = ctx.verify_basis_relations(1e-9);
            assert!(!entries.is_empty());
            for e in &entries {
                assert!(e.pass, "{} [{}] residual {}", e.relation_id, e.inputs, e.residual);
            }
            // unitary flip: every basis pair lies in ker(1 - T^2), so the
            // exchange families must appear for all of them
            if q == 1.0 {
                let n_exchange = entries
                    .iter()
                    .filter(|e| e.relation_id == "create_create_exchange_basis")
                    .count();
                assert_eq!(n_exchange, 4);
            }
        }
    }

    #[test]
    fn pair_relations_hold_for_unitary_flip() {
        let (d, trunc) = flip_setup(1.0, 2, 4);
        let ctx = OpContext::new(&d, &trunc).unwrap();
        let entries = ctx.verify_pair_relations(1e-9);
        for e in &entries {
            assert!(e.pass, "{} [{}] residual {}", e.relation_id, e.inputs, e.residual);
        }
        // ker(1 + flip) is the antisymmetric line: the vanishing family must
        // be present
        assert!(entries.iter().any(|e| e.relation_id == "pair_create_vanishes_on_kernel"));
        assert!(entries.iter().any(|e| e.relation_id == "pair_create_nonzero_off_kernel"));
    }

    #[test]
    fn shuffles_of_the_flip_are_the_flip() {
        let d = DeformationOperator::new(2, q_flip(2, c(0.8, 0.0)), 1e-8).unwrap();
        let s = shuffled(&d);
        assert!(s.t_tilde.sub(d.t()).op_norm() < 1e-12);
        assert!(s.t_hat.sub(d.t()).op_norm() < 1e-12);
        // t_hat = S T S as an identity of (antilinear) compositions
        let f2 = pseudo_vec(4, 5);
        let lhs = s.t_hat.mul_vec(&f2);
        let rhs = s_swap(&d.t().mul_vec(&s_swap(&f2, 2)), 2);
        let res: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        assert!(res.sqrt() < 1e-12);
    }

    #[test]
    fn s_swap_is_an_involution() {
        let f2 = pseudo_vec(9, 42);
        let back = s_swap(&s_swap(&f2, 3), 3);
        let res: f64 = f2.iter().zip(&back).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        assert!(res.sqrt() < 1e-15);
    }
}
