//! Reduced words for permutations, the quasi-multiplicative assignment
//! sigma -> T_sigma, and the positivity operators P_n with two independent
//! construction paths.
//!
//! A `DeformationOperator` is a self-adjoint contraction T on H tensor H
//! whose braid relation residual is computed once and cached. In
//! multicomponent mode the tensor-power levels are restricted to the
//! pairwise-distinct-site sector; all slot operators are built against the
//! per-level tuple bases so both modes share one code path.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::tensor_core::{CMatrix, C64};

/// Hard guard on per-level dimension.
pub const MAX_LEVEL_DIM: usize = 8192;

// ---------------------------------------------------------------------------
// permutations and reduced words
// ---------------------------------------------------------------------------

/// Permutation in one-line notation, 0-based: position i maps to `map[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_valid(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        for &v in &self.0 {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn inversions(&self) -> usize {
        let v = &self.0;
        let mut count = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// (a . b)(i) = a(b(i)).
    pub fn compose(&self, b: &Permutation) -> Permutation {
        Permutation(b.0.iter().map(|&i| self.0[i]).collect())
    }

    /// All permutations of degree n, sorted by (inversion count, one-line lex).
    pub fn all_sorted(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let mut i = n.wrapping_sub(2);
            while i != usize::MAX && cur[i] >= cur[i + 1] {
                i = i.wrapping_sub(1);
            }
            if i == usize::MAX {
                break;
            }
            let mut j = n - 1;
            while cur[j] <= cur[i] {
                j -= 1;
            }
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out.sort_by_key(|p| (p.inversions(), p.0.clone()));
        out
    }
}

/// Minimal-length word of adjacent transpositions; letters are 1-based
/// indices in {1, ..., n-1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedWord {
    pub n: usize,
    pub letters: Vec<usize>,
}

/// Reduced word via insertion sort on the one-line notation.
pub fn reduced_word(perm: &Permutation) -> ReducedWord {
    assert!(perm.is_valid(), "not a permutation");
    let n = perm.degree();
    let mut arr = perm.0.clone();
    let mut swaps = Vec::new();
    for i in 1..n {
        let mut j = i;
        while j > 0 && arr[j - 1] > arr[j] {
            arr.swap(j - 1, j);
            swaps.push(j); // 1-based letter
            j -= 1;
        }
    }
    swaps.reverse();
    ReducedWord { n, letters: swaps }
}

/// Independent second generator (bubble sort); used by well-definedness tests.
pub fn reduced_word_bubble(perm: &Permutation) -> ReducedWord {
    assert!(perm.is_valid(), "not a permutation");
    let n = perm.degree();
    let mut arr = perm.0.clone();
    let mut swaps = Vec::new();
    loop {
        let mut swapped = false;
        for j in 1..n {
            if arr[j - 1] > arr[j] {
                arr.swap(j - 1, j);
                swaps.push(j);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    swaps.reverse();
    ReducedWord { n, letters: swaps }
}

/// Permutation encoded by a word, under the same convention used to generate
/// reduced words (composition of adjacent transpositions, leftmost applied
/// last).
pub fn perm_of_word(w: &ReducedWord) -> Permutation {
    let mut acc = Permutation::identity(w.n);
    for &l in &w.letters {
        let mut s: Vec<usize> = (0..w.n).collect();
        s.swap(l - 1, l);
        acc = acc.compose(&Permutation(s));
    }
    acc
}

// ---------------------------------------------------------------------------
// level bases
// ---------------------------------------------------------------------------

/// Multicomponent sector shape: ordered sites times an internal space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    pub n_sites: usize,
    pub internal_dim: usize,
}

impl Sector {
    #[inline]
    pub fn site_of(&self, p: usize) -> usize {
        p / self.internal_dim
    }
}

/// Ordered basis of one tensor-power level: a list of index tuples over the
/// one-particle basis. In sector mode only tuples with pairwise-distinct
/// sites are admissible.
pub struct LevelBasis {
    pub n: usize,
    pub h_dim: usize,
    pub sector: Option<Sector>,
    pub tuples: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl LevelBasis {
    fn build(h_dim: usize, sector: Option<Sector>, n: usize) -> Result<Self, CoreError> {
        let mut tuples = Vec::new();
        let mut cur = Vec::with_capacity(n);
        fn rec(
            h: usize,
            sector: Option<Sector>,
            n: usize,
            used: &mut u64,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for p in 0..h {
                if let Some(s) = sector {
                    let site = s.site_of(p);
                    if *used & (1 << site) != 0 {
                        continue;
                    }
                    *used |= 1 << site;
                    cur.push(p);
                    rec(h, sector, n, used, cur, out);
                    cur.pop();
                    *used &= !(1 << site);
                } else {
                    cur.push(p);
                    rec(h, sector, n, used, cur, out);
                    cur.pop();
                }
            }
        }
        let mut used: u64 = 0;
        rec(h_dim, sector, n, &mut used, &mut cur, &mut tuples);
        if tuples.len() > MAX_LEVEL_DIM {
            return Err(CoreError::SizeOverflow { what: "tensor-power level" });
        }
        let index = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Ok(LevelBasis { n, h_dim, sector, tuples, index })
    }

    pub fn dim(&self) -> usize {
        self.tuples.len()
    }

    pub fn index_of(&self, tuple: &[usize]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    pub fn admissible(&self, tuple: &[usize]) -> bool {
        match self.sector {
            None => tuple.iter().all(|&p| p < self.h_dim),
            Some(s) => {
                let mut used: u64 = 0;
                for &p in tuple {
                    if p >= self.h_dim {
                        return false;
                    }
                    let b = 1u64 << s.site_of(p);
                    if used & b != 0 {
                        return false;
                    }
                    used |= b;
                }
                true
            }
        }
    }
}

// ---------------------------------------------------------------------------
// sparse slot operators
// ---------------------------------------------------------------------------

/// Column-sparse matrix; enough for the slot-local operators, whose columns
/// have a bounded number of entries.
pub struct SparseOp {
    pub rows: usize,
    pub cols_dim: usize,
    cols: Vec<Vec<(usize, C64)>>,
}

impl SparseOp {
    pub fn new(rows: usize, cols_dim: usize) -> Self {
        SparseOp { rows, cols_dim, cols: vec![Vec::new(); cols_dim] }
    }

    pub fn push(&mut self, r: usize, c: usize, v: C64) {
        if v.re != 0.0 || v.im != 0.0 {
            self.cols[c].push((r, v));
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols_dim);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                m.set(r, c, m.get(r, c) + v);
            }
        }
        m
    }

    /// self * m
    pub fn mul_dense(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(self.cols_dim, m.rows(), "sparse*dense mismatch");
        let mut out = CMatrix::zeros(self.rows, m.cols());
        for k in 0..self.cols_dim {
            for &(r, v) in &self.cols[k] {
                for c in 0..m.cols() {
                    out.set(r, c, out.get(r, c) + v * m.get(k, c));
                }
            }
        }
        out
    }

    /// m * self
    pub fn dense_mul(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.cols(), self.rows, "dense*sparse mismatch");
        let mut out = CMatrix::zeros(m.rows(), self.cols_dim);
        for c in 0..self.cols_dim {
            for &(k, v) in &self.cols[c] {
                for r in 0..m.rows() {
                    out.set(r, c, out.get(r, c) + m.get(r, k) * v);
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols_dim, x.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (k, col) in self.cols.iter().enumerate() {
            let xv = x[k];
            if xv.re == 0.0 && xv.im == 0.0 {
                continue;
            }
            for &(r, v) in col {
                out[r] += v * xv;
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// deformation operator
// ---------------------------------------------------------------------------

/// Cached structural residuals of T.
#[derive(Clone, Copy, Debug)]
pub struct OpFlags {
    pub self_adjoint: bool,
    pub contraction: bool,
    pub ybe: bool,
    pub unitary: bool,
    pub self_adjoint_residual: f64,
    pub norm: f64,
    pub ybe_residual: f64,
    pub unitary_residual: f64,
}

/// Self-adjoint contraction T on H tensor H, with optional distinct-site
/// sector structure on the tensor-power levels.
#[derive(Debug)]
pub struct DeformationOperator {
    h_dim: usize,
    t: CMatrix,
    sector: Option<Sector>,
    pub flags: OpFlags,
}

impl DeformationOperator {
    /// Abstract mode: T given directly as an h_dim^2 square matrix.
    pub fn new(h_dim: usize, t: CMatrix, tol: f64) -> Result<Self, CoreError> {
        Self::build(h_dim, t, None, tol)
    }

    /// Multicomponent mode: T supported on the distinct-site sector of
    /// (C^N tensor C^m)^{tensor 2}.
    pub fn with_sector(sector: Sector, t: CMatrix, tol: f64) -> Result<Self, CoreError> {
        if sector.n_sites > 64 {
            return Err(CoreError::SizeOverflow { what: "site count" });
        }
        Self::build(sector.n_sites * sector.internal_dim, t, Some(sector), tol)
    }

    fn build(h_dim: usize, t: CMatrix, sector: Option<Sector>, tol: f64) -> Result<Self, CoreError> {
        if t.rows() != h_dim * h_dim || t.cols() != h_dim * h_dim {
            return Err(CoreError::DimMismatch {
                expected: h_dim * h_dim,
                got: t.rows(),
                what: "deformation operator matrix",
            });
        }
        let mut d = DeformationOperator {
            h_dim,
            t,
            sector,
            flags: OpFlags {
                self_adjoint: false,
                contraction: false,
                ybe: false,
                unitary: false,
                self_adjoint_residual: 0.0,
                norm: 0.0,
                ybe_residual: 0.0,
                unitary_residual: 0.0,
            },
        };
        d.compute_flags(tol)?;
        if !d.flags.self_adjoint {
            return Err(CoreError::InvalidSpec(alloc::format!(
                "T is not self-adjoint (residual {:.3e})",
                d.flags.self_adjoint_residual
            )));
        }
        if !d.flags.contraction {
            return Err(CoreError::InvalidSpec(alloc::format!(
                "T is not a contraction (norm {:.6})",
                d.flags.norm
            )));
        }
        Ok(d)
    }

    fn compute_flags(&mut self, tol: f64) -> Result<(), CoreError> {
        let t2 = self.t_i_sparse(2, 1)?.to_dense();
        let d2 = t2.rows();
        self.flags.self_adjoint_residual = t2.sub(&t2.adjoint()).op_norm();
        self.flags.self_adjoint = self.flags.self_adjoint_residual <= tol;
        self.flags.norm = t2.op_norm();
        self.flags.contraction = self.flags.norm <= 1.0 + tol;
        self.flags.unitary_residual =
            t2.adjoint().mul(&t2).sub(&CMatrix::identity(d2)).op_norm();
        self.flags.unitary = self.flags.unitary_residual <= tol;
        // Braid relation on the third tensor power; trivially true when that
        // level is empty.
        let lb3 = self.level_basis(3)?;
        if lb3.dim() == 0 {
            self.flags.ybe_residual = 0.0;
            self.flags.ybe = true;
        } else {
            let t1 = self.t_i_sparse(3, 1)?;
            let t2s = self.t_i_sparse(3, 2)?;
            let lhs = t1.mul_dense(&t2s.mul_dense(&t1.to_dense()));
            let rhs = t2s.mul_dense(&t1.mul_dense(&t2s.to_dense()));
            self.flags.ybe_residual = lhs.sub(&rhs).op_norm();
            self.flags.ybe = self.flags.ybe_residual <= tol;
        }
        Ok(())
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    pub fn sector(&self) -> Option<Sector> {
        self.sector
    }

    pub fn level_basis(&self, n: usize) -> Result<LevelBasis, CoreError> {
        LevelBasis::build(self.h_dim, self.sector, n)
    }

    pub fn level_dim(&self, n: usize) -> Result<usize, CoreError> {
        Ok(self.level_basis(n)?.dim())
    }

    /// T_i = 1^{i-1} tensor T tensor 1^{n-i-1} on level n, i in 1..n.
    pub fn t_i_sparse(&self, n: usize, i: usize) -> Result<SparseOp, CoreError> {
        assert!(i >= 1 && i < n, "slot index out of range");
        let lb = self.level_basis(n)?;
        let h = self.h_dim;
        let mut op = SparseOp::new(lb.dim(), lb.dim());
        let mut tuple = Vec::new();
        for (c, tup) in lb.tuples.iter().enumerate() {
            let (p, q) = (tup[i - 1], tup[i]);
            let col = p * h + q;
            for r2 in 0..h * h {
                let v = self.t.get(r2, col);
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let (a, b) = (r2 / h, r2 % h);
                tuple.clear();
                tuple.extend_from_slice(tup);
                tuple[i - 1] = a;
                tuple[i] = b;
                if let Some(r) = lb.index_of(&tuple) {
                    op.push(r, c, v);
                }
            }
        }
        Ok(op)
    }

    pub fn t_i(&self, n: usize, i: usize) -> Result<CMatrix, CoreError> {
        Ok(self.t_i_sparse(n, i)?.to_dense())
    }

    /// T_sigma = T_{j1} ... T_{jm}; refuses when the braid relation fails,
    /// since the value would then depend on the chosen word.
    pub fn t_sigma(&self, n: usize, w: &ReducedWord) -> Result<CMatrix, CoreError> {
        if !self.flags.ybe {
            return Err(CoreError::YbeViolated { residual: self.flags.ybe_residual });
        }
        assert_eq!(w.n, n, "word degree mismatch");
        let dim = self.level_dim(n)?;
        let mut m = CMatrix::identity(dim);
        for &j in w.letters.iter().rev() {
            m = self.t_i_sparse(n, j)?.mul_dense(&m);
        }
        Ok(m)
    }

    /// P_n as the sum over all n! permutations, in a fixed deterministic
    /// order. Each T_sigma is obtained from a shorter one by one descent
    /// step, so the whole sum costs n!-1 sparse products.
    pub fn p_n_direct(&self, n: usize) -> Result<CMatrix, CoreError> {
        if !self.flags.ybe {
            return Err(CoreError::YbeViolated { residual: self.flags.ybe_residual });
        }
        if n > 8 {
            return Err(CoreError::SizeOverflow { what: "factorial permutation sum" });
        }
        let dim = self.level_dim(n)?;
        if n <= 1 {
            return Ok(CMatrix::identity(dim));
        }
        let perms = Permutation::all_sorted(n);
        let mut store: BTreeMap<Vec<usize>, CMatrix> = BTreeMap::new();
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &perms {
            let m = if p.inversions() == 0 {
                CMatrix::identity(dim)
            } else {
                // smallest left descent: values i-1 and i out of order
                let pos = |v: usize| p.0.iter().position(|&x| x == v).unwrap();
                let mut desc = 0;
                for i in 1..n {
                    if pos(i - 1) > pos(i) {
                        desc = i;
                        break;
                    }
                }
                let mut s: Vec<usize> = (0..n).collect();
                s.swap(desc - 1, desc);
                let shorter = Permutation(s).compose(p);
                debug_assert_eq!(shorter.inversions() + 1, p.inversions());
                let prev = store.get(&shorter.0).expect("descent order");
                self.t_i_sparse(n, desc)?.mul_dense(prev)
            };
            sum = sum.add(&m);
            store.insert(p.0.clone(), m);
        }
        Ok(sum)
    }

    /// The staircase sum 1 + T_1 + T_1 T_2 + ... + T_1...T_{n-1} on level n.
    pub fn bb_t_n(&self, n: usize) -> Result<CMatrix, CoreError> {
        let dim = self.level_dim(n)?;
        let mut acc = CMatrix::identity(dim);
        let mut partial = CMatrix::identity(dim);
        for k in 1..n {
            partial = self.t_i_sparse(n, k)?.dense_mul(&partial);
            acc = acc.add(&partial);
        }
        Ok(acc)
    }

    /// Independent construction path: P_n = (1 tensor P_{n-1}) * staircase,
    /// the coset decomposition over the position of the first slot.
    pub fn p_n_recursive(&self, n: usize) -> Result<CMatrix, CoreError> {
        if !self.flags.ybe {
            return Err(CoreError::YbeViolated { residual: self.flags.ybe_residual });
        }
        let dim = self.level_dim(n)?;
        if n <= 1 {
            return Ok(CMatrix::identity(dim));
        }
        let prev = self.p_n_recursive(n - 1)?;
        let lifted = self.one_tensor(&prev, n)?;
        Ok(lifted.mul(&self.bb_t_n(n)?))
    }

    /// Apply a level-m operator to the m consecutive slots starting at
    /// `start` (1-based) of level n, identity elsewhere. Only meaningful for
    /// operators that preserve slot admissibility (everything built from T
    /// does, since T permutes sites).
    pub fn promote_block(
        &self,
        a: &CMatrix,
        m: usize,
        n: usize,
        start: usize,
    ) -> Result<CMatrix, CoreError> {
        assert!(start >= 1 && start + m - 1 <= n, "slot window out of range");
        let lb = self.level_basis(n)?;
        let lbm = self.level_basis(m)?;
        assert_eq!(a.rows(), lbm.dim());
        assert_eq!(a.cols(), lbm.dim());
        let lo = start - 1;
        let hi = lo + m;
        let mut out = CMatrix::zeros(lb.dim(), lb.dim());
        let mut tuple = Vec::with_capacity(n);
        for (c, tup) in lb.tuples.iter().enumerate() {
            let ci = lbm.index_of(&tup[lo..hi]).expect("window admissible");
            for r in 0..lbm.dim() {
                let v = a.get(r, ci);
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                tuple.clear();
                tuple.extend_from_slice(tup);
                tuple[lo..hi].copy_from_slice(&lbm.tuples[r]);
                if let Some(ri) = lb.index_of(&tuple) {
                    out.set(ri, c, out.get(ri, c) + v);
                }
            }
        }
        Ok(out)
    }

    /// Lift a level-(n-1) operator A to 1_H tensor A on level n.
    pub fn one_tensor(&self, a: &CMatrix, n: usize) -> Result<CMatrix, CoreError> {
        self.promote_block(a, n - 1, n, 2)
    }

    /// Apply a level-2 operator to slots (i, i+1) of level n.
    pub fn promote_pair_op(&self, a2: &CMatrix, n: usize, i: usize) -> Result<CMatrix, CoreError> {
        self.promote_block(a2, 2, n, i)
    }
}

#[cfg(test)]
pub mod tests_support {
    use super::*;

    /// q times the flip on (C^k) tensor (C^k).
    pub fn q_flip(k: usize, q: C64) -> CMatrix {
        let mut t = CMatrix::zeros(k * k, k * k);
        for a in 0..k {
            for b in 0..k {
                t.set(b * k + a, a * k + b, q);
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::q_flip;
    use super::*;
    use crate::tensor_core::eigh;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reduced_word_basics() {
        let id = Permutation::identity(3);
        assert_eq!(reduced_word(&id).letters.len(), 0);
        let swap = Permutation(vec![1, 0]);
        assert_eq!(reduced_word(&swap).letters, vec![1]);
        let rev = Permutation(vec![2, 1, 0]);
        let w = reduced_word(&rev);
        assert_eq!(w.letters.len(), 3);
        assert_eq!(perm_of_word(&w), rev);
    }

    #[test]
    fn both_generators_encode_the_permutation() {
        for p in Permutation::all_sorted(4) {
            let w1 = reduced_word(&p);
            let w2 = reduced_word_bubble(&p);
            assert_eq!(w1.letters.len(), p.inversions());
            assert_eq!(w2.letters.len(), p.inversions());
            assert_eq!(perm_of_word(&w1), p);
            assert_eq!(perm_of_word(&w2), p);
        }
    }

    #[test]
    fn t_sigma_well_defined_under_braid_relation() {
        let d = DeformationOperator::new(2, q_flip(2, c(0.7, 0.0)), 1e-8).unwrap();
        assert!(d.flags.ybe);
        for p in Permutation::all_sorted(4) {
            let m1 = d.t_sigma(4, &reduced_word(&p)).unwrap();
            let m2 = d.t_sigma(4, &reduced_word_bubble(&p)).unwrap();
            assert!(m1.sub(&m2).op_norm() < 1e-10);
        }
    }

    #[test]
    fn t_sigma_refused_without_braid_relation() {
        // A Hermitian contraction that generically violates the braid relation.
        let mut t = CMatrix::zeros(4, 4);
        t.set(0, 0, c(0.5, 0.0));
        t.set(1, 2, c(0.3, 0.1));
        t.set(2, 1, c(0.3, -0.1));
        t.set(3, 3, c(-0.2, 0.0));
        t.set(0, 3, c(0.25, 0.0));
        t.set(3, 0, c(0.25, 0.0));
        let d = DeformationOperator::new(2, t, 1e-8).unwrap();
        assert!(!d.flags.ybe);
        let err = d.t_sigma(3, &reduced_word(&Permutation(vec![1, 0, 2]))).unwrap_err();
        assert!(matches!(err, CoreError::YbeViolated { .. }));
    }

    #[test]
    fn p_n_for_zero_t_is_identity() {
        let d = DeformationOperator::new(2, CMatrix::zeros(4, 4), 1e-8).unwrap();
        for n in 1..=4 {
            let p = d.p_n_direct(n).unwrap();
            assert!(p.sub(&CMatrix::identity(d.level_dim(n).unwrap())).op_norm() < 1e-12);
        }
    }

    #[test]
    fn p_2_for_scalar_flip_has_eigenvalues_one_plus_minus_q() {
        let q = 0.6;
        let d = DeformationOperator::new(2, q_flip(2, c(q, 0.0)), 1e-8).unwrap();
        let p2 = d.p_n_direct(2).unwrap();
        let (vals, _) = eigh(&p2);
        for v in vals {
            assert!((v - (1.0 - q)).abs() < 1e-10 || (v - (1.0 + q)).abs() < 1e-10);
        }
    }

    #[test]
    fn p_3_for_unitary_flip_is_six_times_symmetrizer() {
        let d = DeformationOperator::new(2, q_flip(2, c(1.0, 0.0)), 1e-8).unwrap();
        assert!(d.flags.unitary);
        let p3 = d.p_n_direct(3).unwrap();
        let (vals, _) = eigh(&p3);
        for v in vals {
            assert!(v.abs() < 1e-9 || (v - 6.0).abs() < 1e-9, "unexpected eigenvalue {v}");
        }
    }

    #[test]
    fn recursive_path_matches_direct_sum() {
        for q in [c(0.45, 0.0), c(1.0, 0.0)] {
            let d = DeformationOperator::new(2, q_flip(2, q), 1e-8).unwrap();
            for n in 2..=4 {
                let a = d.p_n_direct(n).unwrap();
                let b = d.p_n_recursive(n).unwrap();
                let fact: f64 = (1..=n).product::<usize>() as f64;
                assert!(a.sub(&b).op_norm() < 1e-10 * fact);
            }
        }
    }

    #[test]
    fn bb_t_2_is_one_plus_t() {
        let t = q_flip(2, c(0.3, 0.0));
        let d = DeformationOperator::new(2, t.clone(), 1e-8).unwrap();
        let bb = d.bb_t_n(2).unwrap();
        assert!(bb.sub(&CMatrix::identity(4).add(&t)).op_norm() < 1e-12);
    }

    #[test]
    fn positivity_of_p_n() {
        let d = DeformationOperator::new(2, q_flip(2, c(0.8, 0.0)), 1e-8).unwrap();
        for n in 2..=4 {
            let p = d.p_n_direct(n).unwrap();
            let (vals, _) = eigh(&p);
            let top = vals.last().unwrap();
            assert!(vals[0] >= -1e-9 * top);
            // strict when the norm is < 1
            assert!(vals[0] > 0.0);
        }
    }

    #[test]
    fn rejects_expansion() {
        let t = q_flip(2, c(1.5, 0.0));
        let err = DeformationOperator::new(2, t, 1e-8).unwrap_err();
        assert!(matches!(err, CoreError::InvalidSpec(_)));
    }

    #[test]
    fn sector_level_dims_count_injections() {
        let sector = Sector { n_sites: 3, internal_dim: 2 };
        let d = DeformationOperator::with_sector(sector, CMatrix::zeros(36, 36), 1e-8).unwrap();
        assert_eq!(d.level_dim(1).unwrap(), 6);
        assert_eq!(d.level_dim(2).unwrap(), 3 * 2 * 4);
        assert_eq!(d.level_dim(3).unwrap(), 6 * 8);
        assert_eq!(d.level_dim(4).unwrap(), 0);
    }
}
