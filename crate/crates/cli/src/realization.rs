//! Concrete two-component representation on a doubly graded space built from
//! two one-mode deformed oscillators and a grading phase, used as an
//! independent cross-check of the corner-diagonal relation table and of the
//! creation-operator norm bound.
//!
//! Sectors are pairs (p, r) with p + r <= n_max; the first component raises
//! p, the second raises r and picks up the grading phase u^p with u the
//! conjugate of the exchange phase.

use fockforge_core::tensor_core::{CMatrix, C64};

use crate::report::CheckItem;
use crate::runner::RELATION_TOL;

/// Deformed integer bracket: 1 + k + ... + k^(n-1).
fn bracket(k: f64, n: usize) -> f64 {
    (0..n).map(|j| k.powi(j as i32)).sum()
}

struct Graded {
    /// (p, r) per basis index, ordered by total then p.
    sectors: Vec<(usize, usize)>,
    index: std::collections::BTreeMap<(usize, usize), usize>,
}

impl Graded {
    fn new(n_max: usize) -> Self {
        let mut sectors = Vec::new();
        for total in 0..=n_max {
            for p in 0..=total {
                sectors.push((p, total - p));
            }
        }
        let index = sectors.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Graded { sectors, index }
    }

    fn dim(&self) -> usize {
        self.sectors.len()
    }
}

/// Residual of M restricted to source sectors with total <= cap.
fn capped_norm(g: &Graded, m: &CMatrix, cap: usize) -> f64 {
    let mut masked = m.clone();
    for (c, &(p, r)) in g.sectors.iter().enumerate() {
        if p + r > cap {
            for row in 0..masked.rows() {
                masked.set(row, c, C64::new(0.0, 0.0));
            }
        }
    }
    masked.op_norm()
}

/// Verify the representation's commutation identities and the norm bound of
/// the creation operator under refinement of the truncation.
pub fn realization_items(k: f64, q: C64, n_max: usize, pre: &str) -> Vec<CheckItem> {
    assert!(k.abs() < 1.0, "norm bound needs |k| < 1");
    let g = Graded::new(n_max);
    let dim = g.dim();
    let u = q.conj();
    let amp = |n: usize| bracket(k, n + 1).sqrt();

    let mut a1p = CMatrix::zeros(dim, dim);
    let mut a2p = CMatrix::zeros(dim, dim);
    for (c, &(p, r)) in g.sectors.iter().enumerate() {
        if p + r + 1 <= n_max {
            let up = g.index[&(p + 1, r)];
            a1p.set(up, c, C64::new(amp(p), 0.0));
            let up = g.index[&(p, r + 1)];
            a2p.set(up, c, u.powu(p as u32) * C64::new(amp(r), 0.0));
        }
    }
    let a1m = a1p.adjoint();
    let a2m = a2p.adjoint();
    let id = CMatrix::identity(dim);
    let kk = C64::new(k, 0.0);

    let mut items = Vec::new();
    let mut push = |name: &str, detail: String, m: CMatrix, cap: usize| {
        let r = capped_norm(&g, &m, cap);
        items.push(CheckItem::new(format!("{pre}{name}"), detail, r, RELATION_TOL));
    };

    // a^-_1 a^+_1 = k a^+_1 a^-_1 + 1, and the same for the second component.
    push(
        "mode1_normal_order",
        String::new(),
        a1m.mul(&a1p).sub(&a1p.mul(&a1m).scale(kk)).sub(&id),
        n_max - 1,
    );
    push(
        "mode2_normal_order",
        String::new(),
        a2m.mul(&a2p).sub(&a2p.mul(&a2m).scale(kk)).sub(&id),
        n_max - 1,
    );
    // cross relations fix the grading orientation: with u = conj(q) the
    // representation reproduces the table's phases. The printed grading
    // orientation (u = q) is reported as the alternate residual.
    let cross12 = a1m.mul(&a2p).sub(&a2p.mul(&a1m).scale(q.conj()));
    let alt12 = a1m.mul(&a2p).sub(&a2p.mul(&a1m).scale(q));
    push(
        "cross_12_normal_order",
        format!(
            "alternate grading orientation residual {:.3e}",
            capped_norm(&g, &alt12, n_max - 1)
        ),
        cross12,
        n_max - 1,
    );
    push(
        "cross_21_normal_order",
        String::new(),
        a2m.mul(&a1p).sub(&a1p.mul(&a2m).scale(q)),
        n_max - 1,
    );
    push(
        "create_exchange",
        String::new(),
        a1p.mul(&a2p).sub(&a2p.mul(&a1p).scale(q)),
        n_max.saturating_sub(2),
    );
    push(
        "annih_exchange",
        String::new(),
        a1m.mul(&a2m).sub(&a2m.mul(&a1m).scale(q)),
        n_max,
    );

    // Creation norm under refinement: nondecreasing and below the closed-form
    // bound 1/sqrt(1 - k).
    let bound = 1.0 / (1.0 - k).sqrt();
    let norms: Vec<f64> = (1..=n_max).map(|cap| bracket(k, cap).sqrt()).collect();
    let monotone = norms.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let worst = norms.iter().cloned().fold(0.0f64, f64::max);
    // cross-check the closed form against the operator norm of the built block
    let op = capped_norm(&g, &a1p, n_max - 1);
    let closed_form_gap = (op - norms[n_max - 1]).abs();
    items.push(CheckItem::verdict(
        format!("{pre}creation_norm_bound"),
        format!(
            "truncation norms {:?}, bound {bound:.6}, operator/closed-form gap {closed_form_gap:.3e}",
            norms.iter().map(|v| (v * 1e6).round() / 1e6).collect::<Vec<f64>>()
        ),
        (worst - bound).max(0.0).max(closed_form_gap),
        1e-8,
        monotone && worst <= bound + 1e-8 && closed_form_gap <= 1e-8,
    ));
    items
}
