//! The structural check battery shared by `check` and the fixture suite:
//! Yang-Baxter flags, positivity, the two projection oracles, kernel/range
//! theorems, membership spot checks, and the relation verifiers.

use fockforge_core::braid_rep::DeformationOperator;
use fockforge_core::fock_space::{
    check_kernel_sum_formula, check_kerr_t_lemma, check_membership_theorem,
    check_parallel_sum_prop, check_range_intersection, check_unitary_fixed_space, FockTruncation,
};
use fockforge_core::multi_component::{
    check_ker_one_plus_t, check_membership_multicomponent, check_pair_projection_assembly,
    check_shuffled_assembly, check_spectral_qybe, relation_discovery, MultiSpec,
};
use fockforge_core::quant_ops::{OpContext, RelationEntry};
use fockforge_core::tensor_core::eigh;

use crate::report::CheckItem;
use crate::rng::XorShift;

pub const PASS_TOL: f64 = 1e-8;
pub const RELATION_TOL: f64 = 1e-9;

pub fn relation_item(prefix: &str, e: &RelationEntry) -> CheckItem {
    CheckItem::verdict(
        format!("{prefix}{}", e.relation_id),
        e.inputs.clone(),
        e.residual,
        RELATION_TOL,
        e.pass,
    )
}

/// The T-level structure items alone: self-adjointness, contraction, the
/// braid relation, and (site-resolved) the blockwise Yang-Baxter check.
/// These are reportable even when the braid relation fails and the
/// permutation sums are therefore undefined.
pub fn flag_items(
    d: &DeformationOperator,
    multi: Option<&MultiSpec>,
    tol: f64,
    prefix: &str,
) -> Vec<CheckItem> {
    let mut items = Vec::new();
    let p = |s: &str| format!("{prefix}{s}");
    items.push(CheckItem::new(
        p("t_self_adjoint"),
        "",
        d.flags.self_adjoint_residual,
        tol,
    ));
    items.push(CheckItem::verdict(
        p("t_contraction"),
        format!("operator norm {:.6}", d.flags.norm),
        (d.flags.norm - 1.0).max(0.0),
        tol,
        d.flags.contraction,
    ));
    items.push(CheckItem::verdict(
        p("t_yang_baxter"),
        "braid relation on the third tensor power",
        d.flags.ybe_residual,
        tol,
        d.flags.ybe,
    ));
    if let Some(spec) = multi {
        match check_spectral_qybe(spec, d, tol) {
            Ok(rep) => {
                items.push(CheckItem::verdict(
                    p("qybe_blocks"),
                    "pointwise Yang-Baxter over ordered site triples",
                    rep.max_triple_residual,
                    tol,
                    rep.triple_pass,
                ));
                items.push(CheckItem::verdict(
                    p("qybe_agreement"),
                    "block-level and operator-level verdicts agree",
                    if rep.agree { 0.0 } else { 1.0 },
                    0.5,
                    rep.agree,
                ));
            }
            Err(e) => items.push(CheckItem::verdict(p("qybe_blocks"), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
    }
    items
}

/// Full structural battery. `prefix` namespaces the item names (fixture id).
pub fn run_structural_checks(
    d: &DeformationOperator,
    multi: Option<&MultiSpec>,
    trunc: &FockTruncation,
    ctx: &OpContext,
    tol: f64,
    prefix: &str,
) -> Vec<CheckItem> {
    let n_max = trunc.n_max;
    let p = |s: &str| format!("{prefix}{s}");
    let mut items = flag_items(d, multi, tol, prefix);

    // --- positivity and the two oracles ---
    let strict = d.flags.norm < 1.0 - 1e-6;
    for n in 2..=n_max {
        match d.p_n_direct(n) {
            Ok(pn) => {
                let (vals, _) = eigh(&pn);
                let lam_max = vals.iter().cloned().fold(0.0f64, f64::max);
                let lam_min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let mut item = CheckItem::verdict(
                    p(&format!("positivity_n{n}")),
                    format!("min eigenvalue {lam_min:.3e}, max {lam_max:.3e}"),
                    (-lam_min).max(0.0),
                    1e-9 * lam_max.max(1.0),
                    lam_min >= -1e-9 * lam_max,
                );
                if strict && lam_min <= 1e-4 * lam_max {
                    item.pass = false;
                    item.detail.push_str("; strict positivity expected for a strict contraction");
                }
                items.push(item);
            }
            Err(e) => items.push(CheckItem::verdict(p(&format!("positivity_n{n}")), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
        let res = (|| -> Result<f64, fockforge_core::CoreError> {
            let a = d.p_n_direct(n)?;
            let b = d.p_n_recursive(n)?;
            Ok(a.sub(&b).op_norm())
        })();
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        match res {
            Ok(r) => items.push(CheckItem::new(
                p(&format!("oracle_equivalence_n{n}")),
                "direct descent sum vs staircase recursion",
                r,
                1e-9 * factorial,
            )),
            Err(e) => items.push(CheckItem::verdict(p(&format!("oracle_equivalence_n{n}")), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
    }

    // --- level theorems ---
    for n in 2..=n_max {
        let level = trunc.level(n);
        match check_kernel_sum_formula(d, level, tol) {
            Ok(r) => items.push(CheckItem::new(p(&format!("kernel_sum_n{n}")), "", r, PASS_TOL)),
            Err(e) => items.push(CheckItem::verdict(p(&format!("kernel_sum_n{n}")), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
        match check_range_intersection(d, level, tol) {
            Ok(r) => items.push(CheckItem::new(p(&format!("range_intersection_n{n}")), "", r, PASS_TOL)),
            Err(e) => items.push(CheckItem::verdict(p(&format!("range_intersection_n{n}")), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
    }
    for n in 3..=n_max {
        match check_parallel_sum_prop(d, trunc, n, tol) {
            Ok(r) => items.push(CheckItem::new(p(&format!("parallel_sum_n{n}")), "", r, PASS_TOL)),
            Err(e) => items.push(CheckItem::verdict(p(&format!("parallel_sum_n{n}")), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
    }
    if n_max < 3 {
        items.push(CheckItem::skip(p("parallel_sum_n3"), "n_max < 3"));
    }
    match check_kerr_t_lemma(d, tol) {
        Ok(r) => items.push(CheckItem::new(p("kernel_one_plus_t_lemma"), "", r, PASS_TOL)),
        Err(e) => items.push(CheckItem::verdict(p("kernel_one_plus_t_lemma"), format!("{e:?}"), f64::INFINITY, tol, false)),
    }
    if d.flags.unitary {
        for n in 2..=n_max {
            match check_unitary_fixed_space(d, trunc.level(n), tol) {
                Ok(r) => items.push(CheckItem::new(p(&format!("unitary_fixed_space_n{n}")), "", r, PASS_TOL)),
                Err(e) => items.push(CheckItem::verdict(p(&format!("unitary_fixed_space_n{n}")), format!("{e:?}"), f64::INFINITY, tol, false)),
            }
            let level = trunc.level(n);
            let factorial: f64 = (1..=n).map(|k| k as f64).product();
            let r = level.proj.sub(&level.p_script.scale(
                fockforge_core::tensor_core::C64::new(1.0 / factorial, 0.0),
            )).op_norm();
            items.push(CheckItem::new(
                p(&format!("projection_is_scaled_sum_n{n}")),
                "orthogonal projection equals the positivity operator over n!",
                r,
                RELATION_TOL,
            ));
        }
    }

    // --- membership spot checks at the top level ---
    let top = trunc.level(n_max);
    if top.dim() > 0 {
        let f = top.subspace.frame.column(0);
        match check_membership_theorem(d, top, &f, tol) {
            Ok(v) => items.push(CheckItem::verdict(
                p("membership_frame_vector"),
                "a frame vector satisfies the slot-wise criterion",
                if v { 0.0 } else { 1.0 },
                0.5,
                v,
            )),
            Err(e) => items.push(CheckItem::verdict(p("membership_frame_vector"), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
    }
    if top.kernel_frame.cols() > 0 {
        let g = top.kernel_frame.column(0);
        match check_membership_theorem(d, top, &g, tol) {
            Ok(v) => items.push(CheckItem::verdict(
                p("membership_kernel_vector"),
                "a kernel vector violates the slot-wise criterion",
                if v { 1.0 } else { 0.0 },
                0.5,
                !v,
            )),
            Err(e) => items.push(CheckItem::verdict(p("membership_kernel_vector"), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
    } else {
        items.push(CheckItem::skip(p("membership_kernel_vector"), "kernel is trivial at the top level"));
    }

    // --- ladder-operator relations ---
    let h = d.h_dim();
    let mut rng = XorShift::new(0x5eed_bead_u64 ^ 0xA5A5_5A5A);
    let mut worst = 0.0f64;
    let sector = d.sector();
    for _ in 0..20 {
        // In the site-resolved model the identity is a distinct-site
        // statement, so draw the two vectors supported on different sites.
        let (f, g) = match sector.as_ref() {
            None => (rng.complex_vec(h), rng.complex_vec(h)),
            Some(s) => {
                let n_sites = s.site_of(h - 1) + 1;
                let m = h / n_sites;
                let x = rng.next_usize(n_sites);
                let y = (x + 1 + rng.next_usize(n_sites - 1)) % n_sites;
                let fi = rng.complex_vec(m);
                let gi = rng.complex_vec(m);
                let mut f = vec![fockforge_core::tensor_core::C64::new(0.0, 0.0); h];
                let mut g = f.clone();
                f[x * m..(x + 1) * m].copy_from_slice(&fi);
                g[y * m..(y + 1) * m].copy_from_slice(&gi);
                (f, g)
            }
        };
        let e = ctx.verify_main_relation(&f, &g, "random pair", RELATION_TOL);
        worst = worst.max(e.residual);
    }
    items.push(CheckItem::new(
        p("main_relation_random_pairs"),
        "reordering identity for 20 deterministic pseudo-random pairs on distinct sites when site-resolved",
        worst,
        RELATION_TOL,
    ));
    for e in ctx.verify_pair_relations(RELATION_TOL) {
        items.push(relation_item(prefix, &e));
    }
    for e in ctx.verify_basis_relations(RELATION_TOL) {
        items.push(relation_item(prefix, &e));
    }

    // --- multicomponent structure ---
    if let Some(spec) = multi {
        match check_pair_projection_assembly(spec, d, trunc.level(2), tol) {
            Ok(r) => items.push(CheckItem::new(p("pair_projection_assembly"), "", r, PASS_TOL)),
            Err(e) => items.push(CheckItem::verdict(p("pair_projection_assembly"), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
        match check_ker_one_plus_t(spec, d, tol) {
            Ok(r) => items.push(CheckItem::new(p("kernel_construction"), "seeded kernel span vs spectral kernel", r, PASS_TOL)),
            Err(e) => items.push(CheckItem::verdict(p("kernel_construction"), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
        match check_shuffled_assembly(spec, d) {
            Ok(r) => items.push(CheckItem::new(p("shuffled_assembly"), "blockwise reshuffles vs operator reshuffles", r, PASS_TOL)),
            Err(e) => items.push(CheckItem::verdict(p("shuffled_assembly"), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
        if top.dim() > 0 {
            let f = top.subspace.frame.column(0);
            match check_membership_multicomponent(spec, d, top, &f, tol) {
                Ok(v) => items.push(CheckItem::verdict(
                    p("membership_per_pair_frame"),
                    "per-pair criterion accepts a frame vector and agrees with the slot-wise path",
                    if v { 0.0 } else { 1.0 },
                    0.5,
                    v,
                )),
                Err(e) => items.push(CheckItem::verdict(p("membership_per_pair_frame"), format!("{e:?}"), f64::INFINITY, tol, false)),
            }
        }
        match relation_discovery(spec, ctx, RELATION_TOL) {
            Ok(entries) => {
                for e in entries {
                    items.push(relation_item(prefix, &e));
                }
            }
            Err(e) => items.push(CheckItem::verdict(p("relation_discovery"), format!("{e:?}"), f64::INFINITY, tol, false)),
        }
    }

    items
}
