//! Built-in example models with golden data: exchange blocks, expected
//! kernel/range spans, expected reshuffled blocks, and their relation tables.
//!
//! Desk scale uses 3 sites with depth 3; `--big` uses 4 sites with depth 4.

use std::collections::BTreeMap;

use fockforge_core::fock_space::FockTruncation;
use fockforge_core::multi_component::{shuffled_c, CRule, MultiSpec, SiteModel};
use fockforge_core::quant_ops::OpContext;
use fockforge_core::tensor_core::{kernel_basis, range_basis, subspace_distance, CMatrix, C64};

use crate::realization::realization_items;
use crate::relations::{anyon_items, kq_items, offdiag_items, pw_items, scalar_pair_items, Ladders};
use crate::report::CheckItem;
use crate::runner::run_structural_checks;

pub const FIXTURE_NAMES: &[&str] = &["ex_kq", "ex_pw", "ex_offdiag", "ex_anyon4", "ex_spatial"];

/// Default parameters of the bundled models.
pub const KQ_K: f64 = 0.5;
pub const PW_MU: f64 = 0.5;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn i_unit() -> C64 {
    c(0.0, 1.0)
}

fn phase(denom: f64) -> C64 {
    let a = std::f64::consts::PI / denom;
    c(a.cos(), a.sin())
}

pub fn anyon_phases() -> [C64; 4] {
    [phase(3.0), phase(5.0), phase(7.0), phase(11.0)]
}

/// Corner-diagonal block: e11 -> k e11, e22 -> k e22, e12 <-> e21 through q.
fn kq_block(k: f64, q: C64) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m.set(0, 0, c(k, 0.0));
    m.set(1, 2, q.conj());
    m.set(2, 1, q);
    m.set(3, 3, c(k, 0.0));
    m
}

/// Coupled-weight block with parameter mu.
fn pw_block(mu: f64) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m.set(0, 0, c(mu * mu, 0.0));
    m.set(1, 2, c(mu, 0.0));
    m.set(2, 1, c(mu, 0.0));
    m.set(2, 2, c(mu * mu - 1.0, 0.0));
    m.set(3, 3, c(mu * mu, 0.0));
    m
}

/// Anti-diagonal block: e11 <-> e22 through q, middle weights k.
fn offdiag_block(k: f64, q: C64) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m.set(0, 3, q.conj());
    m.set(3, 0, q);
    m.set(1, 1, c(k, 0.0));
    m.set(2, 2, c(k, 0.0));
    m
}

/// Unitary weighted flip: e11 -> q1 e11, e12 -> q3 e21, e21 -> q2 e12,
/// e22 -> q4 e22.
fn anyon_block(q: [C64; 4]) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m.set(0, 0, q[0]);
    m.set(1, 2, q[1]);
    m.set(2, 1, q[2]);
    m.set(3, 3, q[3]);
    m
}

/// Per-pair scalar weights (w1, w2) for the spatial model: pair (0, 1) has
/// unimodular w1, every other pair has |w1| < 1; all w2 are unimodular.
pub fn spatial_tables(n_sites: usize) -> (Vec<C64>, Vec<C64>) {
    assert!(n_sites == 3 || n_sites == 4, "spatial tables are defined for 3 or 4 sites");
    let n = n_sites;
    let mut w1 = vec![c(0.0, 0.0); n * n];
    let mut w2 = vec![c(0.0, 0.0); n * n];
    let set_pair = |tab: &mut Vec<C64>, x: usize, y: usize, v: C64| {
        tab[x * n + y] = v;
        tab[y * n + x] = v.conj();
    };
    set_pair(&mut w1, 0, 1, c(0.6, 0.8));
    set_pair(&mut w1, 0, 2, c(0.3, 0.4));
    set_pair(&mut w1, 1, 2, c(-0.5, 0.0));
    set_pair(&mut w2, 0, 1, c(0.0, 1.0));
    set_pair(&mut w2, 0, 2, c(0.8, 0.6));
    set_pair(&mut w2, 1, 2, c(1.0, 0.0));
    if n == 4 {
        set_pair(&mut w1, 0, 3, c(0.2, 0.0));
        set_pair(&mut w1, 1, 3, c(0.0, 0.1));
        set_pair(&mut w1, 2, 3, c(0.0, 0.4));
        let p4 = phase(4.0);
        set_pair(&mut w2, 0, 3, p4);
        set_pair(&mut w2, 1, 3, c(-1.0, 0.0));
        set_pair(&mut w2, 2, 3, c(0.6, -0.8));
    }
    (w1, w2)
}

pub fn fixture_scale(big: bool) -> (usize, usize) {
    if big {
        (4, 4)
    } else {
        (3, 3)
    }
}

pub fn fixture_spec(name: &str, n_sites: usize) -> Option<MultiSpec> {
    let sites = SiteModel { n_sites, internal_dim: 2 };
    let rule = match name {
        "ex_kq" => CRule::Constant(kq_block(KQ_K, i_unit())),
        "ex_pw" => CRule::Constant(pw_block(PW_MU)),
        "ex_offdiag" => CRule::Constant(offdiag_block(KQ_K, i_unit())),
        "ex_anyon4" => CRule::SignSplit(anyon_block(anyon_phases())),
        "ex_spatial" => {
            let (q1, q2) = spatial_tables(n_sites);
            CRule::ScalarPair { q1, q2 }
        }
        _ => return None,
    };
    Some(MultiSpec { sites, rule })
}

fn span_of(cols: &[Vec<C64>]) -> fockforge_core::tensor_core::Subspace {
    let mat = CMatrix::from_cols(cols[0].len(), cols);
    range_basis(&mat, 1e-10)
}

fn e4(idx: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); 4];
    v[idx] = c(1.0, 0.0);
    v
}

/// Golden kernel/range spans of 1 - C^2 and golden reshuffled blocks,
/// compared against the computed objects.
fn golden_items(name: &str, spec: &MultiSpec, pre: &str) -> Vec<CheckItem> {
    let mut items = Vec::new();
    let cm = spec.c_block(0, 1).expect("pair block");
    let one_minus_c2 = CMatrix::identity(4).sub(&cm.mul(&cm));

    let mut push_span = |what: &str, golden: Vec<Vec<C64>>, computed: fockforge_core::tensor_core::Subspace| {
        let expected = span_of(&golden);
        let dist = match subspace_distance(&computed, &expected) {
            Ok(d) => d,
            Err(_) => f64::INFINITY,
        };
        items.push(CheckItem::new(
            format!("{pre}golden_{what}"),
            format!("computed dimension {}", computed.dim()),
            dist,
            1e-8,
        ));
    };
    match name {
        "ex_kq" => {
            push_span("kernel_one_minus_c2", vec![e4(1), e4(2)], kernel_basis(&one_minus_c2, 1e-10));
            push_span("range_one_minus_c2", vec![e4(0), e4(3)], range_basis(&one_minus_c2, 1e-10));
        }
        "ex_pw" => {
            let mu = PW_MU;
            let mut kvec = vec![c(0.0, 0.0); 4];
            kvec[1] = c(-mu, 0.0);
            kvec[2] = c(1.0, 0.0);
            push_span("kernel_one_minus_c2", vec![kvec], kernel_basis(&one_minus_c2, 1e-10));
            let mut rvec = vec![c(0.0, 0.0); 4];
            rvec[1] = c(1.0, 0.0);
            rvec[2] = c(mu, 0.0);
            push_span(
                "range_one_minus_c2",
                vec![e4(0), e4(3), rvec],
                range_basis(&one_minus_c2, 1e-10),
            );
        }
        _ => {}
    }

    // entrywise golden for the reshuffled block of the representative pair
    let expected_tilde = match name {
        "ex_kq" => {
            let mut m = CMatrix::zeros(4, 4);
            m.set(0, 0, c(KQ_K, 0.0));
            m.set(1, 2, i_unit());
            m.set(2, 1, i_unit().conj());
            m.set(3, 3, c(KQ_K, 0.0));
            Some(m)
        }
        "ex_pw" => {
            let mu = PW_MU;
            let mut m = CMatrix::zeros(4, 4);
            m.set(0, 0, c(mu * mu, 0.0));
            m.set(0, 3, c(mu * mu - 1.0, 0.0));
            m.set(1, 2, c(mu, 0.0));
            m.set(2, 1, c(mu, 0.0));
            m.set(3, 3, c(mu * mu, 0.0));
            Some(m)
        }
        "ex_offdiag" => {
            let mut m = CMatrix::zeros(4, 4);
            m.set(0, 3, c(KQ_K, 0.0));
            m.set(3, 0, c(KQ_K, 0.0));
            m.set(1, 1, i_unit().conj());
            m.set(2, 2, i_unit());
            Some(m)
        }
        "ex_anyon4" => {
            let [q1, q2, q3, q4] = anyon_phases();
            let mut m = CMatrix::zeros(4, 4);
            m.set(0, 0, q1);
            m.set(1, 2, q3);
            m.set(2, 1, q2);
            m.set(3, 3, q4);
            Some(m)
        }
        "ex_spatial" => {
            // weights swap roles under the reshuffle
            let (w1t, w2t) = spatial_tables(spec.sites.n_sites);
            let (w1, w2) = (w1t[1], w2t[1]);
            let mut m = CMatrix::zeros(4, 4);
            m.set(3, 0, w2);
            m.set(0, 3, w2);
            m.set(1, 1, w1);
            m.set(2, 2, w1);
            Some(m)
        }
        _ => None,
    };
    if let Some(expected) = expected_tilde {
        let (tilde, _) = shuffled_c(&cm, 2);
        let mut worst = 0.0f64;
        for r in 0..4 {
            for cc in 0..4 {
                worst = worst.max((tilde.get(r, cc) - expected.get(r, cc)).norm());
            }
        }
        items.push(CheckItem::new(
            format!("{pre}golden_reshuffled_block"),
            "entrywise against the expected reshuffle of the (0, 1) block",
            worst,
            1e-12,
        ));
    }
    items
}

fn failure_item(name: String, detail: String) -> CheckItem {
    CheckItem::verdict(name, detail, f64::INFINITY, 0.0, false)
}

/// Run everything for one fixture: the structural battery, golden data, the
/// relation table, and any model-specific extras.
pub fn run_fixture(name: &str, big: bool, tol: f64) -> Vec<CheckItem> {
    let (n_sites, n_max) = fixture_scale(big);
    let Some(spec) = fixture_spec(name, n_sites) else {
        return vec![failure_item(format!("{name}.build"), format!("unknown fixture {name:?}"))];
    };
    let pre = format!("{name}.");
    let d = match fockforge_core::multi_component::build_t(&spec, tol) {
        Ok(d) => d,
        Err(e) => return vec![failure_item(format!("{pre}build"), format!("{e:?}"))],
    };
    let trunc = match FockTruncation::build(&d, n_max, 1e-9) {
        Ok(t) => t,
        Err(e) => return vec![failure_item(format!("{pre}truncation"), format!("{e:?}"))],
    };
    let ctx = match OpContext::new(&d, &trunc) {
        Ok(c) => c,
        Err(e) => return vec![failure_item(format!("{pre}context"), format!("{e:?}"))],
    };

    let mut items = run_structural_checks(&d, Some(&spec), &trunc, &ctx, tol, &pre);
    items.extend(golden_items(name, &spec, &pre));

    let lad = Ladders::build(&ctx);
    let m = spec.sites.internal_dim;
    let tpre = format!("{pre}table.");
    match name {
        "ex_kq" => {
            items.extend(kq_items(&lad, m, 0, 1, KQ_K, i_unit(), &tpre));
            items.extend(realization_items(KQ_K, i_unit(), n_max, &format!("{pre}realization.")));
        }
        "ex_pw" => items.extend(pw_items(&lad, m, 0, 1, PW_MU, &tpre)),
        "ex_offdiag" => {
            items.extend(offdiag_items(&lad, m, 0, 1, KQ_K, i_unit(), &tpre));
            items.extend(offdiag_unitary_variant(n_sites, n_max, tol, &pre));
        }
        "ex_anyon4" => items.extend(anyon_items(&lad, m, 0, 1, anyon_phases(), &tpre)),
        "ex_spatial" => {
            let (w1, w2) = spatial_tables(n_sites);
            for x in 0..n_sites {
                for y in x + 1..n_sites {
                    items.extend(scalar_pair_items(
                        &lad,
                        m,
                        x,
                        y,
                        w1[x * n_sites + y],
                        w2[x * n_sites + y],
                        &format!("{tpre}pair_{x}{y}."),
                    ));
                }
            }
        }
        _ => {}
    }
    items
}

/// The anti-diagonal model with unimodular middle weight: the exchange table
/// gains the mixed families and the scaled-sum projection identity holds.
fn offdiag_unitary_variant(n_sites: usize, n_max: usize, tol: f64, pre: &str) -> Vec<CheckItem> {
    let vpre = format!("{pre}unitary_variant.");
    let spec = MultiSpec {
        sites: SiteModel { n_sites, internal_dim: 2 },
        rule: CRule::Constant(offdiag_block(1.0, i_unit())),
    };
    let d = match fockforge_core::multi_component::build_t(&spec, tol) {
        Ok(d) => d,
        Err(e) => return vec![failure_item(format!("{vpre}build"), format!("{e:?}"))],
    };
    let trunc = match FockTruncation::build(&d, n_max, 1e-9) {
        Ok(t) => t,
        Err(e) => return vec![failure_item(format!("{vpre}truncation"), format!("{e:?}"))],
    };
    let ctx = match OpContext::new(&d, &trunc) {
        Ok(c) => c,
        Err(e) => return vec![failure_item(format!("{vpre}context"), format!("{e:?}"))],
    };
    let mut items = Vec::new();
    items.push(CheckItem::verdict(
        format!("{vpre}t_unitary"),
        "middle weight 1 makes the induced operator unitary",
        d.flags.unitary_residual,
        tol,
        d.flags.unitary,
    ));
    for n in 2..=n_max {
        let level = trunc.level(n);
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        let r = level
            .proj
            .sub(&level.p_script.scale(c(1.0 / factorial, 0.0)))
            .op_norm();
        items.push(CheckItem::new(
            format!("{vpre}projection_is_scaled_sum_n{n}"),
            "orthogonal projection equals the positivity operator over n!",
            r,
            1e-9,
        ));
    }
    let lad = Ladders::build(&ctx);
    items.extend(offdiag_items(&lad, 2, 0, 1, 1.0, i_unit(), &format!("{vpre}table.")));
    items
}

/// Run a set of fixtures (in declaration order), optionally filtered, on the
/// worker pool. Item order is independent of the thread count.
pub fn run_fixture_suite(filter: Option<&str>, big: bool, tol: f64, threads: usize) -> Result<Vec<CheckItem>, String> {
    let names: Vec<&str> = FIXTURE_NAMES
        .iter()
        .copied()
        .filter(|n| filter.map_or(true, |f| n.contains(f)))
        .collect();
    if names.is_empty() {
        return Err(format!("no fixture matches {:?}", filter.unwrap_or("")));
    }
    let results: Vec<Vec<CheckItem>> =
        crate::pool::par_map(threads, names.len(), |i| run_fixture(names[i], big, tol));
    Ok(results.into_iter().flatten().collect())
}

/// Fixture results keyed by name, shared by the acceptance battery.
pub fn run_all(big: bool, tol: f64) -> BTreeMap<String, Vec<CheckItem>> {
    FIXTURE_NAMES
        .iter()
        .map(|&n| (n.to_string(), run_fixture(n, big, tol)))
        .collect()
}
