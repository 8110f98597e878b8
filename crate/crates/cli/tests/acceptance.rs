//! End-to-end acceptance battery: runs the full fixture suite at the larger
//! scale (4 sites, depth 4) once, then grades ten named criteria against the
//! produced check items, printing one pass/fail line per criterion.

use fockforge::fixtures::run_fixture_suite;
use fockforge::report::CheckItem;

fn suite() -> Vec<CheckItem> {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get().min(5))
        .unwrap_or(1);
    run_fixture_suite(None, true, 1e-8, threads).expect("fixture suite must run")
}

/// Select the non-skipped items whose name contains any of the needles.
fn select<'a>(items: &'a [CheckItem], needles: &[&str]) -> Vec<&'a CheckItem> {
    items
        .iter()
        .filter(|it| !it.skipped && needles.iter().any(|n| it.name.contains(n)))
        .collect()
}

struct Criterion {
    label: &'static str,
    needles: &'static [&'static str],
    /// Distinct name substrings that must all be represented.
    must_cover: &'static [&'static str],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        label: "1 level operators are positive semidefinite",
        needles: &[".positivity_n"],
        must_cover: &[".positivity_n2", ".positivity_n3", ".positivity_n4"],
    },
    Criterion {
        label: "2 descent-sum oracle matches the staircase recursion",
        needles: &[".oracle_equivalence_n"],
        must_cover: &[".oracle_equivalence_n2", ".oracle_equivalence_n4"],
    },
    Criterion {
        label: "3 kernel of the level operator is the span of the slot kernels (n=2..4)",
        needles: &[".kernel_sum_n", ".range_intersection_n"],
        must_cover: &[".kernel_sum_n2", ".kernel_sum_n3", ".kernel_sum_n4"],
    },
    Criterion {
        label: "4 parallel-sum identity for the level projections (n=3,4)",
        needles: &[".parallel_sum_n"],
        must_cover: &[".parallel_sum_n3", ".parallel_sum_n4"],
    },
    Criterion {
        label: "5 reordering identity on random distinct-site pairs",
        needles: &[".main_relation_random_pairs"],
        must_cover: &["ex_kq.", "ex_pw.", "ex_offdiag.", "ex_anyon4.", "ex_spatial."],
    },
    Criterion {
        label: "6 pair operators vanish exactly on the exchange kernel",
        needles: &[
            ".pair_create_vanishes_on_kernel",
            ".pair_annih_vanishes_on_kernel",
            "create_create_exchange_basis",
            "annih_annih_exchange_basis",
        ],
        must_cover: &[".pair_create_vanishes_on_kernel", "create_create_exchange_basis"],
    },
    Criterion {
        label: "7 golden spans and reshuffled blocks match",
        needles: &[".golden_"],
        must_cover: &[
            "ex_kq.golden_",
            "ex_pw.golden_",
            "ex_offdiag.golden_",
            "ex_anyon4.golden_",
            "ex_spatial.golden_",
        ],
    },
    Criterion {
        label: "8 commutation tables for the scalar, anti-diagonal and per-pair models",
        needles: &["ex_kq.table.", "ex_offdiag.table.", "ex_spatial.table."],
        must_cover: &["ex_kq.table.", "ex_offdiag.table.", "ex_spatial.table.pair_23."],
    },
    Criterion {
        label: "9 unitary regime: projection is the scaled sum and the joint fixed space",
        needles: &[".unitary_fixed_space_n", ".projection_is_scaled_sum_n", ".t_unitary"],
        must_cover: &[
            "ex_anyon4.unitary_fixed_space_n4",
            "ex_offdiag.unitary_variant.projection_is_scaled_sum_n4",
        ],
    },
    Criterion {
        label: "10 graded two-mode representation and the creation norm bound",
        needles: &["ex_kq.realization."],
        must_cover: &["ex_kq.realization.creation_norm_bound"],
    },
];

#[test]
fn acceptance() {
    let items = suite();
    let mut all_ok = true;
    for c in CRITERIA {
        let sel = select(&items, c.needles);
        let covered = c
            .must_cover
            .iter()
            .all(|m| sel.iter().any(|it| it.name.contains(m)));
        let failed: Vec<&&CheckItem> = sel.iter().filter(|it| !it.pass).collect();
        let ok = covered && !sel.is_empty() && failed.is_empty();
        all_ok &= ok;
        println!(
            "ACCEPTANCE {}: {} ({} checks)",
            c.label,
            if ok { "PASS" } else { "FAIL" },
            sel.len()
        );
        if !covered {
            println!("  missing expected checks from {:?}", c.must_cover);
        }
        for f in failed.iter().take(5) {
            println!("  failed: {} residual {:.3e}", f.name, f.residual);
        }
    }
    assert!(all_ok, "at least one acceptance criterion failed");
}
