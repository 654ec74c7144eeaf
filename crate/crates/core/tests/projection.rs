use std::collections::BTreeMap;

use cifc::polytope::{eliminate_all, eliminate_in_order, is_feasible, remove_redundant};
use cifc::{LinearConstraint, RatePolytope2D, RateSystem, RateVar, Sense};
use proptest::prelude::*;

const KEEP: [RateVar; 2] = [RateVar::R1, RateVar::R2];
const HIDDEN: [RateVar; 2] = [RateVar::R1c, RateVar::R2c];
const TOL: f64 = 1e-6;

fn row() -> impl Strategy<Value = LinearConstraint> {
    (prop::collection::vec(-2i64..=2, 4), 0u8..3, 0i64..6).prop_map(|(c, s, b)| {
        let vars = [KEEP[0], KEEP[1], HIDDEN[0], HIDDEN[1]];
        let terms: Vec<(RateVar, i64)> = vars.into_iter().zip(c).filter(|t| t.1 != 0).collect();
        let sense = match s {
            0 | 1 => Sense::Le,
            _ => Sense::Ge,
        };
        LinearConstraint::new(&terms, sense, b as f64)
    })
}

fn system() -> impl Strategy<Value = RateSystem> {
    prop::collection::vec(row(), 2..7).prop_map(|mut rows| {
        for v in KEEP.into_iter().chain(HIDDEN) {
            rows.push(LinearConstraint::le(&[(v, 1)], 3.0));
        }
        RateSystem::new(rows)
    })
}

/// Feasibility of the hidden pair with `(R1, R2)` fixed, by enumerating
/// every pairwise intersection of boundary lines (the feasible polygon is
/// bounded, so it is non-empty iff one of its vertices exists).
fn oracle(sys: &RateSystem, r1: f64, r2: f64) -> bool {
    let mut lines: Vec<(f64, f64, f64)> = vec![(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)];
    for c in &sys.constraints {
        let b = c.rhs - c.coeff_f64(KEEP[0]) * r1 - c.coeff_f64(KEEP[1]) * r2;
        lines.push((c.coeff_f64(HIDDEN[0]), c.coeff_f64(HIDDEN[1]), b));
    }
    let ok = |z1: f64, z2: f64| {
        let mut p = BTreeMap::new();
        p.insert(KEEP[0], r1);
        p.insert(KEEP[1], r2);
        p.insert(HIDDEN[0], z1);
        p.insert(HIDDEN[1], z2);
        sys.contains_point(&p, TOL)
    };
    let mut pts = vec![(0.0, 0.0)];
    for (i, &(a1, b1, c1)) in lines.iter().enumerate() {
        for &(a2, b2, c2) in &lines[i + 1..] {
            let det = a1 * b2 - a2 * b1;
            if det.abs() > 1e-12 {
                pts.push(((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det));
            }
        }
    }
    pts.into_iter().any(|(z1, z2)| ok(z1, z2))
}

fn member(proj: &RateSystem, r1: f64, r2: f64) -> bool {
    let p: BTreeMap<RateVar, f64> = [(KEEP[0], r1), (KEEP[1], r2)].into_iter().collect();
    proj.contains_point(&p, TOL)
}

fn grid() -> Vec<(f64, f64)> {
    (0..=14)
        .flat_map(|i| (0..=14).map(move |j| (i as f64 * 0.25, j as f64 * 0.25)))
        .collect()
}

fn sample_points(proj: &RateSystem) -> Vec<(f64, f64)> {
    grid()
        .into_iter()
        .filter(|&(a, b)| member(proj, a, b))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projection_matches_oracle(sys in system()) {
        let proj = eliminate_all(&sys, &KEEP);
        for (r1, r2) in grid() {
            prop_assert_eq!(member(&proj, r1, r2), oracle(&sys, r1, r2), "at ({}, {})", r1, r2);
        }
    }

    #[test]
    fn elimination_order_does_not_matter(sys in system()) {
        let a = eliminate_in_order(&sys, &[HIDDEN[0], HIDDEN[1]], &KEEP);
        let b = eliminate_in_order(&sys, &[HIDDEN[1], HIDDEN[0]], &KEEP);
        prop_assert_eq!(sample_points(&a), sample_points(&b));
    }

    #[test]
    fn redundancy_removal_preserves_region(sys in system()) {
        let proj = eliminate_all(&sys, &KEEP);
        prop_assume!(is_feasible(&proj, 1e-12));
        let reduced = remove_redundant(&proj);
        prop_assert!(reduced.constraints.len() <= proj.constraints.len());
        prop_assert_eq!(sample_points(&proj), sample_points(&reduced));
        let full = RatePolytope2D::without_reduction(proj.constraints.clone()).unwrap();
        let small = RatePolytope2D::new(proj.constraints.clone()).unwrap();
        prop_assert!(full.same_vertices(&small, 1e-9));
    }

    #[test]
    fn n_dimensional_redundancy_removal_preserves_points(sys in system()) {
        prop_assume!(is_feasible(&sys, 1e-12));
        let reduced = remove_redundant(&sys);
        for (r1, r2) in grid() {
            prop_assert_eq!(oracle(&sys, r1, r2), oracle(&reduced, r1, r2));
        }
    }
}
