//! Property tests for the structural invariants: Lipschitz distance,
//! projection consistency, opening idempotence, operator homogeneity and
//! scale equivariance of the diagnostics.

use proptest::prelude::*;

use fracreg::opened::{open_mask, opened_region, ParentSet};
use fracreg::quotient::synthetic_quotient;
use fracreg::{Assembler, Domain, Field, Grid};

fn arb_domain() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (0.5f64..1.5).prop_map(|r| Domain::ball([0.0, 0.0], r).unwrap()),
        ((0.5f64..1.5), (0.3f64..0.8))
            .prop_map(|(a, r)| Domain::stadium([0.0, 0.0], a, r).unwrap()),
        ((1.0f64..2.0), (0.5f64..1.0))
            .prop_map(|(a, b)| Domain::ellipse([0.0, 0.0], a.max(b), a.min(b)).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_one_lipschitz(
        dom in arb_domain(),
        ax in -3.0f64..3.0, ay in -3.0f64..3.0,
        bx in -3.0f64..3.0, by in -3.0f64..3.0,
    ) {
        let da = dom.distance([ax, ay]);
        let db = dom.distance([bx, by]);
        let dist = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
        prop_assert!((da - db).abs() <= dist + 1e-12);
    }

    #[test]
    fn projection_attains_the_distance(
        dom in arb_domain(),
        t in 0.0f64..1.0,
        depth_frac in 0.05f64..1.9,
    ) {
        let bp = dom.boundary_point(t);
        let nu = dom.inner_normal(bp).unwrap();
        let depth = depth_frac * dom.interior_sphere_radius();
        let x = [bp[0] + depth * nu[0], bp[1] + depth * nu[1]];
        let d = dom.distance(x);
        if d > 0.0 && d < 2.0 * dom.interior_sphere_radius() {
            let p = dom.metric_projection(x).unwrap();
            let attained = ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt();
            prop_assert!((attained - d).abs() <= 1e-12 * (1.0 + d));
        }
    }

    #[test]
    fn opening_is_idempotent_on_random_annuli(
        inner in 0.05f64..0.4,
        width in 0.2f64..0.6,
        radius_cells in 2.2f64..5.0,
    ) {
        let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 24.0, 4).unwrap();
        let radius = radius_cells * grid.h;
        let parent = ParentSet::Annulus { center: [0.1, 0.0], inner, outer: inner + width };
        if let Ok(opened) = opened_region(&dom, &parent, radius, grid.clone()) {
            let again = open_mask(&grid, &opened.mask, radius);
            prop_assert_eq!(opened.mask, again);
        }
    }

    #[test]
    fn quotient_and_oscillation_scale_equivariantly(
        t in 0.1f64..8.0,
        freq in 0.5f64..4.0,
    ) {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 128.0, 4).unwrap();
        let q1 = synthetic_quotient(grid.clone(), move |x| (freq * x[0]).sin() + 1.2);
        let q2 = synthetic_quotient(grid.clone(), move |x| t * ((freq * x[0]).sin() + 1.2));
        let o1 = fracreg::oscillation(&q1, [-1.0, 0.0], 0.5).unwrap();
        let o2 = fracreg::oscillation(&q2, [-1.0, 0.0], 0.5).unwrap();
        prop_assert!((o2 - t * o1).abs() <= 1e-12 * o2.abs().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn operator_homogeneity_under_random_fields(
        p in prop_oneof![Just(2.0f64), Just(3.0)],
        s in 0.3f64..0.8,
        amp in 0.2f64..2.0,
    ) {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 48.0, 4).unwrap();
        let asm = Assembler::new(grid.clone(), p, s).unwrap();
        let u = Field::dirichlet_from_fn(
            grid.clone(),
            move |x| amp * (1.0 - x[0] * x[0]).max(0.0),
        );
        let g1 = asm.grad(&u.values);
        let g2 = asm.grad(&u.scaled(2.0).values);
        let factor = 2.0f64.powf(p - 1.0);
        for (a, b) in g1.iter().zip(&g2) {
            prop_assert!((factor * a - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }
    }
}
