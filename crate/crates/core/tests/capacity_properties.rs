//! Solver-based checks of the capacity as a set function.

use std::sync::Arc;

use fracap::axioms::{
    check_countable_subadditivity, check_decreasing_chain, check_increasing_chain,
    verify_capacity_axioms,
};
use fracap::capacity::{CapacitySolver, SolverOptions};
use fracap::exponent::{ExponentField, ExponentSpec, PairExponentSpec};
use fracap::function::GridFunction;
use fracap::grid::{Domain, Grid, SetMask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn interval(n: usize) -> Arc<Grid> {
    Grid::build(&Domain::interval(0.0, 1.0).unwrap(), [n, 1]).unwrap()
}

fn variable_solver(g: &Arc<Grid>) -> CapacitySolver {
    let f = ExponentField::new(
        g,
        ExponentSpec::Expr("2 + 0.5 * x".into()),
        PairExponentSpec::Expr("2.5 + -0.5 * dist".into()),
    )
    .unwrap();
    CapacitySolver::new(g, &f, 0.5, SolverOptions::default()).unwrap()
}

fn random_mask(g: &Grid, rng: &mut ChaCha8Rng, density: f64) -> SetMask {
    let cells = (0..g.num_cells()).map(|_| rng.gen_bool(density)).collect();
    let boundary = (0..g.num_boundary())
        .map(|_| rng.gen_bool(density))
        .collect();
    SetMask::from_flags(cells, boundary)
}

#[test]
fn monotone_on_random_nested_pairs() {
    let g = interval(12);
    let cs = variable_solver(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for k in 0..50 {
        let small = random_mask(&g, &mut rng, 0.2);
        let big = small.union(&random_mask(&g, &mut rng, 0.2));
        let a = cs.capacity_set(&small).unwrap().value;
        let b = cs.capacity_set(&big).unwrap().value;
        assert!(a <= b + 1e-6, "pair {k}: {a} > {b}");
    }
}

#[test]
fn upper_bounds_dominate_capacity() {
    let g = interval(10);
    let cs = variable_solver(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut cache = std::collections::HashMap::new();
    for k in 0..100 {
        let o = random_mask(&g, &mut rng, 0.25);
        let cells = (0..g.num_cells())
            .map(|i| {
                if o.has_cell(i) {
                    1.0 + rng.gen::<f64>()
                } else {
                    rng.gen_range(-0.5..1.5)
                }
            })
            .collect();
        let boundary = (0..g.num_boundary())
            .map(|i| if o.has_boundary(i) { 1.0 } else { rng.gen() })
            .collect();
        let u = GridFunction::new(&g, cells, boundary).unwrap();
        let bound = cs.capacity_upper_bound(&u, &o).unwrap();
        let value = *cache
            .entry(o.clone())
            .or_insert_with(|| cs.capacity_relative_open(&o).unwrap().value);
        assert!(
            bound >= value - 1e-8,
            "trial {k}: bound {bound} below capacity {value}"
        );
    }
}

#[test]
fn everything_short_circuits_to_modular_of_one() {
    let g = interval(6);
    let cs = variable_solver(&g);
    let r = cs.capacity_relative_open(&g.full_mask()).unwrap();
    assert_eq!(r.iterations, 0);
    assert_eq!(
        r.value,
        cs.modular()
            .evaluate(&GridFunction::constant(&g, 1.0))
            .unwrap()
            .total
    );
}

#[test]
fn pair_example_matches_quantized_search() {
    // cells {1, 2} of the 4-cell grid, q = p = 2, s = 1/2
    let g = interval(4);
    let f = ExponentField::constant(&g, 2.0, 2.0).unwrap();
    let cs = CapacitySolver::new(&g, &f, 0.5, SolverOptions::default()).unwrap();
    let o = SetMask::from_cells(&g, &[1, 2]).unwrap();
    let value = cs.capacity_relative_open(&o).unwrap().value;
    let m = cs.modular();
    let mut best = f64::INFINITY;
    for a in 0..=20 {
        for b in 0..=20 {
            let u = [a as f64 * 0.05, 1.0, 1.0, b as f64 * 0.05];
            best = best.min(m.total_cells(&u));
        }
    }
    assert!(
        (value - best).abs() < 5e-3 && value <= best + 1e-12,
        "{value} vs {best}"
    );
}

#[test]
fn adversarial_overlap_is_strongly_subadditive() {
    let g = interval(16);
    let cs = variable_solver(&g);
    let a = SetMask::from_indices(&g, &(2..10).collect::<Vec<_>>(), &[0]).unwrap();
    let b = SetMask::from_indices(&g, &(8..15).collect::<Vec<_>>(), &[1]).unwrap();
    let report = verify_capacity_axioms(&cs, &[a, b]).unwrap();
    let strong = report.check("strong_subadditivity").unwrap();
    assert!(strong.margin >= -1e-6, "{strong:?}");
    assert!(report.all_passed);
}

#[test]
fn chains_and_countable_subadditivity() {
    let g = interval(16);
    let cs = variable_solver(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let mut chain = vec![random_mask(&g, &mut rng, 0.6)];
        for _ in 0..3 {
            let next = chain
                .last()
                .unwrap()
                .intersection(&random_mask(&g, &mut rng, 0.7));
            chain.push(next);
        }
        assert!(check_decreasing_chain(&cs, &chain).unwrap().passed);
        chain.reverse();
        assert!(check_increasing_chain(&cs, &chain).unwrap().passed);
        let pieces: Vec<SetMask> = (0..4).map(|_| random_mask(&g, &mut rng, 0.15)).collect();
        assert!(check_countable_subadditivity(&cs, &pieces).unwrap().passed);
    }
}

#[test]
fn smaller_domain_has_smaller_capacity() {
    // The square [0,1]^2 contains [0,1/2] x [0,1] and shares its cells.
    // Restricting an admissible function to the smaller domain drops
    // nonnegative terms only, so capacities can only shrink.
    let big = Grid::build(&Domain::unit_square(), [8, 8]).unwrap();
    let small = Grid::build(&Domain::rectangle([0.0, 0.0], [0.5, 1.0]).unwrap(), [4, 8]).unwrap();
    let opts = SolverOptions::default();
    let solver = |g: &Arc<Grid>| {
        let f = ExponentField::constant(g, 2.0, 2.0).unwrap();
        CapacitySolver::new(g, &f, 0.5, opts.clone()).unwrap()
    };
    let (cb, cs) = (solver(&big), solver(&small));
    for lattice in [[[1, 3], [2, 3]], [[3, 0], [3, 1]], [[0, 7], [1, 7]]] {
        let on_big: Vec<usize> = lattice
            .iter()
            .map(|&l| big.cell_at_lattice(l).unwrap())
            .collect();
        let on_small: Vec<usize> = lattice
            .iter()
            .map(|&l| small.cell_at_lattice(l).unwrap())
            .collect();
        let a = cb
            .capacity_relative_open(&SetMask::from_cells(&big, &on_big).unwrap())
            .unwrap()
            .value;
        let b = cs
            .capacity_relative_open(&SetMask::from_cells(&small, &on_small).unwrap())
            .unwrap()
            .value;
        assert!(b <= a + 1e-6, "{lattice:?}: larger domain {a}, smaller {b}");
    }
}

#[test]
fn measure_lower_bound_in_two_dimensions() {
    let g = Grid::build(
        &Domain::unit_square()
            .with_hole([0.5, 0.5], [0.75, 0.75])
            .unwrap(),
        [4, 4],
    )
    .unwrap();
    let f = ExponentField::new(
        &g,
        ExponentSpec::Expr("2 + 0.5 * x0".into()),
        PairExponentSpec::Constant(2.2),
    )
    .unwrap();
    let cs = CapacitySolver::new(&g, &f, 0.4, SolverOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let e = random_mask(&g, &mut rng, 0.3);
        let r = cs.capacity_set(&e).unwrap();
        assert!(r.value >= g.measure(&e).unwrap() - 1e-12);
        assert!(r.residual < 1e-6);
    }
}
