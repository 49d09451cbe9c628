//! The bisection eigensolver of the FD oracle against a dense symmetric
//! eigendecomposition, and the second-order convergence of FD spectra.

use nalgebra::{DMatrix, SymmetricEigen};
use triplewave::*;

fn dense_eigenvalues(sys: &FdSystem64) -> Vec<f64> {
    let n = sys.size();
    let rows = sys.dense();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn bisection_matches_dense_eigensolver() {
    let g = Grid64::linspace(0.0, 10.0, 200);
    let conditions = [
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Neumann,
        BoundaryCondition::robin(-1.5),
        BoundaryCondition::robin(0.8),
        BoundaryCondition::WentzellLaplace,
    ];
    for bc in conditions {
        let sys = assemble_fd(&bc, 0.7, g).unwrap();
        let dense = dense_eigenvalues(&sys);
        let count = 12;
        let bisect = fd_spectrum(&sys, count);
        assert_eq!(bisect.len(), count);
        for (a, b) in bisect.iter().zip(&dense) {
            assert!(
                (a - b).abs() <= 1e-9 * (1.0 + b.abs()),
                "{}: {a} vs {b}",
                bc.name()
            );
        }
        let below = dense.iter().filter(|e| **e < 0.5).count();
        assert_eq!(sys.count_below(0.5), below, "{}", bc.name());
    }
}

#[test]
fn robin_bound_state_converges_at_second_order() {
    let alpha = -1.0;
    let errors: Vec<f64> = [250, 500, 1000]
        .iter()
        .map(|&per_unit| {
            let g = Grid64::linspace(0.0, 12.0, 12 * per_unit + 1);
            let sys = assemble_fd(&BoundaryCondition::robin(alpha), 0.0, g).unwrap();
            (fd_spectrum(&sys, 1)[0] + alpha * alpha).abs()
        })
        .collect();
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((3.0..=5.0).contains(&ratio), "{errors:?}");
    }
}
