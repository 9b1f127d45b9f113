//! Serialized artifacts must reproduce the originals bit for bit, including
//! the dense trajectory a stationary solution carries for rescaled
//! evaluation. The JSON layer prints shortest round-trip floats, so equality
//! here is exact, not approximate.

use nodalheat::shooting::StationarySolution;
use nodalheat::spectral::{self, EigenPair};
use nodalheat::{stationary_solution, RadialGrid};

#[test]
fn stationary_solution_round_trips_through_json() {
    let grid = RadialGrid::uniform(401, 1.0).unwrap();
    let sol = stationary_solution(50.0, 2, &grid).unwrap();
    let body = serde_json::to_string(&sol).unwrap();
    let back: StationarySolution = serde_json::from_str(&body).unwrap();

    assert_eq!(back.p(), sol.p());
    assert_eq!(back.nodal_regions(), sol.nodal_regions());
    assert_eq!(back.amplitude().to_bits(), sol.amplitude().to_bits());
    assert_eq!(back.epsilon().to_bits(), sol.epsilon().to_bits());
    assert!(back
        .values()
        .iter()
        .zip(sol.values())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
    assert!(back
        .nodal_radii()
        .iter()
        .zip(sol.nodal_radii())
        .all(|(a, b)| a.to_bits() == b.to_bits()));

    // Dense evaluation must survive: the deserialized solution feeds the
    // rescaled pipeline exactly like the original.
    for r in [0.0, 1e-5, 0.2, 0.7, 0.999] {
        let (u0, du0) = sol.eval(r);
        let (u1, du1) = back.eval(r);
        assert_eq!(u0.to_bits(), u1.to_bits(), "u at r = {r}");
        assert_eq!(du0.to_bits(), du1.to_bits(), "u' at r = {r}");
    }

    let target = RadialGrid::uniform(201, 6.0).unwrap();
    let original = nodalheat::liouville::rescaled_profile(&sol, &target).unwrap();
    let restored = nodalheat::liouville::rescaled_profile(&back, &target).unwrap();
    assert!(original
        .values()
        .iter()
        .zip(restored.values())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn eigenpair_round_trips_through_json() {
    let pair = spectral::limit_eigenpair(40.0, 801).unwrap();
    let body = serde_json::to_string(&pair).unwrap();
    let back: EigenPair = serde_json::from_str(&body).unwrap();
    assert_eq!(back.eigenvalue.to_bits(), pair.eigenvalue.to_bits());
    assert_eq!(back.grid, pair.grid);
    assert!(back
        .eigenfunction
        .iter()
        .zip(&pair.eigenfunction)
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}
