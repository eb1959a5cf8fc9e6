//! Built-in example games used by experiments and tests.
//!
//! Both fixtures are two-qubit games measured in the computational product
//! basis, so every outcome is a classical pair `(a, b)`:
//!
//! - **matching pennies**: zero-sum, payoffs `±1`, unique fully mixed
//!   equilibrium `(I/2, I/2)`;
//! - **dominant**: each player has a strictly dominant strategy `|0⟩⟨0|`;
//!   the equilibrium is strict and globally variationally stable.

use crate::error::{Error, Result};
use crate::game::{Outcome, QuantumGame};
use crate::hermitian::{ComplexMatrix, DensityMatrix, HermitianMatrix};

/// Projective measurement in the computational product basis:
/// one rank-one diagonal projector per joint index.
pub fn computational_pvm(dims: &[usize]) -> Vec<HermitianMatrix> {
    let product: usize = dims.iter().product();
    (0..product)
        .map(|idx| {
            let mut m = ComplexMatrix::zeros(product);
            m.set(idx, idx, crate::hermitian::c_re(1.0));
            HermitianMatrix::hermitize(m)
        })
        .collect()
}

fn two_qubit_classical(payoff: impl Fn(usize, usize) -> (f64, f64), zero_sum: bool) -> QuantumGame {
    let dims = vec![2usize, 2];
    let outcomes = computational_pvm(&dims)
        .into_iter()
        .enumerate()
        .map(|(idx, element)| {
            let (a, b) = (idx / 2, idx % 2);
            let (u1, u2) = payoff(a, b);
            Outcome::new(element, vec![u1, u2])
        })
        .collect();
    QuantumGame::from_povm(dims, outcomes, zero_sum).expect("fixture is statically valid")
}

/// Matching pennies: player 1 wins when the outcomes agree, player 2 when
/// they differ. The unique equilibrium is the uniform profile, where the
/// payoff observable makes every strategy indifferent.
pub fn matching_pennies() -> QuantumGame {
    two_qubit_classical(
        |a, b| {
            let u = if a == b { 1.0 } else { -1.0 };
            (u, -u)
        },
        true,
    )
    .with_equilibrium(vec![
        DensityMatrix::maximally_mixed(2),
        DensityMatrix::maximally_mixed(2),
    ])
    .expect("fixture equilibrium is statically valid")
}

/// A dominance-solvable game: `u_1 = (-1)^a + (-1)^b / 4` and symmetrically
/// for player 2, so `|0⟩⟨0|` is strictly dominant for both. The pure
/// equilibrium `(|0⟩⟨0|, |0⟩⟨0|)` is globally variationally stable.
pub fn dominant() -> QuantumGame {
    two_qubit_classical(
        |a, b| {
            let sa = if a == 0 { 1.0 } else { -1.0 };
            let sb = if b == 0 { 1.0 } else { -1.0 };
            (sa + 0.25 * sb, 0.25 * sa + sb)
        },
        false,
    )
    .with_equilibrium(vec![
        DensityMatrix::basis_state(2, 0),
        DensityMatrix::basis_state(2, 0),
    ])
    .expect("fixture equilibrium is statically valid")
}

/// Names accepted by [`by_name`].
pub const FIXTURE_NAMES: [&str; 2] = ["matching-pennies", "dominant"];

/// Look a fixture up by its command-line name.
pub fn by_name(name: &str) -> Result<QuantumGame> {
    match name {
        "matching-pennies" => Ok(matching_pennies()),
        "dominant" => Ok(dominant()),
        other => Err(Error::InvalidGame(format!(
            "unknown fixture {other:?}; available: {}",
            FIXTURE_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::uniform_profile;
    use crate::hermitian::kron2;

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn matching_pennies_observable_is_z_tensor_z() {
        let game = matching_pennies();
        let zz = kron2(&pauli_z(), &pauli_z());
        assert!(game.observable(0).matrix().max_abs_diff(&zz).unwrap() < 1e-15);
        assert!(
            game.observable(1)
                .matrix()
                .max_abs_diff(&zz.scale(-1.0))
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn matching_pennies_gap_is_zero_at_equilibrium_and_two_at_pure_play() {
        let game = matching_pennies();
        let eq = game.equilibrium().unwrap().to_vec();
        assert!(game.duality_gap(&eq).unwrap().abs() < 1e-12);
        let pure = vec![
            DensityMatrix::basis_state(2, 0),
            DensityMatrix::basis_state(2, 0),
        ];
        assert!((game.duality_gap(&pure).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_strategy_is_the_gradient_maximizer_everywhere() {
        let game = dominant();
        let mut rng = crate::seeding::stream_rng(5, 0);
        for _ in 0..25 {
            let x = crate::game::random_profile(game.dims(), &mut rng);
            for player in 0..2 {
                let v = game.payoff_gradient(&x, player).unwrap();
                let eig = v.eigh().unwrap();
                let top = eig.max_value();
                let at_zero = v.matrix().get(0, 0).re;
                assert!((top - at_zero).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fixture_constants_match_frozen_values() {
        let mp = matching_pennies().constants().unwrap();
        assert!((mp.payoff_bound - 1.0).abs() < 1e-15);
        assert!((mp.lipschitz - 2.0).abs() < 1e-12);
        assert!((mp.smoothness - 2.8284271247461903).abs() < 1e-12);
        assert!((mp.entropy_budget - 1.3862943611198906).abs() < 1e-15);
        assert!(mp.lipschitz_mc <= mp.lipschitz + 1e-12);
        assert!(mp.smoothness_mc <= mp.smoothness + 1e-12);

        let dm = dominant().constants().unwrap();
        assert!((dm.payoff_bound - 1.25).abs() < 1e-15);
        assert!((dm.lipschitz - 2.5).abs() < 1e-12);
        assert!((dm.smoothness - 2.9154759474226504).abs() < 1e-12);
        assert!(dm.lipschitz_mc <= dm.lipschitz + 1e-12);
    }

    #[test]
    fn stability_probe_separates_the_fixtures() {
        let dominant_game = dominant();
        let cert = crate::game::vs_certificate(
            &dominant_game,
            dominant_game.equilibrium().unwrap(),
            0.1,
            200,
            31,
        )
        .unwrap();
        assert!(cert.plausible, "max inner {}", cert.max_inner);

        let mp = matching_pennies();
        let cert =
            crate::game::vs_certificate(&mp, mp.equilibrium().unwrap(), 0.1, 200, 31).unwrap();
        assert!(!cert.plausible);
        assert!(cert.max_inner.abs() < 1e-12);
        assert!(cert.min_inner.abs() < 1e-12);
    }

    #[test]
    fn by_name_round_trips_and_rejects_unknown() {
        for name in FIXTURE_NAMES {
            assert!(by_name(name).is_ok());
        }
        assert!(by_name("prisoners-dilemma").is_err());
        let game = by_name("matching-pennies").unwrap();
        assert!(game.is_zero_sum());
        let p = game
            .outcome_distribution(&uniform_profile(game.dims()))
            .unwrap();
        assert_eq!(p.len(), 4);
    }
}
