//! The single-user, two-load benchmark instance used throughout the tests and
//! shipped as `fixtures/h{2,3,4,5}.json`.

use crate::problem::{Load, ProsumerProblem, User};

/// Hourly prices in euro cents for hours 1..=5.
pub const REFERENCE_PRICES: [i64; 5] = [21, 21, 22, 23, 24];

/// One user with `e_max = 3` kW, a 2 kW load running one hour and a 1 kW load
/// running two hours, over the first `hours` prices of [`REFERENCE_PRICES`].
///
/// The 2 kW load is declared first, so its hour bits are qubits `1..=H`.
pub fn reference_instance(hours: usize) -> ProsumerProblem {
    assert!(
        (1..=REFERENCE_PRICES.len()).contains(&hours),
        "reference instance is defined for 1..=5 hours"
    );
    ProsumerProblem {
        hours,
        prices: REFERENCE_PRICES[..hours].to_vec(),
        users: vec![User {
            e_max: 3,
            loads: vec![
                Load { energy: 2, working_time: 1 },
                Load { energy: 1, working_time: 2 },
            ],
        }],
    }
}
