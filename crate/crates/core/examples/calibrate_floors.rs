//! Regenerates the committed no-go defect floors.
//!
//! Runs the seeded multi-restart searches in the two regimes where no
//! universal masker exists and records the best defect each run attains.
//! The acceptance suite asserts that reruns with the same parameters
//! never dip below these floors. Regenerate with
//!
//! ```text
//! cargo run --release -p qmask --example calibrate_floors > \
//!     crates/core/tests/data/defect_floors.json
//! ```

use qmask::nogo::{optimize_defect, MaskProblem};
use qmask::tensor::MultipartiteDims;

const RESTARTS: usize = 20;
const MAX_ITERS: usize = 2000;
const SEED: u64 = 7;

fn main() {
    let tripartite_qubit =
        MaskProblem::new(2, MultipartiteDims::new(vec![2, 2, 2]).unwrap()).unwrap();
    let bipartite = MaskProblem::new(2, MultipartiteDims::new(vec![4, 4]).unwrap()).unwrap();

    let a = optimize_defect(&tripartite_qubit, RESTARTS, MAX_ITERS, SEED).unwrap();
    let b = optimize_defect(&bipartite, RESTARTS, MAX_ITERS, SEED).unwrap();

    let value = serde_json::json!({
        "restarts": RESTARTS,
        "max_iters": MAX_ITERS,
        "seed": SEED,
        "floors": [
            {
                "input_dim": 2,
                "dims": [2, 2, 2],
                "best_defect": a.best_defect,
                "floor": a.best_defect * (1.0 - 1e-9),
            },
            {
                "input_dim": 2,
                "dims": [4, 4],
                "best_defect": b.best_defect,
                "floor": b.best_defect * (1.0 - 1e-9),
            },
        ],
    });
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
}
