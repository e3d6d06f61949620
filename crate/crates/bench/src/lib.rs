//! Shared workloads for the benchmarks.

use sierpile::growth::AsmSolver;
use sierpile::GrowthError;

/// Masses at the start of the explosion blocks `4·3^n` and just inside them.
pub const SANDPILE_MASSES: [u64; 4] = [972, 1000, 2916, 3000];

/// A solver sized for every mass in [`SANDPILE_MASSES`].
pub fn solver() -> Result<AsmSolver, GrowthError> {
    AsmSolver::for_mass(*SANDPILE_MASSES.iter().max().unwrap())
}
