//! Entropy, Hamming-ball counting and runtime-exponent calculus.

mod counting;
mod entropy;
mod exponents;
mod search;
mod table;

pub use counting::{counting_bound, counting_bound_with, CountingBound, DeltaGrid, DeltaRecord};
pub use entropy::{
    binary_entropy, binomial_sum_exact, lemma_gap, log2_binomial_sum, EXACT_BINOMIAL_LIMIT,
};
pub use exponents::{
    exponent_ept, exponent_hirsch1, exponent_hirsch2, exponent_ours_csp, exponent_ours_csp_with,
    exponent_ours_eksat, exponent_ours_eksat_with, exponent_ours_ksat_delta2, ExponentMethod,
    ExponentReport, DEFAULT_ALPHA,
};
pub use search::DeltaSearch;
pub use table::{round_half_even, table1, table1_with, TableRow, REFERENCE_TABLE, TABLE_TOLERANCE};
