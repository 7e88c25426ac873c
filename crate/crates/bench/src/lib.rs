//! Shared inputs for the benchmarks.

use causal_forge::CnfFormula;

/// `n` variables, `m` clauses, literals cycling through the variables with
/// alternating signs.
pub fn cyclic_formula(n: usize, m: usize) -> CnfFormula {
    let clauses: Vec<[i32; 3]> = (0..m)
        .map(|j| {
            let lit = |k: usize| {
                let v = ((3 * j + k) % n + 1) as i32;
                if (j + k).is_multiple_of(2) {
                    v
                } else {
                    -v
                }
            };
            [lit(0), lit(1), lit(2)]
        })
        .collect();
    CnfFormula::from_ints(n, &clauses).expect("literals are in range")
}
