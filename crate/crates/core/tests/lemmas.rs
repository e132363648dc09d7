//! Pointwise linear-algebra identities on random structures of every type,
//! 100 instances for each real dimension 4, 6 and 8 of `V`.

mod common;

use common::j_std;
use common::lemma_cases::{b_field_case, pretype_case, type2_case, type_case};
use gkw_core::linalg::LinearGC;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 100,
        max_global_rejects: 4096,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    }
}

fn pretype(m: usize, seed: u64) -> Result<(), TestCaseError> {
    let Some(c) = pretype_case(m, seed) else {
        return Err(TestCaseError::reject("J(R) meets R"));
    };
    prop_assert_eq!((c.library.lhs, c.library.rhs), (c.lhs, c.rhs), "{:?}", c);
    prop_assert_eq!(c.lhs, c.rhs, "{:?}", c);
    Ok(())
}

fn type_preserved(m: usize, seed: u64) -> Result<(), TestCaseError> {
    let c = type_case(m, seed);
    prop_assert_eq!(c.quotient_m, m - 2 * c.k);
    prop_assert_eq!(c.before, c.expected);
    prop_assert_eq!(c.after, c.before, "{:?}", c);
    Ok(())
}

fn type2(m: usize, seed: u64) -> Result<(), TestCaseError> {
    let Some(c) = type2_case(m, seed) else {
        return Err(TestCaseError::reject(
            "deformation or reduction precondition",
        ));
    };
    prop_assert_eq!(c.quotient_j1, 0);
    prop_assert_eq!(c.downstairs as i64, c.formula(), "{:?}", c);
    Ok(())
}

fn b_invariant(m: usize, seed: u64) -> Result<(), TestCaseError> {
    let (expected, before, after) = b_field_case(m, seed);
    prop_assert_eq!(before, expected);
    prop_assert_eq!(after, before);
    Ok(())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn pretype_identity_m4(seed in any::<u64>()) { pretype(4, seed)? }
    #[test]
    fn pretype_identity_m6(seed in any::<u64>()) { pretype(6, seed)? }
    #[test]
    fn pretype_identity_m8(seed in any::<u64>()) { pretype(8, seed)? }

    #[test]
    fn reduction_preserves_type_m4(seed in any::<u64>()) { type_preserved(4, seed)? }
    #[test]
    fn reduction_preserves_type_m6(seed in any::<u64>()) { type_preserved(6, seed)? }
    #[test]
    fn reduction_preserves_type_m8(seed in any::<u64>()) { type_preserved(8, seed)? }

    #[test]
    fn quotient_type_formula_m4(seed in any::<u64>()) { type2(4, seed)? }
    #[test]
    fn quotient_type_formula_m6(seed in any::<u64>()) { type2(6, seed)? }
    #[test]
    fn quotient_type_formula_m8(seed in any::<u64>()) { type2(8, seed)? }

    #[test]
    fn b_transform_preserves_type_m4(seed in any::<u64>()) { b_invariant(4, seed)? }
    #[test]
    fn b_transform_preserves_type_m6(seed in any::<u64>()) { b_invariant(6, seed)? }
    #[test]
    fn b_transform_preserves_type_m8(seed in any::<u64>()) { b_invariant(8, seed)? }
}

#[test]
fn standard_blocks_have_extreme_types() {
    for n in 1..=4 {
        let sym = LinearGC::from_symplectic(&j_std(2 * n)).unwrap();
        let cx = LinearGC::from_complex(&j_std(2 * n)).unwrap();
        assert_eq!(sym.type_of().unwrap(), 0);
        assert_eq!(cx.type_of().unwrap(), n);
    }
}

#[test]
fn quotient_type_formula_with_one_aligned_direction() {
    // the formula on instances with at most one reduction direction along
    // the deforming fields; the full distribution is covered above
    let mut checked = 0;
    for seed in 0..600u64 {
        let m = [4, 6, 8][(seed % 3) as usize];
        if let Some(c) = type2_case(m, seed) {
            if c.cap <= 1 {
                assert!(c.holds(), "seed {seed}: {c:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 300);
}
