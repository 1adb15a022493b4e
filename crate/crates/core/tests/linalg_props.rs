use concurrence_bounds::linalg::{
    hermitian_eigvals, kron, partial_trace, partial_transpose, realign, trace_norm, Side,
};
use concurrence_bounds::states::{random_density, random_product_density, random_pure};
use concurrence_bounds::SubsystemDims;
use proptest::prelude::*;

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_preserves_trace(dims in dims_strategy(), seed in any::<u64>(), mask in 1u32..7) {
        let dims = SubsystemDims::new(dims).unwrap();
        let rank = 1 + (seed % dims.total() as u64) as usize;
        let rho = random_density(&dims, rank, seed).unwrap();
        let keep: Vec<usize> = (0..dims.len()).filter(|k| mask >> k & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let red = partial_trace(rho.matrix(), &dims, &keep).unwrap();
        prop_assert!((red.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(red.trace().im.abs() < 1e-12);
    }

    #[test]
    fn density_trace_norm_is_one(dims in dims_strategy(), seed in any::<u64>()) {
        let dims = SubsystemDims::new(dims).unwrap();
        let rho = random_density(&dims, dims.total(), seed).unwrap();
        prop_assert!((trace_norm(rho.matrix()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>()) {
        let dims = SubsystemDims::new(vec![2, 3]).unwrap();
        let rho = random_density(&dims, 4, seed).unwrap();
        let sum: f64 = hermitian_eigvals(rho.matrix()).unwrap().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn realigned_product_has_unit_trace_norm(da in 2usize..=3, db in 2usize..=3, seed in any::<u64>()) {
        let a = random_product_density(&SubsystemDims::new(vec![da]).unwrap(), seed).unwrap();
        let b = random_product_density(&SubsystemDims::new(vec![db]).unwrap(), seed ^ 0x5555).unwrap();
        let joint = kron(a.matrix(), b.matrix()).unwrap();
        let dims = SubsystemDims::new(vec![da, db]).unwrap();
        let r = realign(&joint, &dims).unwrap();
        // R(a (x) b) is rank one with singular value ||a||_2 ||b||_2.
        let expected = (a.purity() * b.purity()).sqrt();
        prop_assert!((trace_norm(&r).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_preserves_trace(da in 2usize..=3, db in 2usize..=3, seed in any::<u64>()) {
        let dims = SubsystemDims::new(vec![da, db]).unwrap();
        let rho = random_density(&dims, da * db, seed).unwrap();
        for side in [Side::First, Side::Second] {
            let pt = partial_transpose(rho.matrix(), &dims, side).unwrap();
            prop_assert!((pt.trace() - rho.matrix().trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn realigned_pure_product_has_unit_trace_norm(da in 2usize..=3, db in 2usize..=3, seed in any::<u64>()) {
        let a = random_pure(&SubsystemDims::new(vec![da]).unwrap(), seed);
        let b = random_pure(&SubsystemDims::new(vec![db]).unwrap(), seed.wrapping_add(1));
        let psi = a.tensor(&b).unwrap();
        let r = realign(&psi.projector(), psi.dims()).unwrap();
        prop_assert!((trace_norm(&r).unwrap() - 1.0).abs() < 1e-10);
    }
}
