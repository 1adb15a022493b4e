use concurrence_bounds::concurrence::pure_concurrence_partition;
use concurrence_bounds::partitions::{coarse_grain, enumerate_partitions, stirling2, Multipartite};
use concurrence_bounds::states::{random_density, random_pure};
use concurrence_bounds::{Partition, SubsystemDims};

fn stirling_by_recurrence(n: usize, m: usize) -> u128 {
    let mut table = vec![vec![0u128; n + 1]; n + 1];
    table[0][0] = 1;
    for i in 1..=n {
        for j in 1..=i {
            table[i][j] = j as u128 * table[i - 1][j] + table[i - 1][j - 1];
        }
    }
    table[n][m]
}

#[test]
fn enumeration_counts_match_recurrence() {
    for n in 1..=8 {
        for m in 1..=n {
            let s = stirling_by_recurrence(n, m);
            assert_eq!(stirling2(n, m), s);
            let all = enumerate_partitions(n, m).unwrap();
            assert_eq!(all.len() as u128, s, "S({n},{m})");
            let mut dedup = all.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
            assert!(all.iter().all(|p| p.len() == m && p.n() == n));
        }
    }
}

#[test]
fn printed_partition_lists() {
    let names = |n, m| -> Vec<String> {
        let mut v: Vec<String> = enumerate_partitions(n, m).unwrap().iter().map(|p| p.to_string()).collect();
        v.sort();
        v
    };
    let mut four_three = vec!["12|3|4", "13|2|4", "14|2|3", "1|23|4", "1|24|3", "1|2|34"];
    four_three.sort();
    assert_eq!(names(4, 3), four_three);
    let mut five_four =
        vec!["12|3|4|5", "13|2|4|5", "14|2|3|5", "15|2|3|4", "1|23|4|5", "1|24|3|5", "1|25|3|4", "1|2|34|5", "1|2|35|4", "1|2|3|45"];
    five_four.sort();
    assert_eq!(names(5, 4), five_four);
}

#[test]
fn coarse_grain_preserves_purity_and_norm() {
    let dims = SubsystemDims::new(vec![2, 3, 2, 2]).unwrap();
    for (k, p) in enumerate_partitions(4, 2).unwrap().into_iter().chain(enumerate_partitions(4, 3).unwrap()).enumerate() {
        let rho = random_density(&dims, 1 + k % 5, k as u64).unwrap();
        let cg = coarse_grain(&rho, &p).unwrap();
        assert!((cg.purity() - rho.purity()).abs() < 1e-12);
        assert!((cg.matrix().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(cg.subsystem_dims().total(), dims.total());

        let psi = random_pure(&dims, k as u64);
        let cg = coarse_grain(&psi, &p).unwrap();
        let norm: f64 = cg.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn block_reductions_survive_coarse_graining() {
    // 13|2|4: merged block {1,3} first, then {2}, then {4}.
    let p: Partition = "13|2|4".parse().unwrap();
    assert_eq!(p.subsystem_order(), vec![0, 2, 1, 3]);
    let dims = SubsystemDims::qubits(4).unwrap();
    for seed in 0..20 {
        let psi = random_pure(&dims, seed);
        let cg = coarse_grain(&psi, &p).unwrap();
        let direct: f64 = p.blocks().iter().map(|b| 1.0 - psi.reduced_purity(b).unwrap()).sum();
        let grained: f64 = (0..3).map(|k| 1.0 - cg.reduced_purity(&[k]).unwrap()).sum();
        assert!((direct - grained).abs() < 1e-10);
        let c3 = pure_concurrence_partition(&psi, &p).unwrap().squared;
        assert!((c3 - direct).abs() < 1e-10);
    }
}
