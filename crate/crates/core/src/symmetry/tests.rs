use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::linalg::{max_abs, Mat};
use crate::manybody::FockBasis;
use crate::single_particle::{solve_trap, TrapPotential};

fn harmonic_basis(n: usize, cutoff: usize, e_max: f64) -> FockBasis {
    let sp = Arc::new(solve_trap(&TrapPotential::harmonic(1.0), cutoff).unwrap());
    FockBasis::new(sp, n, e_max).unwrap()
}

fn p(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

/// Every non-increasing sequence of positive integers summing to `n`, by
/// sorting all compositions.
fn brute_force_partitions(n: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << (n - 1)) {
        let mut parts = Vec::new();
        let mut run = 1;
        for bit in 0..n - 1 {
            if mask & (1 << bit) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        out.insert(parts);
    }
    out
}

#[test]
fn partitions_of_four_are_the_five_sectors() {
    let got: Vec<Vec<usize>> = partitions(4).unwrap().iter().map(|q| q.parts().to_vec()).collect();
    assert_eq!(
        got,
        vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
    );
}

#[test]
fn partitions_of_one() {
    assert_eq!(partitions(1).unwrap(), vec![p(&[1])]);
}

#[test]
fn partition_counts_match_brute_force() {
    assert_eq!(partitions(6).unwrap().len(), 11);
    for n in 1..=MAX_DEGREE {
        let got: BTreeSet<Vec<usize>> =
            partitions(n).unwrap().iter().map(|q| q.parts().to_vec()).collect();
        assert_eq!(got, brute_force_partitions(n), "n = {n}");
    }
}

#[test]
fn partitions_are_reverse_lexicographic() {
    for n in 1..=MAX_DEGREE {
        let list = partitions(n).unwrap();
        assert_eq!(list[0], Partition::symmetric(n));
        assert_eq!(*list.last().unwrap(), Partition::antisymmetric(n));
        assert!(list.windows(2).all(|w| w[0].parts() > w[1].parts()));
    }
}

#[test]
fn unsupported_degrees_are_rejected() {
    for n in [0, MAX_DEGREE + 1] {
        assert!(matches!(partitions(n), Err(Error::UnsupportedSize { .. })));
        assert!(matches!(character_table(n), Err(Error::UnsupportedSize { .. })));
    }
}

#[test]
fn partition_validation_and_parsing() {
    assert!(Partition::new(vec![1, 2]).is_err());
    assert!(Partition::new(vec![2, 0]).is_err());
    assert!(Partition::new(vec![]).is_err());
    assert_eq!(Partition::parse("[2,1]").unwrap(), p(&[2, 1]));
    assert_eq!(Partition::parse("3 1 1").unwrap(), p(&[3, 1, 1]));
    assert!(matches!(Partition::parse("[a]"), Err(Error::Parse(_))));
    assert_eq!(p(&[2, 1]).to_string(), "[2,1]");
    let err = p(&[2, 1]).check_degree(2).unwrap_err().to_string();
    assert!(err.contains("partition sums to 3, expected 2"), "{err}");
}

#[test]
fn hook_lengths_and_conjugates() {
    assert_eq!(p(&[2, 1]).dimension(), 2);
    assert_eq!(p(&[3, 1]).dimension(), 3);
    assert_eq!(p(&[2, 2]).dimension(), 2);
    assert_eq!(p(&[3, 2, 1]).dimension(), 16);
    assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
    assert_eq!(p(&[4]).conjugate(), Partition::antisymmetric(4));
}

#[test]
fn s2_characters() {
    let t = character_table(2).unwrap();
    let e = p(&[1, 1]);
    let swap = p(&[2]);
    assert_eq!(t.value(&p(&[2]), &e).unwrap(), 1);
    assert_eq!(t.value(&p(&[2]), &swap).unwrap(), 1);
    assert_eq!(t.value(&p(&[1, 1]), &e).unwrap(), 1);
    assert_eq!(t.value(&p(&[1, 1]), &swap).unwrap(), -1);
}

#[test]
fn s3_characters() {
    let t = character_table(3).unwrap();
    let (e, tr, cyc) = (p(&[1, 1, 1]), p(&[2, 1]), p(&[3]));
    for c in [&e, &tr, &cyc] {
        assert_eq!(t.value(&p(&[3]), c).unwrap(), 1);
    }
    assert_eq!(t.value(&p(&[2, 1]), &e).unwrap(), 2);
    assert_eq!(t.value(&p(&[2, 1]), &tr).unwrap(), 0);
    assert_eq!(t.value(&p(&[2, 1]), &cyc).unwrap(), -1);
    assert_eq!(t.class_sizes(), &[2, 3, 1]);
}

#[test]
fn character_orthogonality_is_exact() {
    for n in 1..=MAX_DEGREE {
        let t = character_table(n).unwrap();
        let order = factorial(n) as i64;
        let k = t.irreps().len();
        for a in 0..k {
            for b in 0..k {
                let expected = if a == b { order } else { 0 };
                assert_eq!(t.inner_product(a, b), expected, "n={n} rows {a},{b}");
            }
        }
        let identity = Partition::antisymmetric(n);
        let dims: i64 = t
            .irreps()
            .iter()
            .map(|l| t.value(l, &identity).unwrap().pow(2))
            .sum();
        assert_eq!(dims, order);
        assert_eq!(t.class_sizes().iter().sum::<u64>(), factorial(n));
    }
}

#[test]
fn characters_match_brute_force_class_functions() {
    // χ_λ(e) is the hook-length dimension; χ_[1^N] is the sign.
    for n in 1..=6 {
        let t = character_table(n).unwrap();
        for lambda in t.irreps() {
            assert_eq!(
                t.value(lambda, &Partition::antisymmetric(n)).unwrap(),
                lambda.dimension() as i64
            );
        }
        for g in all_permutations(n) {
            let rho = g.cycle_type();
            let sign = if (n - rho.parts().len()) % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.value(&Partition::antisymmetric(n), &rho).unwrap(), sign);
        }
    }
}

#[test]
fn character_table_csv_has_header_and_rows() {
    let mut buf = Vec::new();
    character_table(3).unwrap().write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("irrep"));
}

#[test]
fn permutations_compose_and_invert() {
    let all = all_permutations(4);
    assert_eq!(all.len(), 24);
    for g in &all {
        assert_eq!(g.compose(&g.inverse()), Permutation::identity(4));
        assert_eq!(g.cycle_type().degree(), 4);
    }
    assert!(Permutation::new(vec![0, 0]).is_err());
    let g = Permutation::new(vec![1, 2, 0]).unwrap();
    assert_eq!(g.act(&[5, 6, 7]), vec![7, 5, 6]);
    assert_eq!(g.cycle_type(), p(&[3]));
}

#[test]
fn permutation_matrices_form_a_representation() {
    for n in 2..=4 {
        let fock = harmonic_basis(n, 4, n as f64 * 0.5 + 3.0);
        let perms = all_permutations(n);
        let mats: Vec<Mat> = perms.iter().map(|g| permutation_matrix(g, &fock).unwrap()).collect();
        for (g, ug) in perms.iter().zip(&mats) {
            assert!(ug.iter().all(|&x| x == 0.0 || x == 1.0));
            let id = Mat::identity(fock.len(), fock.len());
            assert_eq!(ug * ug.transpose(), id);
            for (h, uh) in perms.iter().zip(&mats) {
                let ugh = permutation_matrix(&g.compose(h), &fock).unwrap();
                assert_eq!(ug * uh, ugh);
            }
        }
    }
}

#[test]
fn two_mode_pair_projectors() {
    let fock = harmonic_basis(2, 2, f64::INFINITY);
    assert_eq!(fock.len(), 4);
    let swap = permutation_matrix(&Permutation::new(vec![1, 0]).unwrap(), &fock).unwrap();
    let id = Mat::identity(4, 4);
    let bos = sector_projector(&Partition::symmetric(2), &fock).unwrap();
    assert!(max_abs(&(bos.matrix() - (&id + &swap) * 0.5)) < 1e-15);
    assert_eq!(bos.rank(), 3);
    let fer = sector_projector(&Partition::antisymmetric(2), &fock).unwrap();
    assert_eq!(fer.rank(), 1);
    let col = fer.basis().to_dense();
    let i01 = fock.index_of(&[0, 1]).unwrap();
    let i10 = fock.index_of(&[1, 0]).unwrap();
    assert!((col[(i01, 0)].abs() - 0.5f64.sqrt()).abs() < 1e-14);
    assert!((col[(i01, 0)] + col[(i10, 0)]).abs() < 1e-14);
}

/// Multiplicity of `λ` in the permutation representation on one orbit,
/// times `d_λ`: `d_λ · (1/N!) Σ_g χ_λ(g) · #{fixed points of g}`.
fn brute_force_orbit_rank(lambda: &Partition, key: &[usize]) -> usize {
    let n = key.len();
    let t = character_table(n).unwrap();
    let mut total: i64 = 0;
    let mut members: BTreeSet<Vec<usize>> = BTreeSet::new();
    for g in all_permutations(n) {
        members.insert(g.act(key));
    }
    for g in all_permutations(n) {
        let fixed = members.iter().filter(|m| g.act(m) == **m).count() as i64;
        total += t.value(lambda, &g.cycle_type()).unwrap() * fixed;
    }
    let mult = total / factorial(n) as i64;
    mult as usize * lambda.dimension() as usize
}

#[test]
fn three_particle_orbit_ranks() {
    let fock = harmonic_basis(3, 7, 7.5);
    let sizes: BTreeSet<usize> = fock.orbits().iter().map(|o| o.members.len()).collect();
    assert_eq!(sizes, BTreeSet::from([1, 3, 6]));
    for lambda in partitions(3).unwrap() {
        let proj = sector_projector(&lambda, &fock).unwrap();
        for (o, orbit) in fock.orbits().iter().enumerate() {
            let expected = brute_force_orbit_rank(&lambda, &orbit.key);
            assert_eq!(proj.orbit_ranks()[o], expected, "{lambda} on {:?}", orbit.key);
        }
    }
    let distinct = fock
        .orbits()
        .iter()
        .position(|o| o.key == vec![0, 1, 2])
        .unwrap();
    let ranks: Vec<usize> = partitions(3)
        .unwrap()
        .iter()
        .map(|l| sector_projector(l, &fock).unwrap().orbit_ranks()[distinct])
        .collect();
    assert_eq!(ranks, vec![1, 4, 1]);
}

#[test]
fn bosonic_and_fermionic_orbit_counting() {
    for n in 2..=4 {
        let fock = harmonic_basis(n, 6, n as f64 * 0.5 + 4.0);
        let bos = sector_projector(&Partition::symmetric(n), &fock).unwrap();
        let fer = sector_projector(&Partition::antisymmetric(n), &fock).unwrap();
        for (o, orbit) in fock.orbits().iter().enumerate() {
            assert_eq!(bos.orbit_ranks()[o], 1);
            let distinct = orbit.key.windows(2).all(|w| w[0] != w[1]);
            assert_eq!(fer.orbit_ranks()[o], usize::from(distinct));
        }
    }
}

#[test]
fn projector_algebra_holds() {
    for (n, e_max) in [(2, 12.0), (3, 7.5), (4, 6.0)] {
        let fock = harmonic_basis(n, 12, e_max);
        assert!(fock.len() <= 300);
        let dim = fock.len();
        let projs: Vec<SectorProjector> = partitions(n)
            .unwrap()
            .iter()
            .map(|l| sector_projector(l, &fock).unwrap())
            .collect();
        let mut sum = Mat::zeros(dim, dim);
        let mut total_rank = 0;
        for (a, pa) in projs.iter().enumerate() {
            let m = pa.matrix();
            assert!(max_abs(&(m * m - m)) < 1e-10);
            assert!(max_abs(&(m - m.transpose())) < 1e-10);
            assert_eq!(pa.rank(), pa.trace().round() as usize);
            for pb in &projs[a + 1..] {
                assert!(max_abs(&(m * pb.matrix())) < 1e-10);
            }
            sum += m;
            total_rank += pa.rank();
            let b = pa.basis().to_dense();
            assert!(max_abs(&(b.transpose() * &b - Mat::identity(b.ncols(), b.ncols()))) < 1e-10);
            assert!(max_abs(&(m * &b - &b)) < 1e-10);
        }
        assert!(max_abs(&(sum - Mat::identity(dim, dim))) < 1e-10);
        assert_eq!(total_rank, dim);
    }
}

#[test]
fn projector_degree_mismatch() {
    let fock = harmonic_basis(2, 3, 4.0);
    assert!(matches!(
        sector_projector(&p(&[2, 1]), &fock),
        Err(Error::Mismatch(_))
    ));
}

#[test]
fn parity_refinement_partitions_sector() {
    let fock = harmonic_basis(3, 8, 8.5);
    let refl = reflection_operator(&fock).unwrap();
    for lambda in partitions(3).unwrap() {
        let proj = sector_projector(&lambda, &fock).unwrap();
        let split = parity_split(&proj, &fock).unwrap();
        assert_eq!(split.even.len() + split.odd.len(), proj.rank());
        let even = split.even.to_dense();
        let odd = split.odd.to_dense();
        assert!(max_abs(&(&refl * &even - &even)) < 1e-14);
        assert!(max_abs(&(&refl * &odd + &odd)) < 1e-14);
    }
    // reflection commutes with every permutation
    for g in all_permutations(3) {
        let u = permutation_matrix(&g, &fock).unwrap();
        assert!(max_abs(&(&u * &refl - &refl * &u)) == 0.0);
    }
}

#[test]
fn parity_needs_symmetric_trap() {
    use crate::single_particle::CustomPotential;
    let pot = CustomPotential::from_fn(|x| 0.5 * x * x + 0.3 * x, -8.0, 8.0, 801).unwrap();
    let sp = crate::single_particle::solve_trap_with(
        &TrapPotential::custom(pot),
        3,
        &crate::single_particle::SolveOptions { order: Some(800) },
    )
    .unwrap();
    let fock = FockBasis::new(Arc::new(sp), 2, f64::INFINITY).unwrap();
    assert!(matches!(reflection_operator(&fock), Err(Error::UnsupportedTrap(_))));
    let proj = sector_projector(&Partition::symmetric(2), &fock).unwrap();
    assert!(matches!(parity_split(&proj, &fock), Err(Error::UnsupportedTrap(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projectors_resolve_identity(n in 2usize..=4, extra in 0usize..=3) {
        let fock = harmonic_basis(n, 6, n as f64 * 0.5 + extra as f64);
        let dim = fock.len();
        let mut sum = Mat::zeros(dim, dim);
        for l in partitions(n).unwrap() {
            let m = sector_projector(&l, &fock).unwrap();
            prop_assert!(max_abs(&(m.matrix() * m.matrix() - m.matrix())) < 1e-10);
            sum += m.matrix();
        }
        prop_assert!(max_abs(&(sum - Mat::identity(dim, dim))) < 1e-10);
    }

    #[test]
    fn composition_is_associative(a in 0usize..24, b in 0usize..24, c in 0usize..24) {
        let all = all_permutations(4);
        let (x, y, z) = (&all[a], &all[b], &all[c]);
        prop_assert_eq!(x.compose(y).compose(z), x.compose(&y.compose(z)));
    }
}
